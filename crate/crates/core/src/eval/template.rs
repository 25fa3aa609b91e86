//! Template argument binding and monomorphization.

use super::{EResult, Evaluator};
use crate::diag::Diagnostic;
use crate::model::build::{mangle, new_impl, new_streamlet};
use crate::model::{read, ArgValue, Binding, Entity, Implementation, NameKind, ScopeId, Shared, Streamlet};
use crate::syntax::{ExprKind, ItemRef, ParamKind, TemplateArg, TemplateParam};
use crate::value::{BasicKind, ImplRef, Value};

impl<'p> Evaluator<'p> {
    /// Resolve a streamlet reference, instantiating a template when arguments are given.
    pub(crate) fn resolve_streamlet(&self, scope: ScopeId, r: &ItemRef) -> EResult<Shared<Streamlet>> {
        let file = self.file_of(scope);
        let found = self.project.resolve_name(scope, r.package.as_deref(), &r.name, NameKind::Streamlet).map_err(|d| d.at(&file, r.span))?;
        let Entity::Streamlet(s) = found.entity else { unreachable!() };
        let (params, decl, pkg) = {
            let g = read(&s);
            (g.params.clone(), g.decl.clone(), g.package.clone())
        };
        match &r.args {
            None if !params.is_empty() => {
                Err(Diagnostic::resolution(format!("streamlet template `{}` needs template arguments", r.name)).at(&file, r.span))
            }
            None => Ok(s),
            Some(_) if params.is_empty() => {
                Err(Diagnostic::resolution(format!("streamlet `{}` is not a template", r.name)).at(&file, r.span))
            }
            Some(args) => {
                let bindings = self.bind_args(scope, &pkg, &params, args, r).map_err(|d| d.at(&file, r.span))?;
                let pscope = self.project.package_scope(&pkg).expect("package exists");
                let name = mangle(&r.name, &bindings);
                let mut d = pscope.write();
                if let Some(existing) = d.streamlets.get(&name) {
                    return Ok(existing.clone());
                }
                let st = new_streamlet(self.project, &pscope, &name, &decl, Some(&bindings))?;
                let sh = crate::model::shared(st);
                d.streamlets.insert(name, sh.clone());
                Ok(sh)
            }
        }
    }

    /// Resolve an implementation reference: a declared implementation, a template
    /// instantiation, or a variable bound to an `impl of` argument.
    pub(crate) fn resolve_impl(&self, scope: ScopeId, r: &ItemRef) -> EResult<Shared<Implementation>> {
        let file = self.file_of(scope);
        let found = self.project.resolve_name(scope, r.package.as_deref(), &r.name, NameKind::Implementation);
        let imp = match found {
            Ok(f) => {
                let Entity::Implementation(i) = f.entity else { unreachable!() };
                i
            }
            Err(e) => {
                if r.args.is_some() {
                    return Err(e.at(&file, r.span));
                }
                match self.project.resolve_name(scope, r.package.as_deref(), &r.name, NameKind::Variable) {
                    Ok(_) => match self.lookup_var(scope, r.package.as_deref(), &r.name).map_err(|d| d.at(&file, r.span))? {
                        Value::Impl(ir) => return self.impl_by_ref(&ir).map_err(|d| d.at(&file, r.span)),
                        v => {
                            return Err(Diagnostic::resolution(format!(
                                "`{}` is {}, not an implementation",
                                r.name,
                                v.kind_name()
                            ))
                            .at(&file, r.span))
                        }
                    },
                    Err(_) => return Err(e.at(&file, r.span)),
                }
            }
        };
        let (params, body, pkg) = {
            let g = read(&imp);
            (g.params.clone(), g.body.clone(), g.package.clone())
        };
        match &r.args {
            None if !params.is_empty() => {
                Err(Diagnostic::resolution(format!("implementation template `{}` needs template arguments", r.name)).at(&file, r.span))
            }
            None => Ok(imp),
            Some(_) if params.is_empty() => {
                Err(Diagnostic::resolution(format!("implementation `{}` is not a template", r.name)).at(&file, r.span))
            }
            Some(args) => {
                let crate::model::ImplBody::Decl(decl) = body else {
                    unreachable!("alias implementations have no parameters")
                };
                let bindings = self.bind_args(scope, &pkg, &params, args, r).map_err(|d| d.at(&file, r.span))?;
                let pscope = self.project.package_scope(&pkg).expect("package exists");
                let name = mangle(&r.name, &bindings);
                let mut d = pscope.write();
                if let Some(existing) = d.impls.get(&name) {
                    return Ok(existing.clone());
                }
                let im = new_impl(self.project, &pscope, &name, &decl, Some(&bindings))?;
                let sh = crate::model::shared(im);
                d.impls.insert(name, sh.clone());
                Ok(sh)
            }
        }
    }

    fn impl_by_ref(&self, r: &ImplRef) -> EResult<Shared<Implementation>> {
        self.project
            .implementation(r)
            .ok_or_else(|| Diagnostic::resolution(format!("implementation `{}.{}` does not exist", r.package, r.name)))
    }

    /// Evaluate an implementation and follow aliases to the final declared one.
    pub(crate) fn final_impl(&self, imp: &Shared<Implementation>) -> EResult<(ImplRef, Shared<Implementation>)> {
        self.eval_impl(imp)?;
        let g = read(imp);
        match &g.alias_of {
            Some(t) => {
                let t = t.clone();
                drop(g);
                Ok((t.clone(), self.impl_by_ref(&t)?))
            }
            None => Ok((g.reference(), imp.clone())),
        }
    }

    /// Check arity and kinds; evaluate every argument in the caller's scope.
    fn bind_args(
        &self,
        scope: ScopeId,
        template_pkg: &str,
        params: &[TemplateParam],
        args: &[TemplateArg],
        r: &ItemRef,
    ) -> EResult<Vec<Binding>> {
        if params.len() != args.len() {
            return Err(Diagnostic::ty(format!(
                "template `{}` takes {} argument(s), {} given",
                r.name,
                params.len(),
                args.len()
            )));
        }
        let mut out = Vec::new();
        for (p, a) in params.iter().zip(args) {
            let arg = match (&p.kind, a) {
                (ParamKind::Basic(k), TemplateArg::Expr(e)) => {
                    let v = self.eval_expr(scope, e)?;
                    let v = match (k, v) {
                        (BasicKind::Float, Value::Int(i)) => Value::Float(i as f64),
                        (BasicKind::ClockDomain, Value::Str(s)) => Value::ClockDomain(s),
                        (k, v) if v.basic_kind() == Some(*k) => v,
                        (k, v) => {
                            return Err(Diagnostic::ty(format!(
                                "template parameter `{}` expects {k}, got {}",
                                p.name,
                                v.kind_name()
                            )))
                        }
                    };
                    ArgValue::Value(v)
                }
                (ParamKind::Type, TemplateArg::Type(t)) => ArgValue::Type(self.eval_type_expr(scope, t, None)?),
                (ParamKind::Type, TemplateArg::Expr(e)) => {
                    let hint = match &e.kind {
                        ExprKind::Ident(n) => format!("; write `type {n}`"),
                        _ => String::new(),
                    };
                    return Err(Diagnostic::ty(format!(
                        "template parameter `{}` expects a logical type; mark it with `type`{hint}",
                        p.name
                    )));
                }
                (ParamKind::ImplOf(s), TemplateArg::Impl(name, span)) => {
                    let ir = ItemRef { package: None, name: name.clone(), args: None, span: *span, raw: name.clone() };
                    let imp = self.resolve_impl(scope, &ir)?;
                    let (fref, fimp) = self.final_impl(&imp)?;
                    let got = read(&fimp).streamlet.clone();
                    let ts = self.project.package_scope(template_pkg).expect("package exists").id;
                    let want_ref = ItemRef { package: None, name: s.clone(), args: None, span: p.span, raw: s.clone() };
                    let want = self.resolve_streamlet(ts, &want_ref)?;
                    let want = {
                        let g = read(&want);
                        ImplRef::new(&g.package, &g.name)
                    };
                    if got.as_ref() != Some(&want) {
                        return Err(Diagnostic::ty(format!(
                            "template parameter `{}` expects an implementation of `{}`, but `{name}` implements `{}`",
                            p.name,
                            want.name,
                            got.map_or_else(|| "nothing".to_string(), |g| g.name)
                        )));
                    }
                    ArgValue::Impl(fref)
                }
                (ParamKind::ImplOf(_), _) => {
                    return Err(Diagnostic::ty(format!(
                        "template parameter `{}` expects an implementation; mark it with `impl`",
                        p.name
                    )))
                }
                (_, TemplateArg::Impl(name, _)) => {
                    return Err(Diagnostic::ty(format!(
                        "template parameter `{}` does not take an implementation, got `impl {name}`",
                        p.name
                    )))
                }
                (ParamKind::Basic(_), TemplateArg::Type(t)) => {
                    return Err(Diagnostic::ty(format!(
                        "template parameter `{}` expects a value, got logical type `{}`",
                        p.name,
                        t.raw.trim()
                    )))
                }
            };
            out.push(Binding { param: p.clone(), arg });
        }
        Ok(out)
    }
}

impl<'p> Evaluator<'p> {
    /// Instantiate implementation template `pkg.name` with already-evaluated arguments.
    pub fn instantiate_impl_with(&self, pkg: &str, name: &str, args: Vec<ArgValue>) -> EResult<Shared<Implementation>> {
        let pscope = self.project.package_scope(pkg).ok_or_else(|| Diagnostic::resolution(format!("package `{pkg}` does not exist")))?;
        let template = pscope
            .read()
            .impls
            .get(name)
            .cloned()
            .ok_or_else(|| Diagnostic::resolution(format!("implementation template `{pkg}.{name}` does not exist")))?;
        let (params, body) = {
            let g = read(&template);
            (g.params.clone(), g.body.clone())
        };
        let crate::model::ImplBody::Decl(decl) = body else {
            return Err(Diagnostic::resolution(format!("`{name}` is not an implementation template")));
        };
        if params.len() != args.len() {
            return Err(Diagnostic::ty(format!("template `{name}` takes {} argument(s), {} given", params.len(), args.len())));
        }
        let bindings: Vec<Binding> = params.into_iter().zip(args).map(|(param, arg)| Binding { param, arg }).collect();
        let mangled = mangle(name, &bindings);
        let imp = {
            let mut d = pscope.write();
            match d.impls.get(&mangled) {
                Some(e) => e.clone(),
                None => {
                    let sh = crate::model::shared(new_impl(self.project, &pscope, &mangled, &decl, Some(&bindings))?);
                    d.impls.insert(mangled, sh.clone());
                    sh
                }
            }
        };
        self.eval_impl(&imp)?;
        Ok(imp)
    }
}
