//! Generative `if`/`for` expansion into the enclosing implementation scope.

use super::{EResult, Evaluator};
use crate::diag::Diagnostic;
use crate::model::build::{declare_const, declare_type_decl};
use crate::model::{Connection, EvalState, Instance, ScopeId};
use crate::syntax::{
    ConnDecl, EndDecl, Expr, ExprKind, ImplDecl, ImplItem, InstanceDecl, ItemRef, PropValue, TemplateArg, TypeExpr,
    TypeExprKind,
};
use crate::value::Value;

type Env = Vec<(String, Value)>;

fn lookup<'a>(env: &'a Env, name: &str) -> Option<&'a Value> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
}

/// Replace `{{var}}` segments with the bound value's text.
pub fn interpolate(text: &str, env: &[(String, Value)]) -> Result<String, String> {
    let env: Env = env.to_vec();
    let mut out = String::new();
    let mut rest = text;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find("}}").ok_or_else(|| format!("unterminated `{{{{` in `{text}`"))?;
        let var = after[..end].trim();
        match lookup(&env, var) {
            Some(Value::Int(i)) => out.push_str(&i.to_string()),
            Some(Value::Str(s)) => out.push_str(s),
            Some(v) => return Err(format!("`{{{{{var}}}}}` in `{text}` is {}; only int and str can form identifiers", v.kind_name())),
            None => return Err(format!("unbound variable `{var}` in `{text}`")),
        }
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

fn subst(e: &Expr, env: &Env) -> Expr {
    if env.is_empty() {
        return e.clone();
    }
    let b = |x: &Expr| Box::new(subst(x, env));
    let kind = match &e.kind {
        ExprKind::Ident(n) => match lookup(env, n) {
            Some(v) => ExprKind::Value(v.clone()),
            None => ExprKind::Ident(n.clone()),
        },
        ExprKind::Array(items) => ExprKind::Array(items.iter().map(|x| subst(x, env)).collect()),
        ExprKind::Range(a, s, c) => ExprKind::Range(b(a), b(s), b(c)),
        ExprKind::Unary(op, x) => ExprKind::Unary(*op, b(x)),
        ExprKind::Binary(op, x, y) => ExprKind::Binary(*op, b(x), b(y)),
        ExprKind::Call(f, x) => ExprKind::Call(*f, b(x)),
        ExprKind::Log(x, y) => ExprKind::Log(b(x), b(y)),
        ExprKind::Index(x, y) => ExprKind::Index(b(x), b(y)),
        ExprKind::TypeMember(t, m) => ExprKind::TypeMember(Box::new(subst_type(t, env)), m.clone()),
        ExprKind::StreamletMember(r, m) => ExprKind::StreamletMember(subst_ref(r, env), m.clone()),
        ExprKind::ImplMember(r, m) => ExprKind::ImplMember(subst_ref(r, env), m.clone()),
        k => k.clone(),
    };
    Expr::new(kind, e.span)
}

fn subst_type(t: &TypeExpr, env: &Env) -> TypeExpr {
    let kind = match &t.kind {
        TypeExprKind::Bit(w) => TypeExprKind::Bit(subst(w, env)),
        TypeExprKind::Stream { elem, props } => TypeExprKind::Stream {
            elem: Box::new(subst_type(elem, env)),
            props: props
                .iter()
                .map(|p| {
                    let mut p = p.clone();
                    p.value = match &p.value {
                        PropValue::Expr(e) => PropValue::Expr(subst(e, env)),
                        PropValue::Type(t) => PropValue::Type(subst_type(t, env)),
                    };
                    p
                })
                .collect(),
        },
        TypeExprKind::Member { owner_kind, owner, member } => {
            TypeExprKind::Member { owner_kind: *owner_kind, owner: subst_ref(owner, env), member: member.clone() }
        }
        k => k.clone(),
    };
    TypeExpr { kind, span: t.span, raw: t.raw.clone() }
}

fn subst_ref(r: &ItemRef, env: &Env) -> ItemRef {
    let mut r = r.clone();
    if let Some(args) = &mut r.args {
        for a in args.iter_mut() {
            *a = match a {
                TemplateArg::Expr(e) => TemplateArg::Expr(subst(e, env)),
                TemplateArg::Type(t) => TemplateArg::Type(subst_type(t, env)),
                TemplateArg::Impl(n, s) => TemplateArg::Impl(n.clone(), *s),
            };
        }
    }
    r
}

struct Ctx {
    scope: ScopeId,
    file: String,
    env: Env,
    suffix: String,
    in_for: bool,
}

impl<'p> Evaluator<'p> {
    /// Dissolve the generative blocks of an implementation into its own scope.
    pub(crate) fn expand(&self, scope: ScopeId, decl: &ImplDecl) -> EResult<()> {
        let file = self.file_of(scope);
        let has_generative = decl.items.iter().any(|i| matches!(i, ImplItem::If(_) | ImplItem::For(_)));
        if !has_generative {
            return Ok(());
        }
        let ctx = Ctx { scope, file, env: Vec::new(), suffix: String::new(), in_for: false };
        self.expand_items(&decl.items, ctx, true)?;
        self.project.scope(scope).write().generative.clear();
        Ok(())
    }

    fn expand_items(&self, items: &[ImplItem], mut ctx: Ctx, top: bool) -> EResult<()> {
        let scope = self.project.scope(ctx.scope);
        for item in items {
            match item {
                ImplItem::Const(c) if !top => {
                    if ctx.in_for {
                        let v = match &c.value {
                            Some(e) => self.eval_expr(ctx.scope, &subst(e, &ctx.env))?,
                            None => {
                                return Err(Diagnostic::ty(format!("constant `{}` inside a for body needs a value", c.name))
                                    .at(&ctx.file, c.span))
                            }
                        };
                        ctx.env.push((c.name.clone(), v));
                    } else {
                        declare_const(&scope, c, &ctx.file)?;
                    }
                }
                ImplItem::Type(t) if !top => declare_type_decl(self.project, &scope, t, &ctx.file)?,
                ImplItem::Assert(a) if !top => {
                    let mut a = a.clone();
                    a.expr = subst(&a.expr, &ctx.env);
                    self.check_assert(ctx.scope, &a)?;
                }
                ImplItem::Instance(i) if !top => self.expand_instance(&ctx, i)?,
                ImplItem::Connection(c) if !top => self.expand_connection(&ctx, c)?,
                ImplItem::If(b) => {
                    let mut chosen = None;
                    for (cond, raw, body, _) in &b.branches {
                        match self.eval_expr(ctx.scope, &subst(cond, &ctx.env))? {
                            Value::Bool(true) => {
                                chosen = Some(body);
                                break;
                            }
                            Value::Bool(false) => {}
                            v => {
                                return Err(Diagnostic::ty(format!(
                                    "if condition `{}` must be a bool, got {}",
                                    raw.trim(),
                                    v.kind_name()
                                ))
                                .at(&ctx.file, cond.span))
                            }
                        }
                    }
                    if chosen.is_none() {
                        chosen = b.otherwise.as_ref().map(|(body, _)| body);
                    }
                    if let Some(body) = chosen {
                        let sub = Ctx { scope: ctx.scope, file: ctx.file.clone(), env: ctx.env.clone(), suffix: ctx.suffix.clone(), in_for: ctx.in_for };
                        self.expand_items(body, sub, false)?;
                    }
                }
                ImplItem::For(f) => {
                    let items = match self.eval_expr(ctx.scope, &subst(&f.iter, &ctx.env))? {
                        Value::Array(items) => items,
                        v => {
                            return Err(Diagnostic::ty(format!(
                                "for loop over `{}` needs an array, got {}",
                                f.iter_raw.trim(),
                                v.kind_name()
                            ))
                            .at(&ctx.file, f.iter.span))
                        }
                    };
                    for (k, v) in items.into_iter().enumerate() {
                        let mut env = ctx.env.clone();
                        env.push((f.var.clone(), v));
                        let sub = Ctx { scope: ctx.scope, file: ctx.file.clone(), env, suffix: format!("{}@{k}", ctx.suffix), in_for: true };
                        self.expand_items(&f.body, sub, false)?;
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn expand_instance(&self, ctx: &Ctx, i: &InstanceDecl) -> EResult<()> {
        if ctx.in_for && !i.name.contains("{{") {
            return Err(Diagnostic::resolution(format!(
                "instance `{}` cannot be declared in a for scope; use an interpolated name such as `{}_{{{{i}}}}`",
                i.name, i.name
            ))
            .at(&ctx.file, i.span));
        }
        let name = interpolate(&i.name, &ctx.env).map_err(|m| Diagnostic::resolution(m).at(&ctx.file, i.span))?;
        let decl = InstanceDecl {
            name: name.clone(),
            target: subst_ref(&i.target, &ctx.env),
            array: i.array.as_ref().map(|e| subst(e, &ctx.env)),
            array_raw: i.array_raw.clone(),
            span: i.span,
        };
        self.project
            .scope(ctx.scope)
            .declare_instance(Instance {
                name,
                target_raw: i.target.raw.clone(),
                array_raw: i.array_raw.clone(),
                decl: Some(decl),
                file: ctx.file.clone(),
                state: EvalState::NotInferred,
            })
            .map_err(|e| e.at(&ctx.file, i.span))
    }

    fn expand_connection(&self, ctx: &Ctx, c: &ConnDecl) -> EResult<()> {
        let loc = |m: String| Diagnostic::resolution(m).at(&ctx.file, c.span);
        let end = |e: &EndDecl| -> EResult<EndDecl> {
            Ok(EndDecl {
                owner: match &e.owner {
                    Some((n, idx)) => Some((interpolate(n, &ctx.env).map_err(loc)?, idx.as_ref().map(|x| subst(x, &ctx.env)))),
                    None => None,
                },
                port: interpolate(&e.port, &ctx.env).map_err(loc)?,
                port_index: e.port_index.as_ref().map(|x| subst(x, &ctx.env)),
                owner_raw: interpolate(&e.owner_raw, &ctx.env).map_err(loc)?,
                port_raw: interpolate(&e.port_raw, &ctx.env).map_err(loc)?,
                span: e.span,
            })
        };
        let decl = ConnDecl {
            src: end(&c.src)?,
            dst: end(&c.dst)?,
            fifo: c.fifo.as_ref().map(|x| subst(x, &ctx.env)),
            fifo_raw: c.fifo_raw.clone(),
            name: format!("{}{}", c.name, ctx.suffix),
            no_strict: c.no_strict,
            span: c.span,
        };
        self.project
            .scope(ctx.scope)
            .declare_connection(Connection::from_decl(&decl, &ctx.file))
            .map_err(|e| e.at(&ctx.file, c.span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let env = vec![("i".to_string(), Value::Int(3)), ("s".to_string(), Value::Str("ab".into()))];
        assert_eq!(interpolate("bypass_{{i}}", &env).unwrap(), "bypass_3");
        assert_eq!(interpolate("x_{{s}}_{{i}}", &env).unwrap(), "x_ab_3");
        assert!(interpolate("b_{{j}}", &env).unwrap_err().contains("unbound"));
        assert!(interpolate("b_{{f}}", &[("f".into(), Value::Float(1.0))]).is_err());
        assert_eq!(interpolate("plain", &env).unwrap(), "plain");
    }

    #[test]
    fn shadowing_uses_innermost() {
        let env = vec![("i".to_string(), Value::Int(1)), ("i".to_string(), Value::Int(2))];
        assert_eq!(interpolate("{{i}}", &env).unwrap(), "2");
    }
}
