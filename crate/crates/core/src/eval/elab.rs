//! Streamlets, implementations, instances and connections.

use super::coord::{Cat, Key};
use super::{cached, store, EResult, Evaluator};
use crate::diag::Diagnostic;
use crate::model::{
    read, write, Clock, Connection, EvalState, ImplBody, Implementation, InstanceInfo, NameKind, Owner, Port, PortInfo,
    ResolvedConn, ResolvedEnd, ScopeId, Shared, Streamlet,
};
use crate::syntax::{ClockRef, EndDecl, Expr};
use crate::value::{ImplRef, Value};

impl<'p> Evaluator<'p> {
    fn package_scope_id(&self, pkg: &str) -> ScopeId {
        self.project.package_scope(pkg).expect("package exists").id
    }

    /// Evaluate every user variable and type of `scope`, then its assertions.
    fn eval_locals(&self, scope: ScopeId) -> EResult<()> {
        let s = self.project.scope(scope);
        let (vars, types, asserts) = {
            let d = s.read();
            (
                d.vars.values().filter(|v| !read(v).is_magic()).cloned().collect::<Vec<_>>(),
                d.types.values().cloned().collect::<Vec<_>>(),
                d.asserts.clone(),
            )
        };
        for v in &vars {
            self.eval_var(scope, v)?;
        }
        for t in &types {
            self.eval_type_entry(scope, t)?;
        }
        for a in &asserts {
            self.check_assert(scope, a)?;
        }
        Ok(())
    }

    pub fn eval_streamlet(&self, s: &Shared<Streamlet>) -> EResult<()> {
        let (name, pkg) = {
            let g = read(s);
            (g.name.clone(), g.package.clone())
        };
        self.once(
            Key::new(self.package_scope_id(&pkg), Cat::Streamlet, &name),
            || cached(&read(s).state),
            || self.compute_streamlet(s),
            |r| store(&mut write(s).state, r),
        )
    }

    fn compute_streamlet(&self, s: &Shared<Streamlet>) -> EResult<()> {
        let st = read(s).clone();
        if st.is_template() {
            return Err(Diagnostic::ty(format!("streamlet template `{}` cannot be evaluated before instantiation", st.name))
                .at(&st.file, st.decl.span));
        }
        self.eval_locals(st.scope)?;
        let scope = self.project.scope(st.scope);
        let ports: Vec<Port> = scope.read().ports.values().cloned().collect();
        for p in ports {
            let r = self.eval_port(st.scope, &p);
            if let Some(x) = scope.write().ports.get_mut(&p.name) {
                store(&mut x.state, &r);
            }
            r?;
        }
        Ok(())
    }

    fn eval_port(&self, scope: ScopeId, p: &Port) -> EResult<PortInfo> {
        let d = &p.decl;
        let ty = self.eval_type_expr(scope, &d.ty, None)?;
        if !ty.is_stream() {
            return Err(Diagnostic::ty(format!("port `{}` must have a Stream type, got {}", p.name, ty.short())).at(&p.file, d.ty.span));
        }
        let array = self.array_size(scope, d.array.as_ref())?;
        let clock = match &d.clock {
            None => Clock::Default,
            Some(ClockRef::Literal(s)) => Clock::Domain(s.clone()),
            Some(ClockRef::Var(n)) => match self.lookup_var(scope, None, n).map_err(|e| e.at(&p.file, d.span))? {
                Value::ClockDomain(c) => Clock::Domain(c),
                v => {
                    return Err(Diagnostic::ty(format!("clockdomain of port `{}` is {}, not a clockdomain", p.name, v.kind_name()))
                        .at(&p.file, d.span))
                }
            },
        };
        Ok(PortInfo { ty, dir: d.dir, array, clock })
    }

    fn array_size(&self, scope: ScopeId, e: Option<&Expr>) -> EResult<Option<i64>> {
        match e {
            None => Ok(None),
            Some(e) => match self.eval_expr(scope, e)? {
                Value::Int(n) if n >= 1 => Ok(Some(n)),
                v => Err(Diagnostic::ty(format!("array size must be an int of at least 1, got {}", v.render()))
                    .at(&self.file_of(scope), e.span)),
            },
        }
    }

    pub fn eval_impl(&self, i: &Shared<Implementation>) -> EResult<()> {
        let (name, pkg) = {
            let g = read(i);
            (g.name.clone(), g.package.clone())
        };
        self.once(
            Key::new(self.package_scope_id(&pkg), Cat::Impl, &name),
            || cached(&read(i).state),
            || self.compute_impl(i),
            |r| store(&mut write(i).state, r),
        )
    }

    fn compute_impl(&self, i: &Shared<Implementation>) -> EResult<()> {
        let imp = read(i).clone();
        let pscope = self.package_scope_id(&imp.package);
        match &imp.body {
            ImplBody::Alias(a) => {
                let target = self.resolve_impl(pscope, &a.target)?;
                let (fref, fimp) = self.final_impl(&target)?;
                let sl = read(&fimp).streamlet.clone();
                let mut g = write(i);
                g.alias_of = Some(fref);
                g.streamlet = sl;
                Ok(())
            }
            ImplBody::Decl(d) => {
                if imp.is_template() {
                    return Err(Diagnostic::ty(format!(
                        "implementation template `{}` cannot be evaluated before instantiation",
                        imp.name
                    ))
                    .at(&imp.file, d.span));
                }
                let scope = imp.scope.expect("declared implementations have a scope");
                let st = self.resolve_streamlet(scope, &d.of)?;
                self.eval_streamlet(&st)?;
                let sref = {
                    let g = read(&st);
                    ImplRef::new(&g.package, &g.name)
                };
                write(i).streamlet = Some(sref.clone());
                self.eval_locals(scope)?;
                if !d.external {
                    self.expand(scope, d)?;
                }
                self.eval_instances(scope)?;
                self.eval_connections(scope, &sref)?;
                Ok(())
            }
        }
    }

    fn eval_instances(&self, scope: ScopeId) -> EResult<()> {
        let s = self.project.scope(scope);
        let insts: Vec<_> = s.read().instances.values().cloned().collect();
        for inst in insts {
            if !matches!(inst.state, EvalState::NotInferred) {
                continue;
            }
            let Some(decl) = &inst.decl else { continue };
            let r = (|| {
                if inst.name.contains("{{") {
                    return Err(Diagnostic::resolution(format!(
                        "unbound variable in instance name `{}`; interpolation needs an enclosing for loop",
                        inst.name
                    )));
                }
                let target = self.resolve_impl(scope, &decl.target)?;
                let (fref, _) = self.final_impl(&target)?;
                let array = self.array_size(scope, decl.array.as_ref())?;
                Ok(InstanceInfo { target: fref, array })
            })()
            .map_err(|e: Diagnostic| e.at(&inst.file, decl.span));
            if let Some(x) = s.write().instances.get_mut(&inst.name) {
                store(&mut x.state, &r);
            }
            r?;
        }
        Ok(())
    }

    fn eval_connections(&self, scope: ScopeId, sref: &ImplRef) -> EResult<()> {
        let s = self.project.scope(scope);
        let conns: Vec<Connection> = s.read().connections.clone();
        for (k, c) in conns.iter().enumerate() {
            if !matches!(c.state, EvalState::NotInferred) {
                continue;
            }
            let Some(d) = &c.decl else { continue };
            let r = (|| {
                let src = self.resolve_end(scope, sref, &d.src)?;
                let dst = self.resolve_end(scope, sref, &d.dst)?;
                let fifo = match &d.fifo {
                    None => 0,
                    Some(e) => match self.eval_expr(scope, e)? {
                        Value::Int(n) if n >= 0 => n,
                        v => return Err(Diagnostic::ty(format!("fifo depth must be a non-negative int, got {}", v.render()))),
                    },
                };
                Ok(ResolvedConn { src, dst, fifo })
            })()
            .map_err(|e: Diagnostic| e.at(&c.file, d.span));
            if let Some(x) = s.write().connections.get_mut(k) {
                store(&mut x.state, &r);
            }
            r?;
        }
        Ok(())
    }

    fn index_value(&self, scope: ScopeId, e: Option<&Expr>) -> EResult<Option<i64>> {
        match e {
            None => Ok(None),
            Some(e) => match self.eval_expr(scope, e)? {
                Value::Int(n) => Ok(Some(n)),
                v => Err(Diagnostic::ty(format!("array index must be an int, got {}", v.kind_name())).at(&self.file_of(scope), e.span)),
            },
        }
    }

    fn resolve_end(&self, scope: ScopeId, self_streamlet: &ImplRef, e: &EndDecl) -> EResult<ResolvedEnd> {
        let (owner, streamlet) = match &e.owner {
            None => (Owner::This, self_streamlet.clone()),
            Some((name, idx)) => {
                let inst = self
                    .project
                    .resolve_name(scope, None, name, NameKind::Instance)
                    .map_err(|d| d.at(&self.file_of(scope), e.span))?;
                let crate::model::Entity::Instance(inst) = inst.entity else { unreachable!() };
                let info = inst
                    .state
                    .value()
                    .cloned()
                    .ok_or_else(|| Diagnostic::resolution(format!("instance `{name}` is not evaluated")))?;
                let idx = self.index_value(scope, idx.as_ref())?;
                check_index("instance", name, info.array, idx)?;
                let target = self
                    .project
                    .implementation(&info.target)
                    .ok_or_else(|| Diagnostic::resolution(format!("implementation `{}` does not exist", info.target.name)))?;
                let sl = read(&target)
                    .streamlet
                    .clone()
                    .ok_or_else(|| Diagnostic::resolution(format!("implementation `{}` has no streamlet", info.target.name)))?;
                (Owner::Instance(name.clone(), idx), sl)
            }
        };
        let st = self
            .project
            .streamlet(&streamlet)
            .ok_or_else(|| Diagnostic::resolution(format!("streamlet `{}` does not exist", streamlet.name)))?;
        let sscope = self.project.scope(read(&st).scope);
        let port = sscope.read().ports.get(&e.port).cloned();
        let Some(port) = port else {
            let who = match &owner {
                Owner::This => "this implementation".to_string(),
                Owner::Instance(n, _) => format!("instance `{n}`"),
            };
            return Err(Diagnostic::resolution(format!(
                "cannot find port `{}` of {who} (streamlet `{}`)",
                e.port, streamlet.name
            )));
        };
        let info = port
            .state
            .value()
            .cloned()
            .ok_or_else(|| Diagnostic::resolution(format!("port `{}` is not evaluated", e.port)))?;
        let index = self.index_value(scope, e.port_index.as_ref())?;
        check_index("port", &e.port, info.array, index)?;
        Ok(ResolvedEnd { owner, port: e.port.clone(), index, info })
    }
}

fn check_index(what: &str, name: &str, array: Option<i64>, idx: Option<i64>) -> EResult<()> {
    match (array, idx) {
        (None, None) => Ok(()),
        (None, Some(_)) => Err(Diagnostic::ty(format!("{what} `{name}` is not an array and cannot be indexed"))),
        (Some(n), None) => Err(Diagnostic::ty(format!("{what} `{name}` is an array of {n}; an index is required"))),
        (Some(n), Some(i)) if i < 0 || i >= n => {
            Err(Diagnostic::ty(format!("index {i} is out of bounds for {what} `{name}` of size {n}")))
        }
        _ => Ok(()),
    }
}
