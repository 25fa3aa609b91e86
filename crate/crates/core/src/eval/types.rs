//! Logical type evaluation.

use std::sync::Arc;

use super::coord::{Cat, Key};
use super::{cached, store, EResult, Evaluator};
use crate::diag::Diagnostic;
use crate::model::build::build_compound_scope;
use crate::model::types::{StreamDirection, Synchronicity};
use crate::model::{read, write, Entity, NameKind, ScopeId, Shared, StreamProps, TypeBody, TypeEntry, TypeKind, TypeValue};
use crate::syntax::{anonymous_stream_name, CompoundDecl, CompoundItem, MemberOwner, PropKind, PropValue, StreamProp, TypeExpr, TypeExprKind};
use crate::value::Value;

impl<'p> Evaluator<'p> {
    /// Evaluate a named type entry declared in `scope`.
    pub fn eval_type_entry(&self, scope: ScopeId, entry: &Shared<TypeEntry>) -> EResult<Arc<TypeValue>> {
        let name = read(entry).name.clone();
        self.once(
            Key::new(scope, Cat::Type, &name),
            || cached(&read(entry).state),
            || {
                let e = read(entry).clone();
                let r = match &e.body {
                    TypeBody::Expr(te) => self.eval_type_expr(scope, te, Some(&e.name)),
                    TypeBody::Compound { decl, scope: cs } => self.eval_compound(*cs, decl),
                    TypeBody::Bound => Err(Diagnostic::resolution(format!("template type `{}` is unbound", e.name))),
                };
                match e.span {
                    Some(s) => r.map_err(|d| d.at(&e.file, s)),
                    None => r,
                }
            },
            |r| store(&mut write(entry).state, r),
        )
    }

    pub(crate) fn eval_compound(&self, cs: ScopeId, decl: &CompoundDecl) -> EResult<Arc<TypeValue>> {
        let scope = self.project.scope(cs);
        let (vars, types) = {
            let d = scope.read();
            (d.vars.values().cloned().collect::<Vec<_>>(), d.types.clone())
        };
        for v in &vars {
            self.eval_var(cs, v)?;
        }
        let mut fields = Vec::new();
        for item in &decl.items {
            if let CompoundItem::Field { name, .. } = item {
                let entry = &types[name];
                fields.push((name.clone(), self.eval_type_entry(cs, entry)?));
            }
        }
        Ok(TypeValue::new(&decl.name, TypeKind::Compound { union: decl.is_union, scope: cs, fields }))
    }

    fn lookup_type(&self, scope: ScopeId, package: Option<&str>, name: &str) -> EResult<Arc<TypeValue>> {
        let found = self.project.resolve_name(scope, package, name, NameKind::Type)?;
        match found.entity {
            Entity::Type(t) => self.eval_type_entry(found.scope, &t),
            _ => unreachable!("type lookup returns types"),
        }
    }

    /// Evaluate a type expression; `hint` names the result when it creates a new type.
    pub fn eval_type_expr(&self, scope: ScopeId, te: &TypeExpr, hint: Option<&str>) -> EResult<Arc<TypeValue>> {
        let file = self.file_of(scope);
        let r = match &te.kind {
            TypeExprKind::Null => Ok(TypeValue::null()),
            TypeExprKind::Bit(w) => match self.eval_expr(scope, w)? {
                Value::Int(n) if n >= 1 => Ok(TypeValue::new(hint.map_or_else(|| format!("Bit({n})"), str::to_string), TypeKind::Bit(n))),
                Value::Int(n) => Err(Diagnostic::ty(format!("Bit width must be at least 1, got {n}"))),
                v => Err(Diagnostic::ty(format!("Bit width must be an int, got {}", v.kind_name()))),
            },
            TypeExprKind::Stream { elem, props } => {
                let e = self.eval_type_expr(scope, elem, None)?;
                let p = self.eval_props(scope, props)?;
                let name = hint.map_or_else(|| anonymous_stream_name(elem), str::to_string);
                Ok(TypeValue::new(name, TypeKind::Stream { elem: e, props: p }))
            }
            TypeExprKind::Named(n) => self.lookup_type(scope, None, n),
            TypeExprKind::Qualified(p, n) => self.lookup_type(scope, Some(p), n),
            TypeExprKind::Compound(decl) => {
                let parent = self.project.scope(scope);
                let cs = build_compound_scope(self.project, &parent, decl, &file)?;
                self.eval_compound(cs, decl)
            }
            TypeExprKind::Member { owner_kind, owner, member } => {
                let os = self.member_owner_scope(scope, *owner_kind, owner)?;
                let entry = self.project.scope(os).read().types.get(member).cloned();
                match entry {
                    Some(t) => self.eval_type_entry(os, &t),
                    None => Err(Diagnostic::resolution(format!(
                        "`{}` has no logical type `{member}`",
                        self.project.scope(os).name
                    ))),
                }
            }
        };
        r.map_err(|d| d.at(&file, te.span))
    }

    fn eval_props(&self, scope: ScopeId, props: &[StreamProp]) -> EResult<StreamProps> {
        let mut p = StreamProps::defaults();
        let mut seen = Vec::new();
        for prop in props {
            if seen.contains(&prop.kind) {
                return Err(Diagnostic::ty(format!("stream property `{}` is given twice", prop.raw.trim())));
            }
            seen.push(prop.kind);
            let bad = |what: &str| Diagnostic::ty(format!("stream property `{}`: {what}", prop.raw.trim()));
            let value = match &prop.value {
                PropValue::Type(t) => {
                    if prop.kind != PropKind::User {
                        return Err(bad("expects a value, not a logical type"));
                    }
                    let u = self.eval_type_expr(scope, t, None)?;
                    if u.is_stream() {
                        return Err(bad("the user type cannot be a Stream"));
                    }
                    p.user = u;
                    continue;
                }
                PropValue::Expr(e) => e,
            };
            if prop.kind == PropKind::User {
                // A bare name parses as an expression; read it as a type.
                let t = match &value.kind {
                    crate::syntax::ExprKind::Ident(n) => TypeExpr { kind: TypeExprKind::Named(n.clone()), span: value.span, raw: n.clone() },
                    crate::syntax::ExprKind::Qualified(a, n) => {
                        TypeExpr { kind: TypeExprKind::Qualified(a.clone(), n.clone()), span: value.span, raw: format!("{a}.{n}") }
                    }
                    _ => return Err(bad("expects a logical type")),
                };
                let u = self.eval_type_expr(scope, &t, None)?;
                if u.is_stream() {
                    return Err(bad("the user type cannot be a Stream"));
                }
                p.user = u;
                continue;
            }
            let v = self.eval_expr(scope, value)?;
            match prop.kind {
                PropKind::Dimension => match v {
                    Value::Int(d) if d >= 0 => p.dimension = d,
                    _ => return Err(bad("dimension must be a non-negative int")),
                },
                PropKind::Throughput => match v {
                    Value::Int(t) if t >= 0 => p.throughput = t as f64,
                    Value::Float(t) if t >= 0.0 && t.is_finite() => p.throughput = t,
                    _ => return Err(bad("throughput must be a non-negative number")),
                },
                PropKind::Synchronicity => match &v {
                    Value::Str(s) => p.synchronicity = Synchronicity::parse(s).ok_or_else(|| bad("synchronicity must be Sync, Flatten, Desync or FlatDesync"))?,
                    _ => return Err(bad("synchronicity must be a string")),
                },
                PropKind::Complexity => match v {
                    Value::Int(c) if (1..=7).contains(&c) => p.complexity = c,
                    _ => return Err(bad("complexity must be an int in 1..=7")),
                },
                PropKind::Direction => match &v {
                    Value::Str(s) => p.direction = StreamDirection::parse(s).ok_or_else(|| bad("direction must be Forward or Reverse"))?,
                    _ => return Err(bad("direction must be a string")),
                },
                PropKind::Keep => match v {
                    Value::Bool(b) => p.keep = b,
                    _ => return Err(bad("keep must be a bool")),
                },
                PropKind::User => unreachable!(),
            }
        }
        Ok(p)
    }

    /// Scope of the streamlet or implementation named by a member access.
    pub(crate) fn member_owner_scope(&self, scope: ScopeId, kind: MemberOwner, owner: &crate::syntax::ItemRef) -> EResult<ScopeId> {
        match kind {
            MemberOwner::Streamlet => {
                let s = self.resolve_streamlet(scope, owner)?;
                let id = read(&s).scope;
                Ok(id)
            }
            MemberOwner::Impl => {
                let mut i = self.resolve_impl(scope, owner)?;
                if read(&i).is_alias() {
                    self.eval_impl(&i)?;
                    let target = read(&i).alias_of.clone().expect("evaluated alias has a target");
                    i = self.project.implementation(&target).expect("alias target exists");
                }
                let s = read(&i).scope;
                Ok(s.expect("declared implementations have a scope"))
            }
        }
    }
}
