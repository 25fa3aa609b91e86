//! Constant expressions and variables.

use super::coord::{Cat, Key};
use super::{cached, math, store, EResult, Evaluator};
use crate::diag::{Category, Diagnostic};
use crate::model::{read, write, Entity, NameKind, ScopeId, Shared, TypeKind, VarOrigin, Variable};
use crate::syntax::{BinOp, Expr, ExprKind, MemberOwner};
use crate::value::{BasicKind, Value};

fn coerce(name: &str, kind: Option<BasicKind>, v: Value) -> Result<Value, String> {
    let Some(k) = kind else { return Ok(v) };
    match (k, v) {
        (BasicKind::ClockDomain, Value::Str(s)) => Ok(Value::ClockDomain(s)),
        (BasicKind::Float, Value::Int(i)) => Ok(Value::Float(i as f64)),
        (k, v) if v.basic_kind() == Some(k) => Ok(v),
        (k, v) => Err(format!("`{name}` is declared as {k} but its value is {}", v.kind_name())),
    }
}

impl<'p> Evaluator<'p> {
    pub(crate) fn file_of(&self, scope: ScopeId) -> String {
        self.project.scope(scope).file.clone()
    }

    /// Evaluate the variable `var` declared in `scope`.
    pub fn eval_var(&self, scope: ScopeId, var: &Shared<Variable>) -> EResult<Value> {
        let name = read(var).name.clone();
        self.once(
            Key::new(scope, Cat::Var, &name),
            || cached(&read(var).state),
            || self.compute_var(scope, var),
            |r| store(&mut write(var).state, r),
        )
    }

    fn compute_var(&self, scope: ScopeId, var: &Shared<Variable>) -> EResult<Value> {
        let v = read(var).clone();
        let located = |d: Diagnostic| match v.span {
            Some(s) => d.at(&v.file, s),
            None => d,
        };
        match &v.origin {
            VarOrigin::Package => {
                return Err(located(Diagnostic::ty(format!("`{}` marks a package and has no value", v.name))))
            }
            VarOrigin::Param(_) => {
                return Err(located(Diagnostic::ty(format!(
                    "template parameter `{}` has no value outside an instantiation",
                    v.name
                ))))
            }
            VarOrigin::User => {}
        }
        let value = match &v.expr {
            Some(e) => self.eval_expr(scope, e)?,
            None if v.kind == Some(BasicKind::ClockDomain) => {
                let s = self.project.scope(scope);
                Value::ClockDomain(format!("$auto${}.{}.{}", s.package, s.name, v.name))
            }
            None => return Err(located(Diagnostic::ty(format!("`{}` has no value", v.name)))),
        };
        coerce(&v.name, v.kind, value).map_err(|m| located(Diagnostic::ty(m)))
    }

    /// Find and evaluate a variable by (optionally qualified) name.
    pub(crate) fn lookup_var(&self, scope: ScopeId, package: Option<&str>, name: &str) -> EResult<Value> {
        let found = self.project.resolve_name(scope, package, name, NameKind::Variable)?;
        match found.entity {
            Entity::Variable(v) => self.eval_var(found.scope, &v),
            _ => Err(Diagnostic::new(Category::Internal, "variable lookup returned another category")),
        }
    }

    /// Evaluate a local variable of `owner` (no outward traversal).
    pub(crate) fn member_var(&self, owner: ScopeId, member: &str) -> EResult<Value> {
        let s = self.project.scope(owner);
        let var = s.read().vars.get(member).cloned();
        match var {
            Some(v) if !read(&v).is_magic() => self.eval_var(owner, &v),
            _ => Err(Diagnostic::resolution(format!("`{}` has no variable `{member}`", s.name))),
        }
    }

    pub fn eval_expr(&self, scope: ScopeId, e: &Expr) -> EResult<Value> {
        let file = self.file_of(scope);
        self.eval_expr_in(scope, e).map_err(|d| d.at(&file, e.span))
    }

    fn eval_expr_in(&self, scope: ScopeId, e: &Expr) -> EResult<Value> {
        let file = self.file_of(scope);
        let m = |r: math::MathResult| r.map_err(|msg| Diagnostic::ty(msg).at(&file, e.span));
        match &e.kind {
            ExprKind::Int(i) => Ok(Value::Int(*i)),
            ExprKind::Float(x) => Ok(Value::Float(*x)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Value(v) => Ok(v.clone()),
            ExprKind::Array(items) => {
                let vals = items.iter().map(|x| self.eval_expr(scope, x)).collect::<EResult<Vec<_>>>()?;
                m(math::array(vals))
            }
            ExprKind::Range(a, step, b) => {
                let (a, step, b) = (self.eval_expr(scope, a)?, self.eval_expr(scope, step)?, self.eval_expr(scope, b)?);
                m(math::range(a, step, b))
            }
            ExprKind::Ident(n) => self.lookup_var(scope, None, n).map_err(|d| d.at(&file, e.span)),
            ExprKind::Qualified(p, n) => self.lookup_var(scope, Some(p), n).map_err(|d| d.at(&file, e.span)),
            ExprKind::Unary(op, x) => {
                let v = self.eval_expr(scope, x)?;
                m(math::unary(*op, v))
            }
            ExprKind::Binary(op, a, b) => {
                let (a, b) = (self.eval_expr(scope, a)?, self.eval_expr(scope, b)?);
                m(math::binary(*op, a, b))
            }
            ExprKind::Call(f, x) => {
                let v = self.eval_expr(scope, x)?;
                m(math::call(*f, v))
            }
            ExprKind::Log(base, x) => {
                let (b, x) = (self.eval_expr(scope, base)?, self.eval_expr(scope, x)?);
                m(math::log(b, x))
            }
            ExprKind::Index(a, i) => {
                let (a, i) = (self.eval_expr(scope, a)?, self.eval_expr(scope, i)?);
                m(math::index(a, i))
            }
            ExprKind::TypeMember(te, member) => {
                let t = self.eval_type_expr(scope, te, None)?;
                match &t.kind {
                    TypeKind::Compound { scope: cs, .. } => self.member_var(*cs, member),
                    _ => Err(Diagnostic::resolution(format!(
                        "type `{}` has no members; only groups and unions do",
                        te.raw.trim()
                    ))),
                }
            }
            ExprKind::StreamletMember(owner, member) => {
                let s = self.resolve_streamlet(scope, owner)?;
                let sc = read(&s).scope;
                self.member_var(sc, member)
            }
            ExprKind::ImplMember(owner, member) => {
                let owner_scope = self.member_owner_scope(scope, MemberOwner::Impl, owner)?;
                self.member_var(owner_scope, member)
            }
        }
    }

    /// Evaluate an assertion; failures report the operands of a top-level comparison.
    pub(crate) fn check_assert(&self, scope: ScopeId, a: &crate::syntax::AssertDecl) -> EResult<()> {
        let file = self.file_of(scope);
        match self.eval_expr(scope, &a.expr)? {
            Value::Bool(true) => Ok(()),
            Value::Bool(false) => {
                let mut msg = format!("assertion `{}` failed", a.raw.trim());
                if let ExprKind::Binary(op, l, r) = &a.expr.kind {
                    if !matches!(op, BinOp::And | BinOp::Or) {
                        let l = self.eval_expr(scope, l)?;
                        let r = self.eval_expr(scope, r)?;
                        msg.push_str(&format!(" (left: {l}, right: {r})"));
                    }
                }
                Err(Diagnostic::new(Category::Assertion, msg).at(&file, a.span))
            }
            other => Err(Diagnostic::ty(format!(
                "assert expects a bool, but `{}` is {}",
                a.raw.trim(),
                other.kind_name()
            ))
            .at(&file, a.span)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coercions() {
        assert_eq!(coerce("c", Some(BasicKind::ClockDomain), Value::Str("x".into())), Ok(Value::ClockDomain("x".into())));
        assert_eq!(coerce("f", Some(BasicKind::Float), Value::Int(2)), Ok(Value::Float(2.0)));
        assert!(coerce("i", Some(BasicKind::Int), Value::Float(2.0)).is_err());
        assert_eq!(coerce("n", None, Value::Bool(true)), Ok(Value::Bool(true)));
    }
}
