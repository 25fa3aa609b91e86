//! Populating the code structure from lowered declarations.

use std::sync::Arc;

use super::*;
use crate::syntax::{lower_package, ConstDecl, ImplItem, StreamletItem, TypeDecl};

const PRELUDE_SRC: &str = include_str!("../prelude.td");

/// A template argument after evaluation.
#[derive(Debug, Clone)]
pub enum ArgValue {
    Value(Value),
    Type(Arc<TypeValue>),
    Impl(ImplRef),
}

impl ArgValue {
    /// Segment used in mangled instantiation names.
    pub fn render(&self) -> String {
        match self {
            ArgValue::Value(v) => v.render(),
            ArgValue::Type(t) => t.short(),
            ArgValue::Impl(r) => r.name.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Binding {
    pub param: TemplateParam,
    pub arg: ArgValue,
}

pub fn mangle(name: &str, bindings: &[Binding]) -> String {
    let mut s = name.to_string();
    for b in bindings {
        s.push('@');
        s.push_str(&b.arg.render());
    }
    s
}

fn magic_package_var(pkg: &str) -> Variable {
    Variable {
        name: format!("$package${pkg}"),
        kind: None,
        expr: None,
        raw: String::new(),
        file: String::new(),
        span: None,
        origin: VarOrigin::Package,
        state: EvalState::NotInferred,
    }
}

/// Lowered form of the built-in package.
pub fn prelude_decl() -> PackageDecl {
    let pf = crate::parser::parse_file("<prelude>", PRELUDE_SRC).expect("prelude parses");
    let mut decl = lower_package("<prelude>", PRELUDE_SRC, &pf.ast).expect("prelude lowers");
    decl.name = PRELUDE_PACKAGE.to_string();
    decl
}

impl Project {
    /// Build a project from lowered packages; the prelude is always added.
    pub fn build(name: impl Into<String>, decls: Vec<PackageDecl>) -> Result<Project, Vec<Diagnostic>> {
        let mut p = Project::new(name);
        let mut errs = Vec::new();
        for d in std::iter::once(prelude_decl()).chain(decls) {
            if let Err(e) = p.add_package(d) {
                errs.extend(e);
            }
        }
        errs.extend(p.check_imports());
        if errs.is_empty() {
            Ok(p)
        } else {
            errs.sort();
            Err(errs)
        }
    }

    pub fn add_package(&mut self, decl: PackageDecl) -> Result<(), Vec<Diagnostic>> {
        if let Some(old) = self.packages.get(&decl.name) {
            return Err(vec![Diagnostic::resolution(format!(
                "package `{}` is declared in both {} and {}",
                decl.name, old.file, decl.file
            ))]);
        }
        let file = decl.file.clone();
        let scope = self.new_scope(format!("package_{}", decl.name), ScopeKind::Package, &decl.name, &file, None);
        let mut errs = Vec::new();
        let mut push = |r: Result<(), Diagnostic>, span: Span| {
            if let Err(e) = r {
                errs.push(e.at(&file, span));
            }
        };
        if decl.name != PRELUDE_PACKAGE {
            push(scope.declare_var(magic_package_var(&decl.name)).map(|_| ()), Span::default());
            for (imp, span) in &decl.imports {
                if imp != &decl.name && !scope.read().vars.contains_key(&format!("$package${imp}")) {
                    push(scope.declare_var(magic_package_var(imp)).map(|_| ()), *span);
                }
            }
        }
        for c in &decl.consts {
            push(declare_const(&scope, c, &file), c.span);
        }
        for t in &decl.types {
            push(declare_type_decl(self, &scope, t, &file), t.span());
        }
        for s in &decl.streamlets {
            let r = new_streamlet(self, &scope, &s.name, s, None).and_then(|e| scope.declare_streamlet(e).map(|_| ()));
            push(r, s.span);
        }
        for i in &decl.impls {
            let r = new_impl(self, &scope, &i.name, i, None).and_then(|e| scope.declare_impl(e).map(|_| ()));
            push(r, i.span);
        }
        for a in &decl.aliases {
            let imp = Implementation {
                name: a.name.clone(),
                package: decl.name.clone(),
                body: ImplBody::Alias(a.clone()),
                scope: None,
                file: file.clone(),
                params: Vec::new(),
                streamlet: None,
                alias_of: None,
                state: EvalState::NotInferred,
            };
            push(scope.declare_impl(imp).map(|_| ()), a.span);
        }
        self.packages.insert(
            decl.name.clone(),
            Package { name: decl.name.clone(), file: file.clone(), scope: scope.id, decl: Arc::new(decl) },
        );
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Every `import` must name a package of the project.
    pub fn check_imports(&self) -> Vec<Diagnostic> {
        let mut errs = Vec::new();
        for p in self.packages.values() {
            for (imp, span) in &p.decl.imports {
                if !self.packages.contains_key(imp) {
                    errs.push(
                        Diagnostic::resolution(format!("package `{}` imports unknown package `{imp}`", p.name))
                            .at(&p.file, *span),
                    );
                }
            }
        }
        errs
    }
}

pub fn declare_const(scope: &Scope, c: &ConstDecl, file: &str) -> Result<(), Diagnostic> {
    scope
        .declare_var(Variable {
            name: c.name.clone(),
            kind: c.kind,
            expr: c.value.clone(),
            raw: c.raw.clone(),
            file: file.to_string(),
            span: Some(c.span),
            origin: VarOrigin::User,
            state: EvalState::NotInferred,
        })
        .map(|_| ())
        .map_err(|e| e.at(file, c.span))
}

/// Scope of a group or union, with its fields as type entries and its constants as variables.
pub fn build_compound_scope(
    project: &Project,
    parent: &Scope,
    decl: &Arc<CompoundDecl>,
    file: &str,
) -> Result<ScopeId, Diagnostic> {
    let (prefix, kind, rel) = if decl.is_union {
        ("union", ScopeKind::Union, Relation::Union)
    } else {
        ("group", ScopeKind::Group, Relation::Group)
    };
    let scope =
        project.new_scope(format!("{prefix}_{}", decl.name), kind, &parent.package, file, Some((rel, parent.id)));
    for item in &decl.items {
        match item {
            crate::syntax::CompoundItem::Const(c) => declare_const(&scope, c, file)?,
            crate::syntax::CompoundItem::Field { name, ty, span } => {
                let entry = match &ty.kind {
                    crate::syntax::TypeExprKind::Compound(inner) => {
                        let s = build_compound_scope(project, &scope, inner, file)?;
                        TypeBody::Compound { decl: inner.clone(), scope: s }
                    }
                    _ => TypeBody::Expr(ty.clone()),
                };
                scope
                    .declare_type(TypeEntry {
                        name: name.clone(),
                        body: entry,
                        file: file.to_string(),
                        span: Some(*span),
                        state: EvalState::NotInferred,
                    })
                    .map_err(|e| e.at(file, *span))?;
            }
        }
    }
    Ok(scope.id)
}

pub fn declare_type_decl(project: &Project, scope: &Scope, t: &TypeDecl, file: &str) -> Result<(), Diagnostic> {
    let body = match t {
        TypeDecl::Alias { ty, .. } => match &ty.kind {
            crate::syntax::TypeExprKind::Compound(c) => {
                TypeBody::Compound { decl: c.clone(), scope: build_compound_scope(project, scope, c, file)? }
            }
            _ => TypeBody::Expr(ty.clone()),
        },
        TypeDecl::Compound(c) => TypeBody::Compound { decl: c.clone(), scope: build_compound_scope(project, scope, c, file)? },
    };
    scope
        .declare_type(TypeEntry {
            name: t.name().to_string(),
            body,
            file: file.to_string(),
            span: Some(t.span()),
            state: EvalState::NotInferred,
        })
        .map(|_| ())
        .map_err(|e| e.at(file, t.span()))
}

fn bind_params(scope: &Scope, params: &[TemplateParam], bindings: Option<&[Binding]>, file: &str) -> Result<(), Diagnostic> {
    match bindings {
        None => {
            for p in params {
                let kind = match &p.kind {
                    ParamKind::Basic(k) => Some(*k),
                    _ => None,
                };
                scope
                    .declare_var(Variable {
                        name: p.name.clone(),
                        kind,
                        expr: None,
                        raw: format!("$arg${}", p.name),
                        file: file.to_string(),
                        span: Some(p.span),
                        origin: VarOrigin::Param(p.kind.clone()),
                        state: EvalState::NotInferred,
                    })
                    .map_err(|e| e.at(file, p.span))?;
            }
        }
        Some(bs) => {
            for b in bs {
                match &b.arg {
                    ArgValue::Type(t) => {
                        scope.declare_type(TypeEntry {
                            name: b.param.name.clone(),
                            body: TypeBody::Bound,
                            file: file.to_string(),
                            span: Some(b.param.span),
                            state: EvalState::Evaluated(t.clone()),
                        })?;
                    }
                    ArgValue::Value(v) => {
                        scope.declare_var(Variable::evaluated(&b.param.name, v.clone()))?;
                    }
                    ArgValue::Impl(r) => {
                        scope.declare_var(Variable::evaluated(&b.param.name, Value::Impl(r.clone())))?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Create a streamlet and its scope without registering it in the package.
pub fn new_streamlet(
    project: &Project,
    pkg: &Scope,
    name: &str,
    decl: &Arc<StreamletDecl>,
    bindings: Option<&[Binding]>,
) -> Result<Streamlet, Diagnostic> {
    let file = pkg.file.clone();
    let scope = project.new_scope(
        format!("streamlet_{name}"),
        ScopeKind::Streamlet,
        &pkg.package,
        &file,
        Some((Relation::Streamlet, pkg.id)),
    );
    bind_params(&scope, &decl.params, bindings, &file)?;
    for item in &decl.items {
        match item {
            StreamletItem::Const(c) => declare_const(&scope, c, &file)?,
            StreamletItem::Type(t) => declare_type_decl(project, &scope, t, &file)?,
            StreamletItem::Assert(a) => scope.write().asserts.push(a.clone()),
            StreamletItem::Port(p) => scope
                .declare_port(Port { name: p.name.clone(), decl: p.clone(), file: file.clone(), state: EvalState::NotInferred })
                .map_err(|e| e.at(&file, p.span))?,
        }
    }
    Ok(Streamlet {
        name: name.to_string(),
        package: pkg.package.clone(),
        decl: decl.clone(),
        scope: scope.id,
        file,
        params: if bindings.is_some() { Vec::new() } else { decl.params.clone() },
        state: EvalState::NotInferred,
    })
}

/// Create an implementation and its scope without registering it in the package.
pub fn new_impl(
    project: &Project,
    pkg: &Scope,
    name: &str,
    decl: &Arc<ImplDecl>,
    bindings: Option<&[Binding]>,
) -> Result<Implementation, Diagnostic> {
    let file = pkg.file.clone();
    let scope = project.new_scope(
        format!("implement_{name}"),
        ScopeKind::Implement,
        &pkg.package,
        &file,
        Some((Relation::Implement, pkg.id)),
    );
    bind_params(&scope, &decl.params, bindings, &file)?;
    populate_body(project, &scope, &decl.items, &file)?;
    Ok(Implementation {
        name: name.to_string(),
        package: pkg.package.clone(),
        body: ImplBody::Decl(decl.clone()),
        scope: Some(scope.id),
        file,
        params: if bindings.is_some() { Vec::new() } else { decl.params.clone() },
        streamlet: None,
        alias_of: None,
        state: EvalState::NotInferred,
    })
}

/// Declare the items of an implementation body; `if`/`for` blocks become child scopes.
pub fn populate_body(project: &Project, scope: &Scope, items: &[ImplItem], file: &str) -> Result<(), Diagnostic> {
    for item in items {
        match item {
            ImplItem::Const(c) => declare_const(scope, c, file)?,
            ImplItem::Type(t) => declare_type_decl(project, scope, t, file)?,
            ImplItem::Assert(a) => scope.write().asserts.push(a.clone()),
            ImplItem::Instance(i) => scope
                .declare_instance(Instance {
                    name: i.name.clone(),
                    target_raw: i.target.raw.clone(),
                    array_raw: i.array_raw.clone(),
                    decl: Some(i.clone()),
                    file: file.to_string(),
                    state: EvalState::NotInferred,
                })
                .map_err(|e| e.at(file, i.span))?,
            ImplItem::Connection(c) => scope.declare_connection(Connection::from_decl(c, file)).map_err(|e| e.at(file, c.span))?,
            ImplItem::If(b) => {
                let mut branches = Vec::new();
                for (k, (_, raw, body, span)) in b.branches.iter().enumerate() {
                    let label = if k == 0 { "if" } else { "elif" };
                    let s = child_scope(project, scope, &format!("{label}_{}", span.start), file);
                    populate_body(project, &s, body, file)?;
                    branches.push((raw.clone(), s.id));
                }
                let otherwise = match &b.otherwise {
                    Some((body, span)) => {
                        let s = child_scope(project, scope, &format!("else_{}", span.start), file);
                        populate_body(project, &s, body, file)?;
                        Some(s.id)
                    }
                    None => None,
                };
                scope.write().generative.push(Generative::If { branches, otherwise });
            }
            ImplItem::For(f) => {
                let s = child_scope(project, scope, &format!("for_{}", f.span.start), file);
                populate_body(project, &s, &f.body, file)?;
                scope.write().generative.push(Generative::For { var: f.var.clone(), iter_raw: f.iter_raw.clone(), scope: s.id });
            }
        }
    }
    Ok(())
}

fn child_scope(project: &Project, parent: &Scope, name: &str, file: &str) -> Arc<Scope> {
    project.new_scope(name, ScopeKind::IfFor, &parent.package, file, Some((Relation::IfFor, parent.id)))
}
