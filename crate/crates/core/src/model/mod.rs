//! The code structure: projects, packages, scopes and the entities living in them.

pub mod build;
pub mod dump;
pub mod resolve;
pub mod types;

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use crate::diag::{Diagnostic, Span};
use crate::syntax::{
    AssertDecl, CompoundDecl, ConnDecl, Dir, Expr, ImplAliasDecl, ImplDecl, InstanceDecl, PackageDecl, ParamKind,
    PortDecl, StreamletDecl, TemplateParam, TypeExpr,
};
use crate::value::{BasicKind, ImplRef, Value};

pub use build::{ArgValue, Binding};
pub use resolve::{Entity, NameKind};
pub use types::{StreamProps, TypeKind, TypeValue};

pub type ScopeId = usize;
pub type Shared<T> = Arc<RwLock<T>>;

/// Read lock that ignores poisoning; a panicking worker already reports its own failure.
pub fn read<T>(l: &RwLock<T>) -> RwLockReadGuard<'_, T> {
    l.read().unwrap_or_else(|e| e.into_inner())
}

pub fn write<T>(l: &RwLock<T>) -> RwLockWriteGuard<'_, T> {
    l.write().unwrap_or_else(|e| e.into_inner())
}

pub fn shared<T>(v: T) -> Shared<T> {
    Arc::new(RwLock::new(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Group,
    Union,
    Stream,
    Streamlet,
    Implement,
    IfFor,
}

impl Relation {
    pub const ALL: [Relation; 6] =
        [Relation::Group, Relation::Union, Relation::Stream, Relation::Streamlet, Relation::Implement, Relation::IfFor];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Group => "GroupScope",
            Relation::Union => "UnionScope",
            Relation::Stream => "StreamScope",
            Relation::Streamlet => "StreamletScope",
            Relation::Implement => "ImplementScope",
            Relation::IfFor => "IfForScope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScopeKind {
    Package,
    Group,
    Union,
    Stream,
    Streamlet,
    Implement,
    IfFor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalState<T> {
    NotInferred,
    Evaluated(T),
    Error(Diagnostic),
}

impl<T> EvalState<T> {
    pub fn is_evaluated(&self) -> bool {
        matches!(self, EvalState::Evaluated(_))
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            EvalState::Evaluated(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VarOrigin {
    User,
    /// `$package$<name>` marker created by `package`/`import`.
    Package,
    /// Placeholder for a template parameter inside an uninstantiated template.
    Param(ParamKind),
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: Option<BasicKind>,
    pub expr: Option<Expr>,
    pub raw: String,
    pub file: String,
    pub span: Option<Span>,
    pub origin: VarOrigin,
    pub state: EvalState<Value>,
}

impl Variable {
    pub fn evaluated(name: impl Into<String>, value: Value) -> Self {
        let raw = value.render();
        Variable {
            name: name.into(),
            kind: value.basic_kind(),
            expr: None,
            raw,
            file: String::new(),
            span: None,
            origin: VarOrigin::User,
            state: EvalState::Evaluated(value),
        }
    }

    pub fn is_magic(&self) -> bool {
        self.name.contains('$') || self.origin != VarOrigin::User
    }
}

#[derive(Debug, Clone)]
pub enum TypeBody {
    Expr(TypeExpr),
    Compound { decl: Arc<CompoundDecl>, scope: ScopeId },
    /// Template argument bound at instantiation.
    Bound,
}

#[derive(Debug, Clone)]
pub struct TypeEntry {
    pub name: String,
    pub body: TypeBody,
    pub file: String,
    pub span: Option<Span>,
    pub state: EvalState<Arc<TypeValue>>,
}

#[derive(Debug, Clone)]
pub struct Streamlet {
    pub name: String,
    pub package: String,
    pub decl: Arc<StreamletDecl>,
    pub scope: ScopeId,
    pub file: String,
    /// Parameters still open; empty for plain streamlets and instantiations.
    pub params: Vec<TemplateParam>,
    pub state: EvalState<()>,
}

impl Streamlet {
    pub fn is_template(&self) -> bool {
        !self.params.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum ImplBody {
    Decl(Arc<ImplDecl>),
    Alias(Arc<ImplAliasDecl>),
}

#[derive(Debug, Clone)]
pub struct Implementation {
    pub name: String,
    pub package: String,
    pub body: ImplBody,
    /// `None` for alias implementations.
    pub scope: Option<ScopeId>,
    pub file: String,
    pub params: Vec<TemplateParam>,
    /// Interface streamlet, set during evaluation.
    pub streamlet: Option<ImplRef>,
    /// Final target of an alias implementation.
    pub alias_of: Option<ImplRef>,
    pub state: EvalState<()>,
}

impl Implementation {
    pub fn is_template(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn is_external(&self) -> bool {
        matches!(&self.body, ImplBody::Decl(d) if d.external)
    }

    pub fn is_alias(&self) -> bool {
        matches!(self.body, ImplBody::Alias(_))
    }

    pub fn has_process(&self) -> bool {
        matches!(&self.body, ImplBody::Decl(d) if d.process)
    }

    pub fn reference(&self) -> ImplRef {
        ImplRef::new(&self.package, &self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clock {
    Default,
    Domain(String),
}

impl Clock {
    pub fn render(&self) -> String {
        match self {
            Clock::Default => "DefaultClockDomain".into(),
            Clock::Domain(s) => format!("{s:?}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortInfo {
    pub ty: Arc<TypeValue>,
    pub dir: Dir,
    pub array: Option<i64>,
    pub clock: Clock,
}

#[derive(Debug, Clone)]
pub struct Port {
    pub name: String,
    pub decl: PortDecl,
    pub file: String,
    pub state: EvalState<PortInfo>,
}

#[derive(Debug, Clone)]
pub struct InstanceInfo {
    pub target: ImplRef,
    pub array: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub target_raw: String,
    pub array_raw: String,
    /// Absent for instances inserted by the compiler.
    pub decl: Option<InstanceDecl>,
    pub file: String,
    pub state: EvalState<InstanceInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    This,
    Instance(String, Option<i64>),
}

impl Owner {
    pub fn render(&self) -> String {
        match self {
            Owner::This => "Self".into(),
            Owner::Instance(n, None) => format!("ExternalOwner({n})"),
            Owner::Instance(n, Some(i)) => format!("ExternalOwner({n}[{i}])"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedEnd {
    pub owner: Owner,
    pub port: String,
    pub index: Option<i64>,
    pub info: PortInfo,
}

impl ResolvedEnd {
    /// Identity of the port element this end touches.
    pub fn key(&self) -> (Owner, String, Option<i64>) {
        (self.owner.clone(), self.port.clone(), self.index)
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedConn {
    pub src: ResolvedEnd,
    pub dst: ResolvedEnd,
    pub fifo: i64,
}

#[derive(Debug, Clone)]
pub struct Connection {
    pub name: String,
    pub src_raw: (String, String),
    pub dst_raw: (String, String),
    pub fifo_raw: String,
    pub no_strict: bool,
    pub decl: Option<ConnDecl>,
    pub file: String,
    pub span: Option<Span>,
    pub state: EvalState<ResolvedConn>,
}

impl Connection {
    pub fn from_decl(c: &ConnDecl, file: &str) -> Self {
        Connection {
            name: c.name.clone(),
            src_raw: (c.src.owner_raw.clone(), c.src.port_raw.clone()),
            dst_raw: (c.dst.owner_raw.clone(), c.dst.port_raw.clone()),
            fifo_raw: c.fifo_raw.clone(),
            no_strict: c.no_strict,
            decl: Some(c.clone()),
            file: file.to_string(),
            span: Some(c.span),
            state: EvalState::NotInferred,
        }
    }
}

/// A not-yet-expanded `if`/`for` block, kept for the pre-expansion dump.
#[derive(Debug, Clone)]
pub enum Generative {
    If { branches: Vec<(String, ScopeId)>, otherwise: Option<ScopeId> },
    For { var: String, iter_raw: String, scope: ScopeId },
}

#[derive(Debug, Default)]
pub struct ScopeData {
    pub vars: BTreeMap<String, Shared<Variable>>,
    pub types: BTreeMap<String, Shared<TypeEntry>>,
    pub streamlets: BTreeMap<String, Shared<Streamlet>>,
    pub impls: BTreeMap<String, Shared<Implementation>>,
    pub ports: BTreeMap<String, Port>,
    pub instances: BTreeMap<String, Instance>,
    pub connections: Vec<Connection>,
    pub asserts: Vec<AssertDecl>,
    pub generative: Vec<Generative>,
}

#[derive(Debug)]
pub struct Scope {
    pub id: ScopeId,
    pub name: String,
    pub kind: ScopeKind,
    pub package: String,
    pub file: String,
    pub relations: Vec<(Relation, ScopeId)>,
    pub data: RwLock<ScopeData>,
}

fn dup(what: &str, name: &str, scope: &str) -> Diagnostic {
    Diagnostic::resolution(format!("duplicate {what} `{name}` in scope {scope}"))
}

impl Scope {
    pub fn read(&self) -> RwLockReadGuard<'_, ScopeData> {
        read(&self.data)
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, ScopeData> {
        write(&self.data)
    }

    pub fn declare_var(&self, v: Variable) -> Result<Shared<Variable>, Diagnostic> {
        let mut d = self.write();
        if d.vars.contains_key(&v.name) {
            return Err(dup("variable", &v.name, &self.name));
        }
        let s = shared(v);
        d.vars.insert(read(&s).name.clone(), s.clone());
        Ok(s)
    }

    pub fn declare_type(&self, t: TypeEntry) -> Result<Shared<TypeEntry>, Diagnostic> {
        let mut d = self.write();
        if d.types.contains_key(&t.name) {
            return Err(dup("type", &t.name, &self.name));
        }
        let name = t.name.clone();
        let s = shared(t);
        d.types.insert(name, s.clone());
        Ok(s)
    }

    fn require_package(&self, what: &str, name: &str) -> Result<(), Diagnostic> {
        if self.kind != ScopeKind::Package {
            return Err(Diagnostic::resolution(format!(
                "{what} `{name}` can only be declared in a package scope, not in {}",
                self.name
            )));
        }
        Ok(())
    }

    pub fn declare_streamlet(&self, s: Streamlet) -> Result<Shared<Streamlet>, Diagnostic> {
        self.require_package("streamlet", &s.name)?;
        let mut d = self.write();
        if d.streamlets.contains_key(&s.name) {
            return Err(dup("streamlet", &s.name, &self.name));
        }
        let name = s.name.clone();
        let e = shared(s);
        d.streamlets.insert(name, e.clone());
        Ok(e)
    }

    pub fn declare_impl(&self, i: Implementation) -> Result<Shared<Implementation>, Diagnostic> {
        self.require_package("implementation", &i.name)?;
        let mut d = self.write();
        if d.impls.contains_key(&i.name) {
            return Err(dup("implementation", &i.name, &self.name));
        }
        let name = i.name.clone();
        let e = shared(i);
        d.impls.insert(name, e.clone());
        Ok(e)
    }

    pub fn declare_port(&self, p: Port) -> Result<(), Diagnostic> {
        let mut d = self.write();
        if d.ports.contains_key(&p.name) {
            return Err(dup("port", &p.name, &self.name));
        }
        d.ports.insert(p.name.clone(), p);
        Ok(())
    }

    pub fn declare_instance(&self, i: Instance) -> Result<(), Diagnostic> {
        let mut d = self.write();
        if d.instances.contains_key(&i.name) {
            return Err(dup("instance", &i.name, &self.name));
        }
        d.instances.insert(i.name.clone(), i);
        Ok(())
    }

    pub fn declare_connection(&self, c: Connection) -> Result<(), Diagnostic> {
        let mut d = self.write();
        if d.connections.iter().any(|x| x.name == c.name) {
            return Err(dup("connection", &c.name, &self.name));
        }
        d.connections.push(c);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Package {
    pub name: String,
    pub file: String,
    pub scope: ScopeId,
    pub decl: Arc<PackageDecl>,
}

/// Name of the built-in package holding the duplicator and voider templates.
pub const PRELUDE_PACKAGE: &str = "__prelude";

#[derive(Debug)]
pub struct Project {
    pub name: String,
    pub packages: BTreeMap<String, Package>,
    scopes: RwLock<Vec<Arc<Scope>>>,
}

impl Project {
    pub fn new(name: impl Into<String>) -> Self {
        Project { name: name.into(), packages: BTreeMap::new(), scopes: RwLock::new(Vec::new()) }
    }

    pub fn new_scope(
        &self,
        name: impl Into<String>,
        kind: ScopeKind,
        package: &str,
        file: &str,
        relation: Option<(Relation, ScopeId)>,
    ) -> Arc<Scope> {
        let mut scopes = write(&self.scopes);
        let s = Arc::new(Scope {
            id: scopes.len(),
            name: name.into(),
            kind,
            package: package.to_string(),
            file: file.to_string(),
            relations: relation.into_iter().collect(),
            data: RwLock::new(ScopeData::default()),
        });
        scopes.push(s.clone());
        s
    }

    pub fn scope(&self, id: ScopeId) -> Arc<Scope> {
        read(&self.scopes)[id].clone()
    }

    pub fn scope_count(&self) -> usize {
        read(&self.scopes).len()
    }

    pub fn package_scope(&self, pkg: &str) -> Option<Arc<Scope>> {
        self.packages.get(pkg).map(|p| self.scope(p.scope))
    }

    pub fn streamlet(&self, r: &ImplRef) -> Option<Shared<Streamlet>> {
        self.package_scope(&r.package)?.read().streamlets.get(&r.name).cloned()
    }

    pub fn implementation(&self, r: &ImplRef) -> Option<Shared<Implementation>> {
        self.package_scope(&r.package)?.read().impls.get(&r.name).cloned()
    }

    /// Every implementation in every package, sorted by (package, name).
    pub fn all_impls(&self) -> Vec<Shared<Implementation>> {
        let mut out = Vec::new();
        for p in self.packages.values() {
            out.extend(self.scope(p.scope).read().impls.values().cloned());
        }
        out
    }

    pub fn all_streamlets(&self) -> Vec<Shared<Streamlet>> {
        let mut out = Vec::new();
        for p in self.packages.values() {
            out.extend(self.scope(p.scope).read().streamlets.values().cloned());
        }
        out
    }
}
