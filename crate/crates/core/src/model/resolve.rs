//! Name lookup along scope relations.

use std::collections::HashSet;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NameKind {
    Variable,
    Type,
    Streamlet,
    Implementation,
    Port,
    Instance,
}

impl NameKind {
    pub const ALL: [NameKind; 6] = [
        NameKind::Variable,
        NameKind::Type,
        NameKind::Streamlet,
        NameKind::Implementation,
        NameKind::Port,
        NameKind::Instance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NameKind::Variable => "variable",
            NameKind::Type => "logical type",
            NameKind::Streamlet => "streamlet",
            NameKind::Implementation => "implementation",
            NameKind::Port => "port",
            NameKind::Instance => "instance",
        }
    }
}

/// Whether a lookup for `kind` may continue through a relation of kind `rel`.
pub fn traverses(kind: NameKind, rel: Relation) -> bool {
    match kind {
        NameKind::Variable | NameKind::Type => !matches!(rel, Relation::IfFor),
        NameKind::Streamlet | NameKind::Implementation => rel == Relation::Implement,
        NameKind::Port | NameKind::Instance => false,
    }
}

#[derive(Debug, Clone)]
pub enum Entity {
    Variable(Shared<Variable>),
    Type(Shared<TypeEntry>),
    Streamlet(Shared<Streamlet>),
    Implementation(Shared<Implementation>),
    Port(Port),
    Instance(Instance),
}

impl Entity {
    pub fn kind(&self) -> NameKind {
        match self {
            Entity::Variable(_) => NameKind::Variable,
            Entity::Type(_) => NameKind::Type,
            Entity::Streamlet(_) => NameKind::Streamlet,
            Entity::Implementation(_) => NameKind::Implementation,
            Entity::Port(_) => NameKind::Port,
            Entity::Instance(_) => NameKind::Instance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Found {
    pub entity: Entity,
    pub scope: ScopeId,
}

impl Project {
    pub fn resolve_local(&self, scope: ScopeId, name: &str, kind: NameKind) -> Option<Entity> {
        let s = self.scope(scope);
        let d = s.read();
        match kind {
            NameKind::Variable => d.vars.get(name).cloned().map(Entity::Variable),
            NameKind::Type => d.types.get(name).cloned().map(Entity::Type),
            NameKind::Streamlet => d.streamlets.get(name).cloned().map(Entity::Streamlet),
            NameKind::Implementation => d.impls.get(name).cloned().map(Entity::Implementation),
            NameKind::Port => d.ports.get(name).cloned().map(Entity::Port),
            NameKind::Instance => d.instances.get(name).cloned().map(Entity::Instance),
        }
    }

    /// Look up `name` (or `package.name`) starting from `scope`.
    pub fn resolve_name(&self, scope: ScopeId, package: Option<&str>, name: &str, kind: NameKind) -> Result<Found, Diagnostic> {
        if let Some(pkg) = package {
            return self.resolve_qualified(scope, pkg, name, kind);
        }
        let mut searched = Vec::new();
        let mut seen = HashSet::new();
        let mut cur = Some(scope);
        let mut reached_package = false;
        while let Some(id) = cur {
            if !seen.insert(id) {
                break;
            }
            let s = self.scope(id);
            searched.push(s.name.clone());
            if let Some(e) = self.resolve_local(id, name, kind) {
                return Ok(Found { entity: e, scope: id });
            }
            reached_package = s.kind == ScopeKind::Package;
            cur = s.relations.iter().find(|(r, _)| traverses(kind, *r)).map(|(_, t)| *t);
        }
        // the prelude is implicitly imported by every package
        if reached_package && matches!(kind, NameKind::Streamlet | NameKind::Implementation) {
            if let Some(pre) = self.packages.get(PRELUDE_PACKAGE) {
                if !seen.contains(&pre.scope) {
                    if let Some(e) = self.resolve_local(pre.scope, name, kind) {
                        return Ok(Found { entity: e, scope: pre.scope });
                    }
                }
            }
        }
        let mut msg = format!("cannot find {} `{name}`; searched scopes: {}", kind.name(), searched.join(", "));
        let others: Vec<&str> = NameKind::ALL
            .iter()
            .filter(|k| **k != kind && searched_has(self, scope, name, **k))
            .map(|k| k.name())
            .collect();
        if !others.is_empty() {
            msg.push_str(&format!(" (a {} with that name exists)", others.join("/")));
        }
        Err(Diagnostic::resolution(msg))
    }

    fn resolve_qualified(&self, scope: ScopeId, pkg: &str, name: &str, kind: NameKind) -> Result<Found, Diagnostic> {
        let own = self.scope(scope).package.clone();
        let own_scope = self
            .package_scope(&own)
            .ok_or_else(|| Diagnostic::resolution(format!("package `{own}` is not part of the project")))?;
        if own != pkg && !own_scope.read().vars.contains_key(&format!("$package${pkg}")) {
            return Err(Diagnostic::resolution(format!("package `{pkg}` is used in `{own}` without being imported")));
        }
        let target = self
            .packages
            .get(pkg)
            .ok_or_else(|| Diagnostic::resolution(format!("package `{pkg}` is not part of the project")))?;
        self.resolve_local(target.scope, name, kind).map(|e| Found { entity: e, scope: target.scope }).ok_or_else(|| {
            Diagnostic::resolution(format!("cannot find {} `{name}` in package `{pkg}`", kind.name()))
        })
    }
}

fn searched_has(p: &Project, scope: ScopeId, name: &str, kind: NameKind) -> bool {
    p.resolve_local(scope, name, kind).is_some()
}
