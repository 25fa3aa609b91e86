//! Flat circuit view of an elaborated project, plus DOT and JSON emitters.

mod dot;
mod ir;

use std::collections::BTreeSet;

pub use dot::emit_dot;
pub use ir::emit_ir;

use crate::diag::Diagnostic;
use crate::model::{read, Owner, Project};
use crate::value::ImplRef;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatPort {
    pub display: String,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatComponent {
    pub flat_name: String,
    pub is_wrapper: bool,
    pub ports: Vec<FlatPort>,
    pub source: ImplRef,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlatNet {
    pub label: String,
    pub source: (String, String),
    pub sink: (String, String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatCircuit {
    pub components: Vec<FlatComponent>,
    pub nets: Vec<FlatNet>,
}

pub(crate) fn element(name: &str, index: Option<i64>, sep: &str) -> String {
    match index {
        None => name.to_string(),
        Some(i) => format!("{name}{sep}{i}"),
    }
}

fn port_list(project: &Project, imp: &ImplRef) -> Result<Vec<FlatPort>, Diagnostic> {
    let i = project.implementation(imp).ok_or_else(|| Diagnostic::resolution(format!("implementation `{}` does not exist", imp.name)))?;
    let sl = read(&i).streamlet.clone().ok_or_else(|| Diagnostic::resolution(format!("implementation `{}` is not evaluated", imp.name)))?;
    let st = project.streamlet(&sl).ok_or_else(|| Diagnostic::resolution(format!("streamlet `{}` does not exist", sl.name)))?;
    let scope = project.scope(read(&st).scope);
    let d = scope.read();
    let mut out = Vec::new();
    for (name, p) in &d.ports {
        let info = p.state.value().ok_or_else(|| Diagnostic::resolution(format!("port `{name}` is not evaluated")))?;
        match info.array {
            None => out.push(FlatPort { display: name.clone(), anchor: name.clone() }),
            Some(n) => out.extend((0..n).map(|k| FlatPort { display: element(name, Some(k), "@"), anchor: element(name, Some(k), "_AT_") })),
        }
    }
    Ok(out)
}

fn walk(project: &Project, imp: &ImplRef, path: &str, out: &mut FlatCircuit) -> Result<(), Diagnostic> {
    let i = project.implementation(imp).ok_or_else(|| Diagnostic::resolution(format!("implementation `{}` does not exist", imp.name)))?;
    let g = read(&i).clone();
    if !g.state.is_evaluated() {
        return Err(Diagnostic::resolution(format!("implementation `{}.{}` is not evaluated", imp.package, imp.name)));
    }
    let (instances, conns) = match g.scope {
        Some(s) if !g.is_external() => {
            let sc = project.scope(s);
            let d = sc.read();
            (d.instances.values().cloned().collect::<Vec<_>>(), d.connections.clone())
        }
        _ => (Vec::new(), Vec::new()),
    };
    out.components.push(FlatComponent { flat_name: path.to_string(), is_wrapper: !instances.is_empty(), ports: port_list(project, imp)?, source: imp.clone() });
    for inst in &instances {
        let info = inst.state.value().ok_or_else(|| Diagnostic::resolution(format!("instance `{}` is not evaluated", inst.name)))?;
        let idx: Vec<Option<i64>> = match info.array {
            None => vec![None],
            Some(n) => (0..n).map(Some).collect(),
        };
        for k in idx {
            walk(project, &info.target, &format!("{path}__{}", element(&inst.name, k, "_AT_")), out)?;
        }
    }
    for c in &conns {
        let r = c.state.value().ok_or_else(|| Diagnostic::resolution(format!("connection `{}` is not evaluated", c.name)))?;
        let local = |o: &Owner| match o {
            Owner::This => path.to_string(),
            Owner::Instance(n, k) => element(n, *k, "_AT_"),
        };
        let comp = |o: &Owner| match o {
            Owner::This => path.to_string(),
            Owner::Instance(..) => format!("{path}__{}", local(o)),
        };
        out.nets.push(FlatNet {
            label: format!("{}__{path}::{}__{}", c.name, local(&r.src.owner), local(&r.dst.owner)),
            source: (comp(&r.src.owner), element(&r.src.port, r.src.index, "_AT_")),
            sink: (comp(&r.dst.owner), element(&r.dst.port, r.dst.index, "_AT_")),
        });
    }
    Ok(())
}

/// Flatten the hierarchy below `top`; the top keeps its own name.
pub fn flatten(project: &Project, top: &ImplRef) -> Result<FlatCircuit, Diagnostic> {
    let i = project
        .implementation(top)
        .ok_or_else(|| Diagnostic::resolution(format!("top implementation `{}.{}` does not exist", top.package, top.name)))?;
    if read(&i).is_template() {
        return Err(Diagnostic::resolution(format!("top implementation `{}.{}` is a template", top.package, top.name)));
    }
    let top = read(&i).alias_of.clone().unwrap_or_else(|| top.clone());
    let mut out = FlatCircuit::default();
    walk(project, &top, &top.name, &mut out)?;
    out.components.sort_by(|a, b| a.flat_name.cmp(&b.flat_name));
    out.nets.sort();
    Ok(out)
}

/// Evaluated, non-external, non-alias implementations that no other implementation instantiates.
pub fn top_level_impls(project: &Project) -> Vec<ImplRef> {
    let mut used = BTreeSet::new();
    let mut candidates = Vec::new();
    for i in project.all_impls() {
        let g = read(&i);
        if g.is_template() || g.is_alias() || !g.state.is_evaluated() {
            continue;
        }
        if let Some(s) = g.scope {
            for inst in project.scope(s).read().instances.values() {
                if let Some(info) = inst.state.value() {
                    used.insert(info.target.clone());
                }
            }
        }
        if !g.is_external() {
            candidates.push(g.reference());
        }
    }
    candidates.into_iter().filter(|r| !used.contains(r)).collect()
}

/// Merge the circuits of several tops into one sorted circuit.
pub fn flatten_all(project: &Project, tops: &[ImplRef]) -> Result<FlatCircuit, Diagnostic> {
    let mut out = FlatCircuit::default();
    for t in tops {
        let c = flatten(project, t)?;
        out.components.extend(c.components);
        out.nets.extend(c.nets);
    }
    out.components.sort_by(|a, b| a.flat_name.cmp(&b.flat_name));
    out.components.dedup_by(|a, b| a.flat_name == b.flat_name);
    out.nets.sort();
    Ok(out)
}
