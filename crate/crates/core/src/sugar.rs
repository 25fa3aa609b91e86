//! Duplicator and voider insertion so every port element has exactly one connection.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::Diagnostic;
use crate::eval::Evaluator;
use crate::model::{
    read, ArgValue, Connection, EvalState, Implementation, Instance, InstanceInfo, Owner, PortInfo, Project, ResolvedConn,
    ResolvedEnd, ScopeId, Shared, PRELUDE_PACKAGE,
};
use crate::syntax::Dir;
use crate::value::{ImplRef, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Source,
    Sink,
}

/// One port element of an implementation and how often connections touch it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PortUsage {
    pub owner: Owner,
    pub port: String,
    pub index: Option<i64>,
    pub role: Role,
    pub uses: usize,
}

type EndKey = (Owner, String, Option<i64>);

fn role(owner: &Owner, dir: Dir) -> Role {
    match (owner, dir) {
        (Owner::This, Dir::In) | (Owner::Instance(..), Dir::Out) => Role::Source,
        _ => Role::Sink,
    }
}

fn indices(n: Option<i64>) -> Vec<Option<i64>> {
    match n {
        None => vec![None],
        Some(n) => (0..n).map(Some).collect(),
    }
}

fn streamlet_ports(project: &Project, r: &ImplRef) -> Vec<(String, PortInfo)> {
    let Some(s) = project.streamlet(r) else { return Vec::new() };
    let scope = project.scope(read(&s).scope);
    let d = scope.read();
    d.ports.iter().filter_map(|(n, p)| p.state.value().map(|i| (n.clone(), i.clone()))).collect()
}

fn impl_streamlet(project: &Project, r: &ImplRef) -> Option<ImplRef> {
    project.implementation(r).and_then(|i| read(&i).streamlet.clone())
}

/// Every port element of `imp` with its role and number of connection ends touching it.
pub fn usage_census(project: &Project, imp: &Implementation) -> Vec<PortUsage> {
    let (Some(scope), Some(sl)) = (imp.scope, imp.streamlet.as_ref()) else { return Vec::new() };
    let mut elems: BTreeMap<EndKey, Role> = BTreeMap::new();
    for (name, info) in streamlet_ports(project, sl) {
        for i in indices(info.array) {
            elems.insert((Owner::This, name.clone(), i), role(&Owner::This, info.dir));
        }
    }
    let s = project.scope(scope);
    let (instances, conns) = {
        let d = s.read();
        (d.instances.values().cloned().collect::<Vec<_>>(), d.connections.clone())
    };
    for inst in &instances {
        let Some(info) = inst.state.value() else { continue };
        let Some(isl) = impl_streamlet(project, &info.target) else { continue };
        let ports = streamlet_ports(project, &isl);
        for oi in indices(info.array) {
            let owner = Owner::Instance(inst.name.clone(), oi);
            for (name, pinfo) in &ports {
                for i in indices(pinfo.array) {
                    elems.insert((owner.clone(), name.clone(), i), role(&owner, pinfo.dir));
                }
            }
        }
    }
    let mut counts: BTreeMap<EndKey, usize> = BTreeMap::new();
    for c in &conns {
        if let Some(r) = c.state.value() {
            *counts.entry(r.src.key()).or_default() += 1;
            *counts.entry(r.dst.key()).or_default() += 1;
        }
    }
    elems
        .into_iter()
        .map(|(k, role)| PortUsage { uses: counts.get(&k).copied().unwrap_or(0), owner: k.0, port: k.1, index: k.2, role })
        .collect()
}

/// `_`-joined, double-underscore-free identifier.
fn clean_name(parts: &[String]) -> String {
    let joined = parts.join("_");
    let mut out = String::new();
    for c in joined.chars() {
        if c == '_' && out.ends_with('_') {
            continue;
        }
        out.push(c);
    }
    out.trim_end_matches('_').to_string()
}

fn end_parts(owner: &Owner, port: &str, index: Option<i64>) -> Vec<String> {
    let mut parts = match owner {
        Owner::This => vec!["self".to_string()],
        Owner::Instance(n, None) => vec![n.clone()],
        Owner::Instance(n, Some(i)) => vec![n.clone(), i.to_string()],
    };
    parts.push(port.to_string());
    if let Some(i) = index {
        parts.push(i.to_string());
    }
    parts
}

fn unique(base: String, taken: &BTreeSet<String>) -> String {
    if !taken.contains(&base) {
        return base;
    }
    (2..).map(|k| format!("{base}_{k}")).find(|n| !taken.contains(n)).expect("unbounded")
}

fn end_text(e: &ResolvedEnd) -> (String, String) {
    let owner = match &e.owner {
        Owner::This => String::new(),
        Owner::Instance(n, None) => n.clone(),
        Owner::Instance(n, Some(i)) => format!("{n}[{i}]"),
    };
    let port = match e.index {
        None => e.port.clone(),
        Some(i) => format!("{}[{i}]", e.port),
    };
    (owner, port)
}

fn generated_connection(name: String, src: ResolvedEnd, dst: ResolvedEnd, file: &str) -> Connection {
    Connection {
        name,
        src_raw: end_text(&src),
        dst_raw: end_text(&dst),
        fifo_raw: String::new(),
        no_strict: false,
        decl: None,
        file: file.to_string(),
        span: None,
        state: EvalState::Evaluated(ResolvedConn { src, dst, fifo: 0 }),
    }
}

struct Helper<'a, 'p> {
    ev: &'a Evaluator<'p>,
}

impl Helper<'_, '_> {
    /// Instantiate a prelude template and return its reference plus its port table.
    fn prelude(&self, name: &str, args: Vec<ArgValue>) -> Result<(ImplRef, BTreeMap<String, PortInfo>), Diagnostic> {
        let imp = self.ev.instantiate_impl_with(PRELUDE_PACKAGE, name, args)?;
        let (r, sl) = {
            let g = read(&imp);
            (g.reference(), g.streamlet.clone().expect("evaluated implementations have a streamlet"))
        };
        Ok((r, streamlet_ports(self.ev.project, &sl).into_iter().collect()))
    }
}

fn inserted_instance(name: &str, target: ImplRef, file: &str) -> Instance {
    Instance {
        name: name.to_string(),
        target_raw: target.name.clone(),
        array_raw: String::new(),
        decl: None,
        file: file.to_string(),
        state: EvalState::Evaluated(InstanceInfo { target, array: None }),
    }
}

fn sugar_scope(h: &Helper, imp: &Implementation, scope: ScopeId) -> Result<bool, Diagnostic> {
    let project = h.ev.project;
    let s = project.scope(scope);
    let census = usage_census(project, imp);
    let (conns, mut taken) = {
        let d = s.read();
        (d.connections.clone(), d.instances.keys().cloned().collect::<BTreeSet<String>>())
    };
    if conns.iter().any(|c| !c.state.is_evaluated()) {
        return Ok(false);
    }
    let mut new_conns = conns.clone();
    let mut new_instances = Vec::new();
    let mut conn_names: BTreeSet<String> = conns.iter().map(|c| c.name.clone()).collect();
    let mut changed = false;
    for u in census.iter().filter(|u| u.role == Role::Source) {
        let key = (u.owner.clone(), u.port.clone(), u.index);
        let users: Vec<usize> =
            conns.iter().enumerate().filter(|(_, c)| c.state.value().is_some_and(|r| r.src.key() == key)).map(|(k, _)| k).collect();
        let src = match users.first() {
            Some(&k) => conns[k].state.value().expect("checked").src.clone(),
            None => continue,
        };
        if users.len() < 2 {
            continue;
        }
        let k = users.len() as i64;
        let (target, ports) = h.prelude("duplicator_i", vec![ArgValue::Type(src.info.ty.clone()), ArgValue::Value(Value::Int(k))])?;
        let mut parts = vec!["duplicate".to_string()];
        parts.extend(end_parts(&u.owner, &u.port, u.index));
        parts.push(k.to_string());
        let name = unique(clean_name(&parts), &taken);
        taken.insert(name.clone());
        let mut inp = ports["input"].clone();
        let mut outp = ports["output"].clone();
        inp.clock = src.info.clock.clone();
        outp.clock = src.info.clock.clone();
        let dup_owner = Owner::Instance(name.clone(), None);
        let in_end = ResolvedEnd { owner: dup_owner.clone(), port: "input".into(), index: None, info: inp };
        for (j, &ci) in users.iter().enumerate() {
            let c = &mut new_conns[ci];
            let EvalState::Evaluated(r) = &mut c.state else { unreachable!() };
            r.src = ResolvedEnd { owner: dup_owner.clone(), port: "output".into(), index: Some(j as i64), info: outp.clone() };
            c.src_raw = end_text(&r.src);
        }
        let cname = unique(format!("{name}_input"), &conn_names);
        conn_names.insert(cname.clone());
        new_conns.push(generated_connection(cname, src, in_end, &imp.file));
        new_instances.push(inserted_instance(&name, target, &imp.file));
        changed = true;
    }
    for u in census.iter().filter(|u| u.uses == 0 && u.role == Role::Source && matches!(u.owner, Owner::Instance(..))) {
        let Owner::Instance(iname, oi) = &u.owner else { unreachable!() };
        let info = {
            let d = s.read();
            let target = d.instances[iname].state.value().expect("census only lists evaluated instances").target.clone();
            drop(d);
            let sl = impl_streamlet(project, &target).expect("evaluated target");
            streamlet_ports(project, &sl).into_iter().find(|(n, _)| n == &u.port).expect("port from census").1
        };
        let (target, ports) = h.prelude("void_i", vec![ArgValue::Type(info.ty.clone())])?;
        let mut parts = vec!["void".to_string()];
        parts.extend(end_parts(&u.owner, &u.port, u.index));
        let name = unique(clean_name(&parts), &taken);
        taken.insert(name.clone());
        let mut inp = ports["input"].clone();
        inp.clock = info.clock.clone();
        let src = ResolvedEnd { owner: Owner::Instance(iname.clone(), *oi), port: u.port.clone(), index: u.index, info };
        let dst = ResolvedEnd { owner: Owner::Instance(name.clone(), None), port: "input".into(), index: None, info: inp };
        let cname = unique(format!("{name}_input"), &conn_names);
        conn_names.insert(cname.clone());
        new_conns.push(generated_connection(cname, src, dst, &imp.file));
        new_instances.push(inserted_instance(&name, target, &imp.file));
        changed = true;
    }
    if changed {
        let mut d = s.write();
        d.connections = new_conns;
        for i in new_instances {
            d.instances.insert(i.name.clone(), i);
        }
    }
    Ok(changed)
}

/// Rewrite every evaluated, non-external implementation. Returns the names of rewritten ones.
pub fn sugar_project(project: &Project) -> Result<Vec<ImplRef>, Vec<Diagnostic>> {
    let ev = Evaluator::new(project);
    let h = Helper { ev: &ev };
    let impls: Vec<Shared<Implementation>> = project.all_impls();
    let mut changed = Vec::new();
    let mut errs = Vec::new();
    for i in impls {
        let imp = read(&i).clone();
        if imp.is_template() || imp.is_external() || imp.is_alias() || !imp.state.is_evaluated() {
            continue;
        }
        let Some(scope) = imp.scope else { continue };
        match sugar_scope(&h, &imp, scope) {
            Ok(true) => changed.push(imp.reference()),
            Ok(false) => {}
            Err(e) => errs.push(e),
        }
    }
    if errs.is_empty() {
        Ok(changed)
    } else {
        errs.sort();
        Err(errs)
    }
}
