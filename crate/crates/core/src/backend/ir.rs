use serde_json::{json, Map, Value as Json};

use crate::model::types::{TypeKind, TypeValue};
use crate::model::{read, Owner, Project, ResolvedEnd};

fn type_json(t: &TypeValue) -> Json {
    match &t.kind {
        TypeKind::Null => json!({ "kind": "Null" }),
        TypeKind::Bit(w) => json!({ "kind": "Bit", "width": w }),
        TypeKind::Compound { union, fields, .. } => json!({
            "kind": if *union { "Union" } else { "Group" },
            "name": t.name,
            "fields": fields.iter().map(|(n, f)| json!({ "name": n, "type": type_json(f) })).collect::<Vec<_>>(),
        }),
        TypeKind::Stream { elem, props } => json!({
            "kind": "Stream",
            "name": t.name,
            "element": type_json(elem),
            "dimension": props.dimension,
            "user": type_json(&props.user),
            "throughput": props.throughput,
            "synchronicity": props.synchronicity.name(),
            "complexity": props.complexity,
            "direction": props.direction.name(),
            "keep": props.keep,
        }),
    }
}

fn end_json(e: &ResolvedEnd) -> Json {
    let owner = match &e.owner {
        Owner::This => "self".to_string(),
        Owner::Instance(n, None) => n.clone(),
        Owner::Instance(n, Some(i)) => format!("{n}[{i}]"),
    };
    let port = match e.index {
        None => e.port.clone(),
        Some(i) => format!("{}[{i}]", e.port),
    };
    Json::String(format!("{owner}.{port}"))
}

/// Every evaluated named type, streamlet and implementation, keyed by `package.name`.
pub fn emit_ir(project: &Project) -> String {
    let mut types = Map::new();
    let mut streamlets = Map::new();
    let mut impls = Map::new();
    for (pkg, p) in &project.packages {
        let sc = project.scope(p.scope);
        let d = sc.read();
        for (name, t) in &d.types {
            if let Some(v) = read(t).state.value() {
                types.insert(format!("{pkg}.{name}"), type_json(v));
            }
        }
    }
    for s in project.all_streamlets() {
        let s = read(&s).clone();
        if s.is_template() || !s.state.is_evaluated() {
            continue;
        }
        let mut ports = Map::new();
        for (name, port) in &project.scope(s.scope).read().ports {
            let Some(info) = port.state.value() else { continue };
            ports.insert(
                name.clone(),
                json!({
                    "direction": info.dir.name(),
                    "array": info.array,
                    "clock": info.clock.render(),
                    "type": type_json(&info.ty),
                }),
            );
        }
        streamlets.insert(format!("{}.{}", s.package, s.name), json!({ "doc": s.decl.doc, "ports": ports }));
    }
    for i in project.all_impls() {
        let g = read(&i).clone();
        if g.is_template() || !g.state.is_evaluated() {
            continue;
        }
        let doc = match &g.body {
            crate::model::ImplBody::Decl(d) => d.doc.clone(),
            crate::model::ImplBody::Alias(a) => a.doc.clone(),
        };
        let mut instances = Map::new();
        let mut conns = Vec::new();
        if let (Some(s), false) = (g.scope, g.is_external()) {
            let sc = project.scope(s);
            let d = sc.read();
            for (name, inst) in &d.instances {
                if let Some(info) = inst.state.value() {
                    instances.insert(name.clone(), json!({ "target": format!("{}.{}", info.target.package, info.target.name), "array": info.array }));
                }
            }
            for c in &d.connections {
                if let Some(r) = c.state.value() {
                    conns.push(json!({
                        "name": c.name,
                        "src": end_json(&r.src),
                        "dst": end_json(&r.dst),
                        "fifo": r.fifo,
                        "no_strict": c.no_strict,
                    }));
                }
            }
        }
        impls.insert(
            format!("{}.{}", g.package, g.name),
            json!({
                "external": g.is_external(),
                "doc": doc,
                "streamlet": g.streamlet.as_ref().map(|s| format!("{}.{}", s.package, s.name)),
                "alias_of": g.alias_of.as_ref().map(|s| format!("{}.{}", s.package, s.name)),
                "instances": instances,
                "connections": conns,
            }),
        );
    }
    let root = json!({ "project": project.name, "types": types, "streamlets": streamlets, "implementations": impls });
    let mut s = serde_json::to_string_pretty(&root).expect("json values serialize");
    s.push('\n');
    s
}
