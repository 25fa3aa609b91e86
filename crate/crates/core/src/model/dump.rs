//! Text rendering of the code structure.

use std::fmt::Write as _;

use super::*;
use crate::syntax::{anonymous_stream_name, PropKind, PropValue, TypeExprKind};

struct Out {
    buf: String,
    depth: usize,
}

impl Out {
    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.buf.push_str("  ");
        }
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(&format!("{s}{{"));
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        self.line("}");
    }
}

fn not_inferred(raw: &str) -> String {
    format!("NotInferred({raw:?})")
}

/// Pre-evaluation form of a type expression.
pub fn render_type_expr(t: &TypeExpr) -> String {
    match &t.kind {
        TypeExprKind::Null => "DataNull".into(),
        TypeExprKind::Bit(_) => {
            let inner = t.raw.trim();
            let arg = inner.strip_prefix("Bit").map(str::trim).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'));
            format!("Bit({})", not_inferred(arg.unwrap_or(inner).trim()))
        }
        TypeExprKind::Stream { elem, .. } => format!("Stream({})", anonymous_stream_name(elem)),
        TypeExprKind::Named(n) => format!("VarType({n})"),
        TypeExprKind::Qualified(p, n) => format!("VarType({p}.{n})"),
        TypeExprKind::Compound(c) if c.is_union => format!("DataUnion({})", c.name),
        TypeExprKind::Compound(c) => format!("DataGroup({})", c.name),
        TypeExprKind::Member { .. } => format!("VarType({})", t.raw.split_whitespace().collect::<Vec<_>>().join(" ")),
    }
}

fn variable_text(v: &Variable) -> String {
    match (&v.state, &v.origin) {
        (_, VarOrigin::Package) => "PackageType(NotInferred(\"\"))".into(),
        (EvalState::Evaluated(val), _) => val.to_string(),
        (EvalState::NotInferred, VarOrigin::Param(k)) => {
            let head = match k {
                ParamKind::Basic(b) => b.name(),
                ParamKind::Type => "DummyLogicalData",
                ParamKind::ImplOf(_) => "DummyImplement",
            };
            format!("{head}({})", not_inferred(&v.raw))
        }
        (EvalState::NotInferred, _) => {
            format!("{}({})", v.kind.map_or("UnknownType", |k| k.name()), not_inferred(&v.raw))
        }
        (EvalState::Error(e), _) => format!("{}(Error({:?}))", v.kind.map_or("UnknownType", |k| k.name()), e.message),
    }
}

fn stream_block(o: &mut Out, head: &str, data: &str, props: &str) {
    o.open(head);
    o.line(&format!("DataType={data}"));
    o.line(props);
    o.close();
}

fn unevaluated_props(props: &[crate::syntax::StreamProp]) -> String {
    let d = StreamProps::defaults();
    let get = |k: PropKind, default: String| -> String {
        match props.iter().find(|p| p.kind == k) {
            Some(p) => match &p.value {
                PropValue::Type(t) => render_type_expr(t),
                PropValue::Expr(_) => not_inferred(p.raw.trim()),
            },
            None => default,
        }
    };
    format!(
        "dimension={}, user={}, throughput={}, synchronicity={}, complexity={}, direction={}, keep={}",
        get(PropKind::Dimension, d.dimension.to_string()),
        get(PropKind::User, d.user.short()),
        get(PropKind::Throughput, d.throughput.to_string()),
        get(PropKind::Synchronicity, d.synchronicity.name().into()),
        get(PropKind::Complexity, d.complexity.to_string()),
        get(PropKind::Direction, d.direction.name().into()),
        get(PropKind::Keep, d.keep.to_string()),
    )
}

fn type_value_entry(o: &mut Out, name: &str, t: &TypeValue) {
    match &t.kind {
        TypeKind::Stream { elem, props } => stream_block(o, &format!("{name}:{}", t.short()), &elem.short(), &props.render()),
        _ => o.line(&format!("{name}:{}", t.short())),
    }
}

fn type_entry(p: &Project, o: &mut Out, t: &TypeEntry) {
    match (&t.body, &t.state) {
        (TypeBody::Compound { decl, scope }, st) => {
            let head = if decl.is_union { "DataUnion" } else { "DataGroup" };
            let suffix = match st {
                EvalState::Error(e) => format!("<Error({:?})>", e.message),
                _ => String::new(),
            };
            o.open(&format!("{}:{head}({}){suffix}", t.name, decl.name));
            scope_block(p, o, *scope);
            o.close();
        }
        (_, EvalState::Evaluated(v)) => type_value_entry(o, &t.name, v),
        (_, EvalState::Error(e)) => o.line(&format!("{}:Error({:?})", t.name, e.message)),
        (TypeBody::Expr(te), EvalState::NotInferred) => match &te.kind {
            TypeExprKind::Stream { elem, props } => {
                stream_block(o, &format!("{}:Stream({})", t.name, t.name), &render_type_expr(elem), &unevaluated_props(props))
            }
            _ => o.line(&format!("{}:{}", t.name, render_type_expr(te))),
        },
        (TypeBody::Bound, EvalState::NotInferred) => o.line(&format!("{}:DummyLogicalData", t.name)),
    }
}

fn array_suffix(n: Option<i64>) -> String {
    n.map_or(String::new(), |n| format!("[{n}]"))
}

fn raw_array_suffix(present: bool, raw: &str) -> String {
    if present {
        format!("[{}]", not_inferred(raw))
    } else {
        String::new()
    }
}

fn port_info_text(info: &PortInfo) -> String {
    format!("Port({},{}){} `{}", info.ty.short(), info.dir.name(), array_suffix(info.array), info.clock.render())
}

fn port_line(p: &Port) -> String {
    match &p.state {
        EvalState::Evaluated(info) => format!("{}:{}", p.name, port_info_text(info)),
        st => {
            let clock = if p.decl.clock.is_some() { not_inferred(&p.decl.clock_raw) } else { "DefaultClockDomain".into() };
            let err = match st {
                EvalState::Error(e) => format!(" Error({:?})", e.message),
                _ => String::new(),
            };
            format!(
                "{}:Port({},{}){} `{clock}{err}",
                p.name,
                render_type_expr(&p.decl.ty),
                p.decl.dir.name(),
                raw_array_suffix(p.decl.array.is_some(), &p.decl.array_raw)
            )
        }
    }
}

fn instance_line(i: &Instance) -> String {
    match &i.state {
        EvalState::Evaluated(info) => format!("{}:(Implement({})){}", i.name, info.target.name, array_suffix(info.array)),
        EvalState::NotInferred => {
            format!("{}:({}){}", i.name, not_inferred(&i.target_raw), raw_array_suffix(!i.array_raw.is_empty(), &i.array_raw))
        }
        EvalState::Error(e) => format!("{}:(Error({:?}))", i.name, e.message),
    }
}

fn raw_end(owner: &str, port: &str) -> String {
    let o = if owner.is_empty() { "Self".to_string() } else { format!("ExternalOwner({owner})") };
    format!("{o}.{}", not_inferred(port))
}

fn resolved_end(e: &ResolvedEnd) -> String {
    let idx = e.index.map_or(String::new(), |i| format!("[{i}]"));
    format!("{}.{}{idx}:{}", e.owner.render(), e.port, port_info_text(&e.info))
}

fn connection_line(c: &Connection) -> String {
    let flag = if c.no_strict { " @NoStrictType@" } else { "" };
    match &c.state {
        EvalState::Evaluated(r) => {
            format!("{} ={}=> {} ({}){flag}", resolved_end(&r.src), r.fifo, resolved_end(&r.dst), c.name)
        }
        st => {
            let err = match st {
                EvalState::Error(e) => format!(" Error({:?})", e.message),
                _ => String::new(),
            };
            format!(
                "{} ={}=> {} ({}){flag}{err}",
                raw_end(&c.src_raw.0, &c.src_raw.1),
                c.fifo_raw.trim(),
                raw_end(&c.dst_raw.0, &c.dst_raw.1),
                c.name
            )
        }
    }
}

fn template_header(params: &[TemplateParam]) -> String {
    params
        .iter()
        .map(|p| match &p.kind {
            ParamKind::Type => "@LogicalDataType(DummyLogicalData)".to_string(),
            ParamKind::Basic(b) => format!("@{}", b.name()),
            ParamKind::ImplOf(_) => "@Implement(DummyImplement)".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn streamlet_block(p: &Project, o: &mut Out, s: &Streamlet) {
    let hdr = if s.is_template() { template_header(&s.params) } else { "NormalStreamlet".into() };
    let err = match &s.state {
        EvalState::Error(e) => format!("<Error({:?})>", e.message),
        _ => String::new(),
    };
    o.open(&format!("Streamlet({})<{hdr}>{err}", s.name));
    scope_block(p, o, s.scope);
    o.close();
}

fn proxy_streamlet(d: &crate::syntax::ItemRef) -> String {
    match &d.args {
        None => format!("{}<>", d.raw.trim()),
        Some(_) => d.raw.replace("type ", "@").split_whitespace().collect::<Vec<_>>().join(""),
    }
}

fn impl_block(p: &Project, o: &mut Out, i: &Implementation) {
    let err = match &i.state {
        EvalState::Error(e) => format!("<Error({:?})>", e.message),
        _ => String::new(),
    };
    match &i.body {
        ImplBody::Alias(a) => {
            let target = match &i.alias_of {
                Some(r) => format!("Implement({})", r.name),
                None => not_inferred(a.target.raw.trim()),
            };
            o.line(&format!("Implement({})<AliasImplement>{err} -> {target}", i.name));
        }
        ImplBody::Decl(d) => {
            let hdr = if i.is_template() {
                let mut h = template_header(&i.params);
                if d.external {
                    h.push_str("|External");
                }
                h
            } else if d.external {
                "ExternalImplement".into()
            } else {
                "NormalImplement".into()
            };
            let sl = match &i.streamlet {
                Some(r) => format!("Streamlet({})", r.name),
                None => format!("ProxyStreamlet({})", proxy_streamlet(&d.of)),
            };
            o.open(&format!("Implement({})<{hdr}>{err} -> {sl}", i.name));
            if let Some(s) = i.scope {
                scope_block(p, o, s);
            }
            o.line(if d.process { "simulation_process{Some}" } else { "simulation_process{None}" });
            o.close();
        }
    }
}

fn generative_block(p: &Project, o: &mut Out, g: &Generative) {
    match g {
        Generative::If { branches, otherwise } => {
            for (k, (raw, s)) in branches.iter().enumerate() {
                let head = if k == 0 { "If" } else { "Elif" };
                o.open(&format!("{head}({})", not_inferred(raw.trim())));
                scope_block(p, o, *s);
                o.close();
            }
            if let Some(s) = otherwise {
                o.open("Else");
                scope_block(p, o, *s);
                o.close();
            }
        }
        Generative::For { var, iter_raw, scope } => {
            o.open(&format!("For({var} in {})", not_inferred(iter_raw.trim())));
            scope_block(p, o, *scope);
            o.close();
        }
    }
}

fn scope_block(p: &Project, o: &mut Out, id: ScopeId) {
    let scope = p.scope(id);
    // Snapshot the entries so no scope lock is held while nested scopes are rendered.
    let (vars, types, streamlets, impls, ports, instances, conns, generative) = {
        let d = scope.read();
        (
            d.vars.values().cloned().collect::<Vec<_>>(),
            d.types.values().cloned().collect::<Vec<_>>(),
            d.streamlets.values().cloned().collect::<Vec<_>>(),
            d.impls.values().cloned().collect::<Vec<_>>(),
            d.ports.values().cloned().collect::<Vec<_>>(),
            d.instances.values().cloned().collect::<Vec<_>>(),
            d.connections.clone(),
            d.generative.clone(),
        )
    };
    o.open(&format!("Scope({})", scope.name));
    if !vars.is_empty() {
        o.open("Variables");
        for v in &vars {
            let v = read(v);
            o.line(&format!("{}:{}", v.name, variable_text(&v)));
        }
        o.close();
    }
    if !types.is_empty() {
        o.open("Types");
        for t in &types {
            let t = read(t).clone();
            type_entry(p, o, &t);
        }
        o.close();
    }
    if !streamlets.is_empty() {
        o.open("Streamlets");
        for s in &streamlets {
            let s = read(s).clone();
            streamlet_block(p, o, &s);
        }
        o.close();
    }
    if !impls.is_empty() {
        o.open("Implements");
        for i in &impls {
            let i = read(i).clone();
            impl_block(p, o, &i);
        }
        o.close();
    }
    if !scope.relations.is_empty() {
        o.open("ScopeRelations");
        for (r, t) in &scope.relations {
            o.line(&format!("--{}-->{}", r.name(), p.scope(*t).name));
        }
        o.close();
    }
    if !ports.is_empty() {
        o.open("Ports");
        for x in &ports {
            o.line(&port_line(x));
        }
        o.close();
    }
    if !instances.is_empty() {
        o.open("Instances");
        for x in &instances {
            o.line(&instance_line(x));
        }
        o.close();
    }
    if !conns.is_empty() {
        o.open("Connections");
        for c in &conns {
            o.line(&connection_line(c));
        }
        o.close();
    }
    if !generative.is_empty() {
        o.open("Generative");
        for g in &generative {
            generative_block(p, o, g);
        }
        o.close();
    }
    o.close();
}

/// Render the whole project; entries within each section are sorted by id.
pub fn dump_code_structure(p: &Project) -> String {
    let mut o = Out { buf: String::new(), depth: 0 };
    o.open(&format!("Project({})", p.name));
    for pkg in p.packages.values() {
        o.open(&format!("Package({})", pkg.name));
        scope_block(p, &mut o, pkg.scope);
        o.close();
    }
    o.close();
    o.buf
}

/// Render a single scope (used by tests).
pub fn dump_scope(p: &Project, id: ScopeId) -> String {
    let mut o = Out { buf: String::new(), depth: 0 };
    scope_block(p, &mut o, id);
    let mut s = String::new();
    let _ = write!(s, "{}", o.buf);
    s
}
