use std::collections::{BTreeMap, BTreeSet};

use tydi::backend::{emit_dot, flatten};
use tydi::model::read;
use tydi::sugar::sugar_project;
use tydi::value::ImplRef;

use crate::common::{elab, ensure};

const TWO_LEVEL: &str = "package main;
type s_t = Stream(Bit(8));
streamlet acc_s { input: s_t in, output: s_t [2] out, };
external impl acc_i of acc_s {};
streamlet join_s { input: s_t [2] in, output: s_t out, };
external impl join_i of join_s {};
streamlet mid_s { input: s_t in, output: s_t out, };
impl mid_i of mid_s {
  instance accu(acc_i),
  instance join(join_i),
  input => accu.input,
  accu.output[0] => join.input[0],
  accu.output[1] => join.input[1],
  join.output => output,
};
streamlet main_s { input: s_t in, err: s_t out, side: s_t out, };
impl main_i of main_s {
  instance data_filter(mid_i),
  input => data_filter.input,
  data_filter.output => err,
  data_filter.output => side,
};
";

struct Node {
    wrapper: bool,
    anchors: BTreeSet<String>,
    displays: BTreeMap<String, String>,
}

struct Edge {
    from: (String, String),
    to: (String, String),
    label: String,
}

/// Mechanical reading of the DOT text; any deviation from the expected line shapes is an error.
fn parse_dot(dot: &str) -> Result<(BTreeMap<String, Node>, Vec<Edge>), String> {
    let lines: Vec<&str> = dot.lines().collect();
    ensure!(lines.first() == Some(&"digraph {") && lines.last() == Some(&"}"), "not a digraph block");
    let mut nodes = BTreeMap::new();
    let mut edges = Vec::new();
    for l in &lines[1..lines.len() - 1] {
        if let Some((lhs, rest)) = l.split_once(" -> ") {
            let (rhs, tail) = rest.split_once(" [label=\"").ok_or(format!("edge without label: {l}"))?;
            let label = tail.strip_suffix("\"] ;").ok_or(format!("bad edge end: {l}"))?;
            let split = |e: &str| e.split_once(':').map(|(a, b)| (a.to_string(), b.to_string())).ok_or(format!("bad endpoint {e}"));
            edges.push(Edge { from: split(lhs)?, to: split(rhs)?, label: label.to_string() });
            continue;
        }
        let (name, attrs) = l.split_once(" [").ok_or(format!("bad node: {l}"))?;
        let (style, label) = attrs.split_once("label=\"").ok_or(format!("node without label: {l}"))?;
        let wrapper = match style {
            "color=red, shape=record, " => true,
            "shape=record, " => false,
            _ => return Err(format!("bad node style: {l}")),
        };
        let body = label.strip_prefix('{').and_then(|b| b.strip_suffix("}\"];")).ok_or(format!("bad record label: {l}"))?;
        let mut fields = body.split('|');
        ensure!(fields.next() == Some(&format!("<component>{name}")[..]), "first field must name the component: {l}");
        let mut anchors = BTreeSet::new();
        let mut displays = BTreeMap::new();
        for f in fields {
            let (anchor, display) = f.strip_prefix('<').and_then(|f| f.split_once('>')).ok_or(format!("bad field {f}"))?;
            ensure!(anchor.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'), "anchor {anchor} has invalid characters");
            anchors.insert(anchor.to_string());
            displays.insert(anchor.to_string(), display.to_string());
        }
        ensure!(nodes.insert(name.to_string(), Node { wrapper, anchors, displays }).is_none(), "duplicate node {name}");
    }
    Ok((nodes, edges))
}

pub fn run() -> Result<(), String> {
    let p = elab(&[("main.td", TWO_LEVEL)], None)?;
    sugar_project(&p).map_err(|e| format!("{e:?}"))?;
    let c = flatten(&p, &ImplRef::new("main", "main_i")).map_err(|e| e.message)?;
    let dot = emit_dot(&c);
    let (nodes, edges) = parse_dot(&dot)?;

    let names: BTreeSet<&str> = nodes.keys().map(|s| s.as_str()).collect();
    for want in ["main_i", "main_i__data_filter", "main_i__data_filter__accu", "main_i__data_filter__join"] {
        ensure!(names.contains(want), "missing component {want}:\n{dot}");
    }
    for (name, n) in &nodes {
        let has_children = names.iter().any(|m| m.starts_with(&format!("{name}__")));
        ensure!(n.wrapper == has_children, "{name}: wrapper={} but children={has_children}", n.wrapper);
        ensure!(name.split("__").all(|seg| !seg.is_empty()), "{name} has an empty hierarchy segment");
    }
    let accu = &nodes["main_i__data_filter__accu"];
    ensure!(accu.displays.get("output_AT_1").map(|s| s.as_str()) == Some("output@1"), "array anchors: {:?}", accu.displays);

    for e in &edges {
        for (comp, port) in [&e.from, &e.to] {
            ensure!(nodes.get(comp).is_some_and(|n| n.anchors.contains(port)), "edge endpoint {comp}:{port} is not in the node's label");
        }
        let (_, rest) = e.label.split_once("__").ok_or(format!("label {}", e.label))?;
        ensure!(rest.contains("::"), "label {} lacks the parent path", e.label);
    }
    let mut labels: Vec<&str> = edges.iter().map(|e| e.label.as_str()).collect();
    ensure!(labels.windows(2).all(|w| w[0] <= w[1]), "edges are not sorted by label");
    labels.dedup();
    ensure!(labels.len() == edges.len(), "duplicate edge labels");

    let connections: usize = ["main_i", "mid_i"]
        .iter()
        .map(|n| {
            let i = read(&p.implementation(&ImplRef::new("main", *n)).unwrap()).clone();
            p.scope(i.scope.unwrap()).read().connections.len()
        })
        .sum();
    ensure!(edges.len() == connections, "{} edges for {connections} connections", edges.len());
    let wrapper_edge = edges.iter().find(|e| e.to == ("main_i__data_filter__accu".to_string(), "input".to_string()));
    ensure!(wrapper_edge.is_some_and(|e| e.from == ("main_i__data_filter".to_string(), "input".to_string())), "wrapper port does not feed inward");
    Ok(())
}
