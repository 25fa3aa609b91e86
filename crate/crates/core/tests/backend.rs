use std::collections::{BTreeMap, BTreeSet};

use tydi::backend::{emit_dot, emit_ir, flatten, top_level_impls};
use tydi::model::read;
use tydi::pipeline::elaborate;
use tydi::sugar::sugar_project;
use tydi::value::ImplRef;

const TPCH: &str = include_str!("fixtures/tpch_q1.td");

/// Node name -> anchors, parsed back from the DOT text; panics on malformed lines.
fn check_dot(dot: &str) -> (BTreeMap<String, BTreeSet<String>>, usize) {
    let lines: Vec<&str> = dot.lines().collect();
    assert_eq!(lines.first(), Some(&"digraph {"));
    assert_eq!(lines.last(), Some(&"}"));
    let mut nodes = BTreeMap::new();
    let mut edges = Vec::new();
    for l in &lines[1..lines.len() - 1] {
        if l.contains(" -> ") {
            let (lhs, rest) = l.split_once(" -> ").unwrap();
            let (rhs, label) = rest.split_once(" [label=\"").unwrap();
            assert!(label.ends_with("\"] ;"), "{l}");
            edges.push((lhs.to_string(), rhs.to_string()));
        } else {
            let (name, rest) = l.split_once(' ').unwrap();
            assert!(rest.ends_with("}\"];"), "{l}");
            let label = rest.split_once("label=\"{").unwrap().1.trim_end_matches("}\"];");
            let mut anchors = BTreeSet::new();
            for field in label.split('|') {
                let anchor = field.strip_prefix('<').unwrap().split_once('>').unwrap().0;
                assert!(anchor.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'), "{anchor}");
                anchors.insert(anchor.to_string());
            }
            assert!(nodes.insert(name.to_string(), anchors).is_none(), "duplicate node {name}");
        }
    }
    for (a, b) in &edges {
        for end in [a, b] {
            let (n, p) = end.split_once(':').unwrap();
            assert!(nodes.get(n).is_some_and(|s| s.contains(p)), "dangling endpoint {end}");
        }
    }
    (nodes, edges.len())
}

#[test]
fn passthrough_top() {
    let src = "package t;\ntype s = Stream(Bit(8));\nstreamlet p_s { input: s in, output: s [2] out, };\nimpl p_i of p_s { input => output[0], input => output[1], };\n";
    let p = elaborate(&[("t.td", src)], None, 1).unwrap_or_else(|(_, e)| panic!("{e:#?}"));
    sugar_project(&p).unwrap();
    let c = flatten(&p, &ImplRef::new("t", "p_i")).unwrap();
    let dot = emit_dot(&c);
    let (nodes, edges) = check_dot(&dot);
    assert_eq!(edges, 3);
    assert!(nodes.contains_key("p_i__duplicate_self_input_2"));
    assert!(dot.contains("p_i [color=red, shape=record, label=\"{<component>p_i|<input>input|<output_AT_0>output@0|<output_AT_1>output@1}\"];"), "{dot}");
    assert!(dot.contains("p_i__duplicate_self_input_2:output_AT_1 -> p_i:output_AT_1"), "{dot}");
}

#[test]
fn tpch_dot_and_ir() {
    let p = elaborate(&[("tpch_q1.td", TPCH)], None, 1).unwrap_or_else(|(_, e)| panic!("{e:#?}"));
    sugar_project(&p).unwrap();
    let tops = top_level_impls(&p);
    assert_eq!(tops, vec![ImplRef::new("std", "main_i")]);
    let c = flatten(&p, &tops[0]).unwrap();
    let (nodes, edges) = check_dot(&emit_dot(&c));
    assert_eq!(nodes.len(), c.components.len());
    // one net per connection of every flattened component
    let total: usize = c
        .components
        .iter()
        .map(|comp| {
            let i = read(&p.implementation(&comp.source).unwrap()).clone();
            match (i.scope, i.is_external()) {
                (Some(s), false) => p.scope(s).read().connections.len(),
                _ => 0,
            }
        })
        .sum();
    assert_eq!(edges, total);
    assert!(nodes.contains_key("main_i__data_filter__duplicate_compare_date_output_14"), "{:?}", nodes.keys().take(20).collect::<Vec<_>>());
    let ir: serde_json::Value = serde_json::from_str(&emit_ir(&p)).unwrap();
    assert_eq!(ir["implementations"]["std.void_i"], serde_json::Value::Null);
    assert!(ir["implementations"]["std.lineitem_i"]["external"].as_bool().unwrap());
}
