use super::FlatCircuit;

/// Graphviz text with one record node per component and one edge per net.
pub fn emit_dot(c: &FlatCircuit) -> String {
    let mut s = String::from("digraph {\n");
    for comp in &c.components {
        let mut label = format!("{{<component>{}", comp.flat_name);
        for p in &comp.ports {
            label.push_str(&format!("|<{}>{}", p.anchor, p.display));
        }
        label.push('}');
        let style = if comp.is_wrapper { "color=red, shape=record" } else { "shape=record" };
        s.push_str(&format!("{} [{style}, label=\"{label}\"];\n", comp.flat_name));
    }
    for n in &c.nets {
        s.push_str(&format!("{}:{} -> {}:{} [label=\"{}\"] ;\n", n.source.0, n.source.1, n.sink.0, n.sink.1, n.label));
    }
    s.push_str("}\n");
    s
}
