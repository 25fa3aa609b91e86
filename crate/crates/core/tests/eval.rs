use tydi::model::dump::dump_code_structure;
use tydi::pipeline::elaborate;

fn dump_ok(srcs: &[(&str, &str)], top: Option<&str>) -> String {
    match elaborate(srcs, top, 1) {
        Ok(p) => dump_code_structure(&p),
        Err((_, e)) => panic!("{e:#?}"),
    }
}

fn errors(srcs: &[(&str, &str)], top: Option<&str>) -> Vec<String> {
    match elaborate(srcs, top, 1) {
        Ok(_) => panic!("expected errors"),
        Err((_, e)) => e.into_iter().map(|d| d.message).collect(),
    }
}

const SIMPLE_0: &str = "package simple_0;\nimport simple_1;\n\nconst i1: int = 1 + 100;\nconst external_var0 = simple_1.i1 + 10;\nconst external_flag0 = false || simple_1.flag;\n";
const SIMPLE_1: &str = "package simple_1;\nconst i1 = 100;\nconst flag = true;\nconst i2 = 500;\n";

#[test]
fn cross_package_lazy() {
    let d = dump_ok(&[("simple_0.td", SIMPLE_0), ("simple_1.td", SIMPLE_1)], Some("simple_0"));
    assert!(d.contains("i1:int(101)"), "{d}");
    assert!(d.contains("external_var0:int(110)"));
    assert!(d.contains("external_flag0:bool(true)"));
    assert!(d.contains("i2:UnknownType(NotInferred(\"500\"))"));
    assert!(d.contains("i1:int(100)"));
}

#[test]
fn precedence_fix() {
    let d = dump_ok(&[("p.td", "package p;\nconst i1 = -1+2;")], Some("p"));
    assert!(d.contains("i1:int(1)"), "{d}");
}

#[test]
fn date_bit_widths() {
    let src = "package tpch;\ntype year_t = Bit(ceil(log2(10^5-1)));\ntype month_t = Bit(ceil(log2(12)));\ntype day_t = Bit(ceil(log2(31)));\ntype Group Date { year: year_t, month: month_t, day: day_t, };\nconst max_decimal_15 = 10^15 - 1;\nconst bit_width_decimal_15 = ceil(log2(max_decimal_15));\n";
    let d = dump_ok(&[("t.td", src)], Some("tpch"));
    for want in ["year:Bit(17)", "month:Bit(4)", "day:Bit(5)", "bit_width_decimal_15:int(50)"] {
        assert!(d.contains(want), "missing {want}\n{d}");
    }
}

const BYPASS: &str = "package p;
type rgb = Bit(24);
type rgb_stream = Stream(rgb);
streamlet bypass_s<n: int> {
  inputs: rgb_stream [n] in,
  outputs: rgb_stream [n] out,
};
streamlet one_s {
  input: rgb_stream in,
  output: rgb_stream out,
};
external impl one_i of one_s {
};
impl bypass_i<n: int> of bypass_s<n> {
  for i in (0=1=>n) {
    instance bypass_{{i}}(one_i),
    inputs[i] => bypass_{{i}}.input,
    bypass_{{i}}.output => outputs[i],
  }
};
impl top_i of bypass_s<4> {
  instance b(bypass_i<4>),
  inputs[0] => b.inputs[0],
  inputs[1] => b.inputs[1],
  inputs[2] => b.inputs[2],
  inputs[3] => b.inputs[3],
  b.outputs[0] => outputs[0],
  b.outputs[1] => outputs[1],
  b.outputs[2] => outputs[2],
  b.outputs[3] => outputs[3],
};
";

#[test]
fn for_expansion_and_templates() {
    let d = dump_ok(&[("p.td", BYPASS)], None);
    assert!(d.contains("Implement(bypass_i@4)<NormalImplement>"), "{d}");
    for i in 0..4 {
        assert!(d.contains(&format!("bypass_{i}:(Implement(one_i))")), "{d}");
    }
    assert!(d.contains("Streamlet(bypass_s@4)"));
    // the template itself is untouched
    assert!(d.contains("Implement(bypass_i)<@int> -> ProxyStreamlet"), "{d}");
}

#[test]
fn plain_instance_in_for_is_rejected() {
    let src = BYPASS.replace("instance bypass_{{i}}(one_i),", "instance b(one_i),");
    let e = errors(&[("p.td", &src)], None);
    assert!(e.iter().any(|m| m.contains("cannot be declared in a for scope")), "{e:?}");
}

#[test]
fn assertions() {
    let ok = "package p;\ntype Group rgb { const x = 8, r: Bit(x), };\nconst x = type rgb.x;\nconst y = 1;\n";
    let d = dump_ok(&[("p.td", ok)], Some("p"));
    assert!(d.contains("x:int(8)"), "{d}");
    let bad = "package p;\nstreamlet s { const x = 9, assert(x == 8), };\nexternal impl i of s {\n};\n";
    let e = errors(&[("p.td", bad)], None);
    assert!(e.iter().any(|m| m.contains("assertion") && m.contains("int(9)")), "{e:?}");
}

#[test]
fn cycles_are_reported() {
    let e = errors(&[("p.td", "package p;\nconst a = b + 1;\nconst b = a + 1;\n")], Some("p"));
    assert!(e.iter().any(|m| m.contains("circular dependency")), "{e:?}");
}

const TPCH: &str = include_str!("fixtures/tpch_q1.td");

#[test]
fn tpch_elaborates() {
    let d = dump_ok(&[("tpch_q1.td", TPCH)], None);
    for want in ["year:Bit(17)", "month:Bit(4)", "day:Bit(5)", "bit_width_decimal_15:int(50)", "stream_filter_i@Stream(SQL_decimal_15_2_stream)"] {
        assert!(d.contains(want), "missing {want}");
    }
}
