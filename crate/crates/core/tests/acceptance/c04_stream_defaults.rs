use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::{json, Value};
use tydi::backend::emit_ir;

use crate::common::{elab, ensure};

/// Default row of the stream property table.
fn table_defaults() -> Value {
    json!({
        "dimension": 0,
        "user": { "kind": "Null" },
        "throughput": 1.0,
        "synchronicity": "Sync",
        "complexity": 7,
        "direction": "Forward",
        "keep": false,
    })
}

fn record(ir: &Value, name: &str) -> Value {
    let mut t = ir["types"][name].clone();
    if let Some(m) = t.as_object_mut() {
        m.remove("name");
        m.remove("element");
        m.remove("kind");
    }
    t
}

fn ir_of(src: &str) -> Result<Value, String> {
    let p = elab(&[("p.td", src)], Some("p"))?;
    serde_json::from_str(&emit_ir(&p)).map_err(|e| e.to_string())
}

fn property_strategy() -> impl Strategy<Value = Vec<String>> {
    (
        0i64..4,
        prop_oneof![Just("Null".to_string()), (1i64..9).prop_map(|w| format!("Bit({w})"))],
        prop_oneof![Just("1".to_string()), Just("2.5".to_string()), Just("0.5".to_string())],
        prop::sample::select(vec!["Sync", "Flatten", "Desync", "FlatDesync"]),
        1i64..8,
        prop::sample::select(vec!["Forward", "Reverse"]),
        any::<bool>(),
    )
        .prop_map(|(d, u, t, s, c, r, x)| {
            vec![
                format!("d={d}"),
                format!("u={u}"),
                format!("t={t}"),
                format!("s=\"{s}\""),
                format!("c={c}"),
                format!("r=\"{r}\""),
                format!("x={x}"),
            ]
        })
        .prop_flat_map(|props| (0usize..=7).prop_flat_map(move |n| Just(props[..n].to_vec())))
        .prop_flat_map(|props| (Just(props.clone()).prop_shuffle(), Just(props).prop_shuffle()).prop_map(|(a, b)| [a, b].concat()))
}

pub fn run() -> Result<(), String> {
    let ir = ir_of("package p;\ntype s = Stream(Bit(4));\n")?;
    let got = record(&ir, "p.s");
    ensure!(got == table_defaults(), "defaults differ: {got}");
    let line = "dimension=0, user=DataNull, throughput=1, synchronicity=Sync, complexity=7, direction=Forward, keep=false";
    let d = crate::common::dump(&[("p.td", "package p;\ntype s = Stream(Bit(4));\n")], Some("p"))?;
    ensure!(d.lines().any(|l| l.trim() == line), "dump lacks the default property line");

    let mut runner = TestRunner::new(Config { cases: 32, failure_persistence: None, ..Config::default() });
    runner
        .run(&property_strategy(), |both| {
            let half = both.len() / 2;
            let (a, b) = both.split_at(half);
            let fmt = |ps: &[String]| ps.iter().map(|p| format!(", {p}")).collect::<String>();
            let src = format!("package p;\ntype a = Stream(Bit(4){});\ntype b = Stream(Bit(4){});\n", fmt(a), fmt(b));
            let ir = ir_of(&src).map_err(|e| TestCaseError::fail(format!("{src}: {e}")))?;
            prop_assert_eq!(record(&ir, "p.a"), record(&ir, "p.b"), "{}", src);
            Ok(())
        })
        .map_err(|e| e.to_string())
}
