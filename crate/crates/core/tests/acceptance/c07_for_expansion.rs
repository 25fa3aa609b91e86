use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tydi::model::dump::dump_scope;
use tydi::model::{read, Project};
use tydi::value::ImplRef;

use crate::common::{elab, ensure};

const ALTERNATIVE_ID: &str = include_str!("../fixtures/alternative_id.td");

const HEAD: &str = "package p;
type s_t = Stream(Bit(8));
streamlet one_s { input: s_t in, output: s_t out, };
external impl one_i of one_s {};
streamlet k_s<k: int> { input: s_t in, };
external impl k_i<k: int> of k_s<k> {};
streamlet top_s { inputs: s_t [8] in, outputs: s_t [8] out, };
";

/// Body items; `I` stands for the loop variable.
const ITEMS: [&str; 5] = [
    "inputs[I] => bypass_{{I}}.input,",
    "bypass_{{I}}.output => outputs[I],",
    "instance k_{{I}}(k_i<I>),",
    "instance w_{{I}}(k_i<I * 2 + 1>),",
    "inputs[7 - I] => k_{{I}}.input,",
];

#[derive(Debug, Clone)]
struct Case {
    values: Vec<i64>,
    as_range: bool,
    items: Vec<bool>,
}

fn case_strategy() -> impl Strategy<Value = Case> {
    prop_oneof![
        (1usize..=8).prop_map(|n| (0..n as i64).collect::<Vec<_>>()).prop_map(|v| (v, true)),
        prop::sample::subsequence((0..8).collect::<Vec<i64>>(), 1..=8).prop_shuffle().prop_map(|v| (v, false)),
    ]
    .prop_flat_map(|(values, as_range)| {
        prop::collection::vec(any::<bool>(), ITEMS.len()).prop_map(move |items| Case { values: values.clone(), as_range, items })
    })
}

fn body(case: &Case) -> Vec<&'static str> {
    let mut out = vec!["instance bypass_{{I}}(one_i),"];
    for (k, item) in ITEMS.iter().enumerate() {
        // the reversed connection needs the k instance
        let needs_k = k == 4 && !case.items[2];
        if case.items[k] && !needs_k {
            out.push(item);
        }
    }
    out
}

fn expanded_source(case: &Case) -> String {
    let iter = if case.as_range {
        format!("(0=1=>{})", case.values.len())
    } else {
        "vals".into()
    };
    let vals = case.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
    let items: String = body(case).iter().map(|i| format!("    {}\n", i.replace('I', "i"))).collect();
    format!("{HEAD}const vals = {{{vals}}};\nimpl top_i of top_s {{\n  for i in {iter} {{\n{items}  }}\n}};\n")
}

fn unrolled_source(case: &Case) -> String {
    let vals = case.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
    let mut items = String::new();
    for v in &case.values {
        for i in body(case) {
            items.push_str(&format!("  {}\n", i.replace("{{I}}", &v.to_string()).replace('I', &v.to_string())));
        }
    }
    format!("{HEAD}const vals = {{{vals}}};\nimpl top_i of top_s {{\n{items}}};\n")
}

/// Implementation scope dump with connection names blanked and lines sorted.
fn normalized(p: &Project) -> Vec<String> {
    let imp = p.implementation(&ImplRef::new("p", "top_i")).unwrap();
    let text = dump_scope(p, read(&imp).scope.unwrap());
    let mut lines: Vec<String> = text
        .lines()
        .map(|l| match l.find("(connection_") {
            Some(k) => format!("{}(connection)", &l[..k]),
            None => l.to_string(),
        })
        .collect();
    lines.sort();
    lines
}

fn instance_names(p: &Project) -> Vec<String> {
    let imp = p.implementation(&ImplRef::new("p", "top_i")).unwrap();
    let s = p.scope(read(&imp).scope.unwrap());
    let names = s.read().instances.keys().filter(|k| k.starts_with("bypass_")).cloned().collect();
    names
}

fn bypass_channel_example() -> Result<(), String> {
    let p = elab(&[("alternative_id.td", ALTERNATIVE_ID)], None)?;
    let imp = p.implementation(&ImplRef::new("main", "impl_data_bypass_channel")).unwrap();
    let s = p.scope(read(&imp).scope.unwrap());
    let d = s.read();
    let got: Vec<(String, String)> =
        d.instances.values().map(|i| (i.name.clone(), i.state.value().map(|v| v.target.name.clone()).unwrap_or_default())).collect();
    let want: Vec<(String, String)> = ["Monday", "Tuesday", "Wednesday", "Thursday"]
        .iter()
        .enumerate()
        .map(|(k, day)| (format!("bypass_{k}"), format!("impl_data_bypass@\"{day}\"")))
        .collect();
    ensure!(got == want, "bypass channel instances: {got:?}");
    ensure!(d.connections.len() == 8, "bypass channel connections: {}", d.connections.len());
    Ok(())
}

pub fn run() -> Result<(), String> {
    bypass_channel_example()?;
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner
        .run(&case_strategy(), |case| {
            let (a, b) = (expanded_source(&case), unrolled_source(&case));
            let pa = elab(&[("p.td", &a)], None).map_err(|e| TestCaseError::fail(format!("{a}\n{e}")))?;
            let pb = elab(&[("p.td", &b)], None).map_err(|e| TestCaseError::fail(format!("{b}\n{e}")))?;
            prop_assert_eq!(normalized(&pa), normalized(&pb), "{}\n{}", a, b);
            if case.as_range {
                let want: Vec<String> = (0..case.values.len()).map(|k| format!("bypass_{k}")).collect();
                let mut got = instance_names(&pa);
                got.sort_by_key(|n| n[7..].parse::<usize>().unwrap_or(usize::MAX));
                prop_assert_eq!(got, want);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
