use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tydi::model::dump::dump_code_structure;
use tydi::model::{read, Owner, Project};
use tydi::sugar::{sugar_project, usage_census};
use tydi::value::ImplRef;

use crate::common::elab;

/// One wrapper level: the driver of each instance input and of the own output.
/// Driver 0 is the own input, driver `j > 0` is the output of instance `j - 1`.
#[derive(Debug, Clone)]
struct Level {
    drivers: Vec<usize>,
    out_driver: usize,
}

fn level_strategy() -> impl Strategy<Value = Level> {
    (1usize..=5)
        .prop_flat_map(|n| {
            let ds: Vec<BoxedStrategy<usize>> = (0..n).map(|k| if k == 0 { Just(0).boxed() } else { (0..=k).boxed() }).collect();
            (ds, 0..=n)
        })
        .prop_map(|(drivers, out_driver)| Level { drivers, out_driver })
}

fn topology() -> impl Strategy<Value = Vec<Level>> {
    prop::collection::vec(level_strategy(), 1..=3)
}

fn driver_end(d: usize) -> String {
    if d == 0 {
        "input".into()
    } else {
        format!("n{}.output", d - 1)
    }
}

fn source(levels: &[Level]) -> String {
    let mut s = String::from(
        "package g;\ntype s_t = Stream(Bit(8));\nstreamlet node_s { input: s_t in, output: s_t out, };\nexternal impl w0_i of node_s {};\n",
    );
    for (d, l) in levels.iter().enumerate() {
        s.push_str(&format!("impl w{}_i of node_s {{\n", d + 1));
        for k in 0..l.drivers.len() {
            s.push_str(&format!("  instance n{k}(w{d}_i),\n"));
        }
        for (k, drv) in l.drivers.iter().enumerate() {
            s.push_str(&format!("  {} => n{k}.input,\n", driver_end(*drv)));
        }
        s.push_str(&format!("  {} => output,\n}};\n", driver_end(l.out_driver)));
    }
    s
}

/// Expected fan-out per source end, from the generator alone.
fn fanout(l: &Level) -> BTreeMap<(Owner, String), usize> {
    let mut m = BTreeMap::new();
    let key = |d: usize| if d == 0 { (Owner::This, "input".to_string()) } else { (Owner::Instance(format!("n{}", d - 1), None), "output".to_string()) };
    for d in 0..=l.drivers.len() {
        m.insert(key(d), 0);
    }
    for d in l.drivers.iter().chain([&l.out_driver]) {
        *m.get_mut(&key(*d)).unwrap() += 1;
    }
    m
}

fn check(levels: &[Level]) -> Result<(), String> {
    let src = source(levels);
    let p: Project = elab(&[("g.td", &src)], None)?;
    sugar_project(&p).map_err(|e| format!("{e:?}"))?;
    for (d, l) in levels.iter().enumerate() {
        let r = ImplRef::new("g", format!("w{}_i", d + 1));
        let imp = read(&p.implementation(&r).unwrap()).clone();
        for u in usage_census(&p, &imp) {
            if u.uses != 1 {
                return Err(format!("{src}\nw{}_i: {u:?}", d + 1));
            }
        }
        let scope = p.scope(imp.scope.unwrap());
        let data = scope.read();
        let mut dups = 0;
        let mut voids = 0;
        for c in &data.connections {
            let rc = c.state.value().unwrap();
            let Owner::Instance(name, _) = &rc.dst.owner else { continue };
            let target = data.instances[name].state.value().unwrap().target.clone();
            let want = || fanout(l).get(&(rc.src.owner.clone(), rc.src.port.clone())).copied().unwrap_or(usize::MAX);
            if name.starts_with("duplicate_") {
                let want = want();
                dups += 1;
                let sl = read(&p.implementation(&target).unwrap()).streamlet.clone().unwrap();
                let width = p.scope(read(&p.streamlet(&sl).unwrap()).scope).read().ports["output"].state.value().unwrap().array;
                if width != Some(want as i64) {
                    return Err(format!("{src}\n{name}: width {width:?}, fan-out {want}"));
                }
            } else if name.starts_with("void_") {
                voids += 1;
                if want() != 0 {
                    return Err(format!("{src}\n{name} attached to a used output"));
                }
            }
        }
        let f = fanout(l);
        let want_dups = f.values().filter(|n| **n >= 2).count();
        let want_voids = f.iter().filter(|((o, _), n)| **n == 0 && *o != Owner::This).count();
        if (dups, voids) != (want_dups, want_voids) {
            return Err(format!("{src}\nw{}_i: {dups} duplicators, {voids} voiders; expected {want_dups}, {want_voids}", d + 1));
        }
    }
    let once = dump_code_structure(&p);
    let again = sugar_project(&p).map_err(|e| format!("{e:?}"))?;
    if !again.is_empty() || dump_code_structure(&p) != once {
        return Err(format!("{src}\nsecond pass changed {again:?}"));
    }
    Ok(())
}

pub fn run() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner.run(&topology(), |t| check(&t).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}
