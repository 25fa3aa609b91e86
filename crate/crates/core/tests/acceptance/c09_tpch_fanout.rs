use tydi::model::{read, Owner};
use tydi::sugar::{sugar_project, usage_census};
use tydi::value::ImplRef;

use crate::common::{elab, ensure, TPCH};

/// Count `compare_date.output =>` connections in the source text of `data_filter_i`.
fn text_census() -> usize {
    let start = TPCH.find("impl data_filter_i of").expect("data_filter_i in fixture");
    let body = &TPCH[start..];
    let body = &body[..body.find("\n};").expect("end of impl")];
    body.lines().filter(|l| l.trim_start().starts_with("compare_date.output =>")).count()
}

pub fn run() -> Result<(), String> {
    let oracle = text_census();
    ensure!(oracle == 14, "text census found {oracle} sinks");
    let p = elab(&[("tpch_q1.td", TPCH)], None)?;
    let r = ImplRef::new("std", "data_filter_i");
    let owner = Owner::Instance("compare_date".into(), None);
    let imp = read(&p.implementation(&r).unwrap()).clone();
    let uses = usage_census(&p, &imp).into_iter().find(|u| u.owner == owner && u.port == "output").map(|u| u.uses);
    ensure!(uses == Some(oracle), "pre-sugaring census {uses:?}, oracle {oracle}");

    sugar_project(&p).map_err(|e| format!("{e:?}"))?;
    let scope = p.scope(imp.scope.unwrap());
    let d = scope.read();
    let feeding: Vec<&str> = d
        .connections
        .iter()
        .filter_map(|c| c.state.value())
        .filter(|rc| rc.src.owner == owner && rc.src.port == "output")
        .filter_map(|rc| match &rc.dst.owner {
            Owner::Instance(n, _) => Some(n.as_str()),
            Owner::This => None,
        })
        .collect();
    ensure!(feeding.len() == 1, "compare_date.output now drives {feeding:?}");
    let dup = feeding[0];
    ensure!(dup.starts_with("duplicate_"), "{dup} is not a duplicator");
    let target = d.instances[dup].state.value().unwrap().target.clone();
    let sl = read(&p.implementation(&target).unwrap()).streamlet.clone().unwrap();
    let width = p.scope(read(&p.streamlet(&sl).unwrap()).scope).read().ports["output"].state.value().unwrap().array;
    ensure!(width == Some(14), "duplicator output array {width:?}");
    let from_dup = d.connections.iter().filter_map(|c| c.state.value()).filter(|rc| matches!(&rc.src.owner, Owner::Instance(n, _) if n == dup)).count();
    ensure!(from_dup == 14, "{from_dup} connections leave the duplicator");
    let dups = d.instances.keys().filter(|k| k.starts_with("duplicate_compare_date")).count();
    ensure!(dups == 1, "{dups} duplicators on compare_date");
    Ok(())
}
