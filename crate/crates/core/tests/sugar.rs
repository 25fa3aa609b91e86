use tydi::model::{read, Owner, ScopeId};
use tydi::pipeline::elaborate;
use tydi::sugar::{sugar_project, usage_census, Role};
use tydi::value::ImplRef;

const TPCH: &str = include_str!("fixtures/tpch_q1.td");

fn impl_scope(p: &tydi::model::Project, pkg: &str, name: &str) -> ScopeId {
    read(&p.implementation(&ImplRef::new(pkg, name)).unwrap()).scope.unwrap()
}

#[test]
fn tpch_filter_gets_one_wide_duplicator() {
    let p = elaborate(&[("tpch_q1.td", TPCH)], None, 1).unwrap_or_else(|(_, e)| panic!("{e:#?}"));
    let imp = read(&p.implementation(&ImplRef::new("std", "data_filter_i")).unwrap()).clone();
    let census = usage_census(&p, &imp);
    let out = census.iter().find(|u| u.owner == Owner::Instance("compare_date".into(), None) && u.port == "output").unwrap();
    assert_eq!((out.role, out.uses), (Role::Source, 14));

    sugar_project(&p).unwrap();
    let s = p.scope(impl_scope(&p, "std", "data_filter_i"));
    let d = s.read();
    let dups: Vec<_> = d.instances.keys().filter(|k| k.starts_with("duplicate_compare_date")).cloned().collect();
    assert_eq!(dups, vec!["duplicate_compare_date_output_14".to_string()]);
    assert!(d.instances.contains_key("duplicate_self_l_shipdate_in_2"));
    let info = d.instances["duplicate_compare_date_output_14"].state.value().unwrap().clone();
    assert_eq!(info.target.package, "__prelude");
    assert!(info.target.name.starts_with("duplicator_i@") && info.target.name.ends_with("@14"), "{}", info.target.name);
    drop(d);

    let imp = read(&p.implementation(&ImplRef::new("std", "data_filter_i")).unwrap()).clone();
    for u in usage_census(&p, &imp) {
        assert_eq!(u.uses, 1, "{u:?}");
    }
}

#[test]
fn sugaring_is_idempotent() {
    let p = elaborate(&[("tpch_q1.td", TPCH)], None, 1).unwrap_or_else(|(_, e)| panic!("{e:#?}"));
    assert!(!sugar_project(&p).unwrap().is_empty());
    let before = tydi::model::dump::dump_code_structure(&p);
    assert!(sugar_project(&p).unwrap().is_empty());
    assert_eq!(before, tydi::model::dump::dump_code_structure(&p));
}

#[test]
fn unused_instance_output_gets_voider() {
    let src = "package v;\ntype s = Stream(Bit(8));\nstreamlet a_s { o: s out, };\nexternal impl a_i of a_s {};\nstreamlet top_s {};\nimpl top_i of top_s { instance a(a_i), };\n";
    let p = elaborate(&[("v.td", src)], None, 1).unwrap_or_else(|(_, e)| panic!("{e:#?}"));
    sugar_project(&p).unwrap();
    let s = p.scope(impl_scope(&p, "v", "top_i"));
    let d = s.read();
    assert!(d.instances.contains_key("void_a_o"));
    assert_eq!(d.connections.len(), 1);
    assert_eq!(d.connections[0].name, "void_a_o_input");
}
