use tydi::model::resolve::NameKind;
use tydi::model::{read, Relation, ScopeKind};
use tydi::value::ImplRef;

use crate::common::{elab, ensure};

const RELATIONS: [Relation; 5] = [Relation::Group, Relation::Union, Relation::Stream, Relation::Streamlet, Relation::Implement];

/// The name resolution table, row by row; columns follow `RELATIONS`.
const TABLE: [(NameKind, [bool; 5]); 6] = [
    (NameKind::Variable, [true, true, true, true, true]),
    (NameKind::Type, [true, true, true, true, true]),
    (NameKind::Streamlet, [false, false, false, false, true]),
    (NameKind::Port, [false, false, false, false, false]),
    (NameKind::Implementation, [false, false, false, false, true]),
    (NameKind::Instance, [false, false, false, false, false]),
];

fn scope_kind(r: Relation) -> ScopeKind {
    match r {
        Relation::Group => ScopeKind::Group,
        Relation::Union => ScopeKind::Union,
        Relation::Stream => ScopeKind::Stream,
        Relation::Streamlet => ScopeKind::Streamlet,
        Relation::Implement => ScopeKind::Implement,
        Relation::IfFor => ScopeKind::IfFor,
    }
}

/// Declaration of `target` of the given kind, plus the host it lives in.
fn program(kind: NameKind) -> String {
    let decl = match kind {
        NameKind::Variable => "const target = 3;\n",
        NameKind::Type => "type target = Bit(3);\n",
        NameKind::Streamlet => "streamlet target { a: s_t in, };\n",
        NameKind::Implementation => "streamlet t_s { a: s_t in, };\nexternal impl target of t_s {};\n",
        NameKind::Port => "streamlet host_s { target: s_t in, };\n",
        NameKind::Instance => "streamlet leaf_s { a: s_t in, };\nexternal impl leaf_i of leaf_s {};\nstreamlet host_s {};\nimpl host_i of host_s { instance target(leaf_i), };\n",
    };
    format!("package m;\ntype s_t = Stream(Bit(8));\n{decl}")
}

/// A use of `target` from inside a scope created by `rel`, where the syntax has one.
fn source_use(kind: NameKind, rel: Relation) -> Option<&'static str> {
    use NameKind::*;
    Some(match (kind, rel) {
        (Variable, Relation::Group) => "type Group u { f: Bit(target), };\n",
        (Variable, Relation::Union) => "type Union u { f: Bit(target), };\n",
        (Variable, Relation::Streamlet) => "streamlet u_s { const k = target, a: s_t in, };\n",
        (Variable, Relation::Implement) => "streamlet u_s { a: s_t in, };\nimpl u_i of u_s { const k = target, };\n",
        (Type, Relation::Group) => "type Group u { f: target, };\n",
        (Type, Relation::Union) => "type Union u { f: target, };\n",
        (Type, Relation::Streamlet) => "streamlet u_s { a: Stream(target) in, };\n",
        (Type, Relation::Implement) => "streamlet u_s { a: s_t in, };\nimpl u_i of u_s { type k = target, };\n",
        (Streamlet, Relation::Implement) => "external impl u_i of target {};\n",
        (Implementation, Relation::Implement) => "streamlet u_s {};\nimpl u_i of u_s { instance x(target), };\n",
        _ => return None,
    })
}

pub fn run() -> Result<(), String> {
    let mut cells = 0;
    for (kind, row) in TABLE {
        for (rel, allowed) in RELATIONS.iter().zip(row) {
            cells += 1;
            let src = program(kind);
            let p = elab(&[("m.td", &src)], Some("m"))?;
            let host = match kind {
                NameKind::Port => read(&p.streamlet(&ImplRef::new("m", "host_s")).unwrap()).scope,
                NameKind::Instance => read(&p.implementation(&ImplRef::new("m", "host_i")).unwrap()).scope.unwrap(),
                _ => p.package_scope("m").unwrap().id,
            };
            ensure!(p.resolve_name(host, None, "target", kind).is_ok(), "{kind:?} not visible in its own scope");
            let probe = p.new_scope("probe", scope_kind(*rel), "m", "m.td", Some((*rel, host)));
            let got = p.resolve_name(probe.id, None, "target", kind).is_ok();
            ensure!(got == allowed, "{kind:?} across {rel:?}: resolved={got}, table says allowed={allowed}");
            if let Some(u) = source_use(kind, *rel) {
                let full = format!("{src}{u}");
                let r = elab(&[("m.td", &full)], Some("m"));
                ensure!(r.is_ok() == allowed, "{kind:?} across {rel:?} in source: {:?}", r.err());
            }
        }
    }
    ensure!(cells == 30, "covered {cells} cells");
    Ok(())
}
