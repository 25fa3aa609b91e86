use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tydi::eval::{evaluate, Root};
use tydi::model::dump::dump_scope;
use tydi::model::types::{compatible, strictly_equal, TypeKind};
use tydi::model::{read, PRELUDE_PACKAGE};
use tydi::pipeline::load;
use tydi::value::ImplRef;

/// Random logical type tree, rendered as declarations plus a root expression.
#[derive(Debug, Clone)]
enum Ty {
    Null,
    Bit(u8),
    Compound(bool, Vec<Ty>),
}

fn ty_strategy() -> impl Strategy<Value = Ty> {
    let leaf = prop_oneof![1 => Just(Ty::Null), 4 => (1u8..=64).prop_map(Ty::Bit)];
    leaf.prop_recursive(3, 12, 3, |inner| (any::<bool>(), prop::collection::vec(inner, 1..=3)).prop_map(|(u, f)| Ty::Compound(u, f)))
}

fn render(t: &Ty, decls: &mut Vec<String>) -> String {
    match t {
        Ty::Null => "Null".into(),
        Ty::Bit(w) => format!("Bit({w})"),
        Ty::Compound(union, fields) => {
            let fs: Vec<String> = fields.iter().enumerate().map(|(i, f)| format!("f{i}: {}", render(f, decls))).collect();
            let name = format!("t{}", decls.len());
            decls.push(format!("type {} {name} {{ {}, }};", if *union { "Union" } else { "Group" }, fs.join(", ")));
            name
        }
    }
}

fn check(t: &Ty) -> Result<(), String> {
    let mut decls = Vec::new();
    let root = render(t, &mut decls);
    let src = format!(
        "package p;\n{}\ntype X = {root};\nstreamlet top_s {{}};\nimpl top_i of top_s {{\n  instance v0(void_i<type Stream(X)>),\n  instance v1(void_i<type Stream(X)>),\n}};\n",
        decls.join("\n")
    );
    let p = load("test_project", vec![("p.td".into(), src.clone())], 1).map_err(|e| format!("{e:?}"))?;
    let pre = p.package_scope(PRELUDE_PACKAGE).unwrap();
    let template = pre.read().impls["void_i"].clone();
    let template_scope = read(&template).scope.unwrap();
    let before = dump_scope(&p, template_scope);
    let errs = evaluate(&p, &[Root::Impl(ImplRef::new("p", "top_i"))], 1);
    if !errs.is_empty() {
        return Err(format!("{src}\n{errs:?}"));
    }
    let names: Vec<String> = pre.read().impls.keys().filter(|k| k.starts_with("void_i@")).cloned().collect();
    if names != ["void_i@Stream(X)"] {
        return Err(format!("registered {names:?}"));
    }
    let inst = read(&pre.read().impls["void_i@Stream(X)"]).clone();
    let sl = p.streamlet(inst.streamlet.as_ref().unwrap()).unwrap();
    let port = p.scope(read(&sl).scope).read().ports["input"].state.value().cloned().ok_or("port not evaluated")?;
    let x = p.package_scope("p").unwrap().read().types["X"].clone();
    let x = read(&x).state.value().cloned().ok_or("X not evaluated")?;
    let TypeKind::Stream { elem, .. } = &port.ty.kind else { return Err("port is not a stream".into()) };
    if !(strictly_equal(elem, &x) && compatible(elem, &x) && port.ty.name == "X") {
        return Err(format!("port type {} does not match the argument", port.ty.short()));
    }
    if dump_scope(&p, template_scope) != before || !read(&template).is_template() {
        return Err("template changed".into());
    }
    Ok(())
}

pub fn run() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 50, failure_persistence: None, ..Config::default() });
    runner.run(&ty_strategy(), |t| check(&t).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}
