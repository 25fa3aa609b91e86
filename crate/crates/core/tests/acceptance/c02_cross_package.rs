use crate::common::{dump, ensure};

const SIMPLE_0: &str = "package simple_0;
import simple_1;

const i1: int = 1 + 100;
const external_var0 = simple_1.i1 + 10;             //access external variables
const external_flag0 = false || simple_1.flag;      //access external variables
";

const SIMPLE_1: &str = "package simple_1;
const i1 = 100;
const flag = true;
const i2 = 500;
";

pub fn run() -> Result<(), String> {
    let d = dump(&[("simple_0.td", SIMPLE_0), ("simple_1.td", SIMPLE_1)], Some("simple_0"))?;
    let section = |pkg: &str| -> String {
        let start = d.find(&format!("Package({pkg})")).unwrap_or(0);
        let rest = &d[start..];
        let end = rest[1..].find("Package(").map_or(rest.len(), |e| e + 1);
        rest[..end].to_string()
    };
    let (s0, s1) = (section("simple_0"), section("simple_1"));
    for want in ["i1:int(101)", "external_var0:int(110)", "external_flag0:bool(true)"] {
        ensure!(s0.lines().any(|l| l.trim() == want), "simple_0 lacks `{want}`:\n{s0}");
    }
    for want in ["i1:int(100)", "flag:bool(true)", "i2:UnknownType(NotInferred(\"500\"))"] {
        ensure!(s1.lines().any(|l| l.trim() == want), "simple_1 lacks `{want}`:\n{s1}");
    }
    Ok(())
}
