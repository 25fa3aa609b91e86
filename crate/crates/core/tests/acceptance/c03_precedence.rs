use crate::common::{dump, ensure};

pub fn run() -> Result<(), String> {
    let d = dump(&[("p.td", "package p;\nconst i1 = -1+2;")], Some("p"))?;
    ensure!(d.lines().any(|l| l.trim() == "i1:int(1)"), "expected i1:int(1):\n{d}");
    ensure!(!d.contains("int(-3)"), "unary minus bound over the sum");
    Ok(())
}
