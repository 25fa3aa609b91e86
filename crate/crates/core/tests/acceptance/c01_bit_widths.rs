use crate::common::{ceil_log2, dump, ensure, TPCH};

/// Values printed in the evaluated-code-structure sample.
const PRINTED: [(&str, &str); 4] =
    [("bit_width_decimal_15", "int(50)"), ("year", "Bit(17)"), ("month", "Bit(4)"), ("day", "Bit(5)")];

pub fn run() -> Result<(), String> {
    let derived = [
        ("bit_width_decimal_15", format!("int({})", ceil_log2(10u128.pow(15) - 1))),
        ("year", format!("Bit({})", ceil_log2(10u128.pow(5) - 1))),
        ("month", format!("Bit({})", ceil_log2(12))),
        ("day", format!("Bit({})", ceil_log2(31))),
    ];
    let d = dump(&[("tpch_q1.td", TPCH)], Some("std"))?;
    for ((name, printed), (_, oracle)) in PRINTED.iter().zip(&derived) {
        ensure!(printed == oracle, "{name}: printed {printed} but oracle gives {oracle}");
        let line = format!("{name}:{printed}");
        ensure!(d.lines().any(|l| l.trim() == line), "dump lacks `{line}`");
    }
    Ok(())
}
