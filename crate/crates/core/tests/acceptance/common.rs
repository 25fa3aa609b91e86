use tydi::model::dump::dump_code_structure;
use tydi::model::Project;
use tydi::pipeline::elaborate;

pub const TPCH: &str = include_str!("../fixtures/tpch_q1.td");

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}
pub(crate) use ensure;

pub fn elab(srcs: &[(&str, &str)], top: Option<&str>) -> Result<Project, String> {
    elaborate(srcs, top, 1).map_err(|(_, e)| e.iter().map(|d| d.message.clone()).collect::<Vec<_>>().join("; "))
}

pub fn dump(srcs: &[(&str, &str)], top: Option<&str>) -> Result<String, String> {
    elab(srcs, top).map(|p| dump_code_structure(&p))
}

/// Smallest `k` with `2^k >= n`, computed with integer arithmetic only.
pub fn ceil_log2(n: u128) -> u32 {
    let mut k = 0;
    while (1u128 << k) < n {
        k += 1;
    }
    k
}
