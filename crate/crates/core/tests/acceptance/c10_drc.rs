use tydi::drc::{run_drc, DrcDiagnostic, Severity};
use tydi::sugar::sugar_project;

use crate::common::{elab, ensure};

const STRICT: &str = "package tpch;

type Group rgb {
  r: Bit(8),
  g: Bit(8),
  b: Bit(8),
};
type rgb_stream = Stream(rgb);

streamlet rgb_bypass {
  input: rgb_stream in,
  output: rgb_stream out,
};

#implement documentation#
impl impl_rgb_bypass of rgb_bypass {    //declare an implementation called \"impl_rgb_bypass\" and its interface (streamlet) is \"rgb_bypass\"
  input => output,                      //connect the input port and the output port.
};
";

const COMPATIBLE: &str = "package tpch;

type Group rgb {
  r: Bit(8),
  g: Bit(8),
  b: Bit(8),
};
type rgb_stream = Stream(rgb);

streamlet rgb_bypass2 {
  input: Stream(rgb) in,    //Stream(rgb) is a logical type
  output: Stream(rgb) out,  //Stream(rgb) is a new logical type, the content is same as the previous one
};

impl impl_rgb_bypass2 of rgb_bypass2 {
  input => output @NoStrictType@,   //explicitly add @NoStrictType@
};

impl impl_rgb_bypass3 of rgb_bypass2 {
  input => output,   //result in a warning in DRC
};
";

const IN_TO_IN: &str = "package tpch;
type rgb_stream = Stream(Bit(24));
streamlet two_in {
  a: rgb_stream in,
  b: rgb_stream in,
};
impl bad_i of two_in {
  a => b,
};
";

fn drc(src: &str) -> Result<Vec<DrcDiagnostic>, String> {
    let p = elab(&[("tpch.td", src)], None)?;
    sugar_project(&p).map_err(|e| format!("{e:?}"))?;
    Ok(run_drc(&p))
}

pub fn run() -> Result<(), String> {
    let d = drc(STRICT)?;
    ensure!(d.is_empty(), "same alias: {d:?}");

    let d = drc(COMPATIBLE)?;
    ensure!(d.len() == 1, "compatible pair: {d:?}");
    ensure!(
        (d[0].implementation.as_str(), d[0].rule, d[0].severity) == ("impl_rgb_bypass3", "R1", Severity::Warning),
        "compatible pair: {d:?}"
    );

    let d = drc(IN_TO_IN)?;
    ensure!(d.len() == 1 && d[0].rule == "R3" && d[0].severity == Severity::Error, "in to in: {d:?}");
    Ok(())
}
