use std::fs;
use std::path::Path;

use tydi::cli::{compile, CompileConfig, EXIT_OK};

use crate::common::{ensure, TPCH};

const ARTIFACTS: [&str; 7] = [
    "0_ast/tpch_q1.txt",
    "1_parser_output.txt",
    "2_evaluation_output.txt",
    "2_evaluation_output_after_sugaring.txt",
    "drc_report.txt",
    "circuit.dot",
    "ir.json",
];

fn build(root: &Path, src: &Path, jobs: usize) -> Result<(), String> {
    let cfg = CompileConfig {
        inputs: vec![src.to_path_buf()],
        project_name: "proj".into(),
        output: root.join("proj").join("build"),
        top: None,
        emit_drc: true,
        emit_dot: true,
        emit_ir: true,
        jobs,
    };
    let out = compile(&cfg);
    ensure!(out.status == EXIT_OK, "jobs={jobs}: {:?}", out.diagnostics);
    Ok(())
}

pub fn run() -> Result<(), String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let src = tmp.path().join("src").join("tpch_q1.td");
    fs::create_dir_all(src.parent().unwrap()).map_err(|e| e.to_string())?;
    fs::write(&src, TPCH).map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("one"), tmp.path().join("eight"));
    build(&a, &src, 1)?;
    build(&b, &src, 8)?;
    for f in ARTIFACTS {
        let x = fs::read(a.join("proj/build").join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = fs::read(b.join("proj/build").join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure!(x == y, "{f} differs between 1 and 8 workers");
    }
    Ok(())
}
