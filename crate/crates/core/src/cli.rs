//! Command-line driver: parse, evaluate, sugar, check and emit into an output folder.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::backend::{emit_dot, emit_ir, flatten_all, top_level_impls};
use crate::diag::{render_error_report, Category, Diagnostic};
use crate::drc::{has_errors, render_drc_report, run_drc};
use crate::eval::{default_roots, evaluate, find_root, Root};
use crate::model::dump::dump_code_structure;
use crate::model::Project;
use crate::parser::{dump_ast, parse_sources_partial};
use crate::pipeline::lower_all;
use crate::sugar::sugar_project;

pub const AST_DIR: &str = "0_ast";
pub const PARSER_OUTPUT: &str = "1_parser_output.txt";
pub const EVALUATION_OUTPUT: &str = "2_evaluation_output.txt";
pub const SUGARED_OUTPUT: &str = "2_evaluation_output_after_sugaring.txt";
pub const DRC_REPORT: &str = "drc_report.txt";
pub const DOT_OUTPUT: &str = "circuit.dot";
pub const IR_OUTPUT: &str = "ir.json";
pub const ERROR_REPORT: &str = "error_report.txt";

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPILE_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tydi", version, about = "Compile Tydi-lang sources into an elaborated, checked circuit")]
pub struct Args {
    /// Source files, or directories scanned for `.td` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output folder.
    #[arg(short, long, default_value = "build")]
    pub output: PathBuf,
    /// Top implementation as `package.impl`, or a whole `package`.
    #[arg(short, long)]
    pub top: Option<String>,
    /// Write `drc_report.txt`.
    #[arg(long)]
    pub drc: bool,
    /// Write `circuit.dot`.
    #[arg(long)]
    pub dot: bool,
    /// Write `ir.json`.
    #[arg(long)]
    pub ir: bool,
    /// Worker threads.
    #[arg(short, long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Debug, Clone)]
pub struct CompileConfig {
    pub inputs: Vec<PathBuf>,
    pub project_name: String,
    pub output: PathBuf,
    pub top: Option<String>,
    pub emit_drc: bool,
    pub emit_dot: bool,
    pub emit_ir: bool,
    pub jobs: usize,
}

/// Name of the folder containing `output`, after resolving it against the working directory.
fn project_name_for(output: &Path) -> String {
    let abs = if output.is_absolute() {
        output.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(output)).unwrap_or_else(|_| output.to_path_buf())
    };
    let mut parts: Vec<String> = Vec::new();
    for c in abs.components() {
        match c {
            std::path::Component::Normal(s) => parts.push(s.to_string_lossy().into_owned()),
            std::path::Component::ParentDir => {
                parts.pop();
            }
            _ => {}
        }
    }
    parts.pop();
    parts.pop().unwrap_or_else(|| "project".to_string())
}

impl From<Args> for CompileConfig {
    fn from(a: Args) -> Self {
        CompileConfig {
            project_name: project_name_for(&a.output),
            inputs: a.inputs,
            output: a.output,
            top: a.top,
            emit_drc: a.drc,
            emit_dot: a.dot,
            emit_ir: a.ir,
            jobs: a.jobs as usize,
        }
    }
}

/// Expand directories into their `.td` files (recursively, sorted); files are kept as given.
pub fn collect_sources(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Diagnostic> {
    fn scan(dir: &Path, out: &mut BTreeSet<PathBuf>) -> Result<(), Diagnostic> {
        let entries = fs::read_dir(dir).map_err(|e| Diagnostic::new(Category::Io, format!("cannot read directory `{}`: {e}", dir.display())))?;
        for e in entries {
            let p = e.map_err(|e| Diagnostic::new(Category::Io, format!("cannot read directory `{}`: {e}", dir.display())))?.path();
            if p.is_dir() {
                scan(&p, out)?;
            } else if p.extension().is_some_and(|x| x == "td") {
                out.insert(p);
            }
        }
        Ok(())
    }
    let mut out = BTreeSet::new();
    for i in inputs {
        if i.is_dir() {
            scan(i, &mut out)?;
        } else {
            out.insert(i.clone());
        }
    }
    Ok(out.into_iter().collect())
}

struct Writer<'a> {
    dir: &'a Path,
}

impl Writer<'_> {
    fn put(&self, name: &str, text: &str) -> Result<(), Diagnostic> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| Diagnostic::new(Category::Io, format!("cannot create `{}`: {e}", parent.display())))?;
        }
        fs::write(&p, text).map_err(|e| Diagnostic::new(Category::Io, format!("cannot write `{}`: {e}", p.display())))
    }

    /// Remove artifacts of an earlier run so the folder reflects only this one.
    fn clear(&self) {
        let _ = fs::remove_dir_all(self.dir.join(AST_DIR));
        for f in [PARSER_OUTPUT, EVALUATION_OUTPUT, SUGARED_OUTPUT, DRC_REPORT, DOT_OUTPUT, IR_OUTPUT, ERROR_REPORT] {
            let _ = fs::remove_file(self.dir.join(f));
        }
    }
}

/// Outcome of one compilation.
#[derive(Debug)]
pub struct Outcome {
    pub status: i32,
    pub diagnostics: Vec<Diagnostic>,
    pub project: Option<Project>,
}

fn ast_file_names(stems: &[String]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    stems
        .iter()
        .map(|s| {
            let n = seen.entry(s.clone()).or_default();
            *n += 1;
            match *n {
                1 => format!("{AST_DIR}/{s}.txt"),
                k => format!("{AST_DIR}/{s}_{k}.txt"),
            }
        })
        .collect()
}

/// Run the whole pipeline and write artifacts.
pub fn compile(cfg: &CompileConfig) -> Outcome {
    let w = Writer { dir: &cfg.output };
    if let Err(e) = fs::create_dir_all(&cfg.output) {
        let d = Diagnostic::new(Category::Io, format!("cannot create output folder `{}`: {e}", cfg.output.display()));
        return Outcome { status: EXIT_COMPILE_ERROR, diagnostics: vec![d], project: None };
    }
    w.clear();
    let mut texts: BTreeMap<String, String> = BTreeMap::new();
    let fail = |diags: Vec<Diagnostic>, texts: &BTreeMap<String, String>, project: Option<Project>| {
        let report = render_error_report(&diags, &|f| texts.get(f).cloned());
        let _ = w.put(ERROR_REPORT, &report);
        Outcome { status: EXIT_COMPILE_ERROR, diagnostics: diags, project }
    };

    let paths = match collect_sources(&cfg.inputs) {
        Ok(p) => p,
        Err(e) => return fail(vec![e], &texts, None),
    };
    let mut sources = Vec::new();
    let mut io_errs = Vec::new();
    for p in &paths {
        match fs::read_to_string(p) {
            Ok(t) => {
                texts.insert(p.display().to_string(), t.clone());
                sources.push((p.clone(), t));
            }
            Err(e) => io_errs.push(Diagnostic::new(Category::Io, format!("cannot read `{}`: {e}", p.display()))),
        }
    }
    if sources.is_empty() && io_errs.is_empty() {
        io_errs.push(Diagnostic::new(Category::Io, "no `.td` source files found"));
    }

    let (parsed, mut errs) = parse_sources_partial(sources, cfg.jobs);
    errs.extend(io_errs);
    let mut files: Vec<_> = parsed.values().collect();
    files.sort_by_key(|pf| pf.source.display());
    let stems: Vec<String> =
        files.iter().map(|pf| pf.source.path.file_stem().map_or_else(|| pf.source.package_name.clone(), |s| s.to_string_lossy().into_owned())).collect();
    for (pf, name) in files.iter().zip(ast_file_names(&stems)) {
        if let Err(e) = w.put(&name, &dump_ast(&pf.ast)) {
            errs.push(e);
        }
    }
    if !errs.is_empty() {
        errs.sort();
        return fail(errs, &texts, None);
    }

    let project = match lower_all(&parsed).and_then(|d| Project::build(cfg.project_name.clone(), d)) {
        Ok(p) => p,
        Err(e) => return fail(e, &texts, None),
    };
    if let Err(e) = w.put(PARSER_OUTPUT, &dump_code_structure(&project)) {
        return fail(vec![e], &texts, Some(project));
    }

    let roots: Vec<Root> = match &cfg.top {
        Some(t) => match find_root(&project, t) {
            Ok(r) => vec![r],
            Err(e) => return fail(vec![e], &texts, Some(project)),
        },
        None => default_roots(&project),
    };
    let errs = evaluate(&project, &roots, cfg.jobs);
    if !errs.is_empty() {
        return fail(errs, &texts, Some(project));
    }
    if let Err(e) = w.put(EVALUATION_OUTPUT, &dump_code_structure(&project)) {
        return fail(vec![e], &texts, Some(project));
    }

    if let Err(e) = sugar_project(&project) {
        return fail(e, &texts, Some(project));
    }
    if let Err(e) = w.put(SUGARED_OUTPUT, &dump_code_structure(&project)) {
        return fail(vec![e], &texts, Some(project));
    }

    if cfg.emit_drc {
        let drc = run_drc(&project);
        if let Err(e) = w.put(DRC_REPORT, &render_drc_report(&drc)) {
            return fail(vec![e], &texts, Some(project));
        }
        if has_errors(&drc) {
            let diags: Vec<Diagnostic> = drc
                .iter()
                .filter(|d| d.severity == crate::drc::Severity::Error)
                .map(|d| Diagnostic::new(Category::Drc, d.render().trim_start_matches("error ").to_string()))
                .collect();
            return fail(diags, &texts, Some(project));
        }
    }
    if cfg.emit_dot {
        let tops = match cfg.top.as_deref() {
            Some(t) if t.contains('.') => {
                let (pkg, name) = t.split_once('.').expect("checked");
                vec![crate::value::ImplRef::new(pkg, name)]
            }
            Some(pkg) => top_level_impls(&project).into_iter().filter(|r| r.package == pkg).collect(),
            None => top_level_impls(&project),
        };
        match flatten_all(&project, &tops) {
            Ok(c) => {
                if let Err(e) = w.put(DOT_OUTPUT, &emit_dot(&c)) {
                    return fail(vec![e], &texts, Some(project));
                }
            }
            Err(e) => return fail(vec![e], &texts, Some(project)),
        }
    }
    if cfg.emit_ir {
        if let Err(e) = w.put(IR_OUTPUT, &emit_ir(&project)) {
            return fail(vec![e], &texts, Some(project));
        }
    }
    Outcome { status: EXIT_OK, diagnostics: Vec::new(), project: Some(project) }
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let cfg = CompileConfig::from(args);
    let out = compile(&cfg);
    if out.status == EXIT_OK {
        println!("compiled project `{}` into {}", cfg.project_name, cfg.output.display());
    } else {
        eprintln!("compilation failed with {} error(s); see {}", out.diagnostics.len(), cfg.output.join(ERROR_REPORT).display());
        for d in out.diagnostics.iter().take(10) {
            eprintln!("  {}", d.message);
        }
    }
    out.status
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_name_is_parent_folder() {
        assert_eq!(project_name_for(Path::new("/tmp/test_project/build")), "test_project");
        assert_eq!(project_name_for(Path::new("/a/b/../c/out")), "c");
    }

    #[test]
    fn ast_names_disambiguate() {
        assert_eq!(ast_file_names(&["a".into(), "a".into()]), ["0_ast/a.txt", "0_ast/a_2.txt"]);
    }
}
