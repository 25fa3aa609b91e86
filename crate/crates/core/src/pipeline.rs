//! Stage helpers shared by the driver and the tests.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::diag::Diagnostic;
use crate::eval::{default_roots, evaluate, find_root, Root};
use crate::model::Project;
use crate::parser::{parse_sources, ParsedFile};
use crate::syntax::lower_package;

/// Lower every parsed file; all lowering errors are reported together.
pub fn lower_all(parsed: &BTreeMap<String, ParsedFile>) -> Result<Vec<crate::syntax::PackageDecl>, Vec<Diagnostic>> {
    let mut decls = Vec::new();
    let mut errs = Vec::new();
    for pf in parsed.values() {
        match lower_package(&pf.source.display(), &pf.source.text, &pf.ast) {
            Ok(d) => decls.push(d),
            Err(e) => errs.push(e),
        }
    }
    if errs.is_empty() {
        Ok(decls)
    } else {
        errs.sort();
        Err(errs)
    }
}

/// Parse, lower and build a project from in-memory sources.
pub fn load(name: &str, sources: Vec<(PathBuf, String)>, jobs: usize) -> Result<Project, Vec<Diagnostic>> {
    let parsed = parse_sources(sources, jobs)?;
    Project::build(name, lower_all(&parsed)?)
}

/// Build and evaluate from `(file name, text)` pairs with the default roots, or `top`.
pub fn elaborate(sources: &[(&str, &str)], top: Option<&str>, jobs: usize) -> Result<Project, (Option<Project>, Vec<Diagnostic>)> {
    let srcs = sources.iter().map(|(p, t)| (PathBuf::from(p), t.to_string())).collect();
    let project = load("test_project", srcs, jobs).map_err(|e| (None, e))?;
    let roots: Vec<Root> = match top {
        Some(t) => match find_root(&project, t) {
            Ok(r) => vec![r],
            Err(e) => return Err((Some(project), vec![e])),
        },
        None => default_roots(&project),
    };
    let errs = evaluate(&project, &roots, jobs);
    if errs.is_empty() {
        Ok(project)
    } else {
        Err((Some(project), errs))
    }
}
