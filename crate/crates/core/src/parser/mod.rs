//! Source text to position-annotated syntax trees.

pub mod ast;
pub mod grammar;
pub mod lexer;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub use ast::{dump_ast, dump_ast_list, AstNode, NodeKind};
pub use grammar::{parse_expression, parse_logical_type_fragment};

use crate::diag::{Category, Diagnostic};

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub package_name: String,
}

impl SourceFile {
    /// Display form of the path, used as the diagnostic file key.
    pub fn display(&self) -> String {
        self.path.display().to_string()
    }
}

#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub source: SourceFile,
    pub ast: AstNode,
}

/// Parse one source text. The package name is taken from the first statement.
pub fn parse_file(path: impl AsRef<Path>, text: impl Into<String>) -> Result<ParsedFile, Diagnostic> {
    let path = path.as_ref().to_path_buf();
    let text = text.into();
    let key = path.display().to_string();
    let ast = grammar::parse_source(&key, &text)?;
    let package_name = ast.children[0].text().to_string();
    Ok(ParsedFile { source: SourceFile { path, text, package_name }, ast })
}

/// Parse in-memory sources on up to `jobs` threads, keyed by package name.
pub fn parse_sources(sources: Vec<(PathBuf, String)>, jobs: usize) -> Result<BTreeMap<String, ParsedFile>, Vec<Diagnostic>> {
    let (map, diags) = parse_sources_partial(sources, jobs);
    if diags.is_empty() {
        Ok(map)
    } else {
        Err(diags)
    }
}

/// Like [`parse_sources`], but also returns the files that did parse when others fail.
pub fn parse_sources_partial(sources: Vec<(PathBuf, String)>, jobs: usize) -> (BTreeMap<String, ParsedFile>, Vec<Diagnostic>) {
    let n = sources.len();
    let results: Vec<Mutex<Option<Result<ParsedFile, Diagnostic>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let (path, text) = &sources[i];
                let r = parse_file(path, text.clone());
                *results[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    let mut diags = Vec::new();
    let mut map: BTreeMap<String, ParsedFile> = BTreeMap::new();
    for r in results {
        match r.into_inner().unwrap_or_else(|e| e.into_inner()) {
            Some(Ok(pf)) => {
                if let Some(prev) = map.get(&pf.source.package_name) {
                    diags.push(
                        Diagnostic::new(
                            Category::Resolution,
                            format!(
                                "package `{}` is declared in both `{}` and `{}`",
                                pf.source.package_name,
                                prev.source.display(),
                                pf.source.display()
                            ),
                        )
                        .at(&pf.source.display(), pf.ast.children[0].span),
                    );
                } else {
                    map.insert(pf.source.package_name.clone(), pf);
                }
            }
            Some(Err(d)) => diags.push(d),
            None => diags.push(Diagnostic::new(Category::Internal, "parser worker did not finish")),
        }
    }
    (map, diags)
}

/// Read and parse files from disk.
pub fn parse_project(paths: &[PathBuf], jobs: usize) -> Result<BTreeMap<String, ParsedFile>, Vec<Diagnostic>> {
    let mut sources = Vec::new();
    let mut diags = Vec::new();
    for p in paths {
        match std::fs::read_to_string(p) {
            Ok(t) => sources.push((p.clone(), t)),
            Err(e) => diags.push(Diagnostic::new(Category::Io, format!("cannot read `{}`: {e}", p.display()))),
        }
    }
    match parse_sources(sources, jobs) {
        Ok(m) if diags.is_empty() => Ok(m),
        Ok(_) => Err(diags),
        Err(mut d) => {
            d.extend(diags);
            Err(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_files_two_packages() {
        let m = parse_sources(
            vec![("a.td".into(), "package simple_0;".into()), ("b.td".into(), "package simple_1;".into())],
            2,
        )
        .unwrap();
        assert_eq!(m.keys().collect::<Vec<_>>(), ["simple_0", "simple_1"]);
    }

    #[test]
    fn duplicate_package_names_both_paths() {
        let e = parse_sources(
            vec![("x.td".into(), "package tpch;".into()), ("y.td".into(), "package tpch;".into())],
            2,
        )
        .unwrap_err();
        assert_eq!(e.len(), 1);
        assert!(e[0].message.contains("x.td") && e[0].message.contains("y.td"));
    }

    #[test]
    fn errors_from_every_file_are_reported() {
        let e = parse_sources(
            vec![("x.td".into(), "package a; const".into()), ("y.td".into(), "package b; type".into())],
            1,
        )
        .unwrap_err();
        assert_eq!(e.len(), 2);
    }
}
