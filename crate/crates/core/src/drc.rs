//! Design-rule check over the sugared project.

use std::fmt;

use crate::model::types::{compatible, strictly_equal};
use crate::model::{read, Clock, Owner, Project, ResolvedEnd};
use crate::sugar::{usage_census, Role};
use crate::syntax::Dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Rule identifiers.
pub const TYPE_STRICT: &str = "R1";
pub const TYPE_COMPATIBLE: &str = "R2";
pub const DIRECTION: &str = "R3";
pub const CLOCKDOMAIN: &str = "R4";
pub const SINGLE_CONNECTION: &str = "R5";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DrcDiagnostic {
    pub package: String,
    pub implementation: String,
    /// Connection name, or the port element for single-connection violations.
    pub connection: String,
    pub rule: &'static str,
    pub severity: Severity,
    pub message: String,
    /// `file:start-end` byte range of the connection when it comes from source.
    pub location: Option<String>,
}

impl DrcDiagnostic {
    pub fn render(&self) -> String {
        let at = self.location.as_ref().map(|l| format!(" ({l})")).unwrap_or_default();
        format!(
            "{} [{}] {}.{} {}: {}{at}",
            self.severity, self.rule, self.package, self.implementation, self.connection, self.message
        )
    }
}

fn end_role(e: &ResolvedEnd) -> Role {
    match (&e.owner, e.info.dir) {
        (Owner::This, Dir::In) | (Owner::Instance(..), Dir::Out) => Role::Source,
        _ => Role::Sink,
    }
}

fn end_path(owner: &Owner, port: &str, index: Option<i64>) -> String {
    let o = match owner {
        Owner::This => "self".to_string(),
        Owner::Instance(n, None) => n.clone(),
        Owner::Instance(n, Some(i)) => format!("{n}[{i}]"),
    };
    match index {
        None => format!("{o}.{port}"),
        Some(i) => format!("{o}.{port}[{i}]"),
    }
}

fn clock_text(c: &Clock) -> String {
    c.render()
}

/// Check every evaluated, non-external implementation. Output is sorted.
pub fn run_drc(project: &Project) -> Vec<DrcDiagnostic> {
    let mut out = Vec::new();
    for i in project.all_impls() {
        let imp = read(&i).clone();
        if imp.is_template() || imp.is_external() || imp.is_alias() || !imp.state.is_evaluated() {
            continue;
        }
        let Some(scope) = imp.scope else { continue };
        let diag = |connection: String, rule: &'static str, severity: Severity, message: String, location: Option<String>| DrcDiagnostic {
            package: imp.package.clone(),
            implementation: imp.name.clone(),
            connection,
            rule,
            severity,
            message,
            location,
        };
        let conns = project.scope(scope).read().connections.clone();
        for c in &conns {
            let Some(r) = c.state.value() else { continue };
            let loc = c.span.map(|s| format!("{}:{}-{}", c.file, s.start, s.end));
            let (a, b) = (&r.src.info.ty, &r.dst.info.ty);
            let pair = || format!("{} => {}", end_path(&r.src.owner, &r.src.port, r.src.index), end_path(&r.dst.owner, &r.dst.port, r.dst.index));
            if c.no_strict {
                if !compatible(a, b) {
                    out.push(diag(
                        c.name.clone(),
                        TYPE_COMPATIBLE,
                        Severity::Error,
                        format!("{}: incompatible types {} and {}", pair(), a.short(), b.short()),
                        loc.clone(),
                    ));
                }
            } else if !strictly_equal(a, b) {
                let (sev, what) = match compatible(a, b) {
                    true => (Severity::Warning, "compatible but not identical"),
                    false => (Severity::Error, "incompatible"),
                };
                out.push(diag(
                    c.name.clone(),
                    TYPE_STRICT,
                    sev,
                    format!("{}: {what} types {} and {}", pair(), a.short(), b.short()),
                    loc.clone(),
                ));
            }
            if end_role(&r.src) != Role::Source || end_role(&r.dst) != Role::Sink {
                out.push(diag(
                    c.name.clone(),
                    DIRECTION,
                    Severity::Error,
                    format!("{}: must run from a source to a sink", pair()),
                    loc.clone(),
                ));
            }
            if r.src.info.clock != r.dst.info.clock {
                out.push(diag(
                    c.name.clone(),
                    CLOCKDOMAIN,
                    Severity::Error,
                    format!("{}: clockdomain {} differs from {}", pair(), clock_text(&r.src.info.clock), clock_text(&r.dst.info.clock)),
                    loc.clone(),
                ));
            }
        }
        for u in usage_census(project, &imp) {
            if u.uses != 1 {
                out.push(diag(
                    end_path(&u.owner, &u.port, u.index),
                    SINGLE_CONNECTION,
                    Severity::Error,
                    format!("port element is used by {} connections, expected exactly 1", u.uses),
                    None,
                ));
            }
        }
    }
    out.sort_by(|x, y| {
        (&x.package, &x.implementation, &x.connection, x.rule, &x.message).cmp(&(&y.package, &y.implementation, &y.connection, y.rule, &y.message))
    });
    out
}

pub fn has_errors(diags: &[DrcDiagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

pub fn render_drc_report(diags: &[DrcDiagnostic]) -> String {
    let mut s = String::new();
    for d in diags {
        s.push_str(&d.render());
        s.push('\n');
    }
    let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
    s.push_str(&format!("{errors} errors, {} warnings\n", diags.len() - errors));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        assert_eq!(render_drc_report(&[]), "0 errors, 0 warnings\n");
        assert!(!has_errors(&[]));
    }
}
