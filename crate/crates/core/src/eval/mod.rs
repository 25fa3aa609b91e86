//! Lazy, root-driven evaluation of the code structure.

pub mod coord;
mod elab;
mod expand;
mod expr;
pub mod math;
mod template;
mod types;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::diag::{Category, Diagnostic};
use crate::model::{read, EvalState, Project, Shared};
use crate::value::ImplRef;
use coord::{Cat, Claim, Coordinator, Key};

pub use expand::interpolate;

pub struct Evaluator<'p> {
    pub project: &'p Project,
    coord: Coordinator,
    /// Number of nodes actually computed (memoized hits are not counted).
    pub eval_count: AtomicUsize,
}

pub(crate) type EResult<T> = Result<T, Diagnostic>;

pub(crate) fn cached<T: Clone>(s: &EvalState<T>) -> Option<EResult<T>> {
    match s {
        EvalState::NotInferred => None,
        EvalState::Evaluated(v) => Some(Ok(v.clone())),
        EvalState::Error(e) => Some(Err(e.clone())),
    }
}

pub(crate) fn store<T: Clone>(s: &mut EvalState<T>, r: &EResult<T>) {
    *s = match r {
        Ok(v) => EvalState::Evaluated(v.clone()),
        Err(e) => EvalState::Error(e.clone()),
    };
}

impl<'p> Evaluator<'p> {
    pub fn new(project: &'p Project) -> Self {
        Evaluator { project, coord: Coordinator::default(), eval_count: AtomicUsize::new(0) }
    }

    pub fn evaluations(&self) -> usize {
        self.eval_count.load(Ordering::Relaxed)
    }

    fn key_text(&self, k: &Key) -> String {
        let scope = self.project.scope(k.scope);
        let cat = match k.cat {
            Cat::Var => "variable",
            Cat::Type => "type",
            Cat::Streamlet => "streamlet",
            Cat::Impl => "implementation",
        };
        format!("{cat} {}.{}", scope.name, k.name)
    }

    /// Run `compute` at most once for `key`; later callers read the stored state.
    pub(crate) fn once<T: Clone>(
        &self,
        key: Key,
        state: impl Fn() -> Option<EResult<T>>,
        compute: impl FnOnce() -> EResult<T>,
        save: impl FnOnce(&EResult<T>),
    ) -> EResult<T> {
        if let Some(r) = state() {
            return r;
        }
        match self.coord.claim(&key) {
            Claim::Done => state().unwrap_or_else(|| {
                Err(Diagnostic::new(Category::Internal, format!("{} finished without a result", self.key_text(&key))))
            }),
            Claim::Cycle(keys) => {
                let mut names: Vec<String> = keys.iter().map(|k| self.key_text(k)).collect();
                names.push(self.key_text(&key));
                Err(Diagnostic::resolution(format!("circular dependency: {}", names.join(" -> "))))
            }
            Claim::Acquired => {
                self.eval_count.fetch_add(1, Ordering::Relaxed);
                let r = compute();
                save(&r);
                self.coord.release(&key);
                r
            }
        }
    }
}

/// What to evaluate: one implementation, or every element of one package.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Root {
    Impl(ImplRef),
    Package(String),
}

/// Every non-template implementation, sorted by package then name.
pub fn default_roots(project: &Project) -> Vec<Root> {
    project
        .all_impls()
        .iter()
        .filter_map(|i| {
            let i = read(i);
            (!i.is_template()).then(|| Root::Impl(i.reference()))
        })
        .collect()
}

/// Parse a `package.impl` or `package` selector.
pub fn find_root(project: &Project, top: &str) -> EResult<Root> {
    let Some((pkg, name)) = top.split_once('.') else {
        return match project.packages.contains_key(top) {
            true => Ok(Root::Package(top.to_string())),
            false => Err(Diagnostic::resolution(format!("top package `{top}` does not exist"))),
        };
    };
    let r = ImplRef::new(pkg, name);
    let imp = project
        .implementation(&r)
        .ok_or_else(|| Diagnostic::resolution(format!("top implementation `{top}` does not exist")))?;
    if read(&imp).is_template() {
        return Err(Diagnostic::resolution(format!("top implementation `{top}` is a template")));
    }
    Ok(Root::Impl(r))
}

/// Evaluate `roots` on up to `jobs` workers; returns sorted, deduplicated diagnostics.
pub fn evaluate(project: &Project, roots: &[Root], jobs: usize) -> Vec<Diagnostic> {
    let ev = Evaluator::new(project);
    ev.evaluate_roots(roots, jobs)
}

impl<'p> Evaluator<'p> {
    fn eval_root(&self, root: &Root) -> Vec<Diagnostic> {
        match root {
            Root::Impl(r) => self.eval_impl_ref(r).err().into_iter().collect(),
            Root::Package(p) => {
                let Some(scope) = self.project.package_scope(p) else {
                    return vec![Diagnostic::resolution(format!("package `{p}` does not exist"))];
                };
                let (vars, types, streamlets, impls) = {
                    let d = scope.read();
                    (
                        d.vars.values().filter(|v| !read(v).is_magic()).cloned().collect::<Vec<_>>(),
                        d.types.values().cloned().collect::<Vec<_>>(),
                        d.streamlets.values().filter(|s| !read(s).is_template()).cloned().collect::<Vec<_>>(),
                        d.impls.values().filter(|i| !read(i).is_template()).cloned().collect::<Vec<_>>(),
                    )
                };
                let mut errs = Vec::new();
                errs.extend(vars.iter().filter_map(|v| self.eval_var(scope.id, v).err()));
                errs.extend(types.iter().filter_map(|t| self.eval_type_entry(scope.id, t).err()));
                errs.extend(streamlets.iter().filter_map(|s| self.eval_streamlet(s).err()));
                errs.extend(impls.iter().filter_map(|i| self.eval_impl(i).err()));
                errs
            }
        }
    }

    pub fn evaluate_roots(&self, roots: &[Root], jobs: usize) -> Vec<Diagnostic> {
        let next = AtomicUsize::new(0);
        let diags = Mutex::new(Vec::new());
        let work = || loop {
            let k = next.fetch_add(1, Ordering::SeqCst);
            let Some(r) = roots.get(k) else { break };
            let errs = self.eval_root(r);
            diags.lock().unwrap_or_else(|e| e.into_inner()).extend(errs);
        };
        let jobs = jobs.clamp(1, roots.len().max(1));
        if jobs == 1 {
            work();
        } else {
            thread::scope(|s| {
                for _ in 0..jobs {
                    s.spawn(work);
                }
            });
        }
        let mut d = diags.into_inner().unwrap_or_else(|e| e.into_inner());
        d.sort();
        d.dedup();
        d
    }

    pub fn eval_impl_ref(&self, r: &ImplRef) -> EResult<Shared<crate::model::Implementation>> {
        let i = self
            .project
            .implementation(r)
            .ok_or_else(|| Diagnostic::resolution(format!("implementation `{}.{}` does not exist", r.package, r.name)))?;
        self.eval_impl(&i)?;
        Ok(i)
    }
}
