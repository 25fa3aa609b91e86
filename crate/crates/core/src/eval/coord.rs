//! Once-only evaluation of shared nodes across worker threads.

use std::collections::{HashMap, HashSet};
use std::sync::{Condvar, Mutex, MutexGuard};
use std::thread::{self, ThreadId};

use crate::model::ScopeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cat {
    Var,
    Type,
    Streamlet,
    Impl,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub scope: ScopeId,
    pub cat: Cat,
    pub name: String,
}

impl Key {
    pub fn new(scope: ScopeId, cat: Cat, name: impl Into<String>) -> Self {
        Key { scope, cat, name: name.into() }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Claim {
    /// The caller now owns the node and must call `release`.
    Acquired,
    /// Another evaluation already finished the node.
    Done,
    /// Claiming would close a dependency cycle through these nodes.
    Cycle(Vec<Key>),
}

#[derive(Default)]
struct Table {
    owner: HashMap<Key, ThreadId>,
    waiting: HashMap<ThreadId, Key>,
    stacks: HashMap<ThreadId, Vec<Key>>,
    done: HashSet<Key>,
}

#[derive(Default)]
pub struct Coordinator {
    table: Mutex<Table>,
    cv: Condvar,
}

impl Coordinator {
    fn lock(&self) -> MutexGuard<'_, Table> {
        self.table.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn claim(&self, key: &Key) -> Claim {
        let me = thread::current().id();
        let mut t = self.lock();
        loop {
            if t.done.contains(key) {
                return Claim::Done;
            }
            match t.owner.get(key).copied() {
                None => {
                    t.owner.insert(key.clone(), me);
                    t.stacks.entry(me).or_default().push(key.clone());
                    return Claim::Acquired;
                }
                Some(o) if o == me => {
                    let stack = &t.stacks[&me];
                    let pos = stack.iter().position(|k| k == key).unwrap_or(0);
                    return Claim::Cycle(stack[pos..].to_vec());
                }
                Some(o) => {
                    if let Some(cycle) = cross_thread_cycle(&t, me, o, key) {
                        return Claim::Cycle(cycle);
                    }
                    t.waiting.insert(me, key.clone());
                    t = self.cv.wait(t).unwrap_or_else(|e| e.into_inner());
                    t.waiting.remove(&me);
                }
            }
        }
    }

    pub fn release(&self, key: &Key) {
        let me = thread::current().id();
        let mut t = self.lock();
        t.owner.remove(key);
        if let Some(s) = t.stacks.get_mut(&me) {
            if let Some(pos) = s.iter().rposition(|k| k == key) {
                s.remove(pos);
            }
        }
        t.done.insert(key.clone());
        drop(t);
        self.cv.notify_all();
    }
}

/// Follow owner -> waited-for key -> owner ... and report a loop back to `me`.
fn cross_thread_cycle(t: &Table, me: ThreadId, first_owner: ThreadId, key: &Key) -> Option<Vec<Key>> {
    let mut members = vec![key.clone()];
    let mut cur = first_owner;
    let mut hops = 0;
    while let Some(k) = t.waiting.get(&cur) {
        members.push(k.clone());
        let next = *t.owner.get(k)?;
        if next == me {
            return Some(members);
        }
        cur = next;
        hops += 1;
        if hops > t.owner.len() {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn same_thread_cycle() {
        let c = Coordinator::default();
        let a = Key::new(0, Cat::Var, "a");
        let b = Key::new(0, Cat::Var, "b");
        assert_eq!(c.claim(&a), Claim::Acquired);
        assert_eq!(c.claim(&b), Claim::Acquired);
        assert_eq!(c.claim(&a), Claim::Cycle(vec![a.clone(), b.clone()]));
        c.release(&b);
        c.release(&a);
        assert_eq!(c.claim(&a), Claim::Done);
    }

    #[test]
    fn waiter_sees_done() {
        let c = Arc::new(Coordinator::default());
        let k = Key::new(1, Cat::Type, "t");
        assert_eq!(c.claim(&k), Claim::Acquired);
        let c2 = c.clone();
        let k2 = k.clone();
        let h = thread::spawn(move || c2.claim(&k2));
        thread::sleep(std::time::Duration::from_millis(20));
        c.release(&k);
        assert_eq!(h.join().unwrap(), Claim::Done);
    }
}
