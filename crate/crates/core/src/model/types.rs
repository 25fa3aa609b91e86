use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::ScopeId;

static NEXT_TYPE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Synchronicity {
    Sync,
    Flatten,
    Desync,
    FlatDesync,
}

impl Synchronicity {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "Sync" => Synchronicity::Sync,
            "Flatten" => Synchronicity::Flatten,
            "Desync" => Synchronicity::Desync,
            "FlatDesync" => Synchronicity::FlatDesync,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Synchronicity::Sync => "Sync",
            Synchronicity::Flatten => "Flatten",
            Synchronicity::Desync => "Desync",
            Synchronicity::FlatDesync => "FlatDesync",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamDirection {
    Forward,
    Reverse,
}

impl StreamDirection {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Forward" => Some(StreamDirection::Forward),
            "Reverse" => Some(StreamDirection::Reverse),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StreamDirection::Forward => "Forward",
            StreamDirection::Reverse => "Reverse",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StreamProps {
    pub dimension: i64,
    pub user: Arc<TypeValue>,
    pub throughput: f64,
    pub synchronicity: Synchronicity,
    pub complexity: i64,
    pub direction: StreamDirection,
    pub keep: bool,
}

impl StreamProps {
    pub fn defaults() -> Self {
        StreamProps {
            dimension: 0,
            user: TypeValue::null(),
            throughput: 1.0,
            synchronicity: Synchronicity::Sync,
            complexity: 7,
            direction: StreamDirection::Forward,
            keep: false,
        }
    }

    /// Field-wise equality, with the user type compared structurally.
    pub fn same_record(&self, o: &StreamProps) -> bool {
        self.dimension == o.dimension
            && compatible(&self.user, &o.user)
            && self.throughput == o.throughput
            && self.synchronicity == o.synchronicity
            && self.complexity == o.complexity
            && self.direction == o.direction
            && self.keep == o.keep
    }

    pub fn render(&self) -> String {
        format!(
            "dimension={}, user={}, throughput={}, synchronicity={}, complexity={}, direction={}, keep={}",
            self.dimension,
            self.user.short(),
            self.throughput,
            self.synchronicity.name(),
            self.complexity,
            self.direction.name(),
            self.keep
        )
    }
}

#[derive(Debug, Clone)]
pub enum TypeKind {
    Null,
    Bit(i64),
    Compound { union: bool, scope: ScopeId, fields: Vec<(String, Arc<TypeValue>)> },
    Stream { elem: Arc<TypeValue>, props: StreamProps },
}

/// An evaluated logical type. `id` is the identity used for strict equality.
#[derive(Debug)]
pub struct TypeValue {
    pub id: u64,
    pub name: String,
    pub kind: TypeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WidthError {
    #[error("a Stream type has no single data bit width")]
    Stream,
}

impl TypeValue {
    pub fn new(name: impl Into<String>, kind: TypeKind) -> Arc<TypeValue> {
        Arc::new(TypeValue { id: NEXT_TYPE_ID.fetch_add(1, Ordering::Relaxed), name: name.into(), kind })
    }

    pub fn null() -> Arc<TypeValue> {
        TypeValue::new("Null", TypeKind::Null)
    }

    pub fn is_stream(&self) -> bool {
        matches!(self.kind, TypeKind::Stream { .. })
    }

    /// Compact form: `Bit(8)`, `DataGroup(rgb)`, `Stream(rgb_stream)`.
    pub fn short(&self) -> String {
        match &self.kind {
            TypeKind::Null => "DataNull".into(),
            TypeKind::Bit(w) => format!("Bit({w})"),
            TypeKind::Compound { union: false, .. } => format!("DataGroup({})", self.name),
            TypeKind::Compound { union: true, .. } => format!("DataUnion({})", self.name),
            TypeKind::Stream { .. } => format!("Stream({})", self.name),
        }
    }

    pub fn bit_width(&self) -> Result<i64, WidthError> {
        match &self.kind {
            TypeKind::Null => Ok(0),
            TypeKind::Bit(w) => Ok(*w),
            TypeKind::Compound { union, fields, .. } => {
                let mut acc = 0i64;
                for (_, f) in fields {
                    let w = f.bit_width()?;
                    acc = if *union { acc.max(w) } else { acc + w };
                }
                Ok(acc)
            }
            TypeKind::Stream { .. } => Err(WidthError::Stream),
        }
    }
}

impl fmt::Display for TypeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short())
    }
}

/// Same declaration: identity of the evaluated type value.
pub fn strictly_equal(a: &Arc<TypeValue>, b: &Arc<TypeValue>) -> bool {
    a.id == b.id
}

/// Structural equivalence: variant, widths, ordered child names, stream properties.
pub fn compatible(a: &TypeValue, b: &TypeValue) -> bool {
    if a.id == b.id {
        return true;
    }
    match (&a.kind, &b.kind) {
        (TypeKind::Null, TypeKind::Null) => true,
        (TypeKind::Bit(x), TypeKind::Bit(y)) => x == y,
        (TypeKind::Compound { union: ua, fields: fa, .. }, TypeKind::Compound { union: ub, fields: fb, .. }) => {
            ua == ub && fa.len() == fb.len() && fa.iter().zip(fb).all(|((na, ta), (nb, tb))| na == nb && compatible(ta, tb))
        }
        (TypeKind::Stream { elem: ea, props: pa }, TypeKind::Stream { elem: eb, props: pb }) => {
            compatible(ea, eb) && pa.same_record(pb)
        }
        _ => false,
    }
}
