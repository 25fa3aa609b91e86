use std::fmt;

/// Kinds a constant may be declared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicKind {
    Int,
    Str,
    Float,
    Bool,
    ClockDomain,
}

impl BasicKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "int" => BasicKind::Int,
            "str" => BasicKind::Str,
            "float" => BasicKind::Float,
            "bool" => BasicKind::Bool,
            "clockdomain" => BasicKind::ClockDomain,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BasicKind::Int => "int",
            BasicKind::Str => "str",
            BasicKind::Float => "float",
            BasicKind::Bool => "bool",
            BasicKind::ClockDomain => "clockdomain",
        }
    }
}

impl fmt::Display for BasicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Package-qualified reference to an implementation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ImplRef {
    pub package: String,
    pub name: String,
}

impl ImplRef {
    pub fn new(package: impl Into<String>, name: impl Into<String>) -> Self {
        ImplRef { package: package.into(), name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Str(String),
    Float(f64),
    Bool(bool),
    ClockDomain(String),
    Array(Vec<Value>),
    /// Bound `impl of` template argument.
    Impl(ImplRef),
}

impl Value {
    pub fn kind_name(&self) -> String {
        match self {
            Value::Int(_) => "int".into(),
            Value::Str(_) => "str".into(),
            Value::Float(_) => "float".into(),
            Value::Bool(_) => "bool".into(),
            Value::ClockDomain(_) => "clockdomain".into(),
            Value::Array(items) => match items.first() {
                Some(v) => format!("array<{}>", v.kind_name()),
                None => "array<unknown>".into(),
            },
            Value::Impl(_) => "impl".into(),
        }
    }

    pub fn basic_kind(&self) -> Option<BasicKind> {
        Some(match self {
            Value::Int(_) => BasicKind::Int,
            Value::Str(_) => BasicKind::Str,
            Value::Float(_) => BasicKind::Float,
            Value::Bool(_) => BasicKind::Bool,
            Value::ClockDomain(_) => BasicKind::ClockDomain,
            _ => return None,
        })
    }

    pub fn same_variant(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Array(a), Value::Array(b)) => match (a.first(), b.first()) {
                (Some(x), Some(y)) => x.same_variant(y),
                _ => true,
            },
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }

    /// Bare rendering used inside mangled names and array listings.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Str(s) => format!("{s:?}"),
            Value::Float(x) => x.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::ClockDomain(c) => c.clone(),
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(Value::render).collect();
                format!("[{}]", parts.join(", "))
            }
            Value::Impl(r) => r.name.clone(),
        }
    }
}

/// Dump form: `int(101)`, `str("a")`, `Implement(x)`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "int({i})"),
            Value::Str(s) => write!(f, "str({s:?})"),
            Value::Float(x) => write!(f, "float({x})"),
            Value::Bool(b) => write!(f, "bool({b})"),
            Value::ClockDomain(c) => write!(f, "clockdomain({c:?})"),
            Value::Array(_) => write!(f, "{}{}", self.kind_name(), self.render()),
            Value::Impl(r) => write!(f, "Implement({})", r.name),
        }
    }
}
