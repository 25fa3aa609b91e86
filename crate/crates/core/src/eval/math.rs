//! Operators on constant values.

use crate::syntax::{BinOp, Func, UnOp};
use crate::value::Value;

pub type MathResult = Result<Value, String>;

fn mismatch(op: &str, a: &Value, b: &Value) -> String {
    format!("operator `{op}` is not defined for {} and {}", a.kind_name(), b.kind_name())
}

fn overflow(op: &str) -> String {
    format!("integer overflow in `{op}`")
}

pub fn unary(op: UnOp, v: Value) -> MathResult {
    match (op, &v) {
        (UnOp::Neg, Value::Int(i)) => i.checked_neg().map(Value::Int).ok_or_else(|| overflow("-")),
        (UnOp::Neg, Value::Float(x)) => Ok(Value::Float(-x)),
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (UnOp::BitNot, Value::Int(i)) => Ok(Value::Int(!i)),
        _ => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::BitNot => "~",
            };
            Err(format!("unary `{sym}` is not defined for {}", v.kind_name()))
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Int(i) => Some(*i as f64),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Int(i) => Some(i.to_string()),
        Value::Float(x) => Some(x.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn int_pow(base: i64, exp: i64) -> MathResult {
    if exp < 0 {
        return Ok(Value::Float((base as f64).powf(exp as f64)));
    }
    let e = u32::try_from(exp).map_err(|_| overflow("^"))?;
    base.checked_pow(e).map(Value::Int).ok_or_else(|| overflow("^"))
}

fn shift(op: BinOp, a: i64, b: i64) -> MathResult {
    if !(0..64).contains(&b) {
        return Err(format!("shift amount {b} is out of range 0..63"));
    }
    Ok(Value::Int(if op == BinOp::Shl {
        a.checked_mul(1i64 << b).ok_or_else(|| overflow("<<"))?
    } else {
        a >> b
    }))
}

pub fn binary(op: BinOp, a: Value, b: Value) -> MathResult {
    use BinOp::*;
    use Value::*;
    let sym = op.symbol();
    match op {
        Or | And => match (&a, &b) {
            (Bool(x), Bool(y)) => Ok(Bool(if op == Or { *x || *y } else { *x && *y })),
            _ => Err(mismatch(sym, &a, &b)),
        },
        BitOr | BitAnd => match (&a, &b) {
            (Int(x), Int(y)) => Ok(Int(if op == BitOr { x | y } else { x & y })),
            _ => Err(mismatch(sym, &a, &b)),
        },
        Eq | Ne => {
            let same = match (&a, &b) {
                (Int(x), Int(y)) => x == y,
                (Float(x), Float(y)) => x == y,
                (Str(x), Str(y)) => x == y,
                (Bool(x), Bool(y)) => x == y,
                (ClockDomain(x), ClockDomain(y)) => x == y,
                _ => return Err(mismatch(sym, &a, &b)),
            };
            Ok(Bool(if op == Eq { same } else { !same }))
        }
        Lt | Gt | Le | Ge => {
            let r = match (&a, &b) {
                (Int(x), Int(y)) => x.cmp(y),
                _ => match (as_f64(&a), as_f64(&b)) {
                    (Some(x), Some(y)) => x.partial_cmp(&y).ok_or_else(|| "comparison with NaN".to_string())?,
                    _ => return Err(mismatch(sym, &a, &b)),
                },
            };
            Ok(Bool(match op {
                Lt => r.is_lt(),
                Gt => r.is_gt(),
                Le => r.is_le(),
                _ => r.is_ge(),
            }))
        }
        Shl | Shr => match (&a, &b) {
            (Int(x), Int(y)) => shift(op, *x, *y),
            _ => Err(mismatch(sym, &a, &b)),
        },
        Add => match (a, b) {
            (Array(mut xs), y) if !matches!(y, Array(_)) => {
                if let Some(first) = xs.first() {
                    if !first.same_variant(&y) {
                        return Err(format!("cannot append {} to {}", y.kind_name(), Array(xs).kind_name()));
                    }
                }
                xs.push(y);
                Ok(Array(xs))
            }
            (x, Array(mut ys)) if !matches!(x, Array(_)) => {
                if let Some(first) = ys.first() {
                    if !first.same_variant(&x) {
                        return Err(format!("cannot prepend {} to {}", x.kind_name(), Array(ys).kind_name()));
                    }
                }
                ys.insert(0, x);
                Ok(Array(ys))
            }
            (Str(x), Str(y)) => Ok(Str(x + &y)),
            (Str(x), y) if scalar_text(&y).is_some() => Ok(Str(x + &scalar_text(&y).unwrap_or_default())),
            (x, Str(y)) if scalar_text(&x).is_some() => Ok(Str(scalar_text(&x).unwrap_or_default() + &y)),
            (x, y) => arith(op, x, y),
        },
        Sub | Mul | Div | Pow => arith(op, a, b),
        Mod => match (&a, &b) {
            (Int(_), Int(0)) => Err("modulo by zero".into()),
            (Int(x), Int(y)) => x.checked_rem(*y).map(Int).ok_or_else(|| overflow("%")),
            _ => Err(mismatch(sym, &a, &b)),
        },
    }
}

fn arith(op: BinOp, a: Value, b: Value) -> MathResult {
    use Value::*;
    let sym = op.symbol();
    if let (Int(x), Int(y)) = (&a, &b) {
        let (x, y) = (*x, *y);
        return match op {
            BinOp::Add => x.checked_add(y).map(Int).ok_or_else(|| overflow(sym)),
            BinOp::Sub => x.checked_sub(y).map(Int).ok_or_else(|| overflow(sym)),
            BinOp::Mul => x.checked_mul(y).map(Int).ok_or_else(|| overflow(sym)),
            BinOp::Div if y == 0 => Err("division by zero".into()),
            BinOp::Div => x.checked_div(y).map(Int).ok_or_else(|| overflow(sym)),
            _ => int_pow(x, y),
        };
    }
    let (Some(x), Some(y)) = (as_f64(&a), as_f64(&b)) else {
        return Err(mismatch(sym, &a, &b));
    };
    Ok(Float(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div if y == 0.0 => return Err("division by zero".into()),
        BinOp::Div => x / y,
        _ => x.powf(y),
    }))
}

fn float_to_int(x: f64, what: &str) -> MathResult {
    if !x.is_finite() || x < i64::MIN as f64 || x >= i64::MAX as f64 {
        return Err(format!("{what} result {x} does not fit in an int"));
    }
    Ok(Value::Int(x as i64))
}

pub fn call(f: Func, v: Value) -> MathResult {
    let (name, op): (&str, fn(f64) -> f64) = match f {
        Func::Round => ("round", f64::round),
        Func::Floor => ("floor", f64::floor),
        Func::Ceil => ("ceil", f64::ceil),
    };
    match v {
        Value::Int(i) => Ok(Value::Int(i)),
        Value::Float(x) => float_to_int(op(x), name),
        other => Err(format!("`{name}` expects a float, got {}", other.kind_name())),
    }
}

/// `log<base>(x)`; exact powers of the base give exact results.
pub fn log(base: Value, x: Value) -> MathResult {
    let (Some(b), Some(v)) = (as_f64(&base), as_f64(&x)) else {
        return Err(format!("`log` expects numbers, got {} and {}", base.kind_name(), x.kind_name()));
    };
    if v <= 0.0 {
        return Err(format!("log of non-positive argument {v}"));
    }
    if b <= 0.0 || b == 1.0 {
        return Err(format!("log with invalid base {b}"));
    }
    let r = if b == 2.0 {
        v.log2()
    } else if b == 10.0 {
        v.log10()
    } else {
        let r = v.ln() / b.ln();
        let k = r.round();
        if (b.powf(k) - v).abs() <= v * 1e-12 {
            k
        } else {
            r
        }
    };
    Ok(Value::Float(r))
}

/// Half-open range `start=step=>end`.
pub fn range(start: Value, step: Value, end: Value) -> MathResult {
    let (Value::Int(s), Value::Int(st), Value::Int(e)) = (&start, &step, &end) else {
        return Err(format!(
            "range bounds must be int, got {}, {}, {}",
            start.kind_name(),
            step.kind_name(),
            end.kind_name()
        ));
    };
    if *st == 0 {
        return Err("range step must not be zero".into());
    }
    let mut out = Vec::new();
    let mut i = *s;
    while (*st > 0 && i < *e) || (*st < 0 && i > *e) {
        out.push(Value::Int(i));
        match i.checked_add(*st) {
            Some(n) => i = n,
            None => break,
        }
    }
    Ok(Value::Array(out))
}

pub fn index(arr: Value, idx: Value) -> MathResult {
    match (arr, idx) {
        (Value::Array(xs), Value::Int(i)) => {
            let len = xs.len();
            usize::try_from(i)
                .ok()
                .and_then(|u| xs.into_iter().nth(u))
                .ok_or_else(|| format!("index {i} is out of bounds for an array of length {len}"))
        }
        (a, i) => Err(format!("cannot index {} with {}", a.kind_name(), i.kind_name())),
    }
}

/// Literal array; all elements must share one variant.
pub fn array(items: Vec<Value>) -> MathResult {
    if let Some(first) = items.first() {
        if let Some(bad) = items.iter().find(|v| !first.same_variant(v) || matches!(v, Value::Impl(_))) {
            return Err(format!("array mixes {} and {}", first.kind_name(), bad.kind_name()));
        }
    }
    Ok(Value::Array(items))
}
