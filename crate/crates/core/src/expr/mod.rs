//! Scalar expressions over the coordinates of a single chart.
//!
//! Every coefficient function in a scenario (clock form, frame, metric,
//! observer, connection data) is an [`Expr`]. Trees are immutable; partial
//! derivatives are exact and symbolic, evaluation is a plain recursive walk
//! in IEEE-754 double precision.

mod diff;
mod parse;

use std::fmt;

pub use parse::{parse_expr, ParseError};

/// Elementary functions accepted by the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Option<f64> {
        match self {
            Func::Sin => Some(x.sin()),
            Func::Cos => Some(x.cos()),
            Func::Tan => Some(x.tan()),
            Func::Exp => Some(x.exp()),
            Func::Log => (x > 0.0).then(|| x.ln()),
            Func::Sqrt => (x >= 0.0).then(|| x.sqrt()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

/// Evaluation failure at a specific point.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("domain error in `{subexpr}`: {reason}")]
pub struct DomainError {
    pub subexpr: String,
    pub reason: &'static str,
}

// Largest exponent magnitude evaluated by repeated multiplication.
const MAX_INTEGER_EXPONENT: f64 = 1024.0;

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// True when the tree mentions no coordinate.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Coord(_) => false,
            Expr::Neg(a) | Expr::Apply(_, a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Neg(a) | Expr::Apply(_, a) => a.max_coord(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<f64, DomainError> {
        let fail = |reason| DomainError {
            subexpr: self.to_string(),
            reason,
        };
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Coord(i) => p[*i],
            Expr::Neg(a) => -a.evaluate(p)?,
            Expr::Add(a, b) => a.evaluate(p)? + b.evaluate(p)?,
            Expr::Sub(a, b) => a.evaluate(p)? - b.evaluate(p)?,
            Expr::Mul(a, b) => a.evaluate(p)? * b.evaluate(p)?,
            Expr::Div(a, b) => {
                let num = a.evaluate(p)?;
                let den = b.evaluate(p)?;
                if den == 0.0 {
                    return Err(fail("division by zero"));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.evaluate(p)?;
                let exponent = b.evaluate(p)?;
                power(base, exponent).ok_or_else(|| fail("power undefined for this base"))?
            }
            Expr::Apply(f, a) => f
                .apply(a.evaluate(p)?)
                .ok_or_else(|| fail("argument outside function domain"))?,
        })
    }

    /// Exact partial derivative with respect to coordinate `i`.
    pub fn differentiate(&self, i: usize) -> Expr {
        diff::differentiate(self, i)
    }

    /// ∂/∂x_i with some function rules replaced: where `outer(f, a)` returns
    /// `Some(d)`, the derivative of f(a) becomes d·∂_i a.
    pub fn differentiate_with(
        &self,
        i: usize,
        outer: &dyn Fn(Func, &Expr) -> Option<Expr>,
    ) -> Expr {
        diff::differentiate_with(self, i, outer)
    }

    /// Renders the tree with the given coordinate names. The output is
    /// fully parenthesized and re-parses to an identically evaluating tree.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Named<'a> {
        Named { expr: self, names }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: Option<&[String]>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Coord(i) => match names.and_then(|n| n.get(*i)) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{i}"),
            },
            Expr::Neg(a) => {
                f.write_str("(-")?;
                a.write(f, names)?;
                f.write_str(")")
            }
            Expr::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, names)?;
                f.write_str(")")
            }
            Expr::Add(a, b) => binary(f, names, a, " + ", b),
            Expr::Sub(a, b) => binary(f, names, a, " - ", b),
            Expr::Mul(a, b) => binary(f, names, a, " * ", b),
            Expr::Div(a, b) => binary(f, names, a, " / ", b),
            Expr::Pow(a, b) => binary(f, names, a, " ^ ", b),
        }
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    names: Option<&[String]>,
    a: &Expr,
    op: &str,
    b: &Expr,
) -> fmt::Result {
    f.write_str("(")?;
    a.write(f, names)?;
    f.write_str(op)?;
    b.write(f, names)?;
    f.write_str(")")
}

/// `base^exponent` with integer exponents done by repeated multiplication,
/// so negative bases are fine there. Non-integer exponents need a positive
/// base.
fn power(base: f64, exponent: f64) -> Option<f64> {
    if exponent.fract() == 0.0 && exponent.abs() <= MAX_INTEGER_EXPONENT {
        let mut n = exponent.abs() as u32;
        let mut acc = 1.0;
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc *= sq;
            }
            sq *= sq;
            n >>= 1;
        }
        if exponent < 0.0 {
            if acc == 0.0 {
                return None;
            }
            acc = 1.0 / acc;
        }
        Some(acc)
    } else if base > 0.0 {
        Some(base.powf(exponent))
    } else {
        None
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, None)
    }
}

pub struct Named<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, Some(self.names))
    }
}

// Folding constructors. Constant subtrees collapse; additive and
// multiplicative identities are dropped. Nothing else is simplified.

pub fn constant(c: f64) -> Expr {
    Expr::Const(c)
}

pub fn coord(i: usize) -> Expr {
    Expr::Coord(i)
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(0.0), _) => neg(b),
        (_, Some(0.0)) => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::zero(),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
        (_, Some(1.0)) => a,
        (Some(0.0), _) => Expr::zero(),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub fn pow(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => match power(x, y) {
            Some(v) if v.is_finite() => Expr::Const(v),
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        },
        (_, Some(1.0)) => a,
        (_, Some(0.0)) => Expr::one(),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

pub fn apply(f: Func, a: Expr) -> Expr {
    if let Some(x) = a.as_const() {
        if let Some(v) = f.apply(x) {
            return Expr::Const(v);
        }
    }
    Expr::Apply(f, Box::new(a))
}
