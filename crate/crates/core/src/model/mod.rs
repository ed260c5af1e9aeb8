//! The model expression: parsing and evaluation over points and boxes.

mod interval;
mod parse;

use std::collections::BTreeMap;

use thiserror::Error;

pub use parse::{parse, ParseError};

use crate::possibility::Interval;

/// Default cap on the number of interval coordinates the vertex method expands.
pub const DEFAULT_VERTEX_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("variable '{0}' is not bound")]
    Unbound(String),
    #[error("non-finite result")]
    NonFinite,
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("interval powers need a constant integer exponent")]
    NonIntegerExponent,
    #[error("{count} interval coordinates exceed the vertex limit of {limit}; use interval evaluation")]
    VertexLimit { count: usize, limit: usize },
}

impl EvalError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            EvalError::Unbound(_) => "unbound",
            EvalError::NonFinite => "non_finite",
            EvalError::DivisionByZero => "division_by_zero",
            EvalError::Domain(_) => "domain",
            EvalError::NonIntegerExponent => "non_integer_exponent",
            EvalError::VertexLimit { .. } => "vertex_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn accepts(self, arity: usize) -> bool {
        match self {
            Func::Min | Func::Max => arity >= 2,
            _ => arity == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Index into [`ModelAst::variables`].
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Parsed model. Variables are numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelAst {
    root: Expr,
    variables: Vec<String>,
    source: String,
}

/// One coordinate of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coord {
    Point(f64),
    Range(Interval),
}

impl Coord {
    fn as_interval(self) -> Interval {
        match self {
            Coord::Point(v) => Interval::point(v),
            Coord::Range(iv) => iv,
        }
    }
}

/// Assignment of variables to points or intervals.
pub type ParamBox = BTreeMap<String, Coord>;

fn integer_exponent(v: f64) -> Option<i32> {
    (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
}

fn point_pow(base: f64, exponent: f64) -> f64 {
    match integer_exponent(exponent) {
        Some(n) => base.powi(n),
        None => base.powf(exponent),
    }
}

impl ModelAst {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    fn slots<T>(&self, bx: &ParamBox, f: impl Fn(Coord) -> T) -> Result<Vec<T>, EvalError> {
        self.variables
            .iter()
            .map(|name| bx.get(name).copied().map(&f).ok_or_else(|| EvalError::Unbound(name.clone())))
            .collect()
    }

    /// Point evaluation with values given per variable slot.
    pub fn point_at(&self, values: &[f64]) -> Result<f64, EvalError> {
        let v = point(&self.root, values)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Natural interval extension over per-slot intervals.
    pub fn interval_over(&self, ranges: &[Interval]) -> Result<Interval, EvalError> {
        let r = enclose(&self.root, ranges)?;
        if r.lo.is_finite() && r.hi.is_finite() {
            Ok(r)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Hull of the model values at every corner of the box.
    pub fn vertex_over(&self, ranges: &[Interval], limit: usize) -> Result<Interval, EvalError> {
        let wide: Vec<usize> = (0..ranges.len()).filter(|&i| !ranges[i].is_degenerate()).collect();
        if wide.len() > limit {
            return Err(EvalError::VertexLimit { count: wide.len(), limit });
        }
        let mut corner: Vec<f64> = ranges.iter().map(|r| r.lo).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for mask in 0u64..(1u64 << wide.len()) {
            for (bit, &slot) in wide.iter().enumerate() {
                corner[slot] = if mask >> bit & 1 == 1 { ranges[slot].hi } else { ranges[slot].lo };
            }
            let v = self.point_at(&corner)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(Interval { lo, hi })
    }
}

fn point(e: &Expr, x: &[f64]) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => x[*i],
        Expr::Neg(a) => -point(a, x)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (point(a, x)?, point(b, x)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => point_pow(a, b),
            }
        }
        Expr::Call(f, args) => {
            let a = point(&args[0], x)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs => a.abs(),
                Func::Min | Func::Max => {
                    let mut acc = a;
                    for arg in &args[1..] {
                        let v = point(arg, x)?;
                        acc = if *f == Func::Min { acc.min(v) } else { acc.max(v) };
                    }
                    acc
                }
            }
        }
    })
}

fn enclose(e: &Expr, x: &[Interval]) -> Result<Interval, EvalError> {
    Ok(match e {
        Expr::Const(c) => Interval::point(*c),
        Expr::Var(i) => x[*i],
        Expr::Neg(a) => interval::neg(enclose(a, x)?),
        Expr::Binary(op, a, b) => {
            let (a, b) = (enclose(a, x)?, enclose(b, x)?);
            match op {
                BinOp::Add => interval::add(a, b),
                BinOp::Sub => interval::sub(a, b),
                BinOp::Mul => interval::mul(a, b)?,
                BinOp::Div => interval::div(a, b)?,
                BinOp::Pow => {
                    let n = b
                        .is_degenerate()
                        .then(|| integer_exponent(b.lo))
                        .flatten()
                        .ok_or(EvalError::NonIntegerExponent)?;
                    interval::powi(a, n)?
                }
            }
        }
        Expr::Call(f, args) => {
            let a = enclose(&args[0], x)?;
            match f {
                Func::Sin => interval::sin(a)?,
                Func::Cos => interval::cos(a)?,
                Func::Exp => interval::exp(a),
                Func::Ln => interval::ln(a)?,
                Func::Sqrt => interval::sqrt(a)?,
                Func::Abs => interval::abs(a),
                Func::Min | Func::Max => {
                    let mut acc = a;
                    for arg in &args[1..] {
                        let v = enclose(arg, x)?;
                        acc = if *f == Func::Min { interval::min(acc, v) } else { interval::max(acc, v) };
                    }
                    acc
                }
            }
        }
    })
}

/// Evaluates the model at a box whose coordinates are all points.
pub fn eval_point(ast: &ModelAst, bx: &ParamBox) -> Result<f64, EvalError> {
    let values = ast.slots(bx, |c| match c {
        Coord::Point(v) => Ok(v),
        Coord::Range(iv) if iv.is_degenerate() => Ok(iv.lo),
        Coord::Range(iv) => Err(EvalError::Domain(format!("point evaluation given interval {iv}"))),
    })?;
    let values: Vec<f64> = values.into_iter().collect::<Result<_, _>>()?;
    ast.point_at(&values)
}

/// Guaranteed enclosure of the model image over the box by natural interval extension.
pub fn eval_interval(ast: &ModelAst, bx: &ParamBox) -> Result<Interval, EvalError> {
    ast.interval_over(&ast.slots(bx, Coord::as_interval)?)
}

/// Hull of the model values at the box corners; exact for coordinate-wise monotone models.
pub fn eval_vertex(ast: &ModelAst, bx: &ParamBox, limit: usize) -> Result<Interval, EvalError> {
    ast.vertex_over(&ast.slots(bx, Coord::as_interval)?, limit)
}
