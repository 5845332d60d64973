//! Scalar expressions in the variables `t`, `u`, `v`.
//!
//! Nonlinearities and bound functions arrive as plain text in problem files.
//! They are parsed once into an immutable [`Expression`] and evaluated many
//! times from grid scans, so evaluation takes `&self` and touches no shared
//! state.

mod bounds;
mod parser;

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use bounds::{
    bound_fn_on_box, bound_on_box, check_domination, BoundError, Box3, BoxBounds, BoxEvalError,
    DominationKind, DominationReport, Interval, SamplingPolicy,
};
pub use parser::ParseError;

/// A variable slot. `S` only appears in kernel pieces and envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    U,
    V,
    S,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
            Var::S => "s",
        }
    }

    fn slot(self) -> usize {
        match self {
            Var::T => 0,
            Var::U => 1,
            Var::V => 2,
            Var::S => 3,
        }
    }
}

/// Which identifiers the parser accepts as variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSet {
    /// `t`, `u`, `v`: nonlinearities and bound functions.
    Tuv,
    /// `t`, `s`: kernel pieces.
    Ts,
    /// `s`: kernel envelopes.
    S,
}

impl VarSet {
    fn lookup(self, name: &str) -> Option<Var> {
        let var = match name {
            "t" => Var::T,
            "u" => Var::U,
            "v" => Var::V,
            "s" => Var::S,
            _ => return None,
        };
        let allowed = match self {
            VarSet::Tuv => matches!(var, Var::T | Var::U | Var::V),
            VarSet::Ts => matches!(var, Var::T | Var::S),
            VarSet::S => var == Var::S,
        };
        allowed.then_some(var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
}

impl UnaryOp {
    pub(crate) fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "abs" => UnaryOp::Abs,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Sqrt => Some("sqrt"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 4,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => " + ",
            BinaryOp::Sub => " - ",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
}

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            // negative constants print their own parentheses
            Node::Const(_) | Node::Var(_) => ATOM_PRECEDENCE,
            Node::Unary(UnaryOp::Neg, _) => NEG_PRECEDENCE,
            Node::Unary(_, _) => ATOM_PRECEDENCE,
            Node::Binary(op, _, _) => op.precedence(),
        }
    }

    fn eval(&self, vars: &[f64; 4]) -> Result<f64, EvalError> {
        match self {
            Node::Const(c) => Ok(*c),
            Node::Var(v) => Ok(vars[v.slot()]),
            Node::Unary(op, arg) => {
                let x = arg.eval(vars)?;
                let y = match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Abs => x.abs(),
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::NegativeSqrt(x));
                        }
                        x.sqrt()
                    }
                };
                finite(y)
            }
            Node::Binary(op, lhs, rhs) => {
                let a = lhs.eval(vars)?;
                let b = rhs.eval(vars)?;
                let y = match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinaryOp::Pow => power(a, b)?,
                };
                finite(y)
            }
        }
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Node::Const(_) => {}
            Node::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Node::Unary(_, a) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            Node::Var(v) => f.write_str(v.name()),
            Node::Unary(UnaryOp::Neg, arg) => {
                f.write_str("-")?;
                write_child(f, arg, arg.precedence() < NEG_PRECEDENCE)
            }
            Node::Unary(op, arg) => {
                write!(f, "{}(", op.function_name().unwrap_or_default())?;
                arg.write(f)?;
                f.write_str(")")
            }
            Node::Binary(op, lhs, rhs) => {
                let p = op.precedence();
                write_child(f, lhs, lhs.precedence() < p)?;
                f.write_str(op.symbol())?;
                write_child(f, rhs, rhs.precedence() <= p)
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, node: &Node, parens: bool) -> fmt::Result {
    if parens {
        f.write_str("(")?;
        node.write(f)?;
        f.write_str(")")
    } else {
        node.write(f)
    }
}

fn finite(y: f64) -> Result<f64, EvalError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::ZeroToNegativePower(exponent));
    }
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        return Ok(base.powi(exponent as i32));
    }
    if base < 0.0 {
        return Err(EvalError::NegativeBaseFractionalPower { base, exponent });
    }
    Ok(base.powf(exponent))
}

/// Domain errors raised during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("zero raised to negative power {0}")]
    ZeroToNegativePower(f64),
    #[error("negative base {base} raised to non-integer power {exponent}")]
    NegativeBaseFractionalPower { base: f64, exponent: f64 },
    #[error("result is not a finite number")]
    NonFinite,
}

/// A parsed expression. Keeps its source text for reports.
#[derive(Debug, Clone)]
pub struct Expression {
    root: Node,
    source: String,
}

impl Expression {
    /// Parses an expression over `t`, `u`, `v`.
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Self::parse_with(source, VarSet::Tuv)
    }

    pub fn parse_with(source: &str, vars: VarSet) -> Result<Self, ParseError> {
        let root = parser::parse(source, vars)?;
        Ok(Self {
            root,
            source: source.trim().to_string(),
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            root: Node::Const(value),
            source: format!("{value:?}"),
        }
    }

    pub fn from_node(root: Node) -> Self {
        let source = Printed(&root).to_string();
        Self { root, source }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.root.collect_vars(&mut out);
        out
    }

    /// `Some(c)` when the expression is a bare constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self.root {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64, u: f64, v: f64) -> Result<f64, EvalError> {
        self.root.eval(&[t, u, v, 0.0])
    }

    /// Evaluates a kernel piece or envelope; `t` and `s` are the only inputs.
    pub fn eval_ts(&self, t: f64, s: f64) -> Result<f64, EvalError> {
        self.root.eval(&[t, 0.0, 0.0, s])
    }

    /// Evaluates a one-variable function of `t` (bound functions) at `x`,
    /// also binding `s` to `x` so envelopes written in `s` work too.
    pub fn eval_univariate(&self, x: f64) -> Result<f64, EvalError> {
        self.root.eval(&[x, 0.0, 0.0, x])
    }
}

/// Free-function form of [`Expression::parse`].
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    Expression::parse(source)
}

/// Free-function form of [`Expression::eval`].
pub fn evaluate(e: &Expression, t: f64, u: f64, v: f64) -> Result<f64, EvalError> {
    e.eval(t, u, v)
}

struct Printed<'a>(&'a Node);

impl fmt::Display for Printed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f)
    }
}

/// Prints the canonical form (not the original source).
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ev(src: &str, t: f64, u: f64, v: f64) -> f64 {
        Expression::parse(src).unwrap().eval(t, u, v).unwrap()
    }

    #[test]
    fn nonlinearity_examples() {
        assert_eq!(ev("t*u^2*(1+sin(v)^2)", 1.0, 2.0, 0.0), 4.0);
        assert_eq!(ev("t*(2+sin(u))*(6+cos(v))", 1.0, 0.0, 0.0), 14.0);
        assert_eq!(ev("t*exp(v^2-2)*sin(u)", 1.0, 0.0, 1.0), 0.0);
        assert_eq!(ev("t*u^2*(1+sin(v)^2)", 0.5, 2.0, 0.0), 2.0);
        assert!((ev("t*(2+sin(u))*(6+cos(v))", 1.0, PI / 2.0, PI) - 15.0).abs() < 1e-12);
        assert_eq!(ev("32", 0.3, 100.0, -4.0), 32.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-2^2", 0.0, 0.0, 0.0), -4.0);
        assert_eq!(ev("2*3+4", 0.0, 0.0, 0.0), 10.0);
        assert_eq!(ev("2+3*4", 0.0, 0.0, 0.0), 14.0);
        assert_eq!(ev("8/4/2", 0.0, 0.0, 0.0), 1.0);
        assert_eq!(ev("8-4-2", 0.0, 0.0, 0.0), 2.0);
        // same-precedence operators associate to the left, `^` included
        assert_eq!(ev("2^3^2", 0.0, 0.0, 0.0), 64.0);
        assert_eq!(ev("2^-1", 0.0, 0.0, 0.0), 0.5);
        assert_eq!(ev("(1+2)*3", 0.0, 0.0, 0.0), 9.0);
        assert_eq!(ev("--3", 0.0, 0.0, 0.0), 3.0);
        assert_eq!(ev("2*-3", 0.0, 0.0, 0.0), -6.0);
        assert!((ev("pi", 0.0, 0.0, 0.0) - PI).abs() < 1e-15);
        assert_eq!(ev("1.5e2 + .5", 0.0, 0.0, 0.0), 150.5);
    }

    #[test]
    fn domain_errors() {
        let e = |s: &str| Expression::parse(s).unwrap().eval(0.0, -1.0, 0.0).unwrap_err();
        assert_eq!(e("1/t"), EvalError::DivisionByZero);
        assert!(matches!(e("sqrt(u)"), EvalError::NegativeSqrt(_)));
        assert!(matches!(e("t^-1"), EvalError::ZeroToNegativePower(_)));
        assert!(matches!(
            e("u^0.5"),
            EvalError::NegativeBaseFractionalPower { .. }
        ));
        assert_eq!(e("exp(1000)"), EvalError::NonFinite);
        // integer exponents on negative bases are fine
        assert_eq!(ev("u^3", 0.0, -2.0, 0.0), -8.0);
        assert_eq!(ev("u^2.0", 0.0, -2.0, 0.0), 4.0);
    }

    #[test]
    fn variable_sets() {
        assert!(Expression::parse("s").is_err());
        let k = Expression::parse_with("t*(1-s)", VarSet::Ts).unwrap();
        assert_eq!(k.eval_ts(0.25, 0.75), Ok(0.0625));
        assert!(Expression::parse_with("u", VarSet::Ts).is_err());
        let phi = Expression::parse_with("s*(1-s)", VarSet::S).unwrap();
        assert_eq!(phi.eval_univariate(0.5), Ok(0.25));
        assert!(Expression::parse_with("t", VarSet::S).is_err());
    }

    #[test]
    fn canonical_printing() {
        let e = Expression::parse("t*u^2*(1+sin(v)^2)").unwrap();
        assert_eq!(e.to_string(), "t*u^2.0*(1.0 + sin(v)^2.0)");
        let e = Expression::parse("a").unwrap_err();
        assert!(e.to_string().contains("unknown identifier"));
        let e = Expression::parse("(2 - u) - (3 - v)").unwrap();
        assert_eq!(e.to_string(), "2.0 - u - (3.0 - v)");
        let e = Expression::parse("-(u^2)").unwrap();
        assert_eq!(e.to_string(), "-u^2.0");
        let e = Expression::parse("(-u)^2").unwrap();
        assert_eq!(e.to_string(), "(-u)^2.0");
    }
}
