//! Expression trees for intensional constraints.
//!
//! Expressions are written in prefix form, `le(add(x,3),y)`. Arithmetic is
//! checked 64-bit: overflow and division by zero are evaluation errors.
//! Division truncates toward zero and `mod` takes the sign of the dividend.
//! Comparisons and logical operators yield 0 or 1, and any non-zero operand
//! counts as true.

use std::fmt;

use thiserror::Error;

use crate::model::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Min,
    Max,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Dist,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 2] = [UnaryOp::Neg, UnaryOp::Abs];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 16] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Mod,
        BinaryOp::Min,
        BinaryOp::Max,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Dist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::Div => "div",
            BinaryOp::Mod => "mod",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
            BinaryOp::Eq => "eq",
            BinaryOp::Ne => "ne",
            BinaryOp::Lt => "lt",
            BinaryOp::Le => "le",
            BinaryOp::Gt => "gt",
            BinaryOp::Ge => "ge",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Dist => "dist",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

/// A node of an intensional constraint expression. Variable references are
/// positions in the owning constraint's scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division or modulo by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("reference to scope position {0} with no binding")]
    Unbound(usize),
}

impl Expr {
    pub fn var(pos: usize) -> Self {
        Expr::Var(pos)
    }

    pub fn constant(v: Value) -> Self {
        Expr::Const(v)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Evaluates with `bindings[i]` as the value of scope position `i`.
    pub fn eval(&self, bindings: &[Value]) -> Result<Value, EvalError> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Var(i) => bindings.get(*i).copied().ok_or(EvalError::Unbound(*i)),
            Expr::Unary(op, e) => {
                let v = e.eval(bindings)?;
                match op {
                    UnaryOp::Neg => v.checked_neg().ok_or(EvalError::Overflow),
                    UnaryOp::Abs => v.checked_abs().ok_or(EvalError::Overflow),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(bindings)?;
                let y = b.eval(bindings)?;
                apply_binary(*op, x, y)
            }
        }
    }

    /// Largest scope position referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Unary(_, e) => e.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Renders the canonical prefix form using `names` for scope positions.
    pub fn display_with<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        Prefix { expr: self, names }
    }
}

fn truth(b: bool) -> Value {
    b as Value
}

fn apply_binary(op: BinaryOp, x: Value, y: Value) -> Result<Value, EvalError> {
    use BinaryOp::*;
    let overflow = EvalError::Overflow;
    Ok(match op {
        Add => x.checked_add(y).ok_or(overflow)?,
        Sub => x.checked_sub(y).ok_or(overflow)?,
        Mul => x.checked_mul(y).ok_or(overflow)?,
        Div => {
            if y == 0 {
                return Err(EvalError::DivisionByZero);
            }
            x.checked_div(y).ok_or(overflow)?
        }
        Mod => {
            if y == 0 {
                return Err(EvalError::DivisionByZero);
            }
            x.checked_rem(y).ok_or(overflow)?
        }
        Min => x.min(y),
        Max => x.max(y),
        Eq => truth(x == y),
        Ne => truth(x != y),
        Lt => truth(x < y),
        Le => truth(x <= y),
        Gt => truth(x > y),
        Ge => truth(x >= y),
        And => truth(x != 0 && y != 0),
        Or => truth(x != 0 || y != 0),
        Dist => x.checked_sub(y).and_then(Value::checked_abs).ok_or(overflow)?,
    })
}

struct Prefix<'a, S> {
    expr: &'a Expr,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for Prefix<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| Prefix { expr: e, names: self.names };
        match self.expr {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(i) => match self.names.get(*i) {
                Some(n) => f.write_str(n.as_ref()),
                None => write!(f, "?{i}"),
            },
            Expr::Unary(op, e) => write!(f, "{}({})", op.name(), sub(e)),
            Expr::Binary(op, a, b) => write!(f, "{}({},{})", op.name(), sub(a), sub(b)),
        }
    }
}
