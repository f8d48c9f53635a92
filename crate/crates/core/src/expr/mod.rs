//! Coordinate expressions over a chart of fixed dimension.
//!
//! An [`Expr`] is an abstract syntax tree over the variables `x0..x{dim-1}`,
//! numeric literals, the constants `pi` and `e`, the binary operators
//! `+ - * /`, unary negation, the functions `sin cos exp sqrt log`, and `^`
//! with a literal constant exponent. All angles are radians and `log` is the
//! natural logarithm.
//!
//! Evaluation produces a [`Jet2`]: the value together with the exact gradient
//! and Hessian at the point, propagated through the tree by second-order
//! forward-mode rules. Printing is the structural inverse of parsing:
//! `parse(print(ast)) == ast`.

mod jet;
mod parser;

pub use jet::Jet2;

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{name}` at offset {position}")]
    UnknownSymbol { name: String, position: usize },
    #[error("coordinate x{index} out of range for dimension {dim} (offset {position})")]
    IndexOutOfRange {
        index: usize,
        dim: usize,
        position: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error ({message}) in `{expr}`")]
    Domain { message: String, expr: String },
    #[error("point has dimension {got}, expression expects {expected}")]
    PointDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    /// Power with a literal constant exponent; general `f^g` is rejected at
    /// parse time.
    Pow(Box<Node>, f64),
}

/// Expression tree bound to a chart dimension. Every variable index is
/// checked against `dim` at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    dim: usize,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str, dim: usize) -> Result<Expr, ParseError> {
        parser::parse(src, dim).map(|root| Expr { dim, root })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn constant(dim: usize, v: f64) -> Expr {
        Expr {
            dim,
            root: Node::Const(v),
        }
    }

    pub fn coord(dim: usize, index: usize) -> Expr {
        assert!(index < dim, "coordinate index out of range");
        Expr {
            dim,
            root: Node::Var(index),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.root, Node::Const(c) if c == 0.0)
    }

    fn unary(self, op: UnaryOp) -> Expr {
        Expr {
            dim: self.dim,
            root: Node::Unary(op, Box::new(self.root)),
        }
    }

    fn binary(self, op: BinaryOp, rhs: Expr) -> Expr {
        assert_eq!(self.dim, rhs.dim, "operand dimensions differ");
        Expr {
            dim: self.dim,
            root: Node::Binary(op, Box::new(self.root), Box::new(rhs.root)),
        }
    }

    pub fn neg(self) -> Expr {
        // Negation of a literal folds so that printing stays invertible:
        // `-2` parses to the literal -2, never to Neg(2).
        if let Node::Const(c) = self.root {
            return Expr::constant(self.dim, -c);
        }
        self.unary(UnaryOp::Neg)
    }

    pub fn sin(self) -> Expr {
        self.unary(UnaryOp::Sin)
    }

    pub fn cos(self) -> Expr {
        self.unary(UnaryOp::Cos)
    }

    pub fn exp(self) -> Expr {
        self.unary(UnaryOp::Exp)
    }

    pub fn sqrt(self) -> Expr {
        self.unary(UnaryOp::Sqrt)
    }

    pub fn log(self) -> Expr {
        self.unary(UnaryOp::Log)
    }

    pub fn add(self, rhs: Expr) -> Expr {
        self.binary(BinaryOp::Add, rhs)
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        self.binary(BinaryOp::Sub, rhs)
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        self.binary(BinaryOp::Mul, rhs)
    }

    pub fn div(self, rhs: Expr) -> Expr {
        self.binary(BinaryOp::Div, rhs)
    }

    pub fn powf(self, exponent: f64) -> Expr {
        Expr {
            dim: self.dim,
            root: Node::Pow(Box::new(self.root), exponent),
        }
    }

    /// Value-only evaluation. Shares no derivative code with [`Self::eval_jet2`],
    /// which makes it usable as the basis of finite-difference checks.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.dim {
            return Err(EvalError::PointDimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        jet::eval_value(&self.root, x)
    }

    /// Value, gradient and Hessian at `x` by forward-mode propagation.
    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2, EvalError> {
        if x.len() != self.dim {
            return Err(EvalError::PointDimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        jet::eval_jet2(&self.root, x)
    }
}

// Precedence levels used by the printer. Parentheses are inserted exactly
// where reparsing would otherwise reassociate, so `parse . print` is the
// identity on trees.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn node_prec(node: &Node) -> u8 {
    match node {
        Node::Const(c) => {
            if c.is_sign_negative() {
                // Prints with a leading minus, so it binds like a negation.
                PREC_NEG
            } else {
                PREC_ATOM
            }
        }
        Node::Var(_) => PREC_ATOM,
        Node::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Node::Unary(..) => PREC_ATOM,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_MUL,
        Node::Pow(..) => PREC_POW,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, min_prec: u8) -> fmt::Result {
    if node_prec(node) < min_prec {
        write!(f, "(")?;
        write_node(f, node, 0)?;
        return write!(f, ")");
    }
    match node {
        Node::Const(c) => write!(f, "{}", c),
        Node::Var(i) => write!(f, "x{}", i),
        Node::Unary(UnaryOp::Neg, c) => {
            write!(f, "-")?;
            write_node(f, c, PREC_POW)
        }
        Node::Unary(op, c) => {
            let name = match op {
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::Exp => "exp",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Log => "log",
                UnaryOp::Neg => unreachable!(),
            };
            write!(f, "{}(", name)?;
            write_node(f, c, 0)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let (sym, prec) = match op {
                BinaryOp::Add => ("+", PREC_ADD),
                BinaryOp::Sub => ("-", PREC_ADD),
                BinaryOp::Mul => ("*", PREC_MUL),
                BinaryOp::Div => ("/", PREC_MUL),
            };
            write_node(f, a, prec)?;
            write!(f, "{}", sym)?;
            // Left-associative: the right operand needs strictly higher
            // precedence or parentheses.
            write_node(f, b, prec + 1)
        }
        Node::Pow(base, e) => {
            write_node(f, base, PREC_POW)?;
            write!(f, "^{}", e)
        }
    }
}

pub(crate) fn node_to_string(node: &Node) -> String {
    struct W<'a>(&'a Node);
    impl fmt::Display for W<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_node(f, self.0, 0)
        }
    }
    W(node).to_string()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, dim: usize) -> Expr {
        Expr::parse(src, dim).expect(src)
    }

    #[test]
    fn parses_precedence() {
        // pow > neg > mul > add, and `-x0^2` negates the square
        let e = p("-x0^2+3*x1", 2);
        let v = e.eval(&[2.0, 1.0]).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn pow_binds_tighter_than_neg() {
        let e = p("-2^2", 1);
        assert_eq!(e.eval(&[0.0]).unwrap(), -4.0);
    }

    #[test]
    fn constants_pi_and_e() {
        let e = p("pi", 1);
        assert_eq!(e.eval(&[0.0]).unwrap(), std::f64::consts::PI);
        let e = p("e", 1);
        assert_eq!(e.eval(&[0.0]).unwrap(), std::f64::consts::E);
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(p("1.5e2", 1).eval(&[0.0]).unwrap(), 150.0);
        assert_eq!(p("2e-3", 1).eval(&[0.0]).unwrap(), 0.002);
        // A bare trailing `e` is the Euler constant, not an exponent marker.
        assert_eq!(p("2*e", 1).eval(&[0.0]).unwrap(), 2.0 * std::f64::consts::E);
    }

    #[test]
    fn rejects_unknown_symbol() {
        match Expr::parse("foo(x0)", 1) {
            Err(ParseError::UnknownSymbol { name, .. }) => assert_eq!(name, "foo"),
            other => panic!("expected UnknownSymbol, got {:?}", other),
        }
    }

    #[test]
    fn rejects_out_of_range_coordinate() {
        match Expr::parse("x4", 3) {
            Err(ParseError::IndexOutOfRange { index, dim, .. }) => {
                assert_eq!((index, dim), (4, 3));
            }
            other => panic!("expected IndexOutOfRange, got {:?}", other),
        }
    }

    #[test]
    fn rejects_nonconstant_exponent() {
        assert!(matches!(
            Expr::parse("x0^x1", 2),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            Expr::parse("2^sin(x0)", 1),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_reports_position() {
        match Expr::parse("1+*2", 1) {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected Syntax, got {:?}", other),
        }
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        let e = p("1/x0", 1);
        match e.eval(&[0.0]) {
            Err(EvalError::Domain { expr, .. }) => assert_eq!(expr, "1/x0"),
            other => panic!("expected Domain, got {:?}", other),
        }
    }

    #[test]
    fn log_and_sqrt_domain_errors() {
        assert!(matches!(
            p("log(x0)", 1).eval(&[-1.0]),
            Err(EvalError::Domain { .. })
        ));
        assert!(matches!(
            p("sqrt(x0)", 1).eval(&[-4.0]),
            Err(EvalError::Domain { .. })
        ));
    }

    #[test]
    fn fractional_power_of_negative_base_is_domain_error() {
        assert!(matches!(
            p("x0^0.5", 1).eval(&[-1.0]),
            Err(EvalError::Domain { .. })
        ));
        // Integer exponents of negative bases are fine.
        assert_eq!(p("x0^3", 1).eval(&[-2.0]).unwrap(), -8.0);
    }

    #[test]
    fn print_round_trips_structurally() {
        for src in [
            "x0+x1*x2",
            "(x0+x1)*x2",
            "-x0^2",
            "(-x0)^2",
            "x0-(x1-x2)",
            "x0/x1/x2",
            "x0/(x1/x2)",
            "sin(cos(x0))+exp(-x1)",
            "2^-2",
            "x0^2^3",
            "1e-10*x0",
        ] {
            let e = p(src, 3);
            let printed = e.to_string();
            let again = p(&printed, 3);
            assert_eq!(e, again, "{} -> {}", src, printed);
        }
    }

    #[test]
    fn builders_match_parser() {
        let built = Expr::coord(2, 0)
            .sin()
            .mul(Expr::coord(2, 1))
            .add(Expr::constant(2, 2.0));
        let parsed = p("sin(x0)*x1+2", 2);
        assert_eq!(built, parsed);
    }

    #[test]
    fn builder_neg_folds_literals() {
        assert_eq!(Expr::constant(1, 2.0).neg(), p("-2", 1));
    }
}
