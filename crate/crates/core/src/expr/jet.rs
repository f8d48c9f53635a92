//! Second-order forward-mode evaluation: every node is evaluated to a
//! value together with its gradient and Hessian at the point.

use super::{node_to_string, BinaryOp, EvalError, Node, UnaryOp};

/// Value, gradient and Hessian of a scalar function at a point.
///
/// The Hessian is stored dense row-major (`hess[i * dim + j]`); it is kept
/// exactly symmetric because every combination rule below is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn constant(value: f64, dim: usize) -> Self {
        Jet2 {
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    pub fn variable(index: usize, value: f64, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Jet2 {
            value,
            grad,
            hess: vec![0.0; dim * dim],
        }
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    fn add(&self, other: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + other.value,
            grad: zip(&self.grad, &other.grad, |a, b| a + b),
            hess: zip(&self.hess, &other.hess, |a, b| a + b),
        }
    }

    fn sub(&self, other: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - other.value,
            grad: zip(&self.grad, &other.grad, |a, b| a - b),
            hess: zip(&self.hess, &other.hess, |a, b| a - b),
        }
    }

    fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|a| -a).collect(),
            hess: self.hess.iter().map(|a| -a).collect(),
        }
    }

    fn mul(&self, other: &Jet2) -> Jet2 {
        let n = self.dim();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * other.value
                    + self.grad[i] * other.grad[j]
                    + other.grad[i] * self.grad[j]
                    + self.value * other.hess[i * n + j];
            }
        }
        let grad = (0..n)
            .map(|i| self.grad[i] * other.value + self.value * other.grad[i])
            .collect();
        Jet2 {
            value: self.value * other.value,
            grad,
            hess,
        }
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        Jet2 {
            value: c * self.value,
            grad: self.grad.iter().map(|a| c * a).collect(),
            hess: self.hess.iter().map(|a| c * a).collect(),
        }
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.value`: (f∘u)'' = f''(u) u'⊗u' + f'(u) u''.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet2 {
        let n = self.dim();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] =
                    d2f * self.grad[i] * self.grad[j] + df * self.hess[i * n + j];
            }
        }
        Jet2 {
            value: f,
            grad: self.grad.iter().map(|a| df * a).collect(),
            hess,
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

fn domain(node: &Node, message: impl Into<String>) -> EvalError {
    EvalError::Domain {
        message: message.into(),
        expr: node_to_string(node),
    }
}

/// Powers with integer exponents use repeated multiplication semantics
/// (negative bases allowed); fractional exponents require a positive base.
fn pow_value(node: &Node, base: f64, exponent: f64) -> Result<f64, EvalError> {
    if exponent == 0.0 {
        return Ok(1.0);
    }
    let is_int = exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64;
    if is_int {
        let k = exponent as i32;
        if base == 0.0 && k < 0 {
            return Err(domain(node, "zero raised to a negative power"));
        }
        Ok(base.powi(k))
    } else {
        if base <= 0.0 {
            return Err(domain(
                node,
                format!("fractional power of non-positive base {}", base),
            ));
        }
        Ok(base.powf(exponent))
    }
}

/// Plain value evaluation. This path shares no derivative code with
/// [`eval_jet2`], which makes it a usable finite-difference oracle.
pub fn eval_value(node: &Node, point: &[f64]) -> Result<f64, EvalError> {
    match node {
        Node::Const(c) => Ok(*c),
        Node::Var(i) => Ok(point[*i]),
        Node::Unary(op, a) => {
            let u = eval_value(a, point)?;
            match op {
                UnaryOp::Neg => Ok(-u),
                UnaryOp::Sin => Ok(u.sin()),
                UnaryOp::Cos => Ok(u.cos()),
                UnaryOp::Exp => Ok(u.exp()),
                UnaryOp::Sqrt => {
                    if u <= 0.0 {
                        return Err(domain(node, format!("sqrt of non-positive value {}", u)));
                    }
                    Ok(u.sqrt())
                }
                UnaryOp::Log => {
                    if u <= 0.0 {
                        return Err(domain(node, format!("log of non-positive value {}", u)));
                    }
                    Ok(u.ln())
                }
            }
        }
        Node::Binary(op, a, b) => {
            let x = eval_value(a, point)?;
            let y = eval_value(b, point)?;
            match op {
                BinaryOp::Add => Ok(x + y),
                BinaryOp::Sub => Ok(x - y),
                BinaryOp::Mul => Ok(x * y),
                BinaryOp::Div => {
                    if y == 0.0 {
                        return Err(domain(node, "division by zero"));
                    }
                    Ok(x / y)
                }
            }
        }
        Node::Pow(a, exponent) => {
            let u = eval_value(a, point)?;
            pow_value(node, u, *exponent)
        }
    }
}

pub fn eval_jet2(node: &Node, point: &[f64]) -> Result<Jet2, EvalError> {
    let dim = point.len();
    match node {
        Node::Const(c) => Ok(Jet2::constant(*c, dim)),
        Node::Var(i) => Ok(Jet2::variable(*i, point[*i], dim)),
        Node::Unary(op, a) => {
            let u = eval_jet2(a, point)?;
            let v = u.value;
            match op {
                UnaryOp::Neg => Ok(u.neg()),
                UnaryOp::Sin => Ok(u.chain(v.sin(), v.cos(), -v.sin())),
                UnaryOp::Cos => Ok(u.chain(v.cos(), -v.sin(), -v.cos())),
                UnaryOp::Exp => {
                    let e = v.exp();
                    Ok(u.chain(e, e, e))
                }
                UnaryOp::Sqrt => {
                    if v <= 0.0 {
                        return Err(domain(node, format!("sqrt of non-positive value {}", v)));
                    }
                    let s = v.sqrt();
                    Ok(u.chain(s, 0.5 / s, -0.25 / (s * v)))
                }
                UnaryOp::Log => {
                    if v <= 0.0 {
                        return Err(domain(node, format!("log of non-positive value {}", v)));
                    }
                    Ok(u.chain(v.ln(), 1.0 / v, -1.0 / (v * v)))
                }
            }
        }
        Node::Binary(op, a, b) => {
            let x = eval_jet2(a, point)?;
            let y = eval_jet2(b, point)?;
            match op {
                BinaryOp::Add => Ok(x.add(&y)),
                BinaryOp::Sub => Ok(x.sub(&y)),
                BinaryOp::Mul => Ok(x.mul(&y)),
                BinaryOp::Div => {
                    let v = y.value;
                    if v == 0.0 {
                        return Err(domain(node, "division by zero"));
                    }
                    // 1/v with derivatives -1/v^2 and 2/v^3.
                    let recip = y.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
                    Ok(x.mul(&recip))
                }
            }
        }
        Node::Pow(a, exponent) => {
            let u = eval_jet2(a, point)?;
            let v = u.value;
            let c = *exponent;
            let value = pow_value(node, v, c)?;
            if c == 0.0 {
                return Ok(Jet2::constant(1.0, dim));
            }
            let is_int = c.fract() == 0.0 && c.abs() <= i32::MAX as f64;
            let (df, d2f) = if is_int {
                let k = c as i32;
                // u^(k-1) and u^(k-2) need the same negative-power guard.
                if v == 0.0 && k < 2 {
                    if k == 1 {
                        // d/du u = 1, second derivative 0.
                        (1.0, 0.0)
                    } else {
                        return Err(domain(node, "zero raised to a negative power"));
                    }
                } else {
                    let dfk = if v == 0.0 && k == 2 {
                        0.0
                    } else {
                        c * v.powi(k - 1)
                    };
                    let d2fk = if v == 0.0 {
                        if k == 2 {
                            2.0
                        } else {
                            0.0 // k >= 3 at zero
                        }
                    } else {
                        c * (c - 1.0) * v.powi(k - 2)
                    };
                    (dfk, d2fk)
                }
            } else {
                (c * v.powf(c - 1.0), c * (c - 1.0) * v.powf(c - 2.0))
            };
            Ok(u.chain(value, df, d2f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Expr;

    #[test]
    fn gradient_of_product() {
        let e = Expr::parse("x0*x1", 2).unwrap();
        let j = e.eval_jet2(&[3.0, 5.0]).unwrap();
        assert_eq!(j.value, 15.0);
        assert_eq!(j.grad, vec![5.0, 3.0]);
        // Mixed partial of x0*x1 is 1.
        assert_eq!(j.hess_at(0, 1), 1.0);
        assert_eq!(j.hess_at(1, 0), 1.0);
        assert_eq!(j.hess_at(0, 0), 0.0);
    }

    #[test]
    fn hessian_of_sin_product() {
        // f = sin(x0*x1): f_{00} = -x1^2 sin, f_{01} = cos - x0 x1 sin.
        let e = Expr::parse("sin(x0*x1)", 2).unwrap();
        let (a, b) = (0.7, -0.4);
        let j = e.eval_jet2(&[a, b]).unwrap();
        let s = (a * b).sin();
        let c = (a * b).cos();
        assert!((j.value - s).abs() < 1e-15);
        assert!((j.grad[0] - b * c).abs() < 1e-15);
        assert!((j.grad[1] - a * c).abs() < 1e-15);
        assert!((j.hess_at(0, 0) + b * b * s).abs() < 1e-15);
        assert!((j.hess_at(0, 1) - (c - a * b * s)).abs() < 1e-15);
    }

    #[test]
    fn integer_power_at_negative_base() {
        let e = Expr::parse("x0^3", 1).unwrap();
        let j = e.eval_jet2(&[-2.0]).unwrap();
        assert_eq!(j.value, -8.0);
        assert_eq!(j.grad[0], 12.0);
        assert_eq!(j.hess_at(0, 0), -12.0);
    }

    #[test]
    fn square_at_zero_has_curvature_two() {
        let e = Expr::parse("x0^2", 1).unwrap();
        let j = e.eval_jet2(&[0.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad[0], 0.0);
        assert_eq!(j.hess_at(0, 0), 2.0);
    }

    #[test]
    fn division_chain_second_derivative() {
        // f = 1/x0: f' = -1/x0^2, f'' = 2/x0^3.
        let e = Expr::parse("1/x0", 1).unwrap();
        let j = e.eval_jet2(&[2.0]).unwrap();
        assert!((j.value - 0.5).abs() < 1e-15);
        assert!((j.grad[0] + 0.25).abs() < 1e-15);
        assert!((j.hess_at(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fractional_power_requires_positive_base() {
        let e = Expr::parse("x0^0.5", 1).unwrap();
        assert!(e.eval_jet2(&[-1.0]).is_err());
        let j = e.eval_jet2(&[4.0]).unwrap();
        assert!((j.value - 2.0).abs() < 1e-15);
        assert!((j.grad[0] - 0.25).abs() < 1e-15);
    }
}
