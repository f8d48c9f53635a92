//! First-order jets of vector fields, 1-forms and (1,1)-tensor fields at a
//! point, with the bracket algebra needed for integrability checks.
//!
//! A first-order jet stores values plus first partial derivatives; that is
//! exactly enough for Lie brackets and the Nijenhuis tensor. Jets combine
//! with product rules, so derived fields (compositions, outer products) keep
//! correct derivatives without symbolic work.

use crate::expr::Jet2;
use crate::sample::AffineField;

/// Pointwise 1-jet of a vector field: component values and their first
/// partials, `jac[k][m] = ∂_m X^k`.
#[derive(Debug, Clone)]
pub struct FieldJet {
    pub val: Vec<f64>,
    pub jac: Vec<Vec<f64>>,
}

/// Pointwise 1-jet of a 1-form: `jac[j][m] = ∂_m α_j`.
#[derive(Debug, Clone)]
pub struct FormJet {
    pub val: Vec<f64>,
    pub jac: Vec<Vec<f64>>,
}

/// Pointwise 1-jet of a (1,1)-tensor field: `val[i][j] = F^i_j` (so the
/// matrix acts on column vectors), `jac[i][j][m] = ∂_m F^i_j`.
#[derive(Debug, Clone)]
pub struct EndoJet {
    pub val: Vec<Vec<f64>>,
    pub jac: Vec<Vec<Vec<f64>>>,
}

fn jets_to_pairs(jets: &[Jet2]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let val = jets.iter().map(|j| j.value).collect();
    let jac = jets.iter().map(|j| j.grad.clone()).collect();
    (val, jac)
}

impl FieldJet {
    pub fn from_jets(jets: &[Jet2]) -> Self {
        let (val, jac) = jets_to_pairs(jets);
        FieldJet { val, jac }
    }

    pub fn from_affine(field: &AffineField, x: &[f64]) -> Self {
        FieldJet {
            val: field.value_at(x),
            jac: field.jacobian().clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.val.len()
    }
}

impl FormJet {
    pub fn from_jets(jets: &[Jet2]) -> Self {
        let (val, jac) = jets_to_pairs(jets);
        FormJet { val, jac }
    }

    /// Full exterior derivative as an antisymmetric matrix,
    /// (dα)_ij = ∂_i α_j − ∂_j α_i.
    pub fn exterior_derivative(&self) -> Vec<Vec<f64>> {
        let n = self.val.len();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = self.jac[j][i] - self.jac[i][j];
            }
        }
        d
    }

    /// α(X) using values only.
    pub fn apply(&self, x_vec: &[f64]) -> f64 {
        self.val.iter().zip(x_vec).map(|(a, x)| a * x).sum()
    }

    pub fn negated(&self) -> FormJet {
        FormJet {
            val: self.val.iter().map(|v| -v).collect(),
            jac: self
                .jac
                .iter()
                .map(|row| row.iter().map(|v| -v).collect())
                .collect(),
        }
    }
}

impl EndoJet {
    pub fn from_jets(jets: &[Vec<Jet2>]) -> Self {
        let val = jets
            .iter()
            .map(|row| row.iter().map(|j| j.value).collect())
            .collect();
        let jac = jets
            .iter()
            .map(|row| row.iter().map(|j| j.grad.clone()).collect())
            .collect();
        EndoJet { val, jac }
    }

    pub fn dim(&self) -> usize {
        self.val.len()
    }

    /// Apply to a plain vector, values only.
    pub fn apply_values(&self, x_vec: &[f64]) -> Vec<f64> {
        self.val
            .iter()
            .map(|row| row.iter().zip(x_vec).map(|(f, x)| f * x).sum())
            .collect()
    }

    /// Apply to a field jet with the product rule:
    /// ∂_m (FX)^k = (∂_m F^k_j) X^j + F^k_j ∂_m X^j.
    pub fn apply_jet(&self, x: &FieldJet) -> FieldJet {
        let n = self.dim();
        let mut val = vec![0.0; n];
        let mut jac = vec![vec![0.0; n]; n];
        for k in 0..n {
            for j in 0..n {
                val[k] += self.val[k][j] * x.val[j];
                for m in 0..n {
                    jac[k][m] += self.jac[k][j][m] * x.val[j] + self.val[k][j] * x.jac[j][m];
                }
            }
        }
        FieldJet { val, jac }
    }

    /// Outer product `field ⊗ form`, the (1,1)-tensor (Z ⊗ α)^i_j = Z^i α_j.
    pub fn outer(field: &FieldJet, form: &FormJet) -> EndoJet {
        let n = field.dim();
        let mut val = vec![vec![0.0; n]; n];
        let mut jac = vec![vec![vec![0.0; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                val[i][j] = field.val[i] * form.val[j];
                for m in 0..n {
                    jac[i][j][m] =
                        field.jac[i][m] * form.val[j] + field.val[i] * form.jac[j][m];
                }
            }
        }
        EndoJet { val, jac }
    }

    pub fn add(&self, other: &EndoJet) -> EndoJet {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &EndoJet) -> EndoJet {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &EndoJet, sign: f64) -> EndoJet {
        let n = self.dim();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.val[i][j] += sign * other.val[i][j];
                for m in 0..n {
                    out.jac[i][j][m] += sign * other.jac[i][j][m];
                }
            }
        }
        out
    }
}

/// Lie bracket values at the point: [X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k.
pub fn lie_bracket_values(x: &FieldJet, y: &FieldJet) -> Vec<f64> {
    let n = x.dim();
    let mut out = vec![0.0; n];
    for k in 0..n {
        for i in 0..n {
            out[k] += x.val[i] * y.jac[k][i] - y.val[i] * x.jac[k][i];
        }
    }
    out
}

/// Nijenhuis tensor of a (1,1)-field:
/// N_F(X,Y) = F²[X,Y] + [FX,FY] − F[FX,Y] − F[X,FY].
pub fn nijenhuis(f: &EndoJet, x: &FieldJet, y: &FieldJet) -> Vec<f64> {
    let fx = f.apply_jet(x);
    let fy = f.apply_jet(y);
    let xy = lie_bracket_values(x, y);
    let t1 = f.apply_values(&f.apply_values(&xy));
    let t2 = lie_bracket_values(&fx, &fy);
    let t3 = f.apply_values(&lie_bracket_values(&fx, y));
    let t4 = f.apply_values(&lie_bracket_values(x, &fy));
    (0..x.dim()).map(|k| t1[k] + t2[k] - t3[k] - t4[k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_field(v: &[f64]) -> FieldJet {
        let n = v.len();
        FieldJet {
            val: v.to_vec(),
            jac: vec![vec![0.0; n]; n],
        }
    }

    #[test]
    fn bracket_of_coordinate_fields_vanishes() {
        let x = constant_field(&[1.0, 0.0]);
        let y = constant_field(&[0.0, 1.0]);
        assert_eq!(lie_bracket_values(&x, &y), vec![0.0, 0.0]);
    }

    #[test]
    fn bracket_hand_example() {
        // X = x0·∂_1, Y = ∂_0 on the plane: [X,Y] = −∂_1.
        let x = FieldJet {
            val: vec![0.0, 0.5],
            jac: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        };
        let y = constant_field(&[1.0, 0.0]);
        assert_eq!(lie_bracket_values(&x, &y), vec![0.0, -1.0]);
    }

    #[test]
    fn nijenhuis_of_identity_vanishes() {
        let n = 2;
        let id = EndoJet {
            val: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            jac: vec![vec![vec![0.0; n]; n]; n],
        };
        let x = FieldJet {
            val: vec![0.3, -0.7],
            jac: vec![vec![0.4, 0.1], vec![-0.2, 0.9]],
        };
        let y = FieldJet {
            val: vec![1.1, 0.2],
            jac: vec![vec![0.0, -0.5], vec![0.6, 0.3]],
        };
        let n_val = nijenhuis(&id, &x, &y);
        for v in n_val {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn nijenhuis_antisymmetric() {
        let n = 2;
        let f = EndoJet {
            val: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
            jac: vec![vec![vec![0.1, 0.2]; n]; n],
        };
        let x = FieldJet {
            val: vec![0.3, -0.7],
            jac: vec![vec![0.4, 0.1], vec![-0.2, 0.9]],
        };
        let y = FieldJet {
            val: vec![1.1, 0.2],
            jac: vec![vec![0.0, -0.5], vec![0.6, 0.3]],
        };
        let nxy = nijenhuis(&f, &x, &y);
        let nyx = nijenhuis(&f, &y, &x);
        for k in 0..n {
            assert!((nxy[k] + nyx[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn outer_product_rule() {
        // Z = (x1, 0), α = (0, x0): (Z⊗α)^0_1 = x1·x0, ∂_0 = x1, ∂_1 = x0.
        let z = FieldJet {
            val: vec![2.0, 0.0],
            jac: vec![vec![0.0, 1.0], vec![0.0, 0.0]],
        };
        let a = FormJet {
            val: vec![0.0, 3.0],
            jac: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        };
        let t = EndoJet::outer(&z, &a);
        assert_eq!(t.val[0][1], 6.0);
        assert_eq!(t.jac[0][1][0], 2.0); // x1 at the point (x0=3, x1=2)
        assert_eq!(t.jac[0][1][1], 3.0); // x0
    }
}
