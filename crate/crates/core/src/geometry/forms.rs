//! Pointwise exterior algebra for low-degree forms.
//!
//! A k-form value is stored sparsely on the basis of strictly increasing
//! index tuples with the determinant convention: dx^i ∧ dx^j applied to
//! (X, Y) is X^i Y^j − X^j Y^i. Under that convention the antisymmetric
//! matrix (dα)_ij = ∂_i α_j − ∂_j α_i evaluates on vectors by full
//! contraction, dα(X,Y) = Σ_ij (dα)_ij X^i Y^j.

use std::collections::BTreeMap;

use super::GeomError;
use crate::expr::Jet2;

/// A k-form at a point: coefficients on strictly increasing basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub dim: usize,
    pub degree: usize,
    pub comps: BTreeMap<Vec<u8>, f64>,
}

impl FormValue {
    pub fn constant(dim: usize, value: f64) -> Self {
        let mut comps = BTreeMap::new();
        if value != 0.0 {
            comps.insert(Vec::new(), value);
        }
        FormValue {
            dim,
            degree: 0,
            comps,
        }
    }

    pub fn from_one_form(values: &[f64]) -> Self {
        let mut comps = BTreeMap::new();
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 {
                comps.insert(vec![i as u8], v);
            }
        }
        FormValue {
            dim: values.len(),
            degree: 1,
            comps,
        }
    }

    /// From an antisymmetric matrix M with the determinant convention:
    /// ω = Σ_{i<j} M_ij dx^i∧dx^j.
    pub fn from_antisym_matrix(m: &[Vec<f64>]) -> Self {
        let dim = m.len();
        let mut comps = BTreeMap::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                if m[i][j] != 0.0 {
                    comps.insert(vec![i as u8, j as u8], m[i][j]);
                }
            }
        }
        FormValue {
            dim,
            degree: 2,
            comps,
        }
    }

    pub fn wedge(&self, other: &FormValue) -> FormValue {
        let mut comps: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (idx_a, ca) in &self.comps {
            for (idx_b, cb) in &other.comps {
                if let Some((merged, sign)) = merge_sorted(idx_a, idx_b) {
                    *comps.entry(merged).or_insert(0.0) += sign * ca * cb;
                }
            }
        }
        comps.retain(|_, v| *v != 0.0);
        FormValue {
            dim: self.dim,
            degree: self.degree + other.degree,
            comps,
        }
    }

    pub fn wedge_pow(&self, power: usize) -> FormValue {
        let mut out = FormValue::constant(self.dim, 1.0);
        for _ in 0..power {
            out = out.wedge(self);
        }
        out
    }

    /// Coefficient of the full coordinate volume element dx^0∧...∧dx^{n-1};
    /// only meaningful when degree == dim.
    pub fn top_coefficient(&self) -> f64 {
        let full: Vec<u8> = (0..self.dim as u8).collect();
        self.comps.get(&full).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Concatenate two strictly increasing tuples into one, tracking the sign of
/// the sorting permutation; None when they share an index.
fn merge_sorted(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, f64)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-entries.
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    Some((merged, sign))
}

/// Evaluate the wedge product Π factor_i ^ power_i against the coordinate
/// volume element. Errors unless the total degree equals the chart dimension.
pub fn wedge_power_nonzero(
    factors: &[(FormValue, usize)],
    tol: f64,
) -> Result<(bool, f64), GeomError> {
    let dim = factors
        .first()
        .map(|(f, _)| f.dim)
        .ok_or(GeomError::DegreeMismatch {
            expected: 0,
            got: 0,
        })?;
    let total: usize = factors.iter().map(|(f, p)| f.degree * p).sum();
    if total != dim {
        return Err(GeomError::DegreeMismatch {
            expected: dim,
            got: total,
        });
    }
    let mut product = FormValue::constant(dim, 1.0);
    for (form, power) in factors {
        product = product.wedge(&form.wedge_pow(*power));
    }
    let magnitude = product.top_coefficient();
    Ok((magnitude.abs() > tol, magnitude))
}

/// Interior product of a vector with a 2-form given as an antisymmetric
/// matrix: (i_Z ω)_j = Σ_i Z^i ω_ij.
pub fn interior_product(z: &[f64], omega: &[Vec<f64>]) -> Vec<f64> {
    let n = z.len();
    (0..n)
        .map(|j| (0..n).map(|i| z[i] * omega[i][j]).sum())
        .collect()
}

/// Apply a 2-form matrix to a pair of vectors by full contraction.
pub fn two_form_apply(omega: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += omega[i][j] * x[i] * y[j];
        }
    }
    acc
}

/// Max |component| of d(dα) assembled from the second-order jets of the
/// 1-form components: ∂_i (dα)_jk = ∂_i∂_j α_k − ∂_i∂_k α_j.
pub fn d_of_exterior_derivative(jets: &[Jet2]) -> f64 {
    let n = jets.len();
    let dd = |i: usize, j: usize, k: usize| -> f64 {
        // ∂_i (dα)_{jk}
        jets[k].hess_at(i, j) - jets[j].hess_at(i, k)
    };
    let mut max = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let v = dd(i, j, k) - dd(j, i, k) + dd(k, i, j);
                max = max.max(v.abs());
            }
        }
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_volume_on_r4() {
        let dx: Vec<FormValue> = (0..4)
            .map(|i| {
                let mut v = vec![0.0; 4];
                v[i] = 1.0;
                FormValue::from_one_form(&v)
            })
            .collect();
        let vol = dx[0].wedge(&dx[1]).wedge(&dx[2]).wedge(&dx[3]);
        assert_eq!(vol.top_coefficient(), 1.0);
        // Swapping two factors flips the sign.
        let flipped = dx[1].wedge(&dx[0]).wedge(&dx[2]).wedge(&dx[3]);
        assert_eq!(flipped.top_coefficient(), -1.0);
    }

    #[test]
    fn wedge_with_repeated_factor_vanishes() {
        let a = FormValue::from_one_form(&[1.0, 2.0, 0.0]);
        assert!(a.wedge(&a).comps.is_empty());
    }

    #[test]
    fn square_of_symplectic_two_form_doubles() {
        // ω = dx0∧dx1 + dx2∧dx3 on R⁴ has ω² = 2·volume.
        let mut m = vec![vec![0.0; 4]; 4];
        m[0][1] = 1.0;
        m[1][0] = -1.0;
        m[2][3] = 1.0;
        m[3][2] = -1.0;
        let omega = FormValue::from_antisym_matrix(&m);
        assert_eq!(omega.wedge_pow(2).top_coefficient(), 2.0);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = FormValue::from_one_form(&[1.0, 0.0, 0.0]);
        let err = wedge_power_nonzero(&[(a, 2)], 1e-10).unwrap_err();
        assert!(matches!(err, GeomError::DegreeMismatch { .. }));
    }

    #[test]
    fn interior_product_contracts_first_slot() {
        let mut m = vec![vec![0.0; 3]; 3];
        m[0][1] = 2.0;
        m[1][0] = -2.0;
        let z = [1.0, 0.0, 0.0];
        assert_eq!(interior_product(&z, &m), vec![0.0, 2.0, 0.0]);
        assert_eq!(two_form_apply(&m, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), 2.0);
    }
}
