//! Charted manifolds and the curvature engine.
//!
//! A manifold is one coordinate chart: a metric given as a symmetric matrix
//! of expressions, a sampling box that avoids chart degeneracies, and named
//! vector fields / 1-forms / (1,1)-tensor fields. All geometry is pointwise;
//! derivatives come from second-order jets of the expressions.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::fields::{EndoJet, FieldJet, FormJet};
use super::GeomError;
use crate::expr::{Expr, Jet2};

/// One chart with a metric and named tensor fields.
#[derive(Debug, Clone)]
pub struct ChartedManifold {
    pub name: String,
    pub dim: usize,
    pub coord_names: Vec<String>,
    /// Symmetric n×n matrix of metric component expressions.
    pub metric: Vec<Vec<Expr>>,
    /// Closed sampling intervals per coordinate.
    pub sample_box: Vec<(f64, f64)>,
    pub vector_fields: BTreeMap<String, Vec<Expr>>,
    pub one_forms: BTreeMap<String, Vec<Expr>>,
    /// Component layout: endo[name][i][j] = F^i_j, so the matrix of values
    /// acts on column vectors of components.
    pub endomorphisms: BTreeMap<String, Vec<Vec<Expr>>>,
}

/// Pointwise curvature data. All arrays are dense row-major flat vectors.
///
/// Index conventions, fixed once:
/// * curvature operator  R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z;
/// * `riemann_ud[l][i][j][k]` = R^l_ijk = component l of R(∂_j,∂_k)∂_i;
/// * `riemann_dddd[i][j][k][l]` = g(R(∂_i,∂_j)∂_k, ∂_l);
/// * `ricci[i][j]` = Ric(∂_i,∂_j) = Σ_ab g^{ab}·g(R(∂_a,∂_i)∂_j, ∂_b),
///   which equals the contraction R^k_ikj of `riemann_ud`;
/// * `q_operator[i][j]` = Q^i_j with Ric(X,Y) = g(QX,Y).
///
/// With these choices the round unit sphere has positive sectional and
/// positive Ricci curvature.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// gamma[(k·n + i)·n + j] = Γ^k_ij.
    pub gamma: Vec<f64>,
    pub riemann_ud: Vec<f64>,
    pub riemann_dddd: Vec<f64>,
    pub ricci: Vec<f64>,
    pub q_operator: Vec<f64>,
    pub scal: f64,
}

impl ChartedManifold {
    /// Structural checks: shapes consistent, metric expressions symmetric.
    pub fn validate(&self) -> Result<(), GeomError> {
        let n = self.dim;
        if n == 0 {
            return Err(GeomError::Invalid("dimension must be positive".into()));
        }
        let check_len = |got: usize, what: &str| -> Result<(), GeomError> {
            if got != n {
                return Err(GeomError::Invalid(format!(
                    "{} has {} entries, expected {}",
                    what, got, n
                )));
            }
            Ok(())
        };
        check_len(self.coord_names.len(), "coord_names")?;
        check_len(self.sample_box.len(), "sample_box")?;
        check_len(self.metric.len(), "metric row count")?;
        for row in &self.metric {
            check_len(row.len(), "metric column count")?;
        }
        for i in 0..n {
            for j in 0..n {
                if self.metric[i][j].to_string() != self.metric[j][i].to_string() {
                    return Err(GeomError::Invalid(format!(
                        "metric entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        for (lo, hi) in &self.sample_box {
            if !(lo < hi) {
                return Err(GeomError::Invalid(format!(
                    "sample box interval [{lo}, {hi}] is empty"
                )));
            }
        }
        for (name, comps) in &self.vector_fields {
            check_len(comps.len(), &format!("vector field `{name}`"))?;
        }
        for (name, comps) in &self.one_forms {
            check_len(comps.len(), &format!("1-form `{name}`"))?;
        }
        for (name, rows) in &self.endomorphisms {
            check_len(rows.len(), &format!("endomorphism `{name}` rows"))?;
            for row in rows {
                check_len(row.len(), &format!("endomorphism `{name}` columns"))?;
            }
        }
        Ok(())
    }

    fn missing(&self, kind: &'static str, name: &str) -> GeomError {
        GeomError::UnknownField {
            kind,
            name: name.to_string(),
            manifold: self.name.clone(),
        }
    }

    pub fn vector_field_exprs(&self, name: &str) -> Result<&Vec<Expr>, GeomError> {
        self.vector_fields
            .get(name)
            .ok_or_else(|| self.missing("vector field", name))
    }

    pub fn one_form_exprs(&self, name: &str) -> Result<&Vec<Expr>, GeomError> {
        self.one_forms
            .get(name)
            .ok_or_else(|| self.missing("1-form", name))
    }

    pub fn endomorphism_exprs(&self, name: &str) -> Result<&Vec<Vec<Expr>>, GeomError> {
        self.endomorphisms
            .get(name)
            .ok_or_else(|| self.missing("endomorphism", name))
    }

    fn component_jets(exprs: &[Expr], x: &[f64]) -> Result<Vec<Jet2>, GeomError> {
        exprs
            .iter()
            .map(|e| e.eval_jet2(x).map_err(GeomError::from))
            .collect()
    }

    /// 1-jet of a named vector field at a point.
    pub fn vector_field_jet(&self, name: &str, x: &[f64]) -> Result<FieldJet, GeomError> {
        let jets = Self::component_jets(self.vector_field_exprs(name)?, x)?;
        Ok(FieldJet::from_jets(&jets))
    }

    /// 1-jet of a named 1-form at a point.
    pub fn one_form_jet(&self, name: &str, x: &[f64]) -> Result<FormJet, GeomError> {
        let jets = Self::component_jets(self.one_form_exprs(name)?, x)?;
        Ok(FormJet::from_jets(&jets))
    }

    /// 1-jet of a named (1,1)-field at a point.
    pub fn endo_jet(&self, name: &str, x: &[f64]) -> Result<EndoJet, GeomError> {
        let rows = self.endomorphism_exprs(name)?;
        let jets: Result<Vec<Vec<Jet2>>, GeomError> = rows
            .iter()
            .map(|row| Self::component_jets(row, x))
            .collect();
        Ok(EndoJet::from_jets(&jets?))
    }

    /// Second-order jets of every named 1-form component (for d∘d checks).
    pub fn one_form_jets2(&self, name: &str, x: &[f64]) -> Result<Vec<Jet2>, GeomError> {
        Self::component_jets(self.one_form_exprs(name)?, x)
    }

    /// Metric and inverse at a point, with the positive-definiteness check.
    pub fn metric_at(&self, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>), GeomError> {
        let n = self.dim;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.metric[i][j].eval(x)?;
            }
        }
        check_spd(&g, x)?;
        let g_inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::Invalid("metric is numerically singular".into()))?;
        Ok((g, g_inv))
    }

    /// Metric, inverse, and Christoffel symbols Γ^k_ij (flat, k-major).
    pub fn connection_at(
        &self,
        x: &[f64],
    ) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>), GeomError> {
        let jets = self.metric_jets(x)?;
        let (g, g_inv) = evaluate_metric(&jets, self.dim, x)?;
        let gamma = christoffel(&jets, &g_inv, self.dim);
        Ok((g, g_inv, gamma))
    }

    fn metric_jets(&self, x: &[f64]) -> Result<Vec<Jet2>, GeomError> {
        let n = self.dim;
        let mut jets = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                jets.push(self.metric[i][j].eval_jet2(x)?);
            }
        }
        Ok(jets)
    }

    /// The full curvature bundle at a point.
    pub fn curvature_at(&self, x: &[f64]) -> Result<CurvatureBundle, GeomError> {
        let n = self.dim;
        let jets = self.metric_jets(x)?;
        let (g, g_inv) = evaluate_metric(&jets, n, x)?;
        let gamma = christoffel(&jets, &g_inv, n);

        // ∂_m g^{kl} = −g^{ka} (∂_m g_ab) g^{bl}, needed for ∂Γ.
        let mut dginv = Vec::with_capacity(n);
        for m in 0..n {
            let mut dg_m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    dg_m[(i, j)] = jets[i * n + j].grad[m];
                }
            }
            dginv.push(-(&g_inv * dg_m * &g_inv));
        }

        // dgamma[((m·n + k)·n + i)·n + j] = ∂_m Γ^k_ij.
        let mut dgamma = vec![0.0; n * n * n * n];
        for m in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for l in 0..n {
                            let first =
                                jets[j * n + l].grad[i] + jets[i * n + l].grad[j]
                                    - jets[i * n + j].grad[l];
                            let second = jets[j * n + l].hess_at(m, i)
                                + jets[i * n + l].hess_at(m, j)
                                - jets[i * n + j].hess_at(m, l);
                            acc += dginv[m][(k, l)] * first + g_inv[(k, l)] * second;
                        }
                        dgamma[((m * n + k) * n + i) * n + j] = 0.5 * acc;
                    }
                }
            }
        }

        let gm = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
        let dgm = |m: usize, k: usize, i: usize, j: usize| dgamma[((m * n + k) * n + i) * n + j];

        // Operator components: rop[d][a][b][c] = component d of R(∂_a,∂_b)∂_c.
        let idx4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let mut rop = vec![0.0; n * n * n * n];
        for d in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut acc = dgm(a, d, b, c) - dgm(b, d, a, c);
                        for m in 0..n {
                            acc += gm(d, a, m) * gm(m, b, c) - gm(d, b, m) * gm(m, a, c);
                        }
                        rop[idx4(d, a, b, c)] = acc;
                    }
                }
            }
        }

        // riemann_ud[l][i][j][k] = R^l_ijk = [R(∂_j,∂_k)∂_i]^l.
        let mut riemann_ud = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        riemann_ud[idx4(l, i, j, k)] = rop[idx4(l, j, k, i)];
                    }
                }
            }
        }

        // riemann_dddd[i][j][k][l] = g(R(∂_i,∂_j)∂_k, ∂_l).
        let mut riemann_dddd = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = 0.0;
                        for m in 0..n {
                            acc += g[(l, m)] * rop[idx4(m, i, j, k)];
                        }
                        riemann_dddd[idx4(i, j, k, l)] = acc;
                    }
                }
            }
        }

        // Ricci through the fully covariant tensor (independent of the
        // R^k_ikj contraction, which stays available as a cross-check):
        // Ric(X,Y) = Σ_ab g^{ab} g(R(∂_a, X)Y, ∂_b).
        let mut ricci = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += g_inv[(a, b)] * riemann_dddd[idx4(a, i, j, b)];
                    }
                }
                ricci[i * n + j] = acc;
            }
        }

        let mut q_operator = vec![0.0; n * n];
        let mut scal = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += g_inv[(i, k)] * ricci[k * n + j];
                }
                q_operator[i * n + j] = acc;
            }
            scal += q_operator[i * n + i];
        }

        Ok(CurvatureBundle {
            point: x.to_vec(),
            dim: n,
            g,
            g_inv,
            gamma,
            riemann_ud,
            riemann_dddd,
            ricci,
            q_operator,
            scal,
        })
    }

    /// (∇_X Z)^k = X^i (∂_i Z^k + Γ^k_ij Z^j) for a named field Z.
    pub fn covariant_derivative_vector(
        &self,
        field: &str,
        x_dir: &[f64],
        x: &[f64],
    ) -> Result<Vec<f64>, GeomError> {
        let jet = self.vector_field_jet(field, x)?;
        let (_, _, gamma) = self.connection_at(x)?;
        Ok(covariant_derivative_from_jet(&jet, &gamma, x_dir, self.dim))
    }

    /// (∇_X F)^k_j = X^m (∂_m F^k_j + Γ^k_ml F^l_j − Γ^l_mj F^k_l) for a
    /// named (1,1)-field F.
    pub fn covariant_derivative_endo(
        &self,
        field: &str,
        x_dir: &[f64],
        x: &[f64],
    ) -> Result<Vec<Vec<f64>>, GeomError> {
        let jet = self.endo_jet(field, x)?;
        let (_, _, gamma) = self.connection_at(x)?;
        Ok(covariant_derivative_endo_from_jet(
            &jet, &gamma, x_dir, self.dim,
        ))
    }

    /// Full-convention exterior derivative of a named 1-form,
    /// (dα)_ij = ∂_i α_j − ∂_j α_i, as an antisymmetric matrix.
    pub fn exterior_derivative_1form(
        &self,
        form: &str,
        x: &[f64],
    ) -> Result<Vec<Vec<f64>>, GeomError> {
        Ok(self.one_form_jet(form, x)?.exterior_derivative())
    }

    /// Lie bracket of two named fields at a point.
    pub fn lie_bracket(&self, x_name: &str, y_name: &str, x: &[f64]) -> Result<Vec<f64>, GeomError> {
        let xj = self.vector_field_jet(x_name, x)?;
        let yj = self.vector_field_jet(y_name, x)?;
        Ok(super::fields::lie_bracket_values(&xj, &yj))
    }

    /// Nijenhuis tensor of a named (1,1)-field on two named vector fields.
    pub fn nijenhuis(
        &self,
        endo: &str,
        x_name: &str,
        y_name: &str,
        x: &[f64],
    ) -> Result<Vec<f64>, GeomError> {
        let f = self.endo_jet(endo, x)?;
        let xj = self.vector_field_jet(x_name, x)?;
        let yj = self.vector_field_jet(y_name, x)?;
        Ok(super::fields::nijenhuis(&f, &xj, &yj))
    }

    /// The conformally rescaled manifold with metric e^{2f}·g. Named fields
    /// are carried over unchanged.
    pub fn conformally_rescaled(&self, f: &Expr) -> ChartedManifold {
        let factor = Expr::constant(self.dim, 2.0).mul(f.clone()).exp();
        let mut out = self.clone();
        out.name = format!("{}~conformal", self.name);
        for row in &mut out.metric {
            for entry in row.iter_mut() {
                *entry = factor.clone().mul(entry.clone());
            }
        }
        out
    }
}

/// Leading-principal-minor positive definiteness check (tolerance 1e-12).
fn check_spd(g: &DMatrix<f64>, x: &[f64]) -> Result<(), GeomError> {
    let n = g.nrows();
    for k in 1..=n {
        let minor = g.view((0, 0), (k, k)).into_owned().determinant();
        if minor <= 1e-12 {
            return Err(GeomError::NotSpd {
                point: x.to_vec(),
                minor_index: k,
                minor_value: minor,
            });
        }
    }
    Ok(())
}

fn evaluate_metric(
    jets: &[Jet2],
    n: usize,
    x: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>), GeomError> {
    let g = DMatrix::from_fn(n, n, |i, j| jets[i * n + j].value);
    check_spd(&g, x)?;
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::Invalid("metric is numerically singular".into()))?;
    Ok((g, g_inv))
}

/// Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij).
fn christoffel(jets: &[Jet2], g_inv: &DMatrix<f64>, n: usize) -> Vec<f64> {
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += g_inv[(k, l)]
                        * (jets[j * n + l].grad[i] + jets[i * n + l].grad[j]
                            - jets[i * n + j].grad[l]);
                }
                gamma[(k * n + i) * n + j] = 0.5 * acc;
            }
        }
    }
    gamma
}

/// Covariant derivative of a vector field given its 1-jet.
pub(crate) fn covariant_derivative_from_jet(
    field: &FieldJet,
    gamma: &[f64],
    x_dir: &[f64],
    n: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for k in 0..n {
        for i in 0..n {
            let mut partial = field.jac[k][i];
            for j in 0..n {
                partial += gamma[(k * n + i) * n + j] * field.val[j];
            }
            out[k] += x_dir[i] * partial;
        }
    }
    out
}

/// Covariant derivative of a (1,1)-field given its 1-jet.
pub(crate) fn covariant_derivative_endo_from_jet(
    field: &EndoJet,
    gamma: &[f64],
    x_dir: &[f64],
    n: usize,
) -> Vec<Vec<f64>> {
    let gm = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
    let mut out = vec![vec![0.0; n]; n];
    for k in 0..n {
        for j in 0..n {
            for m in 0..n {
                let mut term = field.jac[k][j][m];
                for l in 0..n {
                    term += gm(k, m, l) * field.val[l][j] - gm(l, m, j) * field.val[k][l];
                }
                out[k][j] += x_dir[m] * term;
            }
        }
    }
    out
}

impl CurvatureBundle {
    fn idx4(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    pub fn gamma_at(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    pub fn ud(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.riemann_ud[self.idx4(l, i, j, k)]
    }

    pub fn dddd(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.riemann_dddd[self.idx4(i, j, k, l)]
    }

    pub fn ricci_at(&self, i: usize, j: usize) -> f64 {
        self.ricci[i * self.dim + j]
    }

    /// The curvature operator on vectors: R(X,Y)Z, componentwise.
    pub fn r_apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for l in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        acc += self.ud(l, i, j, k) * z[i] * x[j] * y[k];
                    }
                }
            }
            out[l] = acc;
        }
        out
    }

    /// Fully covariant curvature on four vectors: g(R(X,Y)Z, W).
    pub fn r4(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.dddd(i, j, k, l) * x[i] * y[j] * z[k] * w[l];
                    }
                }
            }
        }
        acc
    }

    /// Ricci curvature on two vectors.
    pub fn ricci_apply(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.ricci_at(i, j) * x[i] * y[j];
            }
        }
        acc
    }

    pub fn metric_apply(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g[(i, j)] * x[i] * y[j];
            }
        }
        acc
    }
}

/// Sectional curvature of the plane spanned by X and Y:
/// k = R(X,Y,Y,X) / (g(X,X)g(Y,Y) − g(X,Y)²).
pub fn sectional(
    bundle: &CurvatureBundle,
    x: &[f64],
    y: &[f64],
) -> Result<f64, GeomError> {
    let gxx = bundle.metric_apply(x, x);
    let gyy = bundle.metric_apply(y, y);
    let gxy = bundle.metric_apply(x, y);
    let gram = gxx * gyy - gxy * gxy;
    if gram <= 1e-10 {
        return Err(GeomError::DegeneratePlane { gram });
    }
    Ok(bundle.r4(x, y, y, x) / gram)
}

/// Metric Gram–Schmidt on the coordinate basis, fixed coordinate order.
/// Returns n vectors with g(e_a, e_b) = δ_ab.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = g.nrows();
    let inner = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        for e in &frame {
            let c = inner(e, &v);
            v -= e * c;
        }
        let norm = inner(&v, &v).sqrt();
        frame.push(v / norm);
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn euclidean(n: usize) -> ChartedManifold {
        let metric = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Expr::constant(n, if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        ChartedManifold {
            name: "euclid".into(),
            dim: n,
            coord_names: (0..n).map(|i| format!("x{i}")).collect(),
            metric,
            sample_box: vec![(-1.0, 1.0); n],
            vector_fields: BTreeMap::new(),
            one_forms: BTreeMap::new(),
            endomorphisms: BTreeMap::new(),
        }
    }

    fn sphere2() -> ChartedManifold {
        // Round unit 2-sphere, chart (θ, φ), g = diag(1, sin²θ).
        let n = 2;
        let zero = Expr::constant(n, 0.0);
        let one = Expr::constant(n, 1.0);
        let sin2 = Expr::coord(n, 0).sin().powf(2.0);
        ChartedManifold {
            name: "sphere2".into(),
            dim: n,
            coord_names: vec!["theta".into(), "phi".into()],
            metric: vec![vec![one, zero.clone()], vec![zero, sin2]],
            sample_box: vec![(0.3, 2.8), (0.1, 6.0)],
            vector_fields: BTreeMap::new(),
            one_forms: BTreeMap::new(),
            endomorphisms: BTreeMap::new(),
        }
    }

    #[test]
    fn euclidean_metric_and_curvature_are_trivial() {
        let m = euclidean(4);
        let (g, ginv) = m.metric_at(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(g, DMatrix::identity(4, 4));
        assert_eq!(ginv, DMatrix::identity(4, 4));
        let b = m.curvature_at(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(b.riemann_dddd.iter().all(|v| v.abs() < 1e-14));
        assert!(b.scal.abs() < 1e-14);
    }

    #[test]
    fn sphere_scalar_curvature_is_two() {
        let m = sphere2();
        for point in [[0.7, 1.0], [1.4, 2.0], [2.2, 5.5]] {
            let b = m.curvature_at(&point).unwrap();
            assert!(
                (b.scal - 2.0).abs() < 1e-9,
                "scal = {} at {:?}",
                b.scal,
                point
            );
        }
    }

    #[test]
    fn sphere_sectional_curvature_is_positive_one() {
        let m = sphere2();
        let b = m.curvature_at(&[1.1, 0.4]).unwrap();
        let k = sectional(&b, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-9, "k = {k}");
    }

    #[test]
    fn sphere_ricci_is_positive_and_matches_ud_contraction() {
        let m = sphere2();
        let b = m.curvature_at(&[0.9, 3.0]).unwrap();
        // Ric = (n−1)·g = g on the unit 2-sphere.
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.ricci_at(i, j) - b.g[(i, j)]).abs() < 1e-9);
                let contraction: f64 = (0..2).map(|k| b.ud(k, i, k, j)).sum();
                assert!((b.ricci_at(i, j) - contraction).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sectional_is_invariant_under_plane_basis_change() {
        let m = sphere2();
        let b = m.curvature_at(&[1.3, 2.2]).unwrap();
        let x = [1.0, 0.4];
        let y = [-0.3, 1.0];
        let k1 = sectional(&b, &x, &y).unwrap();
        let x2 = [2.0 * x[0], 2.0 * x[1]];
        let y2 = [x[0] + y[0], x[1] + y[1]];
        let k2 = sectional(&b, &x2, &y2).unwrap();
        assert!((k1 - k2).abs() < 1e-10);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = euclidean(3);
        let b = m.curvature_at(&[0.0, 0.0, 0.0]).unwrap();
        let err = sectional(&b, &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeomError::DegeneratePlane { .. }));
    }

    #[test]
    fn spd_failure_reports_offending_minor() {
        let n = 2;
        let mut m = euclidean(n);
        m.metric[1][1] = Expr::constant(n, -1.0);
        let err = m.metric_at(&[0.0, 0.0]).unwrap_err();
        match err {
            GeomError::NotSpd { minor_index, .. } => assert_eq!(minor_index, 2),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn orthonormal_frame_is_orthonormal() {
        let m = sphere2();
        let (g, _) = m.metric_at(&[0.8, 0.5]).unwrap();
        let frame = orthonormal_frame(&g);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 1.0 } else { 0.0 };
                let got = (frame[a].transpose() * &g * &frame[b])[(0, 0)];
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_field_on_euclidean_chart_is_parallel() {
        let mut m = euclidean(3);
        m.vector_fields.insert(
            "c".into(),
            vec![
                Expr::constant(3, 1.0),
                Expr::constant(3, -2.0),
                Expr::constant(3, 0.5),
            ],
        );
        let d = m
            .covariant_derivative_vector("c", &[0.3, 0.4, -0.1], &[0.0, 0.0, 0.0])
            .unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn unknown_field_is_reported() {
        let m = euclidean(2);
        let err = m
            .covariant_derivative_vector("nope", &[1.0, 0.0], &[0.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, GeomError::UnknownField { .. }));
    }

    #[test]
    fn exterior_derivative_of_x0_dx1() {
        // α = x0·dx1 on the plane: dα = dx0∧dx1, component (0,1) = +1.
        let mut m = euclidean(2);
        m.one_forms
            .insert("a".into(), vec![Expr::constant(2, 0.0), Expr::coord(2, 0)]);
        let d = m.exterior_derivative_1form("a", &[0.7, -0.3]).unwrap();
        assert_eq!(d[0][1], 1.0);
        assert_eq!(d[1][0], -1.0);
    }

    #[test]
    fn conformal_rescale_multiplies_metric() {
        let m = euclidean(2);
        let f = Expr::coord(2, 0);
        let scaled = m.conformally_rescaled(&f);
        let (g, _) = scaled.metric_at(&[0.5, 0.0]).unwrap();
        let want = (2.0f64 * 0.5).exp();
        assert!((g[(0, 0)] - want).abs() < 1e-12);
        assert!(g[(0, 1)].abs() < 1e-15);
    }
}
