//! Built-in example manifolds — flat charts, round spheres, a standard
//! contact 3-sphere, and three contact-pair products — plus the
//! Hermitian-pair construction that composes two anticommuting almost
//! contact structures into a contact-pair endomorphism.

use std::collections::BTreeMap;

use crate::contact::ContactPairStructure;
use crate::expr::Expr;
use crate::geometry::{ChartedManifold, GeomError};
use crate::report::{AuditEntry, AuditReport, Provenance};
use crate::sample::Sampler;
use crate::tensors::Subject;

/// A named numeric outcome an example is known to produce, with the kind of
/// evidence behind it: `theory` for structural identities, `known` for
/// textbook values, `oracle` for independently recomputed numbers.
#[derive(Debug, Clone)]
pub struct Expectation {
    pub detail: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// One built-in example: the chart (with any pair structure), the values
/// reports are expected to show, and the checks that provably cannot pass.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub description: String,
    pub subject: Subject,
    pub expected: BTreeMap<String, Expectation>,
    /// Audit entry names that fail for structural reasons on this example;
    /// `verify` still reports them honestly and exits nonzero.
    pub expected_failures: Vec<String>,
}

impl ZooEntry {
    pub fn type_label(&self) -> String {
        match &self.subject {
            Subject::Plain(_) => "plain".to_string(),
            Subject::Pair(s) => format!("({},{})", s.p, s.q),
        }
    }
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "euclidean4",
    "flat_torus4",
    "sphere2",
    "sphere3",
    "sphere4",
    "sasakian_s3",
    "s3_x_s1",
    "s3_x_s3",
    "flat_pair4",
];

fn c(n: usize, v: f64) -> Expr {
    Expr::constant(n, v)
}

fn xc(n: usize, i: usize) -> Expr {
    Expr::coord(n, i)
}

fn zero_form(n: usize) -> Vec<Expr> {
    (0..n).map(|_| c(n, 0.0)).collect()
}

fn zero_endo(n: usize) -> Vec<Vec<Expr>> {
    (0..n).map(|_| zero_form(n)).collect()
}

fn diag_metric(n: usize, diag: Vec<Expr>) -> Vec<Vec<Expr>> {
    let mut g = zero_endo(n);
    for (i, e) in diag.into_iter().enumerate() {
        g[i][i] = e;
    }
    g
}

fn coord_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn plain_chart(name: &str, n: usize, metric: Vec<Vec<Expr>>, sample_box: Vec<(f64, f64)>) -> ChartedManifold {
    ChartedManifold {
        name: name.to_string(),
        dim: n,
        coord_names: coord_names(n),
        metric,
        sample_box,
        vector_fields: BTreeMap::new(),
        one_forms: BTreeMap::new(),
        endomorphisms: BTreeMap::new(),
    }
}

fn expectation(detail: &str, value: f64, provenance: Provenance) -> Expectation {
    Expectation {
        detail: detail.to_string(),
        value,
        provenance,
    }
}

/// The standard contact structure of the round unit 3-sphere written on the
/// fibration chart (x_o, x_{o+1}, x_{o+2}) with metric diag(1, cos², sin²):
/// contact form, Reeb field, and endomorphism, installed at a coordinate
/// offset so products can reuse the block.
struct FibrationBlock {
    alpha: Vec<Expr>,
    reeb: Vec<Expr>,
}

fn fibration_metric_diag(n: usize, o: usize, diag: &mut [Expr]) {
    diag[o] = c(n, 1.0);
    diag[o + 1] = xc(n, o).cos().powf(2.0);
    diag[o + 2] = xc(n, o).sin().powf(2.0);
}

fn fibration_block(n: usize, o: usize) -> FibrationBlock {
    let mut alpha = zero_form(n);
    alpha[o + 1] = xc(n, o).cos().powf(2.0);
    alpha[o + 2] = xc(n, o).sin().powf(2.0);
    let mut reeb = zero_form(n);
    reeb[o + 1] = c(n, 1.0);
    reeb[o + 2] = c(n, 1.0);
    FibrationBlock { alpha, reeb }
}

fn fibration_phi_into(phi: &mut [Vec<Expr>], n: usize, o: usize) {
    let t = || xc(n, o);
    phi[o + 1][o] = t().sin().div(t().cos());
    phi[o + 2][o] = t().cos().div(t().sin()).neg();
    phi[o][o + 1] = t().sin().mul(t().cos()).neg();
    phi[o][o + 2] = t().sin().mul(t().cos());
}

fn fibration_box(o: usize, sample_box: &mut [(f64, f64)]) {
    use std::f64::consts::PI;
    sample_box[o] = (0.1, PI / 2.0 - 0.1);
    sample_box[o + 1] = (0.1, 2.0 * PI - 0.1);
    sample_box[o + 2] = (0.1, 2.0 * PI - 0.1);
}

fn euclidean4() -> ZooEntry {
    let n = 4;
    let chart = plain_chart(
        "euclidean4",
        n,
        diag_metric(n, (0..n).map(|_| c(n, 1.0)).collect()),
        vec![(-1.0, 1.0); n],
    );
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation("scalar curvature of the flat metric", 0.0, Provenance::Known),
    );
    expected.insert(
        "riemann_max".to_string(),
        expectation("all curvature components vanish", 0.0, Provenance::Known),
    );
    ZooEntry {
        name: "euclidean4".to_string(),
        description: "flat Euclidean chart on R^4".to_string(),
        subject: Subject::Plain(Box::new(chart)),
        expected,
        expected_failures: vec![],
    }
}

fn flat_torus4() -> ZooEntry {
    use std::f64::consts::PI;
    let n = 4;
    let chart = plain_chart(
        "flat_torus4",
        n,
        diag_metric(n, (0..n).map(|_| c(n, 1.0)).collect()),
        vec![(0.1, 2.0 * PI - 0.1); n],
    );
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation("scalar curvature of the flat metric", 0.0, Provenance::Known),
    );
    ZooEntry {
        name: "flat_torus4".to_string(),
        description: "flat 4-torus chart (angle coordinates)".to_string(),
        subject: Subject::Plain(Box::new(chart)),
        expected,
        expected_failures: vec![],
    }
}

fn sphere(dim: usize) -> ZooEntry {
    use std::f64::consts::PI;
    let n = dim;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = c(n, 1.0);
        for j in 0..i {
            e = e.mul(xc(n, j).sin().powf(2.0));
        }
        diag.push(e);
    }
    let mut sample_box = vec![(0.1, PI - 0.1); n];
    sample_box[n - 1] = (0.1, 2.0 * PI - 0.1);
    let name = format!("sphere{n}");
    let chart = plain_chart(&name, n, diag_metric(n, diag), sample_box);
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation(
            "scalar curvature n(n-1) of the round unit sphere",
            (n * (n - 1)) as f64,
            Provenance::Known,
        ),
    );
    expected.insert(
        "sectional".to_string(),
        expectation("constant sectional curvature", 1.0, Provenance::Known),
    );
    if n == 4 {
        expected.insert(
            "einstein_lambda".to_string(),
            expectation("Einstein constant scal/n", 3.0, Provenance::Known),
        );
    }
    ZooEntry {
        name: name.clone(),
        description: format!("round unit {n}-sphere in nested polar coordinates"),
        subject: Subject::Plain(Box::new(chart)),
        expected,
        expected_failures: vec![],
    }
}

fn sasakian_s3() -> ZooEntry {
    let n = 3;
    let mut diag = vec![c(n, 0.0), c(n, 0.0), c(n, 0.0)];
    fibration_metric_diag(n, 0, &mut diag);
    let mut sample_box = vec![(0.0, 0.0); n];
    fibration_box(0, &mut sample_box);
    let mut chart = plain_chart("sasakian_s3", n, diag_metric(n, diag), sample_box);
    let block = fibration_block(n, 0);
    chart.one_forms.insert("eta".to_string(), block.alpha);
    chart.vector_fields.insert("xi".to_string(), block.reeb);
    let mut phi = zero_endo(n);
    fibration_phi_into(&mut phi, n, 0);
    chart.endomorphisms.insert("phi".to_string(), phi);
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation("scalar curvature of the round unit 3-sphere", 6.0, Provenance::Known),
    );
    ZooEntry {
        name: "sasakian_s3".to_string(),
        description: "round unit 3-sphere with its standard contact structure (eta, xi, phi)"
            .to_string(),
        subject: Subject::Plain(Box::new(chart)),
        expected,
        expected_failures: vec![],
    }
}

fn s3_x_s1() -> Result<ZooEntry, GeomError> {
    let n = 4;
    let mut diag = (0..n).map(|_| c(n, 1.0)).collect::<Vec<_>>();
    fibration_metric_diag(n, 0, &mut diag);
    let mut sample_box = vec![(-1.0, 1.0); n];
    fibration_box(0, &mut sample_box);
    let mut chart = plain_chart("s3_x_s1", n, diag_metric(n, diag), sample_box);

    let block = fibration_block(n, 0);
    chart.one_forms.insert("alpha1".to_string(), block.alpha);
    chart.vector_fields.insert("Z1".to_string(), block.reeb);
    let mut alpha2 = zero_form(n);
    alpha2[3] = c(n, 1.0);
    chart.one_forms.insert("alpha2".to_string(), alpha2);
    let mut z2 = zero_form(n);
    z2[3] = c(n, 1.0);
    chart.vector_fields.insert("Z2".to_string(), z2);
    let mut phi = zero_endo(n);
    fibration_phi_into(&mut phi, n, 0);
    chart.endomorphisms.insert("phi".to_string(), phi);

    let pair = ContactPairStructure::new(chart, "alpha1", "alpha2", "Z1", "Z2", "phi", 1, 0)?;
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation(
            "product curvature is blockwise: the round 3-sphere contributes 6, the line factor 0",
            6.0,
            Provenance::Oracle,
        ),
    );
    expected.insert(
        "ric_zz".to_string(),
        expectation("Ric(Z,Z) = 2p + 2q on a normal metric contact pair", 2.0, Provenance::Theory),
    );
    expected.insert(
        "ric_z1z1".to_string(),
        expectation("Ric(Z1,Z1) = 2p", 2.0, Provenance::Theory),
    );
    expected.insert(
        "ric_z2z2".to_string(),
        expectation("Ric(Z2,Z2) = 2q", 0.0, Provenance::Theory),
    );
    Ok(ZooEntry {
        name: "s3_x_s1".to_string(),
        description:
            "product of the round unit 3-sphere with a line factor, contact pair of type (1,0)"
                .to_string(),
        subject: Subject::Pair(Box::new(pair)),
        expected,
        expected_failures: vec![],
    })
}

fn s3_x_s3() -> Result<ZooEntry, GeomError> {
    let n = 6;
    let mut diag = (0..n).map(|_| c(n, 1.0)).collect::<Vec<_>>();
    fibration_metric_diag(n, 0, &mut diag);
    fibration_metric_diag(n, 3, &mut diag);
    let mut sample_box = vec![(-1.0, 1.0); n];
    fibration_box(0, &mut sample_box);
    fibration_box(3, &mut sample_box);
    let mut chart = plain_chart("s3_x_s3", n, diag_metric(n, diag), sample_box);

    let block1 = fibration_block(n, 0);
    let block2 = fibration_block(n, 3);
    chart.one_forms.insert("alpha1".to_string(), block1.alpha);
    chart.vector_fields.insert("Z1".to_string(), block1.reeb);
    chart.one_forms.insert("alpha2".to_string(), block2.alpha);
    chart.vector_fields.insert("Z2".to_string(), block2.reeb);
    let mut phi = zero_endo(n);
    fibration_phi_into(&mut phi, n, 0);
    fibration_phi_into(&mut phi, n, 3);
    chart.endomorphisms.insert("phi".to_string(), phi);

    let pair = ContactPairStructure::new(chart, "alpha1", "alpha2", "Z1", "Z2", "phi", 1, 1)?;
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation(
            "product curvature is blockwise: each round 3-sphere contributes 6",
            12.0,
            Provenance::Oracle,
        ),
    );
    expected.insert(
        "ric_zz".to_string(),
        expectation("Ric(Z,Z) = 2p + 2q on a normal metric contact pair", 4.0, Provenance::Theory),
    );
    Ok(ZooEntry {
        name: "s3_x_s3".to_string(),
        description: "product of two round unit 3-spheres, contact pair of type (1,1)".to_string(),
        subject: Subject::Pair(Box::new(pair)),
        expected,
        expected_failures: vec![],
    })
}

fn flat_pair4() -> Result<ZooEntry, GeomError> {
    let n = 4;
    let mut chart = plain_chart(
        "flat_pair4",
        n,
        diag_metric(n, (0..n).map(|_| c(n, 1.0)).collect()),
        vec![(-1.0, 1.0); n],
    );
    let angle = || c(n, 2.0).mul(xc(n, 2));
    let mut alpha1 = zero_form(n);
    alpha1[0] = angle().cos();
    alpha1[1] = angle().sin();
    chart.one_forms.insert("alpha1".to_string(), alpha1);
    let mut z1 = zero_form(n);
    z1[0] = angle().cos();
    z1[1] = angle().sin();
    chart.vector_fields.insert("Z1".to_string(), z1);
    let mut alpha2 = zero_form(n);
    alpha2[3] = c(n, 1.0);
    chart.one_forms.insert("alpha2".to_string(), alpha2);
    let mut z2 = zero_form(n);
    z2[3] = c(n, 1.0);
    chart.vector_fields.insert("Z2".to_string(), z2);
    let mut phi = zero_endo(n);
    phi[2][0] = angle().sin().neg();
    phi[2][1] = angle().cos();
    phi[0][2] = angle().sin();
    phi[1][2] = angle().cos().neg();
    chart.endomorphisms.insert("phi".to_string(), phi);

    let pair = ContactPairStructure::new(chart, "alpha1", "alpha2", "Z1", "Z2", "phi", 1, 0)?;
    let mut expected = BTreeMap::new();
    expected.insert(
        "scal".to_string(),
        expectation("scalar curvature of the flat metric", 0.0, Provenance::Known),
    );
    expected.insert(
        "ric_zz".to_string(),
        expectation(
            "the flat metric forces Ric = 0, so the normal-pair value 2p + 2q = 2 is unattainable",
            0.0,
            Provenance::Oracle,
        ),
    );
    Ok(ZooEntry {
        name: "flat_pair4".to_string(),
        description:
            "flat chart on R^4 with an associated contact pair of type (1,0); a flat metric \
             cannot carry a normal pair of this type, so the normality and parallelism checks \
             fail honestly"
                .to_string(),
        subject: Subject::Pair(Box::new(pair)),
        expected,
        expected_failures: vec![
            "normal.n_j".to_string(),
            "normal.n_t".to_string(),
            "th1.covariant_phi".to_string(),
            "th1.reeb_parallel".to_string(),
            "th1.z1_parallel_unrestricted".to_string(),
            "th1.z1_parallel_restricted".to_string(),
        ],
    })
}

/// Load a built-in example by name.
pub fn builtin(name: &str) -> Result<ZooEntry, GeomError> {
    let entry = match name {
        "euclidean4" => euclidean4(),
        "flat_torus4" => flat_torus4(),
        "sphere2" => sphere(2),
        "sphere3" => sphere(3),
        "sphere4" => sphere(4),
        "sasakian_s3" => sasakian_s3(),
        "s3_x_s1" => s3_x_s1()?,
        "s3_x_s3" => s3_x_s3()?,
        "flat_pair4" => flat_pair4()?,
        other => return Err(GeomError::UnknownZooEntry(other.to_string())),
    };
    entry.subject.chart().validate()?;
    Ok(entry)
}

// ---------------------------------------------------------------------------
// Hermitian-pair construction
// ---------------------------------------------------------------------------

/// Named ingredients for composing two anticommuting almost contact
/// structures (phi1, xi1, eta1) and (phi2, xi2, eta2) interlocked by a
/// complex structure J into a contact-pair endomorphism phi = phi1 ∘ phi2.
#[derive(Debug, Clone)]
pub struct HermitianPairInput {
    pub base: ChartedManifold,
    pub j: String,
    pub phi1: String,
    pub phi2: String,
    pub eta1: String,
    pub eta2: String,
    pub xi1: String,
    pub xi2: String,
    pub p: usize,
    pub q: usize,
}

type SparseVec = Vec<Option<Expr>>;
type SparseEndo = Vec<Vec<Option<Expr>>>;

fn sparse_add(slot: &mut Option<Expr>, term: Expr) {
    *slot = Some(match slot.take() {
        Some(e) => e.add(term),
        None => term,
    });
}

/// m += (−1)^negate · field ⊗ coform, skipping structurally zero entries.
fn outer_into(m: &mut SparseEndo, negate: bool, field: &SparseVec, coform: &SparseVec) {
    let n = m.len();
    for i in 0..n {
        let Some(f) = &field[i] else { continue };
        for j in 0..n {
            let Some(w) = &coform[j] else { continue };
            let t = f.clone().mul(w.clone());
            sparse_add(&mut m[i][j], if negate { t.neg() } else { t });
        }
    }
}

fn densify_endo(m: SparseEndo, n: usize) -> Vec<Vec<Expr>> {
    m.into_iter()
        .map(|row| row.into_iter().map(|e| e.unwrap_or_else(|| c(n, 0.0))).collect())
        .collect()
}

fn densify_vec(v: SparseVec, n: usize) -> Vec<Expr> {
    v.into_iter().map(|e| e.unwrap_or_else(|| c(n, 0.0))).collect()
}

fn is_zero_literal(e: &Expr) -> bool {
    e.to_string() == "0"
}

/// Entry-wise symbolic composition (a ∘ b)^i_j = Σ_k a^i_k b^k_j,
/// dropping products with a literal-zero factor.
fn compose_endo(a: &[Vec<Expr>], b: &[Vec<Expr>], n: usize) -> Vec<Vec<Expr>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc: Option<Expr> = None;
                    for k in 0..n {
                        if is_zero_literal(&a[i][k]) || is_zero_literal(&b[k][j]) {
                            continue;
                        }
                        let term = a[i][k].clone().mul(b[k][j].clone());
                        acc = Some(match acc {
                            Some(e) => e.add(term),
                            None => term,
                        });
                    }
                    acc.unwrap_or_else(|| c(n, 0.0))
                })
                .collect()
        })
        .collect()
}

/// The 6-dimensional example input on the product of two round 3-spheres:
/// unit horizontal frames built from the fibration charts give two
/// anticommuting almost contact structures compatible with the product
/// complex structure J.
pub fn hermitian_pair_input() -> Result<HermitianPairInput, GeomError> {
    let entry = builtin("s3_x_s3")?;
    let Subject::Pair(pair) = entry.subject else {
        return Err(GeomError::Invalid("s3_x_s3 must carry a pair".into()));
    };
    let mut chart = pair.base.clone();
    chart.name = "s3_x_s3_hermitian".to_string();
    let n = chart.dim;

    // Unit horizontal frames on each factor. With θ = x1 + x2 on the first
    // factor: F_j = cosθ ∂0 + sinθ (tan x0 ∂1 − cot x0 ∂2), F_k the frame
    // rotated by −π/2 in the same plane. G_j, G_k mirror them on (x3,x4,x5).
    let frame_pair = |o: usize| -> (SparseVec, SparseVec) {
        let th = || xc(n, o + 1).add(xc(n, o + 2));
        let tan = || xc(n, o).sin().div(xc(n, o).cos());
        let cot = || xc(n, o).cos().div(xc(n, o).sin());
        let mut fj: SparseVec = vec![None; n];
        fj[o] = Some(th().cos());
        fj[o + 1] = Some(th().sin().mul(tan()));
        fj[o + 2] = Some(th().sin().mul(cot()).neg());
        let mut fk: SparseVec = vec![None; n];
        fk[o] = Some(th().sin());
        fk[o + 1] = Some(th().cos().mul(tan()).neg());
        fk[o + 2] = Some(th().cos().mul(cot()));
        (fj, fk)
    };
    // Metric duals of the frames: lowering with diag(1, cos², sin²) turns
    // tan into sin·cos and −cot into −sin·cos.
    let coframe_pair = |o: usize| -> (SparseVec, SparseVec) {
        let th = || xc(n, o + 1).add(xc(n, o + 2));
        let sc = || xc(n, o).sin().mul(xc(n, o).cos());
        let mut fjb: SparseVec = vec![None; n];
        fjb[o] = Some(th().cos());
        fjb[o + 1] = Some(th().sin().mul(sc()));
        fjb[o + 2] = Some(th().sin().mul(sc()).neg());
        let mut fkb: SparseVec = vec![None; n];
        fkb[o] = Some(th().sin());
        fkb[o + 1] = Some(th().cos().mul(sc()).neg());
        fkb[o + 2] = Some(th().cos().mul(sc()));
        (fjb, fkb)
    };
    let (f_j, f_k) = frame_pair(0);
    let (g_j, g_k) = frame_pair(3);
    let (f_jb, f_kb) = coframe_pair(0);
    let (g_jb, g_kb) = coframe_pair(3);

    // phi1: F_j ↦ G_j, G_j ↦ −F_j, F_k ↦ −G_k, G_k ↦ F_k.
    let mut phi1: SparseEndo = vec![vec![None; n]; n];
    outer_into(&mut phi1, false, &g_j, &f_jb);
    outer_into(&mut phi1, true, &f_j, &g_jb);
    outer_into(&mut phi1, true, &g_k, &f_kb);
    outer_into(&mut phi1, false, &f_k, &g_kb);

    // phi2: F_j ↦ G_k, F_k ↦ G_j, G_j ↦ −F_k, G_k ↦ −F_j.
    let mut phi2: SparseEndo = vec![vec![None; n]; n];
    outer_into(&mut phi2, false, &g_k, &f_jb);
    outer_into(&mut phi2, false, &g_j, &f_kb);
    outer_into(&mut phi2, true, &f_k, &g_jb);
    outer_into(&mut phi2, true, &f_j, &g_kb);

    // Product complex structure: J = phi_pair − Z1 ⊗ alpha2 + Z2 ⊗ alpha1,
    // which maps Z1 ↦ Z2 and Z2 ↦ −Z1.
    let mut j: SparseEndo = vec![vec![None; n]; n];
    for o in [0usize, 3] {
        let t = || xc(n, o);
        sparse_add(&mut j[o + 1][o], t().sin().div(t().cos()));
        sparse_add(&mut j[o + 2][o], t().cos().div(t().sin()).neg());
        sparse_add(&mut j[o][o + 1], t().sin().mul(t().cos()).neg());
        sparse_add(&mut j[o][o + 2], t().sin().mul(t().cos()));
    }
    let mut z1s: SparseVec = vec![None; n];
    z1s[1] = Some(c(n, 1.0));
    z1s[2] = Some(c(n, 1.0));
    let mut z2s: SparseVec = vec![None; n];
    z2s[4] = Some(c(n, 1.0));
    z2s[5] = Some(c(n, 1.0));
    let mut a1s: SparseVec = vec![None; n];
    a1s[1] = Some(xc(n, 0).cos().powf(2.0));
    a1s[2] = Some(xc(n, 0).sin().powf(2.0));
    let mut a2s: SparseVec = vec![None; n];
    a2s[4] = Some(xc(n, 3).cos().powf(2.0));
    a2s[5] = Some(xc(n, 3).sin().powf(2.0));
    outer_into(&mut j, true, &z1s, &a2s);
    outer_into(&mut j, false, &z2s, &a1s);

    // The pair forms of the construction: eta1 = alpha1, eta2 = −alpha2,
    // xi1 = Z1, xi2 = −Z2, so that J ξ1 = −ξ2 and J ξ2 = ξ1.
    let eta1 = densify_vec(a1s, n);
    let eta2: Vec<Expr> = {
        let mut v = zero_form(n);
        v[4] = xc(n, 3).cos().powf(2.0).neg();
        v[5] = xc(n, 3).sin().powf(2.0).neg();
        v
    };
    let xi1 = densify_vec(z1s, n);
    let xi2: Vec<Expr> = {
        let mut v = zero_form(n);
        v[4] = c(n, -1.0);
        v[5] = c(n, -1.0);
        v
    };

    chart.one_forms.insert("eta1".to_string(), eta1);
    chart.one_forms.insert("eta2".to_string(), eta2);
    chart.vector_fields.insert("xi1".to_string(), xi1);
    chart.vector_fields.insert("xi2".to_string(), xi2);
    chart.endomorphisms.insert("J".to_string(), densify_endo(j, n));
    chart.endomorphisms.insert("phi1".to_string(), densify_endo(phi1, n));
    chart.endomorphisms.insert("phi2".to_string(), densify_endo(phi2, n));

    Ok(HermitianPairInput {
        base: chart,
        j: "J".to_string(),
        phi1: "phi1".to_string(),
        phi2: "phi2".to_string(),
        eta1: "eta1".to_string(),
        eta2: "eta2".to_string(),
        xi1: "xi1".to_string(),
        xi2: "xi2".to_string(),
        p: 1,
        q: 1,
    })
}

/// A 4-dimensional input assembled the only way the shape allows: phi1 is
/// the pair endomorphism, J the pair complex structure, phi2 = phi1 ∘ J.
/// In a 2-dimensional horizontal bundle every metric-skew complex structure
/// is a quarter rotation and any two of them commute, so the required
/// anticommutation is unattainable; the construction report flags it.
pub fn hermitian_pair_input_dim4() -> Result<HermitianPairInput, GeomError> {
    let entry = builtin("s3_x_s1")?;
    let Subject::Pair(pair) = entry.subject else {
        return Err(GeomError::Invalid("s3_x_s1 must carry a pair".into()));
    };
    let mut chart = pair.base.clone();
    chart.name = "s3_x_s1_hermitian".to_string();
    let n = chart.dim;

    let phi1 = chart
        .endomorphism_exprs("phi")?
        .iter()
        .map(|row| row.to_vec())
        .collect::<Vec<_>>();

    // J = phi − Z1 ⊗ alpha2 + Z2 ⊗ alpha1.
    let mut j: SparseEndo = vec![vec![None; n]; n];
    let t = || xc(n, 0);
    sparse_add(&mut j[1][0], t().sin().div(t().cos()));
    sparse_add(&mut j[2][0], t().cos().div(t().sin()).neg());
    sparse_add(&mut j[0][1], t().sin().mul(t().cos()).neg());
    sparse_add(&mut j[0][2], t().sin().mul(t().cos()));
    let mut z1s: SparseVec = vec![None; n];
    z1s[1] = Some(c(n, 1.0));
    z1s[2] = Some(c(n, 1.0));
    let mut z2s: SparseVec = vec![None; n];
    z2s[3] = Some(c(n, 1.0));
    let mut a1s: SparseVec = vec![None; n];
    a1s[1] = Some(xc(n, 0).cos().powf(2.0));
    a1s[2] = Some(xc(n, 0).sin().powf(2.0));
    let mut a2s: SparseVec = vec![None; n];
    a2s[3] = Some(c(n, 1.0));
    outer_into(&mut j, true, &z1s, &a2s);
    outer_into(&mut j, false, &z2s, &a1s);
    let j_dense = densify_endo(j, n);

    let phi2 = compose_endo(&phi1, &j_dense, n);

    let eta1 = densify_vec(a1s, n);
    let mut eta2 = zero_form(n);
    eta2[3] = c(n, -1.0);
    let xi1 = densify_vec(z1s, n);
    let mut xi2 = zero_form(n);
    xi2[3] = c(n, -1.0);

    chart.one_forms.insert("eta1".to_string(), eta1);
    chart.one_forms.insert("eta2".to_string(), eta2);
    chart.vector_fields.insert("xi1".to_string(), xi1);
    chart.vector_fields.insert("xi2".to_string(), xi2);
    chart.endomorphisms.insert("J".to_string(), j_dense);
    chart.endomorphisms.insert("phi1".to_string(), phi1);
    chart.endomorphisms.insert("phi2".to_string(), phi2);

    Ok(HermitianPairInput {
        base: chart,
        j: "J".to_string(),
        phi1: "phi1".to_string(),
        phi2: "phi2".to_string(),
        eta1: "eta1".to_string(),
        eta2: "eta2".to_string(),
        xi1: "xi1".to_string(),
        xi2: "xi2".to_string(),
        p: 1,
        q: 0,
    })
}

/// Compose phi = phi1 ∘ phi2 symbolically, audit every hypothesis the
/// construction rests on plus its conclusions, and return the assembled
/// contact pair structure together with the report. Hypothesis failures are
/// flagged entries, not errors: the structure is always returned so the
/// caller can inspect how it breaks.
pub fn hermitian_pair_build(
    input: &HermitianPairInput,
    samples: usize,
    seed: u64,
) -> Result<(ContactPairStructure, AuditReport), GeomError> {
    let n = input.base.dim;
    let phi1_exprs = input.base.endomorphism_exprs(&input.phi1)?.clone();
    let phi2_exprs = input.base.endomorphism_exprs(&input.phi2)?.clone();
    input.base.endomorphism_exprs(&input.j)?;
    input.base.one_form_exprs(&input.eta1)?;
    input.base.one_form_exprs(&input.eta2)?;
    input.base.vector_field_exprs(&input.xi1)?;
    input.base.vector_field_exprs(&input.xi2)?;

    let composed = compose_endo(&phi1_exprs, &phi2_exprs, n);
    let mut chart = input.base.clone();
    chart.endomorphisms.insert("phi".to_string(), composed);
    let structure = ContactPairStructure::new(
        chart,
        &input.eta1,
        &input.eta2,
        &input.xi1,
        &input.xi2,
        "phi",
        input.p,
        input.q,
    )?;
    let base = &structure.base;

    let mut report = AuditReport::new("hermitian pair construction", &base.name, seed, samples);
    report.note(
        "orientation: J is audited with J xi1 = -xi2 and J xi2 = xi1, the assignment consistent \
         with the composition identity at X = xi1; the opposite signs contradict it",
    );

    let mut vec_rng = Sampler::derive(seed, 31);
    let mut j_square = 0.0_f64;
    let mut j_hermitian = 0.0_f64;
    let mut phi1_skew = 0.0_f64;
    let mut phi2_skew = 0.0_f64;
    let mut j_xi1 = 0.0_f64;
    let mut j_xi2 = 0.0_f64;
    let mut phi1_square = 0.0_f64;
    let mut phi2_square = 0.0_f64;
    let mut phi1_j_anti = 0.0_f64;
    let mut phi1_j_is_phi2 = 0.0_f64;
    let mut phi2_j_anti = 0.0_f64;
    let mut phi2_j_is_minus_phi1 = 0.0_f64;
    let mut compose_vs_j = 0.0_f64;
    let mut anticommute = 0.0_f64;
    let mut composition = 0.0_f64;
    let mut phi_square = 0.0_f64;
    let mut eta_xi = 0.0_f64;
    let mut phi_xi = 0.0_f64;
    let mut g_skew = 0.0_f64;
    let mut g_compat = 0.0_f64;

    let vmax = |v: &[f64]| v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));

    for x in Sampler::derive(seed, 30).points(&base.sample_box, samples) {
        let (g, _) = base.metric_at(&x)?;
        let e1 = base.one_form_jet(&input.eta1, &x)?;
        let e2 = base.one_form_jet(&input.eta2, &x)?;
        let x1 = base.vector_field_jet(&input.xi1, &x)?;
        let x2 = base.vector_field_jet(&input.xi2, &x)?;
        let jm = base.endo_jet(&input.j, &x)?;
        let p1 = base.endo_jet(&input.phi1, &x)?;
        let p2 = base.endo_jet(&input.phi2, &x)?;
        let ph = base.endo_jet("phi", &x)?;
        let inner = |u: &[f64], v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    acc += g[(i, k)] * u[i] * v[k];
                }
            }
            acc
        };

        let jx1 = jm.apply_values(&x1.val);
        j_xi1 = j_xi1.max(vmax(&(0..n).map(|k| jx1[k] + x2.val[k]).collect::<Vec<_>>()));
        let jx2 = jm.apply_values(&x2.val);
        j_xi2 = j_xi2.max(vmax(&(0..n).map(|k| jx2[k] - x1.val[k]).collect::<Vec<_>>()));

        eta_xi = eta_xi
            .max((e1.apply(&x1.val) - 1.0).abs())
            .max(e1.apply(&x2.val).abs())
            .max(e2.apply(&x1.val).abs())
            .max((e2.apply(&x2.val) - 1.0).abs());
        phi_xi = phi_xi
            .max(vmax(&ph.apply_values(&x1.val)))
            .max(vmax(&ph.apply_values(&x2.val)));

        for _ in 0..10 {
            let u = vec_rng.vector(n);
            let v = vec_rng.vector(n);

            let ju = jm.apply_values(&u);
            let jju = jm.apply_values(&ju);
            j_square = j_square.max(vmax(&(0..n).map(|k| jju[k] + u[k]).collect::<Vec<_>>()));
            let jv = jm.apply_values(&v);
            j_hermitian = j_hermitian.max((inner(&ju, &jv) - inner(&u, &v)).abs());

            let p1u = p1.apply_values(&u);
            let p1v = p1.apply_values(&v);
            let p2u = p2.apply_values(&u);
            let p2v = p2.apply_values(&v);
            phi1_skew = phi1_skew.max((inner(&p1u, &v) + inner(&u, &p1v)).abs());
            phi2_skew = phi2_skew.max((inner(&p2u, &v) + inner(&u, &p2v)).abs());

            let acs = |pu: &[f64], pm: &crate::geometry::EndoJet| -> f64 {
                let ppu = pm.apply_values(pu);
                let eu1 = e1.apply(&u);
                let eu2 = e2.apply(&u);
                vmax(
                    &(0..n)
                        .map(|k| ppu[k] + u[k] - eu1 * x1.val[k] - eu2 * x2.val[k])
                        .collect::<Vec<_>>(),
                )
            };
            phi1_square = phi1_square.max(acs(&p1u, &p1));
            phi2_square = phi2_square.max(acs(&p2u, &p2));

            let p1ju = p1.apply_values(&ju);
            let jp1u = jm.apply_values(&p1u);
            phi1_j_anti =
                phi1_j_anti.max(vmax(&(0..n).map(|k| p1ju[k] + jp1u[k]).collect::<Vec<_>>()));
            phi1_j_is_phi2 =
                phi1_j_is_phi2.max(vmax(&(0..n).map(|k| p1ju[k] - p2u[k]).collect::<Vec<_>>()));
            let p2ju = p2.apply_values(&ju);
            let jp2u = jm.apply_values(&p2u);
            phi2_j_anti =
                phi2_j_anti.max(vmax(&(0..n).map(|k| p2ju[k] + jp2u[k]).collect::<Vec<_>>()));
            phi2_j_is_minus_phi1 =
                phi2_j_is_minus_phi1.max(vmax(&(0..n).map(|k| p2ju[k] + p1u[k]).collect::<Vec<_>>()));

            let p2p1u = p2.apply_values(&p1u);
            let eu1 = e1.apply(&u);
            let eu2 = e2.apply(&u);
            compose_vs_j = compose_vs_j.max(vmax(
                &(0..n)
                    .map(|k| p2p1u[k] - ju[k] - eu1 * x2.val[k] + eu2 * x1.val[k])
                    .collect::<Vec<_>>(),
            ));
            let p1p2u = p1.apply_values(&p2u);
            anticommute =
                anticommute.max(vmax(&(0..n).map(|k| p2p1u[k] + p1p2u[k]).collect::<Vec<_>>()));

            let phu = ph.apply_values(&u);
            composition =
                composition.max(vmax(&(0..n).map(|k| phu[k] - p1p2u[k]).collect::<Vec<_>>()));
            let pphu = ph.apply_values(&phu);
            phi_square = phi_square.max(vmax(
                &(0..n)
                    .map(|k| pphu[k] + u[k] - eu1 * x1.val[k] - eu2 * x2.val[k])
                    .collect::<Vec<_>>(),
            ));
            let phv = ph.apply_values(&v);
            g_skew = g_skew.max((inner(&phu, &v) + inner(&u, &phv)).abs());
            g_compat = g_compat.max(
                (inner(&phu, &phv) - inner(&u, &v)
                    + e1.apply(&u) * e1.apply(&v)
                    + e2.apply(&u) * e2.apply(&v))
                .abs(),
            );
        }
    }

    let tol = 1e-8;
    report.push(AuditEntry::checked(
        "pre.j_square",
        "J^2 = -I",
        j_square,
        tol,
        Provenance::Known,
    ));
    report.push(AuditEntry::checked(
        "pre.j_hermitian",
        "g(JX1, JX2) = g(X1, X2)",
        j_hermitian,
        tol,
        Provenance::Known,
    ));
    report.push(AuditEntry::checked(
        "pre.phi1_skew",
        "g(phi1 X1, X2) = -g(X1, phi1 X2)",
        phi1_skew,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi2_skew",
        "g(phi2 X1, X2) = -g(X1, phi2 X2)",
        phi2_skew,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.j_xi1",
        "J xi1 = -xi2 (orientation note above)",
        j_xi1,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.j_xi2",
        "J xi2 = xi1 (orientation note above)",
        j_xi2,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi1_square",
        "phi1^2 X = -X + eta1(X) xi1 + eta2(X) xi2",
        phi1_square,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi2_square",
        "phi2^2 X = -X + eta1(X) xi1 + eta2(X) xi2",
        phi2_square,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi1_j_anti",
        "phi1(JX) = -J(phi1 X)",
        phi1_j_anti,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi1_j_is_phi2",
        "phi1(JX) = phi2 X",
        phi1_j_is_phi2,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi2_j_anti",
        "phi2(JX) = -J(phi2 X)",
        phi2_j_anti,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.phi2_j_is_minus_phi1",
        "phi2(JX) = -phi1 X",
        phi2_j_is_minus_phi1,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.compose_vs_j",
        "phi2(phi1 X) = JX + eta1(X) xi2 - eta2(X) xi1",
        compose_vs_j,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "pre.anticommute",
        "phi2(phi1 X) = -phi1(phi2 X)",
        anticommute,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "cor.composition",
        "registered phi agrees with the pointwise product phi1 ∘ phi2",
        composition,
        1e-9,
        Provenance::Known,
    ));
    report.push(AuditEntry::checked(
        "cor.phi_square",
        "phi^2 X = -X + eta1(X) xi1 + eta2(X) xi2",
        phi_square,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "cor.eta_xi",
        "eta_i(xi_j) = delta_ij",
        eta_xi,
        1e-10,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "cor.phi_xi",
        "phi xi1 = phi xi2 = 0",
        phi_xi,
        tol,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "cor.g_skew",
        "g(phi X1, X2) = -g(X1, phi X2)",
        g_skew,
        1e-9,
        Provenance::Theory,
    ));
    report.push(AuditEntry::checked(
        "cor.g_compat",
        "g(phi X1, phi X2) = g(X1, X2) - eta1(X1) eta1(X2) - eta2(X1) eta2(X2)",
        g_compat,
        tol,
        Provenance::Theory,
    ));
    Ok((structure, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_load_and_validate() {
        for name in BUILTIN_NAMES {
            let entry = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(entry.name, name);
            assert!(!entry.description.is_empty());
        }
    }

    #[test]
    fn unknown_name_is_rejected() {
        match builtin("sphere5") {
            Err(GeomError::UnknownZooEntry(name)) => assert_eq!(name, "sphere5"),
            other => panic!("expected UnknownZooEntry, got {other:?}"),
        }
    }

    #[test]
    fn dimensions_and_types_match() {
        let checks = [
            ("euclidean4", 4, "plain"),
            ("sphere2", 2, "plain"),
            ("sasakian_s3", 3, "plain"),
            ("s3_x_s1", 4, "(1,0)"),
            ("s3_x_s3", 6, "(1,1)"),
            ("flat_pair4", 4, "(1,0)"),
        ];
        for (name, dim, label) in checks {
            let entry = builtin(name).unwrap();
            assert_eq!(entry.subject.dim(), dim, "{name}");
            assert_eq!(entry.type_label(), label, "{name}");
        }
    }

    #[test]
    fn product_scalar_curvatures_match_block_sums() {
        let entry = builtin("s3_x_s1").unwrap();
        let b = entry.subject.chart().curvature_at(&[0.7, 1.0, 2.0, 0.3]).unwrap();
        assert!((b.scal - 6.0).abs() < 1e-9, "scal {}", b.scal);

        let entry = builtin("s3_x_s3").unwrap();
        let b = entry
            .subject
            .chart()
            .curvature_at(&[0.7, 1.0, 2.0, 0.9, 0.4, 1.5])
            .unwrap();
        assert!((b.scal - 12.0).abs() < 1e-9, "scal {}", b.scal);

        let entry = builtin("flat_pair4").unwrap();
        let b = entry.subject.chart().curvature_at(&[0.2, -0.4, 0.6, 0.1]).unwrap();
        assert!(b.scal.abs() < 1e-10);
    }

    #[test]
    fn hermitian_input_builds_and_passes_every_prerequisite() {
        let input = hermitian_pair_input().unwrap();
        let (structure, report) = hermitian_pair_build(&input, 4, 42).unwrap();
        for entry in &report.entries {
            assert_eq!(
                entry.pass,
                Some(true),
                "{} value {:e}",
                entry.name,
                entry.value
            );
        }
        assert!(report.passed());
        assert_eq!(structure.p, 1);
        assert_eq!(structure.q, 1);
    }

    #[test]
    fn four_dimensional_input_is_flagged_as_obstructed() {
        let input = hermitian_pair_input_dim4().unwrap();
        let (_, report) = hermitian_pair_build(&input, 4, 42).unwrap();
        assert!(!report.passed());
        let sq = report.entry("pre.phi2_square").unwrap();
        assert_eq!(sq.pass, Some(false));
        assert!(sq.value > 0.5, "phi2^2 residual {}", sq.value);
        let ac = report.entry("pre.anticommute").unwrap();
        assert_eq!(ac.pass, Some(false));
        assert!(ac.value > 0.5, "anticommutator residual {}", ac.value);
        // The defining relation phi2 = phi1 ∘ J holds by construction even
        // though the axioms it should imply do not.
        assert_eq!(report.entry("pre.phi1_j_is_phi2").unwrap().pass, Some(true));
    }
}
