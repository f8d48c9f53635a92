//! Seeded, reproducible sampling of chart points and tangent vectors.
//!
//! Every validator draws its randomness through this module with an explicit
//! seed, so a report is a pure function of (manifold, flags, seed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The stream of points and vectors used by one validator run.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A derived sampler whose stream is independent of this one's position.
    /// Used to give each validator stage its own reproducible stream.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    /// Uniform point in the closed box, margins included.
    pub fn point(&mut self, sample_box: &[(f64, f64)]) -> Vec<f64> {
        sample_box
            .iter()
            .map(|&(lo, hi)| self.rng.gen_range(lo..=hi))
            .collect()
    }

    /// `count` points in the box, in draw order.
    pub fn points(&mut self, sample_box: &[(f64, f64)], count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.point(sample_box)).collect()
    }

    /// Tangent vector with components uniform in [-1, 1].
    pub fn vector(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.rng.gen_range(-1.0..=1.0)).collect()
    }

    pub fn scalar(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Affine vector fields X^k(x) = c_k + Σ_m A[k][m]·x_m used as a spanning
    /// family for tensorial checks (Nijenhuis, Lie-bracket properties).
    pub fn affine_field(&mut self, dim: usize) -> AffineField {
        AffineField {
            constant: self.vector(dim),
            linear: (0..dim).map(|_| self.vector(dim)).collect(),
        }
    }
}

/// A vector field with affine coefficient functions; its value and Jacobian
/// at a point are exact, which makes it a good probe field.
#[derive(Debug, Clone)]
pub struct AffineField {
    pub constant: Vec<f64>,
    /// linear[k][m] = coefficient of x_m in component k (also the Jacobian).
    pub linear: Vec<Vec<f64>>,
}

impl AffineField {
    pub fn coordinate(index: usize, dim: usize) -> Self {
        let mut constant = vec![0.0; dim];
        constant[index] = 1.0;
        AffineField {
            constant,
            linear: vec![vec![0.0; dim]; dim],
        }
    }

    pub fn value_at(&self, x: &[f64]) -> Vec<f64> {
        self.constant
            .iter()
            .zip(&self.linear)
            .map(|(c, row)| c + row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>())
            .collect()
    }

    /// jacobian[k][m] = ∂_m X^k (constant for affine fields).
    pub fn jacobian(&self) -> &Vec<Vec<f64>> {
        &self.linear
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let sbox = [(0.0, 1.0), (-2.0, 2.0)];
        let a: Vec<Vec<f64>> = Sampler::new(42).points(&sbox, 5);
        let b: Vec<Vec<f64>> = Sampler::new(42).points(&sbox, 5);
        assert_eq!(a, b);
        let c: Vec<Vec<f64>> = Sampler::new(43).points(&sbox, 5);
        assert_ne!(a, c);
    }

    #[test]
    fn derived_streams_differ() {
        let mut a = Sampler::derive(42, 1);
        let mut b = Sampler::derive(42, 2);
        assert_ne!(a.vector(4), b.vector(4));
    }

    #[test]
    fn points_stay_in_box() {
        let sbox = [(0.1, 0.2), (5.0, 6.0)];
        let mut s = Sampler::new(7);
        for p in s.points(&sbox, 100) {
            assert!(p[0] >= 0.1 && p[0] <= 0.2);
            assert!(p[1] >= 5.0 && p[1] <= 6.0);
        }
    }

    #[test]
    fn affine_field_value_and_jacobian() {
        let f = AffineField {
            constant: vec![1.0, 0.0],
            linear: vec![vec![2.0, 0.0], vec![0.0, -1.0]],
        };
        assert_eq!(f.value_at(&[3.0, 4.0]), vec![7.0, -4.0]);
        assert_eq!(f.jacobian()[0], vec![2.0, 0.0]);
    }
}
