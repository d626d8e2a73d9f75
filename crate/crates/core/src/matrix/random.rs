//! Seeded sampling of test inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, SkewHermitian, UnitaryMatrix, C64};

pub type FinslerRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> FinslerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent generator for sub-task `index` of a seeded run.
pub fn child_rng(seed: u64, index: u64) -> FinslerRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub(crate) fn gaussian(rng: &mut FinslerRng) -> f64 {
    rng.sample(StandardNormal)
}

pub(crate) fn complex_gaussian(n: usize, rng: &mut FinslerRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = C64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    m
}

/// Gram–Schmidt on columns; the implied triangular factor has a positive
/// diagonal, which makes the result Haar distributed for Gaussian input.
pub(crate) fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.n();
    let mut q = m.clone();
    for j in 0..n {
        let mut col = q.column(j);
        // two passes keep orthogonality at rounding level
        for _ in 0..2 {
            for k in 0..j {
                let other = q.column(k);
                let proj: C64 = other.iter().zip(&col).map(|(o, c)| o.conj() * c).sum();
                for (c, o) in col.iter_mut().zip(&other) {
                    *c -= proj * o;
                }
            }
        }
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in col.iter_mut() {
            *c /= norm;
        }
        q.set_column(j, &col);
    }
    q
}

/// Haar-distributed unitary drawn from `rng`.
pub fn haar_sample_with(n: usize, rng: &mut FinslerRng) -> UnitaryMatrix {
    assert!(n >= 1, "dimension must be positive");
    UnitaryMatrix::from_trusted(orthonormalize_columns(&complex_gaussian(n, rng)))
}

/// Haar-distributed unitary, deterministic in `seed`.
pub fn haar_sample(n: usize, seed: u64) -> UnitaryMatrix {
    haar_sample_with(n, &mut rng_from_seed(seed))
}

/// Random skew-Hermitian direction with unit operator norm.
pub fn random_unit_direction(n: usize, rng: &mut FinslerRng) -> SkewHermitian {
    let g = complex_gaussian(n, rng);
    let x = SkewHermitian::skew_part(&g);
    let norm = x.matrix().op_norm();
    x.scale(1.0 / norm)
}

pub fn uniform(rng: &mut FinslerRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_is_unit_modulus() {
        let u = haar_sample(1, 42);
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic() {
        assert_eq!(haar_sample(3, 7), haar_sample(3, 7));
        assert_ne!(haar_sample(3, 7), haar_sample(3, 8));
    }

    #[test]
    fn is_unitary() {
        let u = haar_sample(6, 1);
        assert!(UnitaryMatrix::new(u.matrix().clone()).is_ok());
    }

    #[test]
    fn marginal_second_moment() {
        // E|u_11|^2 = 1/n under Haar measure
        let mut rng = rng_from_seed(2024);
        let mean: f64 = (0..10_000).map(|_| haar_sample_with(4, &mut rng).matrix()[(0, 0)].norm_sqr()).sum::<f64>() / 1e4;
        assert!((mean - 0.25).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn left_invariance_statistic() {
        // |(w·u)_11|^2 has the same mean as |u_11|^2
        let w = haar_sample(3, 99);
        let mut rng = rng_from_seed(5);
        let mean: f64 = (0..6000).map(|_| w.mul(&haar_sample_with(3, &mut rng)).matrix()[(0, 0)].norm_sqr()).sum::<f64>() / 6000.0;
        assert!((mean - 1.0 / 3.0).abs() < 0.02, "mean {mean}");
    }
}
