use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{herm_eig, ComplexMatrix};
use crate::error::{Error, Result};

/// Order of a Schatten norm: an even integer `p ≥ 2` or the operator norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormOrder {
    P(u32),
    Inf,
}

impl NormOrder {
    pub fn p(p: u32) -> Result<Self> {
        if p < 2 || p % 2 != 0 {
            return Err(Error::OddOrUnsupportedP(p.to_string()));
        }
        Ok(NormOrder::P(p))
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            NormOrder::P(p) => Self::p(p),
            NormOrder::Inf => Ok(self),
        }
    }

    /// `p` as a float, `∞` for the operator norm.
    pub fn exponent(self) -> f64 {
        match self {
            NormOrder::P(p) => p as f64,
            NormOrder::Inf => f64::INFINITY,
        }
    }

    /// `ℓ^p` norm of a list of magnitudes.
    pub fn of_magnitudes(self, values: &[f64]) -> f64 {
        let max = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        match self {
            NormOrder::Inf => max,
            NormOrder::P(p) => {
                if max == 0.0 {
                    return 0.0;
                }
                let s: f64 = values.iter().map(|v| (v.abs() / max).powi(p as i32)).sum();
                max * s.powf(1.0 / p as f64)
            }
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::P(p) => write!(f, "{p}"),
            NormOrder::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(NormOrder::Inf);
        }
        let p: u32 = s.parse().map_err(|_| Error::OddOrUnsupportedP(s.to_string()))?;
        NormOrder::p(p)
    }
}

/// Singular values, descending, from the spectrum of `x*x`.
pub fn singular_values(x: &ComplexMatrix) -> Vec<f64> {
    let gram = &x.adjoint() * x;
    let eig = herm_eig(&gram.hermitian_part()).expect("Gram matrix is Hermitian");
    let mut s: Vec<f64> = eig.angles.iter().map(|&l| l.max(0.0).sqrt()).collect();
    s.reverse();
    s
}

/// Schatten `p`-norm `(Σ σ_j^p)^{1/p}`, or the largest singular value for `p = ∞`.
pub fn schatten_norm(x: &ComplexMatrix, p: NormOrder) -> Result<f64> {
    let p = p.validate()?;
    Ok(p.of_magnitudes(&singular_values(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{haar_sample, SkewHermitian};

    #[test]
    fn rejects_odd_orders() {
        assert!(NormOrder::p(3).is_err());
        assert!(NormOrder::p(0).is_err());
        assert!(schatten_norm(&ComplexMatrix::identity(2), NormOrder::P(1)).is_err());
        assert!("5".parse::<NormOrder>().is_err());
        assert_eq!("inf".parse::<NormOrder>().unwrap(), NormOrder::Inf);
    }

    #[test]
    fn two_norm_of_diagonal() {
        let a = 0.8;
        let x = SkewHermitian::from_angles(&[a, -a]);
        let v = schatten_norm(x.matrix(), NormOrder::P(2)).unwrap();
        assert!((v - a * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn trace_formula_for_p4() {
        // oracle: Tr((x*x)^2)^{1/4} by direct matrix products
        let v = haar_sample(4, 5);
        let h = v.conjugate(&ComplexMatrix::from_real_diag(&[0.3, -1.2, 0.7, 2.1]));
        let x = SkewHermitian::from_hermitian(&h);
        let g = &x.matrix().adjoint() * x.matrix();
        let direct = (&g * &g).trace().re.powf(0.25);
        let via_sv = schatten_norm(x.matrix(), NormOrder::P(4)).unwrap();
        assert!((direct - via_sv).abs() < 1e-12);
    }

    #[test]
    fn norm_chain() {
        let v = haar_sample(3, 9);
        let x = v.conjugate(&ComplexMatrix::from_real_diag(&[0.1, -0.5, 1.4]));
        let inf = schatten_norm(&x, NormOrder::Inf).unwrap();
        for p in (2..=12).step_by(2) {
            let np = schatten_norm(&x, NormOrder::P(p)).unwrap();
            assert!(inf <= np + 1e-12);
            assert!(np <= 3f64.powf(1.0 / p as f64) * inf + 1e-12);
        }
    }
}
