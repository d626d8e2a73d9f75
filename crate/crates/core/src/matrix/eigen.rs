//! Self-adjoint and unitary eigendecompositions.
//!
//! The Hermitian solver is a cyclic Jacobi method: each rotation first removes
//! the phase of the pivot entry, then applies a real plane rotation that
//! annihilates it. Unitary matrices are diagonalized through the Hermitian
//! pencil `K(φ) = (e^{−iφ}u + e^{iφ}u*)/2`, whose eigenvalues are
//! `cos(θ_j − φ)`. Two angles `θ_j ≠ θ_k` collide in `K(φ)` only when
//! `θ_j + θ_k ≡ 2φ`, so clusters left by a first pencil are split by a second
//! one rotated by `π/2`.

use std::f64::consts::PI;

use super::{ComplexMatrix, SkewHermitian, UnitaryMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
const CLUSTER_GAP: f64 = 1e-8;

const PENCIL_PHASE: f64 = 1.1;
const PENCIL_CLUSTER: f64 = 1e-5;

/// Within this distance of `-1` the logarithm branch is flagged.
pub(crate) const BRANCH_TOL: f64 = 1e-9;

/// Eigenpairs of a self-adjoint matrix, ascending.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub angles: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

impl EigenSystem {
    /// Rebuilds `V·diag(f(λ))·V*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let d: Vec<C64> = self.angles.iter().map(|&l| f(l)).collect();
        self.vectors.matrix().conjugate_diag(&d)
    }
}

/// Eigendecomposition of a unitary: `u = V·diag(e^{iθ})·V*` with principal
/// angles `θ ∈ (−π, π]`, ascending.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub angles: Vec<f64>,
    pub vectors: UnitaryMatrix,
    /// Some eigenvalue lies within `1e-9` of `−1`.
    pub branch_ambiguous: bool,
}

impl UnitaryEigen {
    pub fn max_abs_angle(&self) -> f64 {
        self.angles.iter().map(|t| t.abs()).fold(0.0, f64::max)
    }

    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let d: Vec<C64> = self.angles.iter().map(|&l| f(l)).collect();
        self.vectors.matrix().conjugate_diag(&d)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigenSystem> {
    let n = h.n();
    let scale = h.max_abs().max(1.0);
    let defect = h.hermitian_defect();
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let total = a.frobenius_norm();
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = off_diagonal_sq(&a);
        if off.sqrt() <= 1e-17 * total.max(f64::MIN_POSITIVE) || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_sq(&a).sqrt();
        // tiny residual coupling is rounding noise, not a failure
        if off > 1e-14 * total.max(1.0) {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let angles: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_j, &(_, old_j)) in pairs.iter().enumerate() {
        vectors.set_column(new_j, &v.column(old_j));
    }
    reorthonormalize_clusters(&mut vectors, &angles, CLUSTER_GAP);
    Ok(EigenSystem { angles, vectors: UnitaryMatrix::from_trusted(vectors) })
}

fn off_diagonal_sq(a: &ComplexMatrix) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// One complex Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.n();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag < 1e-300 || mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    // phase step: D = diag(.., e^{-iφ} at q, ..), a <- D* a D
    let phase = apq / mag;
    let dq = phase.conj();
    for k in 0..n {
        a[(k, q)] *= dq;
    }
    for k in 0..n {
        a[(q, k)] *= phase;
    }
    for k in 0..n {
        v[(k, q)] *= dq;
    }
    a[(p, q)] = C64::new(mag, 0.0);
    a[(q, p)] = C64::new(mag, 0.0);
    a[(q, q)] = C64::new(aqq, 0.0);

    // real symmetric Schur rotation
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
}

/// Modified Gram–Schmidt within runs of eigenvalues closer than `gap`.
fn reorthonormalize_clusters(v: &mut ComplexMatrix, values: &[f64], gap: f64) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            for j in start..end {
                let mut col = v.column(j);
                for k in start..j {
                    let other = v.column(k);
                    let proj: C64 = other.iter().zip(&col).map(|(o, c)| o.conj() * c).sum();
                    for (c, o) in col.iter_mut().zip(&other) {
                        *c -= proj * o;
                    }
                }
                let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                for c in col.iter_mut() {
                    *c /= norm;
                }
                v.set_column(j, &col);
            }
        }
        start = end;
    }
}

fn pencil(u: &ComplexMatrix, phi: f64) -> ComplexMatrix {
    let w = C64::from_polar(1.0, -phi);
    let a = u.scale(w);
    a.hermitian_part()
}

/// Groups indices of ascending `values` into runs whose consecutive gaps are
/// below `gap`.
fn clusters(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < gap {
            end += 1;
        }
        out.push(start..end);
        start = end;
    }
    out
}

fn principal_angle(z: C64) -> f64 {
    let t = z.arg();
    // ties at -1 are mapped to +π
    if t < -PI + 1e-12 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Eigendecomposition of a unitary matrix.
pub fn unitary_eig(u: &UnitaryMatrix) -> Result<UnitaryEigen> {
    let m = u.matrix();
    let n = m.n();
    let first = herm_eig(&pencil(m, PENCIL_PHASE))?;
    let mut vecs = first.vectors.matrix().clone();

    for range in clusters(&first.angles, PENCIL_CLUSTER) {
        let k = range.len();
        if k < 2 {
            continue;
        }
        // restrict u to the cluster subspace and split with a rotated pencil
        let mut basis = ComplexMatrix::zeros(n);
        let cols: Vec<Vec<C64>> = range.clone().map(|j| vecs.column(j)).collect();
        let mut w = ComplexMatrix::zeros(k);
        for a in 0..k {
            let ua: Vec<C64> = mat_vec(m, &cols[a]);
            for b in 0..k {
                w[(b, a)] = cols[b].iter().zip(&ua).map(|(x, y)| x.conj() * y).sum();
            }
        }
        let inner = herm_eig(&pencil(&w, PENCIL_PHASE + PI / 2.0))?;
        let r = inner.vectors.matrix();
        for (jj, j) in range.clone().enumerate() {
            let mut col = vec![C64::new(0.0, 0.0); n];
            for (b, cb) in cols.iter().enumerate() {
                let coef = r[(b, jj)];
                for i in 0..n {
                    col[i] += cb[i] * coef;
                }
            }
            basis.set_column(j, &col);
        }
        for j in range {
            vecs.set_column(j, &basis.column(j));
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|j| {
            let col = vecs.column(j);
            let uc = mat_vec(m, &col);
            let lambda: C64 = col.iter().zip(&uc).map(|(x, y)| x.conj() * y).sum();
            (principal_angle(lambda), col)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let angles: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (j, (_, col)) in pairs.iter().enumerate() {
        vectors.set_column(j, col);
    }
    reorthonormalize_clusters(&mut vectors, &angles, CLUSTER_GAP);
    let branch_ambiguous = angles.iter().any(|&t| (C64::from_polar(1.0, t) + 1.0).norm() <= BRANCH_TOL);
    Ok(UnitaryEigen { angles, vectors: UnitaryMatrix::from_trusted(vectors), branch_ambiguous })
}

fn mat_vec(m: &ComplexMatrix, x: &[C64]) -> Vec<C64> {
    let n = m.n();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// Principal logarithm of a unitary.
#[derive(Clone, Debug)]
pub struct LogResult {
    pub value: SkewHermitian,
    pub branch_ambiguous: bool,
}

/// Principal logarithm with eigenangles in `(−π, π]`.
pub fn unitary_log(u: &UnitaryMatrix) -> Result<LogResult> {
    let eig = unitary_eig(u)?;
    let x = eig.apply(|t| C64::new(0.0, t));
    Ok(LogResult { value: SkewHermitian::skew_part(&x), branch_ambiguous: eig.branch_ambiguous })
}

/// Exponential of a skew-Hermitian matrix through the spectrum of `−i·x`.
pub fn skew_exp(x: &SkewHermitian) -> Result<UnitaryMatrix> {
    let eig = herm_eig(&x.to_hermitian())?;
    Ok(UnitaryMatrix::from_trusted(eig.apply(|t| C64::from_polar(1.0, t))))
}
