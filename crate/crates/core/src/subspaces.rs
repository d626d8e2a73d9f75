//! Geodesic subspaces of `U_n`: `SU_n`, `SO_n`, and Grassmannians embedded as
//! symmetries `e_P = 2P − 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convexity::Grid;
use crate::error::{Error, Result};
use crate::matrix::{haar_sample_with, herm_eig, rng_from_seed, uniform, unitary_eig, ComplexMatrix, FinslerRng, NormOrder, SkewHermitian, UnitaryMatrix, C64};
use crate::metrics::{geodesic, relative_angles, MetricSpec};

pub const MEMBERSHIP_TOL: f64 = 1e-9;
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceSpec {
    FullUnitary,
    SpecialUnitary,
    SpecialOrthogonal,
    GrassmannSymmetries(usize),
}

impl SubspaceSpec {
    /// Real dimension of the subspace inside `U_n`.
    pub fn dimension(&self, n: usize) -> usize {
        match *self {
            SubspaceSpec::FullUnitary => n * n,
            SubspaceSpec::SpecialUnitary => n * n - 1,
            SubspaceSpec::SpecialOrthogonal => n * (n - 1) / 2,
            SubspaceSpec::GrassmannSymmetries(m) => 2 * m * n.saturating_sub(m),
        }
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        if let SubspaceSpec::GrassmannSymmetries(m) = *self {
            if m == 0 || m >= n {
                return Err(Error::InvalidArgument(format!("Grassmann rank must satisfy 0 < m < n, got m = {m}, n = {n}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SubspaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceSpec::FullUnitary => write!(f, "U"),
            SubspaceSpec::SpecialUnitary => write!(f, "SU"),
            SubspaceSpec::SpecialOrthogonal => write!(f, "SO"),
            SubspaceSpec::GrassmannSymmetries(m) => write!(f, "Gr:{m}"),
        }
    }
}

impl FromStr for SubspaceSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "U" => Ok(SubspaceSpec::FullUnitary),
            "SU" => Ok(SubspaceSpec::SpecialUnitary),
            "SO" => Ok(SubspaceSpec::SpecialOrthogonal),
            other => {
                let m = other
                    .strip_prefix("Gr:")
                    .and_then(|m| m.parse::<usize>().ok())
                    .filter(|&m| m > 0)
                    .ok_or_else(|| Error::Parse(format!("unrecognized subspace '{other}'")))?;
                Ok(SubspaceSpec::GrassmannSymmetries(m))
            }
        }
    }
}

impl Serialize for SubspaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubspaceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Orthogonal projection `P = P* = P²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix(ComplexMatrix);

impl ProjectionMatrix {
    pub fn new(p: ComplexMatrix) -> Result<Self> {
        let herm = p.hermitian_defect();
        let idem = (&(&p * &p) - &p).max_abs();
        let defect = herm.max(idem);
        if defect > PROJECTION_TOL {
            return Err(Error::NotAProjection(defect));
        }
        Ok(Self(p.hermitian_part()))
    }

    /// Projection onto the span of the given orthonormal columns of `v`.
    pub fn onto_columns(v: &UnitaryMatrix, cols: usize) -> Self {
        let n = v.n();
        let mut p = ComplexMatrix::zeros(n);
        for k in 0..cols {
            let c = v.matrix().column(k);
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += c[i] * c[j].conj();
                }
            }
        }
        Self(p.hermitian_part())
    }

    /// Projection onto the first `m` coordinates.
    pub fn coordinate(n: usize, m: usize) -> Self {
        let d: Vec<f64> = (0..n).map(|i| if i < m { 1.0 } else { 0.0 }).collect();
        Self(ComplexMatrix::from_real_diag(&d))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// Number of eigenvalues at least ½.
    pub fn rank(&self) -> usize {
        herm_eig(&self.0).map(|e| e.angles.iter().filter(|&&l| l >= 0.5).count()).unwrap_or(0)
    }
}

impl Serialize for ProjectionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Eigenvalue count near `+1` when every eigenvalue of `u` is within `tol` of `±1`.
pub fn symmetry_rank(u: &UnitaryMatrix, tol: f64) -> Option<usize> {
    let e = unitary_eig(u).ok()?;
    let mut plus = 0;
    for &t in &e.angles {
        let z = C64::from_polar(1.0, t);
        if (z - 1.0).norm() <= tol {
            plus += 1;
        } else if (z + 1.0).norm() > tol {
            return None;
        }
    }
    Some(plus)
}

/// Largest distance from an eigenvalue of `u` to `{−1, +1}`.
pub fn symmetry_defect(u: &UnitaryMatrix) -> Result<f64> {
    let e = unitary_eig(u)?;
    Ok(e.angles
        .iter()
        .map(|&t| {
            let z = C64::from_polar(1.0, t);
            (z - 1.0).norm().min((z + 1.0).norm())
        })
        .fold(0.0, f64::max))
}

pub fn belongs(u: &UnitaryMatrix, s: SubspaceSpec) -> bool {
    match s {
        SubspaceSpec::FullUnitary => true,
        SubspaceSpec::SpecialUnitary => (u.det() - 1.0).norm() <= MEMBERSHIP_TOL,
        SubspaceSpec::SpecialOrthogonal => (u.det() - 1.0).norm() <= MEMBERSHIP_TOL && u.matrix().max_imag() <= MEMBERSHIP_TOL,
        SubspaceSpec::GrassmannSymmetries(m) => m > 0 && m < u.n() && symmetry_rank(u, MEMBERSHIP_TOL) == Some(m),
    }
}

pub fn symmetry_embed(p: &ProjectionMatrix) -> Result<UnitaryMatrix> {
    let e = &p.matrix().scale_real(2.0) - &ComplexMatrix::identity(p.n());
    UnitaryMatrix::new(e.hermitian_part())
}

/// `P = (e + 1)/2` for a symmetry `e`.
pub fn symmetry_extract(e: &UnitaryMatrix) -> Result<ProjectionMatrix> {
    if symmetry_rank(e, MEMBERSHIP_TOL).is_none() {
        return Err(Error::NotASymmetry);
    }
    let p = (e.matrix() + &ComplexMatrix::identity(e.n())).scale_real(0.5);
    ProjectionMatrix::new(p.hermitian_part())
}

/// Projects a skew-Hermitian `x` onto the directions `s` for which `c·e^{ts}`
/// stays in the subspace.
pub fn tangent_projection(s: SubspaceSpec, c: &UnitaryMatrix, x: &SkewHermitian) -> SkewHermitian {
    let n = x.n();
    match s {
        SubspaceSpec::FullUnitary => x.clone(),
        SubspaceSpec::SpecialUnitary => {
            let shift = x.matrix().trace() / n as f64;
            let mut m = x.matrix().clone();
            for i in 0..n {
                m[(i, i)] -= shift;
            }
            SkewHermitian::skew_part(&m)
        }
        SubspaceSpec::SpecialOrthogonal => {
            let mut m = x.matrix().clone();
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = C64::new(m[(i, j)].re, 0.0);
                }
            }
            SkewHermitian::skew_part(&m)
        }
        SubspaceSpec::GrassmannSymmetries(_) => {
            // directions anticommuting with the symmetry c
            let cm = c.matrix();
            let cxc = &(cm * x.matrix()) * cm;
            SkewHermitian::skew_part(&(x.matrix() - &cxc).scale_real(0.5))
        }
    }
}

/// Frobenius-orthonormal basis of the tangent directions of `s` at `c`.
pub fn tangent_basis(s: SubspaceSpec, c: &UnitaryMatrix) -> Vec<SkewHermitian> {
    let n = c.n();
    let mut spanning = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut m = ComplexMatrix::zeros(n);
        m[(i, i)] = C64::new(0.0, 1.0);
        spanning.push(m);
        for j in i + 1..n {
            let mut a = ComplexMatrix::zeros(n);
            a[(i, j)] = C64::new(1.0, 0.0);
            a[(j, i)] = C64::new(-1.0, 0.0);
            spanning.push(a);
            let mut b = ComplexMatrix::zeros(n);
            b[(i, j)] = C64::new(0.0, 1.0);
            b[(j, i)] = C64::new(0.0, 1.0);
            spanning.push(b);
        }
    }
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for m in spanning {
        let mut v = tangent_projection(s, c, &SkewHermitian::skew_part(&m)).matrix().clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.inner(&v);
                v = &v - &b.scale_real(proj);
            }
        }
        let norm = v.frobenius_norm();
        if norm > 1e-8 {
            basis.push(v.scale_real(1.0 / norm));
        }
    }
    basis.into_iter().map(|b| SkewHermitian::skew_part(&b)).collect()
}

/// Whether the minimal geodesic `u → v` stays inside `s` at the sampled nodes.
pub fn geodesic_closure_check(s: SubspaceSpec, u: &UnitaryMatrix, v: &UnitaryMatrix, grid: &Grid) -> Result<bool> {
    if !belongs(u, s) || !belongs(v, s) {
        return Err(Error::EndpointsNotInSubspace(s.to_string()));
    }
    let seg = match geodesic(u, v) {
        Ok(g) => g,
        Err(Error::NonUniqueGeodesic) => return Err(Error::AntipodalEndpoints),
        Err(e) => return Err(e),
    };
    if s == SubspaceSpec::SpecialUnitary && seg.direction().matrix().trace().norm() > MEMBERSHIP_TOL {
        return Ok(false);
    }
    Ok(grid.points().iter().all(|&t| belongs(&seg.eval_extended(t), s)))
}

/// Spectral distance to `{±1}` along the geodesic between two symmetries,
/// maximized over the sampled parameters.
pub fn symmetry_geodesic_defect(u: &UnitaryMatrix, v: &UnitaryMatrix, ts: &[f64]) -> Result<f64> {
    let seg = match geodesic(u, v) {
        Ok(g) => g,
        Err(Error::NonUniqueGeodesic) => return Err(Error::AntipodalEndpoints),
        Err(e) => return Err(e),
    };
    let mut worst: f64 = 0.0;
    for &t in ts {
        worst = worst.max(symmetry_defect(&seg.eval_extended(t))?);
    }
    Ok(worst)
}

/// Agreement between subspace-intrinsic and ambient balls.
#[derive(Clone, Debug, Serialize)]
pub struct BallConsistencyReport {
    pub subspace: SubspaceSpec,
    pub radius: f64,
    pub trials: usize,
    pub disagreements: usize,
    pub closure_failures: usize,
    pub max_distance_gap: f64,
}

const CONSISTENCY_TOL: f64 = 1e-9;

/// Random tangent direction of `s` at `c` with unit operator norm.
pub fn random_tangent(s: SubspaceSpec, c: &UnitaryMatrix, rng: &mut FinslerRng) -> SkewHermitian {
    let basis = tangent_basis(s, c);
    let mut x = ComplexMatrix::zeros(c.n());
    for b in &basis {
        x = &x + &b.matrix().scale_real(crate::matrix::random::gaussian(rng));
    }
    let norm = x.op_norm();
    SkewHermitian::skew_part(&x.scale_real(1.0 / norm))
}

/// Samples points `u·e^{x}` of `s` around `u` and compares the length of the
/// subspace geodesic with ambient distances in `d_2` and `d_∞`, the induced
/// ball membership at radius `r`, and geodesic closure between sample pairs.
pub fn subspace_ball_consistency(s: SubspaceSpec, u: &UnitaryMatrix, r: f64, trials: usize, seed: u64) -> Result<BallConsistencyReport> {
    s.validate_for(u.n())?;
    if !belongs(u, s) {
        return Err(Error::NotInSubspace(s.to_string()));
    }
    let mut rng = rng_from_seed(seed);
    let mut report = BallConsistencyReport { subspace: s, radius: r, trials, disagreements: 0, closure_failures: 0, max_distance_gap: 0.0 };
    let closure_grid = Grid::over(0.0, 1.0, 9)?;
    let metrics = [MetricSpec::riemannian(), MetricSpec::OperatorInf];
    for _ in 0..trials {
        let mut pts = Vec::with_capacity(2);
        for _ in 0..2 {
            let x = random_tangent(s, u, &mut rng).scale(uniform(&mut rng, 0.0, 1.5) * r);
            let angles = herm_eig(&x.to_hermitian())?.angles;
            let v = crate::metrics::GeodesicSegment::new(u.clone(), x, (0.0, 1.0))?.eval_extended(1.0);
            let (ambient, _) = relative_angles(u, &v)?;
            let mut bad = false;
            for m in metrics {
                let intrinsic = m.from_angles(&angles);
                let outer = m.from_angles(&ambient);
                let gap = (intrinsic - outer).abs();
                report.max_distance_gap = report.max_distance_gap.max(gap);
                let near_boundary = (intrinsic - r).abs() <= CONSISTENCY_TOL;
                if gap > CONSISTENCY_TOL || (!near_boundary && (intrinsic <= r) != (outer <= r)) {
                    bad = true;
                }
            }
            report.disagreements += bad as usize;
            pts.push(v);
        }
        match geodesic_closure_check(s, &pts[0], &pts[1], &closure_grid) {
            Ok(true) => {}
            Ok(false) => report.closure_failures += 1,
            Err(Error::AntipodalEndpoints) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Haar-random element of `SU_n`.
pub fn random_special_unitary(n: usize, rng: &mut FinslerRng) -> UnitaryMatrix {
    let u = haar_sample_with(n, rng);
    let phase = u.det().arg() / n as f64;
    UnitaryMatrix::from_trusted(u.matrix().scale(C64::from_polar(1.0, -phase)))
}

/// Random rotation in `SO_n`, from real Gaussian columns.
pub fn random_special_orthogonal(n: usize, rng: &mut FinslerRng) -> UnitaryMatrix {
    let mut g = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = C64::new(crate::matrix::random::gaussian(rng), 0.0);
        }
    }
    let mut q = crate::matrix::random::orthonormalize_columns(&g);
    if q.det().re < 0.0 {
        let c: Vec<C64> = q.column(0).iter().map(|z| -z).collect();
        q.set_column(0, &c);
    }
    UnitaryMatrix::from_trusted(q)
}

/// Rank-`m` projection onto a Haar-random subspace.
pub fn random_projection(n: usize, m: usize, rng: &mut FinslerRng) -> ProjectionMatrix {
    ProjectionMatrix::onto_columns(&haar_sample_with(n, rng), m)
}

/// Random element of `s` at dimension `n`.
pub fn random_element(s: SubspaceSpec, n: usize, rng: &mut FinslerRng) -> UnitaryMatrix {
    match s {
        SubspaceSpec::FullUnitary => haar_sample_with(n, rng),
        SubspaceSpec::SpecialUnitary => random_special_unitary(n, rng),
        SubspaceSpec::SpecialOrthogonal => random_special_orthogonal(n, rng),
        SubspaceSpec::GrassmannSymmetries(m) => symmetry_embed(&random_projection(n, m, rng)).expect("projection is valid"),
    }
}

/// Operator-norm distance `‖x‖_∞` helper for tangent vectors.
pub fn tangent_norm(x: &SkewHermitian) -> f64 {
    x.norm(NormOrder::Inf)
}
