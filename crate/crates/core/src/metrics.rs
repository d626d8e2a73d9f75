//! Bi-invariant distances, geodesics, balls and metric comparisons.
//!
//! Every distance is a function of the principal eigenangles `θ_j` of
//! `u⁻¹v`: `d_p = (Σ|θ_j|^p)^{1/p}`, `d_∞ = max|θ_j|`, and the perturbed
//! metrics blend these with the Riemannian `d_2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{herm_eig, schatten_norm, unitary_eig, unitary_log, EigenSystem, NormOrder, SkewHermitian, UnitaryMatrix, C64};

/// `d_∞(u, v) ≤ 1e-10` counts as `u = v`.
pub const EQUALITY_TOL: f64 = 1e-10;

/// Selects one of the bi-invariant metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricSpec {
    SchattenP(u32),
    OperatorInf,
    PerturbedInf(f64),
    PerturbedP(u32, f64),
}

impl MetricSpec {
    pub fn validate(self) -> Result<Self> {
        let check_eps = |e: f64| {
            if e > 0.0 && e.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("perturbation must be positive, got {e}")))
            }
        };
        match self {
            MetricSpec::SchattenP(p) => {
                NormOrder::p(p)?;
            }
            MetricSpec::OperatorInf => {}
            MetricSpec::PerturbedInf(e) => check_eps(e)?,
            MetricSpec::PerturbedP(p, e) => {
                NormOrder::p(p)?;
                check_eps(e)?;
            }
        }
        Ok(self)
    }

    /// Riemannian metric `d_2`.
    pub fn riemannian() -> Self {
        MetricSpec::SchattenP(2)
    }

    /// Value of the metric between `u` and `v` given the principal angles of `u⁻¹v`.
    pub fn from_angles(&self, angles: &[f64]) -> f64 {
        let d2 = || NormOrder::P(2).of_magnitudes(angles);
        match *self {
            MetricSpec::SchattenP(p) => NormOrder::P(p).of_magnitudes(angles),
            MetricSpec::OperatorInf => NormOrder::Inf.of_magnitudes(angles),
            MetricSpec::PerturbedInf(eps) => {
                let dinf = NormOrder::Inf.of_magnitudes(angles);
                dinf.hypot(eps * d2())
            }
            MetricSpec::PerturbedP(p, eps) => {
                let dp = NormOrder::P(p).of_magnitudes(angles);
                let d2 = d2();
                let pf = p as f64;
                if dp == 0.0 {
                    return 0.0;
                }
                // (d_p^p + ε^p d_2^2)^{1/p}, scaled by d_p to avoid overflow
                dp * (1.0 + eps.powf(pf) * d2 * d2 / dp.powf(pf)).powf(1.0 / pf)
            }
        }
    }

    /// Exponent whose power of the distance is minimized by the circumcenter solver.
    pub fn objective_power(&self) -> u32 {
        match *self {
            MetricSpec::SchattenP(p) | MetricSpec::PerturbedP(p, _) => p,
            MetricSpec::PerturbedInf(_) => 2,
            MetricSpec::OperatorInf => 1,
        }
    }

    /// Power of the distance built directly from the angles, `d^power`.
    pub fn powered_from_angles(&self, angles: &[f64]) -> f64 {
        match *self {
            MetricSpec::SchattenP(p) => angles.iter().map(|t| t.powi(p as i32)).sum(),
            MetricSpec::PerturbedP(p, eps) => {
                let sp: f64 = angles.iter().map(|t| t.powi(p as i32)).sum();
                let s2: f64 = angles.iter().map(|t| t * t).sum();
                sp + eps.powi(p as i32) * s2
            }
            MetricSpec::PerturbedInf(eps) => {
                let m = NormOrder::Inf.of_magnitudes(angles);
                let s2: f64 = angles.iter().map(|t| t * t).sum();
                m * m + eps * eps * s2
            }
            MetricSpec::OperatorInf => NormOrder::Inf.of_magnitudes(angles),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            MetricSpec::PerturbedInf(e) | MetricSpec::PerturbedP(_, e) => Some(e),
            _ => None,
        }
    }

    /// The unperturbed metric underneath a perturbed one.
    pub fn base(&self) -> MetricSpec {
        match *self {
            MetricSpec::PerturbedInf(_) => MetricSpec::OperatorInf,
            MetricSpec::PerturbedP(p, _) => MetricSpec::SchattenP(p),
            m => m,
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::SchattenP(p) => write!(f, "p{p}"),
            MetricSpec::OperatorInf => write!(f, "inf"),
            MetricSpec::PerturbedInf(e) => write!(f, "inf+eps:{e}"),
            MetricSpec::PerturbedP(p, e) => write!(f, "p{p}+eps:{e}"),
        }
    }
}

impl FromStr for MetricSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognized metric '{s}'"));
        let (base, eps) = match s.split_once("+eps:") {
            Some((b, e)) => (b, Some(e.parse::<f64>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let spec = if base == "inf" {
            match eps {
                Some(e) => MetricSpec::PerturbedInf(e),
                None => MetricSpec::OperatorInf,
            }
        } else if let Some(p) = base.strip_prefix('p') {
            let p: u32 = p.parse().map_err(|_| bad())?;
            match eps {
                Some(e) => MetricSpec::PerturbedP(p, e),
                None => MetricSpec::SchattenP(p),
            }
        } else {
            return Err(bad());
        };
        spec.validate()
    }
}

impl Serialize for MetricSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MetricSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_dims(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<()> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch(u.n(), v.n()));
    }
    Ok(())
}

/// Principal angles of `u⁻¹v` and whether `−1` is (nearly) among its eigenvalues.
pub fn relative_angles(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<(Vec<f64>, bool)> {
    check_dims(u, v)?;
    let e = unitary_eig(&u.left_div(v))?;
    Ok((e.angles, e.branch_ambiguous))
}

/// Distance under `m` as the norm of the principal logarithm of `u⁻¹v`.
///
/// At the antipodal boundary the principal angle `π` is used; the distance is
/// well-defined there even though the minimal geodesic is not unique.
pub fn distance(u: &UnitaryMatrix, v: &UnitaryMatrix, m: MetricSpec) -> Result<f64> {
    let m = m.validate()?;
    let (angles, _) = relative_angles(u, v)?;
    Ok(m.from_angles(&angles))
}

/// `d_∞(u, v) ≤ 1e-10`.
pub fn approx_eq(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<bool> {
    Ok(distance(u, v, MetricSpec::OperatorInf)? <= EQUALITY_TOL)
}

/// The curve `t ↦ base·exp(t·direction)` over `t_range`.
#[derive(Clone, Debug)]
pub struct GeodesicSegment {
    base: UnitaryMatrix,
    direction: SkewHermitian,
    t_range: (f64, f64),
    nonunique: bool,
    spectrum: EigenSystem,
}

impl GeodesicSegment {
    pub fn new(base: UnitaryMatrix, direction: SkewHermitian, t_range: (f64, f64)) -> Result<Self> {
        if base.n() != direction.n() {
            return Err(Error::DimensionMismatch(base.n(), direction.n()));
        }
        if !(t_range.0 <= t_range.1) {
            return Err(Error::InvalidArgument(format!("empty parameter range {t_range:?}")));
        }
        let spectrum = herm_eig(&direction.to_hermitian())?;
        Ok(Self { base, direction, t_range, nonunique: false, spectrum })
    }

    pub fn base(&self) -> &UnitaryMatrix {
        &self.base
    }

    pub fn direction(&self) -> &SkewHermitian {
        &self.direction
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    /// True when the endpoints were antipodal and the principal branch was chosen.
    pub fn is_nonunique(&self) -> bool {
        self.nonunique
    }

    pub fn with_range(mut self, t_range: (f64, f64)) -> Self {
        self.t_range = t_range;
        self
    }

    /// Speed `‖direction‖_p`, constant along the curve.
    pub fn speed(&self, p: NormOrder) -> f64 {
        p.of_magnitudes(&self.spectrum.angles)
    }

    /// Length of the segment measured with `m`, `m(direction)·(t₁ − t₀)`.
    pub fn length(&self, m: MetricSpec) -> f64 {
        let (a, b) = self.t_range;
        let scaled: Vec<f64> = self.spectrum.angles.iter().map(|t| t * (b - a)).collect();
        m.from_angles(&scaled)
    }

    pub fn is_constant(&self) -> bool {
        self.spectrum.angles.iter().all(|t| t.abs() <= EQUALITY_TOL)
    }

    /// `exp(t·direction)` from the cached spectrum.
    pub fn flow(&self, t: f64) -> UnitaryMatrix {
        UnitaryMatrix::from_trusted(self.spectrum.apply(|l| C64::from_polar(1.0, t * l)))
    }

    /// Point at parameter `t`; errors outside `t_range`.
    pub fn eval(&self, t: f64) -> Result<UnitaryMatrix> {
        let (lo, hi) = self.t_range;
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if t < lo - slack || t > hi + slack {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        Ok(self.eval_extended(t))
    }

    /// Point at any `t` on the extended one-parameter curve.
    pub fn eval_extended(&self, t: f64) -> UnitaryMatrix {
        self.base.mul(&self.flow(t))
    }

    /// `n` equally spaced points over the range, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<UnitaryMatrix> {
        let (a, b) = self.t_range;
        let n = n.max(2);
        (0..n).map(|k| self.eval_extended(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
    }
}

/// Minimal geodesic `γ_{u,v}(t) = u·exp(t·log(u⁻¹v))` on `[0, 1]`.
pub fn geodesic(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<GeodesicSegment> {
    geodesic_with(u, v, false)
}

/// As [`geodesic`]; with `allow_nonunique` antipodal endpoints yield the
/// principal-branch segment, marked non-unique.
pub fn geodesic_with(u: &UnitaryMatrix, v: &UnitaryMatrix, allow_nonunique: bool) -> Result<GeodesicSegment> {
    check_dims(u, v)?;
    let log = unitary_log(&u.left_div(v))?;
    if log.branch_ambiguous && !allow_nonunique {
        return Err(Error::NonUniqueGeodesic);
    }
    let mut seg = GeodesicSegment::new(u.clone(), log.value, (0.0, 1.0))?;
    seg.nonunique = log.branch_ambiguous;
    Ok(seg)
}

/// Discrete length `Σ d_p(u_i, u_{i+1})` of a sampled curve.
pub fn curve_length(points: &[UnitaryMatrix], p: NormOrder) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let p = p.validate()?;
    let m = match p {
        NormOrder::P(k) => MetricSpec::SchattenP(k),
        NormOrder::Inf => MetricSpec::OperatorInf,
    };
    let mut total = 0.0;
    for (i, w) in points.windows(2).enumerate() {
        let (angles, ambiguous) = relative_angles(&w[0], &w[1])?;
        if ambiguous {
            return Err(Error::ConsecutivePointsAntipodal(i, i + 1));
        }
        total += m.from_angles(&angles);
    }
    Ok(total)
}

/// Open or closed metric ball.
#[derive(Clone, Debug)]
pub struct BallSpec {
    pub center: UnitaryMatrix,
    pub radius: f64,
    pub metric: MetricSpec,
    pub closed: bool,
}

impl BallSpec {
    pub fn open(center: UnitaryMatrix, radius: f64, metric: MetricSpec) -> Self {
        Self { center, radius, metric, closed: false }
    }

    pub fn closed(center: UnitaryMatrix, radius: f64, metric: MetricSpec) -> Self {
        Self { center, radius, metric, closed: true }
    }
}

pub const BALL_TOL: f64 = 1e-12;

pub fn ball_contains(ball: &BallSpec, v: &UnitaryMatrix) -> Result<bool> {
    if !(ball.radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative radius {}", ball.radius)));
    }
    let d = distance(&ball.center, v, ball.metric)?;
    // closed balls absorb rounding in the eigenangles of u⁻¹v
    Ok(if ball.closed { d <= ball.radius + BALL_TOL } else { d < ball.radius })
}

/// One inequality `lhs ≤ rhs` with slack `rhs − lhs`.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl InequalityCheck {
    pub fn new(name: &'static str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self { name, lhs, rhs, slack, pass: slack >= -tol }
    }
}

/// The norm chain `d_∞ ≤ d_p ≤ n^{1/p} d_∞` and the chordal comparison
/// `√(1 − π²/12)·d_p ≤ ‖u − v‖_p ≤ d_p`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub p: u32,
    pub d_inf: f64,
    pub d_p: f64,
    pub chord_p: f64,
    pub checks: [InequalityCheck; 4],
}

impl ComparisonReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn worst_slack(&self) -> f64 {
        self.checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min)
    }
}

pub const COMPARISON_TOL: f64 = 1e-9;

/// Chordal lower-bound constant `√(1 − π²/12)`.
pub fn chordal_constant() -> f64 {
    (1.0 - PI * PI / 12.0).sqrt()
}

pub fn comparison_report(u: &UnitaryMatrix, v: &UnitaryMatrix, p: u32) -> Result<ComparisonReport> {
    NormOrder::p(p)?;
    let (angles, _) = relative_angles(u, v)?;
    let n = u.n();
    let d_inf = MetricSpec::OperatorInf.from_angles(&angles);
    let d_p = MetricSpec::SchattenP(p).from_angles(&angles);
    let chord_p = schatten_norm(&(u.matrix() - v.matrix()), NormOrder::P(p))?;
    let root = (n as f64).powf(1.0 / p as f64);
    let checks = [
        InequalityCheck::new("d_inf <= d_p", d_inf, d_p, COMPARISON_TOL),
        InequalityCheck::new("d_p <= n^(1/p) d_inf", d_p, root * d_inf, COMPARISON_TOL),
        InequalityCheck::new("sqrt(1-pi^2/12) d_p <= |u-v|_p", chordal_constant() * d_p, chord_p, COMPARISON_TOL),
        InequalityCheck::new("|u-v|_p <= d_p", chord_p, d_p, COMPARISON_TOL),
    ];
    Ok(ComparisonReport { n, p, d_inf, d_p, chord_p, checks })
}
