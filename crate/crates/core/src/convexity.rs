//! Numerical convexity checks along geodesics: distance profiles, extreme
//! eigenangles, strong-convexity bounds, numerical-range floors and ball probes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{herm_eig, random_unit_direction, rng_from_seed, uniform, unitary_eig, FinslerRng, SkewHermitian, UnitaryMatrix};
use crate::metrics::{geodesic, relative_angles, GeodesicSegment, MetricSpec};

/// Default number of grid nodes.
pub const DEFAULT_NODES: usize = 201;

/// Uniform grid `start + k·step`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    /// `count` nodes spanning `[lo, hi]`, endpoints included.
    pub fn over(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 3 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("grid needs at least 3 nodes on a non-empty interval, got {count} on [{lo}, {hi}]")));
        }
        Ok(Self { start: lo, step: (hi - lo) / (count - 1) as f64, count })
    }

    /// `count` nodes with spacing `h` centered at `t0`.
    pub fn centered(t0: f64, h: f64, count: usize) -> Result<Self> {
        let half = (count.saturating_sub(1)) as f64 / 2.0 * h;
        Self::over(t0 - half, t0 + half, count)
    }

    /// The default grid over a segment's parameter range.
    pub fn for_segment(seg: &GeodesicSegment) -> Result<Self> {
        let (a, b) = seg.t_range();
        Self::over(a, b, DEFAULT_NODES)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.start + self.step * k as f64).collect()
    }
}

fn second_differences(values: &[f64], h: f64) -> Vec<f64> {
    values.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h)).collect()
}

fn convexity_tol(values: &[f64]) -> f64 {
    1e-6 * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Samples of `f(t) = m(u, β(t))^power` with interior second differences.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub second_differences: Vec<f64>,
    pub metric: MetricSpec,
    pub power: f64,
    pub step: f64,
}

impl ConvexityProfile {
    pub fn min_second_difference(&self) -> f64 {
        self.second_differences.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `10⁻⁶·max(1, max|f|)`.
    pub fn tolerance(&self) -> f64 {
        convexity_tol(&self.values)
    }

    pub fn is_convex(&self) -> bool {
        self.min_second_difference() >= -self.tolerance()
    }

    /// Interior nodes whose second difference is below `−tolerance`.
    pub fn violations(&self) -> usize {
        let tol = self.tolerance();
        self.second_differences.iter().filter(|&&d| d < -tol).count()
    }

    /// Columns `t,value,second_difference`; the boundary rows leave the last column empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,second_difference\n");
        for (k, (t, v)) in self.grid.iter().zip(&self.values).enumerate() {
            let d = if k == 0 || k + 1 == self.grid.len() { String::new() } else { format!("{:e}", self.second_differences[k - 1]) };
            let _ = writeln!(out, "{t:e},{v:e},{d}");
        }
        out
    }
}

fn distance_power(u: &UnitaryMatrix, w: &UnitaryMatrix, t: f64, m: MetricSpec, power: f64) -> Result<f64> {
    let (angles, ambiguous) = relative_angles(u, w)?;
    if ambiguous {
        return Err(Error::BranchCrossing(t));
    }
    let d = m.from_angles(&angles);
    Ok(if power == power.round() && power.abs() < 64.0 { d.powi(power as i32) } else { d.powf(power) })
}

/// Profile of `t ↦ m(u, seg(t))^power` on `grid`.
pub fn profile(u: &UnitaryMatrix, seg: &GeodesicSegment, m: MetricSpec, power: f64, grid: &Grid) -> Result<ConvexityProfile> {
    let m = m.validate()?;
    if !(power > 0.0) {
        return Err(Error::InvalidArgument(format!("power must be positive, got {power}")));
    }
    if u.n() != seg.base().n() {
        return Err(Error::DimensionMismatch(u.n(), seg.base().n()));
    }
    let ts = grid.points();
    let values = ts.iter().map(|&t| distance_power(u, &seg.eval_extended(t), t, m, power)).collect::<Result<Vec<_>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let second_differences = second_differences(&values, grid.step);
    Ok(ConvexityProfile { grid: ts, values, second_differences, metric: m, power, step: grid.step })
}

/// `(f(a) + f(b))/2 − f((a + b)/2)` over the segment's parameter range.
pub fn midpoint_gap(u: &UnitaryMatrix, seg: &GeodesicSegment, m: MetricSpec, power: f64) -> Result<f64> {
    let (a, b) = seg.t_range();
    let mid = 0.5 * (a + b);
    let f = |t: f64| distance_power(u, &seg.eval_extended(t), t, m, power);
    Ok(0.5 * (f(a)? + f(b)?) - f(mid)?)
}

/// Strict convexity at the midpoint, with gap above `1e-12`.
pub const STRICTNESS_TOL: f64 = 1e-12;

pub fn midpoint_strict(u: &UnitaryMatrix, seg: &GeodesicSegment, m: MetricSpec, power: f64) -> Result<bool> {
    Ok(midpoint_gap(u, seg, m, power)? > STRICTNESS_TOL)
}

/// Outcome of a strong-convexity test for `d_2(u, β(t))²`.
#[derive(Clone, Debug, Serialize)]
pub struct StrongConvexityRecord {
    pub radius: f64,
    pub speed: f64,
    pub min_second_diff: f64,
    /// `c²·sin(2r)/(2r)`.
    pub lambda_statement: f64,
    /// `c·sin(2r)/(2r)`.
    pub lambda_proof: f64,
    /// Smaller of the two, used for `pass`.
    pub lambda_bound: f64,
    pub pass_statement: bool,
    pub pass: bool,
}

pub const STRONG_CONVEXITY_TOL: f64 = 1e-4;
const BALL_SAMPLES: usize = 64;
const BALL_SLACK: f64 = 1e-8;

/// Checks `f″ ≥ λ` for `f = d_2(u, seg(t))²` on a segment inside `B_∞[u, r]`.
pub fn strong_convexity_check(u: &UnitaryMatrix, seg: &GeodesicSegment, r: f64) -> Result<StrongConvexityRecord> {
    if !(r > 0.0 && r < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, π/2), got {r}")));
    }
    if seg.is_constant() {
        return Err(Error::ConstantSegment);
    }
    let (a, b) = seg.t_range();
    if !(b > a) {
        return Err(Error::ConstantSegment);
    }
    for k in 0..BALL_SAMPLES {
        let t = a + (b - a) * k as f64 / (BALL_SAMPLES - 1) as f64;
        let (angles, _) = relative_angles(u, &seg.eval_extended(t))?;
        let d = MetricSpec::OperatorInf.from_angles(&angles);
        if d > r + BALL_SLACK {
            return Err(Error::SegmentOutsideBall(d));
        }
    }
    let p = profile(u, seg, MetricSpec::riemannian(), 2.0, &Grid::for_segment(seg)?)?;
    let c = seg.speed(crate::matrix::NormOrder::P(2));
    let factor = (2.0 * r).sin() / (2.0 * r);
    let lambda_statement = c * c * factor;
    let lambda_proof = c * factor;
    let lambda_bound = lambda_statement.min(lambda_proof);
    let min_second_diff = p.min_second_difference();
    Ok(StrongConvexityRecord {
        radius: r,
        speed: c,
        min_second_diff,
        lambda_statement,
        lambda_proof,
        lambda_bound,
        pass_statement: min_second_diff >= lambda_statement - STRONG_CONVEXITY_TOL,
        pass: min_second_diff >= lambda_bound - STRONG_CONVEXITY_TOL,
    })
}

/// Extreme eigenangles of `u·e^{tx}` along a grid.
#[derive(Clone, Debug, Serialize)]
pub struct EigenangleTrace {
    pub grid: Vec<f64>,
    pub theta_max: Vec<f64>,
    pub theta_min: Vec<f64>,
    pub step: f64,
}

/// Convexity of `θ_max` and concavity of `θ_min`, both over the whole grid
/// and restricted to maximal runs where `θ_max − θ_min < π`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenangleVerdict {
    pub min_second_diff_max: f64,
    pub max_second_diff_min: f64,
    /// Whole-grid verdict, with no gap restriction.
    pub convex_max: bool,
    pub concave_min: bool,
    /// Verdict on gap-below-π runs with at least three nodes.
    pub restricted_pass: bool,
    pub restricted_runs: usize,
    pub restricted_nodes: usize,
}

impl EigenangleVerdict {
    /// Both whole-grid properties hold.
    pub fn plain_pass(&self) -> bool {
        self.convex_max && self.concave_min
    }
}

impl EigenangleTrace {
    pub fn verdict(&self) -> EigenangleVerdict {
        let h = self.step;
        let dmax = second_differences(&self.theta_max, h);
        let dmin = second_differences(&self.theta_min, h);
        let tol_max = convexity_tol(&self.theta_max);
        let tol_min = convexity_tol(&self.theta_min);
        let min_second_diff_max = dmax.iter().copied().fold(f64::INFINITY, f64::min);
        let max_second_diff_min = dmin.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let small_gap: Vec<bool> = self.theta_max.iter().zip(&self.theta_min).map(|(a, b)| a - b < std::f64::consts::PI).collect();
        let mut restricted_pass = true;
        let (mut runs, mut nodes) = (0, 0);
        let mut k = 0;
        while k < small_gap.len() {
            if !small_gap[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k < small_gap.len() && small_gap[k] {
                k += 1;
            }
            if k - start >= 3 {
                runs += 1;
                nodes += k - start;
                // interior nodes start+1..k-1 map to second-difference indices start..k-2
                for j in start..k - 2 {
                    if dmax[j] < -tol_max || dmin[j] > tol_min {
                        restricted_pass = false;
                    }
                }
            }
        }
        EigenangleVerdict {
            min_second_diff_max,
            max_second_diff_min,
            convex_max: min_second_diff_max >= -tol_max,
            concave_min: max_second_diff_min <= tol_min,
            restricted_pass,
            restricted_runs: runs,
            restricted_nodes: nodes,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,theta_max,theta_min\n");
        for ((t, a), b) in self.grid.iter().zip(&self.theta_max).zip(&self.theta_min) {
            let _ = writeln!(out, "{t:e},{a:e},{b:e}");
        }
        out
    }
}

/// Traces of `max` and `min` of the principal eigenangles of `u·e^{tx}`.
pub fn eigenangle_trace(u: &UnitaryMatrix, x: &SkewHermitian, grid: &Grid) -> Result<EigenangleTrace> {
    let seg = GeodesicSegment::new(u.clone(), x.clone(), (grid.start, grid.start + grid.step * (grid.count - 1) as f64))?;
    let ts = grid.points();
    let mut theta_max = Vec::with_capacity(ts.len());
    let mut theta_min = Vec::with_capacity(ts.len());
    for &t in &ts {
        let e = unitary_eig(&seg.eval_extended(t))?;
        if e.branch_ambiguous {
            return Err(Error::SpectrumHitsMinusOne(t));
        }
        theta_max.push(e.angles.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        theta_min.push(e.angles.iter().copied().fold(f64::INFINITY, f64::min));
    }
    Ok(EigenangleTrace { grid: ts, theta_max, theta_min, step: grid.step })
}

fn min_real_part_floor(w: &UnitaryMatrix) -> Result<f64> {
    let h = w.matrix() + &w.matrix().adjoint();
    Ok(herm_eig(&h.hermitian_part())?.angles[0])
}

/// Whether `λ_min(w + w⁻¹) ≥ c` along `w(t) = v·e^{tx}`, `t ∈ [0, 1]`.
pub fn numerical_range_floor(v: &UnitaryMatrix, x: &SkewHermitian, c: f64, grid: &Grid) -> Result<bool> {
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("floor must be nonnegative, got {c}")));
    }
    let len = x.matrix().op_norm();
    if len >= std::f64::consts::PI {
        return Err(Error::DirectionTooLong(len));
    }
    let seg = GeodesicSegment::new(v.clone(), x.clone(), (0.0, 1.0))?;
    for t in [0.0, 1.0] {
        let floor = min_real_part_floor(&seg.eval_extended(t))?;
        if floor < c - 1e-10 {
            return Err(Error::EndpointViolatesFloor(floor));
        }
    }
    for t in grid.points() {
        if min_real_part_floor(&seg.eval_extended(t))? < c - 1e-8 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest excursion of a geodesic outside a closed ball.
#[derive(Clone, Debug, Serialize)]
pub struct PairProbe {
    pub excursion: f64,
    pub violation: bool,
}

/// Ball-convexity sampling summary.
#[derive(Clone, Debug, Serialize)]
pub struct BallProbeReport {
    pub metric: MetricSpec,
    pub radius: f64,
    pub trials: usize,
    pub violations: usize,
    /// Largest `d(center, γ(t)) − r` seen; negative when every sample was inside.
    pub worst_excursion: f64,
    /// Pairs skipped because the endpoints were antipodal.
    pub skipped: usize,
}

pub const PROBE_SAMPLES: usize = 65;
pub const PROBE_TOL: f64 = 1e-9;

/// Tests whether the minimal geodesic `v1 → v2` stays in `B_m[center, r]`.
pub fn probe_pair(center: &UnitaryMatrix, r: f64, m: MetricSpec, v1: &UnitaryMatrix, v2: &UnitaryMatrix) -> Result<PairProbe> {
    let seg = geodesic(v1, v2)?;
    let mut excursion = f64::NEG_INFINITY;
    for k in 0..PROBE_SAMPLES {
        let t = k as f64 / (PROBE_SAMPLES - 1) as f64;
        let (angles, _) = relative_angles(center, &seg.eval_extended(t))?;
        excursion = excursion.max(m.from_angles(&angles) - r);
    }
    Ok(PairProbe { excursion, violation: excursion > PROBE_TOL * r.max(1.0) })
}

/// Random point at `m`-distance `rho` from `center`, along a random direction.
pub fn sample_at_distance(center: &UnitaryMatrix, rho: f64, m: MetricSpec, rng: &mut FinslerRng) -> UnitaryMatrix {
    let x = random_unit_direction(center.n(), rng);
    if rho <= 0.0 {
        return center.clone();
    }
    let angles = herm_eig(&x.to_hermitian()).expect("skew-Hermitian input").angles;
    let at = |s: f64| m.from_angles(&angles.iter().map(|a| a * s).collect::<Vec<_>>());
    // m ≥ d_∞ = s for a unit operator-norm direction, so the root lies in [0, rho]
    let (mut lo, mut hi) = (0.0, rho);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * rho {
            break;
        }
    }
    let seg = GeodesicSegment::new(center.clone(), x, (0.0, lo)).expect("dimensions agree");
    seg.eval_extended(lo)
}

/// Samples `trials` pairs in the closed ball `B_m[center, r]` and checks the
/// connecting geodesics at a dense grid.
pub fn ball_convexity_probe(center: &UnitaryMatrix, r: f64, m: MetricSpec, trials: usize, seed: u64) -> Result<BallProbeReport> {
    let m = m.validate()?;
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative radius {r}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut report = BallProbeReport { metric: m, radius: r, trials, violations: 0, worst_excursion: f64::NEG_INFINITY, skipped: 0 };
    for _ in 0..trials {
        // weight radii toward the boundary, where violations would appear first
        let r1 = r * uniform(&mut rng, 0.0, 1.0).powf(0.25);
        let r2 = r * uniform(&mut rng, 0.0, 1.0).powf(0.25);
        let v1 = sample_at_distance(center, r1, m, &mut rng);
        let v2 = sample_at_distance(center, r2, m, &mut rng);
        match probe_pair(center, r, m, &v1, &v2) {
            Ok(p) => {
                report.worst_excursion = report.worst_excursion.max(p.excursion);
                report.violations += p.violation as usize;
            }
            Err(Error::NonUniqueGeodesic) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{haar_sample, ComplexMatrix, C64};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn grid_is_uniform() {
        let g = Grid::over(-1.0, 1.0, 201).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 201);
        assert!((pts[200] - 1.0).abs() < 1e-12);
        assert!(Grid::over(0.0, 1.0, 2).is_err());
        let c = Grid::centered(0.0, 1e-3, 201).unwrap();
        assert!((c.step - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn own_line_profile_is_power() {
        // f(t) = c^p |t|^p when u lies on the geodesic itself
        let u = haar_sample(3, 3);
        let x = SkewHermitian::from_hermitian(&haar_sample(3, 4).conjugate(&ComplexMatrix::from_real_diag(&[0.3, -0.2, 0.1])));
        let seg = GeodesicSegment::new(u.clone(), x.clone(), (-1.0, 1.0)).unwrap();
        let c = x.norm(crate::matrix::NormOrder::P(4));
        let p = profile(&u, &seg, MetricSpec::SchattenP(4), 4.0, &Grid::for_segment(&seg).unwrap()).unwrap();
        for (t, v) in p.grid.iter().zip(&p.values) {
            assert!((v - c.powi(4) * t.powi(4)).abs() < 1e-12);
        }
        assert!(p.is_convex());
        assert_eq!(p.violations(), 0);
    }

    #[test]
    fn constant_segment_profile() {
        let u = haar_sample(2, 1);
        let seg = GeodesicSegment::new(haar_sample(2, 2), SkewHermitian::zeros(2), (0.0, 1.0)).unwrap();
        let p = profile(&u, &seg, MetricSpec::SchattenP(2), 2.0, &Grid::for_segment(&seg).unwrap()).unwrap();
        assert!(p.second_differences.iter().all(|d| d.abs() < 1e-6));
        assert!(p.is_convex());
        assert!(p.to_csv().starts_with("t,value,second_difference\n"));
    }

    #[test]
    fn branch_crossing_detected() {
        let u = UnitaryMatrix::identity(1);
        let seg = GeodesicSegment::new(u.clone(), SkewHermitian::from_angles(&[PI]), (0.0, 1.0)).unwrap();
        let r = profile(&u, &seg, MetricSpec::SchattenP(2), 2.0, &Grid::over(0.0, 1.0, 11).unwrap());
        assert!(matches!(r, Err(Error::BranchCrossing(_))));
    }

    #[test]
    fn scalar_strong_convexity() {
        // f(t) = t², f'' = 2 ≥ sin(2r)/(2r)
        let r = 1.2;
        let seg = GeodesicSegment::new(UnitaryMatrix::identity(1), SkewHermitian::from_angles(&[1.0]), (-r, r)).unwrap();
        let rec = strong_convexity_check(&UnitaryMatrix::identity(1), &seg, r).unwrap();
        assert!((rec.min_second_diff - 2.0).abs() < 1e-6);
        assert!((rec.lambda_statement - (2.4f64).sin() / 2.4).abs() < 1e-12);
        assert!(rec.pass && rec.pass_statement);
    }

    #[test]
    fn commuting_strong_convexity() {
        // logs commute: f(t) = ‖v + tz‖₂², so f'' = 2‖z‖₂²
        let v = SkewHermitian::from_angles(&[0.3, -0.4, 0.2]);
        let z = SkewHermitian::from_angles(&[0.2, 0.1, -0.3]);
        let base = UnitaryMatrix::from_angles(&[0.3, -0.4, 0.2]);
        let seg = GeodesicSegment::new(base, z.clone(), (-1.0, 1.0)).unwrap();
        let rec = strong_convexity_check(&UnitaryMatrix::identity(3), &seg, 1.2).unwrap();
        let z2 = z.matrix().frobenius_norm().powi(2);
        assert!((rec.min_second_diff - 2.0 * z2).abs() < 1e-6);
        assert!(rec.pass_statement);
        let _ = v;
    }

    #[test]
    fn strong_convexity_errors() {
        let u = UnitaryMatrix::identity(1);
        let seg = GeodesicSegment::new(u.clone(), SkewHermitian::zeros(1), (0.0, 1.0)).unwrap();
        assert!(matches!(strong_convexity_check(&u, &seg, 1.0), Err(Error::ConstantSegment)));
        let seg = GeodesicSegment::new(u.clone(), SkewHermitian::from_angles(&[1.0]), (0.0, 1.5)).unwrap();
        assert!(matches!(strong_convexity_check(&u, &seg, 1.0), Err(Error::SegmentOutsideBall(_))));
    }

    fn rotation_family(theta: f64) -> (UnitaryMatrix, SkewHermitian) {
        let u = UnitaryMatrix::from_angles(&[theta, -theta]);
        let x = SkewHermitian::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap()).unwrap();
        (u, x)
    }

    #[test]
    fn rotation_family_convex() {
        let (u, x) = rotation_family(PI / 3.0);
        let tr = eigenangle_trace(&u, &x, &Grid::over(-0.5, 0.5, 201).unwrap()).unwrap();
        for (t, a) in tr.grid.iter().zip(&tr.theta_max) {
            // eigenvalues cos θ cos t ± i√(1 − (cos θ cos t)²)
            assert!((a - ((PI / 3.0).cos() * t.cos()).acos()).abs() < 1e-10);
        }
        let v = tr.verdict();
        assert!(v.convex_max && v.restricted_pass && v.restricted_runs == 1);
    }

    #[test]
    fn rotation_family_beyond_right_angle_fails() {
        let (u, x) = rotation_family(FRAC_PI_2 + 0.05);
        let tr = eigenangle_trace(&u, &x, &Grid::over(-0.05, 0.05, 101).unwrap()).unwrap();
        let v = tr.verdict();
        assert!(!v.convex_max);
        assert!(v.min_second_diff_max < -1e-2);
        assert_eq!(v.restricted_runs, 0);
    }

    #[test]
    fn diagonal_trace_affine() {
        let u = UnitaryMatrix::from_angles(&[0.2, -0.1]);
        let x = SkewHermitian::from_angles(&[0.5, 0.3]);
        let tr = eigenangle_trace(&u, &x, &Grid::over(0.0, 1.0, 51).unwrap()).unwrap();
        let v = tr.verdict();
        assert!(v.min_second_diff_max.abs() < 1e-6 && v.max_second_diff_min.abs() < 1e-6);
        assert!(v.plain_pass());
    }

    #[test]
    fn spectrum_hitting_minus_one() {
        let u = UnitaryMatrix::identity(1);
        let x = SkewHermitian::from_angles(&[PI]);
        let r = eigenangle_trace(&u, &x, &Grid::over(0.0, 1.0, 11).unwrap());
        assert!(matches!(r, Err(Error::SpectrumHitsMinusOne(_))));
    }

    #[test]
    fn floor_examples() {
        let g = Grid::over(0.0, 1.0, 101).unwrap();
        let x = SkewHermitian::from_hermitian(&haar_sample(3, 6).conjugate(&ComplexMatrix::from_real_diag(&[0.1, -0.05, 0.02])));
        assert!(numerical_range_floor(&UnitaryMatrix::identity(3), &x, 0.0, &g).unwrap());
        // scalar arc from angle a to b inside |angle| ≤ arccos(c/2)
        let (a, b, c) = (-0.8, 1.1, 0.5);
        assert!((c / 2.0f64).acos() > 1.1);
        let ok = numerical_range_floor(&UnitaryMatrix::from_angles(&[a]), &SkewHermitian::from_angles(&[b - a]), c, &g).unwrap();
        assert!(ok);
        let long = SkewHermitian::from_angles(&[PI]);
        assert!(matches!(numerical_range_floor(&UnitaryMatrix::identity(1), &long, 0.0, &g), Err(Error::DirectionTooLong(_))));
        let far = UnitaryMatrix::from_angles(&[1.5]);
        assert!(matches!(
            numerical_range_floor(&far, &SkewHermitian::from_angles(&[0.1]), 1.0, &g),
            Err(Error::EndpointViolatesFloor(_))
        ));
        let _ = C64::new(0.0, 0.0);
    }

    #[test]
    fn zero_radius_probe() {
        let rep = ball_convexity_probe(&haar_sample(2, 9), 0.0, MetricSpec::SchattenP(4), 10, 1).unwrap();
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn scalar_probe_beyond_right_angle() {
        let r = FRAC_PI_2 + 0.1;
        let v1 = UnitaryMatrix::from_angles(&[FRAC_PI_2 + 0.05]);
        let v2 = UnitaryMatrix::from_angles(&[-(FRAC_PI_2 + 0.05)]);
        let p = probe_pair(&UnitaryMatrix::identity(1), r, MetricSpec::SchattenP(2), &v1, &v2).unwrap();
        assert!(p.violation);
        assert!((p.excursion - (PI - r)).abs() < 1e-9);
    }

    #[test]
    fn sampled_points_have_requested_distance() {
        let mut rng = rng_from_seed(3);
        let c = haar_sample(3, 1);
        for m in [MetricSpec::SchattenP(4), MetricSpec::PerturbedInf(0.1), MetricSpec::PerturbedP(4, 0.1)] {
            let v = sample_at_distance(&c, 1.3, m, &mut rng);
            assert!((crate::metrics::distance(&c, &v, m).unwrap() - 1.3).abs() < 1e-9);
        }
    }
}
