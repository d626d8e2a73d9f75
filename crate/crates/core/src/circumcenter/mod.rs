//! Circumradius and circumcenters of finite point sets, and fixed points of
//! finite isometric actions `g ↦ a·g·b⁻¹`.
//!
//! The solver minimizes `F(c) = max_a d(c, a)^k` (`k` from
//! [`MetricSpec::objective_power`]) by sequential convex programming: at each
//! iterate it minimizes a convex tangent model exactly and moves along the
//! resulting geodesic with a backtracking line search on the true objective.

mod model;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{child_rng, unitary_log, ComplexMatrix, NormOrder, SkewHermitian, UnitaryMatrix, C64};
use crate::metrics::{distance, relative_angles, GeodesicSegment, MetricSpec};
use crate::subspaces::{belongs, random_tangent, tangent_basis, SubspaceSpec};
use model::{ModelKind, TangentModel};

/// Nonempty list of unitaries of one dimension.
#[derive(Clone, Debug, Serialize)]
pub struct PointSet {
    points: Vec<UnitaryMatrix>,
}

impl PointSet {
    pub fn new(points: Vec<UnitaryMatrix>) -> Result<Self> {
        let n = points.first().ok_or(Error::EmptyPointSet)?.n();
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch(n, p.n()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[UnitaryMatrix] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    /// `{w·a}` for every point `a`.
    pub fn left_translate(&self, w: &UnitaryMatrix) -> Self {
        Self { points: self.points.iter().map(|p| w.mul(p)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-9, starts: 8, seed: 0, trace: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CircumcenterResult {
    pub center: UnitaryMatrix,
    pub radius: f64,
    pub iterations: usize,
    pub final_step: f64,
    pub farthest_index: usize,
    pub converged: bool,
    /// Radius within `10⁻³` of `π/2`, where uniqueness is not claimed.
    pub boundary_warning: bool,
    pub trace: Option<Vec<(usize, f64)>>,
}

/// Distance from the radius to `π/2` below which `boundary_warning` is set.
pub const BOUNDARY_MARGIN: f64 = 1e-3;
/// Relative objective change treated as rounding noise.
pub const STAGNATION_REL: f64 = 1e-14;
/// Longest step allowed when stopping on a stalled objective.
pub const STAGNATION_STEP: f64 = 1e-5;
/// A priori bound on `min_a f_sup(a)`.
pub const APRIORI_MARGIN: f64 = 1e-6;

/// `max_a d(c, a)` and the first index attaining it.
pub fn f_sup(c: &UnitaryMatrix, a: &PointSet, m: MetricSpec) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, p) in a.points().iter().enumerate() {
        let d = distance(c, p, m)?;
        if d > best.0 {
            best = (d, i);
        }
    }
    Ok(best)
}

fn model_kind(m: MetricSpec) -> ModelKind {
    match m {
        MetricSpec::SchattenP(p) => ModelKind::Schatten { p, c2: 0.0 },
        MetricSpec::PerturbedP(p, e) => ModelKind::Schatten { p, c2: e.powi(p as i32) },
        MetricSpec::OperatorInf => ModelKind::Operator,
        MetricSpec::PerturbedInf(e) => ModelKind::PerturbedOperator { e2: e * e },
    }
}

/// Powered objective, or `None` if some point is antipodal to `c`.
fn powered_objective(c: &UnitaryMatrix, a: &PointSet, m: MetricSpec) -> Result<Option<f64>> {
    let mut best = f64::NEG_INFINITY;
    for p in a.points() {
        let (angles, ambiguous) = relative_angles(c, p)?;
        if ambiguous || NormOrder::Inf.of_magnitudes(&angles) >= PI - APRIORI_MARGIN {
            return Ok(None);
        }
        best = best.max(m.powered_from_angles(&angles));
    }
    Ok(Some(best))
}

fn is_admissible_start(c: &UnitaryMatrix, a: &PointSet) -> Result<bool> {
    for p in a.points() {
        if distance(c, p, MetricSpec::OperatorInf)? >= PI - APRIORI_MARGIN {
            return Ok(false);
        }
    }
    Ok(true)
}

fn first_antipodal_pair(a: &PointSet) -> Result<(usize, usize)> {
    let pts = a.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if distance(&pts[i], &pts[j], MetricSpec::OperatorInf)? >= PI - APRIORI_MARGIN {
                return Ok((i, j));
            }
        }
    }
    Ok((0, 0))
}

fn check_subspace(a: &PointSet, s: SubspaceSpec) -> Result<()> {
    s.validate_for(a.n())?;
    for (i, p) in a.points().iter().enumerate() {
        if !belongs(p, s) {
            return Err(Error::NotInSubspace(format!("point {i} is not in {s}")));
        }
    }
    Ok(())
}

/// The input point with the smallest `f_sup`, and that value.
fn argmin_point(a: &PointSet, m: MetricSpec) -> Result<(UnitaryMatrix, f64)> {
    let mut best = (f64::INFINITY, 0);
    for (i, p) in a.points().iter().enumerate() {
        let (v, _) = f_sup(p, a, m)?;
        if v < best.0 {
            best = (v, i);
        }
    }
    Ok((a.points()[best.1].clone(), best.0))
}

/// `c0·e^{x}` for a random tangent `x` of operator norm `size`, retried
/// until no point is antipodal to the result.
fn perturbed_start(a: &PointSet, s: SubspaceSpec, c0: &UnitaryMatrix, size: f64, seed: u64, stream: u64) -> Result<UnitaryMatrix> {
    let mut rng = child_rng(seed, stream);
    for _ in 0..32 {
        let x = random_tangent(s, c0, &mut rng).scale(size);
        let c = GeodesicSegment::new(c0.clone(), x, (0.0, 1.0))?.eval_extended(1.0);
        if is_admissible_start(&c, a)? {
            return Ok(c);
        }
    }
    let (i, j) = first_antipodal_pair(a)?;
    Err(Error::AntipodalPair(i, j))
}

/// Start point: the input point with the smallest `f_sup`, or a seeded
/// perturbation of it when the a priori check fails there.
fn default_start(a: &PointSet, m: MetricSpec, s: SubspaceSpec, seed: u64) -> Result<UnitaryMatrix> {
    let (c0, v) = argmin_point(a, m)?;
    if v < PI - APRIORI_MARGIN && is_admissible_start(&c0, a)? {
        return Ok(c0);
    }
    perturbed_start(a, s, &c0, PROBE_PERTURBATION, seed, u64::MAX - 1)
}

/// Circumcenter of `a` in the full unitary group.
pub fn radius_and_center(a: &PointSet, m: MetricSpec, opts: &SolverOptions) -> Result<CircumcenterResult> {
    radius_and_center_in(a, m, SubspaceSpec::FullUnitary, opts)
}

/// Circumcenter of `a` within the geodesic subspace `s`, whose membership is validated.
pub fn radius_and_center_in(a: &PointSet, m: MetricSpec, s: SubspaceSpec, opts: &SolverOptions) -> Result<CircumcenterResult> {
    finish(solve_in(a, m, s, opts)?)
}

/// As [`radius_and_center_in`], reporting `converged = false` instead of failing.
pub fn solve_in(a: &PointSet, m: MetricSpec, s: SubspaceSpec, opts: &SolverOptions) -> Result<CircumcenterResult> {
    let m = m.validate()?;
    check_subspace(a, s)?;
    if a.len() == 1 {
        return Ok(CircumcenterResult {
            center: a.points()[0].clone(),
            radius: 0.0,
            iterations: 0,
            final_step: 0.0,
            farthest_index: 0,
            converged: true,
            boundary_warning: false,
            trace: opts.trace.then(Vec::new),
        });
    }
    let c0 = default_start(a, m, s, opts.seed)?;
    solve_from(a, m, s, c0, opts)
}

fn finish(r: CircumcenterResult) -> Result<CircumcenterResult> {
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NotConverged { iterations: r.iterations, objective: r.radius })
    }
}

/// Runs the solver from `c0`; errors on an exhausted budget.
pub fn radius_and_center_from(a: &PointSet, m: MetricSpec, s: SubspaceSpec, c0: &UnitaryMatrix, opts: &SolverOptions) -> Result<CircumcenterResult> {
    let m = m.validate()?;
    check_subspace(a, s)?;
    if !belongs(c0, s) {
        return Err(Error::NotInSubspace(format!("start point is not in {s}")));
    }
    if !is_admissible_start(c0, a)? {
        let (i, j) = first_antipodal_pair(a)?;
        return Err(Error::AntipodalPair(i, j));
    }
    finish(solve_from(a, m, s, c0.clone(), opts)?)
}

/// Runs the solver from `c0`, reporting `converged = false` instead of failing.
pub fn solve_from(a: &PointSet, m: MetricSpec, s: SubspaceSpec, c0: UnitaryMatrix, opts: &SolverOptions) -> Result<CircumcenterResult> {
    let kind = model_kind(m);
    let power = m.objective_power() as f64;
    let tol = opts.tol;
    let mut c = c0;
    let mut f = powered_objective(&c, a, m)?.ok_or_else(|| Error::InvalidArgument("start point is antipodal to a point".into()))?;
    let mut trace = opts.trace.then(Vec::new);
    let unpower = |v: f64| if power == 1.0 { v } else { v.max(0.0).powf(1.0 / power) };
    if let Some(t) = trace.as_mut() {
        t.push((0, unpower(f)));
    }
    let mut converged = false;
    let mut final_step = f64::INFINITY;
    let mut iterations = 0;
    let mut stalled = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let basis: Vec<SkewHermitian> = tangent_basis(s, &c);
        let herm: Vec<ComplexMatrix> = basis.iter().map(SkewHermitian::to_hermitian).collect();
        let mut theta0 = Vec::with_capacity(a.len());
        for p in a.points() {
            theta0.push(unitary_log(&c.left_div(p))?.value.to_hermitian());
        }
        let tm = TangentModel::new(kind, herm, theta0);
        let alpha = tm.solve()?;
        let mut sigma = ComplexMatrix::zeros(c.n());
        for (b, &x) in basis.iter().zip(&alpha) {
            sigma = &sigma + &b.matrix().scale_real(x);
        }
        // moving c by e^{σ} lowers the logarithms by σ, so Θ decreases by −iσ
        let x = SkewHermitian::skew_part(&sigma);
        let step_len = x.norm(NormOrder::Inf);
        let predicted = tm.objective(&alpha)? - tm.objective(&vec![0.0; alpha.len()])?;
        let seg = GeodesicSegment::new(c.clone(), x, (0.0, 1.0))?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let cand = seg.eval_extended(t);
            if let Some(fc) = powered_objective(&cand, a, m)? {
                let armijo = f + 1e-4 * t * predicted.min(0.0);
                let slack = 1e-13 * f.abs().max(1.0);
                if fc <= armijo + slack {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            // no admissible decrease: the iterate is optimal to rounding
            final_step = 0.0;
            converged = step_len <= STAGNATION_STEP;
            break;
        };
        let delta = f - fc;
        final_step = t * step_len;
        c = cand;
        f = fc;
        if let Some(tr) = trace.as_mut() {
            tr.push((iterations, unpower(f)));
        }
        if final_step < tol && delta.abs() < tol * f.abs().max(1.0) {
            converged = true;
            break;
        }
        // objectives that are only weakly curved in some direction resolve the
        // minimizer no better than sqrt(rounding/curvature); stop once the
        // objective has stalled at rounding level with short steps
        if delta.abs() <= STAGNATION_REL * f.abs().max(1.0) && final_step < STAGNATION_STEP {
            stalled += 1;
            if stalled >= 3 {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let (radius, farthest_index) = f_sup(&c, a, m)?;
    Ok(CircumcenterResult {
        center: c,
        radius,
        iterations,
        final_step,
        farthest_index,
        converged,
        boundary_warning: (radius - FRAC_PI_2).abs() <= BOUNDARY_MARGIN,
        trace,
    })
}

/// Centers reached from perturbed starts, and their largest pairwise `d_∞`.
#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub dispersion: f64,
    pub centers: Vec<UnitaryMatrix>,
    pub radii: Vec<f64>,
}

/// Size of the start perturbations.
pub const PROBE_PERTURBATION: f64 = 0.25;

pub fn uniqueness_probe(a: &PointSet, m: MetricSpec, starts: usize, seed: u64) -> Result<UniquenessReport> {
    uniqueness_probe_in(a, m, SubspaceSpec::FullUnitary, starts, seed, &SolverOptions { seed, ..SolverOptions::default() })
}

pub fn uniqueness_probe_in(a: &PointSet, m: MetricSpec, s: SubspaceSpec, starts: usize, seed: u64, opts: &SolverOptions) -> Result<UniquenessReport> {
    let m = m.validate()?;
    check_subspace(a, s)?;
    let mut centers = Vec::with_capacity(starts);
    let mut radii = Vec::with_capacity(starts);
    if a.len() == 1 {
        centers.extend(std::iter::repeat_n(a.points()[0].clone(), starts.max(1)));
        radii.extend(std::iter::repeat_n(0.0, starts.max(1)));
        return Ok(UniquenessReport { dispersion: 0.0, centers, radii });
    }
    let (base, _) = argmin_point(a, m)?;
    for k in 0..starts {
        let start = perturbed_start(a, s, &base, PROBE_PERTURBATION, seed, k as u64)?;
        let r = finish(solve_from(a, m, s, start, opts)?)?;
        centers.push(r.center);
        radii.push(r.radius);
    }
    let mut dispersion: f64 = 0.0;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            dispersion = dispersion.max(distance(&centers[i], &centers[j], MetricSpec::OperatorInf)?);
        }
    }
    Ok(UniquenessReport { dispersion, centers, radii })
}

/// The isometry `g ↦ left·g·right⁻¹`.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub left: UnitaryMatrix,
    pub right: UnitaryMatrix,
}

impl Isometry {
    pub fn new(left: UnitaryMatrix, right: UnitaryMatrix) -> Result<Self> {
        if left.n() != right.n() {
            return Err(Error::DimensionMismatch(left.n(), right.n()));
        }
        Ok(Self { left, right })
    }

    pub fn identity(n: usize) -> Self {
        Self { left: UnitaryMatrix::identity(n), right: UnitaryMatrix::identity(n) }
    }

    pub fn apply(&self, g: &UnitaryMatrix) -> UnitaryMatrix {
        self.left.mul(g).mul(&self.right.inverse())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { left: self.left.mul(&other.left), right: self.right.mul(&other.right) }
    }

    fn same_as(&self, other: &Self) -> bool {
        self.left.matrix().entrywise_dist(other.left.matrix()) < 1e-9 && self.right.matrix().entrywise_dist(other.right.matrix()) < 1e-9
    }
}

/// The finite group generated by `generators`, the identity first.
pub fn isometry_closure(generators: &[Isometry], n: usize, budget: usize) -> Result<Vec<Isometry>> {
    let mut elems = vec![Isometry::identity(n)];
    let mut frontier = 0;
    while frontier < elems.len() {
        let g = elems[frontier].clone();
        frontier += 1;
        for s in generators {
            let h = g.compose(s);
            if !elems.iter().any(|e| e.same_as(&h)) {
                if elems.len() >= budget {
                    return Err(Error::OrbitTooLarge(budget));
                }
                elems.push(h);
            }
        }
    }
    Ok(elems)
}

/// Deduplicated orbit `{h·u}` at `d_∞ < 10⁻¹⁰`, in element order.
pub fn dedup_points(points: Vec<UnitaryMatrix>) -> Result<Vec<UnitaryMatrix>> {
    let mut out: Vec<UnitaryMatrix> = Vec::with_capacity(points.len());
    for p in points {
        let mut dup = false;
        for q in &out {
            if distance(q, &p, MetricSpec::OperatorInf)? < 1e-10 {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(p);
        }
    }
    Ok(out)
}

/// Margin below `π/2` required of the orbit radius.
pub const ORBIT_MARGIN: f64 = 1e-3;
/// Certified fixed points move by at most this much under every element.
pub const FIXED_POINT_TOL: f64 = 1e-8;
pub const CLOSURE_BUDGET: usize = 10_000;

/// A fixed point together with the data used to find it.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub point: UnitaryMatrix,
    pub residual: f64,
    pub orbit_radius: f64,
    pub epsilon_used: f64,
    pub orbit_size: usize,
}

/// `max_h d_∞(h·c, c)`.
pub fn fixed_point_residual(group: &[Isometry], c: &UnitaryMatrix) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for h in group {
        worst = worst.max(distance(&h.apply(c), c, MetricSpec::OperatorInf)?);
    }
    Ok(worst)
}

/// `ε = min(0.1, (π/2 − r_∞)/(2·max d_2(c, a)))`, halved until `radius_{∞,ε} < π/2`.
pub fn choose_epsilon(orbit: &PointSet, center_inf: &UnitaryMatrix, radius_inf: f64, requested: Option<f64>) -> Result<f64> {
    let mut d2max: f64 = 0.0;
    for p in orbit.points() {
        d2max = d2max.max(distance(center_inf, p, MetricSpec::riemannian())?);
    }
    let auto = if d2max > 0.0 { (FRAC_PI_2 - radius_inf) / (2.0 * d2max) } else { 0.1 };
    let mut eps = requested.unwrap_or(0.1f64.min(auto));
    for _ in 0..40 {
        let (r, _) = f_sup(center_inf, orbit, MetricSpec::PerturbedInf(eps))?;
        if r < FRAC_PI_2 {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(Error::RadiusTooLarge { radius: radius_inf, bound: FRAC_PI_2 - ORBIT_MARGIN })
}

/// Unitary polar factor of `m`, restored to the subspace `s`.
pub(crate) fn polar_unitary(m: &ComplexMatrix, s: SubspaceSpec) -> Result<UnitaryMatrix> {
    let m = match s {
        SubspaceSpec::SpecialOrthogonal => {
            let mut r = m.clone();
            for i in 0..r.n() {
                for j in 0..r.n() {
                    r[(i, j)] = C64::new(r[(i, j)].re, 0.0);
                }
            }
            r
        }
        _ => m.clone(),
    };
    // U = M (M*M)^{-1/2}
    let gram = &m.adjoint() * &m;
    let e = crate::matrix::herm_eig(&gram.hermitian_part())?;
    if e.angles[0] <= 1e-12 * e.angles[e.angles.len() - 1].max(1.0) {
        return Err(Error::InvalidArgument("averaged matrix is singular".into()));
    }
    let inv_sqrt = e.apply(|l| C64::new(1.0 / l.sqrt(), 0.0));
    let mut u = &m * &inv_sqrt;
    if s == SubspaceSpec::SpecialUnitary {
        let n = u.n() as f64;
        let det = u.det();
        // the n-th root of det closest to 1
        u = u.scale(C64::from_polar(1.0, -det.arg() / n));
    }
    UnitaryMatrix::new(u)
}

/// Fixed point of the finite group generated by `generators` acting on `s`.
///
/// The returned point is the `d_{∞,ε}` circumcenter of the orbit of `m0`,
/// refined by averaging over the group and taking the unitary polar factor;
/// the refinement commutes with the action, so the result is fixed to
/// rounding.
pub fn fixed_point_of_action(generators: &[Isometry], m0: &UnitaryMatrix, s: SubspaceSpec, eps: Option<f64>, opts: &SolverOptions) -> Result<FixedPoint> {
    let n = m0.n();
    for g in generators {
        if g.left.n() != n {
            return Err(Error::DimensionMismatch(n, g.left.n()));
        }
    }
    let group = isometry_closure(generators, n, CLOSURE_BUDGET)?;
    fixed_point_of_group(&group, m0, s, eps, opts)
}

/// As [`fixed_point_of_action`] for an already enumerated group.
pub fn fixed_point_of_group(group: &[Isometry], m0: &UnitaryMatrix, s: SubspaceSpec, eps: Option<f64>, opts: &SolverOptions) -> Result<FixedPoint> {
    let orbit = PointSet::new(dedup_points(group.iter().map(|h| h.apply(m0)).collect())?)?;
    let inf = radius_inf_checked(&orbit, s, opts)?;
    let eps = choose_epsilon(&orbit, &inf.center, inf.radius, eps)?;
    let res = radius_and_center_in(&orbit, MetricSpec::PerturbedInf(eps), s, opts)?;
    let point = polish(group, &res.center, s)?;
    let residual = fixed_point_residual(group, &point)?;
    if residual > FIXED_POINT_TOL {
        return Err(Error::NotConverged { iterations: res.iterations, objective: residual });
    }
    Ok(FixedPoint { point, residual, orbit_radius: inf.radius, epsilon_used: eps, orbit_size: orbit.len() })
}

/// `d_∞` circumcenter with the radius hypothesis enforced.
pub(crate) fn radius_inf_checked(orbit: &PointSet, s: SubspaceSpec, opts: &SolverOptions) -> Result<CircumcenterResult> {
    let bound = FRAC_PI_2 - ORBIT_MARGIN;
    let inf = match radius_and_center_in(orbit, MetricSpec::OperatorInf, s, opts) {
        Ok(r) => r,
        // an antipodal pair forces radius ≥ π/2
        Err(Error::AntipodalPair(..)) => return Err(Error::RadiusTooLarge { radius: FRAC_PI_2, bound }),
        Err(e) => return Err(e),
    };
    if inf.radius >= bound {
        return Err(Error::RadiusTooLarge { radius: inf.radius, bound });
    }
    Ok(inf)
}

fn polish(group: &[Isometry], c: &UnitaryMatrix, s: SubspaceSpec) -> Result<UnitaryMatrix> {
    let mut avg = ComplexMatrix::zeros(c.n());
    for h in group {
        avg = &avg + h.apply(c).matrix();
    }
    let avg = avg.scale_real(1.0 / group.len() as f64);
    match s {
        SubspaceSpec::GrassmannSymmetries(_) => round_to_symmetry(&avg),
        _ => polar_unitary(&avg, s),
    }
}

/// `2P − 1` for the spectral projection `P` of the Hermitian part of `m` onto positive eigenvalues.
pub(crate) fn round_to_symmetry(m: &ComplexMatrix) -> Result<UnitaryMatrix> {
    let e = crate::matrix::herm_eig(&m.hermitian_part())?;
    let signs = e.apply(|l| C64::new(if l > 0.0 { 1.0 } else { -1.0 }, 0.0));
    UnitaryMatrix::new(signs.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::haar_sample;

    fn scalar_set(angles: &[f64]) -> PointSet {
        PointSet::new(angles.iter().map(|&a| UnitaryMatrix::from_angles(&[a])).collect()).unwrap()
    }

    #[test]
    fn point_set_validation() {
        assert!(matches!(PointSet::new(vec![]), Err(Error::EmptyPointSet)));
        let r = PointSet::new(vec![UnitaryMatrix::identity(2), UnitaryMatrix::identity(3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn f_sup_examples() {
        let u = haar_sample(2, 1);
        let single = PointSet::new(vec![u.clone()]).unwrap();
        assert!(f_sup(&u, &single, MetricSpec::SchattenP(2)).unwrap().0 < 1e-12);

        let pair = scalar_set(&[0.0, PI]);
        let (v, idx) = f_sup(&UnitaryMatrix::from_angles(&[FRAC_PI_2]), &pair, MetricSpec::SchattenP(2)).unwrap();
        assert!((v - FRAC_PI_2).abs() < 1e-14);
        assert_eq!(idx, 0);
    }

    #[test]
    fn singleton_center() {
        let u = haar_sample(3, 2);
        let r = radius_and_center(&PointSet::new(vec![u.clone()]).unwrap(), MetricSpec::SchattenP(4), &SolverOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.center, u);
    }

    #[test]
    fn symmetric_scalar_pair() {
        let a = scalar_set(&[1.0, -1.0]);
        for m in [MetricSpec::SchattenP(2), MetricSpec::SchattenP(6), MetricSpec::OperatorInf, MetricSpec::PerturbedInf(0.1), MetricSpec::PerturbedP(4, 0.1)] {
            let r = radius_and_center(&a, m, &SolverOptions::default()).unwrap();
            assert!((r.center.matrix()[(0, 0)] - 1.0).norm() < 1e-8, "{m}");
            let expect = m.from_angles(&[1.0]);
            assert!((r.radius - expect).abs() < 1e-9, "{m}: {}", r.radius);
        }
    }

    #[test]
    fn antipodal_scalar_pair() {
        let a = scalar_set(&[0.0, PI]);
        let r = radius_and_center(&a, MetricSpec::SchattenP(2), &SolverOptions::default()).unwrap();
        assert!((r.radius - FRAC_PI_2).abs() < 1e-9);
        assert!(r.boundary_warning);
        let z = r.center.matrix()[(0, 0)];
        assert!((z.re).abs() < 1e-8 && (z.im.abs() - 1.0).abs() < 1e-8);
        let probe = uniqueness_probe(&a, MetricSpec::SchattenP(2), 8, 0).unwrap();
        assert!(probe.dispersion > 3.0, "{}", probe.dispersion);
    }

    #[test]
    fn grassmann_antipodal_pair_radius() {
        let a = PointSet::new(vec![UnitaryMatrix::from_angles(&[0.0, PI]), UnitaryMatrix::from_angles(&[PI, 0.0])]).unwrap();
        let r = radius_and_center(&a, MetricSpec::OperatorInf, &SolverOptions::default()).unwrap();
        assert!((r.radius - FRAC_PI_2).abs() < 1e-9, "{}", r.radius);
    }

    #[test]
    fn monotone_trace_and_containment() {
        let mut pts = Vec::new();
        let c = haar_sample(3, 5);
        let mut rng = crate::matrix::rng_from_seed(9);
        for _ in 0..5 {
            pts.push(crate::convexity::sample_at_distance(&c, 0.9, MetricSpec::SchattenP(4), &mut rng));
        }
        let a = PointSet::new(pts).unwrap();
        let opts = SolverOptions { trace: true, ..SolverOptions::default() };
        for m in [MetricSpec::SchattenP(4), MetricSpec::PerturbedInf(0.1), MetricSpec::PerturbedP(4, 0.05)] {
            let r = radius_and_center(&a, m, &opts).unwrap();
            let tr = r.trace.as_ref().unwrap();
            for w in tr.windows(2) {
                assert!(w[1].1 <= w[0].1 + 1e-12, "{m}: {:?}", w);
            }
            for p in a.points() {
                assert!(distance(&r.center, p, m).unwrap() <= r.radius + 1e-9);
            }
        }
    }

    #[test]
    fn trivial_action_fixes_start() {
        let m0 = haar_sample(2, 3);
        let fp = fixed_point_of_action(&[], &m0, SubspaceSpec::FullUnitary, None, &SolverOptions::default()).unwrap();
        assert!(distance(&fp.point, &m0, MetricSpec::OperatorInf).unwrap() < 1e-12);
        // conjugation by an element of order 6
        let w = UnitaryMatrix::from_trusted(haar_sample(2, 4).conjugate(&ComplexMatrix::from_diag(&[C64::from_polar(1.0, PI / 3.0), C64::new(1.0, 0.0)])));
        let conj = Isometry::new(w.clone(), w).unwrap();
        let fp = fixed_point_of_action(&[conj], &UnitaryMatrix::identity(2), SubspaceSpec::FullUnitary, None, &SolverOptions::default()).unwrap();
        assert!(distance(&fp.point, &UnitaryMatrix::identity(2), MetricSpec::OperatorInf).unwrap() < 1e-12);
    }
}
