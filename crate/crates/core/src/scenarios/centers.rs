//! Scenarios for geodesic subspaces, circumcenters, fixed points and rigidity.

use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::json;

use super::{Parts, SubTest, VerifyConfig, Worst};
use crate::circumcenter::{
    fixed_point_of_action, radius_and_center_in, uniqueness_probe_in, Isometry, PointSet, SolverOptions, FIXED_POINT_TOL,
};
use crate::convexity::ball_convexity_probe;
use crate::error::{Error, Result};
use crate::matrix::{haar_sample_with, random_unit_direction, skew_exp, uniform, FinslerRng, UnitaryMatrix};
use crate::metrics::{distance, MetricSpec};
use crate::rigidity::{
    commutator_defects, cyclic_representation, decide_equivalence, dihedral_representation, grassmann_fixed_point, grassmann_fixed_point_of,
    signed_permutations, symmetry_orbit, triangle_permutation_representation, truncated_closure, FiniteGroupPresentation, RepresentationPair,
    RigidityOutcome,
};
use crate::subspaces::{random_element, subspace_ball_consistency, ProjectionMatrix, SubspaceSpec};

pub const DISPERSION_TOL: f64 = 1e-6;
const RADIUS_MARGIN: f64 = 1e-3;
const RIGHT_ANGLE_TOL: f64 = 1e-9;
const ISOMETRY_TOL: f64 = 1e-9;
const MAX_PLANTED_SIZE: f64 = 0.39;

pub(super) fn subspace_balls(cfg: &VerifyConfig) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3).max(2);
    let trials = cfg.trials_or(100);
    let mut out = Vec::new();
    let spaces = [SubspaceSpec::SpecialUnitary, SubspaceSpec::SpecialOrthogonal, SubspaceSpec::GrassmannSymmetries(1)];
    for (k, s) in spaces.into_iter().enumerate() {
        let u = random_element(s, n, &mut cfg.rng(100 + k as u64));
        let rep = subspace_ball_consistency(s, &u, 1.2, trials, cfg.stream_seed(100 + k as u64))?;
        out.push(SubTest::new(format!("intrinsic_balls_{s}"), rep.disagreements == 0 && rep.closure_failures == 0, rep));
    }
    Ok((out, vec![]))
}

/// `c·exp(ρ_i·x_i)` for random unit directions and `ρ_i ∈ [0.3, 0.9]`.
fn clustered_set(n: usize, k: usize, rng: &mut FinslerRng) -> Result<PointSet> {
    let c = haar_sample_with(n, rng);
    let mut pts = Vec::with_capacity(k);
    for _ in 0..k {
        let x = random_unit_direction(n, rng).scale(uniform(rng, 0.3, 0.9));
        pts.push(c.mul(&skew_exp(&x)?));
    }
    PointSet::new(pts)
}

fn solver(cfg: &VerifyConfig, stream: u64) -> SolverOptions {
    SolverOptions { seed: cfg.stream_seed(stream), ..cfg.solver.clone() }
}

fn unique_centers(cfg: &VerifyConfig, m: MetricSpec, stream: u64) -> Result<SubTest> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(4);
    let mut rng = cfg.rng(stream);
    let mut cases = Vec::new();
    let mut ok = true;
    let mut worst = Worst::for_max();
    for t in 0..trials {
        let a = clustered_set(n, 3 + t % 3, &mut rng)?;
        let opts = solver(cfg, stream * 1000 + t as u64);
        let probe = uniqueness_probe_in(&a, m, SubspaceSpec::FullUnitary, opts.starts, opts.seed, &opts)?;
        let radius = probe.radii.iter().copied().fold(f64::INFINITY, f64::min);
        let in_regime = radius < FRAC_PI_2 - RADIUS_MARGIN;
        let pass = in_regime && probe.dispersion <= DISPERSION_TOL;
        ok &= pass;
        worst.max(probe.dispersion, t);
        cases.push(json!({"points": a.len(), "radius": radius, "dispersion": probe.dispersion, "starts": probe.centers.len(), "pass": pass}));
    }
    Ok(SubTest::new(
        format!("unique_center_{m}"),
        ok,
        json!({"n": n, "sets": trials, "tolerance": DISPERSION_TOL, "max_dispersion": worst, "cases": cases}),
    ))
}

fn antipodal_scalar_pair(cfg: &VerifyConfig, m: MetricSpec, stream: u64) -> Result<SubTest> {
    let a = PointSet::new(vec![UnitaryMatrix::identity(1), UnitaryMatrix::from_angles(&[PI])])?;
    let opts = solver(cfg, stream);
    let probe = uniqueness_probe_in(&a, m, SubspaceSpec::FullUnitary, opts.starts, opts.seed, &opts)?;
    let radius_error = probe.radii.iter().map(|r| (r - FRAC_PI_2).abs()).fold(0.0, f64::max);
    let pass = radius_error <= RIGHT_ANGLE_TOL && probe.dispersion > 3.0;
    Ok(SubTest::new(
        "counterexample_u1_antipodal_pair",
        pass,
        json!({"radius_error": radius_error, "dispersion": probe.dispersion, "centers": probe.centers, "radii": probe.radii}),
    ))
}

pub(super) fn schatten_centers(cfg: &VerifyConfig) -> Result<Parts> {
    let mut out = Vec::new();
    for (k, p) in cfg.exponents(&[2, 4]).into_iter().enumerate() {
        out.push(unique_centers(cfg, MetricSpec::SchattenP(p), 110 + k as u64)?);
    }
    out.push(antipodal_scalar_pair(cfg, MetricSpec::SchattenP(cfg.p.unwrap_or(2)), 119)?);
    Ok((out, vec![]))
}

fn perturbed_ball_probe(cfg: &VerifyConfig, m: MetricSpec, stream: u64) -> Result<SubTest> {
    let n = cfg.n.unwrap_or(3);
    let center = haar_sample_with(n, &mut cfg.rng(stream));
    let rep = ball_convexity_probe(&center, 1.5, m, cfg.trials_or(500).max(1), cfg.stream_seed(stream))?;
    Ok(SubTest::new(format!("ball_{m}_r1.5"), rep.violations == 0, rep))
}

pub(super) fn perturbed_operator_centers(cfg: &VerifyConfig) -> Result<Parts> {
    let m = MetricSpec::PerturbedInf(cfg.eps).validate()?;
    Ok((vec![unique_centers(cfg, m, 120)?, perturbed_ball_probe(cfg, m, 121)?], vec![]))
}

pub(super) fn perturbed_schatten_centers(cfg: &VerifyConfig) -> Result<Parts> {
    let mut out = Vec::new();
    for (k, p) in cfg.exponents(&[4]).into_iter().enumerate() {
        let m = MetricSpec::PerturbedP(p, cfg.eps).validate()?;
        out.push(unique_centers(cfg, m, 130 + 2 * k as u64)?);
        out.push(perturbed_ball_probe(cfg, m, 131 + 2 * k as u64)?);
    }
    Ok((out, vec![]))
}

/// `exp(s·x)` with `s ∈ [0.1, 0.39]`, so `d_∞(w, 1) < 0.4`.
fn small_unitary(n: usize, rng: &mut FinslerRng) -> Result<UnitaryMatrix> {
    let s = uniform(rng, 0.1, MAX_PLANTED_SIZE);
    skew_exp(&random_unit_direction(n, rng).scale(s))
}

/// `ρ = w⁻¹·φ·w`, so that `φ(h) = w·ρ(h)·w⁻¹`.
pub fn planted_pair(group: FiniteGroupPresentation, phi: Vec<UnitaryMatrix>, w: &UnitaryMatrix) -> Result<RepresentationPair> {
    let rho = phi.iter().map(|p| UnitaryMatrix::new(w.inverse().conjugate(p.matrix()))).collect::<Result<Vec<_>>>()?;
    RepresentationPair::new(group, phi, rho, SubspaceSpec::FullUnitary)
}

/// Named representations with `|H| ∈ {2, 6, 8}` and `n ∈ {2, 3}`.
pub fn reference_representations() -> Result<Vec<(&'static str, FiniteGroupPresentation, Vec<UnitaryMatrix>)>> {
    Ok(vec![
        ("Z2_reflection_n2", FiniteGroupPresentation::cyclic(2)?, cyclic_representation(2, &[0, 1])),
        ("Z2_reflection_n3", FiniteGroupPresentation::cyclic(2)?, cyclic_representation(2, &[0, 0, 1])),
        ("D3_standard_n2", FiniteGroupPresentation::dihedral(3)?, dihedral_representation(3)),
        ("D3_permutation_n3", FiniteGroupPresentation::dihedral(3)?, triangle_permutation_representation()),
        ("D4_standard_n2", FiniteGroupPresentation::dihedral(4)?, dihedral_representation(4)),
    ])
}

/// Planted instances: every reference representation against `trials` random
/// small conjugators, drawn from the scenario's seed.
pub fn planted_instances(seed: u64, trials: usize) -> Result<Vec<(String, RepresentationPair, UnitaryMatrix)>> {
    let mut rng = crate::matrix::child_rng(seed, 140);
    let mut out = Vec::new();
    for (name, group, phi) in reference_representations()? {
        for t in 0..trials {
            let w = small_unitary(phi[0].n(), &mut rng)?;
            out.push((format!("{name}_{t}"), planted_pair(group.clone(), phi.clone(), &w)?, w));
        }
    }
    Ok(out)
}

pub(super) fn fixed_points(cfg: &VerifyConfig) -> Result<Parts> {
    let trials = cfg.trials_or(2);
    let mut rng = cfg.rng(150);
    let mut cases = Vec::new();
    let (mut iso_ok, mut fix_ok) = (true, true);
    let mut worst_iso = Worst::for_max();
    for (name, group, phi) in reference_representations()? {
        let n = phi[0].n();
        for t in 0..trials {
            let w = small_unitary(n, &mut rng)?;
            let pair = planted_pair(group.clone(), phi.clone(), &w)?;
            let isos = pair.isometries();
            // the action is isometric for every metric in use
            let x = haar_sample_with(n, &mut rng);
            let y = haar_sample_with(n, &mut rng);
            for m in [MetricSpec::OperatorInf, MetricSpec::PerturbedInf(cfg.eps), MetricSpec::SchattenP(4)] {
                let d = distance(&x, &y, m)?;
                for h in &isos {
                    let gap = (distance(&h.apply(&x), &h.apply(&y), m)? - d).abs();
                    worst_iso.max(gap, cases.len());
                    iso_ok &= gap <= ISOMETRY_TOL;
                }
            }
            // generators: r and s, or r alone for cyclic groups
            let gens: Vec<Isometry> = if group.order() == 2 { vec![isos[1].clone()] } else { vec![isos[1].clone(), isos[group.order() / 2].clone()] };
            let m0 = small_unitary(n, &mut rng)?;
            let fp = fixed_point_of_action(&gens, &m0, SubspaceSpec::FullUnitary, None, &solver(cfg, 150 + cases.len() as u64))?;
            let pass = fp.residual <= FIXED_POINT_TOL && fp.orbit_size <= group.order();
            fix_ok &= pass;
            cases.push(json!({"instance": format!("{name}_{t}"), "residual": fp.residual, "orbit_radius": fp.orbit_radius, "epsilon": fp.epsilon_used, "orbit_size": fp.orbit_size, "pass": pass}));
        }
    }
    // g ↦ −g on U₁ moves 1 to its antipode
    let flip = Isometry::new(UnitaryMatrix::from_angles(&[PI]), UnitaryMatrix::identity(1))?;
    let rejected = match fixed_point_of_action(&[flip], &UnitaryMatrix::identity(1), SubspaceSpec::FullUnitary, None, &cfg.solver) {
        Err(Error::RadiusTooLarge { radius, .. }) => Some(radius),
        _ => None,
    };
    Ok((
        vec![
            SubTest::new("isometric_action", iso_ok, json!({"tolerance": ISOMETRY_TOL, "max_gap": worst_iso})),
            SubTest::new("fixed_points", fix_ok, json!({"tolerance": FIXED_POINT_TOL, "cases": cases})),
            SubTest::new("radius_hypothesis_enforced", rejected.is_some(), json!({"orbit": "{1, -1}", "reported_radius": rejected})),
        ],
        vec![],
    ))
}

pub(super) fn rigidity(cfg: &VerifyConfig) -> Result<Parts> {
    let trials = cfg.trials_or(2);
    let mut cases = Vec::new();
    let mut ok = true;
    for (k, (name, pair, w)) in planted_instances(cfg.seed, trials)?.into_iter().enumerate() {
        let n = pair.n();
        let out = decide_equivalence(&pair, &UnitaryMatrix::identity(n), None, &solver(cfg, 160 + k as u64))?;
        let (pass, residual, radius) = match &out {
            RigidityOutcome::Certified(c) => (c.residual < FIXED_POINT_TOL, Some(c.residual), c.orbit_radius),
            RigidityOutcome::Inconclusive { orbit_radius, .. } => (false, None, *orbit_radius),
        };
        ok &= pass;
        let planted = distance(&w, &UnitaryMatrix::identity(n), MetricSpec::OperatorInf)?;
        cases.push(json!({"instance": name, "order": pair.group.order(), "n": n, "planted_distance": planted, "residual": residual, "orbit_radius": radius, "pass": pass}));
    }
    let mut out = vec![SubTest::new("planted_conjugators", ok, json!({"tolerance": FIXED_POINT_TOL, "cases": cases}))];

    let d3 = FiniteGroupPresentation::dihedral(3)?;
    let rep = dihedral_representation(3);
    let same = RepresentationPair::new(d3, rep.clone(), rep, SubspaceSpec::FullUnitary)?;
    let out_same = decide_equivalence(&same, &UnitaryMatrix::identity(2), None, &cfg.solver)?;
    let identity_ok = match &out_same {
        RigidityOutcome::Certified(c) => distance(&c.conjugator, &UnitaryMatrix::identity(2), MetricSpec::OperatorInf)? < FIXED_POINT_TOL,
        RigidityOutcome::Inconclusive { .. } => false,
    };
    out.push(SubTest::new("equal_representations", identity_ok, out_same));

    // trivial against sign on U₁: the orbit {1, −1} sits exactly at the bound
    let z2 = FiniteGroupPresentation::cyclic(2)?;
    let sign = RepresentationPair::new(z2, cyclic_representation(2, &[0]), cyclic_representation(2, &[1]), SubspaceSpec::FullUnitary)?;
    let verdict = decide_equivalence(&sign, &UnitaryMatrix::identity(1), None, &cfg.solver)?;
    let inconclusive = match &verdict {
        RigidityOutcome::Inconclusive { orbit_radius, .. } => (orbit_radius - FRAC_PI_2).abs() <= RIGHT_ANGLE_TOL,
        RigidityOutcome::Certified(_) => false,
    };
    out.push(SubTest::new("counterexample_trivial_vs_sign", inconclusive, verdict));
    Ok((out, vec![]))
}

pub(super) fn grassmann(cfg: &VerifyConfig) -> Result<Parts> {
    let mut out = Vec::new();
    let p0 = ProjectionMatrix::coordinate(2, 1);

    // diag(e^{i}, e^{−i}) has infinite order; its truncated closure commutes with P0
    let g = UnitaryMatrix::from_angles(&[1.0, -1.0]);
    let h = truncated_closure(&[g], 2, 100)?;
    let q = grassmann_fixed_point_of(&h, &p0, None, &cfg.solver)?;
    let defect = commutator_defects(&h, &q).into_iter().fold(0.0, f64::max);
    let drift = (q.matrix() - p0.matrix()).max_abs();
    out.push(SubTest::new("commuting_family", defect < FIXED_POINT_TOL, json!({"elements": h.len(), "max_commutator": defect, "distance_to_p0": drift})));

    // the all-ones line is invariant under the permutation representation
    let phi = triangle_permutation_representation();
    let trials = cfg.trials_or(3);
    let mut rng = cfg.rng(170);
    let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / 2f64.sqrt(), 1.0 / 6f64.sqrt());
    let basis = UnitaryMatrix::new(crate::matrix::ComplexMatrix::from_real_rows(&[&[a, b, c], &[a, -b, c], &[a, 0.0, -2.0 * c]])?)?;
    let mut cases = Vec::new();
    let mut ok = true;
    for t in 0..trials {
        let v = small_unitary(3, &mut rng)?.mul(&basis);
        let p = ProjectionMatrix::onto_columns(&v, 1);
        let (defect, rank) = match grassmann_fixed_point(&phi, &p, None, &solver(cfg, 171 + t as u64)) {
            Ok(q) => (commutator_defects(&phi, &q).into_iter().fold(0.0, f64::max), Some(q.rank())),
            Err(Error::RadiusTooLarge { .. }) => (f64::INFINITY, None),
            Err(e) => return Err(e),
        };
        let pass = defect < FIXED_POINT_TOL && rank == Some(1);
        ok &= pass;
        cases.push(json!({"max_commutator": defect, "rank": rank, "pass": pass}));
    }
    out.push(SubTest::new("invariant_line", ok, json!({"cases": cases})));

    // signed permutations move e_P to −e_P; the orbit radius is exactly π/2
    let signed = signed_permutations(2)?;
    let orbit = symmetry_orbit(&signed, &p0)?;
    let direct = radius_and_center_in(&orbit, MetricSpec::OperatorInf, SubspaceSpec::GrassmannSymmetries(1), &cfg.solver)?;
    let refused = match grassmann_fixed_point(&signed, &p0, None, &cfg.solver) {
        Err(Error::RadiusTooLarge { radius, .. }) => Some(radius),
        _ => None,
    };
    let pass = refused.is_some_and(|r| (r - FRAC_PI_2).abs() <= RIGHT_ANGLE_TOL) && (direct.radius - FRAC_PI_2).abs() <= RIGHT_ANGLE_TOL;
    out.push(SubTest::new(
        "counterexample_signed_permutations",
        pass,
        json!({"group_order": signed.len(), "orbit_size": orbit.len(), "orbit_radius": direct.radius, "reported_radius": refused}),
    ));
    Ok((out, vec![]))
}
