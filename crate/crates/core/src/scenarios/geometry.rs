//! Scenarios for metrics, geodesics, convexity and balls.

use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::json;

use super::{Dump, Parts, SubTest, VerifyConfig, Worst};
use crate::convexity::{
    ball_convexity_probe, eigenangle_trace, midpoint_gap, numerical_range_floor, probe_pair, profile, sample_at_distance, strong_convexity_check, Grid,
    STRICTNESS_TOL,
};
use crate::error::{Error, Result};
use crate::matrix::{haar_sample_with, random_unit_direction, skew_exp, uniform, ComplexMatrix, FinslerRng, NormOrder, SkewHermitian, UnitaryMatrix};
use crate::metrics::{comparison_report, curve_length, distance, geodesic, GeodesicSegment, MetricSpec};
use crate::subspaces::{geodesic_closure_check, random_projection, symmetry_embed, symmetry_geodesic_defect, SubspaceSpec};

const LENGTH_TOL: f64 = 1e-8;
const PATH_TOL: f64 = 1e-9;
const ANTIPODAL_MARGIN: f64 = 1e-3;
const BALL_FRACTION: f64 = 0.95;
const SYMMETRY_TOL: f64 = 1e-8;

/// Haar pair with `d_∞(u, v) < π − 10⁻³`.
fn separated_pair(n: usize, rng: &mut FinslerRng) -> Result<(UnitaryMatrix, UnitaryMatrix)> {
    loop {
        let u = haar_sample_with(n, rng);
        let v = haar_sample_with(n, rng);
        if distance(&u, &v, MetricSpec::OperatorInf)? < PI - ANTIPODAL_MARGIN {
            return Ok((u, v));
        }
    }
}

/// `base·exp(s·x)`.
fn step(base: &UnitaryMatrix, x: &SkewHermitian, s: f64) -> Result<UnitaryMatrix> {
    Ok(base.mul(&skew_exp(&x.scale(s))?))
}

fn comparison_sweep(cfg: &VerifyConfig, checks: [usize; 2], stream: u64) -> Result<(bool, serde_json::Value)> {
    let trials = cfg.trials_or(500);
    let mut cases = Vec::new();
    let mut total = 0;
    for (ci, n) in cfg.dims(&[2, 3, 4]).into_iter().enumerate() {
        for (pi, p) in cfg.exponents(&[2, 4, 6]).into_iter().enumerate() {
            let mut rng = cfg.rng(stream + 16 * ci as u64 + pi as u64);
            let mut violations = 0;
            let mut worst = Worst::new();
            for t in 0..trials {
                let u = haar_sample_with(n, &mut rng);
                let v = haar_sample_with(n, &mut rng);
                let rep = comparison_report(&u, &v, p)?;
                for &k in &checks {
                    let c = &rep.checks[k];
                    violations += !c.pass as usize;
                    worst.min(c.slack, t);
                }
            }
            total += violations;
            cases.push(json!({"n": n, "p": p, "pairs": trials, "violations": violations, "worst_slack": worst}));
        }
    }
    Ok((total == 0, json!({"cases": cases, "violations": total})))
}

pub(super) fn norm_chain(cfg: &VerifyConfig) -> Result<Parts> {
    let (pass, details) = comparison_sweep(cfg, [0, 1], 0)?;
    Ok((vec![SubTest::new("norm_chain", pass, details)], vec![]))
}

pub(super) fn geodesics(cfg: &VerifyConfig) -> Result<Parts> {
    let mut out = Vec::new();
    let (pass, details) = comparison_sweep(cfg, [2, 3], 100)?;
    out.push(SubTest::new("chordal_bounds", pass, details));

    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(200);
    let paths = 50;
    let mut cases = Vec::new();
    let mut ok = true;
    for (pi, p) in cfg.exponents(&[2, 4, 6]).into_iter().enumerate() {
        let m = MetricSpec::SchattenP(p);
        let mut rng = cfg.rng(200 + pi as u64);
        let mut worst_length = Worst::for_max();
        let mut worst_path = Worst::new();
        let mut shorter = 0;
        for t in 0..trials {
            let (u, v) = separated_pair(n, &mut rng)?;
            let seg = geodesic(&u, &v)?;
            let d = distance(&u, &v, m)?;
            let len = curve_length(&seg.sample(64), NormOrder::P(p))?;
            worst_length.max((len - d).abs(), t);
            for _ in 0..paths {
                let y = random_unit_direction(n, &mut rng);
                let size = uniform(&mut rng, 0.05, 0.5);
                let mut pts = Vec::with_capacity(64);
                for k in 0..64 {
                    let s = k as f64 / 63.0;
                    let g = seg.eval_extended(s);
                    pts.push(if k == 0 || k == 63 { g } else { step(&g, &y, size * (PI * s).sin())? });
                }
                pts[0] = u.clone();
                pts[63] = v.clone();
                let gap = curve_length(&pts, NormOrder::P(p))? - d;
                shorter += (gap < -PATH_TOL) as usize;
                worst_path.min(gap, t);
            }
        }
        let pass = worst_length.value <= LENGTH_TOL && shorter == 0;
        ok &= pass;
        cases.push(json!({
            "p": p, "pairs": trials, "paths_per_pair": paths,
            "max_length_error": worst_length, "min_path_excess": worst_path, "shorter_paths": shorter,
        }));
    }
    out.push(SubTest::new("geodesic_minimality", ok, json!({"n": n, "samples": 64, "cases": cases})));

    // antipodal endpoints have no unique minimal geodesic
    let one = UnitaryMatrix::identity(2);
    let flip = UnitaryMatrix::from_angles(&[PI, 0.0]);
    let antipodal = matches!(geodesic(&one, &flip), Err(Error::NonUniqueGeodesic));
    let near = UnitaryMatrix::from_angles(&[PI - 1e-3, 0.0]);
    let unique = geodesic(&one, &near).is_ok();
    out.push(SubTest::new("uniqueness", antipodal && unique, json!({"antipodal_rejected": antipodal, "near_antipodal_unique": unique})));
    Ok((out, vec![]))
}

/// Geodesic between two random points of `B_m[u, r]`.
fn segment_in_ball(u: &UnitaryMatrix, r: f64, m: MetricSpec, rng: &mut FinslerRng) -> Result<GeodesicSegment> {
    loop {
        let r1 = r * uniform(rng, 0.0, 1.0).sqrt();
        let r2 = r * uniform(rng, 0.0, 1.0).sqrt();
        let v1 = sample_at_distance(u, r1, m, rng);
        let v2 = sample_at_distance(u, r2, m, rng);
        match geodesic(&v1, &v2) {
            Ok(seg) if !seg.is_constant() => return Ok(seg),
            Ok(_) | Err(Error::NonUniqueGeodesic) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn convexity_suite(cfg: &VerifyConfig, metrics: &[(MetricSpec, f64, bool)], stream: u64, tag: &str) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(200);
    let r = BALL_FRACTION * FRAC_PI_2;
    let mut out = Vec::new();
    let mut dumps = Vec::new();
    for (mi, &(m, power, strict)) in metrics.iter().enumerate() {
        let mut rng = cfg.rng(stream + mi as u64);
        let mut violations = 0;
        let mut worst = Worst::new();
        let mut strict_checked = 0;
        let mut strict_failures = 0;
        let mut worst_gap = Worst::new();
        for t in 0..trials {
            let u = haar_sample_with(n, &mut rng);
            let seg = segment_in_ball(&u, r, m, &mut rng)?;
            let prof = profile(&u, &seg, m, power, &Grid::for_segment(&seg)?)?;
            violations += prof.violations();
            worst.min(prof.min_second_difference() / prof.tolerance(), t);
            if t == 0 {
                dumps.push(Dump { name: format!("{tag}_{m}_profile.csv"), csv: prof.to_csv() });
            }
            if strict && seg.length(m) >= 0.1 {
                strict_checked += 1;
                let gap = midpoint_gap(&u, &seg, m, power)?;
                strict_failures += (gap <= STRICTNESS_TOL) as usize;
                worst_gap.min(gap, t);
            }
        }
        let pass = violations == 0 && strict_failures == 0;
        out.push(SubTest::new(
            format!("convexity_{m}"),
            pass,
            json!({
                "n": n, "ball_radius": r, "geodesics": trials, "power": power, "violations": violations,
                "min_second_difference_over_tolerance": worst,
                "strictness_checked": strict_checked, "strictness_failures": strict_failures, "min_midpoint_gap": worst_gap,
            }),
        ));
    }
    Ok((out, dumps))
}

pub(super) fn schatten_convexity(cfg: &VerifyConfig) -> Result<Parts> {
    let ms: Vec<_> = cfg.exponents(&[2, 4, 6]).into_iter().map(|p| (MetricSpec::SchattenP(p), p as f64, true)).collect();
    convexity_suite(cfg, &ms, 0, "t3.1")
}

pub(super) fn operator_convexity(cfg: &VerifyConfig) -> Result<Parts> {
    convexity_suite(cfg, &[(MetricSpec::OperatorInf, 1.0, false)], 10, "t3.2")
}

fn rotation_family(theta: f64) -> Result<(UnitaryMatrix, SkewHermitian)> {
    let u = UnitaryMatrix::from_angles(&[theta, -theta]);
    let x = SkewHermitian::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])?)?;
    Ok((u, x))
}

pub(super) fn eigenangles(cfg: &VerifyConfig) -> Result<Parts> {
    let mut out = Vec::new();
    let mut dumps = Vec::new();

    let theta = PI / 3.0;
    let (u, x) = rotation_family(theta)?;
    let tr = eigenangle_trace(&u, &x, &Grid::over(-0.5, 0.5, 201)?)?;
    let closed_form = tr.grid.iter().zip(&tr.theta_max).map(|(t, a)| (a - (theta.cos() * t.cos()).acos()).abs()).fold(0.0, f64::max);
    let v = tr.verdict();
    dumps.push(Dump { name: "p3.3_theta_pi_3.csv".into(), csv: tr.to_csv() });
    out.push(SubTest::new("rotation_theta_pi_over_3", v.convex_max && v.restricted_pass && closed_form < 1e-10, json!({"verdict": v, "closed_form_error": closed_form})));

    // beyond a right angle the extreme eigenangle loses convexity
    let (u, x) = rotation_family(FRAC_PI_2 + 0.05)?;
    let tr = eigenangle_trace(&u, &x, &Grid::over(-0.05, 0.05, 101)?)?;
    let v = tr.verdict();
    dumps.push(Dump { name: "p3.3_theta_beyond_right_angle.csv".into(), csv: tr.to_csv() });
    out.push(SubTest::new("counterexample_theta_beyond_right_angle", !v.convex_max, json!({"violation_detected": !v.convex_max, "verdict": v})));

    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(100);
    let mut rng = cfg.rng(30);
    let (mut failures, mut skipped, mut runs) = (0, 0, 0);
    let grid = Grid::over(-1.0, 1.0, 201)?;
    for _ in 0..trials {
        let u = haar_sample_with(n, &mut rng);
        let x = random_unit_direction(n, &mut rng).scale(uniform(&mut rng, 0.2, 1.5));
        match eigenangle_trace(&u, &x, &grid) {
            Ok(tr) => {
                let v = tr.verdict();
                failures += !v.restricted_pass as usize;
                runs += v.restricted_runs;
            }
            Err(Error::SpectrumHitsMinusOne(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    out.push(SubTest::new("random_families", failures == 0, json!({"n": n, "families": trials, "failures": failures, "skipped": skipped, "gap_runs": runs})));
    Ok((out, dumps))
}

fn probe_subtest(name: String, center: &UnitaryMatrix, r: f64, m: MetricSpec, trials: usize, seed: u64) -> Result<SubTest> {
    let rep = ball_convexity_probe(center, r, m, trials, seed)?;
    Ok(SubTest::new(name, rep.violations == 0, rep))
}

pub(super) fn schatten_balls(cfg: &VerifyConfig) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(500);
    let mut out = Vec::new();
    for (k, p) in cfg.exponents(&[2, 4, 6]).into_iter().enumerate() {
        let center = haar_sample_with(n, &mut cfg.rng(40 + k as u64));
        out.push(probe_subtest(format!("ball_p{p}_r1.5"), &center, 1.5, MetricSpec::SchattenP(p), trials, cfg.stream_seed(40 + k as u64))?);
    }
    // a scalar ball slightly larger than a right angle is not convex
    let r = FRAC_PI_2 + 0.1;
    let one = UnitaryMatrix::identity(1);
    let a = FRAC_PI_2 + 0.05;
    let pair = probe_pair(&one, r, MetricSpec::SchattenP(2), &UnitaryMatrix::from_angles(&[a]), &UnitaryMatrix::from_angles(&[-a]))?;
    let rep = ball_convexity_probe(&one, r, MetricSpec::SchattenP(2), trials, cfg.stream_seed(49))?;
    out.push(SubTest::new(
        "counterexample_u1_beyond_right_angle",
        pair.violation && rep.violations > 0,
        json!({"radius": r, "planted_pair": pair, "random_probe": rep}),
    ));
    Ok((out, vec![]))
}

pub(super) fn operator_balls(cfg: &VerifyConfig) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(500);
    let center = haar_sample_with(n, &mut cfg.rng(50));
    let out = vec![
        probe_subtest("ball_inf_r1.5".into(), &center, 1.5, MetricSpec::OperatorInf, trials, cfg.stream_seed(51))?,
        probe_subtest("closed_ball_inf_right_angle".into(), &center, FRAC_PI_2, MetricSpec::OperatorInf, trials, cfg.stream_seed(52))?,
    ];
    Ok((out, vec![]))
}

/// `h·diag(e^{iθ})·h*` with every `|θ| ≤ bound`.
fn floored_point(n: usize, bound: f64, rng: &mut FinslerRng) -> UnitaryMatrix {
    let h = haar_sample_with(n, rng);
    let angles: Vec<f64> = (0..n).map(|_| uniform(rng, -bound, bound)).collect();
    UnitaryMatrix::new(h.conjugate(UnitaryMatrix::from_angles(&angles).matrix())).expect("conjugate of a unitary")
}

pub(super) fn numerical_range(cfg: &VerifyConfig) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(200);
    let c = 0.3;
    let bound = (c / 2.0f64).acos();
    let grid = Grid::over(0.0, 1.0, 101)?;
    let mut rng = cfg.rng(60);
    let (mut violations, mut skipped) = (0, 0);
    for _ in 0..trials {
        let v = floored_point(n, bound, &mut rng);
        let w = floored_point(n, bound, &mut rng);
        let x = match crate::matrix::unitary_log(&v.left_div(&w)) {
            Ok(l) if !l.branch_ambiguous => l.value,
            _ => {
                skipped += 1;
                continue;
            }
        };
        match numerical_range_floor(&v, &x, c, &grid) {
            Ok(ok) => violations += !ok as usize,
            Err(Error::DirectionTooLong(_) | Error::EndpointViolatesFloor(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let scalar = numerical_range_floor(&UnitaryMatrix::from_angles(&[-0.8]), &SkewHermitian::from_angles(&[1.9]), 0.5, &grid)?;
    Ok((
        vec![
            SubTest::new("random_floor_pairs", violations == 0, json!({"n": n, "c": c, "pairs": trials, "violations": violations, "skipped": skipped})),
            SubTest::new("scalar_arc", scalar, json!({"from": -0.8, "to": 1.1, "c": 0.5})),
        ],
        vec![],
    ))
}

pub(super) fn symmetry_geodesics(cfg: &VerifyConfig) -> Result<Parts> {
    let trials = cfg.trials_or(500);
    let ts: Vec<f64> = (0..33).map(|k| k as f64 / 32.0).collect();
    let grid = Grid::over(0.0, 1.0, 9)?;
    let mut cases = Vec::new();
    let mut ok = true;
    for (k, n) in cfg.dims(&[2, 3, 4]).into_iter().enumerate() {
        let mut rng = cfg.rng(70 + k as u64);
        let mut worst = Worst::for_max();
        let (mut failures, mut closure_failures, mut rejected) = (0, 0, 0);
        let mut t = 0;
        while t < trials {
            let m = 1 + (uniform(&mut rng, 0.0, (n - 1) as f64) as usize).min(n - 2);
            let u = symmetry_embed(&random_projection(n, m, &mut rng))?;
            let v = symmetry_embed(&random_projection(n, m, &mut rng))?;
            if distance(&u, &v, MetricSpec::OperatorInf)? >= PI - ANTIPODAL_MARGIN {
                rejected += 1;
                continue;
            }
            let d = symmetry_geodesic_defect(&u, &v, &ts)?;
            worst.max(d, t);
            failures += (d > SYMMETRY_TOL) as usize;
            closure_failures += !geodesic_closure_check(SubspaceSpec::GrassmannSymmetries(m), &u, &v, &grid)? as usize;
            t += 1;
        }
        ok &= failures == 0 && closure_failures == 0;
        cases.push(json!({"n": n, "pairs": trials, "failures": failures, "closure_failures": closure_failures, "max_defect": worst, "rejected_near_antipodal": rejected}));
    }
    Ok((vec![SubTest::new("reflections_along_geodesics", ok, json!({"tolerance": SYMMETRY_TOL, "samples": ts.len(), "cases": cases}))], vec![]))
}

pub(super) fn strong_convexity(cfg: &VerifyConfig) -> Result<Parts> {
    let n = cfg.n.unwrap_or(3);
    let trials = cfg.trials_or(100);
    let r = 1.2;
    let mut rng = cfg.rng(80);
    let (mut failures, mut statement_failures) = (0, 0);
    let mut worst = Worst::new();
    let mut worst_statement = Worst::new();
    for t in 0..trials {
        let u = haar_sample_with(n, &mut rng);
        let seg = segment_in_ball(&u, r, MetricSpec::OperatorInf, &mut rng)?;
        let rec = strong_convexity_check(&u, &seg, r)?;
        failures += !rec.pass as usize;
        statement_failures += !rec.pass_statement as usize;
        worst.min(rec.min_second_diff - rec.lambda_bound, t);
        worst_statement.min(rec.min_second_diff - rec.lambda_statement, t);
    }
    Ok((
        vec![SubTest::new(
            "squared_riemannian_distance",
            failures == 0,
            json!({
                "n": n, "radius": r, "configurations": trials, "failures": failures,
                "statement_bound_failures": statement_failures,
                "min_excess_over_bound": worst, "min_excess_over_statement_bound": worst_statement,
            }),
        )],
        vec![],
    ))
}
