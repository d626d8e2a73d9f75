//! Property tests for the invariants of metrics, spectral primitives,
//! circumcenters, geodesic subspaces and rigidity.

use std::f64::consts::{FRAC_PI_2, PI};

use finsler_core::circumcenter::{f_sup, radius_and_center, PointSet, SolverOptions};
use finsler_core::convexity::{profile, sample_at_distance, Grid};
use finsler_core::matrix::{
    haar_sample, herm_eig, random_unit_direction, rng_from_seed, schatten_norm, skew_exp, uniform, unitary_log, ComplexMatrix, NormOrder, SkewHermitian,
    UnitaryMatrix,
};
use finsler_core::metrics::{distance, geodesic, MetricSpec};
use finsler_core::rigidity::{grassmann_fixed_point, orbit, orbit_radius_inf, solve_conjugator};
use finsler_core::scenarios::{planted_pair, reference_representations};
use finsler_core::subspaces::{
    random_projection, random_special_orthogonal, random_special_unitary, symmetry_defect, symmetry_embed, ProjectionMatrix,
};
use proptest::prelude::*;

fn metrics() -> Vec<MetricSpec> {
    vec![
        MetricSpec::SchattenP(2),
        MetricSpec::SchattenP(4),
        MetricSpec::SchattenP(6),
        MetricSpec::OperatorInf,
        MetricSpec::PerturbedInf(0.1),
        MetricSpec::PerturbedP(4, 0.1),
    ]
}

fn direction(n: usize, seed: u64, size: f64) -> SkewHermitian {
    random_unit_direction(n, &mut rng_from_seed(seed)).scale(size)
}

fn near(c: &UnitaryMatrix, seed: u64, size: f64) -> UnitaryMatrix {
    c.mul(&skew_exp(&direction(c.n(), seed, size)).unwrap())
}

fn clustered(n: usize, k: usize, seed: u64) -> PointSet {
    let c = haar_sample(n, seed);
    PointSet::new((0..k).map(|i| near(&c, seed ^ (i as u64 + 1) << 20, 0.3 + 0.1 * i as f64)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bi_invariance(n in 1usize..=4, seed in any::<u64>()) {
        let u = haar_sample(n, seed);
        let v = haar_sample(n, seed.wrapping_add(1));
        let w = haar_sample(n, seed.wrapping_add(2));
        for m in metrics() {
            let d = distance(&u, &v, m).unwrap();
            prop_assert!((distance(&w.mul(&u), &w.mul(&v), m).unwrap() - d).abs() < 1e-9);
            prop_assert!((distance(&u.mul(&w), &v.mul(&w), m).unwrap() - d).abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_inequality(n in 1usize..=4, seed in any::<u64>()) {
        let a = haar_sample(n, seed);
        let b = haar_sample(n, seed.wrapping_add(1));
        let c = haar_sample(n, seed.wrapping_add(2));
        for m in metrics() {
            let slack = distance(&a, &b, m).unwrap() + distance(&b, &c, m).unwrap() - distance(&a, &c, m).unwrap();
            prop_assert!(slack >= -1e-9, "{m}: {slack}");
        }
    }

    #[test]
    fn metric_ordering(n in 1usize..=4, seed in any::<u64>(), p in prop::sample::select(vec![2u32, 4, 6, 8])) {
        let u = haar_sample(n, seed);
        let v = haar_sample(n, seed.wrapping_add(1));
        let eps = 0.1;
        let d_inf = distance(&u, &v, MetricSpec::OperatorInf).unwrap();
        let d_p = distance(&u, &v, MetricSpec::SchattenP(p)).unwrap();
        let d_p_eps = distance(&u, &v, MetricSpec::PerturbedP(p, eps)).unwrap();
        let d_inf_eps = distance(&u, &v, MetricSpec::PerturbedInf(eps)).unwrap();
        let d2 = distance(&u, &v, MetricSpec::SchattenP(2)).unwrap();
        prop_assert!(d_inf <= d_p + 1e-12);
        prop_assert!(d_p <= d_p_eps + 1e-12);
        prop_assert!(d_inf <= d_inf_eps + 1e-12);
        prop_assert!(d_inf_eps <= d_inf + eps * d2 + 1e-12);
    }

    #[test]
    fn epsilon_limit(n in 1usize..=4, seed in any::<u64>()) {
        let u = haar_sample(n, seed);
        let v = haar_sample(n, seed.wrapping_add(1));
        let d_p = distance(&u, &v, MetricSpec::SchattenP(4)).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let d = distance(&u, &v, MetricSpec::PerturbedP(4, eps)).unwrap();
            prop_assert!(d <= last + 1e-12 && d >= d_p - 1e-12);
            last = d;
        }
        // ε^p·d_2² at ε = 10⁻³ is below 10⁻¹¹
        prop_assert!(last - d_p < 1e-9);
    }

    #[test]
    fn p_limit(n in 1usize..=4, seed in any::<u64>()) {
        let u = haar_sample(n, seed);
        let v = haar_sample(n, seed.wrapping_add(1));
        let d_inf = distance(&u, &v, MetricSpec::OperatorInf).unwrap();
        let mut last = f64::INFINITY;
        for p in (2..=64).step_by(2) {
            let d = distance(&u, &v, MetricSpec::SchattenP(p)).unwrap();
            prop_assert!(d <= last + 1e-9 && d >= d_inf - 1e-12);
            last = d;
        }
        prop_assert!(last - d_inf <= d_inf * ((n as f64).powf(1.0 / 64.0) - 1.0) + 1e-12);
    }

    #[test]
    fn log_exp_round_trip(n in 1usize..=4, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let x = direction(n, seed, frac * (PI - 1e-6));
        let back = unitary_log(&skew_exp(&x).unwrap()).unwrap();
        prop_assert!((back.value.matrix() - x.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn schatten_conjugation_invariance(n in 1usize..=4, seed in any::<u64>(), p in prop::sample::select(vec![2u32, 4, 6, 12])) {
        let x = direction(n, seed, 1.7);
        let v = haar_sample(n, seed.wrapping_add(3));
        for order in [NormOrder::P(p), NormOrder::Inf] {
            let a = schatten_norm(x.matrix(), order).unwrap();
            let b = schatten_norm(&v.conjugate(x.matrix()), order).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_chain(n in 1usize..=4, seed in any::<u64>()) {
        let x = direction(n, seed, 2.3);
        let inf = schatten_norm(x.matrix(), NormOrder::Inf).unwrap();
        for p in (2..=12).step_by(2) {
            let np = schatten_norm(x.matrix(), NormOrder::P(p)).unwrap();
            prop_assert!(inf <= np + 1e-12);
            prop_assert!(np <= (n as f64).powf(1.0 / p as f64) * inf + 1e-12);
        }
    }

    #[test]
    fn hermitian_spectrum_similarity_stable(n in 1usize..=4, seed in any::<u64>()) {
        let h = direction(n, seed, 3.0).to_hermitian();
        let v = haar_sample(n, seed.wrapping_add(5));
        let mut a = herm_eig(&h).unwrap().angles;
        let mut b = herm_eig(&v.conjugate(&h).hermitian_part()).unwrap().angles;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetry_distance_bookkeeping(n in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let m = 1 + (uniform(&mut rng, 0.0, (n - 1) as f64) as usize).min(n - 2);
        let ep = symmetry_embed(&random_projection(n, m, &mut rng)).unwrap();
        let eq = symmetry_embed(&random_projection(n, m, &mut rng)).unwrap();
        let w = haar_sample(n, seed.wrapping_add(9));
        let conj = |e: &UnitaryMatrix| UnitaryMatrix::new(w.conjugate(e.matrix())).unwrap();
        let a = distance(&ep, &eq, MetricSpec::OperatorInf).unwrap();
        let b = distance(&conj(&ep), &conj(&eq), MetricSpec::OperatorInf).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn special_unitary_logs_are_traceless(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let u = random_special_unitary(n, &mut rng);
        let v = random_special_unitary(n, &mut rng);
        // d_2 < π bounds Σ|θ| by √n·π ≤ 2π for n ≤ 4, leaving 0 as the only multiple of 2π
        prop_assume!(distance(&u, &v, MetricSpec::SchattenP(2)).unwrap() < PI);
        let x = unitary_log(&u.inverse().mul(&v)).unwrap().value;
        prop_assert!(x.matrix().trace().norm() < 1e-9);
    }

    #[test]
    fn special_orthogonal_logs_are_real(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let u = random_special_orthogonal(n, &mut rng);
        let v = random_special_orthogonal(n, &mut rng);
        prop_assume!(distance(&u, &v, MetricSpec::OperatorInf).unwrap() < PI - 1e-3);
        let x = unitary_log(&u.inverse().mul(&v)).unwrap().value;
        prop_assert!(x.matrix().max_imag() < 1e-9);
    }

    #[test]
    fn schatten_profiles_convex_in_ball(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 4, 6])) {
        let mut rng = rng_from_seed(seed);
        let m = MetricSpec::SchattenP(p);
        let u = haar_sample(3, seed);
        let r = FRAC_PI_2 - 1e-3;
        let v1 = sample_at_distance(&u, r * uniform(&mut rng, 0.0, 1.0), m, &mut rng);
        let v2 = sample_at_distance(&u, r * uniform(&mut rng, 0.0, 1.0), m, &mut rng);
        let seg = geodesic(&v1, &v2).unwrap();
        prop_assume!(!seg.is_constant());
        let prof = profile(&u, &seg, m, p as f64, &Grid::for_segment(&seg).unwrap()).unwrap();
        prop_assert!(prof.is_convex(), "min second difference {}", prof.min_second_difference());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn circumcenter_equivariance_and_containment(
        n in 2usize..=3,
        k in 2usize..=4,
        seed in any::<u64>(),
        m in prop::sample::select(vec![MetricSpec::SchattenP(2), MetricSpec::SchattenP(4), MetricSpec::PerturbedP(4, 0.1)]),
    ) {
        let a = clustered(n, k, seed);
        let opts = SolverOptions { trace: true, ..SolverOptions::default() };
        let res = radius_and_center(&a, m, &opts).unwrap();
        for p in a.points() {
            prop_assert!(distance(&res.center, p, m).unwrap() <= res.radius + 1e-9);
        }
        let trace = res.trace.as_ref().unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-12, "trace increased: {:?}", w);
        }
        let w = haar_sample(n, seed.wrapping_add(17));
        let moved = radius_and_center(&a.left_translate(&w), m, &opts).unwrap();
        prop_assert!(distance(&moved.center, &w.mul(&res.center), MetricSpec::OperatorInf).unwrap() < 1e-6);
        prop_assert!((moved.radius - res.radius).abs() < 1e-9);
    }

    #[test]
    fn scalar_radius_matches_grid(seed in any::<u64>(), k in 2usize..=5) {
        let mut rng = rng_from_seed(seed);
        let base = uniform(&mut rng, -PI, PI);
        let pts: Vec<UnitaryMatrix> = (0..k).map(|_| UnitaryMatrix::from_angles(&[base + uniform(&mut rng, -1.2, 1.2)])).collect();
        let a = PointSet::new(pts).unwrap();
        let m = MetricSpec::SchattenP(2);
        let res = radius_and_center(&a, m, &SolverOptions::default()).unwrap();
        let f = |t: f64| f_sup(&UnitaryMatrix::from_angles(&[t]), &a, m).unwrap().0;
        let coarse = 2.0 * PI / 20000.0;
        let (t0, _) = (0..20000).map(|j| -PI + coarse * j as f64).map(|t| (t, f(t))).fold((0.0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
        let grid_min = (0..=2000).map(|j| f(t0 - coarse + coarse * j as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
        prop_assert!((res.radius - grid_min).abs() <= 1e-4);
    }

    #[test]
    fn perturbed_centers_approach_unperturbed(n in 2usize..=3, seed in any::<u64>()) {
        let a = clustered(n, 3, seed);
        let opts = SolverOptions::default();
        let base = radius_and_center(&a, MetricSpec::SchattenP(4), &opts).unwrap();
        let mut centers = Vec::new();
        for eps in [1e-1, 1e-2, 1e-3] {
            centers.push(radius_and_center(&a, MetricSpec::PerturbedP(4, eps), &opts).unwrap().center);
        }
        for c in &centers {
            for d in &centers {
                prop_assert!(distance(c, d, MetricSpec::OperatorInf).unwrap() <= 1e-3);
            }
        }
        prop_assert!(distance(&centers[2], &base.center, MetricSpec::OperatorInf).unwrap() <= 1e-3);
    }

    #[test]
    fn rigidity_certificates(idx in 0usize..5, seed in any::<u64>()) {
        let (_, group, phi) = reference_representations().unwrap().swap_remove(idx);
        let n = phi[0].n();
        let w = skew_exp(&direction(n, seed, 0.35)).unwrap();
        let pair = planted_pair(group.clone(), phi.clone(), &w).unwrap();
        let opts = SolverOptions::default();
        let cert = solve_conjugator(&pair, &UnitaryMatrix::identity(n), None, &opts).unwrap();
        prop_assert!(cert.recompute_residual(&pair).unwrap() <= 1e-8);

        // orbit sizes divide the group order
        let o = orbit(&haar_sample(n, seed), &pair).unwrap();
        prop_assert_eq!(group.order() % o.len(), 0);

        // conjugating ρ by v and moving the base point to v keeps the orbit radius
        let v = haar_sample(n, seed.wrapping_add(4));
        let moved = pair.conjugate_rho(&v.inverse()).unwrap();
        let r1 = orbit_radius_inf(&pair, &UnitaryMatrix::identity(n), &opts).unwrap();
        let r2 = orbit_radius_inf(&moved, &v, &opts).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-9);
        let cert2 = solve_conjugator(&moved, &v, None, &opts).unwrap();
        prop_assert!(cert2.residual <= 1e-8);

        // sup_h d_∞(ρ(h), φ(h)) < π/2 bounds the orbit radius at the identity
        let sup = pair.phi.iter().zip(&pair.rho).map(|(a, b)| distance(a, b, MetricSpec::OperatorInf).unwrap()).fold(0.0, f64::max);
        if sup < FRAC_PI_2 {
            prop_assert!(r1 < FRAC_PI_2);
        }
    }

    #[test]
    fn grassmann_fixed_projection_is_symmetry(seed in any::<u64>()) {
        let phi = reference_representations().unwrap().swap_remove(3).2;
        let a = 1.0 / 3f64.sqrt();
        let b = 1.0 / 2f64.sqrt();
        let c = 1.0 / 6f64.sqrt();
        let basis = UnitaryMatrix::new(ComplexMatrix::from_real_rows(&[&[a, b, c], &[a, -b, c], &[a, 0.0, -2.0 * c]]).unwrap()).unwrap();
        let v = near(&basis, seed, 0.2);
        let p = ProjectionMatrix::onto_columns(&v, 1);
        let q = grassmann_fixed_point(&phi, &p, None, &SolverOptions::default()).unwrap();
        prop_assert!(symmetry_defect(&symmetry_embed(&q).unwrap()).unwrap() <= 1e-9);
        for h in &phi {
            prop_assert!(h.matrix().commutator(q.matrix()).op_norm() <= 1e-8);
        }
    }
}
