//! Equivalence of finite-group representations via orbit circumcenters, and
//! fixed points of finite groups acting on Grassmannians by conjugation.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::circumcenter::{
    dedup_points, fixed_point_of_group, radius_and_center_in, CircumcenterResult, FixedPoint, Isometry, PointSet, SolverOptions,
    CLOSURE_BUDGET, FIXED_POINT_TOL,
};
use crate::error::{Error, Result};
use crate::matrix::{rng_from_seed, uniform, ComplexMatrix, MatrixJson, UnitaryMatrix, C64};
use crate::metrics::{distance, MetricSpec};
use crate::subspaces::{belongs, random_element, symmetry_embed, symmetry_extract, ProjectionMatrix, SubspaceSpec};

pub const MAX_GROUP_ORDER: usize = 10_000;
pub const HOMOMORPHISM_TOL: f64 = 1e-9;
const EXHAUSTIVE_TRIPLES: usize = 10_000_000;
const EXHAUSTIVE_PAIRS: usize = 1_000_000;
const SAMPLED_CHECKS: usize = 1_000_000;

/// Finite group given by a multiplication table over labelled elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteGroupPresentation {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroupPresentation {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 || n > MAX_GROUP_ORDER {
            return Err(Error::InvalidGroup(format!("order {n} outside 1..={MAX_GROUP_ORDER}")));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table must be square with entries indexing the elements".into()));
        }
        let mut labels = elements.clone();
        labels.sort();
        labels.dedup();
        if labels.len() != n {
            return Err(Error::InvalidGroup("element labels must be distinct".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element '{}' has no inverse", elements[x])))?;
            inverses.push(inv);
        }
        let check = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n * n * n <= EXHAUSTIVE_TRIPLES {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !check(a, b, c) {
                            return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = rng_from_seed(n as u64);
            for _ in 0..SAMPLED_CHECKS {
                let pick = |r: &mut _| (uniform(r, 0.0, n as f64) as usize).min(n - 1);
                let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                if !check(a, b, c) {
                    return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
        Ok(Self { elements, table, identity, inverses })
    }

    /// `ℤ/k` with elements `r^j`.
    pub fn cyclic(k: usize) -> Result<Self> {
        let elements = (0..k).map(|j| format!("r{j}")).collect();
        let table = (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect();
        Self::new(elements, table)
    }

    /// Dihedral group of order `2k`; element `j + k·e` is `r^j s^e`.
    pub fn dihedral(k: usize) -> Result<Self> {
        let elements = (0..2 * k).map(|i| if i < k { format!("r{i}") } else { format!("r{}s", i - k) }).collect();
        let table = (0..2 * k)
            .map(|x| {
                let (a, e) = (x % k, x / k);
                (0..2 * k)
                    .map(|y| {
                        let (b, f) = (y % k, y / k);
                        // r^a s^e r^b s^f = r^{a ± b} s^{e + f}
                        let j = if e == 0 { (a + b) % k } else { (a + k - b) % k };
                        j + k * ((e + f) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::new(elements, table)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }
}

/// Two homomorphisms `φ, ρ : H → G` into a geodesic subgroup `G`.
#[derive(Clone, Debug)]
pub struct RepresentationPair {
    pub group: FiniteGroupPresentation,
    pub phi: Vec<UnitaryMatrix>,
    pub rho: Vec<UnitaryMatrix>,
    pub subspace: SubspaceSpec,
}

fn homomorphism_defect(group: &FiniteGroupPresentation, rep: &[UnitaryMatrix]) -> f64 {
    let n = group.order();
    let defect = |a: usize, b: usize| (rep[a].mul(&rep[b]).matrix() - rep[group.mul(a, b)].matrix()).max_abs();
    let mut worst: f64 = 0.0;
    if n * n <= EXHAUSTIVE_PAIRS {
        for a in 0..n {
            for b in 0..n {
                worst = worst.max(defect(a, b));
            }
        }
    } else {
        let mut rng = rng_from_seed(n as u64 ^ 0x5eed);
        for _ in 0..SAMPLED_CHECKS {
            let a = (uniform(&mut rng, 0.0, n as f64) as usize).min(n - 1);
            let b = (uniform(&mut rng, 0.0, n as f64) as usize).min(n - 1);
            worst = worst.max(defect(a, b));
        }
    }
    worst
}

impl RepresentationPair {
    pub fn new(group: FiniteGroupPresentation, phi: Vec<UnitaryMatrix>, rho: Vec<UnitaryMatrix>, subspace: SubspaceSpec) -> Result<Self> {
        let order = group.order();
        if phi.len() != order || rho.len() != order {
            return Err(Error::InvalidArgument(format!("expected {order} images, got {} and {}", phi.len(), rho.len())));
        }
        let n = phi[0].n();
        subspace.validate_for(n)?;
        for m in phi.iter().chain(&rho) {
            if m.n() != n {
                return Err(Error::DimensionMismatch(n, m.n()));
            }
        }
        for (name, rep) in [("phi", &phi), ("rho", &rho)] {
            let d = homomorphism_defect(&group, rep);
            if d > HOMOMORPHISM_TOL {
                return Err(Error::NotHomomorphism(d));
            }
            if let Some(i) = rep.iter().position(|m| !belongs(m, subspace)) {
                return Err(Error::NotInSubspace(format!("{name}({}) is not in {subspace}", group.elements()[i])));
            }
        }
        Ok(Self { group, phi, rho, subspace })
    }

    pub fn n(&self) -> usize {
        self.phi[0].n()
    }

    /// The isometries `g ↦ φ(h)·g·ρ(h)⁻¹`, in element order.
    pub fn isometries(&self) -> Vec<Isometry> {
        self.phi.iter().zip(&self.rho).map(|(a, b)| Isometry { left: a.clone(), right: b.clone() }).collect()
    }

    /// `ρ' = w·ρ·w⁻¹`.
    pub fn conjugate_rho(&self, w: &UnitaryMatrix) -> Result<Self> {
        let rho = self.rho.iter().map(|r| UnitaryMatrix::new(w.conjugate(r.matrix()))).collect::<Result<Vec<_>>>()?;
        Self::new(self.group.clone(), self.phi.clone(), rho, self.subspace)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RepresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_pair()
    }

    pub fn to_json(&self) -> String {
        let images = |rep: &[UnitaryMatrix]| self.group.elements().iter().cloned().zip(rep.iter().map(|u| MatrixJson::from_matrix(u.matrix()))).collect();
        let file = RepresentationFile {
            group: GroupFile { elements: self.group.elements().to_vec(), table: self.group.table().to_vec() },
            phi: images(&self.phi),
            rho: images(&self.rho),
            subspace: self.subspace,
        };
        serde_json::to_string_pretty(&file).expect("representation serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RepresentationFile {
    group: GroupFile,
    phi: BTreeMap<String, MatrixJson>,
    rho: BTreeMap<String, MatrixJson>,
    #[serde(default = "full_unitary")]
    subspace: SubspaceSpec,
}

fn full_unitary() -> SubspaceSpec {
    SubspaceSpec::FullUnitary
}

impl RepresentationFile {
    fn into_pair(self) -> Result<RepresentationPair> {
        let group = FiniteGroupPresentation::new(self.group.elements, self.group.table)?;
        let lookup = |map: &BTreeMap<String, MatrixJson>, name: &str| -> Result<Vec<UnitaryMatrix>> {
            group
                .elements()
                .iter()
                .map(|l| map.get(l).ok_or_else(|| Error::Parse(format!("{name} has no image for '{l}'")))?.to_unitary())
                .collect()
        };
        let phi = lookup(&self.phi, "phi")?;
        let rho = lookup(&self.rho, "rho")?;
        RepresentationPair::new(group, phi, rho, self.subspace)
    }
}

/// `{φ(h)·u·ρ(h)⁻¹}` deduplicated at `d_∞ < 10⁻¹⁰`, in element order.
pub fn orbit(u: &UnitaryMatrix, pair: &RepresentationPair) -> Result<PointSet> {
    if u.n() != pair.n() {
        return Err(Error::DimensionMismatch(pair.n(), u.n()));
    }
    if !belongs(u, pair.subspace) {
        return Err(Error::NotInSubspace(format!("u is not in {}", pair.subspace)));
    }
    PointSet::new(dedup_points(pair.isometries().iter().map(|h| h.apply(u)).collect())?)
}

/// Circumradius of the orbit of `u` in `d_∞`.
pub fn orbit_radius_inf(pair: &RepresentationPair, u: &UnitaryMatrix, opts: &SolverOptions) -> Result<f64> {
    Ok(orbit_center_inf(pair, u, opts)?.radius)
}

fn orbit_center_inf(pair: &RepresentationPair, u: &UnitaryMatrix, opts: &SolverOptions) -> Result<CircumcenterResult> {
    let o = orbit(u, pair)?;
    radius_and_center_in(&o, MetricSpec::OperatorInf, pair.subspace, opts)
}

/// Computable upper bound for `inf_u radius_∞(orbit(u))`: the smallest orbit
/// radius over the identity and `extra` random elements of the subspace.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusScan {
    pub best_radius: f64,
    pub best_u0: UnitaryMatrix,
    pub radii: Vec<f64>,
    pub upper_bound_only: bool,
}

pub fn scan_orbit_radius(pair: &RepresentationPair, extra: usize, seed: u64, opts: &SolverOptions) -> Result<RadiusScan> {
    let n = pair.n();
    let mut rng = rng_from_seed(seed);
    let mut candidates = vec![match pair.subspace {
        SubspaceSpec::GrassmannSymmetries(m) => symmetry_embed(&ProjectionMatrix::coordinate(n, m))?,
        _ => UnitaryMatrix::identity(n),
    }];
    for _ in 0..extra {
        candidates.push(random_element(pair.subspace, n, &mut rng));
    }
    let mut radii = Vec::with_capacity(candidates.len());
    let mut best = (f64::INFINITY, 0);
    for (i, u) in candidates.iter().enumerate() {
        let r = match orbit_radius_inf(pair, u, opts) {
            Ok(r) => r,
            // an antipodal pair in the orbit forces radius ≥ π/2
            Err(Error::AntipodalPair(..)) => FRAC_PI_2,
            Err(e) => return Err(e),
        };
        radii.push(r);
        if r < best.0 {
            best = (r, i);
        }
    }
    Ok(RadiusScan { best_radius: best.0, best_u0: candidates[best.1].clone(), radii, upper_bound_only: true })
}

/// Certified conjugator `g` with `φ(h) = g·ρ(h)·g⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityCertificate {
    pub conjugator: UnitaryMatrix,
    pub residual: f64,
    pub residuals: Vec<f64>,
    pub orbit_radius: f64,
    pub epsilon_used: f64,
    pub orbit_size: usize,
}

impl RigidityCertificate {
    /// Recomputes the residual from the conjugator alone.
    pub fn recompute_residual(&self, pair: &RepresentationPair) -> Result<f64> {
        Ok(conjugation_residuals(pair, &self.conjugator)?.into_iter().fold(0.0, f64::max))
    }
}

/// `d_∞(φ(h), g·ρ(h)·g⁻¹)` for every element.
pub fn conjugation_residuals(pair: &RepresentationPair, g: &UnitaryMatrix) -> Result<Vec<f64>> {
    pair.phi
        .iter()
        .zip(&pair.rho)
        .map(|(p, r)| distance(p, &UnitaryMatrix::from_trusted(g.conjugate(r.matrix())), MetricSpec::OperatorInf))
        .collect()
}

/// Recovers a conjugator as the fixed point of `g ↦ φ(h)·g·ρ(h)⁻¹` near `u0`.
///
/// `RadiusTooLarge` means the sufficient condition failed; it does not show
/// that the representations are inequivalent.
pub fn solve_conjugator(pair: &RepresentationPair, u0: &UnitaryMatrix, eps: Option<f64>, opts: &SolverOptions) -> Result<RigidityCertificate> {
    if !belongs(u0, pair.subspace) {
        return Err(Error::NotInSubspace(format!("u0 is not in {}", pair.subspace)));
    }
    let fp: FixedPoint = fixed_point_of_group(&pair.isometries(), u0, pair.subspace, eps, opts)?;
    let residuals = conjugation_residuals(pair, &fp.point)?;
    let residual = residuals.iter().copied().fold(0.0, f64::max);
    if residual > FIXED_POINT_TOL || !belongs(&fp.point, pair.subspace) {
        return Err(Error::NotConverged { iterations: 0, objective: residual });
    }
    Ok(RigidityCertificate { conjugator: fp.point, residual, residuals, orbit_radius: fp.orbit_radius, epsilon_used: fp.epsilon_used, orbit_size: fp.orbit_size })
}

/// Result of an equivalence attempt.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status")]
pub enum RigidityOutcome {
    #[serde(rename = "CERTIFIED")]
    Certified(RigidityCertificate),
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive { orbit_radius: f64, bound: f64 },
}

pub fn decide_equivalence(pair: &RepresentationPair, u0: &UnitaryMatrix, eps: Option<f64>, opts: &SolverOptions) -> Result<RigidityOutcome> {
    match solve_conjugator(pair, u0, eps, opts) {
        Ok(c) => Ok(RigidityOutcome::Certified(c)),
        Err(Error::RadiusTooLarge { radius, bound }) => Ok(RigidityOutcome::Inconclusive { orbit_radius: radius, bound }),
        Err(e) => Err(e),
    }
}

/// Closure of a finite matrix group, identity first, deduplicated entrywise at `10⁻⁹`.
pub fn matrix_group_closure(generators: &[UnitaryMatrix], n: usize, budget: usize) -> Result<Vec<UnitaryMatrix>> {
    let mut elems = vec![UnitaryMatrix::identity(n)];
    let mut next = 0;
    while next < elems.len() {
        let g = elems[next].clone();
        next += 1;
        for s in generators {
            if s.n() != n {
                return Err(Error::DimensionMismatch(n, s.n()));
            }
            let h = g.mul(s);
            if !elems.iter().any(|e| e.matrix().entrywise_dist(h.matrix()) < 1e-9) {
                if elems.len() >= budget {
                    return Err(Error::ClosureBudgetExceeded(budget));
                }
                elems.push(h);
            }
        }
    }
    Ok(elems)
}

/// The first `budget` products of the generators in breadth-first order.
pub fn truncated_closure(generators: &[UnitaryMatrix], n: usize, budget: usize) -> Result<Vec<UnitaryMatrix>> {
    match matrix_group_closure(generators, n, budget) {
        Err(Error::ClosureBudgetExceeded(_)) => {
            let mut elems = vec![UnitaryMatrix::identity(n)];
            let mut next = 0;
            while elems.len() < budget && next < elems.len() {
                let g = elems[next].clone();
                next += 1;
                for s in generators {
                    let h = g.mul(s);
                    if elems.len() < budget && !elems.iter().any(|e| e.matrix().entrywise_dist(h.matrix()) < 1e-9) {
                        elems.push(h);
                    }
                }
            }
            Ok(elems)
        }
        other => other,
    }
}

/// Signed permutation matrices of `ℂ^n`, the group of order `2^n·n!`.
pub fn signed_permutations(n: usize) -> Result<Vec<UnitaryMatrix>> {
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut m = ComplexMatrix::identity(n);
        m[(i, i)] = C64::new(0.0, 0.0);
        m[(i + 1, i + 1)] = C64::new(0.0, 0.0);
        m[(i, i + 1)] = C64::new(1.0, 0.0);
        m[(i + 1, i)] = C64::new(1.0, 0.0);
        gens.push(UnitaryMatrix::new(m)?);
    }
    let mut sign = vec![0.0; n];
    sign[0] = PI;
    gens.push(UnitaryMatrix::from_angles(&sign));
    matrix_group_closure(&gens, n, CLOSURE_BUDGET)
}

/// Commutator norms `‖hQ − Qh‖_∞`.
pub fn commutator_defects(h: &[UnitaryMatrix], q: &ProjectionMatrix) -> Vec<f64> {
    h.iter().map(|g| g.matrix().commutator(q.matrix()).op_norm()).collect()
}

/// Projection `Q` of the same rank as `P0` commuting with every element of the
/// group generated by `generators`.
pub fn grassmann_fixed_point(generators: &[UnitaryMatrix], p0: &ProjectionMatrix, eps: Option<f64>, opts: &SolverOptions) -> Result<ProjectionMatrix> {
    let group = matrix_group_closure(generators, p0.n(), CLOSURE_BUDGET)?;
    grassmann_fixed_point_of(&group, p0, eps, opts)
}

/// As [`grassmann_fixed_point`] for an explicit list of elements.
pub fn grassmann_fixed_point_of(group: &[UnitaryMatrix], p0: &ProjectionMatrix, eps: Option<f64>, opts: &SolverOptions) -> Result<ProjectionMatrix> {
    let n = p0.n();
    let m = p0.rank();
    let s = SubspaceSpec::GrassmannSymmetries(m);
    s.validate_for(n)?;
    let e0 = symmetry_embed(p0)?;
    let isos: Vec<Isometry> = group.iter().map(|h| Isometry { left: h.clone(), right: h.clone() }).collect();
    let fp = fixed_point_of_group(&isos, &e0, s, eps, opts)?;
    let q = symmetry_extract(&fp.point)?;
    if q.rank() != m {
        return Err(Error::NotConverged { iterations: 0, objective: q.rank() as f64 });
    }
    let worst = commutator_defects(group, &q).into_iter().fold(0.0, f64::max);
    if worst > FIXED_POINT_TOL {
        return Err(Error::NotConverged { iterations: 0, objective: worst });
    }
    Ok(q)
}

/// Orbit `{h·e_P·h⁻¹}` of a symmetry under conjugation.
pub fn symmetry_orbit(group: &[UnitaryMatrix], p: &ProjectionMatrix) -> Result<PointSet> {
    let e = symmetry_embed(p)?;
    PointSet::new(dedup_points(group.iter().map(|h| UnitaryMatrix::from_trusted(h.conjugate(e.matrix()))).collect())?)
}

/// Cyclic representation `r^j ↦ diag(e^{2πi j c_l / k})` for characters `c`.
pub fn cyclic_representation(k: usize, characters: &[i64]) -> Vec<UnitaryMatrix> {
    (0..k)
        .map(|j| UnitaryMatrix::from_angles(&characters.iter().map(|&c| 2.0 * PI * ((j as i64 * c).rem_euclid(k as i64)) as f64 / k as f64).map(wrap).collect::<Vec<_>>()))
        .collect()
}

fn wrap(t: f64) -> f64 {
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Two-dimensional real representation of the dihedral group of order `2k`:
/// `r` rotates by `2π/k`, `s` reflects in the first axis.
pub fn dihedral_representation(k: usize) -> Vec<UnitaryMatrix> {
    let rot = |j: usize| {
        let a = 2.0 * PI * j as f64 / k as f64;
        ComplexMatrix::from_real_rows(&[&[a.cos(), -a.sin()], &[a.sin(), a.cos()]]).expect("2x2")
    };
    let s = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    (0..2 * k).map(|i| UnitaryMatrix::from_trusted(if i < k { rot(i) } else { &rot(i - k) * &s })).collect()
}

/// Permutation representation of the dihedral group of order 6 (`≅ S_3`) on `ℂ³`.
pub fn triangle_permutation_representation() -> Vec<UnitaryMatrix> {
    let perm = |p: [usize; 3]| {
        let mut m = ComplexMatrix::zeros(3);
        for (i, &j) in p.iter().enumerate() {
            m[(j, i)] = C64::new(1.0, 0.0);
        }
        UnitaryMatrix::from_trusted(m)
    };
    let r = perm([1, 2, 0]);
    let s = perm([0, 2, 1]);
    let mut out = Vec::with_capacity(6);
    let mut rj = UnitaryMatrix::identity(3);
    for _ in 0..3 {
        out.push(rj.clone());
        rj = rj.mul(&r);
    }
    for j in 0..3 {
        out.push(out[j].mul(&s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::GeodesicSegment;

    fn small_unitary(n: usize, seed: u64, size: f64) -> UnitaryMatrix {
        let mut rng = rng_from_seed(seed);
        let x = crate::matrix::random_unit_direction(n, &mut rng).scale(size);
        GeodesicSegment::new(UnitaryMatrix::identity(n), x, (0.0, 1.0)).unwrap().eval_extended(1.0)
    }

    #[test]
    fn group_validation() {
        let g = FiniteGroupPresentation::dihedral(4).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.identity(), 0);
        for a in 0..8 {
            assert_eq!(g.mul(a, g.inverse(a)), 0);
        }
        let bad = FiniteGroupPresentation::new(vec!["a".into(), "b".into()], vec![vec![0, 1], vec![1, 1]]);
        assert!(matches!(bad, Err(Error::InvalidGroup(_))));
        let bad = FiniteGroupPresentation::new(vec!["a".into()], vec![vec![1]]);
        assert!(bad.is_err());
    }

    #[test]
    fn representations_are_homomorphisms() {
        let d = FiniteGroupPresentation::dihedral(3).unwrap();
        assert!(homomorphism_defect(&d, &dihedral_representation(3)) < 1e-12);
        assert!(homomorphism_defect(&d, &triangle_permutation_representation()) < 1e-12);
        let c = FiniteGroupPresentation::cyclic(5).unwrap();
        assert!(homomorphism_defect(&c, &cyclic_representation(5, &[1, 2])) < 1e-12);
        let broken = vec![UnitaryMatrix::identity(1), UnitaryMatrix::from_angles(&[1.0])];
        let z2 = FiniteGroupPresentation::cyclic(2).unwrap();
        let r = RepresentationPair::new(z2, broken.clone(), broken, SubspaceSpec::FullUnitary);
        assert!(matches!(r, Err(Error::NotHomomorphism(_))));
    }

    fn sign_pair() -> RepresentationPair {
        let z2 = FiniteGroupPresentation::cyclic(2).unwrap();
        RepresentationPair::new(z2, cyclic_representation(2, &[0]), cyclic_representation(2, &[1]), SubspaceSpec::FullUnitary).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let z2 = FiniteGroupPresentation::cyclic(2).unwrap();
        let rep = cyclic_representation(2, &[1]);
        let same = RepresentationPair::new(z2, rep.clone(), rep, SubspaceSpec::FullUnitary).unwrap();
        assert_eq!(orbit(&UnitaryMatrix::identity(1), &same).unwrap().len(), 1);
        let o = orbit(&UnitaryMatrix::identity(1), &sign_pair()).unwrap();
        assert_eq!(o.len(), 2);
        assert!((o.points()[1].matrix()[(0, 0)] + 1.0).norm() < 1e-15);
        let r = orbit_radius_inf(&sign_pair(), &UnitaryMatrix::identity(1), &SolverOptions::default()).unwrap();
        assert!((r - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn sign_pair_is_inconclusive() {
        let out = decide_equivalence(&sign_pair(), &UnitaryMatrix::identity(1), None, &SolverOptions::default()).unwrap();
        match out {
            RigidityOutcome::Inconclusive { orbit_radius, .. } => assert!((orbit_radius - FRAC_PI_2).abs() < 1e-9),
            RigidityOutcome::Certified(_) => panic!("must not certify"),
        }
    }

    #[test]
    fn equal_representations() {
        let d = FiniteGroupPresentation::dihedral(3).unwrap();
        let rep = dihedral_representation(3);
        let pair = RepresentationPair::new(d, rep.clone(), rep, SubspaceSpec::FullUnitary).unwrap();
        let cert = solve_conjugator(&pair, &UnitaryMatrix::identity(2), None, &SolverOptions::default()).unwrap();
        assert!(cert.residual < 1e-12);
        assert!(distance(&cert.conjugator, &UnitaryMatrix::identity(2), MetricSpec::OperatorInf).unwrap() < 1e-12);
    }

    #[test]
    fn planted_reflection_conjugator() {
        let z2 = FiniteGroupPresentation::cyclic(2).unwrap();
        let phi = vec![UnitaryMatrix::identity(2), UnitaryMatrix::from_angles(&[0.0, PI])];
        let a = 0.3f64;
        let r = UnitaryMatrix::new(ComplexMatrix::from_real_rows(&[&[a.cos(), -a.sin()], &[a.sin(), a.cos()]]).unwrap()).unwrap();
        let rho: Vec<UnitaryMatrix> = phi.iter().map(|p| UnitaryMatrix::from_trusted(r.conjugate(p.matrix()))).collect();
        let pair = RepresentationPair::new(z2, phi, rho, SubspaceSpec::FullUnitary).unwrap();
        let cert = solve_conjugator(&pair, &UnitaryMatrix::identity(2), None, &SolverOptions::default()).unwrap();
        assert!(cert.residual < 1e-8);
        assert!((cert.recompute_residual(&pair).unwrap() - cert.residual).abs() < 1e-9);
    }

    #[test]
    fn planted_triangle_conjugator() {
        let d = FiniteGroupPresentation::dihedral(3).unwrap();
        let phi = triangle_permutation_representation();
        let w = small_unitary(3, 4, 0.35);
        let rho: Vec<UnitaryMatrix> = phi.iter().map(|p| UnitaryMatrix::from_trusted(w.inverse().conjugate(p.matrix()))).collect();
        let pair = RepresentationPair::new(d, phi, rho, SubspaceSpec::FullUnitary).unwrap();
        let cert = solve_conjugator(&pair, &UnitaryMatrix::identity(3), None, &SolverOptions::default()).unwrap();
        assert!(cert.residual < 1e-8, "{}", cert.residual);
    }

    #[test]
    fn json_round_trip() {
        let pair = sign_pair();
        let back = RepresentationPair::from_json(&pair.to_json()).unwrap();
        assert_eq!(back.phi, pair.phi);
        assert_eq!(back.rho, pair.rho);
        assert!(RepresentationPair::from_json("{").is_err());
    }

    #[test]
    fn grassmann_examples() {
        let p0 = ProjectionMatrix::coordinate(2, 1);
        let q = grassmann_fixed_point(&[], &p0, None, &SolverOptions::default()).unwrap();
        assert!((q.matrix() - p0.matrix()).max_abs() < 1e-12);

        let rot = UnitaryMatrix::from_angles(&[1.0, -1.0]);
        let h = truncated_closure(&[rot.clone()], 2, 50).unwrap();
        assert_eq!(h.len(), 50);
        assert!(matches!(matrix_group_closure(&[rot], 2, 50), Err(Error::ClosureBudgetExceeded(50))));
        let q = grassmann_fixed_point_of(&h, &p0, None, &SolverOptions::default()).unwrap();
        assert!((q.matrix() - p0.matrix()).max_abs() < 1e-12);

        let signed = signed_permutations(2).unwrap();
        assert_eq!(signed.len(), 8);
        match grassmann_fixed_point(&signed, &p0, None, &SolverOptions::default()) {
            Err(Error::RadiusTooLarge { radius, .. }) => assert!((radius - FRAC_PI_2).abs() < 1e-9, "{radius}"),
            other => panic!("expected RadiusTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn grassmann_planted() {
        // conjugates of the permutation representation fix the all-ones line
        let phi = triangle_permutation_representation();
        let a = 1.0 / 3f64.sqrt();
        let b = 1.0 / 2f64.sqrt();
        let c = 1.0 / 6f64.sqrt();
        let basis = ComplexMatrix::from_real_rows(&[&[a, b, c], &[a, -b, c], &[a, 0.0, -2.0 * c]]).unwrap();
        let v = small_unitary(3, 8, 0.2).mul(&UnitaryMatrix::new(basis).unwrap());
        let p0 = ProjectionMatrix::onto_columns(&v, 1);
        let q = grassmann_fixed_point(&phi, &p0, None, &SolverOptions::default()).unwrap();
        assert_eq!(q.rank(), 1);
        assert!(commutator_defects(&phi, &q).into_iter().fold(0.0, f64::max) < 1e-8);
    }
}
