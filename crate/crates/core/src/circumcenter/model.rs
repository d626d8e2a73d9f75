//! Convex tangent model of the minimax objective and its barrier solver.
//!
//! At an iterate `c` each point contributes `Θ_a = −i·log(c⁻¹a)`. Moving to
//! `c·e^{iΣα_k H_k}` changes `Θ_a` to first order into `Θ_a − Σα_k H_k`, and the
//! spectral objectives are convex in `α`. The model
//!
//! ```text
//! minimize t  subject to  t ≥ φ(Θ_a − Σα_k H_k)  for every a
//! ```
//!
//! is solved with a log-barrier path-following method. Because every
//! objective is spectral, its first variation along `c·e^{iσ}` coincides with
//! the model's, so fixed points of the outer iteration are exact minimizers.

use crate::error::{Error, Result};
use crate::matrix::{herm_eig, ComplexMatrix};

/// Per-point spectral objective `φ`.
#[derive(Clone, Copy, Debug)]
pub(crate) enum ModelKind {
    /// `Tr Θ^p + c2·Tr Θ²`.
    Schatten { p: u32, c2: f64 },
    /// `‖Θ‖_∞`.
    Operator,
    /// `‖Θ‖_∞² + e2·Tr Θ²`.
    PerturbedOperator { e2: f64 },
}

impl ModelKind {
    /// `φ` from eigenvalues.
    pub(crate) fn value(&self, lam: &[f64]) -> f64 {
        let max = lam.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let s2: f64 = lam.iter().map(|l| l * l).sum();
        match *self {
            ModelKind::Schatten { p, c2 } => lam.iter().map(|l| l.powi(p as i32)).sum::<f64>() + c2 * s2,
            ModelKind::Operator => max,
            ModelKind::PerturbedOperator { e2 } => max * max + e2 * s2,
        }
    }
}

pub(crate) struct TangentModel {
    kind: ModelKind,
    n: usize,
    /// Hermitian directions `H_k`.
    basis: Vec<ComplexMatrix>,
    /// `Θ_a` at `α = 0`.
    theta0: Vec<ComplexMatrix>,
}

/// Eigen-data of `Θ_a(α)` with the directions rotated into its eigenbasis.
struct PointSpectrum {
    lam: Vec<f64>,
    rotated: Vec<ComplexMatrix>,
}

struct Layout {
    k: usize,
    points: usize,
    per_point_tau: bool,
}

impl Layout {
    fn dim(&self) -> usize {
        self.k + if self.per_point_tau { self.points } else { 0 } + 1
    }
    fn tau(&self, a: usize) -> usize {
        self.k + a
    }
    fn t(&self) -> usize {
        self.dim() - 1
    }
}

/// Barrier value, gradient and Hessian (row-major) for weight `s` on `t`.
struct BarrierEval {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl TangentModel {
    pub(crate) fn new(kind: ModelKind, basis: Vec<ComplexMatrix>, theta0: Vec<ComplexMatrix>) -> Self {
        let n = theta0[0].n();
        Self { kind, n, basis, theta0 }
    }

    fn layout(&self) -> Layout {
        Layout { k: self.basis.len(), points: self.theta0.len(), per_point_tau: matches!(self.kind, ModelKind::PerturbedOperator { .. }) }
    }

    fn theta(&self, a: usize, alpha: &[f64]) -> ComplexMatrix {
        let mut th = self.theta0[a].clone();
        for (h, &x) in self.basis.iter().zip(alpha) {
            if x != 0.0 {
                th = &th - &h.scale_real(x);
            }
        }
        th.hermitian_part()
    }

    fn spectrum(&self, a: usize, alpha: &[f64], with_rotation: bool) -> Result<PointSpectrum> {
        let e = herm_eig(&self.theta(a, alpha))?;
        let rotated = if with_rotation {
            let v = e.vectors.matrix();
            let va = v.adjoint();
            self.basis.iter().map(|h| &(&va * h) * v).collect()
        } else {
            Vec::new()
        };
        Ok(PointSpectrum { lam: e.angles, rotated })
    }

    /// Model objective `max_a φ(Θ_a(α))`.
    pub(crate) fn objective(&self, alpha: &[f64]) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for a in 0..self.theta0.len() {
            best = best.max(self.kind.value(&self.spectrum(a, alpha, false)?.lam));
        }
        Ok(best)
    }

    fn barrier_parameter(&self) -> f64 {
        let pts = self.theta0.len() as f64;
        match self.kind {
            ModelKind::Schatten { .. } => pts,
            ModelKind::Operator => 2.0 * self.n as f64 * pts,
            ModelKind::PerturbedOperator { .. } => (2.0 * self.n as f64 + 1.0) * pts,
        }
    }

    /// Strictly feasible starting point.
    fn initial_point(&self) -> Result<Vec<f64>> {
        let lay = self.layout();
        let mut z = vec![0.0; lay.dim()];
        let mut t: f64 = 0.0;
        for a in 0..self.theta0.len() {
            let lam = self.spectrum(a, &z[..lay.k], false)?.lam;
            let max = lam.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            match self.kind {
                ModelKind::PerturbedOperator { e2 } => {
                    let tau = max * 1.1 + 0.1;
                    z[lay.tau(a)] = tau;
                    let s2: f64 = lam.iter().map(|l| l * l).sum();
                    t = t.max(tau * tau + e2 * s2);
                }
                _ => t = t.max(self.kind.value(&lam)),
            }
        }
        z[lay.t()] = t * 1.1 + 0.1;
        Ok(z)
    }

    /// `None` when `z` is not strictly feasible.
    fn evaluate(&self, z: &[f64], s: f64, derivs: bool) -> Result<Option<BarrierEval>> {
        let lay = self.layout();
        let dim = lay.dim();
        let k = lay.k;
        let t = z[lay.t()];
        let mut value = s * t;
        let mut grad = vec![0.0; if derivs { dim } else { 0 }];
        let mut hess = vec![0.0; if derivs { dim * dim } else { 0 }];
        if derivs {
            grad[lay.t()] = s;
        }
        for a in 0..self.theta0.len() {
            let sp = self.spectrum(a, &z[..k], derivs)?;
            match self.kind {
                ModelKind::Schatten { p, c2 } => {
                    let q = self.kind.value(&sp.lam);
                    let slack = t - q;
                    if !(slack > 0.0) {
                        return Ok(None);
                    }
                    value -= slack.ln();
                    if derivs {
                        // ∇_z slack = (−∇q, 1); ∇²slack = −∇²q
                        let (gq, hq) = schatten_derivs(&sp, p, c2);
                        let mut gs = vec![0.0; dim];
                        for i in 0..k {
                            gs[i] = -gq[i];
                        }
                        gs[lay.t()] = 1.0;
                        add_log_barrier(&mut grad, &mut hess, dim, slack, &gs, |i, j| if i < k && j < k { -hq[i * k + j] } else { 0.0 });
                    }
                }
                ModelKind::Operator | ModelKind::PerturbedOperator { .. } => {
                    let (bound_idx, bound) = match self.kind {
                        ModelKind::Operator => (lay.t(), t),
                        _ => (lay.tau(a), z[lay.tau(a)]),
                    };
                    for sign in [1.0, -1.0] {
                        // M = bound·I − sign·Θ is diagonal in the eigenbasis of Θ
                        let diag: Vec<f64> = sp.lam.iter().map(|l| bound - sign * l).collect();
                        if diag.iter().any(|&d| !(d > 0.0)) {
                            return Ok(None);
                        }
                        value -= diag.iter().map(|d| d.ln()).sum::<f64>();
                        if derivs {
                            // ∂M/∂α_i = sign·H̃_i, ∂M/∂bound = I
                            add_logdet_barrier(&mut grad, &mut hess, dim, &diag, &sp.rotated, sign, bound_idx);
                        }
                    }
                    if let ModelKind::PerturbedOperator { e2 } = self.kind {
                        let tau = bound;
                        let s2: f64 = sp.lam.iter().map(|l| l * l).sum();
                        let slack = t - tau * tau - e2 * s2;
                        if !(slack > 0.0) {
                            return Ok(None);
                        }
                        value -= slack.ln();
                        if derivs {
                            let (g2, h2) = schatten_derivs(&sp, 2, 0.0);
                            let mut gs = vec![0.0; dim];
                            for i in 0..k {
                                gs[i] = -e2 * g2[i];
                            }
                            gs[bound_idx] = -2.0 * tau;
                            gs[lay.t()] = 1.0;
                            add_log_barrier(&mut grad, &mut hess, dim, slack, &gs, |i, j| {
                                if i < k && j < k {
                                    -e2 * h2[i * k + j]
                                } else if i == bound_idx && j == bound_idx {
                                    -2.0
                                } else {
                                    0.0
                                }
                            });
                        }
                    }
                }
            }
        }
        Ok(Some(BarrierEval { value, grad, hess }))
    }

    /// Minimizes the model; returns the optimal `α`.
    pub(crate) fn solve(&self) -> Result<Vec<f64>> {
        let lay = self.layout();
        let dim = lay.dim();
        let nu = self.barrier_parameter();
        let mut z = self.initial_point()?;
        let mut s = 1.0 / z[lay.t()].max(1e-12);
        for _stage in 0..80 {
            let mut prev_decrement = f64::INFINITY;
            for _newton in 0..200 {
                let ev = self.evaluate(&z, s, true)?.ok_or(Error::NoConvergence(0))?;
                let neg: Vec<f64> = ev.grad.iter().map(|g| -g).collect();
                let dz = match solve_dense(ev.hess.clone(), neg, dim) {
                    Some(d) => d,
                    None => break,
                };
                let slope: f64 = ev.grad.iter().zip(&dz).map(|(g, d)| g * d).sum();
                let decrement = -slope;
                // stop at rounding level, or once the decrement stops shrinking
                // (late stages are limited by the conditioning of the system)
                if !(decrement > 1e-24) || (decrement < 1e-3 && decrement > 0.25 * prev_decrement) {
                    break;
                }
                prev_decrement = decrement;
                // inside the quadratic region value comparisons are rounding noise,
                // so only feasibility is enforced
                let pure = decrement < 1e-8;
                let mut step = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let trial: Vec<f64> = z.iter().zip(&dz).map(|(a, b)| a + step * b).collect();
                    if let Some(te) = self.evaluate(&trial, s, false)? {
                        let slack = 1e-14 * ev.value.abs().max(1.0);
                        if pure || te.value <= ev.value + 0.25 * step * slope + slack {
                            z = trial;
                            moved = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if nu / s <= 1e-13 * z[lay.t()].abs().max(1e-3) {
                break;
            }
            s *= 16.0;
        }
        Ok(z[..lay.k].to_vec())
    }
}

/// Gradient and Hessian in `α` of `Tr Θ^p + c2·Tr Θ²` with `Θ = Θ0 − Σα_k H_k`.
fn schatten_derivs(sp: &PointSpectrum, p: u32, c2: f64) -> (Vec<f64>, Vec<f64>) {
    let k = sp.rotated.len();
    let n = sp.lam.len();
    let lam = &sp.lam;
    let pf = p as f64;
    let first: Vec<f64> = lam.iter().map(|&l| pf * l.powi(p as i32 - 1) + 2.0 * c2 * l).collect();
    // divided differences of the derivative
    let mut kern = vec![0.0; n * n];
    for j in 0..n {
        for l in 0..n {
            let mut acc = 0.0;
            for m in 0..=(p as i32 - 2) {
                acc += lam[j].powi(m) * lam[l].powi(p as i32 - 2 - m);
            }
            kern[j * n + l] = pf * acc + 2.0 * c2;
        }
    }
    let mut grad = vec![0.0; k];
    for i in 0..k {
        let h = &sp.rotated[i];
        grad[i] = -(0..n).map(|j| first[j] * h[(j, j)].re).sum::<f64>();
    }
    let mut hess = vec![0.0; k * k];
    for i in 0..k {
        for l in i..k {
            let (a, b) = (&sp.rotated[i], &sp.rotated[l]);
            let mut acc = 0.0;
            for j in 0..n {
                for m in 0..n {
                    acc += kern[j * n + m] * (a[(j, m)] * b[(j, m)].conj()).re;
                }
            }
            hess[i * k + l] = acc;
            hess[l * k + i] = acc;
        }
    }
    (grad, hess)
}

/// Adds the derivatives of `−log(slack)` given `∇slack` and `∇²slack`.
fn add_log_barrier(grad: &mut [f64], hess: &mut [f64], dim: usize, slack: f64, gs: &[f64], hs: impl Fn(usize, usize) -> f64) {
    for i in 0..dim {
        grad[i] -= gs[i] / slack;
        for j in 0..dim {
            hess[i * dim + j] += gs[i] * gs[j] / (slack * slack) - hs(i, j) / slack;
        }
    }
}

/// Adds the derivatives of `−log det M` for `M = bound·I − sign·Θ`, which is
/// `diag` in the eigenbasis of `Θ`.
fn add_logdet_barrier(grad: &mut [f64], hess: &mut [f64], dim: usize, diag: &[f64], rotated: &[ComplexMatrix], sign: f64, bound_idx: usize) {
    let n = diag.len();
    let w: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let mut dirs: Vec<(usize, ComplexMatrix)> = rotated.iter().enumerate().map(|(i, h)| (i, h.scale_real(sign))).collect();
    dirs.push((bound_idx, ComplexMatrix::identity(n)));
    for (idx, d) in &dirs {
        grad[*idx] -= (0..n).map(|i| w[i] * d[(i, i)].re).sum::<f64>();
    }
    for (a, (ia, da)) in dirs.iter().enumerate() {
        for (ib, db) in dirs.iter().skip(a) {
            let mut acc = 0.0;
            for i in 0..n {
                for l in 0..n {
                    acc += w[i] * w[l] * (da[(i, l)] * db[(i, l)].conj()).re;
                }
            }
            hess[ia * dim + ib] += acc;
            if ia != ib {
                hess[ib * dim + ia] += acc;
            }
        }
    }
}

/// Gaussian elimination with partial pivoting on a row-major `dim × dim` system.
pub(crate) fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, dim: usize) -> Option<Vec<f64>> {
    for col in 0..dim {
        let piv = (col..dim).max_by(|&i, &j| a[i * dim + col].abs().total_cmp(&a[j * dim + col].abs()))?;
        if !(a[piv * dim + col].abs() > 0.0) || !a[piv * dim + col].is_finite() {
            return None;
        }
        if piv != col {
            for j in 0..dim {
                a.swap(col * dim + j, piv * dim + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * dim + col];
        for r in col + 1..dim {
            let f = a[r * dim + col] / d;
            if f != 0.0 {
                for j in col..dim {
                    a[r * dim + j] -= f * a[col * dim + j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; dim];
    for r in (0..dim).rev() {
        let mut acc = b[r];
        for j in r + 1..dim {
            acc -= a[r * dim + j] * x[j];
        }
        x[r] = acc / a[r * dim + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
