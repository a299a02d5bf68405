//! Independent brute-force references used to validate the closed-form and
//! iterative prox implementations.
//!
//! Everything here works on plain real vectors: complex coefficient spaces
//! enter through their real embedding (interleaved re/im rows and a group
//! size of 2 in the penalty), under the same real inner product the rest of
//! the crate uses. The minimizers are deliberately simple and share no code
//! with the solver module.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::vector::{LinearOp, MatrixOp, Vector};

/// Sum of Euclidean norms over fixed-size groups of consecutive entries.
/// `group = 1` is the plain l1 norm, `group = 2` the complex-modulus l1 norm
/// of an interleaved re/im embedding.
#[derive(Debug, Clone, Copy)]
pub struct GroupL1 {
    pub group: usize,
}

impl GroupL1 {
    pub fn eval(&self, v: &[f64]) -> f64 {
        v.chunks(self.group)
            .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum()
    }

    /// A subgradient (the gradient away from group zeros, 0 at them).
    pub fn subgradient(&self, v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        for c in v.chunks(self.group) {
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                out.extend(c.iter().map(|x| x / norm));
            } else {
                out.extend(std::iter::repeat(0.0).take(c.len()));
            }
        }
        out
    }

    /// Group soft thresholding, the prox of `t * GroupL1`.
    pub fn prox(&self, v: &[f64], t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        for c in v.chunks(self.group) {
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let factor = if norm > t { (norm - t) / norm } else { 0.0 };
            out.extend(c.iter().map(|x| x * factor));
        }
        out
    }
}

/// The objective `weight * g(Au + b) + 1/2 |u - anchor|^2` whose minimizer is
/// the prox of `weight * g(A . + b)` at `anchor`.
pub struct ComposedProxProblem<'a> {
    pub op: &'a MatrixOp,
    pub offset: Vec<f64>,
    pub penalty: GroupL1,
    pub weight: f64,
    pub anchor: Vec<f64>,
}

impl ComposedProxProblem<'_> {
    pub fn eval(&self, u: &[f64]) -> f64 {
        let mut z = self.op.apply(&u.to_vec());
        z.axpy(1.0, &self.offset);
        let quad = u
            .iter()
            .zip(&self.anchor)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        self.weight * self.penalty.eval(&z) + 0.5 * quad
    }

    pub fn subgradient(&self, u: &[f64]) -> Vec<f64> {
        let mut z = self.op.apply(&u.to_vec());
        z.axpy(1.0, &self.offset);
        let sg = self.penalty.subgradient(&z);
        let mut out = self.op.adjoint(&sg);
        out.scale(self.weight);
        for (o, (a, b)) in out.iter_mut().zip(u.iter().zip(&self.anchor)) {
            *o += a - b;
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    /// Subgradient-descent iterations (first phase).
    pub iterations: usize,
    /// Dual proximal-gradient polishing iterations (second phase).
    pub polish: usize,
    /// Objective improvement below which the run counts as settled.
    pub tol: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            iterations: 100_000,
            polish: 10_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub point: Vec<f64>,
    pub objective: f64,
    /// True when the final stretch of polishing was still improving the
    /// objective by more than the budget tolerance.
    pub budget_exhausted: bool,
}

/// High-precision reference prox: diminishing-step subgradient descent from
/// the anchor, followed by proximal-gradient polishing on the Fenchel dual
/// (which needs only the prox of `g` itself, never the composed prox under
/// test). Returns the best iterate by objective.
pub fn oracle_prox(problem: &ComposedProxProblem, budget: &OracleBudget) -> OracleResult {
    let mut u = problem.anchor.clone();
    let mut best = u.clone();
    let mut best_obj = problem.eval(&u);

    // Phase 1: subgradient descent, step c / sqrt(k).
    let g0 = problem.subgradient(&u);
    let g0_norm = g0.norm();
    let c = if g0_norm > 0.0 {
        0.5 * (1.0 + problem.anchor.norm()) / g0_norm
    } else {
        0.0
    };
    if c > 0.0 {
        for k in 1..=budget.iterations {
            let g = problem.subgradient(&u);
            u.axpy(-c / (k as f64).sqrt(), &g);
            let obj = problem.eval(&u);
            if obj < best_obj {
                best_obj = obj;
                best = u.clone();
            }
        }
    }

    // Phase 2: dual proximal gradient. For y in the coefficient space,
    // minimize (w g)*(y) + 1/2 |A^T y|^2 - <y, A anchor + b>; the primal
    // iterate is anchor - A^T y.
    let lipschitz = {
        let n = operator_norm_estimate(problem.op);
        (n * n).max(1e-12)
    };
    let step = 1.0 / (1.01 * lipschitz);
    let mut anchor_img = problem.op.apply(&problem.anchor);
    anchor_img.axpy(1.0, &problem.offset);
    let mut y = vec![0.0; anchor_img.len()];
    let final_window_start = budget.polish - budget.polish / 10;
    let mut best_at_final_window = best_obj;
    for k in 1..=budget.polish {
        let mut grad = problem.op.apply(&problem.op.adjoint(&y));
        grad.axpy(-1.0, &anchor_img);
        let mut v = y.clone();
        v.axpy(-step, &grad);
        // Moreau: prox of the conjugate from the prox of the penalty.
        let mut scaled = v.clone();
        scaled.scale(1.0 / step);
        let p = problem.penalty.prox(&scaled, problem.weight / step);
        y = v;
        y.axpy(-step, &p);

        let mut primal = problem.anchor.clone();
        primal.axpy(-1.0, &problem.op.adjoint(&y));
        let obj = problem.eval(&primal);
        if obj < best_obj {
            best_obj = obj;
            best = primal;
        }
        if k == final_window_start {
            best_at_final_window = best_obj;
        }
    }
    let budget_exhausted =
        best_at_final_window - best_obj > budget.tol * (1.0 + best_obj.abs());

    OracleResult {
        point: best,
        objective: best_obj,
        budget_exhausted,
    }
}

/// Spectral norm estimate by power iteration on `A^T A`.
pub fn operator_norm_estimate(op: &MatrixOp) -> f64 {
    let q = op.cols;
    let mut v = vec![1.0 / (q as f64).sqrt(); q];
    let mut norm = 0.0;
    for _ in 0..60 {
        let w = op.adjoint(&op.apply(&v));
        norm = w.norm();
        if norm <= 1e-300 {
            return 0.0;
        }
        v = w;
        v.scale(1.0 / norm);
    }
    norm.sqrt()
}

/// Materializes the analysis operator of a frame as a real matrix acting on
/// real signals. Real frames map to an `m x n` matrix with group size 1;
/// complex frames to an interleaved-re/im `2m x n` matrix with group size 2.
pub fn embedded_analysis_matrix(frame: &Frame) -> Result<(MatrixOp, GroupL1)> {
    let n = frame.n();
    let m = frame.m();
    let real = frame.is_real();
    let rows = if real { m } else { 2 * m };
    let mut entries = vec![0.0; rows * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = frame.analyze(&e)?;
        for (i, v) in col.iter().enumerate() {
            if real {
                entries[i * n + j] = v.re;
            } else {
                entries[2 * i * n + j] = v.re;
                entries[(2 * i + 1) * n + j] = v.im;
            }
        }
    }
    let op = MatrixOp::new(rows, n, entries);
    let bound = operator_norm_estimate(&op) * (1.0 + 1e-9);
    Ok((
        op.with_norm_bound(bound),
        GroupL1 {
            group: if real { 1 } else { 2 },
        },
    ))
}

/// Orthonormal basis of the orthogonal complement of the column space of
/// `op` (the null space of the adjoint), by Gram-Schmidt with
/// re-orthogonalization.
pub fn null_space_basis(op: &MatrixOp) -> Vec<Vec<f64>> {
    let p = op.rows;
    let q = op.cols;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let push_orthogonalized = |basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>| -> bool {
        for _ in 0..2 {
            for b in basis.iter() {
                let coef = v.dot(b);
                v.axpy(-coef, b);
            }
        }
        let norm = v.norm();
        if norm > 1e-10 {
            v.scale(1.0 / norm);
            basis.push(v);
            true
        } else {
            false
        }
    };
    for j in 0..q {
        let mut e = vec![0.0; q];
        e[j] = 1.0;
        push_orthogonalized(&mut basis, op.apply(&e));
    }
    let range_dim = basis.len();
    for i in 0..p {
        if basis.len() == p {
            break;
        }
        let mut e = vec![0.0; p];
        e[i] = 1.0;
        push_orthogonalized(&mut basis, e);
    }
    basis.split_off(range_dim)
}

#[derive(Debug, Clone, Copy)]
pub struct PhiConfig {
    /// Subgradient iterations in the null-space coordinates.
    pub subgrad_iterations: usize,
    /// Splitting-polish iterations on the constrained form.
    pub polish_iterations: usize,
    /// Target objective accuracy (drives nothing adaptive; recorded for
    /// callers choosing budgets).
    pub tol: f64,
    /// Coefficient-dimension cap; larger frames are rejected.
    pub max_coeff_dim: usize,
}

impl Default for PhiConfig {
    fn default() -> Self {
        PhiConfig {
            subgrad_iterations: 300,
            polish_iterations: 4000,
            tol: 1e-9,
            max_coeff_dim: 32,
        }
    }
}

/// Value of the function whose prox equals the approximal operator:
///
/// `phi(x) = alpha^-1 inf { alpha g(y) + 1/2 |Ax - y|^2 : Ax - y in N(A^T) }`
///
/// computed by parameterizing `y = Ax - w` with `w` in an orthonormal basis
/// of the null space of the adjoint and minimizing the resulting
/// unconstrained convex function. The minimization starts at `w = 0`
/// (`y = Ax`), so the returned value never exceeds `f(x) = g(Ax)`.
pub fn phi_value(frame: &Frame, x: &[f64], cfg: &PhiConfig) -> Result<f64> {
    if frame.m() > cfg.max_coeff_dim {
        return Err(Error::FrameTooLarge {
            m: frame.m(),
            limit: cfg.max_coeff_dim,
        });
    }
    if x.len() != frame.n() {
        return Err(Error::Dimension(format!(
            "point length {} does not match frame dimension {}",
            x.len(),
            frame.n()
        )));
    }
    let (op, penalty) = embedded_analysis_matrix(frame)?;
    let alpha = frame.alpha();
    let c = op.apply(&x.to_vec());
    let basis = null_space_basis(&op);
    let d = basis.len();

    let h = |w: &Vec<f64>| -> f64 {
        let y = c.minus(w);
        alpha * penalty.eval(&y) + 0.5 * w.norm_sq()
    };

    let mut best_w = vec![0.0; c.len()];
    let mut best = h(&best_w);
    if d == 0 {
        // Unitary case: the null space is trivial and phi = f.
        return Ok(best / alpha);
    }

    // Phase 1: subgradient descent in null-space coordinates t, w = B t.
    let expand = |t: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; c.len()];
        for (ti, b) in t.iter().zip(&basis) {
            w.axpy(*ti, b);
        }
        w
    };
    let mut t = vec![0.0; d];
    let c_step = 0.5 * (1.0 + c.norm());
    for k in 1..=cfg.subgrad_iterations {
        let w = expand(&t);
        let y = c.minus(&w);
        let sg_y = penalty.subgradient(&y);
        // d/dt [ alpha g(c - Bt) + 1/2 |t|^2 ] = -alpha B^T sg + t
        for (i, b) in basis.iter().enumerate() {
            let g_i = -alpha * b.dot(&sg_y) + t[i];
            t[i] -= c_step / (k as f64).sqrt() * g_i;
        }
        let w = expand(&t);
        let obj = h(&w);
        if obj < best {
            best = obj;
            best_w = w;
        }
    }

    // Phase 2: splitting polish on min over w in N of
    // 1/2 |w|^2 + alpha g(c - w). Both proxes are explicit: the first is a
    // scaled null-space projection, the second a shifted group shrink.
    let project_null = |v: &Vec<f64>| -> Vec<f64> {
        let mut w = vec![0.0; v.len()];
        for b in &basis {
            w.axpy(v.dot(b), b);
        }
        w
    };
    let gamma = 1.0;
    let mut s = best_w.clone();
    for _ in 0..cfg.polish_iterations {
        let mut w = project_null(&s);
        w.scale(1.0 / (1.0 + gamma));
        let mut refl = w.clone();
        refl.scale(2.0);
        refl.axpy(-1.0, &s);
        let shifted = c.minus(&refl);
        let q = c.minus(&penalty.prox(&shifted, gamma * alpha));
        s.axpy(1.0, &q);
        s.axpy(-1.0, &w);
        let obj = h(&w);
        if obj < best {
            best = obj;
        }
    }

    Ok(best / alpha)
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step).round() as usize;
        (0..=count).map(|k| self.min + k as f64 * self.step).collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: -2.0,
            max: 2.0,
            step: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiGridRow {
    pub x1: f64,
    pub x2: f64,
    pub f: f64,
    pub phi: f64,
}

/// Tabulates `f = |Ax|_1` and `phi` over a 2-D grid for a small frame.
pub fn oracle_phi_grid(
    frame: &Frame,
    grid: &GridSpec,
    cfg: &PhiConfig,
) -> Result<Vec<PhiGridRow>> {
    if frame.n() != 2 {
        return Err(Error::Dimension(format!(
            "grid evaluation needs a 2-dimensional frame, got n = {}",
            frame.n()
        )));
    }
    if frame.m() > cfg.max_coeff_dim {
        return Err(Error::FrameTooLarge {
            m: frame.m(),
            limit: cfg.max_coeff_dim,
        });
    }
    let values = grid.values();
    let mut rows = Vec::with_capacity(values.len() * values.len());
    for &x1 in &values {
        for &x2 in &values {
            let x = [x1, x2];
            let coeffs = frame.analyze(&x)?;
            let f = coeffs.iter().map(|v| v.norm()).sum::<f64>();
            let phi = phi_value(frame, &x, cfg)?;
            rows.push(PhiGridRow { x1, x2, f, phi });
        }
    }
    Ok(rows)
}

/// Result of sampling the two Moreau criteria of a candidate prox.
#[derive(Debug, Clone, Copy)]
pub struct ProxCriteriaReport {
    pub trials: usize,
    /// Largest observed `|F(y) - F(y')| / |y - y'|`; at most 1 for a prox.
    pub max_expansion_ratio: f64,
    /// Largest observed `(|dF|^2 - <dF, dy>) / |dy|^2`; at most 0 for a prox
    /// (firm non-expansiveness).
    pub max_firmness_violation: f64,
}

impl ProxCriteriaReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_expansion_ratio <= 1.0 + tol && self.max_firmness_violation <= tol
    }
}

/// Samples pairs from `sampler` and reports the worst violations of
/// non-expansiveness and firm non-expansiveness of `candidate`.
pub fn check_prox_criteria<V: Vector>(
    candidate: &dyn Fn(&V) -> V,
    sampler: &mut dyn FnMut() -> V,
    trials: usize,
) -> ProxCriteriaReport {
    let mut max_ratio = f64::NEG_INFINITY;
    let mut max_firm = f64::NEG_INFINITY;
    let mut used = 0;
    while used < trials {
        let y = sampler();
        let y2 = sampler();
        let dy = y.minus(&y2);
        let dy_sq = dy.norm_sq();
        if dy_sq < 1e-28 {
            continue;
        }
        let df = candidate(&y).minus(&candidate(&y2));
        let ratio = (df.norm_sq() / dy_sq).sqrt();
        let firm = (df.norm_sq() - df.dot(&dy)) / dy_sq;
        max_ratio = max_ratio.max(ratio);
        max_firm = max_firm.max(firm);
        used += 1;
    }
    ProxCriteriaReport {
        trials: used,
        max_expansion_ratio: max_ratio,
        max_firmness_violation: max_firm,
    }
}

/// Golden-section search for a unimodal function on `[lo, hi]`.
pub fn golden_section_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Conversion helper: complex coefficient vector to its real embedding.
pub fn embed_complex(z: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    for v in z {
        out.push(v.re);
        out.push(v.im);
    }
    out
}
