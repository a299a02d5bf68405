//! First-order splitting solvers: Douglas-Rachford, Chambolle-Pock,
//! ISTA/FISTA, and FISTA with a nested exact analysis prox.
//!
//! All solvers are deterministic given their inputs, allocate their own
//! iteration state, and stop on either a relative-change tolerance or an
//! iteration cap.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::proxcalc::{AnalysisProx, InnerSolveConfig, Prox};
use crate::vector::{LinearOp, Vector};

/// Stopping rule: iteration cap plus relative-change tolerance
/// `|x_{k+1} - x_k| / |x_k|`. Whichever triggers first ends the run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StopCriteria {
    pub max_iterations: usize,
    pub relative_tolerance: f64,
}

impl StopCriteria {
    pub fn new(max_iterations: usize, relative_tolerance: f64) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        if relative_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(
                "relative_tolerance must be positive".into(),
            ));
        }
        Ok(StopCriteria {
            max_iterations,
            relative_tolerance,
        })
    }

    /// The loose stopping regime (200 iterations, 1e-3).
    pub fn loose() -> Self {
        StopCriteria {
            max_iterations: 200,
            relative_tolerance: 1e-3,
        }
    }

    /// The strict stopping regime (500 iterations, 1e-5).
    pub fn strict() -> Self {
        StopCriteria {
            max_iterations: 500,
            relative_tolerance: 1e-5,
        }
    }
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria::loose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIterations,
}

/// Per-iteration record of a solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trace {
    /// Objective values, empty when no objective evaluator was supplied.
    pub objective: Vec<f64>,
    pub relative_change: Vec<f64>,
    /// Cumulative wall time at the end of each iteration.
    pub time_ms: Vec<f64>,
    /// Inner iteration counts (nested schemes only).
    pub inner_iterations: Vec<usize>,
    /// Number of inner solves that hit their iteration cap.
    pub inner_nonconverged: usize,
    pub termination: Termination,
}

impl Trace {
    fn new() -> Self {
        Trace {
            objective: Vec::new(),
            relative_change: Vec::new(),
            time_ms: Vec::new(),
            inner_iterations: Vec::new(),
            inner_nonconverged: 0,
            termination: Termination::MaxIterations,
        }
    }

    pub fn iterations(&self) -> usize {
        self.relative_change.len()
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Tolerance
    }

    pub fn final_relative_change(&self) -> Option<f64> {
        self.relative_change.last().copied()
    }

    /// Writes `iteration,objective,relative_change,time_ms` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,objective,relative_change,time_ms")?;
        for i in 0..self.iterations() {
            let obj = self
                .objective
                .get(i)
                .map(|v| format!("{v:.16e}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{},{},{:.16e},{:.16e}",
                i + 1,
                obj,
                self.relative_change[i],
                self.time_ms[i]
            )?;
        }
        Ok(())
    }
}

fn relative_change<V: Vector>(next: &V, prev: &V) -> f64 {
    let denom = prev.norm();
    let diff = next.dist(prev);
    if denom > 0.0 {
        diff / denom
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Douglas-Rachford splitting for `min f_a + f_b` from the two proxes.
///
/// Iterates `y <- y + prox_{g f_b}(2 p - y) - p` with `p = prox_{g f_a}(y)`;
/// the returned solution is `prox_{g f_a}` of the final `y`, so constraints
/// entering through `f_a` hold exactly at the output.
pub fn douglas_rachford<V: Vector>(
    prox_a: &dyn Prox<V>,
    prox_b: &dyn Prox<V>,
    x0: &V,
    gamma: f64,
    stop: &StopCriteria,
    objective: Option<&dyn Fn(&V) -> f64>,
) -> (V, Trace) {
    let start = Instant::now();
    let mut trace = Trace::new();
    let mut y = x0.clone();
    for _ in 0..stop.max_iterations {
        let p = prox_a.prox(&y, gamma);
        let mut refl = p.clone();
        refl.scale(2.0);
        refl.axpy(-1.0, &y);
        let q = prox_b.prox(&refl, gamma);
        let mut y_next = y.clone();
        y_next.axpy(1.0, &q);
        y_next.axpy(-1.0, &p);
        let rel = relative_change(&y_next, &y);
        y = y_next;
        if let Some(obj) = objective {
            trace.objective.push(obj(&p));
        }
        trace.relative_change.push(rel);
        trace.time_ms.push(start.elapsed().as_secs_f64() * 1e3);
        if rel <= stop.relative_tolerance {
            trace.termination = Termination::Tolerance;
            break;
        }
    }
    (prox_a.prox(&y, gamma), trace)
}

/// Step sizes of the primal-dual iteration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CpParams {
    pub tau: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl CpParams {
    /// `tau = sigma = 1/|K|`, `theta = 1`.
    pub fn for_norm_bound(norm: f64) -> Self {
        CpParams {
            tau: 1.0 / norm,
            sigma: 1.0 / norm,
            theta: 1.0,
        }
    }
}

pub struct CpSolution<X: Vector, Y: Vector> {
    pub primal: X,
    pub dual: Y,
    pub trace: Trace,
}

/// Chambolle-Pock primal-dual iteration for `min_x h(x) + g(Kx)`.
///
/// `g_prox` is the *primal* prox of `g`; the dual prox is obtained through
/// the Moreau decomposition `prox_{s g*}(v) = v - s prox_{g/s}(v/s)`.
///
/// The relative-change stopping rule is evaluated on the primal-dual pair:
/// early in a run the primal can sit still for several iterations while the
/// dual ramps up, and a primal-only rule would mistake that for convergence.
#[allow(clippy::too_many_arguments)]
pub fn chambolle_pock<X: Vector, Y: Vector>(
    h_prox: &dyn Prox<X>,
    g_prox: &dyn Prox<Y>,
    op: &dyn LinearOp<X, Y>,
    x0: &X,
    y0: Option<&Y>,
    params: CpParams,
    stop: &StopCriteria,
    objective: Option<&dyn Fn(&X) -> f64>,
) -> Result<CpSolution<X, Y>> {
    let norm = op.norm_bound();
    let product = params.sigma * params.tau * norm * norm;
    if product > 1.0 + 1e-12 {
        return Err(Error::StepSizeViolation(product));
    }
    if !(0.0..=1.0).contains(&params.theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 1], got {}",
            params.theta
        )));
    }
    let start = Instant::now();
    let mut trace = Trace::new();
    let mut x = x0.clone();
    let mut x_bar = x0.clone();
    let mut y = match y0 {
        Some(y) => y.clone(),
        None => op.apply(x0).zeros_like(),
    };
    for _ in 0..stop.max_iterations {
        // Dual ascent step via Moreau decomposition.
        let mut w = op.apply(&x_bar);
        w.scale(params.sigma);
        w.axpy(1.0, &y);
        let mut v = w.clone();
        v.scale(1.0 / params.sigma);
        let p = g_prox.prox(&v, 1.0 / params.sigma);
        let y_next = {
            let mut y_next = w;
            y_next.axpy(-params.sigma, &p);
            y_next
        };
        // Primal descent step.
        let mut arg = x.clone();
        arg.axpy(-params.tau, &op.adjoint(&y_next));
        let x_next = h_prox.prox(&arg, params.tau);
        // Over-relaxation.
        x_bar = x_next.clone();
        x_bar.scale(1.0 + params.theta);
        x_bar.axpy(-params.theta, &x);
        let rel = {
            let state = (x.norm_sq() + y.norm_sq()).sqrt();
            let diff = (x_next.dist(&x).powi(2) + y_next.dist(&y).powi(2)).sqrt();
            if state > 0.0 {
                diff / state
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        };
        y = y_next;
        x = x_next;
        if let Some(obj) = objective {
            trace.objective.push(obj(&x));
        }
        trace.relative_change.push(rel);
        trace.time_ms.push(start.elapsed().as_secs_f64() * 1e3);
        if rel <= stop.relative_tolerance {
            trace.termination = Termination::Tolerance;
            break;
        }
    }
    Ok(CpSolution {
        primal: x,
        dual: y,
        trace,
    })
}

/// Differentiable term given by its gradient and a Lipschitz constant of
/// that gradient.
pub struct SmoothTerm<'a, V: Vector> {
    pub gradient: Box<dyn Fn(&V) -> V + Send + Sync + 'a>,
    pub lipschitz: f64,
}

impl<'a, V: Vector> SmoothTerm<'a, V> {
    pub fn new(lipschitz: f64, gradient: impl Fn(&V) -> V + Send + Sync + 'a) -> Self {
        SmoothTerm {
            gradient: Box::new(gradient),
            lipschitz,
        }
    }
}

/// Proximal-gradient iteration with optional Nesterov momentum
/// (`momentum = false` gives plain ISTA).
pub fn fista<V: Vector>(
    smooth: &SmoothTerm<V>,
    nonsmooth_prox: &dyn Prox<V>,
    x0: &V,
    step: f64,
    momentum: bool,
    stop: &StopCriteria,
    objective: Option<&dyn Fn(&V) -> f64>,
) -> (V, Trace) {
    let start = Instant::now();
    let mut trace = Trace::new();
    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut t = 1.0f64;
    for _ in 0..stop.max_iterations {
        let grad = (smooth.gradient)(&y);
        let mut arg = y.clone();
        arg.axpy(-step, &grad);
        let x_next = nonsmooth_prox.prox(&arg, step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = if momentum { (t - 1.0) / t_next } else { 0.0 };
        y = x_next.clone();
        y.scale(1.0 + beta);
        y.axpy(-beta, &x);
        t = t_next;
        let rel = relative_change(&x_next, &x);
        x = x_next;
        if let Some(obj) = objective {
            trace.objective.push(obj(&x));
        }
        trace.relative_change.push(rel);
        trace.time_ms.push(start.elapsed().as_secs_f64() * 1e3);
        if rel <= stop.relative_tolerance {
            trace.termination = Termination::Tolerance;
            break;
        }
    }
    (x, trace)
}

/// FISTA whose nonsmooth prox is the exact tight-frame-analysis prox,
/// re-solved by a warm-started inner primal-dual run in every outer
/// iteration. Inner runs that hit their cap are counted in the trace, not
/// treated as failures.
#[allow(clippy::too_many_arguments)]
pub fn fista_nested_analysis(
    smooth: &SmoothTerm<Vec<f64>>,
    frame: &Frame,
    g_prox: &dyn Prox<Vec<Complex64>>,
    inner: &InnerSolveConfig,
    x0: &[f64],
    step: f64,
    momentum: bool,
    stop: &StopCriteria,
    objective: Option<&dyn Fn(&Vec<f64>) -> f64>,
) -> Result<(Vec<f64>, Trace)> {
    let mut inner_prox = AnalysisProx::new(frame, g_prox, *inner)?;
    let start = Instant::now();
    let mut trace = Trace::new();
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut t = 1.0f64;
    for _ in 0..stop.max_iterations {
        let grad = (smooth.gradient)(&y);
        let mut arg = y.clone();
        arg.axpy(-step, &grad);
        let (x_next, inner_trace) = inner_prox.apply(&arg, step);
        trace.inner_iterations.push(inner_trace.iterations());
        if !inner_trace.converged() {
            trace.inner_nonconverged += 1;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = if momentum { (t - 1.0) / t_next } else { 0.0 };
        y = x_next.clone();
        y.scale(1.0 + beta);
        y.axpy(-beta, &x);
        t = t_next;
        let rel = relative_change(&x_next, &x);
        x = x_next;
        if let Some(obj) = objective {
            trace.objective.push(obj(&x));
        }
        trace.relative_change.push(rel);
        trace.time_ms.push(start.elapsed().as_secs_f64() * 1e3);
        if rel <= stop.relative_tolerance {
            trace.termination = Termination::Tolerance;
            break;
        }
    }
    Ok((x, trace))
}
