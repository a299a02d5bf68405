//! Proximal operators: elementary proxes, the exact composition formulas for
//! semi-orthogonal and tight-frame-analysis operators, and the cheap
//! approximation of the latter (`approximal`).
//!
//! Scaling convention: evaluating a prox with `prox(v, t)` returns
//! `prox_{t g}(v)`, so solver step sizes compose by multiplying `t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::solvers::{chambolle_pock, CpParams, StopCriteria, Trace};
use crate::vector::{LinearOp, Vector};

/// Proximal operator of some convex l.s.c. function, with the scale as an
/// explicit argument. Implemented by plain closures `Fn(&V, f64) -> V` and by
/// the named [`ProxMapping`] wrapper.
pub trait Prox<V: Vector>: Send + Sync {
    fn prox(&self, v: &V, scale: f64) -> V;
}

impl<V: Vector, F> Prox<V> for F
where
    F: Fn(&V, f64) -> V + Send + Sync,
{
    fn prox(&self, v: &V, scale: f64) -> V {
        self(v, scale)
    }
}

/// A prox as a named value with its domain dimension.
pub struct ProxMapping<V: Vector> {
    name: String,
    dim: usize,
    f: Box<dyn Fn(&V, f64) -> V + Send + Sync>,
}

impl<V: Vector + 'static> ProxMapping<V> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        f: impl Fn(&V, f64) -> V + Send + Sync + 'static,
    ) -> Self {
        ProxMapping {
            name: name.into(),
            dim,
            f: Box::new(f),
        }
    }

    pub fn apply(&self, v: &V, scale: f64) -> V {
        (self.f)(v, scale)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Prox of the zero function.
    pub fn identity(dim: usize) -> Self {
        ProxMapping::new("identity", dim, |v: &V, _| v.clone())
    }

    /// Prox of `c * g` given the prox of `g`.
    pub fn scaled(self, c: f64) -> Self {
        let name = format!("{}*{c}", self.name);
        let dim = self.dim;
        let f = self.f;
        ProxMapping {
            name,
            dim,
            f: Box::new(move |v, t| f(v, c * t)),
        }
    }
}

impl<V: Vector + 'static> Prox<V> for ProxMapping<V> {
    fn prox(&self, v: &V, scale: f64) -> V {
        self.apply(v, scale)
    }
}

/// Scalar that supports magnitude shrinkage. The complex case preserves the
/// phase and maps 0 to 0.
pub trait Shrink: Copy {
    fn shrink(self, tau: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Shrink for f64 {
    fn shrink(self, tau: f64) -> Self {
        let mag = (self.abs() - tau).max(0.0);
        mag * self.signum()
    }

    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Shrink for Complex64 {
    fn shrink(self, tau: f64) -> Self {
        let mag = self.norm();
        if mag <= tau {
            Complex64::new(0.0, 0.0)
        } else {
            self * ((mag - tau) / mag)
        }
    }

    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Componentwise soft thresholding, the prox of `tau * l1`.
pub fn soft_threshold<S: Shrink>(values: &[S], tau: f64) -> Result<Vec<S>> {
    if tau < 0.0 {
        return Err(Error::NegativeThreshold(tau));
    }
    Ok(values.iter().map(|v| v.shrink(tau)).collect())
}

/// l1 norm (sum of magnitudes; complex modulus in the complex case).
pub fn l1_norm<S: Shrink>(values: &[S]) -> f64 {
    values.iter().map(|v| v.magnitude()).sum()
}

/// Projection onto the set of signals that agree with `observation` on the
/// reliable positions. Entry-by-entry: reliable samples are replaced by the
/// observed ones, the rest pass through.
pub fn project_consistent(
    input: &[f64],
    observation: &[f64],
    reliable: &[bool],
) -> Result<Vec<f64>> {
    if input.len() != observation.len() || input.len() != reliable.len() {
        return Err(Error::Dimension(format!(
            "project_consistent lengths differ: {} / {} / {}",
            input.len(),
            observation.len(),
            reliable.len()
        )));
    }
    Ok(input
        .iter()
        .zip(observation)
        .zip(reliable)
        .map(|((&x, &y), &r)| if r { y } else { x })
        .collect())
}

/// Soft thresholding as a [`ProxMapping`] over complex coefficients.
pub fn l1_prox(dim: usize) -> ProxMapping<Vec<Complex64>> {
    ProxMapping::new("l1", dim, |v: &Vec<Complex64>, t| {
        soft_threshold(v, t).expect("nonnegative threshold")
    })
}

/// Soft thresholding as a [`ProxMapping`] over real vectors.
pub fn l1_prox_real(dim: usize) -> ProxMapping<Vec<f64>> {
    ProxMapping::new("l1", dim, |v: &Vec<f64>, t| {
        soft_threshold(v, t).expect("nonnegative threshold")
    })
}

/// Exact prox of `f(x) = g(Lx + b)` for a semi-orthogonal `L` with
/// `L L^T = alpha Id`:
///
/// `prox_f(x) = x + alpha^-1 L^T ( prox_{alpha g}(Lx + b) - Lx - b )`
///
/// The caller guarantees semi-orthogonality (frame constructors verify it for
/// the synthesis side of a tight frame).
pub fn prox_semiorthogonal<X: Vector, Y: Vector>(
    g_prox: &dyn Prox<Y>,
    op: &dyn LinearOp<X, Y>,
    alpha: f64,
    b: &Y,
    x: &X,
) -> X {
    let mut arg = op.apply(x);
    arg.axpy(1.0, b);
    let p = g_prox.prox(&arg, alpha);
    let diff = p.minus(&arg);
    let mut out = x.clone();
    out.axpy(1.0 / alpha, &op.adjoint(&diff));
    out
}

/// Configuration of the inner primal-dual solver used for the exact
/// tight-frame-analysis prox.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InnerSolveConfig {
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    /// Primal step.
    pub tau: f64,
    /// Dual step.
    pub sigma: f64,
}

impl InnerSolveConfig {
    /// Default steps `tau = sigma = 1/sqrt(alpha)`, saturating the step
    /// condition `sigma * tau * alpha <= 1`.
    pub fn for_alpha(alpha: f64) -> Self {
        let s = 1.0 / alpha.sqrt();
        InnerSolveConfig {
            max_iterations: 500,
            relative_tolerance: 1e-6,
            tau: s,
            sigma: s,
        }
    }

    pub fn with_stop(mut self, max_iterations: usize, relative_tolerance: f64) -> Self {
        self.max_iterations = max_iterations;
        self.relative_tolerance = relative_tolerance;
        self
    }

    pub fn validate(&self, alpha: f64) -> Result<()> {
        let product = self.sigma * self.tau * alpha;
        if product > 1.0 + 1e-12 {
            return Err(Error::StepSizeViolation(product));
        }
        if self.max_iterations == 0 || self.relative_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(
                "inner solver needs max_iterations >= 1 and tolerance > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Exact prox of `scale * g(A .)` evaluated iteratively, with warm-start
/// state reused across nested outer iterations.
pub struct AnalysisProx<'a> {
    frame: &'a Frame,
    g_prox: &'a dyn Prox<Vec<Complex64>>,
    cfg: InnerSolveConfig,
    state: Option<(Vec<f64>, Vec<Complex64>)>,
}

impl<'a> AnalysisProx<'a> {
    pub fn new(
        frame: &'a Frame,
        g_prox: &'a dyn Prox<Vec<Complex64>>,
        cfg: InnerSolveConfig,
    ) -> Result<Self> {
        cfg.validate(frame.alpha())?;
        Ok(AnalysisProx {
            frame,
            g_prox,
            cfg,
            state: None,
        })
    }

    /// Minimizes `scale * g(Au) + 1/2 |u - x|^2` by the primal-dual
    /// iteration. The result is returned together with the inner trace even
    /// when the tolerance was not reached (check `trace.converged()`).
    pub fn apply(&mut self, x: &[f64], scale: f64) -> (Vec<f64>, Trace) {
        let anchor = x.to_vec();
        let h_prox = move |v: &Vec<f64>, t: f64| {
            let mut out = v.clone();
            out.axpy(t, &anchor);
            out.scale(1.0 / (1.0 + t));
            out
        };
        let g_inner = self.g_prox;
        let g_scaled = move |v: &Vec<Complex64>, t: f64| g_inner.prox(v, scale * t);
        let op = crate::frames::AnalysisOp(self.frame);
        let x0 = self
            .state
            .as_ref()
            .map(|(u, _)| u.clone())
            .unwrap_or_else(|| x.to_vec());
        let y0 = self.state.as_ref().map(|(_, y)| y.clone());
        let stop = StopCriteria::new(self.cfg.max_iterations, self.cfg.relative_tolerance)
            .expect("validated config");
        let params = CpParams {
            tau: self.cfg.tau,
            sigma: self.cfg.sigma,
            theta: 1.0,
        };
        let sol = chambolle_pock(
            &h_prox,
            &g_scaled,
            &op,
            &x0,
            y0.as_ref(),
            params,
            &stop,
            None,
        )
        .expect("step condition validated at construction");
        self.state = Some((sol.primal.clone(), sol.dual));
        (sol.primal, sol.trace)
    }

    /// Drops the warm-start state (used when the anchor jumps).
    pub fn reset(&mut self) {
        self.state = None;
    }
}

/// One-shot exact analysis prox: `argmin_u g(Au) + 1/2 |u - x|^2`.
/// See [`AnalysisProx`] for the warm-started variant.
pub fn prox_analysis_exact(
    g_prox: &dyn Prox<Vec<Complex64>>,
    frame: &Frame,
    x: &[f64],
    cfg: &InnerSolveConfig,
) -> Result<(Vec<f64>, Trace)> {
    if x.len() != frame.n() {
        return Err(Error::Dimension(format!(
            "point length {} does not match frame dimension {}",
            x.len(),
            frame.n()
        )));
    }
    let mut prox = AnalysisProx::new(frame, g_prox, *cfg)?;
    Ok(prox.apply(x, 1.0))
}

/// The approximal operator: `alpha^-1 A* prox_{scale * alpha * g}(A x)`.
///
/// A cheap explicit stand-in for the exact analysis prox; itself the exact
/// prox of a convex l.s.c. function, hence non-expansive and safe inside
/// splitting iterations.
pub fn approximal(
    g_prox: &dyn Prox<Vec<Complex64>>,
    frame: &Frame,
    x: &[f64],
    scale: f64,
) -> Result<Vec<f64>> {
    let z = frame.analyze(x)?;
    let p = g_prox.prox(&z, scale * frame.alpha());
    let mut out = frame.synthesize(&p)?;
    out.scale(1.0 / frame.alpha());
    Ok(out)
}

/// `f(x) = g(A x)` for an evaluator of `g`.
pub fn eval_f(frame: &Frame, g_eval: &dyn Fn(&[Complex64]) -> f64, x: &[f64]) -> Result<f64> {
    Ok(g_eval(&frame.analyze(x)?))
}

/// The function whose prox the approximal operator is, evaluated by the
/// oracle module (null-space-parameterized minimization of the infimal
/// convolution). `g` is fixed to the l1 norm. Limited to small frames.
pub fn eval_phi(frame: &Frame, x: &[f64], cfg: &crate::oracle::PhiConfig) -> Result<f64> {
    crate::oracle::phi_value(frame, x, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::demo_frame_exact;

    #[test]
    fn soft_threshold_zero_tau_is_identity() {
        let v = vec![2.0, -0.5, 1.0];
        assert_eq!(soft_threshold(&v, 0.0).unwrap(), v);
    }

    #[test]
    fn soft_threshold_real_example() {
        let out = soft_threshold(&[2.0, -0.5, 1.0], 1.0).unwrap();
        assert_eq!(out, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn soft_threshold_complex_preserves_phase() {
        let v = Complex64::from_polar(3.0, std::f64::consts::FRAC_PI_4);
        let out = soft_threshold(&[v], 1.0).unwrap();
        let expected = Complex64::from_polar(2.0, std::f64::consts::FRAC_PI_4);
        assert!((out[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn soft_threshold_complex_zero_maps_to_zero() {
        let out = soft_threshold(&[Complex64::new(0.0, 0.0)], 1.5).unwrap();
        assert_eq!(out[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn soft_threshold_rejects_negative() {
        assert!(matches!(
            soft_threshold(&[1.0], -0.1),
            Err(Error::NegativeThreshold(_))
        ));
    }

    #[test]
    fn project_consistent_examples() {
        let obs = vec![1.0, 2.0, 3.0, 4.0];
        let input = vec![9.0, 9.0, 9.0, 9.0];
        let mask = vec![true, false, true, false];
        let out = project_consistent(&input, &obs, &mask).unwrap();
        assert_eq!(out, vec![1.0, 9.0, 3.0, 9.0]);
        // Idempotent.
        assert_eq!(project_consistent(&out, &obs, &mask).unwrap(), out);
        // All reliable -> observation; none reliable -> input.
        let all = vec![true; 4];
        assert_eq!(project_consistent(&input, &obs, &all).unwrap(), obs);
        let none = vec![false; 4];
        assert_eq!(project_consistent(&input, &obs, &none).unwrap(), input);
    }

    #[test]
    fn prox_semiorthogonal_identity_g_is_identity() {
        let frame = demo_frame_exact();
        let g = ProxMapping::<Vec<f64>>::identity(2);
        let op = crate::frames::SynthesisOp(&frame);
        let z: Vec<Complex64> = (0..4)
            .map(|i| Complex64::new(0.3 * i as f64 - 0.5, 0.1 * i as f64))
            .collect();
        let b = vec![0.0; 2];
        let out = prox_semiorthogonal(&g, &op, frame.alpha(), &b, &z);
        for (a, e) in out.iter().zip(&z) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn approximal_with_zero_g_is_identity() {
        let frame = demo_frame_exact();
        let g = ProxMapping::<Vec<Complex64>>::identity(4);
        let x = vec![0.7, -1.3];
        let out = approximal(&g, &frame, &x, 1.0).unwrap();
        for (a, e) in out.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }
}
