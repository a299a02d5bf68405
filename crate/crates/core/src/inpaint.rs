//! Audio inpainting on top of the solvers: degradation, the four problem
//! formulations (synthesis/analysis x consistent/inconsistent), dispatch onto
//! the matching solver, and SNR evaluation over the missing samples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{AnalysisOp, Frame, FrameKind, Signal};
use crate::proxcalc::{
    approximal, l1_norm, l1_prox, project_consistent, InnerSolveConfig,
};
use crate::solvers::{
    chambolle_pock, douglas_rachford, fista, fista_nested_analysis, CpParams, SmoothTerm,
    StopCriteria, Trace,
};
use crate::vector::Vector;

/// SNR values are capped at this magnitude (reported when the error vanishes).
pub const SNR_CAP_DB: f64 = 300.0;

/// Reliability pattern: `true` marks samples that survived degradation.
/// The masking operator `M` zero-fills the missing positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    pub reliable: Vec<bool>,
}

impl Mask {
    pub fn new(reliable: Vec<bool>) -> Self {
        Mask { reliable }
    }

    pub fn all_reliable(n: usize) -> Self {
        Mask {
            reliable: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.reliable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reliable.is_empty()
    }

    pub fn num_missing(&self) -> usize {
        self.reliable.iter().filter(|&&r| !r).count()
    }

    pub fn num_reliable(&self) -> usize {
        self.len() - self.num_missing()
    }

    /// The operator `M`: keeps reliable samples, zero-fills the rest.
    pub fn zero_fill(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.reliable)
            .map(|(&v, &r)| if r { v } else { 0.0 })
            .collect()
    }

    /// One-line text form: comma-separated 0/1.
    pub fn to_line(&self) -> String {
        let cells: Vec<&str> = self
            .reliable
            .iter()
            .map(|&r| if r { "1" } else { "0" })
            .collect();
        cells.join(",")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut reliable = Vec::new();
        for cell in line.trim().split(',') {
            match cell.trim() {
                "1" => reliable.push(true),
                "0" => reliable.push(false),
                other => {
                    return Err(Error::Parse(format!(
                        "mask entries must be 0 or 1, got '{other}'"
                    )))
                }
            }
        }
        Ok(Mask { reliable })
    }
}

/// Which of the four optimization problems to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    SynthesisConsistent,
    AnalysisConsistent,
    SynthesisInconsistent,
    AnalysisInconsistent,
}

impl Formulation {
    pub fn is_consistent(&self) -> bool {
        matches!(
            self,
            Formulation::SynthesisConsistent | Formulation::AnalysisConsistent
        )
    }

    pub fn is_analysis(&self) -> bool {
        matches!(
            self,
            Formulation::AnalysisConsistent | Formulation::AnalysisInconsistent
        )
    }

    pub const ALL: [Formulation; 4] = [
        Formulation::SynthesisConsistent,
        Formulation::AnalysisConsistent,
        Formulation::SynthesisInconsistent,
        Formulation::AnalysisInconsistent,
    ];
}

impl std::str::FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synthesis-consistent" => Ok(Formulation::SynthesisConsistent),
            "analysis-consistent" => Ok(Formulation::AnalysisConsistent),
            "synthesis-inconsistent" => Ok(Formulation::SynthesisInconsistent),
            "analysis-inconsistent" => Ok(Formulation::AnalysisInconsistent),
            other => Err(Error::Parse(format!("unknown formulation '{other}'"))),
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Formulation::SynthesisConsistent => "synthesis-consistent",
            Formulation::AnalysisConsistent => "analysis-consistent",
            Formulation::SynthesisInconsistent => "synthesis-inconsistent",
            Formulation::AnalysisInconsistent => "analysis-inconsistent",
        };
        f.write_str(s)
    }
}

/// How the analysis-formulation prox of `S o A` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisProxMode {
    /// The cheap explicit substitute `alpha^-1 A* prox_{alpha S}(A x)`.
    Approximal,
    /// The exact prox, via the primal-dual iteration (direct in the
    /// consistent case, nested inside FISTA in the inconsistent one).
    ExactNested,
}

impl std::str::FromStr for AnalysisProxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approximal" => Ok(AnalysisProxMode::Approximal),
            "exact" | "exact-nested" => Ok(AnalysisProxMode::ExactNested),
            other => Err(Error::Parse(format!("unknown prox mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for AnalysisProxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalysisProxMode::Approximal => f.write_str("approximal"),
            AnalysisProxMode::ExactNested => f.write_str("exact-nested"),
        }
    }
}

/// Everything needed to run one restoration.
#[derive(Clone)]
pub struct InpaintTask {
    pub observation: Signal,
    pub mask: Mask,
    pub frame: Frame,
    pub formulation: Formulation,
    pub prox_mode: AnalysisProxMode,
    /// Data weight of the inconsistent formulations.
    pub lambda: f64,
    /// Douglas-Rachford prox scale; sets the per-iteration shrinkage
    /// threshold of the consistent formulations.
    pub dr_gamma: f64,
    pub stop: StopCriteria,
    /// Configuration of the primal-dual machinery for the exact analysis
    /// prox (steps also apply to the direct consistent-analysis solve).
    pub inner: InnerSolveConfig,
    pub seed: u64,
    /// Clean signal for SNR evaluation, when available.
    pub reference: Option<Signal>,
}

impl InpaintTask {
    pub fn new(observation: Signal, mask: Mask, frame: Frame) -> Self {
        let alpha = frame.alpha();
        InpaintTask {
            observation,
            mask,
            frame,
            formulation: Formulation::AnalysisConsistent,
            prox_mode: AnalysisProxMode::Approximal,
            lambda: 1.0,
            dr_gamma: 1.0,
            stop: StopCriteria::default(),
            inner: InnerSolveConfig::for_alpha(alpha),
            seed: 0,
            reference: None,
        }
    }
}

/// Summary of the frame used, echoed into reports.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameSummary {
    pub kind: FrameKind,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
}

impl From<&Frame> for FrameSummary {
    fn from(f: &Frame) -> Self {
        FrameSummary {
            kind: f.kind(),
            n: f.n(),
            m: f.m(),
            alpha: f.alpha(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveConfig {
    pub formulation: Formulation,
    pub prox_mode: AnalysisProxMode,
    pub lambda: f64,
    pub dr_gamma: f64,
    pub stop: StopCriteria,
    pub inner: InnerSolveConfig,
    pub seed: u64,
    pub frame: FrameSummary,
}

/// Restoration result: signal, metric, per-iteration trace, configuration.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub restored: Signal,
    /// Present when the task carried a reference signal (capped when fewer
    /// than two samples are missing).
    pub snr_db: Option<f64>,
    pub trace: Trace,
    pub config: SolveConfig,
}

/// Drops `floor(fraction * n)` samples at seeded uniform positions without
/// replacement; dropped samples are zeroed in the observation.
pub fn degrade(signal: &Signal, dropout_fraction: f64, seed: u64) -> Result<(Signal, Mask)> {
    if !(0.0..1.0).contains(&dropout_fraction) {
        return Err(Error::FractionOutOfRange(dropout_fraction));
    }
    let n = signal.len();
    let missing = (dropout_fraction * n as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..missing {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut reliable = vec![true; n];
    for &i in &idx[..missing] {
        reliable[i] = false;
    }
    let mask = Mask::new(reliable);
    let observation = Signal {
        samples: mask.zero_fill(&signal.samples),
        sample_rate: signal.sample_rate,
    };
    Ok((observation, mask))
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// `20 log10( std(reference) / std(reference - estimate) )`, evaluated over
/// the missing positions only. Capped at +-300 dB; exactly matching estimates
/// report the cap.
pub fn snr(reference: &[f64], estimate: &[f64], mask: &Mask) -> Result<f64> {
    if reference.len() != estimate.len() || reference.len() != mask.len() {
        return Err(Error::Dimension(format!(
            "snr lengths differ: {} / {} / {}",
            reference.len(),
            estimate.len(),
            mask.len()
        )));
    }
    let mut ref_miss = Vec::new();
    let mut err_miss = Vec::new();
    for ((&s, &e), &r) in reference.iter().zip(estimate).zip(&mask.reliable) {
        if !r {
            ref_miss.push(s);
            err_miss.push(s - e);
        }
    }
    if ref_miss.len() < 2 {
        return Err(Error::TooFewMissing {
            need: 2,
            have: ref_miss.len(),
        });
    }
    let sigma_ref = std_dev(&ref_miss);
    let sigma_err = std_dev(&err_miss);
    if sigma_err == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    let value = 20.0 * (sigma_ref / sigma_err).log10();
    Ok(value.clamp(-SNR_CAP_DB, SNR_CAP_DB))
}

/// Deterministic synthetic test signal: up to 8 seeded sinusoids plus an
/// optional damped onset transient, peak-normalized.
pub fn synthetic_signal(n: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = rng.gen_range(3..=8usize);
    let mut samples = vec![0.0f64; n];
    for _ in 0..parts {
        let freq = rng.gen_range(0.01..0.45);
        let amp = rng.gen_range(0.2..1.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        for (t, s) in samples.iter_mut().enumerate() {
            *s += amp * (std::f64::consts::TAU * freq * t as f64 + phase).sin();
        }
    }
    if rng.gen_bool(0.5) {
        let onset = rng.gen_range(n / 10..(9 * n) / 10);
        let amp = rng.gen_range(0.5..1.5);
        let freq = rng.gen_range(0.05..0.4);
        for t in onset..n {
            let dt = (t - onset) as f64;
            samples[t] +=
                amp * (-dt / 32.0).exp() * (std::f64::consts::TAU * freq * dt).sin();
        }
    }
    let peak = samples.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if peak > 0.0 {
        let s = 0.9 / peak;
        for v in samples.iter_mut() {
            *v *= s;
        }
    }
    Signal::new(samples)
}

/// Dispatches the task onto the matching solver and packages the result.
///
/// Consistent formulations end with an exact write-back of the reliable
/// samples, so the returned signal satisfies the constraint to machine
/// precision regardless of where the iteration stopped.
pub fn solve(task: &InpaintTask) -> Result<SolveReport> {
    let frame = &task.frame;
    let n = frame.n();
    let obs = &task.observation.samples;
    if obs.len() != n {
        return Err(Error::Dimension(format!(
            "observation length {} does not match frame dimension {n}",
            obs.len()
        )));
    }
    if task.mask.len() != n {
        return Err(Error::Dimension(format!(
            "mask length {} does not match signal length {n}",
            task.mask.len()
        )));
    }
    if !task.formulation.is_consistent() && task.lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inconsistent formulations need lambda > 0, got {}",
            task.lambda
        )));
    }

    let alpha = frame.alpha();
    let reliable = &task.mask.reliable;
    let l1c = l1_prox(frame.m());
    let analysis_l1 = |x: &Vec<f64>| -> f64 {
        l1_norm(&frame.analyze_complex(
            &x.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
        ))
    };

    let (restored_raw, trace): (Vec<f64>, Trace) = match task.formulation {
        Formulation::SynthesisConsistent => {
            // min |z|_1 s.t. synth(z) in Gamma, by Douglas-Rachford. The
            // constraint prox comes from the semi-orthogonal composition
            // formula with L = synthesis, so its output is exactly feasible.
            let proj = |s: &Vec<f64>, _t: f64| {
                project_consistent(s, obs, reliable).expect("matched lengths")
            };
            let op = crate::frames::SynthesisOp(frame);
            let b = vec![0.0f64; n];
            let prox_constraint = |z: &Vec<Complex64>, _t: f64| {
                crate::proxcalc::prox_semiorthogonal(&proj, &op, alpha, &b, z)
            };
            let prox_l1 = &l1c;
            let objective = |z: &Vec<Complex64>| l1_norm(z);
            let x0 = vec![Complex64::new(0.0, 0.0); frame.m()];
            let (z, trace) = douglas_rachford(
                &prox_constraint,
                prox_l1,
                &x0,
                task.dr_gamma,
                &task.stop,
                Some(&objective),
            );
            (frame.synthesize(&z)?, trace)
        }
        Formulation::AnalysisConsistent => match task.prox_mode {
            AnalysisProxMode::Approximal => {
                // min |Ax|_1 s.t. x in Gamma, by Douglas-Rachford with the
                // approximal operator standing in for the composed prox.
                let proj = |s: &Vec<f64>, _t: f64| {
                    project_consistent(s, obs, reliable).expect("matched lengths")
                };
                let prox_approx = |x: &Vec<f64>, t: f64| {
                    approximal(&l1c, frame, x, t).expect("matched dimensions")
                };
                let x0 = vec![0.0f64; n];
                let (x, trace) = douglas_rachford(
                    &proj,
                    &prox_approx,
                    &x0,
                    1.0,
                    &task.stop,
                    Some(&analysis_l1),
                );
                (x, trace)
            }
            AnalysisProxMode::ExactNested => {
                // min |Ax|_1 s.t. x in Gamma, by the primal-dual iteration
                // composing the l1 term with the analysis operator directly.
                let proj = |s: &Vec<f64>, _t: f64| {
                    project_consistent(s, obs, reliable).expect("matched lengths")
                };
                let op = AnalysisOp(frame);
                let params = CpParams::for_norm_bound(alpha.sqrt());
                let x0 = vec![0.0f64; n];
                let sol = chambolle_pock(
                    &proj,
                    &l1c,
                    &op,
                    &x0,
                    None,
                    params,
                    &task.stop,
                    Some(&analysis_l1),
                )?;
                (sol.primal, sol.trace)
            }
        },
        Formulation::SynthesisInconsistent => {
            // min |z|_1 + lambda |M synth(z) - M y|^2, by FISTA.
            let lambda = task.lambda;
            let mask = &task.mask;
            let gradient = move |z: &Vec<Complex64>| -> Vec<Complex64> {
                let s = frame.synthesize(z).expect("matched dimensions");
                let mut r = mask.zero_fill(&s);
                for (ri, (&yi, &rel)) in r.iter_mut().zip(obs.iter().zip(reliable)) {
                    if rel {
                        *ri -= yi;
                    }
                }
                let mut g = frame.analyze(&r).expect("matched dimensions");
                g.scale(2.0 * lambda);
                g
            };
            let smooth = SmoothTerm::new(2.0 * lambda * alpha, gradient);
            let step = 1.0 / smooth.lipschitz;
            let objective = |z: &Vec<Complex64>| {
                let s = frame.synthesize(z).expect("matched dimensions");
                let r: f64 = s
                    .iter()
                    .zip(obs)
                    .zip(reliable)
                    .map(|((&si, &yi), &rel)| if rel { (si - yi) * (si - yi) } else { 0.0 })
                    .sum();
                l1_norm(z) + lambda * r
            };
            let x0 = vec![Complex64::new(0.0, 0.0); frame.m()];
            let (z, trace) = fista(
                &smooth,
                &l1c,
                &x0,
                step,
                true,
                &task.stop,
                Some(&objective),
            );
            (frame.synthesize(&z)?, trace)
        }
        Formulation::AnalysisInconsistent => {
            // min |Ax|_1 + lambda |M x - M y|^2, by FISTA; the nonsmooth prox
            // is either the approximal operator or the nested exact prox.
            let lambda = task.lambda;
            let gradient = move |x: &Vec<f64>| -> Vec<f64> {
                x.iter()
                    .zip(obs)
                    .zip(reliable)
                    .map(|((&xi, &yi), &rel)| if rel { 2.0 * lambda * (xi - yi) } else { 0.0 })
                    .collect()
            };
            let smooth = SmoothTerm::new(2.0 * lambda, gradient);
            let step = 1.0 / smooth.lipschitz;
            let objective = |x: &Vec<f64>| {
                let fit: f64 = x
                    .iter()
                    .zip(obs)
                    .zip(reliable)
                    .map(|((&xi, &yi), &rel)| if rel { (xi - yi) * (xi - yi) } else { 0.0 })
                    .sum();
                analysis_l1(x) + lambda * fit
            };
            let x0 = vec![0.0f64; n];
            match task.prox_mode {
                AnalysisProxMode::Approximal => {
                    let prox_approx = |x: &Vec<f64>, t: f64| {
                        approximal(&l1c, frame, x, t).expect("matched dimensions")
                    };
                    let (x, trace) = fista(
                        &smooth,
                        &prox_approx,
                        &x0,
                        step,
                        true,
                        &task.stop,
                        Some(&objective),
                    );
                    (x, trace)
                }
                AnalysisProxMode::ExactNested => fista_nested_analysis(
                    &smooth,
                    frame,
                    &l1c,
                    &task.inner,
                    &x0,
                    step,
                    true,
                    &task.stop,
                    Some(&objective),
                )?,
            }
        }
    };

    let restored_samples = if task.formulation.is_consistent() {
        project_consistent(&restored_raw, obs, reliable)?
    } else {
        restored_raw
    };
    let restored = Signal {
        samples: restored_samples,
        sample_rate: task.observation.sample_rate,
    };

    let snr_db = match &task.reference {
        Some(reference) => {
            if task.mask.num_missing() < 2 {
                Some(SNR_CAP_DB)
            } else {
                Some(snr(&reference.samples, &restored.samples, &task.mask)?)
            }
        }
        None => None,
    };

    Ok(SolveReport {
        restored,
        snr_db,
        trace,
        config: SolveConfig {
            formulation: task.formulation,
            prox_mode: task.prox_mode,
            lambda: task.lambda,
            stop: task.stop,
            inner: task.inner,
            seed: task.seed,
            frame: FrameSummary::from(frame),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrade_zero_fraction_keeps_everything() {
        let s = synthetic_signal(64, 1);
        let (obs, mask) = degrade(&s, 0.0, 3).unwrap();
        assert_eq!(obs.samples, s.samples);
        assert_eq!(mask.num_missing(), 0);
    }

    #[test]
    fn degrade_drops_exact_count_and_is_deterministic() {
        let s = synthetic_signal(10, 2);
        let (obs1, m1) = degrade(&s, 0.8, 7).unwrap();
        let (obs2, m2) = degrade(&s, 0.8, 7).unwrap();
        assert_eq!(m1.num_missing(), 8);
        assert_eq!(m1, m2);
        assert_eq!(obs1.samples, obs2.samples);
        for (i, &r) in m1.reliable.iter().enumerate() {
            if !r {
                assert_eq!(obs1.samples[i], 0.0);
            } else {
                assert_eq!(obs1.samples[i], s.samples[i]);
            }
        }
        let (_, m3) = degrade(&s, 0.8, 8).unwrap();
        assert_ne!(m1, m3, "different seeds should give different masks");
    }

    #[test]
    fn degrade_rejects_full_dropout() {
        let s = synthetic_signal(16, 0);
        assert!(matches!(
            degrade(&s, 1.0, 0),
            Err(Error::FractionOutOfRange(_))
        ));
    }

    #[test]
    fn snr_formula_edges() {
        let reference = vec![1.0, -1.0, 0.5, 2.0, -0.25, 0.0];
        let mask = Mask::new(vec![true, false, false, true, false, false]);
        // Exact estimate hits the cap.
        assert_eq!(snr(&reference, &reference, &mask).unwrap(), SNR_CAP_DB);
        // Error equal to the reference on missing samples gives 0 dB.
        let zeros = vec![0.0; 6];
        let v = snr(&reference, &zeros, &mask).unwrap();
        assert!(v.abs() < 1e-12, "snr = {v}");
        // Halving the error raises SNR by 20 log10 2.
        let est1: Vec<f64> = reference.iter().map(|v| v * 0.5).collect();
        let est2: Vec<f64> = reference.iter().map(|v| v * 0.75).collect();
        let s1 = snr(&reference, &est1, &mask).unwrap();
        let s2 = snr(&reference, &est2, &mask).unwrap();
        assert!((s2 - s1 - 20.0 * 2.0f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn snr_needs_two_missing() {
        let reference = vec![1.0, 2.0, 3.0];
        let mask = Mask::new(vec![true, true, false]);
        assert!(matches!(
            snr(&reference, &reference, &mask),
            Err(Error::TooFewMissing { .. })
        ));
    }

    #[test]
    fn snr_ignores_reliable_positions() {
        let reference = synthetic_signal(32, 5).samples;
        let mask = Mask::new((0..32).map(|i| i % 3 == 0).collect());
        let mut est = reference.clone();
        for (i, v) in est.iter_mut().enumerate() {
            if i % 5 == 0 {
                *v += 0.3; // perturb some entries
            }
        }
        let base = snr(&reference, &est, &mask).unwrap();
        let mut est2 = est.clone();
        for (i, v) in est2.iter_mut().enumerate() {
            if mask.reliable[i] {
                *v = -7.0; // arbitrary garbage on reliable positions
            }
        }
        assert_eq!(base, snr(&reference, &est2, &mask).unwrap());
    }

    #[test]
    fn mask_round_trips_through_text() {
        let mask = Mask::new(vec![true, false, false, true]);
        let line = mask.to_line();
        assert_eq!(line, "1,0,0,1");
        assert_eq!(Mask::from_line(&line).unwrap(), mask);
    }

    #[test]
    fn synthetic_signal_is_deterministic_and_bounded() {
        let a = synthetic_signal(256, 42);
        let b = synthetic_signal(256, 42);
        assert_eq!(a.samples, b.samples);
        let peak = a.samples.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(peak <= 0.9 + 1e-12 && peak > 0.5);
    }

    #[test]
    fn solve_fully_reliable_returns_observation() {
        let signal = synthetic_signal(64, 9);
        let frame = Frame::dct(64).unwrap();
        let mask = Mask::all_reliable(64);
        let mut task = InpaintTask::new(signal.clone(), mask, frame);
        task.reference = Some(signal.clone());
        let report = solve(&task).unwrap();
        for (a, b) in report.restored.samples.iter().zip(&signal.samples) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(report.snr_db, Some(SNR_CAP_DB));
    }
}
