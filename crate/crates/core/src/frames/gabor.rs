//! Painless-case Gabor system with a canonical tight window.
//!
//! The window is a periodized Hann sampled at half-integer offsets, so it is
//! strictly positive on its support. In the painless case (channels >= window
//! length) the frame operator is diagonal and periodic with the hop, which
//! lets us normalize the window into an exactly tight system with frame
//! constant 1.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub(crate) struct GaborKernel {
    pub hop: usize,
    pub channels: usize,
    pub sig_len: usize,
    /// Number of time frames, `sig_len / hop`.
    pub num_frames: usize,
    /// Canonical tight window, length `win_len`.
    tight_window: Vec<f64>,
    /// Offset so the window is centered on the frame position.
    center: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl GaborKernel {
    pub fn new(win_len: usize, hop: usize, channels: usize, sig_len: usize) -> Result<Self> {
        if win_len == 0 || hop == 0 || channels == 0 || sig_len == 0 {
            return Err(Error::InvalidParameter(
                "gabor parameters must be positive".into(),
            ));
        }
        if sig_len % hop != 0 {
            return Err(Error::Dimension(format!(
                "hop {hop} does not divide signal length {sig_len}"
            )));
        }
        if sig_len % channels != 0 {
            // The periodic transform folds positions modulo the channel
            // count; without this the fold would collide across the wrap.
            return Err(Error::Dimension(format!(
                "channel count {channels} does not divide signal length {sig_len}"
            )));
        }
        if win_len > sig_len {
            return Err(Error::Dimension(format!(
                "window length {win_len} exceeds signal length {sig_len}"
            )));
        }
        if channels < win_len {
            return Err(Error::PainlessViolation {
                channels,
                window: win_len,
            });
        }
        if hop > win_len {
            return Err(Error::NotTight(format!(
                "hop {hop} exceeds window length {win_len}: shifts leave gaps"
            )));
        }

        // Hann sampled at half-integer offsets: strictly positive, so every
        // sample of the signal is covered by some window shift.
        let window: Vec<f64> = (0..win_len)
            .map(|j| {
                let s = (PI * (j as f64 + 0.5) / win_len as f64).sin();
                s * s
            })
            .collect();

        let center = win_len / 2;
        // Diagonal of the frame operator, periodic with the hop: the entry at
        // signal position l collects channels * sum of g^2 over the window
        // samples j with j = (l + center) mod hop.
        let mut diag = vec![0.0f64; hop];
        for (j, g) in window.iter().enumerate() {
            let r = (j + hop - (center % hop)) % hop;
            diag[r] += channels as f64 * g * g;
        }
        if diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::NotTight(
                "window shifts do not cover the signal".into(),
            ));
        }
        let tight_window: Vec<f64> = window
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let r = (j + hop - (center % hop)) % hop;
                g / diag[r].sqrt()
            })
            .collect();

        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(channels);
        let fft_inv = planner.plan_fft_inverse(channels);

        Ok(GaborKernel {
            hop,
            channels,
            sig_len,
            num_frames: sig_len / hop,
            tight_window,
            center,
            fft_fwd,
            fft_inv,
        })
    }

    pub fn coeff_len(&self) -> usize {
        self.channels * self.num_frames
    }

    /// Signal position of window sample `j` in frame `q`, modulo the period.
    #[inline]
    fn position(&self, q: usize, j: usize) -> usize {
        (q * self.hop + j + self.sig_len - self.center) % self.sig_len
    }

    /// Discrete Gabor transform. Coefficients are stored channel-major:
    /// index `k * num_frames + q` holds channel `k` of time frame `q`.
    pub fn analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.channels;
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft_fwd.get_inplace_scratch_len()];
        for q in 0..self.num_frames {
            buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (j, g) in self.tight_window.iter().enumerate() {
                let l = self.position(q, j);
                // Folding by the FFT length keeps the modulation exact.
                buf[l % m] += x[l] * g;
            }
            self.fft_fwd.process_with_scratch(&mut buf, &mut scratch);
            for (k, v) in buf.iter().enumerate() {
                out[k * self.num_frames + q] = *v;
            }
        }
        out
    }

    /// Adjoint of `analyze` (complex-linear synthesis).
    pub fn synthesize(&self, z: &[Complex64]) -> Vec<Complex64> {
        let m = self.channels;
        let mut out = vec![Complex64::new(0.0, 0.0); self.sig_len];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft_inv.get_inplace_scratch_len()];
        for q in 0..self.num_frames {
            for k in 0..m {
                buf[k] = z[k * self.num_frames + q];
            }
            self.fft_inv.process_with_scratch(&mut buf, &mut scratch);
            for (j, g) in self.tight_window.iter().enumerate() {
                let l = self.position(q, j);
                out[l] += buf[l % m] * g;
            }
        }
        out
    }
}
