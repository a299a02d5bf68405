//! Tight-frame analysis/synthesis operators.
//!
//! A frame here is a linear map `A` from real length-`n` signals to
//! length-`m` coefficient vectors (complex in general) with `A* A = alpha Id`
//! for some `alpha > 0`. Signals are real throughout; coefficient vectors use
//! the real inner product `Re(y^H x)`, under which the public
//! [`Frame::synthesize`] (real part of the complex synthesis) is the exact
//! adjoint of [`Frame::analyze`].

mod dct;
mod gabor;

use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::LinearOp;

use dct::DctKernel;
use gabor::GaborKernel;

/// Real-valued time-domain signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate: Option<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Self {
        Signal {
            samples,
            sample_rate: None,
        }
    }

    pub fn with_rate(samples: Vec<f64>, rate: f64) -> Self {
        Signal {
            samples,
            sample_rate: Some(rate),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Frame-domain coefficient vector.
pub type Coefficients = Vec<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameKind {
    ExplicitMatrix,
    Gabor,
    DctUnitary,
}

#[derive(Clone)]
enum Kernel {
    Explicit {
        /// Row-major `m x n` matrix.
        entries: Vec<Complex64>,
        real: bool,
    },
    Gabor(GaborKernel),
    Dct(DctKernel),
}

/// Analysis/synthesis operator pair of a tight frame.
#[derive(Clone)]
pub struct Frame {
    kernel: Kernel,
    n: usize,
    m: usize,
    alpha: f64,
}

/// Relative tolerance of the tightness check in explicit-frame construction.
pub const TIGHTNESS_TOL: f64 = 1e-8;

impl Frame {
    /// Builds a frame from an explicit real `m x n` matrix (row-major).
    /// Rejects matrices whose Gram matrix deviates from `alpha Id` by more
    /// than [`TIGHTNESS_TOL`] relative; matrices are never renormalized.
    pub fn explicit(m: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        Self::explicit_with_tolerance(m, n, entries, TIGHTNESS_TOL)
    }

    /// Same as [`Frame::explicit`] with a caller-chosen tightness tolerance,
    /// for matrices given at limited print precision.
    pub fn explicit_with_tolerance(
        m: usize,
        n: usize,
        entries: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        let complex: Vec<Complex64> = entries.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::explicit_complex_with_tolerance(m, n, complex, tol).map(|mut f| {
            if let Kernel::Explicit { real, .. } = &mut f.kernel {
                *real = true;
            }
            f
        })
    }

    pub fn explicit_complex(m: usize, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::explicit_complex_with_tolerance(m, n, entries, TIGHTNESS_TOL)
    }

    pub fn explicit_complex_with_tolerance(
        m: usize,
        n: usize,
        entries: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self> {
        if m < n {
            return Err(Error::Dimension(format!(
                "explicit frame needs m >= n, got {m} x {n}"
            )));
        }
        if entries.len() != m * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {m} x {n} matrix, got {}",
                m * n,
                entries.len()
            )));
        }
        // Gram matrix A^H A.
        let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    s += entries[r * n + i].conj() * entries[r * n + j];
                }
                gram[i * n + j] = s;
            }
        }
        let alpha = (0..n).map(|i| gram[i * n + i].re).sum::<f64>() / n as f64;
        if alpha <= 0.0 {
            return Err(Error::NotTight("zero matrix".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let target = if i == j {
                    Complex64::new(alpha, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let dev = (gram[i * n + j] - target).norm();
                if dev > tol * alpha {
                    return Err(Error::NotTight(format!(
                        "gram entry ({i},{j}) deviates from alpha*Id by {dev:.3e} \
                         (limit {:.3e})",
                        tol * alpha
                    )));
                }
            }
        }
        Ok(Frame {
            kernel: Kernel::Explicit {
                entries,
                real: false,
            },
            n,
            m,
            alpha,
        })
    }

    /// Painless-case Gabor frame with a canonical tight Hann window
    /// (`alpha = 1`). Coefficients are complex, stored channel-major with the
    /// time-frame index varying fastest.
    pub fn gabor(win_len: usize, hop: usize, channels: usize, sig_len: usize) -> Result<Self> {
        let kernel = GaborKernel::new(win_len, hop, channels, sig_len)?;
        let m = kernel.coeff_len();
        Ok(Frame {
            kernel: Kernel::Gabor(kernel),
            n: sig_len,
            m,
            alpha: 1.0,
        })
    }

    /// Orthonormal type-II DCT as a unitary frame (`m = n`, `alpha = 1`).
    pub fn dct(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dct dimension must be >= 1".into()));
        }
        Ok(Frame {
            kernel: Kernel::Dct(DctKernel::new(n)),
            n,
            m: n,
            alpha: 1.0,
        })
    }

    /// Loads an explicit real frame from CSV: line 1 holds `m,n`, followed by
    /// `m` lines of `n` comma-separated entries.
    pub fn explicit_from_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::explicit_from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn explicit_from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
        let dims: Vec<&str> = header.trim().split(',').collect();
        if dims.len() != 2 {
            return Err(Error::Parse(format!(
                "expected header 'm,n', got '{header}'"
            )));
        }
        let m: usize = dims[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad row count '{}'", dims[0])))?;
        let n: usize = dims[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad column count '{}'", dims[1])))?;
        let mut entries = Vec::with_capacity(m * n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for cell in line.trim().split(',') {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad matrix entry '{cell}'")))?;
                entries.push(v);
            }
        }
        if entries.len() != m * n {
            return Err(Error::Parse(format!(
                "expected {} entries, file has {}",
                m * n,
                entries.len()
            )));
        }
        Self::explicit(m, n, entries)
    }

    pub fn kind(&self) -> FrameKind {
        match &self.kernel {
            Kernel::Explicit { .. } => FrameKind::ExplicitMatrix,
            Kernel::Gabor(_) => FrameKind::Gabor,
            Kernel::Dct(_) => FrameKind::DctUnitary,
        }
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient dimension (`m >= n`).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Tight-frame constant: `A* A = alpha Id`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True when all matrix entries (and hence all coefficients of real
    /// signals) are real.
    pub fn is_real(&self) -> bool {
        match &self.kernel {
            Kernel::Explicit { real, .. } => *real,
            Kernel::Gabor(_) => false,
            Kernel::Dct(_) => true,
        }
    }

    /// Row-major real matrix entries, when this is a real explicit frame.
    pub fn real_matrix(&self) -> Option<Vec<f64>> {
        match &self.kernel {
            Kernel::Explicit { entries, real } if *real => {
                Some(entries.iter().map(|e| e.re).collect())
            }
            _ => None,
        }
    }

    fn check_signal_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension(format!(
                "signal length {len} does not match frame dimension {}",
                self.n
            )));
        }
        Ok(())
    }

    fn check_coeff_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::Dimension(format!(
                "coefficient length {len} does not match frame dimension {}",
                self.m
            )));
        }
        Ok(())
    }

    /// Applies the analysis operator to a real signal.
    pub fn analyze(&self, x: &[f64]) -> Result<Coefficients> {
        self.check_signal_len(x.len())?;
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(self.analyze_complex(&xc))
    }

    /// Adjoint of [`Frame::analyze`] with respect to the real inner product:
    /// the real part of the complex synthesis.
    pub fn synthesize(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        self.check_coeff_len(z.len())?;
        Ok(self.synthesize_complex(z).iter().map(|v| v.re).collect())
    }

    /// Complex-linear analysis (no dimension check on purpose: internal hot
    /// path; panics on mismatch in debug builds).
    pub fn analyze_complex(&self, x: &[Complex64]) -> Coefficients {
        debug_assert_eq!(x.len(), self.n);
        match &self.kernel {
            Kernel::Explicit { entries, .. } => (0..self.m)
                .map(|r| {
                    let row = &entries[r * self.n..(r + 1) * self.n];
                    row.iter().zip(x).map(|(a, b)| a * b).sum()
                })
                .collect(),
            Kernel::Gabor(k) => k.analyze(x),
            Kernel::Dct(k) => k.analyze(x),
        }
    }

    /// Complex-linear synthesis `A* z`.
    pub fn synthesize_complex(&self, z: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(z.len(), self.m);
        match &self.kernel {
            Kernel::Explicit { entries, .. } => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.n];
                for r in 0..self.m {
                    let zr = z[r];
                    let row = &entries[r * self.n..(r + 1) * self.n];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a.conj() * zr;
                    }
                }
                out
            }
            Kernel::Gabor(k) => k.synthesize(z),
            Kernel::Dct(k) => k.synthesize(z),
        }
    }

    /// Orthogonal projection onto the range of the analysis operator,
    /// `alpha^-1 A A* z`. Idempotent; fixes vectors of the form `A x`.
    pub fn project_range(&self, z: &[Complex64]) -> Result<Coefficients> {
        self.check_coeff_len(z.len())?;
        let back = self.synthesize_complex(z);
        let mut fwd = self.analyze_complex(&back);
        for v in fwd.iter_mut() {
            *v /= self.alpha;
        }
        Ok(fwd)
    }
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Frame")
            .field("kind", &self.kind())
            .field("n", &self.n)
            .field("m", &self.m)
            .field("alpha", &self.alpha)
            .finish()
    }
}

/// The analysis operator as a linear map from signals to coefficients
/// (`A^T A = alpha Id`; the Gram-constant side of the tight-frame pair).
pub struct AnalysisOp<'a>(pub &'a Frame);

impl LinearOp<Vec<f64>, Vec<Complex64>> for AnalysisOp<'_> {
    fn apply(&self, x: &Vec<f64>) -> Vec<Complex64> {
        self.0.analyze(x).expect("analysis dimension mismatch")
    }

    fn adjoint(&self, y: &Vec<Complex64>) -> Vec<f64> {
        self.0.synthesize(y).expect("synthesis dimension mismatch")
    }

    fn norm_bound(&self) -> f64 {
        self.0.alpha().sqrt()
    }
}

/// The synthesis operator as a linear map from coefficients to signals
/// (`L L^T = alpha Id`; the semi-orthogonal side of the tight-frame pair).
pub struct SynthesisOp<'a>(pub &'a Frame);

impl LinearOp<Vec<Complex64>, Vec<f64>> for SynthesisOp<'_> {
    fn apply(&self, z: &Vec<Complex64>) -> Vec<f64> {
        self.0.synthesize(z).expect("synthesis dimension mismatch")
    }

    fn adjoint(&self, x: &Vec<f64>) -> Vec<Complex64> {
        self.0.analyze(x).expect("analysis dimension mismatch")
    }

    fn norm_bound(&self) -> f64 {
        self.0.alpha().sqrt()
    }
}
