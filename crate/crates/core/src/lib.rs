//! Sparse signal restoration with tight frames.
//!
//! The crate provides:
//!
//! - [`frames`]: tight-frame analysis/synthesis operators (explicit
//!   matrices, painless Gabor, orthonormal DCT) and the range projection;
//! - [`proxcalc`]: proximal operators, including the exact composition
//!   formulas for semi-orthogonal and tight-frame-analysis operators and the
//!   cheap approximal substitute for the latter;
//! - [`solvers`]: Douglas-Rachford, Chambolle-Pock, ISTA/FISTA, and FISTA
//!   with a nested exact analysis prox;
//! - [`inpaint`]: audio-inpainting degradation, the four problem
//!   formulations, solver dispatch, and SNR evaluation;
//! - [`oracle`]: brute-force reference minimizers and property checkers the
//!   test suites validate everything against.

pub mod demo;
pub mod error;
pub mod frames;
pub mod inpaint;
pub mod oracle;
pub mod proxcalc;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
pub use frames::{AnalysisOp, Coefficients, Frame, FrameKind, Signal, SynthesisOp};
pub use inpaint::{
    degrade, snr, solve, AnalysisProxMode, Formulation, InpaintTask, Mask, SolveReport,
};
pub use proxcalc::{
    approximal, prox_analysis_exact, prox_semiorthogonal, soft_threshold, InnerSolveConfig,
    Prox, ProxMapping,
};
pub use solvers::{
    chambolle_pock, douglas_rachford, fista, fista_nested_analysis, CpParams, SmoothTerm,
    StopCriteria, Termination, Trace,
};
pub use vector::{LinearOp, MatrixOp, Vector};
