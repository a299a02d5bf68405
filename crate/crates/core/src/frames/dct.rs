//! Orthonormal type-II DCT as a unitary frame (m = n, alpha = 1).

use std::sync::Arc;

use num_complex::Complex64;
use rustdct::{DctPlanner, TransformType2And3};

#[derive(Clone)]
pub(crate) struct DctKernel {
    pub n: usize,
    dct2: Arc<dyn TransformType2And3<f64>>,
    dct3: Arc<dyn TransformType2And3<f64>>,
}

impl DctKernel {
    pub fn new(n: usize) -> Self {
        let mut planner = DctPlanner::new();
        DctKernel {
            n,
            dct2: planner.plan_dct2(n),
            dct3: planner.plan_dct3(n),
        }
    }

    /// Orthonormal DCT-II of a real vector.
    pub fn forward_real(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf = x.to_vec();
        let mut scratch = vec![0.0; self.dct2.get_scratch_len()];
        self.dct2.process_dct2_with_scratch(&mut buf, &mut scratch);
        let s = (2.0 / n as f64).sqrt();
        buf[0] *= (1.0 / n as f64).sqrt();
        for v in buf.iter_mut().skip(1) {
            *v *= s;
        }
        buf
    }

    /// Inverse (= transpose) of the orthonormal DCT-II.
    pub fn inverse_real(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Undo the orthonormal scaling, then DCT-III with its half-weighted
        // first sample convention.
        let mut buf = y.to_vec();
        let s = (2.0 / n as f64).sqrt();
        buf[0] *= 2.0 * (1.0 / n as f64).sqrt();
        for v in buf.iter_mut().skip(1) {
            *v *= s;
        }
        let mut scratch = vec![0.0; self.dct3.get_scratch_len()];
        self.dct3.process_dct3_with_scratch(&mut buf, &mut scratch);
        buf
    }

    fn split(z: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        (
            z.iter().map(|v| v.re).collect(),
            z.iter().map(|v| v.im).collect(),
        )
    }

    fn join(re: &[f64], im: &[f64]) -> Vec<Complex64> {
        re.iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }

    /// Complex-linear extension (the matrix is real, so the transform acts
    /// on real and imaginary parts independently).
    pub fn analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (re, im) = Self::split(x);
        Self::join(&self.forward_real(&re), &self.forward_real(&im))
    }

    pub fn synthesize(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (re, im) = Self::split(z);
        Self::join(&self.inverse_real(&re), &self.inverse_real(&im))
    }
}
