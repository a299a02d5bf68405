//! Real inner-product space operations shared by the solvers.
//!
//! Complex coefficient vectors are treated as real vector spaces of twice
//! the dimension: the inner product is `Re(y^H x)`. Under this convention
//! every formula of convex analysis used in the crate (adjoints, Moreau
//! decomposition, non-expansiveness) holds verbatim for both scalar fields.

use num_complex::Complex64;

/// Element of a real inner-product space. Implemented for `Vec<f64>`
/// (time-domain signals) and `Vec<Complex64>` (frame coefficients).
pub trait Vector: Clone + Send + Sync {
    /// Real dimension of the space the vector lives in.
    fn real_dim(&self) -> usize;

    fn zeros_like(&self) -> Self;

    /// Real inner product; `Re(other^H self)` in the complex case.
    fn dot(&self, other: &Self) -> f64;

    /// `self += a * other`
    fn axpy(&mut self, a: f64, other: &Self);

    fn scale(&mut self, a: f64);

    fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self - other`
    fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `self + other`
    fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    fn dist(&self, other: &Self) -> f64 {
        self.minus(other).norm()
    }
}

impl Vector for Vec<f64> {
    fn real_dim(&self) -> usize {
        self.len()
    }

    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (s, o) in self.iter_mut().zip(other) {
            *s += a * o;
        }
    }

    fn scale(&mut self, a: f64) {
        for s in self.iter_mut() {
            *s *= a;
        }
    }
}

impl Vector for Vec<Complex64> {
    fn real_dim(&self) -> usize {
        2 * self.len()
    }

    fn zeros_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }

    fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (s, o) in self.iter_mut().zip(other) {
            *s += a * o;
        }
    }

    fn scale(&mut self, a: f64) {
        for s in self.iter_mut() {
            *s *= a;
        }
    }
}

/// Linear operator between two spaces together with its adjoint (with
/// respect to the real inner products) and a bound on the operator norm.
pub trait LinearOp<X: Vector, Y: Vector>: Send + Sync {
    fn apply(&self, x: &X) -> Y;
    fn adjoint(&self, y: &Y) -> X;
    /// Upper bound on the operator norm, used for step-size conditions.
    fn norm_bound(&self) -> f64;
}

/// Dense real matrix acting on `Vec<f64>`, row-major storage.
pub struct MatrixOp {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries, `rows * cols` of them.
    pub entries: Vec<f64>,
    norm_bound: f64,
}

impl MatrixOp {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        // Frobenius norm bounds the spectral norm.
        let frob = entries.iter().map(|e| e * e).sum::<f64>().sqrt();
        MatrixOp {
            rows,
            cols,
            entries,
            norm_bound: frob,
        }
    }

    pub fn with_norm_bound(mut self, bound: f64) -> Self {
        self.norm_bound = bound;
        self
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

impl LinearOp<Vec<f64>, Vec<f64>> for MatrixOp {
    fn apply(&self, x: &Vec<f64>) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matrix apply: wrong input length");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn adjoint(&self, y: &Vec<f64>) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matrix adjoint: wrong input length");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}
