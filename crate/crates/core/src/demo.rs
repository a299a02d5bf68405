//! Bundled 4x2 tight frame (alpha = 2) used by the phi demo command and by
//! several cross-checks. Small enough that every operator identity can be
//! verified against explicit matrix arithmetic.

use crate::frames::Frame;

/// Row-major entries of the demo analysis matrix, printed to four decimals.
pub const DEMO_4X2: [f64; 8] = [
    0.7464, 0.0444, //
    0.1588, 0.9127, //
    -0.9348, 0.7795, //
    -0.7375, -0.7466,
];

/// Demo frame built from the four-decimal entries verbatim. Tight only to
/// print precision, so construction uses a 1e-3 tolerance.
pub fn demo_frame() -> Frame {
    Frame::explicit_with_tolerance(4, 2, DEMO_4X2.to_vec(), 1e-3)
        .expect("demo matrix is tight within print precision")
}

/// Demo frame snapped to the nearest exactly tight matrix via symmetric
/// orthogonalization (iterated to machine precision). Use where identities
/// must hold exactly (non-expansiveness sampling, g = 0 fixed points).
pub fn demo_frame_exact() -> Frame {
    let mut a = DEMO_4X2;
    let alpha_sqrt = 2.0f64.sqrt();
    for _ in 0..3 {
        let g11 = (0..4).map(|r| a[2 * r] * a[2 * r]).sum::<f64>();
        let g22 = (0..4).map(|r| a[2 * r + 1] * a[2 * r + 1]).sum::<f64>();
        let g12 = (0..4).map(|r| a[2 * r] * a[2 * r + 1]).sum::<f64>();
        let inv_sqrt = sym2_inv_sqrt(g11, g12, g22);
        let mut snapped = [0.0f64; 8];
        for r in 0..4 {
            for c in 0..2 {
                snapped[2 * r + c] = alpha_sqrt
                    * (a[2 * r] * inv_sqrt[c] + a[2 * r + 1] * inv_sqrt[2 + c]);
            }
        }
        a = snapped;
    }
    Frame::explicit(4, 2, a.to_vec()).expect("snapped matrix is exactly tight")
}

/// Inverse square root of a symmetric positive definite 2x2 matrix.
fn sym2_inv_sqrt(a: f64, b: f64, c: f64) -> [f64; 4] {
    let half_trace = 0.5 * (a + c);
    // Cancellation-free discriminant.
    let half_gap = 0.5 * (a - c);
    let disc = (half_gap * half_gap + b * b).sqrt();
    let l1 = half_trace + disc;
    let l2 = half_trace - disc;
    // Eigenvector for l1, from whichever row gives the larger residual.
    let e1 = disc - half_gap; // l1 - a
    let e2 = disc + half_gap; // l1 - c
    let (v1, v2) = if disc <= 0.0 {
        (1.0, 0.0)
    } else if e2 >= e1 {
        let norm = (e2 * e2 + b * b).sqrt();
        (e2 / norm, b / norm)
    } else {
        let norm = (b * b + e1 * e1).sqrt();
        (b / norm, e1 / norm)
    };
    let (w1, w2) = (-v2, v1);
    let s1 = 1.0 / l1.sqrt();
    let s2 = 1.0 / l2.sqrt();
    [
        s1 * v1 * v1 + s2 * w1 * w1,
        s1 * v1 * v2 + s2 * w1 * w2,
        s1 * v1 * v2 + s2 * w1 * w2,
        s1 * v2 * v2 + s2 * w2 * w2,
    ]
}
