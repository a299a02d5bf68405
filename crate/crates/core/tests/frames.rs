//! Frame construction and operator invariants: tightness, adjointness,
//! range projection, and the bundled demo matrix.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsig::demo::{demo_frame, demo_frame_exact, DEMO_4X2};
use sparsig::vector::Vector;
use sparsig::{Error, Frame};

fn seeded_signal(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn seeded_coeffs(m: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..m)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Frames whose tightness must hold to machine precision.
fn exact_frames() -> Vec<Frame> {
    vec![
        demo_frame_exact(),
        Frame::dct(64).unwrap(),
        Frame::gabor(64, 16, 128, 1024).unwrap(),
    ]
}

#[test]
fn explicit_identity_has_alpha_one() {
    let f = Frame::explicit(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!((f.alpha() - 1.0).abs() < 1e-14);
    assert_eq!(f.m(), 2);
    assert_eq!(f.n(), 2);
}

#[test]
fn explicit_scaled_orthogonal_columns_have_alpha_three() {
    // sqrt(3) * Q for Q the first 5 columns of a seeded random orthogonal
    // 8x8 matrix: alpha must come out as 3.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < 5 {
        let mut v = seeded_signal(8, &mut rng);
        for c in &cols {
            let coef = v.dot(c);
            v.axpy(-coef, c);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v.scale(1.0 / norm);
            cols.push(v);
        }
    }
    let mut entries = vec![0.0; 8 * 5];
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            entries[i * 5 + j] = 3.0f64.sqrt() * v;
        }
    }
    let f = Frame::explicit(8, 5, entries).unwrap();
    assert!((f.alpha() - 3.0).abs() < 1e-10, "alpha = {}", f.alpha());
}

#[test]
fn explicit_rejects_non_tight_and_wrong_shape() {
    assert!(matches!(
        Frame::explicit(2, 2, vec![1.0, 0.5, 0.0, 1.0]),
        Err(Error::NotTight(_))
    ));
    assert!(matches!(
        Frame::explicit(1, 2, vec![1.0, 0.0]),
        Err(Error::Dimension(_))
    ));
    // The four-decimal demo matrix is tight only to print precision:
    // rejected at the default tolerance, accepted at 1e-3.
    assert!(matches!(
        Frame::explicit(4, 2, DEMO_4X2.to_vec()),
        Err(Error::NotTight(_))
    ));
    assert!((demo_frame().alpha() - 2.0).abs() < 1e-3);
}

#[test]
fn explicit_csv_round_trip() {
    let mut text = String::from("4,2\n");
    for row in DEMO_4X2.chunks(2) {
        text.push_str(&format!("{},{}\n", row[0], row[1]));
    }
    // Default tolerance rejects the printed matrix; a machine-tight one loads.
    let err = Frame::explicit_from_csv_reader(std::io::Cursor::new(text));
    assert!(matches!(err, Err(Error::NotTight(_))));

    let exact = demo_frame_exact().real_matrix().unwrap();
    let mut text = String::from("4,2\n");
    for row in exact.chunks(2) {
        text.push_str(&format!("{:.17e},{:.17e}\n", row[0], row[1]));
    }
    let f = Frame::explicit_from_csv_reader(std::io::Cursor::new(text)).unwrap();
    assert!((f.alpha() - 2.0).abs() < 1e-12);
}

#[test]
fn gabor_desk_parameters() {
    let f = Frame::gabor(64, 16, 128, 1024).unwrap();
    assert_eq!(f.m(), 128 * 1024 / 16);
    assert!((f.alpha() - 1.0).abs() < 1e-14);
}

#[test]
fn gabor_tightness_on_seeded_signals() {
    let f = Frame::gabor(64, 16, 128, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let x = seeded_signal(1024, &mut rng);
        let z = f.analyze(&x).unwrap();
        let back = f.synthesize(&z).unwrap();
        let err = back.dist(&x);
        assert!(err <= 1e-10 * x.norm(), "residual {err}");
    }
}

#[test]
fn gabor_full_length_window_is_unitary() {
    // Single full-length window with hop = length: after tight
    // normalization the system acts like a unitary transform.
    let f = Frame::gabor(8, 8, 8, 8).unwrap();
    assert_eq!(f.m(), 8);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = seeded_signal(8, &mut rng);
    let back = f.synthesize(&f.analyze(&x).unwrap()).unwrap();
    assert!(back.dist(&x) < 1e-12);
}

#[test]
fn gabor_rejects_bad_parameters() {
    assert!(matches!(
        Frame::gabor(64, 16, 32, 1024),
        Err(Error::PainlessViolation { .. })
    ));
    assert!(matches!(
        Frame::gabor(64, 15, 128, 1024),
        Err(Error::Dimension(_))
    ));
    assert!(matches!(
        Frame::gabor(2048, 16, 4096, 1024),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn gabor_full_scale_construction() {
    // Window 1024, hop 160, 3125 channels: the full-scale configuration.
    // Valid lengths are multiples of lcm(hop, channels) = 100000.
    let sig_len = 100_000;
    let f = Frame::gabor(1024, 160, 3125, sig_len).unwrap();
    assert_eq!(f.m(), 3125 * (sig_len / 160));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = seeded_signal(sig_len, &mut rng);
    let back = f.synthesize(&f.analyze(&x).unwrap()).unwrap();
    assert!(back.dist(&x) <= 1e-10 * x.norm());
}

#[test]
fn dct_trivial_and_orthonormal() {
    let f = Frame::dct(1).unwrap();
    let z = f.analyze(&[2.5]).unwrap();
    assert!((z[0].re - 2.5).abs() < 1e-15);

    // n = 8: materialize A and check A^T A = Id to machine precision.
    let f = Frame::dct(8).unwrap();
    let mut cols = Vec::new();
    for j in 0..8 {
        let mut e = vec![0.0; 8];
        e[j] = 1.0;
        cols.push(f.analyze(&e).unwrap());
    }
    for i in 0..8 {
        for j in 0..8 {
            let dot: f64 = (0..8).map(|k| cols[i][k].re * cols[j][k].re).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((dot - expected).abs() < 1e-12, "gram ({i},{j}) = {dot}");
        }
    }
}

#[test]
fn dct_first_basis_vector_matches_cosine_column() {
    let n = 8;
    let f = Frame::dct(n).unwrap();
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    let z = f.analyze(&e).unwrap();
    for (k, v) in z.iter().enumerate() {
        let w = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        let expected = w * (std::f64::consts::PI * k as f64 * 1.0 / (2.0 * n as f64)).cos();
        assert!((v.re - expected).abs() < 1e-13, "k={k}: {} vs {expected}", v.re);
        assert!(v.im.abs() < 1e-15);
    }
}

#[test]
fn dct_round_trip_is_identity() {
    let f = Frame::dct(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = seeded_signal(64, &mut rng);
    let back = f.synthesize(&f.analyze(&x).unwrap()).unwrap();
    assert!(back.dist(&x) < 1e-12);
}

#[test]
fn analyze_zero_gives_zero_and_demo_column() {
    let f = demo_frame();
    let z = f.analyze(&[0.0, 0.0]).unwrap();
    assert!(z.iter().all(|v| v.norm() == 0.0));
    let z = f.analyze(&[1.0, 0.0]).unwrap();
    for (i, v) in z.iter().enumerate() {
        assert!((v.re - DEMO_4X2[2 * i]).abs() < 1e-15);
    }
}

#[test]
fn tightness_invariant_over_seeded_signals() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for frame in exact_frames() {
        for _ in 0..100 {
            let x = seeded_signal(frame.n(), &mut rng);
            let z = frame.analyze(&x).unwrap();
            let lhs = z.norm_sq();
            let rhs = frame.alpha() * x.norm_sq();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs.max(1e-30),
                "{:?}: |Ax|^2 = {lhs}, alpha |x|^2 = {rhs}",
                frame.kind()
            );
        }
    }
}

#[test]
fn adjointness_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for frame in exact_frames() {
        for _ in 0..50 {
            let x = seeded_signal(frame.n(), &mut rng);
            let y = seeded_coeffs(frame.m(), &mut rng);
            let lhs = frame.analyze(&x).unwrap().dot(&y);
            let rhs = x.dot(&frame.synthesize(&y).unwrap());
            assert!(
                (lhs - rhs).abs() <= 1e-10 * x.norm() * y.norm(),
                "{:?}: <Ax,y> = {lhs} vs <x,A*y> = {rhs}",
                frame.kind()
            );
        }
    }
}

#[test]
fn project_range_fixes_analysis_vectors_and_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for frame in exact_frames() {
        let x = seeded_signal(frame.n(), &mut rng);
        let ax = frame.analyze(&x).unwrap();
        let proj = frame.project_range(&ax).unwrap();
        assert!(proj.dist(&ax) <= 1e-10 * ax.norm(), "{:?}", frame.kind());

        let z = seeded_coeffs(frame.m(), &mut rng);
        let p1 = frame.project_range(&z).unwrap();
        let p2 = frame.project_range(&p1).unwrap();
        assert!(p2.dist(&p1) <= 1e-10 * p1.norm().max(1e-30));
    }
}

#[test]
fn project_range_on_unitary_frame_is_identity() {
    let f = Frame::dct(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let z = seeded_coeffs(16, &mut rng);
    let p = f.project_range(&z).unwrap();
    assert!(p.dist(&z) < 1e-12);
}

#[test]
fn project_range_demo_matches_explicit_product() {
    // alpha^-1 A A^T e_1 computed by hand from the printed entries.
    let f = demo_frame();
    let mut z = vec![Complex64::new(0.0, 0.0); 4];
    z[0] = Complex64::new(1.0, 0.0);
    let p = f.project_range(&z).unwrap();
    let a = DEMO_4X2;
    let alpha = f.alpha();
    for i in 0..4 {
        let expected = (a[2 * i] * a[0] + a[2 * i + 1] * a[1]) / alpha;
        assert!(
            (p[i].re - expected).abs() < 1e-12,
            "row {i}: {} vs {expected}",
            p[i].re
        );
        assert!(p[i].im.abs() < 1e-15);
    }
}
