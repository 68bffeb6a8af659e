use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_vec(2, 2, vec![a, b, c, d])
}

#[test]
fn spectral_norm_of_benchmark_linearization() {
    let a = m2(1.0, 2.0, -1.0, 3.0);
    let norm = spectral_norm(&a).unwrap();
    assert!((norm - 3.6180).abs() < 5e-4, "got {norm}");
}

#[test]
fn spectral_norm_identity_and_zero() {
    for n in 1..=6 {
        assert_relative_eq!(spectral_norm(&Matrix::identity(n)).unwrap(), 1.0, epsilon = 1e-14);
    }
    assert_eq!(spectral_norm(&Matrix::zeros(3, 3)).unwrap(), 0.0);
}

#[test]
fn spectral_norm_rejects_non_finite() {
    let mut a = Matrix::zeros(2, 2);
    a.set(0, 0, f64::NAN);
    assert_eq!(spectral_norm(&a), Err(LinalgError::NonFinite));
}

#[test]
fn eigen_of_diagonal_is_exact() {
    let a = Matrix::diagonal(&[-11.0, -10.0]);
    let s = eigen(&a).unwrap();
    assert!(s.distinct);
    assert_eq!(s.values[0], Complex64::new(-11.0, 0.0));
    assert_eq!(s.values[1], Complex64::new(-10.0, 0.0));
    let p = s.vectors.as_ref().unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(p.get(i, j), Complex64::new(expect, 0.0));
        }
    }
    assert_eq!(eigvec_condition(&s).unwrap(), 1.0);
}

#[test]
fn eigen_of_nilpotent_reports_repeated() {
    let a = m2(0.0, 1.0, 0.0, 0.0);
    let s = eigen(&a).unwrap();
    assert!(!s.distinct);
    assert!(s.vectors.is_none());
    assert_eq!(s.values[0], Complex64::new(0.0, 0.0));
    assert_eq!(s.values[1], Complex64::new(0.0, 0.0));
    assert_eq!(eigvec_condition(&s), Err(LinalgError::RepeatedEigenvalues));
}

/// Independent root oracle for symmetric 3x3: solves the characteristic
/// cubic directly (the implementation path under test is Jacobi).
fn cubic_roots_sym3(s: &Matrix) -> Vec<f64> {
    let (a, b, c) = (s.get(0, 0), s.get(1, 1), s.get(2, 2));
    let (d, e, f) = (s.get(0, 1), s.get(0, 2), s.get(1, 2));
    // chi(l) = l^3 - tr l^2 + m2 l - det = 0
    let tr = a + b + c;
    let m2c = (a * b - d * d) + (a * c - e * e) + (b * c - f * f);
    let det = a * (b * c - f * f) - d * (d * c - f * e) + e * (d * f - b * e);
    // depressed cubic t^3 + pt + q with l = t + tr/3
    let p = m2c - tr * tr / 3.0;
    let q = -2.0 * tr.powi(3) / 27.0 + tr * m2c / 3.0 - det;
    let shift = tr / 3.0;
    if p.abs() < 1e-300 {
        let r = -q.signum() * q.abs().cbrt();
        return vec![r + shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots: Vec<f64> = (0..3)
        .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
        .collect();
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

#[test]
fn eigen_random_symmetric_matches_cubic_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let (a, b, c) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (d, e, f) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let s = Matrix::from_vec(3, 3, vec![a, d, e, d, b, f, e, f, c]);
        let spectrum = eigen(&s).unwrap();
        let roots = cubic_roots_sym3(&s);
        let scale = spectral_norm(&s).unwrap().max(1.0);
        for (lam, root) in spectrum.values.iter().zip(&roots) {
            assert!(lam.im == 0.0);
            assert!(
                (lam.re - root).abs() <= 1e-8 * scale,
                "eigenvalue {} vs oracle {root}",
                lam.re
            );
        }
    }
}

#[test]
fn controllability_matrix_examples() {
    // cascade benchmark pair
    let a = m2(0.0, 1.0, 0.0, 0.0);
    let b = Matrix::from_vec(2, 1, vec![0.0, 1.0]);
    let ctrb = controllability_matrix(&a, &b).unwrap();
    assert_eq!(ctrb, m2(0.0, 1.0, 1.0, 0.0));
    assert_eq!(rank(&ctrb, RANK_TOL_REL).unwrap(), 2);

    // B = identity gives [I, A], always full rank
    let a = m2(1.0, 2.0, -1.0, 3.0);
    let ctrb = controllability_matrix(&a, &Matrix::identity(2)).unwrap();
    assert_eq!(ctrb, Matrix::from_vec(2, 4, vec![1.0, 0.0, 1.0, 2.0, 0.0, 1.0, -1.0, 3.0]));
    assert_eq!(rank(&ctrb, RANK_TOL_REL).unwrap(), 2);

    // A = 0 with a single column reaches only one direction
    let a = Matrix::zeros(2, 2);
    let b = Matrix::from_vec(2, 1, vec![1.0, 0.0]);
    let ctrb = controllability_matrix(&a, &b).unwrap();
    assert_eq!(ctrb, m2(1.0, 0.0, 0.0, 0.0));
    assert_eq!(rank(&ctrb, RANK_TOL_REL).unwrap(), 1);
}

#[test]
fn controllability_matrix_dimension_mismatch() {
    let a = Matrix::identity(2);
    let b = Matrix::from_vec(3, 1, vec![1.0, 0.0, 0.0]);
    assert!(matches!(controllability_matrix(&a, &b), Err(LinalgError::DimensionMismatch(_))));
}

#[test]
fn rank_examples() {
    assert_eq!(rank(&Matrix::zeros(3, 2), RANK_TOL_REL).unwrap(), 0);
    let near_singular = m2(1.0, 1.0, 1.0, 1.0 + 1e-14);
    assert_eq!(rank(&near_singular, RANK_TOL_REL).unwrap(), 1);
}

#[test]
fn eigvec_condition_examples() {
    // orthogonal P is an isometry
    let th = 0.7f64;
    let rot = m2(th.cos(), -th.sin(), th.sin(), th.cos());
    let k = complex_condition(&CMatrix::from_real(&rot)).unwrap();
    assert!(k >= 1.0);
    assert_relative_eq!(k, 1.0, epsilon = 1e-10);

    // shear [[1,1],[0,1]] has condition (3+sqrt(5))/2
    let shear = m2(1.0, 1.0, 0.0, 1.0);
    let k = complex_condition(&CMatrix::from_real(&shear)).unwrap();
    assert_relative_eq!(k, (3.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-12);
}

#[test]
fn determinant_and_solve() {
    let a = m2(2.0, 1.0, 1.0, 3.0);
    assert_relative_eq!(determinant(&a).unwrap(), 5.0, epsilon = 1e-14);
    let lu = Lu::factor(&a).unwrap();
    let x = lu.solve_vec(&[3.0, 5.0]);
    assert_relative_eq!(2.0 * x[0] + x[1], 3.0, epsilon = 1e-12);
    assert_relative_eq!(x[0] + 3.0 * x[1], 5.0, epsilon = 1e-12);
    assert_relative_eq!(determinant(&m2(1.0, 2.0, 2.0, 4.0)).unwrap(), 0.0, epsilon = 1e-12);
}

fn random_matrix(rng: &mut StdRng, n: usize) -> Matrix {
    Matrix::from_vec(n, n, (0..n * n).map(|_| rng.gen_range(-3.0..3.0)).collect())
}

#[test]
fn eigen_residuals_for_random_matrices() {
    let mut rng = StdRng::seed_from_u64(42);
    let mut checked = 0;
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let a = random_matrix(&mut rng, n);
        let s = eigen(&a).unwrap();
        let Some(p) = &s.vectors else { continue };
        let anorm = spectral_norm(&a).unwrap();
        let ac = CMatrix::from_real(&a);
        let av = ac.mul(p).unwrap();
        for (j, lam) in s.values.iter().enumerate() {
            let mut resid = 0.0f64;
            for i in 0..n {
                resid += (av.get(i, j) - lam * p.get(i, j)).norm_sqr();
            }
            let resid = resid.sqrt();
            assert!(resid <= 1e-8 * anorm.max(1e-30), "residual {resid} vs norm {anorm}");
        }
        checked += 1;
    }
    assert!(checked > 200, "too few distinct-spectrum samples: {checked}");
}

#[test]
fn rank_is_feedback_invariant() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=n);
        let a = random_matrix(&mut rng, n);
        let b = Matrix::from_vec(n, m, (0..n * m).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let k = Matrix::from_vec(m, n, (0..m * n).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let acl = a.add(&b.mul(&k).unwrap()).unwrap();
        let r1 = rank(&controllability_matrix(&a, &b).unwrap(), RANK_TOL_REL).unwrap();
        let r2 = rank(&controllability_matrix(&acl, &b).unwrap(), RANK_TOL_REL).unwrap();
        assert_eq!(r1, r2);
    }
}

proptest! {
    #[test]
    fn spectral_norm_is_submultiplicative(
        a in proptest::collection::vec(-10.0f64..10.0, 9),
        b in proptest::collection::vec(-10.0f64..10.0, 9),
    ) {
        let a = Matrix::from_vec(3, 3, a);
        let b = Matrix::from_vec(3, 3, b);
        let ab = a.mul(&b).unwrap();
        let na = spectral_norm(&a).unwrap();
        let nb = spectral_norm(&b).unwrap();
        let nab = spectral_norm(&ab).unwrap();
        prop_assert!(nab <= na * nb * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn spectral_norm_matches_transpose(
        data in proptest::collection::vec(-10.0f64..10.0, 12),
    ) {
        let a = Matrix::from_vec(3, 4, data);
        let na = spectral_norm(&a).unwrap();
        let nat = spectral_norm(&a.transpose()).unwrap();
        prop_assert!((na - nat).abs() <= 1e-10 * na.max(1.0));
    }

    #[test]
    fn eigvec_condition_at_least_one(
        data in proptest::collection::vec(-5.0f64..5.0, 16),
    ) {
        let p = Matrix::from_vec(4, 4, data);
        if let Ok(k) = complex_condition(&CMatrix::from_real(&p)) {
            prop_assert!(k >= 1.0);
        }
    }
}
