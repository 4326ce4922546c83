//! Property tests for the numeric kernels and estimator invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use scatter::ces::{sample_coupled_batch, CESModel, RngStream};
use scatter::estimators::{m_estimate, WeightKind, WeightSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use scatter::mahalanobis::mahalanobis_sq;
use scatter::numkit::{
    commutation_matrix, hermitian_inverse_solve, reg_incomplete_gamma_p, toeplitz_scatter, vectorize,
    ComplexMatrix, ComplexVector, HermitianMatrix,
};

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_entry(), rows * cols).prop_map(move |data| {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, data[i * cols + j]);
            }
        }
        m
    })
}

/// Random PD Hermitian built as A A^H + (dim) I.
fn pd_matrix(dim: usize) -> impl Strategy<Value = HermitianMatrix> {
    complex_matrix(dim, dim).prop_map(move |a| {
        let mut gram = &a * &a.adjoint();
        for i in 0..dim {
            let v = gram.get(i, i) + Complex64::new(dim as f64, 0.0);
            gram.set(i, i, v);
        }
        HermitianMatrix::from_matrix(&gram).expect("Gram matrix is Hermitian")
    })
}

proptest! {
    #[test]
    fn commutation_is_exact_permutation(a in complex_matrix(3, 3)) {
        let k = commutation_matrix(3, 3);
        let lhs = k.mul_vector(&vectorize(&a));
        let rhs = vectorize(&a.transpose());
        // A permutation of entries: exact equality, no arithmetic error.
        prop_assert_eq!(lhs.as_slice(), rhs.as_slice());
    }

    #[test]
    fn toeplitz_is_positive_definite(rho in 0.0f64..0.999, m in 1usize..25) {
        prop_assert!(toeplitz_scatter(rho, m).unwrap().is_positive_definite());
    }

    #[test]
    fn hermitian_solve_residual_small(m in pd_matrix(6), b in complex_matrix(6, 2)) {
        let x = hermitian_inverse_solve(&m, &b).unwrap();
        let resid = (&(&m.as_matrix() * &x) - &b).frobenius_norm() / b.frobenius_norm().max(1e-300);
        prop_assert!(resid < 1e-10, "residual {}", resid);
    }

    #[test]
    fn incomplete_gamma_monotone(s in 0.1f64..150.0, x1 in 0.0f64..500.0, x2 in 0.0f64..500.0) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let p_lo = reg_incomplete_gamma_p(s, lo).unwrap();
        let p_hi = reg_incomplete_gamma_p(s, hi).unwrap();
        prop_assert!(p_hi >= p_lo - 1e-13);
        prop_assert_eq!(reg_incomplete_gamma_p(s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mahalanobis_scale_and_affine_invariance(
        m in pd_matrix(4),
        z_parts in proptest::collection::vec(complex_entry(), 4),
        b in complex_matrix(4, 4),
        alpha in 0.01f64..20.0,
    ) {
        let z = ComplexVector::from_vec(z_parts);
        let base = mahalanobis_sq(&z, &m).unwrap();

        // Real scaling of the point scales the squared distance quadratically.
        let scaled = mahalanobis_sq(&z.scaled(alpha), &m).unwrap();
        prop_assert!((scaled - alpha * alpha * base).abs() <= 1e-9 * (1.0 + scaled.abs()));

        // Affine change of coordinates: make B safely invertible first.
        let mut b = b;
        for i in 0..4 {
            let v = b.get(i, i) + Complex64::new(25.0, 0.0);
            b.set(i, i, v);
        }
        let bz = b.mul_vector(&z);
        // Symmetrize the congruence product before wrapping: the float
        // product is Hermitian only up to roundoff at these magnitudes.
        let prod = &(&b * &m.as_matrix()) * &b.adjoint();
        let sym = ComplexMatrix::from_fn(4, 4, |i, j| (prod.get(i, j) + prod.get(j, i).conj()) * 0.5);
        let bmb = HermitianMatrix::from_matrix(&sym).expect("symmetrized congruence");
        let transformed = mahalanobis_sq(&bz, &bmb).unwrap();
        prop_assert!(
            (transformed - base).abs() <= 1e-8 * (1.0 + base.abs()),
            "affine invariance violated: {} vs {}",
            transformed,
            base
        );
    }
}

#[test]
fn pseudo_covariance_of_z_vanishes() {
    // Circularity: the empirical pseudo-covariance of z tends to zero at
    // the sqrt(K) rate. The rate needs a finite texture second moment, so
    // the Student case uses nu = 6 (nu <= 4 has E[tau^2] = inf and
    // converges more slowly).
    let m = 4;
    let k = 40_000;
    for model in [CESModel::Gaussian, CESModel::StudentT { nu: 6.0 }] {
        let batch =
            sample_coupled_batch(&model, &HermitianMatrix::identity(m), k, RngStream::new(55)).unwrap();
        let mut pseudo = vec![Complex64::ZERO; m * m];
        for z in &batch.z {
            for i in 0..m {
                for j in 0..m {
                    pseudo[i * m + j] += z[i] * z[j];
                }
            }
        }
        let norm = pseudo
            .iter()
            .map(|c| (c / k as f64).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(norm < 4.0 / (k as f64).sqrt() * m as f64, "pseudo-covariance norm {norm}");
    }
}

#[test]
fn affine_equivariance_of_m_estimators() {
    let m = 4;
    let k = 400;
    let batch = sample_coupled_batch(
        &CESModel::StudentT { nu: 3.0 },
        &HermitianMatrix::identity(m),
        k,
        RngStream::new(91),
    )
    .unwrap();

    // Fixed well-conditioned invertible B.
    let b = ComplexMatrix::from_fn(m, m, |i, j| {
        let s = (i * m + j) as f64;
        Complex64::new((0.31 * s).cos(), (0.17 * s).sin()) + if i == j { Complex64::new(3.0, 0.0) } else { Complex64::ZERO }
    });
    let transformed: Vec<ComplexVector> = batch.z.iter().map(|z| b.mul_vector(z)).collect();

    for kind in [WeightKind::StudentT { nu: 3.0 }, WeightKind::Huber { q: 0.9 }] {
        let w = WeightSpec::new(kind, m).unwrap();
        let base = m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let trans = m_estimate(&transformed, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let expected = &(&b * &base.estimate.as_matrix()) * &b.adjoint();
        let dev = (&trans.estimate.as_matrix() - &expected).frobenius_norm() / expected.frobenius_norm();
        assert!(dev < 50.0 * DEFAULT_TOL, "{kind:?}: equivariance deviation {dev}");
    }

    // Tyler: equality up to a positive scalar; compare after trace
    // normalization of both sides.
    let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
    let base = m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let trans = m_estimate(&transformed, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let expected = HermitianMatrix::from_matrix(&(&(&b * &base.estimate.as_matrix()) * &b.adjoint()))
        .unwrap()
        .rescaled_to_trace(m as f64)
        .unwrap();
    let got = trans.estimate.rescaled_to_trace(m as f64).unwrap();
    let dev = (&got.as_matrix() - &expected.as_matrix()).frobenius_norm() / expected.frobenius_norm();
    assert!(dev < 50.0 * DEFAULT_TOL, "Tyler equivariance deviation {dev}");
}

#[test]
fn batch_determinism_across_calls() {
    let model = CESModel::GaussianOutlierMixture { nu: 2.0, contamination: 0.05 };
    let scatter = toeplitz_scatter(0.3, 5).unwrap();
    let s = RngStream::new(123).child(9);
    let a = sample_coupled_batch(&model, &scatter, 777, s).unwrap();
    let b = sample_coupled_batch(&model, &scatter, 777, s).unwrap();
    assert_eq!(a.textures, b.textures);
    assert_eq!(a.outlier_count, b.outlier_count);
    for (za, zb) in a.z.iter().zip(&b.z) {
        assert_eq!(za.as_slice(), zb.as_slice());
    }
}

#[test]
fn hermitian_solve_residual_at_dim_100() {
    let dim = 100;
    let a = ComplexMatrix::from_fn(dim, dim, |i, j| {
        let s = (i * dim + j) as f64;
        Complex64::new((0.11 * s).sin(), (0.07 * s + 1.0).cos())
    });
    let mut gram = &a * &a.adjoint();
    for i in 0..dim {
        let v = gram.get(i, i) + Complex64::new(dim as f64, 0.0);
        gram.set(i, i, v);
    }
    let herm = HermitianMatrix::from_matrix(&gram).unwrap();
    let b = ComplexMatrix::from_fn(dim, 4, |i, j| Complex64::new((i + 2 * j) as f64, (i as f64).sin()));
    let x = hermitian_inverse_solve(&herm, &b).unwrap();
    let resid = (&(&herm.as_matrix() * &x) - &b).frobenius_norm() / b.frobenius_norm();
    assert!(resid < 1e-10, "residual {resid}");
}
