//! Asymptotic covariance machinery for M-estimators centered on the
//! coupled Gaussian SCM.
//!
//! The structured covariance of `sqrt(K) vec(sigma M_hat - M_hat_SCM)` is
//! `Sigma = sigma_1 (M^T (x) M) + sigma_2 vec(M) vec(M)^H`, with the scalar
//! pair derived from three moments of the weight function,
//!
//! `a = E[psi^2(sigma t1)]`, `b = E[psi(sigma t1) t2]`,
//! `c = E[psi'(sigma t1) sigma t1] + m^2`,
//!
//! where `t2 ~ (1/2) chi^2_{2m}` and `t1 = tau t2` share the texture. The
//! same moments produce the true-scatter-centered coefficients
//! `(theta_1, theta_2)` and the cross-correlation pair `(gamma_1, gamma_2)`
//! tied together by `sigma_1 = theta_1 - 2 gamma_1 + 1` and
//! `sigma_2 = theta_2 - 2 gamma_2`.
//!
//! The `sigma_1` numerator uses the factor `a m (m+1)`: substituting
//! Tyler's moments `a = b = c = m^2` then yields `1/m` and Student's
//! moments yield `1/(m + nu/2)`, both matching the printed special cases
//! (the `m(m+2)` variant found in one derivation step fails both checks and
//! is treated as a typo).

use crate::ces::{modular_variate_distribution, CESModel, RngStream};
use crate::estimators::{solve_sigma, WeightKind, WeightSpec};
use crate::numkit::{commutation_matrix, kronecker, vectorize, ComplexMatrix, HermitianMatrix};
use crate::{Error, Result};


/// Where a coefficient set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffSource {
    ClosedForm,
    MonteCarlo { draws: usize, seed: u64 },
}

/// Scalar coefficient set for one estimator/model/dimension triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymCoeffs {
    pub m: usize,
    /// Consistency factor solving `E[psi(sigma t)] = m`.
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// True-scatter-centered coefficients.
    pub theta1: f64,
    pub theta2: f64,
    /// Cross-correlation coefficients between the estimator and the SCM.
    pub gamma1: f64,
    pub gamma2: f64,
    /// SCM-centered coefficients.
    pub sigma1: f64,
    pub sigma2: f64,
    pub source: CoeffSource,
}

impl AsymCoeffs {
    fn validate(&self) -> Result<()> {
        if self.theta1 <= 0.0 || self.theta1.is_nan() {
            return Err(Error::SingularCoefficient(format!("theta1 must be positive, got {}", self.theta1)));
        }
        // Tyler sits exactly on the theta2 = -theta1/m boundary.
        if self.theta2 < -self.theta1 / self.m as f64 - 1e-12 {
            return Err(Error::SingularCoefficient(format!(
                "theta2 = {} below -theta1/m = {}",
                self.theta2,
                -self.theta1 / self.m as f64
            )));
        }
        Ok(())
    }
}

/// Derive every coefficient from the raw moments via the generic formulas.
/// Fails when `c` is too close to `m^2` (there the generic `theta2/sigma2`
/// expressions are singular; Tyler takes its dedicated closed form).
fn derive_from_moments(
    m: usize,
    sigma: f64,
    a: f64,
    b: f64,
    c: f64,
    source: CoeffSource,
) -> Result<AsymCoeffs> {
    let mf = m as f64;
    let m2 = mf * mf;
    if (c - m2).abs() < 1e-9 * m2 {
        return Err(Error::SingularCoefficient(format!(
            "c = {c} is at the singular point m^2 = {m2}; use the Tyler special case"
        )));
    }
    let gamma1 = b / c;
    let gamma2 = mf * (b - c) / (c * (c - m2));
    let theta1 = a * mf * (mf + 1.0) / (c * c);
    let theta2 = (a - m2) / ((c - m2) * (c - m2)) - a * (mf + 1.0) / (c * c);
    let sigma1 = (a * mf * (mf + 1.0) + c * (c - 2.0 * b)) / (c * c);
    let sigma2 = theta2 - 2.0 * gamma2;
    let out = AsymCoeffs { m, sigma, a, b, c, theta1, theta2, gamma1, gamma2, sigma1, sigma2, source };
    out.validate()?;
    Ok(out)
}

/// Closed-form coefficients for the pairs that admit them: Tyler under any
/// CES model, the Student-t MLE on matching Student-t data, and the SCM on
/// Gaussian data. Huber has no closed form (its psi is not differentiable
/// everywhere); use [`coeffs_monte_carlo`].
pub fn coeffs_closed_form(w: &WeightSpec, model: &CESModel, m: usize) -> Result<AsymCoeffs> {
    if w.dim() != m {
        return Err(Error::DimensionMismatch("weight dimension differs from requested m".into()));
    }
    model.validate()?;
    let mf = m as f64;
    match (w.kind(), model) {
        (WeightKind::Tyler, _) => {
            // a = b = c = m^2; the generic theta2/sigma2 route is 0/0 here,
            // so the printed constants are used directly and gamma2 comes
            // from inverting sigma2 = theta2 - 2 gamma2.
            let m2 = mf * mf;
            let theta1 = (mf + 1.0) / mf;
            let theta2 = -(mf + 1.0) / m2;
            let sigma1 = 1.0 / mf;
            let sigma2 = (mf - 1.0) / m2;
            let gamma2 = (theta2 - sigma2) / 2.0;
            let out = AsymCoeffs {
                m,
                sigma: 1.0,
                a: m2,
                b: m2,
                c: m2,
                theta1,
                theta2,
                gamma1: 1.0,
                gamma2,
                sigma1,
                sigma2,
                source: CoeffSource::ClosedForm,
            };
            out.validate()?;
            Ok(out)
        }
        (WeightKind::StudentT { nu }, CESModel::StudentT { nu: nu_m }) if nu == *nu_m => {
            // a = b = c = m (m+1) (m + nu/2) / (m + 1 + nu/2), sigma = 1.
            let moment = mf * (mf + 1.0) * (mf + nu / 2.0) / (mf + 1.0 + nu / 2.0);
            derive_from_moments(m, 1.0, moment, moment, moment, CoeffSource::ClosedForm)
        }
        (WeightKind::Scm, CESModel::Gaussian) => {
            // psi(t) = t: a = b = E[t^2] = m^2 + m, c = E[t] + m^2 = m^2 + m.
            let moment = mf * mf + mf;
            derive_from_moments(m, 1.0, moment, moment, moment, CoeffSource::ClosedForm)
        }
        (WeightKind::Huber { .. }, _) => Err(Error::Unsupported(
            "no closed form for Huber (psi is not differentiable everywhere); use coeffs_monte_carlo".into(),
        )),
        _ => Err(Error::Unsupported(
            "closed forms exist only for Tyler/any model, Student MLE on matching Student data, and SCM on Gaussian data".into(),
        )),
    }
}

/// Monte Carlo coefficients: `sigma` from the fixed-seed solver, then the
/// moments `a`, `b`, `c` averaged over `n` coupled draws `(t1, t2)` with
/// `t2 ~ (1/2) chi^2_{2m}` and `t1 = tau t2`. The lone Huber kink point has
/// measure zero; draws landing exactly on it are skipped.
pub fn coeffs_monte_carlo(
    w: &WeightSpec,
    model: &CESModel,
    m: usize,
    n: usize,
    stream: RngStream,
) -> Result<AsymCoeffs> {
    if w.dim() != m {
        return Err(Error::DimensionMismatch("weight dimension differs from requested m".into()));
    }
    if n < 100 {
        return Err(Error::Parameter(format!("need at least 100 draws, got {n}")));
    }
    let sigma = match w.known_sigma(model) {
        Some(s) => s,
        None => solve_sigma(w, model, m, stream.child(1))?,
    };
    let mv = modular_variate_distribution(model, m)?;
    let mut rng = stream.child(2).rng();
    let mut acc_a = 0.0;
    let mut acc_b = 0.0;
    let mut acc_c = 0.0;
    let mut used = 0usize;
    for _ in 0..n {
        let (t1, t2) = mv.sample_coupled_with(&mut rng);
        let st1 = sigma * t1;
        let psi = w.psi(st1);
        let Some(dpsi) = w.psi_prime(st1) else { continue };
        acc_a += psi * psi;
        acc_b += psi * t2;
        acc_c += dpsi * st1;
        used += 1;
    }
    let nf = used as f64;
    let mf = m as f64;
    let a = acc_a / nf;
    let b = acc_b / nf;
    let c = acc_c / nf + mf * mf;
    let source = CoeffSource::MonteCarlo { draws: used, seed: stream.seed };
    if matches!(w.kind(), WeightKind::Tyler) {
        // psi' is identically zero, so c = m^2 exactly and the generic
        // theta2/gamma2/sigma2 route is 0/0; those take the dedicated
        // constants while sigma1/theta1/gamma1 keep the moment formulas.
        let m2 = mf * mf;
        let theta2 = -(mf + 1.0) / m2;
        let sigma2 = (mf - 1.0) / m2;
        let out = AsymCoeffs {
            m,
            sigma,
            a,
            b,
            c,
            theta1: a * mf * (mf + 1.0) / (c * c),
            theta2,
            gamma1: b / c,
            gamma2: (theta2 - sigma2) / 2.0,
            sigma1: (a * mf * (mf + 1.0) + c * (c - 2.0 * b)) / (c * c),
            sigma2,
            source,
        };
        out.validate()?;
        return Ok(out);
    }
    derive_from_moments(m, sigma, a, b, c, source)
}

/// The structured covariance pair built from a scatter matrix and a scalar
/// coefficient pair.
#[derive(Debug, Clone)]
pub struct StructuredCov {
    /// `c1 (M^T (x) M) + c2 vec(M) vec(M)^H`, size `m^2 x m^2`.
    pub sigma: ComplexMatrix,
    /// `c1 (M^T (x) M) K + c2 vec(M) vec(M)^T`, when requested.
    pub omega: Option<ComplexMatrix>,
    pub coeff_pair: (f64, f64),
    pub scatter: HermitianMatrix,
}

/// Materialize the structured covariance (and pseudo-covariance when
/// `pseudo` is set) as dense matrices.
pub fn build_structured_cov(scatter: &HermitianMatrix, c1: f64, c2: f64, pseudo: bool) -> StructuredCov {
    let m = scatter.dim();
    let mat = scatter.as_matrix();
    let kron = kronecker(&mat.transpose(), &mat);
    let v = vectorize(&mat);
    let n = m * m;
    let mut sigma = kron.scaled(c1);
    for i in 0..n {
        for j in 0..n {
            let upd = sigma.get(i, j) + v[i] * v[j].conj() * c2;
            sigma.set(i, j, upd);
        }
    }
    let omega = pseudo.then(|| {
        let mut om = &kron.scaled(c1) * &commutation_matrix(m, m);
        for i in 0..n {
            for j in 0..n {
                let upd = om.get(i, j) + v[i] * v[j] * c2;
                om.set(i, j, upd);
            }
        }
        om
    });
    StructuredCov { sigma, omega, coeff_pair: (c1, c2), scatter: scatter.clone() }
}

/// Empirical asymptotic covariance from trial pairs `(M_hat, M_ref)`:
/// `Sigma_emp = K * mean vec(D) vec(D)^H` with `D = M_hat - M_ref`, and the
/// transpose-in-place-of-adjoint analogue `Omega_emp`.
pub fn empirical_asymptotic_cov(
    trials: &[(HermitianMatrix, HermitianMatrix)],
    k: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if trials.len() < 2 {
        return Err(Error::Parameter(format!("need at least 2 trials, got {}", trials.len())));
    }
    let m = trials[0].0.dim();
    if trials.iter().any(|(a, b)| a.dim() != m || b.dim() != m) {
        return Err(Error::DimensionMismatch("all trials must share one dimension".into()));
    }
    let n = m * m;
    let mut sigma = ComplexMatrix::zeros(n, n);
    let mut omega = ComplexMatrix::zeros(n, n);
    for (mhat, mref) in trials {
        let d = vectorize(&(&mhat.as_matrix() - &mref.as_matrix()));
        let dv = d.as_slice();
        let sdata = sigma.data_mut();
        for i in 0..n {
            let di = dv[i];
            let row = &mut sdata[i * n..(i + 1) * n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot += di * dv[j].conj();
            }
        }
        let odata = omega.data_mut();
        for i in 0..n {
            let di = dv[i];
            let row = &mut odata[i * n..(i + 1) * n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot += di * dv[j];
            }
        }
    }
    let scale = k as f64 / trials.len() as f64;
    Ok((sigma.scaled(scale), omega.scaled(scale)))
}

/// Average the entries of an `m^2 x m^2` covariance over the three index
/// classes that are non-null when the scatter matrix is the identity:
/// `d1` on diagonal positions `p + m(p-1)`, `d2` on the remaining diagonal,
/// `d3` on off-diagonal positions pairing two `d1`-type indices.
/// `d2` is the quantity the dimension sweeps plot.
pub fn extract_identity_pattern(sigma: &ComplexMatrix, m: usize) -> (f64, f64, f64) {
    assert_eq!(sigma.rows(), m * m, "expected an m^2 x m^2 matrix");
    assert_eq!(sigma.cols(), m * m, "expected an m^2 x m^2 matrix");
    let diag_positions: Vec<usize> = (0..m).map(|p| p + m * p).collect();
    let is_diag_pos = |i: usize| i.is_multiple_of(m + 1);

    let mut d1 = 0.0;
    let mut d2 = 0.0;
    let mut n2 = 0usize;
    for i in 0..m * m {
        if is_diag_pos(i) {
            d1 += sigma.get(i, i).re;
        } else {
            d2 += sigma.get(i, i).re;
            n2 += 1;
        }
    }
    let mut d3 = 0.0;
    let mut n3 = 0usize;
    for &i in &diag_positions {
        for &j in &diag_positions {
            if i != j {
                d3 += sigma.get(i, j).re;
                n3 += 1;
            }
        }
    }
    (d1 / m as f64, d2 / n2.max(1) as f64, d3 / n3.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ces::sample_coupled_batch;
    use crate::estimators::scm;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn tyler_closed_form_m10() {
        let w = WeightSpec::new(WeightKind::Tyler, 10).unwrap();
        let c = coeffs_closed_form(&w, &CESModel::StudentT { nu: 2.0 }, 10).unwrap();
        assert_abs_diff_eq!(c.sigma1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.sigma2, 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(c.theta1, 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.theta2, -0.011 * 10.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.sigma1 + c.sigma2, 0.19, epsilon = 1e-15);
    }

    #[test]
    fn student_closed_form_nu2_m5() {
        let w = WeightSpec::new(WeightKind::StudentT { nu: 2.0 }, 5).unwrap();
        let c = coeffs_closed_form(&w, &CESModel::StudentT { nu: 2.0 }, 5).unwrap();
        assert_abs_diff_eq!(c.a, 180.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.b, 180.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c, 180.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sigma1, 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.sigma2, 7.0 / 6.0, epsilon = 1e-13);
    }

    #[test]
    fn student_large_nu_approaches_scm() {
        let w = WeightSpec::new(WeightKind::StudentT { nu: 1e6 }, 5).unwrap();
        let c = coeffs_closed_form(&w, &CESModel::StudentT { nu: 1e6 }, 5).unwrap();
        assert!(c.sigma1 < 1e-5, "sigma1 = {}", c.sigma1);
        assert!(c.sigma2 < 1e-5, "sigma2 = {}", c.sigma2);
    }

    #[test]
    fn scm_gaussian_closed_form() {
        let w = WeightSpec::new(WeightKind::Scm, 7).unwrap();
        let c = coeffs_closed_form(&w, &CESModel::Gaussian, 7).unwrap();
        assert_abs_diff_eq!(c.sigma1, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.sigma2, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.theta1, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.theta2, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn huber_closed_form_is_unsupported() {
        let w = WeightSpec::new(WeightKind::Huber { q: 0.95 }, 5).unwrap();
        assert!(matches!(
            coeffs_closed_form(&w, &CESModel::Gaussian, 5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn appendix_relations_hold() {
        for (w, model, m) in [
            (WeightSpec::new(WeightKind::Tyler, 10).unwrap(), CESModel::StudentT { nu: 2.0 }, 10usize),
            (WeightSpec::new(WeightKind::StudentT { nu: 4.0 }, 6).unwrap(), CESModel::StudentT { nu: 4.0 }, 6),
            (WeightSpec::new(WeightKind::Scm, 4).unwrap(), CESModel::Gaussian, 4),
        ] {
            let c = coeffs_closed_form(&w, &model, m).unwrap();
            assert_abs_diff_eq!(c.sigma1, c.theta1 - 2.0 * c.gamma1 + 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(c.sigma2, c.theta2 - 2.0 * c.gamma2, epsilon = 1e-10);
        }
    }

    #[test]
    fn monte_carlo_tyler_moments_near_m_squared() {
        // psi is the constant m: a and c are m^2 exactly, b within noise.
        let m = 5;
        let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        let mc = coeffs_monte_carlo(&w, &CESModel::StudentT { nu: 2.0 }, m, 100_000, RngStream::new(1))
            .unwrap();
        let m2 = (m * m) as f64;
        assert!((mc.a - m2).abs() / m2 < 0.005, "a = {}", mc.a);
        assert!((mc.b - m2).abs() / m2 < 0.005, "b = {}", mc.b);
        assert!((mc.c - m2).abs() / m2 < 0.005, "c = {}", mc.c);
        // The singular direction carries the dedicated constants.
        assert_abs_diff_eq!(mc.sigma2, (m as f64 - 1.0) / m2, epsilon = 1e-15);
        assert!((mc.sigma1 - 1.0 / m as f64).abs() < 0.01);
    }

    #[test]
    fn monte_carlo_student_matches_closed_form() {
        let m = 5;
        let nu = 2.0;
        let w = WeightSpec::new(WeightKind::StudentT { nu }, m).unwrap();
        let model = CESModel::StudentT { nu };
        let mc = coeffs_monte_carlo(&w, &model, m, 1_000_000, RngStream::new(77)).unwrap();
        let target = 180.0 / 7.0;
        assert!((mc.a - target).abs() / target < 0.01, "a = {}", mc.a);
        assert!((mc.b - target).abs() / target < 0.01, "b = {}", mc.b);
        assert!((mc.c - target).abs() / target < 0.01, "c = {}", mc.c);
        let cf = coeffs_closed_form(&w, &model, m).unwrap();
        assert!((mc.sigma1 - cf.sigma1).abs() < 0.01);
    }

    #[test]
    fn structured_cov_identity_cases() {
        // M = I2, (c1, c2) = (1, 0) gives the identity on C^{4x4}.
        let sc = build_structured_cov(&HermitianMatrix::identity(2), 1.0, 0.0, false);
        assert!((&sc.sigma - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-14);

        // Remark-pattern: exactly three distinct nonzero values at M = I.
        let m = 3;
        let (s1, s2) = (0.1, 0.09);
        let sc = build_structured_cov(&HermitianMatrix::identity(m), s1, s2, false);
        let (d1, d2, d3) = extract_identity_pattern(&sc.sigma, m);
        assert_abs_diff_eq!(d1, s1 + s2, epsilon = 1e-14);
        assert_abs_diff_eq!(d2, s1, epsilon = 1e-14);
        assert_abs_diff_eq!(d3, s2, epsilon = 1e-14);
        // Every entry outside the three classes is zero.
        let diag_pos: Vec<usize> = (0..m).map(|p| p + m * p).collect();
        for i in 0..m * m {
            for j in 0..m * m {
                let in_pattern = (i == j) || (diag_pos.contains(&i) && diag_pos.contains(&j));
                if !in_pattern {
                    assert!(sc.sigma.get(i, j).norm() < 1e-14, "({i},{j}) should be zero");
                }
            }
        }
    }

    #[test]
    fn omega_equals_sigma_times_commutation() {
        // Fixed Hermitian M (complex off-diagonals), m = 3.
        let mat = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.4), Complex64::new(-0.1, 0.2)],
            vec![Complex64::new(0.3, -0.4), Complex64::new(1.5, 0.0), Complex64::new(0.05, -0.3)],
            vec![Complex64::new(-0.1, -0.2), Complex64::new(0.05, 0.3), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        let herm = HermitianMatrix::from_matrix(&mat).unwrap();
        let sc = build_structured_cov(&herm, 0.37, 0.12, true);
        let omega = sc.omega.unwrap();
        let product = &sc.sigma * &commutation_matrix(3, 3);
        assert!((&omega - &product).frobenius_norm() < 1e-10);
    }

    #[test]
    fn structured_cov_is_psd_in_valid_region() {
        let m = 4;
        for (c1, c2) in [(1.0, 0.0), (0.25, 0.09), (0.5, -0.1)] {
            if c1 >= 0.0 && c1 + m as f64 * c2 >= 0.0 {
                let sc = build_structured_cov(&HermitianMatrix::identity(m), c1, c2, false);
                let h = HermitianMatrix::from_matrix(&sc.sigma).unwrap();
                // Shift by the allowed slack and require a Cholesky.
                let shifted = ComplexMatrix::from_fn(m * m, m * m, |i, j| {
                    h.get(i, j) + if i == j { Complex64::new(1e-10, 0.0) } else { Complex64::ZERO }
                });
                assert!(HermitianMatrix::from_matrix(&shifted).unwrap().is_positive_definite());
            }
        }
    }

    #[test]
    fn empirical_cov_zero_and_errors() {
        let id = HermitianMatrix::identity(3);
        let trials = vec![(id.clone(), id.clone()), (id.clone(), id.clone())];
        let (s, o) = empirical_asymptotic_cov(&trials, 100).unwrap();
        assert_eq!(s.frobenius_norm(), 0.0);
        assert_eq!(o.frobenius_norm(), 0.0);
        assert!(empirical_asymptotic_cov(&trials[..1], 100).is_err());
    }

    #[test]
    fn scm_trials_match_wishart_pattern() {
        // SCM on Gaussian data centered at the true scatter reproduces the
        // Wishart covariance pattern (sigma1, sigma2) = (1, 0) at M = I.
        let m = 5;
        let k = 200;
        let n_trials = 2000;
        let base = RngStream::new(404);
        let id = HermitianMatrix::identity(m);
        let mut trials = Vec::with_capacity(n_trials);
        for i in 0..n_trials {
            let batch = sample_coupled_batch(&CESModel::Gaussian, &id, k, base.child(i as u64)).unwrap();
            trials.push((scm(&batch.x).unwrap(), id.clone()));
        }
        let (sigma_emp, _) = empirical_asymptotic_cov(&trials, k).unwrap();
        let (d1, d2, d3) = extract_identity_pattern(&sigma_emp, m);
        assert!((d1 - 1.0).abs() < 0.1, "d1 = {d1}");
        assert!((d2 - 1.0).abs() < 0.05, "d2 = {d2}");
        assert!(d3.abs() < 0.05, "d3 = {d3}");
    }

    #[test]
    fn ordering_and_scale_properties() {
        // SCM-centered spread is far below true-scatter-centered spread, and
        // sigma1 scales like 1/m.
        for m in [3usize, 10, 30, 100] {
            let ty = coeffs_closed_form(
                &WeightSpec::new(WeightKind::Tyler, m).unwrap(),
                &CESModel::StudentT { nu: 2.0 },
                m,
            )
            .unwrap();
            assert!(ty.sigma1 < ty.theta1);
            assert!(ty.sigma1 + ty.sigma2 < ty.theta1 + ty.theta2 + 1e-12);
            assert_abs_diff_eq!(ty.sigma1 * m as f64, 1.0, epsilon = 1e-12);
            for nu in [1.0, 2.0, 4.0, 10.0] {
                let st = coeffs_closed_form(
                    &WeightSpec::new(WeightKind::StudentT { nu }, m).unwrap(),
                    &CESModel::StudentT { nu },
                    m,
                )
                .unwrap();
                assert!(st.sigma1 < st.theta1);
                assert!(st.sigma1 + st.sigma2 < st.theta1 + st.theta2 + 1e-12);
                assert!(st.sigma1 * m as f64 <= 1.0 + 1e-12);
            }
        }
    }
}
