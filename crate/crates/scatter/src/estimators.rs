//! Scatter-matrix estimators.
//!
//! The generic fixed-point iteration
//! `M_{j+1} = (1/K) sum_k phi(z_k^H M_j^{-1} z_k) z_k z_k^H`
//! covers the SCM (`phi = 1`), Tyler (`phi(t) = m/t`, renormalized to trace
//! `m` each iterate since the fixed point is only defined up to scale),
//! Huber, and the Student-t MLE. Convergence is declared on the relative
//! Frobenius change; non-convergence is reported, never silently accepted.

use crate::ces::{modular_variate_distribution, CESModel, RngStream};
use crate::numkit::{chi2_cdf, chi2_quantile, ComplexVector, HermitianMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Default relative-Frobenius convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 1000;
/// Monte Carlo draws used by the sigma solver.
pub const SIGMA_SOLVER_DRAWS: usize = 1_000_000;

/// Estimator families, keyed by their weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `phi = 1`: the sample covariance matrix.
    Scm,
    /// `phi(t) = m/t`: distribution-free, defined up to scale.
    Tyler,
    /// Winsorized weight with clipping point `p^2` set by quantile `q`.
    Huber { q: f64 },
    /// MLE weight for the complex t-distribution with `nu` degrees of freedom.
    StudentT { nu: f64 },
}

/// Constants of the Huber weight at dimension `m`:
/// `q = F_{2m}(2 p^2)` and `beta = F_{2m+2}(2 p^2) + p^2 (1-q)/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberConstants {
    pub q: f64,
    pub p_sq: f64,
    pub beta: f64,
}

/// Compute the Huber constants for clipping quantile `q` at dimension `m`.
pub fn huber_constants(q: f64, m: usize) -> Result<HuberConstants> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Parameter(format!("Huber q must be in (0,1), got {q}")));
    }
    if m == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let p_sq = chi2_quantile(2 * m, q)? / 2.0;
    let beta = chi2_cdf(2 * m + 2, 2.0 * p_sq)? + p_sq * (1.0 - q) / m as f64;
    Ok(HuberConstants { q, p_sq, beta })
}

/// A weight function `phi` with `psi(t) = t phi(t)` and `psi'` where it
/// exists, bound to a dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    kind: WeightKind,
    m: usize,
    huber: Option<HuberConstants>,
}

/// Build the weight function for `(kind, m)`; this is the closed-form
/// library behind each estimator family.
pub fn weight_library(kind: WeightKind, m: usize) -> Result<WeightSpec> {
    WeightSpec::new(kind, m)
}

impl WeightSpec {
    pub fn new(kind: WeightKind, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        let huber = match kind {
            WeightKind::Huber { q } => Some(huber_constants(q, m)?),
            WeightKind::StudentT { nu } => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::Parameter(format!("Student weight needs nu > 0, got {nu}")));
                }
                None
            }
            _ => None,
        };
        Ok(Self { kind, m, huber })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn huber_constants(&self) -> Option<HuberConstants> {
        self.huber
    }

    /// Weight `phi(t)`.
    pub fn phi(&self, t: f64) -> f64 {
        let m = self.m as f64;
        match self.kind {
            WeightKind::Scm => 1.0,
            WeightKind::Tyler => m / t,
            WeightKind::Huber { .. } => {
                let hc = self.huber.expect("huber constants precomputed");
                if t <= hc.p_sq {
                    1.0 / hc.beta
                } else {
                    hc.p_sq / (hc.beta * t)
                }
            }
            WeightKind::StudentT { nu } => (m + nu / 2.0) / (nu / 2.0 + t),
        }
    }

    /// `psi(t) = t phi(t)`.
    pub fn psi(&self, t: f64) -> f64 {
        let m = self.m as f64;
        match self.kind {
            WeightKind::Scm => t,
            WeightKind::Tyler => m,
            WeightKind::Huber { .. } => {
                let hc = self.huber.expect("huber constants precomputed");
                if t <= hc.p_sq {
                    t / hc.beta
                } else {
                    hc.p_sq / hc.beta
                }
            }
            WeightKind::StudentT { nu } => (m + nu / 2.0) * t / (nu / 2.0 + t),
        }
    }

    /// `psi'(t)` where defined; `None` exactly at the Huber kink.
    pub fn psi_prime(&self, t: f64) -> Option<f64> {
        let m = self.m as f64;
        match self.kind {
            WeightKind::Scm => Some(1.0),
            WeightKind::Tyler => Some(0.0),
            WeightKind::Huber { .. } => {
                let hc = self.huber.expect("huber constants precomputed");
                if t < hc.p_sq {
                    Some(1.0 / hc.beta)
                } else if t > hc.p_sq {
                    Some(0.0)
                } else {
                    None
                }
            }
            WeightKind::StudentT { nu } => {
                let half_nu = nu / 2.0;
                Some((m + half_nu) * half_nu / ((half_nu + t) * (half_nu + t)))
            }
        }
    }

    pub fn differentiable_everywhere(&self) -> bool {
        !matches!(self.kind, WeightKind::Huber { .. })
    }

    /// The consistency factor when it is known analytically: 1 for Tyler
    /// under any CES law, for the SCM under Gaussian data, and for an MLE
    /// weight matched to its own model.
    pub fn known_sigma(&self, model: &CESModel) -> Option<f64> {
        match (self.kind, model) {
            (WeightKind::Tyler, _) => Some(1.0),
            (WeightKind::Scm, CESModel::Gaussian) => Some(1.0),
            (WeightKind::StudentT { nu }, CESModel::StudentT { nu: nu_m }) if nu == *nu_m => Some(1.0),
            _ => None,
        }
    }
}

/// Outcome of the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub estimate: HermitianMatrix,
    pub iterations: usize,
    /// Relative Frobenius change at exit.
    pub residual: f64,
    pub converged: bool,
}

/// Sample covariance matrix `(1/K) sum_k z_k z_k^H`.
pub fn scm(samples: &[ComplexVector]) -> Result<HermitianMatrix> {
    if samples.is_empty() {
        return Err(Error::Parameter("SCM needs at least one sample".into()));
    }
    let m = samples[0].dim();
    if samples.iter().any(|s| s.dim() != m) {
        return Err(Error::DimensionMismatch("samples must share one dimension".into()));
    }
    let mut acc = vec![Complex64::ZERO; m * m];
    for s in samples {
        accumulate_rank_one(&mut acc, m, s.as_slice(), 1.0);
    }
    let scale = 1.0 / samples.len() as f64;
    finalize_hermitian(acc, m, scale)
}

/// Accumulate `w z z^H` into the lower triangle of `acc`.
#[inline]
fn accumulate_rank_one(acc: &mut [Complex64], m: usize, z: &[Complex64], w: f64) {
    for i in 0..m {
        let zi = z[i] * w;
        let row = &mut acc[i * m..i * m + i + 1];
        for (j, slot) in row.iter_mut().enumerate() {
            *slot += zi * z[j].conj();
        }
    }
}

/// Scale the accumulated lower triangle and mirror it into a Hermitian matrix.
fn finalize_hermitian(mut acc: Vec<Complex64>, m: usize, scale: f64) -> Result<HermitianMatrix> {
    for i in 0..m {
        for j in 0..=i {
            let v = acc[i * m + j] * scale;
            if i == j {
                acc[i * m + j] = Complex64::new(v.re, 0.0);
            } else {
                acc[i * m + j] = v;
                acc[j * m + i] = v.conj();
            }
        }
    }
    Ok(HermitianMatrix::from_raw_unchecked(m, acc))
}

/// Run the fixed-point iteration from `M_0 = I` until the relative
/// Frobenius change drops below `tol` (Tyler iterates are renormalized to
/// trace `m`).
///
/// Requires `K > m`; Tyler additionally rejects zero samples (its weight is
/// unbounded at the origin).
pub fn m_estimate(
    samples: &[ComplexVector],
    w: &WeightSpec,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointReport> {
    let m = w.dim();
    let k = samples.len();
    if k <= m {
        return Err(Error::Parameter(format!("need K > m, got K={k} m={m}")));
    }
    if samples.iter().any(|s| s.dim() != m) {
        return Err(Error::DimensionMismatch("sample dimension differs from weight dimension".into()));
    }
    if tol <= 0.0 || tol.is_nan() || max_iter == 0 {
        return Err(Error::Parameter("need tol > 0 and max_iter >= 1".into()));
    }
    if matches!(w.kind(), WeightKind::Tyler) && samples.iter().any(|s| s.norm_sq() == 0.0) {
        return Err(Error::DegenerateInput("Tyler weight rejects zero samples".into()));
    }

    // Constant weight: the fixed point is the SCM itself.
    if matches!(w.kind(), WeightKind::Scm) {
        return Ok(FixedPointReport { estimate: scm(samples)?, iterations: 1, residual: 0.0, converged: true });
    }

    let tyler = matches!(w.kind(), WeightKind::Tyler);
    let mut current = HermitianMatrix::identity(m);
    let mut current_norm = current.frobenius_norm();
    let mut scratch = vec![Complex64::ZERO; m];
    let inv_k = 1.0 / k as f64;

    for iter in 1..=max_iter {
        let chol = current.cholesky()?;
        let mut acc = vec![Complex64::ZERO; m * m];
        for s in samples {
            let t = chol.quadratic_form_with_scratch(s.as_slice(), &mut scratch);
            accumulate_rank_one(&mut acc, m, s.as_slice(), w.phi(t));
        }
        let mut next = finalize_hermitian(acc, m, inv_k)?;
        if tyler {
            next = next.rescaled_to_trace(m as f64)?;
        }

        let diff = (&next.as_matrix() - &current.as_matrix()).frobenius_norm();
        let rel = diff / current_norm;
        current = next;
        current_norm = current.frobenius_norm();
        if rel < tol {
            return Ok(FixedPointReport { estimate: current, iterations: iter, residual: rel, converged: true });
        }
        if iter == max_iter {
            return Ok(FixedPointReport { estimate: current, iterations: iter, residual: rel, converged: false });
        }
    }
    unreachable!("loop always returns");
}

/// Relative fixed-point residual
/// `||M - (1/K) sum phi(z^H M^{-1} z) z z^H||_F / ||M||_F`
/// of an estimate (Tyler: both sides projected to trace `m`).
pub fn fixed_point_residual(
    samples: &[ComplexVector],
    w: &WeightSpec,
    estimate: &HermitianMatrix,
) -> Result<f64> {
    let m = w.dim();
    if estimate.dim() != m {
        return Err(Error::DimensionMismatch("estimate dimension differs from weight dimension".into()));
    }
    let chol = estimate.cholesky()?;
    let mut scratch = vec![Complex64::ZERO; m];
    let mut acc = vec![Complex64::ZERO; m * m];
    for s in samples {
        let t = chol.quadratic_form_with_scratch(s.as_slice(), &mut scratch);
        accumulate_rank_one(&mut acc, m, s.as_slice(), w.phi(t));
    }
    let mut rhs = finalize_hermitian(acc, m, 1.0 / samples.len() as f64)?;
    let lhs = if matches!(w.kind(), WeightKind::Tyler) {
        rhs = rhs.rescaled_to_trace(m as f64)?;
        estimate.rescaled_to_trace(m as f64)?
    } else {
        estimate.clone()
    };
    Ok((&lhs.as_matrix() - &rhs.as_matrix()).frobenius_norm() / lhs.frobenius_norm())
}

/// Solve `E[psi(sigma t)] = m` for the consistency factor `sigma`, where
/// `t` follows the modular variate law of `(model, m)`.
///
/// The expectation is a fixed-seed Monte Carlo average over
/// [`SIGMA_SOLVER_DRAWS`] draws; the root is bracketed on `[1e-6, 1e6]`,
/// bisected, and polished by secant steps to 1e-6 relative accuracy. The
/// constant-psi Tyler case is detected analytically and returns exactly 1.
pub fn solve_sigma(w: &WeightSpec, model: &CESModel, m: usize, stream: RngStream) -> Result<f64> {
    if w.dim() != m {
        return Err(Error::DimensionMismatch("weight dimension differs from requested m".into()));
    }
    if matches!(w.kind(), WeightKind::Tyler) {
        // psi is the constant m: E[psi(sigma t)] = m for every sigma.
        return Ok(1.0);
    }
    let mv = modular_variate_distribution(model, m)?;
    let draws = mv.sample_many(SIGMA_SOLVER_DRAWS, stream);
    let target = m as f64;
    let g = |s: f64| -> f64 {
        let mut acc = 0.0;
        for &t in &draws {
            acc += w.psi(s * t);
        }
        acc / draws.len() as f64 - target
    };

    let (mut lo, mut hi) = (1e-6, 1e6);
    let g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::Solver(format!(
            "no sign change on [1e-6, 1e6]: g(lo)={g_lo:.3e}, g(hi)={g_hi:.3e}"
        )));
    }

    // Bisection to a comfortable region, then secant polish.
    let mut mid = 1.0;
    for _ in 0..60 {
        mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / mid < 1e-4 {
            break;
        }
    }
    let mut x0 = lo;
    let mut x1 = hi;
    let mut f0 = g(x0);
    let mut f1 = g(x1);
    for _ in 0..40 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let x2 = if x2.is_finite() && x2 > 0.0 { x2 } else { 0.5 * (x0 + x1) };
        if ((x2 - x1) / x2).abs() < 1e-6 {
            return Ok(x2);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = g(x1);
    }
    Ok(x1.max(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ces::{sample_coupled_batch, CESModel, RngStream};
    use crate::numkit::ComplexMatrix;
    use approx::assert_abs_diff_eq;

    fn cr(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn huber_constants_closed_form_m1() {
        // m=1, q=0.5: p^2 = ln 2 and beta = F_4(2 ln 2) + ln(2)/2 = 1/2 exactly.
        let hc = huber_constants(0.5, 1).unwrap();
        assert_abs_diff_eq!(hc.p_sq, 2f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(hc.beta, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn huber_constants_limits_and_roundtrip() {
        // q -> 1 pushes beta toward the SCM limit 1.
        let hc = huber_constants(0.999, 5).unwrap();
        assert!(hc.beta > 0.99 && hc.beta < 1.0, "beta = {}", hc.beta);

        // Defining identity F_{2m}(2 p^2) = q.
        let hc = huber_constants(0.95, 10).unwrap();
        assert_abs_diff_eq!(chi2_cdf(20, 2.0 * hc.p_sq).unwrap(), 0.95, epsilon = 1e-10);

        assert!(matches!(huber_constants(0.0, 5), Err(Error::Parameter(_))));
        assert!(matches!(huber_constants(1.0, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn weight_library_closed_forms() {
        let m = 5;
        let tyler = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        for t in [0.1, 1.0, 17.3] {
            assert_abs_diff_eq!(tyler.psi(t), m as f64, epsilon = 1e-12);
            assert_eq!(tyler.psi_prime(t), Some(0.0));
        }

        // Student nu -> infinity approaches the SCM weight.
        let st = WeightSpec::new(WeightKind::StudentT { nu: 1e6 }, m).unwrap();
        assert_abs_diff_eq!(st.phi(5.0), 1.0, epsilon = 1e-4);

        // Student nu -> 0 approaches Tyler's weight m/t.
        let st = WeightSpec::new(WeightKind::StudentT { nu: 1e-6 }, m).unwrap();
        assert_abs_diff_eq!(st.phi(2.0), 2.5, epsilon = 1e-5);

        // Student psi' closed form.
        let nu = 2.0;
        let st = WeightSpec::new(WeightKind::StudentT { nu }, m).unwrap();
        let t = 3.0;
        let h = 1e-6;
        let fd = (st.psi(t + h) - st.psi(t - h)) / (2.0 * h);
        assert_abs_diff_eq!(st.psi_prime(t).unwrap(), fd, epsilon = 1e-6);

        // Huber kink: psi' undefined exactly at p^2.
        let hu = WeightSpec::new(WeightKind::Huber { q: 0.9 }, m).unwrap();
        let p_sq = hu.huber_constants().unwrap().p_sq;
        assert!(hu.psi_prime(p_sq).is_none());
        assert!(!hu.differentiable_everywhere());
        assert!(hu.psi_prime(p_sq - 1e-9).is_some());
    }

    #[test]
    fn scm_basics() {
        // Single unit-vector sample.
        let e1 = ComplexVector::from_vec(vec![cr(1.0), cr(0.0)]);
        let s = scm(&[e1]).unwrap();
        assert_eq!(s.get(0, 0), cr(1.0));
        assert_eq!(s.get(1, 1), cr(0.0));

        // Quadratic scaling.
        let z = ComplexVector::from_vec(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)]);
        let s1 = scm(std::slice::from_ref(&z)).unwrap();
        let s2 = scm(&[z.scaled(2.0)]).unwrap();
        assert!((&s2.as_matrix() - &s1.as_matrix().scaled(4.0)).frobenius_norm() < 1e-12);

        assert!(matches!(scm(&[]), Err(Error::Parameter(_))));
    }

    #[test]
    fn scm_consistency_gaussian() {
        let m = 5;
        let batch = sample_coupled_batch(
            &CESModel::Gaussian,
            &HermitianMatrix::identity(m),
            100_000,
            RngStream::new(2),
        )
        .unwrap();
        let est = scm(&batch.x).unwrap();
        let dev = (&est.as_matrix() - &ComplexMatrix::identity(m)).frobenius_norm();
        assert!(dev < 0.05, "deviation {dev}");
    }

    #[test]
    fn m_estimate_scm_weight_returns_scm() {
        let batch = sample_coupled_batch(
            &CESModel::Gaussian,
            &HermitianMatrix::identity(3),
            50,
            RngStream::new(4),
        )
        .unwrap();
        let w = WeightSpec::new(WeightKind::Scm, 3).unwrap();
        let rep = m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        let direct = scm(&batch.z).unwrap();
        assert!((&rep.estimate.as_matrix() - &direct.as_matrix()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn tyler_per_sample_scale_invariance() {
        let m = 4;
        let batch = sample_coupled_batch(
            &CESModel::StudentT { nu: 2.0 },
            &HermitianMatrix::identity(m),
            200,
            RngStream::new(6),
        )
        .unwrap();
        let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        let base = m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        // Rescale each sample by an arbitrary positive factor.
        let rescaled: Vec<ComplexVector> = batch
            .z
            .iter()
            .enumerate()
            .map(|(i, z)| z.scaled(0.1 + (i % 17) as f64))
            .collect();
        let other = m_estimate(&rescaled, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let dev = (&base.estimate.as_matrix() - &other.estimate.as_matrix()).frobenius_norm()
            / base.estimate.frobenius_norm();
        assert!(dev < 20.0 * DEFAULT_TOL, "deviation {dev}");
    }

    #[test]
    fn tyler_rejects_zero_samples() {
        let m = 3;
        let mut samples = sample_coupled_batch(
            &CESModel::Gaussian,
            &HermitianMatrix::identity(m),
            20,
            RngStream::new(14),
        )
        .unwrap()
        .z;
        samples.push(ComplexVector::zeros(m));
        let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        assert!(matches!(
            m_estimate(&samples, &w, DEFAULT_TOL, DEFAULT_MAX_ITER),
            Err(Error::DegenerateInput(_))
        ));
        // Huber accepts the same degenerate sample.
        let w = WeightSpec::new(WeightKind::Huber { q: 0.9 }, m).unwrap();
        assert!(m_estimate(&samples, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).is_ok());
    }

    #[test]
    fn m_estimate_requires_k_greater_than_m() {
        let m = 5;
        let batch =
            sample_coupled_batch(&CESModel::Gaussian, &HermitianMatrix::identity(m), 5, RngStream::new(1))
                .unwrap();
        let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        assert!(matches!(
            m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn student_mle_consistency_on_t_data() {
        let m = 5;
        let nu = 2.0;
        let batch = sample_coupled_batch(
            &CESModel::StudentT { nu },
            &HermitianMatrix::identity(m),
            10_000,
            RngStream::new(10),
        )
        .unwrap();
        let w = WeightSpec::new(WeightKind::StudentT { nu }, m).unwrap();
        let rep = m_estimate(&batch.z, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(rep.converged);
        let dev = (&rep.estimate.as_matrix() - &ComplexMatrix::identity(m)).frobenius_norm();
        assert!(dev < 0.1, "deviation {dev}");
        // Fixed-point residual bound.
        let resid = fixed_point_residual(&batch.z, &w, &rep.estimate).unwrap();
        assert!(resid < 10.0 * DEFAULT_TOL, "residual {resid}");
    }

    #[test]
    fn solve_sigma_cases() {
        let m = 5;
        let stream = RngStream::new(33);

        // Tyler: detected analytically.
        let w = WeightSpec::new(WeightKind::Tyler, m).unwrap();
        assert_eq!(solve_sigma(&w, &CESModel::StudentT { nu: 2.0 }, m, stream).unwrap(), 1.0);

        // SCM weight on Gaussian data: psi is linear, sigma = m / E[t] ~ 1.
        let w = WeightSpec::new(WeightKind::Scm, m).unwrap();
        let s = solve_sigma(&w, &CESModel::Gaussian, m, stream).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 0.01);

        // Student MLE on matching data: sigma = 1.
        let w = WeightSpec::new(WeightKind::StudentT { nu: 2.0 }, m).unwrap();
        let s = solve_sigma(&w, &CESModel::StudentT { nu: 2.0 }, m, stream).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 0.01);
        assert_eq!(w.known_sigma(&CESModel::StudentT { nu: 2.0 }), Some(1.0));
        assert_eq!(w.known_sigma(&CESModel::Gaussian), None);
    }

    #[test]
    fn solve_sigma_huber_gaussian_is_one() {
        // beta is calibrated so that E[psi(t)] = m under Gaussian data.
        let m = 10;
        let w = WeightSpec::new(WeightKind::Huber { q: 0.95 }, m).unwrap();
        let s = solve_sigma(&w, &CESModel::Gaussian, m, RngStream::new(3)).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 0.01);
    }
}
