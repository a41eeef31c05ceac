//! Metric contexts and A-adjoints.
//!
//! A PSD matrix `A` induces the semi-inner product `<h|k>_A = <Ah|k>`
//! (linear in the first slot) and the seminorm `||h||_A`. An operator `T`
//! admits an A-adjoint exactly when the column space of `T^H A` sits inside
//! the column space of `A`; the reduced solution of `A X = T^H A` is then
//! `T^# = A^+ T^H A`. [`MetricContext`] performs one Hermitian
//! eigendecomposition of `A` and derives every cached quantity (`A^+`,
//! `A^(1/2)`, its pseudo-inverse, the range projector) from that single rank
//! decision, so the caches never disagree about which directions count as
//! null.

use crate::numerics::{
    check_finite, scaled_residual, spectral_norm, CMatrix, CVector, NumericsError, Tolerance,
    Verdict,
};
use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemiHilbertError {
    #[error("metric is not Hermitian: relative defect {defect:.3e}")]
    NotHermitian { defect: f64 },
    #[error("metric is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPsd { eigenvalue: f64 },
    #[error("operator admits no A-adjoint: B_A membership residual {residual:.3e}")]
    NotInBA { residual: f64 },
    #[error("operator is not A-bounded: B^A membership residual {residual:.3e}")]
    NotInBUpperA { residual: f64 },
    #[error("constructed adjoint failed its defining equation: {what} residual {residual:.3e}")]
    ValidationFailed { what: &'static str, residual: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Finite-dimensional reading of the two membership conditions; surfaced in
/// reports next to the pair of verdicts.
pub const MEMBERSHIP_NOTE: &str =
    "in finite dimensions both conditions reduce to T(N(A)) within N(A)";

/// A validated PSD metric with its derived caches.
pub struct MetricContext {
    a: CMatrix,
    a_dagger: CMatrix,
    a_half: CMatrix,
    a_half_dagger: CMatrix,
    p: CMatrix,
    rank: usize,
    a_norm: f64,
    tol: Tolerance,
}

impl MetricContext {
    /// Validates Hermitian-ness and positive semidefiniteness (within
    /// `residual_tol` relative to the spectral norm), then builds the caches
    /// from one eigendecomposition. Tiny negative eigenvalues are clamped to
    /// zero; eigenvalues below the clamp window are an error.
    pub fn new(a: CMatrix, tol: Tolerance) -> Result<Self, SemiHilbertError> {
        tol.validate()?;
        if a.nrows() != a.ncols() {
            return Err(NumericsError::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            }
            .into());
        }
        check_finite(&a)?;
        let n = a.nrows();
        let a_norm = spectral_norm(&a)?;
        if a_norm == 0.0 {
            return Ok(MetricContext {
                a: CMatrix::zeros(n, n),
                a_dagger: CMatrix::zeros(n, n),
                a_half: CMatrix::zeros(n, n),
                a_half_dagger: CMatrix::zeros(n, n),
                p: CMatrix::zeros(n, n),
                rank: 0,
                a_norm,
                tol,
            });
        }
        let defect = spectral_norm(&(&a - a.adjoint()))? / a_norm;
        if defect > tol.residual_tol {
            return Err(SemiHilbertError::NotHermitian { defect });
        }
        let h = (&a + a.adjoint()).map(|z| z * 0.5);
        let eig = nalgebra::SymmetricEigen::try_new(h.clone(), f64::EPSILON, 100_000)
            .ok_or(NumericsError::EigFailed)?;
        let floor = -tol.residual_tol * a_norm;
        for lam in eig.eigenvalues.iter() {
            if *lam < floor {
                return Err(SemiHilbertError::NotPsd { eigenvalue: *lam });
            }
        }
        let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cutoff = tol.rank_cutoff * lam_max;
        let kept: Vec<bool> = eig.eigenvalues.iter().map(|lam| *lam > cutoff).collect();
        let rank = kept.iter().filter(|k| **k).count();
        let diag = |f: &dyn Fn(f64) -> f64| -> CMatrix {
            let d = DVector::from_iterator(
                n,
                eig.eigenvalues.iter().zip(&kept).map(|(lam, keep)| {
                    if *keep {
                        Complex64::new(f(lam.max(0.0)), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
            );
            &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
        };
        Ok(MetricContext {
            a: h,
            a_dagger: diag(&|l| 1.0 / l),
            a_half: diag(&f64::sqrt),
            a_half_dagger: diag(&|l| 1.0 / l.sqrt()),
            p: diag(&|_| 1.0),
            rank,
            a_norm,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// The Hermitianized metric.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn a_dagger(&self) -> &CMatrix {
        &self.a_dagger
    }

    pub fn a_half(&self) -> &CMatrix {
        &self.a_half
    }

    pub fn a_half_dagger(&self) -> &CMatrix {
        &self.a_half_dagger
    }

    /// Orthogonal projector onto the column space of the metric.
    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }
}

/// `<h|k>_A = <Ah|k>`, linear in `h`, conjugate-linear in `k`.
pub fn semi_inner_product(ctx: &MetricContext, h: &CVector, k: &CVector) -> Complex64 {
    (k.adjoint() * (&ctx.a * h))[(0, 0)]
}

/// `||h||_A`; zero exactly on the null space of the metric.
pub fn vector_seminorm(ctx: &MetricContext, h: &CVector) -> f64 {
    semi_inner_product(ctx, h, h).re.max(0.0).sqrt()
}

/// Joint verdict for the two membership questions.
#[derive(Debug, Clone, Copy)]
pub struct MembershipVerdict {
    /// Admits an A-adjoint: column space of T^H A inside column space of A.
    pub in_b_a: Verdict,
    /// A-bounded: maps the null space of A into itself.
    pub in_b_upper_a: Verdict,
    pub residual_b_a: f64,
    pub residual_b_upper_a: f64,
}

pub fn membership(ctx: &MetricContext, t: &CMatrix) -> Result<MembershipVerdict, SemiHilbertError> {
    check_finite(t)?;
    expect_dim(ctx, t)?;
    let t_norm = spectral_norm(t)?;
    let id = CMatrix::identity(ctx.dim(), ctx.dim());
    let q = &id - &ctx.p;
    let raw_ba = spectral_norm(&(&q * t.adjoint() * &ctx.a))?;
    let residual_b_a = scaled_residual(raw_ba, t_norm * ctx.a_norm);
    let raw_up = spectral_norm(&(&ctx.a_half * t * &q))?;
    let half_norm = ctx.a_norm.sqrt();
    let residual_b_upper_a = scaled_residual(raw_up, t_norm * half_norm);
    Ok(MembershipVerdict {
        in_b_a: Verdict::from_residual(residual_b_a, &ctx.tol),
        in_b_upper_a: Verdict::from_residual(residual_b_upper_a, &ctx.tol),
        residual_b_a,
        residual_b_upper_a,
    })
}

/// An operator together with its A-adjoint and cached spectral norms.
pub struct BoundOperator {
    t: CMatrix,
    t_sharp: CMatrix,
    t_norm: f64,
    t_sharp_norm: f64,
    membership: MembershipVerdict,
}

impl BoundOperator {
    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    pub fn t_sharp(&self) -> &CMatrix {
        &self.t_sharp
    }

    pub fn t_norm(&self) -> f64 {
        self.t_norm
    }

    pub fn t_sharp_norm(&self) -> f64 {
        self.t_sharp_norm
    }

    pub fn membership(&self) -> &MembershipVerdict {
        &self.membership
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// T^n. Powers of the adjoint must come from [`Self::sharp_pow`]; the
    /// adjoint of a power differs from a power of the adjoint when the range
    /// projector is proper.
    pub fn t_pow(&self, n: u32) -> CMatrix {
        crate::numerics::matrix_power(&self.t, n)
    }

    /// (T^#)^m, computed from the cached adjoint.
    pub fn sharp_pow(&self, m: u32) -> CMatrix {
        crate::numerics::matrix_power(&self.t_sharp, m)
    }
}

fn expect_dim(ctx: &MetricContext, t: &CMatrix) -> Result<(), SemiHilbertError> {
    if t.nrows() != ctx.dim() || t.ncols() != ctx.dim() {
        return Err(NumericsError::DimensionMismatch {
            left_rows: ctx.dim(),
            left_cols: ctx.dim(),
            right_rows: t.nrows(),
            right_cols: t.ncols(),
        }
        .into());
    }
    Ok(())
}

/// Builds the A-adjoint `T^# = A^+ T^H A` after checking that one exists.
///
/// The construction is validated against its defining equation
/// `A T^# = T^H A` and the range condition `(I-P) T^# = 0`; a violation
/// beyond `residual_tol` is an error rather than a silent cache.
pub fn a_adjoint(ctx: &MetricContext, t: &CMatrix) -> Result<BoundOperator, SemiHilbertError> {
    let verdict = membership(ctx, t)?;
    if !verdict.in_b_a.is_pass() {
        return Err(SemiHilbertError::NotInBA {
            residual: verdict.residual_b_a,
        });
    }
    let t_sharp = &ctx.a_dagger * t.adjoint() * &ctx.a;
    let t_norm = spectral_norm(t)?;
    let t_sharp_norm = spectral_norm(&t_sharp)?;

    let eq_raw = spectral_norm(&(&ctx.a * &t_sharp - t.adjoint() * &ctx.a))?;
    let eq_res = scaled_residual(eq_raw, ctx.a_norm * t_norm);
    if eq_res > ctx.tol.residual_tol {
        return Err(SemiHilbertError::ValidationFailed {
            what: "A T^# = T^H A",
            residual: eq_res,
        });
    }
    let id = CMatrix::identity(ctx.dim(), ctx.dim());
    let range_raw = spectral_norm(&((&id - &ctx.p) * &t_sharp))?;
    let range_res = scaled_residual(range_raw, t_sharp_norm);
    if range_res > ctx.tol.residual_tol {
        return Err(SemiHilbertError::ValidationFailed {
            what: "(I-P) T^# = 0",
            residual: range_res,
        });
    }
    Ok(BoundOperator {
        t: t.clone(),
        t_sharp,
        t_norm,
        t_sharp_norm,
        membership: verdict,
    })
}

/// A-adjoint of the A-adjoint; equals `P T P` and is checked against it.
pub fn double_sharp(ctx: &MetricContext, op: &BoundOperator) -> Result<CMatrix, SemiHilbertError> {
    let inner = a_adjoint(ctx, op.t_sharp())?;
    let ptp = &ctx.p * op.t() * &ctx.p;
    let raw = spectral_norm(&(inner.t_sharp() - &ptp))?;
    let res = scaled_residual(raw, op.t_norm().max(1.0));
    if res > ctx.tol.residual_tol {
        return Err(SemiHilbertError::ValidationFailed {
            what: "(T^#)^# = P T P",
            residual: res,
        });
    }
    Ok(inner.t_sharp)
}

/// `||T||_A`, the seminorm induced on A-bounded operators.
///
/// Computed as the spectral norm of `A^(1/2) T A^(+1/2)`: substituting
/// `g = A^(1/2) h` turns the ratio `||Th||_A / ||h||_A` into an ordinary
/// operator norm on the column space of A, and the pseudo-inverse square
/// root already vanishes on the complement. Operators outside B^A have no
/// finite value and are rejected.
pub fn operator_seminorm(ctx: &MetricContext, t: &CMatrix) -> Result<f64, SemiHilbertError> {
    let verdict = membership(ctx, t)?;
    if !verdict.in_b_upper_a.is_pass() {
        return Err(SemiHilbertError::NotInBUpperA {
            residual: verdict.residual_b_upper_a,
        });
    }
    Ok(spectral_norm(&(&ctx.a_half * t * &ctx.a_half_dagger))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_entry;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn diag_metric(entries: &[f64]) -> MetricContext {
        let d = DVector::from_iterator(entries.len(), entries.iter().map(|x| re(*x)));
        MetricContext::new(CMatrix::from_diagonal(&d), Tolerance::default()).unwrap()
    }

    /// The running 2x2 pair: A = diag(1, 2), T = [[2, 0], [1, -2]].
    fn running_pair() -> (MetricContext, CMatrix) {
        let ctx = diag_metric(&[1.0, 2.0]);
        let t = CMatrix::from_row_slice(2, 2, &[re(2.0), re(0.0), re(1.0), re(-2.0)]);
        (ctx, t)
    }

    #[test]
    fn context_caches_agree_with_general_pseudo_inverse() {
        let ctx = diag_metric(&[1.0, 2.0, 0.0]);
        let pinv =
            crate::numerics::pseudo_inverse(ctx.a(), ctx.tol()).unwrap();
        assert!(max_abs_entry(&(ctx.a_dagger() - pinv)) < 1e-12);
        let p = ctx.a() * ctx.a_dagger();
        assert!(max_abs_entry(&(ctx.p() - p)) < 1e-12);
        assert!(max_abs_entry(&(ctx.a_half() * ctx.a_half() - ctx.a())) < 1e-12);
        assert_eq!(ctx.rank(), 2);
    }

    #[test]
    fn context_rejects_non_hermitian_and_indefinite_metrics() {
        let skew = CMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(-1.0), re(1.0)]);
        match MetricContext::new(skew, Tolerance::default()) {
            Err(SemiHilbertError::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {:?}", other.map(|_| ())),
        }
        let indef = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
        match MetricContext::new(indef, Tolerance::default()) {
            Err(SemiHilbertError::NotPsd { .. }) => {}
            other => panic!("expected NotPsd, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn inner_product_is_linear_in_first_slot() {
        let ctx = diag_metric(&[1.0, 2.0]);
        let h = CVector::from_vec(vec![Complex64::new(1.0, 1.0), re(2.0)]);
        let k = CVector::from_vec(vec![re(1.0), Complex64::new(0.0, -1.0)]);
        let c = Complex64::new(0.5, 2.0);
        let lhs = semi_inner_product(&ctx, &(&h * c), &k);
        let rhs = c * semi_inner_product(&ctx, &h, &k);
        assert!((lhs - rhs).norm() < 1e-12);
        // conjugate-linear in the second slot
        let lhs2 = semi_inner_product(&ctx, &h, &(&k * c));
        let rhs2 = c.conj() * semi_inner_product(&ctx, &h, &k);
        assert!((lhs2 - rhs2).norm() < 1e-12);
    }

    #[test]
    fn seminorm_vanishes_exactly_on_the_null_space() {
        let ctx = diag_metric(&[1.0, 0.0]);
        let null = CVector::from_vec(vec![re(0.0), re(7.0)]);
        let off = CVector::from_vec(vec![re(3.0), re(4.0)]);
        assert_eq!(vector_seminorm(&ctx, &null), 0.0);
        assert!((vector_seminorm(&ctx, &off) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn running_pair_adjoint_matches_hand_computation() {
        let (ctx, t) = running_pair();
        let op = a_adjoint(&ctx, &t).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[re(2.0), re(2.0), re(0.0), re(-2.0)]);
        assert!(max_abs_entry(&(op.t_sharp() - expected)) <= 1e-12);
    }

    #[test]
    fn running_pair_seminorm_is_two_root_two() {
        let (ctx, t) = running_pair();
        let val = operator_seminorm(&ctx, &t).unwrap();
        assert!((val - 8.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identity_has_unit_seminorm_for_nonzero_metric() {
        let ctx = diag_metric(&[0.5, 3.0, 0.0]);
        let id = CMatrix::identity(3, 3);
        assert!((operator_seminorm(&ctx, &id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_against_rank_one_metric_is_rejected() {
        let ctx = diag_metric(&[1.0, 0.0]);
        let t = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        let verdict = membership(&ctx, &t).unwrap();
        assert!(verdict.in_b_a.is_fail());
        assert!(verdict.in_b_upper_a.is_fail());
        assert!(a_adjoint(&ctx, &t).is_err());
    }

    #[test]
    fn rank_one_metric_adjoint_matches_reduced_solution() {
        let ctx = diag_metric(&[1.0, 0.0]);
        let t = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(2.0), re(3.0)]);
        let op = a_adjoint(&ctx, &t).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]);
        assert!(max_abs_entry(&(op.t_sharp() - expected)) < 1e-12);
        let ds = double_sharp(&ctx, &op).unwrap();
        let ptp = ctx.p() * &t * ctx.p();
        assert!(max_abs_entry(&(&ds - ptp)) < 1e-12);
    }

    #[test]
    fn zero_metric_accepts_everything_with_zero_seminorm() {
        let ctx = diag_metric(&[0.0, 0.0]);
        let t = CMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let verdict = membership(&ctx, &t).unwrap();
        assert!(verdict.in_b_a.is_pass());
        assert!(verdict.in_b_upper_a.is_pass());
        assert_eq!(operator_seminorm(&ctx, &t).unwrap(), 0.0);
    }
}
