//! Dense complex kernels with an explicit tolerance policy.
//!
//! Everything downstream funnels its linear algebra through here: rank
//! decisions use one relative cutoff, approximate-zero decisions one residual
//! tolerance, and "definitely nonzero" decisions a separate distinctness
//! margin. Residuals are reported relative to a scale built from spectral
//! norms of the inputs, so verdicts survive rescaling T -> c*T.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Iteration cap handed to the iterative factorizations. Desk-scale inputs
/// converge in far fewer; hitting the cap is reported as an error, never
/// looped past.
const FACTOR_MAX_ITER: usize = 100_000;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("Hermitian eigendecomposition did not converge")]
    EigFailed,
    #[error("Schur decomposition did not converge")]
    SchurFailed,
    #[error("spectrum obstructs the principal square root: {detail}")]
    SpectrumNegative { detail: String },
    #[error(
        "square-root recurrence broke down at diagonal pair ({i}, {j}): \
         the matrix is defective at an eigenvalue near zero"
    )]
    SqrtBreakdown { i: usize, j: usize },
    #[error("invalid tolerance: {0}")]
    BadTolerance(String),
}

/// The three knobs every approximate decision goes through.
///
/// `rank_cutoff` is relative to the largest singular value of the matrix
/// being ranked. `residual_tol` bounds scaled residuals accepted as zero;
/// `distinctness_margin` is the larger threshold above which a residual
/// counts as definitely nonzero. Residuals between the two are reported as
/// indeterminate rather than rounded to a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_cutoff: f64,
    pub residual_tol: f64,
    pub distinctness_margin: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_cutoff: 1e-10,
            residual_tol: 1e-9,
            distinctness_margin: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn new(
        rank_cutoff: f64,
        residual_tol: f64,
        distinctness_margin: f64,
    ) -> Result<Self, NumericsError> {
        let t = Tolerance {
            rank_cutoff,
            residual_tol,
            distinctness_margin,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rank_cutoff.is_finite() && self.rank_cutoff > 0.0 && self.rank_cutoff < 1.0) {
            return Err(NumericsError::BadTolerance(format!(
                "rank_cutoff must lie in (0, 1), got {}",
                self.rank_cutoff
            )));
        }
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0) {
            return Err(NumericsError::BadTolerance(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if !(self.distinctness_margin.is_finite()
            && self.distinctness_margin > self.residual_tol)
        {
            return Err(NumericsError::BadTolerance(format!(
                "distinctness_margin must exceed residual_tol ({} <= {})",
                self.distinctness_margin, self.residual_tol
            )));
        }
        Ok(())
    }
}

/// Three-zone outcome of a residual test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn from_residual(residual: f64, tol: &Tolerance) -> Verdict {
        if residual <= tol.residual_tol {
            Verdict::Pass
        } else if residual >= tol.distinctness_margin {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }

    /// Conjunction: fail dominates, then indeterminate.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Pass, Pass) => Pass,
        }
    }
}

/// Residual relative to a problem scale. The tiny additive floor only
/// matters when the scale is exactly zero (zero operators), where the raw
/// residual is zero as well.
pub fn scaled_residual(raw: f64, scale: f64) -> f64 {
    raw / (scale + f64::MIN_POSITIVE)
}

pub fn check_finite(m: &CMatrix) -> Result<(), NumericsError> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(NumericsError::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn require_square(m: &CMatrix) -> Result<usize, NumericsError> {
    if m.nrows() != m.ncols() {
        return Err(NumericsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Largest singular value. Zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> Result<f64, NumericsError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    check_finite(m)?;
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, FACTOR_MAX_ITER)
        .ok_or(NumericsError::SvdFailed)?;
    Ok(svd.singular_values.iter().cloned().fold(0.0, f64::max))
}

/// Thin SVD restricted to singular values above the relative rank cutoff,
/// computed from the Hermitian dilation `[[0, M], [M*, 0]]`.
///
/// The bidiagonal SVD occasionally assembles mispaired singular vectors for
/// complex matrices with repeated zero singular values: the values come back
/// right, the reconstruction does not. The Hermitian eigensolver has no such
/// defect, and each positive dilation eigenpair `(sigma, [u; v]/sqrt 2)` is a
/// consistent singular triplet, accurate linearly (not quadratically) in
/// sigma, so the rank cutoff keeps its meaning.
fn thin_svd(
    m: &CMatrix,
    tol: &Tolerance,
) -> Result<(Vec<f64>, CMatrix, CMatrix), NumericsError> {
    let (r, c) = m.shape();
    let mut h = CMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, FACTOR_MAX_ITER)
        .ok_or(NumericsError::EigFailed)?;
    let smax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| smax > 0.0 && eig.eigenvalues[i] > tol.rank_cutoff * smax)
        .collect();
    kept.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let k = kept.len();
    let mut sigma = Vec::with_capacity(k);
    let mut u = CMatrix::zeros(r, k);
    let mut v = CMatrix::zeros(c, k);
    let root2 = std::f64::consts::SQRT_2;
    for (col, &i) in kept.iter().enumerate() {
        sigma.push(eig.eigenvalues[i]);
        let w = eig.eigenvectors.column(i);
        for row in 0..r {
            u[(row, col)] = w[row] * root2;
        }
        for row in 0..c {
            v[(row, col)] = w[r + row] * root2;
        }
    }
    Ok((sigma, u, v))
}

/// Singular values above `rank_cutoff` relative to the largest one.
pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> Result<usize, NumericsError> {
    check_finite(m)?;
    tol.validate()?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    Ok(thin_svd(m, tol)?.0.len())
}

/// Moore-Penrose pseudo-inverse with a relative rank cutoff.
///
/// Singular values at or below `rank_cutoff * sigma_max` are treated as
/// zero, so the zero matrix maps to the zero matrix of transposed shape.
pub fn pseudo_inverse(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix, NumericsError> {
    check_finite(m)?;
    tol.validate()?;
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return Ok(CMatrix::zeros(c, r));
    }
    let (sigma, u, v) = thin_svd(m, tol)?;
    if sigma.is_empty() {
        return Ok(CMatrix::zeros(c, r));
    }
    let inv = DVector::from_iterator(
        sigma.len(),
        sigma.iter().map(|s| Complex64::new(1.0 / s, 0.0)),
    );
    Ok(v * CMatrix::from_diagonal(&inv) * u.adjoint())
}

/// Orthogonal projector onto the numerical column space of `m`.
///
/// Assembled from the left singular vectors kept by the rank cutoff, so it
/// is Hermitian and idempotent by construction (up to rounding).
pub fn orthogonal_projector_onto_range(
    m: &CMatrix,
    tol: &Tolerance,
) -> Result<CMatrix, NumericsError> {
    check_finite(m)?;
    tol.validate()?;
    let r = m.nrows();
    if r == 0 || m.ncols() == 0 {
        return Ok(CMatrix::zeros(r, r));
    }
    let (_, u, _) = thin_svd(m, tol)?;
    Ok(&u * u.adjoint())
}

/// XY - YX.
pub fn commutator(x: &CMatrix, y: &CMatrix) -> Result<CMatrix, NumericsError> {
    if x.nrows() != x.ncols() || y.nrows() != y.ncols() || x.nrows() != y.nrows() {
        return Err(NumericsError::DimensionMismatch {
            left_rows: x.nrows(),
            left_cols: x.ncols(),
            right_rows: y.nrows(),
            right_cols: y.ncols(),
        });
    }
    Ok(x * y - y * x)
}

/// m^k by repeated squaring; k = 0 yields the identity.
pub fn matrix_power(m: &CMatrix, k: u32) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Principal square root of a PSD-like matrix.
///
/// Hermitian inputs (within `residual_tol` relative to the spectral norm)
/// are symmetrized and eigendecomposed; eigenvalues below
/// `-residual_tol * ||M||` are rejected, small negatives are clamped to
/// zero. Other inputs go through a complex Schur form: the spectrum must sit
/// on the closed nonnegative real axis within the same tolerance, and the
/// upper-triangular root is recovered by the standard recurrence, which
/// reports a breakdown instead of dividing by a vanishing eigenvalue pair.
pub fn psd_sqrt(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix, NumericsError> {
    let n = require_square(m)?;
    check_finite(m)?;
    tol.validate()?;
    let scale = spectral_norm(m)?;
    if scale == 0.0 {
        return Ok(CMatrix::zeros(n, n));
    }
    let herm_defect = spectral_norm(&(m - m.adjoint()))?;
    if herm_defect <= tol.residual_tol * scale {
        let h = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, FACTOR_MAX_ITER)
            .ok_or(NumericsError::EigFailed)?;
        let floor = -tol.residual_tol * scale;
        for lam in eig.eigenvalues.iter() {
            if *lam < floor {
                return Err(NumericsError::SpectrumNegative {
                    detail: format!("Hermitian eigenvalue {lam:.3e} below {floor:.3e}"),
                });
            }
        }
        let sqrt_diag = DVector::from_iterator(
            n,
            eig.eigenvalues
                .iter()
                .map(|lam| Complex64::new(lam.max(0.0).sqrt(), 0.0)),
        );
        let v = &eig.eigenvectors;
        return Ok(v * CMatrix::from_diagonal(&sqrt_diag) * v.adjoint());
    }

    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, FACTOR_MAX_ITER)
        .ok_or(NumericsError::SchurFailed)?;
    let (q, t) = schur.unpack();
    let bound = tol.residual_tol * scale;
    for i in 0..n {
        let lam = t[(i, i)];
        if lam.re < -bound || lam.im.abs() > bound {
            return Err(NumericsError::SpectrumNegative {
                detail: format!(
                    "eigenvalue {:.6e}{:+.6e}i off the nonnegative real axis (tolerance {:.3e})",
                    lam.re, lam.im, bound
                ),
            });
        }
    }
    // Upper-triangular square root: diagonal first, then each superdiagonal.
    let mut s = CMatrix::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        s[(i, i)] = Complex64::new(lam.re.max(0.0), lam.im).sqrt();
    }
    let tiny_den = f64::EPSILON.sqrt() * scale.sqrt();
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut num = t[(i, j)];
            for k in i + 1..j {
                num -= s[(i, k)] * s[(k, j)];
            }
            let den = s[(i, i)] + s[(j, j)];
            if den.norm() <= tiny_den {
                if num.norm() <= bound {
                    s[(i, j)] = Complex64::new(0.0, 0.0);
                } else {
                    return Err(NumericsError::SqrtBreakdown { i, j });
                }
            } else {
                s[(i, j)] = num / den;
            }
        }
    }
    Ok(&q * s * q.adjoint())
}

/// Convenience for tests and report text.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    // Random rank-deficient complex products are the inputs on which the
    // bidiagonal SVD mispairs its singular vectors; see `thin_svd`. The
    // Penrose identities and the range projector must survive them.
    #[test]
    fn pseudo_inverse_and_projector_survive_rank_deficient_products() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut g = |r: usize, cdim: usize| -> CMatrix {
            let mut out = CMatrix::zeros(r, cdim);
            for i in 0..r {
                for j in 0..cdim {
                    out[(i, j)] =
                        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                }
            }
            out
        };
        let tol = Tolerance::default();
        for (dim, rank) in [(5usize, 2usize), (5, 4), (9, 2), (9, 4)] {
            let m = g(dim, rank) * g(rank, dim);
            assert_eq!(numerical_rank(&m, &tol).unwrap(), rank);
            let x = pseudo_inverse(&m, &tol).unwrap();
            let mx = &m * &x;
            let xm = &x * &m;
            let scale_m = spectral_norm(&m).unwrap();
            let scale_x = spectral_norm(&x).unwrap();
            assert!(spectral_norm(&(&m * &xm - &m)).unwrap() / scale_m < 1e-12);
            assert!(spectral_norm(&(&x * &mx - &x)).unwrap() / scale_x < 1e-12);
            assert!(spectral_norm(&(mx.adjoint() - &mx)).unwrap() < 1e-12);
            assert!(spectral_norm(&(xm.adjoint() - &xm)).unwrap() < 1e-12);
            let p = orthogonal_projector_onto_range(&m, &tol).unwrap();
            assert!(spectral_norm(&(&p * &p - &p)).unwrap() < 1e-12);
            assert!(spectral_norm(&(p.adjoint() - &p)).unwrap() < 1e-12);
            assert!(spectral_norm(&(&p * &m - &m)).unwrap() / scale_m < 1e-12);
        }
    }

    #[test]
    fn pseudo_inverse_of_identity_is_identity() {
        let tol = Tolerance::default();
        let id = CMatrix::identity(3, 3);
        let pinv = pseudo_inverse(&id, &tol).unwrap();
        assert!(max_abs_entry(&(pinv - id)) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_inverts_nonzero_diagonal_entries() {
        let tol = Tolerance::default();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(2.0)]));
        let pinv = pseudo_inverse(&a, &tol).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.5)]));
        assert!(max_abs_entry(&(pinv - expected)) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_of_zero_is_zero_transposed() {
        let tol = Tolerance::default();
        let z = CMatrix::zeros(4, 3);
        let pinv = pseudo_inverse(&z, &tol).unwrap();
        assert_eq!((pinv.nrows(), pinv.ncols()), (3, 4));
        assert_eq!(max_abs_entry(&pinv), 0.0);
    }

    #[test]
    fn projector_keeps_range_of_rank_deficient_diagonal() {
        let tol = Tolerance::default();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0)]));
        let p = orthogonal_projector_onto_range(&a, &tol).unwrap();
        assert!(max_abs_entry(&(&p - &a)) < 1e-12);
    }

    #[test]
    fn projector_of_single_column_is_normalized_outer_product() {
        let tol = Tolerance::default();
        let v = CMatrix::from_row_slice(3, 1, &[c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.5)]);
        let p = orthogonal_projector_onto_range(&v, &tol).unwrap();
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let expected = &v * v.adjoint() / re(norm_sq);
        assert!(max_abs_entry(&(p - expected)) < 1e-12);
    }

    #[test]
    fn psd_sqrt_of_diagonal_takes_entrywise_roots() {
        let tol = Tolerance::default();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![re(4.0), re(9.0)]));
        let r = psd_sqrt(&m, &tol).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![re(2.0), re(3.0)]));
        assert!(max_abs_entry(&(r - expected)) < 1e-12);
    }

    #[test]
    fn psd_sqrt_of_zero_is_zero() {
        let tol = Tolerance::default();
        let z = CMatrix::zeros(3, 3);
        let r = psd_sqrt(&z, &tol).unwrap();
        assert_eq!(max_abs_entry(&r), 0.0);
    }

    #[test]
    fn psd_sqrt_rejects_negative_spectrum() {
        let tol = Tolerance::default();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(-1.0)]));
        match psd_sqrt(&m, &tol) {
            Err(NumericsError::SpectrumNegative { .. }) => {}
            other => panic!("expected SpectrumNegative, got {other:?}"),
        }
    }

    #[test]
    fn psd_sqrt_general_branch_handles_nonnormal_input() {
        // Similar to diag(1, 4) but not Hermitian; principal root squares back.
        let tol = Tolerance::default();
        let s = CMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]);
        let s_inv = CMatrix::from_row_slice(2, 2, &[re(1.0), re(-1.0), re(0.0), re(1.0)]);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(4.0)]));
        let m = &s * d * &s_inv;
        let r = psd_sqrt(&m, &tol).unwrap();
        assert!(max_abs_entry(&(&r * &r - m)) < 1e-9);
    }

    #[test]
    fn psd_sqrt_reports_breakdown_on_nilpotent_input() {
        let tol = Tolerance::default();
        let m = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        match psd_sqrt(&m, &tol) {
            Err(NumericsError::SqrtBreakdown { .. }) => {}
            other => panic!("expected SqrtBreakdown, got {other:?}"),
        }
    }

    #[test]
    fn commutator_vanishes_for_commuting_pair() {
        let x = CMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(0.0), re(3.0)]);
        let y = &x * &x;
        let comm = commutator(&x, &y).unwrap();
        assert!(max_abs_entry(&comm) < 1e-12);
    }

    #[test]
    fn matrix_power_matches_iterated_product() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.1), re(1.0), c(0.0, -0.3), re(0.25)]);
        let mut direct = CMatrix::identity(2, 2);
        for _ in 0..7 {
            direct = &direct * &m;
        }
        assert!(max_abs_entry(&(matrix_power(&m, 7) - direct)) < 1e-12);
        assert!(max_abs_entry(&(matrix_power(&m, 0) - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn spectral_norm_of_diagonal_is_largest_entry() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![re(3.0), re(-5.0), re(1.0)]));
        assert!((spectral_norm(&m).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tolerance_rejects_inverted_zones() {
        assert!(Tolerance::new(1e-10, 1e-6, 1e-9).is_err());
        assert!(Tolerance::new(0.0, 1e-9, 1e-6).is_err());
        assert!(Tolerance::new(1e-10, 1e-9, 1e-6).is_ok());
    }

    #[test]
    fn verdict_zones_split_at_both_thresholds() {
        let tol = Tolerance::default();
        assert_eq!(Verdict::from_residual(1e-12, &tol), Verdict::Pass);
        assert_eq!(Verdict::from_residual(1e-7, &tol), Verdict::Indeterminate);
        assert_eq!(Verdict::from_residual(1e-3, &tol), Verdict::Fail);
    }
}
