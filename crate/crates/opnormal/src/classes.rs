//! Residual predicates for the operator class hierarchy.
//!
//! The central families are parameterized by an index pair (n, m):
//!
//! * (n,m)-A-normal: `T^n` commutes with `(T^#)^m`,
//! * (n,m)-A-quasinormal: `T^n` commutes with `(T^#)^m T`.
//!
//! Every predicate reports a residual scaled by the spectral norms of the
//! commutator's factors, then zones it through the shared [`Tolerance`].
//! Powers of the adjoint are always powers of the cached `T^#`; taking the
//! adjoint of a power instead changes the answer whenever the metric is
//! rank-deficient.

use crate::numerics::{
    commutator, matrix_power, psd_sqrt, scaled_residual, spectral_norm, CMatrix, NumericsError,
    Tolerance, Verdict,
};
use crate::semihilbert::{BoundOperator, MetricContext, SemiHilbertError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest exponent the index pairs admit; keeps power chains and suite
/// windows bounded.
pub const MAX_INDEX: u32 = 8;

#[derive(Debug, Error)]
pub enum ClassError {
    #[error("class index ({n}, {m}) outside 1..={MAX_INDEX}")]
    BadIndex { n: u32, m: u32 },
    #[error(transparent)]
    SemiHilbert(#[from] SemiHilbertError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Validated index pair (n, m), both in `1..=MAX_INDEX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassIndex {
    n: u32,
    m: u32,
}

impl ClassIndex {
    pub fn new(n: u32, m: u32) -> Result<Self, ClassError> {
        if n == 0 || m == 0 || n > MAX_INDEX || m > MAX_INDEX {
            return Err(ClassError::BadIndex { n, m });
        }
        Ok(ClassIndex { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn swapped(&self) -> ClassIndex {
        ClassIndex {
            n: self.m,
            m: self.n,
        }
    }
}

impl std::fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n, self.m)
    }
}

/// A zoned verdict together with the scaled residual that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub verdict: Verdict,
    pub residual: f64,
}

impl ClassVerdict {
    fn from_residual(residual: f64, tol: &Tolerance) -> Self {
        ClassVerdict {
            verdict: Verdict::from_residual(residual, tol),
            residual,
        }
    }
}

/// `||[T^n, (T^#)^m]|| / (||T||^n ||T^#||^m)`.
pub fn nm_normal_residual(op: &BoundOperator, idx: ClassIndex) -> Result<f64, ClassError> {
    let comm = commutator(&op.t_pow(idx.n), &op.sharp_pow(idx.m))?;
    let scale = op.t_norm().powi(idx.n as i32) * op.t_sharp_norm().powi(idx.m as i32);
    Ok(scaled_residual(spectral_norm(&comm)?, scale))
}

pub fn nm_normal(
    ctx: &MetricContext,
    op: &BoundOperator,
    idx: ClassIndex,
) -> Result<ClassVerdict, ClassError> {
    Ok(ClassVerdict::from_residual(
        nm_normal_residual(op, idx)?,
        ctx.tol(),
    ))
}

/// `||[T^n, (T^#)^m T]|| / (||T||^n ||T^#||^m ||T||)`.
pub fn nm_quasinormal_residual(op: &BoundOperator, idx: ClassIndex) -> Result<f64, ClassError> {
    let right = op.sharp_pow(idx.m) * op.t();
    let comm = commutator(&op.t_pow(idx.n), &right)?;
    let scale =
        op.t_norm().powi(idx.n as i32) * op.t_sharp_norm().powi(idx.m as i32) * op.t_norm();
    Ok(scaled_residual(spectral_norm(&comm)?, scale))
}

pub fn nm_quasinormal(
    ctx: &MetricContext,
    op: &BoundOperator,
    idx: ClassIndex,
) -> Result<ClassVerdict, ClassError> {
    Ok(ClassVerdict::from_residual(
        nm_quasinormal_residual(op, idx)?,
        ctx.tol(),
    ))
}

/// A-normal is the (1,1) case.
pub fn a_normal(ctx: &MetricContext, op: &BoundOperator) -> Result<ClassVerdict, ClassError> {
    nm_normal(ctx, op, ClassIndex::new(1, 1)?)
}

/// `A T = T^H A`.
pub fn a_selfadjoint(ctx: &MetricContext, op: &BoundOperator) -> Result<ClassVerdict, ClassError> {
    let defect = ctx.a() * op.t() - op.t().adjoint() * ctx.a();
    let residual = scaled_residual(spectral_norm(&defect)?, ctx.a_norm() * op.t_norm());
    Ok(ClassVerdict::from_residual(residual, ctx.tol()))
}

/// `T^# T = P`. The unit summand in the scale keeps the comparison against
/// the projector (norm one) meaningful when T is far from isometric.
pub fn a_isometry(ctx: &MetricContext, op: &BoundOperator) -> Result<ClassVerdict, ClassError> {
    let defect = op.t_sharp() * op.t() - ctx.p();
    let residual = scaled_residual(
        spectral_norm(&defect)?,
        op.t_sharp_norm() * op.t_norm() + 1.0,
    );
    Ok(ClassVerdict::from_residual(residual, ctx.tol()))
}

/// Both T and T^# are A-isometries. The second condition is evaluated with
/// `(T^#)^# = A^+ (T^#)^H A`, which always exists.
pub fn a_unitary(ctx: &MetricContext, op: &BoundOperator) -> Result<ClassVerdict, ClassError> {
    let fwd = a_isometry(ctx, op)?;
    let sharp_sharp = ctx.a_dagger() * op.t_sharp().adjoint() * ctx.a();
    let defect = &sharp_sharp * op.t_sharp() - ctx.p();
    let back = scaled_residual(
        spectral_norm(&defect)?,
        spectral_norm(&sharp_sharp)? * op.t_sharp_norm() + 1.0,
    );
    Ok(ClassVerdict::from_residual(fwd.residual.max(back), ctx.tol()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicClasses {
    pub a_normal: ClassVerdict,
    pub a_selfadjoint: ClassVerdict,
    pub a_isometry: ClassVerdict,
    pub a_unitary: ClassVerdict,
}

pub fn basic_classes(ctx: &MetricContext, op: &BoundOperator) -> Result<BasicClasses, ClassError> {
    Ok(BasicClasses {
        a_normal: a_normal(ctx, op)?,
        a_selfadjoint: a_selfadjoint(ctx, op)?,
        a_isometry: a_isometry(ctx, op)?,
        a_unitary: a_unitary(ctx, op)?,
    })
}

/// `(T + T^#) / 2`.
pub fn re_a(op: &BoundOperator) -> CMatrix {
    (op.t() + op.t_sharp()).map(|z| z * 0.5)
}

/// `(T - T^#) / (2i)`.
pub fn im_a(op: &BoundOperator) -> CMatrix {
    (op.t() - op.t_sharp()).map(|z| z * Complex64::new(0.0, -0.5))
}

/// The three combinations the commutation checks revolve around:
/// `X = T^n + (T^#)^m`, `Y = T^n - (T^#)^m`, `Z = T^n (T^#)^m`.
pub fn build_xyz(
    op: &BoundOperator,
    idx: ClassIndex,
) -> Result<(CMatrix, CMatrix, CMatrix), ClassError> {
    let tn = op.t_pow(idx.n);
    let sm = op.sharp_pow(idx.m);
    Ok((&tn + &sm, &tn - &sm, tn * sm))
}

/// `C_m = sqrt((T^#)^m T^m)`, with the square root's spectrum diagnostics
/// passed through.
pub fn c_operator(
    ctx: &MetricContext,
    op: &BoundOperator,
    m: u32,
) -> Result<CMatrix, ClassError> {
    let prod = op.sharp_pow(m) * op.t_pow(m);
    Ok(psd_sqrt(&prod, ctx.tol())?)
}

/// `B_m = sqrt(T^m (T^#)^m)`.
pub fn b_operator(
    ctx: &MetricContext,
    op: &BoundOperator,
    m: u32,
) -> Result<CMatrix, ClassError> {
    let prod = op.t_pow(m) * op.sharp_pow(m);
    Ok(psd_sqrt(&prod, ctx.tol())?)
}

/// Powers of a plain matrix, re-exported where class code composes products
/// that are not operator powers (e.g. products of two different operators).
pub fn power(m: &CMatrix, k: u32) -> CMatrix {
    matrix_power(m, k)
}
