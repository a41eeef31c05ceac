//! Instance generation, the statement registry, the verification suite, and
//! witness search.
//!
//! The module is organized around one idea: implication checks are useless on
//! generic random operators because interesting premises almost never hold by
//! accident. Every registry row therefore nominates generator families that
//! manufacture its premise by construction, and the suite tracks how many
//! premise-satisfied instances each row actually saw. A row whose premise was
//! never satisfied fails the suite; it proved nothing.

pub mod gen;
pub mod registry;
pub mod search;
pub mod suite;

use crate::classes::ClassError;
use crate::numerics::{CMatrix, NumericsError, Tolerance};
use crate::semihilbert::{a_adjoint, BoundOperator, MetricContext, SemiHilbertError};
use crate::shiftcalc::ShiftError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("unknown search target: {0}")]
    UnknownTarget(String),
    #[error("invalid suite config: {0}")]
    Config(String),
    #[error("family {family} cannot produce dim {dim}, rank {rank}")]
    Infeasible {
        family: &'static str,
        dim: usize,
        rank: usize,
    },
    #[error(transparent)]
    SemiHilbert(#[from] SemiHilbertError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// A fully assembled dense instance: validated metric, bound operator with
/// its cached A-adjoint, and optionally a second operator (the `S` of a
/// product statement or the `V` of an isometry statement) sharing the same
/// metric.
pub struct DenseBundle {
    pub ctx: MetricContext,
    pub op: BoundOperator,
    pub extra: Option<BoundOperator>,
}

/// Builds the bundle through the same validation pipeline user input takes.
pub fn assemble(
    a: CMatrix,
    t: CMatrix,
    extra: Option<CMatrix>,
    tol: Tolerance,
) -> Result<DenseBundle, LabError> {
    let ctx = MetricContext::new(a, tol)?;
    let op = a_adjoint(&ctx, &t)?;
    let extra = match extra {
        Some(s) => Some(a_adjoint(&ctx, &s)?),
        None => None,
    };
    Ok(DenseBundle { ctx, op, extra })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives a stream-local seed from a master seed and a salt. Used so every
/// (row, index, attempt) triple gets an independent, reproducible generator
/// stream.
pub fn mix_seed(master: u64, salt: u64) -> u64 {
    splitmix64(master ^ splitmix64(salt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_mixing_separates_nearby_salts() {
        let a = mix_seed(7, 0);
        let b = mix_seed(7, 1);
        let c = mix_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, mix_seed(7, 0));
    }
}
