//! Deterministic instance generators.
//!
//! Every family is a pure function of `(family, dim, rank, seed)`:
//! the same arguments produce bit-identical matrices on every run and
//! platform. Metric eigenvalues are drawn from `[0.25, 4]`, so the condition
//! number of the metric on its range is at most 16; that bound is what keeps
//! equivalent characterizations from drifting across verdict zones on any
//! generated instance.
//!
//! Families marked "rotated" draw a random unitary `U` and conjugate the
//! whole bundle by it, so block structure is not visible in the standard
//! basis. `scalar_power` stays unrotated: its point is that `T^n = c I` holds
//! to the last bit, and rotation would trade that exactness away.

use super::LabError;
use crate::numerics::{CMatrix, CVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// A generator family, with any per-instance parameters resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// Random metric of the requested rank; T random block-lower-triangular
    /// with respect to range(A) + null(A), hence in B_A. Rotated.
    GeneralInBa,
    /// Normal blocks per metric eigenvalue group: A-normal by construction.
    /// Rotated.
    ANormal,
    /// Unrotated scaled cycle blocks plus a root-of-unity diagonal: satisfies
    /// `T^n = c I` exactly and is A-normal for the blockwise-constant metric.
    ScalarPower { n: u32 },
    /// Blockwise structure commuting with A; all blocks normal. Rotated.
    CommutingNormal,
    /// Commuting with A; blocks either normal or nilpotent with nilpotency
    /// index at most `p`, so `T^p` is normal without T being so. Rotated.
    CommutingPowerNormal { p: u32 },
    /// Commuting with A; generic invertible-leaning blocks (no normality).
    /// Rotated.
    CommutingGeneric,
    /// Two operators diagonalized by one unitary per group: they commute,
    /// T is A-normal, and S is A-normal (or A-selfadjoint when the flag is
    /// set). Rotated; S is the bundle's extra operator.
    CommutingPair { selfadjoint: bool },
    /// T normal and commuting with the range projection; extra operator V an
    /// A-isometry with P V = V P. Rotated together.
    IsometryPair,
    /// The operator itself is an A-isometry with a zero kernel block, which
    /// makes `T^m (T^#)^m T^m = T^m` hold for every m. Rotated.
    PartialIsometryOp,
    /// The fixed two-dimensional worked example; any other dim is infeasible.
    PaperExample,
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::GeneralInBa => "general_in_BA",
            FamilySpec::ANormal => "a_normal",
            FamilySpec::ScalarPower { .. } => "scalar_power",
            FamilySpec::CommutingNormal => "commuting_with_A",
            FamilySpec::CommutingPowerNormal { .. } => "commuting_with_A_power",
            FamilySpec::CommutingGeneric => "commuting_with_A_generic",
            FamilySpec::CommutingPair { selfadjoint: true } => "commuting_pair_selfadjoint",
            FamilySpec::CommutingPair { selfadjoint: false } => "commuting_pair_normal",
            FamilySpec::IsometryPair => "isometry_V",
            FamilySpec::PartialIsometryOp => "partial_isometry",
            FamilySpec::PaperExample => "paper_example",
        }
    }
}

/// Raw generator output before validation/assembly.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub a: CMatrix,
    pub t: CMatrix,
    pub extra: Option<CMatrix>,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-12);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
}

fn cgauss(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gauss(rng), gauss(rng))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cgauss(rng))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n);
    m.qr().q()
}

/// Metric eigenvalue within the conditioning budget.
fn metric_eig(rng: &mut ChaCha8Rng) -> f64 {
    0.25 + 3.75 * rng.random::<f64>()
}

/// Random partition of `total` into parts of size 1..=3.
fn group_sizes(rng: &mut ChaCha8Rng, total: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = total;
    while left > 0 {
        let cap = left.min(3);
        let s = rng.random_range(1..=cap);
        sizes.push(s);
        left -= s;
    }
    sizes
}

/// A random normal block: unitary conjugate of a complex diagonal.
fn normal_block(rng: &mut ChaCha8Rng, size: usize) -> CMatrix {
    let w = random_unitary(rng, size);
    let d = CMatrix::from_diagonal(&CVector::from_fn(size, |_, _| cgauss(rng)));
    &w * d * w.adjoint()
}

fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

fn place_block(target: &mut CMatrix, at: usize, block: &CMatrix) {
    target
        .view_mut((at, at), (block.nrows(), block.ncols()))
        .copy_from(block);
}

/// Eigenvalue groups covering the whole space: `rank` dimensions get values
/// in [0.25, 4], the remainder one zero group.
struct Grouping {
    /// (offset, size, eigenvalue) triples; eigenvalue 0 marks the kernel.
    groups: Vec<(usize, usize, f64)>,
    dim: usize,
}

fn make_grouping(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Grouping {
    let mut groups = Vec::new();
    let mut offset = 0;
    for s in group_sizes(rng, rank) {
        groups.push((offset, s, metric_eig(rng)));
        offset += s;
    }
    if rank < dim {
        groups.push((offset, dim - rank, 0.0));
    }
    Grouping { groups, dim }
}

impl Grouping {
    fn metric(&self) -> CMatrix {
        let mut a = CMatrix::zeros(self.dim, self.dim);
        for &(off, size, eig) in &self.groups {
            for i in 0..size {
                a[(off + i, off + i)] = Complex64::new(eig, 0.0);
            }
        }
        a
    }
}

pub fn generate_dense(
    family: FamilySpec,
    dim: usize,
    rank: usize,
    seed: u64,
) -> Result<RawInstance, LabError> {
    assert!(rank >= 1 && rank <= dim, "rank must be in 1..=dim");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        FamilySpec::GeneralInBa => Ok(general_in_ba(&mut rng, dim, rank)),
        FamilySpec::ANormal => Ok(a_normal(&mut rng, dim, rank)),
        FamilySpec::ScalarPower { n } => Ok(scalar_power(&mut rng, dim, rank, n)),
        FamilySpec::CommutingNormal => Ok(commuting(&mut rng, dim, rank, BlockKind::Normal)),
        FamilySpec::CommutingPowerNormal { p } => {
            Ok(commuting(&mut rng, dim, rank, BlockKind::PowerNormal(p)))
        }
        FamilySpec::CommutingGeneric => Ok(commuting(&mut rng, dim, rank, BlockKind::Generic)),
        FamilySpec::CommutingPair { selfadjoint } => {
            Ok(commuting_pair(&mut rng, dim, rank, selfadjoint))
        }
        FamilySpec::IsometryPair => Ok(isometry_pair(&mut rng, dim, rank)),
        FamilySpec::PartialIsometryOp => Ok(partial_isometry(&mut rng, dim, rank)),
        FamilySpec::PaperExample => paper_example(dim, rank),
    }
}

fn rotate(rng: &mut ChaCha8Rng, a0: CMatrix, t0: CMatrix, s0: Option<CMatrix>) -> RawInstance {
    let u = random_unitary(rng, a0.nrows());
    let uh = u.adjoint();
    RawInstance {
        a: hermitize(&u * a0 * &uh),
        t: &u * t0 * &uh,
        extra: s0.map(|s| &u * s * &uh),
    }
}

fn general_in_ba(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> RawInstance {
    let mut a0 = CMatrix::zeros(dim, dim);
    for i in 0..rank {
        a0[(i, i)] = Complex64::new(metric_eig(rng), 0.0);
    }
    // columns over null(A) may not leak back into range(A)
    let mut t0 = random_matrix(rng, dim, dim);
    for i in 0..rank {
        for j in rank..dim {
            t0[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    rotate(rng, a0, t0, None)
}

fn a_normal(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> RawInstance {
    let grouping = make_grouping(rng, dim, rank);
    let a0 = grouping.metric();
    let mut t0 = CMatrix::zeros(dim, dim);
    for &(off, size, _) in &grouping.groups {
        place_block(&mut t0, off, &normal_block(rng, size));
    }
    rotate(rng, a0, t0, None)
}

fn scalar_power(rng: &mut ChaCha8Rng, dim: usize, rank: usize, n: u32) -> RawInstance {
    let n = n.max(1) as usize;
    let modulus = 0.6 + 0.8 * rng.random::<f64>();
    let phase = TAU * rng.random::<f64>();
    let mu = Complex64::from_polar(modulus, phase);

    let cycles = dim / n;
    let remainder = dim % n;
    let mut t = CMatrix::zeros(dim, dim);
    let mut a = CMatrix::zeros(dim, dim);

    // how many dimensions have to sit in the kernel
    let mut deficit = dim - rank;
    // diagonal remainder first: each entry costs one dimension
    let mut remainder_zero = remainder.min(deficit);
    deficit -= remainder_zero;
    // then whole cycle blocks, rounding rank up when n does not divide it
    let zero_blocks = (deficit / n).min(cycles);

    for b in 0..cycles {
        let off = b * n;
        for i in 0..n {
            t[(off + (i + 1) % n, off + i)] = mu;
        }
        let eig = if b >= cycles - zero_blocks {
            0.0
        } else {
            metric_eig(rng)
        };
        for i in 0..n {
            a[(off + i, off + i)] = Complex64::new(eig, 0.0);
        }
    }
    let base = cycles * n;
    for i in 0..remainder {
        let j = rng.random_range(0..n) as f64;
        let omega = Complex64::from_polar(1.0, TAU * j / n as f64);
        t[(base + i, base + i)] = mu * omega;
        let eig = if remainder_zero > 0 {
            remainder_zero -= 1;
            0.0
        } else {
            metric_eig(rng)
        };
        a[(base + i, base + i)] = Complex64::new(eig, 0.0);
    }

    RawInstance { a, t, extra: None }
}

enum BlockKind {
    Normal,
    PowerNormal(u32),
    Generic,
}

fn commuting(rng: &mut ChaCha8Rng, dim: usize, rank: usize, kind: BlockKind) -> RawInstance {
    let grouping = make_grouping(rng, dim, rank);
    let a0 = grouping.metric();
    let mut t0 = CMatrix::zeros(dim, dim);
    for &(off, size, _) in &grouping.groups {
        let block = match kind {
            BlockKind::Normal => normal_block(rng, size),
            BlockKind::PowerNormal(p) => {
                // a nilpotent Jordan cell of size s has T^s = 0, so any cell
                // no larger than p leaves T^p normal
                if size >= 2 && (size as u32) <= p && rng.random_bool(0.5) {
                    let mut j = CMatrix::zeros(size, size);
                    for i in 0..size - 1 {
                        j[(i, i + 1)] = cgauss(rng);
                    }
                    j
                } else {
                    normal_block(rng, size)
                }
            }
            BlockKind::Generic => {
                let shift = Complex64::from_polar(1.0 + rng.random::<f64>(), TAU * rng.random::<f64>());
                random_matrix(rng, size, size) + CMatrix::identity(size, size) * shift
            }
        };
        place_block(&mut t0, off, &block);
    }
    rotate(rng, a0, t0, None)
}

fn commuting_pair(
    rng: &mut ChaCha8Rng,
    dim: usize,
    rank: usize,
    selfadjoint: bool,
) -> RawInstance {
    let grouping = make_grouping(rng, dim, rank);
    let a0 = grouping.metric();
    let mut t0 = CMatrix::zeros(dim, dim);
    let mut s0 = CMatrix::zeros(dim, dim);
    for &(off, size, _) in &grouping.groups {
        let w = random_unitary(rng, size);
        let tau = CMatrix::from_diagonal(&CVector::from_fn(size, |_, _| cgauss(rng)));
        let sigma = CMatrix::from_diagonal(&CVector::from_fn(size, |_, _| {
            if selfadjoint {
                Complex64::new(gauss(rng), 0.0)
            } else {
                cgauss(rng)
            }
        }));
        place_block(&mut t0, off, &(&w * tau * w.adjoint()));
        place_block(&mut s0, off, &(&w * sigma * w.adjoint()));
    }
    rotate(rng, a0, t0, Some(s0))
}

/// Range-block isometry factor: `D^{-1/2} U D^{1/2}` satisfies
/// `V11^H D V11 = D`.
fn isometry_range_block(rng: &mut ChaCha8Rng, d: &[f64]) -> CMatrix {
    let r = d.len();
    let u = random_unitary(rng, r);
    let dh = CMatrix::from_diagonal(&CVector::from_fn(r, |i, _| {
        Complex64::new(d[i].sqrt(), 0.0)
    }));
    let dhi = CMatrix::from_diagonal(&CVector::from_fn(r, |i, _| {
        Complex64::new(1.0 / d[i].sqrt(), 0.0)
    }));
    dhi * u * dh
}

fn isometry_pair(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> RawInstance {
    // metric with per-group eigenvalues on the range, so T can be built
    // A-normal while V only needs the full range diagonal
    let mut grouping = make_grouping(rng, dim, rank);
    // kernel group present only when rank < dim
    let d: Vec<f64> = {
        let mut d = vec![0.0; dim];
        for &(off, size, eig) in &grouping.groups {
            for i in 0..size {
                d[off + i] = eig;
            }
        }
        d.truncate(rank);
        d
    };
    let a0 = grouping.metric();

    let mut t0 = CMatrix::zeros(dim, dim);
    for &(off, size, _) in &grouping.groups {
        place_block(&mut t0, off, &normal_block(rng, size));
    }

    let mut v0 = CMatrix::zeros(dim, dim);
    place_block(&mut v0, 0, &isometry_range_block(rng, &d));
    if rank < dim {
        place_block(&mut v0, rank, &random_matrix(rng, dim - rank, dim - rank));
    }
    grouping.groups.clear();
    rotate(rng, a0, t0, Some(v0))
}

fn partial_isometry(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> RawInstance {
    let d: Vec<f64> = (0..rank).map(|_| metric_eig(rng)).collect();
    let mut a0 = CMatrix::zeros(dim, dim);
    for (i, &eig) in d.iter().enumerate() {
        a0[(i, i)] = Complex64::new(eig, 0.0);
    }
    let mut v0 = CMatrix::zeros(dim, dim);
    place_block(&mut v0, 0, &isometry_range_block(rng, &d));
    // kernel block stays zero: that is what makes T^m (T^#)^m T^m = T^m
    rotate(rng, a0, v0, None)
}

fn paper_example(dim: usize, rank: usize) -> Result<RawInstance, LabError> {
    if dim != 2 || rank != 2 {
        return Err(LabError::Infeasible {
            family: "paper_example",
            dim,
            rank,
        });
    }
    let a = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        ],
    );
    let t = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
        ],
    );
    Ok(RawInstance { a, t, extra: None })
}
