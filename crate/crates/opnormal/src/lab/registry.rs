//! The statement registry: every implication and characterization from the
//! operator-class theory, encoded as a premise/conclusion check over one
//! assembled instance.
//!
//! Conventions shared by all rows:
//! - a premise is a list of three-zone verdicts; all pass means *satisfied*,
//!   any definite fail means *vacuous*, anything else *indeterminate*;
//! - the conclusion is evaluated regardless but only counts when the premise
//!   was satisfied, and a vacuous premise never counts as a pass;
//! - equivalence rows score *agreement*: both sides decisive and equal is a
//!   pass, both decisive and different is a fail (that would be a genuine
//!   counterexample), anything indeterminate stays indeterminate;
//! - every residual that fed a verdict is recorded under a stable name.

use super::{DenseBundle, LabError};
use crate::classes::{
    self, build_xyz, ClassIndex, MAX_INDEX,
};
use crate::numerics::{
    commutator, scaled_residual, spectral_norm, CMatrix, Tolerance, Verdict,
};
use crate::semihilbert::{a_adjoint, BoundOperator};
use num_complex::Complex64;
use num_integer::Integer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiseStatus {
    Satisfied,
    Vacuous,
    Indeterminate,
}

/// Outcome of one registry check on one instance.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub premise: PremiseStatus,
    pub conclusion: Verdict,
    pub residuals: Vec<(String, f64)>,
}

/// Every registry row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowId {
    Thm21Fwd,
    Thm21Bwd,
    Pro21Swap,
    Th21Lcm,
    Pro22Xyz,
    ConjIsometry,
    ProdSelfadj,
    ProdNormal,
    Pro24Induction,
    Pro25Step,
    Pro26Injective,
    Pro27Dual,
    Pro29SharpInjective,
    Th23Partial,
    SqIdentityNormal,
    ProAaFuglede,
    CorAaLcm,
    Thm31Fwd,
    Thm31Bwd,
    Pro31Product,
    Pro33Step,
    Th31Partial,
    Pro34One,
    Pro34Two,
    Pro35Induction,
    Th37Equiv,
    Th22Bcond,
    SqIdentityQn,
    RemarkInclusion,
}

pub const ALL_ROWS: [RowId; 29] = [
    RowId::Thm21Fwd,
    RowId::Thm21Bwd,
    RowId::Pro21Swap,
    RowId::Th21Lcm,
    RowId::Pro22Xyz,
    RowId::ConjIsometry,
    RowId::ProdSelfadj,
    RowId::ProdNormal,
    RowId::Pro24Induction,
    RowId::Pro25Step,
    RowId::Pro26Injective,
    RowId::Pro27Dual,
    RowId::Pro29SharpInjective,
    RowId::Th23Partial,
    RowId::SqIdentityNormal,
    RowId::ProAaFuglede,
    RowId::CorAaLcm,
    RowId::Thm31Fwd,
    RowId::Thm31Bwd,
    RowId::Pro31Product,
    RowId::Pro33Step,
    RowId::Th31Partial,
    RowId::Pro34One,
    RowId::Pro34Two,
    RowId::Pro35Induction,
    RowId::Th37Equiv,
    RowId::Th22Bcond,
    RowId::SqIdentityQn,
    RowId::RemarkInclusion,
];

impl RowId {
    pub fn id(&self) -> &'static str {
        match self {
            RowId::Thm21Fwd => "thm2_1_fwd",
            RowId::Thm21Bwd => "thm2_1_bwd",
            RowId::Pro21Swap => "pro2_1_swap",
            RowId::Th21Lcm => "th21_lcm",
            RowId::Pro22Xyz => "pro22_xyz",
            RowId::ConjIsometry => "conj_isometry",
            RowId::ProdSelfadj => "prod_selfadj",
            RowId::ProdNormal => "prod_normal",
            RowId::Pro24Induction => "pro24_induction",
            RowId::Pro25Step => "pro25_step",
            RowId::Pro26Injective => "pro26_injective",
            RowId::Pro27Dual => "pro27_dual",
            RowId::Pro29SharpInjective => "pro29_sharp_injective",
            RowId::Th23Partial => "th23_partial",
            RowId::SqIdentityNormal => "sq_identity_normal",
            RowId::ProAaFuglede => "proAA_fuglede",
            RowId::CorAaLcm => "corAA_lcm",
            RowId::Thm31Fwd => "thm3_1_fwd",
            RowId::Thm31Bwd => "thm3_1_bwd",
            RowId::Pro31Product => "pro3_1_product",
            RowId::Pro33Step => "pro33_step",
            RowId::Th31Partial => "th31_partial",
            RowId::Pro34One => "pro34_1",
            RowId::Pro34Two => "pro34_2",
            RowId::Pro35Induction => "pro35_induction",
            RowId::Th37Equiv => "th37_equiv",
            RowId::Th22Bcond => "th2_2_bcond",
            RowId::SqIdentityQn => "sq_identity_qn",
            RowId::RemarkInclusion => "remark_inclusion",
        }
    }

    pub fn from_id(id: &str) -> Result<RowId, LabError> {
        ALL_ROWS
            .iter()
            .copied()
            .find(|r| r.id() == id)
            .ok_or_else(|| LabError::UnknownCheck(id.to_string()))
    }

    /// Whether the row's premise needs a full-rank metric to be satisfiable.
    pub fn needs_full_rank(&self) -> bool {
        matches!(self, RowId::Pro29SharpInjective | RowId::Pro34Two)
    }

    /// Whether the row operates on a two-operator bundle.
    pub fn needs_extra(&self) -> bool {
        matches!(
            self,
            RowId::ConjIsometry | RowId::ProdSelfadj | RowId::ProdNormal | RowId::Pro31Product
        )
    }

    /// The index pairs this row runs at, for given bounds. Rows that consume
    /// only one component, or that would push an exponent past the supported
    /// maximum, restrict the grid accordingly.
    pub fn indices(&self, n_max: u32, m_max: u32) -> Vec<ClassIndex> {
        let grid = |pred: &dyn Fn(u32, u32) -> bool| -> Vec<ClassIndex> {
            let mut out = Vec::new();
            for n in 1..=n_max {
                for m in 1..=m_max {
                    if pred(n, m) {
                        out.push(ClassIndex::new(n, m).expect("bounds validated"));
                    }
                }
            }
            out
        };
        match self {
            RowId::Pro24Induction | RowId::Pro35Induction => (1..=m_max)
                .map(|m| ClassIndex::new(2, m).expect("bounds validated"))
                .collect(),
            RowId::Pro25Step | RowId::Pro33Step => grid(&|n, _| n + 2 <= MAX_INDEX),
            RowId::Pro26Injective | RowId::Pro34One => grid(&|n, _| n + 1 <= MAX_INDEX),
            RowId::Pro27Dual => grid(&|_, m| m + 2 <= MAX_INDEX),
            RowId::Pro29SharpInjective | RowId::Pro34Two => grid(&|_, m| m + 1 <= MAX_INDEX),
            RowId::Th23Partial => grid(&|n, m| n + m <= MAX_INDEX),
            // The quasinormal partial-isometry step is stated for n >= m only.
            RowId::Th31Partial => grid(&|n, m| n >= m && n + m <= MAX_INDEX),
            RowId::ProdSelfadj | RowId::ProdNormal => (1..=n_max)
                .map(|n| ClassIndex::new(n, n).expect("bounds validated"))
                .collect(),
            RowId::ProAaFuglede => (1..=n_max)
                .map(|n| ClassIndex::new(n, 1).expect("bounds validated"))
                .collect(),
            _ => grid(&|_, _| true),
        }
    }

    /// Generator families nominated for this row's premise, already
    /// parameterized for the index pair.
    pub fn families(&self, idx: ClassIndex) -> Vec<super::gen::FamilySpec> {
        use super::gen::FamilySpec as F;
        match self {
            RowId::Pro22Xyz => vec![F::GeneralInBa, F::ANormal],
            RowId::ConjIsometry => vec![F::IsometryPair],
            RowId::ProdSelfadj => vec![F::CommutingPair { selfadjoint: true }],
            RowId::ProdNormal | RowId::Pro31Product => {
                vec![F::CommutingPair { selfadjoint: false }]
            }
            RowId::Th23Partial | RowId::Th31Partial => vec![F::PartialIsometryOp],
            RowId::ProAaFuglede => vec![F::CommutingPowerNormal { p: idx.n() }],
            RowId::CorAaLcm => vec![F::CommutingPowerNormal {
                p: idx.n().min(idx.m()),
            }],
            RowId::Th37Equiv => vec![F::CommutingNormal, F::CommutingGeneric],
            RowId::Th22Bcond => vec![F::CommutingNormal],
            _ => vec![F::ANormal, F::ScalarPower { n: idx.n() }],
        }
    }
}

/// Floor that keeps scaled residuals meaningful for near-zero operators.
fn rel(diff: &CMatrix, scale: f64) -> Result<f64, LabError> {
    Ok(scaled_residual(spectral_norm(diff)?, scale))
}

struct Trace {
    tol: Tolerance,
    residuals: Vec<(String, f64)>,
}

impl Trace {
    fn new(tol: Tolerance) -> Self {
        Trace {
            tol,
            residuals: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, residual: f64) -> Verdict {
        self.residuals.push((name.into(), residual));
        Verdict::from_residual(residual, &self.tol)
    }

    fn record_bool(&mut self, name: impl Into<String>, ok: bool) -> Verdict {
        // rank-style decisions are crisp: encode as a zone-extremal residual
        let residual = if ok { 0.0 } else { 1.0 };
        self.residuals.push((name.into(), residual));
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

fn combine_premise(vs: &[Verdict]) -> PremiseStatus {
    if vs.iter().any(|v| v.is_fail()) {
        PremiseStatus::Vacuous
    } else if vs.iter().all(|v| v.is_pass()) {
        PremiseStatus::Satisfied
    } else {
        PremiseStatus::Indeterminate
    }
}

pub(super) fn combine_conclusion(vs: &[Verdict]) -> Verdict {
    if vs.iter().any(|v| v.is_fail()) {
        Verdict::Fail
    } else if vs.iter().all(|v| v.is_pass()) {
        Verdict::Pass
    } else {
        Verdict::Indeterminate
    }
}

/// Both sides decisive and equal: the biconditional held.
pub(super) fn agreement(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Pass, Verdict::Pass) | (Verdict::Fail, Verdict::Fail) => Verdict::Pass,
        (Verdict::Pass, Verdict::Fail) | (Verdict::Fail, Verdict::Pass) => Verdict::Fail,
        _ => Verdict::Indeterminate,
    }
}

fn nn(trace: &mut Trace, op: &BoundOperator, idx: ClassIndex, tag: &str) -> Result<Verdict, LabError> {
    let r = classes::nm_normal_residual(op, idx)?;
    Ok(trace.record(format!("{tag}:normal({},{})", idx.n(), idx.m()), r))
}

fn qn(trace: &mut Trace, op: &BoundOperator, idx: ClassIndex, tag: &str) -> Result<Verdict, LabError> {
    let r = classes::nm_quasinormal_residual(op, idx)?;
    Ok(trace.record(format!("{tag}:quasinormal({},{})", idx.n(), idx.m()), r))
}

fn identity_minus_p(b: &DenseBundle) -> CMatrix {
    CMatrix::identity(b.ctx.dim(), b.ctx.dim()) - b.ctx.p()
}

/// Characterization condition pair for the normal class: form equality
/// `((T^#)^n)^H A (T^#)^m = (T^m)^H A T^n` and range condition
/// `(I - P) T^n (T^#)^m = 0`. Returns the two scaled residuals.
pub fn normal_characterization_residuals(
    b: &DenseBundle,
    idx: ClassIndex,
) -> Result<(f64, f64), LabError> {
    let op = &b.op;
    let (n, m) = (idx.n(), idx.m());
    let sn = op.sharp_pow(n);
    let sm = op.sharp_pow(m);
    let tn = op.t_pow(n);
    let tm = op.t_pow(m);
    let lhs = sn.adjoint() * b.ctx.a() * &sm;
    let rhs = tm.adjoint() * b.ctx.a() * &tn;
    let scale1 = b.ctx.a_norm()
        * (op.t_sharp_norm().powi((n + m) as i32) + op.t_norm().powi((n + m) as i32));
    let r1 = rel(&(lhs - rhs), scale1)?;

    let range_defect = identity_minus_p(b) * &tn * &sm;
    let scale2 = op.t_norm().powi(n as i32) * op.t_sharp_norm().powi(m as i32);
    let r2 = rel(&range_defect, scale2)?;
    Ok((r1, r2))
}

/// Quasinormal analog, with the extra factor T on both sides:
/// `((T^#)^n)^H A (T^#)^m T = (T^m)^H A T^{n+1}` and
/// `(I - P) T^n (T^#)^m T = 0`.
pub fn quasinormal_characterization_residuals(
    b: &DenseBundle,
    idx: ClassIndex,
) -> Result<(f64, f64), LabError> {
    let op = &b.op;
    let (n, m) = (idx.n(), idx.m());
    let sn = op.sharp_pow(n);
    let sm = op.sharp_pow(m);
    let tn = op.t_pow(n);
    let tm = op.t_pow(m);
    let lhs = sn.adjoint() * b.ctx.a() * &sm * op.t();
    let rhs = tm.adjoint() * b.ctx.a() * op.t_pow(n + 1);
    let scale1 = b.ctx.a_norm()
        * (op.t_sharp_norm().powi((n + m) as i32) * op.t_norm()
            + op.t_norm().powi((n + m + 1) as i32));
    let r1 = rel(&(lhs - rhs), scale1)?;

    let range_defect = identity_minus_p(b) * &tn * &sm * op.t();
    let scale2 = op.t_norm().powi((n + 1) as i32) * op.t_sharp_norm().powi(m as i32);
    let r2 = rel(&range_defect, scale2)?;
    Ok((r1, r2))
}

fn commutation_residual(x: &CMatrix, y: &CMatrix) -> Result<f64, LabError> {
    let c = commutator(x, y)?;
    let scale = 2.0 * spectral_norm(x)? * spectral_norm(y)?;
    rel(&c, scale)
}

/// `A T = T A` residual.
fn metric_commutation(trace: &mut Trace, b: &DenseBundle) -> Result<Verdict, LabError> {
    let r = commutation_residual(b.ctx.a(), b.op.t())?;
    Ok(trace.record("premise:AT_eq_TA", r))
}

/// `P T = T P` residual (the null space of A reduces T).
fn projector_commutation(trace: &mut Trace, b: &DenseBundle, t: &CMatrix, tag: &str) -> Result<Verdict, LabError> {
    let c = commutator(b.ctx.p(), t)?;
    let r = rel(&c, 2.0 * spectral_norm(t)?)?;
    Ok(trace.record(tag.to_string(), r))
}

fn full_rank(trace: &mut Trace, m: &CMatrix, tol: &Tolerance, tag: &str) -> Result<Verdict, LabError> {
    let rank = crate::numerics::numerical_rank(m, tol)?;
    Ok(trace.record_bool(tag.to_string(), rank == m.nrows()))
}

/// Re-assembles a plain matrix as a bound operator on the bundle's metric.
/// `None` when the adjoint pipeline rejects it; callers treat that as
/// indeterminate rather than as evidence.
fn try_rebind(b: &DenseBundle, m: &CMatrix) -> Option<BoundOperator> {
    a_adjoint(&b.ctx, m).ok()
}

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

fn neg_half_i() -> Complex64 {
    Complex64::new(0.0, -0.5)
}

/// Runs one registry row on one instance at one index pair.
pub fn run_check(
    row: RowId,
    b: &DenseBundle,
    idx: ClassIndex,
) -> Result<CheckOutcome, LabError> {
    let tol = *b.ctx.tol();
    let mut trace = Trace::new(tol);
    let t = &mut trace;
    let op = &b.op;
    let (n, m) = (idx.n(), idx.m());

    let (premise, conclusion) = match row {
        RowId::Thm21Fwd => {
            let p = vec![nn(t, op, idx, "premise")?];
            let (r1, r2) = normal_characterization_residuals(b, idx)?;
            let c = vec![
                t.record("conclusion:form_equality", r1),
                t.record("conclusion:range_condition", r2),
            ];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Thm21Bwd => {
            let (r1, r2) = normal_characterization_residuals(b, idx)?;
            let p = vec![
                t.record("premise:form_equality", r1),
                t.record("premise:range_condition", r2),
            ];
            let c = vec![nn(t, op, idx, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Thm31Fwd => {
            let p = vec![qn(t, op, idx, "premise")?];
            let (r1, r2) = quasinormal_characterization_residuals(b, idx)?;
            let c = vec![
                t.record("conclusion:form_equality", r1),
                t.record("conclusion:range_condition", r2),
            ];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Thm31Bwd => {
            let (r1, r2) = quasinormal_characterization_residuals(b, idx)?;
            let p = vec![
                t.record("premise:form_equality", r1),
                t.record("premise:range_condition", r2),
            ];
            let c = vec![qn(t, op, idx, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro21Swap => {
            let inv = identity_minus_p(b) * op.t() * b.ctx.p();
            let p = vec![t.record("premise:kernel_invariance", rel(&inv, op.t_norm())?)];
            let fwd = nn(t, op, idx, "side")?;
            let bwd = nn(t, op, idx.swapped(), "side")?;
            (combine_premise(&p), agreement(fwd, bwd))
        }
        RowId::Th21Lcm => {
            let p = vec![nn(t, op, idx, "premise")?];
            let mut c = Vec::new();
            for k in [n.lcm(&m), n * m] {
                match try_rebind(b, &op.t_pow(k)) {
                    Some(pk) => c.push(nn(t, &pk, ClassIndex::new(1, 1)?, &format!("conclusion:power_{k}"))?),
                    None => c.push(Verdict::Indeterminate),
                }
            }
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro22Xyz => {
            let (x, y, z) = build_xyz(op, idx)?;
            let tn = op.t_pow(n);
            let v_nn = nn(t, op, idx, "side")?;
            let v_xy = t.record("side:comm_x_y", commutation_residual(&x, &y)?);
            let v_tx = t.record("side:comm_tn_x", commutation_residual(&tn, &x)?);
            let v_ty = t.record("side:comm_tn_y", commutation_residual(&tn, &y)?);
            let sides = [v_nn, v_xy, v_tx, v_ty];
            if sides.iter().any(|v| *v == Verdict::Indeterminate) {
                (PremiseStatus::Indeterminate, Verdict::Indeterminate)
            } else {
                let mut c = vec![
                    agreement(v_nn, v_xy),
                    agreement(v_nn, v_tx),
                    agreement(v_nn, v_ty),
                ];
                if v_nn.is_pass() {
                    c.push(t.record("conclusion:comm_z_x", commutation_residual(&z, &x)?));
                    c.push(t.record("conclusion:comm_z_y", commutation_residual(&z, &y)?));
                }
                (PremiseStatus::Satisfied, combine_conclusion(&c))
            }
        }
        RowId::ConjIsometry => {
            let v = b.extra.as_ref().expect("isometry bundle");
            let iso = classes::a_isometry(&b.ctx, v)?;
            let mut p = vec![t.record("premise:a_isometry", iso.residual)];
            p.push(projector_commutation(t, b, op.t(), "premise:PT_eq_TP")?);
            p.push(projector_commutation(t, b, v.t(), "premise:PV_eq_VP")?);
            p.push(nn(t, op, idx, "premise")?);
            let conjugated = v.t() * op.t() * v.t_sharp();
            let c = match try_rebind(b, &conjugated) {
                Some(q) => vec![nn(t, &q, idx, "conclusion:conjugated")?],
                None => vec![Verdict::Indeterminate],
            };
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::ProdSelfadj | RowId::ProdNormal => {
            let s = b.extra.as_ref().expect("pair bundle");
            let diag = ClassIndex::new(n, n)?;
            let mut p = vec![
                t.record("premise:TS_eq_ST", commutation_residual(op.t(), s.t())?),
                t.record(
                    "premise:S_Tsharp_comm",
                    commutation_residual(s.t(), op.t_sharp())?,
                ),
            ];
            p.push(nn(t, op, diag, "premise")?);
            let s_class = if matches!(row, RowId::ProdSelfadj) {
                t.record(
                    "premise:S_a_selfadjoint",
                    classes::a_selfadjoint(&b.ctx, s)?.residual,
                )
            } else {
                t.record("premise:S_a_normal", classes::a_normal(&b.ctx, s)?.residual)
            };
            p.push(s_class);
            let prod = op.t() * s.t();
            let c = match try_rebind(b, &prod) {
                Some(ts) => vec![nn(t, &ts, diag, "conclusion:product")?],
                None => vec![Verdict::Indeterminate],
            };
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro31Product => {
            let s = b.extra.as_ref().expect("pair bundle");
            let mut p = vec![
                t.record("premise:TS_eq_ST", commutation_residual(op.t(), s.t())?),
                t.record(
                    "premise:S_Tsharp_comm",
                    commutation_residual(s.t(), op.t_sharp())?,
                ),
                t.record(
                    "premise:T_Ssharp_comm",
                    commutation_residual(op.t(), s.t_sharp())?,
                ),
            ];
            p.push(nn(t, op, idx, "premise:T")?);
            p.push(nn(t, s, idx, "premise:S")?);
            let prod = s.t() * op.t();
            let c = match try_rebind(b, &prod) {
                Some(st) => vec![qn(t, &st, idx, "conclusion:product")?],
                None => vec![Verdict::Indeterminate],
            };
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro24Induction | RowId::Pro35Induction => {
            let quasi = matches!(row, RowId::Pro35Induction);
            let check = if quasi { qn } else { nn };
            let p = vec![
                check(t, op, ClassIndex::new(2, m)?, "premise")?,
                check(t, op, ClassIndex::new(3, m)?, "premise")?,
            ];
            let mut c = Vec::new();
            for k in 4..=MAX_INDEX {
                c.push(check(t, op, ClassIndex::new(k, m)?, "conclusion")?);
            }
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro25Step | RowId::Pro33Step => {
            let quasi = matches!(row, RowId::Pro33Step);
            let check = if quasi { qn } else { nn };
            let p = vec![
                check(t, op, idx, "premise")?,
                check(t, op, ClassIndex::new(n + 1, m)?, "premise")?,
            ];
            let c = vec![check(t, op, ClassIndex::new(n + 2, m)?, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro26Injective | RowId::Pro34One => {
            let quasi = matches!(row, RowId::Pro34One);
            let check = if quasi { qn } else { nn };
            let mut p = vec![full_rank(t, op.t(), &tol, "premise:T_injective")?];
            p.push(check(t, op, idx, "premise")?);
            p.push(check(t, op, ClassIndex::new(n + 1, m)?, "premise")?);
            let c = vec![check(t, op, ClassIndex::new(1, m)?, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro27Dual => {
            let inv = identity_minus_p(b) * op.t() * b.ctx.p();
            let mut p = vec![t.record("premise:kernel_invariance", rel(&inv, op.t_norm())?)];
            p.push(nn(t, op, idx, "premise")?);
            p.push(nn(t, op, ClassIndex::new(n, m + 1)?, "premise")?);
            let c = vec![nn(t, op, ClassIndex::new(n, m + 2)?, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Pro29SharpInjective => {
            let mut p = vec![full_rank(t, op.t_sharp(), &tol, "premise:Tsharp_injective")?];
            p.push(nn(t, op, idx, "premise")?);
            p.push(nn(t, op, ClassIndex::new(n, m + 1)?, "premise")?);
            let c = vec![nn(t, op, ClassIndex::new(n, 1)?, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Th23Partial => {
            let mut p = vec![nn(t, op, idx, "premise")?];
            let mut c = Vec::new();
            if n >= m {
                let tm = op.t_pow(m);
                let defect = &tm * op.sharp_pow(m) * &tm - &tm;
                let scale = op.t_norm().powi(m as i32)
                    * (1.0 + op.t_norm().powi(m as i32) * op.t_sharp_norm().powi(m as i32));
                p.push(t.record("premise:partial_isometry_Tm", rel(&defect, scale)?));
                c.push(nn(t, op, ClassIndex::new(n + m, m)?, "conclusion")?);
            }
            if m >= n {
                let sn = op.sharp_pow(n);
                let defect = &sn * op.t_pow(n) * &sn - &sn;
                let scale = op.t_sharp_norm().powi(n as i32)
                    * (1.0 + op.t_norm().powi(n as i32) * op.t_sharp_norm().powi(n as i32));
                p.push(t.record("premise:partial_isometry_sharp_Tn", rel(&defect, scale)?));
                c.push(nn(t, op, ClassIndex::new(n, m + n)?, "conclusion:dual")?);
            }
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Th31Partial => {
            let mut p = vec![qn(t, op, idx, "premise")?];
            let tm = op.t_pow(m);
            let defect = &tm * op.sharp_pow(m) * &tm - &tm;
            let scale = op.t_norm().powi(m as i32)
                * (1.0 + op.t_norm().powi(m as i32) * op.t_sharp_norm().powi(m as i32));
            p.push(t.record("premise:partial_isometry_Tm", rel(&defect, scale)?));
            if n < m {
                // the statement covers n >= m only; other pairs prove nothing
                (PremiseStatus::Indeterminate, Verdict::Indeterminate)
            } else {
                let c = vec![qn(t, op, ClassIndex::new(n + m, m)?, "conclusion")?];
                (combine_premise(&p), combine_conclusion(&c))
            }
        }
        RowId::SqIdentityNormal => {
            let p = vec![nn(t, op, idx, "premise")?];
            let lhs = op.t_pow(2 * n) * op.sharp_pow(2 * m);
            let inner = op.t_pow(n) * op.sharp_pow(m);
            let rhs = &inner * &inner;
            let scale = op.t_norm().powi(2 * n as i32) * op.t_sharp_norm().powi(2 * m as i32)
                + spectral_norm(&inner)?.powi(2);
            let c = vec![t.record("conclusion:square_identity", rel(&(lhs - rhs), scale)?)];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::SqIdentityQn => {
            let p = vec![qn(t, op, idx, "premise")?];
            let lhs = op.sharp_pow(2 * m) * op.t_pow(2 * n);
            let inner = op.sharp_pow(m) * op.t_pow(n);
            let rhs = &inner * &inner;
            let scale = op.t_norm().powi(2 * n as i32) * op.t_sharp_norm().powi(2 * m as i32)
                + spectral_norm(&inner)?.powi(2);
            let c = vec![t.record("conclusion:square_identity", rel(&(lhs - rhs), scale)?)];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::ProAaFuglede => {
            let mut p = vec![metric_commutation(t, b)?];
            p.push(projector_commutation(t, b, op.t(), "premise:PT_eq_TP")?);
            let tn = op.t_pow(n);
            p.push(t.record(
                "premise:Tn_normal",
                commutation_residual(&tn, &tn.adjoint())?,
            ));
            let mut c = Vec::new();
            for mm in 1..=MAX_INDEX {
                c.push(nn(t, op, ClassIndex::new(n, mm)?, "conclusion")?);
            }
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::CorAaLcm => {
            let mut p = vec![metric_commutation(t, b)?];
            p.push(projector_commutation(t, b, op.t(), "premise:PT_eq_TP")?);
            let tn = op.t_pow(n);
            let tm = op.t_pow(m);
            p.push(t.record(
                "premise:standard_nm_normal",
                commutation_residual(&tn, &tm.adjoint())?,
            ));
            let l = n.lcm(&m);
            let mut c = Vec::new();
            for r in 1..=MAX_INDEX {
                if let Ok(ci) = ClassIndex::new(l, r) {
                    c.push(nn(t, op, ci, "conclusion")?);
                }
            }
            if c.is_empty() {
                (combine_premise(&p), Verdict::Indeterminate)
            } else {
                (combine_premise(&p), combine_conclusion(&c))
            }
        }
        RowId::Pro34Two => {
            let mut p = vec![full_rank(t, &op.t().adjoint(), &tol, "premise:T_star_injective")?];
            let reach = op.sharp_pow(m) * op.t();
            let rank_reach = crate::numerics::numerical_rank(&reach, &tol)?;
            p.push(t.record_bool(
                "premise:range_matches_metric",
                rank_reach == b.ctx.rank(),
            ));
            p.push(qn(t, op, idx, "premise")?);
            p.push(qn(t, op, ClassIndex::new(n, m + 1)?, "premise")?);
            let c = vec![nn(t, op, ClassIndex::new(n, 1)?, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
        RowId::Th37Equiv => {
            let mut p = Vec::new();
            if m >= 2 {
                p.push(full_rank(t, &op.t_pow(m - 1), &tol, "premise:T_power_full_rank")?);
            }
            p.push(metric_commutation(t, b)?);
            p.push(projector_commutation(t, b, op.t(), "premise:PT_eq_TP")?);
            let status = combine_premise(&p);
            if status != PremiseStatus::Satisfied {
                (status, Verdict::Indeterminate)
            } else {
                let side_qn = qn(t, op, idx, "side")?;
                let side_comm = match classes::c_operator(&b.ctx, op, m) {
                    Ok(c_op) => {
                        let tn = op.t_pow(n);
                        let sn = op.sharp_pow(n);
                        let re = (&tn + &sn) * half();
                        let im = (&tn - &sn) * neg_half_i();
                        let vr = t.record("side:C_comm_re", commutation_residual(&c_op, &re)?);
                        let vi = t.record("side:C_comm_im", commutation_residual(&c_op, &im)?);
                        combine_conclusion(&[vr, vi])
                    }
                    Err(_) => Verdict::Indeterminate,
                };
                (status, agreement(side_qn, side_comm))
            }
        }
        RowId::Th22Bcond => {
            let mut p = Vec::new();
            if m >= 2 {
                p.push(full_rank(t, &op.t_pow(m - 1), &tol, "premise:T_power_full_rank")?);
            }
            p.push(metric_commutation(t, b)?);
            p.push(projector_commutation(t, b, op.t(), "premise:PT_eq_TP")?);
            match classes::b_operator(&b.ctx, op, m) {
                Ok(b_op) => {
                    let tm = op.t_pow(m);
                    let sm = op.sharp_pow(m);
                    let re = (&tm + &sm) * half();
                    let im = (&tm - &sm) * neg_half_i();
                    p.push(t.record("premise:B_comm_re", commutation_residual(&b_op, &re)?));
                    p.push(t.record("premise:B_comm_im", commutation_residual(&b_op, &im)?));
                    let c_sq = &sm * &tm;
                    let b_sq = &tm * &sm;
                    let tn = op.t_pow(n);
                    let defect = &c_sq * &tn - &tn * &b_sq;
                    let scale = 2.0
                        * op.t_norm().powi(n as i32)
                        * op.t_norm().powi(m as i32)
                        * op.t_sharp_norm().powi(m as i32);
                    p.push(t.record("premise:Csq_Tn_eq_Tn_Bsq", rel(&defect, scale)?));
                    let c = vec![qn(t, op, ClassIndex::new(m, m)?, "conclusion")?];
                    (combine_premise(&p), combine_conclusion(&c))
                }
                Err(_) => (PremiseStatus::Indeterminate, Verdict::Indeterminate),
            }
        }
        RowId::RemarkInclusion => {
            let p = vec![nn(t, op, idx, "premise")?];
            let c = vec![qn(t, op, idx, "conclusion")?];
            (combine_premise(&p), combine_conclusion(&c))
        }
    };

    Ok(CheckOutcome {
        premise,
        conclusion,
        residuals: trace.residuals,
    })
}

/// String-id entry point mirroring the enum-based one.
pub fn run_check_by_id(
    check_id: &str,
    b: &DenseBundle,
    idx: ClassIndex,
) -> Result<CheckOutcome, LabError> {
    run_check(RowId::from_id(check_id)?, b, idx)
}
