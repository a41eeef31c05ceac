//! Suite runner: drives every registry row over seeded random instances and
//! aggregates the outcomes into a verify report.
//!
//! The loop is deterministic for a fixed config. Each (row, index, attempt)
//! triple derives its own instance seed from the master seed, so any recorded
//! failure can be regenerated in isolation from the seed alone. Attempts that
//! fail to produce a usable instance (generator infeasible for the drawn
//! rank, or the operator falls outside the adjoint-admissible class) still
//! count as attempted but contribute nothing else.

use crate::classes::ClassIndex;
use crate::files::SuiteConfig;
use crate::numerics::{Tolerance, Verdict};
use crate::report::{
    NamedResidual, RowFailure, RowReport, SuiteVerdict, ToolInfo, VerifyReport,
};

use super::gen::{generate_dense, FamilySpec};
use super::registry::{
    self, run_check, CheckOutcome, PremiseStatus, RowId, ALL_ROWS,
};
use super::{assemble, mix_seed, LabError};

/// Cap on wasted work per index cell: once this many attempts have run
/// without reaching the per-index quota of satisfied premises, the cell is
/// abandoned and the shortfall shows up in the row's satisfied count.
const ATTEMPT_FACTOR: u64 = 40;

/// At most this many failing instances are recorded per row; the counts keep
/// the full tally either way.
const MAX_RECORDED_FAILURES: usize = 5;

fn select_rows(config: &SuiteConfig) -> Result<Vec<RowId>, LabError> {
    match &config.rows {
        None => Ok(ALL_ROWS.to_vec()),
        Some(ids) => ids.iter().map(|id| RowId::from_id(id)).collect(),
    }
}

/// Salt layout keeps (row, index, attempt) collisions impossible within one
/// run: row and index live in the high bits, the attempt counter below.
fn instance_salt(row_pos: u64, idx: ClassIndex, attempt: u64) -> u64 {
    (row_pos << 48) | (u64::from(idx.n()) << 40) | (u64::from(idx.m()) << 32) | attempt
}

fn pick_dim(dims: &[usize], seed: u64) -> usize {
    dims[(seed % dims.len() as u64) as usize]
}

fn pick_rank(dim: usize, full_rank_only: bool, seed: u64) -> usize {
    // A quarter of the draws drop the metric rank by one so the singular
    // branch of every membership and projector path stays exercised.
    if full_rank_only || dim < 2 || (seed >> 16) & 3 != 3 {
        dim
    } else {
        dim - 1
    }
}

struct RowTally {
    attempted: u64,
    satisfied: u64,
    vacuous: u64,
    indeterminate: u64,
    pass: u64,
    fail: u64,
    concl_indeterminate: u64,
    worst: f64,
    failures: Vec<RowFailure>,
}

impl RowTally {
    fn new() -> Self {
        RowTally {
            attempted: 0,
            satisfied: 0,
            vacuous: 0,
            indeterminate: 0,
            pass: 0,
            fail: 0,
            concl_indeterminate: 0,
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    fn absorb(&mut self, idx: ClassIndex, seed: u64, outcome: &CheckOutcome) {
        match outcome.premise {
            PremiseStatus::Vacuous => {
                self.vacuous += 1;
                return;
            }
            PremiseStatus::Indeterminate => {
                self.indeterminate += 1;
                return;
            }
            PremiseStatus::Satisfied => self.satisfied += 1,
        }
        match outcome.conclusion {
            Verdict::Pass => self.pass += 1,
            Verdict::Indeterminate => self.concl_indeterminate += 1,
            Verdict::Fail => {
                self.fail += 1;
                if self.failures.len() < MAX_RECORDED_FAILURES {
                    self.failures.push(RowFailure {
                        index: idx.into(),
                        instance_seed: seed,
                        residuals: outcome
                            .residuals
                            .iter()
                            .map(|(name, value)| NamedResidual {
                                name: name.clone(),
                                value: *value,
                            })
                            .collect(),
                    });
                }
            }
        }
        self.worst = self.worst.max(conclusion_residual(outcome));
    }
}

/// Largest conclusion-side residual of one outcome. Rows whose conclusion is
/// an agreement of verdicts have no direct conclusion residual; their
/// per-side residuals stand in.
fn conclusion_residual(outcome: &CheckOutcome) -> f64 {
    let max_with_prefix = |prefix: &str| {
        outcome
            .residuals
            .iter()
            .filter(|(name, _)| name.starts_with(prefix))
            .map(|(_, value)| *value)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let direct = max_with_prefix("conclusion");
    if direct.is_finite() {
        return direct;
    }
    let sides = max_with_prefix("side");
    if sides.is_finite() {
        sides
    } else {
        0.0
    }
}

fn run_row(
    row: RowId,
    row_pos: u64,
    config: &SuiteConfig,
    tol: Tolerance,
) -> Result<RowReport, LabError> {
    let indices = row.indices(config.n_max, config.m_max);
    let mut tally = RowTally::new();
    let per_index = config.trials.div_ceil(indices.len() as u64).max(1);
    for idx in indices {
        let families = row.families(idx);
        let cap = per_index * ATTEMPT_FACTOR;
        let mut satisfied_here = 0;
        let mut attempt = 0;
        while satisfied_here < per_index && attempt < cap {
            let salt = instance_salt(row_pos, idx, attempt);
            attempt += 1;
            let seed = mix_seed(config.seed, salt);
            tally.attempted += 1;
            let family = families[(attempt as usize - 1) % families.len()];
            let dim = pick_dim(&config.dims, seed);
            let rank = pick_rank(dim, row.needs_full_rank(), seed);
            let raw = match generate_dense(family, dim, rank, seed) {
                Ok(raw) => raw,
                Err(LabError::Infeasible { .. }) => continue,
                Err(e) => return Err(e),
            };
            let bundle = match assemble(raw.a, raw.t, raw.extra, tol) {
                Ok(b) => b,
                Err(LabError::SemiHilbert(_)) | Err(LabError::Class(_)) => continue,
                Err(e) => return Err(e),
            };
            let outcome = match run_check(row, &bundle, idx) {
                Ok(o) => o,
                Err(LabError::Numerics(_)) => continue,
                Err(e) => return Err(e),
            };
            if outcome.premise == PremiseStatus::Satisfied {
                satisfied_here += 1;
            }
            tally.absorb(idx, seed, &outcome);
        }
    }
    Ok(RowReport {
        check_id: row.id().to_string(),
        attempted: tally.attempted,
        premise_satisfied: tally.satisfied,
        premise_vacuous: tally.vacuous,
        premise_indeterminate: tally.indeterminate,
        conclusion_pass: tally.pass,
        conclusion_fail: tally.fail,
        conclusion_indeterminate: tally.concl_indeterminate,
        worst_residual: tally.worst,
        failures: tally.failures,
    })
}

/// Runs the configured rows and folds the tallies into a report. The overall
/// verdict is `Pass` exactly when no row recorded a conclusion failure and
/// every row accumulated at least one satisfied premise.
pub fn run_suite(config: &SuiteConfig) -> Result<VerifyReport, LabError> {
    config
        .validate()
        .map_err(|e| LabError::Config(e.to_string()))?;
    let tol = config
        .tolerance()
        .map_err(|e| LabError::Config(e.to_string()))?;
    let rows = select_rows(config)?;
    let mut reports = Vec::with_capacity(rows.len());
    for (pos, row) in rows.iter().enumerate() {
        reports.push(run_row(*row, pos as u64, config, tol)?);
    }
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    let rows_with_failures = reports.iter().filter(|r| r.conclusion_fail > 0).count();
    let rows_without_satisfied_premises = reports
        .iter()
        .filter(|r| r.premise_satisfied == 0)
        .count();
    let verdict = if rows_with_failures == 0 && rows_without_satisfied_premises == 0 {
        SuiteVerdict::Pass
    } else {
        SuiteVerdict::Fail
    };
    Ok(VerifyReport {
        tool: ToolInfo::current(),
        config: config.clone(),
        tolerance: tol,
        rows: reports,
        rows_with_failures,
        rows_without_satisfied_premises,
        verdict,
    })
}

/// Three-way outcome of cross-checking a class verdict against the matrix
/// characterization of the same class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Disagree,
    Indeterminate,
}

fn verdict_agreement(lhs: Verdict, rhs: Verdict) -> Agreement {
    match registry::agreement(lhs, rhs) {
        Verdict::Pass => Agreement::Agree,
        Verdict::Fail => Agreement::Disagree,
        Verdict::Indeterminate => Agreement::Indeterminate,
    }
}

/// Agreement of the commutator definition with the adjoint-free matrix
/// characterization, for both the normal and quasinormal variants of one
/// random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterizationTrial {
    pub normal: Agreement,
    pub quasinormal: Agreement,
}

/// Builds one instance from the family and compares definition vs
/// characterization for both class variants at the given index.
pub fn characterization_trial(
    family: FamilySpec,
    dim: usize,
    idx: ClassIndex,
    tol: Tolerance,
    seed: u64,
) -> Result<CharacterizationTrial, LabError> {
    let raw = generate_dense(family, dim, dim, seed)?;
    let bundle = assemble(raw.a, raw.t, None, tol)?;
    let op = &bundle.op;

    let nn_def = Verdict::from_residual(
        crate::classes::nm_normal_residual(op, idx)?,
        &tol,
    );
    let (c1, c2) = registry::normal_characterization_residuals(&bundle, idx)?;
    let nn_char = registry::combine_conclusion(&[
        Verdict::from_residual(c1, &tol),
        Verdict::from_residual(c2, &tol),
    ]);

    let qn_def = Verdict::from_residual(
        crate::classes::nm_quasinormal_residual(op, idx)?,
        &tol,
    );
    let (q1, q2) = registry::quasinormal_characterization_residuals(&bundle, idx)?;
    let qn_char = registry::combine_conclusion(&[
        Verdict::from_residual(q1, &tol),
        Verdict::from_residual(q2, &tol),
    ]);

    Ok(CharacterizationTrial {
        normal: verdict_agreement(nn_def, nn_char),
        quasinormal: verdict_agreement(qn_def, qn_char),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SuiteConfig {
        SuiteConfig {
            dims: vec![2, 3],
            n_max: 2,
            m_max: 2,
            trials: 4,
            seed: 17,
            rank_cutoff: None,
            residual_tol: None,
            distinctness_margin: None,
            rows: None,
        }
    }

    #[test]
    fn small_suite_passes_with_no_vacuous_only_rows() {
        let report = run_suite(&small_config()).unwrap();
        assert_eq!(report.verdict, SuiteVerdict::Pass);
        assert_eq!(report.rows_with_failures, 0);
        assert_eq!(report.rows_without_satisfied_premises, 0);
        assert_eq!(report.rows.len(), ALL_ROWS.len());
        for row in &report.rows {
            assert!(row.premise_satisfied > 0, "{} has no satisfied premises", row.check_id);
            assert_eq!(row.conclusion_fail, 0, "{} recorded failures", row.check_id);
        }
    }

    #[test]
    fn suite_is_deterministic_for_a_fixed_seed() {
        let config = SuiteConfig {
            rows: Some(vec![
                "thm2_1_fwd".to_string(),
                "pro25_step".to_string(),
            ]),
            trials: 3,
            ..small_config()
        };
        let first = run_suite(&config).unwrap();
        let second = run_suite(&config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn row_selection_rejects_unknown_ids() {
        let config = SuiteConfig {
            rows: Some(vec!["thm9_9_bogus".to_string()]),
            ..small_config()
        };
        match run_suite(&config) {
            Err(LabError::UnknownCheck(id)) => assert_eq!(id, "thm9_9_bogus"),
            other => panic!("expected unknown check, got {other:?}"),
        }
    }

    #[test]
    fn rows_are_sorted_by_check_id() {
        let report = run_suite(&small_config()).unwrap();
        let ids: Vec<&str> = report.rows.iter().map(|r| r.check_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn characterization_agrees_on_mixed_instances() {
        let tol = Tolerance::default();
        let idx = ClassIndex::new(2, 1).unwrap();
        let mut disagree = 0;
        let mut indeterminate = 0;
        for trial in 0..60 {
            let family = if trial % 2 == 0 {
                FamilySpec::GeneralInBa
            } else {
                FamilySpec::ANormal
            };
            let dim = 2 + (trial as usize % 3);
            let seed = mix_seed(99, trial);
            let out = characterization_trial(family, dim, idx, tol, seed).unwrap();
            for side in [out.normal, out.quasinormal] {
                match side {
                    Agreement::Disagree => disagree += 1,
                    Agreement::Indeterminate => indeterminate += 1,
                    Agreement::Agree => {}
                }
            }
        }
        assert_eq!(disagree, 0);
        assert!(indeterminate <= 1, "too many indeterminate: {indeterminate}");
    }
}
