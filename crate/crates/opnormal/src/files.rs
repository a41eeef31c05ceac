//! JSON wire formats consumed and produced by the CLI.
//!
//! These parsers sit on the untrusted boundary: they enforce shape, size
//! caps, and finiteness before anything numeric happens, and every reject
//! carries a distinct error. Sizes are capped at desk scale; the caps also
//! keep the fuzz targets within their time budget.

use crate::numerics::CMatrix;
use crate::shiftcalc::{EventuallyPeriodic, GaussianRational, ShiftError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted dense dimension.
pub const MAX_MATRIX_DIM: usize = 64;
/// Largest accepted preperiod or period length for sequence files.
pub const MAX_SEQ_SEGMENT: usize = 64;

#[derive(Debug, Error)]
pub enum FilesError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{what} size {len} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        len: usize,
        cap: usize,
    },
    #[error("matrix dimensions {rows}x{cols} do not match {len} data entries")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("non-finite value in data entry {index}")]
    NonFinite { index: usize },
    #[error("zero denominator in entry {index}")]
    ZeroDenominator { index: usize },
    #[error("metric entries must be real [num, den] pairs; entry {index} is complex")]
    MetricEntryNotReal { index: usize },
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("invalid suite config: {0}")]
    BadConfig(String),
}

/// Dense complex matrix: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixFile {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, FilesError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(FilesError::EmptyMatrix);
        }
        if self.rows > MAX_MATRIX_DIM || self.cols > MAX_MATRIX_DIM {
            return Err(FilesError::TooLarge {
                what: "matrix dimension",
                len: self.rows.max(self.cols),
                cap: MAX_MATRIX_DIM,
            });
        }
        let expected = self.rows * self.cols;
        if self.data.len() != expected {
            return Err(FilesError::ShapeMismatch {
                rows: self.rows,
                cols: self.cols,
                len: self.data.len(),
            });
        }
        for (index, [re, im]) in self.data.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(FilesError::NonFinite { index });
            }
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

/// Parses and validates a dense matrix file.
pub fn parse_matrix(bytes: &[u8]) -> Result<CMatrix, FilesError> {
    let file: MatrixFile = serde_json::from_slice(bytes)?;
    file.to_matrix()
}

/// One sequence entry: a rational `[num, den]` or a Gaussian rational with
/// rational `re`/`im` parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Real([i64; 2]),
    Complex { re: [i64; 2], im: [i64; 2] },
}

/// Eventually periodic sequence file: `preperiod` entries followed by
/// `period` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub preperiod: Vec<RationalEntry>,
    pub period: Vec<RationalEntry>,
}

fn rational_from_pair(pair: [i64; 2], index: usize) -> Result<BigRational, FilesError> {
    if pair[1] == 0 {
        return Err(FilesError::ZeroDenominator { index });
    }
    Ok(BigRational::new(BigInt::from(pair[0]), BigInt::from(pair[1])))
}

impl SequenceFile {
    fn check_caps(&self) -> Result<(), FilesError> {
        if self.preperiod.len() > MAX_SEQ_SEGMENT {
            return Err(FilesError::TooLarge {
                what: "sequence preperiod",
                len: self.preperiod.len(),
                cap: MAX_SEQ_SEGMENT,
            });
        }
        if self.period.len() > MAX_SEQ_SEGMENT {
            return Err(FilesError::TooLarge {
                what: "sequence period",
                len: self.period.len(),
                cap: MAX_SEQ_SEGMENT,
            });
        }
        Ok(())
    }

    fn entries(&self) -> impl Iterator<Item = (usize, &RationalEntry)> {
        self.preperiod.iter().chain(self.period.iter()).enumerate()
    }

    /// Weight sequence: complex entries allowed.
    pub fn to_weights(&self) -> Result<EventuallyPeriodic<GaussianRational>, FilesError> {
        self.check_caps()?;
        let mut all = Vec::with_capacity(self.preperiod.len() + self.period.len());
        for (index, entry) in self.entries() {
            let value = match entry {
                RationalEntry::Real(pair) => {
                    GaussianRational::from_real(rational_from_pair(*pair, index)?)
                }
                RationalEntry::Complex { re, im } => GaussianRational::new(
                    rational_from_pair(*re, index)?,
                    rational_from_pair(*im, index)?,
                ),
            };
            all.push(value);
        }
        let period = all.split_off(self.preperiod.len());
        Ok(EventuallyPeriodic::new(all, period)?)
    }

    /// Metric sequence: entries must be plain `[num, den]` pairs.
    /// Nonnegativity is enforced when the shift instance is assembled.
    pub fn to_metric(&self) -> Result<EventuallyPeriodic<BigRational>, FilesError> {
        self.check_caps()?;
        let mut all = Vec::with_capacity(self.preperiod.len() + self.period.len());
        for (index, entry) in self.entries() {
            match entry {
                RationalEntry::Real(pair) => all.push(rational_from_pair(*pair, index)?),
                RationalEntry::Complex { .. } => {
                    return Err(FilesError::MetricEntryNotReal { index });
                }
            }
        }
        let period = all.split_off(self.preperiod.len());
        Ok(EventuallyPeriodic::new(all, period)?)
    }

    pub fn from_weights(seq: &EventuallyPeriodic<GaussianRational>) -> Option<Self> {
        let encode = |g: &GaussianRational| -> Option<RationalEntry> {
            let pair = |r: &BigRational| -> Option<[i64; 2]> {
                use num_traits::ToPrimitive;
                Some([r.numer().to_i64()?, r.denom().to_i64()?])
            };
            if g.is_real() {
                Some(RationalEntry::Real(pair(&g.re)?))
            } else {
                Some(RationalEntry::Complex {
                    re: pair(&g.re)?,
                    im: pair(&g.im)?,
                })
            }
        };
        Some(SequenceFile {
            preperiod: seq.preperiod().iter().map(encode).collect::<Option<_>>()?,
            period: seq.period().iter().map(encode).collect::<Option<_>>()?,
        })
    }

    pub fn from_metric(seq: &EventuallyPeriodic<BigRational>) -> Option<Self> {
        let encode = |r: &BigRational| -> Option<RationalEntry> {
            use num_traits::ToPrimitive;
            Some(RationalEntry::Real([
                r.numer().to_i64()?,
                r.denom().to_i64()?,
            ]))
        };
        Some(SequenceFile {
            preperiod: seq.preperiod().iter().map(encode).collect::<Option<_>>()?,
            period: seq.period().iter().map(encode).collect::<Option<_>>()?,
        })
    }
}

/// Parses a sequence file without deciding its role.
pub fn parse_sequence(bytes: &[u8]) -> Result<SequenceFile, FilesError> {
    let file: SequenceFile = serde_json::from_slice(bytes)?;
    file.check_caps()?;
    Ok(file)
}

/// Verification-suite configuration. Unknown keys are rejected so typos in
/// hand-written configs fail loudly; missing keys take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Dense dimensions the generators draw from.
    pub dims: Vec<usize>,
    /// Index pairs run per row: (n, m) over 1..=n_max x 1..=m_max.
    pub n_max: u32,
    pub m_max: u32,
    /// Premise-satisfied instances required per registry row.
    pub trials: u64,
    pub seed: u64,
    pub rank_cutoff: Option<f64>,
    pub residual_tol: Option<f64>,
    pub distinctness_margin: Option<f64>,
    /// Restrict to these registry row ids; `None` runs everything.
    pub rows: Option<Vec<String>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dims: vec![2, 3, 4, 5],
            n_max: 3,
            m_max: 3,
            trials: 200,
            seed: 0xA11CE,
            rank_cutoff: None,
            residual_tol: None,
            distinctness_margin: None,
            rows: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), FilesError> {
        if self.dims.is_empty() {
            return Err(FilesError::BadConfig("dims must be nonempty".into()));
        }
        for d in &self.dims {
            if !(2..=16).contains(d) {
                return Err(FilesError::BadConfig(format!(
                    "dimension {d} outside 2..=16"
                )));
            }
        }
        if self.trials == 0 {
            return Err(FilesError::BadConfig(
                "trials must be positive; a zero-trial suite decides nothing".into(),
            ));
        }
        let max = crate::classes::MAX_INDEX;
        if self.n_max == 0 || self.m_max == 0 || self.n_max > max || self.m_max > max {
            return Err(FilesError::BadConfig(format!(
                "index bounds ({}, {}) outside 1..={max}",
                self.n_max, self.m_max
            )));
        }
        if let Some(rows) = &self.rows {
            if rows.is_empty() {
                return Err(FilesError::BadConfig(
                    "row filter present but empty".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Result<crate::numerics::Tolerance, FilesError> {
        let base = crate::numerics::Tolerance::default();
        crate::numerics::Tolerance::new(
            self.rank_cutoff.unwrap_or(base.rank_cutoff),
            self.residual_tol.unwrap_or(base.residual_tol),
            self.distinctness_margin.unwrap_or(base.distinctness_margin),
        )
        .map_err(|e| FilesError::BadConfig(e.to_string()))
    }
}

/// Parses and validates a suite config.
pub fn parse_suite_config(bytes: &[u8]) -> Result<SuiteConfig, FilesError> {
    let config: SuiteConfig = serde_json::from_slice(bytes)?;
    config.validate()?;
    config.tolerance()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_entry;

    #[test]
    fn matrix_round_trips_through_json() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, -1.5),
                Complex64::new(1.0, 0.25),
                Complex64::new(-2.0, 0.0),
            ],
        );
        let text = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        let back = parse_matrix(text.as_bytes()).unwrap();
        assert!(max_abs_entry(&(back - m)) == 0.0);
    }

    #[test]
    fn matrix_rejects_shape_mismatch_and_caps() {
        let bad = br#"{"rows": 2, "cols": 2, "data": [[1.0, 0.0]]}"#;
        assert!(matches!(
            parse_matrix(bad),
            Err(FilesError::ShapeMismatch { .. })
        ));
        let big = format!(
            r#"{{"rows": 65, "cols": 1, "data": [{}]}}"#,
            vec!["[0.0, 0.0]"; 65].join(",")
        );
        assert!(matches!(
            parse_matrix(big.as_bytes()),
            Err(FilesError::TooLarge { .. })
        ));
        assert!(matches!(
            parse_matrix(br#"{"rows": 0, "cols": 0, "data": []}"#),
            Err(FilesError::EmptyMatrix)
        ));
    }

    #[test]
    fn matrix_rejects_non_finite_tokens_and_overflow() {
        // bare NaN is not valid JSON
        let nan = br#"{"rows": 1, "cols": 1, "data": [[NaN, 0.0]]}"#;
        assert!(matches!(parse_matrix(nan), Err(FilesError::Json(_))));
        // an overflowing literal is rejected at the JSON layer
        let inf = br#"{"rows": 1, "cols": 1, "data": [[1e999, 0.0]]}"#;
        assert!(parse_matrix(inf).is_err());
        // a non-finite value arriving through the struct API is still caught
        let direct = MatrixFile {
            rows: 1,
            cols: 1,
            data: vec![[f64::NAN, 0.0]],
        };
        assert!(matches!(
            direct.to_matrix(),
            Err(FilesError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn sequences_accept_mixed_entries_for_weights_only() {
        let text = br#"{"preperiod": [[1, 2]], "period": [{"re": [0, 1], "im": [1, 1]}, [3, 4]]}"#;
        let file = parse_sequence(text).unwrap();
        let weights = file.to_weights().unwrap();
        assert_eq!(weights.preperiod_len(), 1);
        assert_eq!(weights.period_len(), 2);
        assert!(matches!(
            file.to_metric(),
            Err(FilesError::MetricEntryNotReal { index: 1 })
        ));
    }

    #[test]
    fn sequences_reject_zero_denominators_and_oversize_segments() {
        let zero = br#"{"preperiod": [], "period": [[1, 0]]}"#;
        assert!(matches!(
            parse_sequence(zero).unwrap().to_weights(),
            Err(FilesError::ZeroDenominator { index: 0 })
        ));
        let long = format!(
            r#"{{"preperiod": [], "period": [{}]}}"#,
            vec!["[1, 1]"; MAX_SEQ_SEGMENT + 1].join(",")
        );
        assert!(matches!(
            parse_sequence(long.as_bytes()),
            Err(FilesError::TooLarge { .. })
        ));
        let empty = br#"{"preperiod": [[1, 1]], "period": []}"#;
        assert!(matches!(
            parse_sequence(empty).unwrap().to_weights(),
            Err(FilesError::Shift(ShiftError::EmptyPeriod))
        ));
    }

    #[test]
    fn sequence_files_round_trip_through_exact_values() {
        let text = br#"{"preperiod": [[-7, 3]], "period": [{"re": [1, 2], "im": [-1, 6]}]}"#;
        let file = parse_sequence(text).unwrap();
        let weights = file.to_weights().unwrap();
        let back = SequenceFile::from_weights(&weights).unwrap();
        assert_eq!(file, back);
    }

    #[test]
    fn default_config_is_valid_and_overrides_apply() {
        let config = SuiteConfig::default();
        config.validate().unwrap();
        let tol = config.tolerance().unwrap();
        assert_eq!(tol.residual_tol, 1e-9);

        let text = br#"{"trials": 10, "residual_tol": 1e-8}"#;
        let parsed = parse_suite_config(text).unwrap();
        assert_eq!(parsed.trials, 10);
        assert_eq!(parsed.tolerance().unwrap().residual_tol, 1e-8);
    }

    #[test]
    fn config_rejects_zero_trials_unknown_keys_and_bad_dims() {
        assert!(matches!(
            parse_suite_config(br#"{"trials": 0}"#),
            Err(FilesError::BadConfig(_))
        ));
        assert!(matches!(
            parse_suite_config(br#"{"trails": 5}"#),
            Err(FilesError::Json(_))
        ));
        assert!(matches!(
            parse_suite_config(br#"{"dims": [1]}"#),
            Err(FilesError::BadConfig(_))
        ));
        assert!(matches!(
            parse_suite_config(br#"{"residual_tol": 0.5}"#),
            Err(FilesError::BadConfig(_))
        ));
    }
}
