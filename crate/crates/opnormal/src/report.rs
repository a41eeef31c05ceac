//! Report types and diff-stable JSON rendering.
//!
//! Every float is printed with 17 significant digits in scientific notation,
//! which round-trips `f64` exactly: rendering the same report twice, or on a
//! different machine, produces identical bytes. Counts and seeds stay plain
//! integers.

use crate::classes::{BasicClasses, ClassIndex, ClassVerdict};
use crate::files::{MatrixFile, SequenceFile, SuiteConfig};
use crate::numerics::{Tolerance, Verdict};
use crate::semihilbert::MembershipVerdict;
use crate::shiftcalc::ExactVerdict;
use serde::{Deserialize, Serialize};
use std::io;

/// Version string reports carry; bumped with the crate.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "opnormal".into(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPair {
    pub n: u32,
    pub m: u32,
}

impl From<ClassIndex> for IndexPair {
    fn from(idx: ClassIndex) -> Self {
        IndexPair {
            n: idx.n(),
            m: idx.m(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyInputs {
    pub metric_path: String,
    pub operator_path: String,
    pub index: IndexPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub in_b_a: Verdict,
    pub in_b_upper_a: Verdict,
    pub residual_b_a: f64,
    pub residual_b_upper_a: f64,
}

impl From<MembershipVerdict> for MembershipReport {
    fn from(v: MembershipVerdict) -> Self {
        MembershipReport {
            in_b_a: v.in_b_a,
            in_b_upper_a: v.in_b_upper_a,
            residual_b_a: v.residual_b_a,
            residual_b_upper_a: v.residual_b_upper_a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseClasses {
    pub basic: BasicClasses,
    pub nm_normal: ClassVerdict,
    pub nm_quasinormal: ClassVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseClassifyReport {
    pub tool: ToolInfo,
    pub inputs: ClassifyInputs,
    pub tolerance: Tolerance,
    pub metric_dim: usize,
    pub metric_rank: usize,
    pub membership: MembershipReport,
    /// `None` when membership failed and classification was forced to stop.
    pub classes: Option<DenseClasses>,
    pub seminorm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactVerdictReport {
    pub holds: bool,
    pub witness: Option<usize>,
    pub window: usize,
}

impl From<ExactVerdict> for ExactVerdictReport {
    fn from(v: ExactVerdict) -> Self {
        ExactVerdictReport {
            holds: v.holds,
            witness: v.witness,
            window: v.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactClassifyReport {
    pub tool: ToolInfo,
    pub inputs: ClassifyInputs,
    pub nm_normal: ExactVerdictReport,
    pub nm_quasinormal: ExactVerdictReport,
    /// Squared seminorm as an exact rational, numerator then denominator.
    pub seminorm_squared: [String; 2],
}

/// Classification report; the tag records which pipeline ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ClassifyReport {
    Dense(DenseClassifyReport),
    Exact(ExactClassifyReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub index: IndexPair,
    pub instance_seed: u64,
    pub residuals: Vec<NamedResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub check_id: String,
    pub attempted: u64,
    pub premise_satisfied: u64,
    pub premise_vacuous: u64,
    pub premise_indeterminate: u64,
    pub conclusion_pass: u64,
    pub conclusion_fail: u64,
    pub conclusion_indeterminate: u64,
    pub worst_residual: f64,
    pub failures: Vec<RowFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: ToolInfo,
    pub config: SuiteConfig,
    pub tolerance: Tolerance,
    pub rows: Vec<RowReport>,
    pub rows_with_failures: usize,
    pub rows_without_satisfied_premises: usize,
    pub verdict: SuiteVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    Witness,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchWitness {
    Dense {
        metric: MatrixFile,
        operator: MatrixFile,
        nm_normal_residual: f64,
        nm_quasinormal_residual: f64,
    },
    Shift {
        weights: SequenceFile,
        metric: SequenceFile,
        nm_normal: ExactVerdictReport,
        nm_quasinormal: ExactVerdictReport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub tool: ToolInfo,
    pub target: String,
    pub domain: String,
    pub index: IndexPair,
    pub dim: usize,
    pub budget: u64,
    pub seed: u64,
    pub evaluated: u64,
    pub outcome: SearchOutcome,
    pub witness: Option<SearchWitness>,
}

/// Pretty JSON formatter that renders every finite float with 17 significant
/// digits (`{:.16e}`), the shortest form guaranteed to round-trip `f64`.
struct SigDigits<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl<'a> serde_json::ser::Formatter for SigDigits<'a> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        debug_assert!(value.is_finite());
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_array(&mut self.inner, writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::end_array(&mut self.inner, writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_array_value(&mut self.inner, writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::end_array_value(&mut self.inner, writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_object(&mut self.inner, writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::end_object(&mut self.inner, writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_object_key(&mut self.inner, writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_object_value(&mut self.inner, writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::end_object_value(&mut self.inner, writer)
    }
}

/// Renders a report as pretty JSON with a trailing newline. Identical values
/// always produce identical bytes.
pub fn render<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::with_capacity(1024);
    let formatter = SigDigits {
        inner: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    // the serializer only emits valid UTF-8
    Ok(String::from_utf8(out).expect("serializer produced invalid UTF-8"))
}
