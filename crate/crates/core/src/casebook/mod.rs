//! Replays the case analyses for a fixed basic-algebra dimension.
//!
//! Every candidate Cartan matrix is enumerated and passed through the
//! feasibility filter. Prime determinants are matched against Brauer trees.
//! Everything else is handled by data-driven [`CaseRule`]s: solver runs,
//! congruences and Brauer counts are computed, external citations are only
//! recorded. Shipped rule sets cover dimensions 13, 14 and 15.

mod data;
mod run;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::brauer::TreeError;
use crate::cartan::CartanError;
use crate::contrib::ContribError;
use crate::gram::{self, GramError, GramProblem, GramSolution, RowCount};
use crate::intmat::IntMatrix;

pub use data::{local_data, realizations, shipped_rules, LocalDatum, Realization};
pub use run::{run_dimension, run_dimension_bounded};

#[derive(Debug, Error)]
pub enum CasebookError {
    #[error("rule {rule} references {matrix}, which enumeration did not produce")]
    UnknownCandidate { rule: String, matrix: String },
    #[error("rule set is for dimension {found}, run requested {expected}")]
    DimensionMismatch { expected: u64, found: u64 },
    #[error("no shipped rules for dimension {0}")]
    NoShippedRules(u64),
    #[error("unknown local datum {0}")]
    UnknownDatum(String),
    #[error("local datum {id} is inconsistent: {reason}")]
    InconsistentDatum { id: String, reason: String },
    #[error("congruence filter needs p in {{2, 3}}, got {0}")]
    UnsupportedPrime(u64),
    #[error("rule {rule}: {message}")]
    BadInputs { rule: String, message: String },
    #[error("det-25 instance returned {0} solutions, expected exactly one")]
    Det25Regression(usize),
    #[error("malformed rule data: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Contrib(#[from] ContribError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    TreeResolution,
    Feasibility,
    SolverRun,
    Congruence,
    BrauerCount,
    ExternalCitation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoritaClass {
    pub defect_group: String,
    pub morita_class: String,
}

/// Terminal verdict a rule may assign to its candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictSpec {
    Excluded,
    Realized { classes: Vec<MoritaClass> },
    Open { note: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRule {
    pub id: String,
    pub kind: RuleKind,
    pub candidate: IntMatrix,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub inputs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_outcome: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub version: u32,
    pub dimension: u64,
    pub rules: Vec<CaseRule>,
}

impl RuleSet {
    pub fn from_json(text: &str) -> Result<Self, CasebookError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Executed,
    Recorded,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrailEntry {
    pub rule: String,
    pub kind: RuleKind,
    pub status: StepStatus,
    pub outcome: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_outcome: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Failed the arithmetic feasibility filter.
    Rejected { reason: String },
    /// Ruled out; `by` names the deciding rule.
    Excluded { by: String },
    Realized { classes: Vec<MoritaClass> },
    Open { note: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateReport {
    pub matrix: IntMatrix,
    pub l: usize,
    #[serde(serialize_with = "crate::intmat::serialize_bigint")]
    pub determinant: BigInt,
    #[serde(serialize_with = "crate::intmat::serialize_bigint_vec")]
    pub elementary_divisors: Vec<BigInt>,
    pub verdicts: Vec<TrailEntry>,
    pub terminal: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regression {
    pub rule: String,
    pub expected: Value,
    pub computed: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub dimension: u64,
    pub candidates: Vec<CandidateReport>,
    pub final_table: Vec<MoritaClass>,
    pub regressions: Vec<Regression>,
}

impl CaseReport {
    pub fn has_regressions(&self) -> bool {
        !self.regressions.is_empty()
    }

    pub fn verdict_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for c in &self.candidates {
            let key = match c.terminal {
                Verdict::Rejected { .. } => "rejected",
                Verdict::Excluded { .. } => "excluded",
                Verdict::Realized { .. } => "realized",
                Verdict::Open { .. } => "open",
            };
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }
}

/// `l ≡ |E| (mod 8)` for `p = 2`, `l ≡ |E| (mod 3)` for `p = 3`.
pub fn congruence_filter(l_value: u64, d: &LocalDatum, p: u64) -> Result<bool, CasebookError> {
    let modulus = match p {
        2 => 8,
        3 => 3,
        other => return Err(CasebookError::UnsupportedPrime(other)),
    };
    if d.order_e % modulus != d.class_count_e % modulus {
        return Err(CasebookError::InconsistentDatum {
            id: d.id.clone(),
            reason: format!("|E| = {} and k(E) = {} differ mod {modulus}", d.order_e, d.class_count_e),
        });
    }
    Ok(l_value % modulus == d.order_e % modulus)
}

/// `k(B) = l(B) + Σ l(b_u)` over the non-trivial subsection representatives.
pub fn brauer_count_check(l_b: u64, d: &LocalDatum) -> u64 {
    l_b + d.l_central.iter().sum::<u64>() + d.l_noncentral.iter().sum::<u64>()
}

/// The decomposition matrix of `[[5,1,1],[1,3,0],[1,0,2]]` and `k − l`.
pub fn det25_decomposition() -> Result<(GramSolution, usize), CasebookError> {
    let c = IntMatrix::from_rows(&[vec![5, 1, 1], vec![1, 3, 0], vec![1, 0, 2]])
        .map_err(GramError::from)?;
    let out = gram::solve(&GramProblem::new(c).indecomposable().rows(RowCount::Any))?;
    if out.solutions.len() != 1 {
        return Err(CasebookError::Det25Regression(out.solutions.len()));
    }
    let s = out.solutions.into_iter().next().unwrap();
    let k_minus_l = s.q.row_count() - s.q.col_count();
    Ok((s, k_minus_l))
}

/// `expected` matches when every key it names carries a matching value;
/// arrays must agree in length and element-wise.
pub fn partial_match(expected: &Value, computed: &Value) -> bool {
    match (expected, computed) {
        (Value::Object(e), Value::Object(c)) => {
            e.iter().all(|(k, v)| c.get(k).is_some_and(|cv| partial_match(v, cv)))
        }
        (Value::Array(e), Value::Array(c)) => {
            e.len() == c.len() && e.iter().zip(c).all(|(a, b)| partial_match(a, b))
        }
        _ => expected == computed,
    }
}
