//! Integral Gram decompositions `QᵗQ = C`.
//!
//! [`solve`] enumerates decomposition-matrix candidates row by row. Rows are
//! drawn from the finite set of vectors `r` with `r·adj(C)·rᵗ ≤ det C`, kept
//! lexicographically nonincreasing inside each class of interchangeable
//! positions, and the residual `C − Σ rᵗr` must stay positive semidefinite.
//! Orthogonality against fixed blocks, prescribed contribution diagonals and
//! forced zero rows are enforced during the search and re-checked afterwards
//! by [`verify_solution`].

mod orthogonal;
mod psd;
mod search;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::{self, IntMatError, IntMatrix};

pub use orthogonal::solve_orthogonal_column;
pub use search::solve;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GramError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("solver produced a solution that fails verification: {0}")]
    Internal(String),
    #[error(transparent)]
    Matrix(#[from] IntMatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    #[default]
    Nonnegative,
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RowCount {
    #[default]
    Any,
    Exact(usize),
    /// Inclusive range.
    Range(usize, usize),
}

impl RowCount {
    pub fn bounds(self) -> (usize, Option<usize>) {
        match self {
            RowCount::Any => (0, None),
            RowCount::Exact(k) => (k, Some(k)),
            RowCount::Range(a, b) => (a, Some(b)),
        }
    }

    pub fn admits(self, k: usize) -> bool {
        let (lo, hi) = self.bounds();
        k >= lo && hi.is_none_or(|hi| k <= hi)
    }
}

/// Prescribed diagonal of `defect_order · Q·C⁻¹·Qᵗ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagConstraint {
    #[serde(
        serialize_with = "intmat::serialize_bigint_vec",
        deserialize_with = "intmat::deserialize_bigint_vec"
    )]
    pub values: Vec<BigInt>,
    #[serde(serialize_with = "intmat::serialize_bigint", deserialize_with = "intmat::deserialize_bigint")]
    pub defect_order: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramProblem {
    pub target_gram: IntMatrix,
    #[serde(default)]
    pub sign_mode: SignMode,
    #[serde(default)]
    pub row_count: RowCount,
    #[serde(default = "default_true")]
    pub require_nonzero_rows: bool,
    #[serde(default)]
    pub require_indecomposable: bool,
    #[serde(default)]
    pub fixed_blocks: Vec<IntMatrix>,
    #[serde(default)]
    pub diag_constraints: Option<DiagConstraint>,
    #[serde(default)]
    pub zero_rows: BTreeSet<usize>,
}

fn default_true() -> bool {
    true
}

impl GramProblem {
    /// Non-negative solutions without zero rows, any row count.
    pub fn new(target_gram: IntMatrix) -> Self {
        GramProblem {
            target_gram,
            sign_mode: SignMode::Nonnegative,
            row_count: RowCount::Any,
            require_nonzero_rows: true,
            require_indecomposable: false,
            fixed_blocks: Vec::new(),
            diag_constraints: None,
            zero_rows: BTreeSet::new(),
        }
    }

    pub fn signed(mut self) -> Self {
        self.sign_mode = SignMode::Signed;
        self
    }

    pub fn rows(mut self, rows: RowCount) -> Self {
        self.row_count = rows;
        self
    }

    pub fn allow_zero_rows(mut self) -> Self {
        self.require_nonzero_rows = false;
        self
    }

    pub fn indecomposable(mut self) -> Self {
        self.require_indecomposable = true;
        self
    }

    pub fn orthogonal_to(mut self, block: IntMatrix) -> Self {
        self.fixed_blocks.push(block);
        self
    }

    pub fn with_diag(mut self, values: Vec<BigInt>, defect_order: BigInt) -> Self {
        self.diag_constraints = Some(DiagConstraint { values, defect_order });
        self
    }

    pub fn with_zero_rows(mut self, rows: impl IntoIterator<Item = usize>) -> Self {
        self.zero_rows.extend(rows);
        self
    }

    /// Number of solution rows when some constraint pins it.
    pub(crate) fn pinned_rows(&self) -> Result<Option<usize>, GramError> {
        let mut pinned: Option<(usize, &str)> = None;
        let mut pin = |k: usize, what: &'static str| -> Result<(), GramError> {
            match pinned {
                Some((prev, src)) if prev != k => Err(GramError::InvalidInput(format!(
                    "{what} has {k} rows but {src} requires {prev}"
                ))),
                _ => {
                    pinned = Some((k, what));
                    Ok(())
                }
            }
        };
        if let RowCount::Exact(k) = self.row_count {
            pin(k, "row count")?;
        }
        for block in &self.fixed_blocks {
            pin(block.row_count(), "fixed block")?;
        }
        if let Some(dc) = &self.diag_constraints {
            pin(dc.values.len(), "diagonal constraint")?;
        }
        if let Some((k, _)) = pinned {
            if !self.row_count.admits(k) {
                return Err(GramError::InvalidInput(format!("{k} rows outside the requested range")));
            }
        }
        Ok(pinned.map(|(k, _)| k))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramSolution {
    pub q: IntMatrix,
    /// Row-major text of the canonical representative; equal keys mean equal
    /// solutions up to the problem's symmetries.
    pub canonical_key: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solutions,
    ProvedEmpty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solutions: Vec<GramSolution>,
    /// Set when emptiness follows from the constraints alone, before search.
    pub diagnostic: Option<String>,
}

impl SolveOutcome {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn row_counts(&self) -> Vec<usize> {
        self.solutions.iter().map(|s| s.q.row_count()).collect()
    }
}

/// Connectivity of the bipartite rows–columns graph through nonzero entries.
/// Zero rows are ignored.
pub fn is_indecomposable_q(q: &IntMatrix) -> bool {
    let (k, l) = (q.row_count(), q.col_count());
    let mut seen_col = vec![false; l];
    let mut seen_row = vec![false; k];
    let mut stack = vec![0usize];
    seen_col[0] = true;
    while let Some(j) = stack.pop() {
        for i in 0..k {
            if seen_row[i] || q[(i, j)].is_zero() {
                continue;
            }
            seen_row[i] = true;
            for jj in 0..l {
                if !seen_col[jj] && !q[(i, jj)].is_zero() {
                    seen_col[jj] = true;
                    stack.push(jj);
                }
            }
        }
    }
    seen_col.iter().all(|&s| s)
}

/// Re-derives every constraint of `p` for `q` from scratch.
pub fn verify_solution(p: &GramProblem, s: &GramSolution) -> Result<bool, GramError> {
    verify_matrix(p, &s.q)
}

pub fn verify_matrix(p: &GramProblem, q: &IntMatrix) -> Result<bool, GramError> {
    let c = &p.target_gram;
    if q.col_count() != c.col_count() {
        return Err(GramError::InvalidInput(format!(
            "solution has {} columns, target is {}x{}",
            q.col_count(),
            c.row_count(),
            c.col_count()
        )));
    }
    let k = q.row_count();
    for block in &p.fixed_blocks {
        if block.row_count() != k {
            return Err(GramError::InvalidInput(format!(
                "fixed block has {} rows, solution has {k}",
                block.row_count()
            )));
        }
    }
    if let Some(dc) = &p.diag_constraints {
        if dc.values.len() != k {
            return Err(GramError::InvalidInput(format!(
                "diagonal constraint has {} entries, solution has {k} rows",
                dc.values.len()
            )));
        }
    }
    if &q.gram() != c {
        return Ok(false);
    }
    if p.sign_mode == SignMode::Nonnegative && !q.is_nonnegative() {
        return Ok(false);
    }
    if !p.row_count.admits(k) {
        return Ok(false);
    }
    for (i, row) in q.rows().enumerate() {
        let zero = row.iter().all(Zero::is_zero);
        if p.zero_rows.contains(&i) {
            if !zero {
                return Ok(false);
            }
        } else if zero && p.require_nonzero_rows {
            return Ok(false);
        }
    }
    for block in &p.fixed_blocks {
        if q.transpose().mul(block)?.entries().iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
    }
    if let Some(dc) = &p.diag_constraints {
        let inv = intmat::scaled_inverse(c, &dc.defect_order)?;
        let m = q.mul(&inv.numerator)?.mul(&q.transpose())?;
        for (i, want) in dc.values.iter().enumerate() {
            if m[(i, i)] != (want * &inv.denominator) {
                return Ok(false);
            }
        }
    }
    if p.require_indecomposable && !is_indecomposable_q(q) {
        return Ok(false);
    }
    Ok(true)
}

pub(crate) fn validate_target(c: &IntMatrix) -> Result<(), GramError> {
    if !c.is_symmetric() {
        return Err(GramError::InvalidInput("target Gram matrix must be square and symmetric".into()));
    }
    if !intmat::is_positive_definite(c)? {
        return Err(GramError::InvalidInput(
            "target Gram matrix is not positive definite; the search would be unbounded".into(),
        ));
    }
    if c.entries().iter().any(|x| x.abs() > BigInt::from(i32::MAX)) {
        return Err(GramError::InvalidInput("target Gram entries exceed the supported range".into()));
    }
    Ok(())
}
