//! Candidate Cartan matrices with a given entry sum and size, and the
//! arithmetic filters a block's Cartan matrix must pass.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::intmat::{
    self, canonical_perm_form, is_indecomposable, is_positive_definite, smith_normal_form,
    IntMatError, IntMatrix,
};

pub const DEFAULT_MAX_SUM: u64 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("entry sum {sum} exceeds the configured bound {max}")]
    SumTooLarge { sum: u64, max: u64 },
    #[error("matrix size must be at least 1")]
    ZeroSize,
    #[error(transparent)]
    Matrix(#[from] IntMatError),
}

/// A symmetric candidate together with its derived invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanCandidate {
    pub matrix: IntMatrix,
    pub l: usize,
    pub entry_sum: u64,
    #[serde(serialize_with = "intmat::serialize_bigint")]
    pub determinant: BigInt,
    #[serde(serialize_with = "intmat::serialize_bigint_vec")]
    pub elementary_divisors: Vec<BigInt>,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub p: Option<BigInt>,
    #[serde(serialize_with = "intmat::serialize_bigint")]
    pub defect_order: BigInt,
}

pub(crate) fn serialize_opt_bigint<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => intmat::serialize_bigint(v, s),
        None => s.serialize_none(),
    }
}

impl CartanCandidate {
    /// Derives invariants for an arbitrary matrix; the matrix is stored in
    /// canonical permutation form. Fails unless the matrix is symmetric.
    pub fn from_matrix(m: &IntMatrix) -> Result<Self, CartanError> {
        let matrix = canonical_perm_form(m)?;
        let determinant = intmat::det(&matrix)?;
        let elementary_divisors = smith_normal_form(&matrix).elementary_divisors();
        let defect_order = elementary_divisors.last().cloned().unwrap_or_else(BigInt::zero);
        let p = prime_power_base(&determinant);
        let entry_sum = u64::try_from(&matrix.entry_sum()).map_err(|_| IntMatError::EntryTooLarge)?;
        Ok(CartanCandidate {
            l: matrix.row_count(),
            matrix,
            entry_sum,
            determinant,
            elementary_divisors,
            p,
            defect_order,
        })
    }
}

/// Smallest prime factor.
fn smallest_prime_factor(n: &BigInt) -> Option<BigInt> {
    if n <= &BigInt::one() {
        return None;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return Some(d);
        }
        d += 1;
    }
    Some(n.clone())
}

/// `Some(p)` when `n = pᵃ` with `a ≥ 1`.
pub fn prime_power_base(n: &BigInt) -> Option<BigInt> {
    let p = smallest_prime_factor(n)?;
    let mut m = n.clone();
    while (&m % &p).is_zero() {
        m /= &p;
    }
    m.is_one().then_some(p)
}

fn distinct_primes(n: &BigInt) -> BTreeSet<BigInt> {
    let mut out = BTreeSet::new();
    let mut m = n.clone();
    while let Some(p) = smallest_prime_factor(&m) {
        while (&m % &p).is_zero() {
            m /= &p;
        }
        out.insert(p);
    }
    out
}

/// Minimal entry sum of an `l × l` indecomposable candidate: trace at least
/// `2l` plus two units per edge of a spanning tree.
pub fn min_sum_for_l(l: usize) -> u64 {
    if l <= 1 {
        1
    } else {
        (2 * l + 2 * (l - 1)) as u64
    }
}

pub fn enumerate_cartan(entry_sum: u64, l: usize) -> Result<Vec<CartanCandidate>, CartanError> {
    enumerate_cartan_bounded(entry_sum, l, DEFAULT_MAX_SUM)
}

/// All non-negative symmetric positive definite indecomposable `l × l`
/// matrices with the given entry sum (diagonal at least 2 when `l ≥ 2`), one
/// per permutation class, in descending canonical-key order.
pub fn enumerate_cartan_bounded(
    entry_sum: u64,
    l: usize,
    max_sum: u64,
) -> Result<Vec<CartanCandidate>, CartanError> {
    if l == 0 {
        return Err(CartanError::ZeroSize);
    }
    if entry_sum > max_sum {
        return Err(CartanError::SumTooLarge { sum: entry_sum, max: max_sum });
    }
    if l == 1 {
        if entry_sum == 0 {
            return Ok(Vec::new());
        }
        let m = IntMatrix::from_rows(&[vec![entry_sum]])?;
        return Ok(vec![CartanCandidate::from_matrix(&m)?]);
    }
    if entry_sum < min_sum_for_l(l) {
        return Ok(Vec::new());
    }

    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut diag = Vec::with_capacity(l);
    diagonals(l, entry_sum, entry_sum, &mut diag, &mut |diag, rest| {
        // rest is the off-diagonal mass; each pair counts twice
        if rest % 2 != 0 {
            return;
        }
        let pairs: Vec<(usize, usize)> =
            (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect();
        let mut off = vec![0u64; pairs.len()];
        off_diagonals(&pairs, 0, rest / 2, &mut off, &mut |off| {
            let mut rows = vec![vec![0u64; l]; l];
            for (i, &d) in diag.iter().enumerate() {
                rows[i][i] = d;
            }
            for (&(i, j), &v) in pairs.iter().zip(off.iter()) {
                rows[i][j] = v;
                rows[j][i] = v;
            }
            let m = IntMatrix::from_rows(&rows).expect("l ≥ 2");
            if is_indecomposable(&m).unwrap_or(false) && is_positive_definite(&m).unwrap_or(false) {
                let c = canonical_perm_form(&m).expect("l within canonical bound");
                found.insert(c.entries().iter().map(|x| u64::try_from(x).expect("non-negative")).collect());
            }
        });
    });

    let mut out = found
        .into_iter()
        .map(|flat| {
            let rows: Vec<Vec<u64>> = flat.chunks(l).map(<[u64]>::to_vec).collect();
            CartanCandidate::from_matrix(&IntMatrix::from_rows(&rows)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|c| std::cmp::Reverse(canonical_key(&c.matrix)));
    Ok(out)
}

fn canonical_key(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.row_count();
    let mut key = m.diag();
    for i in 0..n {
        for j in i + 1..n {
            key.push(m[(i, j)].clone());
        }
    }
    key
}

/// Nonincreasing diagonals with entries ≥ 2 whose sum leaves room for a
/// connected off-diagonal pattern.
fn diagonals(
    l: usize,
    total: u64,
    cap: u64,
    diag: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64], u64),
) {
    let used: u64 = diag.iter().sum();
    if diag.len() == l {
        visit(diag, total - used);
        return;
    }
    let left = (l - diag.len() - 1) as u64;
    let reserve = 2 * left + 2 * (l as u64 - 1);
    if used + 2 + reserve > total {
        return;
    }
    let hi = cap.min(total - used - reserve);
    for d in (2..=hi).rev() {
        diag.push(d);
        diagonals(l, total, d, diag, visit);
        diag.pop();
    }
}

fn off_diagonals(
    pairs: &[(usize, usize)],
    idx: usize,
    remaining: u64,
    off: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64]),
) {
    if idx == pairs.len() {
        if remaining == 0 {
            visit(off);
        }
        return;
    }
    for v in 0..=remaining {
        off[idx] = v;
        off_diagonals(pairs, idx + 1, remaining - v, off, visit);
    }
    off[idx] = 0;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityReason {
    NotPrimePower,
    DetOneWithLGe2,
    RepeatedTopDivisor,
    MixedPrimeDivisors,
    /// Annotation on a feasible candidate: `|D| = p`, hand off to Brauer trees.
    PrimeDetDefectOne,
}

impl FeasibilityReason {
    pub fn code(self) -> &'static str {
        match self {
            FeasibilityReason::NotPrimePower => "not_prime_power",
            FeasibilityReason::DetOneWithLGe2 => "det_one_with_l_ge_2",
            FeasibilityReason::RepeatedTopDivisor => "repeated_top_divisor",
            FeasibilityReason::MixedPrimeDivisors => "mixed_prime_divisors",
            FeasibilityReason::PrimeDetDefectOne => "prime_det_defect_one",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    pub reason: Option<FeasibilityReason>,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub p: Option<BigInt>,
}

impl FeasibilityVerdict {
    fn rejected(reason: FeasibilityReason) -> Self {
        FeasibilityVerdict { status: FeasibilityStatus::Rejected, reason: Some(reason), p: None }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Arithmetic necessary conditions: the determinant is a prime power, all
/// elementary divisors are powers of one prime, and the largest occurs once.
pub fn filter_block_feasible(c: &CartanCandidate) -> FeasibilityVerdict {
    if c.determinant.is_one() {
        if c.l >= 2 {
            return FeasibilityVerdict::rejected(FeasibilityReason::DetOneWithLGe2);
        }
        // C = (1): a block of defect zero, any characteristic
        return FeasibilityVerdict { status: FeasibilityStatus::Feasible, reason: None, p: None };
    }
    let Some(p) = prime_power_base(&c.determinant) else {
        return FeasibilityVerdict::rejected(FeasibilityReason::NotPrimePower);
    };
    let primes: BTreeSet<BigInt> = c
        .elementary_divisors
        .iter()
        .flat_map(distinct_primes)
        .collect();
    if primes.len() > 1 {
        return FeasibilityVerdict::rejected(FeasibilityReason::MixedPrimeDivisors);
    }
    let top = &c.defect_order;
    if c.elementary_divisors.iter().filter(|d| *d == top).count() > 1 {
        return FeasibilityVerdict::rejected(FeasibilityReason::RepeatedTopDivisor);
    }
    let reason = (top == &p).then_some(FeasibilityReason::PrimeDetDefectOne);
    FeasibilityVerdict { status: FeasibilityStatus::Feasible, reason, p: Some(p) }
}
