//! Contribution matrices `|D|·Q·C⁻¹·Qᵗ` and the character heights they encode.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cartan::{prime_power_base, serialize_opt_bigint};
use crate::intmat::{self, IntMatError, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContribError {
    #[error("qᵗq does not equal the given Cartan matrix")]
    GramMismatch,
    #[error("defect order must be positive")]
    NonPositiveDefectOrder,
    #[error("contribution matrix is not integral (entry ({row}, {col}) has denominator {denominator})")]
    NotIntegral { row: usize, col: usize, denominator: BigInt },
    #[error("contribution matrix fails M·M = |D|·M")]
    NotIdempotent,
    #[error("no prime attached to defect order {0}; pass one explicitly")]
    MissingPrime(BigInt),
    #[error("diagonal entry {row} is zero")]
    ZeroDiagonal { row: usize },
    #[error("diagonal entry {row} has odd {p}-adic valuation {valuation}")]
    OddValuation { row: usize, p: BigInt, valuation: u32 },
    #[error("no character of height zero")]
    NoHeightZero,
    #[error("value {value} at position {index} outside [0, {defect_order}]")]
    OutOfRange { index: usize, value: BigInt, defect_order: BigInt },
    #[error("diagonal lists have different lengths")]
    LengthMismatch,
    #[error("diagonals at position {index} sum to {sum}, expected {defect_order}")]
    PartitionMismatch { index: usize, sum: BigInt, defect_order: BigInt },
    #[error(transparent)]
    Matrix(#[from] IntMatError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContributionResult {
    pub m: IntMatrix,
    #[serde(serialize_with = "intmat::serialize_bigint")]
    pub defect_order: BigInt,
    /// Prime attached to `defect_order`; `None` when it is 1 or not a prime power.
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub p: Option<BigInt>,
    /// Column count of the generating `Q`.
    pub l: usize,
}

impl ContributionResult {
    pub fn diag(&self) -> Vec<BigInt> {
        self.m.diag()
    }
}

/// `defect_order · q·c⁻¹·qᵗ`, computed exactly.
///
/// `defect_order` is not required to be the top elementary divisor of `c`,
/// so the same routine serves generalized decomposition columns, e.g.
/// `c = (9)` against `|D| = 27`.
pub fn contribution_matrix(
    q: &IntMatrix,
    c: &IntMatrix,
    defect_order: &BigInt,
) -> Result<ContributionResult, ContribError> {
    if !defect_order.is_positive() {
        return Err(ContribError::NonPositiveDefectOrder);
    }
    if q.col_count() != c.row_count() || q.gram() != *c {
        return Err(ContribError::GramMismatch);
    }
    let inv = intmat::scaled_inverse(c, defect_order)?;
    let num = q.mul(&inv.numerator)?.mul(&q.transpose())?;
    let k = q.row_count();
    let mut m = IntMatrix::zeros(k, k)?;
    for i in 0..k {
        for j in 0..k {
            let (quot, rem) = num[(i, j)].div_rem(&inv.denominator);
            if !rem.is_zero() {
                let g = rem.gcd(&inv.denominator);
                return Err(ContribError::NotIntegral { row: i, col: j, denominator: &inv.denominator / g });
            }
            m[(i, j)] = quot;
        }
    }
    if m.mul(&m)? != m.scale(defect_order) {
        return Err(ContribError::NotIdempotent);
    }
    let p = if defect_order.is_one() { None } else { prime_power_base(defect_order) };
    Ok(ContributionResult { m, defect_order: defect_order.clone(), p, l: c.row_count() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightProfile {
    pub heights: Vec<u32>,
    pub k: usize,
    /// Number of rows of each height.
    pub k_h: BTreeMap<u32, usize>,
}

impl HeightProfile {
    pub fn k_of_height(&self, h: u32) -> usize {
        self.k_h.get(&h).copied().unwrap_or(0)
    }
}

/// Height of row `i` is `v_p(m_ii) / 2`.
///
/// This rule matches every worked instance available; rows with odd
/// valuation are rejected instead of rounded.
pub fn heights_from_contribution(r: &ContributionResult) -> Result<HeightProfile, ContribError> {
    let diag = r.diag();
    let heights = if r.defect_order.is_one() {
        for (row, d) in diag.iter().enumerate() {
            if d.is_zero() {
                return Err(ContribError::ZeroDiagonal { row });
            }
        }
        vec![0; diag.len()]
    } else {
        let p = r.p.as_ref().ok_or_else(|| ContribError::MissingPrime(r.defect_order.clone()))?;
        let mut hs = Vec::with_capacity(diag.len());
        for (row, d) in diag.iter().enumerate() {
            if d.is_zero() {
                return Err(ContribError::ZeroDiagonal { row });
            }
            let v = intmat::p_adic_valuation(d, p)?;
            if v % 2 == 1 {
                return Err(ContribError::OddValuation { row, p: p.clone(), valuation: v });
            }
            hs.push(v / 2);
        }
        hs
    };
    let mut k_h = BTreeMap::new();
    for &h in &heights {
        *k_h.entry(h).or_insert(0) += 1;
    }
    if !k_h.contains_key(&0) {
        return Err(ContribError::NoHeightZero);
    }
    Ok(HeightProfile { k: heights.len(), heights, k_h })
}

/// `defect_order − value` per position.
pub fn complement_diag(known: &[BigInt], defect_order: &BigInt) -> Result<Vec<BigInt>, ContribError> {
    residual_diag(&[known.to_vec()], defect_order)
}

/// `defect_order − Σ_u value_u` per position; every partial sum must stay in
/// `[0, defect_order]`.
pub fn residual_diag(parts: &[Vec<BigInt>], defect_order: &BigInt) -> Result<Vec<BigInt>, ContribError> {
    if !defect_order.is_positive() {
        return Err(ContribError::NonPositiveDefectOrder);
    }
    let k = parts.first().map_or(0, Vec::len);
    if parts.iter().any(|p| p.len() != k) {
        return Err(ContribError::LengthMismatch);
    }
    let mut out = Vec::with_capacity(k);
    for index in 0..k {
        let mut sum = BigInt::zero();
        for part in parts {
            let value = &part[index];
            if value.is_negative() || value > defect_order {
                return Err(ContribError::OutOfRange {
                    index,
                    value: value.clone(),
                    defect_order: defect_order.clone(),
                });
            }
            sum += value;
        }
        if &sum > defect_order {
            return Err(ContribError::OutOfRange { index, value: sum, defect_order: defect_order.clone() });
        }
        out.push(defect_order - sum);
    }
    Ok(out)
}

/// Checks `Σ_u diag(M^u) = defect_order` at every position.
pub fn check_diag_partition(parts: &[Vec<BigInt>], defect_order: &BigInt) -> Result<(), ContribError> {
    let k = parts.first().map_or(0, Vec::len);
    if parts.iter().any(|p| p.len() != k) {
        return Err(ContribError::LengthMismatch);
    }
    for index in 0..k {
        let sum: BigInt = parts.iter().map(|p| &p[index]).sum();
        if &sum != defect_order {
            return Err(ContribError::PartitionMismatch { index, sum, defect_order: defect_order.clone() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn seven_row_sixteen() {
        let q = mat(&[&[1, 1], &[1, 1], &[0, 1], &[0, 1], &[1, 0], &[1, 0], &[1, 0]]);
        let r = contribution_matrix(&q, &mat(&[&[5, 2], &[2, 4]]), &BigInt::from(16)).unwrap();
        assert_eq!(r.diag(), big(&[5, 5, 5, 5, 4, 4, 4]));
        assert_eq!(r.m.trace(), BigInt::from(32));
        let h = heights_from_contribution(&r).unwrap();
        assert_eq!(h.heights, vec![0, 0, 0, 0, 1, 1, 1]);
        assert_eq!(h.k_of_height(0), 4);
    }

    #[test]
    fn generalized_column() {
        let qu = mat(&[&[1], &[-1], &[-1], &[2], &[-1], &[-1], &[0]]);
        let r = contribution_matrix(&qu, &mat(&[&[9]]), &BigInt::from(27)).unwrap();
        assert_eq!(r.diag(), big(&[3, 3, 3, 12, 3, 3, 0]));
        assert!(matches!(heights_from_contribution(&r), Err(ContribError::OddValuation { row: 0, .. })));
    }

    #[test]
    fn errors() {
        let q = mat(&[&[1, 0], &[0, 1]]);
        assert_eq!(
            contribution_matrix(&q, &mat(&[&[2, 0], &[0, 1]]), &BigInt::from(2)),
            Err(ContribError::GramMismatch)
        );
        // 1·(2)⁻¹·1 = 1/2
        let r = contribution_matrix(&mat(&[&[1], &[1]]), &mat(&[&[2]]), &BigInt::from(1));
        assert!(matches!(r, Err(ContribError::NotIntegral { .. })));
        // diag (2): valuation 1 at p = 2
        let r = contribution_matrix(&mat(&[&[1], &[1]]), &mat(&[&[2]]), &BigInt::from(4)).unwrap();
        assert!(matches!(heights_from_contribution(&r), Err(ContribError::OddValuation { .. })));
    }

    #[test]
    fn trivial_block() {
        let r = contribution_matrix(&mat(&[&[1]]), &mat(&[&[1]]), &BigInt::from(1)).unwrap();
        assert_eq!(heights_from_contribution(&r).unwrap().heights, vec![0]);
    }

    #[test]
    fn complements() {
        let d = BigInt::from(27);
        assert_eq!(
            complement_diag(&big(&[16, 4, 4, 7, 7, 7, 9]), &d).unwrap(),
            big(&[11, 23, 23, 20, 20, 20, 18])
        );
        assert_eq!(complement_diag(&big(&[0, 0, 0]), &d).unwrap(), big(&[27, 27, 27]));
        assert!(complement_diag(&big(&[28]), &d).is_err());
        let parts = [big(&[16, 4, 4, 7, 7, 7, 9]), big(&[3, 3, 3, 12, 3, 3, 0])];
        let rest = residual_diag(&parts, &d).unwrap();
        assert_eq!(rest, big(&[8, 20, 20, 8, 17, 17, 18]));
        let all = [parts[0].clone(), parts[1].clone(), rest];
        assert!(check_diag_partition(&all, &d).is_ok());
        assert!(check_diag_partition(&all[..2], &d).is_err());
    }
}
