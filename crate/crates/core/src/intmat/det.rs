use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{IntMatError, IntMatrix};

/// Bareiss elimination over the integers. Returns the sign-corrected
/// determinant. Rows are swapped when a pivot vanishes.
pub fn det(m: &IntMatrix) -> Result<BigInt, IntMatError> {
    m.require_square()?;
    let n = m.row_count();
    let mut a = m.to_nested();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Leading principal minors `Δ₁, …, Δₙ`, read off Bareiss pivots without
/// row exchanges. Once a minor vanishes the remaining ones are recomputed
/// directly.
pub fn leading_minors(m: &IntMatrix) -> Result<Vec<BigInt>, IntMatError> {
    m.require_square()?;
    let n = m.row_count();
    let mut a = m.to_nested();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            minors.push(BigInt::zero());
            for r in k + 1..n {
                let idx: Vec<usize> = (0..=r).collect();
                minors.push(det(&m.select(&idx, &idx)?)?);
            }
            return Ok(minors);
        }
        minors.push(a[k][k].clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(minors)
}

/// Sylvester's criterion on an exact symmetric matrix.
pub fn is_positive_definite(m: &IntMatrix) -> Result<bool, IntMatError> {
    m.require_symmetric()?;
    Ok(leading_minors(m)?.iter().all(|d| d.sign() == Sign::Plus))
}

/// Connectivity of the graph on indices joined by nonzero off-diagonal entries.
pub fn is_indecomposable(m: &IntMatrix) -> Result<bool, IntMatError> {
    m.require_symmetric()?;
    let n = m.row_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && i != j && !m[(i, j)].is_zero() {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

/// `scale · m⁻¹` as `numerator / denominator`, reduced so that the
/// denominator is positive and coprime to the gcd of the numerator entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledInverse {
    pub numerator: IntMatrix,
    #[serde(serialize_with = "super::serialize_bigint")]
    pub denominator: BigInt,
}

impl ScaledInverse {
    pub fn is_integral(&self) -> bool {
        self.denominator.is_one()
    }
}

pub(crate) fn adjugate(m: &IntMatrix) -> Result<IntMatrix, IntMatError> {
    m.require_square()?;
    let n = m.row_count();
    if n == 1 {
        return IntMatrix::identity(1);
    }
    let mut adj = IntMatrix::zeros(n, n)?;
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = det(&m.select(&rows, &cols)?)?;
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    Ok(adj)
}

pub fn scaled_inverse(m: &IntMatrix, scale: &BigInt) -> Result<ScaledInverse, IntMatError> {
    if !scale.is_positive() {
        return Err(IntMatError::NonPositiveScale);
    }
    let d = det(m)?;
    if d.is_zero() {
        return Err(IntMatError::Singular);
    }
    let adj = adjugate(m)?;
    let mut num = adj.scale(scale);
    let mut den = d;
    let g = num.entries().iter().fold(den.clone(), |g, x| g.gcd(x));
    if !g.is_one() {
        num = IntMatrix::from_fn(num.row_count(), num.col_count(), |i, j| &num[(i, j)] / &g)?;
        den /= &g;
    }
    if den.is_negative() {
        num = num.scale(&BigInt::from(-1));
        den = -den;
    }
    Ok(ScaledInverse { numerator: num, denominator: den })
}

/// Strict variant of [`scaled_inverse`]: fails unless `scale · m⁻¹` is integral.
pub fn scaled_inverse_integral(m: &IntMatrix, scale: &BigInt) -> Result<IntMatrix, IntMatError> {
    let inv = scaled_inverse(m, scale)?;
    if inv.is_integral() {
        Ok(inv.numerator)
    } else {
        Err(IntMatError::NotIntegral(inv.denominator.to_string()))
    }
}

pub(crate) fn is_prime(p: &BigInt) -> bool {
    if p < &BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *p {
        if (p % &d).is_zero() {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `e` with `pᵉ | n`.
pub fn p_adic_valuation(n: &BigInt, p: &BigInt) -> Result<u32, IntMatError> {
    if !is_prime(p) {
        return Err(IntMatError::NotPrime(p.to_string()));
    }
    if n.is_zero() {
        return Err(IntMatError::ZeroValuation);
    }
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}
