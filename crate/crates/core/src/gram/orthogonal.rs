use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::GramError;
use crate::intmat::IntMatrix;

/// Integer columns `x` with `x·x = gram_value`, `Q₁ᵗx = 0` and `x_i = 0` for
/// every `i` in `zero_rows`, listed up to global sign (first nonzero entry
/// positive) in descending lexicographic order.
///
/// This is a direct entry-by-entry search, independent of [`super::solve`].
pub fn solve_orthogonal_column(
    q1: &IntMatrix,
    gram_value: &BigInt,
    zero_rows: &BTreeSet<usize>,
) -> Result<Vec<Vec<BigInt>>, GramError> {
    let g = gram_value
        .to_i64()
        .filter(|&g| g > 0 && g <= i32::MAX as i64)
        .ok_or_else(|| GramError::InvalidInput(format!("column norm {gram_value} must be a positive 32-bit value")))?;
    let k = q1.row_count();
    if let Some(&bad) = zero_rows.iter().find(|&&i| i >= k) {
        return Err(GramError::InvalidInput(format!("zero row {bad} out of range for {k} rows")));
    }
    let q = q1.to_i64_rows()?;
    let w = q1.col_count();
    let mut tail = vec![vec![0i128; w]; k + 1];
    for i in (0..k).rev() {
        for f in 0..w {
            tail[i][f] = tail[i + 1][f] + (q[i][f] as i128).pow(2);
        }
    }
    let mut st = State { q: &q, tail: &tail, zero_rows, x: vec![0; k], cross: vec![0; w], out: Vec::new() };
    st.go(0, g);
    let mut out: Vec<Vec<BigInt>> = st
        .out
        .into_iter()
        .map(|x| x.into_iter().map(BigInt::from).collect())
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

struct State<'a> {
    q: &'a [Vec<i64>],
    tail: &'a [Vec<i128>],
    zero_rows: &'a BTreeSet<usize>,
    x: Vec<i64>,
    cross: Vec<i128>,
    out: Vec<Vec<i64>>,
}

impl State<'_> {
    fn go(&mut self, i: usize, left: i64) {
        let k = self.x.len();
        for (f, &s) in self.cross.iter().enumerate() {
            if s * s > left as i128 * self.tail[i][f] {
                return;
            }
        }
        if i == k {
            if left == 0 && self.cross.iter().all(Zero::is_zero) && self.x.iter().any(|&v| v != 0) {
                self.out.push(self.x.clone());
            }
            return;
        }
        if self.zero_rows.contains(&i) {
            self.go(i + 1, left);
            return;
        }
        let leading = self.x[..i].iter().all(|&v| v == 0);
        let b = (left as u64).isqrt() as i64;
        let lo = if leading { 0 } else { -b };
        for v in (lo..=b).rev() {
            self.x[i] = v;
            for (f, c) in self.cross.iter_mut().enumerate() {
                *c += v as i128 * self.q[i][f] as i128;
            }
            self.go(i + 1, left - v * v);
            for (f, c) in self.cross.iter_mut().enumerate() {
                *c -= v as i128 * self.q[i][f] as i128;
            }
        }
        self.x[i] = 0;
    }
}
