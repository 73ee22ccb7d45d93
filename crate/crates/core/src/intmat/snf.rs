use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::IntMatrix;

/// Smith normal form `left · m · right = diag(d₁, …, d_r, 0, …)`.
///
/// `diagonal` holds all `min(rows, cols)` diagonal entries, zeros included,
/// non-negative and forming a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnfResult {
    #[serde(serialize_with = "super::serialize_bigint_vec")]
    pub diagonal: Vec<BigInt>,
    pub left_transform: IntMatrix,
    pub right_transform: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries, i.e. the elementary divisors.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    left: Vec<Vec<BigInt>>,
    right: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row[dst] += f · row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for mat in [&mut self.a, &mut self.left] {
            let (s, d) = pick(mat, src, dst);
            for (x, y) in d.iter_mut().zip(s.iter()) {
                *x += f * y;
            }
        }
    }

    /// col[dst] += f · col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            let v = f * &row[src];
            row[dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.left[i].iter_mut()) {
            *x = -std::mem::take(x);
        }
    }
}

fn pick(mat: &mut [Vec<BigInt>], src: usize, dst: usize) -> (&Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(src, dst);
    if src < dst {
        let (lo, hi) = mat.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = mat.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

/// Pivot-and-reduce Smith normal form with explicit unimodular transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.row_count(), m.col_count());
    let mut w = Work { a: m.to_nested(), left: identity(rows), right: identity(cols) };
    let steps = rows.min(cols);

    for t in 0..steps {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = min_nonzero(&w.a, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.add_row(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    // remainder smaller than the pivot: promote it
                    w.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.add_col(j, t, &-q);
                if !w.a[t][j].is_zero() {
                    w.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row t and column t are clear; enforce divisibility of the block.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&w.a[i][j] % &w.a[t][t]).is_zero());
            match bad {
                Some((i, _)) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }

    let diagonal = (0..steps).map(|i| w.a[i][i].clone()).collect();
    SnfResult {
        diagonal,
        left_transform: IntMatrix::from_rows(&w.left).expect("non-empty"),
        right_transform: IntMatrix::from_rows(&w.right).expect("non-empty"),
    }
}

fn min_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}
