use std::cmp::Ordering;

use num_bigint::BigInt;

use super::{IntMatError, IntMatrix};

pub const CANONICAL_MAX_DIM: usize = 8;

/// Canonical representative of `m` under simultaneous row/column permutation.
///
/// Among all `P·m·Pᵗ` the result maximizes the key (diagonal, then the strict
/// upper triangle in row-major order), compared lexicographically. The
/// diagonal therefore comes out nonincreasing and ties are broken by placing
/// large off-diagonal entries early. Only permutations that sort the diagonal
/// can win, so the search runs over orderings inside blocks of equal
/// diagonal entries.
pub fn canonical_perm_form(m: &IntMatrix) -> Result<IntMatrix, IntMatError> {
    m.require_symmetric()?;
    let n = m.row_count();
    if n > CANONICAL_MAX_DIM {
        return Err(IntMatError::DimensionTooLarge { dim: n, max: CANONICAL_MAX_DIM });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[(b, b)].cmp(&m[(a, a)]).then(a.cmp(&b)));

    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || m[(order[i], order[i])] != m[(order[start], order[start])] {
            blocks.push((start, i));
            start = i;
        }
    }

    let mut best: Option<(Vec<BigInt>, Vec<usize>)> = None;
    let mut perm = order.clone();
    search_blocks(m, &blocks, 0, &mut perm, &mut best);
    let (_, p) = best.expect("at least one permutation");
    Ok(m.permute_symmetric(&p))
}

fn upper_key(m: &IntMatrix, perm: &[usize]) -> Vec<BigInt> {
    let n = perm.len();
    let mut key = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            key.push(m[(perm[i], perm[j])].clone());
        }
    }
    key
}

fn search_blocks(
    m: &IntMatrix,
    blocks: &[(usize, usize)],
    b: usize,
    perm: &mut Vec<usize>,
    best: &mut Option<(Vec<BigInt>, Vec<usize>)>,
) {
    if b == blocks.len() {
        let key = upper_key(m, perm);
        let better = match best {
            None => true,
            Some((k, _)) => key.cmp(k) == Ordering::Greater,
        };
        if better {
            *best = Some((key, perm.clone()));
        }
        return;
    }
    let (lo, hi) = blocks[b];
    permute_range(perm, lo, hi, &mut |perm| search_blocks(m, blocks, b + 1, perm, best));
}

/// Visits every arrangement of `perm[k..hi]`.
fn permute_range(
    perm: &mut Vec<usize>,
    k: usize,
    hi: usize,
    visit: &mut dyn FnMut(&mut Vec<usize>),
) {
    if hi - k <= 1 {
        visit(perm);
        return;
    }
    for i in k..hi {
        perm.swap(k, i);
        permute_range(perm, k + 1, hi, visit);
        perm.swap(k, i);
    }
}
