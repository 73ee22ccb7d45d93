use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact positive-semidefiniteness of a symmetric integer matrix.
///
/// Symmetric fraction-free elimination: zero diagonal entries must have zero
/// rows, negative ones fail, positive ones are pivoted out. Each division by
/// the previous pivot is exact (entries remain bordered principal minors).
pub(crate) fn is_psd(a: &[Vec<i64>]) -> bool {
    match is_psd_i128(a) {
        Some(v) => v,
        None => is_psd_big(a),
    }
}

fn is_psd_i128(a: &[Vec<i64>]) -> Option<bool> {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev: i128 = 1;
    loop {
        let mut pivot = None;
        let mut keep = Vec::with_capacity(active.len());
        for &i in &active {
            let d = m[i][i];
            if d < 0 {
                return Some(false);
            }
            if d == 0 {
                if active.iter().any(|&j| m[i][j] != 0) {
                    return Some(false);
                }
                continue;
            }
            if pivot.is_none() {
                pivot = Some(i);
            } else {
                keep.push(i);
            }
        }
        let Some(p) = pivot else { return Some(true) };
        let pv = m[p][p];
        for &i in &keep {
            for &j in &keep {
                if j < i {
                    continue;
                }
                let v = pv.checked_mul(m[i][j])?.checked_sub(m[i][p].checked_mul(m[p][j])?)? / prev;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        prev = pv;
        active = keep;
    }
}

fn is_psd_big(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    loop {
        let mut pivot = None;
        let mut keep = Vec::with_capacity(active.len());
        for &i in &active {
            if m[i][i].is_negative() {
                return false;
            }
            if m[i][i].is_zero() {
                if active.iter().any(|&j| !m[i][j].is_zero()) {
                    return false;
                }
                continue;
            }
            if pivot.is_none() {
                pivot = Some(i);
            } else {
                keep.push(i);
            }
        }
        let Some(p) = pivot else { return true };
        let pv = m[p][p].clone();
        for &i in &keep {
            for &j in &keep {
                if j < i {
                    continue;
                }
                let v = (&pv * &m[i][j] - &m[i][p] * &m[p][j]) / &prev;
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        prev = pv;
        active = keep;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(is_psd(&[vec![0]]));
        assert!(!is_psd(&[vec![-1]]));
        assert!(is_psd(&[vec![1, 1], vec![1, 1]]));
        assert!(!is_psd(&[vec![1, 2], vec![2, 1]]));
        assert!(!is_psd(&[vec![0, 1], vec![1, 0]]));
        assert!(is_psd(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]));
        // rank one, zero pivot appears mid-elimination
        assert!(is_psd(&[vec![1, 2, 3], vec![2, 4, 6], vec![3, 6, 9]]));
        assert!(!is_psd(&[vec![1, 2, 3], vec![2, 4, 6], vec![3, 6, 8]]));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let a = vec![vec![big, big - 1], vec![big - 1, big]];
        assert_eq!(is_psd_i128(&a), Some(true));
        let n = 6;
        let a: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { big } else { big / 3 }).collect())
            .collect();
        assert!(is_psd(&a));
        assert!(is_psd_big(&a));
    }
}
