//! Benchmark fixtures: the Cartan matrices the case analyses spend their time on.

use blocksmith_core::intmat::IntMatrix;

/// `(name, C, |D|)` for every composite-determinant target.
pub fn gram_targets() -> Vec<(&'static str, IntMatrix, u64)> {
    let m = |rows: &[&[i64]]| IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    vec![
        ("det16_2x2", m(&[&[5, 2], &[2, 4]]), 16),
        ("det27_2x2", m(&[&[7, 1], &[1, 4]]), 27),
        ("det16_3x3a", m(&[&[5, 1, 1], &[1, 2, 0], &[1, 0, 2]]), 16),
        ("det16_3x3b", m(&[&[6, 1, 0], &[1, 2, 1], &[0, 1, 2]]), 16),
        ("det25_3x3", m(&[&[5, 1, 1], &[1, 3, 0], &[1, 0, 2]]), 25),
        ("det27_3x3", m(&[&[6, 0, 1], &[0, 3, 1], &[1, 1, 2]]), 27),
    ]
}

/// Dense matrix with entries in `[-9, 9]`, fixed by `seed`.
pub fn dense(n: usize, seed: u64) -> IntMatrix {
    let mut x = seed;
    IntMatrix::from_fn(n, n, |_, _| {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (((x >> 33) % 19) as i64 - 9).into()
    })
    .unwrap()
}
