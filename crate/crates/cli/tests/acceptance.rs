//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are expected to fail; the process
//! exits non-zero only when some other criterion fails or a known deviation
//! unexpectedly passes.

use std::collections::BTreeSet;
use std::process::Command;

use blocksmith_core::brauer::{cartan_of_tree, dim_of_tree, enumerate_trees, BrauerTree};
use blocksmith_core::casebook::det25_decomposition;
use blocksmith_core::contrib::{complement_diag, contribution_matrix, residual_diag};
use blocksmith_core::gram::{self, solve_orthogonal_column, verify_solution, GramProblem, GramSolution};
use blocksmith_core::intmat::{canonical_perm_form, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

type Rows = Vec<Vec<i64>>;
type Outcome = Result<(bool, String), String>;

const KNOWN_DEVIATIONS: &[(u32, &str)] = &[
    (1, "[[5,3],[3,2]] (det 1) satisfies every enumeration condition and is not in the printed l=2 table"),
    (3, "[[5,2],[2,4]] has two further decompositions, both without characters of height zero"),
];

fn bin(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_blocksmith")).args(args).output().map_err(|e| e.to_string())?;
    let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), stdout))
}

fn bin_json(args: &[&str]) -> Result<Value, String> {
    let (code, s) = bin(args)?;
    let v: Value = serde_json::from_str(&s).map_err(|e| format!("{args:?}: {e}"))?;
    if code != 0 && code != 2 {
        return Err(format!("{args:?} exited with {code}: {}", v["payload"]));
    }
    Ok(v)
}

fn mat(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

fn rows_of(v: &Value) -> Rows {
    let rows = if v.get("rows").is_some() { &v["rows"] } else { v };
    serde_json::from_value(rows.clone()).unwrap()
}

fn sorted(mut r: Rows) -> Rows {
    r.sort();
    r
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn cartan_dets(sum: &str, l: &str) -> Result<Vec<i64>, String> {
    let v = bin_json(&["enumerate-cartan", "--sum", sum, "--l", l])?;
    let mut d: Vec<i64> =
        v["payload"]["candidates"].as_array().unwrap().iter().map(|c| c["candidate"]["determinant"].as_i64().unwrap()).collect();
    d.sort();
    Ok(d)
}

fn criterion_1() -> Outcome {
    let mut want2 = vec![17, 23, 27, 29, 10, 14, 16, 3];
    let mut want3 = vec![16, 13, 19, 18, 17, 21, 7, 1, 2];
    want2.sort();
    want3.sort();
    let (got2, got3) = (cartan_dets("13", "2")?, cartan_dets("13", "3")?);
    Ok((
        got2 == want2 && got3 == want3,
        format!("l=2 dets {got2:?} (want {want2:?}); l=3 dets {got3:?} (want {want3:?})"),
    ))
}

fn prime_power_not_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n % d == 0).unwrap();
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    m == 1 && n != p
}

fn criterion_2() -> Outcome {
    let v = bin_json(&["enumerate-cartan", "--sum", "14"])?;
    let got: BTreeSet<(Rows, i64)> = v["payload"]["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (rows_of(&c["candidate"]["matrix"]), c["candidate"]["determinant"].as_i64().unwrap()))
        .filter(|(_, d)| prime_power_not_prime(*d))
        .collect();
    let listed: [(Rows, i64); 5] = [
        (vec![vec![6, 1, 0], vec![1, 2, 1], vec![0, 1, 2]], 16),
        (vec![vec![5, 1, 1], vec![1, 3, 0], vec![1, 0, 2]], 25),
        (vec![vec![4, 2, 0], vec![2, 2, 1], vec![0, 1, 2]], 4),
        (vec![vec![3, 1, 0], vec![1, 3, 2], vec![0, 2, 2]], 4),
        (vec![vec![2, 1, 1, 1], vec![1, 2, 0, 0], vec![1, 0, 2, 0], vec![1, 0, 0, 2]], 4),
    ];
    let want: BTreeSet<(Rows, i64)> = listed
        .into_iter()
        .map(|(m, d)| (canonical_perm_form(&mat(&m)).unwrap().to_i64_rows().unwrap(), d))
        .collect();
    let dets: Vec<i64> = got.iter().map(|(_, d)| *d).collect();
    Ok((got == want, format!("{} matrices with dets {dets:?}", got.len())))
}

fn gram_solutions(target: &str) -> Result<BTreeSet<Rows>, String> {
    let v = bin_json(&["solve-gram", "--gram", target])?;
    Ok(v["payload"]["solutions"].as_array().unwrap().iter().map(|s| sorted(rows_of(&s["q"]))).collect())
}

fn criterion_3() -> Outcome {
    let a = gram_solutions("[[5,2],[2,4]]")?;
    let listed_a: BTreeSet<Rows> = [
        vec![vec![1, 1], vec![1, 1], vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0], vec![1, 0]],
        vec![vec![2, 1], vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 0]],
    ]
    .into_iter()
    .map(sorted)
    .collect();
    let b = gram_solutions("[[5,1,1],[1,2,0],[1,0,2]]")?;
    let c = gram_solutions("[[6,1,0],[1,2,1],[0,1,2]]")?;
    let listed_c: BTreeSet<Rows> = [
        vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]],
        vec![
            vec![1, 1, 0],
            vec![1, 0, 0],
            vec![1, 0, 0],
            vec![1, 0, 0],
            vec![1, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 1],
            vec![0, 0, 1],
        ],
    ]
    .into_iter()
    .map(sorted)
    .collect();
    let d = gram_solutions("[[7,1],[1,4]]")?;
    let listed_d: BTreeSet<Rows> = [
        vec![vec![2, 0], vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 1]],
        vec![
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![1, 1],
        ],
    ]
    .into_iter()
    .map(sorted)
    .collect();
    let counts = |s: &BTreeSet<Rows>| s.iter().map(Vec::len).collect::<Vec<_>>();
    let ok = a == listed_a && b.len() == 1 && c == listed_c && d == listed_d;
    Ok((
        ok,
        format!(
            "row counts: [[5,2],[2,4]] {:?} (listed {:?}), [[5,1,1],..] {:?}, [[6,1,0],..] {:?}, [[7,1],[1,4]] {:?}",
            counts(&a),
            counts(&listed_a),
            counts(&b),
            counts(&c),
            counts(&d)
        ),
    ))
}

fn contribution(q: &Rows, c: &str, d: &str) -> Result<Value, String> {
    let q = serde_json::to_string(q).unwrap();
    Ok(bin_json(&["contribution", "--q", &q, "--c", c, "--defect-order", d, "--heights"])?["payload"].clone())
}

fn q1_short() -> Rows {
    vec![vec![2, 0], vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 1]]
}

fn q1_long() -> Rows {
    let mut rows = vec![vec![1, 0]; 6];
    rows.extend([vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 1]]);
    rows
}

fn criterion_4() -> Outcome {
    let cases: [(Rows, &str, &str, Vec<i64>); 4] = [
        (
            vec![vec![1, 1], vec![1, 1], vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0], vec![1, 0]],
            "[[5,2],[2,4]]",
            "16",
            vec![5, 5, 5, 5, 4, 4, 4],
        ),
        (vec![vec![2, 1], vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 0]], "[[5,2],[2,4]]", "16", vec![13, 5, 5, 5, 4]),
        (q1_short(), "[[7,1],[1,4]]", "27", vec![16, 4, 4, 7, 7, 7, 9]),
        (q1_long(), "[[7,1],[1,4]]", "27", vec![4, 4, 4, 4, 4, 4, 7, 7, 7, 9]),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (q, c, d, want) in &cases {
        let p = contribution(q, c, d)?;
        let diag = ints(&p["diagonal"]);
        let k0 = p["heights"]["k0"].as_i64().unwrap();
        let k1 = p["heights"]["k_h"].get("1").and_then(Value::as_i64).unwrap_or(0);
        let heights_ok = if *d == "16" { k0 == 4 } else { (k0, k1) == (q.len() as i64 - 1, 1) };
        ok &= diag == *want && heights_ok;
        notes.push(format!("{diag:?} k0={k0} k1={k1}"));
    }
    let known = big(&[16, 4, 4, 7, 7, 7, 9]);
    let comp = complement_diag(&known, &BigInt::from(27)).map_err(|e| e.to_string())?;
    ok &= comp == big(&[11, 23, 23, 20, 20, 20, 18]);
    notes.push(format!("complement {comp:?}"));
    Ok((ok, notes.join("; ")))
}

fn criterion_5() -> Outcome {
    let long = mat(&q1_long());
    let none = solve_orthogonal_column(&long, &BigInt::from(9), &BTreeSet::from([9])).map_err(|e| e.to_string())?;
    let short = mat(&q1_short());
    // the height-one character (last row) carries a zero entry
    let cols = solve_orthogonal_column(&short, &BigInt::from(9), &BTreeSet::from([6])).map_err(|e| e.to_string())?;
    let shapes: BTreeSet<Vec<u64>> = cols
        .iter()
        .map(|c| {
            let mut s: Vec<u64> = c.iter().map(|x| u64::try_from(x.magnitude()).unwrap()).collect();
            s.sort_by(|a, b| b.cmp(a));
            s
        })
        .collect();
    let qu = [1, -1, -1, 2, -1, -1, 0];
    let joined: Rows = q1_short().into_iter().zip(qu).map(|(mut r, x)| {
        r.push(x);
        r
    }).collect();
    let target = mat(&[vec![7, 1, 0], vec![1, 4, 0], vec![0, 0, 9]]);
    let problem = GramProblem::new(target).signed().allow_zero_rows();
    let sol = GramSolution { q: mat(&joined), canonical_key: String::new() };
    let verified = verify_solution(&problem, &sol).map_err(|e| e.to_string())?;
    let d = BigInt::from(27);
    let m1 = contribution_matrix(&short, &mat(&[vec![7, 1], vec![1, 4]]), &d).map_err(|e| e.to_string())?.diag();
    let qu_m = mat(&qu.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    let mu = contribution_matrix(&qu_m, &mat(&[vec![9]]), &d).map_err(|e| e.to_string())?.diag();
    let mz = residual_diag(&[m1, mu], &d).map_err(|e| e.to_string())?;
    let ok = none.is_empty()
        && !cols.is_empty()
        && shapes == BTreeSet::from([vec![2, 1, 1, 1, 1, 1, 0]])
        && verified
        && mz == big(&[8, 20, 20, 8, 17, 17, 18]);
    Ok((
        ok,
        format!(
            "10-row case {} columns; 7-row case {} columns with shapes {shapes:?}; arrangement verified={verified}; M^z diagonal {mz:?}",
            none.len(),
            cols.len()
        ),
    ))
}

fn tree_rows(dim: &str) -> Result<BTreeSet<(String, u64, u64)>, String> {
    let v = bin_json(&["brauer-trees", "--dim", dim])?;
    Ok(v["payload"]["algebras"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["label"].as_str().unwrap().to_string(), t["m"].as_u64().unwrap(), t["p"].as_u64().unwrap()))
        .collect())
}

fn criterion_6() -> Outcome {
    let set = |v: &[(&str, u64, u64)]| v.iter().map(|&(s, m, p)| (s.to_string(), m, p)).collect::<BTreeSet<_>>();
    let want13 = set(&[
        ("edge", 12, 13),
        ("path-2/exceptional-end", 8, 17),
        ("path-3/exceptional-end", 4, 13),
        ("star-3/exceptional-end", 2, 7),
    ]);
    let want14 = set(&[
        ("path-2/exceptional-center", 3, 7),
        ("path-2/exceptional-end", 9, 19),
        ("path-3/exceptional-inner", 2, 7),
        ("path-4", 1, 5),
    ]);
    let (got13, got14) = (tree_rows("13")?, tree_rows("14")?);
    let mut counts = Vec::new();
    for e in 1..=3 {
        counts.push(bin_json(&["brauer-trees", "--edges", &e.to_string()])?["payload"]["count"].as_u64().unwrap());
    }
    Ok((
        got13 == want13 && got14 == want14 && counts == [1, 2, 4],
        format!("dim 13: {} rows, dim 14: {} rows, tree counts {counts:?}", got13.len(), got14.len()),
    ))
}

fn criterion_7() -> Outcome {
    let (s, kl) = det25_decomposition().map_err(|e| e.to_string())?;
    let listed = sorted(vec![
        vec![1, 0, 0],
        vec![1, 0, 0],
        vec![1, 0, 0],
        vec![1, 1, 0],
        vec![1, 0, 1],
        vec![0, 1, 0],
        vec![0, 1, 0],
        vec![0, 0, 1],
    ]);
    let got = sorted(s.q.to_i64_rows().unwrap());
    Ok((got == listed && kl == 5, format!("{} rows, k-l = {kl}", got.len())))
}

fn property_a() -> Result<usize, String> {
    let targets: [(Rows, i64); 5] = [
        (vec![vec![5, 2], vec![2, 4]], 16),
        (vec![vec![5, 1, 1], vec![1, 2, 0], vec![1, 0, 2]], 16),
        (vec![vec![6, 1, 0], vec![1, 2, 1], vec![0, 1, 2]], 16),
        (vec![vec![7, 1], vec![1, 4]], 27),
        (vec![vec![5, 1, 1], vec![1, 3, 0], vec![1, 0, 2]], 25),
    ];
    let mut n = 0;
    for (c, d) in targets {
        let c = mat(&c);
        let d = BigInt::from(d);
        for s in gram::solve(&GramProblem::new(c.clone())).map_err(|e| e.to_string())?.solutions {
            let r = contribution_matrix(&s.q, &c, &d).map_err(|e| e.to_string())?;
            let sq = r.m.mul(&r.m).unwrap();
            if sq != r.m.scale(&d) || r.m.trace() != &d * BigInt::from(c.row_count()) {
                return Err(format!("identity fails for {}", s.q));
            }
            n += 1;
        }
    }
    Ok(n)
}

fn property_b() -> Result<usize, String> {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    let strategy = (1usize..=5, 1usize..=5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r));
    runner
        .run(&strategy, |rows| {
            let m = mat(&rows);
            let s = smith_normal_form(&m);
            for w in s.diagonal.windows(2) {
                let chain = if w[0] == BigInt::from(0) { w[1] == BigInt::from(0) } else { &w[1] % &w[0] == BigInt::from(0) };
                prop_assert!(chain && w[0] >= BigInt::from(0));
            }
            let prod = s.left_transform.mul(&m).unwrap().mul(&s.right_transform).unwrap();
            for i in 0..prod.row_count() {
                for j in 0..prod.col_count() {
                    let want = if i == j { s.diagonal[i].clone() } else { BigInt::from(0) };
                    prop_assert_eq!(&prod[(i, j)], &want);
                }
            }
            prop_assert!(blocksmith_core::intmat::det(&s.left_transform).unwrap().magnitude() == &1u32.into());
            prop_assert!(blocksmith_core::intmat::det(&s.right_transform).unwrap().magnitude() == &1u32.into());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(1000)
}

/// Multisets of nonzero non-negative rows with the given Gram matrix.
fn brute_2x2(a: i64, b: i64, c: i64) -> BTreeSet<Rows> {
    let rows: Rows = (0..=3).flat_map(|x| (0..=3).map(move |y| vec![x, y])).filter(|r| r != &vec![0, 0]).collect();
    let mut out = BTreeSet::new();
    fn rec(start: usize, left: [i64; 3], rows: &Rows, cur: &mut Rows, out: &mut BTreeSet<Rows>) {
        if left == [0, 0, 0] {
            out.insert(sorted(cur.clone()));
        }
        for (i, r) in rows.iter().enumerate().skip(start) {
            let next = [left[0] - r[0] * r[0], left[1] - r[0] * r[1], left[2] - r[1] * r[1]];
            if next.iter().all(|&x| x >= 0) {
                cur.push(r.clone());
                rec(i, next, rows, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, [a, b, c], &rows, &mut Vec::new(), &mut out);
    out
}

fn property_c() -> Result<usize, String> {
    let mut n = 0;
    for a in 1..=9 {
        for b in 0..=9 {
            for c in 1..=9 {
                if a * c <= b * b {
                    continue;
                }
                let out = gram::solve(&GramProblem::new(mat(&[vec![a, b], vec![b, c]]))).map_err(|e| e.to_string())?;
                let got: BTreeSet<Rows> = out.solutions.iter().map(|s| sorted(s.q.to_i64_rows().unwrap())).collect();
                if got != brute_2x2(a, b, c) || got.len() != out.solutions.len() {
                    return Err(format!("mismatch on [[{a},{b}],[{b},{c}]]"));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn property_d() -> Result<usize, String> {
    let mut n = 0;
    for e in 1..=5 {
        for shape in enumerate_trees(e).map_err(|e| e.to_string())? {
            let mut deg = vec![0u64; e + 1];
            for &(a, b) in &shape.edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            for m in 1..=12 {
                let t = BrauerTree::new(shape.clone(), m).map_err(|e| e.to_string())?;
                let w = |v: usize| if v == shape.exceptional_vertex { m } else { 1 };
                let want: u64 = (0..=e).map(|v| w(v) * deg[v] * deg[v]).sum();
                if cartan_of_tree(&t).entry_sum() != BigInt::from(want) || dim_of_tree(&t) != want {
                    return Err(format!("identity fails for {} with m = {m}", shape.code));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn criterion_8() -> Outcome {
    let a = property_a()?;
    let b = property_b()?;
    let c = property_c()?;
    let d = property_d()?;
    Ok((true, format!("(a) {a} contribution matrices, (b) {b} SNF cases, (c) {c} targets, (d) {d} trees")))
}

fn casebook(dim: &str, report: &std::path::Path) -> Result<(i32, String, Vec<u8>), String> {
    let (code, out) = bin(&["casebook", "run", "--dim", dim, "--report", report.to_str().unwrap()])?;
    let bytes = std::fs::read(report).map_err(|e| e.to_string())?;
    Ok((code, out, bytes))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (dim, want) in [("13", 6), ("14", 4)] {
        let first = casebook(dim, &dir.path().join(format!("{dim}a.json")))?;
        let second = casebook(dim, &dir.path().join(format!("{dim}b.json")))?;
        let v: Value = serde_json::from_slice(&first.2).map_err(|e| e.to_string())?;
        let rows = v["final_table"].as_array().unwrap().len();
        let mut executed = 0;
        let mut not_executed = Vec::new();
        for c in v["candidates"].as_array().unwrap() {
            let det = c["determinant"].as_i64().unwrap();
            let rejected = c["terminal"]["kind"] == "rejected";
            if ![16, 25, 27].contains(&det) || rejected {
                continue;
            }
            for t in c["verdicts"].as_array().unwrap() {
                let computational = ["solver_run", "congruence", "brauer_count"].contains(&t["kind"].as_str().unwrap());
                if !computational {
                    continue;
                }
                if t["status"] == "executed" {
                    executed += 1;
                } else if t["outcome"]["skipped"] != "external data not supplied" {
                    not_executed.push(t["rule"].as_str().unwrap().to_string());
                }
            }
        }
        let identical = first.1 == second.1 && first.2 == second.2;
        ok &= first.0 == 0 && rows == want && not_executed.is_empty() && executed > 0 && identical;
        notes.push(format!(
            "dim {dim}: exit {}, {rows} classes, {executed} computational rules executed, byte-identical={identical}",
            first.0
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id);
        println!("{} criterion {id}: {detail}", if passed { "PASS" } else { "FAIL" });
        match (passed, known) {
            (false, Some((_, why))) => println!("     known deviation: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => {
                println!("     listed as a known deviation but passed");
                unexpected.push(id);
            }
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
