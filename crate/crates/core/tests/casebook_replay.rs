use blocksmith_core::casebook::{run_dimension, shipped_rules, RuleKind, RuleSet, StepStatus, Verdict};
use num_bigint::BigInt;

fn classes(n: u64) -> Vec<(String, String)> {
    let r = run_dimension(n, &shipped_rules(n).unwrap()).unwrap();
    assert!(!r.has_regressions(), "{:#?}", r.regressions);
    let mut v: Vec<_> = r.final_table.into_iter().map(|c| (c.defect_group, c.morita_class)).collect();
    v.sort();
    v
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<_> = v.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
    v.sort();
    v
}

#[test]
fn final_tables() {
    assert_eq!(
        classes(13),
        pairs(&[
            ("C13", "FC13"),
            ("C13", "B0(PSL(3,3))"),
            ("C17", "B0(PSL(2,16))"),
            ("D16", "B0(PGL(2,7))"),
            ("SD16", "B1(3.M10)"),
            ("C7", "B1(6.A7)"),
        ])
    );
    assert_eq!(
        classes(14),
        pairs(&[("C7", "FD14"), ("C19", "B0(PSL(2,37))"), ("C7", "B0(PSU(3,3))"), ("C5", "B0(S5)")])
    );
}

#[test]
fn prime_power_candidates_are_computed() {
    for n in [13, 14] {
        let r = run_dimension(n, &shipped_rules(n).unwrap()).unwrap();
        for c in &r.candidates {
            if ![16, 27, 25].contains(&c.determinant.clone().try_into().unwrap_or(0i64)) {
                continue;
            }
            if matches!(c.terminal, Verdict::Rejected { .. }) {
                continue;
            }
            let executed = c
                .verdicts
                .iter()
                .filter(|t| t.kind == RuleKind::SolverRun && t.status == StepStatus::Executed)
                .count();
            assert!(executed >= 1, "{} has no executed solver run", c.matrix);
        }
    }
}

#[test]
fn dimension_15_flags() {
    let r = run_dimension(15, &shipped_rules(15).unwrap()).unwrap();
    assert!(!r.has_regressions());
    let find = |rows: &[Vec<i64>]| {
        let m = blocksmith_core::intmat::IntMatrix::from_rows(rows).unwrap();
        r.candidates.iter().find(|c| c.matrix == m).unwrap()
    };
    let tree = find(&[vec![5, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
    assert_eq!(tree.determinant, BigInt::from(13));
    assert!(matches!(tree.terminal, Verdict::Open { .. }));
    let second = find(&[vec![6, 0, 1], vec![0, 3, 1], vec![1, 1, 2]]);
    assert!(matches!(second.terminal, Verdict::Excluded { .. }));
    assert!(r.final_table.is_empty());
}

#[test]
fn reports_are_deterministic() {
    for n in [13, 14, 15] {
        let a = serde_json::to_string(&run_dimension(n, &shipped_rules(n).unwrap()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_dimension(n, &shipped_rules(n).unwrap()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn diverging_expectation_is_a_regression() {
    let rules = RuleSet::from_json(
        r#"{"version": 1, "dimension": 13, "rules": [
            {"id": "bad", "kind": "solver_run", "candidate": [[5, 2], [2, 4]],
             "inputs": {"task": "decompositions"},
             "expected_outcome": {"solver_solutions": 3}}
        ]}"#,
    )
    .unwrap();
    let r = run_dimension(13, &rules).unwrap();
    assert_eq!(r.regressions.len(), 1);
    assert_eq!(r.regressions[0].computed["solver_solutions"], 4);
}
