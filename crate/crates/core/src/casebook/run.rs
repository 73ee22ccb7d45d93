use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use super::data::{local_data, realizations, LocalDatum};
use super::{
    brauer_count_check, congruence_filter, partial_match, CandidateReport, CaseReport, CaseRule,
    CasebookError, MoritaClass, Regression, RuleKind, RuleSet, StepStatus, TrailEntry, Verdict,
    VerdictSpec,
};
use crate::brauer::{classify_defect1, TreeInvariants};
use crate::cartan::{
    enumerate_cartan_bounded, filter_block_feasible, min_sum_for_l, CartanCandidate,
    FeasibilityReason, DEFAULT_MAX_SUM,
};
use crate::contrib::{contribution_matrix, heights_from_contribution, residual_diag};
use crate::gram::{self, verify_matrix, GramProblem, SolveStatus};
use crate::intmat::{canonical_perm_form, IntMatrix};

/// Runs every candidate of entry sum `n` through the pipeline and `rules`.
pub fn run_dimension(n: u64, rules: &RuleSet) -> Result<CaseReport, CasebookError> {
    run_dimension_bounded(n, rules, DEFAULT_MAX_SUM)
}

pub fn run_dimension_bounded(n: u64, rules: &RuleSet, max_sum: u64) -> Result<CaseReport, CasebookError> {
    if rules.dimension != n {
        return Err(CasebookError::DimensionMismatch { expected: n, found: rules.dimension });
    }
    let mut candidates = Vec::new();
    let mut l = 1;
    while min_sum_for_l(l) <= n {
        candidates.extend(enumerate_cartan_bounded(n, l, max_sum)?);
        l += 1;
    }

    let mut assigned = vec![Vec::new(); candidates.len()];
    for rule in &rules.rules {
        let canon = canonical_perm_form(&rule.candidate).map_err(|e| bad(rule, e))?;
        let idx = candidates.iter().position(|c| c.matrix == canon).ok_or_else(|| {
            CasebookError::UnknownCandidate { rule: rule.id.clone(), matrix: rule.candidate.to_string() }
        })?;
        assigned[idx].push(rule);
    }

    let ctx = Context {
        n,
        trees: if candidates.iter().any(|c| filter_block_feasible(c).p.is_some()) {
            classify_defect1(n)?
        } else {
            Vec::new()
        },
        data: local_data()?,
    };
    let known = realizations()?;

    let mut report = CaseReport { dimension: n, candidates: Vec::new(), final_table: Vec::new(), regressions: Vec::new() };
    for (cand, rules) in candidates.iter().zip(&assigned) {
        let mut state = CandidateState::default();
        let mut trail = Vec::new();

        let feas = feasibility_outcome(cand);
        let verdict = filter_block_feasible(cand);
        trail.push(auto_entry("feasibility", RuleKind::Feasibility, feas));
        let mut terminal = if !verdict.is_feasible() {
            Verdict::Rejected { reason: verdict.reason.map_or("", FeasibilityReason::code).to_string() }
        } else if verdict.reason == Some(FeasibilityReason::PrimeDetDefectOne) {
            let matches = ctx.tree_matches(cand);
            trail.push(auto_entry("tree_resolution", RuleKind::TreeResolution, tree_outcome(&matches)));
            if matches.is_empty() {
                Verdict::Excluded { by: "tree_resolution".into() }
            } else {
                let classes: Option<Vec<MoritaClass>> = matches
                    .iter()
                    .map(|t| {
                        known.iter().find(|r| r.label == t.label && r.m == t.m && r.p == t.p).map(|r| MoritaClass {
                            defect_group: r.defect_group.clone(),
                            morita_class: r.morita_class.clone(),
                        })
                    })
                    .collect();
                match classes {
                    Some(classes) => Verdict::Realized { classes },
                    None => Verdict::Open { note: "Brauer tree algebra without a known realization".into() },
                }
            }
        } else {
            Verdict::Open { note: "no rule decides this candidate".into() }
        };

        for rule in rules {
            let (status, outcome) = ctx.execute(rule, cand, &mut state)?;
            let matches_expected = rule.expected_outcome.as_ref().map(|e| partial_match(e, &outcome));
            if matches_expected == Some(false) {
                report.regressions.push(Regression {
                    rule: rule.id.clone(),
                    expected: rule.expected_outcome.clone().unwrap(),
                    computed: outcome.clone(),
                });
            }
            if let Some(v) = &rule.verdict {
                terminal = match v {
                    VerdictSpec::Excluded => Verdict::Excluded { by: rule.id.clone() },
                    VerdictSpec::Realized { classes } => Verdict::Realized { classes: classes.clone() },
                    VerdictSpec::Open { note } => Verdict::Open { note: note.clone() },
                };
            }
            trail.push(TrailEntry {
                rule: rule.id.clone(),
                kind: rule.kind,
                status,
                outcome,
                expected_outcome: rule.expected_outcome.clone(),
                matches_expected,
                citation: rule.citation.clone(),
            });
        }

        if let Verdict::Realized { classes } = &terminal {
            report.final_table.extend(classes.iter().cloned());
        }
        report.candidates.push(CandidateReport {
            matrix: cand.matrix.clone(),
            l: cand.l,
            determinant: cand.determinant.clone(),
            elementary_divisors: cand.elementary_divisors.clone(),
            verdicts: trail,
            terminal,
        });
    }
    Ok(report)
}

fn bad(rule: &CaseRule, e: impl std::fmt::Display) -> CasebookError {
    CasebookError::BadInputs { rule: rule.id.clone(), message: e.to_string() }
}

fn auto_entry(rule: &str, kind: RuleKind, outcome: Value) -> TrailEntry {
    TrailEntry {
        rule: rule.into(),
        kind,
        status: StepStatus::Executed,
        outcome,
        expected_outcome: None,
        matches_expected: None,
        citation: None,
    }
}

fn num(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn nums(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

fn desc(xs: &[BigInt]) -> Vec<BigInt> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| b.cmp(a));
    v
}

fn feasibility_outcome(c: &CartanCandidate) -> Value {
    let v = filter_block_feasible(c);
    json!({
        "status": v.status,
        "reason": v.reason.map(FeasibilityReason::code),
        "p": v.p.as_ref().map(num),
    })
}

fn tree_outcome(matches: &[TreeInvariants]) -> Value {
    json!({
        "matches": matches
            .iter()
            .map(|t| json!({"label": t.label, "m": t.m, "p": t.p, "k": t.k}))
            .collect::<Vec<_>>()
    })
}

fn sorted_rows(q: &IntMatrix) -> Vec<Vec<BigInt>> {
    let mut r = q.to_nested();
    r.sort();
    r
}

#[derive(Default)]
struct CandidateState {
    /// Decompositions that survived the height check.
    decompositions: Option<Vec<IntMatrix>>,
}

impl CandidateState {
    fn is_decomposition(&self, q: &IntMatrix) -> Value {
        match &self.decompositions {
            Some(ds) => json!(ds.iter().any(|d| sorted_rows(d) == sorted_rows(q))),
            None => Value::Null,
        }
    }
}

struct Context {
    n: u64,
    trees: Vec<TreeInvariants>,
    data: Vec<LocalDatum>,
}

#[derive(Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
enum SolverTask {
    Decompositions {
        #[serde(default)]
        defect_order: Option<u64>,
    },
    OrthogonalColumn {
        q1: IntMatrix,
        gram_value: u64,
        #[serde(default)]
        zero_rows: BTreeSet<usize>,
    },
    Arrangement {
        q1: IntMatrix,
        qu: IntMatrix,
        cu: IntMatrix,
        defect_order: u64,
    },
    FakeCartan {
        fake_cartan: Option<IntMatrix>,
        #[serde(default)]
        q1: Option<IntMatrix>,
        #[serde(default)]
        note: Option<String>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CongruenceInputs {
    datum: String,
    p: u64,
    #[serde(default)]
    l_values: Vec<u64>,
    #[serde(default)]
    from_decompositions: bool,
    #[serde(default)]
    l_b: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountInputs {
    l_b: u64,
    datum: String,
}

impl Context {
    fn tree_matches(&self, c: &CartanCandidate) -> Vec<TreeInvariants> {
        self.trees
            .iter()
            .filter(|t| {
                t.l == c.l
                    && BigInt::from(t.p) == c.determinant
                    && canonical_perm_form(&t.cartan).is_ok_and(|m| m == c.matrix)
            })
            .cloned()
            .collect()
    }

    fn datum(&self, id: &str) -> Result<&LocalDatum, CasebookError> {
        self.data.iter().find(|d| d.id == id).ok_or_else(|| CasebookError::UnknownDatum(id.into()))
    }

    fn execute(
        &self,
        rule: &CaseRule,
        cand: &CartanCandidate,
        state: &mut CandidateState,
    ) -> Result<(StepStatus, Value), CasebookError> {
        match rule.kind {
            RuleKind::Feasibility => Ok((StepStatus::Executed, feasibility_outcome(cand))),
            RuleKind::TreeResolution => {
                let trees = if self.trees.is_empty() { classify_defect1(self.n)? } else { self.trees.clone() };
                let ctx = Context { n: self.n, trees, data: Vec::new() };
                Ok((StepStatus::Executed, tree_outcome(&ctx.tree_matches(cand))))
            }
            RuleKind::ExternalCitation => {
                if rule.citation.as_deref().is_none_or(str::is_empty) {
                    return Err(bad(rule, "external citation without citation text"));
                }
                Ok((StepStatus::Recorded, Value::Null))
            }
            RuleKind::BrauerCount => {
                let inputs: CountInputs = serde_json::from_value(rule.inputs.clone()).map_err(|e| bad(rule, e))?;
                let k = brauer_count_check(inputs.l_b, self.datum(&inputs.datum)?);
                let matches = state.decompositions.as_ref().map(|ds| ds.iter().any(|q| q.row_count() as u64 == k));
                Ok((StepStatus::Executed, json!({"k": k, "matches_decomposition": matches})))
            }
            RuleKind::Congruence => {
                let inputs: CongruenceInputs =
                    serde_json::from_value(rule.inputs.clone()).map_err(|e| bad(rule, e))?;
                let d = self.datum(&inputs.datum)?;
                let mut values = inputs.l_values.clone();
                if inputs.from_decompositions {
                    let l_b = inputs.l_b.unwrap_or(cand.l as u64);
                    let ds = state
                        .decompositions
                        .as_ref()
                        .ok_or_else(|| bad(rule, "no decompositions computed for this candidate yet"))?;
                    values.extend(ds.iter().map(|q| q.row_count() as u64 - l_b));
                }
                let holds = values.iter().map(|&l| congruence_filter(l, d, inputs.p)).collect::<Result<Vec<_>, _>>()?;
                Ok((StepStatus::Executed, json!({"values": values, "holds": holds})))
            }
            RuleKind::SolverRun => {
                let task: SolverTask = serde_json::from_value(rule.inputs.clone()).map_err(|e| bad(rule, e))?;
                self.solver_task(rule, cand, task, state)
            }
        }
    }

    fn solver_task(
        &self,
        rule: &CaseRule,
        cand: &CartanCandidate,
        task: SolverTask,
        state: &mut CandidateState,
    ) -> Result<(StepStatus, Value), CasebookError> {
        match task {
            SolverTask::Decompositions { defect_order } => {
                let d = defect_order.map(BigInt::from).unwrap_or_else(|| cand.defect_order.clone());
                let out = gram::solve(&GramProblem::new(cand.matrix.clone()).indecomposable())?;
                let mut feasible = Vec::new();
                let mut kept = Vec::new();
                let mut discarded = Vec::new();
                for s in &out.solutions {
                    let r = contribution_matrix(&s.q, &cand.matrix, &d)?;
                    match heights_from_contribution(&r) {
                        Ok(h) => {
                            let diag = r.diag();
                            let complement: Vec<BigInt> = diag.iter().map(|x| &d - x).collect();
                            feasible.push(json!({
                                "rows": s.q.row_count(),
                                "k_minus_l": s.q.row_count() - cand.l,
                                "q": s.q,
                                "contribution_diagonal": nums(&diag),
                                "diagonal_multiset": nums(&desc(&diag)),
                                "complement_multiset": nums(&desc(&complement)),
                                "heights": h.heights,
                                "k_h": h.k_h,
                            }));
                            kept.push(s.q.clone());
                        }
                        Err(e) => discarded.push(json!({
                            "rows": s.q.row_count(),
                            "q": s.q,
                            "contribution_diagonal": nums(&r.diag()),
                            "reason": e.to_string(),
                        })),
                    }
                }
                state.decompositions = Some(kept);
                Ok((
                    StepStatus::Executed,
                    json!({
                        "defect_order": num(&d),
                        "solver_solutions": out.solutions.len(),
                        "feasible": feasible,
                        "discarded": discarded,
                    }),
                ))
            }
            SolverTask::OrthogonalColumn { q1, gram_value, zero_rows } => {
                let cols = gram::solve_orthogonal_column(&q1, &BigInt::from(gram_value), &zero_rows)?;
                let shapes: BTreeSet<String> = cols
                    .iter()
                    .map(|c| {
                        let mut a: Vec<BigInt> = c.iter().map(|x| x.magnitude().clone().into()).collect();
                        a.sort_by(|x, y| y.cmp(x));
                        a.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                    })
                    .collect();
                let status = if cols.is_empty() { SolveStatus::ProvedEmpty } else { SolveStatus::Solutions };
                Ok((
                    StepStatus::Executed,
                    json!({
                        "q1_is_decomposition": state.is_decomposition(&q1),
                        "status": status,
                        "count": cols.len(),
                        "shapes": shapes,
                        "columns": cols.iter().map(|c| nums(c)).collect::<Vec<_>>(),
                    }),
                ))
            }
            SolverTask::Arrangement { q1, qu, cu, defect_order } => {
                let d = BigInt::from(defect_order);
                let (k, l1, lu) = (q1.row_count(), q1.col_count(), qu.col_count());
                if qu.row_count() != k {
                    return Err(bad(rule, "q1 and qu differ in row count"));
                }
                let joined = IntMatrix::from_fn(k, l1 + lu, |i, j| {
                    if j < l1 { q1[(i, j)].clone() } else { qu[(i, j - l1)].clone() }
                })
                .map_err(|e| bad(rule, e))?;
                let target = IntMatrix::from_fn(l1 + lu, l1 + lu, |i, j| match (i < l1, j < l1) {
                    (true, true) => cand.matrix[(i, j)].clone(),
                    (false, false) => cu[(i - l1, j - l1)].clone(),
                    _ => BigInt::zero(),
                })
                .map_err(|e| bad(rule, e))?;
                let verified = verify_matrix(&GramProblem::new(target).signed().allow_zero_rows(), &joined)?;
                let m1 = contribution_matrix(&q1, &cand.matrix, &d)?.diag();
                let mu = contribution_matrix(&qu, &cu, &d)?.diag();
                let mz = residual_diag(&[m1.clone(), mu.clone()], &d)?;
                Ok((
                    StepStatus::Executed,
                    json!({
                        "q1_is_decomposition": state.is_decomposition(&q1),
                        "verified": verified,
                        "m1_diag": nums(&m1),
                        "mu_diag": nums(&mu),
                        "mz_diag": nums(&mz),
                    }),
                ))
            }
            SolverTask::FakeCartan { fake_cartan, q1, note } => {
                let Some(fake) = fake_cartan else {
                    return Ok((StepStatus::Skipped, json!({"skipped": "external data not supplied", "note": note})));
                };
                let mut p = GramProblem::new(fake).signed().allow_zero_rows();
                if let Some(q1) = &q1 {
                    p = p.orthogonal_to(q1.clone());
                }
                let out = gram::solve(&p)?;
                let nonzero: BTreeSet<usize> = out
                    .solutions
                    .iter()
                    .map(|s| s.q.rows().filter(|r| r.iter().any(|x| !x.is_zero())).count())
                    .collect();
                Ok((
                    StepStatus::Executed,
                    json!({
                        "q1_is_decomposition": q1.as_ref().map_or(Value::Null, |q| state.is_decomposition(q)),
                        "status": out.status,
                        "count": out.solutions.len(),
                        "nonzero_row_counts": nonzero,
                        "max_nonzero_rows": nonzero.iter().max(),
                        "solutions": out.solutions.iter().map(|s| &s.q).collect::<Vec<_>>(),
                    }),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::shipped_rules;
    use super::*;

    #[test]
    fn unknown_candidate_is_an_error() {
        let rules = RuleSet::from_json(
            r#"{"version":1,"dimension":13,"rules":[{"id":"x","kind":"external_citation","candidate":[[6,1],[1,6]],"citation":"c"}]}"#,
        )
        .unwrap();
        assert!(matches!(run_dimension(13, &rules), Err(CasebookError::UnknownCandidate { .. })));
    }

    #[test]
    fn citation_needs_text() {
        let rules = RuleSet::from_json(
            r#"{"version":1,"dimension":13,"rules":[{"id":"x","kind":"external_citation","candidate":[[13]]}]}"#,
        )
        .unwrap();
        assert!(matches!(run_dimension(13, &rules), Err(CasebookError::BadInputs { .. })));
    }

    #[test]
    fn dimension_thirteen() {
        let r = run_dimension(13, &shipped_rules(13).unwrap()).unwrap();
        assert!(r.regressions.is_empty(), "{:#?}", r.regressions);
        assert_eq!(r.final_table.len(), 6);
    }

    #[test]
    fn dimensions_fourteen_and_fifteen() {
        let r = run_dimension(14, &shipped_rules(14).unwrap()).unwrap();
        assert!(r.regressions.is_empty(), "{:#?}", r.regressions);
        let names: Vec<_> = r.final_table.iter().map(|c| c.morita_class.as_str()).collect();
        assert_eq!(names.len(), 4, "{names:?}");
        let r = run_dimension(15, &shipped_rules(15).unwrap()).unwrap();
        assert!(r.regressions.is_empty(), "{:#?}", r.regressions);
        assert!(r.final_table.is_empty());
    }
}
