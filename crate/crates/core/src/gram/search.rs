use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::psd::is_psd;
use super::{
    validate_target, verify_matrix, GramError, GramProblem, GramSolution, SignMode,
    SolveOutcome, SolveStatus,
};
use crate::intmat::{self, IntMatrix};

/// Enumerates every solution of `p`, one per orbit under row permutations
/// (inside classes of interchangeable positions) and, in signed mode, under
/// column sign changes that fix the target Gram matrix.
pub fn solve(p: &GramProblem) -> Result<SolveOutcome, GramError> {
    validate_target(&p.target_gram)?;
    let l = p.target_gram.row_count();
    for block in &p.fixed_blocks {
        if block.row_count() == 0 {
            return Err(GramError::InvalidInput("fixed block without rows".into()));
        }
    }
    let pinned = p.pinned_rows()?;
    if let (_, Some(hi)) = p.row_count.bounds() {
        if hi < p.row_count.bounds().0 {
            return Err(GramError::InvalidInput("row-count range is empty".into()));
        }
    }
    if !p.zero_rows.is_empty() && pinned.is_none() {
        return Err(GramError::InvalidInput(
            "forced zero rows need a fixed row count".into(),
        ));
    }
    if let Some(k) = pinned {
        if let Some(&bad) = p.zero_rows.iter().find(|&&i| i >= k) {
            return Err(GramError::InvalidInput(format!("zero row {bad} out of range for {k} rows")));
        }
    }
    if let Some(dc) = &p.diag_constraints {
        if dc.defect_order <= BigInt::zero() {
            return Err(GramError::InvalidInput("defect order must be positive".into()));
        }
    }

    let target = p.target_gram.to_i64_rows()?;
    let det = intmat::det(&p.target_gram)?;
    let adj = intmat::scaled_inverse(&p.target_gram, &det)?;
    // scale = det makes the numerator the adjugate (denominator 1)
    debug_assert!(adj.is_integral());
    let adj = adj.numerator.to_i64_rows()?;
    let det_i = det.to_i128().ok_or(GramError::InvalidInput("determinant too large".into()))?;

    let candidates = candidate_rows(&target, &adj, det_i, p.sign_mode);

    let mut ctx = Search::new(p, l, pinned, &target, &adj, det_i)?;
    if let Some(reason) = ctx.trivially_empty() {
        return Ok(SolveOutcome { status: SolveStatus::ProvedEmpty, solutions: Vec::new(), diagnostic: Some(reason) });
    }
    let mut rows_out = Vec::new();
    let mut residual = target.clone();
    ctx.run(&candidates, 0, &mut residual, &mut rows_out);

    let symmetries = column_symmetries(&target, p.sign_mode);
    let mut unique: BTreeMap<Vec<i64>, IntMatrix> = BTreeMap::new();
    for q in ctx.found {
        let (key, canon) = canonical(&q, &ctx.class_of, &symmetries);
        let m = IntMatrix::from_rows(&canon)?;
        if p.require_indecomposable && !super::is_indecomposable_q(&m) {
            continue;
        }
        if !verify_matrix(p, &m)? {
            return Err(GramError::Internal(m.to_string()));
        }
        unique.entry(key).or_insert(m);
    }
    let mut solutions: Vec<GramSolution> = unique
        .into_values()
        .map(|q| GramSolution { canonical_key: key_text(&q), q })
        .collect();
    solutions.sort_by(|a, b| {
        a.q.row_count().cmp(&b.q.row_count()).then_with(|| b.canonical_key.cmp(&a.canonical_key))
    });
    let status = if solutions.is_empty() { SolveStatus::ProvedEmpty } else { SolveStatus::Solutions };
    Ok(SolveOutcome { status, solutions, diagnostic: None })
}

fn key_text(q: &IntMatrix) -> String {
    q.rows()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn quad(adj: &[Vec<i64>], r: &[i64]) -> i128 {
    let mut s: i128 = 0;
    for (i, &ri) in r.iter().enumerate() {
        if ri == 0 {
            continue;
        }
        for (j, &rj) in r.iter().enumerate() {
            s += ri as i128 * adj[i][j] as i128 * rj as i128;
        }
    }
    s
}

/// All nonzero rows `r` with `r·adj(C)·rᵗ ≤ det C`, together with the zero
/// row, in descending lexicographic order.
fn candidate_rows(target: &[Vec<i64>], adj: &[Vec<i64>], det: i128, mode: SignMode) -> Vec<Vec<i64>> {
    let l = target.len();
    let bounds: Vec<i64> = (0..l).map(|j| (target[j][j] as u64).isqrt() as i64).collect();
    let mut out = Vec::new();
    let mut r = vec![0i64; l];
    fn rec(
        j: usize,
        r: &mut Vec<i64>,
        bounds: &[i64],
        mode: SignMode,
        adj: &[Vec<i64>],
        det: i128,
        out: &mut Vec<Vec<i64>>,
    ) {
        if j == r.len() {
            if quad(adj, r) <= det {
                out.push(r.clone());
            }
            return;
        }
        let lo = if mode == SignMode::Signed { -bounds[j] } else { 0 };
        for v in (lo..=bounds[j]).rev() {
            r[j] = v;
            rec(j + 1, r, bounds, mode, adj, det, out);
        }
        r[j] = 0;
    }
    rec(0, &mut r, &bounds, mode, adj, det, &mut out);
    out
}

struct Search<'a> {
    p: &'a GramProblem,
    l: usize,
    /// `Some(k)`: exactly `k` positions with per-position constraints.
    pinned: Option<usize>,
    max_rows: usize,
    class_of: Vec<usize>,
    fixed: Vec<Vec<i64>>,
    fixed_tail_norm: Vec<Vec<i128>>,
    diag_target: Vec<Option<i128>>,
    defect_order: i128,
    adj: &'a [Vec<i64>],
    cross: Vec<Vec<i128>>,
    last_in_class: Vec<Option<usize>>,
    found: Vec<Vec<Vec<i64>>>,
}

impl<'a> Search<'a> {
    fn new(
        p: &'a GramProblem,
        l: usize,
        pinned: Option<usize>,
        target: &[Vec<i64>],
        adj: &'a [Vec<i64>],
        det: i128,
    ) -> Result<Self, GramError> {
        let trace: usize = (0..l).map(|i| target[i][i] as usize).sum();
        let max_rows = match (pinned, p.row_count.bounds().1) {
            (Some(k), _) => k,
            (None, Some(hi)) if p.require_nonzero_rows => hi.min(trace),
            (None, Some(hi)) => hi,
            (None, None) => trace,
        };
        let k = pinned.unwrap_or(max_rows);

        // concatenated fixed blocks, one row per position
        let mut fixed = vec![Vec::new(); k];
        for block in &p.fixed_blocks {
            let rows = block.to_i64_rows()?;
            for (i, row) in rows.into_iter().enumerate() {
                fixed[i].extend(row);
            }
        }
        let width = fixed.first().map_or(0, Vec::len);
        let mut fixed_tail_norm = vec![vec![0i128; width]; k + 1];
        for i in (0..k).rev() {
            for f in 0..width {
                fixed_tail_norm[i][f] = fixed_tail_norm[i + 1][f] + (fixed[i][f] as i128).pow(2);
            }
        }

        let (diag_target, defect_order) = match &p.diag_constraints {
            Some(dc) => {
                let d = dc.defect_order.to_i128().ok_or(GramError::InvalidInput("defect order too large".into()))?;
                let vals = dc
                    .values
                    .iter()
                    .map(|v| v.to_i128().map(|v| Some(v * det)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or(GramError::InvalidInput("diagonal value too large".into()))?;
                (vals, d)
            }
            None => (vec![None; k], 1),
        };

        // positions sharing fixed row, zero flag and diagonal value are interchangeable
        let mut class_keys: BTreeMap<(Vec<i64>, bool, Option<i128>), usize> = BTreeMap::new();
        let mut class_of = Vec::with_capacity(k);
        for i in 0..k {
            let key = (fixed[i].clone(), p.zero_rows.contains(&i), diag_target[i]);
            let next = class_keys.len();
            class_of.push(*class_keys.entry(key).or_insert(next));
        }
        let n_classes = class_keys.len();

        Ok(Search {
            p,
            l,
            pinned,
            max_rows,
            class_of,
            fixed,
            fixed_tail_norm,
            diag_target,
            defect_order,
            adj,
            cross: vec![vec![0; width]; l],
            last_in_class: vec![None; n_classes],
            found: Vec::new(),
        })
    }

    fn trivially_empty(&self) -> Option<String> {
        let (lo, _) = self.p.row_count.bounds();
        if self.pinned.is_none() && lo > self.max_rows {
            return Some(format!(
                "at least {lo} nonzero rows requested but the trace allows at most {}",
                self.max_rows
            ));
        }
        if let Some(k) = self.pinned {
            let free = k - self.p.zero_rows.len();
            if self.p.require_nonzero_rows && free > self.max_trace() {
                return Some(format!("{free} nonzero rows cannot fit a Gram matrix of trace {}", self.max_trace()));
            }
            for &i in &self.p.zero_rows {
                if let Some(Some(v)) = self.diag_target.get(i) {
                    if *v != 0 {
                        return Some(format!("row {i} is forced to zero but has prescribed contribution"));
                    }
                }
            }
        }
        None
    }

    fn max_trace(&self) -> usize {
        (0..self.l).map(|i| self.p.target_gram[(i, i)].to_usize().unwrap_or(usize::MAX)).sum()
    }

    fn positions(&self) -> usize {
        self.pinned.unwrap_or(self.max_rows)
    }

    fn run(&mut self, cands: &[Vec<i64>], pos: usize, residual: &mut Vec<Vec<i64>>, rows: &mut Vec<Vec<i64>>) {
        let residual_zero = residual.iter().all(|r| r.iter().all(|&x| x == 0));
        if self.pinned.is_none() && residual_zero {
            self.emit_unpinned(rows);
            return;
        }
        if pos == self.positions() {
            if residual_zero && self.cross.iter().all(|c| c.iter().all(|&x| x == 0)) {
                self.found.push(rows.clone());
            }
            return;
        }
        let remaining_trace: i64 = (0..self.l).map(|j| residual[j][j]).sum();
        if self.pinned.is_some() && self.p.require_nonzero_rows {
            let free_left = (pos..self.positions()).filter(|i| !self.p.zero_rows.contains(i)).count();
            if free_left as i64 > remaining_trace {
                return;
            }
        }

        let class = self.class_of.get(pos).copied().unwrap_or(0);
        let forced_zero = self.p.zero_rows.contains(&pos);
        let start = self.last_in_class[class].unwrap_or(0);
        let saved_last = self.last_in_class[class];
        for idx in start..cands.len() {
            let r = &cands[idx];
            let is_zero = r.iter().all(|&x| x == 0);
            if forced_zero != is_zero && (forced_zero || self.p.require_nonzero_rows || self.pinned.is_none()) {
                continue;
            }
            if let Some(want) = self.diag_target.get(pos).copied().flatten() {
                if quad(self.adj, r) * self.defect_order != want {
                    continue;
                }
            }
            if (0..self.l).any(|j| r[j] * r[j] > residual[j][j]) {
                continue;
            }
            for a in 0..self.l {
                for b in 0..self.l {
                    residual[a][b] -= r[a] * r[b];
                }
            }
            let ok = is_zero || is_psd(residual);
            if ok && self.update_cross(pos, r, 1) {
                if self.cross_feasible(pos + 1, residual) {
                    self.last_in_class[class] = Some(idx);
                    rows.push(r.clone());
                    self.run(cands, pos + 1, residual, rows);
                    rows.pop();
                }
                self.update_cross(pos, r, -1);
            }
            for a in 0..self.l {
                for b in 0..self.l {
                    residual[a][b] += r[a] * r[b];
                }
            }
        }
        self.last_in_class[class] = saved_last;
    }

    fn update_cross(&mut self, pos: usize, r: &[i64], sign: i128) -> bool {
        if self.fixed.is_empty() || self.fixed[pos].is_empty() {
            return true;
        }
        for (j, &rj) in r.iter().enumerate() {
            if rj == 0 {
                continue;
            }
            for (f, &v) in self.fixed[pos].iter().enumerate() {
                self.cross[j][f] += sign * rj as i128 * v as i128;
            }
        }
        true
    }

    /// Cauchy–Schwarz: the rows still to come can shift cross sum `(j, f)` by
    /// at most `sqrt(R_jj · Σ_{i ≥ pos} F_if²)`.
    fn cross_feasible(&self, pos: usize, residual: &[Vec<i64>]) -> bool {
        if self.fixed_tail_norm.is_empty() {
            return true;
        }
        let tail = &self.fixed_tail_norm[pos];
        for (j, row) in self.cross.iter().enumerate() {
            for (f, &s) in row.iter().enumerate() {
                if s * s > residual[j][j] as i128 * tail[f] {
                    return false;
                }
            }
        }
        true
    }

    fn emit_unpinned(&mut self, rows: &[Vec<i64>]) {
        let n = rows.len();
        let (lo, hi) = self.p.row_count.bounds();
        let mut q = rows.to_vec();
        if self.p.require_nonzero_rows {
            if !self.p.row_count.admits(n) {
                return;
            }
        } else {
            let k = n.max(lo);
            if hi.is_some_and(|hi| k > hi) {
                return;
            }
            q.resize(k, vec![0; self.l]);
        }
        if q.is_empty() {
            return;
        }
        self.found.push(q);
    }
}

/// Column sign patterns `s` with `diag(s)·C·diag(s) = C`: one sign per
/// connected component of the target, normalized so the first is `+`.
fn column_symmetries(target: &[Vec<i64>], mode: SignMode) -> Vec<Vec<i64>> {
    let l = target.len();
    if mode == SignMode::Nonnegative {
        return vec![vec![1; l]];
    }
    let mut comp = vec![usize::MAX; l];
    let mut n_comp = 0;
    for s in 0..l {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = n_comp;
        while let Some(i) = stack.pop() {
            for j in 0..l {
                if comp[j] == usize::MAX && target[i][j] != 0 {
                    comp[j] = n_comp;
                    stack.push(j);
                }
            }
        }
        n_comp += 1;
    }
    (0..1u64 << n_comp)
        .map(|mask| (0..l).map(|j| if mask >> comp[j] & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Lexicographically largest representative over the given column signs,
/// rows sorted descending inside each position class.
fn canonical(q: &[Vec<i64>], class_of: &[usize], symmetries: &[Vec<i64>]) -> (Vec<i64>, Vec<Vec<i64>>) {
    let k = q.len();
    let mut best: Option<(Vec<i64>, Vec<Vec<i64>>)> = None;
    for s in symmetries {
        let signed: Vec<Vec<i64>> = q.iter().map(|r| r.iter().zip(s).map(|(x, y)| x * y).collect()).collect();
        let mut by_class: BTreeMap<usize, Vec<Vec<i64>>> = BTreeMap::new();
        for (i, r) in signed.into_iter().enumerate() {
            by_class.entry(class_of.get(i).copied().unwrap_or(0)).or_default().push(r);
        }
        for rows in by_class.values_mut() {
            rows.sort_by(|a, b| b.cmp(a));
        }
        let mut arranged = Vec::with_capacity(k);
        let mut cursor: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..k {
            let c = class_of.get(i).copied().unwrap_or(0);
            let at = cursor.entry(c).or_insert(0);
            arranged.push(by_class[&c][*at].clone());
            *at += 1;
        }
        let key: Vec<i64> = arranged.iter().flatten().copied().collect();
        if best.as_ref().is_none_or(|(b, _)| key > *b) {
            best = Some((key, arranged));
        }
    }
    best.expect("identity symmetry always present")
}
