//! Brauer trees with an exceptional vertex, their Cartan matrices and the
//! defect-one blocks of a given basic-algebra dimension.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::intmat::{IntMatError, IntMatrix};

pub const DEFAULT_MAX_EDGES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("{edges} edges exceed the configured bound {max}")]
    TooManyEdges { edges: usize, max: usize },
    #[error("a Brauer tree needs at least one edge")]
    NoEdges,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("edge list does not form a tree on vertices 0..={0}")]
    NotATree(usize),
    #[error("exceptional vertex {0} out of range")]
    BadVertex(usize),
    #[error(transparent)]
    Matrix(#[from] IntMatError),
}

/// A tree on `edge_count + 1` vertices with a marked (exceptional) vertex.
///
/// Vertices are numbered breadth-first from the exceptional vertex, children
/// in increasing (subtree size, code) order, and `edges[i]` joins vertex
/// `i + 1` to its parent. Edge `i` is simple module `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TreeShape {
    pub edge_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub exceptional_vertex: usize,
    /// Canonical code of the tree rooted at the exceptional vertex.
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrauerTree {
    pub shape: TreeShape,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeInvariants {
    pub label: String,
    pub code: String,
    /// `None` when `m = 1` and the marking carries no information.
    pub exceptional_vertex: Option<usize>,
    pub m: u64,
    pub p: u64,
    pub cartan: IntMatrix,
    pub dim_a: u64,
    pub k: u64,
    pub l: usize,
}

impl TreeShape {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edge_count + 1];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Canonical code of the underlying unmarked tree.
    pub fn unrooted_code(&self) -> String {
        let adj = adjacency(self.edge_count + 1, &self.edges);
        (0..=self.edge_count).map(|r| rooted_code(&adj, r, usize::MAX)).min_by(code_order).unwrap()
    }

    pub fn is_path(&self) -> bool {
        self.degrees().iter().all(|&d| d <= 2)
    }

    pub fn is_star(&self) -> bool {
        self.edge_count >= 3 && self.degrees().contains(&self.edge_count)
    }

    /// Human-readable name such as `path-3/exceptional-end`.
    pub fn label(&self, marked: bool) -> String {
        let deg = self.degrees();
        let e = self.edge_count;
        let base = if e == 1 {
            return "edge".to_string();
        } else if self.is_path() {
            format!("path-{e}")
        } else if self.is_star() {
            format!("star-{e}")
        } else {
            format!("tree-{}", self.unrooted_code())
        };
        if !marked {
            return base;
        }
        let root = self.exceptional_vertex;
        let place = if deg[root] == 1 {
            "end".to_string()
        } else if self.is_star() || (self.is_path() && e == 2) {
            "center".to_string()
        } else if self.is_path() {
            "inner".to_string()
        } else {
            format!("vertex-{root}")
        };
        format!("{base}/exceptional-{place}")
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Codes compare by length (twice the vertex count) first, then as strings.
fn code_order(a: &String, b: &String) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_code(adj, w, v)).collect();
    kids.sort_by(code_order);
    format!("({})", kids.concat())
}

/// Splits the inside of `(...)` into the child codes.
fn children_of(code: &str) -> Vec<&str> {
    let inner = &code[1..code.len() - 1];
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = i;
                }
                depth += 1;
            }
            _ => {
                depth -= 1;
                if depth == 0 {
                    out.push(&inner[start..=i]);
                }
            }
        }
    }
    out
}

fn shape_from_code(code: &str) -> TreeShape {
    let mut edges = Vec::new();
    let mut queue = std::collections::VecDeque::from([(code, 0usize)]);
    let mut next = 1;
    while let Some((c, v)) = queue.pop_front() {
        for child in children_of(c) {
            edges.push((v, next));
            queue.push_back((child, next));
            next += 1;
        }
    }
    TreeShape { edge_count: edges.len(), edges, exceptional_vertex: 0, code: code.to_string() }
}

/// All rooted trees on `n` vertices as canonical codes, in code order.
fn rooted_codes(n: usize, memo: &mut BTreeMap<usize, Vec<String>>) -> Vec<String> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let pool: Vec<String> = (1..n).flat_map(|s| rooted_codes(s, memo)).collect();
    let mut out = BTreeSet::new();
    let mut kids = Vec::new();
    forests(&pool, pool.len(), n - 1, &mut kids, &mut out);
    let mut v: Vec<String> = out.into_iter().collect();
    v.sort_by(code_order);
    memo.insert(n, v.clone());
    v
}

/// Multisets from `pool[..limit]` with total vertex count `left`.
fn forests(pool: &[String], limit: usize, left: usize, kids: &mut Vec<usize>, out: &mut BTreeSet<String>) {
    if left == 0 {
        let mut codes: Vec<&String> = kids.iter().map(|&i| &pool[i]).collect();
        codes.sort_by(|a, b| code_order(a, b));
        out.insert(format!("({})", codes.into_iter().cloned().collect::<String>()));
        return;
    }
    for i in 0..limit {
        let size = pool[i].len() / 2;
        if size <= left {
            kids.push(i);
            forests(pool, i + 1, left - size, kids, out);
            kids.pop();
        }
    }
}

/// Trees with `e` edges, one per choice of exceptional vertex up to
/// automorphism, i.e. rooted trees on `e + 1` vertices.
pub fn enumerate_trees(e: usize) -> Result<Vec<TreeShape>, TreeError> {
    enumerate_trees_bounded(e, DEFAULT_MAX_EDGES)
}

pub fn enumerate_trees_bounded(e: usize, max: usize) -> Result<Vec<TreeShape>, TreeError> {
    if e == 0 {
        return Err(TreeError::NoEdges);
    }
    if e > max {
        return Err(TreeError::TooManyEdges { edges: e, max });
    }
    let mut memo = BTreeMap::from([(1, vec!["()".to_string()])]);
    Ok(rooted_codes(e + 1, &mut memo).iter().map(|c| shape_from_code(c)).collect())
}

impl BrauerTree {
    pub fn new(shape: TreeShape, multiplicity: u64) -> Result<Self, TreeError> {
        if multiplicity == 0 {
            return Err(TreeError::ZeroMultiplicity);
        }
        if shape.edge_count == 0 {
            return Err(TreeError::NoEdges);
        }
        let n = shape.edge_count + 1;
        if shape.exceptional_vertex >= n {
            return Err(TreeError::BadVertex(shape.exceptional_vertex));
        }
        let adj = adjacency(n, &shape.edges);
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if shape.edges.len() != shape.edge_count
            || shape.edges.iter().any(|&(a, b)| a >= n || b >= n || a == b)
            || !seen.iter().all(|&s| s)
        {
            return Err(TreeError::NotATree(shape.edge_count));
        }
        Ok(BrauerTree { shape, multiplicity })
    }

    fn weight(&self, v: usize) -> u64 {
        if v == self.shape.exceptional_vertex {
            self.multiplicity
        } else {
            1
        }
    }
}

/// `c_ii = w(u) + w(v)` for edge `i = {u, v}`; `c_ij` is the weight of the
/// endpoint shared by edges `i` and `j`, or 0.
pub fn cartan_of_tree(t: &BrauerTree) -> IntMatrix {
    let edges = &t.shape.edges;
    let e = edges.len();
    IntMatrix::from_fn(e, e, |i, j| {
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let w: u64 = if i == j {
            t.weight(a) + t.weight(b)
        } else {
            [a, b].iter().filter(|&&v| v == c || v == d).map(|&v| t.weight(v)).sum()
        };
        BigInt::from(w)
    })
    .expect("a tree has at least one edge")
}

/// Entry sum of the Cartan matrix, computed as `Σ_v w(v)·deg(v)²`.
pub fn dim_of_tree(t: &BrauerTree) -> u64 {
    t.shape.degrees().iter().enumerate().map(|(v, &d)| t.weight(v) * (d * d) as u64).sum()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn invariants(t: &BrauerTree) -> Option<TreeInvariants> {
    let e = t.shape.edge_count as u64;
    let p = e * t.multiplicity + 1;
    if !is_prime(p) {
        return None;
    }
    let marked = t.multiplicity > 1;
    Some(TreeInvariants {
        label: t.shape.label(marked),
        code: if marked { t.shape.code.clone() } else { t.shape.unrooted_code() },
        exceptional_vertex: marked.then_some(t.shape.exceptional_vertex),
        m: t.multiplicity,
        p,
        cartan: cartan_of_tree(t),
        dim_a: dim_of_tree(t),
        k: e + t.multiplicity,
        l: t.shape.edge_count,
    })
}

/// Every Brauer tree algebra (tree, `m`, `p` with `e·m = p − 1`) whose
/// basic algebra has dimension `dim_target`.
pub fn classify_defect1(dim_target: u64) -> Result<Vec<TreeInvariants>, TreeError> {
    // a tree with e edges has dimension at least 4e − 2
    let max_e = ((dim_target + 2) / 4) as usize;
    if max_e > DEFAULT_MAX_EDGES {
        return Err(TreeError::TooManyEdges { edges: max_e, max: DEFAULT_MAX_EDGES });
    }
    let mut out = Vec::new();
    let mut unmarked_seen = BTreeSet::new();
    for e in 1..=max_e.max(1) {
        for shape in enumerate_trees(e)? {
            let deg = shape.degrees();
            let root_sq = (deg[shape.exceptional_vertex] as u64).pow(2);
            let rest: u64 = deg.iter().map(|&d| (d * d) as u64).sum::<u64>() - root_sq;
            if dim_target <= rest || !(dim_target - rest).is_multiple_of(root_sq) {
                continue;
            }
            let m = (dim_target - rest) / root_sq;
            if m == 1 && !unmarked_seen.insert(shape.unrooted_code()) {
                continue;
            }
            let t = BrauerTree::new(shape, m)?;
            debug_assert_eq!(dim_of_tree(&t), dim_target);
            if let Some(inv) = invariants(&t) {
                out.push(inv);
            }
        }
    }
    out.sort_by(|a, b| (a.l, a.p, &a.code).cmp(&(b.l, b.p, &b.code)));
    Ok(out)
}
