//! Tree catalogs for the extremal `lambda2` question, and executable checks of
//! the two monotonicity theorems.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::balanced_tree;
use crate::graph::{GraphWithBoundary, Vertex};
use crate::io::fmt_f64;
use crate::spectrum::steklov_spectrum;

/// Tolerance for eigenvalue comparisons and argmax ties.
pub const SPECTRAL_TOL: f64 = 1e-9;

type Adjacency = Vec<Vec<usize>>;

fn rooted_code(adj: &Adjacency, v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_code(adj, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// The one or two vertices of minimum eccentricity, found by stripping leaves.
fn centers(adj: &Adjacency) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// AHU code rooted at the center; for bicentral trees, the smaller of the two
/// rootings. Equal codes exactly when the trees are isomorphic.
pub fn canonical_code(adj: &[Vec<usize>]) -> String {
    let adj = adj.to_vec();
    centers(&adj).into_iter().map(|c| rooted_code(&adj, c, usize::MAX)).min().unwrap_or_default()
}

pub fn tree_canonical_code(t: &GraphWithBoundary) -> String {
    canonical_code(&adjacency_of(t))
}

fn adjacency_of(g: &GraphWithBoundary) -> Adjacency {
    (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect()
}

/// Rebuilds a tree from its parenthesis code, numbering vertices in preorder.
pub fn decode_code(code: &str) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0;
    for ch in code.chars() {
        match ch {
            '(' => {
                if let Some(&parent) = stack.last() {
                    edges.push((parent, next));
                } else if next > 0 {
                    return Err(Error::Parse(format!("code {code:?} has several roots")));
                }
                stack.push(next);
                next += 1;
            }
            ')' => {
                stack.pop().ok_or_else(|| Error::Parse(format!("unbalanced code {code:?}")))?;
            }
            _ => return Err(Error::Parse(format!("unexpected {ch:?} in tree code"))),
        }
    }
    if !stack.is_empty() || next == 0 {
        return Err(Error::Parse(format!("unbalanced code {code:?}")));
    }
    Ok(edges)
}

/// One enumerated tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCatalogEntry {
    /// Vertices in preorder of the canonical code; leaves are the boundary.
    pub tree: GraphWithBoundary,
    pub leaf_count: usize,
    pub max_degree: usize,
    pub lambda2: f64,
    pub canonical_code: String,
}

impl TreeCatalogEntry {
    fn from_code(code: String) -> Result<Self> {
        let edges = decode_code(&code)?;
        let tree = GraphWithBoundary::with_leaf_boundary(edges.len() + 1, edges)?;
        let lambda2 = steklov_spectrum(&tree)?.lambda2();
        Ok(Self { leaf_count: tree.boundary_len(), max_degree: tree.max_degree(), lambda2, canonical_code: code, tree })
    }
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Adjacency {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

fn leaf_count(adj: &Adjacency) -> usize {
    adj.iter().filter(|a| a.len() == 1).count()
}

/// Irreducible trees with `leaves` leaves. Each tree with `k + 1` leaves comes
/// from one with `k` leaves by hanging a leaf on an internal vertex, or by
/// subdividing an edge and hanging a leaf on the new vertex.
fn irreducible(leaves: usize, d: usize) -> BTreeMap<String, Adjacency> {
    let mut level: BTreeMap<String, Adjacency> = BTreeMap::new();
    let k2 = adjacency_from_edges(2, &[(0, 1)]);
    level.insert(canonical_code(&k2), k2);
    for _ in 2..leaves {
        let mut next = BTreeMap::new();
        for adj in level.values() {
            let n = adj.len();
            for v in 0..n {
                if adj[v].len() >= 2 && adj[v].len() < d {
                    let mut t = adj.clone();
                    t.push(vec![v]);
                    t[v].push(n);
                    next.entry(canonical_code(&t)).or_insert(t);
                }
            }
            if d >= 3 {
                for u in 0..n {
                    for &v in adj[u].iter().filter(|&&v| v > u) {
                        let mut t = adj.clone();
                        for (a, b) in [(u, v), (v, u)] {
                            let slot = t[a].iter().position(|&x| x == b).unwrap();
                            t[a][slot] = n;
                        }
                        t.push(vec![u, v, n + 1]);
                        t.push(vec![n]);
                        next.entry(canonical_code(&t)).or_insert(t);
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// All trees on at most `max_vertices` vertices with `leaves` leaves and
/// maximum degree at most `d`, grown one leaf at a time.
fn all_trees(leaves: usize, d: usize, max_vertices: usize) -> BTreeMap<String, Adjacency> {
    let mut found = BTreeMap::new();
    let k2 = adjacency_from_edges(2, &[(0, 1)]);
    let mut level: BTreeMap<String, Adjacency> = BTreeMap::new();
    level.insert(canonical_code(&k2), k2);
    let mut n = 2;
    while !level.is_empty() && n <= max_vertices {
        for (code, adj) in &level {
            if leaf_count(adj) == leaves {
                found.insert(code.clone(), adj.clone());
            }
        }
        let mut next = BTreeMap::new();
        for adj in level.values() {
            for v in 0..n {
                // Leaf counts never decrease as the tree grows.
                let grows = usize::from(adj[v].len() >= 2);
                if adj[v].len() < d && leaf_count(adj) + grows <= leaves {
                    let mut t = adj.clone();
                    t.push(vec![v]);
                    t[v].push(n);
                    next.entry(canonical_code(&t)).or_insert(t);
                }
            }
        }
        level = next;
        n += 1;
    }
    found
}

/// One entry per isomorphism class, ordered by canonical code.
///
/// Without `allow_degree2` the class is the homeomorphically irreducible
/// trees, which is finite. With it, `max_vertices` is mandatory.
pub fn enumerate_trees(
    leaves: usize,
    d: usize,
    allow_degree2: bool,
    max_vertices: Option<usize>,
) -> Result<Vec<TreeCatalogEntry>> {
    if leaves < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("need leaves >= 2 and D >= 2, got {leaves}, {d}")));
    }
    let codes = match (allow_degree2, max_vertices) {
        (true, None) => {
            return Err(Error::InvalidParameter(
                "infinite family: trees with degree-2 vertices need --max-vertices".into(),
            ))
        }
        (true, Some(cap)) => all_trees(leaves, d, cap),
        (false, cap) => {
            let mut all = irreducible(leaves, d);
            if let Some(cap) = cap {
                all.retain(|_, adj| adj.len() <= cap);
            }
            all
        }
    };
    codes.into_keys().map(TreeCatalogEntry::from_code).collect()
}

/// Outcome of a maximization over a tree class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSummary {
    pub leaves: usize,
    pub max_degree: usize,
    pub allow_degree2: bool,
    pub max_vertices: Option<usize>,
    pub tree_count: usize,
    pub max_lambda2: f64,
    /// Every entry within [`SPECTRAL_TOL`] of the maximum.
    pub maximizers: Vec<String>,
    pub balanced_tree_code: Option<String>,
    pub balanced_tree_lambda2: Option<f64>,
    /// `None` when the balanced tree is undefined or outside the class.
    pub balanced_tree_in_class: Option<bool>,
    pub balanced_tree_is_maximizer: Option<bool>,
}

impl SearchSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub entries: Vec<TreeCatalogEntry>,
    pub summary: SearchSummary,
}

impl SearchResult {
    pub fn is_maximizer(&self, e: &TreeCatalogEntry) -> bool {
        self.summary.maximizers.binary_search(&e.canonical_code).is_ok()
    }

    /// CSV `canonical_code,n,leaves,max_degree,lambda2,is_balanced_tree,is_maximizer`.
    pub fn catalog_csv(&self) -> String {
        let mut s = String::from("canonical_code,n,leaves,max_degree,lambda2,is_balanced_tree,is_maximizer\n");
        for e in &self.entries {
            let balanced = self.summary.balanced_tree_code.as_deref() == Some(e.canonical_code.as_str());
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.canonical_code,
                e.tree.n(),
                e.leaf_count,
                e.max_degree,
                fmt_f64(e.lambda2),
                balanced,
                self.is_maximizer(e)
            ));
        }
        s
    }
}

/// Enumerates the class, finds all maximizers of `lambda2` and reports where
/// the balanced tree stands. Nothing here asserts that it wins.
pub fn search(leaves: usize, d: usize, allow_degree2: bool, max_vertices: Option<usize>) -> Result<SearchResult> {
    let entries = enumerate_trees(leaves, d, allow_degree2, max_vertices)?;
    let max_lambda2 = entries.iter().map(|e| e.lambda2).fold(f64::NEG_INFINITY, f64::max);
    let maximizers: Vec<String> = entries
        .iter()
        .filter(|e| e.lambda2 >= max_lambda2 - SPECTRAL_TOL)
        .map(|e| e.canonical_code.clone())
        .collect();
    let balanced = balanced_tree(leaves, d).ok().map(|inst| {
        let code = tree_canonical_code(&inst.graph);
        let lam = steklov_spectrum(&inst.graph).map(|s| s.lambda2());
        (code, lam)
    });
    let (balanced_tree_code, balanced_tree_lambda2) = match balanced {
        Some((code, lam)) => (Some(code), Some(lam?)),
        None => (None, None),
    };
    let balanced_tree_in_class =
        balanced_tree_code.as_ref().map(|c| entries.binary_search_by(|e| e.canonical_code.cmp(c)).is_ok());
    let balanced_tree_is_maximizer = match (&balanced_tree_code, balanced_tree_in_class) {
        (Some(code), Some(true)) => Some(maximizers.binary_search(code).is_ok()),
        _ => None,
    };
    let summary = SearchSummary {
        leaves,
        max_degree: d,
        allow_degree2,
        max_vertices,
        tree_count: entries.len(),
        max_lambda2,
        maximizers,
        balanced_tree_code,
        balanced_tree_lambda2,
        balanced_tree_in_class,
        balanced_tree_is_maximizer,
    };
    Ok(SearchResult { entries, summary })
}

/// [`search`] over the irreducible class.
pub fn argmax_lambda2(leaves: usize, d: usize) -> Result<SearchResult> {
    search(leaves, d, false, None)
}

/// Eigenvalue-by-eigenvalue comparison `smaller_k <= larger_k + tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub k_checked: usize,
    pub violations: usize,
    /// `max_k (smaller_k - larger_k)`; nonpositive when the theorem holds
    /// exactly.
    pub max_excess: f64,
    pub skipped: bool,
}

impl MonotonicityReport {
    fn compare(smaller: &[f64], larger: &[f64]) -> Self {
        let mut max_excess = f64::NEG_INFINITY;
        let mut violations = 0;
        for (a, b) in smaller.iter().zip(larger) {
            max_excess = max_excess.max(a - b);
            if *a > b + SPECTRAL_TOL {
                violations += 1;
            }
        }
        Self { k_checked: smaller.len().min(larger.len()), violations, max_excess, skipped: false }
    }

    fn skipped() -> Self {
        Self { k_checked: 0, violations: 0, max_excess: f64::NAN, skipped: true }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Deleting an edge between two interior vertices cannot raise any Steklov
/// eigenvalue. Removals that disconnect the graph are skipped.
pub fn check_edge_monotonicity(g: &GraphWithBoundary, edge: (Vertex, Vertex)) -> Result<MonotonicityReport> {
    let (u, v) = edge;
    if u >= g.n() || v >= g.n() || !g.has_edge(u, v) || g.is_boundary(u) || g.is_boundary(v) {
        return Err(Error::EdgeNotInterior(u, v));
    }
    let h = g.without_edge(u, v)?;
    if !h.is_connected() {
        return Ok(MonotonicityReport::skipped());
    }
    let before = steklov_spectrum(g)?.eigenvalues;
    let after = steklov_spectrum(&h)?.eigenvalues;
    Ok(MonotonicityReport::compare(&after, &before))
}

/// For a subtree `T'` of the tree `T` (both with their leaves as boundary),
/// `lambda_k(T) <= lambda_k(T')` for `k <= |leaves(T')|`. The subtree is given
/// as a vertex subset of `t` inducing a connected subgraph.
pub fn check_subtree_monotonicity(t: &GraphWithBoundary, subtree: &[Vertex]) -> Result<MonotonicityReport> {
    if !t.is_tree() {
        return Err(Error::NotSubtree("the host graph is not a tree".into()));
    }
    if t.boundary() != t.leaves() {
        return Err(Error::NotSubtree("the host tree must have its leaves as boundary".into()));
    }
    if subtree.iter().any(|&v| v >= t.n()) {
        return Err(Error::NotSubtree("vertex out of range".into()));
    }
    let (edges, verts) = t.induced_edges(subtree);
    if verts.len() < 2 || !t.induces_connected(&verts) {
        return Err(Error::NotSubtree("subset must induce a connected subgraph on at least 2 vertices".into()));
    }
    let sub = GraphWithBoundary::with_leaf_boundary(verts.len(), edges)?;
    let whole = steklov_spectrum(t)?.eigenvalues;
    let part = steklov_spectrum(&sub)?.eigenvalues;
    Ok(MonotonicityReport::compare(&whole[..part.len()], &part))
}
