//! Named graph families with their closed-form `lambda2`, plus seeded random
//! generators for property testing.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphWithBoundary, Vertex};
use crate::planar::is_planar;
use crate::rng::Rng;

/// An exact rational `p/q` with `u64` parts.
pub type Rational = Ratio<u64>;

pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInstance {
    pub graph: GraphWithBoundary,
    pub family_name: String,
    pub parameters: BTreeMap<String, i64>,
    pub closed_form_lambda2: Option<Rational>,
    /// Labelled vertex groups, for example `u_pendants` or `path`.
    pub roles: BTreeMap<String, Vec<Vertex>>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    family: &'a str,
    parameters: &'a BTreeMap<String, i64>,
    closed_form_lambda2: Option<String>,
    roles: &'a BTreeMap<String, Vec<Vertex>>,
}

impl FamilyInstance {
    fn new(graph: GraphWithBoundary, family_name: &str, parameters: &[(&str, i64)]) -> Self {
        Self {
            graph,
            family_name: family_name.to_string(),
            parameters: parameters.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            closed_form_lambda2: None,
            roles: BTreeMap::new(),
        }
    }

    fn with_closed_form(mut self, r: Rational) -> Self {
        self.closed_form_lambda2 = Some(r);
        self
    }

    fn with_role(mut self, name: &str, vertices: Vec<Vertex>) -> Self {
        self.roles.insert(name.to_string(), vertices);
        self
    }

    pub fn closed_form_f64(&self) -> Option<f64> {
        self.closed_form_lambda2.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    /// Metadata JSON: family, parameters, closed form as `"p/q"`, roles.
    pub fn metadata_json(&self) -> String {
        let doc = Sidecar {
            family: &self.family_name,
            parameters: &self.parameters,
            closed_form_lambda2: self.closed_form_lambda2.as_ref().map(rational_string),
            roles: &self.roles,
        };
        serde_json::to_string_pretty(&doc).expect("metadata serializes") + "\n"
    }
}

fn param_err(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Path of length `L-2` with `p` pendants on one end and `q` on the other.
///
/// Vertices `0..=L-2` are the path, then the `u` pendants, then the `v`
/// pendants. `lambda2 = (p+q) / ((L-2)pq + p + q)`.
pub fn barbell(p: usize, q: usize, l: usize) -> Result<FamilyInstance> {
    if p < 1 || q < 1 {
        return Err(param_err("barbell needs p >= 1 and q >= 1"));
    }
    if l < 2 {
        return Err(param_err("barbell needs L >= 2"));
    }
    let path: Vec<Vertex> = (0..l - 1).collect();
    let (u, v) = (0, l - 2);
    let up: Vec<Vertex> = (l - 1..l - 1 + p).collect();
    let vp: Vec<Vertex> = (l - 1 + p..l - 1 + p + q).collect();
    let mut edges: Vec<(Vertex, Vertex)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    edges.extend(up.iter().map(|&x| (u, x)));
    edges.extend(vp.iter().map(|&x| (v, x)));
    let n = l - 1 + p + q;
    let boundary: Vec<Vertex> = up.iter().chain(&vp).copied().collect();
    let g = GraphWithBoundary::new(n, edges, boundary)?;
    let (p64, q64, l64) = (p as u64, q as u64, l as u64);
    Ok(FamilyInstance::new(g, "barbell", &[("p", p as i64), ("q", q as i64), ("L", l as i64)])
        .with_closed_form(Rational::new(p64 + q64, (l64 - 2) * p64 * q64 + p64 + q64))
        .with_role("path", path)
        .with_role("u_pendants", up)
        .with_role("v_pendants", vp))
}

/// Two new pendants on the degree-one vertex `leaf` of a planar base graph;
/// the new pendants are the whole boundary and `lambda2 = 1`.
pub fn cherry(base: &GraphWithBoundary, leaf: Vertex) -> Result<FamilyInstance> {
    if leaf >= base.n() || base.degree(leaf) != 1 {
        return Err(param_err(format!("vertex {leaf} does not have degree 1")));
    }
    if !is_planar(base).is_planar() {
        return Err(Error::NotPlanar);
    }
    let n = base.n();
    let mut edges = base.edges().to_vec();
    edges.push((leaf, n));
    edges.push((leaf, n + 1));
    let g = GraphWithBoundary::new(n + 2, edges, [n, n + 1])?;
    Ok(FamilyInstance::new(g, "cherry", &[("base_n", n as i64), ("leaf", leaf as i64)])
        .with_closed_form(Rational::from_integer(1))
        .with_role("pendants", vec![n, n + 1])
        .with_role("stem", vec![leaf]))
}

/// `D-1` internally disjoint paths of length `n` between hubs `0` and `1`,
/// with one boundary pendant on each hub. Maximum degree `D`, diameter `n+2`,
/// `lambda2 = 2(D-1) / (n + 2(D-1))`.
pub fn path_stack(d: usize, n: usize) -> Result<FamilyInstance> {
    if d < 2 || n < 2 {
        return Err(param_err("path_stack needs D >= 2 and n >= 2"));
    }
    let mut edges = Vec::new();
    let mut next = 2;
    let mut inner = Vec::new();
    for _ in 0..d - 1 {
        let mut prev = 0;
        for _ in 0..n - 1 {
            edges.push((prev, next));
            inner.push(next);
            prev = next;
            next += 1;
        }
        edges.push((prev, 1));
    }
    let (pa, pb) = (next, next + 1);
    edges.push((0, pa));
    edges.push((1, pb));
    let g = GraphWithBoundary::new(next + 2, edges, [pa, pb])?;
    let k = 2 * (d as u64 - 1);
    Ok(FamilyInstance::new(g, "path_stack", &[("D", d as i64), ("n", n as i64)])
        .with_closed_form(Rational::new(k, n as u64 + k))
        .with_role("hubs", vec![0, 1])
        .with_role("paths", inner)
        .with_role("pendants", vec![pa, pb]))
}

/// Path `x_0 ... x_L` with both ends as boundary and a triangle hanging from
/// every odd `x_k`. A block graph with `B = 3`, diameter `L`, `lambda2 = 2/L`.
pub fn block_path(l: usize) -> Result<FamilyInstance> {
    if l < 2 || l % 2 != 0 {
        return Err(param_err("block_path needs an even L >= 2"));
    }
    let mut edges: Vec<(Vertex, Vertex)> = (0..l).map(|i| (i, i + 1)).collect();
    let mut apexes = Vec::new();
    let mut next = l + 1;
    for k in (1..l).step_by(2) {
        let (a, b) = (next, next + 1);
        edges.extend([(k, a), (k, b), (a, b)]);
        apexes.extend([a, b]);
        next += 2;
    }
    let g = GraphWithBoundary::new(next, edges, [0, l])?;
    Ok(FamilyInstance::new(g, "block_path", &[("L", l as i64)])
        .with_closed_form(Rational::new(2, l as u64))
        .with_role("path", (0..=l).collect())
        .with_role("triangle_apexes", apexes))
}

/// Splits `coins` into `parts` piles as evenly as possible, larger piles first.
fn split_even(coins: usize, parts: usize) -> Vec<usize> {
    let (q, r) = (coins / parts, coins % parts);
    (0..parts).map(|i| q + usize::from(i < r)).collect()
}

/// The coin-splitting tree `T_b*(ℓ, D)`; leaves are the boundary.
///
/// The root splits its `ℓ` coins into `min(ℓ, D)` piles, any other vertex
/// with `s > 1` coins into `min(s, D-1)` piles. Vertices are numbered in
/// breadth-first order.
pub fn balanced_tree(leaves: usize, d: usize) -> Result<FamilyInstance> {
    if leaves < 2 {
        return Err(param_err("balanced_tree needs at least 2 leaves"));
    }
    if d < 3 {
        return Err(param_err("balanced_tree needs D >= 3"));
    }
    let mut edges = Vec::new();
    let mut coins = vec![leaves];
    let mut head = 0;
    while head < coins.len() {
        let s = coins[head];
        if s > 1 {
            let parts = if head == 0 { s.min(d) } else { s.min(d - 1) };
            for pile in split_even(s, parts) {
                edges.push((head, coins.len()));
                coins.push(pile);
            }
        }
        head += 1;
    }
    let g = GraphWithBoundary::with_leaf_boundary(coins.len(), edges)?;
    let boundary = g.boundary().to_vec();
    Ok(FamilyInstance::new(g, "balanced_tree", &[("leaves", leaves as i64), ("D", d as i64)])
        .with_role("root", vec![0])
        .with_role("leaves", boundary))
}

/// Random block graph grown from `blocks` complete blocks of size
/// `2..=b_max`, each glued at a random existing vertex with spare degree.
/// Every vertex lying in exactly one block then receives one boundary
/// pendant. Requires `2 <= b_max <= d_max`.
pub fn random_block_graph(blocks: usize, b_max: usize, d_max: usize, seed: u64) -> Result<FamilyInstance> {
    if blocks < 1 || b_max < 2 || d_max < 2 {
        return Err(param_err("random_block_graph needs blocks >= 1, B_max >= 2, D_max >= 2"));
    }
    if b_max > d_max {
        return Err(param_err(format!(
            "B_max = {b_max} exceeds D_max = {d_max}: a non-cut vertex of a full block plus its pendant would exceed D_max"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut degree: Vec<usize> = Vec::new();
    let mut block_count: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    let mut add_block = |anchor: Option<Vertex>, size: usize, degree: &mut Vec<usize>, block_count: &mut Vec<usize>| {
        let mut members: Vec<Vertex> = anchor.into_iter().collect();
        while members.len() < size {
            degree.push(0);
            block_count.push(0);
            members.push(degree.len() - 1);
        }
        for (i, &u) in members.iter().enumerate() {
            block_count[u] += 1;
            degree[u] += size - 1;
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
    };
    add_block(None, rng.range(2, b_max), &mut degree, &mut block_count);
    for _ in 1..blocks {
        let mut size = rng.range(2, b_max);
        let mut candidates: Vec<Vertex> = (0..degree.len()).filter(|&v| degree[v] + size - 1 <= d_max).collect();
        if candidates.is_empty() {
            size = 2;
            candidates = (0..degree.len()).filter(|&v| degree[v] < d_max).collect();
        }
        let anchor = candidates[rng.below(candidates.len())];
        add_block(Some(anchor), size, &mut degree, &mut block_count);
    }
    let core = degree.len();
    let mut boundary = Vec::new();
    for v in 0..core {
        if block_count[v] == 1 {
            edges.push((v, core + boundary.len()));
            boundary.push(core + boundary.len());
        }
    }
    let g = GraphWithBoundary::new(core + boundary.len(), edges, boundary.clone())?;
    Ok(FamilyInstance::new(
        g,
        "random_block_graph",
        &[("blocks", blocks as i64), ("B_max", b_max as i64), ("D_max", d_max as i64), ("seed", seed as i64)],
    )
    .with_role("pendants", boundary))
}

/// Random recursive tree on `n` vertices: vertex `v` attaches to a uniformly
/// chosen earlier vertex of degree below `d_max`. Leaves are the boundary.
pub fn random_tree(n: usize, d_max: usize, seed: u64) -> Result<FamilyInstance> {
    if n < 2 || d_max < 2 {
        return Err(param_err("random_tree needs n >= 2 and D_max >= 2"));
    }
    let mut rng = Rng::new(seed);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let candidates: Vec<Vertex> = (0..v).filter(|&u| degree[u] < d_max).collect();
        let u = candidates[rng.below(candidates.len())];
        degree[u] += 1;
        degree[v] += 1;
        edges.push((u, v));
    }
    let g = GraphWithBoundary::with_leaf_boundary(n, edges)?;
    Ok(FamilyInstance::new(g, "random_tree", &[("n", n as i64), ("D_max", d_max as i64), ("seed", seed as i64)]))
}

/// Stacked triangulation on `core` vertices (each new vertex is placed in a
/// random face and joined to its three corners) with `pendants` boundary
/// leaves attached to random core vertices.
pub fn random_planar(core: usize, pendants: usize, seed: u64) -> Result<FamilyInstance> {
    if core < 3 {
        return Err(param_err("random_planar needs at least 3 core vertices"));
    }
    if pendants < 2 {
        return Err(param_err("random_planar needs at least 2 pendants"));
    }
    let mut rng = Rng::new(seed);
    let mut edges = vec![(0, 1), (1, 2), (0, 2)];
    let mut faces = vec![[0, 1, 2], [0, 1, 2]];
    for v in 3..core {
        let i = rng.below(faces.len());
        let [a, b, c] = faces[i];
        edges.extend([(a, v), (b, v), (c, v)]);
        faces[i] = [a, b, v];
        faces.push([b, c, v]);
        faces.push([a, c, v]);
    }
    let mut boundary = Vec::with_capacity(pendants);
    for k in 0..pendants {
        let host = rng.below(core);
        edges.push((host, core + k));
        boundary.push(core + k);
    }
    let g = GraphWithBoundary::new(core + pendants, edges, boundary.clone())?;
    Ok(FamilyInstance::new(
        g,
        "random_planar",
        &[("core", core as i64), ("pendants", pendants as i64), ("seed", seed as i64)],
    )
    .with_role("pendants", boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::is_block_graph;
    use crate::graph::diameter;
    use crate::io::to_json;
    use crate::spectrum::{lambda2, steklov_spectrum};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn barbell_values() {
        let b = barbell(2, 4, 3).unwrap();
        assert_eq!(b.closed_form_lambda2, Some(Rational::new(3, 7)));
        assert!(close(lambda2(&b.graph).unwrap(), 3.0 / 7.0));
        assert_eq!(barbell(3, 3, 3).unwrap().closed_form_lambda2, Some(Rational::new(2, 5)));
        let star = barbell(2, 3, 2).unwrap();
        assert_eq!(star.graph.n(), 6);
        let spec = steklov_spectrum(&star.graph).unwrap();
        assert!(spec.eigenvalues[1..].iter().all(|&x| close(x, 1.0)));
        assert!(barbell(1, 1, 1).is_err());
    }

    #[test]
    fn cherry_on_edge() {
        let base = GraphWithBoundary::with_leaf_boundary(2, [(0, 1)]).unwrap();
        let c = cherry(&base, 1).unwrap();
        assert_eq!(c.graph.n(), 4);
        assert!(close(lambda2(&c.graph).unwrap(), 1.0));
        let tri = GraphWithBoundary::new(3, [(0, 1), (1, 2), (0, 2)], [0]).unwrap();
        assert!(cherry(&tri, 0).is_err());
    }

    #[test]
    fn path_stack_values() {
        let ps = path_stack(3, 4).unwrap();
        assert_eq!(ps.closed_form_lambda2, Some(Rational::new(1, 2)));
        assert!(close(lambda2(&ps.graph).unwrap(), 0.5));
        assert_eq!(diameter(&ps.graph).unwrap(), 6);
        assert_eq!(ps.graph.max_degree(), 3);
        let two = path_stack(2, 5).unwrap();
        assert!(close(lambda2(&two.graph).unwrap(), 2.0 / 7.0));
    }

    #[test]
    fn block_path_values() {
        for l in [2, 4, 8] {
            let bp = block_path(l).unwrap();
            assert!(close(lambda2(&bp.graph).unwrap(), 2.0 / l as f64));
            assert_eq!(diameter(&bp.graph).unwrap(), l);
            assert_eq!(is_block_graph(&bp.graph).unwrap(), Some(3));
        }
        assert!(block_path(3).is_err());
    }

    #[test]
    fn balanced_tree_shapes() {
        let t = balanced_tree(4, 3).unwrap();
        assert_eq!(t.graph.n(), 6);
        assert_eq!(t.graph.edges(), &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]);
        assert_eq!(t.graph.boundary_len(), 4);
        let star = balanced_tree(5, 6).unwrap();
        assert_eq!(star.graph.max_degree(), 5);
        assert_eq!(star.graph.n(), 6);
        let p = balanced_tree(2, 3).unwrap();
        assert_eq!(p.graph.edges(), &[(0, 1), (0, 2)]);
        for l in 2..40 {
            for d in 3..7 {
                let t = balanced_tree(l, d).unwrap();
                assert_eq!(t.graph.boundary_len(), l);
                assert!(t.graph.max_degree() <= d);
                if l > 2 {
                    assert!(t.graph.interior().iter().all(|&v| t.graph.degree(v) != 2));
                }
            }
        }
    }

    #[test]
    fn random_generators() {
        let b = random_block_graph(1, 2, 2, 7).unwrap();
        assert_eq!(b.graph.n(), 4);
        assert!(b.graph.is_tree() && diameter(&b.graph).unwrap() == 3);
        assert!(random_block_graph(3, 4, 3, 0).is_err());
        for seed in 0..50 {
            let g = random_block_graph(6, 4, 5, seed).unwrap().graph;
            assert!(is_block_graph(&g).unwrap().is_some());
            assert!(g.max_degree() <= 5);
            assert!(g.boundary().iter().all(|&x| g.degree(x) == 1));
            let t = random_tree(15, 3, seed).unwrap().graph;
            assert!(t.is_tree() && t.max_degree() <= 3);
            let p = random_planar(10, 4, seed).unwrap().graph;
            assert!(is_planar(&p).is_planar());
            assert_eq!(p.edge_count(), 3 * 10 - 6 + 4);
        }
        assert_eq!(random_tree(2, 3, 1).unwrap().graph.edges(), &[(0, 1)]);
    }

    #[test]
    fn deterministic_serialization() {
        let a = random_block_graph(5, 3, 4, 42).unwrap();
        let b = random_block_graph(5, 3, 4, 42).unwrap();
        assert_eq!(to_json(&a.graph), to_json(&b.graph));
        assert_eq!(a.metadata_json(), b.metadata_json());
    }

    #[test]
    fn sidecar() {
        let m = barbell(2, 4, 3).unwrap().metadata_json();
        assert!(m.contains("\"closed_form_lambda2\": \"3/7\""));
        assert!(m.contains("\"family\": \"barbell\""));
    }
}
