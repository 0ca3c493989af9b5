//! The graph-with-boundary data model and structural queries.
//!
//! Vertices are dense identifiers `0..n`. Edges are stored once, as sorted
//! pairs, and the edge list itself is kept sorted so that two graphs with the
//! same edge set compare (and serialize) identically.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// A simple undirected graph together with a designated boundary vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphWithBoundary {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    boundary: Vec<Vertex>,
    adjacency: Vec<Vec<Vertex>>,
    is_boundary: Vec<bool>,
}

impl GraphWithBoundary {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// vertices and an empty boundary. Edge orientation and order do not matter.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
        boundary: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self> {
        let mut canon: Vec<(Vertex, Vertex)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }

        let mut boundary: Vec<Vertex> = boundary.into_iter().collect();
        boundary.sort_unstable();
        boundary.dedup();
        if boundary.is_empty() {
            return Err(Error::InvalidGraph("boundary is empty".into()));
        }
        if let Some(&b) = boundary.iter().find(|&&b| b >= n) {
            return Err(Error::InvalidGraph(format!("boundary vertex {b} out of range for n = {n}")));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let mut is_boundary = vec![false; n];
        for &b in &boundary {
            is_boundary[b] = true;
        }
        Ok(Self { n, edges: canon, boundary, adjacency, is_boundary })
    }

    /// Same graph with every leaf (degree-1 vertex) as boundary.
    pub fn with_leaf_boundary(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().collect();
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            if u < n && v < n {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        let leaves: Vec<_> = (0..n).filter(|&v| deg[v] == 1).collect();
        Self::new(n, edges, leaves)
    }

    pub fn with_boundary(&self, boundary: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied(), boundary)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary(&self) -> &[Vertex] {
        &self.boundary
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    /// Vertices not on the boundary, in increasing order.
    pub fn interior(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| !self.is_boundary[v]).collect()
    }

    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.is_boundary[v]
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| self.degree(v) == 1).collect()
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn bfs(&self, source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.bfs(0).iter().all(Option::is_some)
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Applies the permutation `perm` (old id -> new id).
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameter("permutation length differs from n".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Self::new(
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
            self.boundary.iter().map(|&b| perm[b]),
        )
    }

    /// Graph with one edge deleted; the boundary is unchanged.
    pub fn without_edge(&self, u: Vertex, v: Vertex) -> Result<Self> {
        let e = (u.min(v), u.max(v));
        if !self.has_edge(u, v) {
            return Err(Error::InvalidParameter(format!("edge ({u}, {v}) not present")));
        }
        Self::new(self.n, self.edges.iter().copied().filter(|&f| f != e), self.boundary.iter().copied())
    }

    /// Subgraph induced on `vertices`, relabelled densely in increasing order
    /// of the original ids. Returns the subgraph's edge list and the map from
    /// new ids back to original ids.
    pub fn induced_edges(&self, vertices: &[Vertex]) -> (Vec<(Vertex, Vertex)>, Vec<Vertex>) {
        let mut verts = vertices.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        (edges, verts)
    }

    /// True when the subgraph induced on `vertices` is connected (and non-empty).
    pub fn induces_connected(&self, vertices: &[Vertex]) -> bool {
        if vertices.is_empty() {
            return false;
        }
        let mut inside = vec![false; self.n];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![vertices[0]];
        seen[vertices[0]] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        let distinct = {
            let mut v = vertices.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        count == distinct
    }
}

/// Structural flags reported by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub simple: bool,
    pub connected: bool,
    pub boundary_all_leaves: bool,
}

pub fn validate(g: &GraphWithBoundary) -> ValidationReport {
    let simple = g.edges.iter().all(|&(u, v)| u < v) && g.edges.windows(2).all(|w| w[0] < w[1]);
    ValidationReport {
        simple,
        connected: g.is_connected(),
        boundary_all_leaves: g.boundary.iter().all(|&b| g.degree(b) == 1),
    }
}

/// Largest shortest-path distance over all vertex pairs.
pub fn diameter(g: &GraphWithBoundary) -> Result<usize> {
    let mut best = 0;
    for s in 0..g.n() {
        for d in g.bfs(s) {
            best = best.max(d.ok_or(Error::InfiniteDiameter)?);
        }
    }
    Ok(best)
}

/// Lexicographically smallest shortest path from `from` to `to`.
pub fn shortest_path(g: &GraphWithBoundary, from: Vertex, to: Vertex) -> Option<Vec<Vertex>> {
    let dist = g.bfs(to);
    let mut d = dist[from]?;
    let mut path = vec![from];
    let mut cur = from;
    while d > 0 {
        cur = *g.neighbors(cur).iter().find(|&&w| dist[w] == Some(d - 1))?;
        path.push(cur);
        d -= 1;
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(len: usize) -> GraphWithBoundary {
        GraphWithBoundary::new(len + 1, (0..len).map(|i| (i, i + 1)), [0, len]).unwrap()
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(GraphWithBoundary::new(2, [(0, 0)], [0]).is_err());
        assert!(GraphWithBoundary::new(2, [(0, 1), (1, 0)], [0]).is_err());
        assert!(GraphWithBoundary::new(2, [(0, 2)], [0]).is_err());
        assert!(GraphWithBoundary::new(2, [(0, 1)], []).is_err());
    }

    #[test]
    fn single_edge_flags() {
        let g = GraphWithBoundary::new(2, [(0, 1)], [0, 1]).unwrap();
        let r = validate(&g);
        assert!(r.simple && r.connected && r.boundary_all_leaves);
    }

    #[test]
    fn triangle_with_pendant() {
        let g = GraphWithBoundary::new(4, [(0, 1), (1, 2), (0, 2), (0, 3)], [3]).unwrap();
        assert!(validate(&g).boundary_all_leaves);
        let g2 = g.with_boundary([1, 3]).unwrap();
        assert!(!validate(&g2).boundary_all_leaves);
    }

    #[test]
    fn diameters() {
        for len in 1..8 {
            assert_eq!(diameter(&path(len)).unwrap(), len);
        }
        let star = GraphWithBoundary::with_leaf_boundary(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(diameter(&star).unwrap(), 2);
        let disconnected = GraphWithBoundary::new(3, [(0, 1)], [0]).unwrap();
        assert_eq!(diameter(&disconnected), Err(Error::InfiniteDiameter));
    }

    #[test]
    fn lexicographic_geodesic() {
        // 4-cycle 0-1-3-2-0: two geodesics from 0 to 3, via 1 and via 2.
        let g = GraphWithBoundary::new(4, [(0, 1), (1, 3), (3, 2), (2, 0)], [0, 3]).unwrap();
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), vec![0, 1, 3]);
    }
}
