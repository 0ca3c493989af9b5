//! Test-function constructions for block graphs.
//!
//! [`find_balanced_subgraph`] runs the block-peeling procedure that finds a
//! connected subgraph `H` holding between `1/(B(D-1))` and `1/B` of the
//! boundary. [`cut_test_function`] turns it into a two-valued field, and
//! [`path_test_function`] builds the level-set field along a geodesic between
//! two far-apart boundary vertices. Both fields sum to zero on the boundary,
//! so their Rayleigh quotients bound `lambda2` from above.

use std::collections::{BTreeMap, VecDeque};

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::blocks::{blocks, is_block_graph, BlockDecomposition};
use crate::bounds::block_diameter_bound;
use crate::error::{Error, Result};
use crate::graph::{diameter, shortest_path, GraphWithBoundary, Vertex};
use crate::spectrum::rayleigh_quotient;

fn ratio_string<S: Serializer>(r: &Ratio<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// One round of the procedure: the blocks whose edges were cut, the vertex
/// removed along with them (none in the first round), and the component kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub removed_blocks: Vec<Vec<Vertex>>,
    pub removed_vertex: Option<Vertex>,
    pub component: Vec<Vertex>,
    pub boundary_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgraphCertificate {
    pub vertices: Vec<Vertex>,
    /// `|H ∩ δΩ| / |δΩ|` in lowest terms, serialized as `"p/q"`.
    #[serde(serialize_with = "ratio_string")]
    pub fraction: Ratio<usize>,
    pub boundary_count: usize,
    pub boundary_len: usize,
    pub trace: Vec<TraceStep>,
}

impl SubgraphCertificate {
    /// Exact check of `1/(B(D-1)) <= |H ∩ δΩ|/|δΩ| <= 1/B`.
    pub fn in_range(&self, block_size: usize, max_degree: usize) -> bool {
        let (h, b) = (self.boundary_count, self.boundary_len);
        h * block_size <= b && h * block_size * max_degree.saturating_sub(1) >= b
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }
}

/// Maps each edge to the index of the block containing it.
fn edge_blocks(dec: &BlockDecomposition) -> BTreeMap<(Vertex, Vertex), usize> {
    let mut map = BTreeMap::new();
    for (i, b) in dec.blocks.iter().enumerate() {
        for (j, &u) in b.iter().enumerate() {
            for &v in &b[j + 1..] {
                map.insert((u, v), i);
            }
        }
    }
    map
}

/// Components of the subgraph induced on `alive` after deleting every edge of
/// the blocks flagged in `cut`. Sorted by smallest vertex.
fn components_without(
    g: &GraphWithBoundary,
    alive: &[bool],
    cut: &[bool],
    edge_block: &BTreeMap<(Vertex, Vertex), usize>,
) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if alive[w] && !seen[w] && !cut[edge_block[&(u.min(w), u.max(w))]] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Runs the peeling procedure. Starts from the block containing vertex 0 and
/// always descends into the component with the most boundary vertices (ties
/// to the smallest vertex id), stopping once the kept component holds at
/// most `|δΩ|/B` boundary vertices.
pub fn find_balanced_subgraph(g: &GraphWithBoundary) -> Result<SubgraphCertificate> {
    let bsize = is_block_graph(g)?.ok_or(Error::NotBlockGraph)?;
    let b = g.boundary_len();
    if b < 2 {
        return Err(Error::TooFewBoundary { need: 2, got: b });
    }
    // Some count h must satisfy b <= h B (D-1) and h B <= b.
    let spread = bsize * g.max_degree().saturating_sub(1);
    if spread == 0 || b.div_ceil(spread) * bsize > b {
        return Err(Error::NoBalancedSubgraph(format!(
            "no boundary count h satisfies {b}/{spread} <= h <= {b}/{bsize}"
        )));
    }
    let dec = blocks(g)?;
    let edge_block = edge_blocks(&dec);
    let count = |c: &[Vertex]| c.iter().filter(|&&v| g.is_boundary(v)).count();

    let mut alive = vec![true; g.n()];
    let mut cut = vec![false; dec.blocks.len()];
    let mut trace = Vec::new();
    let mut current: Vec<usize> = vec![0];
    let mut removed_vertex: Option<Vertex> = None;

    loop {
        if current.is_empty() {
            return Err(Error::NoBalancedSubgraph(format!(
                "component {:?} has no further blocks to split",
                trace.last().map(|t: &TraceStep| t.component.clone()).unwrap_or_default()
            )));
        }
        for &i in &current {
            cut[i] = true;
        }
        if let Some(v) = removed_vertex {
            alive[v] = false;
        }
        let comps = components_without(g, &alive, &cut, &edge_block);
        // Largest boundary count wins; `comps` is ordered by smallest vertex,
        // so the first maximum is the tie-break winner.
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, c)| count(a).cmp(&count(c)).then(j.cmp(i)))
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::NoBalancedSubgraph("no components left".into()))?;
        let h = count(&best);
        trace.push(TraceStep {
            removed_blocks: current.iter().map(|&i| dec.blocks[i].clone()).collect(),
            removed_vertex,
            component: best.clone(),
            boundary_count: h,
        });
        if h * bsize <= b {
            let cert = SubgraphCertificate {
                vertices: best,
                fraction: Ratio::new(h, b),
                boundary_count: h,
                boundary_len: b,
                trace,
            };
            if !cert.in_range(bsize, g.max_degree()) {
                return Err(Error::NoBalancedSubgraph(format!(
                    "kept component holds {h} of {b} boundary vertices, below 1/(B(D-1))"
                )));
            }
            return Ok(cert);
        }
        // Descend: the connecting vertex is the one vertex of the component
        // lying in a block just cut.
        let v = *best
            .iter()
            .find(|&&x| current.iter().any(|&i| dec.blocks[i].binary_search(&x).is_ok()))
            .expect("component touches a cut block");
        alive = vec![false; g.n()];
        for &x in &best {
            alive[x] = true;
        }
        current = dec
            .blocks_at(v)
            .into_iter()
            .filter(|&i| !cut[i] && dec.blocks[i].iter().all(|&x| alive[x]))
            .collect();
        removed_vertex = Some(v);
    }
}

/// `1 - θ` on `H` and `-θ` elsewhere, with `θ = |H ∩ δΩ|/|δΩ|`.
pub fn cut_test_function(g: &GraphWithBoundary, cert: &SubgraphCertificate) -> Vec<f64> {
    let theta = *cert.fraction.numer() as f64 / *cert.fraction.denom() as f64;
    let mut f = vec![-theta; g.n()];
    for &v in &cert.vertices {
        f[v] = 1.0 - theta;
    }
    f
}

/// The level-set field along a geodesic `x_0 ... x_m` between boundary
/// vertices.
///
/// Removing the edges of the blocks along the geodesic leaves components that
/// each hang from one vertex of those blocks. A component hanging from `x_k`
/// sits at position `k`; one hanging from a non-geodesic vertex of the block
/// through `x_k x_{k+1}` sits at `k + 1/2`. The field is `a_0 - pos * t` with
/// `a_0 = 1` and `t` fixed by the zero boundary sum, so `x_m` gets
/// `-S = a_0 - m t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTestFunction {
    pub geodesic: Vec<Vertex>,
    /// Graph diameter `L`.
    pub diameter: usize,
    /// Length `m` of the geodesic actually used; equals `L` when some boundary
    /// pair realizes the diameter.
    pub path_length: usize,
    /// Position of every vertex, a multiple of 1/2 in `[0, m]`.
    pub positions: Vec<f64>,
    /// `(position, level)` pairs for `0, 1/2, 1, ..., m`.
    pub levels: Vec<(f64, f64)>,
    pub a0: f64,
    pub s: f64,
    pub slope: f64,
    pub field: Vec<f64>,
    pub rayleigh: f64,
    /// Diameter bound evaluated at the true diameter.
    pub bound_at_diameter: f64,
    /// Diameter bound evaluated at the geodesic length.
    pub bound_at_path_length: f64,
}

pub fn path_test_function(g: &GraphWithBoundary) -> Result<PathTestFunction> {
    let bsize = is_block_graph(g)?.ok_or(Error::NotBlockGraph)?;
    let l = diameter(g)?;
    // Farthest boundary pair, lexicographically smallest among ties.
    let mut best: Option<(usize, Vertex, Vertex)> = None;
    for &x in g.boundary() {
        let dist = g.bfs(x);
        for &y in g.boundary() {
            if y > x {
                let d = dist[y].expect("connected");
                if best.map_or(true, |(bd, _, _)| d > bd) {
                    best = Some((d, x, y));
                }
            }
        }
    }
    let (m, x0, xm) = best.ok_or(Error::DegenerateGeodesic)?;
    if m < 2 {
        return Err(Error::DegenerateGeodesic);
    }
    let geodesic = shortest_path(g, x0, xm).expect("connected");
    let dec = blocks(g)?;
    let edge_block = edge_blocks(&dec);

    // Anchor positions on the path blocks.
    let mut anchor = vec![f64::NAN; g.n()];
    let mut cut = vec![false; dec.blocks.len()];
    for (k, w) in geodesic.windows(2).enumerate() {
        let bi = edge_block[&(w[0].min(w[1]), w[0].max(w[1]))];
        cut[bi] = true;
        for &v in &dec.blocks[bi] {
            if anchor[v].is_nan() {
                anchor[v] = k as f64 + 0.5;
            }
        }
    }
    for (k, &x) in geodesic.iter().enumerate() {
        anchor[x] = k as f64;
    }
    let alive = vec![true; g.n()];
    let mut positions = vec![f64::NAN; g.n()];
    for comp in components_without(g, &alive, &cut, &edge_block) {
        let pos = comp
            .iter()
            .map(|&v| anchor[v])
            .find(|p| !p.is_nan())
            .expect("every component hangs from a path block");
        for v in comp {
            positions[v] = pos;
        }
    }

    let a0 = 1.0;
    let pos_sum: f64 = g.boundary().iter().map(|&x| positions[x]).sum();
    let slope = a0 * g.boundary_len() as f64 / pos_sum;
    let field: Vec<f64> = positions.iter().map(|p| a0 - p * slope).collect();
    let s = slope * m as f64 - a0;
    let levels = (0..=2 * m).map(|h| h as f64 / 2.0).map(|p| (p, a0 - p * slope)).collect();
    let rayleigh = rayleigh_quotient(g, &field)?;
    Ok(PathTestFunction {
        geodesic,
        diameter: l,
        path_length: m,
        positions,
        levels,
        a0,
        s,
        slope,
        field,
        rayleigh,
        bound_at_diameter: block_diameter_bound(l, bsize)?,
        bound_at_path_length: block_diameter_bound(m, bsize)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::lambda2;

    fn path(len: usize) -> GraphWithBoundary {
        GraphWithBoundary::new(len + 1, (0..len).map(|i| (i, i + 1)), [0, len]).unwrap()
    }

    #[test]
    fn path_certificate_is_half() {
        let c = find_balanced_subgraph(&path(4)).unwrap();
        assert_eq!(c.fraction, Ratio::new(1, 2));
        assert!(c.in_range(2, 2));
        let f = cut_test_function(&path(4), &c);
        assert!(f.iter().all(|x| x.abs() == 0.5));
    }

    #[test]
    fn star_certificate_is_one_third() {
        let g = GraphWithBoundary::with_leaf_boundary(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = find_balanced_subgraph(&g).unwrap();
        assert_eq!(c.fraction, Ratio::new(1, 3));
        let f = cut_test_function(&g, &c);
        let sum: f64 = g.boundary().iter().map(|&x| f[x]).sum();
        assert!(sum.abs() < 1e-15);
        assert!(f.iter().all(|&x| (x - 2.0 / 3.0).abs() < 1e-15 || (x + 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn bowtie_with_pendants() {
        // Triangles {0,1,2} and {0,3,4}; pendants 5..8 on 1,2,3,4.
        let g = GraphWithBoundary::with_leaf_boundary(
            9,
            [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (1, 5), (2, 6), (3, 7), (4, 8)],
        )
        .unwrap();
        let c = find_balanced_subgraph(&g).unwrap();
        assert!(c.in_range(3, 4));
        assert!(g.induces_connected(&c.vertices));
        assert!(c.trace.len() <= blocks(&g).unwrap().blocks.len());
        let json = c.to_json();
        assert!(json.contains(&format!("\"fraction\": \"{}/{}\"", c.fraction.numer(), c.fraction.denom())));
    }

    #[test]
    fn not_a_block_graph() {
        let g = GraphWithBoundary::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [0, 2]).unwrap();
        assert_eq!(find_balanced_subgraph(&g), Err(Error::NotBlockGraph));
    }

    #[test]
    fn path_field_is_linear() {
        let g = path(5);
        let p = path_test_function(&g).unwrap();
        assert_eq!(p.path_length, 5);
        assert!((p.rayleigh - 2.0 / 5.0).abs() < 1e-12);
        for (v, f) in p.field.iter().enumerate() {
            assert!((f - (1.0 - 0.4 * v as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn barbell_field_respects_bound() {
        let g = GraphWithBoundary::with_leaf_boundary(7, [(0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (4, 6)]).unwrap();
        let p = path_test_function(&g).unwrap();
        let lam = lambda2(&g).unwrap();
        assert!(lam <= p.rayleigh + 1e-9);
        assert!(p.rayleigh <= 0.5 + 1e-9);
        let sum: f64 = g.boundary().iter().map(|&x| p.field[x]).sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn degenerate_geodesic() {
        let g = GraphWithBoundary::with_leaf_boundary(2, [(0, 1)]).unwrap();
        assert_eq!(path_test_function(&g).unwrap_err(), Error::DegenerateGeodesic);
    }
}
