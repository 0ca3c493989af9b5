//! Planarity testing with a combinatorial embedding.
//!
//! Each block is embedded with the Demoucron–Malgrange–Pertuiset
//! path-addition method: start from a cycle, repeatedly pick a fragment (a
//! bridge of the embedded part) and route one of its paths through an
//! admissible face. A fragment without an admissible face proves the block
//! non-planar. Block embeddings are glued at cut vertices by concatenating
//! their rotations.
//!
//! Non-planar inputs get a Kuratowski witness by greedy edge deletion: an
//! edge-minimal non-planar subgraph is a subdivision of K5 or K3,3.

use std::collections::{BTreeSet, VecDeque};

use crate::blocks::blocks;
use crate::graph::{GraphWithBoundary, Vertex};

/// A rotation system: for each vertex, its neighbours in cyclic order.
///
/// Faces are traced by the rule: after arriving at `v` from `u`, leave
/// towards the successor of `u` in the rotation at `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub rotation: Vec<Vec<Vertex>>,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn successor(&self, v: Vertex, u: Vertex) -> Vertex {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|&x| x == u).expect("dart not in rotation");
        rot[(i + 1) % rot.len()]
    }

    /// Face boundary walks, each starting at its first untraced dart in
    /// (vertex, rotation position) order.
    pub fn faces(&self) -> Vec<Vec<Vertex>> {
        let mut used: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = Vec::new();
        for u in 0..self.n() {
            for i in 0..self.rotation[u].len() {
                if used[u][i] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, self.rotation[u][i]);
                loop {
                    let ai = self.rotation[a].iter().position(|&x| x == b).unwrap();
                    if used[a][ai] {
                        break;
                    }
                    used[a][ai] = true;
                    face.push(a);
                    let c = self.successor(b, a);
                    a = b;
                    b = c;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Euler's formula per component: V - E + F = 2 for every component with
    /// an edge, where F counts traced faces. Isolated vertices contribute 1.
    pub fn satisfies_euler(&self) -> bool {
        let n = self.n() as i64;
        let e = self.rotation.iter().map(Vec::len).sum::<usize>() as i64 / 2;
        let f = self.faces().len() as i64;
        let comps = components_of_rotation(&self.rotation) as i64;
        let isolated = self.rotation.iter().filter(|r| r.is_empty()).count() as i64;
        n - e + f == 2 * (comps - isolated) + isolated
    }
}

fn components_of_rotation(rot: &[Vec<Vertex>]) -> usize {
    let n = rot.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &rot[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// An edge-minimal non-planar subgraph with its branch-vertex classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    pub edges: Vec<(Vertex, Vertex)>,
    pub branch_vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Planarity {
    Planar(Embedding),
    NonPlanar(KuratowskiWitness),
}

impl Planarity {
    pub fn is_planar(&self) -> bool {
        matches!(self, Planarity::Planar(_))
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            Planarity::Planar(e) => Some(e),
            Planarity::NonPlanar(_) => None,
        }
    }
}

pub fn is_planar(g: &GraphWithBoundary) -> Planarity {
    match embed_edges(g.n(), g.edges()) {
        Some(emb) => Planarity::Planar(emb),
        None => Planarity::NonPlanar(kuratowski_witness(g.n(), g.edges())),
    }
}

/// Embeds an arbitrary simple graph given as an edge list, or returns `None`
/// when it is not planar.
pub fn embed_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Option<Embedding> {
    if n >= 3 && edges.len() > 3 * n - 6 {
        return None;
    }
    let mut rotation = vec![Vec::new(); n];
    let Ok(full) = GraphWithBoundary::new(n, edges.iter().copied(), [0]) else {
        return None;
    };
    for comp in full.components() {
        if comp.len() == 1 {
            continue;
        }
        let (sub_edges, map) = full.induced_edges(&comp);
        let sub = GraphWithBoundary::new(comp.len(), sub_edges, [0]).ok()?;
        let dec = blocks(&sub).ok()?;
        for block in &dec.blocks {
            let block_rot = embed_block(&sub, block)?;
            for (v, order) in block_rot {
                rotation[map[v]].extend(order.into_iter().map(|w| map[w]));
            }
        }
    }
    Some(Embedding { rotation })
}

/// Rotation lists (per block vertex) for one block, or `None` if non-planar.
fn embed_block(g: &GraphWithBoundary, block: &[Vertex]) -> Option<Vec<(Vertex, Vec<Vertex>)>> {
    if block.len() == 2 {
        return Some(vec![(block[0], vec![block[1]]), (block[1], vec![block[0]])]);
    }
    let in_block: BTreeSet<Vertex> = block.iter().copied().collect();
    let block_edges: BTreeSet<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .copied()
        .filter(|(u, v)| in_block.contains(u) && in_block.contains(v))
        .collect();
    let nbrs = |v: Vertex| g.neighbors(v).iter().copied().filter(|w| in_block.contains(w));

    let cycle = find_cycle(g, block, &in_block);
    let mut embedded_vertices: BTreeSet<Vertex> = cycle.iter().copied().collect();
    let mut embedded_edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        embedded_edges.insert((a.min(b), a.max(b)));
    }
    let mut faces: Vec<Vec<Vertex>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];

    while embedded_edges.len() < block_edges.len() {
        let fragments = fragments(&block_edges, &embedded_vertices, &embedded_edges, &nbrs);
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&k| frag.attachments.iter().all(|a| faces[k].contains(a)))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face_idx) = choice?;
        let path = fragment_path(&fragments[fi], &embedded_vertices, &nbrs);
        let (face_a, face_b) = split_face(&faces[face_idx], &path);
        faces[face_idx] = face_a;
        faces.push(face_b);
        for w in path.windows(2) {
            embedded_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        embedded_vertices.extend(path.iter().copied());
    }

    // next_v(u) = w for every consecutive (u, v, w) along a face.
    let mut next: std::collections::BTreeMap<(Vertex, Vertex), Vertex> = Default::default();
    for face in &faces {
        let k = face.len();
        for i in 0..k {
            let (u, v, w) = (face[i], face[(i + 1) % k], face[(i + 2) % k]);
            next.insert((v, u), w);
        }
    }
    let mut out = Vec::new();
    for &v in block {
        let start = nbrs(v).next()?;
        let mut order = vec![start];
        let mut cur = next[&(v, start)];
        while cur != start {
            order.push(cur);
            cur = next[&(v, cur)];
        }
        out.push((v, order));
    }
    Some(out)
}

fn find_cycle(g: &GraphWithBoundary, block: &[Vertex], in_block: &BTreeSet<Vertex>) -> Vec<Vertex> {
    // DFS tree from the smallest vertex; the first back edge closes a cycle.
    let root = block[0];
    let mut parent = std::collections::BTreeMap::new();
    let mut depth = std::collections::BTreeMap::new();
    depth.insert(root, 0usize);
    let mut stack = vec![(root, 0usize)];
    while let Some(top) = stack.len().checked_sub(1) {
        let (u, idx) = stack[top];
        let nb: Vec<Vertex> = g.neighbors(u).iter().copied().filter(|w| in_block.contains(w)).collect();
        if idx >= nb.len() {
            stack.pop();
            continue;
        }
        stack[top].1 += 1;
        let w = nb[idx];
        if !depth.contains_key(&w) {
            depth.insert(w, depth[&u] + 1);
            parent.insert(w, u);
            stack.push((w, 0));
        } else if parent.get(&u) != Some(&w) && depth[&w] < depth[&u] {
            let mut cycle = vec![u];
            let mut x = u;
            while x != w {
                x = parent[&x];
                cycle.push(x);
            }
            return cycle;
        }
    }
    unreachable!("a block with three or more vertices contains a cycle")
}

struct Fragment {
    /// Vertices of the fragment not yet embedded (empty for a single chord).
    inner: Vec<Vertex>,
    attachments: Vec<Vertex>,
    chord: Option<(Vertex, Vertex)>,
}

fn fragments<I: Iterator<Item = Vertex>>(
    block_edges: &BTreeSet<(Vertex, Vertex)>,
    embedded_vertices: &BTreeSet<Vertex>,
    embedded_edges: &BTreeSet<(Vertex, Vertex)>,
    nbrs: &dyn Fn(Vertex) -> I,
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for &(u, v) in block_edges {
        if !embedded_edges.contains(&(u, v)) && embedded_vertices.contains(&u) && embedded_vertices.contains(&v) {
            out.push(Fragment { inner: vec![], attachments: vec![u, v], chord: Some((u, v)) });
        }
    }
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let all: BTreeSet<Vertex> = block_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    for &s in &all {
        if embedded_vertices.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut inner = vec![s];
        let mut attach = BTreeSet::new();
        seen.insert(s);
        let mut i = 0;
        while i < inner.len() {
            let u = inner[i];
            i += 1;
            for w in nbrs(u) {
                if embedded_vertices.contains(&w) {
                    attach.insert(w);
                } else if seen.insert(w) {
                    inner.push(w);
                }
            }
        }
        out.push(Fragment { inner, attachments: attach.into_iter().collect(), chord: None });
    }
    out
}

/// A path through the fragment between its two smallest attachments.
fn fragment_path<I: Iterator<Item = Vertex>>(
    frag: &Fragment,
    embedded_vertices: &BTreeSet<Vertex>,
    nbrs: &dyn Fn(Vertex) -> I,
) -> Vec<Vertex> {
    if let Some((u, v)) = frag.chord {
        return vec![u, v];
    }
    let a = frag.attachments[0];
    let b = frag.attachments[1];
    let inner: BTreeSet<Vertex> = frag.inner.iter().copied().collect();
    // BFS from a through inner vertices until a vertex adjacent to b.
    let mut prev = std::collections::BTreeMap::new();
    let mut queue = VecDeque::new();
    for w in nbrs(a) {
        if inner.contains(&w) && !prev.contains_key(&w) {
            prev.insert(w, a);
            queue.push_back(w);
        }
    }
    while let Some(u) = queue.pop_front() {
        if nbrs(u).any(|w| w == b) {
            let mut path = vec![b, u];
            let mut x = u;
            while prev[&x] != a {
                x = prev[&x];
                path.push(x);
            }
            path.push(a);
            path.reverse();
            return path;
        }
        for w in nbrs(u) {
            if inner.contains(&w) && !prev.contains_key(&w) && !embedded_vertices.contains(&w) {
                prev.insert(w, u);
                queue.push_back(w);
            }
        }
    }
    unreachable!("fragment of a biconnected block connects its attachments")
}

/// Splits the oriented face cycle by a path whose ends lie on it.
fn split_face(face: &[Vertex], path: &[Vertex]) -> (Vec<Vertex>, Vec<Vertex>) {
    let a = path[0];
    let b = *path.last().unwrap();
    let k = face.len();
    let ia = face.iter().position(|&x| x == a).unwrap();
    let rotated: Vec<Vertex> = (0..k).map(|i| face[(ia + i) % k]).collect();
    let ib = rotated.iter().position(|&x| x == b).unwrap();
    let inner = &path[1..path.len() - 1];
    let mut first: Vec<Vertex> = rotated[..=ib].to_vec();
    first.extend(inner.iter().rev());
    let mut second: Vec<Vertex> = rotated[ib..].to_vec();
    second.push(a);
    second.extend(inner.iter());
    (first, second)
}

fn kuratowski_witness(n: usize, edges: &[(Vertex, Vertex)]) -> KuratowskiWitness {
    let mut kept: Vec<(Vertex, Vertex)> = edges.to_vec();
    let mut i = 0;
    while i < kept.len() {
        let e = kept.remove(i);
        if embed_edges(n, &kept).is_some() {
            kept.insert(i, e);
            i += 1;
        }
    }
    let mut deg = vec![0usize; n];
    for &(u, v) in &kept {
        deg[u] += 1;
        deg[v] += 1;
    }
    let branch_vertices: Vec<Vertex> = (0..n).filter(|&v| deg[v] >= 3).collect();
    let kind = if branch_vertices.len() == 5 && branch_vertices.iter().all(|&v| deg[v] == 4) {
        KuratowskiKind::K5
    } else {
        KuratowskiKind::K33
    };
    KuratowskiWitness { kind, edges: kept, branch_vertices }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> GraphWithBoundary {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        GraphWithBoundary::new(n, edges, [0]).unwrap()
    }

    fn k33() -> GraphWithBoundary {
        let edges = (0..3).flat_map(|u| (3..6).map(move |v| (u, v)));
        GraphWithBoundary::new(6, edges, [0]).unwrap()
    }

    #[test]
    fn k4_is_planar_with_four_triangles() {
        let p = is_planar(&complete(4));
        let emb = p.embedding().unwrap();
        let faces = emb.faces();
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| f.len() == 3));
        assert!(emb.satisfies_euler());
    }

    #[test]
    fn k5_witness() {
        match is_planar(&complete(5)) {
            Planarity::NonPlanar(w) => {
                assert_eq!(w.kind, KuratowskiKind::K5);
                assert_eq!(w.edges.len(), 10);
            }
            _ => panic!("K5 reported planar"),
        }
    }

    #[test]
    fn k33_witness() {
        match is_planar(&k33()) {
            Planarity::NonPlanar(w) => {
                assert_eq!(w.kind, KuratowskiKind::K33);
                assert_eq!(w.edges.len(), 9);
                assert_eq!(w.branch_vertices.len(), 6);
            }
            _ => panic!("K3,3 reported planar"),
        }
    }

    #[test]
    fn petersen_is_not_planar() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = GraphWithBoundary::new(10, outer.chain(spokes).chain(inner), [0]).unwrap();
        match is_planar(&g) {
            Planarity::NonPlanar(w) => assert_eq!(w.kind, KuratowskiKind::K33),
            _ => panic!("Petersen reported planar"),
        }
    }

    #[test]
    fn trees_and_cut_vertices_embed() {
        // Two triangles sharing vertex 2, plus a pendant path.
        let g = GraphWithBoundary::new(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5), (5, 6)], [6])
            .unwrap();
        let emb = is_planar(&g).embedding().cloned().unwrap();
        assert!(emb.satisfies_euler());
        assert_eq!(emb.faces().len(), 3);
    }
}
