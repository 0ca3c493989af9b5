//! Block (biconnected component) decomposition and the block-graph test.

use crate::error::{Error, Result};
use crate::graph::{GraphWithBoundary, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Vertex sets of the blocks, each sorted; blocks ordered by smallest vertex.
    pub blocks: Vec<Vec<Vertex>>,
    pub cut_vertices: Vec<Vertex>,
    /// Edges of the block-cut tree as (block index, cut vertex).
    pub block_cut_tree: Vec<(usize, Vertex)>,
}

impl BlockDecomposition {
    /// Maximum block size `B`.
    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Indices of the blocks containing `v`.
    pub fn blocks_at(&self, v: Vertex) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].binary_search(&v).is_ok()).collect()
    }

    /// Index of the block containing the edge `(u, v)`.
    pub fn block_of_edge(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok())
    }
}

/// Lowpoint DFS over the edges of a connected graph.
pub fn blocks(g: &GraphWithBoundary) -> Result<BlockDecomposition> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if g.edge_count() == 0 {
        return Ok(BlockDecomposition {
            blocks: (0..n).map(|v| vec![v]).collect(),
            cut_vertices: vec![],
            block_cut_tree: vec![],
        });
    }

    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut raw_blocks: Vec<Vec<Vertex>> = Vec::new();

    // Frames: (vertex, parent, next neighbour index).
    let mut stack: Vec<(Vertex, Option<Vertex>, usize)> = vec![(0, None, 0)];
    disc[0] = time;
    low[0] = time;
    time += 1;
    while let Some(frame) = stack.last_mut() {
        let (u, parent, idx) = *frame;
        if idx < g.degree(u) {
            frame.2 += 1;
            let w = g.neighbors(u)[idx];
            if disc[w] == usize::MAX {
                edge_stack.push((u, w));
                disc[w] = time;
                low[w] = time;
                time += 1;
                stack.push((w, Some(u), 0));
            } else if Some(w) != parent && disc[w] < disc[u] {
                edge_stack.push((u, w));
                low[u] = low[u].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(p) = parent {
                low[p] = low[p].min(low[u]);
                if low[u] >= disc[p] {
                    let mut verts = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        verts.push(e.0);
                        verts.push(e.1);
                        if e == (p, u) {
                            break;
                        }
                    }
                    verts.sort_unstable();
                    verts.dedup();
                    raw_blocks.push(verts);
                }
            }
        }
    }
    raw_blocks.sort();

    let mut membership = vec![0usize; n];
    for b in &raw_blocks {
        for &v in b {
            membership[v] += 1;
        }
    }
    let cut_vertices: Vec<Vertex> = (0..n).filter(|&v| membership[v] > 1).collect();
    let mut block_cut_tree = Vec::new();
    for (i, b) in raw_blocks.iter().enumerate() {
        for &v in b {
            if membership[v] > 1 {
                block_cut_tree.push((i, v));
            }
        }
    }
    Ok(BlockDecomposition { blocks: raw_blocks, cut_vertices, block_cut_tree })
}

/// Returns `Some(B)` when every block induces a complete graph.
pub fn is_block_graph(g: &GraphWithBoundary) -> Result<Option<usize>> {
    let dec = blocks(g)?;
    let complete = dec.blocks.iter().all(|b| {
        b.iter().enumerate().all(|(i, &u)| b[i + 1..].iter().all(|&v| g.has_edge(u, v)))
    });
    Ok(complete.then(|| dec.max_block_size()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_blocks_are_edges() {
        let g = GraphWithBoundary::with_leaf_boundary(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let d = blocks(&g).unwrap();
        assert_eq!(d.blocks.len(), 5);
        assert!(d.blocks.iter().all(|b| b.len() == 2));
        assert_eq!(d.cut_vertices, vec![1, 3]);
        assert_eq!(is_block_graph(&g).unwrap(), Some(2));
    }

    #[test]
    fn bowtie() {
        let g = GraphWithBoundary::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)], [0]).unwrap();
        let d = blocks(&g).unwrap();
        assert_eq!(d.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(d.cut_vertices, vec![2]);
        assert_eq!(d.block_cut_tree, vec![(0, 2), (1, 2)]);
        assert_eq!(is_block_graph(&g).unwrap(), Some(3));
    }

    #[test]
    fn four_cycle_is_not_a_block_graph() {
        let g = GraphWithBoundary::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [0]).unwrap();
        assert_eq!(blocks(&g).unwrap().blocks.len(), 1);
        assert_eq!(is_block_graph(&g).unwrap(), None);
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = GraphWithBoundary::new(4, [(0, 1), (2, 3)], [0]).unwrap();
        assert_eq!(blocks(&g), Err(Error::Disconnected));
    }
}
