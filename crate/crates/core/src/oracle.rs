//! Independent reference computations used to cross-check the main paths.
//!
//! Nothing here shares code with [`crate::spectrum`] or [`crate::explorer`]:
//! the DtN matrix is rebuilt one column at a time from harmonic extensions of
//! boundary indicators (Gaussian elimination with partial pivoting), its
//! eigenvalues come from cyclic Jacobi rotations, and irreducible trees are
//! enumerated from Prüfer sequences with a min-over-roots canonical form.

use std::collections::BTreeSet;

use crate::graph::GraphWithBoundary;

/// LU factorization with partial pivoting of a dense row-major matrix.
struct Lu {
    n: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl Lu {
    fn new(n: usize, mut a: Vec<f64>) -> Option<Self> {
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
            if a[p * n + k].abs() < 1e-300 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(Self { n, a, piv })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

/// DtN matrix (row-major, boundary order) assembled column by column: column
/// `y` is the normal derivative of the harmonic extension of the indicator of
/// boundary vertex `y`.
pub fn dtn_by_indicators(g: &GraphWithBoundary) -> Option<Vec<Vec<f64>>> {
    let interior = g.interior();
    let m = interior.len();
    let mut slot = vec![usize::MAX; g.n()];
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }
    let lu = if m > 0 {
        let mut a = vec![0.0; m * m];
        for (i, &v) in interior.iter().enumerate() {
            a[i * m + i] = g.degree(v) as f64;
            for &w in g.neighbors(v) {
                if slot[w] != usize::MAX {
                    a[i * m + slot[w]] = -1.0;
                }
            }
        }
        Some(Lu::new(m, a)?)
    } else {
        None
    };

    let bnd = g.boundary();
    let nb = bnd.len();
    let mut dtn = vec![vec![0.0; nb]; nb];
    for (col, &y) in bnd.iter().enumerate() {
        let mut f = vec![0.0; g.n()];
        f[y] = 1.0;
        if let Some(lu) = &lu {
            let rhs: Vec<f64> = interior
                .iter()
                .map(|&v| g.neighbors(v).iter().filter(|&&w| w == y).count() as f64)
                .collect();
            for (i, x) in lu.solve(&rhs).into_iter().enumerate() {
                f[interior[i]] = x;
            }
        }
        for (row, &x) in bnd.iter().enumerate() {
            dtn[row][col] = g.neighbors(x).iter().map(|&z| f[x] - f[z]).sum();
        }
    }
    Some(dtn)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (matrix[i][j] + matrix[j][i])).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1.0);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Steklov eigenvalues via the indicator-extension DtN and Jacobi.
pub fn steklov_eigenvalues(g: &GraphWithBoundary) -> Option<Vec<f64>> {
    dtn_by_indicators(g).map(|d| jacobi_eigenvalues(&d))
}

/// Canonical form of a tree given by adjacency lists: the lexicographically
/// smallest rooted parenthesis code over all choices of root.
pub fn tree_code_min_over_roots(adj: &[Vec<usize>]) -> String {
    fn rooted(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted(adj, w, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    (0..adj.len()).map(|r| rooted(adj, r, usize::MAX)).min().unwrap_or_default()
}

/// Decodes a Prüfer sequence over `0..n` into an edge list.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn all_sequences(len: usize, base: usize, mut visit: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; len];
    loop {
        visit(&seq);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            seq[i] += 1;
            if seq[i] < base {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Canonical codes of all trees with exactly `leaves` leaves, maximum degree at
/// most `max_degree` and no vertex of degree two, by decoding every Prüfer
/// sequence on `n` labelled vertices for `n <= 2 * leaves - 2`.
///
/// Exponential (`n^(n-2)` sequences); practical for `leaves <= 5`.
pub fn irreducible_trees_full_prufer(leaves: usize, max_degree: usize) -> BTreeSet<String> {
    let mut codes = BTreeSet::new();
    if leaves == 2 {
        codes.insert(tree_code_min_over_roots(&adjacency(2, &[(0, 1)])));
        return codes;
    }
    for n in 3..=2 * leaves - 2 {
        all_sequences(n - 2, n, |seq| {
            let mut degree = vec![1usize; n];
            for &s in seq {
                degree[s] += 1;
            }
            if degree.iter().filter(|&&d| d == 1).count() != leaves
                || degree.iter().any(|&d| d == 2 || d > max_degree)
            {
                return;
            }
            codes.insert(tree_code_min_over_roots(&adjacency(n, &prufer_decode(seq, n))));
        });
    }
    codes
}

/// Same class as [`irreducible_trees_full_prufer`], enumerated by decoding
/// Prüfer sequences of the internal skeleton only (`k <= leaves - 2` labelled
/// internal vertices) and then attaching leaf counts to each internal vertex.
pub fn irreducible_trees_skeleton_prufer(leaves: usize, max_degree: usize) -> BTreeSet<String> {
    let mut codes = BTreeSet::new();
    if leaves == 2 {
        codes.insert(tree_code_min_over_roots(&adjacency(2, &[(0, 1)])));
        return codes;
    }
    for k in 1..=leaves - 2 {
        let skeletons: Vec<Vec<(usize, usize)>> = match k {
            1 => vec![vec![]],
            2 => vec![vec![(0, 1)]],
            _ => {
                let mut out = Vec::new();
                all_sequences(k - 2, k, |seq| out.push(prufer_decode(seq, k)));
                out
            }
        };
        for skel in skeletons {
            let mut deg = vec![0usize; k];
            for &(u, v) in &skel {
                deg[u] += 1;
                deg[v] += 1;
            }
            if deg.iter().any(|&d| d > max_degree) {
                continue;
            }
            let lo: Vec<usize> = deg.iter().map(|&d| 3usize.saturating_sub(d)).collect();
            let hi: Vec<usize> = deg.iter().map(|&d| max_degree - d).collect();
            let mut counts = lo.clone();
            'outer: loop {
                if counts.iter().sum::<usize>() == leaves && lo.iter().zip(&hi).all(|(l, h)| l <= h) {
                    let mut edges = skel.clone();
                    let mut next = k;
                    for (v, &c) in counts.iter().enumerate() {
                        for _ in 0..c {
                            edges.push((v, next));
                            next += 1;
                        }
                    }
                    codes.insert(tree_code_min_over_roots(&adjacency(next, &edges)));
                }
                let mut i = 0;
                loop {
                    if i == k {
                        break 'outer;
                    }
                    if counts[i] < hi[i] {
                        counts[i] += 1;
                        break;
                    }
                    counts[i] = lo[i];
                    i += 1;
                }
            }
        }
    }
    codes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves() {
        let lu = Lu::new(2, vec![0.0, 2.0, 1.0, 1.0]).unwrap();
        let x = lu.solve(&[4.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_known_spectrum() {
        let m = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]];
        let ev = jacobi_eigenvalues(&m);
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn prufer_round_trip_shape() {
        let edges = prufer_decode(&[3, 3, 3], 5);
        assert_eq!(edges.len(), 4);
        assert!(edges.iter().all(|&(u, v)| u == 3 || v == 3));
    }

    #[test]
    fn both_prufer_oracles_agree() {
        for leaves in 2..=5 {
            for d in 3..=5 {
                assert_eq!(irreducible_trees_full_prufer(leaves, d), irreducible_trees_skeleton_prufer(leaves, d));
            }
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(irreducible_trees_full_prufer(3, 3).len(), 1);
        // With D = 3 the only four-leaf irreducible tree is the "H".
        assert_eq!(irreducible_trees_full_prufer(4, 3).len(), 1);
        assert_eq!(irreducible_trees_full_prufer(4, 4).len(), 2);
    }
}
