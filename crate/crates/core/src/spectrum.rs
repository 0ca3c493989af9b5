//! Harmonic extension, the Dirichlet-to-Neumann matrix and Steklov spectra.
//!
//! With the Laplacian split into boundary (`B`) and interior (`I`) blocks,
//! the DtN matrix is the Schur complement
//!
//! ```text
//! L_BB - L_BI L_II^{-1} L_IB
//! ```
//!
//! `L_II` is positive definite whenever every component of the graph meets
//! the boundary, so it is factored once by Cholesky. Boundary-boundary edges
//! sit in `L_BB`; with no interior vertices the DtN matrix is the Laplacian.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{GraphWithBoundary, Vertex};
use crate::io::fmt_f64;
use crate::rng::Rng;

/// A real value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    pub values: Vec<f64>,
}

impl HarmonicField {
    /// Largest `|deg(x) f(x) - sum f(y)|` over interior vertices.
    pub fn interior_residual(&self, g: &GraphWithBoundary) -> f64 {
        laplacian_apply(g, &self.values)
            .iter()
            .enumerate()
            .filter(|&(v, _)| !g.is_boundary(v))
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix {
    /// Row/column order: the graph's boundary vertices in increasing order.
    pub boundary: Vec<Vertex>,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteklovSpectrum {
    pub boundary: Vec<Vertex>,
    /// Nondecreasing; exactly one per boundary vertex.
    pub eigenvalues: Vec<f64>,
    /// Harmonic extensions of orthonormal DtN eigenvectors.
    pub eigenfields: Vec<HarmonicField>,
}

impl SteklovSpectrum {
    pub fn lambda(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    /// Largest violation of `df/dn = lambda f` on the boundary and of
    /// harmonicity in the interior, over all eigenpairs.
    pub fn max_residual(&self, g: &GraphWithBoundary) -> f64 {
        let mut worst: f64 = 0.0;
        for (lambda, field) in self.eigenvalues.iter().zip(&self.eigenfields) {
            let lf = laplacian_apply(g, &field.values);
            for (v, r) in lf.iter().enumerate() {
                let target = if g.is_boundary(v) { lambda * field.values[v] } else { 0.0 };
                worst = worst.max((r - target).abs());
            }
        }
        worst
    }

    /// CSV with header `index,eigenvalue` and, optionally, one column per
    /// vertex holding the eigenfield. Indices start at 1.
    pub fn to_csv(&self, with_fields: bool) -> String {
        let mut s = String::from("index,eigenvalue");
        let n = self.eigenfields.first().map_or(0, |f| f.values.len());
        if with_fields {
            for v in 0..n {
                s.push_str(&format!(",f{v}"));
            }
        }
        s.push('\n');
        for (k, (lambda, field)) in self.eigenvalues.iter().zip(&self.eigenfields).enumerate() {
            s.push_str(&format!("{},{}", k + 1, fmt_f64(*lambda)));
            if with_fields {
                for x in &field.values {
                    s.push(',');
                    s.push_str(&fmt_f64(*x));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Dense combinatorial Laplacian `D - A`.
pub fn laplacian(g: &GraphWithBoundary) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    l
}

/// `(L f)(x) = sum over neighbours y of f(x) - f(y)`.
pub fn laplacian_apply(g: &GraphWithBoundary, f: &[f64]) -> Vec<f64> {
    (0..g.n()).map(|x| g.neighbors(x).iter().map(|&y| f[x] - f[y]).sum()).collect()
}

/// Outward normal derivative on the boundary, in boundary order. For a
/// harmonic field this is the DtN image of its boundary values.
pub fn normal_derivative(g: &GraphWithBoundary, f: &[f64]) -> Vec<f64> {
    g.boundary().iter().map(|&x| g.neighbors(x).iter().map(|&y| f[x] - f[y]).sum()).collect()
}

/// Factored interior block of the Laplacian.
struct InteriorSolver {
    interior: Vec<Vertex>,
    chol: Option<Cholesky<f64, Dyn>>,
}

impl InteriorSolver {
    fn new(g: &GraphWithBoundary) -> Result<Self> {
        if g.components().iter().any(|c| c.iter().all(|&v| !g.is_boundary(v))) {
            return Err(Error::NoUniqueExtension);
        }
        let interior = g.interior();
        let mut slot = vec![usize::MAX; g.n()];
        for (i, &v) in interior.iter().enumerate() {
            slot[v] = i;
        }
        let m = interior.len();
        let chol = if m == 0 {
            None
        } else {
            let mut a = DMatrix::zeros(m, m);
            for (i, &v) in interior.iter().enumerate() {
                a[(i, i)] = g.degree(v) as f64;
                for &w in g.neighbors(v) {
                    if slot[w] != usize::MAX {
                        a[(i, slot[w])] = -1.0;
                    }
                }
            }
            Some(Cholesky::new(a).ok_or_else(|| Error::Numerical("interior Laplacian not positive definite".into()))?)
        };
        Ok(Self { interior, chol })
    }

    /// Interior values of the harmonic extension of `values` (indexed by vertex,
    /// only boundary entries are read).
    fn extend(&self, g: &GraphWithBoundary, values: &mut [f64]) {
        let Some(chol) = &self.chol else { return };
        let rhs = DVector::from_iterator(
            self.interior.len(),
            self.interior
                .iter()
                .map(|&v| g.neighbors(v).iter().filter(|&&w| g.is_boundary(w)).map(|&w| values[w]).sum::<f64>()),
        );
        let sol = chol.solve(&rhs);
        for (i, &v) in self.interior.iter().enumerate() {
            values[v] = sol[i];
        }
    }
}

/// The unique field equal to `boundary_values` on the boundary (in boundary
/// order) and harmonic at every interior vertex.
pub fn harmonic_extension(g: &GraphWithBoundary, boundary_values: &[f64]) -> Result<HarmonicField> {
    if boundary_values.len() != g.boundary_len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} boundary values, got {}",
            g.boundary_len(),
            boundary_values.len()
        )));
    }
    let solver = InteriorSolver::new(g)?;
    Ok(extend_with(&solver, g, boundary_values))
}

fn extend_with(solver: &InteriorSolver, g: &GraphWithBoundary, boundary_values: &[f64]) -> HarmonicField {
    let mut values = vec![0.0; g.n()];
    for (&b, &x) in g.boundary().iter().zip(boundary_values) {
        values[b] = x;
    }
    solver.extend(g, &mut values);
    HarmonicField { values }
}

pub fn dtn_matrix(g: &GraphWithBoundary) -> Result<DtnMatrix> {
    let solver = InteriorSolver::new(g)?;
    Ok(dtn_with(&solver, g))
}

fn dtn_with(solver: &InteriorSolver, g: &GraphWithBoundary) -> DtnMatrix {
    let bnd = g.boundary();
    let nb = bnd.len();
    let mut bslot = vec![usize::MAX; g.n()];
    for (i, &b) in bnd.iter().enumerate() {
        bslot[b] = i;
    }
    let mut m = DMatrix::zeros(nb, nb);
    for (i, &x) in bnd.iter().enumerate() {
        m[(i, i)] = g.degree(x) as f64;
        for &y in g.neighbors(x) {
            if bslot[y] != usize::MAX {
                m[(i, bslot[y])] -= 1.0;
            }
        }
    }
    if let Some(chol) = &solver.chol {
        let ni = solver.interior.len();
        // C = L_IB, so that the correction is C^T L_II^{-1} C.
        let mut c = DMatrix::zeros(ni, nb);
        for (i, &v) in solver.interior.iter().enumerate() {
            for &w in g.neighbors(v) {
                if bslot[w] != usize::MAX {
                    c[(i, bslot[w])] = -1.0;
                }
            }
        }
        let x = chol.solve(&c);
        m -= c.transpose() * x;
    }
    // Symmetrize away rounding asymmetry.
    let m = (&m + m.transpose()) * 0.5;
    DtnMatrix { boundary: bnd.to_vec(), matrix: m }
}

pub fn steklov_spectrum(g: &GraphWithBoundary) -> Result<SteklovSpectrum> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.boundary_len() < 2 {
        return Err(Error::TooFewBoundary { need: 2, got: g.boundary_len() });
    }
    let solver = InteriorSolver::new(g)?;
    let dtn = dtn_with(&solver, g);
    let eig = SymmetricEigen::new(dtn.matrix);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(order.len());
    let mut eigenfields = Vec::with_capacity(order.len());
    for (rank, &k) in order.iter().enumerate() {
        let mut vec: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let mut lambda = eig.eigenvalues[k];
        if rank == 0 {
            // The kernel is spanned by the constant vector; pin it exactly.
            let c = 1.0 / (vec.len() as f64).sqrt();
            let sign = if vec.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            vec.iter_mut().for_each(|x| *x = sign * c);
            lambda = 0.0;
        }
        let field = extend_with(&solver, g, &vec);
        if rank > 0 {
            // The quotient of the extended field is second-order accurate in
            // the eigenvector error.
            lambda = quotient(g, &field.values);
        }
        eigenvalues.push(lambda);
        eigenfields.push(field);
    }
    // Refinement can swap near-equal neighbours.
    let mut pairs: Vec<(f64, HarmonicField)> = eigenvalues.into_iter().zip(eigenfields).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigenvalues, eigenfields) = pairs.into_iter().unzip();
    Ok(SteklovSpectrum { boundary: g.boundary().to_vec(), eigenvalues, eigenfields })
}

pub fn lambda2(g: &GraphWithBoundary) -> Result<f64> {
    Ok(steklov_spectrum(g)?.lambda2())
}

fn quotient(g: &GraphWithBoundary, f: &[f64]) -> f64 {
    let energy: f64 = g.edges().iter().map(|&(u, v)| (f[u] - f[v]).powi(2)).sum();
    let mass: f64 = g.boundary().iter().map(|&x| f[x] * f[x]).sum();
    energy / mass
}

/// Edge energy of `f` divided by its squared mass on the boundary.
pub fn rayleigh_quotient(g: &GraphWithBoundary, f: &[f64]) -> Result<f64> {
    if f.len() != g.n() {
        return Err(Error::InvalidParameter(format!("field has {} values, graph has {} vertices", f.len(), g.n())));
    }
    let energy: f64 = g.edges().iter().map(|&(u, v)| (f[u] - f[v]).powi(2)).sum();
    let mass: f64 = g.boundary().iter().map(|&x| f[x] * f[x]).sum();
    if mass == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    Ok(energy / mass)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VariationalReport {
    pub trials: usize,
    pub lambda2: f64,
    pub min_quotient: f64,
    /// Every sampled quotient was at least `lambda2 - 1e-9`.
    pub holds: bool,
}

/// Samples random fields with zero boundary sum and checks that none has a
/// Rayleigh quotient below `lambda2`.
///
/// Each trial draws `symmetric()` for every vertex in order, then subtracts
/// the boundary mean from the boundary values.
pub fn variational_check(g: &GraphWithBoundary, trials: usize, seed: u64) -> Result<VariationalReport> {
    let lambda2 = lambda2(g)?;
    let mut rng = Rng::new(seed);
    let mut min_quotient = f64::INFINITY;
    for _ in 0..trials {
        let mut f: Vec<f64> = (0..g.n()).map(|_| rng.symmetric()).collect();
        let mean = g.boundary().iter().map(|&b| f[b]).sum::<f64>() / g.boundary_len() as f64;
        for &b in g.boundary() {
            f[b] -= mean;
        }
        if let Ok(q) = rayleigh_quotient(g, &f) {
            min_quotient = min_quotient.min(q);
        }
    }
    Ok(VariationalReport { trials, lambda2, min_quotient, holds: min_quotient >= lambda2 - 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn path(len: usize) -> GraphWithBoundary {
        GraphWithBoundary::new(len + 1, (0..len).map(|i| (i, i + 1)), [0, len]).unwrap()
    }

    fn star(q: usize) -> GraphWithBoundary {
        GraphWithBoundary::with_leaf_boundary(q + 1, (1..=q).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn path_midpoint() {
        let f = harmonic_extension(&path(2), &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(f.values[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn star_center_is_mean() {
        let f = harmonic_extension(&star(4), &[1.0, 2.0, 3.0, 6.0]).unwrap();
        assert_abs_diff_eq!(f.values[0], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn extension_needs_boundary_in_every_component() {
        let g = GraphWithBoundary::new(4, [(0, 1), (2, 3)], [0]).unwrap();
        assert_eq!(harmonic_extension(&g, &[1.0]), Err(Error::NoUniqueExtension));
    }

    #[test]
    fn k2_dtn_is_laplacian() {
        let g = GraphWithBoundary::new(2, [(0, 1)], [0, 1]).unwrap();
        let d = dtn_matrix(&g).unwrap().matrix;
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let s = steklov_spectrum(&g).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn path_dtn() {
        for len in 1..7 {
            let d = dtn_matrix(&path(len)).unwrap().matrix;
            let c = 1.0 / len as f64;
            let want = DMatrix::from_row_slice(2, 2, &[c, -c, -c, c]);
            assert!((d - want).abs().max() < 1e-12);
        }
    }

    #[test]
    fn star_dtn_and_spectrum() {
        let q = 5;
        let d = dtn_matrix(&star(q)).unwrap().matrix;
        let want = DMatrix::identity(q, q) - DMatrix::from_element(q, q, 1.0 / q as f64);
        assert!((d - want).abs().max() < 1e-12);
        let s = steklov_spectrum(&star(q)).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.0);
        for &l in &s.eigenvalues[1..] {
            assert_abs_diff_eq!(l, 1.0, epsilon = 1e-12);
        }
        assert!(s.max_residual(&star(q)) < 1e-9);
    }

    #[test]
    fn quotient_examples() {
        let g = GraphWithBoundary::new(2, [(0, 1)], [0, 1]).unwrap();
        assert_eq!(rayleigh_quotient(&g, &[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(rayleigh_quotient(&g, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(rayleigh_quotient(&path(2), &[0.0, 5.0, 0.0]), Err(Error::UndefinedQuotient));
    }

    #[test]
    fn spectrum_requires_two_boundary_vertices() {
        let g = path(3).with_boundary([0]).unwrap();
        assert_eq!(steklov_spectrum(&g).unwrap_err(), Error::TooFewBoundary { need: 2, got: 1 });
    }

    #[test]
    fn eigenfield_attains_the_minimum() {
        let g = path(4);
        let s = steklov_spectrum(&g).unwrap();
        let q = rayleigh_quotient(&g, &s.eigenfields[1].values).unwrap();
        assert_abs_diff_eq!(q, s.lambda2(), epsilon = 1e-12);
    }

    #[test]
    fn random_fields_respect_lambda2() {
        let r = variational_check(&path(4), 100, 7).unwrap();
        assert!(r.holds);
        assert!(r.min_quotient >= 0.5 - 1e-9);
    }

    #[test]
    fn csv_layout() {
        let g = GraphWithBoundary::new(2, [(0, 1)], [0, 1]).unwrap();
        let csv = steklov_spectrum(&g).unwrap().to_csv(false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,eigenvalue");
        assert_eq!(lines[1], "1,0.0");
        assert!(lines[2].starts_with("2,"));
        let with = steklov_spectrum(&g).unwrap().to_csv(true);
        assert!(with.starts_with("index,eigenvalue,f0,f1\n"));
    }
}
