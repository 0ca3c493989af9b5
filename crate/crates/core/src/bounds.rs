//! Closed-form upper bounds on the first nontrivial Steklov eigenvalue.
//!
//! Each bound is evaluated in double precision from exact integer inputs and
//! compared against the computed `lambda2` with an additive tolerance of
//! [`BOUND_TOL`], which only absorbs eigensolver rounding.

use serde::Serialize;

use crate::blocks::is_block_graph;
use crate::error::{Error, Result};
use crate::graph::{diameter, GraphWithBoundary};
use crate::io::fmt_f64;
use crate::planar::is_planar;
use crate::spectrum::lambda2;

pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    PlanarDegree,
    BlockDegree,
    BlockDegreeSharp,
    BlockDiameter,
    TreeDegree,
    TreeDiameter,
}

impl BoundName {
    pub const ALL: [BoundName; 6] = [
        BoundName::PlanarDegree,
        BoundName::BlockDegree,
        BoundName::BlockDegreeSharp,
        BoundName::BlockDiameter,
        BoundName::TreeDegree,
        BoundName::TreeDiameter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::PlanarDegree => "planar_degree",
            BoundName::BlockDegree => "block_degree",
            BoundName::BlockDegreeSharp => "block_degree_sharp",
            BoundName::BlockDiameter => "block_diameter",
            BoundName::TreeDegree => "tree_degree",
            BoundName::TreeDiameter => "tree_diameter",
        }
    }
}

impl std::fmt::Display for BoundName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One bound evaluated on one graph. Inapplicable reports carry `NaN` values
/// and are never marked satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub bound_value: f64,
    pub lambda2: f64,
    pub slack: f64,
    pub applicable: bool,
    pub satisfied: bool,
}

impl BoundReport {
    fn applicable(bound_name: BoundName, bound_value: f64, lambda2: f64) -> Self {
        Self {
            bound_name,
            bound_value,
            lambda2,
            slack: bound_value - lambda2,
            applicable: true,
            satisfied: lambda2 <= bound_value + BOUND_TOL,
        }
    }

    fn inapplicable(bound_name: BoundName, lambda2: f64) -> Self {
        Self { bound_name, bound_value: f64::NAN, lambda2, slack: f64::NAN, applicable: false, satisfied: false }
    }

    /// `true` unless the bound applies and fails.
    pub fn ok(&self) -> bool {
        !self.applicable || self.satisfied
    }
}

/// `8D / b` for planar graphs.
pub fn planar_degree_bound(d: usize, b: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::TooFewBoundary { need: 2, got: b });
    }
    if d < 1 {
        return Err(Error::InvalidParameter("max degree must be at least 1".into()));
    }
    Ok(8.0 * d as f64 / b as f64)
}

/// `(coarse, sharp)` degree bounds for block graphs:
/// `B^2 (D-1) / b` and `B^2 (B-1) (D-1)^2 / ((B(D-1) - 1) b)`.
pub fn block_degree_bound(bmax: usize, d: usize, b: usize) -> Result<(f64, f64)> {
    if bmax < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("block degree bound needs B >= 2 and D >= 2, got B={bmax}, D={d}")));
    }
    if b < 2 {
        return Err(Error::TooFewBoundary { need: 2, got: b });
    }
    let (bf, df, nb) = (bmax as f64, (d - 1) as f64, b as f64);
    let coarse = bf * bf * df / nb;
    let sharp = bf * bf * (bf - 1.0) * df * df / ((bf * df - 1.0) * nb);
    Ok((coarse, sharp))
}

/// `(2L + (L-2)(B-2)) / L^2` for block graphs of diameter `L`.
pub fn block_diameter_bound(l: usize, bmax: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::DegenerateGeodesic);
    }
    if bmax < 2 {
        return Err(Error::InvalidParameter(format!("block size must be at least 2, got {bmax}")));
    }
    let (lf, bf) = (l as f64, bmax as f64);
    Ok((2.0 * lf + (lf - 2.0) * (bf - 2.0)) / (lf * lf))
}

/// Graph quantities that decide which bounds apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphClass {
    pub planar: bool,
    /// Maximum block size when the graph is a block graph.
    pub block_size: Option<usize>,
    pub max_degree: usize,
    pub diameter: usize,
    pub boundary_len: usize,
    /// Largest distance between two boundary vertices.
    pub boundary_diameter: usize,
}

impl GraphClass {
    pub fn of(g: &GraphWithBoundary) -> Result<Self> {
        let diam = diameter(g)?;
        let boundary_diameter = g
            .boundary()
            .iter()
            .map(|&x| {
                let dist = g.bfs(x);
                g.boundary().iter().filter_map(|&y| dist[y]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0);
        Ok(Self {
            planar: is_planar(g).is_planar(),
            block_size: is_block_graph(g)?,
            max_degree: g.max_degree(),
            diameter: diam,
            boundary_len: g.boundary_len(),
            boundary_diameter,
        })
    }
}

/// Evaluates every bound whose hypotheses hold for `g`.
///
/// Degree bounds for block graphs need `D >= 2` (a single edge with both ends
/// on the boundary has `lambda2 = 2` while `B^2 (D-1)/b = 0`). The diameter
/// bounds are built along a geodesic between two boundary vertices at
/// distance `L`, so they apply only when such a pair exists and `L >= 2`.
pub fn evaluate_all(g: &GraphWithBoundary) -> Result<Vec<BoundReport>> {
    let lam = lambda2(g)?;
    let class = GraphClass::of(g)?;
    Ok(evaluate_with(&class, lam))
}

pub fn evaluate_with(class: &GraphClass, lam: f64) -> Vec<BoundReport> {
    let (d, b, l) = (class.max_degree, class.boundary_len, class.diameter);
    let diameter_ok = l >= 2 && class.boundary_diameter == l;
    BoundName::ALL
        .iter()
        .map(|&name| {
            let value = match (name, class.block_size) {
                (BoundName::PlanarDegree, _) if class.planar => planar_degree_bound(d, b).ok(),
                (BoundName::BlockDegree, Some(bs)) if d >= 2 => block_degree_bound(bs, d, b).ok().map(|x| x.0),
                (BoundName::BlockDegreeSharp, Some(bs)) if d >= 2 => block_degree_bound(bs, d, b).ok().map(|x| x.1),
                (BoundName::BlockDiameter, Some(bs)) if diameter_ok => block_diameter_bound(l, bs).ok(),
                (BoundName::TreeDegree, Some(2)) if d >= 2 => block_degree_bound(2, d, b).ok().map(|x| x.0),
                (BoundName::TreeDiameter, Some(2)) if diameter_ok => Some(2.0 / l as f64),
                _ => None,
            };
            match value {
                Some(v) => BoundReport::applicable(name, v, lam),
                None => BoundReport::inapplicable(name, lam),
            }
        })
        .collect()
}

/// CSV with header `bound_name,applicable,bound_value,lambda2,slack,satisfied`.
pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut s = String::from("bound_name,applicable,bound_value,lambda2,slack,satisfied\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.bound_name,
            r.applicable,
            fmt_f64(r.bound_value),
            fmt_f64(r.lambda2),
            fmt_f64(r.slack),
            r.satisfied
        ));
    }
    s
}
