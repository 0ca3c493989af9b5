//! Circle packings, spherical caps and the kissing-disk embedding chain.
//!
//! The pipeline for a planar graph with boundary:
//!
//! 1. [`triangulate`] adds chords until every face is a triangle.
//! 2. [`circle_pack`] finds radii whose angle sums are `2π` at every interior
//!    vertex (outer three radii fixed at 1) and lays the disks out.
//! 3. [`project_to_sphere`] maps each disk to a cap through stereographic
//!    projection from the pole `(1, 0, 0)` onto the plane `x = -1`.
//! 4. [`center_caps`] finds `α` in the open unit ball so that the boundary cap
//!    centers of `μ_α(caps)` sum to zero.
//! 5. [`embedding_ratio`] evaluates the Rayleigh quotient of the cap-center
//!    embedding, which lies between `lambda2` and `8D/|δΩ|`.
//!
//! Cap radii are chordal: a cap of angular radius `θ` has chordal radius
//! `c = 2 sin(θ/2)` and area exactly `π c²`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphWithBoundary, Vertex};
use crate::io::fmt_f64;
use crate::planar::{is_planar, Embedding};
use crate::spectrum::lambda2;

pub const PACKING_TOL: f64 = 1e-10;
pub const PACKING_SWEEPS: usize = 500_000;
pub const CENTERING_ITERATIONS: usize = 10_000;
const MAX_STEP: f64 = 0.5;

/// A maximal planar supergraph on the same vertices, with its embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub graph: GraphWithBoundary,
    pub embedding: Embedding,
    pub added_edges: Vec<(Vertex, Vertex)>,
}

/// Adds chords face by face until every face is a triangle.
///
/// Each round takes the first face longer than three, starts its walk at the
/// smallest vertex and adds the first chord `(w_i, w_j)` (in `i`, then `j`
/// order) whose ends are distinct and not yet adjacent.
pub fn triangulate(g: &GraphWithBoundary) -> Result<Triangulation> {
    if g.n() < 3 {
        return Err(Error::InvalidParameter(format!("triangulation needs at least 3 vertices, got {}", g.n())));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut emb = is_planar(g).embedding().cloned().ok_or(Error::NotPlanar)?;
    let mut adj: Vec<Vec<bool>> = vec![vec![false; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut added = Vec::new();
    loop {
        let faces = emb.faces();
        let Some(face) = faces.into_iter().find(|f| f.len() > 3) else { break };
        let start = (0..face.len()).min_by_key(|&i| face[i]).unwrap();
        let w: Vec<Vertex> = (0..face.len()).map(|k| face[(start + k) % face.len()]).collect();
        let k = w.len();
        let chord = (0..k)
            .flat_map(|i| (i + 2..k).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == 0 && j == k - 1))
            .find(|&(i, j)| w[i] != w[j] && !adj[w[i]][w[j]]);
        let Some((i, j)) = chord else {
            return Err(Error::Numerical(format!("no admissible chord in face {w:?}")));
        };
        let (a, b) = (w[i], w[j]);
        let (a_prev, b_prev) = (w[(i + k - 1) % k], w[j - 1]);
        insert_after(&mut emb.rotation[a], a_prev, b);
        insert_after(&mut emb.rotation[b], b_prev, a);
        adj[a][b] = true;
        adj[b][a] = true;
        added.push((a.min(b), a.max(b)));
    }
    let mut edges = g.edges().to_vec();
    edges.extend(&added);
    let graph = GraphWithBoundary::new(g.n(), edges, g.boundary().iter().copied())?;
    Ok(Triangulation { graph, embedding: emb, added_edges: added })
}

fn insert_after(rot: &mut Vec<Vertex>, anchor: Vertex, new: Vertex) {
    let i = rot.iter().position(|&x| x == anchor).expect("anchor in rotation");
    rot.insert(i + 1, new);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirclePacking {
    pub centers: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    /// Edges realized as tangencies (the triangulation's edges).
    pub tangencies: Vec<(Vertex, Vertex)>,
    pub outer_face: [Vertex; 3],
    pub sweeps: usize,
    /// Largest `|angle sum - 2π|` over interior vertices.
    pub angle_residual: f64,
}

impl CirclePacking {
    fn dist(&self, u: Vertex, v: Vertex) -> f64 {
        let (a, b) = (self.centers[u], self.centers[v]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Largest relative tangency error `|d - (r_u + r_v)| / (r_u + r_v)`.
    pub fn tangency_residual(&self) -> f64 {
        self.tangencies
            .iter()
            .map(|&(u, v)| {
                let s = self.radii[u] + self.radii[v];
                (self.dist(u, v) - s).abs() / s
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative overlap `(r_u + r_v - d) / (r_u + r_v)` over
    /// non-tangent pairs; zero when interiors are disjoint.
    pub fn overlap_residual(&self) -> f64 {
        let n = self.radii.len();
        let mut worst: f64 = 0.0;
        for u in 0..n {
            for v in u + 1..n {
                if self.tangencies.binary_search(&(u, v)).is_ok() {
                    continue;
                }
                let s = self.radii[u] + self.radii[v];
                worst = worst.max((s - self.dist(u, v)) / s);
            }
        }
        worst
    }

    /// CSV `vertex,cx,cy,r`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,cx,cy,r\n");
        for (v, (c, r)) in self.centers.iter().zip(&self.radii).enumerate() {
            s.push_str(&format!("{v},{},{},{}\n", fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(*r)));
        }
        s
    }
}

/// Angle at a circle of radius `r` in the triangle formed with tangent
/// neighbours of radii `a` and `b`.
fn corner_angle(r: f64, a: f64, b: f64) -> f64 {
    let x = (a * b / ((r + a) * (r + b))).sqrt();
    2.0 * x.min(1.0).asin()
}

/// Packs a triangulation. The outer face is the face whose sorted vertex
/// triple is lexicographically largest; its three radii stay at 1.
pub fn circle_pack(t: &Triangulation) -> Result<CirclePacking> {
    let n = t.graph.n();
    let faces = t.embedding.faces();
    if faces.iter().any(|f| f.len() != 3) {
        return Err(Error::InvalidParameter("circle packing needs a triangulation".into()));
    }
    let mut tangencies = t.graph.edges().to_vec();
    tangencies.sort_unstable();
    let sorted = |f: &Vec<Vertex>| {
        let mut s = [f[0], f[1], f[2]];
        s.sort_unstable();
        s
    };
    let outer_idx = (0..faces.len()).max_by_key(|&i| sorted(&faces[i])).unwrap();
    let outer = sorted(&faces[outer_idx]);

    if n == 3 {
        let h = 3f64.sqrt();
        let mut p = CirclePacking {
            centers: vec![[0.0, 0.0], [2.0, 0.0], [1.0, h]],
            radii: vec![1.0; 3],
            tangencies,
            outer_face: outer,
            sweeps: 0,
            angle_residual: 0.0,
        };
        normalize(&mut p);
        return Ok(p);
    }

    // Per-vertex list of opposite neighbour pairs over non-outer faces.
    let mut corners: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); n];
    for (i, f) in faces.iter().enumerate() {
        if i == outer_idx {
            continue;
        }
        for k in 0..3 {
            corners[f[k]].push((f[(k + 1) % 3], f[(k + 2) % 3]));
        }
    }
    let interior: Vec<Vertex> = (0..n).filter(|v| !outer.contains(v)).collect();
    let mut r = vec![1.0; n];
    let angle_sum = |r: &[f64], v: Vertex| corners[v].iter().map(|&(a, b)| corner_angle(r[v], r[a], r[b])).sum::<f64>();
    let residual = |r: &[f64]| interior.iter().map(|&v| (angle_sum(r, v) - 2.0 * PI).abs()).fold(0.0, f64::max);

    let mut sweeps = 0;
    let mut res = residual(&r);
    while res >= PACKING_TOL {
        if sweeps >= PACKING_SWEEPS {
            return Err(Error::NonConvergence { what: "circle packing", residual: res });
        }
        for &v in &interior {
            let k = corners[v].len() as f64;
            let theta = angle_sum(&r, v);
            let beta = (theta / (2.0 * k)).sin();
            let delta = (PI / k).sin();
            let neighbour = r[v] * beta / (1.0 - beta);
            r[v] = neighbour * (1.0 - delta) / delta;
        }
        sweeps += 1;
        if sweeps % 16 == 0 {
            res = residual(&r);
        }
    }
    res = residual(&r);

    let non_outer: Vec<&Vec<Vertex>> = faces.iter().enumerate().filter(|&(i, _)| i != outer_idx).map(|(_, f)| f).collect();
    let outer_walk = &faces[outer_idx];
    let mut best: Option<CirclePacking> = None;
    for side in [1.0, -1.0] {
        let Some(centers) = layout(n, &r, outer_walk, &non_outer, side) else { continue };
        let p = CirclePacking {
            centers,
            radii: r.clone(),
            tangencies: tangencies.clone(),
            outer_face: outer,
            sweeps,
            angle_residual: res,
        };
        if best.as_ref().map_or(true, |b| p.tangency_residual() < b.tangency_residual()) {
            best = Some(p);
        }
    }
    let mut p = best.ok_or_else(|| Error::Numerical("circle layout failed".into()))?;
    normalize(&mut p);
    Ok(p)
}

/// Places every disk: the outer face first, then each face with two placed
/// corners fixes its third. `side` selects the orientation of inner faces;
/// the outer walk has the opposite one.
fn layout(n: usize, r: &[f64], outer: &[Vertex], inner: &[&Vec<Vertex>], side: f64) -> Option<Vec<[f64; 2]>> {
    let mut pos: Vec<Option<Vector2<f64>>> = vec![None; n];
    let place = |pos: &[Option<Vector2<f64>>], x: Vertex, y: Vertex, z: Vertex, s: f64| -> Vector2<f64> {
        let (px, py) = (pos[x].unwrap(), pos[y].unwrap());
        let theta = corner_angle(r[x], r[y], r[z]) * s;
        let u = (py - px).normalize();
        let rot = Vector2::new(u.x * theta.cos() - u.y * theta.sin(), u.x * theta.sin() + u.y * theta.cos());
        px + rot * (r[x] + r[z])
    };
    let (a, b, c) = (outer[0], outer[1], outer[2]);
    pos[a] = Some(Vector2::zeros());
    pos[b] = Some(Vector2::new(r[a] + r[b], 0.0));
    pos[c] = Some(place(&pos, a, b, c, -side));
    let mut remaining = n - 3;
    while remaining > 0 {
        let mut progress = false;
        for f in inner {
            for k in 0..3 {
                let (x, y, z) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                if pos[x].is_some() && pos[y].is_some() && pos[z].is_none() {
                    pos[z] = Some(place(&pos, x, y, z, side));
                    remaining -= 1;
                    progress = true;
                }
            }
        }
        if !progress {
            return None;
        }
    }
    Some(pos.into_iter().map(|p| p.map(|v| [v.x, v.y]).unwrap()).collect())
}

/// Translates and scales so every disk lies in the unit disk around the
/// origin, the touching point of the projection plane.
fn normalize(p: &mut CirclePacking) {
    let c: Vector2<f64> = p.outer_face.iter().map(|&v| Vector2::new(p.centers[v][0], p.centers[v][1])).sum::<Vector2<f64>>() / 3.0;
    let reach = p
        .centers
        .iter()
        .zip(&p.radii)
        .map(|(x, r)| (Vector2::new(x[0], x[1]) - c).norm() + r)
        .fold(0.0, f64::max);
    for (x, r) in p.centers.iter_mut().zip(p.radii.iter_mut()) {
        *x = [(x[0] - c.x) / reach, (x[1] - c.y) / reach];
        *r /= reach;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cap {
    pub center: [f64; 3],
    /// Euclidean distance from the center to the boundary circle.
    pub chordal_radius: f64,
}

impl Cap {
    fn m(&self) -> Vector3<f64> {
        Vector3::from(self.center)
    }

    /// Whether `x` (on the sphere) lies strictly inside the cap.
    pub fn contains_strictly(&self, x: &Vector3<f64>, margin: f64) -> bool {
        (x - self.m()).norm() < self.chordal_radius - margin
    }

    /// Angular radius `θ` with `c = 2 sin(θ/2)`.
    pub fn angular_radius(&self) -> f64 {
        2.0 * (self.chordal_radius / 2.0).min(1.0).asin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapConfiguration {
    pub caps: Vec<Cap>,
    pub boundary: Vec<Vertex>,
}

impl CapConfiguration {
    /// `Σ π c²`, the total cap area.
    pub fn area_sum(&self) -> f64 {
        self.caps.iter().map(|c| PI * c.chordal_radius * c.chordal_radius).sum()
    }

    /// Largest `‖m_x - m_y‖ - (c_x + c_y)` over the given edges, floored at 0.
    pub fn tangency_excess(&self, edges: &[(Vertex, Vertex)]) -> f64 {
        edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (&self.caps[u], &self.caps[v]);
                (a.m() - b.m()).norm() - (a.chordal_radius + b.chordal_radius)
            })
            .fold(0.0, f64::max)
    }

    /// `‖Σ_{x ∈ δΩ} m(C_x)‖`.
    pub fn centering_residual(&self) -> f64 {
        boundary_sum(&self.caps, &self.boundary).norm()
    }

    pub fn max_center_norm_error(&self) -> f64 {
        self.caps.iter().map(|c| (c.m().norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// CSV `vertex,mx,my,mz,c`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,mx,my,mz,c\n");
        for (v, c) in self.caps.iter().enumerate() {
            s.push_str(&format!(
                "{v},{},{},{},{}\n",
                fmt_f64(c.center[0]),
                fmt_f64(c.center[1]),
                fmt_f64(c.center[2]),
                fmt_f64(c.chordal_radius)
            ));
        }
        s
    }
}

fn boundary_sum(caps: &[Cap], boundary: &[Vertex]) -> Vector3<f64> {
    boundary.iter().map(|&x| caps[x].m()).sum()
}

/// Stereographic projection of the plane `x = -1` (coordinates `(y, z)`) to
/// the unit sphere from the pole `(1, 0, 0)`.
pub fn stereographic(p: [f64; 2]) -> Vector3<f64> {
    let s = 4.0 / (4.0 + p[0] * p[0] + p[1] * p[1]);
    Vector3::new(1.0 - 2.0 * s, s * p[0], s * p[1])
}

/// Cap bounded by the circle through the diametrically opposite points
/// `p1`, `p2` (and `third`, used only when the circle is nearly a great
/// circle). `witness` is a point known to lie inside the cap when
/// `witness_inside`, outside otherwise.
fn cap_through(p1: Vector3<f64>, p2: Vector3<f64>, third: Vector3<f64>, witness: Vector3<f64>, witness_inside: bool) -> Cap {
    let q = (p1 + p2) / 2.0;
    let (normal, offset) = if q.norm() > 1e-8 {
        (q.normalize(), q.norm())
    } else {
        let n = (p2 - p1).cross(&(third - p1)).normalize();
        (n, n.dot(&p1))
    };
    let on_normal_side = witness.dot(&normal) >= offset;
    let m = if on_normal_side == witness_inside { normal } else { -normal };
    Cap { center: m.into(), chordal_radius: (m - p1).norm() }
}

/// Maps every disk to its spherical cap. The cap center is the spherical
/// center of the image circle, not the image of the planar center.
///
/// Disks must lie in the unit disk around the origin (as [`circle_pack`]
/// leaves them), which keeps every cap well away from the pole.
pub fn project_to_sphere(p: &CirclePacking, boundary: &[Vertex]) -> Result<CapConfiguration> {
    let mut caps = Vec::with_capacity(p.radii.len());
    for (c, &rho) in p.centers.iter().zip(&p.radii) {
        let norm = c[0].hypot(c[1]);
        if norm + rho > 1.0 + 1e-9 {
            return Err(Error::PoleInDisk);
        }
        let u = if norm > 0.0 { [c[0] / norm, c[1] / norm] } else { [1.0, 0.0] };
        let p1 = stereographic([c[0] - rho * u[0], c[1] - rho * u[1]]);
        let p2 = stereographic([c[0] + rho * u[0], c[1] + rho * u[1]]);
        let p3 = stereographic([c[0] - rho * u[1], c[1] + rho * u[0]]);
        // The pole is the image of infinity, which no disk contains.
        caps.push(cap_through(p1, p2, p3, Vector3::x(), false));
    }
    Ok(CapConfiguration { caps, boundary: boundary.to_vec() })
}

/// `μ_α` as a Lorentz boost along `α̂`. Dilating the tangent plane at `α̂`
/// by `k` about `α̂` (projecting from `-α̂`) is the boost of rapidity `-ln k`.
#[derive(Debug, Clone, Copy)]
struct Boost {
    axis: Vector3<f64>,
    cosh: f64,
    sinh: f64,
}

impl Boost {
    /// `k` is the dilation factor `1 - ‖α‖`, passed separately so callers can
    /// compute it without cancellation.
    fn new(axis: Vector3<f64>, k: f64) -> Self {
        Self { axis, cosh: 0.5 * (1.0 / k + k), sinh: 0.5 * (1.0 / k - k) }
    }

    fn from_alpha(alpha: &Vector3<f64>) -> Option<Self> {
        let a = alpha.norm();
        (a > 0.0).then(|| Self::new(alpha / a, 1.0 - a))
    }

    fn point(&self, z: &Vector3<f64>) -> Vector3<f64> {
        let par = z.dot(&self.axis);
        let perp = z - self.axis * par;
        let x = (perp + self.axis * (self.sinh + self.cosh * par)) / (self.cosh + self.sinh * par);
        x.normalize()
    }

    /// A cap `{x : x·m >= cos θ}` is the spacelike vector `(m, cos θ)/sin θ`,
    /// which the boost moves linearly. No boundary points are sampled, so
    /// caps passing close to the fixed pole stay well conditioned.
    fn cap(&self, cap: &Cap) -> Cap {
        let theta = cap.angular_radius();
        let (st, ct) = theta.sin_cos();
        let v = cap.m() / st;
        let s = ct / st;
        let par = v.dot(&self.axis);
        let s2 = self.cosh * s + self.sinh * par;
        let par2 = self.sinh * s + self.cosh * par;
        let v2 = v + self.axis * (par2 - par);
        let theta2 = 1.0f64.atan2(s2);
        Cap { center: v2.normalize().into(), chordal_radius: 2.0 * (theta2 / 2.0).sin() }
    }
}

/// The sphere map `μ_α` applied to one point: project from `-α̂` to the
/// plane tangent at `α̂`, dilate about `α̂` by `1 - ‖α‖`, project back.
pub fn mu_alpha_point(alpha: &Vector3<f64>, z: &Vector3<f64>) -> Vector3<f64> {
    match Boost::from_alpha(alpha) {
        Some(boost) => boost.point(z),
        None => *z,
    }
}

pub fn mu_alpha(caps: &CapConfiguration, alpha: [f64; 3]) -> Result<CapConfiguration> {
    let alpha = Vector3::from(alpha);
    if alpha.norm() >= 1.0 {
        return Err(Error::InvalidParameter(format!("‖α‖ = {} must be below 1", alpha.norm())));
    }
    let Some(boost) = Boost::from_alpha(&alpha) else {
        return Ok(caps.clone());
    };
    Ok(apply_boost(caps, &boost))
}

fn apply_boost(caps: &CapConfiguration, boost: &Boost) -> CapConfiguration {
    CapConfiguration { caps: caps.caps.iter().map(|c| boost.cap(c)).collect(), boundary: caps.boundary.clone() }
}

/// Rejects configurations where a sample point lies strictly inside more
/// than half of the boundary caps. Samples are the boundary cap centers and
/// the normalized midpoints of pairs of them.
pub fn check_well_behaved(caps: &CapConfiguration) -> Result<()> {
    let b = caps.boundary.len();
    // Two boundary caps that touch can only be centered in the limit ‖α‖ → 1:
    // antipodal tangent caps would have to be complementary.
    if let [x, y] = caps.boundary[..] {
        let (cx, cy) = (&caps.caps[x], &caps.caps[y]);
        let gap = cx.m().angle(&cy.m()) - cx.angular_radius() - cy.angular_radius();
        if gap <= 1e-9 {
            return Err(Error::NotWellBehaved { depth: 2, count: 2 });
        }
    }
    let centers: Vec<Vector3<f64>> = caps.boundary.iter().map(|&x| caps.caps[x].m()).collect();
    let mut samples = centers.clone();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let mid = centers[i] + centers[j];
            if mid.norm() > 1e-12 {
                samples.push(mid.normalize());
            }
        }
    }
    for s in &samples {
        let count = caps.boundary.iter().filter(|&&x| caps.caps[x].contains_strictly(s, 1e-12)).count();
        if 2 * count > b {
            return Err(Error::NotWellBehaved { depth: count, count: b });
        }
    }
    Ok(())
}

fn alpha_of(w: &Vector3<f64>) -> Vector3<f64> {
    let n = w.norm();
    if n == 0.0 {
        Vector3::zeros()
    } else {
        w * (n.tanh() / n)
    }
}

/// The boost for `α = alpha_of(w)`, with `1 - tanh r` evaluated directly.
fn boost_of(w: &Vector3<f64>) -> Option<Boost> {
    let r = w.norm();
    if r == 0.0 {
        return None;
    }
    let e = (-2.0 * r).exp();
    Some(Boost::new(w / r, 2.0 * e / (1.0 + e)))
}

fn centered_sum(caps: &[Cap], boundary: &[Vertex], w: &Vector3<f64>) -> Vector3<f64> {
    match boost_of(w) {
        Some(boost) => boundary.iter().map(|&x| boost.cap(&caps[x]).m()).sum(),
        None => boundary_sum(caps, boundary),
    }
}

/// Result of [`center_caps`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Centering {
    pub alpha: [f64; 3],
    pub residual: f64,
    pub iterations: usize,
    pub caps: CapConfiguration,
}

/// Finds `α` with `Σ_{x ∈ δΩ} m(μ_α(C_x)) = 0` to within `1e-6 |δΩ|`.
///
/// Levenberg–Marquardt on `w ∈ R³` with `α = tanh(‖w‖) w/‖w‖`, which keeps
/// `α` inside the open ball. The Jacobian is taken by central differences.
pub fn center_caps(caps: &CapConfiguration) -> Result<Centering> {
    let b = caps.boundary.len();
    if b < 2 {
        return Err(Error::TooFewBoundary { need: 2, got: b });
    }
    check_well_behaved(caps)?;
    let tol = 1e-6 * b as f64;
    let target = tol * 1e-3;
    let f = |w: &Vector3<f64>| centered_sum(&caps.caps, &caps.boundary, w);
    let mut w = Vector3::zeros();
    let mut fw = f(&w);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while fw.norm() > target && iterations < CENTERING_ITERATIONS {
        iterations += 1;
        let h = 1e-6 * w.norm().max(1.0);
        let mut j = Matrix3::zeros();
        for k in 0..3 {
            let mut dw = Vector3::zeros();
            dw[k] = h;
            j.set_column(k, &((f(&(w + dw)) - f(&(w - dw))) / (2.0 * h)));
        }
        let jtj = j.transpose() * j;
        let g = j.transpose() * fw;
        let mut accepted = false;
        for _ in 0..40 {
            let damped = jtj + Matrix3::from_diagonal(&(jtj.diagonal() * lambda)) + Matrix3::identity() * (lambda * 1e-12);
            let Some(step) = damped.lu().solve(&(-g)) else {
                lambda *= 4.0;
                continue;
            };
            // Trust region: w is a rapidity, so a unit step already changes
            // the dilation factor by a factor of about e^2.
            let step = if step.norm() > MAX_STEP { step * (MAX_STEP / step.norm()) } else { step };
            let trial = w + step;
            let ft = f(&trial);
            if ft.norm() < fw.norm() {
                w = trial;
                fw = ft;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let alpha = alpha_of(&w);
    let centered = match boost_of(&w) {
        Some(boost) => apply_boost(caps, &boost),
        None => caps.clone(),
    };
    let residual = centered.centering_residual();
    if residual > tol {
        return Err(Error::NonConvergence { what: "cap centering", residual });
    }
    Ok(Centering { alpha: alpha.into(), residual, iterations, caps: centered })
}

/// `Σ_{(x,y) ∈ E} ‖v_x - v_y‖² / Σ_{x ∈ δΩ} ‖v_x‖²` with `v_x = m(C_x)`.
pub fn embedding_ratio(centered: &CapConfiguration, g: &GraphWithBoundary) -> Result<f64> {
    let residual = centered.centering_residual();
    if residual > 1e-6 * g.boundary_len() as f64 {
        return Err(Error::NonConvergence { what: "cap centering", residual });
    }
    let m: Vec<Vector3<f64>> = centered.caps.iter().map(Cap::m).collect();
    let energy: f64 = g.edges().iter().map(|&(u, v)| (m[u] - m[v]).norm_squared()).sum();
    let mass: f64 = g.boundary().iter().map(|&x| m[x].norm_squared()).sum();
    Ok(energy / mass)
}

/// Every quantity of the inequality chain
/// `lambda2 <= ratio <= 8D/|δΩ|` for one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCertificate {
    pub n: usize,
    pub boundary_len: usize,
    pub max_degree: usize,
    pub lambda2: f64,
    pub embedding_ratio: f64,
    pub planar_bound: f64,
    pub packing_tangency_residual: f64,
    pub packing_overlap_residual: f64,
    pub packing_angle_residual: f64,
    pub cap_tangency_excess: f64,
    pub cap_area_sum: f64,
    pub centering_residual: f64,
    pub alpha: [f64; 3],
    pub chain_holds: bool,
}

impl ChainCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }
}

/// All intermediate products of the embedding pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingChain {
    pub triangulation: Triangulation,
    pub packing: CirclePacking,
    pub caps: CapConfiguration,
    pub centering: Centering,
    pub certificate: ChainCertificate,
}

pub fn embedding_chain(g: &GraphWithBoundary) -> Result<EmbeddingChain> {
    let lam = lambda2(g)?;
    let triangulation = triangulate(g)?;
    let packing = circle_pack(&triangulation)?;
    let caps = project_to_sphere(&packing, g.boundary())?;
    let centering = center_caps(&caps)?;
    let ratio = embedding_ratio(&centering.caps, g)?;
    let bound = 8.0 * g.max_degree() as f64 / g.boundary_len() as f64;
    let certificate = ChainCertificate {
        n: g.n(),
        boundary_len: g.boundary_len(),
        max_degree: g.max_degree(),
        lambda2: lam,
        embedding_ratio: ratio,
        planar_bound: bound,
        packing_tangency_residual: packing.tangency_residual(),
        packing_overlap_residual: packing.overlap_residual(),
        packing_angle_residual: packing.angle_residual,
        cap_tangency_excess: centering.caps.tangency_excess(&packing.tangencies),
        cap_area_sum: centering.caps.area_sum(),
        centering_residual: centering.residual,
        alpha: centering.alpha,
        chain_holds: lam <= ratio + 1e-6 && ratio <= bound + 1e-6,
    };
    Ok(EmbeddingChain { triangulation, packing, caps, centering, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{barbell, random_planar};

    fn k4() -> GraphWithBoundary {
        GraphWithBoundary::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [0, 1]).unwrap()
    }

    #[test]
    fn triangulate_small_graphs() {
        let t = triangulate(&k4()).unwrap();
        assert!(t.added_edges.is_empty());
        let c4 = GraphWithBoundary::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [0]).unwrap();
        assert_eq!(triangulate(&c4).unwrap().added_edges.len(), 2);
        let path = GraphWithBoundary::with_leaf_boundary(6, (0..5).map(|i| (i, i + 1))).unwrap();
        let t = triangulate(&path).unwrap();
        assert_eq!(t.graph.edge_count(), 3 * 6 - 6);
        assert!(t.embedding.faces().iter().all(|f| f.len() == 3));
        assert!(t.embedding.satisfies_euler());
    }

    #[test]
    fn pack_k4_and_octahedron() {
        let p = circle_pack(&triangulate(&k4()).unwrap()).unwrap();
        assert!(p.tangency_residual() < 1e-8);
        assert!(p.overlap_residual() <= 1e-8);
        let oct = GraphWithBoundary::new(
            6,
            [(0, 1), (0, 2), (0, 3), (0, 4), (5, 1), (5, 2), (5, 3), (5, 4), (1, 2), (2, 3), (3, 4), (1, 4)],
            [0, 5],
        )
        .unwrap();
        let p = circle_pack(&triangulate(&oct).unwrap()).unwrap();
        assert!(p.tangency_residual() < 1e-8, "{}", p.tangency_residual());
        assert!(p.overlap_residual() <= 1e-8);
        let again = circle_pack(&triangulate(&oct).unwrap()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn projection_basics() {
        assert!((stereographic([0.0, 0.0]) - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        let far = stereographic([1e9, 0.0]);
        assert!((far - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-8);
        let p = CirclePacking {
            centers: vec![[0.0, 0.0]],
            radii: vec![0.5],
            tangencies: vec![],
            outer_face: [0, 0, 0],
            sweeps: 0,
            angle_residual: 0.0,
        };
        let caps = project_to_sphere(&p, &[]).unwrap();
        let m = caps.caps[0].m();
        assert!((m - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn chordal_radius_identity() {
        for k in 1..50 {
            let theta = k as f64 * PI / 50.0;
            let c = 2.0 * (theta / 2.0).sin();
            assert!((2.0 * PI * (1.0 - theta.cos()) - PI * c * c).abs() < 1e-12);
            let cap = Cap { center: [0.0, 0.0, 1.0], chordal_radius: c };
            assert!((cap.angular_radius() - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_alpha_preserves_circles() {
        let alpha = Vector3::new(0.3, -0.5, 0.2);
        let cap = Cap { center: Vector3::new(0.2, 0.9, -0.3).normalize().into(), chordal_radius: 0.4 };
        let m = cap.m();
        let theta = cap.angular_radius();
        let e = m.cross(&Vector3::x()).normalize();
        let f = m.cross(&e);
        let pts: Vec<Vector3<f64>> = (0..12)
            .map(|k| {
                let t = k as f64 * 2.0 * PI / 12.0;
                mu_alpha_point(&alpha, &(m * theta.cos() + (e * t.cos() + f * t.sin()) * theta.sin()))
            })
            .collect();
        let normal = (pts[3] - pts[0]).cross(&(pts[7] - pts[0])).normalize();
        for p in &pts {
            assert!((p - pts[0]).dot(&normal).abs() < 1e-9);
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        let image = Boost::from_alpha(&alpha).unwrap().cap(&cap);
        for p in &pts {
            assert!(((p - image.m()).norm() - image.chordal_radius).abs() < 1e-9);
        }
    }

    #[test]
    fn mu_alpha_identity_and_concentration() {
        let caps = CapConfiguration {
            caps: vec![
                Cap { center: [0.0, 0.0, 1.0], chordal_radius: 0.3 },
                Cap { center: [0.0, 1.0, 0.0], chordal_radius: 0.2 },
            ],
            boundary: vec![0, 1],
        };
        assert_eq!(mu_alpha(&caps, [0.0; 3]).unwrap(), caps);
        assert!(mu_alpha(&caps, [1.0, 0.0, 0.0]).is_err());
        let mut last = f64::INFINITY;
        for s in [0.1, 0.5, 0.9, 0.99] {
            let out = mu_alpha(&caps, [s, 0.0, 0.0]).unwrap();
            let spread = out.caps.iter().map(|c| (Vector3::from(c.center) - Vector3::x()).norm()).sum::<f64>();
            assert!(spread < last);
            last = spread;
            assert!(out.max_center_norm_error() < 1e-12);
        }
    }

    #[test]
    fn antipodal_caps_are_already_centered() {
        let caps = CapConfiguration {
            caps: vec![
                Cap { center: [0.0, 0.0, 1.0], chordal_radius: 0.3 },
                Cap { center: [0.0, 0.0, -1.0], chordal_radius: 0.3 },
            ],
            boundary: vec![0, 1],
        };
        let c = center_caps(&caps).unwrap();
        assert_eq!(c.alpha, [0.0; 3]);
    }

    #[test]
    fn barbell_chain() {
        let g = barbell(2, 2, 4).unwrap().graph;
        let chain = embedding_chain(&g).unwrap().certificate;
        assert!(chain.chain_holds, "{chain:?}");
        assert!(chain.centering_residual <= 4e-6);
        assert!(chain.packing_tangency_residual <= 1e-6);
        assert!(chain.cap_area_sum <= 4.0 * PI + 1e-6);
        assert!((chain.lambda2 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn path_chain_is_rejected() {
        // The two boundary caps end up tangent, so no finite centering exists.
        let g = GraphWithBoundary::new(5, (0..4).map(|i| (i, i + 1)), [0, 4]).unwrap();
        assert!(matches!(embedding_chain(&g), Err(Error::NotWellBehaved { .. })));
    }

    #[test]
    fn random_planar_chains() {
        for seed in 0..3 {
            let g = random_planar(12, 4, seed).unwrap().graph;
            let chain = embedding_chain(&g).unwrap().certificate;
            assert!(chain.chain_holds, "{chain:?}");
        }
    }
}

