//! The acceptance suite: twelve numbered criteria, each reduced to one
//! pass/fail line. Shared by the `check` subcommand and the test target.

use std::fmt;
use std::time::Instant;

use crate::blocktools::{cut_test_function, find_balanced_subgraph, path_test_function};
use crate::bounds::{evaluate_with, planar_degree_bound, BoundName, GraphClass};
use crate::error::Result;
use crate::explorer::argmax_lambda2;
use crate::families::{barbell, block_path, cherry, path_stack, random_block_graph, random_planar, random_tree};
use crate::graph::{diameter, GraphWithBoundary, Vertex};
use crate::oracle;
use crate::rng::Rng;
use crate::spectrum::{rayleigh_quotient, steklov_spectrum};
use crate::sphere::embedding_chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    OutOfScope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::OutOfScope => "N/A ",
        };
        write!(f, "criterion {:<4} {tag}  {}: {} [{:.2} s", self.id, self.title, self.detail, self.seconds)?;
        if let Some(b) = self.budget_seconds {
            write!(f, ", budget {b} s")?;
        }
        write!(f, "]")
    }
}

/// Graphs touched by criteria 1 to 9, replayed through the oracle by
/// criterion 10.
#[derive(Default)]
pub struct Corpus {
    pub graphs: Vec<GraphWithBoundary>,
}

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check { ok, detail: detail.into() }
}

fn timed(
    id: &'static str,
    title: &'static str,
    budget: Option<f64>,
    body: impl FnOnce() -> Result<Check>,
) -> CriterionOutcome {
    let start = Instant::now();
    let result = body();
    let seconds = start.elapsed().as_secs_f64();
    let (mut ok, mut detail) = match result {
        Ok(c) => (c.ok, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if seconds > b {
            ok = false;
            detail.push_str("; over time budget");
        }
    }
    CriterionOutcome { id, title, status: if ok { Status::Pass } else { Status::Fail }, detail, seconds, budget_seconds: budget }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn c1_barbell(corpus: &mut Corpus) -> CriterionOutcome {
    timed("1", "barbell closed form", Some(5.0), || {
        let (mut count, mut worst, mut bad) = (0, 0.0f64, 0);
        for p in 1..=6 {
            for q in 1..=6 {
                for l in 2..=10 {
                    let inst = barbell(p, q, l)?;
                    let spec = steklov_spectrum(&inst.graph)?;
                    let closed = inst.closed_form_f64().expect("barbell has a closed form");
                    let mut want = vec![0.0, closed];
                    want.extend(std::iter::repeat(1.0).take(p + q - 2));
                    want.sort_by(f64::total_cmp);
                    let err = spec.eigenvalues.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    worst = worst.max(err);
                    if err > 1e-9 || spec.eigenvalues.len() != want.len() {
                        bad += 1;
                    }
                    count += 1;
                    corpus.graphs.push(inst.graph);
                }
            }
        }
        Ok(check(bad == 0, format!("{count} instances, {bad} mismatches, max spectrum error {worst:.1e}")))
    })
}

fn c2_observation(corpus: &mut Corpus) -> CriterionOutcome {
    timed("2", "barbell observation", None, || {
        let a = barbell(2, 4, 3)?.graph;
        let b = barbell(3, 3, 3)?.graph;
        let diff = steklov_spectrum(&a)?.lambda2() - steklov_spectrum(&b)?.lambda2();
        corpus.graphs.extend([a, b]);
        let err = (diff - 1.0 / 35.0).abs();
        Ok(check(err <= 1e-10, format!("lambda2(B(2,4,3)) - lambda2(B(3,3,3)) = {diff:.17}, error {err:.1e} vs 1/35")))
    })
}

fn c3_cherry(corpus: &mut Corpus) -> CriterionOutcome {
    timed("3", "cherry example", None, || {
        let (mut worst_lam, mut worst_field, mut bad) = (0.0f64, 0.0f64, 0);
        for seed in 0..20u64 {
            let mut rng = Rng::new(seed);
            let base = if seed % 2 == 0 {
                random_tree(rng.range(4, 15), 4, seed)?.graph
            } else {
                random_planar(rng.range(4, 14), 2, seed)?.graph
            };
            let leaves = base.leaves();
            let leaf = leaves[rng.below(leaves.len())];
            let inst = cherry(&base, leaf)?;
            let g = inst.graph;
            let spec = steklov_spectrum(&g)?;
            let (a, b) = (g.n() - 2, g.n() - 1);
            let field = &spec.eigenfields[1].values;
            let scale = field[a];
            let field_err = (0..g.n())
                .map(|v| {
                    let want = if v == a { 1.0 } else if v == b { -1.0 } else { 0.0 };
                    (field[v] / scale - want).abs()
                })
                .fold(0.0, f64::max);
            let lam_err = (spec.lambda2() - 1.0).abs();
            if lam_err > 1e-9 || field_err > 1e-8 {
                bad += 1;
            }
            worst_lam = worst_lam.max(lam_err);
            worst_field = worst_field.max(field_err);
            corpus.graphs.push(g);
        }
        Ok(check(
            bad == 0,
            format!("20 bases, {bad} failures, max |lambda2 - 1| {worst_lam:.1e}, max field error {worst_field:.1e}"),
        ))
    })
}

/// Runs both readings of the path-stack example: the printed formula
/// `2(D-1)/(n-2+2(D-1))` and the value `2(D-1)/(n+2(D-1))` that the graph
/// actually has. Monotonicity in `D` and the diameter are checked in both.
fn c4_path_stack(corpus: &mut Corpus) -> [CriterionOutcome; 2] {
    let mut data = Vec::new();
    let gather = timed("4", "path-stack example (printed formula)", None, || {
        for n in 2..=20usize {
            let mut last = f64::NEG_INFINITY;
            for d in 2..=6usize {
                let g = path_stack(d, n)?.graph;
                let lam = steklov_spectrum(&g)?.lambda2();
                let diam = diameter(&g)?;
                data.push((d, n, lam, diam, lam > last));
                last = lam;
                corpus.graphs.push(g);
            }
        }
        Ok(check(true, ""))
    });
    let judge = |printed: bool| -> Check {
        let (mut worst, mut bad, mut shape_bad) = (0.0f64, 0, 0);
        for &(d, n, lam, diam, increasing) in &data {
            let (df, nf) = ((d - 1) as f64, n as f64);
            let want = if printed { 2.0 * df / (nf - 2.0 + 2.0 * df) } else { 2.0 * df / (nf + 2.0 * df) };
            let err = (lam - want).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                bad += 1;
            }
            if diam != n + 2 || (d > 2 && !increasing) {
                shape_bad += 1;
            }
        }
        check(
            bad == 0 && shape_bad == 0,
            format!(
                "{} instances, {bad} value mismatches (max error {worst:.3e}), {shape_bad} diameter/monotonicity failures",
                data.len()
            ),
        )
    };
    let mut literal = gather.clone();
    let mut corrected = gather;
    if literal.status == Status::Pass {
        let c = judge(true);
        literal.status = if c.ok { Status::Pass } else { Status::Fail };
        literal.detail = c.detail;
        let c = judge(false);
        corrected.status = if c.ok { Status::Pass } else { Status::Fail };
        corrected.detail = c.detail;
    }
    corrected.id = "4*";
    corrected.title = "path-stack example (2(D-1)/(n+2(D-1)))";
    corrected.seconds = 0.0;
    [literal, corrected]
}

fn c5_block_path(corpus: &mut Corpus) -> CriterionOutcome {
    timed("5", "block-path figure", None, || {
        let mut worst = 0.0f64;
        for l in (2..=12).step_by(2) {
            let g = block_path(l)?.graph;
            worst = worst.max((steklov_spectrum(&g)?.lambda2() - 2.0 / l as f64).abs());
            corpus.graphs.push(g);
        }
        Ok(check(worst <= 1e-9, format!("L = 2, 4, ..., 12, max |lambda2 - 2/L| {worst:.1e}")))
    })
}

/// Parameters drawn from `seed` for the random block graphs of criteria 6,
/// 7 and 9; instances over 60 vertices are skipped.
fn block_instances(count: usize) -> Result<Vec<GraphWithBoundary>> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        let mut rng = Rng::new(0x5eed_0000 + seed);
        let blocks = rng.range(1, 12);
        let b_max = rng.range(2, 4);
        let d_max = rng.range(b_max.max(3), 5);
        let g = random_block_graph(blocks, b_max, d_max, seed)?.graph;
        if g.n() <= 60 && g.boundary_len() >= 2 {
            out.push(g);
        }
        seed += 1;
    }
    Ok(out)
}

fn c6_c7_block_bounds(corpus: &mut Corpus) -> [CriterionOutcome; 2] {
    let mut certs_ok = Vec::new();
    let c6 = timed("6", "block bounds", Some(30.0), || {
        let graphs = block_instances(200)?;
        let mut worst_slack = f64::INFINITY;
        let (mut bound_bad, mut cut_bad, mut path_bad) = (0, 0, 0);
        for g in &graphs {
            let spec = steklov_spectrum(g)?;
            let lam = spec.lambda2();
            let class = GraphClass::of(g)?;
            let reports = evaluate_with(&class, lam);
            let get = |name| reports.iter().find(|r| r.bound_name == name).copied().expect("every bound reported");
            let deg = get(BoundName::BlockDegree);
            let sharp = get(BoundName::BlockDegreeSharp);
            let diam = get(BoundName::BlockDiameter);
            for r in [deg, sharp, diam] {
                if !r.applicable || r.slack < -1e-9 {
                    bound_bad += 1;
                }
                if r.applicable {
                    worst_slack = worst_slack.min(r.slack);
                }
            }
            let (bs, d) = (class.block_size.unwrap_or(0), class.max_degree);
            match find_balanced_subgraph(g) {
                Ok(cert) => {
                    let r = rayleigh_quotient(g, &cut_test_function(g, &cert))?;
                    if r < lam - 1e-9 || r > sharp.bound_value + 1e-9 {
                        cut_bad += 1;
                    }
                    certs_ok.push(cert.in_range(bs, d) && g.induces_connected(&cert.vertices));
                }
                Err(_) => {
                    cut_bad += 1;
                    certs_ok.push(false);
                }
            }
            let path = path_test_function(g)?;
            if path.rayleigh < lam - 1e-9 || path.rayleigh > diam.bound_value + 1e-9 {
                path_bad += 1;
            }
        }
        corpus.graphs.extend(graphs);
        Ok(check(
            bound_bad == 0 && cut_bad == 0 && path_bad == 0,
            format!(
                "200 graphs, {bound_bad} bound failures (min slack {worst_slack:.3e}), {cut_bad} cut and {path_bad} path test-function failures"
            ),
        ))
    });
    let bad = certs_ok.iter().filter(|&&ok| !ok).count();
    let c7 = CriterionOutcome {
        id: "7",
        title: "balanced subgraph",
        status: if !certs_ok.is_empty() && bad == 0 { Status::Pass } else { Status::Fail },
        detail: format!("{} certificates, {bad} out of range or disconnected", certs_ok.len()),
        seconds: 0.0,
        budget_seconds: None,
    };
    [c6, c7]
}

fn c8_planar(corpus: &mut Corpus) -> CriterionOutcome {
    timed("8", "planar bound and embedding chain", Some(60.0), || {
        let (mut chained, mut attempts, mut packing_failures, mut chain_bad) = (0, 0, 0, 0);
        let mut worst_center = 0.0f64;
        let mut seed = 0u64;
        while chained < 20 && attempts < 60 {
            attempts += 1;
            let mut rng = Rng::new(0xcafe + seed);
            let core = rng.range(4, 30);
            let pendants = rng.range(3, 10);
            let g = random_planar(core, pendants, seed)?.graph;
            seed += 1;
            match embedding_chain(&g) {
                Ok(chain) => {
                    let c = chain.certificate;
                    let b = c.boundary_len as f64;
                    worst_center = worst_center.max(c.centering_residual / b);
                    let ok = c.packing_tangency_residual <= 1e-6
                        && c.cap_tangency_excess <= 1e-6
                        && c.centering_residual <= 1e-6 * b
                        && c.lambda2 <= c.embedding_ratio + 1e-9
                        && c.embedding_ratio <= c.planar_bound + 1e-6;
                    if !ok {
                        chain_bad += 1;
                    }
                    chained += 1;
                    corpus.graphs.push(g);
                }
                Err(_) => packing_failures += 1,
            }
        }
        let mut bare_bad = 0;
        for seed in 0..100u64 {
            let mut rng = Rng::new(0xbeef + seed);
            let g = random_planar(rng.range(3, 30), rng.range(2, 10), 1000 + seed)?.graph;
            let lam = steklov_spectrum(&g)?.lambda2();
            if lam > planar_degree_bound(g.max_degree(), g.boundary_len())? + 1e-9 {
                bare_bad += 1;
            }
            corpus.graphs.push(g);
        }
        Ok(check(
            chained == 20 && chain_bad == 0 && bare_bad == 0,
            format!(
                "{chained} chains from {attempts} attempts ({packing_failures} did not pack or center), {chain_bad} chain failures, \
                 max centering residual/|dO| {worst_center:.1e}; 100 bare bounds, {bare_bad} failures"
            ),
        ))
    })
}

fn random_connected_subset(g: &GraphWithBoundary, rng: &mut Rng) -> Vec<Vertex> {
    let target = rng.range(2, g.n());
    let start = rng.below(g.n());
    let mut inside = vec![false; g.n()];
    inside[start] = true;
    let mut chosen = vec![start];
    while chosen.len() < target {
        let frontier: Vec<Vertex> =
            chosen.iter().flat_map(|&v| g.neighbors(v).iter().copied()).filter(|&w| !inside[w]).collect();
        let w = frontier[rng.below(frontier.len())];
        inside[w] = true;
        chosen.push(w);
    }
    chosen.sort_unstable();
    chosen
}

fn c9_monotonicity(corpus: &mut Corpus) -> CriterionOutcome {
    use crate::explorer::{check_edge_monotonicity, check_subtree_monotonicity};
    timed("9", "monotonicity theorems", None, || {
        let (mut edge_checks, mut edge_violations, mut skipped) = (0, 0, 0);
        let mut seed = 0u64;
        while edge_checks < 100 {
            let mut rng = Rng::new(0xed6e + seed);
            let g = if seed % 2 == 0 {
                random_planar(rng.range(4, 20), rng.range(2, 6), seed)?.graph
            } else {
                random_block_graph(rng.range(2, 8), 4, 5, seed)?.graph
            };
            seed += 1;
            let interior: Vec<(Vertex, Vertex)> =
                g.edges().iter().copied().filter(|&(u, v)| !g.is_boundary(u) && !g.is_boundary(v)).collect();
            if interior.is_empty() {
                continue;
            }
            let e = interior[rng.below(interior.len())];
            let r = check_edge_monotonicity(&g, e)?;
            if r.skipped {
                skipped += 1;
                continue;
            }
            edge_checks += 1;
            edge_violations += r.violations;
            corpus.graphs.push(g.without_edge(e.0, e.1)?);
            corpus.graphs.push(g);
        }
        let mut sub_violations = 0;
        for seed in 0..100u64 {
            let t = random_tree(20, 4, 0x7eee + seed)?.graph;
            let mut rng = Rng::new(seed);
            let sub = random_connected_subset(&t, &mut rng);
            sub_violations += check_subtree_monotonicity(&t, &sub)?.violations;
            corpus.graphs.push(t);
        }
        Ok(check(
            edge_violations == 0 && sub_violations == 0,
            format!(
                "100 edge removals ({skipped} disconnecting draws skipped), {edge_violations} violations; \
                 100 subtree pairs, {sub_violations} violations"
            ),
        ))
    })
}

fn c10_oracle(corpus: &Corpus) -> CriterionOutcome {
    timed("10", "oracle equivalence", None, || {
        let (mut bad, mut worst) = (0, 0.0f64);
        for g in &corpus.graphs {
            let fast = steklov_spectrum(g)?.eigenvalues;
            let Some(slow) = oracle::steklov_eigenvalues(g) else {
                bad += 1;
                continue;
            };
            for (a, b) in fast.iter().zip(&slow) {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
                if !rel_close(*a, *b, 1e-9) {
                    bad += 1;
                }
            }
        }
        let mut relabel_bad = 0;
        let step = (corpus.graphs.len() / 10).max(1);
        for (i, g) in corpus.graphs.iter().step_by(step).take(10).enumerate() {
            let base = steklov_spectrum(g)?.eigenvalues;
            let mut rng = Rng::new(0x1abe1u64 + i as u64);
            for _ in 0..100 {
                let h = g.relabel(&rng.permutation(g.n()))?;
                let ev = steklov_spectrum(&h)?.eigenvalues;
                if ev.iter().zip(&base).any(|(a, b)| !rel_close(*a, *b, 1e-9)) {
                    relabel_bad += 1;
                }
            }
        }
        Ok(check(
            bad == 0 && relabel_bad == 0 && !corpus.graphs.is_empty(),
            format!(
                "{} graphs, {bad} mismatches (max relative gap {worst:.1e}); 10 graphs x 100 relabelings, {relabel_bad} mismatches",
                corpus.graphs.len()
            ),
        ))
    })
}

fn c11_conjecture() -> CriterionOutcome {
    timed("11", "conjecture exploration (D = 3)", Some(60.0), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for l in 3..=8 {
            let result = argmax_lambda2(l, 3)?;
            let mine: std::collections::BTreeSet<String> = result
                .entries
                .iter()
                .map(|e| oracle::tree_code_min_over_roots(&(0..e.tree.n()).map(|v| e.tree.neighbors(v).to_vec()).collect::<Vec<_>>()))
                .collect();
            let skeleton = oracle::irreducible_trees_skeleton_prufer(l, 3);
            let mut agree = mine.len() == result.entries.len() && mine == skeleton;
            if l <= 5 {
                agree &= oracle::irreducible_trees_full_prufer(l, 3) == skeleton;
            }
            ok &= agree;
            let verdict = match result.summary.balanced_tree_is_maximizer {
                Some(true) => "T_b* maximizes",
                Some(false) => "T_b* does not maximize",
                None => "T_b* outside class",
            };
            parts.push(format!(
                "l={l}: {} trees{}, max {:.6}, {verdict}",
                result.entries.len(),
                if agree { "" } else { " (oracle mismatch)" },
                result.summary.max_lambda2
            ));
        }
        Ok(check(ok, parts.join("; ")))
    })
}

fn c12_out_of_scope() -> CriterionOutcome {
    CriterionOutcome {
        id: "12",
        title: "continuous-geometry results",
        status: Status::OutOfScope,
        detail: "not reproducible by a discrete artifact; discrete analogues covered by 5, 6 and 8".into(),
        seconds: 0.0,
        budget_seconds: None,
    }
}

/// Runs every criterion in order. Criterion 4 yields two lines: the printed
/// formula and the corrected one.
pub fn run_all() -> Vec<CriterionOutcome> {
    let mut corpus = Corpus::default();
    let mut out = vec![c1_barbell(&mut corpus), c2_observation(&mut corpus), c3_cherry(&mut corpus)];
    out.extend(c4_path_stack(&mut corpus));
    out.push(c5_block_path(&mut corpus));
    out.extend(c6_c7_block_bounds(&mut corpus));
    out.push(c8_planar(&mut corpus));
    out.push(c9_monotonicity(&mut corpus));
    out.push(c10_oracle(&corpus));
    out.push(c11_conjecture());
    out.push(c12_out_of_scope());
    out
}
