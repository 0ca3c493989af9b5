//! `steklov` command-line driver. Every run writes its outputs plus a
//! `manifest.json` into `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use steklov::acceptance::{run_all, Status};
use steklov::blocktools::{cut_test_function, find_balanced_subgraph, path_test_function};
use steklov::bounds::{evaluate_all, reports_to_csv};
use steklov::explorer::search;
use steklov::families::{self, FamilyInstance};
use steklov::io::{fmt_f64, parse_graph, to_json};
use steklov::spectrum::{rayleigh_quotient, steklov_spectrum};
use steklov::sphere::embedding_chain;
use steklov::{Error, GraphWithBoundary};

#[derive(Parser, Serialize)]
#[command(name = "steklov", version, about = "Steklov spectra, eigenvalue bounds and embeddings of graphs with boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
enum Command {
    /// Steklov spectrum and eigenfields of a graph file.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Applicable eigenvalue bounds, plus certificates for block graphs.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Writes a named family instance as canonical JSON with metadata.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        family: Family,
        #[command(flatten)]
        params: FamilyParams,
        /// Base graph for `cherry`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Circle packing, sphere caps, centering and the embedding ratio.
    Pack {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Enumerates trees and reports the maximizers of lambda2.
    Search {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        leaves: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long)]
        allow_degree2: bool,
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Runs the acceptance suite.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Serialize)]
struct Common {
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance for `spectrum`.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Barbell,
    Cherry,
    PathStack,
    BlockPath,
    BalancedTree,
    RandomBlock,
    RandomTree,
    RandomPlanar,
}

#[derive(Args, Serialize)]
struct FamilyParams {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "D")]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    leaves: Option<usize>,
    #[arg(long = "B-max")]
    b_max: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    /// Pendant count for `random-planar`.
    #[arg(long)]
    pendants: Option<usize>,
    /// Degree-one vertex of the base graph for `cherry`.
    #[arg(long)]
    leaf: Option<usize>,
}

/// Exit codes: 0 success, 1 failed check or bound, 2 bad input, 3 numerical
/// failure.
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

struct Run<'a> {
    out: &'a Path,
    written: Vec<String>,
    input_digest: Option<String>,
}

impl<'a> Run<'a> {
    fn new(out: &'a Path) -> Result<Self, Failure> {
        fs::create_dir_all(out).map_err(|e| Failure::Input(format!("cannot create {}: {e}", out.display())))?;
        Ok(Self { out, written: Vec::new(), input_digest: None })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::write(self.out.join(name), contents)
            .map_err(|e| Failure::Input(format!("cannot write {name}: {e}")))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn read_graph(&mut self, path: &Path) -> Result<GraphWithBoundary, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        self.input_digest = Some(hex::encode(Sha256::digest(&bytes)));
        let text = String::from_utf8(bytes).map_err(|_| Failure::Input("input is not UTF-8".into()))?;
        parse_graph(&text).map_err(|e| Failure::Input(e.to_string()))
    }
}

fn spectrum_cmd(run: &mut Run, input: &Path, common: &Common) -> Outcome {
    let g = run.read_graph(input)?;
    let spec = steklov_spectrum(&g)?;
    let residual = spec.max_residual(&g);
    match common.format {
        Format::Csv => run.write("spectrum.csv", &spec.to_csv(true))?,
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                boundary: &'a [usize],
                eigenvalues: Vec<String>,
                eigenfields: Vec<Vec<String>>,
            }
            let doc = Doc {
                boundary: &spec.boundary,
                eigenvalues: spec.eigenvalues.iter().map(|&x| fmt_f64(x)).collect(),
                eigenfields: spec.eigenfields.iter().map(|f| f.values.iter().map(|&x| fmt_f64(x)).collect()).collect(),
            };
            run.write("spectrum.json", &(serde_json::to_string_pretty(&doc).expect("serializes") + "\n"))?;
        }
    }
    let ok = residual <= common.tol;
    let report = serde_json::json!({ "max_residual": fmt_f64(residual), "tol": fmt_f64(common.tol), "within_tolerance": ok });
    run.write("residuals.json", &(serde_json::to_string_pretty(&report).expect("serializes") + "\n"))?;
    for (k, lam) in spec.eigenvalues.iter().enumerate() {
        println!("lambda_{} = {}", k + 1, fmt_f64(*lam));
    }
    if !ok {
        return Err(Failure::Numerical(format!("eigen-residual {residual:e} exceeds tolerance {:e}", common.tol)));
    }
    Ok(true)
}

fn bounds_cmd(run: &mut Run, input: &Path, common: &Common) -> Outcome {
    let g = run.read_graph(input)?;
    let reports = evaluate_all(&g)?;
    match common.format {
        Format::Csv => run.write("bounds.csv", &reports_to_csv(&reports))?,
        Format::Json => run.write("bounds.json", &(serde_json::to_string_pretty(&reports).expect("serializes") + "\n"))?,
    }
    if steklov::blocks::is_block_graph(&g)?.is_some() {
        let mut tests = serde_json::Map::new();
        match find_balanced_subgraph(&g) {
            Ok(cert) => {
                run.write("certificate.json", &cert.to_json())?;
                let r = rayleigh_quotient(&g, &cut_test_function(&g, &cert))?;
                tests.insert("cut_rayleigh".into(), fmt_f64(r).into());
            }
            Err(e) => {
                tests.insert("cut_error".into(), e.to_string().into());
            }
        }
        match path_test_function(&g) {
            Ok(p) => {
                tests.insert("path_rayleigh".into(), fmt_f64(p.rayleigh).into());
                tests.insert("path_length".into(), p.path_length.into());
                tests.insert("diameter".into(), p.diameter.into());
                tests.insert("path_bound_at_diameter".into(), fmt_f64(p.bound_at_diameter).into());
            }
            Err(e) => {
                tests.insert("path_error".into(), e.to_string().into());
            }
        }
        run.write("test_functions.json", &(serde_json::to_string_pretty(&tests).expect("serializes") + "\n"))?;
    }
    for r in &reports {
        if r.applicable {
            println!("{}: lambda2 {} <= {} ({})", r.bound_name, fmt_f64(r.lambda2), fmt_f64(r.bound_value), if r.satisfied { "ok" } else { "VIOLATED" });
        }
    }
    Ok(reports.iter().all(|r| r.ok()))
}

fn need(value: Option<usize>, flag: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| Failure::Input(format!("missing --{flag}")))
}

fn generate_cmd(run: &mut Run, family: Family, p: &FamilyParams, input: Option<&Path>, seed: u64) -> Outcome {
    let inst: FamilyInstance = match family {
        Family::Barbell => families::barbell(need(p.p, "p")?, need(p.q, "q")?, need(p.l, "L")?)?,
        Family::PathStack => families::path_stack(need(p.d, "D")?, need(p.n, "n")?)?,
        Family::BlockPath => families::block_path(need(p.l, "L")?)?,
        Family::BalancedTree => families::balanced_tree(need(p.leaves, "leaves")?, need(p.d, "D")?)?,
        Family::RandomBlock => families::random_block_graph(need(p.blocks, "blocks")?, need(p.b_max, "B-max")?, need(p.d, "D")?, seed)?,
        Family::RandomTree => families::random_tree(need(p.n, "n")?, need(p.d, "D")?, seed)?,
        Family::RandomPlanar => families::random_planar(need(p.n, "n")?, p.pendants.unwrap_or(4), seed)?,
        Family::Cherry => {
            let path = input.ok_or_else(|| Failure::Input("cherry needs --input with a base graph".into()))?;
            let base = run.read_graph(path)?;
            let leaf = match p.leaf {
                Some(v) => v,
                None => *base.leaves().first().ok_or_else(|| Failure::Input("base graph has no degree-1 vertex".into()))?,
            };
            families::cherry(&base, leaf)?
        }
    };
    run.write("graph.json", &to_json(&inst.graph))?;
    run.write("metadata.json", &inst.metadata_json())?;
    print!("{}", to_json(&inst.graph));
    Ok(true)
}

fn pack_cmd(run: &mut Run, input: &Path) -> Outcome {
    let g = run.read_graph(input)?;
    let chain = embedding_chain(&g)?;
    run.write("packing.csv", &chain.packing.to_csv())?;
    run.write("caps.csv", &chain.caps.to_csv())?;
    run.write("centered_caps.csv", &chain.centering.caps.to_csv())?;
    run.write("certificate.json", &chain.certificate.to_json())?;
    let c = &chain.certificate;
    println!(
        "lambda2 {} <= embedding ratio {} <= 8D/|dO| {}",
        fmt_f64(c.lambda2),
        fmt_f64(c.embedding_ratio),
        fmt_f64(c.planar_bound)
    );
    Ok(c.chain_holds)
}

fn search_cmd(run: &mut Run, leaves: usize, d: usize, allow_degree2: bool, max_vertices: Option<usize>) -> Outcome {
    let result = search(leaves, d, allow_degree2, max_vertices)?;
    run.write("catalog.csv", &result.catalog_csv())?;
    run.write("summary.json", &result.summary.to_json())?;
    let s = &result.summary;
    println!("{} trees, max lambda2 {}, {} maximizer(s)", s.tree_count, fmt_f64(s.max_lambda2), s.maximizers.len());
    match s.balanced_tree_is_maximizer {
        Some(true) => println!("balanced tree attains the maximum"),
        Some(false) => println!("balanced tree does not attain the maximum"),
        None => println!("balanced tree not in the enumerated class"),
    }
    Ok(true)
}

fn check_cmd(run: &mut Run) -> Outcome {
    let outcomes = run_all();
    let mut text = String::new();
    for o in &outcomes {
        println!("{o}");
        text.push_str(&format!("{o}\n"));
    }
    run.write("acceptance.txt", &text)?;
    Ok(outcomes.iter().all(|o| o.status != Status::Fail))
}

fn manifest(cli: &Cli, run: &Run) -> String {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = serde_json::json!({
        "tool": "steklov",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
        "input_sha256": run.input_digest,
        "outputs": run.written,
        "created_unix": created,
    });
    serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Spectrum { common, .. }
        | Command::Bounds { common, .. }
        | Command::Generate { common, .. }
        | Command::Pack { common, .. }
        | Command::Search { common, .. }
        | Command::Check { common } => common,
    };
    let mut run = match Run::new(&common.out) {
        Ok(r) => r,
        Err(Failure::Input(m) | Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Spectrum { input, common } => spectrum_cmd(&mut run, input, common),
        Command::Bounds { input, common } => bounds_cmd(&mut run, input, common),
        Command::Generate { family, params, input, common } => {
            generate_cmd(&mut run, *family, params, input.as_deref(), common.seed)
        }
        Command::Pack { input, .. } => pack_cmd(&mut run, input),
        Command::Search { leaves, d, allow_degree2, max_vertices, .. } => {
            search_cmd(&mut run, *leaves, *d, *allow_degree2, *max_vertices)
        }
        Command::Check { .. } => check_cmd(&mut run),
    };
    if let Err(e) = fs::write(run.out.join("manifest.json"), manifest(&cli, &run)) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
