//! Command line front end: host construction, adversarial coloring, the
//! full certified run, certificate re-verification, and run-record stats.
//!
//! All artifacts are JSON files. Exit codes: 0 success, 2 parameter error,
//! 3 stage failure, 4 verification failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ramsey_core::colorer::color_edges;
use ramsey_core::cycleclose::verify_final;
use ramsey_core::gadgets::{build_gadget, CycleMode};
use ramsey_core::graphcore::{EdgeColoring, Graph};
use ramsey_core::hostbuild::{build_host, HostGraph};
use ramsey_core::hypergen::{default_alpha, sample_until_verified, HostParams};
use ramsey_core::pipeline::{exit_code, run_pipeline, Certificate, RunOutcome, RunRecord};
use ramsey_core::profile::{default_gadget, derive_seed, RunProfile};

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Build sparse hosts, color them adversarially, and extract a certified \
             monochromatic cycle of exact length"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Even,
    Odd,
    #[value(name = "non-induced")]
    NonInduced,
}

impl From<ModeArg> for CycleMode {
    fn from(m: ModeArg) -> CycleMode {
        match m {
            ModeArg::Even => CycleMode::EvenInduced,
            ModeArg::Odd => CycleMode::OddInduced,
            ModeArg::NonInduced => CycleMode::NonInduced,
        }
    }
}

/// Flags shared by the profile-driven subcommands. A `--profile` file wins;
/// the other flags override its fields (`--mode` also swaps in that mode's
/// canonical gadget, `--n` retargets the search accounting). Without a
/// profile, `--n` is required and desk-scale defaults fill the rest.
#[derive(Args, Debug)]
struct ProfileArgs {
    /// JSON run profile to start from.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Master seed; every stage derives its own seed from it by name.
    #[arg(long)]
    seed: Option<u64>,
    /// Cycle mode: parity and inducedness of the target.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Number of adversary colors.
    #[arg(long)]
    k: Option<u32>,
    /// Exact target cycle length.
    #[arg(long)]
    n: Option<usize>,
    /// Directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Check the expensive structural invariants after every round.
    #[arg(long)]
    debug_invariants: bool,
    /// Worker bound for stages that parallelize.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a verified hypergraph and place the gadget: writes host.json.
    GenHost {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Also export the host graph in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Color a host's edges with the profile's colorer: writes coloring.json.
    Color {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Host file (default: <out>/host.json).
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Run the full pipeline: writes record.json and certificate.json.
    Run {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Also write host.json and coloring.json (they can be large).
        #[arg(long)]
        artifacts: bool,
    },
    /// Re-verify a certificate against host and coloring files alone.
    Verify {
        /// Host file (default: <out>/host.json).
        #[arg(long)]
        host: Option<PathBuf>,
        /// Coloring file (default: <out>/coloring.json).
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Certificate file (default: <out>/certificate.json).
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Directory the default file names resolve against.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Summarize a run record as a JSON stage series.
    Stats {
        /// Run record file (default: <out>/record.json).
        #[arg(long)]
        record: Option<PathBuf>,
        /// Directory the default file name resolves against.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn resolve_profile(args: &ProfileArgs) -> Result<RunProfile> {
    let mut p = match &args.profile {
        Some(path) => {
            let f = File::open(path)
                .with_context(|| format!("cannot open profile {}", path.display()))?;
            let p: RunProfile = serde_json::from_reader(BufReader::new(f))
                .with_context(|| format!("cannot parse profile {}", path.display()))?;
            p
        }
        None => {
            let n = args
                .n
                .ok_or_else(|| anyhow!("either --profile or --n is required"))?;
            let mode: CycleMode = args.mode.unwrap_or(ModeArg::Even).into();
            RunProfile::desk(mode, args.k.unwrap_or(2), n, args.seed.unwrap_or(0))
        }
    };
    if let Some(seed) = args.seed {
        p.master_seed = seed;
    }
    if let Some(mode) = args.mode {
        let mode: CycleMode = mode.into();
        if mode != p.mode {
            p.mode = mode;
            p.gadget = default_gadget(mode, p.k);
        }
    }
    if let Some(k) = args.k {
        if k != p.k {
            p.k = k;
            p.gadget = default_gadget(p.mode, k);
        }
    }
    if let Some(n) = args.n {
        p.n = n;
        p.search.n_target = n;
    }
    if args.debug_invariants {
        p.debug_invariants = true;
    }
    if let Some(jobs) = args.jobs {
        p.jobs = jobs;
    }
    p.validate()?;
    Ok(p)
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer(BufWriter::new(f), value)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f))
        .with_context(|| format!("cannot parse {}", path.display()))
}

fn graph_to_dot(g: &Graph) -> String {
    let mut s = String::with_capacity(16 * g.edge_count() + 16);
    s.push_str("graph host {\n");
    for (_, u, v) in g.edges() {
        s.push_str(&format!("  {u} -- {v};\n"));
    }
    s.push_str("}\n");
    s
}

fn init_pool(jobs: usize) {
    // Double initialization only happens in tests; the pool keeps working.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
}

/// Builds host.json the same way the pipeline's first two stages do, so a
/// later `run` with the same profile reproduces it exactly.
fn cmd_gen_host(args: &ProfileArgs, dot: Option<&Path>) -> Result<i32> {
    let p = resolve_profile(args)?;
    init_pool(p.jobs);
    let ms = p.master_seed;
    let gadget = build_gadget(&p.gadget, derive_seed(ms, "gadget"))?;
    let params = HostParams {
        n_vertices: p.host.n_vertices,
        c: p.host.c,
        s: gadget.s,
        g: p.host.g,
        alpha: p.host.alpha.unwrap_or_else(|| default_alpha(p.host.c, gadget.s)),
        k: p.k,
        n: p.n,
        mode: p.mode,
    };
    let (hyper, report) =
        match sample_until_verified(&params, p.host.max_retries, ms, &p.host.budget) {
            Ok(pair) => pair,
            Err(e) => {
                eprintln!("sample_until_verified failed: {e}");
                return Ok(3);
            }
        };
    let host = build_host(&hyper, &gadget, derive_seed(ms, "build_host"))?;
    let path = write_json(&args.out, "host.json", &host)?;
    if let Some(dot_path) = dot {
        std::fs::write(dot_path, graph_to_dot(&host.graph))
            .with_context(|| format!("cannot write {}", dot_path.display()))?;
    }
    println!(
        "host: {} vertices, {} edges, {} hyperedges (uniformity {}), retries {} -> {}",
        host.graph.vertex_count(),
        host.graph.edge_count(),
        host.hyper.edge_count(),
        gadget.s,
        report.retries_used,
        path.display()
    );
    Ok(0)
}

fn cmd_color(args: &ProfileArgs, host_path: Option<&Path>) -> Result<i32> {
    let p = resolve_profile(args)?;
    init_pool(p.jobs);
    let host_file = host_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| args.out.join("host.json"));
    let host: HostGraph = read_json(&host_file)?;
    let coloring = match color_edges(
        &p.colorer,
        &host.graph,
        p.k,
        derive_seed(p.master_seed, "colorer"),
    ) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("colorer failed: {e}");
            return Ok(3);
        }
    };
    let path = write_json(&args.out, "coloring.json", &coloring)?;
    println!(
        "colored {} edges with {} colors -> {}",
        coloring.color.len(),
        coloring.k,
        path.display()
    );
    Ok(0)
}

fn cmd_run(args: &ProfileArgs, artifacts: bool) -> Result<i32> {
    let p = resolve_profile(args)?;
    init_pool(p.jobs);
    let out = run_pipeline(&p);
    for stage in &out.record.stages {
        let meta = serde_json::to_string(&stage.meta).unwrap_or_default();
        match stage.seed {
            Some(seed) => println!("{} [seed {seed}] {meta}", stage.stage),
            None => println!("{} {meta}", stage.stage),
        }
    }
    write_json(&args.out, "record.json", &out.record)?;
    match &out.record.outcome {
        RunOutcome::Success { certificate } => {
            write_json(&args.out, "certificate.json", certificate)?;
            println!(
                "success: monochromatic (color {}) cycle of length {} in {} ms",
                certificate.lift.color,
                certificate.lift.length,
                out.record.timestamps.duration_ms
            );
        }
        RunOutcome::VerificationFailure { certificate } => {
            write_json(&args.out, "certificate.json", certificate)?;
            println!(
                "verification failure: {}",
                serde_json::to_string(&certificate.report.witness).unwrap_or_default()
            );
        }
        RunOutcome::ParameterError { message } => println!("parameter error: {message}"),
        RunOutcome::StageFailure { stage, diagnosis } => {
            println!("stage failure at {stage}: {diagnosis}")
        }
    }
    if artifacts {
        if let Some(host) = &out.host {
            write_json(&args.out, "host.json", host)?;
        }
        if let Some(coloring) = &out.coloring {
            write_json(&args.out, "coloring.json", coloring)?;
        }
    }
    Ok(exit_code(&out.record.outcome))
}

fn cmd_verify(
    host: Option<&Path>,
    coloring: Option<&Path>,
    certificate: Option<&Path>,
    out_dir: &Path,
) -> Result<i32> {
    let host: HostGraph = read_json(
        &host.map(Path::to_path_buf).unwrap_or_else(|| out_dir.join("host.json")),
    )?;
    let coloring: EdgeColoring = read_json(
        &coloring
            .map(Path::to_path_buf)
            .unwrap_or_else(|| out_dir.join("coloring.json")),
    )?;
    let cert: Certificate = read_json(
        &certificate
            .map(Path::to_path_buf)
            .unwrap_or_else(|| out_dir.join("certificate.json")),
    )?;
    let report = verify_final(&host.graph, &coloring, &cert.lift, cert.mode, cert.n);
    let agrees = report == cert.report;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "report": report,
            "matches_certificate": agrees,
        }))?
    );
    Ok(if report.verdict { 0 } else { 4 })
}

fn cmd_stats(record: Option<&Path>, out_dir: &Path) -> Result<i32> {
    let record: RunRecord = read_json(
        &record.map(Path::to_path_buf).unwrap_or_else(|| out_dir.join("record.json")),
    )?;
    let series: Vec<_> = record
        .stages
        .iter()
        .map(|s| json!({ "stage": s.stage, "seed": s.seed, "meta": s.meta }))
        .collect();
    let status = match &record.outcome {
        RunOutcome::Success { .. } => "success",
        RunOutcome::ParameterError { .. } => "parameter_error",
        RunOutcome::StageFailure { .. } => "stage_failure",
        RunOutcome::VerificationFailure { .. } => "verification_failure",
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "status": status,
            "stages_completed": record.stages.len(),
            "duration_ms": record.timestamps.duration_ms,
            "series": series,
        }))?
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::GenHost { profile, dot } => cmd_gen_host(profile, dot.as_deref()),
        Cmd::Color { profile, host } => cmd_color(profile, host.as_deref()),
        Cmd::Run { profile, artifacts } => cmd_run(profile, *artifacts),
        Cmd::Verify { host, coloring, certificate, out } => {
            cmd_verify(host.as_deref(), coloring.as_deref(), certificate.as_deref(), out)
        }
        Cmd::Stats { record, out } => cmd_stats(record.as_deref(), out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e:#}");
            ExitCode::from(2)
        }
    }
}
