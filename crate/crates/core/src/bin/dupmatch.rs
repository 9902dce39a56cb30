use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dupmatch::format::{from_json, to_json};
use dupmatch::generate::{generate, GenParams};
use dupmatch::solver::{extend, run};
use dupmatch::verify::{ratio_harness, Oracle, DEFAULT_CAP};
use dupmatch::{ConstructionChoice, Engine, Error, Instance, Matching, SolveOptions, VertexRef};

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "dupmatch", version, about = "Approximate maximum cγ-stable matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the report as JSON.
    Solve(SolveArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Check a matching against an instance by brute force.
    Verify(VerifyArgs),
    /// Compare solver output with the brute-force optimum over many seeds.
    Ratio(RatioArgs),
    /// Time the solver on growing instances; prints CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "auto")]
    engine: Engine,
    #[arg(long, default_value = "auto")]
    construction: ConstructionChoice,
    /// Attach a brute-force certificate; exit 3 if it fails.
    #[arg(long)]
    certify: bool,
    /// Print every vertex's copy ranking to stderr.
    #[arg(long)]
    dump_extended: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 4)]
    u_count: usize,
    #[arg(long, default_value_t = 4)]
    w_count: usize,
    #[arg(long, default_value_t = 9)]
    edges: usize,
    #[arg(long, default_value_t = 3)]
    p_max: u32,
    #[arg(long, default_value_t = 0.3)]
    crit_vertex_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    crit_edge_prob: f64,
    #[arg(long, default_value_t = 1)]
    capacity_max: usize,
    #[arg(long, default_value_t = 0.1)]
    free_edge_prob: f64,
}

impl From<&ParamArgs> for GenParams {
    fn from(a: &ParamArgs) -> GenParams {
        GenParams {
            u_count: a.u_count,
            w_count: a.w_count,
            edge_count: a.edges,
            p_max: a.p_max,
            crit_vertex_prob: a.crit_vertex_prob,
            crit_edge_prob: a.crit_edge_prob,
            capacity_max: a.capacity_max,
            free_edge_prob: a.free_edge_prob,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// A JSON array of edge ids, or a solve report.
    #[arg(long)]
    matching: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct RatioArgs {
    #[arg(long, default_value_t = 500)]
    seeds: u64,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated edge counts; may be empty.
    #[arg(long, default_value = "")]
    sizes: String,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Critical vertices per side; all edges are critical when nonzero.
    #[arg(long, default_value_t = 0)]
    critical: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Io(String),
    Lib(Error),
    Uncertified,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    // through serde_json::Value so object keys come out sorted
    let v = serde_json::to_value(value).map_err(Error::from)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let inst = from_json(&read_text(path)?)?;
    inst.validated()?;
    Ok(inst)
}

fn cmd_solve(a: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.input)?;
    if a.dump_extended {
        eprint!("{}", extend(&inst, a.construction)?.dump());
    }
    let options =
        SolveOptions { engine: a.engine, construction: a.construction, certify: a.certify, timing: a.timing, cap: a.cap };
    let report = dupmatch::solve(&inst, &options)?;
    write_text(a.output.as_deref(), &json_text(&report)?)?;
    match &report.certificate {
        Some(cert) if !cert.is_cgamma_stable => {
            eprintln!("certification failed: {}", serde_json::to_string(cert).map_err(Error::from)?);
            Err(Failure::Uncertified)
        }
        _ => Ok(()),
    }
}

fn cmd_gen(a: GenArgs) -> Result<(), Failure> {
    let inst = generate(a.seed, &GenParams::from(&a.params))?;
    write_text(a.output.as_deref(), &to_json(&inst))
}

fn parse_matching(text: &str) -> Result<Matching, Failure> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(Error::from)?;
    let ids = match v {
        serde_json::Value::Object(mut map) => map
            .remove("matching")
            .ok_or_else(|| Error::Format("expected an array of edge ids or an object with `matching`".into()))?,
        other => other,
    };
    let ids: Vec<usize> = serde_json::from_value(ids).map_err(Error::from)?;
    let m: Matching = ids.iter().copied().collect();
    if m.len() != ids.len() {
        return Err(Error::Format("matching repeats an edge id".into()).into());
    }
    Ok(m)
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let m = parse_matching(&read_text(&a.matching)?)?;
    let oracle = Oracle::new(&inst, a.cap)?;
    let cert = oracle.certify(&m);
    write_text(None, &json_text(&cert)?)?;
    if cert.is_cgamma_stable {
        return Ok(());
    }
    if !cert.feasible {
        eprintln!("matching is not feasible");
    } else if !cert.is_critical {
        eprintln!("criticality score {} is below the optimum {}", cert.criticality_score, cert.criticality_optimum);
    }
    for b in &cert.blocking_edges {
        let slot = |x: Option<usize>| x.map_or("none".to_string(), |id| id.to_string());
        eprintln!("edge {} blocks (f = {}, g = {})", b.edge, slot(b.f), slot(b.g));
    }
    Err(Failure::Uncertified)
}

fn cmd_ratio(a: RatioArgs) -> Result<(), Failure> {
    let reports = ratio_harness(a.seeds, &GenParams::from(&a.params), a.cap)?;
    write_text(a.output.as_deref(), &json_text(&reports)?)?;
    let failures: Vec<_> = reports.iter().filter(|r| !r.ok()).collect();
    eprintln!("{} seeds, {} violations", reports.len(), failures.len());
    let smallest = failures.iter().min_by_key(|r| {
        let edges = r.instance.as_ref().and_then(|i| i["edges"].as_array().map(Vec::len)).unwrap_or(usize::MAX);
        (edges, r.seed)
    });
    match smallest {
        None => Ok(()),
        Some(r) => {
            eprintln!("smallest failing instance (seed {}):", r.seed);
            eprintln!("{}", serde_json::to_string_pretty(&r.instance).map_err(Error::from)?);
            Err(Failure::Uncertified)
        }
    }
}

/// Random instance with `size` edges; the first `critical` vertices on each
/// side are critical and, if any are, every edge is critical.
fn bench_instance(seed: u64, size: usize, critical: usize) -> Result<Instance, Failure> {
    let side = (size / 4).max(1);
    let params = GenParams {
        u_count: side,
        w_count: side,
        edge_count: size,
        p_max: 100,
        crit_vertex_prob: 0.0,
        crit_edge_prob: 0.0,
        capacity_max: 1,
        free_edge_prob: 0.0,
    };
    let mut inst = generate(seed, &params)?;
    let k = critical.min(side);
    inst.critical_vertices.extend((0..k).map(VertexRef::u).chain((0..k).map(VertexRef::w)));
    if k > 0 {
        inst.edges.iter_mut().for_each(|e| e.critical = true);
    }
    Ok(inst)
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let sizes = a
        .sizes
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|e| Error::Format(format!("bad size `{x}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("size,copies,nanos\n");
    for size in sizes {
        let inst = if size == 0 { Instance::new(0, 0) } else { bench_instance(a.seed, size, a.critical)? };
        let mut best = u128::MAX;
        let mut copies = 0;
        for _ in 0..a.repeats.max(1) {
            let start = Instant::now();
            let solved = run(&inst, Engine::Auto, ConstructionChoice::Auto)?;
            best = best.min(start.elapsed().as_nanos());
            copies = solved.extended.copies.len();
        }
        out.push_str(&format!("{size},{copies},{best}\n"));
    }
    write_text(None, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Ratio(a) => cmd_ratio(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Uncertified) => ExitCode::from(EXIT_UNCERTIFIED),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapExceeded { .. } => EXIT_CAP,
                _ => EXIT_INVALID,
            })
        }
    }
}
