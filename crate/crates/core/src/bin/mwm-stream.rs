use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mwm_stream::bench::{bench_spec, run_grid, BenchTable};
use mwm_stream::engine::{Engine, EngineConfig, Mode, PhiBackend};
use mwm_stream::io::{parse_edge_stream, read_edge_stream, read_trace, save_trace, write_edge_stream, EdgeReader};
use mwm_stream::oracle::{generate_stream, ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::report::{RunReport, Timing};
use mwm_stream::{verify_run, verify_trace, Error, RawEdge};

#[derive(Parser)]
#[command(name = "mwm-stream", version, about = "One-pass maximum-weight matching over edge streams")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an engine over an edge stream (file or stdin)
    Run(RunArgs),
    /// Generate a seeded edge stream
    Gen(GenArgs),
    /// Check a trace against the stream it was produced from
    Verify(VerifyArgs),
    /// Time engine configurations over one generated stream
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct EngineArgs {
    #[arg(long, default_value = "capped")]
    mode: Mode,
    /// Defaults to 0.25 (ignored in mode basic)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Queue capacity override for mode capped
    #[arg(long)]
    beta: Option<u32>,
    /// Round weights down to powers of 1 + epsilon
    #[arg(long)]
    quantize: bool,
    /// Vertex-count bound; enables the small-weight threshold filter
    #[arg(long)]
    threshold_n: Option<u64>,
    #[arg(long, default_value = "dense")]
    phi_backend: PhiBackend,
    /// With the compact backend, also keep exact potentials and compare
    #[arg(long)]
    shadow_phi: bool,
}

impl EngineArgs {
    /// The configuration plus a warning when the flags were reinterpreted.
    fn config(&self) -> (EngineConfig, Option<String>) {
        let mut mode = self.mode;
        let mut warning = None;
        if mode == Mode::Exp && self.epsilon == Some(0.0) {
            mode = Mode::Basic;
            warning = Some("mode exp with epsilon 0 is the basic algorithm; running mode basic".to_string());
        }
        let eps = match mode {
            Mode::Basic => 0.0,
            _ => self.epsilon.unwrap_or(0.25),
        };
        let mut cfg = EngineConfig::new(mode, eps);
        cfg.beta_override = self.beta;
        cfg.quantize = self.quantize;
        cfg.threshold_n = self.threshold_n;
        cfg.phi_backend = self.phi_backend;
        cfg.shadow_phi = self.shadow_phi;
        (cfg, warning)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Edge-stream file; stdin when absent or `-`
    input: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the per-edge decision log (JSON lines) here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Replay the stream and check the certificate
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    json: bool,
    /// Include wall-clock timing in the report
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModelArg {
    GnmRandom,
    Complete,
    Bipartite,
    Path,
    Star,
    EvictionAdversary,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum LawArg {
    Uniform,
    PowersOf,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum OrderArg {
    ArrivalRandom,
    WeightIncreasing,
    WeightDecreasing,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Read the whole spec from a JSON file instead of the flags below
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gnm_random")]
    model: ModelArg,
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    m: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    weight_law: LawArg,
    /// Largest weight (uniform, powers_of) or the constant weight
    #[arg(long, default_value_t = 100.0)]
    w_max: f64,
    /// Base of powers_of and parameter of eviction_adversary
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "arrival_random")]
    order: OrderArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SpecArgs {
    fn spec(&self) -> Result<StreamSpec, Error> {
        if let Some(path) = &self.spec {
            return Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?);
        }
        let model = match self.model {
            ModelArg::GnmRandom => GraphModel::GnmRandom,
            ModelArg::Complete => GraphModel::Complete,
            ModelArg::Bipartite => GraphModel::Bipartite,
            ModelArg::Path => GraphModel::Path,
            ModelArg::Star => GraphModel::Star,
            ModelArg::EvictionAdversary => GraphModel::EvictionAdversary {
                epsilon: self.epsilon,
            },
        };
        let weight_law = match self.weight_law {
            LawArg::Uniform => WeightLaw::Uniform { max: self.w_max },
            LawArg::PowersOf => WeightLaw::PowersOf {
                epsilon: self.epsilon,
                max: self.w_max,
            },
            LawArg::Constant => WeightLaw::Constant { value: self.w_max },
        };
        let order = match self.order {
            OrderArg::ArrivalRandom => ArrivalOrder::ArrivalRandom,
            OrderArg::WeightIncreasing => ArrivalOrder::WeightIncreasing,
            OrderArg::WeightDecreasing => ArrivalOrder::WeightDecreasing,
        };
        Ok(StreamSpec::new(model, self.n, self.m, weight_law, order, self.seed))
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Output file; stdout when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    stream: PathBuf,
    trace: PathBuf,
    /// Flags of the run that produced the trace
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Bench an existing stream file instead of generating one
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated cells `mode[:epsilon]`
    #[arg(long, default_value = "basic,exp:0.25,capped:0.25")]
    cells: String,
    #[arg(long, default_value_t = 3)]
    reps: u32,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Verification,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn open(path: &Path, what: &str) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Usage(format!("cannot open {what} {}: {e}", path.display())))
}

fn input_reader(input: &Option<PathBuf>) -> Result<Box<dyn BufRead>, Failure> {
    Ok(match input {
        Some(p) if p.as_os_str() != "-" => Box::new(BufReader::new(open(p, "stream file")?)),
        _ => Box::new(BufReader::new(io::stdin())),
    })
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let (mut cfg, reinterpreted) = args.engine.config();
    cfg.trace_enabled = args.trace.is_some();
    let mut warnings: Vec<String> = reinterpreted.into_iter().collect();
    if cfg.quantize && cfg.threshold_n.is_none() {
        warnings.push("threshold filter disabled: no vertex bound given (--threshold-n)".to_string());
    }
    let reader = input_reader(&args.input)?;
    let mut engine = Engine::new(cfg)?;
    let (outcome, elapsed, buffered) = if args.verify {
        let stream = parse_edge_stream(reader)?;
        let start = Instant::now();
        for &e in &stream.edges {
            engine.ingest(e)?;
        }
        let elapsed = start.elapsed();
        (engine.finish(), elapsed, Some(stream.edges))
    } else {
        let start = Instant::now();
        for e in EdgeReader::new(reader)? {
            engine.ingest(e?)?;
        }
        let elapsed = start.elapsed();
        (engine.finish(), elapsed, None)
    };
    if let Some(path) = &args.trace {
        save_trace(path, outcome.trace.as_deref().unwrap_or(&[]))?;
    }
    let mut report = RunReport::new(&outcome);
    report.warnings = warnings;
    if args.timing {
        let ns = elapsed.as_nanos() as u64;
        report.timing = Some(Timing {
            wall_ns: ns,
            ns_per_edge: ns as f64 / outcome.stats.edges_seen.max(1) as f64,
        });
    }
    let mut passed = true;
    if let Some(stream) = buffered {
        let v = verify_run(&outcome, &stream)?;
        passed = v.passed;
        report.verification = Some(v);
    }
    emit(&if args.json { report.to_json() } else { report.to_text() })?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = args.spec.spec()?;
    let edges = generate_stream(&spec)?;
    let comment = format!("spec {}", serde_json::to_string(&spec).map_err(Error::from)?);
    let n = Some(spec.n);
    let raw = edges.into_iter().map(RawEdge::from);
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_edge_stream(&mut w, n, Some(&comment), raw)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_edge_stream(&mut w, n, Some(&comment), raw)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    open(&args.stream, "stream file")?;
    open(&args.trace, "trace file")?;
    let stream = read_edge_stream(&args.stream)?;
    let trace = read_trace(&args.trace)?;
    let report = verify_trace(&stream.edges, &trace, &args.engine.config().0)?;
    if args.json {
        emit(&serde_json::to_string_pretty(&report).map_err(Error::from)?)?;
    } else {
        let mut s = String::new();
        for c in &report.checks {
            s += &format!(
                "{:<24} {} ({} checked, {} violations)\n",
                c.check,
                if c.passed { "ok" } else { "FAILED" },
                c.checked,
                c.violations
            );
            for o in &c.offending {
                s += &format!("    {}\n", o.detail);
            }
        }
        emit(&s)?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn parse_cells(text: &str) -> Result<Vec<EngineConfig>, Failure> {
    text.split(',')
        .filter(|c| !c.trim().is_empty())
        .map(|cell| {
            let (mode, eps) = match cell.trim().split_once(':') {
                Some((m, e)) => (m, Some(e)),
                None => (cell.trim(), None),
            };
            let mode: Mode = mode.parse().map_err(Failure::Usage)?;
            let eps = match eps {
                Some(e) => e
                    .parse::<f64>()
                    .map_err(|e| Failure::Usage(format!("bad epsilon in cell `{cell}`: {e}")))?,
                None if mode == Mode::Basic => 0.0,
                None => 0.25,
            };
            Ok(EngineConfig::new(mode, eps).validated()?)
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let configs = parse_cells(&args.cells)?;
    let table = match &args.input {
        Some(path) => {
            let edges = read_edge_stream(path)?.edges;
            BenchTable {
                spec: None,
                reps: args.reps,
                cells: run_grid(&edges, &configs, args.reps)?,
            }
        }
        None => bench_spec(&args.spec.spec()?, &configs, args.reps)?,
    };
    if args.json {
        emit(&serde_json::to_string_pretty(&table).map_err(Error::from)?)
    } else {
        emit(&table.to_text())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
