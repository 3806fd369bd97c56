use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_sampen::experiments::{
    parse_list, render_results, run_benchmark, run_sweep, Axis, BenchSpec, Family, OutputFormat, PathKind,
    ResultsHeader, SweepSpec, WsSignal,
};
use graph_sampen::generators::{
    er_graph, er_p_for_degree, logistic_map, mix2d, open_unit, piecewise_signal, smooth_wgn, uniform_signal,
    ws_graph,
};
use graph_sampen::ingestion::{
    format_csv_matrix, format_edge_list, format_signal, image_to_grid_signal, read_edge_list, read_edge_list_with_nodes,
    read_image, read_signal, split_patches,
};
use graph_sampen::{
    sampen_classic_with, sampen_graph_with, CountingMode, Error, Execution, GridOrientation, SampEnParams, SdConvention,
    Seed,
};

mod output;

use output::{Outcome, Report};

#[derive(Parser, Debug)]
#[command(name = "graph-sampen", version, about = "Sample entropy of graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Entropy of a signal on a graph read from an edge list.
    Compute(ComputeArgs),
    /// Classical sample entropy of a numeric series.
    Series(SeriesArgs),
    /// Entropy of an image (PGM or CSV matrix) on its 8-neighbour grid.
    Image(ImageArgs),
    /// Generate synthetic series, signals, graphs and images.
    Synth(SynthArgs),
    /// Seeded parameter sweep over a synthetic family.
    Sweep(SweepArgs),
    /// Runtime of single entropy calls on directed ER graphs.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct EstimatorArgs {
    /// Pattern length.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Tolerance as a fraction of the signal standard deviation.
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    lag: usize,
    #[arg(long, default_value = "literal", value_parser = parse_mode)]
    mode: CountingMode,
    #[arg(long, default_value = "population", value_parser = parse_sd)]
    sd: SdConvention,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

impl EstimatorArgs {
    fn params(&self) -> SampEnParams {
        SampEnParams::new(self.m, self.r).with_lag(self.lag).with_mode(self.mode).with_sd(self.sd)
    }

    fn exec(&self) -> Execution {
        execution(self.sequential)
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn parse_mode(s: &str) -> Result<CountingMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sd(s: &str) -> Result<SdConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// Edge list: `src,dst[,weight]`, optional `# directed=true|false` first line.
    #[arg(long)]
    graph: PathBuf,
    /// Node signal: `node,value`.
    #[arg(long)]
    signal: PathBuf,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Treat the edge list as directed.
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    /// Treat the edge list as undirected.
    #[arg(long)]
    undirected: bool,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// One value per line; for multi-column rows the last column is used.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    #[arg(long, default_value = "population", value_parser = parse_sd)]
    sd: SdConvention,
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Orientation {
    Forward,
    Symmetric,
}

impl From<Orientation> for GridOrientation {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Forward => GridOrientation::Forward,
            Orientation::Symmetric => GridOrientation::Symmetric,
        }
    }
}

#[derive(Args, Debug)]
struct ImageArgs {
    /// PGM (P2/P5) or CSV matrix.
    #[arg(long)]
    input: PathBuf,
    /// Split into non-overlapping square patches of this side.
    #[arg(long)]
    patch: Option<usize>,
    #[arg(long, value_enum, default_value_t = Orientation::Forward)]
    orientation: Orientation,
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(subcommand)]
    kind: SynthKind,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SynthKind {
    /// Logistic-map series, one value per line.
    Logistic {
        #[arg(long, default_value_t = 4.0)]
        rho: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Initial value; drawn from the seed when absent.
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// Periodic image mixed with uniform noise, as a CSV matrix.
    Mix2d {
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
    },
    /// Erdős–Rényi edge list with target mean degree K (or edge probability p).
    Er {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long = "K", default_value_t = 3.0, conflicts_with = "p")]
        k: f64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        undirected: bool,
    },
    /// Watts–Strogatz edge list.
    Ws {
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Neighbours on each side of the ring.
        #[arg(long = "K", default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Four-block ±1 signal plus Gaussian noise.
    Piecewise {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
    },
    /// White Gaussian noise heat-smoothed on an undirected graph.
    Smooth {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        tau0: f64,
        #[arg(long, default_value_t = 30)]
        iters: usize,
    },
    /// Uniform node signal.
    Uniform {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        lo: f64,
        #[arg(long, default_value_t = 0.10)]
        hi: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    Logistic,
    Mix2d,
    Er,
    Ws,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignalName {
    Smooth,
    Piecewise,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathName {
    Directed,
    Undirected,
    Classic,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    burn_in: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    size: Option<String>,
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    cols: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    tau0: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    lag: Option<String>,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "literal", value_parser = parse_mode)]
    mode: CountingMode,
    #[arg(long, default_value = "population", value_parser = parse_sd)]
    sd: SdConvention,
    /// Signal placed on Watts–Strogatz graphs.
    #[arg(long, value_enum, default_value_t = SignalName::Smooth)]
    signal: SignalName,
    /// How logistic series are analysed.
    #[arg(long, value_enum, default_value_t = PathName::Directed)]
    path: PathName,
    /// Pixel grid orientation for mix2d.
    #[arg(long, value_enum, default_value_t = Orientation::Forward)]
    orientation: Orientation,
    /// Use undirected ER graphs.
    #[arg(long)]
    undirected: bool,
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn axes(&self) -> anyhow::Result<Vec<Axis>> {
        let named = [
            ("rho", &self.rho),
            ("N", &self.n),
            ("burn_in", &self.burn_in),
            ("p", &self.p),
            ("size", &self.size),
            ("rows", &self.rows),
            ("cols", &self.cols),
            ("K", &self.k),
            ("beta", &self.beta),
            ("sigma", &self.sigma),
            ("tau0", &self.tau0),
            ("iters", &self.iters),
            ("m", &self.m),
            ("r", &self.r),
            ("lag", &self.lag),
        ];
        named
            .into_iter()
            .filter_map(|(name, text)| text.as_ref().map(|t| (name, t)))
            .map(|(name, text)| Ok(Axis::new(name, parse_list(text).with_context(|| format!("--{name}"))?)))
            .collect()
    }

    fn family(&self) -> Family {
        match self.family {
            FamilyName::Logistic => Family::Logistic {
                path: match self.path {
                    PathName::Directed => PathKind::Directed,
                    PathName::Undirected => PathKind::Undirected,
                    PathName::Classic => PathKind::Classic,
                },
            },
            FamilyName::Mix2d => Family::Mix2d { orientation: self.orientation.into() },
            FamilyName::Er => Family::Er { directed: !self.undirected },
            FamilyName::Ws => Family::Ws {
                signal: match self.signal {
                    SignalName::Smooth => WsSignal::SmoothWgn,
                    SignalName::Piecewise => WsSignal::Piecewise,
                },
            },
        }
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long = "N", default_value = "300,900,2700")]
    n: String,
    #[arg(long = "K", default_value = "2,4,8")]
    k: String,
    #[arg(long, default_value = "1,2,3")]
    m: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

/// Failure that maps to exit status 2.
#[derive(Debug)]
struct Undefined;

impl std::fmt::Display for Undefined {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("entropy undefined")
    }
}

impl std::error::Error for Undefined {}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: &Report, format: OutputFormat) -> anyhow::Result<()> {
    print!("{}", report.render(format));
    if report.all_undefined() {
        return Err(Undefined.into());
    }
    Ok(())
}

fn cmd_compute(args: &ComputeArgs) -> anyhow::Result<()> {
    let signal = read_signal(&args.signal)?;
    let directed = match (args.directed, args.undirected) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    let graph = read_edge_list_with_nodes(&args.graph, directed, signal.len())?;
    let outcome = Outcome::from_result(sampen_graph_with(&graph, &signal, &args.est.params(), args.est.exec()))?;
    finish(&Report::single(outcome), args.format)
}

fn read_series(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if values.is_empty() && k == 0 => {}
            _ => bail!("line {}: not a finite number: '{field}'", k + 1),
        }
    }
    Ok(values)
}

fn cmd_series(args: &SeriesArgs) -> anyhow::Result<()> {
    let series = read_series(&args.input)?;
    let res = sampen_classic_with(&series, args.m, args.r, args.sd, execution(args.sequential));
    finish(&Report::single(Outcome::from_result(res)?), args.format)
}

fn cmd_image(args: &ImageArgs) -> anyhow::Result<()> {
    let image = read_image(&args.input)?;
    let params = args.est.params();
    let pieces = match args.patch {
        Some(size) => split_patches(&image, size)?,
        None => vec![image],
    };
    let outcomes = pieces
        .iter()
        .map(|piece| {
            let (graph, signal) = image_to_grid_signal(piece, args.orientation.into())?;
            Outcome::from_result(sampen_graph_with(&graph, &signal, &params, args.est.exec()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = if args.patch.is_some() { Report::patches(outcomes) } else { Report::single(outcomes[0].clone()) };
    finish(&report, args.format)
}

fn cmd_synth(args: &SynthArgs) -> anyhow::Result<()> {
    let seed = Seed(args.seed);
    let text = match &args.kind {
        SynthKind::Logistic { rho, n, x0, burn_in } => {
            let x0 = x0.unwrap_or_else(|| open_unit(seed));
            logistic_map(*rho, x0, *n, *burn_in)?.iter().map(|v| format!("{v}\n")).collect()
        }
        SynthKind::Mix2d { p, size, rows, cols } => {
            format_csv_matrix(&mix2d(rows.unwrap_or(*size), cols.unwrap_or(*size), *p, seed)?)
        }
        SynthKind::Er { n, k, p, undirected } => {
            let p = match p {
                Some(p) => *p,
                None => er_p_for_degree(*k, *n)?,
            };
            format_edge_list(&er_graph(*n, p, !undirected, seed)?)
        }
        SynthKind::Ws { n, k, beta } => format_edge_list(&ws_graph(*n, *k, *beta, seed)?),
        SynthKind::Piecewise { n, sigma } => format_signal(&piecewise_signal(*n, *sigma, seed)?),
        SynthKind::Smooth { graph, tau0, iters } => {
            let graph = read_edge_list(graph, None)?;
            format_signal(&smooth_wgn(&graph, *tau0, *iters, seed)?)
        }
        SynthKind::Uniform { n, lo, hi } => format_signal(&uniform_signal(*n, *lo, *hi, seed)?),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let mut spec = SweepSpec::new(args.family(), args.axes()?, args.reps, Seed(args.seed));
    spec.params = SampEnParams { mode: args.mode, sd: args.sd, ..SampEnParams::default() };
    spec.exec = execution(args.sequential);
    let rows = run_sweep(&spec)?;
    let header = ResultsHeader { axes: spec.axes.iter().map(|a| a.name.clone()).collect(), base_seed: spec.base_seed };
    emit(args.out.as_deref(), &render_results(&rows, &header, args.format))
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let ints = |text: &str, flag: &str| -> anyhow::Result<Vec<usize>> {
        parse_list(text)?
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    bail!("--{flag}: '{v}' is not a non-negative integer")
                }
            })
            .collect()
    };
    let mut spec = BenchSpec::new(ints(&args.n, "N")?, parse_list(&args.k)?, ints(&args.m, "m")?, args.reps, Seed(args.seed));
    spec.r = args.r;
    spec.exec = execution(args.sequential);
    print!("{}", output::render_bench(&run_benchmark(&spec)?, args.format));
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Series(a) => cmd_series(a),
        Command::Image(a) => cmd_image(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Undefined>() => ExitCode::from(2),
        Err(e) => {
            let code = match e.downcast_ref::<Error>() {
                Some(lib) if lib.is_undefined_entropy() => 2,
                _ => 1,
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
