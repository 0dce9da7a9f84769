use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hycolor::exact::{chromatic_number, SolveStatus};
use hycolor::graph::{validate_coloring, Coloring, Graph, DEFAULT_MAX_NODES};
use hycolor::heuristics::{dsatur, greedy_sequential, rlf};
use hycolor::hybrid::{ensemble_predict, NodeOrder};
use hycolor::io::{build_interference, parse_dimacs, parse_intervals, read_csv, unpack_sample, write_csv};
use hycolor::neural::{init_params, train_with, ModelConfig, ModelParams, Sample, TrainConfig};
use hycolor::pipeline::{compare, evaluate, generate_corpus, write_manifest, CorpusConfig, FeedbackStore, Winner};
use hycolor::Error;

#[derive(Parser)]
#[command(name = "hycolor", version, about = "Hybrid LSTM + color-correction graph coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random graphs labeled with exact optimal colorings.
    GenCorpus(GenCorpusArgs),
    /// Train a model on a labeled corpus.
    Train(TrainArgs),
    /// Color graphs with one or more models followed by color correction.
    Color(ColorArgs),
    /// Score models on a labeled corpus against the optimum and the baseline.
    Evaluate(EvaluateArgs),
    /// Pick the better of the hybrid and baseline colorings, recording baseline wins.
    Compare(CompareArgs),
    /// Compute the chromatic number exactly.
    Exact(ExactArgs),
    /// Color with a classical heuristic.
    Heuristic(HeuristicArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    Csv,
    Intervals,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Dsatur,
    Rlf,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Full,
    Desk,
}

#[derive(Args)]
struct InputArgs {
    /// Graph file: DIMACS .col, sample CSV (one graph per row), or live intervals.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted (.csv, .txt/.intervals, else DIMACS).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write one JSON record per graph to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    n_max: usize,
    #[arg(long, default_value_t = 0.05)]
    p_min: f64,
    #[arg(long, default_value_t = 0.95)]
    p_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-graph exact solver budget; graphs that exceed it are skipped.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Corpus CSV; the manifest goes to `<out>.manifest.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled corpus CSV.
    #[arg(long)]
    input: PathBuf,
    /// Parameter file to write; the loss history goes to `<out>.loss.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reorder every graph breadth-first before training.
    #[arg(long)]
    bfs: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// Parameter file; repeat to run an ensemble.
    #[arg(long = "model", required = true)]
    models: Vec<PathBuf>,
    /// Feed nodes to the model in breadth-first order.
    #[arg(long)]
    bfs: bool,
}

#[derive(Args)]
struct ColorArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Labeled corpus CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "dsatur")]
    baseline: Baseline,
    /// Feedback CSV receiving graphs the baseline colored with fewer colors.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Exact solver budget for labeling stored graphs.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
}

#[derive(Args)]
struct HeuristicArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "dsatur")]
    baseline: Baseline,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 1,
        Error::Invariant(_) | Error::NonFiniteLoss { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GenCorpus(a) => gen_corpus(a),
        Command::Train(a) => train(a),
        Command::Color(a) => color(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Exact(a) => exact(a),
        Command::Heuristic(a) => heuristic(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct NamedGraph {
    name: String,
    graph: Graph,
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn load_graphs(args: &InputArgs, max_nodes: usize) -> Result<Vec<NamedGraph>, Error> {
    let format = args.format.unwrap_or_else(|| match args.input.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("txt" | "intervals" | "live") => Format::Intervals,
        _ => Format::Dimacs,
    });
    let stem = args.input.display().to_string();
    let single = |graph: Graph| -> Result<Vec<NamedGraph>, Error> {
        if graph.n() > max_nodes {
            return Err(Error::TooLarge { n: graph.n(), max: max_nodes });
        }
        Ok(vec![NamedGraph { name: stem.clone(), graph }])
    };
    match format {
        Format::Dimacs => single(parse_dimacs(&read_text(&args.input)?)?),
        Format::Intervals => single(build_interference(&parse_intervals(&read_text(&args.input)?)?, max_nodes)?),
        Format::Csv => read_csv(&args.input, max_nodes)?
            .iter()
            .enumerate()
            .map(|(i, row)| Ok(NamedGraph { name: format!("{stem}:{}", i + 1), graph: unpack_sample(row)?.0 }))
            .collect(),
    }
}

/// Optional JSON-lines sink, one record per graph.
struct Report(Option<(PathBuf, fs::File)>);

impl Report {
    fn open(path: Option<&Path>) -> Result<Self, Error> {
        path.map(|p| match fs::File::create(p) {
            Ok(f) => Ok((p.to_path_buf(), f)),
            Err(e) => Err(Error::Io { path: p.to_path_buf(), source: e }),
        })
        .transpose()
        .map(Report)
    }

    fn record(&mut self, value: &impl Serialize) -> Result<(), Error> {
        if let Some((path, f)) = &mut self.0 {
            let line = serde_json::to_string(value).map_err(|e| Error::Invariant(e.to_string()))?;
            writeln!(f, "{line}").map_err(|e| Error::Io { path: path.clone(), source: e })?;
        }
        Ok(())
    }
}

/// Every coloring the CLI prints goes through this check.
fn ensure_proper(g: &Graph, c: &Coloring, what: &str) -> Result<(), Error> {
    let report = validate_coloring(g, c)?;
    if !report.is_proper() {
        return Err(Error::Invariant(format!("{what} left {} invalid edges", report.invalid_edges.len())));
    }
    Ok(())
}

fn fmt_coloring(c: &Coloring) -> String {
    c.as_slice().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn load_models(args: &ModelArgs) -> Result<(Vec<ModelParams>, usize), Error> {
    let models = args.models.iter().map(|p| ModelParams::load(p)).collect::<Result<Vec<_>, _>>()?;
    let max_nodes = models.iter().map(|m| m.config.max_nodes).min().unwrap_or(DEFAULT_MAX_NODES);
    Ok((models, max_nodes))
}

fn node_order(bfs: bool) -> NodeOrder {
    if bfs {
        NodeOrder::Bfs
    } else {
        NodeOrder::Natural
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn gen_corpus(a: GenCorpusArgs) -> CmdResult {
    let cfg = CorpusConfig {
        count: a.count,
        n_min: a.n_min,
        n_max: a.n_max,
        p_min: a.p_min,
        p_max: a.p_max,
        seed: a.seed,
        timeout: Duration::from_millis(a.timeout_ms),
        max_nodes: a.max_nodes,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let start = Instant::now();
    let corpus = generate_corpus(&cfg)?;
    write_csv(&a.out, &corpus.rows)?;
    let manifest = with_suffix(&a.out, ".manifest.csv");
    write_manifest(&manifest, &corpus.manifest)?;
    println!(
        "wrote {} labeled graphs to {} ({} skipped on timeout) in {:.1?}; manifest {}",
        corpus.rows.len(),
        a.out.display(),
        corpus.skipped(),
        start.elapsed(),
        manifest.display()
    );
    Ok(())
}

fn train(a: TrainArgs) -> CmdResult {
    let (mut mcfg, mut tcfg) = match a.profile {
        Profile::Full => (ModelConfig::default(), TrainConfig::default()),
        Profile::Desk => (ModelConfig::desk(), TrainConfig::desk()),
    };
    mcfg.max_nodes = a.max_nodes;
    mcfg.seed = a.seed;
    tcfg.seed = a.seed;
    if let Some(v) = a.hidden {
        mcfg.hidden_size = v;
    }
    if let Some(v) = a.layers {
        mcfg.num_layers = v;
    }
    if let Some(v) = a.epochs {
        tcfg.epochs = v;
    }
    if let Some(v) = a.lr {
        tcfg.learning_rate = v;
    }
    if let Some(v) = a.batch_size {
        tcfg.batch_size = v;
    }
    mcfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    tcfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let rows = read_csv(&a.input, mcfg.max_nodes)?;
    let mut samples = rows.iter().map(Sample::from_row).collect::<Result<Vec<_>, _>>()?;
    if a.bfs {
        samples = samples.iter().map(Sample::bfs_reordered).collect::<Result<_, _>>()?;
    }
    let loss_path = with_suffix(&a.out, ".loss.csv");
    let mut loss_csv = String::from("epoch,mean_mape,last_batch_mape\n");
    let start = Instant::now();
    let outcome = train_with(&tcfg, init_params(mcfg)?, &samples, |s| {
        println!(
            "epoch {:>3}  mean MAPE {:>8.3}  last batch {:>8.3}  [{:.0?}]",
            s.epoch,
            s.mean_mape,
            s.last_batch_mape,
            start.elapsed()
        );
        loss_csv.push_str(&format!("{},{},{}\n", s.epoch, s.mean_mape, s.last_batch_mape));
    })?;
    outcome.params.save(&a.out)?;
    fs::write(&loss_path, loss_csv).map_err(|e| Error::Io { path: loss_path.clone(), source: e })?;
    println!("saved model to {} and loss history to {}", a.out.display(), loss_path.display());
    Ok(())
}

#[derive(Serialize)]
struct ColorRecord<'a> {
    graph: &'a str,
    nodes: usize,
    edges: usize,
    model: usize,
    colors_before: usize,
    invalid_edges: usize,
    invalid_pct: f64,
    colors_after: usize,
    fresh_colors: usize,
    coloring: &'a [u32],
}

fn color(a: ColorArgs) -> CmdResult {
    let (models, max_nodes) = load_models(&a.model)?;
    let graphs = load_graphs(&a.input, max_nodes)?;
    let mut report = Report::open(a.input.report.as_deref())?;
    for NamedGraph { name, graph } in &graphs {
        let (model, h) = ensemble_predict(&models, graph, node_order(a.model.bfs))?;
        ensure_proper(graph, &h.corrected, "color correction")?;
        println!(
            "{name}: {} nodes, {} edges; predicted {} colors with {} invalid edges ({:.2}%); corrected {} colors",
            graph.n(),
            graph.edge_count(),
            h.colors_before(),
            h.before.invalid_edges.len(),
            100.0 * h.before.invalid_fraction,
            h.colors_after()
        );
        println!("  coloring: {}", fmt_coloring(&h.corrected));
        report.record(&ColorRecord {
            graph: name,
            nodes: graph.n(),
            edges: graph.edge_count(),
            model,
            colors_before: h.colors_before(),
            invalid_edges: h.before.invalid_edges.len(),
            invalid_pct: 100.0 * h.before.invalid_fraction,
            colors_after: h.colors_after(),
            fresh_colors: h.stats.fresh_colors_added,
            coloring: h.corrected.as_slice(),
        })?;
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> CmdResult {
    let (models, max_nodes) = load_models(&a.model)?;
    let rows = read_csv(&a.input, max_nodes)?;
    let (buckets, evals) = evaluate(&models, &rows, node_order(a.model.bfs))?;
    let mut report = Report::open(a.report.as_deref())?;
    for e in &evals {
        report.record(e)?;
    }
    if let Some(e) = evals.iter().find(|e| !e.proper) {
        return Err(Error::Invariant(format!("graph {} left improper after correction", e.index + 1)).into());
    }
    println!("graphs evaluated:            {}", buckets.total_graphs);
    println!("mean invalid edges:          {:.2}%", buckets.pct_invalid_edges_mean);
    println!("match optimal:               {:.2}%", buckets.pct_match_optimal);
    println!("1-3 extra colors:            {:.2}%", buckets.pct_within_3_extra);
    println!("6-10 extra colors:           {:.2}%", buckets.pct_6_to_10_extra);
    println!("other:                       {:.2}%", buckets.pct_other);
    println!("mean colors (model, raw):    {:.3}", buckets.mean_colors_before);
    println!("mean colors (hybrid):        {:.3}", buckets.mean_colors_hybrid);
    println!("mean colors (DSATUR):        {:.3}", buckets.mean_colors_dsatur);
    println!("mean colors (optimal):       {:.3}", buckets.mean_colors_optimal);
    println!("{}", serde_json::to_string(&buckets).map_err(|e| Error::Invariant(e.to_string()))?);
    Ok(())
}

#[derive(Serialize)]
struct CompareRecord<'a> {
    graph: &'a str,
    winner: Winner,
    hybrid_colors: usize,
    baseline_colors: usize,
    stored: Option<SolveStatus>,
    coloring: &'a [u32],
}

fn compare_cmd(a: CompareArgs) -> CmdResult {
    if !matches!(a.baseline, Baseline::Dsatur) {
        return Err(Failure::Usage("compare supports only the dsatur baseline".into()));
    }
    let (models, max_nodes) = load_models(&a.model)?;
    let graphs = load_graphs(&a.input, max_nodes)?;
    let store = a.store.as_deref().map(|p| FeedbackStore::open(p, max_nodes)).transpose()?;
    let mut report = Report::open(a.input.report.as_deref())?;
    let timeout = Duration::from_millis(a.timeout_ms);
    for NamedGraph { name, graph } in &graphs {
        let out = compare(&models, graph, store.as_ref(), node_order(a.model.bfs), timeout)?;
        ensure_proper(graph, &out.chosen, "comparator")?;
        let winner = match out.winner {
            Winner::Hybrid => "hybrid",
            Winner::Dsatur => "DSATUR",
        };
        let stored = match out.stored_label {
            Some(SolveStatus::Exact) => "; stored with exact label",
            Some(SolveStatus::TimedOut) => "; stored with DSATUR label (exact solver timed out)",
            None => "",
        };
        println!(
            "{name}: hybrid {} colors, DSATUR {} colors -> {winner}{stored}",
            out.hybrid_colors(),
            out.dsatur_colors
        );
        println!("  coloring: {}", fmt_coloring(&out.chosen));
        report.record(&CompareRecord {
            graph: name,
            winner: out.winner,
            hybrid_colors: out.hybrid_colors(),
            baseline_colors: out.dsatur_colors,
            stored: out.stored_label,
            coloring: out.chosen.as_slice(),
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ExactRecord<'a> {
    graph: &'a str,
    chromatic_number: usize,
    lower_bound: usize,
    status: SolveStatus,
    elapsed_ms: f64,
    coloring: &'a [u32],
}

fn exact(a: ExactArgs) -> CmdResult {
    let graphs = load_graphs(&a.input, a.max_nodes)?;
    let mut report = Report::open(a.input.report.as_deref())?;
    for NamedGraph { name, graph } in &graphs {
        let start = Instant::now();
        let r = chromatic_number(graph, Duration::from_millis(a.timeout_ms));
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        ensure_proper(graph, &r.coloring, "exact solver")?;
        match r.status {
            SolveStatus::Exact => println!("{name}: chromatic number {} ({elapsed_ms:.1} ms)", r.chromatic_number),
            SolveStatus::TimedOut => println!(
                "{name}: timed out after {elapsed_ms:.1} ms; best coloring {} colors, lower bound {}",
                r.chromatic_number, r.lower_bound
            ),
        }
        println!("  coloring: {}", fmt_coloring(&r.coloring));
        report.record(&ExactRecord {
            graph: name,
            chromatic_number: r.chromatic_number,
            lower_bound: r.lower_bound,
            status: r.status,
            elapsed_ms,
            coloring: r.coloring.as_slice(),
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HeuristicRecord<'a> {
    graph: &'a str,
    method: &'a str,
    colors: usize,
    coloring: &'a [u32],
}

fn heuristic(a: HeuristicArgs) -> CmdResult {
    let graphs = load_graphs(&a.input, a.max_nodes)?;
    let mut report = Report::open(a.input.report.as_deref())?;
    for NamedGraph { name, graph } in &graphs {
        let (method, c) = match a.baseline {
            Baseline::Dsatur => ("dsatur", dsatur(graph)),
            Baseline::Rlf => ("rlf", rlf(graph)),
            Baseline::Greedy => ("greedy", greedy_sequential(graph, &(0..graph.n()).collect::<Vec<_>>())?),
        };
        ensure_proper(graph, &c, method)?;
        println!("{name}: {method} used {} colors", c.colors_used());
        println!("  coloring: {}", fmt_coloring(&c));
        report.record(&HeuristicRecord { graph: name, method, colors: c.colors_used(), coloring: c.as_slice() })?;
    }
    Ok(())
}
