//! Command-line front end. Every run writes `manifest.json` with the resolved
//! configuration into its run directory.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use aigsat::circuit::{cnf_to_aig, parse_aiger, parse_dimacs, write_aiger, AigCircuit, CircuitStats, Mask};
use aigsat::datagen::{build_benchmark, write_benchmark, BenchmarkKind, GraphProblem};
use aigsat::model::{grad_check, gradcheck_circuit, load_checkpoint, log_csv, save_checkpoint, train, Example, ModelParams, TrainConfig};
use aigsat::sim::{build_dataset, conditional_estimate, exact_profile, read_dataset, write_dataset, MaskPolicy, RecordLine, SimConfig, SimKey};
use aigsat::solver::{
    bit_string, evaluate_scheme, evaluate_suite, solve_with_flipping, ConstantPredictor, ExactPredictor, ModelPredictor,
    Predictor, RandomPredictor, Scheme, SolveStatus,
};
use aigsat::synth::{optimize, RewriteLibrary};

const GRADCHECK_TOLERANCE: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "aigsat", version, about = "SAT solving on and-inverter graphs with a conditional circuit model")]
struct Cli {
    /// TOML file with defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for outputs and the run manifest [default: $AIGSAT_OUT/<command>, else runs/<command>].
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,
    /// Worker threads for cross-instance parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DIMACS CNF to ASCII AIGER.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite/balance script; prints before/after statistics.
    Optimize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Node counts, depth and balance ratio.
    Stats { input: PathBuf },
    /// Per-node probability of logic 1, optionally conditioned.
    Simulate(SimulateArgs),
    /// Random benchmark instances with verified tags.
    Gen(GenArgs),
    /// Simulation-labelled training records for a set of instances.
    Label(LabelArgs),
    /// Trains the model on a labelled dataset.
    Train(TrainArgs),
    /// Samples a satisfying assignment for one instance.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        predictor: PredictorArgs,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Solves a set of instances and reports metrics.
    Eval(EvalArgs),
    /// Compares analytic and finite-difference gradients on a 6-node circuit.
    Gradcheck {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long)]
        hidden: Option<usize>,
    },
}

#[derive(Args, Serialize)]
struct LoadArgs {
    /// Keep CNF inputs as raw converted AIGs instead of optimizing them.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    input: PathBuf,
    /// Condition on PO = 1.
    #[arg(long)]
    po: bool,
    /// Fix a PI, 1-based: `--fix 3=0`. Repeatable.
    #[arg(long, value_parser = parse_fix)]
    fix: Vec<(usize, bool)>,
    /// Enumerate the free PIs instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    patterns: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    load: LoadArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GenKind {
    Sr,
    Coloring,
    Clique,
    VertexCover,
    DominatingSet,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "sr")]
    kind: GenKind,
    /// Number of SR pairs or graph instances.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    min_n: usize,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize)]
struct LabelArgs {
    /// `.cnf`/`.aag` files or directories holding them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Extra masked-PI records per circuit.
    #[arg(long)]
    extra_records: Option<usize>,
    #[arg(long)]
    patterns: Option<usize>,
    #[arg(long)]
    min_accepted: Option<usize>,
    /// Keep at most this many records, in input order.
    #[arg(long)]
    max_records: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    load: LoadArgs,
}

#[derive(Args, Serialize)]
struct TrainArgs {
    /// `dataset.tsv` or the `label` run directory holding it.
    dataset: PathBuf,
    /// Fraction of circuits (the last ones in file order) held out.
    #[arg(long, default_value_t = 0.1)]
    val_fraction: f64,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Continue from a checkpoint.
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum PredictorKind {
    /// Exact conditional probabilities (small instances only).
    Oracle,
    Model,
    Random,
    /// Always 0; a worst case for the flipping search.
    Zero,
}

#[derive(Args, Serialize)]
struct PredictorArgs {
    #[arg(long, value_enum, default_value = "model")]
    predictor: PredictorKind,
    #[arg(long, required_if_eq("predictor", "model"))]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Strategy {
    Flipping,
    OneShot,
    MostUncertain,
    MostCertain,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    /// `.cnf`/`.aag` files or directories holding them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    predictor: PredictorArgs,
    #[arg(long, value_enum, default_value = "flipping")]
    strategy: Strategy,
    /// Skip CNF inputs whose benchmark manifest tags them UNSAT.
    #[arg(long)]
    sat_only: bool,
    #[command(flatten)]
    load: LoadArgs,
}

/// Optional defaults read from `--config`.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    jobs: Option<usize>,
    sim: SimSection,
    train: TrainSection,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
struct SimSection {
    num_patterns: Option<usize>,
    min_accepted: Option<usize>,
    extra_records: Option<usize>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSection {
    learning_rate: Option<f64>,
    weight_decay: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    hidden: Option<usize>,
}

/// Wrong invocation that clap cannot catch.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn parse_fix(s: &str) -> Result<(usize, bool), String> {
    let (i, v) = s.split_once('=').ok_or("expected <pi>=<0|1>")?;
    let i: usize = i.parse().map_err(|_| format!("bad PI index `{i}`"))?;
    if i == 0 {
        return Err("PI indices are 1-based".into());
    }
    match v {
        "0" => Ok((i - 1, false)),
        "1" => Ok((i - 1, true)),
        _ => Err(format!("bad value `{v}`, expected 0 or 1")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

struct Run {
    dir: PathBuf,
    file: FileConfig,
}

impl Run {
    fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.file.seed).unwrap_or(0)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn manifest(&self, command: &str, resolved: serde_json::Value) -> Result<()> {
        let m = json!({
            "tool": "aigsat",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": resolved,
        });
        write(&self.path("manifest.json"), &(serde_json::to_string_pretty(&m)? + "\n"))
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Convert { .. } => "convert",
        Command::Optimize { .. } => "optimize",
        Command::Stats { .. } => "stats",
        Command::Simulate(_) => "simulate",
        Command::Gen(_) => "gen",
        Command::Label(_) => "label",
        Command::Train(_) => "train",
        Command::Solve { .. } => "solve",
        Command::Eval(_) => "eval",
        Command::Gradcheck { .. } => "gradcheck",
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let file: FileConfig = match &cli.config {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => FileConfig::default(),
    };
    let name = command_name(&cli.command);
    let dir = cli.run_dir.clone().unwrap_or_else(|| {
        std::env::var_os("AIGSAT_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"))
            .join(name)
    });
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    if let Some(jobs) = cli.jobs.or(file.jobs) {
        if jobs == 0 {
            return Err(UsageError("--jobs must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let run = Run { dir, file };

    match cli.command {
        Command::Convert { input, output } => {
            let f = parse_dimacs(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            let c = cnf_to_aig(&f);
            let out = output.unwrap_or_else(|| run.path(&format!("{}.aag", stem(&input))));
            write(&out, &write_aiger(&c))?;
            run.manifest(name, json!({"input": input, "output": out}))?;
            println!("{}", serde_json::to_string(&CircuitStats::of(&c))?);
        }
        Command::Optimize { input, output } => {
            let c = load_circuit(&input, true)?;
            let (opt, report) = optimize(&c, RewriteLibrary::bundled());
            let out = output.unwrap_or_else(|| run.path(&format!("{}.opt.aag", stem(&input))));
            write(&out, &write_aiger(&opt))?;
            let delta = opt.len() as i64 - c.len() as i64;
            let report = json!({"before": report.before, "after": report.after, "replacements": report.replacements, "node_change": delta});
            run.manifest(name, json!({"input": input, "output": out}))?;
            write(&run.path("optimize.json"), &(report.to_string() + "\n"))?;
            println!("{report}");
        }
        Command::Stats { input } => {
            let c = load_circuit(&input, true)?;
            let stats = serde_json::to_string(&CircuitStats::of(&c))?;
            run.manifest(name, json!({"input": input}))?;
            println!("{stats}");
        }
        Command::Simulate(a) => simulate(&run, a)?,
        Command::Gen(a) => gen(&run, a)?,
        Command::Label(a) => label(&run, a)?,
        Command::Train(a) => train_cmd(&run, a)?,
        Command::Solve { input, predictor, load } => {
            let c = load_circuit(&input, load.raw)?;
            let p = make_predictor(&run, &predictor)?;
            let r = solve_with_flipping(&c, p.as_ref())?;
            let line = json!({
                "instance": input,
                "status": r.status,
                "assignment": r.assignment.as_ref().map(bit_string),
                "rounds": r.rounds_used,
                "predictor_calls": r.predictor_calls,
            });
            run.manifest(name, json!({"input": input, "predictor": predictor, "seed": run.seed(predictor.seed), "load": load}))?;
            println!("{line}");
        }
        Command::Eval(a) => eval(&run, a)?,
        Command::Gradcheck { seed, eps, hidden } => {
            let hidden = hidden.or(run.file.train.hidden).unwrap_or(aigsat::model::HIDDEN);
            let seed = run.seed(seed);
            let (c, m, labels) = gradcheck_circuit();
            let params = ModelParams::init(hidden, seed);
            let report = grad_check(&params, &c, &m, &labels, seed, eps)?;
            run.manifest(name, json!({"seed": seed, "eps": eps, "hidden": hidden}))?;
            for (g, dev) in &report.groups {
                println!("{g:24} {dev:.3e}");
            }
            println!("reduced steps {}", report.reduced_steps);
            println!("max relative deviation {:.3e}", report.max_rel);
            if report.max_rel > GRADCHECK_TOLERANCE {
                eprintln!("gradient check failed: {:.3e} > {GRADCHECK_TOLERANCE:e}", report.max_rel);
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write(p: &Path, text: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "circuit".into())
}

fn is_cnf(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "cnf")
}

/// `.cnf` is converted (and optimized unless `raw`); anything else is read as
/// ASCII AIGER.
fn load_circuit(p: &Path, raw: bool) -> Result<AigCircuit> {
    let text = read(p)?;
    if is_cnf(p) {
        let f = parse_dimacs(&text).with_context(|| format!("parsing {}", p.display()))?;
        let c = cnf_to_aig(&f);
        Ok(if raw { c } else { optimize(&c, RewriteLibrary::bundled()).0 })
    } else {
        parse_aiger(&text).with_context(|| format!("parsing {}", p.display()))
    }
}

/// Expands directories to their `.cnf`/`.aag` files, sorted by name.
fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e == "cnf" || e == "aag"))
                .collect();
            files.sort();
            out.extend(files);
        } else if p.exists() {
            out.push(p.clone());
        } else {
            bail!("{} does not exist", p.display());
        }
    }
    Ok(out)
}

fn sim_config(run: &Run, patterns: Option<usize>, min_accepted: Option<usize>, seed: u64) -> SimConfig {
    let d = SimConfig::default();
    SimConfig {
        num_patterns: patterns.or(run.file.sim.num_patterns).unwrap_or(d.num_patterns),
        min_accepted: min_accepted.or(run.file.sim.min_accepted).unwrap_or(d.min_accepted),
        seed,
    }
}

fn simulate(run: &Run, a: SimulateArgs) -> Result<()> {
    let c = load_circuit(&a.input, a.load.raw)?;
    let mut mask = if a.po { Mask::po_only(&c) } else { Mask::empty(c.len()) };
    for &(i, v) in &a.fix {
        if i >= c.num_pis() {
            return Err(UsageError(format!("--fix {}: the circuit has {} PIs", i + 1, c.num_pis())).into());
        }
        mask.set_bool(i, v);
    }
    let cfg = sim_config(run, a.patterns, None, run.seed(a.seed));
    let profile = if a.exact {
        exact_profile(&c, &mask)?
    } else {
        conditional_estimate(&c, &mask, &cfg, SimKey { circuit: 0, record: 0 })?
    };
    run.manifest("simulate", json!({"args": a, "sim": cfg}))?;
    let out = json!({"accepted": profile.accepted, "theta": profile.theta});
    write(&run.path("profile.json"), &(out.to_string() + "\n"))?;
    println!("{out}");
    Ok(())
}

fn gen(run: &Run, a: GenArgs) -> Result<()> {
    let kind = match a.kind {
        GenKind::Sr => {
            if a.min_n < 2 || a.min_n > a.max_n {
                return Err(UsageError(format!("bad SR size range {}..={}", a.min_n, a.max_n)).into());
            }
            BenchmarkKind::Sr { min_n: a.min_n, max_n: a.max_n }
        }
        GenKind::Coloring => BenchmarkKind::Graph { problem: GraphProblem::Coloring },
        GenKind::Clique => BenchmarkKind::Graph { problem: GraphProblem::Clique },
        GenKind::VertexCover => BenchmarkKind::Graph { problem: GraphProblem::VertexCover },
        GenKind::DominatingSet => BenchmarkKind::Graph { problem: GraphProblem::DominatingSet },
    };
    let seed = run.seed(a.seed);
    let items = build_benchmark(kind, a.count, seed);
    write_benchmark(&items, &run.dir)?;
    let sat = items.iter().filter(|(e, _)| e.sat).count();
    run.manifest("gen", json!({"args": a, "seed": seed}))?;
    println!("{}", json!({"files": items.len(), "sat": sat, "unsat": items.len() - sat}));
    Ok(())
}

fn label(run: &Run, a: LabelArgs) -> Result<()> {
    let files = collect_inputs(&a.inputs)?;
    let circuits = files.iter().map(|f| load_circuit(f, a.load.raw)).collect::<Result<Vec<_>>>()?;
    let seed = run.seed(a.seed);
    let cfg = sim_config(run, a.patterns, a.min_accepted, seed);
    let policy = MaskPolicy {
        extra_records: a.extra_records.or(run.file.sim.extra_records).unwrap_or(MaskPolicy::default().extra_records),
    };
    let (mut records, stats) = build_dataset(&circuits, policy, &cfg);
    if let Some(max) = a.max_records {
        records.truncate(max);
    }
    let names: Vec<String> = files.iter().enumerate().map(|(i, f)| format!("circuits/{i:05}-{}.aag", stem(f))).collect();
    let mut used = vec![false; circuits.len()];
    for r in &records {
        used[r.circuit] = true;
    }
    for ((c, n), _) in circuits.iter().zip(&names).zip(&used).filter(|(_, &u)| u) {
        write(&run.path(n), &write_aiger(c))?;
    }
    let lines: Vec<RecordLine> = records
        .iter()
        .map(|r| RecordLine {
            circuit: names[r.circuit].clone(),
            mask: r.mask.values().to_vec(),
            theta: r.theta.clone(),
        })
        .collect();
    write(&run.path("dataset.tsv"), &write_dataset(&lines))?;
    let summary = json!({"circuits": circuits.len(), "records": lines.len(), "dropped": stats.dropped});
    run.manifest("label", json!({"args": a, "sim": cfg, "policy": policy.extra_records, "result": summary}))?;
    println!("{summary}");
    Ok(())
}

fn train_cmd(run: &Run, a: TrainArgs) -> Result<()> {
    if !(0.0..1.0).contains(&a.val_fraction) {
        return Err(UsageError("--val-fraction must be in [0, 1)".into()).into());
    }
    let path = if a.dataset.is_dir() { a.dataset.join("dataset.tsv") } else { a.dataset.clone() };
    let base = path.parent().unwrap_or(Path::new("."));
    let lines = read_dataset(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
    let mut names: Vec<&str> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for l in &lines {
        index.entry(l.circuit.as_str()).or_insert_with(|| {
            names.push(&l.circuit);
            names.len() - 1
        });
    }
    let circuits = names.iter().map(|n| load_circuit(&base.join(n), true)).collect::<Result<Vec<_>>>()?;
    let masks: Vec<Mask> = lines.iter().map(|l| Mask::from_values(l.mask.clone())).collect();
    for (l, m) in lines.iter().zip(&masks) {
        let c = &circuits[index[l.circuit.as_str()]];
        if m.len() != c.len() || l.theta.len() != c.len() {
            bail!("record for {} has {} entries, circuit has {} nodes", l.circuit, m.len(), c.len());
        }
    }
    let cut = ((1.0 - a.val_fraction) * circuits.len() as f64).ceil() as usize;
    let (mut train_set, mut val_set) = (Vec::new(), Vec::new());
    for (l, m) in lines.iter().zip(&masks) {
        let i = index[l.circuit.as_str()];
        let e = Example {
            circuit: &circuits[i],
            mask: m,
            labels: &l.theta,
        };
        if i < cut { train_set.push(e) } else { val_set.push(e) }
    }

    let d = TrainConfig::default();
    let t = &run.file.train;
    let cfg = TrainConfig {
        learning_rate: a.learning_rate.or(t.learning_rate).unwrap_or(d.learning_rate),
        weight_decay: a.weight_decay.or(t.weight_decay).unwrap_or(d.weight_decay),
        epochs: a.epochs.or(t.epochs).unwrap_or(d.epochs),
        batch_size: a.batch_size.or(t.batch_size).unwrap_or(d.batch_size),
        hidden: a.hidden.or(t.hidden).unwrap_or(d.hidden),
        seed: run.seed(a.seed),
    };
    if cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(UsageError("epochs and batch size must be positive".into()).into());
    }
    let init = a.init.as_ref().map(|p| load_checkpoint(p, cfg.hidden)).transpose()?;
    run.manifest("train", json!({"args": a, "train": cfg, "train_records": train_set.len(), "val_records": val_set.len()}))?;

    let ckpt = run.path("model.ckpt");
    let log_path = run.path("train_log.csv");
    let mut rows = Vec::new();
    let mut io_error = None;
    let (params, _) = train(&train_set, &val_set, &cfg, init, |row, params| {
        println!("epoch {:3}  train PE {:.4}  val PE {:.4}  {:.1}s", row.epoch, row.train_pe, row.val_pe, row.wall_secs);
        rows.push(*row);
        if let Err(e) = write(&log_path, &log_csv(&rows)).and_then(|_| Ok(save_checkpoint(params, &ckpt)?)) {
            io_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    save_checkpoint(&params, &ckpt)?;
    Ok(())
}

fn make_predictor(run: &Run, a: &PredictorArgs) -> Result<Box<dyn Predictor>> {
    let seed = run.seed(a.seed);
    Ok(match a.predictor {
        PredictorKind::Oracle => Box::new(ExactPredictor),
        PredictorKind::Random => Box::new(RandomPredictor { seed }),
        PredictorKind::Zero => Box::new(ConstantPredictor(0.0)),
        PredictorKind::Model => {
            let path = a.checkpoint.as_ref().ok_or_else(|| UsageError("--predictor model needs --checkpoint".into()))?;
            let hidden = a.hidden.or(run.file.train.hidden).unwrap_or(aigsat::model::HIDDEN);
            Box::new(ModelPredictor {
                params: load_checkpoint(path, hidden)?,
                seed,
            })
        }
    })
}

/// SAT tags from a benchmark `manifest.jsonl` next to the inputs, if any.
fn manifest_tags(files: &[PathBuf]) -> std::collections::HashMap<PathBuf, bool> {
    let mut tags = std::collections::HashMap::new();
    let dirs: std::collections::BTreeSet<&Path> = files.iter().filter_map(|f| f.parent()).collect();
    for dir in dirs {
        let Ok(text) = fs::read_to_string(dir.join("manifest.jsonl")) else { continue };
        for line in text.lines() {
            if let Ok(v) = serde_json::from_str::<serde_json::Value>(line) {
                if let (Some(f), Some(s)) = (v["file"].as_str(), v["sat"].as_bool()) {
                    tags.insert(dir.join(f), s);
                }
            }
        }
    }
    tags
}

fn eval(run: &Run, a: EvalArgs) -> Result<()> {
    let mut files = collect_inputs(&a.inputs)?;
    if a.sat_only {
        let tags = manifest_tags(&files);
        files.retain(|f| tags.get(f).copied().unwrap_or(true));
    }
    let instances = files
        .iter()
        .map(|f| Ok((f.display().to_string(), load_circuit(f, a.load.raw)?)))
        .collect::<Result<Vec<_>>>()?;
    let p = make_predictor(run, &a.predictor)?;
    let (results, metrics) = match a.strategy {
        Strategy::Flipping => evaluate_suite(&instances, p.as_ref())?,
        Strategy::OneShot => evaluate_scheme(&instances, p.as_ref(), Scheme::OneShot)?,
        Strategy::MostUncertain => evaluate_scheme(&instances, p.as_ref(), Scheme::MostUncertain)?,
        Strategy::MostCertain => evaluate_scheme(&instances, p.as_ref(), Scheme::MostCertain)?,
    };
    // Soundness holds by construction; re-check what is written out.
    for (r, (_, c)) in results.iter().zip(&instances) {
        if r.status == SolveStatus::Satisfied {
            let bits: Vec<bool> = r.assignment.as_deref().unwrap_or("").chars().map(|ch| ch == '1').collect();
            if bits.len() != c.num_pis() || !c.eval_po(&bits) {
                bail!("{}: reported assignment does not satisfy the circuit", r.instance);
            }
        }
    }
    let mut jsonl = String::new();
    for r in &results {
        jsonl.push_str(&serde_json::to_string(r)?);
        jsonl.push('\n');
    }
    write(&run.path("results.jsonl"), &jsonl)?;
    write(&run.path("metrics.csv"), &metrics.to_csv())?;
    run.manifest("eval", json!({"args": a, "seed": run.seed(a.predictor.seed), "instances": instances.len()}))?;
    println!("{}", serde_json::to_string(&metrics)?);
    Ok(())
}
