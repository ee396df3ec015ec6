//! Command-line driver: generate instance corpora from CNF and TSP inputs,
//! produce graded prediction sweeps, run algorithm campaigns into CSV,
//! replay the lower-bound fixtures, and learn predictions from distributions.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use queryopt_core::experiment::{
    default_bin_width, run_campaign, to_csv, verify_fixture, AlgorithmSpec, Campaign,
    CampaignCase, ExperimentError,
};
use queryopt_core::fixtures::FixtureKind;
use queryopt_core::gen::{
    clause_intervals, gen_minimum_instance, gen_mst_instance, gen_predictions, gen_true_values,
    parse_cnf, parse_tsplib, GenConfig,
};
use queryopt_core::io::{parse_instance, serialize_instance};
use queryopt_core::learn::{erm_hop, erm_mandatory, sample_realizations};
use queryopt_core::measures::compute_errors;
use queryopt_core::model::{Prediction, SortingInstance};
use queryopt_core::mst::Recovery;
use queryopt_core::run::RunError;
use queryopt_core::state::Oracle;
use queryopt_core::verify::mandatory_set;
use queryopt_core::{ElementId, ProblemInstance, ProblemKind, Scalar};

#[derive(Parser)]
#[command(name = "queryopt", version, about = "Query-competitive algorithms under explorable uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate minimum (or sorting) instances from a DIMACS CNF file.
    GenMin(GenMinArgs),
    /// Generate spanning-tree instances from a TSPLIB point file.
    GenMst(GenMstArgs),
    /// Generate an error-graded prediction sweep for one instance file.
    Predict(PredictArgs),
    /// Run algorithms on one file, or a whole campaign aggregated to CSV.
    Run(RunArgs),
    /// Replay the lower-bound constructions and report every ratio.
    Fixtures(FixturesArgs),
    /// Learn predictions from per-element value distributions.
    Learn(LearnArgs),
}

#[derive(clap::Args)]
struct GenMinArgs {
    /// DIMACS CNF file whose clauses seed the interval pool.
    cnf: PathBuf,
    /// Margin added around each clause's literal range.
    #[arg(long, default_value = "1/2", value_parser = parse_scalar)]
    eps: Scalar,
    /// Base seed; instance k is generated with seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances to generate.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Root intervals drawn per set family.
    #[arg(long, default_value_t = 3)]
    roots: usize,
    /// Maximum intersecting intervals collected around a root.
    #[arg(long, default_value_t = 4)]
    r_w: usize,
    /// Maximum comparison-path length grown from set members.
    #[arg(long, default_value_t = 2)]
    r_d: usize,
    /// Emit the same interval families as sorting instances.
    #[arg(long)]
    sorting: bool,
    /// Output directory for the instance files.
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct GenMstArgs {
    /// TSPLIB EUC_2D file providing the point set.
    tsp: PathBuf,
    /// Base seed; instance k is generated with seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances to generate.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Interval width as a ratio of the true edge weight, in (0, 1].
    #[arg(long, default_value = "1/4", value_parser = parse_scalar)]
    width_ratio: Scalar,
    /// Output directory for the instance files.
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct PredictArgs {
    /// Instance file holding a REAL block.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Seed for the prediction draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of equal-width relative-error bins targeted by the sweep.
    #[arg(long, default_value_t = 25)]
    bins: usize,
    /// Predictions kept per bin.
    #[arg(long, default_value_t = 5)]
    per_bin: usize,
    /// Output directory, one file per prediction.
    #[arg(long, default_value = "predictions")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Instance file with a REAL block: run on this single instance.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Directory of instance files forming the campaign corpus.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// DIMACS CNF file: generate a minimum-problem campaign corpus.
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// TSPLIB file: generate a spanning-tree campaign corpus.
    #[arg(long)]
    tsp: Option<PathBuf>,
    /// Comma-separated algorithm list, e.g. "hop:2,mqd:n,witness".
    #[arg(long)]
    algorithms: Option<String>,
    /// Query budget per iteration; default for algorithms listed without one.
    #[arg(long, default_value_t = 2)]
    gamma: u32,
    /// Spanning-tree phase-two recovery rule for plain "mst" tokens.
    #[arg(long, default_value = "B", value_parser = parse_recovery)]
    recovery: Recovery,
    /// Bin width of the relative-error axis; defaults to 0.1 for spanning
    /// trees and 0.2 otherwise.
    #[arg(long, value_parser = parse_scalar)]
    bin_width: Option<Scalar>,
    /// Instances generated in campaign mode (ignored with --dir).
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Base seed for generated corpora and prediction sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Root intervals drawn per generated set family.
    #[arg(long, default_value_t = 3)]
    roots: usize,
    /// Maximum intersecting intervals collected around a root.
    #[arg(long, default_value_t = 4)]
    r_w: usize,
    /// Maximum comparison-path length grown from set members.
    #[arg(long, default_value_t = 2)]
    r_d: usize,
    /// Interval width ratio for generated spanning-tree instances.
    #[arg(long, default_value = "1/4", value_parser = parse_scalar)]
    width_ratio: Scalar,
    /// Margin for CNF clause intervals.
    #[arg(long, default_value = "1/2", value_parser = parse_scalar)]
    eps: Scalar,
    /// Relative-error bins targeted per prediction sweep.
    #[arg(long, default_value_t = 25)]
    bins: usize,
    /// Predictions kept per bin.
    #[arg(long, default_value_t = 5)]
    per_bin: usize,
    /// Read generated CNF families as sorting instances.
    #[arg(long)]
    sorting: bool,
    /// Print the query order of every single-instance run.
    #[arg(long)]
    transcript: bool,
    /// CSV output path in campaign mode; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FixturesArgs {
    /// Construction to replay; all four when omitted.
    #[arg(long, value_enum)]
    kind: Option<FixtureKindArg>,
    /// Problem flavor of the construction.
    #[arg(long, value_enum, default_value_t = ProblemArg::Min)]
    problem: ProblemArg,
    /// Right-side interval count of the consistency construction.
    #[arg(long, default_value_t = 3)]
    beta: u32,
    /// Pair count of the wrong-prediction construction.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Interval count of the tradeoff construction.
    #[arg(long, default_value_t = 4)]
    a: u32,
    /// Left-side interval count of the tradeoff construction.
    #[arg(long, default_value_t = 2)]
    b: u32,
    /// Copy count of the per-measure trap construction.
    #[arg(long, default_value_t = 3)]
    copies: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKindArg {
    /// Beta right intervals over one left interval.
    Consistency,
    /// Pairs that force any deterministic run to pay double.
    Wrong,
    /// Split family whose pinned branch has zero mandatory-distance error.
    MqdTradeoff,
    /// Disjoint traps off by exactly one in every error measure.
    ErrorMeasure,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ProblemArg {
    Min,
    Sort,
    Mst,
}

impl ProblemArg {
    fn kind(self) -> ProblemKind {
        match self {
            ProblemArg::Min => ProblemKind::Minimum,
            ProblemArg::Sort => ProblemKind::Sorting,
            ProblemArg::Mst => ProblemKind::Mst,
        }
    }
}

#[derive(clap::Args)]
struct LearnArgs {
    /// Instance file holding a DIST block.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Training realizations drawn from the distributions.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Seed for the training draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the instance back with the learned values as its PRED block.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err:#}");
        let code = if invariant_violation(&err) { 2 } else { 1 };
        std::process::exit(code);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMin(args) => cmd_gen_min(args),
        Command::GenMst(args) => cmd_gen_mst(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Run(args) => cmd_run(args),
        Command::Fixtures(args) => cmd_fixtures(args),
        Command::Learn(args) => cmd_learn(args),
    }
}

// Exit code 2 signals that an algorithm broke one of its own invariants,
// wherever in the chain the violation surfaced.
fn invariant_violation(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        if let Some(run) = cause.downcast_ref::<RunError>() {
            matches!(run, RunError::InvariantViolation(_))
        } else if let Some(exp) = cause.downcast_ref::<ExperimentError>() {
            matches!(exp, ExperimentError::Run(RunError::InvariantViolation(_)))
        } else {
            false
        }
    })
}

fn parse_scalar(text: &str) -> Result<Scalar, String> {
    text.parse().map_err(|err| format!("{err}"))
}

fn parse_recovery(text: &str) -> Result<Recovery, String> {
    match text {
        "A" | "a" => Ok(Recovery::A),
        "B" | "b" => Ok(Recovery::B),
        _ => Err(format!("expected A or B, got `{text}`")),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn format_ids(ids: &[ElementId]) -> String {
    if ids.is_empty() {
        return "(none)".into();
    }
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn kind_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Minimum => "minimum",
        ProblemKind::Sorting => "sorting",
        ProblemKind::Mst => "spanning tree",
    }
}

fn as_sorting(instance: ProblemInstance) -> Result<ProblemInstance> {
    Ok(ProblemInstance::Sorting(SortingInstance::new(
        instance.intervals().to_vec(),
        instance.sets().to_vec(),
    )?))
}

fn cmd_gen_min(args: GenMinArgs) -> Result<()> {
    let formula = parse_cnf(&read_file(&args.cnf)?)?;
    let pool = clause_intervals(&formula, args.eps)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let prefix = if args.sorting { "sort" } else { "min" };
    for k in 0..args.count {
        let seed = args.seed.wrapping_add(k as u64);
        let cfg = GenConfig::new(seed, args.roots, args.r_w, args.r_d, Scalar::new(1, 2))?;
        let mut instance = gen_minimum_instance(&pool, &cfg)?;
        if args.sorting {
            instance = as_sorting(instance)?;
        }
        let (real, stats) = gen_true_values(&instance, seed)?;
        let path = args.out.join(format!("{prefix}_{k:03}.txt"));
        write_file(&path, &serialize_instance(&instance, Some(&real), None, None))?;
        println!(
            "wrote {} ({} elements, {} sets, {} mandatory)",
            path.display(),
            instance.n_elements(),
            instance.sets().len(),
            stats.achieved
        );
    }
    Ok(())
}

fn cmd_gen_mst(args: GenMstArgs) -> Result<()> {
    let graph = parse_tsplib(&read_file(&args.tsp)?)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for k in 0..args.count {
        let seed = args.seed.wrapping_add(k as u64);
        let cfg = GenConfig::new(seed, 1, 2, 0, args.width_ratio)?;
        let (instance, real) = gen_mst_instance(&graph, &cfg)?;
        let mst = instance.as_mst().expect("the generator builds spanning-tree instances");
        let path = args.out.join(format!("mst_{k:03}.txt"));
        let text = serialize_instance(&instance, Some(&real), None, None);
        write_file(&path, &text)?;
        println!(
            "wrote {} ({} vertices, {} edges)",
            path.display(),
            mst.n_vertices(),
            mst.edges().len()
        );
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let file = parse_instance(&read_file(&args.input)?)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let Some(real) = file.realization else {
        bail!("{} has no REAL block; the sweep needs true values", args.input.display());
    };
    let cfg = GenConfig::new(args.seed, 1, 2, 0, Scalar::new(1, 4))?
        .binning(args.bins, args.per_bin)?;
    let preds = gen_predictions(&file.instance, &real, &cfg)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for (k, (pred, report)) in preds.iter().enumerate() {
        let name = format!("pred_{k:03}.txt");
        let text = serialize_instance(&file.instance, Some(&real), Some(pred), None);
        write_file(&args.out.join(&name), &text)?;
        println!(
            "{name}  k_num={} k_hop={} k_mqd={}",
            report.k_num, report.k_hop, report.k_mqd
        );
    }
    println!("wrote {} prediction files to {}", preds.len(), args.out.display());
    Ok(())
}

// An algorithm token is a label with an optional `:gamma` suffix.
fn parse_algorithm(token: &str, default_gamma: u32, recovery: Recovery) -> Result<AlgorithmSpec> {
    let (name, gamma) = match token.split_once(':') {
        Some((name, suffix)) => (name, Some(suffix)),
        None => (token, None),
    };
    let numeric = |gamma: Option<&str>| -> Result<u32> {
        match gamma {
            None => Ok(default_gamma),
            Some(text) => text
                .parse()
                .with_context(|| format!("algorithm `{token}` needs a numeric gamma")),
        }
    };
    let bare = |gamma: Option<&str>| -> Result<()> {
        if gamma.is_some() {
            bail!("algorithm `{name}` does not take a gamma");
        }
        Ok(())
    };
    Ok(match name {
        "hop" => AlgorithmSpec::Hop { gamma: numeric(gamma)? },
        "mqd" if gamma == Some("n") => AlgorithmSpec::MqdAdaptive,
        "mqd" => AlgorithmSpec::Mqd { gamma: numeric(gamma)? },
        "witness" | "witness-baseline" => {
            bare(gamma)?;
            AlgorithmSpec::WitnessBaseline
        }
        "sort-single" => {
            bare(gamma)?;
            AlgorithmSpec::SortSingle
        }
        "sort-hop" => AlgorithmSpec::SortHop { gamma: numeric(gamma)? },
        "sort-mqd" => AlgorithmSpec::SortMqd { gamma: numeric(gamma)? },
        "mst" => AlgorithmSpec::Mst { gamma: numeric(gamma)?, recovery },
        "mst-a" => AlgorithmSpec::Mst { gamma: numeric(gamma)?, recovery: Recovery::A },
        "mst-b" => AlgorithmSpec::Mst { gamma: numeric(gamma)?, recovery: Recovery::B },
        "cycle" | "cycle-baseline" => {
            bare(gamma)?;
            AlgorithmSpec::MstBaseline
        }
        _ => bail!(
            "unknown algorithm `{token}`; expected hop, mqd, mqd:n, witness, sort-single, \
             sort-hop, sort-mqd, mst, mst-a, mst-b, or cycle"
        ),
    })
}

fn parse_algorithms(list: &str, default_gamma: u32, recovery: Recovery) -> Result<Vec<AlgorithmSpec>> {
    list.split(',')
        .map(|token| parse_algorithm(token.trim(), default_gamma, recovery))
        .collect()
}

// True when no element belongs to more than one set, the shape the
// specialized sorting algorithm requires.
fn disjoint_sets(instance: &ProblemInstance) -> bool {
    let mut seen = vec![false; instance.n_elements()];
    for set in instance.sets() {
        for id in set {
            if seen[id.idx()] {
                return false;
            }
            seen[id.idx()] = true;
        }
    }
    true
}

fn roster(args: &RunArgs, kind: ProblemKind, disjoint: bool) -> Result<Vec<AlgorithmSpec>> {
    if let Some(list) = &args.algorithms {
        return parse_algorithms(list, args.gamma, args.recovery);
    }
    let gamma = args.gamma;
    Ok(match kind {
        ProblemKind::Minimum => vec![
            AlgorithmSpec::Hop { gamma },
            AlgorithmSpec::Mqd { gamma },
            AlgorithmSpec::MqdAdaptive,
            AlgorithmSpec::WitnessBaseline,
        ],
        ProblemKind::Sorting => {
            let mut out = Vec::new();
            if disjoint {
                out.push(AlgorithmSpec::SortSingle);
            }
            out.push(AlgorithmSpec::SortHop { gamma });
            out.push(AlgorithmSpec::SortMqd { gamma });
            out
        }
        ProblemKind::Mst => vec![
            AlgorithmSpec::Mst { gamma, recovery: Recovery::A },
            AlgorithmSpec::Mst { gamma, recovery: Recovery::B },
            AlgorithmSpec::MstBaseline,
        ],
    })
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let sources = [
        args.input.is_some(),
        args.dir.is_some(),
        args.cnf.is_some(),
        args.tsp.is_some(),
    ];
    if sources.iter().filter(|&&s| s).count() != 1 {
        bail!("pass exactly one of --in, --dir, --cnf, or --tsp");
    }
    if let Some(path) = args.input.clone() {
        run_single(&args, &path)
    } else {
        run_campaign_mode(&args)
    }
}

fn run_single(args: &RunArgs, path: &Path) -> Result<()> {
    let file = parse_instance(&read_file(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let instance = file.instance;
    let Some(real) = file.realization else {
        bail!("{} has no REAL block; runs need the true values", path.display());
    };
    let (pred, origin) = match file.prediction {
        Some(pred) => (pred, "the file's PRED block"),
        None => (Prediction::new(&instance, real.values().to_vec())?, "correct predictions"),
    };
    println!(
        "{} instance, {} elements, predictions from {}",
        kind_name(instance.kind()),
        instance.n_elements(),
        origin
    );
    let algorithms = roster(args, instance.kind(), disjoint_sets(&instance))?;
    let oracle = Oracle::new(&real);
    println!(
        "{:<18} {:>5} {:>7} {:>5} {:>8} {:>6} {:>6} {:>6}",
        "algorithm", "gamma", "queries", "opt", "ratio", "k_num", "k_hop", "k_mqd"
    );
    for alg in algorithms {
        let run = alg.run(&instance, &pred, &oracle)?;
        println!(
            "{:<18} {:>5} {:>7} {:>5} {:>8} {:>6} {:>6} {:>6}",
            alg.label(),
            alg.gamma_label(),
            run.queries,
            run.opt,
            run.ratio.to_decimal_string(),
            run.errors.k_num,
            run.errors.k_hop,
            run.errors.k_mqd
        );
        if args.transcript {
            println!("  queries: {}", format_ids(&run.transcript));
        }
    }
    Ok(())
}

fn sweep_config(args: &RunArgs, seed: u64) -> Result<GenConfig> {
    Ok(GenConfig::new(seed, args.roots, args.r_w, args.r_d, args.width_ratio)?
        .binning(args.bins, args.per_bin)?)
}

// Builds the campaign corpus plus the problem kind to assume if it is empty.
fn build_corpus(args: &RunArgs) -> Result<(Vec<CampaignCase>, ProblemKind)> {
    if let Some(dir) = &args.dir {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .map(|entry| entry.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.sort();
        let mut cases = Vec::new();
        for (k, path) in paths.iter().enumerate() {
            let file = parse_instance(&read_file(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let Some(real) = file.realization else {
                bail!("{} has no REAL block", path.display());
            };
            let predictions = match file.prediction {
                Some(pred) => vec![pred],
                None => {
                    let cfg = sweep_config(args, args.seed.wrapping_add(k as u64))?;
                    gen_predictions(&file.instance, &real, &cfg)?
                        .into_iter()
                        .map(|(pred, _)| pred)
                        .collect()
                }
            };
            cases.push(CampaignCase { instance: file.instance, realization: real, predictions });
        }
        return Ok((cases, ProblemKind::Minimum));
    }
    if let Some(cnf) = &args.cnf {
        let formula = parse_cnf(&read_file(cnf)?)?;
        let pool = clause_intervals(&formula, args.eps)?;
        let mut cases = Vec::new();
        for k in 0..args.count {
            let cfg = sweep_config(args, args.seed.wrapping_add(k as u64))?;
            let mut instance = gen_minimum_instance(&pool, &cfg)?;
            if args.sorting {
                instance = as_sorting(instance)?;
            }
            let (real, _) = gen_true_values(&instance, cfg.seed)?;
            let predictions = gen_predictions(&instance, &real, &cfg)?
                .into_iter()
                .map(|(pred, _)| pred)
                .collect();
            cases.push(CampaignCase { instance, realization: real, predictions });
        }
        let kind = if args.sorting { ProblemKind::Sorting } else { ProblemKind::Minimum };
        return Ok((cases, kind));
    }
    let tsp = args.tsp.as_ref().expect("one source flag is set");
    let graph = parse_tsplib(&read_file(tsp)?)?;
    let mut cases = Vec::new();
    for k in 0..args.count {
        let cfg = sweep_config(args, args.seed.wrapping_add(k as u64))?;
        let (instance, real) = gen_mst_instance(&graph, &cfg)?;
        let predictions = gen_predictions(&instance, &real, &cfg)?
            .into_iter()
            .map(|(pred, _)| pred)
            .collect();
        cases.push(CampaignCase { instance, realization: real, predictions });
    }
    Ok((cases, ProblemKind::Mst))
}

fn run_campaign_mode(args: &RunArgs) -> Result<()> {
    let (cases, fallback) = build_corpus(args)?;
    let kind = cases.first().map(|c| c.instance.kind()).unwrap_or(fallback);
    if cases.iter().any(|c| c.instance.kind() != kind) {
        bail!("the corpus mixes problem kinds; run them separately");
    }
    let disjoint = cases.iter().all(|c| disjoint_sets(&c.instance));
    let algorithms = roster(args, kind, disjoint)?;
    let runs: usize = cases.iter().map(|c| c.predictions.len() * algorithms.len()).sum();
    let campaign = Campaign {
        cases,
        algorithms,
        bin_width: args.bin_width.unwrap_or_else(|| default_bin_width(kind)),
    };
    let rows = run_campaign(&campaign)?;
    let csv = to_csv(&rows);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!(
                "wrote {} ({} rows from {} cases, {} runs)",
                path.display(),
                rows.len(),
                campaign.cases.len(),
                runs
            );
        }
        None => {
            eprintln!("{} cases, {} runs, {} rows", campaign.cases.len(), runs, rows.len());
            print!("{csv}");
        }
    }
    Ok(())
}

fn fixture_label(kind: FixtureKind) -> String {
    match kind {
        FixtureKind::ConsistencyTradeoff { beta } => format!("consistency(beta={beta})"),
        FixtureKind::WrongPredictions { n } => format!("wrong-predictions(n={n})"),
        FixtureKind::MqdTradeoff { a, b } => format!("mqd-tradeoff(a={a},b={b})"),
        FixtureKind::ErrorMeasure { copies } => format!("error-measure(copies={copies})"),
    }
}

fn cmd_fixtures(args: FixturesArgs) -> Result<()> {
    let kinds = match args.kind {
        Some(FixtureKindArg::Consistency) => {
            vec![FixtureKind::ConsistencyTradeoff { beta: args.beta }]
        }
        Some(FixtureKindArg::Wrong) => vec![FixtureKind::WrongPredictions { n: args.n }],
        Some(FixtureKindArg::MqdTradeoff) => {
            vec![FixtureKind::MqdTradeoff { a: args.a, b: args.b }]
        }
        Some(FixtureKindArg::ErrorMeasure) => {
            vec![FixtureKind::ErrorMeasure { copies: args.copies }]
        }
        None => vec![
            FixtureKind::ConsistencyTradeoff { beta: args.beta },
            FixtureKind::WrongPredictions { n: args.n },
            FixtureKind::MqdTradeoff { a: args.a, b: args.b },
            FixtureKind::ErrorMeasure { copies: args.copies },
        ],
    };
    println!(
        "{:<28} {:<18} {:>5} {:>7} {:>5} {:>8}",
        "fixture", "algorithm", "gamma", "queries", "opt", "ratio"
    );
    let mut violations = 0usize;
    for kind in kinds {
        for line in verify_fixture(kind, args.problem.kind())? {
            let marker = if line.below_floor { "  below floor!" } else { "" };
            println!(
                "{:<28} {:<18} {:>5} {:>7} {:>5} {:>8}{marker}",
                fixture_label(kind),
                line.algorithm,
                line.gamma,
                line.queries,
                line.opt,
                line.ratio.to_decimal_string()
            );
            violations += usize::from(line.below_floor);
        }
    }
    if violations > 0 {
        return Err(anyhow::Error::new(RunError::InvariantViolation(format!(
            "{violations} fixture run(s) undercut the theoretical floor"
        ))));
    }
    println!("all ratios at or above their floors");
    Ok(())
}

fn cmd_learn(args: LearnArgs) -> Result<()> {
    let file = parse_instance(&read_file(&args.input)?)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let instance = file.instance;
    let Some(dists) = file.distributions else {
        bail!("{} has no DIST block; learning needs value distributions", args.input.display());
    };
    let training = sample_realizations(&instance, &dists, args.samples, args.seed)?;
    let learned_set = erm_mandatory(&instance, &training)?;
    let learned_pred = erm_hop(&instance, &training)?;
    println!("trained on {} samples (seed {})", training.len(), args.seed);
    println!("mandatory-set minimizer: {}", format_ids(&learned_set));
    println!("hop minimizer (open elements):");
    for i in instance.element_ids() {
        if instance.interval(i).is_open() {
            println!("  {i}: {}", learned_pred.value(i));
        }
    }
    if let Some(real) = &file.realization {
        let report = compute_errors(&instance, real, &learned_pred);
        println!("true mandatory set: {}", format_ids(&mandatory_set(&instance, real)));
        println!(
            "against REAL: k_num={} k_hop={} k_mqd={}",
            report.k_num, report.k_hop, report.k_mqd
        );
    }
    if let Some(out) = &args.out {
        let text =
            serialize_instance(&instance, file.realization.as_ref(), Some(&learned_pred), Some(&dists));
        write_file(out, &text)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
