mod output;
mod simconfig;

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use influence_core::calibrator::{self, GridSpec, SweepOptions, DEFAULT_TOLERANCE, REFERRAL_TARGET};
use influence_core::cascade::activity_histogram;
use influence_core::estimator::{self, DEFAULT_DELTA};
use influence_core::graph::{self, DEFAULT_SWAPS_PER_EDGE};
use influence_core::homophily;
use influence_core::io::{self, TimeFormat};
use influence_core::manifest::RunManifest;
use influence_core::simulator::{self, ExternalSpike};
use influence_core::{
    Attribution, Cascade, EvalAt, GroundTruth, Horizon, Network, PeerParams, SeedNode, SimConfig,
};
use log::{info, warn};
use serde_json::json;

use output::OutputSet;
use simconfig::{parse_steps, FileConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "influence", version, about = "Peer vs external influence decomposition of activation cascades")]
struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true, env = "INFLUENCE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a labelled cascade with peer and external influence.
    Simulate(SimulateArgs),
    /// Decompose a cascade into peer and external activations.
    Estimate(EstimateArgs),
    /// Sweep the (lambda, p0) grid against a target peer fraction.
    Calibrate(CalibrateArgs),
    /// Degree-preserving randomization of a network.
    Rewire(RewireArgs),
    /// Attribute homophily profiles.
    Homophily(HomophilyArgs),
    /// Activation counts per time bin.
    Histogram(HistogramArgs),
}

#[derive(Args)]
struct NetworkArgs {
    /// Edge list CSV (`source,target`).
    #[arg(long)]
    edges: PathBuf,
    /// The edge list starts with a header row.
    #[arg(long)]
    header: bool,
    /// `dense_id,original_id` table for an edge list written with dense ids.
    #[arg(long)]
    id_map: Option<PathBuf>,
    /// Restrict to the largest connected component.
    #[arg(long)]
    giant_component: bool,
}

#[derive(Args)]
struct CascadeArgs {
    /// Activations CSV (`id,timestamp`).
    #[arg(long)]
    activations: PathBuf,
    #[arg(long, default_value = "numeric")]
    time_format: TimeFormat,
    /// Offset added to ISO timestamps, e.g. `+01:00`.
    #[arg(long, allow_hyphen_values = true)]
    utc_offset: Option<String>,
    /// Drop activations before this time.
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    /// Drop activations after this time.
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// `key = value` file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    lambda_p: Option<f64>,
    /// Initial strength of each external spike.
    #[arg(long)]
    q0: Option<f64>,
    /// Decay rate of each external spike.
    #[arg(long)]
    lambda_e: Option<f64>,
    /// Comma-separated firing steps.
    #[arg(long)]
    spike_at: Option<String>,
    #[arg(long)]
    steps: Option<u32>,
    /// Original id of the seed node (default: drawn at random).
    #[arg(long)]
    seed_node: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[command(flatten)]
    cascade: CascadeArgs,
    #[arg(long, default_value_t = 0.6)]
    p0: f64,
    #[arg(long, default_value_t = 0.001)]
    lambda: f64,
    /// Window length.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Window step (default: delta).
    #[arg(long)]
    stride: Option<f64>,
    #[arg(long, default_value = "window-end")]
    eval_at: EvalAt,
    /// Also emit the no-prior-friend baseline series.
    #[arg(long)]
    baseline: bool,
    /// Simulator labels to score against (`id,label,both_fired`).
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[command(flatten)]
    cascade: CascadeArgs,
    /// Comma-separated lambda values (default: 7 log-spaced on [1e-4, 1e-2]).
    #[arg(long)]
    lambdas: Option<String>,
    /// Comma-separated p0 values (default: 0.1..0.9).
    #[arg(long)]
    p0s: Option<String>,
    #[arg(long, default_value_t = REFERRAL_TARGET)]
    target: f64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Calibration period start (default: first activation).
    #[arg(long, allow_hyphen_values = true)]
    period_start: Option<f64>,
    /// Calibration period end (default: one day after the start).
    #[arg(long, allow_hyphen_values = true)]
    period_end: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value = "window-end")]
    eval_at: EvalAt,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RewireArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[arg(long, default_value_t = DEFAULT_SWAPS_PER_EDGE)]
    swaps_per_edge: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct HomophilyArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Attributes CSV (`id,vote,age,gender,locality`).
    #[arg(long)]
    attributes: PathBuf,
    /// vote, gender, locality or age-band.
    #[arg(long, default_value = "vote")]
    attribute: String,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Bin width of the age-gap histogram, in years.
    #[arg(long, default_value_t = 1.0)]
    age_bin: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct HistogramArgs {
    #[command(flatten)]
    cascade: CascadeArgs,
    /// Bin width (default: one hour).
    #[arg(long, default_value_t = 3600.0)]
    bin: f64,
    /// `id,group` table used with `--group`.
    #[arg(long, requires = "group")]
    groups: Option<PathBuf>,
    #[arg(long, requires = "groups")]
    group: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn load_network(args: &NetworkArgs, manifest: &mut RunManifest) -> Result<Network> {
    let (net, report) = match &args.id_map {
        Some(map) => io::read_network_with_id_map(open(&args.edges)?, args.header, open(map)?),
        None => io::read_network(open(&args.edges)?, args.header),
    }
    .with_context(|| format!("loading {}", args.edges.display()))?;
    manifest.add_input("edges", &args.edges)?;
    if let Some(map) = &args.id_map {
        manifest.add_input("id_map", map)?;
    }
    info!(
        "network: {} nodes, {} edges ({} self-loops, {} duplicates dropped)",
        net.node_count(),
        net.edge_count(),
        report.self_loops,
        report.duplicates
    );
    if !args.giant_component {
        return Ok(net);
    }
    let (gc, _) = graph::giant_component(&net)?;
    info!("giant component: {} of {} nodes", gc.node_count(), net.node_count());
    Ok(gc)
}

fn horizon_of(args: &CascadeArgs, rows: &[(String, f64)]) -> Result<Option<Horizon>> {
    if args.t_min.is_none() && args.t_max.is_none() {
        return Ok(None);
    }
    let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let start = args.t_min.unwrap_or(lo);
    let end = args.t_max.unwrap_or(hi);
    if !start.is_finite() || !end.is_finite() {
        bail!("cannot infer horizon bound from an empty activation file");
    }
    Ok(Some(Horizon::new(start, end)?))
}

fn read_rows(args: &CascadeArgs, manifest: &mut RunManifest) -> Result<Vec<(String, f64)>> {
    let offset = match &args.utc_offset {
        Some(s) => io::parse_utc_offset(s)?,
        None => 0,
    };
    let rows = io::read_activations(open(&args.activations)?, args.time_format, offset)
        .with_context(|| format!("reading {}", args.activations.display()))?;
    manifest.add_input("activations", &args.activations)?;
    Ok(rows)
}

fn load_cascade(args: &CascadeArgs, net: &Network, manifest: &mut RunManifest) -> Result<Cascade> {
    let rows = read_rows(args, manifest)?;
    let (cascade, report) = io::build_cascade(net, &rows, horizon_of(args, &rows)?)?;
    if report.unknown_ids > 0 {
        warn!("{} activation(s) for ids not in the network skipped", report.unknown_ids);
    }
    if report.outside_horizon > 0 {
        info!("{} activation(s) outside the horizon dropped", report.outside_horizon);
    }
    Ok(cascade)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number `{x}`")))
        .collect()
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let defaults = SimConfig::default();
    let p0 = args.p0.or(file.p0).unwrap_or(defaults.peer.p0);
    let lambda_p = args.lambda_p.or(file.lambda_p).unwrap_or(defaults.peer.lambda);
    let q0 = args.q0.or(file.q0).unwrap_or(defaults.spikes[0].q0);
    let lambda_e = args.lambda_e.or(file.lambda_e).unwrap_or(defaults.spikes[0].lambda_e);
    let spike_at = match &args.spike_at {
        Some(s) => Some(parse_steps(s)?),
        None => file.spike_at.clone(),
    };
    let mut spikes = Vec::new();
    if args.spike_at.is_some() || args.q0.is_some() || args.lambda_e.is_some() || file.spikes.is_empty() {
        let at = spike_at.unwrap_or_else(|| defaults.spikes.iter().map(|s| s.t_fire).collect());
        for t in at {
            spikes.push(ExternalSpike::new(q0, lambda_e, t)?);
        }
    }
    for &(q, l, t) in &file.spikes {
        spikes.push(ExternalSpike::new(q, l, t)?);
    }
    let steps = args.steps.or(file.steps).unwrap_or(defaults.steps);
    let seed = args.seed.or(file.seed).unwrap_or(defaults.rng_seed);
    let seed_id = args.seed_node.clone().or(file.seed_node.clone());

    let mut manifest = RunManifest::new("simulate", VERSION, serde_json::Value::Null);
    let net = load_network(&args.network, &mut manifest)?;
    if let Some(p) = &args.config {
        manifest.add_input("config", p)?;
    }
    let seed_node = match seed_id.as_deref() {
        None | Some("random") => SeedNode::Random,
        Some(id) => SeedNode::Fixed(
            net.node_of(id)
                .ok_or_else(|| influence_core::Error::UnknownNode(id.to_owned()))?,
        ),
    };
    let cfg = SimConfig {
        peer: PeerParams::new(p0, lambda_p)?,
        spikes,
        steps,
        seed_node,
        rng_seed: seed,
    };
    let sim = simulator::simulate(&net, &cfg)?;
    println!(
        "simulated {} steps: {} activated ({} peer, {} external, 1 seed); seed node {}",
        steps,
        sim.cascade.activated_count(),
        sim.count(GroundTruth::Peer),
        sim.count(GroundTruth::External),
        net.original_id(sim.seed())
    );

    manifest.parameters = json!({
        "p0": p0,
        "lambda_p": lambda_p,
        "spikes": cfg.spikes,
        "steps": steps,
        "seed_node": seed_id.unwrap_or_else(|| "random".to_owned()),
        "giant_component": args.network.giant_component,
    });
    manifest.seeds.push(seed);
    let mut out = OutputSet::new();
    out.render("activations.csv", |w| io::write_activations(&net, &sim.cascade, w))?;
    out.render("ground_truth.csv", |w| io::write_ground_truth(&net, &sim, w))?;
    out.commit(&args.out, manifest)?;
    Ok(())
}

#[derive(Default)]
struct Confusion {
    /// `[truth][estimate]`, index 0 = peer, 1 = external.
    counts: [[usize; 2]; 2],
    unclassified: usize,
}

impl Confusion {
    fn balanced_accuracy(&self) -> Option<f64> {
        let recall = |r: usize| {
            let n = self.counts[r][0] + self.counts[r][1];
            (n > 0).then(|| self.counts[r][r] as f64 / n as f64)
        };
        Some((recall(0)? + recall(1)?) / 2.0)
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("estimate", VERSION, serde_json::Value::Null);
    let net = load_network(&args.network, &mut manifest)?;
    let cascade = load_cascade(&args.cascade, &net, &mut manifest)?;
    let params = PeerParams::new(args.p0, args.lambda)?;
    let stride = args.stride.unwrap_or(args.delta);
    let series = estimator::influence_series(&net, &cascade, params, args.delta, stride, args.eval_at)?;
    if let Some(t) = series.saturated_at {
        warn!(
            "network saturated at t={t}; {} activation(s) left unclassified",
            series.unclassified_activations
        );
    }
    println!(
        "{} windows: {} activations, {} peer, {} external",
        series.windows.len(),
        series.total_newly_activated(),
        series.total_peer(),
        series.total_external()
    );

    manifest.parameters = json!({
        "p0": args.p0,
        "lambda": args.lambda,
        "delta": args.delta,
        "stride": stride,
        "eval_at": args.eval_at,
        "baseline": args.baseline,
        "time_format": args.cascade.time_format,
        "utc_offset": args.cascade.utc_offset,
        "t_min": args.cascade.t_min,
        "t_max": args.cascade.t_max,
        "giant_component": args.network.giant_component,
    });
    let mut out = OutputSet::new();
    out.render("series.csv", |w| io::write_series(&series, w))?;
    out.render("series.json", |w| io::write_series_json(&series, w))?;
    out.render("labels.csv", |w| io::write_node_labels(&net, &series, w))?;
    if args.baseline {
        let base = estimator::baseline_series(&net, &cascade, args.delta, stride)?;
        out.render("baseline.csv", |w| io::write_baseline_series(&base, w))?;
    }
    if let Some(path) = &args.ground_truth {
        let truth = io::read_ground_truth(open(path)?, &net)
            .with_context(|| format!("reading {}", path.display()))?;
        manifest.add_input("ground_truth", path)?;
        let labels = series.labels();
        let mut c = Confusion::default();
        for (node, t) in &truth {
            let r = match t {
                GroundTruth::Peer => 0,
                GroundTruth::External => 1,
                GroundTruth::Seed => continue,
            };
            match labels.get(node) {
                Some(Attribution::Peer) => c.counts[r][0] += 1,
                Some(Attribution::External) => c.counts[r][1] += 1,
                None => c.unclassified += 1,
            }
        }
        println!("confusion (truth \\ estimate): peer/peer {}  peer/external {}", c.counts[0][0], c.counts[0][1]);
        println!("                               external/peer {}  external/external {}", c.counts[1][0], c.counts[1][1]);
        if c.unclassified > 0 {
            println!("unclassified: {}", c.unclassified);
        }
        let ba = c.balanced_accuracy();
        if let Some(ba) = ba {
            println!("balanced accuracy: {ba:.4}");
        }
        let body = json!({
            "truth_peer": {"peer": c.counts[0][0], "external": c.counts[0][1]},
            "truth_external": {"peer": c.counts[1][0], "external": c.counts[1][1]},
            "unclassified": c.unclassified,
            "balanced_accuracy": ba,
        });
        let mut bytes = serde_json::to_vec_pretty(&body)?;
        bytes.push(b'\n');
        out.add("confusion.json", bytes);
    }
    out.commit(&args.out, manifest)?;
    Ok(())
}

fn calibrate(args: CalibrateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("calibrate", VERSION, serde_json::Value::Null);
    let net = load_network(&args.network, &mut manifest)?;
    let cascade = load_cascade(&args.cascade, &net, &mut manifest)?;
    let mut grid = GridSpec::default();
    if let Some(s) = &args.lambdas {
        grid.lambda_values = parse_list(s)?;
    }
    if let Some(s) = &args.p0s {
        grid.p0_values = parse_list(s)?;
    }
    let mut opts = SweepOptions::for_cascade(&cascade);
    let start = args.period_start.unwrap_or(opts.period.start);
    let end = args
        .period_end
        .unwrap_or_else(|| (start + calibrator::ONE_DAY).min(cascade.horizon().end).max(start));
    opts.period = Horizon::new(start, end)?;
    opts.target = args.target;
    opts.tolerance = args.tolerance;
    opts.delta = args.delta;
    opts.eval_at = args.eval_at;

    let result = calibrator::sweep(&net, &cascade, &grid, opts)?;
    println!(
        "{} of {} grid points within {} of target {:.4}",
        result.selected.len(),
        grid.lambda_values.len() * grid.p0_values.len(),
        opts.tolerance,
        opts.target
    );
    if let Some(n) = &result.nearest {
        println!("nearest: lambda={} p0={} fraction={:.4}", n.lambda, n.p0, n.peer_fraction);
    }
    let (rho_p0, rho_lambda) = calibrator::grid_trends(&result);

    manifest.parameters = json!({
        "lambda_values": grid.lambda_values,
        "p0_values": grid.p0_values,
        "options": opts,
        "giant_component": args.network.giant_component,
    });
    let summary = json!({
        "selected": result.selected,
        "nearest": result.nearest,
        "illustrative": result.illustrative,
        "selected_curve_spread": result.selected_curve_spread,
        "spearman_p0": rho_p0,
        "spearman_lambda": rho_lambda,
    });
    let mut bytes = serde_json::to_vec_pretty(&summary)?;
    bytes.push(b'\n');
    let mut out = OutputSet::new();
    out.render("grid.csv", |w| io::write_grid(&result, w))?;
    out.add("calibration.json", bytes);
    out.commit(&args.out, manifest)?;
    Ok(())
}

fn rewire(args: RewireArgs) -> Result<()> {
    let mut manifest = RunManifest::new("rewire", VERSION, serde_json::Value::Null);
    let net = load_network(&args.network, &mut manifest)?;
    let (rewired, report) = graph::configuration_rewire(&net, args.swaps_per_edge, args.seed)?;
    println!(
        "{} of {} swaps accepted; edge overlap with input {:.4}",
        report.accepted,
        report.attempted,
        graph::edge_jaccard(&net, &rewired)
    );
    manifest.parameters = json!({
        "swaps_per_edge": args.swaps_per_edge,
        "giant_component": args.network.giant_component,
    });
    manifest.seeds.push(args.seed);
    let mut out = OutputSet::new();
    out.render("edges.csv", |w| io::write_edge_list(&rewired, w))?;
    out.render("id_map.csv", |w| io::write_id_map(&rewired, w))?;
    out.commit(&args.out, manifest)?;
    Ok(())
}

fn homophily(args: HomophilyArgs) -> Result<()> {
    let mut manifest = RunManifest::new("homophily", VERSION, serde_json::Value::Null);
    let net = load_network(&args.network, &mut manifest)?;
    let (attrs, skipped) = io::read_attributes(open(&args.attributes)?, &net)
        .with_context(|| format!("reading {}", args.attributes.display()))?;
    manifest.add_input("attributes", &args.attributes)?;
    let same = homophily::same_fraction_histogram(&net, &attrs, &args.attribute, args.bins)?;
    let mixing = homophily::mixing_matrix(&net, &attrs, &args.attribute)?;
    let gaps = homophily::age_gap_distribution(&net, &attrs, args.age_bin)?;
    println!(
        "{}: {} nodes scored ({} missing, {} without scored neighbours); assortativity {}",
        args.attribute,
        same.counts.iter().sum::<usize>(),
        same.excluded_missing,
        same.excluded_no_neighbors,
        mixing.assortativity.map_or("undefined".to_owned(), |r| format!("{r:.4}"))
    );
    manifest.parameters = json!({
        "attribute": args.attribute,
        "bins": args.bins,
        "age_bin": args.age_bin,
        "giant_component": args.network.giant_component,
    });
    let summary = json!({
        "attribute": args.attribute,
        "attribute_rows_skipped": skipped,
        "excluded_missing": same.excluded_missing,
        "excluded_no_neighbors": same.excluded_no_neighbors,
        "mixing_edges_counted": mixing.edges_counted,
        "mixing_edges_skipped": mixing.edges_skipped,
        "assortativity": mixing.assortativity,
        "age_gap_edges_skipped": gaps.edges_skipped,
    });
    let mut bytes = serde_json::to_vec_pretty(&summary)?;
    bytes.push(b'\n');
    let mut out = OutputSet::new();
    out.render("same_fraction.csv", |w| io::write_same_fraction(&same, w))?;
    out.render("mixing.csv", |w| io::write_mixing(&mixing, w))?;
    out.render("age_gap.csv", |w| io::write_age_gaps(&gaps, w))?;
    out.add("homophily.json", bytes);
    out.commit(&args.out, manifest)?;
    Ok(())
}

fn histogram(args: HistogramArgs) -> Result<()> {
    let mut manifest = RunManifest::new("histogram", VERSION, serde_json::Value::Null);
    let rows = read_rows(&args.cascade, &mut manifest)?;
    let mut ids: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for (id, _) in &rows {
        if seen.insert(id.as_str()) {
            ids.push(id.clone());
        }
    }
    let (net, _) = Network::with_ids(ids, [])?;
    let (cascade, _) = io::build_cascade(&net, &rows, horizon_of(&args.cascade, &rows)?)?;
    let subset = match (&args.groups, &args.group) {
        (Some(path), Some(group)) => {
            let s = io::read_group(open(path)?, &net, group)
                .with_context(|| format!("reading {}", path.display()))?;
            manifest.add_input("groups", path)?;
            Some(s)
        }
        _ => None,
    };
    let bins = activity_histogram(&cascade, args.bin, subset.as_ref())?;
    println!(
        "{} bins, {} activations counted",
        bins.len(),
        bins.iter().map(|b| b.1).sum::<usize>()
    );
    manifest.parameters = json!({
        "bin": args.bin,
        "group": args.group,
        "time_format": args.cascade.time_format,
        "utc_offset": args.cascade.utc_offset,
        "t_min": args.cascade.t_min,
        "t_max": args.cascade.t_max,
    });
    let mut out = OutputSet::new();
    out.render("histogram.csv", |w| io::write_histogram(&bins, w))?;
    out.commit(&args.out, manifest)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Rewire(a) => rewire(a),
        Command::Homophily(a) => homophily(a),
        Command::Histogram(a) => histogram(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
