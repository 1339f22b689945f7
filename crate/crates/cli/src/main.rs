//! `eqhs`: generate equalization topologies, analyze them, simulate packs
//! and run Monte Carlo studies.

mod render;
mod scenario;
mod soc;

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eqhs::analysis::{
    analyze, default_max_steps, simulate_until_balanced, te_upper_bound_for_policy, BoundRequest, SimOptions,
};
use eqhs::dynamics::{ControlMode, ControlPolicy, PackConfig};
use eqhs::hypergraph::{make_topology, TopologyDoc, TopologyKind};
use eqhs::montecarlo::{
    format_ranking, histogram_csv, histogram_file_name, ranking_by_lambda2, ranking_by_mean, report_csv, run_study,
    McStudy,
};

use crate::render::{matrix_text, sig4};
use crate::scenario::{read_topology_file, Scenario};
use crate::soc::{parse_fraction, parse_soc_list};

/// Exit status 2: the analysis answered "no" (uncontrollable, refused run).
const EXIT_NEGATIVE: u8 = 2;

#[derive(Parser)]
#[command(name = "eqhs", version, about = "Battery equalization hypergraph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a canonical topology and write it as JSON.
    Topology(TopologyArgs),
    /// Rank test, spectral gap and time bound for a topology file.
    Analyze(AnalyzeArgs),
    /// Simulate a scenario until balanced; writes a trajectory CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo study.
    Mc(McArgs),
}

#[derive(Args)]
struct TopologyArgs {
    #[arg(long)]
    kind: TopologyKind,
    #[arg(long)]
    n: usize,
    /// Module count (module-based kinds only).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Equalizer current limit, amperes.
    #[arg(long, default_value_t = 0.5)]
    current: f64,
    /// 1-based equalizer labels to remove, e.g. `7,8`.
    #[arg(long, value_delimiter = ',')]
    without: Vec<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    print_matrix: bool,
}

#[derive(Args)]
struct PackArgs {
    /// Cell capacity, Ah.
    #[arg(long, default_value_t = 3.1)]
    capacity: f64,
    /// Per-cell capacities, Ah (overrides --capacity).
    #[arg(long, value_delimiter = ',')]
    capacities: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    efficiency: f64,
    /// Sampling period T_0, seconds.
    #[arg(long, default_value_t = 1.0)]
    sample_period: f64,
}

impl PackArgs {
    fn build(&self, n: usize) -> Result<PackConfig<f64>> {
        let caps = if self.capacities.is_empty() { vec![self.capacity; n] } else { self.capacities.clone() };
        if caps.len() != n {
            bail!("{} capacities given for {n} cells", caps.len());
        }
        Ok(PackConfig::new(caps, self.efficiency, self.sample_period)?)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    topology: PathBuf,
    #[command(flatten)]
    pack: PackArgs,
    /// Proportional gain; with --x0 adds the equalization-time bound.
    #[arg(long)]
    gain: Option<f64>,
    /// Initial SOCs, e.g. `62%,48%,63%,42%`.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, default_value = "0.1%")]
    epsilon: String,
}

#[derive(Args)]
struct SimulateArgs {
    scenario: PathBuf,
    /// Trajectory CSV; omitted means summary only.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record every N-th step (the final step is always recorded).
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// Simulate even if the rank test fails.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct McArgs {
    study: PathBuf,
    /// Master seed; overrides any seed in the study file.
    #[arg(long)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EQHS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Topology(a) => cmd_topology(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Mc(a) => cmd_mc(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_topology(a: &TopologyArgs) -> Result<u8> {
    let mut t = make_topology(a.kind, a.n, a.m, a.current)?;
    if !a.without.is_empty() {
        t = t.without_edges(&a.without)?;
    }
    let json = serde_json::to_string_pretty(&TopologyDoc::from(&t))? + "\n";
    match &a.out {
        Some(p) => fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?,
        None if !a.print_matrix => print!("{json}"),
        None => {}
    }
    if a.print_matrix {
        println!("{} n={} ({} equalizers)", a.kind, t.n(), t.edge_count());
        print!("{}", matrix_text(&t)?);
    }
    Ok(0)
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<u8> {
    let t = read_topology_file(&a.topology)?;
    let pack = a.pack.build(t.n())?;
    let eps = parse_fraction(&a.epsilon)?;
    let x0 = a.x0.as_deref().map(parse_soc_list).transpose()?;
    let policy = a.gain.map(|k| ControlPolicy::uniform_proportional(k, &pack, &t)).transpose()?;
    let bound = match (&policy, &x0) {
        (Some(p), Some(x)) => Some(BoundRequest { policy: p, x0: x, epsilon: eps }),
        (None, None) => None,
        _ => bail!("--gain and --x0 must be given together"),
    };
    let report = analyze(&pack, &t, bound)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.controllable.is_negative() { EXIT_NEGATIVE } else { 0 })
}

fn cmd_simulate(a: &SimulateArgs) -> Result<u8> {
    let s = Scenario::load(&a.scenario)?;
    if a.stride == 0 {
        bail!("--stride must be >= 1");
    }
    let max_steps = s.max_steps.unwrap_or_else(|| {
        let bound = (s.policy.mode() == ControlMode::Proportional)
            .then(|| te_upper_bound_for_policy(&s.pack, &s.topology, &s.policy, &s.x0, s.epsilon).ok())
            .flatten();
        default_max_steps(bound, s.pack.sample_period())
    });
    let opts =
        SimOptions { external: s.external.clone(), record_stride: a.out.as_ref().map(|_| a.stride), force: a.force };
    let run = match simulate_until_balanced(&s.pack, &s.topology, &s.policy, &s.x0, s.epsilon, max_steps, &opts) {
        Err(e @ eqhs::Error::Uncontrollable { .. }) => {
            eprintln!("{e} (use --force to simulate anyway)");
            return Ok(EXIT_NEGATIVE);
        }
        r => r?,
    };
    if let Some(path) = &a.out {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trajectory(BufWriter::new(f), &run, s.pack.sample_period(), s.topology.n())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match run.te_seconds {
        Some(te) => println!("T_e = {} s ({} steps)", sig4(te), run.steps),
        None => println!("NOT CONVERGED after {} steps (final imbalance {})", run.steps, sig4(run.final_imbalance)),
    }
    Ok(0)
}

fn write_trajectory(mut w: impl Write, run: &eqhs::Run, t0: f64, n: usize) -> std::io::Result<()> {
    let mut header = String::from("step,t_seconds");
    for i in 1..=n {
        write!(header, ",soc_{i}").unwrap();
    }
    writeln!(w, "{header},imbalance")?;
    for s in &run.samples {
        write!(w, "{},{:.16e}", s.step, s.step as f64 * t0)?;
        for v in &s.soc {
            write!(w, ",{v:.16e}")?;
        }
        writeln!(w, ",{:.16e}", s.imbalance)?;
    }
    w.flush()
}

fn cmd_mc(a: &McArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.study).with_context(|| format!("reading {}", a.study.display()))?;
    let mut study: McStudy =
        serde_json::from_str(&text).with_context(|| format!("parsing study {}", a.study.display()))?;
    study.seed = a.seed;
    let report = run_study(&study, a.workers)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    write_file(&a.out_dir.join("report.csv"), &report_csv(&report))?;
    for r in &report.rows {
        if let Some(h) = &r.histogram {
            write_file(&a.out_dir.join(histogram_file_name(r.topology, r.n, r.m)), &histogram_csv(h))?;
        }
    }
    println!("{:<12} {:>5} {:>4} {:>8} {:>12} {:>10}", "topology", "n", "m", "lambda2", "mean T_e/s", "converged");
    for r in &report.rows {
        let mean = r.mean_te_s.map_or_else(|| "-".to_string(), sig4);
        println!(
            "{:<12} {:>5} {:>4} {:>8.4} {:>12} {:>6}/{}",
            r.topology.as_str(),
            r.n,
            r.m,
            r.lambda2,
            mean,
            r.converged,
            r.samples
        );
    }
    if study.topologies.len() > 1 {
        for ps in &study.pack_sizes {
            println!(
                "n={} m={} fastest first:   {}",
                ps.n,
                ps.m,
                format_ranking(&ranking_by_mean(&report, ps.n, ps.m))
            );
            println!(
                "n={} m={} largest lambda2: {}",
                ps.n,
                ps.m,
                format_ranking(&ranking_by_lambda2(&report, ps.n, ps.m))
            );
        }
    }
    Ok(0)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
