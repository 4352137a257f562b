//! Command-line front end: sampling, statistics, theory tables, test
//! calibration, power surfaces, and the self-check suite.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ising_detect::{
    calibrate, emit_surface, estimate_power, make_signal, run_power_grid, thread_pool,
    verify_suite, BackendLabel, CouplingMatrix, Error, ExperimentConfig, GridRange, ModelSpec,
    Placement, Result, SignalPolicy, StatTag, StatisticKind, VerifyScale,
};

#[derive(Parser)]
#[command(
    name = "ising-detect",
    version,
    about = "Sparse-signal detection tests under Ising models",
    long_about = "Samplers, test statistics, Monte Carlo calibration, and power-surface \
                  experiments for detecting sparse external fields in Ising models. \
                  Set ISING_DETECT_THREADS to cap worker threads (0 or unset = all cores)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw configurations and print them (or a magnetization histogram).
    Sample(SampleArgs),
    /// Evaluate a statistic on configurations read from a file.
    Stat(StatArgs),
    /// Print closed-form reference quantities as CSV.
    Theory(TheoryArgs),
    /// Calibrate a critical value by Monte Carlo under the null.
    Calibrate(CalibrateArgs),
    /// Calibrate, then estimate power against an (s, B) alternative.
    Power(PowerArgs),
    /// Sweep the sparsity/strength grid and write CSV + PGM surfaces.
    Figure1(Figure1Args),
    /// Run the self-check suite and print a pass/fail report.
    Verify(VerifyArgs),
    /// Write the coupling matrix as dense CSV.
    DumpCoupling(DumpCouplingArgs),
}

/// Flags shared by every command that needs a coupling matrix.
#[derive(Args, Clone)]
struct ModelArgs {
    /// Number of sites.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Interaction strength.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Coupling family: curie-weiss, cycle, regular-circulant, erdos-renyi.
    #[arg(long, default_value = "curie-weiss")]
    kind: String,
    /// Edge probability (erdos-renyi only).
    #[arg(long)]
    edge_prob: Option<f64>,
    /// Neighbor count, even (regular-circulant only).
    #[arg(long)]
    degree: Option<usize>,
    /// Graph seed (erdos-renyi only).
    #[arg(long)]
    graph_seed: Option<u64>,
}

impl ModelArgs {
    fn coupling(&self) -> Result<CouplingMatrix> {
        self.coupling_with_n(self.n)
    }

    fn coupling_with_n(&self, n: usize) -> Result<CouplingMatrix> {
        match self.kind.replace('_', "-").as_str() {
            "curie-weiss" => CouplingMatrix::curie_weiss(n, self.theta),
            "cycle" => CouplingMatrix::cycle(n, self.theta),
            "regular-circulant" => {
                let d = self.degree.ok_or_else(|| {
                    Error::Config("regular-circulant needs --degree".to_string())
                })?;
                CouplingMatrix::regular_circulant(n, self.theta, d)
            }
            "erdos-renyi" => {
                let p = self.edge_prob.ok_or_else(|| {
                    Error::Config("erdos-renyi needs --edge-prob".to_string())
                })?;
                let seed = self.graph_seed.ok_or_else(|| {
                    Error::Config("erdos-renyi needs --graph-seed".to_string())
                })?;
                CouplingMatrix::erdos_renyi(n, self.theta, p, seed)
            }
            other => Err(Error::Config(format!("unknown coupling kind '{other}'"))),
        }
    }
}

/// Flags describing the external-field alternative.
#[derive(Args, Clone)]
struct SignalArgs {
    /// Signal support size.
    #[arg(long, default_value_t = 0)]
    s: usize,
    /// Signal strength B on the support.
    #[arg(long, alias = "b", default_value_t = 0.0)]
    strength: f64,
    /// Support placement: prefix or uniform-random.
    #[arg(long, default_value = "prefix")]
    placement: String,
    /// Seed for uniform-random placement.
    #[arg(long)]
    placement_seed: Option<u64>,
}

impl SignalArgs {
    fn signal(&self, n: usize) -> Result<ising_detect::SignalVector> {
        let placement = match self.placement.replace('_', "-").as_str() {
            "prefix" => Placement::Prefix,
            "uniform-random" => Placement::UniformRandom,
            other => return Err(Error::Config(format!("unknown placement '{other}'"))),
        };
        make_signal(n, self.s, self.strength, placement, self.placement_seed)
    }
}

fn parse_backend(raw: &str) -> Result<BackendLabel> {
    match raw.replace('_', "-").as_str() {
        "auto" => Ok(BackendLabel::Auto),
        "enumeration" => Ok(BackendLabel::Enumeration),
        "curie-weiss-aux" => Ok(BackendLabel::CurieWeissAux),
        "cycle-transfer" => Ok(BackendLabel::CycleTransfer),
        "glauber" => Ok(BackendLabel::Glauber),
        "independent" => Ok(BackendLabel::Independent),
        other => Err(Error::Config(format!("unknown sampler backend '{other}'"))),
    }
}

fn parse_stat(raw: &str) -> Result<StatTag> {
    raw.parse()
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    signal: SignalArgs,
    /// Sampler backend: auto, enumeration, curie-weiss-aux, cycle-transfer,
    /// glauber, independent.
    #[arg(long, default_value = "auto")]
    sampler: String,
    /// Number of configurations to draw.
    #[arg(long, default_value_t = 1)]
    draws: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Print an aggregated `value,count` histogram of the total spin instead
    /// of raw configurations.
    #[arg(long)]
    histogram: bool,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let q = args.model.coupling()?;
    let mu = args.signal.signal(q.n())?;
    let backend = parse_backend(&args.sampler)?.to_backend(q.n());
    let spec = ModelSpec {
        coupling: q,
        signal: SignalPolicy::Fixed(mu),
        backend,
    };
    let prepared = spec.prepare()?;
    let mut out = open_out(&args.out)?;
    if args.histogram {
        let mut counts: std::collections::BTreeMap<i64, u64> = std::collections::BTreeMap::new();
        for i in 0..args.draws {
            let mut rng = ising_detect::rng::stream(args.seed, ising_detect::rng::role::SAMPLE_CLI, i as u64);
            *counts.entry(prepared.draw(&mut rng)?.total_spin()).or_insert(0) += 1;
        }
        writeln!(out, "value,count")?;
        for (value, count) in counts {
            writeln!(out, "{value},{count}")?;
        }
    } else {
        for i in 0..args.draws {
            let mut rng = ising_detect::rng::stream(args.seed, ising_detect::rng::role::SAMPLE_CLI, i as u64);
            let x = prepared.draw(&mut rng)?;
            let row: Vec<String> = x.spins().iter().map(|s| s.to_string()).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Args)]
struct StatArgs {
    /// File of configurations, one per line, spins as space-separated ±1.
    #[arg(long)]
    input: PathBuf,
    /// Statistic: sqrt-n-mean, quarter-root-mean, cond-centered.
    #[arg(long, default_value = "cond-centered")]
    stat: String,
    /// Model for conditional centering (ignored by the scaled means). The
    /// site count is inferred from the input file.
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_stat(args: StatArgs) -> Result<()> {
    let tag = parse_stat(&args.stat)?;
    let raw = std::fs::read_to_string(&args.input)?;
    let mut configs: Vec<ising_detect::SpinConfiguration> = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let spins = line
            .split_whitespace()
            .map(|tok| match tok {
                "1" | "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                other => Err(Error::Config(format!(
                    "line {}: expected +-1 spins, got '{other}'",
                    lineno + 1
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if let Some(first) = configs.first() {
            let expected: usize = first.n();
            if spins.len() != expected {
                return Err(Error::Config(format!(
                    "line {}: row has {} spins but the first row has {expected}",
                    lineno + 1,
                    spins.len()
                )));
            }
        }
        configs.push(ising_detect::SpinConfiguration::new(spins)?);
    }
    if configs.is_empty() {
        return Err(Error::Config("input file holds no configurations".to_string()));
    }
    let n = configs[0].n();
    let kind = match tag {
        StatTag::CondCentered => StatisticKind::CondCentered(args.model.coupling_with_n(n)?),
        StatTag::SqrtNMean => StatisticKind::SqrtNMean,
        StatTag::QuarterRootMean => StatisticKind::QuarterRootMean,
    };
    let mut out = open_out(&args.out)?;
    writeln!(out, "index,statistic")?;
    for (i, x) in configs.iter().enumerate() {
        writeln!(out, "{i},{}", ising_detect::evaluate_statistic(&kind, x)?)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Site count used for concentration bounds.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Coupling family for the concentration bound.
    #[arg(long, default_value = "curie-weiss")]
    kind: String,
    #[arg(long)]
    edge_prob: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    graph_seed: Option<u64>,
    /// Sparsity exponents for detection-boundary rows.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    a: Vec<f64>,
    /// Probabilities for null-limit quantile rows.
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.95,0.99")]
    p: Vec<f64>,
    /// Tail levels for concentration-bound rows.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5")]
    t: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_theory(args: TheoryArgs) -> Result<()> {
    let model = ModelArgs {
        n: args.n,
        theta: args.theta,
        kind: args.kind.clone(),
        edge_prob: args.edge_prob,
        degree: args.degree,
        graph_seed: args.graph_seed,
    };
    let mut out = open_out(&args.out)?;
    writeln!(out, "quantity,parameter,value")?;
    let m = ising_detect::solve_spontaneous_magnetization(args.theta)?;
    writeln!(out, "spontaneous_magnetization,theta={},{}", args.theta, m.root)?;
    if args.theta > 1.0 {
        writeln!(
            out,
            "conditional_variance,theta={},{}",
            args.theta,
            ising_detect::conditional_variance(args.theta)?
        )?;
    }
    for &a in &args.a {
        let b = ising_detect::detection_boundary(args.theta, a)?;
        writeln!(out, "detection_boundary,a={a},{}", b.exponent())?;
    }
    let law = ising_detect::null_limit(args.theta)?;
    for &p in &args.p {
        writeln!(out, "null_quantile,p={p},{}", law.quantile(p)?)?;
    }
    let q = model.coupling()?;
    for &t in &args.t {
        writeln!(out, "concentration_bound,t={t},{}", ising_detect::concentration_bound(&q, t)?)?;
    }
    out.flush()?;
    Ok(())
}

const TEST_CSV_HEADER: &str = "theta,n,s,B,stat,alpha,m_null,replicates,crit,p_hat,ci";

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "cond-centered")]
    stat: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long = "m-null", default_value_t = 500)]
    m_null: usize,
    #[arg(long, default_value = "auto")]
    sampler: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let q = args.model.coupling()?;
    let tag = parse_stat(&args.stat)?;
    let kind = StatisticKind::from_tag(tag, &q);
    let backend = parse_backend(&args.sampler)?.to_backend(q.n());
    let spec = ModelSpec::null_model(q, backend);
    let crit = calibrate(&spec, &kind, args.alpha, args.m_null, args.seed)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "{TEST_CSV_HEADER}")?;
    writeln!(
        out,
        "{},{},0,0,{},{},{},0,{},,",
        args.model.theta,
        args.model.n,
        tag,
        args.alpha,
        args.m_null,
        crit.value
    )?;
    out.flush()?;
    Ok(())
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    signal: SignalArgs,
    #[arg(long, default_value = "cond-centered")]
    stat: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long = "m-null", default_value_t = 500)]
    m_null: usize,
    #[arg(long, default_value_t = 300)]
    replicates: usize,
    #[arg(long, default_value = "auto")]
    sampler: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_power(args: PowerArgs) -> Result<()> {
    let q = args.model.coupling()?;
    let tag = parse_stat(&args.stat)?;
    let kind = StatisticKind::from_tag(tag, &q);
    let backend = parse_backend(&args.sampler)?.to_backend(q.n());
    let null = ModelSpec::null_model(q, backend);
    let crit = calibrate(&null, &kind, args.alpha, args.m_null, args.seed)?;
    let mu = args.signal.signal(args.model.n)?;
    let alt = null.with_signal(SignalPolicy::Fixed(mu));
    let power = estimate_power(
        &alt,
        &kind,
        &crit,
        args.replicates,
        ising_detect::rng::derive(args.seed, ising_detect::rng::role::POWER, &[1]),
    )?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "{TEST_CSV_HEADER}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{}",
        args.model.theta,
        args.model.n,
        args.signal.s,
        args.signal.strength,
        tag,
        args.alpha,
        args.m_null,
        args.replicates,
        crit.value,
        power.p_hat,
        power.ci_halfwidth
    )?;
    out.flush()?;
    Ok(())
}

#[derive(Args)]
struct Figure1Args {
    /// JSON file holding a full ExperimentConfig; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Baseline when no config file is given: desk (n=400) or paper (n=1000).
    #[arg(long, default_value = "desk")]
    preset: String,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// sqrt-n-mean, quarter-root-mean, or cond-centered.
    #[arg(long)]
    stat: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "m-null")]
    m_null: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Grid increment for both the sparsity and strength exponents.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix: writes <out>.csv, <out>_boundary.csv, <out>.pgm.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_figure1(args: Figure1Args) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str::<ExperimentConfig>(&std::fs::read_to_string(path)?)?,
        None => {
            let theta = args.theta.unwrap_or(0.5);
            match args.preset.as_str() {
                "desk" => ExperimentConfig::desk_default(theta),
                "paper" => ExperimentConfig::paper_preset(theta),
                other => {
                    return Err(Error::Config(format!(
                        "unknown preset '{other}' (expected desk or paper)"
                    )))
                }
            }
        }
    };
    if let Some(theta) = args.theta {
        cfg.theta = theta;
        // Keep the default statistic matched to the temperature unless the
        // user pins one explicitly below.
        if args.config.is_none() && args.stat.is_none() {
            cfg.stat = if theta == 1.0 { StatTag::QuarterRootMean } else { StatTag::CondCentered };
        }
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(stat) = &args.stat {
        cfg.stat = parse_stat(stat)?;
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    if let Some(m_null) = args.m_null {
        cfg.m_null = m_null;
    }
    if let Some(replicates) = args.replicates {
        cfg.replicates = replicates;
    }
    if let Some(step) = args.step {
        cfg.a_grid = match args.config {
            Some(_) => GridRange::new(cfg.a_grid.start, cfg.a_grid.stop, step),
            None => GridRange::new(step, 0.5, step),
        };
        cfg.r_grid = match args.config {
            Some(_) => GridRange::new(cfg.r_grid.start, cfg.r_grid.stop, step),
            None => GridRange::new(step, 0.5, step),
        };
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let surface = run_power_grid(&cfg)?;
    let paths = emit_surface(&surface, &args.out)?;
    let failed = surface.cells.iter().filter(|c| c.error.is_some()).count();
    println!(
        "{} cells ({} failed), critical value {}",
        surface.cells.len(),
        failed,
        surface.critical_value.value
    );
    for p in paths {
        println!("wrote {}", p.display());
    }
    if failed > 0 {
        for cell in surface.cells.iter().filter(|c| c.error.is_some()) {
            eprintln!(
                "cell (a={}, r={}) failed: {}",
                cell.a,
                cell.r,
                cell.error.as_deref().unwrap_or("unknown")
            );
        }
    }
    Ok(())
}

#[derive(Args)]
struct VerifyArgs {
    /// quick (seconds) or full (minutes).
    #[arg(long, default_value = "quick")]
    scale: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let scale: VerifyScale = args.scale.parse()?;
    let report = verify_suite(scale, args.seed)?;
    print!("{}", report.render());
    if !report.all_passed() {
        std::process::exit(1);
    }
    Ok(())
}

#[derive(Args)]
struct DumpCouplingArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_dump_coupling(args: DumpCouplingArgs) -> Result<()> {
    let q = args.model.coupling()?;
    let mut out = open_out(&args.out)?;
    q.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        // The grid runner and verify suite build their own pools; the other
        // parallel commands install one honoring ISING_DETECT_THREADS.
        Command::Sample(args) => cmd_sample(args),
        Command::Stat(args) => cmd_stat(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Calibrate(args) => thread_pool()?.install(|| cmd_calibrate(args)),
        Command::Power(args) => thread_pool()?.install(|| cmd_power(args)),
        Command::Figure1(args) => cmd_figure1(args),
        Command::Verify(args) => cmd_verify(args),
        Command::DumpCoupling(args) => cmd_dump_coupling(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
