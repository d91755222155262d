mod range;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use holescan::experiments::{
    agility_table, detectability_grid, effective_threads, exploration_trace, run_reliability_sweep, trace_rows,
    with_threads, write_csv, BudgetQuery, EpsilonRule, GammaRule, GridQuery, Method, RegionClass, Sidecar, SweepSpec,
    TraceQuery, DEFAULT_SUCCESS_THRESHOLD,
};
use holescan::{ScenarioConfig, TheoryPoint};
use serde::Serialize;

use range::{parse_counts, parse_u32_list, parse_values};

#[derive(Parser, Debug)]
#[command(name = "holescan", version, about = "Monte Carlo studies of adaptive spectrum-hole detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error probability of both detectors across channel counts.
    Reliability(ReliabilityArgs),
    /// Budget each detector needs to reach a target error.
    Agility(AgilityArgs),
    /// Detectability map over the (alpha, beta) exponent plane.
    Region(RegionArgs),
    /// Survivors of each exploration cycle for one realization.
    Trace(TraceArgs),
    /// Closed-form predictions for one parameter tuple.
    Theory(TheoryArgs),
}

/// How epsilon and gamma follow n.
#[derive(Args, Debug, Clone)]
struct Scaling {
    /// Hole-probability exponent: epsilon = n^ALPHA_EXP.
    #[arg(long, default_value_t = -2.0 / 3.0, allow_negative_numbers = true)]
    alpha_exp: f64,
    /// Power exponent: gamma = n^BETA_EXP.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    beta_exp: f64,
    /// Explicit hole probabilities (one value, or one per n); overrides --alpha-exp.
    #[arg(long)]
    epsilon: Option<String>,
    /// Explicit minimum powers (one value, or one per n); overrides --beta-exp.
    #[arg(long)]
    gamma: Option<String>,
}

impl Scaling {
    fn rules(&self) -> Result<(EpsilonRule, GammaRule)> {
        let eps = match &self.epsilon {
            Some(v) => EpsilonRule::Values(parse_values(v)?),
            None => EpsilonRule::Alpha(self.alpha_exp + 1.0),
        };
        let gamma = match &self.gamma {
            Some(v) => GammaRule::Values(parse_values(v)?),
            None => GammaRule::Beta(self.beta_exp),
        };
        Ok((eps, gamma))
    }

    /// The single scenario for channel count `n`.
    fn scenario(&self, n: usize, t: usize) -> Result<ScenarioConfig> {
        let (eps, gamma) = self.rules()?;
        let spec = SweepSpec {
            n_values: vec![n],
            epsilon_rule: eps,
            gamma_rule: gamma,
            m: 1,
            k_values: vec![],
            t,
            trials: 1,
            master_seed: 0,
        };
        Ok(spec.scenarios()?.remove(0))
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: all cores). Does not change results.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Output CSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn threads(&self) -> Option<usize> {
        self.threads.map(|t| t as usize)
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

#[derive(Args, Debug)]
struct ReliabilityArgs {
    /// Channel counts: list or lo:hi:logN / lo:hi:linN.
    #[arg(long, default_value = "10:1000:log25")]
    n: String,
    /// Samples per channel; both detectors get M*n in total.
    #[arg(long, default_value_t = 5)]
    m: u32,
    /// Holes to report.
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Exploration cycle counts for the adaptive detector.
    #[arg(long, default_value = "1,2,3,4")]
    k: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[command(flatten)]
    scaling: Scaling,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct AgilityArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Target error probability.
    #[arg(long, default_value_t = 1e-2)]
    target: f64,
    #[arg(long, default_value = "1,2,3,4,5")]
    k: String,
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Largest per-channel budget searched.
    #[arg(long, default_value_t = 64)]
    m_max: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[command(flatten)]
    scaling: Scaling,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Hole exponents alpha, with epsilon = n^(alpha-1).
    #[arg(long, default_value = "0.2,0.35,0.5,0.65,0.8")]
    alpha: String,
    /// Power exponents beta, with gamma = n^beta.
    #[arg(long, default_value = "0.01,0.1,0.2,0.3,0.4")]
    beta: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    m: u32,
    #[arg(long, default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// A detector succeeds in a cell when its error is below this.
    #[arg(long, default_value_t = DEFAULT_SUCCESS_THRESHOLD)]
    threshold: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: u32,
    /// Samples per channel in each exploration cycle.
    #[arg(long, default_value_t = 1)]
    m_k: u32,
    #[command(flatten)]
    scaling: Scaling,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[arg(long, default_value_t = 5)]
    m: u32,
    #[arg(long, default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Print JSON instead of key=value lines.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    scaling: Scaling,
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_csv(BufWriter::new(file), rows)?;
    Ok(())
}

/// Writes the sidecar, runs `work` on the requested pool, writes its rows and
/// finalizes the sidecar with the returned summary.
fn run_persisted<S, T, F>(command: &str, run: &RunArgs, default_out: &str, spec: &S, work: F) -> Result<()>
where
    S: Serialize,
    T: Serialize + Send,
    F: FnOnce() -> holescan::Result<(Vec<T>, String)> + Send,
{
    let out = run.out_or(default_out);
    let threads = run.threads();
    let sidecar = Sidecar::begin(&out, command, spec, run.seed, effective_threads(threads))?;
    let (rows, summary) = with_threads(threads, work)??;
    write_rows(&out, &rows)?;
    sidecar.finish(summary.clone())?;
    println!("{summary} -> {}", out.display());
    Ok(())
}

fn reliability(a: &ReliabilityArgs) -> Result<()> {
    let (epsilon_rule, gamma_rule) = a.scaling.rules()?;
    let spec = SweepSpec {
        n_values: parse_counts(&a.n)?,
        epsilon_rule,
        gamma_rule,
        m: a.m,
        k_values: parse_u32_list(&a.k)?,
        t: a.t,
        trials: a.trials,
        master_seed: a.run.seed,
    };
    spec.validate()?;
    run_persisted("reliability", &a.run, "reliability.csv", &spec, || {
        let rows = run_reliability_sweep(&spec)?;
        let summary = format!("reliability: {} rows over {} channel counts", rows.len(), spec.n_values.len());
        Ok((rows, summary))
    })
}

fn agility(a: &AgilityArgs) -> Result<()> {
    let config = a.scaling.scenario(a.n, a.t)?;
    let cycles = parse_u32_list(&a.k)?;
    let query = BudgetQuery {
        target_error: a.target,
        method: Method::NonAdaptive,
        n: a.n,
        epsilon: config.epsilon,
        gamma: config.gamma,
        t: a.t,
        trials: a.trials,
        seed: a.run.seed,
        m_max: a.m_max,
    };
    #[derive(Serialize)]
    struct Spec<'a> {
        query: &'a BudgetQuery,
        cycles: &'a [u32],
    }
    run_persisted("agility", &a.run, "agility.csv", &Spec { query: &query, cycles: &cycles }, || {
        let rows = agility_table(&query, &cycles)?;
        let best = rows.iter().filter_map(|r| r.gain).fold(f64::NAN, f64::max);
        let summary = match rows[0].per_channel {
            Some(m) => format!("agility: non-adaptive needs {m} samples/channel, best gain {best:.3}"),
            None => format!("agility: non-adaptive target unattainable within {} samples/channel", a.m_max),
        };
        Ok((rows, summary))
    })
}

fn region(a: &RegionArgs) -> Result<()> {
    let query = GridQuery {
        alpha_grid: parse_values(&a.alpha)?,
        beta_grid: parse_values(&a.beta)?,
        m: a.m,
        k: a.k,
        n: a.n,
        t: a.t,
        trials: a.trials,
        seed: a.run.seed,
        threshold: a.threshold,
    };
    run_persisted("region", &a.run, "region.csv", &query, || {
        let cells = detectability_grid(&query)?;
        let count = |c: RegionClass| cells.iter().filter(|x| x.class == c).count();
        let summary = format!(
            "region: {} cells, both-succeed {}, adaptive-only {}, nonadaptive-only {}, both-fail {}",
            cells.len(),
            count(RegionClass::BothSucceed),
            count(RegionClass::AdaptiveOnly),
            count(RegionClass::NonadaptiveOnly),
            count(RegionClass::BothFail)
        );
        Ok((cells, summary))
    })
}

fn trace(a: &TraceArgs) -> Result<()> {
    let config = a.scaling.scenario(a.n, 1)?;
    let query = TraceQuery {
        n: a.n,
        epsilon: config.epsilon,
        gamma: config.gamma,
        cycles: a.k,
        seed: a.run.seed,
        exploration_samples: a.m_k,
    };
    run_persisted("trace", &a.run, "trace.csv", &query, || {
        let rows = trace_rows(a.k, &exploration_trace(&query)?);
        let (first, last) = (rows[0], rows[rows.len() - 1]);
        let summary = format!(
            "trace: holes {} -> {}, occupied {} -> {} after {} cycles",
            first.holes_retained, last.holes_retained, first.occupied_retained, last.occupied_retained, a.k
        );
        Ok((rows, summary))
    })
}

fn theory(a: &TheoryArgs) -> Result<()> {
    let config = a.scaling.scenario(a.n, a.t)?;
    let t = u32::try_from(a.t).context("T too large")?;
    let point = TheoryPoint::evaluate(config.gamma, a.m, a.k, config.epsilon, t)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&point)?);
        return Ok(());
    }
    println!("n={} epsilon={} gamma={} M={} K={} T={}", a.n, config.epsilon, config.gamma, a.m, a.k, a.t);
    println!("p_na={}", point.p_na);
    println!("p_a={}", point.p_a);
    println!("agility_gain_lb={}", point.agility_gain_lb);
    println!("m_prime={}", point.m_prime);
    match point.k_star {
        Some(k) => println!("k_star={k}"),
        None => println!("k_star=undefined"),
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Reliability(a) => reliability(a),
        Command::Agility(a) => agility(a),
        Command::Region(a) => region(a),
        Command::Trace(a) => trace(a),
        Command::Theory(a) => {
            if a.m < 1 {
                bail!("--m must be >= 1");
            }
            theory(a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout with status 0; usage errors exit 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
