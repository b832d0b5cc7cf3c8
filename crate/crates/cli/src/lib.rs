//! Command-line front end: `run`, `sweep`, `oracle`, `bounds` and `baseline`.
//!
//! Exit codes: 0 on success, 1 for invalid input (including unknown flags),
//! 2 for runtime failures such as I/O or numerical errors.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use noisy_ea::bounds::{self, BoundInputs};
use noisy_ea::harness::{self, ExperimentConfig, Metric, SweepAxis, DEFAULT_BUDGET};
use noisy_ea::oracle::{self, AbsorbedChain};
use noisy_ea::{
    engine, AlgorithmConfig, BitString, Error, MutationOperator, NoiseModel, ProblemInstance,
    RandomSource, Result, StoppingRule,
};

/// Environment variable holding the default worker thread count.
pub const THREADS_ENV: &str = "NOISY_EA_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "noisy-ea",
    version,
    about = "Simulate and analyse the (1+λ) EA and RLS under prior noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run; prints the run record.
    Run(RunArgs),
    /// Seeded parameter sweep written as CSV.
    Sweep(Box<SweepArgs>),
    /// Exact Markov-chain analysis (λ = 1, small n).
    Oracle(OracleArgs),
    /// Table of closed-form runtime bounds.
    Bounds(BoundsArgs),
    /// Best fitness found by uniform random sampling.
    Baseline(BaselineArgs),
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum FunctionKind {
    Onemax,
    Leadingones,
    Hurdle,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum MutationKind {
    Standard,
    Onebit,
}

impl From<MutationKind> for MutationOperator {
    fn from(m: MutationKind) -> Self {
        match m {
            MutationKind::Standard => MutationOperator::StandardBit,
            MutationKind::Onebit => MutationOperator::OneBitFlip,
        }
    }
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum NoiseKind {
    None,
    Onebit,
    Bitwise,
    Asym,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    #[value(alias = "lemma1")]
    Monotone,
    Stationary,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "leadingones")]
    function: FunctionKind,
    #[arg(long)]
    n: usize,
    /// Hurdle width.
    #[arg(long)]
    w: Option<usize>,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    #[arg(long, value_enum, default_value = "none")]
    noise: NoiseKind,
    /// Noise trigger probability.
    #[arg(long)]
    p: Option<f64>,
    /// Bit-wise noise rate parameter; bits flip with probability q/n.
    #[arg(long)]
    q: Option<f64>,
    /// Accept bit-wise noise with q/n > 1/2.
    #[arg(long)]
    allow_high_rate: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_enum, default_value = "standard")]
    mutation: MutationKind,
    #[arg(long, default_value_t = 1)]
    lambda: usize,
    /// Generation cap [default: 10 n^2].
    #[arg(long)]
    max_gens: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Sweep options. Every flag can also be set in the `--config` TOML file under
/// the same name with `-` replaced by `_`; flags win over the file.
#[derive(Args, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, default)]
struct SweepArgs {
    /// TOML file with default values for the other options.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    function: Option<FunctionKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long, value_enum)]
    mutation: Option<MutationKind>,
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Sweep p over 2^a, ..., 2^b.
    #[arg(long, value_name = "A:B", allow_hyphen_values = true)]
    p_log2_range: Option<String>,
    /// Sweep q over 2^a, ..., 2^b (bit-wise noise).
    #[arg(long, value_name = "A:B", allow_hyphen_values = true)]
    q_log2_range: Option<String>,
    /// Comma-separated offspring population sizes.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<usize>>,
    /// Generation cap [default: 10 n^2].
    #[arg(long)]
    max_gens: Option<u64>,
    /// Runs per cell [default: 100].
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "NOISY_EA_THREADS")]
    threads: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Limit on runs x cap summed over all cells [default: 1e11].
    #[arg(long)]
    budget: Option<u128>,
    /// Comma-separated subset of the metric columns.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    #[arg(long)]
    allow_high_rate: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_enum, default_value = "standard")]
    mutation: MutationKind,
    #[arg(long, value_enum)]
    check: Option<Check>,
    /// Write the transition matrix as CSV (`state_from,state_to,prob`).
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Step limit for the median computations.
    #[arg(long, default_value_t = 100_000)]
    max_steps: u64,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Worst-case median optimisation time M.
    #[arg(long)]
    median: f64,
    #[arg(long)]
    p: f64,
    /// Evaluations per iteration.
    #[arg(long, default_value_t = 1)]
    nu: u32,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    ell: u64,
    /// Steps for the mixing bound.
    #[arg(long, default_value_t = 0)]
    t: u64,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Samples per repetition [default: 10 n^2].
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "NOISY_EA_THREADS")]
    threads: Option<usize>,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(*a, out, err),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Baseline(a) => cmd_baseline(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn instance(function: FunctionKind, n: usize, w: Option<usize>) -> Result<ProblemInstance> {
    match (function, w) {
        (FunctionKind::Hurdle, Some(w)) => ProblemInstance::hurdle(n, w),
        (FunctionKind::Hurdle, None) => Err(invalid("--w is required for hurdle")),
        (_, Some(_)) => Err(invalid("--w only applies to hurdle")),
        (FunctionKind::Onemax, None) => ProblemInstance::onemax(n),
        (FunctionKind::Leadingones, None) => ProblemInstance::leading_ones(n),
    }
}

fn required_p(p: Option<f64>) -> Result<f64> {
    p.ok_or_else(|| invalid("--p is required for this noise model"))
}

fn noise_model(
    kind: NoiseKind,
    p: Option<f64>,
    q: Option<f64>,
    n: usize,
    allow_high_rate: bool,
) -> Result<NoiseModel> {
    match kind {
        NoiseKind::None => Ok(NoiseModel::NoNoise),
        NoiseKind::Onebit => NoiseModel::one_bit(required_p(p)?),
        NoiseKind::Asym => NoiseModel::asymmetric_one_bit(required_p(p)?),
        NoiseKind::Bitwise => {
            let (p, q) = (required_p(p)?, q.unwrap_or(1.0));
            if allow_high_rate {
                NoiseModel::bit_wise_unchecked(p, q)
            } else {
                NoiseModel::bit_wise(p, q, n)
            }
        }
    }
}

fn default_cap(n: usize) -> u64 {
    10 * (n as u64).pow(2)
}

fn fmt_bits(x: &BitString) -> String {
    x.to_string()
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<()> {
    let inst = instance(a.problem.function, a.problem.n, a.problem.w)?;
    let noise = noise_model(a.noise.noise, a.noise.p, a.noise.q, inst.n(), a.noise.allow_high_rate)?;
    let cfg = AlgorithmConfig::new(a.lambda, a.mutation.into(), noise)?;
    let stop = StoppingRule::new(a.max_gens.unwrap_or_else(|| default_cap(inst.n())))?;
    let mut rng = RandomSource::new(a.seed);
    let rec = engine::run(&inst, &cfg, &stop, &mut rng);
    writeln!(
        out,
        "instance: {inst}\nalgorithm: (1+{}) {:?}, noise {noise}\nseed: {}\nsuccess: {}\ngenerations: {}\nevaluations: {}\nbest_true_fitness: {}\nfinal_parent: {}",
        cfg.lambda(),
        cfg.mutation(),
        a.seed,
        rec.success,
        rec.generations,
        rec.evaluations,
        inst.to_real(rec.best_true_fitness),
        fmt_bits(&rec.final_parent),
    )
    .map_err(stdout_err)
}

fn parse_log2_range(s: &str) -> Result<(i32, i32)> {
    let bad = || invalid(format!("expected a range like -20:-1, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: i32 = a.trim().parse().map_err(|_| bad())?;
    let b: i32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(invalid(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

fn read_config(path: &Path) -> Result<SweepArgs> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

impl SweepArgs {
    /// Fills options missing on the command line from `file`.
    fn or(self, file: SweepArgs) -> SweepArgs {
        SweepArgs {
            config: self.config,
            function: self.function.or(file.function),
            n: self.n.or(file.n),
            w: self.w.or(file.w),
            mutation: self.mutation.or(file.mutation),
            noise: self.noise.or(file.noise),
            p: self.p.or(file.p),
            q: self.q.or(file.q),
            p_log2_range: self.p_log2_range.or(file.p_log2_range),
            q_log2_range: self.q_log2_range.or(file.q_log2_range),
            lambda: self.lambda.or(file.lambda),
            max_gens: self.max_gens.or(file.max_gens),
            runs: self.runs.or(file.runs),
            seed: self.seed.or(file.seed),
            threads: self.threads.or(file.threads),
            out: self.out.or(file.out),
            budget: self.budget.or(file.budget),
            metrics: self.metrics.or(file.metrics),
            allow_high_rate: self.allow_high_rate || file.allow_high_rate,
        }
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        let n = self.n.ok_or_else(|| invalid("--n is required"))?;
        let inst = instance(self.function.unwrap_or(FunctionKind::Leadingones), n, self.w)?;
        let noise = self.noise.unwrap_or(NoiseKind::None);
        let mutation: MutationOperator = self.mutation.unwrap_or(MutationKind::Standard).into();
        let lambdas = self.lambda.clone().unwrap_or_else(|| vec![1]);
        if lambdas.is_empty() {
            return Err(invalid("--lambda needs at least one value"));
        }

        let (axis, values) = match (&self.p_log2_range, &self.q_log2_range) {
            (Some(_), Some(_)) => return Err(invalid("sweep either p or q, not both")),
            (Some(r), None) => {
                let (a, b) = parse_log2_range(r)?;
                (SweepAxis::P, harness::powers_of_two(a, b))
            }
            (None, Some(r)) => {
                if noise != NoiseKind::Bitwise {
                    return Err(invalid("--q-log2-range needs --noise bitwise"));
                }
                let (a, b) = parse_log2_range(r)?;
                (SweepAxis::Q, harness::powers_of_two(a, b))
            }
            (None, None) => match noise {
                NoiseKind::None => (SweepAxis::P, vec![0.0]),
                _ => (SweepAxis::P, vec![required_p(self.p)?]),
            },
        };
        let template = match noise {
            NoiseKind::None if self.p_log2_range.is_some() => {
                return Err(invalid("--noise none has no parameter to sweep"))
            }
            NoiseKind::None => NoiseModel::NoNoise,
            NoiseKind::Onebit => NoiseModel::OneBit { p: 0.0 },
            NoiseKind::Asym => NoiseModel::AsymmetricOneBit { p: 0.0 },
            NoiseKind::Bitwise => NoiseModel::BitWise {
                p: match axis {
                    SweepAxis::Q => required_p(self.p)?,
                    SweepAxis::P => 0.0,
                },
                q: self.q.unwrap_or(1.0),
            },
        };
        let sweep = harness::grid(template, axis, &values, &lambdas)?;
        let metrics = match &self.metrics {
            None => Metric::all(),
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        };
        let algorithm = AlgorithmConfig::new(lambdas[0], mutation, NoiseModel::NoNoise)?;
        let mut cfg = ExperimentConfig::new(
            inst,
            algorithm,
            sweep,
            self.runs.unwrap_or(100),
            StoppingRule::new(self.max_gens.unwrap_or_else(|| default_cap(n)))?,
            self.seed.unwrap_or(0),
        );
        cfg.metrics = metrics;
        cfg.threads = self.threads;
        cfg.budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        cfg.allow_high_rate = self.allow_high_rate;
        Ok(cfg)
    }
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let a = match &a.config {
        Some(path) => {
            let file = read_config(path)?;
            a.or(file)
        }
        None => a,
    };
    let cfg = a.experiment()?;
    let summaries = harness::run_sweep(&cfg)?;
    match &a.out {
        Some(path) => {
            harness::emit_csv(&summaries, &cfg.metrics, path)?;
            let _ = writeln!(err, "wrote {} rows to {}", summaries.len(), path.display());
            Ok(())
        }
        None => {
            let text = harness::render_csv(&summaries, &cfg.metrics)?;
            out.write_all(text.as_bytes()).map_err(stdout_err)
        }
    }
}

fn fmt_time(t: f64) -> String {
    if t.is_finite() {
        format!("{t:.6}")
    } else {
        "inf".into()
    }
}

fn cmd_oracle(a: OracleArgs, out: &mut dyn Write) -> Result<()> {
    let inst = instance(a.problem.function, a.problem.n, a.problem.w)?;
    let noise = noise_model(a.noise.noise, a.noise.p, a.noise.q, inst.n(), a.noise.allow_high_rate)?;
    let cfg = AlgorithmConfig::new(1, a.mutation.into(), noise)?;
    let n = inst.n();
    let chain = AbsorbedChain::new(&inst, &cfg)?;
    let times = chain.expected_times()?;
    let unreachable = times.reachable.iter().filter(|&&r| !r).count();
    let mut w = BufWriter::new(out);
    let mut report = || -> std::io::Result<()> {
        writeln!(w, "instance: {inst}\nalgorithm: (1+1) {:?}, noise {noise}", cfg.mutation())?;
        writeln!(w, "states: {}", 1usize << n)?;
        writeln!(w, "expected_time_uniform_start: {}", fmt_time(times.expected_time_uniform_start))?;
        writeln!(
            w,
            "worst_case_expected_time: {} (from {})",
            fmt_time(times.worst_case_time()),
            BitString::from_index(n, times.worst_case_state as u64)
        )?;
        writeln!(w, "states_missing_the_optimum: {unreachable}")?;
        writeln!(w, "linear_solve_residual: {:e}", times.residual)?;
        if unreachable == 0 {
            let show = |m: Option<u64>| m.map_or(format!("> {}", a.max_steps), |m| m.to_string());
            writeln!(w, "worst_case_median: {}", show(chain.worst_case_median(a.max_steps)))?;
            writeln!(w, "uniform_start_median: {}", show(chain.uniform_start_median(a.max_steps)))?;
        }
        Ok(())
    };
    report().map_err(stdout_err)?;

    let needs_matrix = a.check.is_some() || a.matrix_out.is_some();
    if needs_matrix {
        let matrix = oracle::build_transition_matrix(&inst, &cfg)?;
        if let Some(path) = &a.matrix_out {
            let io_err = |source| Error::Io {
                path: path.clone(),
                source,
            };
            let file = fs::File::create(path).map_err(io_err)?;
            matrix.write_csv(BufWriter::new(file)).map_err(io_err)?;
        }
        match a.check {
            Some(Check::Monotone) => {
                let v = oracle::check_monotonicity(&matrix, &inst)?;
                writeln!(w, "monotonicity check: {} violations", v.len()).map_err(stdout_err)?;
                for (x, y) in v.iter().take(20) {
                    writeln!(
                        w,
                        "  {} -> {}: {:e} < {:e}",
                        BitString::from_index(n, *x as u64),
                        BitString::from_index(n, *y as u64),
                        matrix.get(*x, *y),
                        matrix.get(*y, *x)
                    )
                    .map_err(stdout_err)?;
                }
            }
            Some(Check::Stationary) => {
                let pi = oracle::stationary_distribution(&matrix, &noise)?;
                let opt = pi[pi.len() - 1];
                let max = pi.iter().copied().fold(0.0, f64::max);
                writeln!(
                    w,
                    "stationary_mass_of_optimum: {opt:.6e}\nat_least_2^-n: {}\nmaximal: {}\ndefect: {:e}",
                    opt >= 0.5f64.powi(n as i32),
                    opt >= max,
                    oracle::stationary_defect(&matrix, &pi)
                )
                .map_err(stdout_err)?;
            }
            None => {}
        }
    }
    w.flush().map_err(stdout_err)
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let rows = bounds::bound_table(&BoundInputs {
        median: a.median,
        p: a.p,
        nu: a.nu,
        lambda: a.lambda,
        n: a.n,
        ell: a.ell,
        t: a.t,
    })?;
    let mut text = format!("{:<26} {:>16} {:>16}\n", "bound", "value", "ln");
    for r in rows {
        text.push_str(&format!("{:<26} {:>16.6e} {:>16.6}\n", r.name, r.value, r.ln));
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn cmd_baseline(a: BaselineArgs, out: &mut dyn Write) -> Result<()> {
    let inst = instance(a.problem.function, a.problem.n, a.problem.w)?;
    if a.threads == Some(0) {
        return Err(invalid("thread count must be positive"));
    }
    let samples = a.samples.unwrap_or_else(|| default_cap(inst.n()));
    let stats = harness::uniform_sampling_statistics(&inst, samples, a.reps, a.seed, a.threads)?;
    writeln!(
        out,
        "instance: {inst}\nsamples: {samples}\nrepetitions: {}\nmean_best: {}\nstd_best: {}\nstd_error: {}",
        a.reps,
        stats.mean(),
        stats.std(),
        stats.std_error()
    )
    .map_err(stdout_err)
}
