//! Command-line surface for the all-or-nothing subset solvers.
//!
//! Exit codes: 0 success, 2 input or validation problem, 3 enumeration or
//! capacity budget exceeded, 4 property violation found by `verify`,
//! 5 certified precision exhausted.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use aonmax_core::error::Error;
use aonmax_core::exact::{brute_force, dp_solve};
use aonmax_core::format::{instance_to_json, parse_instance, reduced_to_json};
use aonmax_core::fptas;
use aonmax_core::gen::{rng_for_seed, sample_instance, sample_suite, ProbDist};
use aonmax_core::instance::{Instance, Solution};
use aonmax_core::reduction::{decide, reduce, SubsetSumInstance};

#[derive(Parser)]
#[command(name = "aonmax", version, about = "Maximum expected value all-or-nothing subset solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file (deterministic per seed).
    Gen(GenArgs),
    /// Solve an instance file with one method.
    Solve(SolveArgs),
    /// Cross-check the solvers and the optimum structure on random trials.
    Verify(VerifyArgs),
    /// Map a subset-sum question to an instance with exact rational probabilities.
    Reduce(ReduceArgs),
    /// Decide a subset-sum question through the solver, with a certified margin.
    Decide(DecideArgs),
    /// Run a benchmark grid and write one CSV row per (instance, method).
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of items.
    #[arg(long)]
    n: usize,
    /// Profits are uniform on [1, cmax].
    #[arg(long, default_value_t = 30)]
    cmax: u64,
    /// Probability distribution: uniform(lo,hi) or mixed(q).
    #[arg(long, default_value = "uniform(0.01,0.99)")]
    pdist: String,
    /// RNG seed (ChaCha8).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Dp,
    Fptas,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Dp => "dp",
            Method::Fptas => "fptas",
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file in the JSON format produced by `gen` or `reduce`.
    instance: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Accuracy target; required for (and only for) the fptas method.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random trials.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated accuracy targets for the ratio checks.
    #[arg(long, default_value = "0.5,0.1,0.01")]
    eps: String,
    /// Largest generated item count (enumeration keeps this at 15 or below).
    #[arg(long, default_value_t = 15)]
    n_max: usize,
    #[arg(long, default_value_t = 30)]
    cmax: u64,
    #[arg(long, default_value = "uniform(0.01,0.99)")]
    pdist: String,
    /// Check a single instance file instead of generating trials.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Where to serialize the first offending instance on failure.
    #[arg(long, default_value = "verify-failure.json")]
    replay_out: PathBuf,
    /// Testing hook: perturb the dp value so the failure path triggers.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Comma-separated positive integer weights, e.g. 1,2,3.
    weights: String,
    #[arg(long)]
    target: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecideArgs {
    /// Comma-separated positive integer weights, e.g. 1,2,3.
    weights: String,
    #[arg(long)]
    target: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Item counts: comma list (20,40,80) or range with step (10..100:10).
    /// An empty string yields a header-only CSV.
    #[arg(long)]
    n: String,
    /// Comma list of profit caps.
    #[arg(long, default_value = "50")]
    cmax: String,
    /// Comma list of methods to run.
    #[arg(long, default_value = "dp,fptas")]
    methods: String,
    /// Comma list of accuracy targets (fptas rows only).
    #[arg(long, default_value = "0.1")]
    eps: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "uniform(0.01,0.99)")]
    pdist: String,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Decide(args) => cmd_decide(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::TooLargeForEnumeration { .. }
            | Error::CapacityOverflow
            | Error::Overflow(_) => 3,
            Error::PrecisionExhausted => 5,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::input(err.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn read_instance_file(path: &PathBuf) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let instance = parse_instance(&text)?;
    instance.validate()?;
    Ok(instance)
}

fn parse_weights(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::input(format!("bad weight {s:?}")))
        })
        .collect()
}

fn parse_u64_list(text: &str, what: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::input(format!("bad {what} {s:?}")))
        })
        .collect()
}

fn parse_eps_list(text: &str) -> Result<Vec<fptas::Epsilon>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| fptas::Epsilon::parse(s).map_err(Failure::from))
        .collect()
}

// Item counts: "20,40,80" or "10..100:10" (inclusive ends).
fn parse_n_spec(text: &str) -> Result<Vec<usize>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((range, step)) = text.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Failure::input(format!("bad item-count range {text:?}")))?;
        let lo: usize = lo.trim().parse().map_err(|_| Failure::input("bad range start"))?;
        let hi: usize = hi.trim().parse().map_err(|_| Failure::input("bad range end"))?;
        let step: usize = step.trim().parse().map_err(|_| Failure::input("bad range step"))?;
        if step == 0 || lo > hi {
            return Err(Failure::input(format!("bad item-count range {text:?}")));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::input(format!("bad item count {s:?}")))
        })
        .collect()
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Failure> {
    if args.n == 0 {
        return Err(Failure::input("need at least one item"));
    }
    if args.cmax == 0 {
        return Err(Failure::input("cmax must be at least 1"));
    }
    let dist: ProbDist = args.pdist.parse()?;
    let mut rng = rng_for_seed(args.seed);
    let instance = sample_instance(args.n, args.cmax, &dist, &mut rng);
    emit(&args.out, &instance_to_json(&instance))?;
    Ok(ExitCode::SUCCESS)
}

fn solve_with(
    instance: &Instance,
    method: Method,
    eps: Option<&fptas::Epsilon>,
) -> Result<(Solution, u64), Failure> {
    Ok(match method {
        Method::Brute => (brute_force(instance)?, 0),
        Method::Dp => {
            let cells = dp_cells(instance);
            (dp_solve(instance)?, cells)
        }
        Method::Fptas => {
            let result = fptas::solve(instance, eps.expect("checked by caller"))?;
            (result.solution, result.table_cells)
        }
    })
}

fn dp_cells(instance: &Instance) -> u64 {
    let cbar: u64 = instance.items.iter().map(|it| it.profit).sum();
    (instance.len() as u64 + 1) * (cbar + 1)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Failure> {
    let eps = match (args.method, &args.eps) {
        (Method::Fptas, Some(text)) => Some(fptas::Epsilon::parse(text)?),
        (Method::Fptas, None) => {
            return Err(Failure::input("--eps is required for the fptas method"))
        }
        (_, Some(_)) => {
            return Err(Failure::input("--eps only applies to the fptas method"))
        }
        (_, None) => None,
    };
    let instance = read_instance_file(&args.instance)?;
    let start = Instant::now();
    let (solution, _) = solve_with(&instance, args.method, eps.as_ref())?;
    let wall_time_us = start.elapsed().as_micros() as u64;
    let mut report = json!({
        "method": args.method.name(),
        "support": solution.support,
        "profit_sum": solution.profit_sum,
        "value": solution.value,
        "wall_time_us": wall_time_us,
    });
    if let Some(eps) = &eps {
        report["epsilon"] = json!(eps.value());
    }
    println!("{report}");
    Ok(ExitCode::SUCCESS)
}

struct CheckCounter {
    name: &'static str,
    checked: usize,
    violations: usize,
}

impl CheckCounter {
    fn new(name: &'static str) -> Self {
        CheckCounter {
            name,
            checked: 0,
            violations: 0,
        }
    }

    fn record(&mut self, ok: bool) -> bool {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
        ok
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    const REL_TOL: f64 = 1e-12;
    if args.instance.is_none() && !(1..=15).contains(&args.n_max) {
        return Err(Failure::input("--n-max must lie in [1, 15]"));
    }
    let eps_list = parse_eps_list(&args.eps)?;
    let dist: ProbDist = args.pdist.parse()?;

    let instances: Vec<Instance> = match &args.instance {
        Some(path) => vec![read_instance_file(path)?],
        None => sample_suite(args.trials, args.n_max, args.cmax, &dist, args.seed),
    };

    let mut brute_vs_dp = CheckCounter::new("brute_vs_dp");
    let mut ratio_checks: Vec<(f64, CheckCounter)> = eps_list
        .iter()
        .map(|e| (e.value(), CheckCounter::new("fptas_ratio")))
        .collect();
    let mut low_count = CheckCounter::new("optimum_low_count");
    let mut partner = CheckCounter::new("optimum_partner_product");
    let mut offender: Option<(&'static str, Instance)> = None;
    let note_violation =
        |name: &'static str, inst: &Instance, slot: &mut Option<(&'static str, Instance)>| {
            if slot.is_none() {
                *slot = Some((name, inst.clone()));
            }
        };

    for instance in &instances {
        let exact = brute_force(instance)?;
        let mut dp = dp_solve(instance)?;
        if args.inject_fault {
            dp.value *= 1.0 + 1e-6;
        }
        let rel = (dp.value - exact.value).abs() / exact.value.abs().max(1e-300);
        if !brute_vs_dp.record(rel <= REL_TOL) {
            note_violation("brute_vs_dp", instance, &mut offender);
        }

        for (eps_val, counter) in ratio_checks.iter_mut() {
            let eps = fptas::Epsilon::new(*eps_val)?;
            let approx = fptas::solve(instance, &eps)?.solution.value;
            let ratio = approx / exact.value.max(1e-300);
            if !counter.record(ratio >= 1.0 - *eps_val - REL_TOL && ratio <= 1.0 + REL_TOL) {
                note_violation("fptas_ratio", instance, &mut offender);
            }
        }

        let lows = exact
            .support
            .iter()
            .filter(|&&i| instance.items[i].prob < 0.5)
            .count();
        if !low_count.record(lows <= 1) {
            note_violation("optimum_low_count", instance, &mut offender);
        }
        if exact.support.len() >= 2 {
            let &l = exact
                .support
                .iter()
                .min_by(|&&a, &&b| {
                    instance.items[a]
                        .prob
                        .partial_cmp(&instance.items[b].prob)
                        .unwrap()
                })
                .unwrap();
            if instance.items[l].prob < 0.5 {
                let rest: f64 = exact
                    .support
                    .iter()
                    .filter(|&&i| i != l)
                    .map(|&i| instance.items[i].prob)
                    .product();
                if !partner.record(rest >= 0.5 - REL_TOL) {
                    note_violation("optimum_partner_product", instance, &mut offender);
                }
            }
        }
    }

    println!(
        "{}: {} checked, {} violations",
        brute_vs_dp.name, brute_vs_dp.checked, brute_vs_dp.violations
    );
    for (eps_val, counter) in &ratio_checks {
        println!(
            "{}(eps={}): {} checked, {} violations",
            counter.name, eps_val, counter.checked, counter.violations
        );
    }
    for counter in [&low_count, &partner] {
        println!(
            "{}: {} checked, {} violations",
            counter.name, counter.checked, counter.violations
        );
    }

    if let Some((name, instance)) = offender {
        fs::write(&args.replay_out, instance_to_json(&instance))
            .map_err(|e| Failure::input(format!("cannot write replay file: {e}")))?;
        eprintln!(
            "verify: {name} violated; offending instance written to {}",
            args.replay_out.display()
        );
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(args: ReduceArgs) -> Result<ExitCode, Failure> {
    let ss = SubsetSumInstance::new(parse_weights(&args.weights)?, args.target);
    let red = reduce(&ss)?;
    emit(&args.out, &reduced_to_json(&red))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decide(args: DecideArgs) -> Result<ExitCode, Failure> {
    let ss = SubsetSumInstance::new(parse_weights(&args.weights)?, args.target);
    let report = decide(&ss)?;
    // Non-finite margins (target 1, or nothing below the target) serialize
    // as null.
    println!(
        "{}",
        json!({
            "feasible": report.feasible,
            "optimal_log_value": report.optimal_log_value,
            "threshold": report.threshold,
            "margin": report.margin,
            "certified": report.certified,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_methods(text: &str) -> Result<Vec<Method>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match s.trim() {
            "brute" => Ok(Method::Brute),
            "dp" => Ok(Method::Dp),
            "fptas" => Ok(Method::Fptas),
            other => Err(Failure::input(format!("unknown method {other:?}"))),
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Failure> {
    let ns = parse_n_spec(&args.n)?;
    let cmaxes = parse_u64_list(&args.cmax, "cmax")?;
    let methods = parse_methods(&args.methods)?;
    let eps_list = parse_eps_list(&args.eps)?;
    let dist: ProbDist = args.pdist.parse()?;
    if methods.contains(&Method::Fptas) && eps_list.is_empty() {
        return Err(Failure::input("fptas rows need at least one --eps value"));
    }

    let mut csv = String::from("method,n,cmax,epsilon,seed,value,profit_sum,wall_time_us,table_cells\n");
    let mut cell_index = 0u64;
    for &n in &ns {
        for &cmax in &cmaxes {
            let seed = args.seed.wrapping_add(cell_index);
            cell_index += 1;
            let mut rng = rng_for_seed(seed);
            let instance = sample_instance(n, cmax, &dist, &mut rng);
            for &method in &methods {
                let eps_slots: Vec<Option<&fptas::Epsilon>> = match method {
                    Method::Fptas => eps_list.iter().map(Some).collect(),
                    _ => vec![None],
                };
                for eps in eps_slots {
                    let start = Instant::now();
                    let (solution, table_cells) = solve_with(&instance, method, eps)?;
                    let wall_time_us = start.elapsed().as_micros() as u64;
                    let eps_text = eps.map_or(String::new(), |e| e.value().to_string());
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        method.name(),
                        n,
                        cmax,
                        eps_text,
                        seed,
                        solution.value,
                        solution.profit_sum,
                        wall_time_us,
                        table_cells
                    ));
                }
            }
        }
    }
    emit(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}
