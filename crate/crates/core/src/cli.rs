//! The `ps` command line: JSON run configs in, tables and CSV files out.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 the model violates a
//! precondition (the agent never searches, an inconsistent public signal),
//! 3 a verification check failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, PmDist, Prior};
use crate::equilibrium::{
    equilibrium_lower_censorship, equilibrium_passfail, verify_stationary, Contract,
};
use crate::error::Error;
use crate::public::{
    full_extraction_check, phi, phi_context, solve_public_equilibrium, FullExtraction, Outcome,
    PublicSignalModel,
};
use crate::roots::SolverOptions;
use crate::search::{never_searches, Environment};
use crate::sim::{fmt_num, simulate_public, simulate_stationary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

/// Grid size of `curves.csv`.
pub const CURVE_POINTS: usize = 512;
/// Number of `k` samples in `phi.csv`.
pub const PHI_POINTS: usize = 257;
pub const DEFAULT_DELTAS: [f64; 4] = [0.5, 0.9, 0.99, 0.999];

/// A distribution as written in config and contract files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistLiteral {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `(x, F(x))` knots of an atomless CDF.
    Pwl {
        knots: Vec<(f64, f64)>,
    },
    /// Density `1 + tilt (2 (x - lo)/(hi - lo) - 1)` on `[lo, hi]`.
    Linear {
        lo: f64,
        hi: f64,
        tilt: f64,
    },
    /// Atoms plus optional sub-CDF knots; posterior-mean distributions only.
    Mixed {
        atoms: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pwl: Option<Vec<(f64, f64)>>,
    },
    /// Binary split of the prior at `cutoff`.
    PassFail {
        cutoff: f64,
    },
    /// Pooling below `cutoff`, revelation above.
    LowerCensorship {
        cutoff: f64,
    },
    FullInfo,
    Uninformative,
}

impl DistLiteral {
    /// As a full-support prior for an environment.
    pub fn to_prior(&self) -> Result<Prior, Error> {
        match self {
            DistLiteral::Uniform { lo, hi } => Prior::uniform(*lo, *hi),
            DistLiteral::Pwl { knots } => Prior::from_knots(knots),
            DistLiteral::Linear { lo, hi, tilt } => Prior::linear_density(*lo, *hi, *tilt),
            other => Err(Error::InvalidDistribution(format!(
                "a prior must be uniform, pwl or linear, got {}",
                other.kind()
            ))),
        }
    }

    /// As an interim belief, which may have gaps in its support.
    pub fn to_interim(&self) -> Result<Prior, Error> {
        match self {
            DistLiteral::Pwl { knots } => Prior::interim_from_knots(knots),
            other => other.to_prior(),
        }
    }

    /// As a posterior-mean distribution on the prior's domain.
    pub fn to_pm(&self, prior: &Prior) -> Result<PmDist, Error> {
        let (lo, hi) = prior.support();
        match self {
            DistLiteral::Mixed { atoms, pwl } => PmDist::new(lo, hi, atoms, pwl.as_deref()),
            DistLiteral::PassFail { cutoff } => PmDist::binary_split(prior, *cutoff),
            DistLiteral::LowerCensorship { cutoff } => PmDist::lower_censorship(prior, *cutoff),
            DistLiteral::FullInfo => Ok(PmDist::full_info(prior)),
            DistLiteral::Uninformative => Ok(PmDist::uninformative(prior)),
            atomless => {
                let f = atomless.to_interim()?;
                PmDist::new(lo, hi, &[], Some(&f.knots()))
            }
        }
    }

    pub fn from_pm(g: &PmDist) -> Self {
        let knots = g.continuous_knots();
        DistLiteral::Mixed {
            atoms: g.atoms().to_vec(),
            pwl: (!knots.is_empty()).then_some(knots),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            DistLiteral::Uniform { .. } => "uniform",
            DistLiteral::Pwl { .. } => "pwl",
            DistLiteral::Linear { .. } => "linear",
            DistLiteral::Mixed { .. } => "mixed",
            DistLiteral::PassFail { .. } => "pass_fail",
            DistLiteral::LowerCensorship { .. } => "lower_censorship",
            DistLiteral::FullInfo => "full_info",
            DistLiteral::Uninformative => "uninformative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub prior: DistLiteral,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeConfig {
    pub label: String,
    pub weight: f64,
    pub interim: DistLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicSignalConfig {
    pub outcomes: Vec<OutcomeConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_tolerance() -> f64 {
    SolverOptions::default().tolerance
}

fn default_max_iterations() -> usize {
    SolverOptions::default().max_iterations
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_episodes")]
    pub episodes: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_episodes() -> u64 {
    100_000
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            episodes: default_episodes(),
            seed: 0,
        }
    }
}

/// Top-level run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub public_signal: Option<PublicSignalConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| CliError::usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Range checks that the JSON types alone do not capture.
    fn validate(&self) -> Result<(), CliError> {
        let d = self.environment.delta;
        if !(d > 0.0 && d < 1.0) {
            return Err(CliError::usage(format!(
                "environment.delta must lie in (0, 1), got {d}"
            )));
        }
        if !(self.solver.tolerance > 0.0) || self.solver.max_iterations == 0 {
            return Err(CliError::usage(
                "solver.tolerance and solver.max_iterations must be positive",
            ));
        }
        if self.simulation.episodes == 0 {
            return Err(CliError::usage("simulation.episodes must be at least 1"));
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<Environment, CliError> {
        self.environment_at(self.environment.delta)
    }

    fn environment_at(&self, delta: f64) -> Result<Environment, CliError> {
        let prior = self
            .environment
            .prior
            .to_prior()
            .map_err(CliError::config)?;
        let env = Environment::new(prior, delta).map_err(CliError::config)?;
        Ok(env.with_solver(SolverOptions {
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
        }))
    }

    pub fn public_model(&self, prior: &Prior) -> Result<Option<PublicSignalModel>, CliError> {
        let Some(cfg) = &self.public_signal else {
            return Ok(None);
        };
        let outcomes = cfg
            .outcomes
            .iter()
            .map(|o| {
                Ok(Outcome {
                    label: o.label.clone(),
                    weight: o.weight,
                    interim: o.interim.to_interim().map_err(CliError::config)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        PublicSignalModel::new(prior.clone(), outcomes)
            .map(Some)
            .map_err(CliError::from)
    }
}

/// A contract file: price plus a distribution literal on the prior's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractLiteral {
    pub price: f64,
    pub distribution: DistLiteral,
}

impl ContractLiteral {
    pub fn from_contract(c: &Contract) -> Self {
        Self {
            price: c.price,
            distribution: DistLiteral::from_pm(&c.dist),
        }
    }

    pub fn to_contract(&self, env: &Environment) -> Result<Contract, Error> {
        Contract::new(env, self.price, self.distribution.to_pm(env.prior())?)
    }
}

/// Error carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    /// A library error raised while reading the config is a config error.
    fn config(e: Error) -> Self {
        Self::usage(e.to_string())
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::usage(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NeverSearches { .. }
            | Error::InvalidModel(_)
            | Error::Inconsistent(_)
            | Error::Bracketing { .. }
            | Error::NoConvergence { .. } => EXIT_PRECONDITION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ps",
    version,
    about = "Persuaded search: stationary equilibrium solver, verifier and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct the pass/fail equilibrium and write its values and c-curves.
    Solve(Common),
    /// Check whether a contract is a stationary equilibrium.
    Verify {
        #[command(flatten)]
        common: Common,
        /// JSON contract file.
        #[arg(long)]
        contract: PathBuf,
    },
    /// Monte Carlo playout of the equilibrium (public-signal one if configured).
    Simulate(Common),
    /// Equilibrium price and value across discount factors.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated discount factors.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Solve the equilibrium with the configured public signal.
    Public(Common),
}

/// Runs the CLI; `PS_SEED` is read from the process environment.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_seed(args, std::env::var("PS_SEED").ok())
}

/// Runs the CLI with an explicit seed override.
pub fn run_with_seed<I, T>(args: I, seed: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, seed) {
        Ok(report) => {
            print!("{}", report.text);
            report.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cmd: Command, seed: Option<String>) -> Result<CommandOutput, CliError> {
    let (common, extra) = match &cmd {
        Command::Solve(c) | Command::Simulate(c) | Command::Public(c) => (c, None),
        Command::Verify { common, contract } => (common, Some(contract.clone())),
        Command::Sweep { common, .. } => (common, None),
    };
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(s) = seed {
        cfg.simulation.seed = s.trim().parse().map_err(|_| {
            CliError::usage(format!("PS_SEED must be an unsigned integer, got {s:?}"))
        })?;
    }
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("ps-out"));
    match cmd {
        Command::Solve(_) => cmd_solve(&cfg, &out),
        Command::Verify { .. } => cmd_verify(&cfg, &extra.expect("verify has a contract path")),
        Command::Simulate(_) => cmd_simulate(&cfg, &out),
        Command::Sweep { deltas, .. } => cmd_sweep(
            &cfg,
            &deltas.unwrap_or_else(|| DEFAULT_DELTAS.to_vec()),
            &out,
        ),
        Command::Public(_) => cmd_public(&cfg, &out),
    }
}

fn ok(text: String) -> Result<CommandOutput, CliError> {
    Ok(CommandOutput {
        text,
        code: EXIT_OK,
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

fn require_search(env: &Environment) -> Result<(), CliError> {
    if never_searches(env) {
        let (lo, _) = env.prior().support();
        return Err(CliError {
            code: EXIT_PRECONDITION,
            message: format!(
                "the agent never searches: lowest quality {lo} is at least delta * mean = {}",
                env.delta() * env.prior().mean()
            ),
        });
    }
    Ok(())
}

/// Writes `equilibrium.csv`, `curves.csv` and the equilibrium contracts.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let env = cfg.environment()?;
    require_search(&env)?;
    let eq = equilibrium_passfail(&env)?;
    let lc = equilibrium_lower_censorship(&env)?;
    let b = eq.benchmarks;
    let fields = [
        ("agent_value", eq.agent_value),
        ("principal_value", eq.principal_value),
        ("price", eq.contract.price),
        ("r_lo", b.r_lo),
        ("r_hi", b.r_hi),
        ("u_lo", b.u_lo),
        ("u_hi", b.u_hi),
        ("cutoff", eq.cutoff),
        ("fail_mean", eq.fail_mean),
        ("pass_mean", eq.pass_mean),
    ];
    let mut csv = fields.iter().map(|f| f.0).collect::<Vec<_>>().join(",");
    csv.push('\n');
    csv += &fields
        .iter()
        .map(|f| fmt_num(f.1))
        .collect::<Vec<_>>()
        .join(",");
    csv.push('\n');
    write_file(out, "equilibrium.csv", &csv)?;

    let f = env.prior();
    let g0 = PmDist::uninformative(f);
    let (lo, hi) = f.support();
    let slope = (1.0 - env.delta()) / env.delta();
    let mut curves = String::from("x,c_prior,c_pass_fail,c_uninformative,line\n");
    for i in 0..CURVE_POINTS {
        let x = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
        let _ = writeln!(
            curves,
            "{},{},{},{},{}",
            fmt_num(x),
            fmt_num(f.expected_excess(x)),
            fmt_num(eq.contract.dist.expected_excess(x)),
            fmt_num(g0.expected_excess(x)),
            fmt_num(slope * x)
        );
    }
    write_file(out, "curves.csv", &curves)?;
    for (name, c) in [
        ("contract.json", &eq.contract),
        ("contract_lower_censorship.json", &lc.contract),
    ] {
        let json = serde_json::to_string_pretty(&ContractLiteral::from_contract(c))
            .expect("contract literals serialize");
        write_file(out, name, &(json + "\n"))?;
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "stationary pass/fail equilibrium (delta = {})",
        env.delta()
    );
    for (name, v) in fields {
        let _ = writeln!(text, "  {name:<16} {v:.12}");
    }
    let _ = writeln!(
        text,
        "  {:<16} {:.12}",
        "pass_probability",
        1.0 - eq.fail_probability
    );
    let _ = writeln!(text, "wrote {}", out.display());
    ok(text)
}

/// Text printed by a command together with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub code: i32,
}

/// Prints the verification report; exit 3 if any check fails.
pub fn cmd_verify(cfg: &RunConfig, contract_path: &Path) -> Result<CommandOutput, CliError> {
    let env = cfg.environment()?;
    require_search(&env)?;
    let text = fs::read_to_string(contract_path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", contract_path.display())))?;
    let literal: ContractLiteral = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid contract: {e}")))?;
    let contract = literal.to_contract(&env).map_err(CliError::config)?;
    let report = verify_stationary(&env, &contract)?;
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    };
    let mut text = format!("{report}\n");
    if !report.passed() {
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        let _ = writeln!(text, "failed: {}", failed.join(", "));
    }
    Ok(CommandOutput { text, code })
}

/// Simulates the configured equilibrium and writes the report CSVs.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let env = cfg.environment()?;
    require_search(&env)?;
    let sim = cfg.simulation;
    let (report, target_u, target_v) = match cfg.public_model(env.prior())? {
        Some(model) => {
            let peq = solve_public_equilibrium(&env, &model)?;
            let rep = simulate_public(&env, &model, &peq, sim.episodes, sim.seed)?;
            (rep, peq.agent_value, peq.principal_value)
        }
        None => {
            let eq = equilibrium_passfail(&env)?;
            let rep = simulate_stationary(&env, &eq, sim.episodes, sim.seed)?;
            (rep, eq.agent_value, eq.principal_value)
        }
    };
    report.write_csv(out).map_err(|e| CliError::io(out, e))?;
    let (q1, q1_se) = report.first_period_stop();
    let mut text = String::new();
    let _ = writeln!(text, "{} episodes, seed {}", report.n_episodes, report.seed);
    let _ = writeln!(
        text,
        "  agent      {:.6} +/- {:.6}   (theory {:.6})",
        report.agent_mean, report.agent_se, target_u
    );
    let _ = writeln!(
        text,
        "  principal  {:.6} +/- {:.6}   (theory {:.6})",
        report.principal_mean, report.principal_se, target_v
    );
    let _ = writeln!(text, "  stop in period 1  {q1:.6} +/- {q1_se:.6}");
    let _ = writeln!(text, "  truncated  {}", report.truncated);
    let _ = writeln!(text, "wrote {}", out.display());
    ok(text)
}

/// Writes `sweep.csv`; never-search discount factors are marked, not fatal.
pub fn cmd_sweep(cfg: &RunConfig, deltas: &[f64], out: &Path) -> Result<CommandOutput, CliError> {
    if deltas.is_empty() {
        return Err(CliError::usage(
            "--deltas must list at least one discount factor",
        ));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(CliError::usage(format!(
            "discount factors must lie in (0, 1), got {d}"
        )));
    }
    let mut csv = String::from("delta,status,price,principal_value,r_hi,F_r_hi,identity\n");
    let mut text = format!(
        "{:>8} {:>14} {:>14} {:>14} {:>10} {:>10}\n",
        "delta", "price", "V", "r_hi", "F(r_hi)", "identity"
    );
    for &d in deltas {
        let env = cfg.environment_at(d)?;
        if never_searches(&env) {
            let _ = writeln!(csv, "{},never_search,,,,,", fmt_num(d));
            let _ = writeln!(text, "{d:>8} never searches");
            continue;
        }
        let eq = equilibrium_passfail(&env)?;
        let identity = eq.contract.price / (1.0 - d * eq.fail_probability) - eq.principal_value;
        let _ = writeln!(
            csv,
            "{},ok,{},{},{},{},{}",
            fmt_num(d),
            fmt_num(eq.contract.price),
            fmt_num(eq.principal_value),
            fmt_num(eq.cutoff),
            fmt_num(eq.fail_probability),
            fmt_num(identity)
        );
        let _ = writeln!(
            text,
            "{d:>8} {:>14.8e} {:>14.8e} {:>14.10} {:>10.6} {:>10.1e}",
            eq.contract.price, eq.principal_value, eq.cutoff, eq.fail_probability, identity
        );
    }
    write_file(out, "sweep.csv", &csv)?;
    let _ = writeln!(text, "wrote {}", out.display());
    ok(text)
}

/// Writes `public_outcomes.csv`, `public_summary.csv` and `phi.csv`.
pub fn cmd_public(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let env = cfg.environment()?;
    require_search(&env)?;
    let model = cfg
        .public_model(env.prior())?
        .ok_or_else(|| CliError::usage("the config has no public_signal section"))?;
    let peq = solve_public_equilibrium(&env, &model)?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();

    let mut outcomes = String::from("label,weight,case,xbar,cutoff,price,psi\n");
    for p in &peq.outcomes {
        let _ = writeln!(
            outcomes,
            "{},{},{},{},{},{},{}",
            p.label,
            fmt_num(p.weight),
            p.case.tag(),
            opt(p.xbar),
            opt(p.cutoff),
            fmt_num(p.price),
            fmt_num(p.psi)
        );
    }
    write_file(out, "public_outcomes.csv", &outcomes)?;

    let extraction = match full_extraction_check(&env, &model)? {
        FullExtraction::NotApplicable => "not_applicable",
        FullExtraction::Holds => "holds",
        FullExtraction::Fails => "fails",
    };
    let mut summary = String::from("statistic,value\n");
    for (name, v) in [
        ("r_xi", peq.r_xi),
        ("k_star", peq.k_star),
        ("agent_value", peq.agent_value),
        ("principal_value", peq.principal_value),
        ("r_hi", peq.r_hi),
        ("phi_at_zero", peq.phi_at_zero),
        ("phi_at_max", peq.phi_at_max),
        ("fixed_point_residual", peq.fixed_point_residual),
        ("self_generation_residual", peq.self_generation_residual),
    ] {
        let _ = writeln!(summary, "{name},{}", fmt_num(v));
    }
    let _ = writeln!(summary, "full_extraction,{extraction}");
    write_file(out, "public_summary.csv", &summary)?;

    let ctx = phi_context(&env, &model)?;
    let mut phi_csv = String::from("k,phi\n");
    for i in 0..PHI_POINTS {
        let k = ctx.k_max() * i as f64 / (PHI_POINTS - 1) as f64;
        let _ = writeln!(phi_csv, "{},{}", fmt_num(k), fmt_num(phi(&model, &ctx, k)?));
    }
    write_file(out, "phi.csv", &phi_csv)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "public signal equilibrium: r_xi = {:.10}, k* = {:.10e}, U = {:.10}, V = {:.10}",
        peq.r_xi, peq.k_star, peq.agent_value, peq.principal_value
    );
    let _ = writeln!(
        text,
        "{:<10} {:>8} {:<15} {:>12} {:>12} {:>12} {:>12}",
        "outcome", "weight", "case", "xbar", "cutoff", "price", "psi"
    );
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.8}")).unwrap_or_else(|| "-".into());
    for p in &peq.outcomes {
        let _ = writeln!(
            text,
            "{:<10} {:>8.4} {:<15} {:>12} {:>12} {:>12.8} {:>12.8}",
            p.label,
            p.weight,
            p.case.tag(),
            cell(p.xbar),
            cell(p.cutoff),
            p.price,
            p.psi
        );
    }
    let _ = writeln!(text, "full extraction: {extraction}");
    let _ = writeln!(text, "wrote {}", out.display());
    ok(text)
}
