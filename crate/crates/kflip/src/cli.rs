//! Command-line front end: flag/config parsing, sweep orchestration, and
//! CSV/JSON emission.
//!
//! Subcommands: `potential`, `equilibria`, `hitting`, `phase`, `rhomin`,
//! `simulate`, `matrix-dump`. Exit codes: 0 success, 1 usage error,
//! 2 numerical error. Every subcommand is deterministic given its full flag
//! set (including `--seed`), and output is independent of `--threads` /
//! `KFLIP_THREADS`.
//!
//! A JSON config file (`--config`) mirrors the long flag names; flags given
//! on the command line override file values.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::chain::{hitting_curve, potential_from_pi, stationary_distribution};
use crate::error::Error;
use crate::escape::{escape_estimate, phase_diagram, PhaseDiagramSpec, PhasePlane};
use crate::model::{
    fp_potential, h_star, solve_equilibria, GameParams, NoiseKind, NoiseModel, Regime,
};
use crate::montecarlo::{run_samples, summarize, HitResult, RunConfig, DEFAULT_MAX_STEPS};
use crate::numeric::linspace;
use crate::transition::build_transition_matrix;

/// Entry point used by the `kflip` binary; returns the process exit code.
pub fn run_command(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(summary_line) => {
            eprintln!("{summary_line}");
            0
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

#[derive(Debug)]
enum CliFailure {
    Usage(String),
    Numerical(Error),
    Io(std::io::Error),
}

impl CliFailure {
    fn exit_code(&self) -> i32 {
        match self {
            CliFailure::Usage(_) => 1,
            CliFailure::Numerical(_) | CliFailure::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliFailure::Usage(msg) => write!(f, "{msg}"),
            CliFailure::Numerical(e) => write!(f, "{e}"),
            CliFailure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => CliFailure::Usage(msg),
            other => CliFailure::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliFailure>;

#[derive(Parser)]
#[command(
    name = "kflip",
    version,
    about = "Exact and Monte Carlo first-hitting-time analysis of the k-flip Ising game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Effective potential curves: V = -ln pi per k, or the continuum limit
    Potential(PotentialArgs),
    /// Curie-Weiss fixed points, spinodal data and regime (JSON)
    Equilibria(EquilibriaArgs),
    /// Hitting-time moment curves over k = 1..N (CSV)
    Hitting(HittingArgs),
    /// Two-regime phase diagram on a (beta, gamma) or (beta, N) grid (CSV)
    Phase(PhaseArgs),
    /// Exact and estimated escape-minimum location over a beta sweep (CSV)
    Rhomin(RhominArgs),
    /// Seed-reproducible Monte Carlo hitting-time batch (JSON summary)
    Simulate(SimulateArgs),
    /// Dense transition-matrix dump (CSV)
    MatrixDump(MatrixDumpArgs),
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct ModelArgs {
    /// Number of agents N
    #[arg(long)]
    n: Option<usize>,
    /// Inverse temperature
    #[arg(long)]
    beta: Option<f64>,
    /// Coupling J (default 1)
    #[arg(long)]
    j: Option<f64>,
    /// External field H (mutually exclusive with --gamma)
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Field as a fraction of the spinodal field: H = gamma * H*(beta)
    #[arg(long)]
    gamma: Option<f64>,
    /// Noise kind: gumbel | normal (default gumbel)
    #[arg(long)]
    noise: Option<String>,
}

impl ModelArgs {
    fn or(self, file: Self) -> Self {
        Self {
            n: self.n.or(file.n),
            beta: self.beta.or(file.beta),
            j: self.j.or(file.j),
            h: self.h.or(file.h),
            gamma: self.gamma.or(file.gamma),
            noise: self.noise.or(file.noise),
        }
    }
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct CommonArgs {
    /// Output file; stdout when omitted
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// JSON config file mirroring the flag names; flags override it
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Worker threads (fallback: the KFLIP_THREADS environment variable)
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonArgs {
    fn or(self, file: Self) -> Self {
        Self {
            output: self.output.or(file.output),
            config: self.config,
            threads: self.threads.or(file.threads),
        }
    }
}

/// Model parameters after flag/config resolution. `k_flip` is a placeholder
/// (1) until each subcommand picks its k values.
struct ResolvedModel {
    base: GameParams,
    gamma: Option<f64>,
}

fn parse_noise(name: Option<&str>) -> CliResult<NoiseKind> {
    match name.unwrap_or("gumbel") {
        "gumbel" => Ok(NoiseKind::Gumbel),
        "normal" => Ok(NoiseKind::Normal),
        other => Err(CliFailure::Usage(format!(
            "--noise must be 'gumbel' or 'normal', got '{other}'"
        ))),
    }
}

fn resolve_model(m: &ModelArgs) -> CliResult<ResolvedModel> {
    let n =
        m.n.ok_or_else(|| CliFailure::Usage("missing required flag --n".into()))?;
    let beta = m
        .beta
        .ok_or_else(|| CliFailure::Usage("missing required flag --beta".into()))?;
    let coupling = m.j.unwrap_or(1.0);
    let kind = parse_noise(m.noise.as_deref())?;
    if m.h.is_some() && m.gamma.is_some() {
        return Err(CliFailure::Usage(
            "--h and --gamma are mutually exclusive; give one of them".into(),
        ));
    }
    let field = match (m.h, m.gamma) {
        (Some(h), _) => h,
        (None, Some(gamma)) => {
            let hs = h_star(beta, coupling, kind).map_err(CliFailure::Numerical)?;
            gamma * hs
        }
        (None, None) => 0.0,
    };
    let noise = NoiseModel::new(kind, beta)?;
    let base = GameParams::new(n, 1, coupling, field, noise)?;
    Ok(ResolvedModel {
        base,
        gamma: m.gamma,
    })
}

/// "lo:hi:count" inclusive range.
fn parse_range(spec: &str, flag: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliFailure::Usage(format!(
            "{flag} expects lo:hi:count, got '{spec}'"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliFailure::Usage(format!("{flag}: bad lower bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliFailure::Usage(format!("{flag}: bad upper bound '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliFailure::Usage(format!("{flag}: bad count '{}'", parts[2])))?;
    let ordered = lo.is_finite() && hi.is_finite() && lo < hi;
    if count < 2 || !ordered {
        return Err(CliFailure::Usage(format!(
            "{flag}: need lo < hi and count >= 2, got '{spec}'"
        )));
    }
    Ok((lo, hi, count))
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliFailure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliFailure::Usage(format!("bad config {}: {e}", path.display())))
}

fn write_output(path: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// 17 significant digits, the precision every CSV field uses.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn threads_setting(common: &CommonArgs) -> Option<usize> {
    common.threads.or_else(|| {
        std::env::var("KFLIP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn in_pool<F: FnOnce() -> CliResult<String> + Send>(
    common: &CommonArgs,
    body: F,
) -> CliResult<String> {
    match threads_setting(common) {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliFailure::Usage(format!("--threads: {e}")))?
            .install(body),
        _ => body(),
    }
}

fn dispatch(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Potential(args) => {
            let args = args.with_config()?;
            in_pool(&args.common, || cmd_potential(&args))
        }
        Command::Equilibria(args) => {
            let args = args.with_config()?;
            cmd_equilibria(&args)
        }
        Command::Hitting(args) => {
            let args = args.with_config()?;
            in_pool(&args.common, || cmd_hitting(&args))
        }
        Command::Phase(args) => {
            let args = args.with_config()?;
            in_pool(&args.common, || cmd_phase(&args))
        }
        Command::Rhomin(args) => {
            let args = args.with_config()?;
            in_pool(&args.common, || cmd_rhomin(&args))
        }
        Command::Simulate(args) => {
            let args = args.with_config()?;
            in_pool(&args.common, || cmd_simulate(&args))
        }
        Command::MatrixDump(args) => {
            let args = args.with_config()?;
            cmd_matrix_dump(&args)
        }
    }
}

macro_rules! impl_with_config {
    ($ty:ty) => {
        impl $ty {
            fn with_config(self) -> CliResult<Self> {
                match &self.common.config {
                    Some(path) => {
                        let file: Self = load_config(path)?;
                        Ok(self.merge(file))
                    }
                    None => Ok(self),
                }
            }
        }
    };
}

// ---------------------------------------------------------------- potential

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct PotentialArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Flip counts, comma separated (e.g. 1,10,50,100,150)
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// pi: V = -ln pi of the exact chain per k; fp: continuum potential
    #[arg(long)]
    source: Option<String>,
    /// Grid points for --source fp
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl PotentialArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            k: self.k.or(file.k),
            source: self.source.or(file.source),
            grid: self.grid.or(file.grid),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(PotentialArgs);

fn cmd_potential(args: &PotentialArgs) -> CliResult<String> {
    let model = resolve_model(&args.model)?;
    let n = model.base.n_agents;
    match args.source.as_deref().unwrap_or("pi") {
        "pi" => {
            let ks = args.k.clone().unwrap_or_else(|| vec![1]);
            if ks.is_empty() {
                return Err(CliFailure::Usage("--k needs at least one value".into()));
            }
            let mut out = String::from("k,i,phi,V\n");
            for &k in &ks {
                let params = model.base.with_k(k)?;
                let omega = build_transition_matrix(&params)?;
                let dist = stationary_distribution(&omega)?;
                let v = potential_from_pi(&dist);
                for (i, value) in v.iter().enumerate() {
                    let phi = i as f64 / n as f64;
                    writeln!(out, "{k},{i},{},{}", fmt17(phi), fmt17(*value)).unwrap();
                }
            }
            write_output(&args.common.output, &out)?;
            Ok(format!(
                "potential: {} k value(s), {} states each",
                ks.len(),
                n + 1
            ))
        }
        "fp" => {
            let points = args.grid.unwrap_or(401);
            if points < 3 {
                return Err(CliFailure::Usage("--grid must be >= 3".into()));
            }
            let lo = 0.5 / n as f64;
            let grid = linspace(lo, 1.0 - lo, points);
            let v = fp_potential(&model.base, &grid)?;
            let mut out = String::from("phi,V\n");
            for (phi, value) in grid.iter().zip(&v) {
                writeln!(out, "{},{}", fmt17(*phi), fmt17(*value)).unwrap();
            }
            write_output(&args.common.output, &out)?;
            Ok(format!(
                "potential: continuum curve on {points} grid points"
            ))
        }
        other => Err(CliFailure::Usage(format!(
            "--source must be 'pi' or 'fp', got '{other}'"
        ))),
    }
}

// --------------------------------------------------------------- equilibria

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct EquilibriaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl EquilibriaArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(EquilibriaArgs);

#[derive(Serialize)]
struct EquilibriaReport {
    beta: f64,
    coupling: f64,
    field: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    noise: String,
    regime: String,
    phi_minus: Option<f64>,
    phi_zero: Option<f64>,
    phi_plus: f64,
    h_star: Option<f64>,
    phi_star: Option<f64>,
}

fn cmd_equilibria(args: &EquilibriaArgs) -> CliResult<String> {
    let model = resolve_model(&args.model)?;
    let eq = solve_equilibria(&model.base);
    let report = EquilibriaReport {
        beta: model.base.noise.beta,
        coupling: model.base.coupling,
        field: model.base.field,
        gamma: model.gamma,
        noise: match model.base.noise.kind {
            NoiseKind::Gumbel => "gumbel".into(),
            NoiseKind::Normal => "normal".into(),
        },
        regime: match eq.regime {
            Regime::HighTemperature => "high-temperature".into(),
            Regime::LowTemperatureHysteresis => "low-temperature-hysteresis".into(),
            Regime::LowTemperatureSingle => "low-temperature-single".into(),
        },
        phi_minus: eq.phi_minus,
        phi_zero: eq.phi_zero,
        phi_plus: eq.phi_plus,
        h_star: eq.h_star,
        phi_star: eq.phi_star,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
    out.push('\n');
    write_output(&args.common.output, &out)?;
    Ok(format!("equilibria: regime {}", report.regime))
}

// ------------------------------------------------------------------ hitting

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct HittingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Trajectory: meta (metastable -> stable) or unstable (-> stable)
    #[arg(long)]
    trajectory: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl HittingArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            trajectory: self.trajectory.or(file.trajectory),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(HittingArgs);

/// Trajectory endpoints for the current field, straight from the fixed-point
/// structure (requires the three-root regime).
fn endpoints_of(params: &GameParams) -> CliResult<(usize, usize, usize)> {
    let eq = solve_equilibria(params);
    let phi_minus = eq
        .phi_minus
        .ok_or(CliFailure::Numerical(Error::NoMetastableState))?;
    let n = params.n_agents as f64;
    Ok((
        (phi_minus * n).round() as usize,
        (0.5 * n).round() as usize,
        (eq.phi_plus * n).round() as usize,
    ))
}

fn cmd_hitting(args: &HittingArgs) -> CliResult<String> {
    let model = resolve_model(&args.model)?;
    let (i_meta, i_unstable, i_stable) = endpoints_of(&model.base)?;
    let start = match args.trajectory.as_deref().unwrap_or("meta") {
        "meta" => i_meta,
        "unstable" => i_unstable,
        other => {
            return Err(CliFailure::Usage(format!(
                "--trajectory must be 'meta' or 'unstable', got '{other}'"
            )))
        }
    };
    let curve = hitting_curve(&model.base, start, i_stable)?;
    let mut out = String::from("k,rho,T_mean,T_var,r_tau,r_sigma\n");
    let n = model.base.n_agents as f64;
    for (idx, &k) in curve.k.iter().enumerate() {
        writeln!(
            out,
            "{k},{},{},{},{},{}",
            fmt17(k as f64 / n),
            fmt17(curve.t_mean[idx]),
            fmt17(curve.t_var[idx]),
            fmt17(curve.r_tau[idx]),
            fmt17(curve.r_sigma[idx]),
        )
        .unwrap();
    }
    write_output(&args.common.output, &out)?;
    Ok(format!(
        "hitting: {} -> {} over k = 1..{}",
        start,
        i_stable,
        curve.k.len()
    ))
}

// -------------------------------------------------------------------- phase

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct PhaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Plane: beta-gamma (fixed N) or beta-n (fixed gamma)
    #[arg(long)]
    plane: Option<String>,
    /// Beta axis as lo:hi:count
    #[arg(long)]
    beta_range: Option<String>,
    /// Gamma axis as lo:hi:count (beta-gamma plane)
    #[arg(long)]
    gamma_range: Option<String>,
    /// N axis as lo:hi:count (beta-n plane)
    #[arg(long)]
    n_range: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl PhaseArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            plane: self.plane.or(file.plane),
            beta_range: self.beta_range.or(file.beta_range),
            gamma_range: self.gamma_range.or(file.gamma_range),
            n_range: self.n_range.or(file.n_range),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(PhaseArgs);

fn cmd_phase(args: &PhaseArgs) -> CliResult<String> {
    let kind = parse_noise(args.model.noise.as_deref())?;
    let coupling = args.model.j.unwrap_or(1.0);
    let (b_lo, b_hi, b_n) = parse_range(
        args.beta_range.as_deref().unwrap_or("1.5:3.0:40"),
        "--beta-range",
    )?;
    let betas = linspace(b_lo, b_hi, b_n);

    let plane = match args.plane.as_deref().unwrap_or("beta-gamma") {
        "beta-gamma" => {
            let n = args
                .model
                .n
                .ok_or_else(|| CliFailure::Usage("--plane beta-gamma needs --n".into()))?;
            let (g_lo, g_hi, g_n) = parse_range(
                args.gamma_range.as_deref().unwrap_or("0.7:0.95:40"),
                "--gamma-range",
            )?;
            PhasePlane::BetaGamma {
                n_agents: n,
                gammas: linspace(g_lo, g_hi, g_n),
            }
        }
        "beta-n" => {
            let gamma = args
                .model
                .gamma
                .ok_or_else(|| CliFailure::Usage("--plane beta-n needs --gamma".into()))?;
            let (n_lo, n_hi, n_n) =
                parse_range(args.n_range.as_deref().unwrap_or("40:150:12"), "--n-range")?;
            let mut sizes: Vec<usize> = linspace(n_lo, n_hi, n_n)
                .into_iter()
                .map(|x| x.round().max(2.0) as usize)
                .collect();
            sizes.dedup();
            PhasePlane::BetaN {
                gamma,
                n_agents: sizes,
            }
        }
        other => {
            return Err(CliFailure::Usage(format!(
                "--plane must be 'beta-gamma' or 'beta-n', got '{other}'"
            )))
        }
    };

    let spec = PhaseDiagramSpec {
        betas,
        plane,
        coupling,
        noise_kind: kind,
    };
    let grid = phase_diagram(&spec);
    let mut out = String::from("beta,gamma_or_N,log_ratio\n");
    let width = grid.other_axis.len();
    for (bi, beta) in grid.betas.iter().enumerate() {
        for (oi, other) in grid.other_axis.iter().enumerate() {
            match grid.log_ratio[bi * width + oi] {
                Some(v) => {
                    writeln!(out, "{},{},{}", fmt17(*beta), fmt17(*other), fmt17(v)).unwrap()
                }
                None => writeln!(out, "{},{},", fmt17(*beta), fmt17(*other)).unwrap(),
            }
        }
    }
    write_output(&args.common.output, &out)?;
    let present = grid.log_ratio.iter().flatten().count();
    Ok(format!(
        "phase: {} cells ({} evaluated, {} missing)",
        grid.log_ratio.len(),
        present,
        grid.log_ratio.len() - present
    ))
}

// ------------------------------------------------------------------- rhomin

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct RhominArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Beta sweep as lo:hi:count
    #[arg(long)]
    beta_range: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl RhominArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            beta_range: self.beta_range.or(file.beta_range),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(RhominArgs);

fn cmd_rhomin(args: &RhominArgs) -> CliResult<String> {
    let n = args
        .model
        .n
        .ok_or_else(|| CliFailure::Usage("missing required flag --n".into()))?;
    let gamma = args
        .model
        .gamma
        .ok_or_else(|| CliFailure::Usage("rhomin needs --gamma".into()))?;
    let kind = parse_noise(args.model.noise.as_deref())?;
    let coupling = args.model.j.unwrap_or(1.0);
    let (lo, hi, count) = parse_range(
        args.beta_range.as_deref().unwrap_or("1.5:3.0:16"),
        "--beta-range",
    )?;

    let mut out =
        String::from("beta,k_min_exact,rho_min_exact,k_min_estimated,rho_min_estimated,phi_mid\n");
    let mut evaluated = 0usize;
    for beta in linspace(lo, hi, count) {
        let row = (|| -> crate::error::Result<String> {
            let hs = h_star(beta, coupling, kind)?;
            let noise = NoiseModel::new(kind, beta)?;
            let params = GameParams::new(n, 1, coupling, gamma * hs, noise)?;
            let est = escape_estimate(&params)?;
            Ok(format!(
                "{},{},{},{},{},{}",
                fmt17(beta),
                est.k_min_exact,
                fmt17(est.rho_min_exact),
                fmt17(est.k_min_estimated),
                fmt17(est.rho_min_estimated),
                fmt17(est.phi_mid),
            ))
        })();
        match row {
            Ok(line) => {
                evaluated += 1;
                writeln!(out, "{line}").unwrap();
            }
            Err(_) => writeln!(out, "{},,,,,", fmt17(beta)).unwrap(),
        }
    }
    write_output(&args.common.output, &out)?;
    Ok(format!("rhomin: {evaluated}/{count} beta points evaluated"))
}

// ----------------------------------------------------------------- simulate

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Number of simultaneously reconsidering agents
    #[arg(long)]
    k: Option<usize>,
    /// Number of independent samples
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed (the full flag set plus this seed fixes the output exactly)
    #[arg(long)]
    seed: Option<u64>,
    /// Start state: meta | unstable | an explicit state index
    #[arg(long)]
    start: Option<String>,
    /// Target state: stable | an explicit state index
    #[arg(long)]
    target: Option<String>,
    /// Per-sample step cap (censored samples are counted, not dropped)
    #[arg(long)]
    max_steps: Option<u64>,
    /// Also write raw hitting times, one integer per line, in sample order
    #[arg(long)]
    dump_samples: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl SimulateArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            k: self.k.or(file.k),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            start: self.start.or(file.start),
            target: self.target.or(file.target),
            max_steps: self.max_steps.or(file.max_steps),
            dump_samples: self.dump_samples.or(file.dump_samples),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(SimulateArgs);

fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let model = resolve_model(&args.model)?;
    let k = args
        .k
        .ok_or_else(|| CliFailure::Usage("missing required flag --k".into()))?;
    let params = model.base.with_k(k)?;
    let n_samples = args.samples.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);

    let start = match args.start.as_deref().unwrap_or("meta") {
        "meta" => endpoints_of(&params)?.0,
        "unstable" => endpoints_of(&params)?.1,
        other => other.parse().map_err(|_| {
            CliFailure::Usage(format!(
                "--start must be 'meta', 'unstable' or a state index, got '{other}'"
            ))
        })?,
    };
    let target = match args.target.as_deref().unwrap_or("stable") {
        "stable" => endpoints_of(&params)?.2,
        other => other.parse().map_err(|_| {
            CliFailure::Usage(format!(
                "--target must be 'stable' or a state index, got '{other}'"
            ))
        })?,
    };

    let config = RunConfig::new(params, start, target, n_samples, seed)?
        .with_max_steps(args.max_steps.unwrap_or(DEFAULT_MAX_STEPS));
    let outcomes = run_samples(&config);
    let summary = summarize(&config, &outcomes)?;

    if let Some(path) = &args.dump_samples {
        let mut dump = String::new();
        for outcome in &outcomes {
            if let HitResult::Hit(steps) = outcome {
                writeln!(dump, "{steps}").unwrap();
            }
        }
        fs::write(path, dump)?;
    }

    let mut out = serde_json::to_string_pretty(&summary).expect("summary serializes");
    out.push('\n');
    write_output(&args.common.output, &out)?;
    Ok(format!(
        "simulate: {} -> {}, n = {}, censored = {}, mean = {:.6e}",
        start, target, summary.n, summary.n_censored, summary.mean
    ))
}

// -------------------------------------------------------------- matrix-dump

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, rename_all = "kebab-case")]
struct MatrixDumpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Number of simultaneously reconsidering agents
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonArgs,
}

impl MatrixDumpArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            model: self.model.or(file.model),
            k: self.k.or(file.k),
            common: self.common.or(file.common),
        }
    }
}
impl_with_config!(MatrixDumpArgs);

fn cmd_matrix_dump(args: &MatrixDumpArgs) -> CliResult<String> {
    let model = resolve_model(&args.model)?;
    let k = args
        .k
        .ok_or_else(|| CliFailure::Usage("missing required flag --k".into()))?;
    let params = model.base.with_k(k)?;
    let omega = build_transition_matrix(&params)?;
    let n = omega.n_states();
    let mut out = String::from("i,j,prob\n");
    for i in 0..n {
        for j in 0..n {
            writeln!(out, "{i},{j},{}", fmt17(omega.prob(i, j))).unwrap();
        }
    }
    write_output(&args.common.output, &out)?;
    Ok(format!("matrix-dump: {n}x{n} entries"))
}
