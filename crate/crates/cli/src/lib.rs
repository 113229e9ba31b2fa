//! Command-line front end for `eprkit`: figure sweeps, Monte-Carlo runs,
//! the experiment catalog and protocol figures of merit.
//!
//! Every value can come from a flag, a `--config` file of `key = value`
//! lines, or a built-in default, in that order of precedence.

pub mod catalog;
pub mod config;
pub mod format;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eprkit::criteria::{causally_separated, criteria_from_state_samples, evaluate, CriterionReport};
use eprkit::protocols::{
    direct_reconciliation_threshold, entanglement_swap, qkd_rates, teleport, QkdResult, TeleportLosses,
};
use eprkit::spin::{werner_threshold_sweep, WernerCriterion};
use eprkit::GaussianState;
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::format::{csv_num, csv_opt, write_csv, write_json};
use crate::sweep::{lossy_pair, run_sweep, Criterion, Params, Preset, SweepSpec, Variable};

/// Smallest Monte-Carlo sample count accepted.
pub const MIN_MONTECARLO_SAMPLES: usize = 10_000;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameter values; exit code 2.
    Usage(String),
    /// Anything else; exit code 1.
    Internal(String),
    /// Argument-parser outcome, including `--help`.
    Clap(clap::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
            CliError::Clap(e) => e.exit_code(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
            CliError::Clap(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<eprkit::Error> for CliError {
    fn from(e: eprkit::Error) -> Self {
        match e {
            eprkit::Error::InvalidArgument(_) | eprkit::Error::NoChannel(_) => CliError::Usage(e.to_string()),
            eprkit::Error::Degenerate(_) | eprkit::Error::DegenerateProbe(_) => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        <OutputFormat as ValueEnum>::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown output format '{s}' (csv, json)")))
    }
}

#[derive(Debug, Parser)]
#[command(name = "eprkit", version, about = "EPR, steering and entanglement criteria for Gaussian optics")]
pub struct Cli {
    /// Output format; sweeps and the catalog default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Seed for Monte-Carlo sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Plain-text `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep one parameter and tabulate a criterion family.
    Sweep(SweepArgs),
    /// Sample homodyne records and compare empirical criteria with analytic ones.
    Montecarlo(MonteCarloArgs),
    /// Published experimental EPR products and inseparability values.
    Catalog(CatalogArgs),
    /// Net information rates for entanglement-based QKD.
    Qkd(QkdArgs),
    /// Coherent-state teleportation fidelity and T–V measures.
    Teleport(TeleportArgs),
    /// Criteria for an entanglement-swapped pair.
    Swap(SwapArgs),
    /// Werner-state thresholds.
    Werner(WernerArgs),
    /// Causal separation of two measurement events.
    Causality(CausalityArgs),
}

/// Shared physical parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct PhysArgs {
    /// Squeezing parameter.
    #[arg(long)]
    pub r: Option<f64>,
    /// Detection efficiency of the inferred mode A.
    #[arg(long = "eta-a", visible_alias = "eta_A")]
    pub eta_a: Option<f64>,
    /// Detection efficiency of the steering mode B.
    #[arg(long = "eta-b", visible_alias = "eta_B")]
    pub eta_b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// fig3-symmetric, fig3-eta-a or fig3-eta-b.
    #[arg(long)]
    pub preset: Option<String>,
    /// r, eta_A, eta_B, eta (both efficiencies), p_W or gain.
    #[arg(long)]
    pub variable: Option<String>,
    /// cv, swap, bohm, teleport or qkd.
    #[arg(long, default_value = None)]
    pub criterion: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub phys: PhysArgs,
    /// Second pair's squeezing (swap); defaults to r.
    #[arg(long)]
    pub r2: Option<f64>,
    /// Werner weight.
    #[arg(long = "p-w", visible_alias = "p_W")]
    pub p_w: Option<f64>,
    /// Fixed gain; otherwise regression gains (cv) or unity (teleport, swap).
    #[arg(long)]
    pub gain: Option<f64>,
    /// Coherent teleporter input amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    /// Shots per quadrature setting.
    #[arg(long = "n-samples", visible_alias = "n")]
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CatalogArgs {
    /// Validate ε ≤ 2D and add verdict columns; exits 1 on a failed record.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct QkdArgs {
    #[arg(long)]
    pub r: Option<f64>,
    /// Channel transmission to Bob.
    #[arg(long = "eta-b", visible_alias = "eta_B")]
    pub eta_b: Option<f64>,
    /// Tabulate η_B = k/steps for k = 1..steps and locate the direct-reconciliation crossing.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TeleportArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long)]
    pub gain: Option<f64>,
    /// Coherent input amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SwapArgs {
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WernerArgs {
    /// bohm, steering, bell or all.
    #[arg(long)]
    pub criterion: Option<String>,
    /// Bisection resolution for the Bohm threshold.
    #[arg(long)]
    pub resolution: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CausalityArgs {
    /// Separation L of the two detectors.
    #[arg(long)]
    pub distance: Option<f64>,
    #[arg(long = "t-a", allow_negative_numbers = true)]
    pub t_a: Option<f64>,
    #[arg(long = "t-b", allow_negative_numbers = true)]
    pub t_b: Option<f64>,
    /// Measurement duration Δt.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Signal speed.
    #[arg(long)]
    pub c: Option<f64>,
}

struct Ctx {
    cfg: Config,
    output: Option<OutputFormat>,
    seed: Option<u64>,
}

impl Ctx {
    fn output(&self, default: OutputFormat) -> Result<OutputFormat, CliError> {
        self.cfg.pick_or(self.output, "output", default)
    }
}

/// Parses `args` (including the program name) and writes the result to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let ctx = Ctx { cfg, output: cli.output, seed: cli.seed };
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(&ctx, a, out),
        Command::Montecarlo(a) => cmd_montecarlo(&ctx, a, out),
        Command::Catalog(a) => cmd_catalog(&ctx, a, out),
        Command::Qkd(a) => cmd_qkd(&ctx, a, out),
        Command::Teleport(a) => cmd_teleport(&ctx, a, out),
        Command::Swap(a) => cmd_swap(&ctx, a, out),
        Command::Werner(a) => cmd_werner(&ctx, a, out),
        Command::Causality(a) => cmd_causality(&ctx, a, out),
    }
}

/// Resolves a sweep specification from flags, config and preset.
pub fn resolve_sweep(cfg: &Config, a: &SweepArgs) -> Result<SweepSpec, CliError> {
    let preset: Option<Preset> = cfg.pick(a.preset.clone(), "preset")?.map(|s: String| s.parse()).transpose()?;
    let (preset_var, base) = match preset {
        Some(p) => {
            let (v, params) = p.defaults();
            (Some(v), params)
        }
        None => (None, Params::default()),
    };
    let variable = match cfg.pick(a.variable.clone(), "variable")? {
        Some(s) => s.parse::<Variable>()?,
        None => preset_var.ok_or_else(|| CliError::Usage("sweep needs --variable or --preset".into()))?,
    };
    let criterion: Criterion = cfg.pick_or(a.criterion.clone(), "criterion", "cv".to_string())?.parse()?;
    let (dlo, dhi, dsteps) = default_range(variable);
    let fixed = Params {
        r: cfg.pick_or(a.phys.r, "r", base.r)?,
        r2: cfg.pick(a.r2, "r2")?,
        eta_a: cfg.pick_or(a.phys.eta_a, "eta_a", base.eta_a)?,
        eta_b: cfg.pick_or(a.phys.eta_b, "eta_b", base.eta_b)?,
        p_w: cfg.pick_or(a.p_w, "p_w", base.p_w)?,
        gain: cfg.pick(a.gain, "gain")?,
        x: cfg.pick_or(a.x, "x", base.x)?,
        p: cfg.pick_or(a.p, "p", base.p)?,
    };
    Ok(SweepSpec {
        criterion,
        variable,
        lo: cfg.pick_or(a.lo, "lo", dlo)?,
        hi: cfg.pick_or(a.hi, "hi", dhi)?,
        steps: cfg.pick_or(a.steps, "steps", dsteps)?,
        fixed,
    })
}

fn default_range(v: Variable) -> (f64, f64, usize) {
    match v {
        Variable::R => (0.0, 3.0, 31),
        Variable::EtaA | Variable::EtaB | Variable::Eta => (0.0, 1.0, 101),
        Variable::PW => (0.0, 1.0, 101),
        Variable::Gain => (0.0, 2.0, 41),
    }
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = resolve_sweep(&ctx.cfg, a)?;
    let table = run_sweep(&spec)?;
    match ctx.output(OutputFormat::Csv)? {
        OutputFormat::Csv => write_csv(out, &table.header(), &table.csv_rows()),
        OutputFormat::Json => write_json(out, &table.to_json()),
    }
}

#[derive(Debug, Serialize)]
struct MonteCarloOutput {
    state: serde_json::Value,
    n_samples: usize,
    seed: u64,
    empirical: CriterionReport,
    analytic: CriterionReport,
}

fn cmd_montecarlo(ctx: &Ctx, a: &MonteCarloArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let r = cfg.pick_or(a.phys.r, "r", 1.0)?;
    let eta_a = cfg.pick_or(a.phys.eta_a, "eta_a", 1.0)?;
    let eta_b = cfg.pick_or(a.phys.eta_b, "eta_b", 1.0)?;
    let n = cfg.pick_or(a.n_samples, "n_samples", 1_000_000)?;
    let seed = cfg.pick_or(ctx.seed, "seed", 0)?;
    if n < MIN_MONTECARLO_SAMPLES {
        return Err(CliError::Usage(format!("montecarlo needs at least {MIN_MONTECARLO_SAMPLES} samples (got {n})")));
    }
    let state = lossy_pair(r, eta_a, eta_b)?;
    let res = MonteCarloOutput {
        state: json!({ "r": r, "eta_A": eta_a, "eta_B": eta_b }),
        n_samples: n,
        seed,
        empirical: criteria_from_state_samples(&state, 0, 1, n, seed)?,
        analytic: evaluate(&state, 0, 1)?,
    };
    match ctx.output(OutputFormat::Json)? {
        OutputFormat::Json => write_json(out, &res),
        OutputFormat::Csv => {
            let se = res.empirical.stderr;
            let (e, t) = (&res.empirical, &res.analytic);
            let rows = vec![
                vec!["epsilon_sq".into(), csv_num(e.epsilon_sq), csv_opt(se.map(|s| s.epsilon_sq)), csv_num(t.epsilon_sq)],
                vec!["duan_D".into(), csv_num(e.duan_d), csv_opt(se.map(|s| s.duan_d)), csv_num(t.duan_d)],
                vec!["sum_criterion".into(), csv_num(e.sum_criterion), String::new(), csv_num(t.sum_criterion)],
                vec!["ppt_min_symplectic".into(), csv_num(e.ppt_min_symplectic), String::new(), csv_num(t.ppt_min_symplectic)],
            ];
            write_csv(out, &["quantity", "empirical", "stderr", "analytic"], &rows)
        }
    }
}

fn cmd_catalog(ctx: &Ctx, a: &CatalogArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let check = a.check || ctx.cfg.get::<bool>("check")?.unwrap_or(false);
    let records: Vec<_> = catalog::CATALOG.iter().map(|r| r.checked()).collect();
    match ctx.output(OutputFormat::Csv)? {
        OutputFormat::Json => {
            if check {
                write_json(out, &records)?;
            } else {
                write_json(out, catalog::CATALOG)?;
            }
        }
        OutputFormat::Csv => {
            let mut header = vec![
                "id",
                "year",
                "epsilon_sq",
                "epsilon_sq_inferred",
                "duan_D",
                "inference_var_x",
                "citation_only",
                "notes",
            ];
            if check {
                header.extend(["epr_paradox", "entangled", "epr_inferable", "consistent"]);
            }
            let opt_bool = |b: Option<bool>| b.map(|v| v.to_string()).unwrap_or_default();
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|c| {
                    let r = &c.record;
                    let mut row = vec![
                        r.id.to_string(),
                        r.year.to_string(),
                        csv_opt(r.epsilon_sq),
                        r.epsilon_sq_inferred.to_string(),
                        csv_opt(r.duan_d),
                        csv_opt(r.inference_var_x),
                        r.citation_only.to_string(),
                        r.notes.to_string(),
                    ];
                    if check {
                        row.extend([
                            opt_bool(c.verdict.epr_paradox),
                            opt_bool(c.verdict.entangled),
                            opt_bool(c.verdict.epr_inferable),
                            c.verdict.consistent.to_string(),
                        ]);
                    }
                    row
                })
                .collect();
            write_csv(out, &header, &rows)?;
        }
    }
    if check {
        let bad: Vec<_> = records
            .iter()
            .filter(|c| !(c.verdict.consistent && c.verdict.well_formed))
            .map(|c| c.record.id)
            .collect();
        if !bad.is_empty() {
            return Err(CliError::Internal(format!("catalog check failed for {}", bad.join(", "))));
        }
    }
    Ok(())
}

fn qkd_cells(q: &QkdResult) -> Vec<String> {
    vec![
        csv_num(q.delta_i_direct),
        csv_num(q.delta_i_reverse),
        csv_num(q.v_a_given_b),
        csv_num(q.v_b_given_a),
        csv_num(q.v_a_given_e),
        csv_num(q.v_b_given_e),
        q.key_possible_direct.to_string(),
        q.key_possible_reverse.to_string(),
    ]
}

const QKD_COLUMNS: [&str; 8] = [
    "delta_I_direct",
    "delta_I_reverse",
    "V_A_given_B",
    "V_B_given_A",
    "V_A_given_E",
    "V_B_given_E",
    "key_possible_direct",
    "key_possible_reverse",
];

fn cmd_qkd(ctx: &Ctx, a: &QkdArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let r = cfg.pick_or(a.r, "r", 1.0)?;
    let sweep = a.sweep || cfg.get::<bool>("sweep")?.unwrap_or(false);
    let format = ctx.output(OutputFormat::Json)?;
    if !sweep {
        let eta_b = cfg.pick_or(a.eta_b, "eta_b", 1.0)?;
        let q = qkd_rates(r, eta_b)?;
        return match format {
            OutputFormat::Json => write_json(out, &q),
            OutputFormat::Csv => {
                let mut header = vec!["r", "eta_B"];
                header.extend(QKD_COLUMNS);
                let mut row = vec![csv_num(r), csv_num(eta_b)];
                row.extend(qkd_cells(&q));
                write_csv(out, &header, &[row])
            }
        };
    }
    let steps = cfg.pick_or(a.steps, "steps", 100)?;
    if steps < 2 {
        return Err(CliError::Usage("qkd sweep needs at least 2 steps".into()));
    }
    let grid: Vec<f64> = (1..=steps).map(|k| k as f64 / steps as f64).collect();
    let rows = grid.iter().map(|&eta| qkd_rates(r, eta).map(|q| (eta, q))).collect::<Result<Vec<_>, _>>()?;
    match format {
        OutputFormat::Json => {
            let crossing = if r > 0.0 { Some(direct_reconciliation_threshold(r, 1e-9)?) } else { None };
            let rows: Vec<_> = rows
                .iter()
                .map(|(eta, q)| {
                    let mut v = serde_json::to_value(q).expect("plain struct");
                    v["eta_B"] = json!(eta);
                    v
                })
                .collect();
            write_json(out, &json!({ "r": r, "direct_crossing_eta_B": crossing, "rows": rows }))
        }
        OutputFormat::Csv => {
            let mut header = vec!["eta_B"];
            header.extend(QKD_COLUMNS);
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|(eta, q)| std::iter::once(csv_num(*eta)).chain(qkd_cells(q)).collect())
                .collect();
            write_csv(out, &header, &rows)
        }
    }
}

fn cmd_teleport(ctx: &Ctx, a: &TeleportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let r = cfg.pick_or(a.phys.r, "r", 1.0)?;
    let gain = cfg.pick_or(a.gain, "gain", 1.0)?;
    let eta_a = cfg.pick_or(a.phys.eta_a, "eta_a", 1.0)?;
    let eta_b = cfg.pick_or(a.phys.eta_b, "eta_b", 1.0)?;
    let x = cfg.pick_or(a.x, "x", 1.0)?;
    let p = cfg.pick_or(a.p, "p", 1.0)?;
    let losses = (eta_a < 1.0 || eta_b < 1.0).then_some(TeleportLosses { eta_alice: eta_a, eta_bob: eta_b });
    let t = teleport(&GaussianState::coherent(x, p)?, r, gain, losses)?;
    match ctx.output(OutputFormat::Json)? {
        OutputFormat::Json => write_json(out, &json!({ "result": t.result, "output_state": t.output })),
        OutputFormat::Csv => {
            let row = vec![
                csv_num(r),
                csv_num(t.result.gain),
                csv_num(t.result.fidelity),
                csv_num(t.result.t),
                csv_num(t.result.v_product),
            ];
            write_csv(out, &["r", "gain", "fidelity", "T", "V_product"], &[row])
        }
    }
}

fn cmd_swap(ctx: &Ctx, a: &SwapArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let r1 = cfg.pick_or(a.r1, "r1", 1.0)?;
    let r2 = cfg.pick_or(a.r2, "r2", r1)?;
    let gain = cfg.pick_or(a.gain, "gain", 1.0)?;
    let rep = entanglement_swap(r1, r2, gain)?;
    match ctx.output(OutputFormat::Json)? {
        OutputFormat::Json => write_json(out, &rep),
        OutputFormat::Csv => {
            let row = vec![
                csv_num(r1),
                csv_num(r2),
                csv_num(gain),
                csv_num(rep.epsilon_sq),
                csv_num(rep.duan_d),
                csv_num(rep.sum_criterion),
                csv_num(rep.ppt_min_symplectic),
                rep.flags.epr_paradox.to_string(),
                rep.flags.entangled_duan.to_string(),
                rep.flags.epr_via_duan.to_string(),
                rep.flags.entangled_ppt.to_string(),
            ];
            let header = [
                "r1",
                "r2",
                "gain",
                "epsilon_sq",
                "duan_D",
                "sum_criterion",
                "ppt_min_symplectic",
                "epr_paradox",
                "entangled_duan",
                "epr_via_duan",
                "entangled_ppt",
            ];
            write_csv(out, &header, &[row])
        }
    }
}

fn cmd_werner(ctx: &Ctx, a: &WernerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let which = cfg.pick_or(a.criterion.clone(), "criterion", "all".to_string())?;
    let resolution = cfg.pick_or(a.resolution, "resolution", 1e-4)?;
    let criteria = match which.to_ascii_lowercase().as_str() {
        "all" => vec![WernerCriterion::SteeringQuote, WernerCriterion::Bohm, WernerCriterion::BellQuote],
        "bohm" => vec![WernerCriterion::Bohm],
        "steering" => vec![WernerCriterion::SteeringQuote],
        "bell" => vec![WernerCriterion::BellQuote],
        other => return Err(CliError::Usage(format!("unknown Werner criterion '{other}' (bohm, steering, bell, all)"))),
    };
    let results = criteria
        .into_iter()
        .map(|c| werner_threshold_sweep(c, resolution))
        .collect::<Result<Vec<_>, _>>()?;
    match ctx.output(OutputFormat::Json)? {
        OutputFormat::Json => write_json(out, &results),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|t| {
                    let name = serde_json::to_value(t.criterion).expect("enum");
                    let source = serde_json::to_value(t.source).expect("enum");
                    vec![
                        name.as_str().unwrap_or_default().to_string(),
                        csv_num(t.threshold),
                        source.as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            write_csv(out, &["criterion", "threshold", "source"], &rows)
        }
    }
}

fn cmd_causality(ctx: &Ctx, a: &CausalityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let distance = cfg
        .pick(a.distance, "distance")?
        .ok_or_else(|| CliError::Usage("causality needs --distance".into()))?;
    let t_a = cfg.pick_or(a.t_a, "t_a", 0.0)?;
    let t_b = cfg.pick_or(a.t_b, "t_b", 0.0)?;
    let dt = cfg.pick_or(a.dt, "dt", 0.0)?;
    let c = cfg.pick_or(a.c, "c", 1.0)?;
    let sep = causally_separated(distance, t_a, t_b, dt, c)?;
    match ctx.output(OutputFormat::Json)? {
        OutputFormat::Json => write_json(
            out,
            &json!({ "distance": distance, "t_a": t_a, "t_b": t_b, "dt": dt, "c": c, "causally_separated": sep }),
        ),
        OutputFormat::Csv => {
            let row = vec![csv_num(distance), csv_num(t_a), csv_num(t_b), csv_num(dt), csv_num(c), sep.to_string()];
            write_csv(out, &["distance", "t_a", "t_b", "dt", "c", "causally_separated"], &[row])
        }
    }
}

/// Runs the CLI against the process streams and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut buf = Vec::new();
    let result = run(args, &mut buf);
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(&buf).and_then(|_| stdout.flush()).is_err() {
        return 1;
    }
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
