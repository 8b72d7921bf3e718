//! Batch front-end: configuration, sweeps and CSV output.
//!
//! Every command writes one CSV table with a header row. Floats are printed
//! with the shortest representation that round-trips.

mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, parse_config_over, set_key, KEYS};

use crate::analytics::{leakage_probability, leakage_probability_limit, LeakageModelParams};
use crate::error::{Error, Result};
use crate::interference::ub_table;
use crate::montecarlo::{
    aggregate, reference_gamma_delta_max, run_sweep, run_trials, trace_controller, trial_rng, BuildingKind, Metrics,
    SimConfig, SweepPoint, TrialOutcome,
};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "FEMTOCOORD_SEED";

/// Target azimuths averaged when computing the reference `Gamma_delta_max`.
const REFERENCE_AZIMUTHS: usize = 72;

#[derive(Debug, Parser)]
#[command(name = "femtocoord", version, about = "Femtocell pilot-power control experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Configuration file (`key = value` lines, `[section]` headers).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; falls back to FEMTOCOORD_SEED, then the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trial count override.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate metrics, optionally swept over one configuration key.
    Run {
        /// Sweep `key=start:stop:step` (inclusive).
        #[arg(long)]
        sweep: Option<String>,
        /// Also write per-trial outcomes here.
        #[arg(long)]
        per_trial: Option<PathBuf>,
    },
    /// Controller trace of a single trial: i, P_f, Gamma, r_f.
    Trace,
    /// Leakage probability versus the threshold margin, analytic and simulated.
    Hk {
        /// Margin grid `gamma_delta=start:stop:step`.
        #[arg(long, default_value = "gamma_delta=0:12:1.5")]
        sweep: String,
        /// User counts; `inf` adds the limiting analytic row.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,inf")]
        users: Vec<String>,
    },
    /// Analytic leakage probability only.
    HkAnalytic {
        #[arg(long, default_value = "gamma_delta=0:12:1.5")]
        sweep: String,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,inf")]
        users: Vec<String>,
    },
    /// Leakage distance and indoor coverage for the rectangular building.
    RealScenario {
        #[arg(long, default_value = "gamma_delta=0:8:1")]
        sweep: String,
        /// Threshold exponents `n_e`.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        exponents: Vec<f64>,
    },
    /// Ring-average versus site interference coefficients.
    InterferenceTable,
}

/// Everything a command needs besides its own flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub config: SimConfig,
    pub trials: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Reads the config file over `base` and applies flag and environment overrides.
    pub fn resolve(common: &CommonArgs, base: SimConfig, env_seed: Option<String>) -> Result<Self> {
        let mut config = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                parse_config_over(&text, base)?
            }
            None => base,
        };
        let seed = match (common.seed, env_seed) {
            (Some(s), _) => s,
            (None, Some(v)) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?,
            (None, None) => config.seed,
        };
        config.seed = seed;
        if let Some(t) = common.trials {
            if t == 0 {
                return Err(Error::InvalidArgument("--trials must be >= 1".into()));
            }
            config.trials = t;
        }
        if common.jobs == Some(0) {
            return Err(Error::InvalidArgument("--jobs must be >= 1".into()));
        }
        config.validate()?;
        Ok(ExperimentSpec { trials: config.trials, config, seed, jobs: common.jobs, out: common.out.clone() })
    }
}

/// A parsed `key=start:stop:step` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<f64>,
}

/// Parses `key=start:stop:step`; the grid includes `stop` when it lands on it.
pub fn parse_sweep(text: &str) -> Result<Sweep> {
    let bad = |m: &str| Error::InvalidArgument(format!("sweep '{text}': {m}"));
    let (key, grid) = text.split_once('=').ok_or_else(|| bad("expected key=start:stop:step"))?;
    let parts: Vec<f64> = grid
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("bounds must be numbers")))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if !(step > 0.0) || stop < start {
        return Err(bad("grid must be non-empty and strictly increasing"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let values = (0..=n).map(|i| start + i as f64 * step).collect();
    Ok(Sweep { key: key.trim().to_string(), values })
}

fn parse_user_counts(items: &[String]) -> Result<Vec<Option<usize>>> {
    items
        .iter()
        .map(|s| match s.trim() {
            "inf" | "infinity" => Ok(None),
            v => v
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 2)
                .map(Some)
                .ok_or_else(|| Error::InvalidArgument(format!("user count '{v}' must be an integer >= 2 or inf"))),
        })
        .collect()
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

fn sweep_values_for(sweep: &Sweep, key: &str) -> Result<Vec<f64>> {
    if sweep.key != key {
        return Err(Error::InvalidArgument(format!("this command sweeps {key}, not {}", sweep.key)));
    }
    Ok(sweep.values.clone())
}

/// `i, P_f_dbm, gamma_db, r_f_m` per controller iteration, plus a trailer
/// row when the controller did not converge. Returns whether it converged.
pub fn cmd_trace_controller<W: Write>(spec: &ExperimentSpec, out: W) -> Result<bool> {
    let trace = trace_controller(&spec.config, &mut trial_rng(spec.seed, 0))?;
    let mut w = csv_writer(out);
    w.write_record(["i", "P_f_dbm", "gamma_db", "r_f_m"])?;
    for r in &trace.rows {
        w.write_record([r.iteration.to_string(), f(r.p_f), f(r.gamma), f(r.r_f)])?;
    }
    if !trace.converged {
        w.write_record(["not_converged".to_string(), trace.rows.len().to_string(), String::new(), String::new()])?;
    }
    w.flush()?;
    Ok(trace.converged)
}

fn leakage_params(cfg: &SimConfig, users: usize, gamma_delta: f64, gamma_delta_max: f64) -> LeakageModelParams {
    LeakageModelParams {
        users,
        exponent: cfg.femto_exponent,
        gamma_th: cfg.cinr_threshold,
        gamma_delta,
        gamma_delta_max,
        r_b: cfg.building_radius,
        eps0: cfg.min_distance,
    }
}

fn hk_config(spec: &ExperimentSpec) -> Result<SimConfig> {
    if spec.config.building_kind != BuildingKind::Circle {
        return Err(Error::InvalidArgument("leakage probability needs a circular building".into()));
    }
    Ok(SimConfig { shadowing: false, threshold_exponent: spec.config.femto_exponent, ..spec.config.clone() })
}

/// `gamma_delta_db, K, hk_analytic` rows; `K = inf` uses the limit.
pub fn cmd_hk_analytic<W: Write>(spec: &ExperimentSpec, gamma_deltas: &[f64], users: &[Option<usize>], out: W) -> Result<()> {
    let cfg = hk_config(spec)?;
    let gdm = reference_gamma_delta_max(&cfg, REFERENCE_AZIMUTHS)?.mean;
    let mut w = csv_writer(out);
    w.write_record(["gamma_delta_db", "K", "hk_analytic"])?;
    for &k in users {
        for &g in gamma_deltas {
            let (label, h) = match k {
                Some(k) => (k.to_string(), leakage_probability(&leakage_params(&cfg, k, g, gdm))?),
                None => ("inf".to_string(), leakage_probability_limit(&leakage_params(&cfg, 2, g, gdm))?),
            };
            w.write_record([f(g), label, f(h)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `gamma_delta_db, K, hk_analytic, hk_simulated, ci_halfwidth` rows.
///
/// The analytic column uses the reference `Gamma_delta_max` of the
/// configured geometry; the `inf` rows carry no simulation.
pub fn cmd_hk<W: Write>(spec: &ExperimentSpec, gamma_deltas: &[f64], users: &[Option<usize>], out: W) -> Result<()> {
    let cfg = hk_config(spec)?;
    let gdm = reference_gamma_delta_max(&cfg, REFERENCE_AZIMUTHS)?.mean;
    let points: Vec<SweepPoint> = users
        .iter()
        .flatten()
        .flat_map(|&k| gamma_deltas.iter().map(move |&g| SweepPoint { users: k, gamma_delta: g, threshold_exponent: cfg.femto_exponent }))
        .collect();
    let results = run_sweep(&cfg, &points, spec.trials)?;
    let metrics: Vec<Metrics> = results.iter().map(|o| aggregate(o)).collect::<Result<_>>()?;
    let mut metrics = points.iter().zip(metrics);
    let mut w = csv_writer(out);
    w.write_record(["gamma_delta_db", "K", "hk_analytic", "hk_simulated", "ci_halfwidth"])?;
    for &k in users {
        for &g in gamma_deltas {
            match k {
                Some(k) => {
                    let (p, m) = metrics.next().expect("one result per point");
                    debug_assert_eq!((p.users, p.gamma_delta), (k, g));
                    let a = leakage_probability(&leakage_params(&cfg, k, g, gdm))?;
                    w.write_record([f(g), k.to_string(), f(a), f(m.hk), f(m.hk_ci)])?;
                }
                None => {
                    let a = leakage_probability_limit(&leakage_params(&cfg, 2, g, gdm))?;
                    w.write_record([f(g), "inf".to_string(), f(a), String::new(), String::new()])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `gamma_delta_db, omega_m, psi, n_e, K, omega_ci, psi_ci, hk` rows.
pub fn cmd_real_scenario<W: Write>(spec: &ExperimentSpec, gamma_deltas: &[f64], exponents: &[f64], out: W) -> Result<()> {
    let cfg = &spec.config;
    let points: Vec<SweepPoint> = exponents
        .iter()
        .flat_map(|&ne| gamma_deltas.iter().map(move |&g| SweepPoint { users: cfg.users, gamma_delta: g, threshold_exponent: ne }))
        .collect();
    let results = run_sweep(cfg, &points, spec.trials)?;
    let mut w = csv_writer(out);
    w.write_record(["gamma_delta_db", "omega_m", "psi", "n_e", "K", "omega_ci", "psi_ci", "hk"])?;
    for (p, o) in points.iter().zip(&results) {
        let m = aggregate(o)?;
        w.write_record([
            f(p.gamma_delta),
            f(m.omega),
            f(m.psi),
            f(p.threshold_exponent),
            p.users.to_string(),
            f(m.omega_ci),
            f(m.psi_ci),
            f(m.hk),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `n, ratio, U, B, U_over_B` for the six tabulated cases.
pub fn cmd_interference_table<W: Write>(out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["n", "ratio", "U", "B", "U_over_B"])?;
    for e in ub_table() {
        w.write_record([f(e.exponent), f(e.ratio), f(e.u), f(e.b), f(e.ratio_u_over_b())])?;
    }
    w.flush()?;
    Ok(())
}

const METRIC_HEADER: [&str; 11] = [
    "trials",
    "excluded",
    "hk",
    "hk_ci",
    "omega_m",
    "omega_ci",
    "psi",
    "psi_ci",
    "max_leakage_m",
    "outdoor_covered",
    "mean_iterations",
];

fn metric_fields(m: &Metrics) -> Vec<String> {
    vec![
        m.trials.to_string(),
        m.excluded.to_string(),
        f(m.hk),
        f(m.hk_ci),
        f(m.omega),
        f(m.omega_ci),
        f(m.psi),
        f(m.psi_ci),
        f(m.max_leakage_mean),
        f(m.outdoor_covered_mean),
        f(m.mean_iterations),
    ]
}

const TRIAL_HEADER: [&str; 9] = [
    "trial",
    "converged",
    "leaked",
    "leakage_distance_m",
    "max_leakage_distance_m",
    "indoor_coverage_fraction",
    "iterations",
    "final_p_f_dbm",
    "outdoor_covered",
];

fn trial_fields(i: usize, o: &TrialOutcome) -> Vec<String> {
    vec![
        i.to_string(),
        o.converged.to_string(),
        o.leaked.to_string(),
        f(o.leakage_distance),
        f(o.max_leakage_distance),
        f(o.indoor_coverage_fraction),
        o.iterations_used.to_string(),
        f(o.final_p_f.dbm()),
        o.outdoor_covered.to_string(),
    ]
}

/// Aggregate metrics per sweep value (or once), optional per-trial rows.
pub fn cmd_run<W: Write, P: Write>(spec: &ExperimentSpec, sweep: Option<&Sweep>, out: W, per_trial: Option<P>) -> Result<()> {
    let runs: Vec<(Option<f64>, SimConfig)> = match sweep {
        None => vec![(None, spec.config.clone())],
        Some(s) => s
            .values
            .iter()
            .map(|&v| {
                let mut c = spec.config.clone();
                set_key(&mut c, &s.key, &f(v)).map_err(Error::InvalidArgument)?;
                c.validate()?;
                Ok((Some(v), c))
            })
            .collect::<Result<_>>()?,
    };
    let prefix: Vec<&str> = sweep.map(|s| vec![s.key.as_str()]).unwrap_or_default();
    let mut w = csv_writer(out);
    w.write_record(prefix.iter().copied().chain(METRIC_HEADER))?;
    let mut pt = per_trial.map(csv_writer);
    if let Some(pt) = pt.as_mut() {
        pt.write_record(prefix.iter().copied().chain(TRIAL_HEADER))?;
    }
    for (v, cfg) in runs {
        let outcomes = run_trials(&cfg, spec.trials)?;
        let lead: Vec<String> = v.map(f).into_iter().collect();
        if let Some(pt) = pt.as_mut() {
            for (i, o) in outcomes.iter().enumerate() {
                pt.write_record(lead.iter().cloned().chain(trial_fields(i, o)))?;
            }
        }
        let m = aggregate(&outcomes)?;
        w.write_record(lead.iter().cloned().chain(metric_fields(&m)))?;
    }
    w.flush()?;
    if let Some(mut pt) = pt {
        pt.flush()?;
    }
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dispatch(cli: Cli) -> Result<bool> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let base = match cli.command {
        Command::RealScenario { .. } => SimConfig::real_scenario(),
        _ => SimConfig::default(),
    };
    let spec = ExperimentSpec::resolve(&cli.common, base, env_seed)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = spec.jobs {
            b = b.num_threads(j);
        }
        b.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
    };
    pool.install(|| {
        let out = open_out(&spec.out)?;
        match &cli.command {
            Command::Run { sweep, per_trial } => {
                let sweep = sweep.as_deref().map(parse_sweep).transpose()?;
                let pt = match per_trial {
                    Some(p) => Some(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
                    None => None,
                };
                cmd_run(&spec, sweep.as_ref(), out, pt)?;
                Ok(true)
            }
            Command::Trace => cmd_trace_controller(&spec, out),
            Command::Hk { sweep, users } => {
                let g = sweep_values_for(&parse_sweep(sweep)?, "gamma_delta")?;
                cmd_hk(&spec, &g, &parse_user_counts(users)?, out)?;
                Ok(true)
            }
            Command::HkAnalytic { sweep, users } => {
                let g = sweep_values_for(&parse_sweep(sweep)?, "gamma_delta")?;
                cmd_hk_analytic(&spec, &g, &parse_user_counts(users)?, out)?;
                Ok(true)
            }
            Command::RealScenario { sweep, exponents } => {
                let g = sweep_values_for(&parse_sweep(sweep)?, "gamma_delta")?;
                if exponents.is_empty() || exponents.iter().any(|&n| !(n.is_finite() && n > 0.0)) {
                    return Err(Error::InvalidArgument("exponents must be positive numbers".into()));
                }
                cmd_real_scenario(&spec, &g, exponents, out)?;
                Ok(true)
            }
            Command::InterferenceTable => {
                cmd_interference_table(out)?;
                Ok(true)
            }
        }
    })
}

/// Parses `args` and runs the command. Exit status 2 marks configuration
/// errors, 3 all-trial non-convergence, 1 anything else.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: controller did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::InvalidArgument(_) => 2,
                Error::AllTrialsNonConvergent(_) => 3,
                _ => 1,
            })
        }
    }
}
