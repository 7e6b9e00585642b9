//! Command-line experiments: outage validation, sleeping-ratio sweeps, daily
//! traffic evaluation and macro-radius planning.

pub mod config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcn_sleep::analytic::{outage_mbs_closed, outage_offloaded_linear, outage_sc_closed, outage_sc_linear};
use hcn_sleep::io::{fmt_opt, write_atomic};
use hcn_sleep::linklayer::interference_factor;
use hcn_sleep::mcsim::{estimate_fields, outage_curve, SimContext, SweepParam, CURVE_COLUMNS};
use hcn_sleep::optimizer::{
    best_scheme, solve_random_cb, solve_random_no_cb, solve_repulsive, solve_row, Problem, SolveResult,
    SOLVE_COLUMNS,
};
use hcn_sleep::traffic::{
    average_sleeping_ratio, dual_peak_profile, planning_csv, planning_sweep, profile_from_csv, sine_profile,
    trace_csv, TrafficProfile,
};
use hcn_sleep::{BandAllocation, Error, LoadState, Scheme, SleepPolicy};

pub use config::{load_config, parse_config, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(Error::Parse { .. }) => "parse",
            CliError::Core(Error::InvalidParameter { .. } | Error::NegativeBand { .. }) => "invalid_parameter",
            CliError::Core(_) => "model",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// One-line JSON object `{"error": kind, "message": text}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

/// `param:lo:hi:steps`, evenly spaced and inclusive of both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / n)
            .collect()
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [param, lo, hi, steps] = parts[..] else {
        return Err(format!("expected param:lo:hi:steps, got {s:?}"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = (num(lo)?, num(hi)?);
    let steps: usize = steps.parse().map_err(|e| format!("steps {steps:?}: {e}"))?;
    if steps == 0 {
        return Err("steps must be >= 1".to_string());
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(Sweep {
        param: param.to_string(),
        lo,
        hi,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    Random,
    Repulsive,
    Best,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulated vs closed-form outage along parameter sweeps.
    ValidateOutage,
    /// Maximum sleeping ratio along a load sweep.
    SweepSleeping,
    /// Sleeping ratio over a daily traffic profile.
    Traffic {
        /// `sine`, `dual-peak`, or a CSV file of `hour,lambda_per_km2`. Both built-ins when omitted.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Area power against the macro coverage radius.
    Planning,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Options {
    /// Key-value config file; the shipped defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte-Carlo topologies per point.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
    /// Enable channel borrowing.
    #[arg(long, global = true)]
    pub cb: bool,
    #[arg(long, global = true, value_enum, default_value_t = SchemeChoice::Best)]
    pub scheme: SchemeChoice,
    #[arg(long, global = true, value_parser = parse_sweep)]
    pub sweep: Option<Sweep>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "hcn-sleep", version, about = "Small-cell sleeping experiments")]
pub struct ExperimentSpec {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

/// One written file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: PathBuf,
    pub summary: String,
    pub warnings: Vec<String>,
}

fn write_csv(dir: &Path, name: &str, text: &str, summary: String) -> Result<Output, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let path = dir.join(name);
    write_atomic(&path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(Output {
        path,
        summary,
        warnings: Vec::new(),
    })
}

pub fn run(spec: &ExperimentSpec) -> Result<Vec<Output>, CliError> {
    let cfg = load_config(spec.opts.config.as_deref())?;
    match &spec.command {
        Command::ValidateOutage => validate_outage(&cfg, &spec.opts),
        Command::SweepSleeping => sweep_sleeping(&cfg, &spec.opts),
        Command::Traffic { profile } => traffic(&cfg, &spec.opts, profile.as_deref()),
        Command::Planning => planning(&cfg, &spec.opts),
    }
}

fn sim_base(cfg: &ExperimentConfig, cb: bool, scheme: Scheme) -> Result<SimContext, CliError> {
    let p_m = if cb { cfg.p_m } else { 1.0 };
    Ok(SimContext {
        cfg: cfg.network,
        load: cfg.load,
        qos: cfg.qos,
        policy: SleepPolicy::new(scheme, cb, p_m)?,
        bands: BandAllocation::new(&cfg.network, cfg.w_m, cfg.w_s, cb)?,
    })
}

fn validate_outage(cfg: &ExperimentConfig, opts: &Options) -> Result<Vec<Output>, CliError> {
    let net = &cfg.network;
    let plan: Vec<(SweepParam, Vec<f64>)> = match &opts.sweep {
        Some(s) => vec![(SweepParam::parse(&s.param)?, s.values())],
        None => vec![
            (SweepParam::WM, (1..=10).map(|k| net.w_m * k as f64 / 10.0).collect()),
            (SweepParam::PS, (0..10).map(|k| k as f64 / 10.0).collect()),
            (SweepParam::RS, (1..=8).map(|k| 50.0 * k as f64).collect()),
        ],
    };
    let i = interference_factor(net);
    let qos = &cfg.qos;
    let mut outputs = Vec::new();
    for (param, values) in plan {
        let scheme = match param {
            SweepParam::PS => Scheme::Random { p_s: 0.0 },
            SweepParam::RS => Scheme::Repulsive { r_s: 0.0 },
            _ => Scheme::None,
        };
        let base = sim_base(cfg, opts.cb, scheme)?;
        let rows = outage_curve(param, &values, &base, opts.trials, opts.seed)?;
        let mut text = format!("{},{CURVE_COLUMNS},G_m_analytic,G_s_analytic,G_o_analytic\n", param.column());
        let mut worst = 0.0f64;
        for r in &rows {
            let ctx = param.apply(&base, r.value)?;
            let (load, bands, scheme) = (ctx.load, ctx.bands, ctx.policy.scheme);
            let g_m = outage_mbs_closed(net, i, load.lambda_m, bands.w_m, qos.u_m).value;
            let g_s = match scheme {
                Scheme::Random { .. } => {
                    outage_sc_linear(&scheme, net.alpha_s, load.lambda_s, net.rho_s, bands.w_s, qos.u_s, cfg.solver.p_hat_s)?
                        .value
                }
                _ => outage_sc_closed(net.alpha_s, load.lambda_s, net.rho_s, bands.w_s, qos.u_s)?.value,
            };
            let g_o = (!matches!(scheme, Scheme::None) && !ctx.policy.cb)
                .then(|| outage_offloaded_linear(net, i, &scheme, load.lambda_s, bands.o_mbs, qos.u_o, net.alpha_m).value);
            for (sim, an) in [(r.outage.g_m, Some(g_m)), (r.outage.g_s, Some(g_s)), (r.outage.g_o, g_o)] {
                if let (Some(s), Some(a)) = (sim, an) {
                    worst = worst.max((s.mean - a).abs());
                }
            }
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                r.value,
                estimate_fields(&r.outage, opts.trials),
                g_m,
                g_s,
                fmt_opt(g_o)
            ));
        }
        let name = format!("outage_{}.csv", param.name());
        let summary = format!(
            "{} points, {} trials each, max |simulated - analytic| = {worst:.4}",
            rows.len(),
            opts.trials
        );
        outputs.push(write_csv(&opts.out, &name, &text, summary)?);
    }
    Ok(outputs)
}

fn solve(p: &Problem, scheme: SchemeChoice, cb: bool) -> Result<SolveResult, Error> {
    match (scheme, cb) {
        (SchemeChoice::Random, false) => solve_random_no_cb(p),
        (SchemeChoice::Random, true) => solve_random_cb(p),
        (SchemeChoice::Repulsive, cb) => solve_repulsive(p, cb),
        (SchemeChoice::Best, cb) => best_scheme(p, cb),
    }
}

fn sweep_sleeping(cfg: &ExperimentConfig, opts: &Options) -> Result<Vec<Output>, CliError> {
    let sweep = opts.sweep.clone().unwrap_or(Sweep {
        param: "lambda_s".to_string(),
        lo: 50e-6,
        hi: 400e-6,
        steps: 8,
    });
    let set: fn(&mut LoadState, f64) = match sweep.param.as_str() {
        "lambda_s" => |l, v| l.lambda_s = v,
        "lambda_m" => |l, v| l.lambda_m = v,
        other => {
            return Err(CliError::Usage(format!(
                "sweep-sleeping varies lambda_s or lambda_m, not {other:?}"
            )))
        }
    };
    let mut problem = Problem::new(cfg.network, cfg.load, cfg.qos);
    problem.opts = cfg.solver;
    let mut text = format!("{SOLVE_COLUMNS}\n");
    let mut feasible = 0;
    let values = sweep.values();
    for &v in &values {
        let mut p = problem;
        set(&mut p.load, v);
        let r = solve(&p, opts.scheme, opts.cb)?;
        feasible += r.is_feasible() as usize;
        text.push_str(&solve_row(&p.load, &r));
        text.push('\n');
    }
    let name = format!("sleeping_{}.csv", sweep.param);
    let summary = format!("{} points, {feasible} feasible, cb={}", values.len(), opts.cb);
    let mut out = write_csv(&opts.out, &name, &text, summary)?;
    if feasible == 0 {
        out.warnings.push("no point of the sweep is feasible".to_string());
    }
    Ok(vec![out])
}

fn builtin_profile(name: &str, lmax: f64, lmin: f64, n: usize) -> Result<Option<TrafficProfile>, Error> {
    Ok(match name {
        "sine" => Some(sine_profile(lmax, lmin, n)?),
        "dual-peak" => Some(dual_peak_profile(lmax, lmin, n)?),
        _ => None,
    })
}

fn resolve_profile(
    name: &str,
    lmax: f64,
    lmin: f64,
    n: usize,
    high_rate_fraction: f64,
) -> Result<(String, TrafficProfile), CliError> {
    let mut profile = match builtin_profile(name, lmax, lmin, n)? {
        Some(p) => p,
        None => {
            let text = std::fs::read_to_string(name).map_err(|e| CliError::Io {
                path: name.to_string(),
                message: e.to_string(),
            })?;
            profile_from_csv(&text)?
        }
    };
    profile.high_rate_fraction = high_rate_fraction;
    let label = Path::new(name)
        .file_stem()
        .map(|s| s.to_string_lossy().replace('-', "_"))
        .unwrap_or_else(|| "profile".to_string());
    Ok((label, profile))
}

fn traffic(cfg: &ExperimentConfig, opts: &Options, profile: Option<&str>) -> Result<Vec<Output>, CliError> {
    let names: Vec<&str> = match profile {
        Some(p) => vec![p],
        None => vec!["sine", "dual-peak"],
    };
    let i = interference_factor(&cfg.network);
    let mut outputs = Vec::new();
    for name in names {
        let (label, profile) = resolve_profile(
            name,
            cfg.lambda_max,
            cfg.lambda_min,
            cfg.samples_per_day,
            cfg.high_rate_fraction,
        )?;
        let eval = average_sleeping_ratio(&profile, &cfg.network, i, &cfg.qos, opts.cb, &cfg.solver)?;
        let summary = format!(
            "{} samples, average sleeping ratio {:.4}, {} infeasible, cb={}",
            eval.trace.len(),
            eval.average,
            eval.infeasible_samples,
            opts.cb
        );
        let mut out = write_csv(&opts.out, &format!("traffic_{label}.csv"), &trace_csv(&eval), summary)?;
        if eval.infeasible_samples == eval.trace.len() {
            out.warnings.push("no sample of the profile is feasible".to_string());
        }
        outputs.push(out);
    }
    Ok(outputs)
}

fn planning(cfg: &ExperimentConfig, opts: &Options) -> Result<Vec<Output>, CliError> {
    let sweep = opts.sweep.clone().unwrap_or(Sweep {
        param: "D".to_string(),
        lo: 400.0,
        hi: cfg.d_max,
        steps: 15,
    });
    if sweep.param != "D" {
        return Err(CliError::Usage(format!("planning varies D, not {:?}", sweep.param)));
    }
    let mut profile = sine_profile(cfg.planning_lambda_max, cfg.planning_lambda_min, cfg.samples_per_day)?;
    profile.high_rate_fraction = cfg.high_rate_fraction;
    let rows = planning_sweep(
        &sweep.values(),
        &profile,
        &cfg.network,
        &cfg.qos,
        &cfg.power,
        opts.cb,
        &cfg.solver,
        cfg.d_max,
    )?;
    let best = rows
        .iter()
        .min_by(|a, b| a.area_power.total_cmp(&b.area_power))
        .expect("non-empty sweep");
    let summary = format!(
        "{} radii, lowest area power {:.3} W/km² at D = {} m",
        rows.len(),
        best.area_power * 1e6,
        best.d
    );
    Ok(vec![write_csv(&opts.out, "planning.csv", &planning_csv(&rows), summary)?])
}
