//! Daily traffic profiles, time-averaged sleeping ratio and the coverage-radius
//! planning sweep.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::config::{per_km2, LoadState, NetworkConfig, QosSpec};
use crate::error::{check, Error, Result};
use crate::linklayer::{interference_factor, InterferenceFactor};
use crate::optimizer::{best_scheme, Problem, SolveResult, SolverOptions};

pub const SAMPLES_PER_DAY: usize = 96;
pub const HIGH_RATE_FRACTION: f64 = 0.8;
pub const SINE_PEAK_HOUR: f64 = 14.0;

/// Knot table shipped for the two-peak profile.
pub const DEFAULT_DUAL_PEAK_KNOTS: &str = include_str!("../data/dual_peak_knots.csv");

/// User density over one day, sampled at increasing hours in `[0, 24)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficProfile {
    /// `(hour, total density per m²)`.
    pub samples: Vec<(f64, f64)>,
    /// Share of users asking for the high (SC-class) rate.
    pub high_rate_fraction: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl TrafficProfile {
    pub fn validate(&self) -> Result<()> {
        check(!self.samples.is_empty(), "samples", || "profile has no samples".to_string())?;
        check((0.0..=1.0).contains(&self.high_rate_fraction), "high_rate_fraction", || {
            format!("{} must lie in [0, 1]", self.high_rate_fraction)
        })?;
        check(
            self.lambda_min >= 0.0 && self.lambda_min <= self.lambda_max,
            "lambda_min",
            || format!("need 0 <= {} <= lambda_max {}", self.lambda_min, self.lambda_max),
        )?;
        let mut prev = f64::NEG_INFINITY;
        for &(t, l) in &self.samples {
            check((0.0..24.0).contains(&t) && t > prev, "samples", || {
                format!("hour {t} out of order or outside [0, 24)")
            })?;
            let slack = 1e-12 * self.lambda_max.max(1e-300);
            check(
                l >= self.lambda_min - slack && l <= self.lambda_max + slack,
                "samples",
                || format!("density {l} at hour {t} outside [lambda_min, lambda_max]"),
            )?;
            prev = t;
        }
        Ok(())
    }

    /// Macro-class and SC-class densities at sample `k`.
    pub fn load_at(&self, k: usize) -> LoadState {
        let l = self.samples[k].1;
        LoadState::new((1.0 - self.high_rate_fraction) * l, self.high_rate_fraction * l)
    }

    fn from_fn(lmax: f64, lmin: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check(n >= 2, "samples_per_day", || format!("{n} must be >= 2"))?;
        check(lmin >= 0.0 && lmin <= lmax, "lambda_min", || {
            format!("need 0 <= {lmin} <= lambda_max {lmax}")
        })?;
        let samples = (0..n)
            .map(|k| {
                let t = 24.0 * k as f64 / n as f64;
                (t, (lmin + (lmax - lmin) * f(t)).clamp(lmin, lmax))
            })
            .collect();
        Ok(TrafficProfile {
            samples,
            high_rate_fraction: HIGH_RATE_FRACTION,
            lambda_max: lmax,
            lambda_min: lmin,
        })
    }
}

/// Single daily peak at 14:00, minimum at 02:00. Densities per m².
pub fn sine_profile(lambda_max: f64, lambda_min: f64, samples_per_day: usize) -> Result<TrafficProfile> {
    TrafficProfile::from_fn(lambda_max, lambda_min, samples_per_day, |t| {
        0.5 * (1.0 + (2.0 * PI * (t - SINE_PEAK_HOUR) / 24.0 + PI / 2.0).sin())
    })
}

/// Relative levels in `[0, 1]` at increasing hours spanning `[0, 24]`,
/// interpolated linearly. Level 0 maps to `lambda_min`, 1 to `lambda_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Knots {
    pub hours: Vec<f64>,
    pub levels: Vec<f64>,
}

impl Knots {
    /// Parses `hour,level` lines; `#` comments and a header line are allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut hours, mut levels) = (Vec::new(), Vec::new());
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("hour") {
                continue;
            }
            let err = |message: String| Error::Parse { line: n + 1, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(err(format!("expected `hour,level`, got {line:?}")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            let (h, v) = (num(fields[0])?, num(fields[1])?);
            if !(0.0..=1.0).contains(&v) {
                return Err(err(format!("level {v} outside [0, 1]")));
            }
            if hours.last().is_some_and(|&p| h <= p) {
                return Err(err(format!("hour {h} is not increasing")));
            }
            hours.push(h);
            levels.push(v);
        }
        let bad = |message: &str| Error::Parse {
            line: 0,
            message: message.to_string(),
        };
        if hours.first() != Some(&0.0) || hours.last() != Some(&24.0) {
            return Err(bad("knots must start at hour 0 and end at hour 24"));
        }
        if levels[0] != levels[levels.len() - 1] {
            return Err(bad("levels at hours 0 and 24 must match"));
        }
        Ok(Knots { hours, levels })
    }

    pub fn default_dual_peak() -> Self {
        Knots::parse(DEFAULT_DUAL_PEAK_KNOTS).expect("shipped knot table is valid")
    }

    pub fn level(&self, t: f64) -> f64 {
        let t = t.rem_euclid(24.0);
        let k = self.hours.partition_point(|&h| h <= t).clamp(1, self.hours.len() - 1);
        let (h0, h1) = (self.hours[k - 1], self.hours[k]);
        let (v0, v1) = (self.levels[k - 1], self.levels[k]);
        v0 + (v1 - v0) * (t - h0) / (h1 - h0)
    }
}

/// Rush-hour profile from the shipped knot table.
pub fn dual_peak_profile(lambda_max: f64, lambda_min: f64, samples_per_day: usize) -> Result<TrafficProfile> {
    dual_peak_profile_with(&Knots::default_dual_peak(), lambda_max, lambda_min, samples_per_day)
}

pub fn dual_peak_profile_with(
    knots: &Knots,
    lambda_max: f64,
    lambda_min: f64,
    samples_per_day: usize,
) -> Result<TrafficProfile> {
    TrafficProfile::from_fn(lambda_max, lambda_min, samples_per_day, |t| knots.level(t))
}

/// Reads `hour,lambda_per_km2` rows.
pub fn profile_from_csv(text: &str) -> Result<TrafficProfile> {
    let mut samples = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("hour") {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(err(format!("expected `hour,lambda_per_km2`, got {line:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
        samples.push((num(fields[0])?, per_km2(num(fields[1])?)));
    }
    let lmax = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let lmin = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let p = TrafficProfile {
        samples,
        high_rate_fraction: HIGH_RATE_FRACTION,
        lambda_max: lmax,
        lambda_min: lmin,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub load: LoadState,
    pub result: SolveResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficEval {
    pub average: f64,
    pub trace: Vec<TraceRow>,
    /// Samples at which neither scheme was feasible (counted as ratio 0).
    pub infeasible_samples: usize,
}

/// Best-scheme sleeping ratio at every sample and its time average.
pub fn average_sleeping_ratio(
    profile: &TrafficProfile,
    cfg: &NetworkConfig,
    i: InterferenceFactor,
    qos: &QosSpec,
    cb: bool,
    opts: &SolverOptions,
) -> Result<TrafficEval> {
    profile.validate()?;
    let trace = (0..profile.samples.len())
        .into_par_iter()
        .map(|k| {
            let load = profile.load_at(k);
            let p = Problem {
                cfg: *cfg,
                i,
                load,
                qos: *qos,
                opts: *opts,
            };
            Ok(TraceRow {
                t: profile.samples[k].0,
                load,
                result: best_scheme(&p, cb)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let average = trace.iter().map(|r| r.result.sleeping_ratio).sum::<f64>() / trace.len() as f64;
    let infeasible_samples = trace.iter().filter(|r| !r.result.is_feasible()).count();
    Ok(TrafficEval {
        average,
        trace,
        infeasible_samples,
    })
}

pub const TRACE_COLUMNS: &str = "t,lambda_m,lambda_s,scheme,cb,sleeping_ratio";

/// Trace CSV; densities per m².
pub fn trace_csv(eval: &TrafficEval) -> String {
    let mut out = format!("{TRACE_COLUMNS}\n");
    for r in &eval.trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.t,
            r.load.lambda_m,
            r.load.lambda_s,
            r.result.scheme.name(),
            r.result.cb,
            r.result.sleeping_ratio
        ));
    }
    out
}

/// Static power drawn by every active base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    /// W per macro site.
    pub p_static_mbs: f64,
    /// W per active small cell.
    pub p_static_sc: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel {
            p_static_mbs: 1000.0,
            p_static_sc: 10.0,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        check(self.p_static_mbs >= 0.0, "P_static_mbs", || format!("{} must be >= 0", self.p_static_mbs))?;
        check(self.p_static_sc >= 0.0, "P_static_sc", || format!("{} must be >= 0", self.p_static_sc))
    }

    /// Area power `ρ_m·P_mbs + ρ_s·(1 − sleeping)·P_sc`, W/m².
    pub fn area_power(&self, cfg: &NetworkConfig, avg_sleeping: f64) -> f64 {
        cfg.rho_m() * self.p_static_mbs + cfg.rho_s * (1.0 - avg_sleeping) * self.p_static_sc
    }
}

/// Largest macro radius that still provides basic coverage, m.
pub const COVERAGE_RADIUS_CAP: f64 = 1100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningRow {
    pub d: f64,
    pub avg_sleeping_ratio: f64,
    /// W/m².
    pub area_power: f64,
}

/// Area power for each macro radius in `radii`, with the interference factor
/// recomputed per radius.
#[allow(clippy::too_many_arguments)]
pub fn planning_sweep(
    radii: &[f64],
    profile: &TrafficProfile,
    template: &NetworkConfig,
    qos: &QosSpec,
    power: &PowerModel,
    cb: bool,
    opts: &SolverOptions,
    radius_cap: f64,
) -> Result<Vec<PlanningRow>> {
    if radii.is_empty() {
        return Err(Error::EmptySweep);
    }
    power.validate()?;
    for &d in radii {
        check(d > 0.0 && d <= radius_cap, "D", || {
            format!("{d} must lie in (0, {radius_cap}] for basic coverage")
        })?;
    }
    radii
        .iter()
        .map(|&d| {
            let cfg = template.with_radius(d);
            let eval = average_sleeping_ratio(profile, &cfg, interference_factor(&cfg), qos, cb, opts)?;
            Ok(PlanningRow {
                d,
                avg_sleeping_ratio: eval.average,
                area_power: power.area_power(&cfg, eval.average),
            })
        })
        .collect()
}

pub const PLANNING_COLUMNS: &str = "D_m,avg_sleep_ratio,area_power_W_per_km2";

pub fn planning_csv(rows: &[PlanningRow]) -> String {
    let mut out = format!("{PLANNING_COLUMNS}\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.d, r.avg_sleeping_ratio, r.area_power * 1e6));
    }
    out
}
