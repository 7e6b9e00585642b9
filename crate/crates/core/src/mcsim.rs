//! Monte-Carlo estimation of the outage probabilities of macro users, small-cell
//! users and offloaded users.
//!
//! One trial draws a fresh topology over the whole macro grid, applies the sleep
//! set, moves users of sleeping SCs to their nearest macro site, splits them
//! between the macro band and the borrowed SC band, draws Rayleigh fading on
//! every link and evaluates each user of the center macro cell. Sharer counts
//! cover the whole serving cell.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::config::{LoadState, NetworkConfig, QosSpec};
use crate::error::{check, Error, Result};
use crate::geometry::{random_sleep_set_with, repulsive_sleep_set, NearestIndex, Point, SleepSet, Topology};
use crate::io::fmt_opt;
use crate::linklayer::{path_gain, rate};
use crate::policy::{BandAllocation, Scheme, SleepPolicy};
use crate::rng::{substream, Purpose};

/// Outage fraction with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub mean: f64,
    pub ci_half_width: f64,
    pub trials: u64,
    /// User samples behind the estimate.
    pub samples: u64,
}

impl OutageEstimate {
    fn from_counts(outages: u64, samples: u64, trials: u64) -> Option<Self> {
        if samples == 0 {
            return None;
        }
        let mean = outages as f64 / samples as f64;
        Some(OutageEstimate {
            mean,
            ci_half_width: 1.96 * (mean * (1.0 - mean) / samples as f64).sqrt(),
            trials,
            samples,
        })
    }
}

/// Per-class estimates; `None` when the class had no user in any trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageTriple {
    pub g_m: Option<OutageEstimate>,
    pub g_s: Option<OutageEstimate>,
    pub g_o: Option<OutageEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UeClass {
    Macro,
    SmallCell,
    Offloaded,
}

/// Everything a trial needs besides its index and the seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimContext {
    pub cfg: NetworkConfig,
    pub load: LoadState,
    pub qos: QosSpec,
    pub policy: SleepPolicy,
    pub bands: BandAllocation,
}

impl SimContext {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.load.validate()?;
        self.qos.validate()?;
        self.policy.validate()?;
        let expect = BandAllocation::new(&self.cfg, self.bands.w_m, self.bands.w_s, self.policy.cb)?;
        check(expect == self.bands, "bands", || {
            format!("{:?} is inconsistent with the layer bands and CB flag", self.bands)
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    out: [u64; 3],
    n: [u64; 3],
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for k in 0..3 {
            self.out[k] += other.out[k];
            self.n[k] += other.n[k];
        }
        self
    }
}

fn class_slot(c: UeClass) -> usize {
    match c {
        UeClass::Macro => 0,
        UeClass::SmallCell => 1,
        UeClass::Offloaded => 2,
    }
}

/// SINR against every cell in `cells`, drawing one unit-mean exponential per link.
fn faded_sinr<R: Rng>(
    ue: Point,
    serving: usize,
    cells: &[Point],
    power: f64,
    alpha: f64,
    sigma2: f64,
    rng: &mut R,
) -> Result<f64> {
    let mut signal = 0.0;
    let mut total = 0.0;
    for (j, &c) in cells.iter().enumerate() {
        let d2 = ue.dist2(c);
        if d2 == 0.0 {
            return Err(Error::SingularPathLoss);
        }
        let h: f64 = Exp1.sample(rng);
        let rx = power * path_gain(d2, alpha) * h;
        if j == serving {
            signal = rx;
        } else {
            total += rx;
        }
    }
    Ok(signal / (total + sigma2))
}

fn sleep_set(ctx: &SimContext, topo: &Topology, seed: u64, trial: u64) -> SleepSet {
    let n = topo.sc_positions.len();
    match ctx.policy.scheme {
        Scheme::None => SleepSet::none(n),
        Scheme::Random { p_s } => {
            random_sleep_set_with(n, p_s, &mut substream(seed, trial, Purpose::Sleep))
        }
        Scheme::Repulsive { r_s } => repulsive_sleep_set(&topo.sc_positions, &topo.mbs_positions, r_s),
    }
}

/// Runs one trial and reports `(class, sinr, outage)` for every center-cell user.
fn run_trial(
    ctx: &SimContext,
    seed: u64,
    trial: u64,
    sink: &mut impl FnMut(UeClass, f64, bool),
) -> Result<()> {
    let cfg = &ctx.cfg;
    let topo = Topology::generate(cfg, &ctx.load, seed, trial);
    let asleep = sleep_set(ctx, &topo, seed, trial);
    let mbs = &topo.mbs_positions;
    let mbs_index = NearestIndex::new(mbs)?;

    // Active SCs, renumbered.
    let mut active_id = vec![usize::MAX; topo.sc_positions.len()];
    let mut active = Vec::with_capacity(topo.sc_positions.len());
    for (k, &p) in topo.sc_positions.iter().enumerate() {
        if !asleep.contains(k) {
            active_id[k] = active.len();
            active.push(p);
        }
    }

    let mut mbs_load = vec![0u64; mbs.len()];
    for &c in &topo.mbs_ue_cell {
        mbs_load[c] += 1;
    }

    // Per SC user: serving active SC, or the macro site and band it is offloaded to.
    enum Serving {
        Sc(usize),
        Offloaded { mbs: usize, sc_band: bool },
    }
    let mut split = substream(seed, trial, Purpose::BandSplit);
    let mut sc_load = vec![0u64; active.len()];
    let mut off_load = vec![[0u64; 2]; mbs.len()];
    let mut serving = Vec::with_capacity(topo.sc_ue_positions.len());
    for (u, &p) in topo.sc_ue_positions.iter().enumerate() {
        let sc = topo.sc_ue_cell.get(u).map(|&k| active_id[k]).unwrap_or(usize::MAX);
        if sc != usize::MAX {
            sc_load[sc] += 1;
            serving.push(Serving::Sc(sc));
        } else {
            let m = mbs_index.nearest(p);
            let sc_band = ctx.policy.cb && split.random::<f64>() >= ctx.policy.p_m;
            off_load[m][sc_band as usize] += 1;
            serving.push(Serving::Offloaded { mbs: m, sc_band });
        }
    }

    let mut fading = substream(seed, trial, Purpose::Fading);
    let qos = &ctx.qos;
    let bands = &ctx.bands;
    for (u, &p) in topo.mbs_ue_positions.iter().enumerate() {
        if topo.mbs_ue_cell[u] != 0 {
            continue;
        }
        let s = faded_sinr(p, 0, mbs, cfg.p_m, cfg.alpha_m, cfg.sigma2, &mut fading)?;
        sink(UeClass::Macro, s, rate(bands.w_m, mbs_load[0] - 1, s) < qos.u_m);
    }
    for (u, &p) in topo.sc_ue_positions.iter().enumerate() {
        match serving[u] {
            Serving::Sc(k) => {
                if mbs_index.nearest(p) != 0 {
                    continue;
                }
                let s = faded_sinr(p, k, &active, cfg.p_s, cfg.alpha_s, cfg.sigma2, &mut fading)?;
                sink(UeClass::SmallCell, s, rate(bands.w_s, sc_load[k] - 1, s) < qos.u_s);
            }
            Serving::Offloaded { mbs: m, sc_band } => {
                if m != 0 {
                    continue;
                }
                let (w, alpha) = if sc_band {
                    (bands.o_sc, cfg.alpha_s)
                } else {
                    (bands.o_mbs, cfg.alpha_m)
                };
                let s = faded_sinr(p, 0, mbs, cfg.p_m, alpha, cfg.sigma2, &mut fading)?;
                let sharers = off_load[0][sc_band as usize] - 1;
                sink(UeClass::Offloaded, s, rate(w, sharers, s) < qos.u_o);
            }
        }
    }
    Ok(())
}

fn check_trials(trials: u64) -> Result<()> {
    check(trials >= 1, "trials", || "must be >= 1".to_string())
}

/// Outage estimates over `trials` independent topologies.
///
/// The result depends only on `(ctx, trials, seed)`, not on the thread count.
pub fn estimate_outage_ctx(ctx: &SimContext, trials: u64, seed: u64) -> Result<OutageTriple> {
    ctx.validate()?;
    check_trials(trials)?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut tally = Tally::default();
            run_trial(ctx, seed, t, &mut |c, _, out| {
                let k = class_slot(c);
                tally.n[k] += 1;
                tally.out[k] += out as u64;
            })?;
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let est = |k: usize| OutageEstimate::from_counts(tally.out[k], tally.n[k], trials);
    Ok(OutageTriple {
        g_m: est(0),
        g_s: est(1),
        g_o: est(2),
    })
}

pub fn estimate_outage(
    cfg: &NetworkConfig,
    load: &LoadState,
    qos: &QosSpec,
    policy: &SleepPolicy,
    bands: &BandAllocation,
    trials: u64,
    seed: u64,
) -> Result<OutageTriple> {
    let ctx = SimContext {
        cfg: *cfg,
        load: *load,
        qos: *qos,
        policy: *policy,
        bands: *bands,
    };
    estimate_outage_ctx(&ctx, trials, seed)
}

/// SINR of every center-cell user of `class`, trial by trial.
pub fn sinr_samples(ctx: &SimContext, class: UeClass, trials: u64, seed: u64) -> Result<Vec<f64>> {
    ctx.validate()?;
    check_trials(trials)?;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut v = Vec::new();
            run_trial(ctx, seed, t, &mut |c, s, _| {
                if c == class {
                    v.push(s)
                }
            })?;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.concat())
}

/// Parameter varied by [`outage_curve`]. Values are SI (Hz, m, per m²).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    WM,
    WS,
    WO,
    PS,
    RS,
    LambdaM,
    LambdaS,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::WM,
        SweepParam::WS,
        SweepParam::WO,
        SweepParam::PS,
        SweepParam::RS,
        SweepParam::LambdaM,
        SweepParam::LambdaS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::WM => "w_m",
            SweepParam::WS => "w_s",
            SweepParam::WO => "w_o",
            SweepParam::PS => "p_s",
            SweepParam::RS => "R_s",
            SweepParam::LambdaM => "lambda_m",
            SweepParam::LambdaS => "lambda_s",
        }
    }

    /// CSV column name with the unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::WM => "w_m_Hz",
            SweepParam::WS => "w_s_Hz",
            SweepParam::WO => "w_o_Hz",
            SweepParam::PS => "p_s",
            SweepParam::RS => "R_s_m",
            SweepParam::LambdaM => "lambda_m_per_m2",
            SweepParam::LambdaS => "lambda_s_per_m2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::InvalidParameter {
            field: "sweep",
            reason: format!("unknown parameter {s:?}"),
        })
    }

    /// `base` with this parameter set to `v`.
    pub fn apply(self, base: &SimContext, v: f64) -> Result<SimContext> {
        let mut ctx = *base;
        let cfg = &base.cfg;
        let cb = base.policy.cb;
        match self {
            SweepParam::WM => ctx.bands = BandAllocation::new(cfg, v, base.bands.w_s, cb)?,
            SweepParam::WS => ctx.bands = BandAllocation::new(cfg, base.bands.w_m, v, cb)?,
            SweepParam::WO => {
                let w_m = if cb { cfg.w_m + cfg.w_s - base.bands.w_s - v } else { cfg.w_m - v };
                check(w_m >= 0.0 && v >= 0.0, "w_o", || format!("{v} exceeds the available band"))?;
                ctx.bands = BandAllocation::new(cfg, w_m, base.bands.w_s, cb)?;
            }
            SweepParam::PS => match base.policy.scheme {
                Scheme::None | Scheme::Random { .. } => ctx.policy.scheme = Scheme::Random { p_s: v },
                Scheme::Repulsive { .. } => {
                    return Err(Error::InvalidParameter {
                        field: "sweep",
                        reason: "p_s sweep needs the random scheme".to_string(),
                    })
                }
            },
            SweepParam::RS => match base.policy.scheme {
                Scheme::None | Scheme::Repulsive { .. } => ctx.policy.scheme = Scheme::Repulsive { r_s: v },
                Scheme::Random { .. } => {
                    return Err(Error::InvalidParameter {
                        field: "sweep",
                        reason: "R_s sweep needs the repulsive scheme".to_string(),
                    })
                }
            },
            SweepParam::LambdaM => ctx.load.lambda_m = v,
            SweepParam::LambdaS => ctx.load.lambda_s = v,
        }
        ctx.validate()?;
        Ok(ctx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub value: f64,
    pub outage: OutageTriple,
}

/// One [`estimate_outage_ctx`] per value, all with the same seed.
pub fn outage_curve(
    param: SweepParam,
    values: &[f64],
    base: &SimContext,
    trials: u64,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    if values.is_empty() {
        return Err(Error::EmptySweep);
    }
    values
        .iter()
        .map(|&v| {
            let ctx = param.apply(base, v)?;
            Ok(CurveRow {
                value: v,
                outage: estimate_outage_ctx(&ctx, trials, seed)?,
            })
        })
        .collect()
}

pub const CURVE_COLUMNS: &str = "G_m,G_m_ci,G_s,G_s_ci,G_o,G_o_ci,trials";

/// The estimate columns of one row, matching [`CURVE_COLUMNS`]; undefined classes are empty.
pub fn estimate_fields(o: &OutageTriple, trials: u64) -> String {
    let f = |e: Option<OutageEstimate>| {
        format!("{},{}", fmt_opt(e.map(|e| e.mean)), fmt_opt(e.map(|e| e.ci_half_width)))
    };
    format!("{},{},{},{trials}", f(o.g_m), f(o.g_s), f(o.g_o))
}

/// CSV text for a curve: header `<param column>,G_m,G_m_ci,G_s,G_s_ci,G_o,G_o_ci,trials`.
pub fn curve_csv(param: SweepParam, rows: &[CurveRow], trials: u64) -> String {
    let mut out = format!("{},{CURVE_COLUMNS}\n", param.column());
    for r in rows {
        out.push_str(&format!("{},{}\n", r.value, estimate_fields(&r.outage, trials)));
    }
    out
}
