//! Largest sleeping ratio that keeps every class within its outage cap.
//!
//! Random sleeping without CB has a closed form. With CB the SC band requirement
//! depends on `p_s` through `τ'_s`, so the optimum is found numerically. The
//! repulsive scheme bisects on the sleeping radius.
//!
//! Without CB the SC-user constraint does not involve the sleeping decision and
//! is not enforced. When it cannot be met the result carries
//! `sc_layer_overloaded`. With CB an overloaded SC layer simply has no spare
//! band to lend.

use std::f64::consts::{LN_2, PI};

use crate::analytic::{mbs_band_required, offload_capacity, sc_band_required, tau_o};
use crate::config::{LoadState, NetworkConfig, QosSpec};
use crate::error::{check, Result};
use crate::linklayer::{interference_factor, InterferenceFactor};
use crate::policy::{BandAllocation, Scheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Absolute tolerance on `p_s`.
    pub p_tol: f64,
    /// Absolute tolerance on `R_s`, m.
    pub r_tol: f64,
    /// Sleeping probability beyond which the SC layer counts as noise-limited.
    pub p_hat_s: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            p_tol: 1e-6,
            r_tol: 1e-4,
            p_hat_s: 0.8,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        check(self.p_tol > 0.0, "p_tol", || format!("{} must be > 0", self.p_tol))?;
        check(self.r_tol > 0.0, "r_tol", || format!("{} must be > 0", self.r_tol))?;
        check((0.0..1.0).contains(&self.p_hat_s), "p_hat_s", || {
            format!("{} must lie in [0, 1)", self.p_hat_s)
        })
    }
}

/// Inputs shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub cfg: NetworkConfig,
    pub i: InterferenceFactor,
    pub load: LoadState,
    pub qos: QosSpec,
    pub opts: SolverOptions,
}

impl Problem {
    /// Computes the interference factor of `cfg`.
    pub fn new(cfg: NetworkConfig, load: LoadState, qos: QosSpec) -> Self {
        Problem {
            i: interference_factor(&cfg),
            cfg,
            load,
            qos,
            opts: SolverOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.load.validate()?;
        self.qos.validate()?;
        self.opts.validate()
    }

    pub fn mbs_band(&self) -> f64 {
        mbs_band_required(&self.cfg, self.i, self.load.lambda_m, &self.qos)
    }

    /// SC band required under `scheme` (no spare-band clamping).
    pub fn sc_band(&self, scheme: &Scheme) -> f64 {
        sc_band_required(
            scheme,
            self.cfg.alpha_s,
            self.load.lambda_s,
            self.cfg.rho_s,
            &self.qos,
            self.opts.p_hat_s,
        )
        .expect("validated scheme and exponent")
    }

    /// Offloaded-user capacity of a spare band at distance `r` with exponent `alpha`.
    fn capacity(&self, spare: f64, alpha: f64, r: f64) -> f64 {
        offload_capacity(spare, tau_o(&self.cfg, self.i, alpha, r, self.qos.eta_o), self.qos.u_o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Bisection,
    Bound,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Bisection => "bisection",
            Method::Bound => "bound",
        }
    }
}

/// Constraint that is tight at the returned solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Mbs,
    Sc,
    OffloadedMbsBand,
    OffloadedScBand,
    /// The policy parameter sits at its upper limit.
    Cap,
}

impl Binding {
    pub fn name(self) -> &'static str {
        match self {
            Binding::Mbs => "mbs",
            Binding::Sc => "sc",
            Binding::OffloadedMbsBand => "offloaded_mbs",
            Binding::OffloadedScBand => "offloaded_sc",
            Binding::Cap => "cap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Infeasibility {
    /// The macro layer cannot serve its own users: `required > available`.
    MbsLayer { required: f64, available: f64 },
    /// Even without sleeping the offloaded-user constraint fails.
    Offloaded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Scheme carrying the optimal `p_s` or `R_s`.
    pub scheme: Scheme,
    pub cb: bool,
    pub sleeping_ratio: f64,
    pub p_m: f64,
    pub bands: BandAllocation,
    pub binding: Vec<Binding>,
    pub method: Method,
    pub infeasibility: Option<Infeasibility>,
    /// The unconstrained optimum left `[0, 1]` and was clamped.
    pub clamped: bool,
    /// The SC layer needs more than `W_s` for its own users.
    pub sc_layer_overloaded: bool,
}

impl SolveResult {
    /// `p_s` or `R_s`; 0 for no sleeping.
    pub fn param(&self) -> f64 {
        match self.scheme {
            Scheme::None => 0.0,
            Scheme::Random { p_s } => p_s,
            Scheme::Repulsive { r_s } => r_s,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.infeasibility.is_none()
    }

    pub fn binding_tags(&self) -> String {
        self.binding.iter().map(|b| b.name()).collect::<Vec<_>>().join(";")
    }
}

/// Upper limit of `R_s` at which `π R_s² ρ_m` reaches 1: `D·√(3√3/(2π))`.
pub fn repulsive_radius_cap(d: f64) -> f64 {
    d * (3.0 * 3f64.sqrt() / (2.0 * PI)).sqrt()
}

fn zero_result(p: &Problem, scheme: Scheme, cb: bool, method: Method, why: Infeasibility) -> SolveResult {
    let w_m = p.mbs_band().min(p.cfg.w_m);
    let w_s = p.sc_band(&Scheme::None).min(p.cfg.w_s);
    SolveResult {
        scheme,
        cb,
        sleeping_ratio: 0.0,
        p_m: 1.0,
        bands: BandAllocation::new(&p.cfg, w_m, w_s, cb).expect("bands within totals"),
        binding: Vec::new(),
        method,
        infeasibility: Some(why),
        clamped: false,
        sc_layer_overloaded: p.sc_band(&Scheme::None) > p.cfg.w_s,
    }
}

/// Macro band at its minimum, or the infeasibility when it exceeds `W_m`.
fn macro_band(p: &Problem) -> std::result::Result<f64, Infeasibility> {
    let required = p.mbs_band();
    if required > p.cfg.w_m {
        Err(Infeasibility::MbsLayer {
            required,
            available: p.cfg.w_m,
        })
    } else {
        Ok(required)
    }
}

/// Feasible `p_m` for offloaded load `load` and per-band capacities `b_m`, `b_s`.
///
/// The macro band needs `1 + load·p_m ≤ b_m`; the SC band needs
/// `1 + load·(1 − p_m) ≤ b_s` unless `p_m = 1`. Returns the midpoint of the
/// feasible interval within `(0, 1]`.
pub fn feasible_p_m(load: f64, b_m: f64, b_s: f64) -> Option<f64> {
    if b_m < 1.0 {
        return None;
    }
    if load == 0.0 {
        return Some(1.0);
    }
    let hi = ((b_m - 1.0) / load).min(1.0);
    let lo = (1.0 - (b_s - 1.0) / load).max(0.0);
    if hi >= 1.0 && lo > 1.0 {
        // Only the all-macro split works.
        return Some(1.0);
    }
    if hi < lo || hi <= 0.0 {
        return None;
    }
    Some(0.5 * (lo + hi))
}

/// Closed-form optimum of the random scheme without CB:
/// `p_s* = ρ_m/λ_s · (B_m − 1)`, `B_m = (W_m − w_m)·log2(1+τ_o(α_m, D))/U_o`.
pub fn solve_random_no_cb(p: &Problem) -> Result<SolveResult> {
    p.validate()?;
    let scheme0 = Scheme::Random { p_s: 0.0 };
    let w_m = match macro_band(p) {
        Ok(w) => w,
        Err(why) => return Ok(zero_result(p, scheme0, false, Method::ClosedForm, why)),
    };
    let b_m = p.capacity(p.cfg.w_m - w_m, p.cfg.alpha_m, p.cfg.d);
    if b_m < 1.0 {
        return Ok(zero_result(p, scheme0, false, Method::ClosedForm, Infeasibility::Offloaded));
    }
    let raw = if p.load.lambda_s == 0.0 {
        f64::INFINITY
    } else {
        p.cfg.rho_m() / p.load.lambda_s * (b_m - 1.0)
    };
    let p_s = raw.clamp(0.0, 1.0);
    let scheme = Scheme::Random { p_s };
    let need_s = p.sc_band(&scheme);
    let mut binding = vec![Binding::Mbs];
    binding.push(if raw > 1.0 { Binding::Cap } else { Binding::OffloadedMbsBand });
    Ok(SolveResult {
        scheme,
        cb: false,
        sleeping_ratio: p_s,
        p_m: 1.0,
        bands: BandAllocation::new(&p.cfg, w_m, need_s.min(p.cfg.w_s), false)?,
        binding,
        method: Method::ClosedForm,
        infeasibility: None,
        clamped: raw > 1.0,
        sc_layer_overloaded: need_s > p.cfg.w_s,
    })
}

/// Closed-form CB optimum for `α_m = α_s` in the noise-limited regime `p_s ≥ p̂_s`,
/// unclamped: `ρ_m/λ_s · (log2(1+τ_o(α_m, D))/U_o · (W_m − w_m + W_s − w_s(p̂_s)) − 1)`.
pub fn random_cb_closed_form(p: &Problem) -> f64 {
    let w_m = p.mbs_band();
    let w_s = p.sc_band(&Scheme::Random { p_s: p.opts.p_hat_s });
    let per_hz = p.capacity(1.0, p.cfg.alpha_m, p.cfg.d);
    p.cfg.rho_m() / p.load.lambda_s * (per_hz * (p.cfg.w_m - w_m + p.cfg.w_s - w_s) - 1.0)
}

/// CB gain `p'_s* − p_s*` in the same regime: `ρ_m/λ_s · log2(1+τ_o(α_m, D))/U_o · (W_s − w_s(p̂_s))`.
pub fn random_cb_gain(p: &Problem) -> f64 {
    let w_s = p.sc_band(&Scheme::Random { p_s: p.opts.p_hat_s });
    let per_hz = p.capacity(1.0, p.cfg.alpha_m, p.cfg.d);
    p.cfg.rho_m() / p.load.lambda_s * per_hz * (p.cfg.w_s - w_s)
}

/// Evaluates the random/CB constraint set at `p_s` given the macro band.
fn random_cb_split(p: &Problem, w_m: f64, p_s: f64) -> Option<f64> {
    let cfg = &p.cfg;
    let w_s = p.sc_band(&Scheme::Random { p_s });
    let load = cfg.hex_area() * p.load.lambda_s * p_s;
    let b_m = p.capacity(cfg.w_m - w_m, cfg.alpha_m, cfg.d);
    let b_s = p.capacity((cfg.w_s - w_s).max(0.0), cfg.alpha_s, cfg.d);
    feasible_p_m(load, b_m, b_s)
}

/// Coarse scan resolution used to bracket the largest feasible `p_s` under CB.
const SCAN_STEPS: usize = 256;

/// Largest `p_s` for which some band split `p_m` satisfies both offloaded-user constraints.
///
/// Feasibility need not be monotone in `p_s` because the SC band frees up as
/// interference drops, so the largest feasible grid point is bracketed first and
/// then refined by bisection.
pub fn solve_random_cb(p: &Problem) -> Result<SolveResult> {
    p.validate()?;
    let scheme0 = Scheme::Random { p_s: 0.0 };
    let w_m = match macro_band(p) {
        Ok(w) => w,
        Err(why) => return Ok(zero_result(p, scheme0, true, Method::Bisection, why)),
    };
    let feasible = |x: f64| random_cb_split(p, w_m, x).is_some();
    if !feasible(0.0) {
        return Ok(zero_result(p, scheme0, true, Method::Bisection, Infeasibility::Offloaded));
    }
    let (p_s, capped) = if feasible(1.0) {
        (1.0, true)
    } else {
        let step = 1.0 / SCAN_STEPS as f64;
        let k = (0..SCAN_STEPS)
            .rev()
            .find(|&k| feasible(k as f64 * step))
            .expect("p_s = 0 is feasible");
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        while hi - lo > p.opts.p_tol {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, false)
    };
    let p_m = random_cb_split(p, w_m, p_s).expect("feasible by construction");
    let scheme = Scheme::Random { p_s };
    let need_s = p.sc_band(&scheme);
    let mut binding = vec![Binding::Mbs];
    if need_s <= p.cfg.w_s {
        binding.push(Binding::Sc);
    }
    if capped {
        binding.push(Binding::Cap);
    } else {
        binding.push(Binding::OffloadedMbsBand);
        if p_m < 1.0 {
            binding.push(Binding::OffloadedScBand);
        }
    }
    Ok(SolveResult {
        scheme,
        cb: true,
        sleeping_ratio: p_s,
        p_m,
        bands: BandAllocation::new(&p.cfg, w_m, need_s.min(p.cfg.w_s), true)?,
        binding,
        method: Method::Bisection,
        infeasibility: None,
        clamped: capped,
        sc_layer_overloaded: need_s > p.cfg.w_s,
    })
}

fn repulsive_split(p: &Problem, w_m: f64, w_s: f64, cb: bool, r: f64) -> Option<f64> {
    let cfg = &p.cfg;
    let load = PI * r * r * p.load.lambda_s;
    let b_m = p.capacity(cfg.w_m - w_m, cfg.alpha_m, r);
    if !cb {
        return (1.0 + load <= b_m).then_some(1.0);
    }
    let b_s = p.capacity((cfg.w_s - w_s).max(0.0), cfg.alpha_s, r);
    feasible_p_m(load, b_m, b_s)
}

/// Largest sleeping radius satisfying the offloaded-user constraints, capped at
/// [`repulsive_radius_cap`].
pub fn solve_repulsive(p: &Problem, cb: bool) -> Result<SolveResult> {
    p.validate()?;
    let scheme0 = Scheme::Repulsive { r_s: 0.0 };
    let w_m = match macro_band(p) {
        Ok(w) => w,
        Err(why) => return Ok(zero_result(p, scheme0, cb, Method::Bisection, why)),
    };
    let need_s = p.sc_band(&Scheme::None);
    let w_s = need_s.min(p.cfg.w_s);
    let feasible = |r: f64| repulsive_split(p, w_m, w_s, cb, r).is_some();
    let cap = repulsive_radius_cap(p.cfg.d);
    // τ_o grows without bound as R → 0, so a spare macro band is all that is needed there.
    let feasible_at_zero = p.qos.u_o == 0.0 || p.cfg.w_m > w_m;
    if !feasible_at_zero {
        return Ok(zero_result(p, scheme0, cb, Method::Bisection, Infeasibility::Offloaded));
    }
    let (r_s, capped) = if feasible(cap) {
        (cap, true)
    } else {
        let (mut lo, mut hi) = (0.0, cap);
        while hi - lo > p.opts.r_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, false)
    };
    let p_m = if r_s == 0.0 {
        1.0
    } else {
        repulsive_split(p, w_m, w_s, cb, r_s).expect("feasible by construction")
    };
    let mut binding = vec![Binding::Mbs];
    if need_s <= p.cfg.w_s {
        binding.push(Binding::Sc);
    }
    if capped {
        binding.push(Binding::Cap);
    } else {
        binding.push(Binding::OffloadedMbsBand);
        if cb && p_m < 1.0 {
            binding.push(Binding::OffloadedScBand);
        }
    }
    let ratio = PI * r_s * r_s * p.cfg.rho_m();
    Ok(SolveResult {
        scheme: Scheme::Repulsive { r_s },
        cb,
        sleeping_ratio: ratio.min(1.0),
        p_m,
        bands: BandAllocation::new(&p.cfg, w_m, w_s, cb)?,
        binding,
        method: Method::Bisection,
        infeasibility: None,
        clamped: capped,
        sc_layer_overloaded: need_s > p.cfg.w_s,
    })
}

/// Sleeping radius above which the offloaded-user constraint must fail:
/// `((α_m+2) η_o P_m / (2σ²(1+I) U_o ln2 π λ_s) · w)^{1/(α_m+2)}`, with `w` the
/// band left for offloaded users (`W_m − w_m`, plus the spare `W_s − w_s` with CB).
///
/// Follows from `2^x − 1 ≥ x ln 2` and dropping the `1` in `1 + πR²λ_s`.
pub fn repulsive_upper_bound(p: &Problem, cb: bool) -> f64 {
    let cfg = &p.cfg;
    let mut avail = cfg.w_m - p.mbs_band();
    if cb {
        avail += (cfg.w_s - p.sc_band(&Scheme::None)).max(0.0);
    }
    if avail <= 0.0 {
        return 0.0;
    }
    let a = cfg.alpha_m;
    let k = (a + 2.0) * p.qos.eta_o * cfg.p_m
        / (2.0 * cfg.sigma2 * (1.0 + p.i.value()) * p.qos.u_o * LN_2 * PI * p.load.lambda_s);
    (k * avail).powf(1.0 / (a + 2.0))
}

/// Better of the two schemes; ties go to the random scheme.
pub fn best_scheme(p: &Problem, cb: bool) -> Result<SolveResult> {
    let random = if cb { solve_random_cb(p)? } else { solve_random_no_cb(p)? };
    let repulsive = solve_repulsive(p, cb)?;
    Ok(match (random.is_feasible(), repulsive.is_feasible()) {
        (false, true) => repulsive,
        (true, true) if repulsive.sleeping_ratio > random.sleeping_ratio => repulsive,
        _ => random,
    })
}

pub const SOLVE_COLUMNS: &str = "lambda_s,lambda_m,scheme,cb,sleeping_ratio,param,p_m,w_m,w_s,w_o,binding";

/// One CSV row matching [`SOLVE_COLUMNS`]; densities per m², bands in Hz.
pub fn solve_row(load: &LoadState, r: &SolveResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        load.lambda_s,
        load.lambda_m,
        r.scheme.name(),
        r.cb,
        r.sleeping_ratio,
        r.param(),
        r.p_m,
        r.bands.w_m,
        r.bands.w_s,
        r.bands.w_o,
        r.binding_tags()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{constraint_offloaded, outage_mbs_simplified_ok};
    use crate::policy::SleepPolicy;

    fn problem(lm: f64, ls: f64) -> Problem {
        Problem::new(NetworkConfig::table1(), LoadState::per_km2(lm, ls), QosSpec::table1())
    }

    fn satisfies_all(p: &Problem, r: &SolveResult) -> bool {
        let policy = SleepPolicy::new(r.scheme, r.cb, r.p_m).unwrap();
        let off = constraint_offloaded(&policy, p.load.lambda_s, &r.bands, &p.cfg, p.i, &p.qos).unwrap();
        let mbs = outage_mbs_simplified_ok(&p.cfg, p.i, p.load.lambda_m, r.bands.w_m, &p.qos);
        off.holds() && mbs
    }

    #[test]
    fn p_m_interval() {
        assert_eq!(feasible_p_m(0.0, 1.0, 0.0), Some(1.0));
        assert_eq!(feasible_p_m(10.0, 0.5, 100.0), None);
        assert_eq!(feasible_p_m(10.0, 20.0, 0.0), Some(1.0));
        // hi = 0.5, lo = 0.2
        assert_eq!(feasible_p_m(10.0, 6.0, 9.0), Some(0.35));
        assert_eq!(feasible_p_m(10.0, 3.0, 3.0), None);
    }

    #[test]
    fn radius_cap_fills_hexagon() {
        let cap = repulsive_radius_cap(500.0);
        assert!((PI * cap * cap * crate::config::rho_m(500.0) - 1.0).abs() < 1e-12);
        assert!((cap / 500.0 - 0.9094).abs() < 1e-4);
    }

    #[test]
    fn random_no_cb_solution_is_feasible_and_maximal() {
        let p = problem(20.0, 100.0);
        let r = solve_random_no_cb(&p).unwrap();
        assert!(r.is_feasible() && !r.clamped);
        assert!(satisfies_all(&p, &r));
        let mut nudged = r.clone();
        nudged.scheme = Scheme::Random { p_s: r.param() + 1e-4 };
        assert!(!satisfies_all(&p, &nudged));
    }

    #[test]
    fn random_no_cb_saturates_at_low_load() {
        let r = solve_random_no_cb(&problem(20.0, 0.5)).unwrap();
        assert_eq!(r.sleeping_ratio, 1.0);
        assert!(r.clamped && r.binding.contains(&Binding::Cap));
    }

    #[test]
    fn random_no_cb_heavy_load_goes_to_zero() {
        let a = solve_random_no_cb(&problem(20.0, 1e9)).unwrap().sleeping_ratio;
        let b = solve_random_no_cb(&problem(20.0, 1e12)).unwrap().sleeping_ratio;
        assert!(b < a && b < 1e-9, "{a} {b}");
    }

    #[test]
    fn infeasible_macro_layer_is_typed() {
        let r = solve_random_no_cb(&problem(200.0, 100.0)).unwrap();
        assert!(matches!(r.infeasibility, Some(Infeasibility::MbsLayer { .. })));
        assert_eq!(r.sleeping_ratio, 0.0);
        let b = best_scheme(&problem(200.0, 100.0), true).unwrap();
        assert!(!b.is_feasible());
        assert_eq!(b.scheme.name(), "random");
    }

    #[test]
    fn cb_never_worse_when_sc_band_is_spare() {
        for ls in [20.0, 60.0, 100.0] {
            let p = problem(20.0, ls);
            let a = solve_random_no_cb(&p).unwrap();
            let b = solve_random_cb(&p).unwrap();
            assert!(b.sleeping_ratio >= a.sleeping_ratio - 1e-6, "{ls}");
            assert!(satisfies_all(&p, &b));
        }
    }

    #[test]
    fn cb_without_spare_band_equals_no_cb() {
        let mut p = problem(20.0, 100.0);
        p.opts.p_hat_s = 0.0;
        p.cfg.w_s = p.sc_band(&Scheme::None);
        let a = solve_random_no_cb(&p).unwrap();
        let b = solve_random_cb(&p).unwrap();
        assert!((a.sleeping_ratio - b.sleeping_ratio).abs() <= 1e-6);
    }

    #[test]
    fn repulsive_solution_is_feasible_and_maximal() {
        for cb in [false, true] {
            let p = problem(20.0, 100.0);
            let r = solve_repulsive(&p, cb).unwrap();
            assert!(r.is_feasible());
            assert!(satisfies_all(&p, &r), "cb={cb}");
            let mut nudged = r.clone();
            nudged.scheme = Scheme::Repulsive { r_s: r.param() + 2e-4 };
            let fits = repulsive_split(&p, r.bands.w_m, r.bands.w_s, cb, r.param() + 2e-4).is_some();
            assert!(!fits || r.clamped);
            let ratio = PI * r.param().powi(2) * p.cfg.rho_m();
            assert!((ratio - r.sleeping_ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn repulsive_radius_shrinks_with_load() {
        let a = solve_repulsive(&problem(20.0, 100.0), false).unwrap().param();
        let b = solve_repulsive(&problem(20.0, 200.0), false).unwrap().param();
        assert!(b < a);
    }

    #[test]
    fn repulsive_without_sc_users_depends_only_on_rate() {
        let p = problem(20.0, 0.0);
        let r = solve_repulsive(&p, false).unwrap();
        let w = p.cfg.w_m - p.mbs_band();
        let cap = repulsive_radius_cap(p.cfg.d);
        let rate_ok = |x: f64| w * (1.0 + tau_o(&p.cfg, p.i, p.cfg.alpha_m, x, p.qos.eta_o)).log2() >= p.qos.u_o;
        if r.clamped {
            assert!(rate_ok(cap));
        } else {
            assert!(rate_ok(r.param()) && !rate_ok(r.param() + 1e-3));
        }
    }

    #[test]
    fn upper_bound_dominates_solution() {
        for ls in [50.0, 100.0, 200.0, 400.0] {
            for cb in [false, true] {
                let p = problem(20.0, ls);
                let r = solve_repulsive(&p, cb).unwrap();
                assert!(repulsive_upper_bound(&p, cb) >= r.param(), "ls={ls} cb={cb}");
            }
        }
        let mut p = problem(20.0, 100.0);
        p.cfg.w_m = p.mbs_band();
        assert_eq!(repulsive_upper_bound(&p, false), 0.0);
    }

    #[test]
    fn best_scheme_picks_larger() {
        let p = problem(20.0, 100.0);
        for cb in [false, true] {
            let best = best_scheme(&p, cb).unwrap();
            let rep = solve_repulsive(&p, cb).unwrap();
            assert!(best.sleeping_ratio >= rep.sleeping_ratio);
        }
    }

    #[test]
    fn csv_row_layout() {
        let p = problem(20.0, 100.0);
        let r = solve_random_no_cb(&p).unwrap();
        let row = solve_row(&p.load, &r);
        assert_eq!(row.split(',').count(), SOLVE_COLUMNS.split(',').count());
        assert!(row.ends_with("mbs;offloaded_mbs"));
    }
}
