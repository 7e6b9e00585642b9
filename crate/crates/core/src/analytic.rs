//! Closed-form outage probabilities and the linear-in-bandwidth QoS constraints.
//!
//! Each constraint has the shape `w / (1 + load) · log2(1 + τ) ≥ U`, where `τ`
//! is the SINR of the η-quantile (cell-edge) user of the class. The predicates
//! compare the offered band against the band the constraint requires, so a
//! band computed by [`mbs_band_required`] or [`sc_band_required`] passes its own
//! predicate exactly.

use std::f64::consts::PI;

use crate::config::{NetworkConfig, QosSpec};
use crate::error::{check, Error, Result};
use crate::linklayer::InterferenceFactor;
use crate::policy::{BandAllocation, Scheme, SleepPolicy};

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Probability clamped into `[0, 1]`, remembering whether the clamp fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub clamped: bool,
}

impl Clamped {
    pub fn new(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Clamped {
            value,
            clamped: value != raw,
        }
    }
}

/// Macro-layer SNR constant `P_m / (σ²(1 + I))`.
fn snr_scale(cfg: &NetworkConfig, i: InterferenceFactor) -> f64 {
    cfg.p_m / (cfg.sigma2 * (1.0 + i.value()))
}

/// Edge SINR of macro users, `P_m/(σ²(I+1)) · (α_m+2)/2 · η_m / D^α_m`.
pub fn tau_m(cfg: &NetworkConfig, i: InterferenceFactor, eta_m: f64) -> f64 {
    tau_o(cfg, i, cfg.alpha_m, cfg.d, eta_m)
}

/// Edge SINR of small-cell users without sleeping, `(α_s−2)/2 · η_s/(1−η_s)`.
pub fn tau_s(alpha_s: f64, eta_s: f64) -> f64 {
    0.5 * (alpha_s - 2.0) * eta_s / (1.0 - eta_s)
}

/// Edge SINR of small-cell users under random sleeping with probability `p_s`.
///
/// Interference drops with the share of sleeping cells until `p_hat_s`, beyond
/// which the layer counts as noise-limited and the threshold stays flat.
pub fn tau_s_prime(alpha_s: f64, eta_s: f64, p_s: f64, p_hat_s: f64) -> f64 {
    tau_s(alpha_s, eta_s) / (1.0 - p_s.min(p_hat_s))
}

/// Edge SINR of offloaded users spread uniformly over disks of radius `r`
/// around the macro sites, with path-loss exponent `alpha`.
pub fn tau_o(cfg: &NetworkConfig, i: InterferenceFactor, alpha: f64, r: f64, eta_o: f64) -> f64 {
    snr_scale(cfg, i) * 0.5 * (alpha + 2.0) * eta_o / r.powf(alpha)
}

/// All edge thresholds for one deployment and QoS target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSinrThresholds {
    pub tau_m: f64,
    pub tau_s: f64,
    pub p_hat_s: f64,
    alpha_s: f64,
    eta_s: f64,
    eta_o: f64,
    snr_scale: f64,
}

impl EdgeSinrThresholds {
    pub fn new(cfg: &NetworkConfig, i: InterferenceFactor, qos: &QosSpec, p_hat_s: f64) -> Self {
        EdgeSinrThresholds {
            tau_m: tau_m(cfg, i, qos.eta_m),
            tau_s: tau_s(cfg.alpha_s, qos.eta_s),
            p_hat_s,
            alpha_s: cfg.alpha_s,
            eta_s: qos.eta_s,
            eta_o: qos.eta_o,
            snr_scale: snr_scale(cfg, i),
        }
    }

    pub fn tau_s_prime(&self, p_s: f64) -> f64 {
        tau_s_prime(self.alpha_s, self.eta_s, p_s, self.p_hat_s)
    }

    pub fn tau_o(&self, alpha: f64, r: f64) -> f64 {
        self.snr_scale * 0.5 * (alpha + 2.0) * self.eta_o / r.powf(alpha)
    }
}

/// Macro-user outage in the high-SNR regime:
/// `2D^α(I+1)σ²/(P_m(α+2)) · (2^{U/w} · exp(λ_m A (2^{U/w} − 1)) − 1)`,
/// `A` the hexagon area.
pub fn outage_mbs_closed(
    cfg: &NetworkConfig,
    i: InterferenceFactor,
    lambda_m: f64,
    w_m: f64,
    u_m: f64,
) -> Clamped {
    let coef = 2.0 * cfg.d.powf(cfg.alpha_m) / (snr_scale(cfg, i) * (cfg.alpha_m + 2.0));
    let g = (u_m / w_m).exp2();
    let load = lambda_m * cfg.hex_area();
    Clamped::new(coef * (g * (load * (g - 1.0)).exp() - 1.0))
}

/// Smallest macro band meeting the macro-user constraint, `U_m(1 + λ_m/ρ_m)/log2(1+τ_m)`.
pub fn mbs_band_required(cfg: &NetworkConfig, i: InterferenceFactor, lambda_m: f64, qos: &QosSpec) -> f64 {
    qos.u_m * (1.0 + lambda_m / cfg.rho_m()) / log2_1p(tau_m(cfg, i, qos.eta_m))
}

/// Linearized macro-user constraint `w_m/(1 + λ_m/ρ_m) · log2(1+τ_m) ≥ U_m`.
pub fn outage_mbs_simplified_ok(
    cfg: &NetworkConfig,
    i: InterferenceFactor,
    lambda_m: f64,
    w_m: f64,
    qos: &QosSpec,
) -> bool {
    w_m >= mbs_band_required(cfg, i, lambda_m, qos)
}

/// Macro-user outage implied by the linearized constraint: the `η_m` at which
/// `w_m` is exactly sufficient.
pub fn outage_mbs_linear(cfg: &NetworkConfig, i: InterferenceFactor, lambda_m: f64, w_m: f64, u_m: f64) -> Clamped {
    let per_eta = tau_m(cfg, i, 1.0);
    let need = (u_m * (1.0 + lambda_m / cfg.rho_m()) / w_m).exp2() - 1.0;
    Clamped::new(need / per_eta)
}

/// Small-cell user outage without sleeping in an interference-limited layer.
pub fn outage_sc_closed(alpha_s: f64, lambda_s: f64, rho_s: f64, w_s: f64, u_s: f64) -> Result<Clamped> {
    if !(alpha_s > 2.0 && alpha_s <= 4.0) {
        return Err(Error::SeriesDiverges { alpha: alpha_s });
    }
    let z = (-(u_s / w_s) * (1.0 + lambda_s / rho_s)).exp2();
    let covered = 0.5 * (alpha_s - 2.0) * z / (1.0 - 0.5 * (4.0 - alpha_s) * z);
    Ok(Clamped::new(1.0 - covered))
}

fn sc_tau(scheme: &Scheme, alpha_s: f64, eta_s: f64, p_hat_s: f64) -> Result<f64> {
    scheme.validate()?;
    Ok(match *scheme {
        Scheme::Random { p_s } => tau_s_prime(alpha_s, eta_s, p_s, p_hat_s),
        // Repulsive sleeping keeps the no-sleeping threshold (conservative).
        Scheme::None | Scheme::Repulsive { .. } => tau_s(alpha_s, eta_s),
    })
}

/// Smallest small-cell band meeting the SC-user constraint under `scheme`.
pub fn sc_band_required(
    scheme: &Scheme,
    alpha_s: f64,
    lambda_s: f64,
    rho_s: f64,
    qos: &QosSpec,
    p_hat_s: f64,
) -> Result<f64> {
    let tau = sc_tau(scheme, alpha_s, qos.eta_s, p_hat_s)?;
    Ok(qos.u_s * (1.0 + lambda_s / rho_s) / log2_1p(tau))
}

/// SC-user constraint `w_s/(1 + λ_s/ρ_s) · log2(1+τ) ≥ U_s`, with `τ = τ'_s(p_s)`
/// for random sleeping and `τ_s` otherwise.
pub fn constraint_sc(
    scheme: &Scheme,
    alpha_s: f64,
    lambda_s: f64,
    rho_s: f64,
    w_s: f64,
    qos: &QosSpec,
    p_hat_s: f64,
) -> Result<bool> {
    Ok(w_s >= sc_band_required(scheme, alpha_s, lambda_s, rho_s, qos, p_hat_s)?)
}

/// SC-user outage implied by the linearized constraint under `scheme`.
///
/// For `α_s = 4` without sleeping this coincides with [`outage_sc_closed`].
pub fn outage_sc_linear(
    scheme: &Scheme,
    alpha_s: f64,
    lambda_s: f64,
    rho_s: f64,
    w_s: f64,
    u_s: f64,
    p_hat_s: f64,
) -> Result<Clamped> {
    // τ = c·η/(1−η) with c the per-scheme factor; solve for η.
    let c = sc_tau(scheme, alpha_s, 0.5, p_hat_s)?;
    let need = (u_s * (1.0 + lambda_s / rho_s) / w_s).exp2() - 1.0;
    let x = need / c;
    Ok(Clamped::new(x / (1.0 + x)))
}

/// Mean number of offloaded users per macro cell and the radius of the disk
/// they are assumed to occupy.
pub fn offload_load(cfg: &NetworkConfig, scheme: &Scheme, lambda_s: f64) -> (f64, f64) {
    match *scheme {
        Scheme::None => (0.0, cfg.d),
        Scheme::Random { p_s } => (cfg.hex_area() * lambda_s * p_s, cfg.d),
        Scheme::Repulsive { r_s } => (PI * r_s * r_s * lambda_s, r_s),
    }
}

/// How many users (the typical one included) a band can carry at the
/// offloaded QoS target: `spare · log2(1+τ) / U_o`.
pub fn offload_capacity(spare: f64, tau: f64, u_o: f64) -> f64 {
    if u_o == 0.0 {
        return f64::INFINITY;
    }
    if spare <= 0.0 {
        return 0.0;
    }
    spare * log2_1p(tau) / u_o
}

/// Outcome of the offloaded-user constraint on each band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffloadedCheck {
    pub mbs_band: bool,
    /// Vacuously true without CB and whenever no offloaded user uses the SC band (`p_m = 1`).
    pub sc_band: bool,
}

impl OffloadedCheck {
    pub fn holds(&self) -> bool {
        self.mbs_band && self.sc_band
    }
}

/// Offloaded-user constraints for the given policy:
/// macro band `(W_m−w_m)/(1 + L·p_m) · log2(1+τ_o(α_m, r)) ≥ U_o` and, with CB,
/// SC band `(W_s−w_s)/(1 + L·(1−p_m)) · log2(1+τ_o(α_s, r)) ≥ U_o`.
///
/// `L` and `r` come from [`offload_load`].
pub fn constraint_offloaded(
    policy: &SleepPolicy,
    lambda_s: f64,
    bands: &BandAllocation,
    cfg: &NetworkConfig,
    i: InterferenceFactor,
    qos: &QosSpec,
) -> Result<OffloadedCheck> {
    policy.validate()?;
    check(lambda_s >= 0.0, "lambda_s", || format!("{lambda_s} must be >= 0"))?;
    if bands.w_m > cfg.w_m {
        return Err(Error::NegativeBand {
            which: "macro",
            total: cfg.w_m,
            used: bands.w_m,
        });
    }
    if bands.w_s > cfg.w_s {
        return Err(Error::NegativeBand {
            which: "small-cell",
            total: cfg.w_s,
            used: bands.w_s,
        });
    }
    let (load, r) = offload_load(cfg, &policy.scheme, lambda_s);
    let spare_m = cfg.w_m - bands.w_m;
    let cap_m = offload_capacity(spare_m, tau_o(cfg, i, cfg.alpha_m, r, qos.eta_o), qos.u_o);
    let mbs_band = 1.0 + load * policy.p_m <= cap_m;
    let sc_band = if !policy.cb || policy.p_m == 1.0 {
        true
    } else {
        let spare_s = cfg.w_s - bands.w_s;
        let cap_s = offload_capacity(spare_s, tau_o(cfg, i, cfg.alpha_s, r, qos.eta_o), qos.u_o);
        1.0 + load * (1.0 - policy.p_m) <= cap_s
    };
    Ok(OffloadedCheck { mbs_band, sc_band })
}

/// Offloaded-user outage implied by the linearized single-band constraint on a
/// band of width `w_o` with exponent `alpha`.
pub fn outage_offloaded_linear(
    cfg: &NetworkConfig,
    i: InterferenceFactor,
    scheme: &Scheme,
    lambda_s: f64,
    w_o: f64,
    u_o: f64,
    alpha: f64,
) -> Clamped {
    let (load, r) = offload_load(cfg, scheme, lambda_s);
    let need = (u_o * (1.0 + load) / w_o).exp2() - 1.0;
    Clamped::new(need / tau_o(cfg, i, alpha, r, 1.0))
}
