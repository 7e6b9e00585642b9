//! Flat `key = value` experiment configuration.
//!
//! Values are SI with the unit in the key name. `sigma2_dBm` is converted to
//! watts; nothing else is rescaled.

use std::collections::BTreeMap;
use std::path::Path;

use hcn_sleep::config::dbm_to_watts;
use hcn_sleep::optimizer::SolverOptions;
use hcn_sleep::traffic::{PowerModel, COVERAGE_RADIUS_CAP, HIGH_RATE_FRACTION, SAMPLES_PER_DAY};
use hcn_sleep::{Error, LoadState, NetworkConfig, QosSpec};

use crate::CliError;

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.conf");

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub qos: QosSpec,
    pub solver: SolverOptions,
    pub load: LoadState,
    /// Macro and SC bands used by the outage validation.
    pub w_m: f64,
    pub w_s: f64,
    /// Share of offloaded users kept on the macro band with CB.
    pub p_m: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub high_rate_fraction: f64,
    pub samples_per_day: usize,
    pub planning_lambda_max: f64,
    pub planning_lambda_min: f64,
    pub power: PowerModel,
    pub d_max: f64,
}

const REQUIRED: [&str; 16] = [
    "D_m",
    "rho_s_per_m2",
    "P_m_W",
    "P_s_W",
    "W_m_Hz",
    "W_s_Hz",
    "sigma2_dBm",
    "alpha_m",
    "alpha_s",
    "U_m_bps",
    "U_s_bps",
    "U_o_bps",
    "eta_m",
    "eta_s",
    "eta_o",
    "mbs_rings",
];

const OPTIONAL: [&str; 17] = [
    "p_m",
    "planning_lambda_max_per_m2",
    "planning_lambda_min_per_m2",
    "p_hat_s",
    "lambda_m_per_m2",
    "lambda_s_per_m2",
    "w_m_Hz",
    "w_s_Hz",
    "lambda_max_per_m2",
    "lambda_min_per_m2",
    "high_rate_fraction",
    "samples_per_day",
    "P_static_mbs_W",
    "P_static_sc_W",
    "D_max_m",
    "p_tol",
    "R_tol_m",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Core(Error::Parse { line: n + 1, message });
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if !REQUIRED.contains(&k) && !OPTIONAL.contains(&k) {
            return Err(err(format!("unknown key {k:?}")));
        }
        let value: f64 = v.parse().map_err(|e| err(format!("{k}: {v:?}: {e}")))?;
        if !value.is_finite() {
            return Err(err(format!("{k}: value must be finite")));
        }
        if out.insert(k.to_string(), value).is_some() {
            return Err(err(format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

fn invalid(field: &'static str, reason: String) -> CliError {
    CliError::Core(Error::InvalidParameter { field, reason })
}

fn count(field: &'static str, v: f64, min: f64) -> Result<usize, CliError> {
    if v.fract() != 0.0 || v < min || v > u32::MAX as f64 {
        return Err(invalid(field, format!("{v} must be an integer >= {min}")));
    }
    Ok(v as usize)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let kv = parse_pairs(text)?;
    for k in REQUIRED {
        if !kv.contains_key(k) {
            return Err(CliError::Core(Error::Parse {
                line: 0,
                message: format!("missing key {k:?}"),
            }));
        }
    }
    let get = |k: &str| kv[k];
    let opt = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);

    let network = NetworkConfig {
        d: get("D_m"),
        rho_s: get("rho_s_per_m2"),
        p_m: get("P_m_W"),
        p_s: get("P_s_W"),
        w_m: get("W_m_Hz"),
        w_s: get("W_s_Hz"),
        sigma2: dbm_to_watts(get("sigma2_dBm")),
        alpha_m: get("alpha_m"),
        alpha_s: get("alpha_s"),
        mbs_rings: count("mbs_rings", get("mbs_rings"), 0.0)? as u32,
    };
    network.validate()?;
    let qos = QosSpec {
        u_m: get("U_m_bps"),
        u_s: get("U_s_bps"),
        u_o: get("U_o_bps"),
        eta_m: get("eta_m"),
        eta_s: get("eta_s"),
        eta_o: get("eta_o"),
    };
    qos.validate()?;
    let defaults = SolverOptions::default();
    let solver = SolverOptions {
        p_tol: opt("p_tol", defaults.p_tol),
        r_tol: opt("R_tol_m", defaults.r_tol),
        p_hat_s: opt("p_hat_s", defaults.p_hat_s),
    };
    solver.validate()?;
    let load = LoadState::new(opt("lambda_m_per_m2", 20e-6), opt("lambda_s_per_m2", 100e-6));
    load.validate()?;
    let power = PowerModel {
        p_static_mbs: opt("P_static_mbs_W", PowerModel::default().p_static_mbs),
        p_static_sc: opt("P_static_sc_W", PowerModel::default().p_static_sc),
    };
    power.validate()?;
    let cfg = ExperimentConfig {
        network,
        qos,
        solver,
        load,
        w_m: opt("w_m_Hz", network.w_m),
        w_s: opt("w_s_Hz", network.w_s),
        p_m: opt("p_m", 1.0),
        lambda_max: opt("lambda_max_per_m2", 200e-6),
        lambda_min: opt("lambda_min_per_m2", 0.5e-6),
        high_rate_fraction: opt("high_rate_fraction", HIGH_RATE_FRACTION),
        samples_per_day: count("samples_per_day", opt("samples_per_day", SAMPLES_PER_DAY as f64), 2.0)?,
        planning_lambda_max: opt("planning_lambda_max_per_m2", 50e-6),
        planning_lambda_min: opt("planning_lambda_min_per_m2", 0.5e-6),
        power,
        d_max: opt("D_max_m", COVERAGE_RADIUS_CAP),
    };
    hcn_sleep::BandAllocation::new(&network, cfg.w_m, cfg.w_s, false)?;
    for (field, lo, hi) in [
        ("lambda_min_per_m2", cfg.lambda_min, cfg.lambda_max),
        ("planning_lambda_min_per_m2", cfg.planning_lambda_min, cfg.planning_lambda_max),
    ] {
        if !(lo >= 0.0 && lo <= hi) {
            return Err(invalid(field, format!("need 0 <= {lo} <= {hi}")));
        }
    }
    if !(cfg.p_m > 0.0 && cfg.p_m <= 1.0) {
        return Err(invalid("p_m", format!("{} must lie in (0, 1]", cfg.p_m)));
    }
    if !(0.0..=1.0).contains(&cfg.high_rate_fraction) {
        return Err(invalid("high_rate_fraction", format!("{} must lie in [0, 1]", cfg.high_rate_fraction)));
    }
    if cfg.d_max.is_nan() || cfg.d_max <= 0.0 {
        return Err(invalid("D_max_m", format!("{} must be > 0", cfg.d_max)));
    }
    Ok(cfg)
}

/// Reads a config file, or the shipped defaults for `None`.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    match path {
        None => parse_config(DEFAULT_CONFIG),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            parse_config(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults_match_reference() {
        let c = parse_config(DEFAULT_CONFIG).unwrap();
        assert_eq!(c.network, NetworkConfig::table1());
        assert_eq!(c.qos, QosSpec::table1());
        assert_eq!(c.solver.p_hat_s, 0.8);
        assert_eq!(c.samples_per_day, 96);
    }

    fn replace(key: &str, value: &str) -> String {
        DEFAULT_CONFIG
            .lines()
            .map(|l| if l.starts_with(key) { format!("{key} = {value}") } else { l.to_string() })
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn drop_key(key: &str) -> String {
        DEFAULT_CONFIG.lines().filter(|l| !l.starts_with(key)).collect::<Vec<_>>().join("\n")
    }

    #[test]
    fn rejects_out_of_range_probability() {
        let err = parse_config(&replace("eta_m", "1.5")).unwrap_err();
        assert!(err.to_string().contains("eta_m"), "{err}");
    }

    #[test]
    fn optional_threshold_defaults() {
        let c = parse_config(&drop_key("p_hat_s")).unwrap();
        assert_eq!(c.solver.p_hat_s, 0.8);
    }

    #[test]
    fn rejects_unknown_missing_and_malformed() {
        assert!(parse_config(&format!("{DEFAULT_CONFIG}\nbogus = 1\n")).is_err());
        assert!(parse_config(&drop_key("D_m")).is_err());
        assert!(parse_config(&replace("alpha_s", "four")).is_err());
        assert!(parse_config(&format!("{DEFAULT_CONFIG}\nD_m = 400\n")).is_err());
        assert!(parse_config(&replace("mbs_rings", "1.5")).is_err());
        assert!(parse_config("D_m 500").is_err());
    }
}
