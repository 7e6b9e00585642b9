//! Static deployment parameters, per-class QoS targets and instantaneous load.
//!
//! All quantities are SI: meters, watts, hertz, bit/s, and densities per m².

use crate::error::{check, Result};

/// Hexagon area factor: a regular hexagon of circumradius `D` has area `HEX_AREA * D²`.
pub const HEX_AREA: f64 = 1.5 * 1.732_050_807_568_877_2;

/// Per m² value of a density given per km².
pub fn per_km2(x: f64) -> f64 {
    x / 1e6
}

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Macro cell coverage radius (hexagon circumradius), m.
    pub d: f64,
    /// Small-cell density, per m².
    pub rho_s: f64,
    /// Macro transmit power, W.
    pub p_m: f64,
    /// Small-cell transmit power, W.
    pub p_s: f64,
    /// Macro-layer band, Hz.
    pub w_m: f64,
    /// Small-cell-layer band, Hz.
    pub w_s: f64,
    /// Noise power, W.
    pub sigma2: f64,
    pub alpha_m: f64,
    pub alpha_s: f64,
    /// Hexagonal rings of macro sites around the center site.
    pub mbs_rings: u32,
}

impl NetworkConfig {
    /// Reference deployment: D = 500 m, 25 SCs/km², 10 W / 1 W, 10 MHz per layer,
    /// −104 dBm noise, α_s = 4, α_m = 3.5, 19 macro sites.
    pub fn table1() -> Self {
        NetworkConfig {
            d: 500.0,
            rho_s: per_km2(25.0),
            p_m: 10.0,
            p_s: 1.0,
            w_m: 10e6,
            w_s: 10e6,
            sigma2: dbm_to_watts(-104.0),
            alpha_m: 3.5,
            alpha_s: 4.0,
            mbs_rings: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 7] = [
            ("D", self.d),
            ("rho_s", self.rho_s),
            ("P_m", self.p_m),
            ("P_s", self.p_s),
            ("W_m", self.w_m),
            ("W_s", self.w_s),
            ("sigma2", self.sigma2),
        ];
        for (field, v) in positive {
            check(v.is_finite() && v > 0.0, field, || format!("{v} must be finite and > 0"))?;
        }
        for (field, a) in [("alpha_m", self.alpha_m), ("alpha_s", self.alpha_s)] {
            check(a > 2.0 && a <= 4.0, field, || format!("{a} must lie in (2, 4]"))?;
        }
        Ok(())
    }

    /// Macro-site density `1 / (HEX_AREA · D²)`.
    pub fn rho_m(&self) -> f64 {
        rho_m(self.d)
    }

    pub fn hex_area(&self) -> f64 {
        HEX_AREA * self.d * self.d
    }

    /// Same deployment with a different coverage radius.
    pub fn with_radius(&self, d: f64) -> Self {
        NetworkConfig { d, ..*self }
    }
}

/// Macro-site density for coverage radius `d`.
pub fn rho_m(d: f64) -> f64 {
    1.0 / (HEX_AREA * d * d)
}

/// Rate thresholds and outage caps for the three user classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosSpec {
    pub u_m: f64,
    pub u_s: f64,
    pub u_o: f64,
    pub eta_m: f64,
    pub eta_s: f64,
    pub eta_o: f64,
}

impl QosSpec {
    pub fn table1() -> Self {
        QosSpec {
            u_m: 64e3,
            u_s: 100e3,
            u_o: 100e3,
            eta_m: 0.05,
            eta_s: 0.05,
            eta_o: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, u) in [("U_m", self.u_m), ("U_s", self.u_s), ("U_o", self.u_o)] {
            check(u.is_finite() && u >= 0.0, field, || format!("{u} must be finite and >= 0"))?;
        }
        for (field, eta) in [("eta_m", self.eta_m), ("eta_s", self.eta_s), ("eta_o", self.eta_o)] {
            check(eta > 0.0 && eta < 1.0, field, || format!("{eta} must lie in (0, 1)"))?;
        }
        Ok(())
    }
}

/// User densities of the two service classes, per m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadState {
    pub lambda_m: f64,
    pub lambda_s: f64,
}

impl LoadState {
    pub fn new(lambda_m: f64, lambda_s: f64) -> Self {
        LoadState { lambda_m, lambda_s }
    }

    pub fn per_km2(lambda_m: f64, lambda_s: f64) -> Self {
        LoadState::new(per_km2(lambda_m), per_km2(lambda_s))
    }

    pub fn validate(&self) -> Result<()> {
        check(self.lambda_m >= 0.0 && self.lambda_m.is_finite(), "lambda_m", || {
            format!("{} must be finite and >= 0", self.lambda_m)
        })?;
        check(self.lambda_s >= 0.0 && self.lambda_s.is_finite(), "lambda_s", || {
            format!("{} must be finite and >= 0", self.lambda_s)
        })
    }
}
