//! Sleeping policies and the resulting band split.

use crate::config::NetworkConfig;
use crate::error::{check, Error, Result};

/// Which small cells sleep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    None,
    /// Every SC sleeps independently with probability `p_s`.
    Random { p_s: f64 },
    /// SCs closer than `r_s` meters to their nearest macro site sleep.
    Repulsive { r_s: f64 },
}

impl Scheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Scheme::None => Ok(()),
            Scheme::Random { p_s } => check((0.0..=1.0).contains(&p_s), "p_s", || {
                format!("{p_s} must lie in [0, 1]")
            }),
            Scheme::Repulsive { r_s } => check(r_s >= 0.0 && !r_s.is_nan(), "R_s", || {
                format!("{r_s} must be >= 0")
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::Random { .. } => "random",
            Scheme::Repulsive { .. } => "repulsive",
        }
    }
}

/// Scheme plus channel borrowing (CB) and the share `p_m` of offloaded users
/// kept on the macro band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleepPolicy {
    pub scheme: Scheme,
    pub cb: bool,
    pub p_m: f64,
}

impl SleepPolicy {
    pub fn new(scheme: Scheme, cb: bool, p_m: f64) -> Result<Self> {
        let policy = SleepPolicy { scheme, cb, p_m };
        policy.validate()?;
        Ok(policy)
    }

    /// Policy without channel borrowing (`p_m = 1`).
    pub fn without_cb(scheme: Scheme) -> Self {
        SleepPolicy {
            scheme,
            cb: false,
            p_m: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        check(self.p_m > 0.0 && self.p_m <= 1.0, "p_m", || {
            format!("{} must lie in (0, 1]", self.p_m)
        })?;
        check(self.cb || self.p_m == 1.0, "p_m", || {
            format!("{} must be 1 without channel borrowing", self.p_m)
        })
    }
}

/// Bandwidth used by macro users, small-cell users and offloaded users.
///
/// Offloaded users get `W_m − w_m` on the macro band and, with CB, also
/// `W_s − w_s` borrowed from the small-cell layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandAllocation {
    pub w_m: f64,
    pub w_s: f64,
    pub w_o: f64,
    /// Part of `w_o` on the macro band.
    pub o_mbs: f64,
    /// Part of `w_o` borrowed from the small-cell band (0 without CB).
    pub o_sc: f64,
}

impl BandAllocation {
    pub fn new(cfg: &NetworkConfig, w_m: f64, w_s: f64, cb: bool) -> Result<Self> {
        check(w_m >= 0.0, "w_m", || format!("{w_m} must be >= 0"))?;
        check(w_s >= 0.0, "w_s", || format!("{w_s} must be >= 0"))?;
        if w_m > cfg.w_m {
            return Err(Error::NegativeBand {
                which: "macro",
                total: cfg.w_m,
                used: w_m,
            });
        }
        if w_s > cfg.w_s {
            return Err(Error::NegativeBand {
                which: "small-cell",
                total: cfg.w_s,
                used: w_s,
            });
        }
        let o_mbs = cfg.w_m - w_m;
        let o_sc = if cb { cfg.w_s - w_s } else { 0.0 };
        Ok(BandAllocation {
            w_m,
            w_s,
            w_o: o_mbs + o_sc,
            o_mbs,
            o_sc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_invariants() {
        assert!(SleepPolicy::new(Scheme::Random { p_s: 0.3 }, false, 1.0).is_ok());
        assert!(SleepPolicy::new(Scheme::Random { p_s: 0.3 }, false, 0.5).is_err());
        assert!(SleepPolicy::new(Scheme::Random { p_s: 1.3 }, true, 0.5).is_err());
        assert!(SleepPolicy::new(Scheme::Repulsive { r_s: -1.0 }, true, 0.5).is_err());
        assert!(SleepPolicy::new(Scheme::None, true, 0.0).is_err());
        assert!(SleepPolicy::new(Scheme::None, true, 0.25).is_ok());
    }

    #[test]
    fn offloaded_band() {
        let cfg = NetworkConfig::table1();
        let b = BandAllocation::new(&cfg, 4e6, 7e6, false).unwrap();
        assert_eq!(b.w_o, 6e6);
        let b = BandAllocation::new(&cfg, 4e6, 7e6, true).unwrap();
        assert_eq!(b.w_o, 9e6);
        assert!(matches!(
            BandAllocation::new(&cfg, 11e6, 7e6, true),
            Err(Error::NegativeBand { .. })
        ));
    }
}
