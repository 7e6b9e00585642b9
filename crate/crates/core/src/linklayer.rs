//! Per-link SINR, equal-share rate, and the location-averaged inter-cell
//! interference of the macro layer.
//!
//! Path loss is the bare power law `d^-α` with `d` in meters and no reference
//! constant. Rescale the transmit powers to emulate a calibrated model.

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{hex_lattice, Hexagon, Point};

/// Location-averaged inter-cell interference of the macro layer divided by the noise power.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InterferenceFactor(f64);

impl InterferenceFactor {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(InterferenceFactor(value))
        } else {
            Err(Error::InvalidParameter {
                field: "I",
                reason: format!("{value} must be finite and >= 0"),
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// SINR of a user served by `cells[serving]`, all `cells` transmitting at `power`.
///
/// `fading[j]` is the power gain of the link to `cells[j]`.
pub fn sinr(
    ue: Point,
    serving: usize,
    cells: &[Point],
    power: f64,
    alpha: f64,
    sigma2: f64,
    fading: &[f64],
) -> Result<f64> {
    if serving >= cells.len() || fading.len() != cells.len() {
        return Err(Error::InvalidParameter {
            field: "serving",
            reason: format!(
                "serving index {serving} with {} cells and {} fading draws",
                cells.len(),
                fading.len()
            ),
        });
    }
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (j, (&c, &h)) in cells.iter().zip(fading).enumerate() {
        let d2 = ue.dist2(c);
        if d2 == 0.0 {
            return Err(Error::SingularPathLoss);
        }
        let rx = power * path_gain(d2, alpha) * h;
        if j == serving {
            signal = rx;
        } else {
            interference += rx;
        }
    }
    Ok(signal / (interference + sigma2))
}

/// Power-law gain `d^-α` from the squared distance.
#[inline]
pub fn path_gain(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

/// Equal-share achievable rate `w / (sharers + 1) · log2(1 + sinr)`, bit/s.
pub fn rate(w: f64, sharers: u64, sinr: f64) -> f64 {
    w / (sharers as f64 + 1.0) * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Interference factor of the macro layer at its own exponent `α_m`.
pub fn interference_factor(cfg: &NetworkConfig) -> InterferenceFactor {
    interference_factor_at(cfg, cfg.alpha_m)
}

/// Mean over user positions uniform in the center hexagon of
/// `Σ_{j≠0} P_m d_j^-α`, divided by the noise power.
///
/// Midpoint (centroid) rule on a regular triangulation of the hexagon, refined
/// until successive levels agree to 1e-5 relative.
pub fn interference_factor_at(cfg: &NetworkConfig, alpha: f64) -> InterferenceFactor {
    let sites = hex_lattice(cfg.d, cfg.mbs_rings);
    let interferers = &sites[1..];
    if interferers.is_empty() {
        return InterferenceFactor(0.0);
    }
    let cell = Hexagon::new(Point::ORIGIN, cfg.d);
    let field = |p: Point| -> f64 {
        interferers
            .iter()
            .map(|&s| cfg.p_m * p.dist2(s).powf(-0.5 * alpha))
            .sum::<f64>()
    };
    let mut n = 8;
    let mut prev = hexagon_mean(&cell, n, &field);
    loop {
        n *= 2;
        let next = hexagon_mean(&cell, n, &field);
        if (next - prev).abs() <= 1e-5 * next.abs() || n >= 1024 {
            return InterferenceFactor(next / cfg.sigma2);
        }
        prev = next;
    }
}

/// Mean of `f` over `hex` with each of its six triangles split into `n²` congruent pieces.
pub fn hexagon_mean(hex: &Hexagon, n: usize, f: &impl Fn(Point) -> f64) -> f64 {
    let c = hex.center;
    let inv = 1.0 / n as f64;
    let mut total = 0.0;
    for k in 0..6 {
        let a = hex.vertex(k);
        let b = hex.vertex((k + 1) % 6);
        let (ax, ay) = (a.x - c.x, a.y - c.y);
        let (bx, by) = (b.x - c.x, b.y - c.y);
        let at = |u: f64, v: f64| Point::new(c.x + u * ax + v * bx, c.y + u * ay + v * by);
        for i in 0..n {
            for j in 0..(n - i) {
                let (fi, fj) = (i as f64, j as f64);
                total += f(at((fi + 1.0 / 3.0) * inv, (fj + 1.0 / 3.0) * inv));
                if i + j + 1 < n {
                    total += f(at((fi + 2.0 / 3.0) * inv, (fj + 2.0 / 3.0) * inv));
                }
            }
        }
    }
    total / (6 * n * n) as f64
}
