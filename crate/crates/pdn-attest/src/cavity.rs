//! Rectangular-cavity resonance estimation for sweep-band selection.
//!
//! The power/ground plane pair of a board or package forms a cavity whose
//! resonant frequencies mark the most perturbation-sensitive measurement
//! bands. `f_r` for mode (m, n, p) of an a x b x d cavity filled with a
//! material of permeability mu and permittivity epsilon:
//!
//! ```text
//! f_r = 1 / (2 pi sqrt(mu eps)) * sqrt((m pi / a)^2 + (n pi / b)^2 + (p pi / d)^2)
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Highest resonance considered usable when suggesting sweep bands.
pub const DEFAULT_RESONANCE_CAP_HZ: f64 = 100e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    /// Cross-section dimensions, meters.
    pub a: f64,
    pub b: f64,
    /// Cavity length, meters.
    pub d: f64,
    /// Permeability of the fill material, H/m.
    pub mu: f64,
    /// Permittivity of the fill material, F/m.
    pub epsilon: f64,
}

impl CavityGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("d", self.d),
            ("mu", self.mu),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Resonant frequency of mode (m, n, p). Zero when all indices are zero.
    pub fn mode_frequency(&self, m: u32, n: u32, p: u32) -> f64 {
        let term = |k: u32, dim: f64| {
            let x = k as f64 * PI / dim;
            x * x
        };
        let root = (term(m, self.a) + term(n, self.b) + term(p, self.d)).sqrt();
        root / (2.0 * PI * (self.mu * self.epsilon).sqrt())
    }
}

/// All mode triples with components `<= max_mode`, sorted ascending by
/// resonant frequency (ties in lexicographic (m, n, p) order).
pub fn cavity_resonances(geom: &CavityGeometry, max_mode: u32) -> Result<Vec<((u32, u32, u32), f64)>> {
    geom.validate()?;
    let mut out = Vec::with_capacity(((max_mode + 1).pow(3)) as usize);
    for m in 0..=max_mode {
        for n in 0..=max_mode {
            for p in 0..=max_mode {
                out.push(((m, n, p), geom.mode_frequency(m, n, p)));
            }
        }
    }
    out.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap().then(x.0.cmp(&y.0)));
    Ok(out)
}

/// Suggest `count` sweep frequencies clustered around the lowest distinct
/// nonzero cavity resonances.
///
/// The `ceil(count / 3)` lowest distinct resonances below `cap_hz` act as
/// windows; points are dealt round-robin across windows and each window's
/// share is log-spaced over [0.9, 1.1] x f_r (the window center when it
/// receives a single point). The result is sorted ascending.
pub fn suggest_sweep_band_with_cap(
    geom: &CavityGeometry,
    count: usize,
    cap_hz: f64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("count", "must be >= 1"));
    }
    let resonances = cavity_resonances(geom, 3)?;
    let mut distinct: Vec<f64> = Vec::new();
    for (_, f) in resonances {
        if f > 0.0 && f <= cap_hz {
            let is_new = distinct
                .last()
                .map_or(true, |&prev| (f - prev).abs() > 1e-9 * f);
            if is_new {
                distinct.push(f);
            }
        }
    }
    if distinct.is_empty() {
        return Err(Error::invalid(
            "geometry",
            format!("no nonzero cavity resonance below {cap_hz} Hz"),
        ));
    }

    let windows = distinct.len().min(count.div_ceil(3));
    let mut band = Vec::with_capacity(count);
    for (j, &center) in distinct.iter().take(windows).enumerate() {
        // Round-robin share of window j.
        let share = (count - j).div_ceil(windows);
        if share == 1 {
            band.push(center);
        } else {
            let (lo, hi) = ((0.9 * center).ln(), (1.1 * center).ln());
            for q in 0..share {
                band.push((lo + (hi - lo) * q as f64 / (share - 1) as f64).exp());
            }
        }
    }
    band.sort_by(|x, y| x.partial_cmp(y).unwrap());
    band.truncate(count);
    debug_assert!(band.windows(2).all(|w| w[1] > w[0]));
    Ok(band)
}

/// [`suggest_sweep_band_with_cap`] with the default resonance cap.
pub fn suggest_sweep_band(geom: &CavityGeometry, count: usize) -> Result<Vec<f64>> {
    suggest_sweep_band_with_cap(geom, count, DEFAULT_RESONANCE_CAP_HZ)
}
