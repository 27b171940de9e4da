//! Location of density discontinuities from a balanced Fourier-Padé
//! approximant of the density derivative.
//!
//! Peaks are measured against the largest slope a Gaussian with the
//! density's own spread (but no narrower than the grid resolution `(d−c)/U`)
//! can have, `1/(h²√(2πe))`. Smooth densities stay at a few units on this
//! scale while jumps and cusps produce spikes of order `10³` and above.
//! Spikes within a few resolved spreads of each other are reported as one
//! feature at their magnitude-weighted centre.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SfpError};
use crate::models::Model;
use crate::series::{density_coefficients, TruncationInterval};
use crate::sfp_core::{fourier_pade, PadeForm};

pub const DEFAULT_SPIKE_FACTOR: f64 = 50.0;
pub const GRID_POINTS: usize = 2048;
const GOLDEN_STEPS: usize = 80;
/// Only the largest grid maxima are refined.
const REFINED_MAXIMA: usize = 16;
/// Spikes closer than this many resolved spreads (plus a grid cell) belong
/// to one feature; a narrow bump shows two slope lobes.
const CLUSTER_SPREADS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub locations: Vec<f64>,
    pub spike_magnitudes: Vec<f64>,
    pub smooth: bool,
    /// Largest refined peak on the relative scale, spike or not.
    pub peak: f64,
    pub grid_step: f64,
}

/// Detection approximant plus the envelope used to normalise it.
pub struct SlopeProfile {
    form: PadeForm,
    interval: TruncationInterval,
    /// Resolved spread `h`: density standard deviation floored by `(d−c)/U`.
    scale: f64,
    envelope: f64,
}

impl SlopeProfile {
    pub fn new(model: &Model, maturity: f64, interval: &TruncationInterval, terms: usize) -> Result<Self> {
        let w = interval.omega();
        let slope: Vec<C64> = density_coefficients(model, maturity, interval, terms)
            .into_iter()
            .enumerate()
            .map(|(k, b)| C64::new(0.0, w * k as f64) * b)
            .collect();
        let half = (terms - 1) / 2;
        let form = fourier_pade(&slope, half, half)?;
        let h = interval.cumulants.c2.abs().sqrt().max(interval.width() / terms as f64);
        let envelope = 1.0 / (h * h * (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt());
        Ok(SlopeProfile { form, interval: *interval, scale: h, envelope })
    }

    /// `|f'(y)|` in units of the Gaussian slope envelope.
    pub fn relative(&self, y: f64) -> f64 {
        self.form.eval_z(self.interval.z(y)).value.abs() / self.envelope
    }

    fn refine(&self, lo: f64, hi: f64) -> (f64, f64) {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..GOLDEN_STEPS {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if self.relative(a) > self.relative(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let y = 0.5 * (lo + hi);
        (y, self.relative(y))
    }
}

pub fn grid(interval: &TruncationInterval, points: usize) -> Vec<f64> {
    let step = interval.width() / (points - 1) as f64;
    (0..points).map(|i| interval.c + step * i as f64).collect()
}

pub fn detect_jumps(
    model: &Model,
    maturity: f64,
    interval: &TruncationInterval,
    terms: usize,
    spike_factor: f64,
) -> Result<JumpReport> {
    if terms < 16 {
        return Err(SfpError::Domain(format!("jump detection needs U >= 16, got {terms}")));
    }
    if !(spike_factor > 1.0) {
        return Err(SfpError::Domain(format!("spike factor must exceed 1, got {spike_factor}")));
    }
    model.validate()?;
    let profile = SlopeProfile::new(model, maturity, interval, terms)?;
    let ys = grid(interval, GRID_POINTS);
    let step = ys[1] - ys[0];
    let vals: Vec<f64> = ys.iter().map(|&y| profile.relative(y)).collect();
    let mut maxima: Vec<usize> = (1..GRID_POINTS - 1)
        .filter(|&i| vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1])
        .collect();
    maxima.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    maxima.truncate(REFINED_MAXIMA);
    let mut peak = 0.0f64;
    let mut spikes: Vec<(f64, f64)> = Vec::new();
    for i in maxima {
        // A feature narrower than a cell can straddle a grid point, so each
        // neighbouring cell is searched on its own.
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(GRID_POINTS - 1);
        for j in lo..hi {
            let (y, mag) = profile.refine(ys[j], ys[j + 1]);
            peak = peak.max(mag);
            let interior = y - interval.c > 2.0 * step && interval.d - y > 2.0 * step;
            if mag > spike_factor && interior {
                spikes.push((y, mag));
            }
        }
    }
    spikes.sort_by(|a, b| a.0.total_cmp(&b.0));
    spikes.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-6 * step);
    let reach = CLUSTER_SPREADS * profile.scale + step;
    let mut clusters: Vec<Vec<(f64, f64)>> = Vec::new();
    for s in spikes {
        match clusters.last_mut() {
            Some(cl) if s.0 - cl.last().unwrap().0 <= reach => cl.push(s),
            _ => clusters.push(vec![s]),
        }
    }
    let located: Vec<(f64, f64)> = clusters
        .iter()
        .map(|cl| {
            let w: f64 = cl.iter().map(|s| s.1).sum();
            let y = cl.iter().map(|s| s.0 * s.1).sum::<f64>() / w;
            (y, cl.iter().map(|s| s.1).fold(0.0, f64::max))
        })
        .collect();
    Ok(JumpReport {
        smooth: located.is_empty(),
        locations: located.iter().map(|s| s.0).collect(),
        spike_magnitudes: located.iter().map(|s| s.1).collect(),
        peak,
        grid_step: step,
    })
}
