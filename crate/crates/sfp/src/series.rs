//! Truncation intervals and complex Fourier series coefficients of the
//! discounted-free price as a power series in `z = e^{iωy}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};
use crate::models::{Cumulants, Model};
use crate::payoffs::Contract;

pub const SMOOTH_PADDING: f64 = 0.0;
pub const ROUGH_PADDING: f64 = 0.5;
pub const SHORT_MATURITY_PADDING: f64 = 0.1;
pub const SHORT_MATURITY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationInterval {
    pub c: f64,
    pub d: f64,
    pub multiplier: f64,
    pub padding: f64,
    pub cumulants: Cumulants,
}

impl TruncationInterval {
    pub fn width(&self) -> f64 {
        self.d - self.c
    }

    /// Fundamental angular frequency `2π/(d−c)`.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.width()
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.c && y <= self.d
    }

    pub fn z(&self, y: f64) -> C64 {
        C64::from_polar(1.0, self.omega() * y)
    }

    /// Same cumulant metadata on an explicit symmetric range.
    pub fn with_half_width(&self, d: f64) -> Self {
        TruncationInterval { c: -d, d, ..*self }
    }
}

pub fn default_multiplier(model: &Model) -> f64 {
    match model {
        Model::Heston { .. } => 12.0,
        _ => 10.0,
    }
}

/// Padding for a density judged smooth or not, with the short-horizon rule.
pub fn default_padding(smooth: bool, maturity: f64) -> f64 {
    if smooth {
        SMOOTH_PADDING
    } else if maturity < SHORT_MATURITY {
        SHORT_MATURITY_PADDING
    } else {
        ROUGH_PADDING
    }
}

pub fn truncation_interval(
    model: &Model,
    maturity: f64,
    log_moneyness_bound: f64,
    multiplier: f64,
    padding: f64,
) -> Result<TruncationInterval> {
    if !(10.0..=12.0).contains(&multiplier) {
        return Err(SfpError::Domain(format!("interval multiplier must lie in [10, 12], got {multiplier}")));
    }
    if !(padding >= 0.0 && padding.is_finite()) || !log_moneyness_bound.is_finite() {
        return Err(SfpError::Domain("padding and moneyness bound must be finite, padding >= 0".into()));
    }
    let cum = model.cumulants(maturity)?;
    let spread = (cum.c2.abs() + cum.c4.abs().sqrt()).sqrt();
    let d = (cum.c1 + multiplier * spread + log_moneyness_bound.abs()).abs() + padding;
    if !(d.is_finite() && d > 0.0) {
        return Err(SfpError::Domain(format!("degenerate truncation interval half-width {d}")));
    }
    Ok(TruncationInterval { c: -d, d, multiplier, padding, cumulants: cum })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub taylor: Vec<C64>,
    pub interval: TruncationInterval,
    pub terms: usize,
}

/// Density coefficients `b_k` with `f(y) ≈ Re Σ b_k z^k`, `k = 0..=terms`.
pub fn density_coefficients(model: &Model, maturity: f64, iv: &TruncationInterval, terms: usize) -> Vec<C64> {
    let w = iv.omega();
    let scale = 1.0 / iv.width();
    (0..=terms)
        .map(|k| {
            let b = model.cf(C64::new(-w * k as f64, 0.0), maturity) * scale;
            if k == 0 {
                b
            } else {
                2.0 * b
            }
        })
        .collect()
}

/// Series with a caller-supplied spectral weight standing in for `φ(−ω_k)`.
pub fn coefficients_with<F>(contract: &Contract, iv: &TruncationInterval, terms: usize, weight: F) -> Vec<C64>
where
    F: Fn(f64) -> C64,
{
    let w = iv.omega();
    let scale = 1.0 / iv.width();
    (0..=terms)
        .map(|k| {
            let omega = w * k as f64;
            let a = weight(-omega) * contract.transform_at(omega, iv.c, iv.d) * scale;
            if k == 0 {
                a
            } else {
                2.0 * a
            }
        })
        .collect()
}

pub fn cfs_coefficients(
    model: &Model,
    contract: &Contract,
    interval: &TruncationInterval,
    terms: usize,
) -> Result<SeriesCoefficients> {
    if terms < 4 {
        return Err(SfpError::Domain(format!("need at least 4 harmonics, got {terms}")));
    }
    if !(interval.c < 0.0 && interval.d > 0.0) {
        return Err(SfpError::Interval { c: interval.c, d: interval.d });
    }
    model.validate()?;
    contract.validate()?;
    let t = contract.maturity;
    let taylor = coefficients_with(contract, interval, terms, |u| model.cf(C64::new(u, 0.0), t));
    Ok(SeriesCoefficients { taylor, interval: *interval, terms })
}

/// Horner evaluation of `Σ a_k z^k`.
pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Plain truncated Fourier sum, before discounting.
pub fn cfs_partial_sum(coeffs: &SeriesCoefficients, y1: f64) -> f64 {
    horner(&coeffs.taylor, coeffs.interval.z(y1)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::PayoffKind;

    fn bsm1() -> Model {
        Model::Bsm { vol: 0.15, rate: 0.03, dividend: 0.0 }
    }

    #[test]
    fn bsm_half_width_by_hand() {
        let iv = truncation_interval(&bsm1(), 1.0, 0.0, 10.0, 0.0).unwrap();
        assert!((iv.d - 1.51875).abs() < 1e-14);
        assert_eq!(iv.c, -iv.d);
        let padded = truncation_interval(&bsm1(), 1.0, 0.0, 10.0, 0.5).unwrap();
        assert!((padded.d - iv.d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn multiplier_range_enforced() {
        assert!(truncation_interval(&bsm1(), 1.0, 0.0, 9.0, 0.0).is_err());
        assert!(truncation_interval(&bsm1(), 1.0, 0.0, 12.5, 0.0).is_err());
    }

    #[test]
    fn mean_coefficient_for_unit_call() {
        let c = Contract::new(PayoffKind::Call, 1.0, 1.0).unwrap();
        let iv = truncation_interval(&bsm1(), 1.0, 0.0, 10.0, 0.0).unwrap().with_half_width(1.0);
        let s = cfs_coefficients(&bsm1(), &c, &iv, 8).unwrap();
        assert!((s.taylor[0].re - 0.5 * (std::f64::consts::E - 2.0)).abs() < 1e-15);
        assert_eq!(s.taylor[0].im, 0.0);
        assert_eq!(s.taylor.len(), 9);
    }

    #[test]
    fn partial_sum_is_periodic_and_linear() {
        let c = Contract::new(PayoffKind::Put, 100.0, 1.0).unwrap();
        let iv = truncation_interval(&bsm1(), 1.0, 0.0, 10.0, 0.0).unwrap();
        let s = cfs_coefficients(&bsm1(), &c, &iv, 32).unwrap();
        let a = cfs_partial_sum(&s, 0.1);
        let b = cfs_partial_sum(&s, 0.1 + iv.width());
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        let zero = SeriesCoefficients { taylor: vec![C64::new(0.0, 0.0); 5], ..s };
        assert_eq!(cfs_partial_sum(&zero, 0.3), 0.0);
    }

    #[test]
    fn conjugate_frequency_pairing() {
        let m = bsm1();
        let c = Contract::new(PayoffKind::Put, 100.0, 1.0).unwrap();
        let iv = truncation_interval(&m, 1.0, 0.0, 10.0, 0.0).unwrap();
        let w = iv.omega();
        for k in 1..10 {
            let om = w * k as f64;
            let lhs = m.cf(C64::new(-om, 0.0), 1.0) * c.transform_at(om, iv.c, iv.d);
            let rhs = (m.cf(C64::new(om, 0.0), 1.0) * c.transform_at(-om, iv.c, iv.d)).conj();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
