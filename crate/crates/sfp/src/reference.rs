//! Independent baselines: closed-form Black-Scholes, the Fourier-cosine
//! (COS) expansion, and error norms over a grid.

use libm::erfc;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SfpError};
use crate::models::Model;
use crate::payoffs::{exp_integral, Contract, PayoffKind, Side};

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmKind {
    Call,
    Put,
    CashCall,
    CashPut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
}

pub fn bsm_analytic(s0: f64, k: f64, r: f64, q: f64, sigma: f64, t: f64, kind: BsmKind) -> Analytic {
    let sd = sigma * t.sqrt();
    let d1 = ((s0 / k).ln() + (r - q + 0.5 * sigma * sigma) * t) / sd;
    let d2 = d1 - sd;
    let (dq, dr) = ((-q * t).exp(), (-r * t).exp());
    match kind {
        BsmKind::Call => Analytic {
            price: s0 * dq * norm_cdf(d1) - k * dr * norm_cdf(d2),
            delta: dq * norm_cdf(d1),
            gamma: dq * norm_pdf(d1) / (s0 * sd),
        },
        BsmKind::Put => Analytic {
            price: k * dr * norm_cdf(-d2) - s0 * dq * norm_cdf(-d1),
            delta: -dq * norm_cdf(-d1),
            gamma: dq * norm_pdf(d1) / (s0 * sd),
        },
        BsmKind::CashCall => Analytic {
            price: dr * norm_cdf(d2),
            delta: dr * norm_pdf(d2) / (s0 * sd),
            gamma: -dr * norm_pdf(d2) * d1 / (s0 * s0 * sd * sd),
        },
        BsmKind::CashPut => Analytic {
            price: dr * norm_cdf(-d2),
            delta: -dr * norm_pdf(d2) / (s0 * sd),
            gamma: dr * norm_pdf(d2) * d1 / (s0 * s0 * sd * sd),
        },
    }
}

/// Fourier-cosine price of any supported payoff on `[a, b]` with `n` terms.
pub fn cos_price(model: &Model, contract: &Contract, s0: f64, a: f64, b: f64, n: usize) -> Result<f64> {
    if n < 8 {
        return Err(SfpError::Domain(format!("COS needs at least 8 terms, got {n}")));
    }
    if !(a < b) {
        return Err(SfpError::Interval { c: a, d: b });
    }
    model.validate()?;
    contract.validate()?;
    let t = contract.maturity;
    let y1 = (contract.strike / s0).ln();
    let pieces = contract.pieces();
    let scale = std::f64::consts::PI / (b - a);
    let mut total = 0.0;
    for k in 0..n {
        let u = scale * k as f64;
        let shift = C64::from_polar(1.0, -u * a);
        let mut vk = 0.0;
        for pc in &pieces {
            let (lo, hi) = match pc.side {
                Side::Below => (a, y1.min(b)),
                Side::Above => (y1.max(a), b),
            };
            if hi <= lo {
                continue;
            }
            vk += (pc.weight * (-pc.exponent * y1).exp() * shift * exp_integral(pc.exponent, lo, hi, u)).re;
        }
        vk *= 2.0 / (b - a);
        let term = (model.cf(C64::new(u, 0.0), t) * shift).re * vk;
        total += if k == 0 { 0.5 * term } else { term };
    }
    Ok((-model.rate() * t).exp() * total)
}

/// Term count of the high-resolution COS baseline.
pub const COS_REFERENCE_TERMS: usize = 1 << 14;

/// Widening applied to the cumulant interval for the COS baseline.
pub const COS_REFERENCE_WIDENING: f64 = 2.0;

/// High-resolution COS price on a doubled cumulant interval. Vanilla calls go
/// through the put and parity, since the call payoff grows like `e^y` on a
/// wide range and cancels badly.
pub fn cos_reference(model: &Model, contract: &Contract, s0: f64) -> Result<f64> {
    let t = contract.maturity;
    let bound = (s0 / contract.strike).ln().abs();
    let iv = crate::series::truncation_interval(model, t, bound, crate::series::default_multiplier(model), 0.0)?;
    let (a, b) = (COS_REFERENCE_WIDENING * iv.c, COS_REFERENCE_WIDENING * iv.d);
    if contract.kind == PayoffKind::Call {
        let put = Contract { kind: PayoffKind::Put, ..*contract };
        let fwd = s0 * (-model.dividend() * t).exp() - contract.strike * (-model.rate() * t).exp();
        Ok(cos_price(model, &put, s0, a, b, COS_REFERENCE_TERMS)? + fwd)
    } else {
        cos_price(model, contract, s0, a, b, COS_REFERENCE_TERMS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub grid: f64,
    pub approx: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub r_inf: f64,
    pub r_2: f64,
    pub per_point: Vec<PointError>,
    pub wall_time_seconds: f64,
}

pub fn error_report(approx: &[f64], reference: &[f64], grid: &[f64], elapsed: f64) -> Result<ErrorReport> {
    if approx.len() != reference.len() {
        return Err(SfpError::Length(approx.len(), reference.len()));
    }
    if approx.len() != grid.len() {
        return Err(SfpError::Length(approx.len(), grid.len()));
    }
    if approx.is_empty() {
        return Err(SfpError::Length(0, 1));
    }
    let per_point: Vec<PointError> = approx
        .iter()
        .zip(reference)
        .zip(grid)
        .map(|((&a, &r), &g)| PointError { grid: g, approx: a, reference: r, abs_error: (a - r).abs() })
        .collect();
    let r_inf = per_point.iter().map(|p| p.abs_error).fold(0.0, f64::max);
    let r_2 = per_point.iter().map(|p| p.abs_error * p.abs_error).sum::<f64>().sqrt();
    Ok(ErrorReport { r_inf, r_2, per_point, wall_time_seconds: elapsed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_maturity_reference_values() {
        let c = bsm_analytic(100.0, 120.0, 0.1, 0.0, 0.25, 50.0, BsmKind::Call);
        assert!((c.price - 99.2025928525532).abs() < 1e-12);
        let c = bsm_analytic(100.0, 120.0, 0.1, 0.0, 0.25, 100.0, BsmKind::Call);
        assert!((c.price - 99.9945609694213).abs() < 1e-12);
        let c = bsm_analytic(95.0, 100.0, 0.06, 0.0, 0.2, 1e-6, BsmKind::Call);
        assert_eq!(c.price, 0.0);
        let c = bsm_analytic(99.999, 100.0, 0.06, 0.0, 0.2, 1e-6, BsmKind::Call);
        assert!((c.price - 0.007491657716010).abs() < 1e-13);
    }

    #[test]
    fn parity_and_greeks_by_differences() {
        let (s, k, r, q, v, t) = (103.0, 97.0, 0.04, 0.01, 0.3, 0.8);
        let c = bsm_analytic(s, k, r, q, v, t, BsmKind::Call);
        let p = bsm_analytic(s, k, r, q, v, t, BsmKind::Put);
        assert!((c.price - p.price - (s * (-q * t).exp() - k * (-r * t).exp())).abs() < 1e-12);
        for kind in [BsmKind::Call, BsmKind::Put, BsmKind::CashCall, BsmKind::CashPut] {
            let h = 1e-3;
            let f = |x: f64| bsm_analytic(x, k, r, q, v, t, kind).price;
            let a = bsm_analytic(s, k, r, q, v, t, kind);
            assert!((a.delta - (f(s + h) - f(s - h)) / (2.0 * h)).abs() < 1e-8);
            assert!((a.gamma - (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn cos_reproduces_black_scholes() {
        let m = Model::Bsm { vol: 0.15, rate: 0.03, dividend: 0.0 };
        for (kind, bk) in [
            (PayoffKind::Put, BsmKind::Put),
            (PayoffKind::Call, BsmKind::Call),
            (PayoffKind::CashOrNothingPut, BsmKind::CashPut),
        ] {
            for k in [80.0, 100.0, 120.0] {
                let c = Contract::new(kind, k, 1.0).unwrap();
                let v = cos_price(&m, &c, 100.0, -1.8, 1.8, 128).unwrap();
                let refv = bsm_analytic(100.0, k, 0.03, 0.0, 0.15, 1.0, bk).price;
                assert!((v - refv).abs() < 1e-11, "{kind:?} {k}: {v} vs {refv}");
            }
        }
    }

    #[test]
    fn cos_reference_call_via_put() {
        let m = Model::Bsm { vol: 0.25, rate: 0.1, dividend: 0.0 };
        let c = Contract::new(PayoffKind::Call, 120.0, 50.0).unwrap();
        let v = cos_reference(&m, &c, 100.0).unwrap();
        assert!((v - 99.2025928525532).abs() < 1e-10, "{v}");
    }

    #[test]
    fn report_norms() {
        let r = error_report(&[1.0, 2.0], &[1.0, 2.0], &[0.0, 1.0], 0.0).unwrap();
        assert_eq!((r.r_inf, r.r_2), (0.0, 0.0));
        let r = error_report(&[1.5], &[1.0], &[0.0], 0.0).unwrap();
        assert_eq!((r.r_inf, r.r_2), (0.5, 0.5));
        let r = error_report(&[3.0, -4.0], &[0.0, 0.0], &[0.0, 1.0], 0.0).unwrap();
        assert_eq!((r.r_inf, r.r_2), (4.0, 5.0));
        assert!(error_report(&[1.0], &[1.0, 2.0], &[0.0], 0.0).is_err());
    }
}
