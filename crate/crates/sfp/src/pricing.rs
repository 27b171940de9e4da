//! End-to-end pricing: interval, optional jump detection, series, SFP
//! solve, evaluation at `y = log(K/S_0)` and discounting.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};
use crate::jumps::{detect_jumps, DEFAULT_SPIKE_FACTOR};
use crate::models::Model;
use crate::payoffs::{Contract, PayoffKind};
use crate::series::{
    coefficients_with, density_coefficients, default_multiplier, default_padding, truncation_interval, SeriesCoefficients,
    TruncationInterval,
};
use crate::sfp_core::{allocate_degrees, solve_sfp, solve_sfp_reduced, DegreePlan, Diagnostics, SfpApproximant};

/// Smallest budget used for jump detection when pricing with fewer terms.
pub const MIN_DETECTION_TERMS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpMode {
    /// Run the detector and add every interior spike it reports.
    Auto,
    /// Only the interval endpoints, mapped to `z = −1`.
    EndpointsOnly,
    /// Caller-supplied interior jump locations in log-return units.
    Explicit(Vec<f64>),
    /// Use the model's closed-form singular point, if it has one.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallRoute {
    Parity,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMode {
    /// Interval sized for each grid point's own moneyness, one solve each.
    PerPoint,
    /// One interval covering the whole grid and a single solve.
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceRequest {
    pub model: Model,
    pub contract: Contract,
    pub spot: f64,
    pub terms: usize,
    pub multiplier: Option<f64>,
    pub padding: Option<f64>,
    /// Overrides the cumulant rule with `[−d, d]`.
    pub half_width: Option<f64>,
    pub jumps: JumpMode,
    pub call_route: CallRoute,
    pub interval_mode: IntervalMode,
    pub spike_factor: f64,
    /// Drop redundant unknowns when the constraint matrix is rank deficient.
    pub reduce_rank: bool,
}

impl PriceRequest {
    pub fn new(model: Model, contract: Contract, spot: f64, terms: usize) -> Self {
        PriceRequest {
            model,
            contract,
            spot,
            terms,
            multiplier: None,
            padding: None,
            half_width: None,
            jumps: JumpMode::Auto,
            call_route: CallRoute::Parity,
            interval_mode: IntervalMode::PerPoint,
            spike_factor: DEFAULT_SPIKE_FACTOR,
            reduce_rank: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.contract.validate()?;
        if !(self.spot > 0.0 && self.spot.is_finite()) {
            return Err(SfpError::Domain(format!("spot must be > 0, got {}", self.spot)));
        }
        if self.terms < 8 {
            return Err(SfpError::Domain(format!("term budget must be >= 8, got {}", self.terms)));
        }
        Ok(())
    }

    fn maturity(&self) -> f64 {
        self.contract.maturity
    }

    fn routed_through_put(&self) -> bool {
        self.contract.kind == PayoffKind::Call && self.call_route == CallRoute::Parity
    }

    /// Contract actually expanded, after call routing.
    fn solved_contract(&self) -> Contract {
        if self.routed_through_put() {
            Contract { kind: PayoffKind::Put, ..self.contract }
        } else {
            self.contract
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Greeks {
    pub delta: f64,
    pub gamma: f64,
    pub vega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub value: f64,
    pub greeks: Option<Greeks>,
    pub diagnostics: Diagnostics,
    pub near_pole: bool,
    pub terms_used: usize,
    pub interval: TruncationInterval,
    pub jump_locations: Vec<f64>,
}

/// Interval, jump points and degree plan shared by all series of a request.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub interval: TruncationInterval,
    pub jump_locations: Vec<f64>,
    pub jump_points: Vec<C64>,
    pub plan: DegreePlan,
    pub reduce_rank: bool,
}

/// Detector run on the unpadded (or caller-padded) probe interval.
fn detect_for(req: &PriceRequest, log_moneyness_bound: f64) -> Result<Vec<f64>> {
    let t = req.maturity();
    let multiplier = req.multiplier.unwrap_or_else(|| default_multiplier(&req.model));
    let probe = truncation_interval(&req.model, t, log_moneyness_bound, multiplier, req.padding.unwrap_or(0.0))?;
    let probe = match req.half_width {
        Some(d) => probe.with_half_width(d),
        None => probe,
    };
    Ok(detect_jumps(&req.model, t, &probe, req.terms.max(MIN_DETECTION_TERMS), req.spike_factor)?.locations)
}

pub fn prepare(req: &PriceRequest, log_moneyness_bound: f64) -> Result<Setup> {
    let t = req.maturity();
    let multiplier = req.multiplier.unwrap_or_else(|| default_multiplier(&req.model));
    let zetas = match &req.jumps {
        JumpMode::EndpointsOnly => vec![],
        JumpMode::Explicit(z) => z.clone(),
        JumpMode::Model => req.model.singular_point(t).into_iter().collect(),
        JumpMode::Auto => detect_for(req, log_moneyness_bound)?,
    };
    let smooth = zetas.is_empty();
    let padding = req.padding.unwrap_or_else(|| default_padding(smooth, t));
    let mut interval = truncation_interval(&req.model, t, log_moneyness_bound, multiplier, padding)?;
    if let Some(d) = req.half_width {
        if !(d > 0.0 && d.is_finite()) {
            return Err(SfpError::Interval { c: -d, d });
        }
        interval = interval.with_half_width(d);
    }
    if let Some(z) = zetas.iter().find(|z| !interval.contains(**z)) {
        return Err(SfpError::Domain(format!("jump location {z} lies outside the truncation interval")));
    }
    let mut jump_points = vec![C64::new(-1.0, 0.0)];
    for &z in &zetas {
        let e = interval.z(z);
        if jump_points.iter().all(|p| (p - e).norm() > 1e-12) {
            jump_points.push(e);
        }
    }
    let plan = allocate_degrees(req.terms, jump_points.len())?;
    Ok(Setup { interval, jump_locations: zetas, jump_points, plan, reduce_rank: req.reduce_rank })
}

fn solve(setup: &Setup, taylor: Vec<C64>) -> Result<SfpApproximant> {
    let series = SeriesCoefficients { taylor, interval: setup.interval, terms: setup.plan.terms };
    if setup.reduce_rank {
        solve_sfp_reduced(&series, &setup.jump_points, &setup.plan)
    } else {
        solve_sfp(&series, &setup.jump_points, &setup.plan)
    }
}

fn log_moneyness(contract: &Contract, spot: f64, iv: &TruncationInterval) -> Result<f64> {
    let y = (contract.strike / spot).ln();
    if iv.contains(y) {
        Ok(y)
    } else {
        Err(SfpError::OutsideInterval { y, c: iv.c, d: iv.d })
    }
}

fn parity_shift(req: &PriceRequest, spot: f64, strike: f64) -> f64 {
    if req.routed_through_put() {
        let t = req.maturity();
        spot * (-req.model.dividend() * t).exp() - strike * (-req.model.rate() * t).exp()
    } else {
        0.0
    }
}

/// Series of a single request (strike already inside the transform).
fn price_series(req: &PriceRequest, setup: &Setup) -> Vec<C64> {
    let t = req.maturity();
    let model = req.model;
    coefficients_with(&req.solved_contract(), &setup.interval, req.terms, |u| model.cf(C64::new(u, 0.0), t))
}

fn differentiate(taylor: &[C64], omega: f64, second: bool) -> Vec<C64> {
    taylor
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let ik = C64::new(0.0, omega * k as f64);
            if second {
                a * ik * (ik + 1.0)
            } else {
                -a * ik
            }
        })
        .collect()
}

pub fn price(req: &PriceRequest) -> Result<PriceResult> {
    req.validate()?;
    let bound = (req.spot / req.contract.strike).ln().abs();
    let setup = prepare(req, bound)?;
    let y = log_moneyness(&req.contract, req.spot, &setup.interval)?;
    let approx = solve(&setup, price_series(req, &setup))?;
    let ev = approx.evaluate_checked(y);
    let disc = (-req.model.rate() * req.maturity()).exp();
    let value = disc * ev.value + parity_shift(req, req.spot, req.contract.strike);
    Ok(PriceResult {
        value,
        greeks: None,
        diagnostics: approx.diagnostics(),
        near_pole: ev.near_pole,
        terms_used: req.terms,
        interval: setup.interval,
        jump_locations: setup.jump_locations,
    })
}

fn greek_values(req: &PriceRequest, setup: &Setup, which: [bool; 3]) -> Result<[Option<f64>; 3]> {
    let t = req.maturity();
    let disc = (-req.model.rate() * t).exp();
    let y = log_moneyness(&req.contract, req.spot, &setup.interval)?;
    let base = price_series(req, setup);
    let w = setup.interval.omega();
    let s = req.spot;
    let mut out = [None; 3];
    if which[0] {
        let a = solve(setup, differentiate(&base, w, false))?;
        let carry = if req.routed_through_put() { (-req.model.dividend() * t).exp() } else { 0.0 };
        out[0] = Some(disc * a.evaluate(y) / s + carry);
    }
    if which[1] {
        let a = solve(setup, differentiate(&base, w, true))?;
        out[1] = Some(disc * a.evaluate(y) / (s * s));
    }
    if which[2] {
        let model = req.model;
        model.cf_dv0(C64::new(0.0, 0.0), t)?;
        let taylor = coefficients_with(&req.solved_contract(), &setup.interval, req.terms, |u| {
            model.cf_dv0(C64::new(u, 0.0), t).unwrap_or_default()
        });
        out[2] = Some(disc * solve(setup, taylor)?.evaluate(y));
    }
    Ok(out)
}

fn single_greek(req: &PriceRequest, idx: usize) -> Result<f64> {
    req.validate()?;
    let setup = prepare(req, (req.spot / req.contract.strike).ln().abs())?;
    let mut which = [false; 3];
    which[idx] = true;
    Ok(greek_values(req, &setup, which)?[idx].expect("requested greek"))
}

pub fn delta(req: &PriceRequest) -> Result<f64> {
    single_greek(req, 0)
}

pub fn gamma(req: &PriceRequest) -> Result<f64> {
    single_greek(req, 1)
}

/// Sensitivity to the initial variance of a stochastic-variance model.
pub fn vega(req: &PriceRequest) -> Result<f64> {
    single_greek(req, 2)
}

/// Price plus delta and gamma, and vega where the model supports it.
pub fn price_with_greeks(req: &PriceRequest) -> Result<PriceResult> {
    let mut res = price(req)?;
    let setup = prepare(req, (req.spot / req.contract.strike).ln().abs())?;
    let has_vega = matches!(req.model, Model::Heston { .. });
    let [d, g, v] = greek_values(req, &setup, [true, true, has_vega])?;
    res.greeks = Some(Greeks { delta: d.unwrap(), gamma: g.unwrap(), vega: v });
    Ok(res)
}

/// Reconstructed log-return density sampled at `samples` equispaced points
/// of the request's interval, endpoints included.
pub fn density_curve(req: &PriceRequest, samples: usize) -> Result<Vec<(f64, f64)>> {
    req.validate()?;
    if samples < 2 {
        return Err(SfpError::Domain(format!("need at least 2 density samples, got {samples}")));
    }
    let setup = prepare(req, (req.spot / req.contract.strike).ln().abs())?;
    let iv = setup.interval;
    let taylor = density_coefficients(&req.model, req.maturity(), &iv, req.terms);
    let approx = solve(&setup, taylor)?;
    let step = iv.width() / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            let y = if i + 1 == samples { iv.d } else { iv.c + step * i as f64 };
            (y, approx.evaluate(y))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveGrid {
    Strikes(Vec<f64>),
    Spots(Vec<f64>),
}

impl CurveGrid {
    pub fn values(&self) -> &[f64] {
        match self {
            CurveGrid::Strikes(v) | CurveGrid::Spots(v) => v,
        }
    }

    /// `(spot, strike)` pairs for a base request.
    pub fn points(&self, req: &PriceRequest) -> Vec<(f64, f64)> {
        match self {
            CurveGrid::Strikes(ks) => ks.iter().map(|&k| (req.spot, k)).collect(),
            CurveGrid::Spots(ss) => ss.iter().map(|&s| (s, req.contract.strike)).collect(),
        }
    }
}

pub fn price_curve(req: &PriceRequest, grid: &CurveGrid) -> Result<Vec<PriceResult>> {
    let pts = grid.points(req);
    if pts.is_empty() {
        return Err(SfpError::Domain("empty pricing grid".into()));
    }
    if let Some(&(s, k)) = pts.iter().find(|(s, k)| !(*s > 0.0 && *k > 0.0 && s.is_finite() && k.is_finite())) {
        return Err(SfpError::Domain(format!("grid point spot={s} strike={k} must be positive")));
    }
    match req.interval_mode {
        IntervalMode::PerPoint => {
            let base = resolve_auto(req, curve_bound(&pts))?;
            pts.par_iter()
                .map(|&(s, k)| {
                    let mut r = base.clone();
                    r.spot = s;
                    r.contract = req.contract.with_strike(k);
                    price(&r)
                })
                .collect()
        }
        IntervalMode::Shared => shared_curve(req, &pts),
    }
}

fn curve_bound(pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|(s, k)| (s / k).ln().abs()).fold(0.0, f64::max)
}

/// Runs detection once on the curve-wide probe and pins its outcome, so
/// per-point solves share the jump set and padding.
fn resolve_auto(req: &PriceRequest, bound: f64) -> Result<PriceRequest> {
    if req.jumps != JumpMode::Auto {
        return Ok(req.clone());
    }
    req.validate()?;
    let zetas = detect_for(req, bound)?;
    let padding = req.padding.unwrap_or_else(|| default_padding(zetas.is_empty(), req.maturity()));
    Ok(PriceRequest { jumps: JumpMode::Explicit(zetas), padding: Some(padding), ..req.clone() })
}

fn shared_curve(req: &PriceRequest, pts: &[(f64, f64)]) -> Result<Vec<PriceResult>> {
    req.validate()?;
    let setup = prepare(req, curve_bound(pts))?;
    let unit = PriceRequest { contract: req.contract.with_strike(1.0), ..req.clone() };
    let approx = solve(&setup, price_series(&unit, &setup))?;
    let disc = (-req.model.rate() * req.maturity()).exp();
    let degree = req.solved_contract().kind.strike_degree();
    pts.par_iter()
        .map(|&(s, k)| {
            let c = req.contract.with_strike(k);
            let y = log_moneyness(&c, s, &setup.interval)?;
            let ev = approx.evaluate_checked(y);
            Ok(PriceResult {
                value: disc * k.powi(degree) * ev.value + parity_shift(req, s, k),
                greeks: None,
                diagnostics: approx.diagnostics(),
                near_pole: ev.near_pole,
                terms_used: req.terms,
                interval: setup.interval,
                jump_locations: setup.jump_locations.clone(),
            })
        })
        .collect()
}
