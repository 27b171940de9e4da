//! Command-line front end: TOML run configurations, named parameter-set
//! presets and CSV emission for pricing, curves, convergence studies, jump
//! reports and density samples.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::error::SfpError;
use crate::jumps::{detect_jumps, DEFAULT_SPIKE_FACTOR};
use crate::models::Model;
use crate::payoffs::{Contract, PayoffKind};
use crate::pricing::{
    density_curve, price_curve, price_with_greeks, CallRoute, CurveGrid, IntervalMode, JumpMode, PriceRequest,
    MIN_DETECTION_TERMS,
};
use crate::reference::{bsm_analytic, cos_reference, error_report, BsmKind};
use crate::series::{default_multiplier, truncation_interval};

/// Term budget of the self-generated `sfp-high` reference.
pub const SFP_REFERENCE_TERMS: usize = 512;
pub const DEFAULT_DENSITY_SAMPLES: usize = 1025;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("reference error: {0}")]
    Reference(String),
    #[error("solver error: {0}")]
    Solver(#[from] SfpError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Reference(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Analytic,
    Cos,
    SfpHigh,
}

impl ReferenceKind {
    fn name(&self) -> &'static str {
        match self {
            ReferenceKind::Analytic => "analytic",
            ReferenceKind::Cos => "cos",
            ReferenceKind::SfpHigh => "sfp-high",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelBlock {
    Bsm {
        #[serde(alias = "sigma")]
        vol: f64,
    },
    Vg {
        #[serde(alias = "sigma")]
        vol: f64,
        #[serde(alias = "theta")]
        drift: f64,
        #[serde(alias = "nu")]
        variance_rate: f64,
    },
    Cgmy {
        #[serde(alias = "C")]
        activity: f64,
        #[serde(alias = "G")]
        decay_down: f64,
        #[serde(alias = "M")]
        decay_up: f64,
        #[serde(alias = "Y")]
        fine_structure: f64,
    },
    Heston {
        v0: f64,
        long_var: f64,
        reversion: f64,
        vol_of_vol: f64,
        rho: f64,
    },
}

impl ModelBlock {
    pub fn to_model(&self, rate: f64, dividend: f64) -> Model {
        match *self {
            ModelBlock::Bsm { vol } => Model::Bsm { vol, rate, dividend },
            ModelBlock::Vg { vol, drift, variance_rate } => Model::Vg { vol, drift, variance_rate, rate, dividend },
            ModelBlock::Cgmy { activity, decay_down, decay_up, fine_structure } => {
                Model::Cgmy { activity, decay_down, decay_up, fine_structure, rate, dividend }
            }
            ModelBlock::Heston { v0, long_var, reversion, vol_of_vol, rho } => {
                Model::Heston { v0, long_var, reversion, vol_of_vol, rho, rate, dividend }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RangeBlock {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl RangeBlock {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        if self.count == 0 || !self.from.is_finite() || !self.to.is_finite() {
            return Err(CliError::Config(format!("range needs finite bounds and count >= 1, got {self:?}")));
        }
        if self.count == 1 {
            return Ok(vec![self.from]);
        }
        let step = (self.to - self.from) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| if i + 1 == self.count { self.to } else { self.from + step * i as f64 })
            .collect())
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ContractBlock {
    pub kind: String,
    pub strike: Option<f64>,
    pub strikes: Option<RangeBlock>,
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MarketBlock {
    pub spot: Option<f64>,
    pub spots: Option<RangeBlock>,
    pub rate: f64,
    #[serde(default)]
    pub dividend: f64,
    pub maturity: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum JumpSetting {
    Named(String),
    Locations(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MethodBlock {
    #[serde(default = "default_terms")]
    pub terms: Vec<usize>,
    pub multiplier: Option<f64>,
    pub padding: Option<f64>,
    pub half_width: Option<f64>,
    pub jumps: Option<JumpSetting>,
    pub call_route: Option<CallRoute>,
    pub interval: Option<IntervalMode>,
    #[serde(default)]
    pub reduce_rank: bool,
    pub spike_factor: Option<f64>,
}

fn default_terms() -> Vec<usize> {
    vec![64]
}

impl Default for MethodBlock {
    fn default() -> Self {
        MethodBlock {
            terms: default_terms(),
            multiplier: None,
            padding: None,
            half_width: None,
            jumps: None,
            call_route: None,
            interval: None,
            reduce_rank: false,
            spike_factor: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub reference: Option<ReferenceKind>,
    /// Seconds column of convergence studies; off makes output byte-stable.
    #[serde(default = "yes")]
    pub timing: bool,
    pub samples: Option<usize>,
}

fn yes() -> bool {
    true
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { path: None, reference: None, timing: true, samples: None }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub contract: ContractBlock,
    pub market: MarketBlock,
    #[serde(default)]
    pub method: MethodBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Grid of a validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Point,
    Strikes(Vec<f64>),
    Spots(Vec<f64>),
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let c = &self.contract;
        let m = &self.market;
        if c.strike.is_some() == c.strikes.is_some() {
            return Err(CliError::Config("contract needs exactly one of 'strike' or 'strikes'".into()));
        }
        if m.spot.is_some() == m.spots.is_some() {
            return Err(CliError::Config("market needs exactly one of 'spot' or 'spots'".into()));
        }
        if c.strikes.is_some() && m.spots.is_some() {
            return Err(CliError::Config("a run varies either strikes or spots, not both".into()));
        }
        if self.method.terms.is_empty() {
            return Err(CliError::Config("method.terms must list at least one term budget".into()));
        }
        self.model()?.validate().map_err(config_err)?;
        self.request(self.method.terms[0]).and_then(|r| r.validate().map_err(config_err))?;
        for &u in &self.method.terms {
            if u < 8 {
                return Err(CliError::Config(format!("term budget must be >= 8, got {u}")));
            }
        }
        if let Some(JumpSetting::Named(name)) = &self.method.jumps {
            if !["auto", "endpoints", "model"].contains(&name.as_str()) {
                return Err(CliError::Config(format!("unknown jump mode '{name}' (auto, endpoints, model or a list)")));
            }
        }
        self.grid()?;
        Ok(())
    }

    pub fn model(&self) -> CliResult<Model> {
        Ok(self.model.to_model(self.market.rate, self.market.dividend))
    }

    pub fn contract_at(&self, strike: f64) -> CliResult<Contract> {
        let kind = PayoffKind::from_name(&self.contract.kind, self.contract.n).map_err(config_err)?;
        Contract::new(kind, strike, self.market.maturity).map_err(config_err)
    }

    fn base_strike(&self) -> f64 {
        self.contract.strike.unwrap_or_else(|| self.contract.strikes.map(|r| r.from).unwrap_or(1.0))
    }

    fn base_spot(&self) -> f64 {
        self.market.spot.unwrap_or_else(|| self.market.spots.map(|r| r.from).unwrap_or(1.0))
    }

    pub fn grid(&self) -> CliResult<Grid> {
        if let Some(r) = self.contract.strikes {
            Ok(Grid::Strikes(r.values()?))
        } else if let Some(r) = self.market.spots {
            Ok(Grid::Spots(r.values()?))
        } else {
            Ok(Grid::Point)
        }
    }

    fn curve_grid(&self) -> CliResult<CurveGrid> {
        Ok(match self.grid()? {
            Grid::Point => CurveGrid::Strikes(vec![self.base_strike()]),
            Grid::Strikes(k) => CurveGrid::Strikes(k),
            Grid::Spots(s) => CurveGrid::Spots(s),
        })
    }

    pub fn request(&self, terms: usize) -> CliResult<PriceRequest> {
        let mut req = PriceRequest::new(self.model()?, self.contract_at(self.base_strike())?, self.base_spot(), terms);
        let m = &self.method;
        req.multiplier = m.multiplier;
        req.padding = m.padding;
        req.half_width = m.half_width;
        req.jumps = match &m.jumps {
            None => JumpMode::Auto,
            Some(JumpSetting::Named(n)) => match n.as_str() {
                "endpoints" => JumpMode::EndpointsOnly,
                "model" => JumpMode::Model,
                _ => JumpMode::Auto,
            },
            Some(JumpSetting::Locations(z)) => JumpMode::Explicit(z.clone()),
        };
        req.call_route = m.call_route.unwrap_or(CallRoute::Parity);
        req.interval_mode = m.interval.unwrap_or(IntervalMode::PerPoint);
        req.reduce_rank = m.reduce_rank;
        req.spike_factor = m.spike_factor.unwrap_or(DEFAULT_SPIKE_FACTOR);
        Ok(req)
    }
}

pub const PRESET_NAMES: [&str; 7] =
    ["BSM-Para1", "BSM-Para2", "BSM-Para3", "VG-Para1", "VG-Para2", "CGMY-Para1", "Heston-Para1"];

pub fn preset(name: &str) -> CliResult<RunConfig> {
    let text = match name {
        "BSM-Para1" => {
            r#"
model = { kind = "bsm", vol = 0.15 }
contract = { kind = "put", strikes = { from = 1.0, to = 200.0, count = 250 } }
market = { spot = 100.0, rate = 0.03, dividend = 0.0, maturity = 1.0 }
method = { terms = [8, 16, 32, 64] }
output = { reference = "analytic" }
"#
        }
        "BSM-Para2" => {
            r#"
model = { kind = "bsm", vol = 0.25 }
contract = { kind = "call", strike = 120.0 }
market = { spot = 100.0, rate = 0.1, dividend = 0.0, maturity = 50.0 }
method = { terms = [8, 16, 32, 64] }
output = { reference = "analytic" }
"#
        }
        "BSM-Para3" => {
            r#"
model = { kind = "bsm", vol = 0.2 }
contract = { kind = "call", strike = 100.0 }
market = { spots = { from = 80.0, to = 120.0, count = 250 }, rate = 0.06, dividend = 0.0, maturity = 1e-6 }
method = { terms = [8, 16, 32, 64], padding = 0.1 }
output = { reference = "analytic" }
"#
        }
        "VG-Para1" => {
            r#"
model = { kind = "vg", vol = 0.12, drift = -0.14, variance_rate = 0.2 }
contract = { kind = "call", strikes = { from = 80.0, to = 120.0, count = 250 } }
market = { spot = 100.0, rate = 0.1, dividend = 0.0, maturity = 0.1 }
method = { terms = [16, 32, 64, 128] }
output = { reference = "cos" }
"#
        }
        "VG-Para2" => {
            r#"
model = { kind = "vg", vol = 0.1213, drift = -0.1436, variance_rate = 0.1686 }
contract = { kind = "call", strike = 1.0 }
market = { spots = { from = 0.5, to = 2.0, count = 250 }, rate = 0.03, dividend = 0.01, maturity = 1.0 }
method = { terms = [8, 16, 32, 64] }
output = { reference = "cos" }
"#
        }
        "CGMY-Para1" => {
            r#"
model = { kind = "cgmy", activity = 1.0, decay_down = 5.0, decay_up = 5.0, fine_structure = 0.5 }
contract = { kind = "call", strike = 100.0 }
market = { spot = 100.0, rate = 0.1, dividend = 0.0, maturity = 1.0 }
method = { terms = [8, 16, 32, 64] }
output = { reference = "cos" }
"#
        }
        "Heston-Para1" => {
            r#"
model = { kind = "heston", v0 = 0.0175, long_var = 0.0398, reversion = 1.5768, vol_of_vol = 0.5751, rho = -0.5711 }
contract = { kind = "call", strike = 100.0 }
market = { spot = 100.0, rate = 0.0, dividend = 0.0, maturity = 1.0 }
method = { terms = [32, 64, 128] }
output = { reference = "cos" }
"#
        }
        other => {
            return Err(CliError::Config(format!("unknown preset '{other}'; available: {}", PRESET_NAMES.join(", "))))
        }
    };
    RunConfig::parse(text)
}

#[derive(Debug, Parser)]
#[command(name = "sfp", version, about = "European option pricing by singular Fourier-Pade reconstruction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a single contract and report Greeks and solver diagnostics.
    Price(CommonArgs),
    /// Price every grid point of a strike or spot range.
    Curve(CommonArgs),
    /// Error norms and timings against a reference for each term budget.
    Convergence(CommonArgs),
    /// Price, delta, gamma and (Heston) vega over the grid.
    Greeks(CommonArgs),
    /// Report interior density discontinuities.
    DetectJumps(CommonArgs),
    /// Sample the reconstructed log-return density over the interval.
    Density(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named parameter set.
    #[arg(long)]
    pub preset: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated term budgets overriding the configuration.
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub reference: Option<ReferenceKind>,
    /// Leave the seconds column empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

impl CommonArgs {
    pub fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::parse(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                    other => other,
                })?
            }
            (None, Some(name)) => preset(name)?,
            (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
        };
        if let Some(t) = &self.terms {
            cfg.method.terms = t.clone();
        }
        if let Some(r) = self.reference {
            cfg.output.reference = Some(r);
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if self.no_timing {
            cfg.output.timing = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Full-precision float for CSV fields.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn last_terms(cfg: &RunConfig) -> usize {
    *cfg.method.terms.last().expect("validated non-empty")
}

pub fn cmd_price(cfg: &RunConfig) -> CliResult<String> {
    if cfg.grid()? != Grid::Point {
        return Err(CliError::Config("price needs a single strike and spot; use curve for ranges".into()));
    }
    let req = cfg.request(last_terms(cfg))?;
    let res = price_with_greeks(&req)?;
    let g = res.greeks.expect("greeks requested");
    let d = res.diagnostics;
    let mut out = String::from(
        "U,spot,strike,value,delta,gamma,vega,condition,null_ratio,residual,near_pole,jumps\n",
    );
    let jumps: Vec<String> = res.jump_locations.iter().map(|&z| fmt_f64(z)).collect();
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        res.terms_used,
        fmt_f64(req.spot),
        fmt_f64(req.contract.strike),
        fmt_f64(res.value),
        fmt_f64(g.delta),
        fmt_f64(g.gamma),
        fmt_opt(g.vega),
        fmt_f64(d.condition),
        fmt_f64(d.null_ratio),
        fmt_f64(d.residual),
        res.near_pole,
        jumps.join(";"),
    )
    .unwrap();
    Ok(out)
}

pub fn cmd_curve(cfg: &RunConfig) -> CliResult<String> {
    let req = cfg.request(last_terms(cfg))?;
    let grid = cfg.curve_grid()?;
    let res = price_curve(&req, &grid)?;
    let mut out = String::from("spot,strike,value,near_pole\n");
    for ((s, k), r) in grid.points(&req).into_iter().zip(&res) {
        writeln!(out, "{},{},{},{}", fmt_f64(s), fmt_f64(k), fmt_f64(r.value), r.near_pole).unwrap();
    }
    Ok(out)
}

pub fn cmd_greeks(cfg: &RunConfig) -> CliResult<String> {
    let req = cfg.request(last_terms(cfg))?;
    let grid = cfg.curve_grid()?;
    let mut out = String::from("spot,strike,value,delta,gamma,vega\n");
    for (s, k) in grid.points(&req) {
        let mut r = req.clone();
        r.spot = s;
        r.contract = req.contract.with_strike(k);
        let res = price_with_greeks(&r)?;
        let g = res.greeks.expect("greeks requested");
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(s),
            fmt_f64(k),
            fmt_f64(res.value),
            fmt_f64(g.delta),
            fmt_f64(g.gamma),
            fmt_opt(g.vega)
        )
        .unwrap();
    }
    Ok(out)
}

fn analytic_kind(kind: PayoffKind) -> Option<BsmKind> {
    match kind {
        PayoffKind::Call => Some(BsmKind::Call),
        PayoffKind::Put => Some(BsmKind::Put),
        PayoffKind::CashOrNothingCall => Some(BsmKind::CashCall),
        PayoffKind::CashOrNothingPut => Some(BsmKind::CashPut),
        _ => None,
    }
}

/// Reference values for every grid point of a configuration.
pub fn reference_values(cfg: &RunConfig, kind: ReferenceKind) -> CliResult<Vec<f64>> {
    let req = cfg.request(last_terms(cfg))?;
    let grid = cfg.curve_grid()?;
    let pts = grid.points(&req);
    let model = req.model;
    match kind {
        ReferenceKind::Analytic => {
            let Model::Bsm { vol, rate, dividend } = model else {
                return Err(CliError::Reference(format!("no analytic reference for the {} model", model.name())));
            };
            let Some(bk) = analytic_kind(req.contract.kind) else {
                return Err(CliError::Reference(format!("no analytic reference for {:?}", req.contract.kind)));
            };
            let t = req.contract.maturity;
            Ok(pts.iter().map(|&(s, k)| bsm_analytic(s, k, rate, dividend, vol, t, bk).price).collect())
        }
        ReferenceKind::Cos => {
            use rayon::prelude::*;
            pts.par_iter()
                .map(|&(s, k)| {
                    cos_reference(&model, &req.contract.with_strike(k), s)
                        .map_err(|e| CliError::Reference(format!("COS reference failed: {e}")))
                })
                .collect()
        }
        ReferenceKind::SfpHigh => {
            let mut hi = req.clone();
            hi.terms = SFP_REFERENCE_TERMS;
            let res = price_curve(&hi, &grid).map_err(|e| CliError::Reference(format!("high-order SFP failed: {e}")))?;
            Ok(res.iter().map(|r| r.value).collect())
        }
    }
}

pub fn default_reference(cfg: &RunConfig) -> ReferenceKind {
    if let Some(r) = cfg.output.reference {
        return r;
    }
    let analytic = matches!(cfg.model, ModelBlock::Bsm { .. })
        && PayoffKind::from_name(&cfg.contract.kind, cfg.contract.n).ok().and_then(analytic_kind).is_some();
    if analytic {
        ReferenceKind::Analytic
    } else {
        ReferenceKind::Cos
    }
}

pub fn cmd_convergence(cfg: &RunConfig) -> CliResult<String> {
    let kind = default_reference(cfg);
    let reference = reference_values(cfg, kind)?;
    let grid = cfg.curve_grid()?;
    let axis = grid.values().to_vec();
    let mut out = format!("# reference: {}\nU,r_inf,r_2,seconds\n", kind.name());
    for &u in &cfg.method.terms {
        let req = cfg.request(u)?;
        let t0 = Instant::now();
        let res = price_curve(&req, &grid)?;
        let elapsed = t0.elapsed().as_secs_f64();
        let approx: Vec<f64> = res.iter().map(|r| r.value).collect();
        let rep = error_report(&approx, &reference, &axis, elapsed)?;
        let secs = if cfg.output.timing { fmt_f64(rep.wall_time_seconds) } else { String::new() };
        writeln!(out, "{u},{},{},{secs}", fmt_f64(rep.r_inf), fmt_f64(rep.r_2)).unwrap();
    }
    Ok(out)
}

pub fn cmd_detect_jumps(cfg: &RunConfig) -> CliResult<String> {
    let req = cfg.request(last_terms(cfg))?;
    let model = req.model;
    let t = req.contract.maturity;
    let grid = cfg.curve_grid()?;
    let bound = grid.points(&req).iter().map(|(s, k)| (s / k).ln().abs()).fold(0.0, f64::max);
    let multiplier = req.multiplier.unwrap_or_else(|| default_multiplier(&model));
    let mut iv = truncation_interval(&model, t, bound, multiplier, req.padding.unwrap_or(0.0))?;
    if let Some(d) = req.half_width {
        iv = iv.with_half_width(d);
    }
    let terms = req.terms.max(MIN_DETECTION_TERMS);
    let rep = detect_jumps(&model, t, &iv, terms, req.spike_factor)?;
    let mut out = format!(
        "# smooth: {}, peak: {}, grid_step: {}\nlocation,magnitude\n",
        rep.smooth,
        fmt_f64(rep.peak),
        fmt_f64(rep.grid_step)
    );
    for (z, m) in rep.locations.iter().zip(&rep.spike_magnitudes) {
        writeln!(out, "{},{}", fmt_f64(*z), fmt_f64(*m)).unwrap();
    }
    Ok(out)
}

pub fn cmd_density(cfg: &RunConfig) -> CliResult<String> {
    let req = cfg.request(last_terms(cfg))?;
    let samples = cfg.output.samples.unwrap_or(DEFAULT_DENSITY_SAMPLES);
    let pts = density_curve(&req, samples)?;
    let mut out = String::from("y,density\n");
    for (y, f) in pts {
        writeln!(out, "{},{}", fmt_f64(y), fmt_f64(f)).unwrap();
    }
    Ok(out)
}

/// Runs a parsed command, returning the CSV text and its destination.
pub fn execute(command: &Command) -> CliResult<(String, Option<PathBuf>)> {
    let (args, f): (&CommonArgs, fn(&RunConfig) -> CliResult<String>) = match command {
        Command::Price(a) => (a, cmd_price),
        Command::Curve(a) => (a, cmd_curve),
        Command::Convergence(a) => (a, cmd_convergence),
        Command::Greeks(a) => (a, cmd_greeks),
        Command::DetectJumps(a) => (a, cmd_detect_jumps),
        Command::Density(a) => (a, cmd_density),
    };
    let cfg = args.load()?;
    Ok((f(&cfg)?, cfg.output.path.clone()))
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = execute(&cli.command).and_then(|(csv, path)| {
        match path {
            Some(p) => std::fs::write(p, csv)?,
            None => print!("{csv}"),
        }
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sfp: {e}");
            e.exit_code()
        }
    }
}
