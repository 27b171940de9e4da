//! Payoffs in log-moneyness `y = log(S_T / K)` and their closed-form
//! transforms `Ĝ_k = ∫ G(y) e^{iω_k y} dy` over a truncation interval.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};

pub const MAX_POWER: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    Call,
    Put,
    CoveredCall,
    CashOrNothingCall,
    CashOrNothingPut,
    AssetOrNothingCall,
    AssetOrNothingPut,
    AsymmetricCall(u32),
    AsymmetricPut(u32),
    SymmetricCall(u32),
    SymmetricPut(u32),
}

impl PayoffKind {
    pub const ALL_NAMES: [&'static str; 11] = [
        "call",
        "put",
        "covered-call",
        "cash-or-nothing-call",
        "cash-or-nothing-put",
        "asset-or-nothing-call",
        "asset-or-nothing-put",
        "asymmetric-call",
        "asymmetric-put",
        "symmetric-call",
        "symmetric-put",
    ];

    pub fn from_name(name: &str, power: Option<u32>) -> Result<Self> {
        let n = power.unwrap_or(1);
        Ok(match name {
            "call" => Self::Call,
            "put" => Self::Put,
            "covered-call" => Self::CoveredCall,
            "cash-or-nothing-call" => Self::CashOrNothingCall,
            "cash-or-nothing-put" => Self::CashOrNothingPut,
            "asset-or-nothing-call" => Self::AssetOrNothingCall,
            "asset-or-nothing-put" => Self::AssetOrNothingPut,
            "asymmetric-call" => Self::AsymmetricCall(n),
            "asymmetric-put" => Self::AsymmetricPut(n),
            "symmetric-call" => Self::SymmetricCall(n),
            "symmetric-put" => Self::SymmetricPut(n),
            other => return Err(SfpError::Domain(format!("unknown contract kind '{other}'"))),
        })
    }

    pub fn power(&self) -> Option<u32> {
        match *self {
            Self::AsymmetricCall(n) | Self::AsymmetricPut(n) | Self::SymmetricCall(n) | Self::SymmetricPut(n) => Some(n),
            _ => None,
        }
    }

    /// Exponent `p` such that the transform scales as `K^p`.
    pub fn strike_degree(&self) -> i32 {
        match *self {
            Self::CashOrNothingCall | Self::CashOrNothingPut => 0,
            Self::AsymmetricCall(n) | Self::AsymmetricPut(n) | Self::SymmetricCall(n) | Self::SymmetricPut(n) => n as i32,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub kind: PayoffKind,
    pub strike: f64,
    pub maturity: f64,
}

/// Side of the strike on which a payoff piece lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `y ≤ 0`, i.e. `S_T ≤ K`.
    Below,
    /// `y ≥ 0`.
    Above,
}

/// One exponential piece `weight · e^{exponent·y}` of a payoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub weight: f64,
    pub exponent: f64,
    pub side: Side,
}

/// `∫_a^b e^{(iω+α)y} dy`.
pub fn exp_integral(alpha: f64, a: f64, b: f64, omega: f64) -> C64 {
    let s = C64::new(alpha, omega);
    if alpha == 0.0 && omega == 0.0 {
        return C64::new(b - a, 0.0);
    }
    assert!(s.norm() > 0.0);
    ((s * b).exp() - (s * a).exp()) / s
}

pub fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64)
}

impl Contract {
    pub fn new(kind: PayoffKind, strike: f64, maturity: f64) -> Result<Self> {
        let c = Contract { kind, strike, maturity };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(SfpError::Domain(format!("strike must be > 0, got {}", self.strike)));
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(SfpError::Domain(format!("maturity must be > 0, got {}", self.maturity)));
        }
        if let Some(n) = self.kind.power() {
            if n == 0 || n > MAX_POWER {
                return Err(SfpError::Domain(format!("power must lie in 1..={MAX_POWER}, got {n}")));
            }
        }
        Ok(())
    }

    pub fn with_strike(&self, strike: f64) -> Self {
        Contract { strike, ..*self }
    }

    pub fn payoff_value(&self, terminal: f64) -> f64 {
        let k = self.strike;
        let (above, below) = (terminal >= k, terminal <= k);
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match self.kind {
            PayoffKind::Call => (terminal - k).max(0.0),
            PayoffKind::Put => (k - terminal).max(0.0),
            PayoffKind::CoveredCall => terminal.min(k),
            PayoffKind::CashOrNothingCall => ind(above),
            PayoffKind::CashOrNothingPut => ind(below),
            PayoffKind::AssetOrNothingCall => terminal * ind(above),
            PayoffKind::AssetOrNothingPut => terminal * ind(below),
            PayoffKind::AsymmetricCall(n) => (terminal.powi(n as i32) - k.powi(n as i32)) * ind(above),
            PayoffKind::AsymmetricPut(n) => (k.powi(n as i32) - terminal.powi(n as i32)) * ind(below),
            PayoffKind::SymmetricCall(n) => (terminal - k).powi(n as i32) * ind(above),
            PayoffKind::SymmetricPut(n) => (k - terminal).powi(n as i32) * ind(below),
        }
    }

    /// Payoff as a sum of exponential pieces in `y = log(S_T/K)`.
    pub fn pieces(&self) -> Vec<Piece> {
        use Side::*;
        let k = self.strike;
        let p = |weight: f64, exponent: f64, side: Side| Piece { weight, exponent, side };
        match self.kind {
            PayoffKind::Call => vec![p(k, 1.0, Above), p(-k, 0.0, Above)],
            PayoffKind::Put => vec![p(k, 0.0, Below), p(-k, 1.0, Below)],
            PayoffKind::CoveredCall => vec![p(k, 1.0, Below), p(k, 0.0, Above)],
            PayoffKind::CashOrNothingCall => vec![p(1.0, 0.0, Above)],
            PayoffKind::CashOrNothingPut => vec![p(1.0, 0.0, Below)],
            PayoffKind::AssetOrNothingCall => vec![p(k, 1.0, Above)],
            PayoffKind::AssetOrNothingPut => vec![p(k, 1.0, Below)],
            PayoffKind::AsymmetricCall(n) => {
                let kn = k.powi(n as i32);
                vec![p(kn, n as f64, Above), p(-kn, 0.0, Above)]
            }
            PayoffKind::AsymmetricPut(n) => {
                let kn = k.powi(n as i32);
                vec![p(kn, 0.0, Below), p(-kn, n as f64, Below)]
            }
            PayoffKind::SymmetricCall(n) => {
                let kn = k.powi(n as i32);
                (0..=n)
                    .map(|j| {
                        let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                        p(sign * binomial(n, j) as f64 * kn, j as f64, Above)
                    })
                    .collect()
            }
            PayoffKind::SymmetricPut(n) => {
                let kn = k.powi(n as i32);
                (0..=n)
                    .map(|m| {
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        p(sign * binomial(n, m) as f64 * kn, m as f64, Below)
                    })
                    .collect()
            }
        }
    }

    /// `Ĝ_k` on `[c, d]` with `ω_k = 2πk/(d−c)`; `k = 0` gives the mean term.
    pub fn payoff_transform(&self, k: i64, c: f64, d: f64) -> Result<C64> {
        if k < 0 {
            return Err(SfpError::Index(k));
        }
        if !(c < 0.0 && d > 0.0) {
            return Err(SfpError::Interval { c, d });
        }
        self.validate()?;
        let omega = 2.0 * std::f64::consts::PI * k as f64 / (d - c);
        Ok(self.transform_at(omega, c, d))
    }

    /// Transform at an arbitrary real frequency, no validation.
    pub fn transform_at(&self, omega: f64, c: f64, d: f64) -> C64 {
        match self.kind {
            PayoffKind::SymmetricCall(n) if cancellation(n, d) > MAX_CANCELLATION => {
                return self.strike.powi(n as i32) * power_side(n, 0.0, d, omega, 1.0);
            }
            PayoffKind::SymmetricPut(n) if cancellation(n, c) > MAX_CANCELLATION => {
                return self.strike.powi(n as i32) * power_side(n, c, 0.0, omega, -1.0);
            }
            _ => {}
        }
        self.pieces()
            .iter()
            .map(|pc| {
                let (a, b) = match pc.side {
                    Side::Below => (c, 0.0),
                    Side::Above => (0.0, d),
                };
                pc.weight * exp_integral(pc.exponent, a, b, omega)
            })
            .sum()
    }
}

/// Growth of the alternating binomial sum over its result beyond which a
/// symmetric power side is integrated numerically instead.
const MAX_CANCELLATION: f64 = 1e3;

/// `coth(|edge|/2)^n`: ratio of the binomial terms to `(e^y − 1)^n` at the edge.
fn cancellation(n: u32, edge: f64) -> f64 {
    (1.0 / (0.5 * edge.abs()).tanh()).powi(n as i32)
}

/// `∫_a^b (sign·(e^y − 1))^n e^{iωy} dy` by composite Gauss-Legendre.
fn power_side(n: u32, a: f64, b: f64, omega: f64, sign: f64) -> C64 {
    let (nodes, weights) = legendre_16();
    let width = b - a;
    let panels = (((omega.abs() + n as f64) * width / 4.0).ceil() as usize).max(1);
    let h = width / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (x, w) in nodes.iter().zip(weights) {
            let y = mid + 0.5 * h * x;
            total += C64::from_polar((sign * y.exp_m1()).powi(n as i32), omega * y) * (0.5 * h * w);
        }
    }
    total
}

fn legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: std::sync::OnceLock<([f64; 16], [f64; 16])> = std::sync::OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16;
        let mut nodes = [0.0; 16];
        let mut weights = [0.0; 16];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}
