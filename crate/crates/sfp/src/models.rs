//! Characteristic functions of the log-return `X_T = log(S_T / S_0)` under
//! four risk-neutral models, their compensators and cumulants.

use libm::tgamma as gamma;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Bsm {
        vol: f64,
        rate: f64,
        dividend: f64,
    },
    Vg {
        vol: f64,
        drift: f64,
        variance_rate: f64,
        rate: f64,
        dividend: f64,
    },
    Cgmy {
        activity: f64,
        /// Tempering of downward jumps.
        decay_down: f64,
        /// Tempering of upward jumps.
        decay_up: f64,
        fine_structure: f64,
        rate: f64,
        dividend: f64,
    },
    Heston {
        v0: f64,
        long_var: f64,
        reversion: f64,
        vol_of_vol: f64,
        rho: f64,
        rate: f64,
        dividend: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    pub c1: f64,
    pub c2: f64,
    pub c4: f64,
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(SfpError::Domain(msg.to_string()))
    }
}

fn finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

impl Model {
    pub fn rate(&self) -> f64 {
        match *self {
            Model::Bsm { rate, .. }
            | Model::Vg { rate, .. }
            | Model::Cgmy { rate, .. }
            | Model::Heston { rate, .. } => rate,
        }
    }

    pub fn dividend(&self) -> f64 {
        match *self {
            Model::Bsm { dividend, .. }
            | Model::Vg { dividend, .. }
            | Model::Cgmy { dividend, .. }
            | Model::Heston { dividend, .. } => dividend,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Bsm { .. } => "bsm",
            Model::Vg { .. } => "vg",
            Model::Cgmy { .. } => "cgmy",
            Model::Heston { .. } => "heston",
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(finite(&[self.rate(), self.dividend()]), "rates must be finite")?;
        match *self {
            Model::Bsm { vol, .. } => check(vol.is_finite() && vol > 0.0, "vol must be > 0"),
            Model::Vg { vol, drift, variance_rate, .. } => {
                check(finite(&[vol, drift, variance_rate]), "VG parameters must be finite")?;
                check(vol > 0.0, "vol must be > 0")?;
                check(variance_rate > 0.0, "variance_rate must be > 0")?;
                check(
                    1.0 - drift * variance_rate - 0.5 * vol * vol * variance_rate > 0.0,
                    "VG compensator undefined: 1 - drift*nu - vol^2*nu/2 must be > 0",
                )
            }
            Model::Cgmy { activity, decay_down, decay_up, fine_structure: y, .. } => {
                check(finite(&[activity, decay_down, decay_up, y]), "CGMY parameters must be finite")?;
                check(activity > 0.0, "activity must be > 0")?;
                check(decay_down > 0.0, "decay_down must be > 0")?;
                check(decay_up > 1.0, "decay_up must be > 1 for a finite forward")?;
                check(y > 0.0 && y < 2.0 && y != 1.0, "fine_structure must lie in (0,2) and differ from 1")
            }
            Model::Heston { v0, long_var, reversion, vol_of_vol, rho, .. } => {
                check(finite(&[v0, long_var, reversion, vol_of_vol, rho]), "Heston parameters must be finite")?;
                check(v0 >= 0.0, "v0 must be >= 0")?;
                check(long_var >= 0.0, "long_var must be >= 0")?;
                check(reversion >= 0.0, "reversion must be >= 0")?;
                check(vol_of_vol >= 0.0, "vol_of_vol must be >= 0")?;
                check((-1.0..=1.0).contains(&rho), "rho must lie in [-1, 1]")
            }
        }
    }

    /// Mean-correcting drift per year so that `E[S_T] = S_0 e^{(r-q)T}`.
    pub fn compensator(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.compensator_unchecked())
    }

    fn compensator_unchecked(&self) -> f64 {
        match *self {
            Model::Bsm { vol, .. } => -0.5 * vol * vol,
            Model::Vg { vol, drift, variance_rate: nu, .. } => {
                (-drift * nu - 0.5 * vol * vol * nu).ln_1p() / nu
            }
            Model::Cgmy { .. } => -self.cgmy_exponent(-I).re,
            Model::Heston { .. } => 0.0,
        }
    }

    fn cgmy_exponent(&self, u: C64) -> C64 {
        let Model::Cgmy { activity, decay_down: g, decay_up: m, fine_structure: y, .. } = *self else {
            unreachable!()
        };
        // (M − iu)^Y − M^Y written as M^Y·expm1(Y·log1p(−iu/M)) to keep
        // relative accuracy near u = 0; likewise for G.
        let up = m.powf(y) * exp_m1(y * ln_1p(-I * u / m));
        let down = g.powf(y) * exp_m1(y * ln_1p(I * u / g));
        activity * gamma(-y) * (up + down)
    }

    /// `log φ(u)` over horizon `t`, without parameter validation.
    pub fn log_cf(&self, u: C64, t: f64) -> C64 {
        let drift = self.rate() - self.dividend() + self.compensator_unchecked();
        match *self {
            Model::Bsm { vol, .. } => t * (I * u * drift - 0.5 * vol * vol * u * u),
            Model::Vg { vol, drift: theta, variance_rate: nu, .. } => {
                let w = -I * theta * nu * u + 0.5 * vol * vol * nu * u * u;
                I * u * drift * t - (t / nu) * ln_1p(w)
            }
            Model::Cgmy { .. } => t * (I * u * drift + self.cgmy_exponent(u)),
            Model::Heston { v0, .. } => {
                let (d, c) = self.heston_terms(u, t);
                I * u * drift * t + v0 * d + c
            }
        }
    }

    /// Variance loading `D` and constant `C` of the affine Heston exponent.
    fn heston_terms(&self, u: C64, t: f64) -> (C64, C64) {
        let Model::Heston { long_var, reversion: k, vol_of_vol: eta, rho, .. } = *self else {
            unreachable!()
        };
        let a = 0.5 * (u * u + I * u);
        if eta == 0.0 {
            if k == 0.0 {
                return (-a * t, C64::new(0.0, 0.0));
            }
            let decay = (1.0 - (-k * t).exp()) / k;
            return (-a * decay, -a * long_var * (t - decay));
        }
        if u == C64::new(0.0, 0.0) {
            return (u, u);
        }
        let eta2 = eta * eta;
        let b = k - I * rho * eta * u;
        let e = (b * b + 2.0 * a * eta2).sqrt();
        // b − e without cancellation, then the little-trap form.
        let b_minus_e = -2.0 * a * eta2 / (b + e);
        let f = b_minus_e / (b + e);
        let ex = (-e * t).exp();
        let one_minus_ex = -exp_m1(-e * t);
        let d = b_minus_e / eta2 * one_minus_ex / (1.0 - f * ex);
        let c = k * long_var / eta2 * (t * b_minus_e - 2.0 * ln_1p(f * one_minus_ex / (1.0 - f)));
        (d, c)
    }

    /// `φ(u) = E[exp(iuX_T)]`, unchecked fast path.
    pub fn cf(&self, u: C64, t: f64) -> C64 {
        self.log_cf(u, t).exp()
    }

    pub fn characteristic_fn(&self, u: C64, t: f64) -> Result<C64> {
        self.validate()?;
        check(t > 0.0 && t.is_finite(), "maturity must be > 0")?;
        Ok(self.cf(u, t))
    }

    /// `∂φ/∂v0`; only Heston carries a variance state.
    pub fn cf_dv0(&self, u: C64, t: f64) -> Result<C64> {
        match self {
            Model::Heston { .. } => {
                let (d, _) = self.heston_terms(u, t);
                Ok(self.cf(u, t) * d)
            }
            _ => Err(SfpError::Unsupported(format!(
                "variance sensitivity needs a stochastic-variance model, got {}",
                self.name()
            ))),
        }
    }

    pub fn cumulants(&self, t: f64) -> Result<Cumulants> {
        self.validate()?;
        check(t > 0.0 && t.is_finite(), "maturity must be > 0")?;
        let mu = self.rate() - self.dividend() + self.compensator_unchecked();
        let out = match *self {
            Model::Bsm { vol, .. } => Cumulants { c1: mu * t, c2: vol * vol * t, c4: 0.0 },
            Model::Vg { vol, drift: th, variance_rate: nu, .. } => {
                let s2 = vol * vol;
                Cumulants {
                    c1: (mu + th) * t,
                    c2: (s2 + nu * th * th) * t,
                    c4: 3.0
                        * (s2 * s2 * nu + 2.0 * th.powi(4) * nu.powi(3) + 4.0 * s2 * th * th * nu * nu)
                        * t,
                }
            }
            Model::Cgmy { activity: c, decay_down: g, decay_up: m, fine_structure: y, .. } => Cumulants {
                c1: mu * t + c * gamma(1.0 - y) * (m.powf(y - 1.0) - g.powf(y - 1.0)) * t,
                c2: c * gamma(2.0 - y) * (m.powf(y - 2.0) + g.powf(y - 2.0)) * t,
                c4: c * gamma(4.0 - y) * (m.powf(y - 4.0) + g.powf(y - 4.0)) * t,
            },
            Model::Heston { v0, long_var: vb, reversion: k, vol_of_vol: eta, rho, .. } => {
                let numeric = self.contour_cumulants(t);
                if k < 1e-6 {
                    Cumulants { c1: numeric[1], c2: numeric[2], c4: numeric[4] }
                } else {
                    let e = (-k * t).exp();
                    let c1 = mu * t + (1.0 - e) * (vb - v0) / (2.0 * k) - 0.5 * vb * t;
                    let c2 = (eta * t * k * e * (v0 - vb) * (8.0 * k * rho - 4.0 * eta)
                        + k * rho * eta * (1.0 - e) * (16.0 * vb - 8.0 * v0)
                        + 2.0 * vb * k * t * (-4.0 * k * rho * eta + eta * eta + 4.0 * k * k)
                        + eta * eta * ((vb - 2.0 * v0) * e * e + vb * (4.0 * e - 5.0) + 2.0 * v0)
                        + 8.0 * k * k * (v0 - vb) * (1.0 - e))
                        / (8.0 * k.powi(3));
                    Cumulants { c1, c2, c4: numeric[4] }
                }
            }
        };
        if finite(&[out.c1, out.c2, out.c4]) {
            Ok(out)
        } else {
            Err(SfpError::Domain("non-finite cumulants".into()))
        }
    }

    /// Cumulants of order 0..=4 from a trapezoidal Cauchy integral of
    /// `log φ` on a small circle around the origin.
    pub fn contour_cumulants(&self, t: f64) -> [f64; 5] {
        const RADIUS: f64 = 0.2;
        const POINTS: usize = 64;
        let mut coef = [C64::new(0.0, 0.0); 5];
        for j in 0..POINTS {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / POINTS as f64;
            let w = C64::from_polar(1.0, theta);
            let val = self.log_cf(RADIUS * w, t);
            for (n, slot) in coef.iter_mut().enumerate() {
                *slot += val * w.powi(-(n as i32));
            }
        }
        let mut out = [0.0; 5];
        let mut fact = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let taylor = coef[n] / POINTS as f64 / RADIUS.powi(n as i32);
            *slot = (taylor * fact / I.powi(n as i32)).re;
        }
        out
    }

    /// Log-return where the density is known in closed form to be
    /// non-analytic, if any: the VG drift point and the BSM mean at very
    /// short horizons.
    pub fn singular_point(&self, t: f64) -> Option<f64> {
        let mu = self.rate() - self.dividend() + self.compensator_unchecked();
        match self {
            Model::Vg { .. } => Some(mu * t),
            Model::Bsm { .. } if t < 1e-4 => Some(mu * t),
            _ => None,
        }
    }
}

/// `log(1 + w)` accurate for small `|w|`.
fn ln_1p(w: C64) -> C64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    C64::new(re, w.im.atan2(1.0 + w.re))
}

/// `exp(w) − 1` accurate for small `|w|`.
fn exp_m1(w: C64) -> C64 {
    let half = (0.5 * w.im).sin();
    C64::new(w.re.exp_m1() * w.im.cos() - 2.0 * half * half, w.re.exp() * w.im.sin())
}
