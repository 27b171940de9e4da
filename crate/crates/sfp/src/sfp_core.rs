//! Fourier-Padé and singular Fourier-Padé approximants of a power series
//! in `z`, with logarithmic terms `L_s(z)·log(1 − z/ε_s)` for jumps on the
//! unit circle.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Result, SfpError};
use crate::series::{horner, SeriesCoefficients, TruncationInterval};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Share of the free degrees given to the numerator.
pub const NUMERATOR_SHARE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreePlan {
    pub numerator: usize,
    pub denominator: usize,
    pub log_degrees: Vec<usize>,
    pub terms: usize,
}

impl DegreePlan {
    /// Explicit degrees with the budget implied by `U = N + M + S + ΣN_s`.
    pub fn explicit(numerator: usize, denominator: usize, log_degrees: Vec<usize>) -> Self {
        let terms = numerator + denominator + log_degrees.len() + log_degrees.iter().sum::<usize>();
        DegreePlan { numerator, denominator, log_degrees, terms }
    }

    pub fn unknowns(&self) -> usize {
        self.denominator + 1 + self.log_degrees.iter().map(|n| n + 1).sum::<usize>()
    }
}

pub fn allocate_degrees(terms: usize, jumps: usize) -> Result<DegreePlan> {
    if terms < jumps + 2 {
        return Err(SfpError::Degree { terms, jumps });
    }
    let free = terms - jumps;
    let numerator = (NUMERATOR_SHARE * free as f64).round() as usize;
    let rest = free - numerator;
    let base = rest / (jumps + 1);
    let denominator = rest - base * jumps;
    Ok(DegreePlan { numerator, denominator, log_degrees: vec![base; jumps], terms })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Largest over second-smallest singular value of the constraint matrix.
    pub condition: f64,
    /// Smallest over largest singular value.
    pub null_ratio: f64,
    /// `‖A v‖` for the unit null vector.
    pub residual: f64,
    /// More than one numerically null direction was present.
    pub degenerate: bool,
    /// Singular values at or below `RANK_TOL` times the largest.
    pub null_dim: usize,
}

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-14;

/// Rational-plus-logarithm form in the `z` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeForm {
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    pub logs: Vec<Vec<C64>>,
    pub jumps: Vec<C64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub near_pole: bool,
}

/// Taylor coefficients of `log(1 − z/ε)`: zero, then `−ε^{−k}/k`.
pub fn log_series(eps: C64, len: usize) -> Vec<C64> {
    let inv = eps.inv();
    let mut out = Vec::with_capacity(len);
    let mut pow = C64::new(1.0, 0.0);
    for k in 0..len {
        if k == 0 {
            out.push(ZERO);
        } else {
            pow *= inv;
            out.push(-pow / k as f64);
        }
    }
    out
}

fn null_vector(a: DMatrix<C64>) -> Result<(Vec<C64>, Diagnostics)> {
    let cols = a.ncols();
    let square = if a.nrows() < cols {
        let mut m = DMatrix::<C64>::zeros(cols, cols);
        m.view_mut((0, 0), (a.nrows(), cols)).copy_from(&a);
        m
    } else {
        a.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| SfpError::Solver("SVD returned no right vectors".into()))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap_or(std::cmp::Ordering::Equal));
    let smallest = order[0];
    let smax = sv.max();
    let v: Vec<C64> = v_t.row(smallest).iter().map(|x| x.conj()).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.5) || v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(SfpError::Solver("null vector vanished".into()));
    }
    let second = order.get(1).map(|&i| sv[i]).unwrap_or(smax);
    let av = &a * nalgebra::DVector::from_column_slice(&v);
    let diagnostics = Diagnostics {
        condition: if second > 0.0 { smax / second } else { f64::INFINITY },
        null_ratio: if smax > 0.0 { sv[smallest] / smax } else { 0.0 },
        residual: av.norm(),
        degenerate: smax > 0.0 && second / smax < 1e-12,
        null_dim: sv.iter().filter(|&&x| x <= RANK_TOL * smax).count().max(1),
    };
    Ok((v, diagnostics))
}

/// Solve for `P, Q, L_s` with `P + Σ L_s log(1−z/ε_s) − f·Q = O(z^{U+1})`.
pub fn solve_taylor(taylor: &[C64], jumps: &[C64], plan: &DegreePlan) -> Result<PadeForm> {
    let u = plan.terms;
    if taylor.len() < u + 1 {
        return Err(SfpError::Length(taylor.len(), u + 1));
    }
    if plan.log_degrees.len() != jumps.len() {
        return Err(SfpError::Length(plan.log_degrees.len(), jumps.len()));
    }
    if let Some(e) = jumps.iter().find(|e| (e.norm() - 1.0).abs() > 1e-12) {
        return Err(SfpError::Domain(format!("jump point {e} is not on the unit circle")));
    }
    if taylor.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(SfpError::Solver("non-finite series coefficient".into()));
    }
    let n = plan.numerator;
    let m = plan.denominator;
    let logs: Vec<Vec<C64>> = jumps.iter().map(|&e| log_series(e, u + 1)).collect();
    let cols = plan.unknowns();
    let rows = u - n;
    let mut a = DMatrix::<C64>::zeros(rows, cols);
    for (i, order) in (n + 1..=u).enumerate() {
        for j in 0..=m.min(order) {
            a[(i, j)] = taylor[order - j];
        }
        let mut off = m + 1;
        for (s, &deg) in plan.log_degrees.iter().enumerate() {
            for j in 0..=deg.min(order) {
                a[(i, off + j)] = -logs[s][order - j];
            }
            off += deg + 1;
        }
    }
    let (v, diagnostics) = null_vector(a)?;
    let q = v[..=m].to_vec();
    let mut ls = Vec::with_capacity(jumps.len());
    let mut off = m + 1;
    for &deg in &plan.log_degrees {
        ls.push(v[off..=off + deg].to_vec());
        off += deg + 1;
    }
    let p = (0..=n)
        .map(|order| {
            let mut acc: C64 = (0..=m.min(order)).map(|j| taylor[order - j] * q[j]).sum();
            for (s, l) in ls.iter().enumerate() {
                acc -= (0..l.len().min(order + 1)).map(|j| logs[s][order - j] * l[j]).sum::<C64>();
            }
            acc
        })
        .collect();
    Ok(PadeForm { p, q, logs: ls, jumps: jumps.to_vec(), diagnostics })
}

/// Solve, then while the constraint matrix has a null space of dimension
/// `k > 1`, drop `k − 1` degrees of freedom and re-solve.
pub fn solve_taylor_reduced(taylor: &[C64], jumps: &[C64], plan: &DegreePlan) -> Result<PadeForm> {
    let mut plan = plan.clone();
    loop {
        let form = solve_taylor(taylor, jumps, &plan)?;
        let excess = form.diagnostics.null_dim - 1;
        if excess == 0 || plan.terms < jumps.len() + 2 + excess {
            return Ok(form);
        }
        plan = allocate_degrees(plan.terms - excess, jumps.len())?;
    }
}

/// `log(1 − w)`, using the half-angle form on the unit circle to avoid
/// cancellation next to `w = 1`.
fn log_one_minus(w: C64) -> C64 {
    if (w.norm() - 1.0).abs() < 1e-14 {
        let phi = w.arg();
        let half = 0.5 * phi;
        C64::new((2.0 * half.sin().abs()).ln(), half - std::f64::consts::FRAC_PI_2 * half.signum())
    } else {
        (1.0 - w).ln()
    }
}

/// Plain Fourier-Padé `[N/M]` approximant.
pub fn fourier_pade(taylor: &[C64], numerator: usize, denominator: usize) -> Result<PadeForm> {
    solve_taylor(taylor, &[], &DegreePlan::explicit(numerator, denominator, vec![]))
}

impl PadeForm {
    pub fn eval_z(&self, z: C64) -> Evaluation {
        let z = if self.jumps.iter().any(|&e| (z - e).norm() < 1e-14) {
            z * C64::from_polar(1.0, 1e-12)
        } else {
            z
        };
        let mut num = horner(&self.p, z);
        for (l, &e) in self.logs.iter().zip(&self.jumps) {
            num += horner(l, z) * log_one_minus(z / e);
        }
        let den = horner(&self.q, z);
        let qmax = self.q.iter().map(|x| x.norm()).fold(0.0, f64::max);
        Evaluation { value: (num / den).re, near_pole: den.norm() < 1e-13 * qmax }
    }

    /// Coefficients of `z^0..=z^terms` in `P + Σ L_s log(1−z/ε_s) − f·Q`.
    pub fn defect(&self, taylor: &[C64], terms: usize) -> Vec<C64> {
        let logs: Vec<Vec<C64>> = self.jumps.iter().map(|&e| log_series(e, terms + 1)).collect();
        (0..=terms)
            .map(|k| {
                let mut acc = self.p.get(k).copied().unwrap_or(ZERO);
                for (l, ser) in self.logs.iter().zip(&logs) {
                    acc += (0..l.len().min(k + 1)).map(|j| l[j] * ser[k - j]).sum::<C64>();
                }
                acc - (0..self.q.len().min(k + 1)).map(|j| self.q[j] * taylor[k - j]).sum::<C64>()
            })
            .collect()
    }
}

/// Approximant tied to a truncation interval so it can be evaluated at a
/// log-moneyness point.
#[derive(Debug, Clone, PartialEq)]
pub struct SfpApproximant {
    pub form: PadeForm,
    pub interval: TruncationInterval,
}

pub fn solve_sfp(series: &SeriesCoefficients, jumps: &[C64], plan: &DegreePlan) -> Result<SfpApproximant> {
    Ok(SfpApproximant { form: solve_taylor(&series.taylor, jumps, plan)?, interval: series.interval })
}

/// As [`solve_sfp`], shrinking the budget until the null space is simple.
pub fn solve_sfp_reduced(series: &SeriesCoefficients, jumps: &[C64], plan: &DegreePlan) -> Result<SfpApproximant> {
    Ok(SfpApproximant { form: solve_taylor_reduced(&series.taylor, jumps, plan)?, interval: series.interval })
}

impl SfpApproximant {
    pub fn evaluate_checked(&self, y1: f64) -> Evaluation {
        self.form.eval_z(self.interval.z(y1))
    }

    pub fn evaluate(&self, y1: f64) -> f64 {
        self.evaluate_checked(y1).value
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.form.diagnostics
    }
}
