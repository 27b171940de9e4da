use num_complex::Complex64 as C64;
use proptest::prelude::*;

use sfp::pricing::{delta, gamma, price, price_curve, CallRoute, CurveGrid, JumpMode, PriceRequest};
use sfp::reference::{bsm_analytic, BsmKind};
use sfp::series::{cfs_coefficients, truncation_interval};
use sfp::sfp_core::{allocate_degrees, solve_taylor, DegreePlan};
use sfp::{Contract, Model, PayoffKind};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn any_model() -> impl Strategy<Value = Model> {
    let rate = 0.0..0.08f64;
    let div = 0.0..0.04f64;
    prop_oneof![
        (0.05..0.6f64, rate.clone(), div.clone()).prop_map(|(vol, rate, dividend)| Model::Bsm { vol, rate, dividend }),
        (0.05..0.3f64, -0.3..0.3f64, 0.05..0.5f64, rate.clone(), div.clone()).prop_map(
            |(vol, drift, variance_rate, rate, dividend)| Model::Vg { vol, drift, variance_rate, rate, dividend }
        ),
        (0.2..2.0f64, 3.0..8.0f64, 3.0..8.0f64, 0.1..1.8f64, rate.clone(), div.clone()).prop_map(
            |(activity, decay_down, decay_up, fine_structure, rate, dividend)| Model::Cgmy {
                activity,
                decay_down,
                decay_up,
                fine_structure,
                rate,
                dividend
            }
        ),
        (0.01..0.08f64, 0.01..0.08f64, 0.5..3.0f64, 0.1..0.8f64, -0.9..0.5f64, rate, div).prop_map(
            |(v0, long_var, reversion, vol_of_vol, rho, rate, dividend)| Model::Heston {
                v0,
                long_var,
                reversion,
                vol_of_vol,
                rho,
                rate,
                dividend
            }
        ),
    ]
}

/// Models whose density a 64-term expansion resolves well: no CGMY with
/// `Y < 0.5` and no Heston far outside the Feller region, both of which
/// concentrate the density into a near-singular peak.
fn resolved_model() -> impl Strategy<Value = Model> {
    any_model().prop_filter("near-singular density", |m| match *m {
        Model::Cgmy { fine_structure, .. } => fine_structure >= 0.5,
        Model::Heston { long_var, reversion, vol_of_vol, .. } => vol_of_vol * vol_of_vol <= 4.0 * reversion * long_var,
        _ => true,
    })
}

fn any_kind() -> impl Strategy<Value = PayoffKind> {
    (0usize..11, 1u32..=20).prop_map(|(i, n)| PayoffKind::from_name(PayoffKind::ALL_NAMES[i], Some(n)).unwrap())
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn characteristic_function_invariants(m in any_model(), t in 0.05..5.0f64, u in -40.0..40.0f64) {
        let one = m.characteristic_fn(C64::new(0.0, 0.0), t).unwrap();
        prop_assert!((one - 1.0).norm() < 1e-14);
        let a = m.characteristic_fn(C64::new(u, 0.0), t).unwrap();
        let b = m.characteristic_fn(C64::new(-u, 0.0), t).unwrap();
        prop_assert!((b - a.conj()).norm() < 1e-14 * (1.0 + a.norm()), "{a} vs {b}");
        prop_assert!(a.norm() <= 1.0 + 1e-14);
        let fwd = m.characteristic_fn(C64::new(0.0, -1.0), t).unwrap();
        let growth = ((m.rate() - m.dividend()) * t).exp();
        prop_assert!((fwd - growth).norm() < 1e-10, "{fwd} vs {growth}");
    }

    #[test]
    fn cumulants_match_central_differences(m in any_model(), t in 0.1..3.0f64) {
        let h = 1e-3;
        let f = |x: f64| m.log_cf(C64::new(x, 0.0), t);
        // d^n/du^n log φ = i^n c_n
        // Fourth-order stencils: the second-order ones carry h²·c3 of error.
        let d1 = (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
        let d2 = (16.0 * (f(h) + f(-h)) - (f(2.0 * h) + f(-2.0 * h)) - 30.0 * f(0.0)) / (12.0 * h * h);
        let d4 = (f(2.0 * h) - 4.0 * f(h) + 6.0 * f(0.0) - 4.0 * f(-h) + f(-2.0 * h)) / h.powi(4);
        let c = m.cumulants(t).unwrap();
        let rel = |num: f64, exact: f64| (num - exact).abs() / exact.abs().max(1e-300);
        prop_assert!(rel(d1.im, c.c1) < 1e-4 || (d1.im - c.c1).abs() < 1e-9, "c1 {} vs {}", d1.im, c.c1);
        prop_assert!(rel(-d2.re, c.c2) < 1e-4, "c2 {} vs {}", -d2.re, c.c2);
        prop_assert!(rel(d4.re, c.c4) < 1e-4 || (d4.re - c.c4).abs() < 1e-9, "c4 {} vs {}", d4.re, c.c4);
    }
}

/// Composite Gauss-Legendre rule on `[a, b]`.
fn gauss_legendre(f: impl Fn(f64) -> C64, a: f64, b: f64, panels: usize) -> C64 {
    const ORDER: usize = 16;
    let (nodes, weights) = legendre_rule(ORDER);
    let w = (b - a) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + w * (p as f64 + 0.5);
        for (x, wt) in nodes.iter().zip(&weights) {
            total += f(mid + 0.5 * w * x) * (0.5 * w * wt);
        }
    }
    total
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
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
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn payoff_transform_matches_quadrature(
        kind in any_kind(),
        k in 0i64..=32,
        strike in 0.5..150.0f64,
        c in -1.5..-0.2f64,
        d in 0.2..1.5f64,
    ) {
        let contract = Contract::new(kind, strike, 1.0).unwrap();
        let exact = contract.payoff_transform(k, c, d).unwrap();
        let omega = 2.0 * std::f64::consts::PI * k as f64 / (d - c);
        let g = |y: f64| C64::from_polar(contract.payoff_value(strike * y.exp()), omega * y);
        // The payoff kinks or jumps at y = 0, so each side is integrated separately.
        let quad = gauss_legendre(g, c, 0.0, 64) + gauss_legendre(g, 0.0, d, 64);
        prop_assert!((exact - quad).norm() < 1e-10 * (1.0 + exact.norm()), "{kind:?} k={k}: {exact} vs {quad}");
    }

    #[test]
    fn proportional_strike_scaling(kind in any_kind(), k in 0i64..=32, strike in 0.5..3.0f64) {
        let unit = Contract::new(kind, 1.0, 1.0).unwrap().payoff_transform(k, -1.0, 1.2).unwrap();
        let scaled = Contract::new(kind, strike, 1.0).unwrap().payoff_transform(k, -1.0, 1.2).unwrap();
        let factor = strike.powi(kind.strike_degree());
        prop_assert!((scaled - unit * factor).norm() < 1e-12 * (1.0 + scaled.norm()));
    }
}

/// Taylor coefficients of `p/q + l·log(1 − z/ε)` by recurrence and convolution.
fn synthetic_series(p: &[C64], q: &[C64], l: &[C64], eps: C64, len: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut rational = vec![zero; len];
    for k in 0..len {
        let mut acc = p.get(k).copied().unwrap_or(zero);
        for j in 1..q.len().min(k + 1) {
            acc -= q[j] * rational[k - j];
        }
        rational[k] = acc / q[0];
    }
    let log: Vec<C64> =
        (0..len).map(|k| if k == 0 { zero } else { -eps.powi(-(k as i32)) / k as f64 }).collect();
    (0..len)
        .map(|k| rational[k] + (0..l.len().min(k + 1)).map(|j| l[j] * log[k - j]).sum::<C64>())
        .collect()
}

fn synthetic_value(p: &[C64], q: &[C64], l: &[C64], eps: C64, z: C64) -> C64 {
    let poly = |c: &[C64]| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a);
    poly(p) / poly(q) + poly(l) * (1.0 - z / eps).ln()
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), len)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn exact_recovery_of_rational_plus_log(
        p in complex_vec(4),
        root in (1.6..3.0f64, 0.0..std::f64::consts::TAU),
        l in complex_vec(2),
        theta in 0.3..6.0f64,
        probes in prop::collection::vec(0.0..std::f64::consts::TAU, 8),
    ) {
        let r = C64::from_polar(root.0, root.1);
        let q = vec![C64::new(1.0, 0.0), -1.0 / r];
        let eps = C64::from_polar(1.0, theta);
        // p/q + l·log equals (p + l·q·log)/q, so the log block needs deg l + deg q.
        let plan = DegreePlan::explicit(p.len() - 1, q.len() - 1, vec![l.len() + q.len() - 2]);
        let taylor = synthetic_series(&p, &q, &l, eps, plan.terms + 1);
        let form = solve_taylor(&taylor, &[eps], &plan).unwrap();
        for phi in probes {
            if (phi - theta).abs() < 0.05 {
                continue;
            }
            let z = C64::from_polar(1.0, phi);
            let exact = synthetic_value(&p, &q, &l, eps, z).re;
            let got = form.eval_z(z).value;
            prop_assert!((got - exact).abs() < 1e-10 * (1.0 + exact.abs()), "phi={phi}: {got} vs {exact}");
        }
    }

    #[test]
    fn evaluation_scales_with_the_series(
        p in complex_vec(4),
        root in (1.6..3.0f64, 0.0..std::f64::consts::TAU),
        l in complex_vec(2),
        kappa in 1e-3..1e3f64,
        phi in 0.2..3.0f64,
    ) {
        let r = C64::from_polar(root.0, root.1);
        let q = vec![C64::new(1.0, 0.0), -1.0 / r];
        let eps = C64::new(-1.0, 0.0);
        let plan = DegreePlan::explicit(3, 1, vec![2]);
        let taylor = synthetic_series(&p, &q, &l, eps, plan.terms + 1);
        let scaled: Vec<C64> = taylor.iter().map(|&a| a * kappa).collect();
        let z = C64::from_polar(1.0, phi);
        let base = solve_taylor(&taylor, &[eps], &plan).unwrap().eval_z(z).value;
        let big = solve_taylor(&scaled, &[eps], &plan).unwrap().eval_z(z).value;
        prop_assert!((big - kappa * base).abs() < 1e-10 * kappa * (1.0 + base.abs()), "{big} vs {}", kappa * base);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn defining_condition_residual(m in any_model(), t in 0.1..2.0f64, strike in 80.0..120.0f64, u in 16usize..=64) {
        let contract = Contract::new(PayoffKind::Put, strike, t).unwrap();
        let iv = truncation_interval(&m, t, (100.0f64 / strike).ln().abs(), 10.0, 0.0).unwrap();
        let series = cfs_coefficients(&m, &contract, &iv, u).unwrap();
        let jumps = [C64::new(-1.0, 0.0)];
        let plan = allocate_degrees(u, 1).unwrap();
        let form = solve_taylor(&series.taylor, &jumps, &plan).unwrap();
        let norm = series.taylor.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let worst = form.defect(&series.taylor, u).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-9 * norm, "defect {worst} vs norm {norm}");
    }
}

fn bsm_model() -> impl Strategy<Value = Model> {
    (0.1..0.4f64, 0.0..0.08f64, 0.0..0.04f64).prop_map(|(vol, rate, dividend)| Model::Bsm { vol, rate, dividend })
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn put_call_parity_with_direct_legs(m in bsm_model(), t in 0.25..2.0f64, strike in 80.0..120.0f64) {
        let s0 = 100.0;
        let leg = |kind| {
            let mut r = PriceRequest::new(m, Contract::new(kind, strike, t).unwrap(), s0, 64);
            r.call_route = CallRoute::Direct;
            price(&r).unwrap().value
        };
        let (call, put) = (leg(PayoffKind::Call), leg(PayoffKind::Put));
        let fwd = s0 * (-m.dividend() * t).exp() - strike * (-m.rate() * t).exp();
        prop_assert!((call - put - fwd).abs() < 1e-8 * s0, "gap {}", call - put - fwd);
    }

    #[test]
    fn call_curve_is_non_increasing_in_strike(m in any_model(), t in 0.25..2.0f64) {
        let req = PriceRequest::new(m, Contract::new(PayoffKind::Call, 100.0, t).unwrap(), 100.0, 64);
        let ks: Vec<f64> = (0..41).map(|i| 80.0 + i as f64).collect();
        let v: Vec<f64> = price_curve(&req, &CurveGrid::Strikes(ks)).unwrap().iter().map(|r| r.value).collect();
        for w in v.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-8, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn delta_matches_difference_of_prices(m in resolved_model(), t in 0.25..2.0f64, strike in 85.0..115.0f64) {
        let s0 = 100.0;
        let req = PriceRequest::new(m, Contract::new(PayoffKind::Put, strike, t).unwrap(), s0, 64);
        // Delta holds the discretisation fixed, so the difference does too;
        // a per-point interval would otherwise move with the spot.
        let base = price(&req).unwrap();
        let pinned = PriceRequest {
            half_width: Some(base.interval.d),
            jumps: JumpMode::Explicit(base.jump_locations.clone()),
            ..req.clone()
        };
        let h = 1e-4 * s0;
        let at = |s: f64| price(&PriceRequest { spot: s, ..pinned.clone() }).unwrap().value;
        let fd = (at(s0 + h) - at(s0 - h)) / (2.0 * h);
        let d = delta(&req).unwrap();
        prop_assert!((d - fd).abs() < 1e-4, "{d} vs {fd}");
    }

    #[test]
    fn cash_or_nothing_within_discounted_bounds(m in any_model(), t in 0.25..2.0f64, strike in 85.0..115.0f64) {
        for kind in [PayoffKind::CashOrNothingCall, PayoffKind::CashOrNothingPut] {
            let req = PriceRequest::new(m, Contract::new(kind, strike, t).unwrap(), 100.0, 64);
            let v = price(&req).unwrap().value;
            prop_assert!(v >= 0.0 && v <= (-m.rate() * t).exp(), "{kind:?}: {v}");
        }
    }

    #[test]
    fn bsm_greeks_match_closed_form(m in bsm_model(), t in 0.25..2.0f64, strike in 85.0..115.0f64) {
        let Model::Bsm { vol, rate, dividend } = m else { unreachable!() };
        for (kind, bk) in [(PayoffKind::Call, BsmKind::Call), (PayoffKind::Put, BsmKind::Put)] {
            let req = PriceRequest::new(m, Contract::new(kind, strike, t).unwrap(), 100.0, 64);
            let a = bsm_analytic(100.0, strike, rate, dividend, vol, t, bk);
            let (d, g) = (delta(&req).unwrap(), gamma(&req).unwrap());
            prop_assert!((d - a.delta).abs() < 1e-6, "{kind:?} delta {d} vs {}", a.delta);
            prop_assert!((g - a.gamma).abs() < 1e-5, "{kind:?} gamma {g} vs {}", a.gamma);
        }
    }
}
