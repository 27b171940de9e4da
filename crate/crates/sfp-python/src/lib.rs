//! Python bindings for the `sfp` pricer.

use sfp::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use sfp::jumps::{detect_jumps as detect, DEFAULT_SPIKE_FACTOR};
use sfp::pricing::{density_curve, CallRoute, CurveGrid, IntervalMode, JumpMode, PriceRequest};
use sfp::reference::{bsm_analytic as analytic, cos_price as cos, BsmKind};
use sfp::series::{default_multiplier, truncation_interval};
use sfp::{PayoffKind, SfpError};

fn py_err(e: SfpError) -> PyErr {
    match e {
        SfpError::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyModel {
    inner: sfp::Model,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (vol, rate, dividend = 0.0))]
    fn bsm(vol: f64, rate: f64, dividend: f64) -> PyResult<Self> {
        Self::checked(sfp::Model::Bsm { vol, rate, dividend })
    }

    #[staticmethod]
    #[pyo3(signature = (vol, drift, variance_rate, rate, dividend = 0.0))]
    fn vg(vol: f64, drift: f64, variance_rate: f64, rate: f64, dividend: f64) -> PyResult<Self> {
        Self::checked(sfp::Model::Vg { vol, drift, variance_rate, rate, dividend })
    }

    #[staticmethod]
    #[pyo3(signature = (c, g, m, y, rate, dividend = 0.0))]
    fn cgmy(c: f64, g: f64, m: f64, y: f64, rate: f64, dividend: f64) -> PyResult<Self> {
        Self::checked(sfp::Model::Cgmy { activity: c, decay_down: g, decay_up: m, fine_structure: y, rate, dividend })
    }

    #[staticmethod]
    #[pyo3(signature = (v0, long_var, reversion, vol_of_vol, rho, rate, dividend = 0.0))]
    fn heston(v0: f64, long_var: f64, reversion: f64, vol_of_vol: f64, rho: f64, rate: f64, dividend: f64) -> PyResult<Self> {
        Self::checked(sfp::Model::Heston { v0, long_var, reversion, vol_of_vol, rho, rate, dividend })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    /// Characteristic function of the log-return at time `t`.
    fn cf(&self, u: Complex64, t: f64) -> PyResult<Complex64> {
        self.inner.characteristic_fn(u, t).map_err(py_err)
    }

    /// `(c1, c2, c4)` at time `t`.
    fn cumulants(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        let c = self.inner.cumulants(t).map_err(py_err)?;
        Ok((c.c1, c.c2, c.c4))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

impl PyModel {
    fn checked(inner: sfp::Model) -> PyResult<Self> {
        inner.validate().map_err(py_err)?;
        Ok(PyModel { inner })
    }
}

#[pyclass(name = "Contract", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyContract {
    inner: sfp::Contract,
}

#[pymethods]
impl PyContract {
    #[new]
    #[pyo3(signature = (kind, strike, maturity, power = None))]
    fn new(kind: &str, strike: f64, maturity: f64, power: Option<u32>) -> PyResult<Self> {
        let kind = PayoffKind::from_name(kind, power).map_err(py_err)?;
        Ok(PyContract { inner: sfp::Contract::new(kind, strike, maturity).map_err(py_err)? })
    }

    #[getter]
    fn strike(&self) -> f64 {
        self.inner.strike
    }

    #[getter]
    fn maturity(&self) -> f64 {
        self.inner.maturity
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "PriceResult", frozen, get_all)]
pub struct PyPriceResult {
    value: f64,
    delta: Option<f64>,
    gamma: Option<f64>,
    vega: Option<f64>,
    near_pole: bool,
    terms_used: usize,
    jump_locations: Vec<f64>,
    interval: (f64, f64),
    condition: f64,
}

#[pymethods]
impl PyPriceResult {
    fn __repr__(&self) -> String {
        format!("PriceResult(value={:.16e}, terms_used={})", self.value, self.terms_used)
    }
}

fn parse_jumps(jumps: Option<&Bound<'_, PyAny>>) -> PyResult<JumpMode> {
    let Some(j) = jumps else { return Ok(JumpMode::Auto) };
    if let Ok(name) = j.extract::<String>() {
        return match name.as_str() {
            "auto" => Ok(JumpMode::Auto),
            "endpoints" => Ok(JumpMode::EndpointsOnly),
            "model" => Ok(JumpMode::Model),
            other => Err(PyValueError::new_err(format!("unknown jump mode '{other}'"))),
        };
    }
    Ok(JumpMode::Explicit(j.extract::<Vec<f64>>()?))
}

#[allow(clippy::too_many_arguments)]
fn build_request(
    model: &PyModel,
    contract: &PyContract,
    spot: f64,
    terms: usize,
    jumps: Option<&Bound<'_, PyAny>>,
    padding: Option<f64>,
    multiplier: Option<f64>,
    direct_call: bool,
) -> PyResult<PriceRequest> {
    let mut req = PriceRequest::new(model.inner, contract.inner, spot, terms);
    req.jumps = parse_jumps(jumps)?;
    req.padding = padding;
    req.multiplier = multiplier;
    if direct_call {
        req.call_route = CallRoute::Direct;
    }
    Ok(req)
}

#[pyfunction]
#[pyo3(signature = (model, contract, spot, terms = 64, jumps = None, padding = None, multiplier = None, direct_call = false, greeks = false))]
#[allow(clippy::too_many_arguments)]
fn price(
    py: Python<'_>,
    model: PyModel,
    contract: PyContract,
    spot: f64,
    terms: usize,
    jumps: Option<&Bound<'_, PyAny>>,
    padding: Option<f64>,
    multiplier: Option<f64>,
    direct_call: bool,
    greeks: bool,
) -> PyResult<PyPriceResult> {
    let req = build_request(&model, &contract, spot, terms, jumps, padding, multiplier, direct_call)?;
    let res = py
        .detach(|| if greeks { sfp::price_with_greeks(&req) } else { sfp::price(&req) })
        .map_err(py_err)?;
    Ok(PyPriceResult {
        value: res.value,
        delta: res.greeks.map(|g| g.delta),
        gamma: res.greeks.map(|g| g.gamma),
        vega: res.greeks.and_then(|g| g.vega),
        near_pole: res.near_pole,
        terms_used: res.terms_used,
        jump_locations: res.jump_locations,
        interval: (res.interval.c, res.interval.d),
        condition: res.diagnostics.condition,
    })
}

/// Prices over a strike grid or a spot grid (exactly one of the two).
#[pyfunction]
#[pyo3(signature = (model, contract, spot, terms = 64, strikes = None, spots = None, shared = false, jumps = None, padding = None))]
#[allow(clippy::too_many_arguments)]
fn price_curve(
    py: Python<'_>,
    model: PyModel,
    contract: PyContract,
    spot: f64,
    terms: usize,
    strikes: Option<Vec<f64>>,
    spots: Option<Vec<f64>>,
    shared: bool,
    jumps: Option<&Bound<'_, PyAny>>,
    padding: Option<f64>,
) -> PyResult<Vec<f64>> {
    let grid = match (strikes, spots) {
        (Some(k), None) => CurveGrid::Strikes(k),
        (None, Some(s)) => CurveGrid::Spots(s),
        _ => return Err(PyValueError::new_err("pass exactly one of strikes or spots")),
    };
    let mut req = build_request(&model, &contract, spot, terms, jumps, padding, None, false)?;
    if shared {
        req.interval_mode = IntervalMode::Shared;
    }
    let res = py.detach(|| sfp::price_curve(&req, &grid)).map_err(py_err)?;
    Ok(res.iter().map(|r| r.value).collect())
}

/// Interior jump locations and their spike magnitudes.
#[pyfunction]
#[pyo3(signature = (model, maturity, terms = 64, bound = 0.0, padding = 0.0, spike_factor = DEFAULT_SPIKE_FACTOR))]
fn detect_jumps(
    model: PyModel,
    maturity: f64,
    terms: usize,
    bound: f64,
    padding: f64,
    spike_factor: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let iv = truncation_interval(&model.inner, maturity, bound, default_multiplier(&model.inner), padding)
        .map_err(py_err)?;
    let r = detect(&model.inner, maturity, &iv, terms, spike_factor).map_err(py_err)?;
    Ok((r.locations, r.spike_magnitudes))
}

/// Reconstructed log-return density as `(y, f(y))` samples.
#[pyfunction]
#[pyo3(signature = (model, maturity, terms = 64, samples = 1025))]
fn density(model: PyModel, maturity: f64, terms: usize, samples: usize) -> PyResult<Vec<(f64, f64)>> {
    let contract = sfp::Contract::new(PayoffKind::Put, 1.0, maturity).map_err(py_err)?;
    density_curve(&PriceRequest::new(model.inner, contract, 1.0, terms), samples).map_err(py_err)
}

/// Closed-form Black-Scholes price, delta and gamma.
#[pyfunction]
#[pyo3(signature = (spot, strike, rate, dividend, vol, maturity, kind = "call"))]
fn bsm_analytic(
    spot: f64,
    strike: f64,
    rate: f64,
    dividend: f64,
    vol: f64,
    maturity: f64,
    kind: &str,
) -> PyResult<(f64, f64, f64)> {
    let kind = match kind {
        "call" => BsmKind::Call,
        "put" => BsmKind::Put,
        "cash-or-nothing-call" => BsmKind::CashCall,
        "cash-or-nothing-put" => BsmKind::CashPut,
        other => return Err(PyValueError::new_err(format!("no closed form for '{other}'"))),
    };
    let a = analytic(spot, strike, rate, dividend, vol, maturity, kind);
    Ok((a.price, a.delta, a.gamma))
}

/// COS price on `[a, b]` with `n` cosine terms.
#[pyfunction]
fn cos_price(model: PyModel, contract: PyContract, spot: f64, a: f64, b: f64, n: usize) -> PyResult<f64> {
    cos(&model.inner, &contract.inner, spot, a, b, n).map_err(py_err)
}

#[pymodule]
fn sfp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyContract>()?;
    m.add_class::<PyPriceResult>()?;
    m.add_function(wrap_pyfunction!(price, m)?)?;
    m.add_function(wrap_pyfunction!(price_curve, m)?)?;
    m.add_function(wrap_pyfunction!(detect_jumps, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(bsm_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(cos_price, m)?)?;
    Ok(())
}
