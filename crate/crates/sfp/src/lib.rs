//! Singular Fourier-Padé pricing of European claims from characteristic
//! functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod jumps;
pub mod models;
pub mod payoffs;
pub mod pricing;
pub mod reference;
pub mod series;
pub mod sfp_core;

pub use error::{Result, SfpError};
pub use models::{Cumulants, Model};
pub use num_complex::Complex64;
pub use payoffs::{Contract, PayoffKind};
pub use pricing::{price, price_curve, price_with_greeks, CallRoute, CurveGrid, IntervalMode, JumpMode, PriceRequest};
