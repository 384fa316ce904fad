// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("point ({x}, {y}) lies outside the cell of radius {radius}")]
    OutOfCell { x: f64, y: f64, radius: f64 },

    #[error("path-loss exponent {0} has no closed form (supported: 2, 4)")]
    UnsupportedAlpha(f64),

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },

    #[error("no antenna height in (0, {upper}] meets the target density")]
    NonBracketing { upper: f64 },

    #[error("h_C = {h_c} outside the legal regime [{lower}, {upper})")]
    Regime { h_c: f64, lower: f64, upper: f64 },

    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root isolation exceeded depth {0}")]
    MaxDepth(usize),

    #[error("no root of the stationarity polynomial in ({lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
