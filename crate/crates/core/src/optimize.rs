// SPDX-License-Identifier: Apache-2.0

//! Efficiency-optimal ring radius.
//!
//! With the ring height pinned to the safety law, the cell-average
//! efficiency is a function of the ring radius `r` alone. For α = 2 its
//! maximizer has a closed form. For α = 4 the stationarity condition is a
//! degree-8 polynomial in `x = r²`, solved here with Sturm root counting and
//! bisection in the scaled variable `u = x / R²`. A derivative-free search
//! over a quadrature-evaluated objective serves as the oracle for both.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::da_height_asymptotic;
use crate::harvest::{efficiency, q_integral_numeric};
use crate::polyroots::{bisect_root, count_roots, isolate_roots, Polynomial, RootBracket};
use crate::scenario::{height_regime, validate_height_regime, Deployment, Rectenna, Scenario};
use crate::search::scan_then_golden;

/// Default bisection tolerance in the scaled variable.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Candidates whose efficiencies differ by less than this (relative) are tied.
const TIE_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedFormAlpha2,
    SturmAlpha4,
    NumericOracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedFormAlpha2 => "closed_form_alpha2",
            Method::SturmAlpha4 => "sturm_alpha4",
            Method::NumericOracle => "numeric_oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSolution {
    pub r_star: f64,
    pub efficiency_at_r_star: f64,
    pub method: Method,
    /// `(radius, efficiency)` pairs the solver compared.
    pub candidates: Vec<(f64, f64)>,
}

fn check_regime(s: &Scenario, h_c: f64) -> Result<()> {
    if validate_height_regime(s, h_c) {
        Ok(())
    } else {
        let (lower, upper) = height_regime(s);
        Err(Error::Regime { h_c, lower, upper })
    }
}

/// Cell-average efficiency of a ring of radius `r` at the safe height for
/// co-located height `h_c`, under path-loss exponent `alpha`.
pub fn objective(s: &Scenario, rect: &Rectenna, alpha: f64, h_c: f64, r: f64) -> Result<f64> {
    check_regime(s, h_c)?;
    if !(0.0..=s.cell_radius).contains(&r) {
        return Err(Error::Invalid { key: "r", reason: format!("{r} outside [0, {}]", s.cell_radius) });
    }
    let dep = Deployment::Distributed { radius: r, height: da_height_asymptotic(r, h_c) };
    efficiency(&s.with_alpha(alpha), rect, &dep)
}

/// The objective with `Q` always taken from nested quadrature.
fn objective_quadrature(s: &Scenario, rect: &Rectenna, alpha: f64, h_c: f64, r: f64) -> Result<f64> {
    let q = q_integral_numeric(alpha, s.cell_radius, r, da_height_asymptotic(r, h_c))?;
    Ok(rect.k0() / (PI * s.cell_radius * s.cell_radius) * q)
}

/// `r* = ½ √(R² + √(R⁴ + 4 h_C⁴))`.
pub fn optimal_radius_alpha2(s: &Scenario, rect: &Rectenna, h_c: f64) -> Result<RadiusSolution> {
    check_regime(s, h_c)?;
    let r2 = s.cell_radius * s.cell_radius;
    let r_star = 0.5 * (r2 + (r2 * r2 + 4.0 * h_c.powi(4)).sqrt()).sqrt();
    let eff = objective(s, rect, 2.0, h_c, r_star)?;
    Ok(RadiusSolution {
        r_star,
        efficiency_at_r_star: eff,
        method: Method::ClosedFormAlpha2,
        candidates: vec![(r_star, eff)],
    })
}

/// Stationarity polynomial of the α = 4 objective in `x = r²`, valid for
/// `r > h_C/√2`.
pub fn build_octic(cell_radius: f64, h_c: f64) -> Polynomial {
    let r2 = cell_radius * cell_radius;
    let h4 = h_c.powi(4);
    let h8 = h4 * h4;
    let descending = [
        256.0,
        -768.0 * r2,
        128.0 * (6.0 * r2 * r2 + h4),
        224.0 * h4 * r2 - 256.0 * r2.powi(3),
        -192.0 * r2 * r2 * h4,
        -32.0 * r2 * h4 * (r2 * r2 + 2.0 * h4),
        -8.0 * h8 * (4.0 * r2 * r2 + h4),
        -10.0 * r2 * h8 * h4,
        -h8 * h8,
    ];
    Polynomial::new(descending.iter().rev().copied().collect())
}

/// The octic in `u = x / R²`, divided by `R¹⁶`. With `η = h_C² / R²` every
/// coefficient is a low-degree polynomial in `η ∈ (0, 1)`.
pub fn build_octic_scaled(cell_radius: f64, h_c: f64) -> Polynomial {
    let eta = (h_c / cell_radius).powi(2);
    let e2 = eta * eta;
    let e4 = e2 * e2;
    let descending = [
        256.0,
        -768.0,
        128.0 * (6.0 + e2),
        224.0 * e2 - 256.0,
        -192.0 * e2,
        -32.0 * e2 * (1.0 + 2.0 * e2),
        -8.0 * e4 * (4.0 + e2),
        -10.0 * e4 * e2,
        -e4 * e4,
    ];
    Polynomial::new(descending.iter().rev().copied().collect())
}

/// Index of the best candidate; near-ties go to the smaller radius.
fn pick_best(candidates: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (k, &(r, e)) in candidates.iter().enumerate().skip(1) {
        let (br, be) = candidates[best];
        let tie = (e - be).abs() <= TIE_RELATIVE * e.abs().max(be.abs());
        if (tie && r < br) || (!tie && e > be) {
            best = k;
        }
    }
    best
}

/// α = 4 optimum: count the roots of the scaled octic on `(η/2, 1]`, refine
/// each by bisection to `eps`, and keep the radius with the highest
/// efficiency.
pub fn optimal_radius_alpha4(s: &Scenario, rect: &Rectenna, h_c: f64, eps: f64) -> Result<RadiusSolution> {
    check_regime(s, h_c)?;
    let big_r = s.cell_radius;
    let p = build_octic_scaled(big_r, h_c);
    let (lo, hi) = (0.5 * (h_c / big_r).powi(2), 1.0);
    let roots = match count_roots(&p, lo, hi) {
        0 => return Err(Error::NoRoot { lo: lo * big_r * big_r, hi: big_r * big_r }),
        1 => vec![bisect_root(&p, RootBracket { lo, hi }, eps)?],
        _ => isolate_roots(&p, lo, hi)?
            .into_iter()
            .map(|b| bisect_root(&p, b, eps))
            .collect::<Result<Vec<_>>>()?,
    };
    let candidates = roots
        .into_iter()
        .map(|u| {
            let r = big_r * u.sqrt();
            objective(s, rect, 4.0, h_c, r).map(|e| (r, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let (r_star, eff) = candidates[pick_best(&candidates)];
    Ok(RadiusSolution { r_star, efficiency_at_r_star: eff, method: Method::SturmAlpha4, candidates })
}

/// Grid points in the oracle's initial scan.
pub const ORACLE_SCAN_POINTS: usize = 200;

/// Derivative-free maximization over `r ∈ (0, R]` of the efficiency with
/// `Q` from quadrature: a 200-point scan, then golden section to `10⁻⁶ R`.
/// Works for any α in the supported range.
pub fn optimal_radius_numeric(s: &Scenario, rect: &Rectenna, h_c: f64, alpha: f64) -> Result<RadiusSolution> {
    check_regime(s, h_c)?;
    s.with_alpha(alpha).validate()?;
    let big_r = s.cell_radius;
    let mut candidates = Vec::new();
    let mut failure = None;
    let step = big_r / ORACLE_SCAN_POINTS as f64;
    let (r_star, eff) = scan_then_golden(
        |r| match objective_quadrature(s, rect, alpha, h_c, r) {
            Ok(e) => {
                candidates.push((r, e));
                e
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        step,
        big_r,
        ORACLE_SCAN_POINTS,
        1e-6 * big_r,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RadiusSolution { r_star, efficiency_at_r_star: eff, method: Method::NumericOracle, candidates })
}
