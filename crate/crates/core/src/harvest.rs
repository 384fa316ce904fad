// SPDX-License-Identifier: Apache-2.0

//! Ergodic and cell-averaged harvested DC power, and transfer efficiency.
//!
//! A user at ground distance `d_i` from antenna `i` harvests on average
//! `K₀ Σ P_i / d_i^α` (fading and random phases averaged out). Averaging
//! that over users distributed uniformly on the disc of radius `R` gives the
//! cell-average power; dividing by `P` gives the efficiency.
//!
//! For a ring deployment the cell average reduces, by rotational symmetry,
//! to `K₀ P / (π R²) · Q` with
//!
//! ```text
//! Q = ∫₀^{2π} ∫₀^R ρ / d₁(ρ, θ)^α dρ dθ,   d₁² = ρ² + r² − 2ρr cos θ + h_D²
//! ```
//!
//! which has elementary closed forms for α = 2 and α = 4 and is otherwise
//! evaluated by nested adaptive quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{dae_positions, GroundPoint};
use crate::quadrature::{integrate, Tolerance};
use crate::scenario::{Deployment, Rectenna, Scenario};

/// Below this distance from 2 the path-loss exponent is treated as exactly 2.
const ALPHA2_WINDOW: f64 = 1e-9;

/// Cell-average figures of one deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    /// Mean harvested DC power per user, in watts.
    pub avg_power: f64,
    /// `avg_power / P`.
    pub efficiency: f64,
    pub deployment: Deployment,
    pub alpha: f64,
}

#[inline]
fn inv_pow(d2: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / d2
    } else if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

fn check_in_cell(s: &Scenario, p: GroundPoint) -> Result<()> {
    if p.norm() > s.cell_radius {
        return Err(Error::OutOfCell { x: p.x, y: p.y, radius: s.cell_radius });
    }
    Ok(())
}

/// Fading-averaged harvested power of a user at `point`.
pub fn ergodic_power_at(s: &Scenario, rect: &Rectenna, dep: &Deployment, point: GroundPoint) -> Result<f64> {
    check_in_cell(s, point)?;
    let k0 = rect.k0();
    Ok(match *dep {
        Deployment::Colocated { height } => {
            let d2 = point.x * point.x + point.y * point.y + height * height;
            k0 * s.power * inv_pow(d2, s.alpha)
        }
        Deployment::Distributed { radius, height } => {
            let layout = dae_positions(radius, s.antennas, height);
            let sum: f64 = layout.positions.iter().map(|a| inv_pow(a.dist2(point), s.alpha)).sum();
            k0 * s.power / s.antennas as f64 * sum
        }
    })
}

/// Cell-average efficiency of a co-located beacon at height `h_c`.
fn efficiency_ca(s: &Scenario, rect: &Rectenna, h_c: f64) -> f64 {
    rect.k0() / (PI * s.cell_radius * s.cell_radius) * q_colocated(s.alpha, s.cell_radius, h_c)
}

/// `Q` for a ring of radius zero at height `h`, any α ≥ 2:
/// `2π ∫₀^R ρ (ρ² + h²)^{−α/2} dρ`.
fn q_colocated(alpha: f64, cell_radius: f64, h: f64) -> f64 {
    let (r2, h2) = (cell_radius * cell_radius, h * h);
    let e = alpha - 2.0;
    let log_ratio = (r2 / h2).ln_1p();
    if e.abs() < ALPHA2_WINDOW {
        PI * log_ratio
    } else {
        // h^{−e} − (R² + h²)^{−e/2} = h^{−e} (1 − (1 + R²/h²)^{−e/2})
        let diff = h.powf(-e) * -(-0.5 * e * log_ratio).exp_m1();
        2.0 * PI / e * diff
    }
}

/// Cell-average harvested power of a co-located beacon at height `h_c`.
pub fn avg_power_ca(s: &Scenario, rect: &Rectenna, h_c: f64) -> f64 {
    efficiency_ca(s, rect, h_c) * s.power
}

/// Closed-form `Q` for α ∈ {2, 4}.
pub fn q_integral_closed(alpha: f64, cell_radius: f64, r: f64, h_d: f64) -> Result<f64> {
    let (rr, r2, h2) = (cell_radius * cell_radius, r * r, h_d * h_d);
    if alpha == 2.0 {
        let a = rr + h2 - r2;
        Ok(PI * ((a + (a * a + 4.0 * r2 * h2).sqrt()) / (2.0 * h2)).ln())
    } else if alpha == 4.0 {
        let s = (rr * rr + rr * (2.0 * h2 - 2.0 * r2) + (r2 + h2).powi(2)).sqrt();
        Ok(PI * (rr - h2 - r2 + s) / (2.0 * h2 * s))
    } else {
        Err(Error::UnsupportedAlpha(alpha))
    }
}

/// The α = 2 closed form written as a difference of inverse hyperbolic
/// sines. Undefined at `r = 0`, where the logarithmic form applies.
pub fn q_integral_arcsinh(cell_radius: f64, r: f64, h_d: f64) -> f64 {
    let scale = 2.0 * r * h_d;
    let (r2, h2) = (r * r, h_d * h_d);
    PI * (((cell_radius * cell_radius + h2 - r2) / scale).asinh() - ((h2 - r2) / scale).asinh())
}

/// `Q` by nested adaptive quadrature, to about `1e-10` relative accuracy.
pub fn q_integral_numeric(alpha: f64, cell_radius: f64, r: f64, h_d: f64) -> Result<f64> {
    let inner_tol = Tolerance::relative(1e-12);
    let outer_tol = Tolerance::relative(1e-10);
    let h2 = h_d * h_d;
    let failure = std::cell::Cell::new(None);
    // ∫₀^{2π} d₁^{−α} dθ with d₁² = (ρ − r)² + h² + 4ρr sin²(θ/2), folded onto [0, π].
    let ring_integral = |rho: f64| -> f64 {
        let base = (rho - r).powi(2) + h2;
        let k = 4.0 * rho * r;
        let f = |t: f64| {
            let s = (0.5 * t).sin();
            inv_pow(base + k * s * s, alpha)
        };
        match integrate(f, 0.0, PI, inner_tol) {
            Ok(est) => 2.0 * est.value,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let radial = |rho: f64| rho * ring_integral(rho);
    // The integrand peaks sharply near ρ = r when h_D is small.
    let mut total = 0.0;
    let mut error = 0.0;
    let pieces: &[(f64, f64)] = if r > 0.0 && r < cell_radius {
        &[(0.0, r), (r, cell_radius)]
    } else {
        &[(0.0, cell_radius)]
    };
    for &(a, b) in pieces {
        let est = integrate(radial, a, b, outer_tol)?;
        total += est.value;
        error += est.error;
    }
    if let Some(Error::ToleranceNotMet { error: inner, .. }) = failure.take() {
        return Err(Error::ToleranceNotMet { estimate: total, error: error.max(inner) });
    }
    Ok(total)
}

/// `Q` by the cheapest exact route: closed forms for α ∈ {2, 4}, the
/// one-dimensional radial formula for a ring of radius zero, quadrature
/// otherwise.
pub fn q_integral(alpha: f64, cell_radius: f64, r: f64, h_d: f64) -> Result<f64> {
    if alpha == 2.0 || alpha == 4.0 {
        q_integral_closed(alpha, cell_radius, r, h_d)
    } else if r == 0.0 {
        Ok(q_colocated(alpha, cell_radius, h_d))
    } else {
        q_integral_numeric(alpha, cell_radius, r, h_d)
    }
}

/// Cell-average harvested power of a ring deployment. Independent of the
/// number of antennas.
pub fn avg_power_da(s: &Scenario, rect: &Rectenna, r: f64, h_d: f64) -> Result<f64> {
    Ok(efficiency_da(s, rect, r, h_d)? * s.power)
}

fn efficiency_da(s: &Scenario, rect: &Rectenna, r: f64, h_d: f64) -> Result<f64> {
    let q = q_integral(s.alpha, s.cell_radius, r, h_d)?;
    Ok(rect.k0() / (PI * s.cell_radius * s.cell_radius) * q)
}

/// `(1/2π) ∫₀^{2π} (a − b cos θ)^{−α/2} dθ` for a user at distance `r_ms`
/// from the center of a continuous ring, by quadrature.
fn circular_average(alpha: f64, r: f64, h_d: f64, r_ms: f64) -> Result<f64> {
    let base = (r_ms - r).powi(2) + h_d * h_d;
    let k = 4.0 * r_ms * r;
    let f = |t: f64| {
        let s = (0.5 * t).sin();
        inv_pow(base + k * s * s, alpha)
    };
    Ok(integrate(f, 0.0, PI, Tolerance::relative(1e-10))?.value / PI)
}

/// Ergodic harvested power at distance `r_ms` from the center of a ring with
/// infinitely many antennas.
///
/// Equals `K₀P [(a² − b²)]^{−α/4} P_{α/2−1}(a / √(a² − b²))` with
/// `a = r_ms² + r² + h_D²`, `b = 2 r r_ms` and `P_ν` the Legendre function;
/// α = 2 and α = 4 reduce to elementary expressions, other exponents are
/// evaluated through the circular-average integral.
pub fn radial_profile_da(s: &Scenario, rect: &Rectenna, r: f64, h_d: f64, r_ms: f64) -> Result<f64> {
    if !(0.0..=s.cell_radius).contains(&r_ms) {
        return Err(Error::OutOfCell { x: r_ms, y: 0.0, radius: s.cell_radius });
    }
    let k0p = rect.k0() * s.power;
    let h2 = h_d * h_d;
    let disc = ((r_ms - r).powi(2) + h2) * ((r_ms + r).powi(2) + h2);
    if s.alpha == 2.0 {
        Ok(k0p / disc.sqrt())
    } else if s.alpha == 4.0 {
        let a = r_ms * r_ms + r * r + h2;
        Ok(k0p * a / (disc * disc.sqrt()))
    } else {
        Ok(k0p * circular_average(s.alpha, r, h_d, r_ms)?)
    }
}

/// Legendre function of the first kind `P_ν(x)` for `x ≥ 1`, from Laplace's
/// integral `(1/π) ∫₀^π (x + √(x²−1) cos t)^ν dt`.
pub fn legendre_p(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::Invalid { key: "x", reason: format!("{x} < 1") });
    }
    let w = (x * x - 1.0).sqrt();
    let f = |t: f64| (x + w * t.cos()).powf(nu);
    Ok(integrate(f, 0.0, PI, Tolerance::relative(1e-12))?.value / PI)
}

/// Cell-average efficiency `avg_power / P`; independent of `P`.
pub fn efficiency(s: &Scenario, rect: &Rectenna, dep: &Deployment) -> Result<f64> {
    match *dep {
        Deployment::Colocated { height } => Ok(efficiency_ca(s, rect, height)),
        Deployment::Distributed { radius, height } => efficiency_da(s, rect, radius, height),
    }
}

pub fn power_report(s: &Scenario, rect: &Rectenna, dep: &Deployment) -> Result<PowerReport> {
    let avg_power = efficiency(s, rect, dep)? * s.power;
    Ok(PowerReport {
        avg_power,
        efficiency: avg_power / s.power,
        deployment: *dep,
        alpha: s.alpha,
    })
}

/// Transmit power needed for the cell-average harvested power to reach
/// `target` watts.
pub fn required_power(target: f64, s: &Scenario, rect: &Rectenna, dep: &Deployment) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::Invalid { key: "target", reason: format!("{target} must be positive") });
    }
    Ok(target / efficiency(s, rect, dep)?)
}
