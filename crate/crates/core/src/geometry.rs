// SPDX-License-Identifier: Apache-2.0

//! Antenna layout, ground-level radiation density and safety-compliant
//! antenna heights.
//!
//! Every antenna is an isotropic radiator, so a transmitter of power `P_i`
//! produces the density `P_i / (4π d²)` at distance `d`. Users stand on the
//! ground plane `z = 0`.
//!
//! The distributed beacon is held to the same peak ground density as a
//! co-located beacon at height `h_C`, namely `P / (4π h_C²)`. For a ring of
//! `N → ∞` antennas this gives the closed-form height law
//! [`da_height_asymptotic`]; for finite `N` the height is found numerically
//! by [`da_height_finite`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::search::golden_max;

/// A point on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn new(x: f64, y: f64) -> Self {
        GroundPoint { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        GroundPoint { x: radius * angle.cos(), y: radius * angle.sin() }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Antenna element position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antenna {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Antenna {
    /// Squared distance to a user on the ground.
    #[inline]
    pub fn dist2(&self, p: GroundPoint) -> f64 {
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        dx * dx + dy * dy + self.z * self.z
    }
}

/// Uniform circular layout of distributed antenna elements.
#[derive(Debug, Clone, PartialEq)]
pub struct DaeLayout {
    pub positions: Vec<Antenna>,
}

impl DaeLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Location and value of the peak ground density of a ring deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hotspot {
    /// Distance from the cell center to the peak, in meters.
    pub nu_star: f64,
    /// Peak density in W/m².
    pub density: f64,
}

/// Places `n` antennas at angles `2π i / n` on the circle of radius `r`,
/// all at height `h_d`. The first lies on the positive x-axis.
pub fn dae_positions(r: f64, n: usize, h_d: f64) -> DaeLayout {
    let positions = (0..n)
        .map(|i| {
            let angle = 2.0 * PI * i as f64 / n as f64;
            Antenna { x: r * angle.cos(), y: r * angle.sin(), z: h_d }
        })
        .collect();
    DaeLayout { positions }
}

/// Ground density when the total power `p` is split equally across the
/// layout.
pub fn density_finite(p: f64, layout: &DaeLayout, point: GroundPoint) -> f64 {
    let per_antenna = p / (4.0 * PI * layout.len() as f64);
    layout.positions.iter().map(|a| per_antenna / a.dist2(point)).sum()
}

/// Ground density of a continuous ring (the `N → ∞` limit) at distance `nu`
/// from the center.
pub fn density_asymptotic(p: f64, r: f64, h_d: f64, nu: f64) -> f64 {
    // (r² + ν² + h²)² − 4r²ν² factored to avoid cancellation near ν = r.
    let h2 = h_d * h_d;
    let disc = ((nu - r).powi(2) + h2) * ((nu + r).powi(2) + h2);
    p / (4.0 * PI * disc.sqrt())
}

/// Hotspot of a continuous ring whose height follows the safety law for
/// co-located height `h_c`.
pub fn hotspot_asymptotic(p: f64, r: f64, h_c: f64) -> Hotspot {
    let nu_star = if r <= h_c * FRAC_1_SQRT_2 {
        0.0
    } else {
        let h = h_c * h_c / (2.0 * r);
        (r * r - h * h).max(0.0).sqrt()
    };
    let h_d = da_height_asymptotic(r, h_c);
    Hotspot { nu_star, density: density_asymptotic(p, r, h_d, nu_star) }
}

/// Ring antenna height that matches the co-located peak density, for a
/// continuous ring: `sqrt(h_C² − r²)` up to `r = h_C/√2`, then `h_C²/(2r)`.
pub fn da_height_asymptotic(r: f64, h_c: f64) -> f64 {
    if r <= h_c * FRAC_1_SQRT_2 {
        (h_c * h_c - r * r).sqrt()
    } else {
        h_c * h_c / (2.0 * r)
    }
}

/// Largest admissible total power for a co-located beacon: `4π h_C² ψ₀`.
pub fn ca_power_limit(h_c: f64, psi0: f64) -> f64 {
    4.0 * PI * h_c * h_c * psi0
}

/// Peak ground density of a finite ring within the cell.
///
/// The search covers the ray through the first antenna and the ray halfway
/// to the second one; each ray is scanned on a `10⁻³·R` grid and refined by
/// golden section around the best grid point and around the continuous-ring
/// hotspot.
pub fn max_density_finite(p: f64, layout: &DaeLayout, cell_radius: f64) -> Hotspot {
    const GRID: usize = 1000;
    let n = layout.len().max(1);
    let ring = layout.positions.first().map_or(0.0, |a| a.x.hypot(a.y));
    let h = layout.positions.first().map_or(1.0, |a| a.z);
    let seed = if ring > h { (ring * ring - h * h).sqrt().min(cell_radius) } else { 0.0 };
    let step = cell_radius / GRID as f64;
    let tol = 1e-12 * cell_radius;

    let mut best = Hotspot { nu_star: 0.0, density: f64::NEG_INFINITY };
    for angle in [0.0, PI / n as f64] {
        let (c, s) = (angle.cos(), angle.sin());
        let along = |nu: f64| density_finite(p, layout, GroundPoint { x: nu * c, y: nu * s });
        let mut consider = |nu: f64, d: f64| {
            if d > best.density {
                best = Hotspot { nu_star: nu, density: d };
            }
        };

        let (mut grid_k, mut grid_d) = (0, f64::NEG_INFINITY);
        for k in 0..=GRID {
            let d = along(k as f64 * step);
            if d > grid_d {
                grid_k = k;
                grid_d = d;
            }
        }
        consider(grid_k as f64 * step, grid_d);
        let lo = grid_k.saturating_sub(1) as f64 * step;
        let hi = ((grid_k + 1) as f64 * step).min(cell_radius);
        let (nu, d) = golden_max(along, lo, hi, tol);
        consider(nu, d);
        let (nu, d) = golden_max(along, (seed - step).max(0.0), (seed + step).min(cell_radius), tol);
        consider(nu, d);
    }
    best
}

/// Ring antenna height for a finite number of antennas such that the peak
/// ground density equals `P / (4π h_C²)`.
///
/// The peak density falls strictly as the antennas rise, so the height is
/// bracketed in `(0, 10 h_C]` and found by bisection.
pub fn da_height_finite(scenario: &Scenario, r: f64, h_c: f64) -> Result<f64> {
    if r == 0.0 {
        // All antennas coincide at the center: the co-located case.
        return Ok(h_c);
    }
    let p = scenario.power;
    let target = p / (4.0 * PI * h_c * h_c);
    let excess = |h: f64| {
        let layout = dae_positions(r, scenario.antennas, h);
        max_density_finite(p, &layout, scenario.cell_radius).density - target
    };
    let upper = 10.0 * h_c;
    let (mut lo, mut hi) = (1e-9 * h_c, upper);
    if excess(hi) > 0.0 || excess(lo) < 0.0 {
        return Err(Error::NonBracketing { upper });
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const H_C: f64 = 7.75;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn degenerate_ring() {
        let l = dae_positions(0.0, 4, 2.0);
        assert_eq!(l.len(), 4);
        for a in &l.positions {
            assert_eq!((a.x, a.y, a.z), (0.0, 0.0, 2.0));
        }
    }

    #[test]
    fn quarter_turns() {
        let l = dae_positions(20.0, 4, 1.5);
        let want = [(20.0, 0.0), (0.0, 20.0), (-20.0, 0.0), (0.0, -20.0)];
        for (a, (x, y)) in l.positions.iter().zip(want) {
            assert!((a.x - x).abs() < 1e-12 && (a.y - y).abs() < 1e-12);
            assert_eq!(a.z, 1.5);
        }
    }

    #[test]
    fn angular_spacing() {
        let l = dae_positions(20.0, 100, 1.50156);
        let (a, b) = (l.positions[0], l.positions[1]);
        assert_eq!((a.x, a.y), (20.0, 0.0));
        let angle = b.y.atan2(b.x) - a.y.atan2(a.x);
        assert!((angle - 2.0 * PI / 100.0).abs() < 1e-14);
        for a in &l.positions {
            assert!((a.x.hypot(a.y) - 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_colocated_antenna() {
        let l = dae_positions(0.0, 1, H_C);
        let d = density_finite(20.0, &l, GroundPoint::default());
        assert!(rel(d, 20.0 / (4.0 * PI * H_C * H_C)) < 1e-15);
        let d = density_finite(200.0, &l, GroundPoint::default());
        assert!((d - 0.265).abs() < 1e-3, "{d}");
        assert!(rel(d, 0.264_982_215_345_5) < 1e-10);
    }

    #[test]
    fn symmetric_pair_superposes() {
        let (p, r, h) = (10.0, 3.0, 2.0);
        let l = dae_positions(r, 2, h);
        let one_half_power = (p / 2.0) / (4.0 * PI * (r * r + h * h));
        let d = density_finite(p, &l, GroundPoint::default());
        assert!(rel(d, 2.0 * one_half_power) < 1e-14);
    }

    #[test]
    fn asymptotic_density_special_cases() {
        let (p, h) = (200.0, 3.0);
        for nu in [0.0, 1.0, 10.0] {
            let d = density_asymptotic(p, 0.0, h, nu);
            assert!(rel(d, p / (4.0 * PI * (nu * nu + h * h))) < 1e-14);
        }
        let r = 20.0;
        let nu = (r * r - h * h).sqrt();
        assert!(rel(density_asymptotic(p, r, h, nu), p / (8.0 * PI * r * h)) < 1e-13);

        let h_d = da_height_asymptotic(20.0, H_C);
        let hs = hotspot_asymptotic(200.0, 20.0, H_C);
        let d = density_asymptotic(200.0, 20.0, h_d, hs.nu_star);
        assert!(rel(d, 200.0 / (4.0 * PI * H_C * H_C)) < 1e-12);
        assert!((d - 0.265).abs() < 1e-3);
    }

    #[test]
    fn hotspot_branches() {
        assert_eq!(hotspot_asymptotic(1.0, 5.0, H_C).nu_star, 0.0);
        let knee = H_C * FRAC_1_SQRT_2;
        assert!(hotspot_asymptotic(1.0, knee, H_C).nu_star.abs() < 1e-12);
        assert!(hotspot_asymptotic(1.0, knee * (1.0 + 1e-12), H_C).nu_star < 1e-4);
        let nu = hotspot_asymptotic(1.0, 20.0, H_C).nu_star;
        let h = H_C * H_C / 40.0;
        assert!(rel(nu, (400.0 - h * h).sqrt()) < 1e-15);
        assert!((nu - 19.9436).abs() < 1e-4);
    }

    #[test]
    fn height_law_values() {
        assert_eq!(da_height_asymptotic(0.0, H_C), H_C);
        let knee = H_C * FRAC_1_SQRT_2;
        assert!((da_height_asymptotic(knee, H_C) - knee).abs() < 1e-12);
        assert!((H_C * H_C / (2.0 * knee) - knee).abs() < 1e-12);
        assert!((knee - 5.4801).abs() < 1e-4);
        assert_eq!(da_height_asymptotic(20.0, H_C), 60.0625 / 40.0);
    }

    #[test]
    fn height_law_monotone_and_continuous() {
        let r_cell = 30.0;
        let pts = 1000;
        let mut prev = da_height_asymptotic(0.0, H_C);
        let mut prev_nu = 0.0;
        for k in 1..=pts {
            let r = r_cell * k as f64 / pts as f64;
            let h = da_height_asymptotic(r, H_C);
            assert!(h <= prev, "r={r}");
            // Largest slope is 1 near the knee and h_C²/(2r²) after it.
            assert!(prev - h <= 1.01 * r_cell / pts as f64 + 1e-12, "jump at r={r}");
            prev = h;
            let nu = hotspot_asymptotic(1.0, r, H_C).nu_star;
            assert!(nu >= prev_nu - 1e-12);
            prev_nu = nu;
        }
    }

    #[test]
    fn power_limit() {
        let lim = ca_power_limit(H_C, 10.0);
        assert!((lim - 7547.7).abs() < 0.1, "{lim}");
        assert!(rel(ca_power_limit(2.0 * H_C, 10.0), 4.0 * lim) < 1e-15);
        assert!(200.0 < lim);
    }

    fn table_scenario(n: usize) -> Scenario {
        Scenario { antennas: n, power: 200.0, ..Scenario::default() }
    }

    #[test]
    fn finite_height_trivial_ring() {
        let s = Scenario { antennas: 1, ..Scenario::default() };
        assert_eq!(da_height_finite(&s, 0.0, H_C).unwrap(), H_C);
    }

    #[test]
    fn finite_height_large_ring_matches_law() {
        let h = da_height_finite(&table_scenario(100), 20.0, H_C).unwrap();
        let law = da_height_asymptotic(20.0, H_C);
        assert!(rel(h, law) < 0.01, "{h} vs {law}");
    }

    /// Brute force: peak density over a 2-D polar grid of the whole cell,
    /// then bisection on the height with that peak.
    fn grid_height_oracle(s: &Scenario, r: f64) -> f64 {
        let peak = |h: f64| {
            let l = dae_positions(r, s.antennas, h);
            let mut m: f64 = 0.0;
            for i in 0..=600 {
                let rho = s.cell_radius * i as f64 / 600.0;
                for j in 0..360 {
                    let th = 2.0 * PI * j as f64 / 360.0;
                    m = m.max(density_finite(s.power, &l, GroundPoint::polar(rho, th)));
                }
            }
            m
        };
        let target = s.power / (4.0 * PI * H_C * H_C);
        let (mut lo, mut hi) = (0.01, 10.0 * H_C);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if peak(mid) > target {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn finite_height_small_ring_matches_grid_oracle() {
        let s = table_scenario(4);
        let h = da_height_finite(&s, 20.0, H_C).unwrap();
        assert!(h > 0.0);
        let oracle = grid_height_oracle(&s, 20.0);
        assert!(h >= oracle * (1.0 - 1e-9), "solver misses a peak: {h} < {oracle}");
        assert!(rel(h, oracle) < 0.01, "{h} vs {oracle}");
    }

    #[test]
    fn finite_height_converges_with_antenna_count() {
        let law = da_height_asymptotic(20.0, H_C);
        let gaps: Vec<f64> = [50, 100, 200, 400]
            .iter()
            .map(|&n| (da_height_finite(&table_scenario(n), 20.0, H_C).unwrap() - law).abs())
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
    }

    #[test]
    fn dense_ring_converges_to_continuous_ring() {
        let l = dae_positions(20.0, 10_000, 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = GroundPoint::polar(30.0 * rng.random::<f64>().sqrt(), rng.random::<f64>() * 2.0 * PI);
            let fin = density_finite(200.0, &l, p);
            let asym = density_asymptotic(200.0, 20.0, 1.5, p.norm());
            assert!(rel(fin, asym) < 1e-4, "{p:?}: {fin} vs {asym}");
        }
    }

    #[test]
    fn safety_by_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r_cell: f64 = rng.random_range(5.0..200.0);
            let lo = (2.0 * r_cell).sqrt();
            let h_c = rng.random_range(lo..r_cell);
            let r = rng.random_range(0.0..=r_cell);
            let p = 200.0;
            let hs = hotspot_asymptotic(p, r, h_c);
            let d = density_asymptotic(p, r, da_height_asymptotic(r, h_c), hs.nu_star);
            assert!(rel(d, p / (4.0 * PI * h_c * h_c)) < 1e-12, "r={r} h_c={h_c}");
            assert!(hs.nu_star >= 0.0 && hs.nu_star <= r_cell);
        }
    }

    #[test]
    fn hotspot_is_the_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let r: f64 = rng.random_range(0.0..30.0);
            let h: f64 = rng.random_range(0.2..15.0);
            // Continuous-ring hotspot for this (r, h): ν* = sqrt(r² − h²) or 0.
            let nu = if r > h { (r * r - h * h).sqrt() } else { 0.0 };
            let peak = density_asymptotic(1.0, r, h, nu);
            for k in 0..=3000 {
                let v = density_asymptotic(1.0, r, h, 30.0 * k as f64 / 3000.0);
                assert!(peak >= v * (1.0 - 1e-14), "r={r} h={h}");
            }
        }
    }

    #[test]
    fn non_bracketing_is_reported() {
        // Ring outside a small cell: no height brings the in-cell peak up to
        // the co-located density.
        let s = Scenario { cell_radius: 5.0, antennas: 1, ..Scenario::default() };
        assert!(matches!(da_height_finite(&s, 20.0, H_C), Err(Error::NonBracketing { .. })));
    }
}
