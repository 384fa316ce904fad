// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo simulation of the harvesting chain.
//!
//! Each sample draws a user uniformly on the cell disc and one block of
//! Rayleigh fading (exponential power gains, uniform composite phases) for
//! every antenna, then evaluates the rectified DC output including the
//! cross terms between antennas.
//!
//! Samples are grouped in fixed-size blocks. Block `b` draws from a ChaCha8
//! stream selected by `b` under the user seed, and block statistics are
//! merged in block order, so results depend only on the seed and the
//! parameters, never on how many threads ran the blocks.

use std::f64::consts::PI;

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dae_positions, Antenna, GroundPoint};
use crate::harvest::ergodic_power_at;
use crate::scenario::{Deployment, Rectenna, Scenario};

/// Samples per block.
pub const BLOCK: usize = 4096;

/// Smallest sample count accepted by the simulators.
pub const MIN_SAMPLES: usize = 1000;

/// Fading state of every antenna for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    /// Composite phases, uniform on `[-π, π)`.
    pub phases: Vec<f64>,
    /// Power gains `|h_i|²`, exponential with mean `σ_h²`.
    pub gains: Vec<f64>,
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n: usize, mean_gain: f64) -> ChannelDraw {
        let exp = Exp::new(1.0 / mean_gain).expect("mean gain is positive");
        let phase = Uniform::new(-PI, PI).expect("finite range");
        let gains = (0..n).map(|_| exp.sample(rng)).collect();
        let phases = (0..n).map(|_| phase.sample(rng)).collect();
        ChannelDraw { phases, gains }
    }

    /// Equal gains and equal phases on every antenna.
    pub fn coherent(n: usize, gain: f64) -> ChannelDraw {
        ChannelDraw { phases: vec![0.0; n], gains: vec![gain; n] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SimResult {
    /// `(mean − reference) / std_error`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.std_error
    }
}

/// How the composite phases are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Random,
    /// All phases zero; a diagnostic that makes the cross terms coherent.
    Coherent,
}

/// Uniform point on the disc of radius `cell_radius`.
pub fn sample_user<R: Rng + ?Sized>(rng: &mut R, cell_radius: f64) -> GroundPoint {
    let rho = cell_radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(-PI..PI);
    GroundPoint::polar(rho, theta)
}

/// Antenna positions and per-antenna constants of a deployment.
struct Model {
    antennas: Vec<Antenna>,
    per_antenna_power: f64,
    alpha: f64,
    prefactor: f64,
    mean_gain: f64,
    cell_radius: f64,
}

impl Model {
    fn new(s: &Scenario, rect: &Rectenna, dep: &Deployment) -> Model {
        let n = s.antennas;
        let antennas = match *dep {
            Deployment::Colocated { height } => vec![Antenna { x: 0.0, y: 0.0, z: height }; n],
            Deployment::Distributed { radius, height } => dae_positions(radius, n, height).positions,
        };
        Model {
            antennas,
            per_antenna_power: s.power / n as f64,
            alpha: s.alpha,
            prefactor: rect.diode_gain(),
            mean_gain: rect.mean_gain,
            cell_radius: s.cell_radius,
        }
    }

    /// `(total, cross)` DC output; `cross` is the part from `i ≠ j` pairs,
    /// accumulated as `Σ_i 2 Re(z̄_i Σ_{j<i} z_j)`.
    fn dc(&self, point: GroundPoint, gains: &[f64], phases: &[f64]) -> (f64, f64) {
        let (mut re, mut im, mut diag, mut cross) = (0.0, 0.0, 0.0, 0.0);
        for ((a, &g), &phi) in self.antennas.iter().zip(gains).zip(phases) {
            let d2 = a.dist2(point);
            let path = if self.alpha == 2.0 {
                1.0 / d2
            } else if self.alpha == 4.0 {
                1.0 / (d2 * d2)
            } else {
                d2.powf(-0.5 * self.alpha)
            };
            let amp2 = self.per_antenna_power * g * path;
            let amp = amp2.sqrt();
            let (sin, cos) = phi.sin_cos();
            let (zr, zi) = (amp * cos, amp * sin);
            cross += 2.0 * (zr * re + zi * im);
            re += zr;
            im += zi;
            diag += amp2;
        }
        (self.prefactor * (diag + cross), self.prefactor * cross)
    }
}

/// Rectified DC output for one user and one fading draw, cross terms
/// included.
pub fn instantaneous_dc(
    s: &Scenario,
    rect: &Rectenna,
    dep: &Deployment,
    point: GroundPoint,
    draw: &ChannelDraw,
) -> Result<f64> {
    if point.norm() > s.cell_radius {
        return Err(Error::OutOfCell { x: point.x, y: point.y, radius: s.cell_radius });
    }
    if draw.gains.len() != s.antennas || draw.phases.len() != s.antennas {
        return Err(Error::Invalid {
            key: "draw",
            reason: format!("expected {} gains and phases", s.antennas),
        });
    }
    Ok(Model::new(s, rect, dep).dc(point, &draw.gains, &draw.phases).0)
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn result(self, seed: u64) -> SimResult {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        SimResult { mean: self.mean, std_error: (var / self.n).sqrt(), samples: self.n as usize, seed }
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Invalid { key: "samples", reason: format!("{samples} < {MIN_SAMPLES}") });
    }
    Ok(())
}

/// Runs `samples` independent (user, fading) draws and accumulates
/// `pick(total, cross)`.
fn run<F>(s: &Scenario, rect: &Rectenna, dep: &Deployment, samples: usize, seed: u64, mode: PhaseMode, pick: F) -> SimResult
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let model = Model::new(s, rect, dep);
    let n = model.antennas.len();
    let exp = Exp::new(1.0 / model.mean_gain).expect("mean gain is positive");
    let phase = Uniform::new(-PI, PI).expect("finite range");
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let mut gains = vec![0.0; n];
            let mut phases = vec![0.0; n];
            let mut m = Moments::default();
            let count = BLOCK.min(samples - b * BLOCK);
            for _ in 0..count {
                let user = sample_user(&mut rng, model.cell_radius);
                for g in gains.iter_mut() {
                    *g = exp.sample(&mut rng);
                }
                if mode == PhaseMode::Random {
                    for p in phases.iter_mut() {
                        *p = phase.sample(&mut rng);
                    }
                }
                let (total, cross) = model.dc(user, &gains, &phases);
                m.push(pick(total, cross));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge).result(seed)
}

/// Cell-average harvested DC power by simulation.
pub fn simulate_avg_power(s: &Scenario, rect: &Rectenna, dep: &Deployment, samples: usize, seed: u64) -> Result<SimResult> {
    check_samples(samples)?;
    dep.validate(s)?;
    Ok(run(s, rect, dep, samples, seed, PhaseMode::Random, |total, _| total))
}

/// Mean of the cross-term part of the DC output alone. Zero in expectation
/// under random phases; positive under [`PhaseMode::Coherent`].
pub fn cross_term_bias(
    s: &Scenario,
    rect: &Rectenna,
    dep: &Deployment,
    samples: usize,
    seed: u64,
    mode: PhaseMode,
) -> Result<SimResult> {
    check_samples(samples)?;
    dep.validate(s)?;
    Ok(run(s, rect, dep, samples, seed, mode, |_, cross| cross))
}

/// Empirical CDF of the per-user ergodic efficiency over `user_samples`
/// uniformly placed users: sorted `(efficiency, k / n)` pairs.
pub fn efficiency_cdf(
    s: &Scenario,
    rect: &Rectenna,
    dep: &Deployment,
    user_samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if user_samples == 0 {
        return Err(Error::Invalid { key: "samples", reason: "need at least one user".into() });
    }
    dep.validate(s)?;
    let blocks = user_samples.div_ceil(BLOCK);
    let mut eff: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(user_samples - b * BLOCK);
            (0..count)
                .map(|_| {
                    let p = sample_user(&mut rng, s.cell_radius);
                    ergodic_power_at(s, rect, dep, p).map(|w| w / s.power)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?
        .concat();
    eff.sort_by(f64::total_cmp);
    let n = eff.len() as f64;
    Ok(eff.into_iter().enumerate().map(|(k, e)| (e, (k + 1) as f64 / n)).collect())
}

/// Fraction of users whose efficiency exceeds `threshold`.
pub fn exceedance(cdf: &[(f64, f64)], threshold: f64) -> f64 {
    let below = cdf.partition_point(|&(e, _)| e <= threshold);
    1.0 - below as f64 / cdf.len() as f64
}

/// Smallest sampled efficiency whose cumulative probability reaches `q`.
pub fn quantile(cdf: &[(f64, f64)], q: f64) -> f64 {
    let k = cdf.partition_point(|&(_, p)| p < q).min(cdf.len() - 1);
    cdf[k].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::da_height_asymptotic;
    use crate::harvest::{avg_power_ca, avg_power_da};

    fn table() -> (Scenario, Rectenna) {
        (Scenario::default(), Rectenna::default())
    }

    #[test]
    fn user_moments_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let mut m = Moments::default();
        let mut bins = [0u32; 36];
        for _ in 0..n {
            let p = sample_user(&mut rng, 30.0);
            assert!(p.norm() <= 30.0);
            m.push(p.x * p.x + p.y * p.y);
            let k = (((p.y.atan2(p.x) + PI) / (2.0 * PI)) * 36.0) as usize;
            bins[k.min(35)] += 1;
        }
        let r = m.result(1);
        assert!((r.mean - 450.0).abs() < 3.0 * r.std_error);
        // chi-square with 35 degrees of freedom; 99th percentile is 57.34
        let expect = n as f64 / 36.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 57.34, "chi2 = {chi2}");
    }

    #[test]
    fn gain_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut m = Moments::default();
        for _ in 0..10_000 {
            let d = ChannelDraw::sample(&mut rng, 100, 1.5);
            assert!(d.gains.iter().all(|&g| g >= 0.0));
            assert!(d.phases.iter().all(|&p| (-PI..PI).contains(&p)));
            for &g in &d.gains {
                m.push(g);
            }
        }
        let r = m.result(2);
        assert!((r.mean - 1.5).abs() < 3.0 * r.std_error);
    }

    #[test]
    fn single_antenna_has_no_cross_term() {
        let (s, rect) = table();
        let s = Scenario { antennas: 1, ..s };
        let dep = Deployment::Colocated { height: 7.75 };
        let p = GroundPoint::new(3.0, 4.0);
        let draw = ChannelDraw { phases: vec![1.0], gains: vec![0.7] };
        let v = instantaneous_dc(&s, &rect, &dep, p, &draw).unwrap();
        let expected = rect.k0() / rect.mean_gain * s.power * 0.7 / (25.0 + 7.75 * 7.75);
        assert!(((v - expected) / expected).abs() < 1e-14);
        let r = cross_term_bias(&s, &rect, &dep, 1000, 3, PhaseMode::Random).unwrap();
        assert_eq!(r.mean, 0.0);
    }

    #[test]
    fn coherent_draw_maximizes_cross_terms() {
        let (s, rect) = table();
        let s = Scenario { antennas: 4, ..s };
        let dep = Deployment::Distributed { radius: 20.0, height: 1.5 };
        let p = GroundPoint::new(5.0, -2.0);
        let coherent = instantaneous_dc(&s, &rect, &dep, p, &ChannelDraw::coherent(4, 1.0)).unwrap();
        let spread = ChannelDraw { phases: vec![0.0, PI / 2.0, PI, -PI / 2.0], gains: vec![1.0; 4] };
        let other = instantaneous_dc(&s, &rect, &dep, p, &spread).unwrap();
        assert!(coherent > other);
        let model = Model::new(&s, &rect, &dep);
        let (_, cross) = model.dc(p, &[1.0; 4], &[0.0; 4]);
        assert!(cross > 0.0);
    }

    #[test]
    fn out_of_cell_is_rejected() {
        let (s, rect) = table();
        let draw = ChannelDraw::coherent(s.antennas, 1.0);
        let r = instantaneous_dc(&s, &rect, &Deployment::Colocated { height: 7.75 }, GroundPoint::new(30.0, 1.0), &draw);
        assert!(matches!(r, Err(Error::OutOfCell { .. })));
    }

    #[test]
    fn point_expectation_matches_ergodic_power() {
        let (s, rect) = table();
        let s = Scenario { antennas: 8, ..s };
        let dep = Deployment::Distributed { radius: 20.0, height: da_height_asymptotic(20.0, 7.75) };
        let p = GroundPoint::new(12.0, 5.0);
        let model = Model::new(&s, &rect, &dep);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut m = Moments::default();
        for _ in 0..1_000_000 {
            let d = ChannelDraw::sample(&mut rng, 8, 1.0);
            m.push(model.dc(p, &d.gains, &d.phases).0);
        }
        let r = m.result(4);
        let exact = ergodic_power_at(&s, &rect, &dep, p).unwrap();
        assert!(r.z_score(exact).abs() < 3.0, "z = {}", r.z_score(exact));
    }

    #[test]
    fn ca_simulation_matches_closed_form() {
        let (s, rect) = table();
        let s = Scenario { antennas: 4, ..s };
        let r = simulate_avg_power(&s, &rect, &Deployment::Colocated { height: 7.75 }, 200_000, 5).unwrap();
        let exact = avg_power_ca(&s, &rect, 7.75);
        assert!(r.z_score(exact).abs() < 3.0, "z = {}", r.z_score(exact));
    }

    #[test]
    fn da_mean_does_not_depend_on_antenna_count() {
        let (s, rect) = table();
        let s = s.with_alpha(4.0);
        let h = da_height_asymptotic(20.0, 7.75);
        let dep = Deployment::Distributed { radius: 20.0, height: h };
        let exact = avg_power_da(&s, &rect, 20.0, h).unwrap();
        for n in [4, 16, 100] {
            let r = simulate_avg_power(&Scenario { antennas: n, ..s }, &rect, &dep, 100_000, 6).unwrap();
            assert!(r.z_score(exact).abs() < 3.5, "N={n} z={}", r.z_score(exact));
        }
    }

    #[test]
    fn seed_determinism_across_thread_counts() {
        let (s, rect) = table();
        let s = Scenario { antennas: 10, ..s };
        let dep = Deployment::Distributed { radius: 20.0, height: 1.5 };
        let go = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_avg_power(&s, &rect, &dep, 50_000, 7).unwrap())
        };
        let one = go(1);
        assert_eq!(one, go(4));
        assert_eq!(one, go(3));
        assert_ne!(one, simulate_avg_power(&s, &rect, &dep, 50_000, 8).unwrap());
    }

    #[test]
    fn too_few_samples() {
        let (s, rect) = table();
        let r = simulate_avg_power(&s, &rect, &Deployment::Colocated { height: 7.75 }, 10, 1);
        assert!(matches!(r, Err(Error::Invalid { key: "samples", .. })));
    }

    #[test]
    fn cdf_shape() {
        let (s, rect) = table();
        let dep = Deployment::Colocated { height: 7.75 };
        let cdf = efficiency_cdf(&s, &rect, &dep, 5000, 9).unwrap();
        assert_eq!(cdf.len(), 5000);
        assert!(cdf.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
        assert_eq!(cdf.last().unwrap().1, 1.0);
        assert!(cdf.iter().all(|&(e, _)| (0.0..=1.0).contains(&e)));

        let one = efficiency_cdf(&s, &rect, &dep, 1, 9).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].1, 1.0);
        assert_eq!(exceedance(&one, one[0].0), 0.0);
        assert_eq!(exceedance(&one, one[0].0 * 0.999), 1.0);
    }

    #[test]
    fn quantile_and_exceedance() {
        let cdf = vec![(1.0, 0.25), (2.0, 0.5), (3.0, 0.75), (4.0, 1.0)];
        assert_eq!(quantile(&cdf, 0.5), 2.0);
        assert_eq!(quantile(&cdf, 0.6), 3.0);
        assert_eq!(exceedance(&cdf, 2.5), 0.5);
        assert_eq!(exceedance(&cdf, 0.0), 1.0);
    }
}
