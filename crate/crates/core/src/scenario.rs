// SPDX-License-Identifier: Apache-2.0

//! Physical constants, configuration parsing and validation.
//!
//! The configuration file is flat `key=value` UTF-8 text. `#` starts a
//! comment, blank lines are ignored and keys are case-sensitive:
//!
//! ```text
//! # cell
//! R=30
//! h_C=7.75
//! r=20
//! N=100
//! P=20
//! alpha=2
//! ```
//!
//! Every key missing from the file takes its default value (see
//! [`Config::default`]). Units are SI throughout; `V_T` is in volts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry;

/// Smallest and largest path-loss exponent accepted by the public API.
pub const ALPHA_MIN: f64 = 2.0;
pub const ALPHA_MAX: f64 = 6.0;

/// Cell geometry and transmitter budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Cell radius in meters.
    pub cell_radius: f64,
    /// Total transmit power in watts, split equally over the antennas.
    pub power: f64,
    pub antennas: usize,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Radiation density safety threshold in W/m².
    pub psi0: f64,
    /// Far-field reference distance in meters.
    pub d_ref: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            cell_radius: 30.0,
            power: 20.0,
            antennas: 100,
            alpha: 2.0,
            psi0: 10.0,
            d_ref: 1.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        positive("R", self.cell_radius)?;
        positive("P", self.power)?;
        if self.antennas < 1 {
            return Err(invalid("N", "must be at least 1"));
        }
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&self.alpha) {
            return Err(invalid(
                "alpha",
                format!("{} outside [{ALPHA_MIN}, {ALPHA_MAX}]", self.alpha),
            ));
        }
        positive("psi0", self.psi0)?;
        positive("d_ref", self.d_ref)?;
        Ok(())
    }

    /// Returns a copy with a different path-loss exponent.
    pub fn with_alpha(self, alpha: f64) -> Self {
        Scenario { alpha, ..self }
    }

    pub fn with_power(self, power: f64) -> Self {
        Scenario { power, ..self }
    }
}

/// Rectifying-antenna constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectenna {
    /// Diode reverse saturation current in amperes.
    pub saturation_current: f64,
    /// Diode ideality factor, nominally in [1, 2].
    pub ideality: f64,
    /// Thermal voltage in volts.
    pub thermal_voltage: f64,
    /// RF-to-stored energy conversion efficiency, in (0, 1).
    pub conversion_efficiency: f64,
    /// Path-loss scaling constant.
    pub path_loss_scale: f64,
    /// Mean multipath power gain.
    pub mean_gain: f64,
}

impl Default for Rectenna {
    fn default() -> Self {
        Rectenna {
            saturation_current: 1e-3,
            ideality: 1.0,
            thermal_voltage: 0.02885,
            conversion_efficiency: 0.85,
            path_loss_scale: 1.0,
            mean_gain: 1.0,
        }
    }
}

impl Rectenna {
    /// Validates all constants. With `strict` unset the ideality factor may
    /// leave [1, 2] as long as it stays positive.
    pub fn validate(&self, strict: bool) -> Result<()> {
        positive("I_s", self.saturation_current)?;
        positive("rho", self.ideality)?;
        if strict && !(1.0..=2.0).contains(&self.ideality) {
            return Err(invalid(
                "rho",
                format!("{} outside [1, 2] (use --no-strict to allow)", self.ideality),
            ));
        }
        positive("V_T", self.thermal_voltage)?;
        positive("xi", self.conversion_efficiency)?;
        if self.conversion_efficiency >= 1.0 {
            return Err(invalid("xi", "must be below 1"));
        }
        positive("c", self.path_loss_scale)?;
        positive("sigma_h2", self.mean_gain)?;
        Ok(())
    }

    /// Converts path-loss-weighted transmit power into mean harvested DC
    /// power: `xi * I_s * c * sigma_h2 / (2 (rho V_T)^2)`.
    pub fn k0(&self) -> f64 {
        self.diode_gain() * self.mean_gain
    }

    /// The same conversion without the fading mean, i.e. the factor applied
    /// to one instantaneous channel realization.
    pub fn diode_gain(&self) -> f64 {
        let vt = self.ideality * self.thermal_voltage;
        self.conversion_efficiency * self.saturation_current * self.path_loss_scale / (2.0 * vt * vt)
    }
}

/// Free-function form of [`Rectenna::k0`].
pub fn k0(rect: &Rectenna) -> f64 {
    rect.k0()
}

/// Placement of the beacon antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deployment {
    /// All antennas at the cell center, mounted at `height`.
    Colocated { height: f64 },
    /// Antennas evenly spaced on a ring of `radius`, mounted at `height`.
    Distributed { radius: f64, height: f64 },
}

impl Deployment {
    pub fn height(&self) -> f64 {
        match *self {
            Deployment::Colocated { height } | Deployment::Distributed { height, .. } => height,
        }
    }

    /// Ring radius; zero for a co-located beacon.
    pub fn ring_radius(&self) -> f64 {
        match *self {
            Deployment::Colocated { .. } => 0.0,
            Deployment::Distributed { radius, .. } => radius,
        }
    }

    pub fn is_colocated(&self) -> bool {
        matches!(self, Deployment::Colocated { .. })
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        match *self {
            Deployment::Colocated { height } => positive("h_C", height),
            Deployment::Distributed { radius, height } => {
                positive("h_D", height)?;
                if !(0.0..=scenario.cell_radius).contains(&radius) {
                    return Err(invalid(
                        "r",
                        format!("{radius} outside [0, R = {}]", scenario.cell_radius),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// True iff `sqrt(2 R d_ref) <= h_C < R`, the height range in which the
/// far-field path-loss model holds for every ring radius.
pub fn validate_height_regime(scenario: &Scenario, h_c: f64) -> bool {
    let (lo, hi) = height_regime(scenario);
    h_c >= lo && h_c < hi
}

/// Bounds `[lower, upper)` of the legal co-located antenna height.
pub fn height_regime(scenario: &Scenario) -> (f64, f64) {
    (
        (2.0 * scenario.cell_radius * scenario.d_ref).sqrt(),
        scenario.cell_radius,
    )
}

/// A fully parsed configuration file.
///
/// The file carries both the co-located height `h_C` and the ring radius
/// `r`; the distributed antenna height follows from them through the
/// safety law, so it is derived rather than stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    pub rectenna: Rectenna,
    /// Co-located antenna height `h_C` in meters.
    pub h_c: f64,
    /// Ring radius `r` in meters.
    pub dae_radius: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scenario: Scenario::default(),
            rectenna: Rectenna::default(),
            h_c: 7.75,
            dae_radius: 20.0,
        }
    }
}

const KEYS: [&str; 14] = [
    "R", "h_C", "r", "N", "P", "I_s", "V_T", "alpha", "rho", "xi", "sigma_h2", "c", "psi0", "d_ref",
];

impl Config {
    pub fn colocated(&self) -> Deployment {
        Deployment::Colocated { height: self.h_c }
    }

    /// Ring deployment whose height follows the large-N safety law.
    pub fn distributed(&self) -> Deployment {
        Deployment::Distributed {
            radius: self.dae_radius,
            height: geometry::da_height_asymptotic(self.dae_radius, self.h_c),
        }
    }

    pub fn validate(&self, strict: bool) -> Result<()> {
        self.scenario.validate()?;
        self.rectenna.validate(strict)?;
        positive("h_C", self.h_c)?;
        if !(0.0..=self.scenario.cell_radius).contains(&self.dae_radius) {
            return Err(invalid(
                "r",
                format!("{} outside [0, R = {}]", self.dae_radius, self.scenario.cell_radius),
            ));
        }
        Ok(())
    }

    /// Parses configuration text, filling unspecified keys with defaults.
    pub fn parse(text: &str, strict: bool) -> Result<Config> {
        let mut cfg = Config::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key=value, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::UnknownKey { line, key: key.to_string() });
            };
            if seen.contains(&known) {
                return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
            }
            seen.push(known);
            cfg.set(known, value, line)?;
        }
        cfg.validate(strict)?;
        Ok(cfg)
    }

    fn set(&mut self, key: &'static str, value: &str, line: usize) -> Result<()> {
        if key == "N" {
            self.scenario.antennas = value.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`N` must be a positive integer, got `{value}`"),
            })?;
            return Ok(());
        }
        let v: f64 = value.parse().map_err(|_| Error::Parse {
            line,
            message: format!("`{key}` must be a number, got `{value}`"),
        })?;
        if !v.is_finite() {
            return Err(invalid(key, format!("{value} is not finite")));
        }
        let slot = match key {
            "R" => &mut self.scenario.cell_radius,
            "h_C" => &mut self.h_c,
            "r" => &mut self.dae_radius,
            "P" => &mut self.scenario.power,
            "I_s" => &mut self.rectenna.saturation_current,
            "V_T" => &mut self.rectenna.thermal_voltage,
            "alpha" => &mut self.scenario.alpha,
            "rho" => &mut self.rectenna.ideality,
            "xi" => &mut self.rectenna.conversion_efficiency,
            "sigma_h2" => &mut self.rectenna.mean_gain,
            "c" => &mut self.rectenna.path_loss_scale,
            "psi0" => &mut self.scenario.psi0,
            "d_ref" => &mut self.scenario.d_ref,
            _ => unreachable!("key list and setter out of sync: {key}"),
        };
        *slot = v;
        Ok(())
    }

    /// Serializes every key. Values use the shortest representation that
    /// parses back to the identical `f64`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }

    /// `(key, value)` pairs in canonical key order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.scenario;
        let e = &self.rectenna;
        vec![
            ("R", s.cell_radius.to_string()),
            ("h_C", self.h_c.to_string()),
            ("r", self.dae_radius.to_string()),
            ("N", s.antennas.to_string()),
            ("P", s.power.to_string()),
            ("I_s", e.saturation_current.to_string()),
            ("V_T", e.thermal_voltage.to_string()),
            ("alpha", s.alpha.to_string()),
            ("rho", e.ideality.to_string()),
            ("xi", e.conversion_efficiency.to_string()),
            ("sigma_h2", e.mean_gain.to_string()),
            ("c", e.path_loss_scale.to_string()),
            ("psi0", s.psi0.to_string()),
            ("d_ref", s.d_ref.to_string()),
        ]
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>, strict: bool) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Config::parse(&text, strict)
}

pub fn save_config(path: impl AsRef<Path>, config: &Config) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, config.to_config_string()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn positive(key: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} must be positive")))
    }
}

fn invalid(key: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid { key, reason: reason.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn k0_table_defaults() {
        // 0.85 * 1e-3 / (2 * 0.02885^2)
        let expected = 0.85e-3 / (2.0 * 0.02885 * 0.02885);
        let k = k0(&Rectenna::default());
        assert_eq!(k, expected);
        assert!((k - 0.51062).abs() < 1e-5);
    }

    #[test]
    fn k0_halves_with_efficiency_and_quarters_with_voltage() {
        let base = Rectenna::default();
        let half = Rectenna { conversion_efficiency: base.conversion_efficiency / 2.0, ..base };
        assert!((half.k0() - base.k0() / 2.0).abs() < 1e-15);
        let hot = Rectenna { thermal_voltage: base.thermal_voltage * 2.0, ..base };
        assert!((hot.k0() - base.k0() / 4.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn k0_is_separable(
            xi in 0.01f64..0.99, is in 1e-6f64..1e-2, c in 0.1f64..10.0,
            g in 0.1f64..10.0, rho in 1.0f64..2.0, vt in 0.01f64..0.05,
            s in 0.1f64..5.0,
        ) {
            let r = Rectenna {
                saturation_current: is, ideality: rho, thermal_voltage: vt,
                conversion_efficiency: xi, path_loss_scale: c, mean_gain: g,
            };
            let base = r.k0();
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            let v = Rectenna { saturation_current: is * s, ..r }.k0();
            prop_assert!(rel(v, base * s) < 1e-12);
            let v = Rectenna { path_loss_scale: c * s, ..r }.k0();
            prop_assert!(rel(v, base * s) < 1e-12);
            let v = Rectenna { mean_gain: g * s, ..r }.k0();
            prop_assert!(rel(v, base * s) < 1e-12);
            let v = Rectenna { conversion_efficiency: xi * 0.5, ..r }.k0();
            prop_assert!(rel(v, base * 0.5) < 1e-12);
            let v = Rectenna { thermal_voltage: vt * s, ..r }.k0();
            prop_assert!(rel(v, base / (s * s)) < 1e-12);
            let v = Rectenna { ideality: rho * s, ..r }.k0();
            prop_assert!(rel(v, base / (s * s)) < 1e-12);
        }
    }

    #[test]
    fn empty_config_is_table_defaults() {
        let cfg = Config::parse("", true).unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.scenario.cell_radius, 30.0);
        assert_eq!(cfg.h_c, 7.75);
        assert_eq!(cfg.dae_radius, 20.0);
        assert_eq!(cfg.scenario.antennas, 100);
        assert_eq!(cfg.scenario.power, 20.0);
    }

    #[test]
    fn single_override() {
        let cfg = Config::parse("# urban\nalpha=4\n", true).unwrap();
        assert_eq!(cfg.scenario.alpha, 4.0);
        assert_eq!(Config { scenario: cfg.scenario.with_alpha(2.0), ..cfg }, Config::default());
    }

    #[test]
    fn negative_radius_names_key() {
        let err = Config::parse("R=-1", true).unwrap_err();
        assert!(matches!(err, Error::Invalid { key: "R", .. }), "{err:?}");
    }

    #[test]
    fn parse_errors_name_the_line_or_key() {
        assert!(matches!(Config::parse("R 30", true), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            Config::parse("\nfoo=1", true),
            Err(Error::UnknownKey { line: 2, ref key }) if key == "foo"
        ));
        // keys are case-sensitive
        assert!(matches!(Config::parse("r=1\nh_c=3", true), Err(Error::UnknownKey { .. })));
        assert!(matches!(Config::parse("N=2.5", true), Err(Error::Parse { .. })));
        assert!(matches!(Config::parse("P=abc", true), Err(Error::Parse { .. })));
        assert!(matches!(Config::parse("P=1\nP=2", true), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn ideality_strictness() {
        assert!(matches!(Config::parse("rho=2.5", true), Err(Error::Invalid { key: "rho", .. })));
        assert_eq!(Config::parse("rho=2.5", false).unwrap().rectenna.ideality, 2.5);
        assert!(Config::parse("rho=0", false).is_err());
    }

    #[test]
    fn other_invariants() {
        for (text, key) in [
            ("N=0", "N"),
            ("alpha=1.5", "alpha"),
            ("alpha=7", "alpha"),
            ("xi=1", "xi"),
            ("psi0=0", "psi0"),
            ("r=31", "r"),
            ("h_C=-2", "h_C"),
            ("d_ref=0", "d_ref"),
        ] {
            match Config::parse(text, true) {
                Err(Error::Invalid { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn defaults_round_trip_bit_identically() {
        let text = Config::default().to_config_string();
        let back = Config::parse(&text, true).unwrap();
        assert_eq!(back, Config::default());
        assert_eq!(back.to_config_string(), text);
    }

    #[test]
    fn save_and_load() {
        let dir = std::env::temp_dir().join(format!("dapb-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.cfg");
        save_config(&path, &Config::default()).unwrap();
        assert_eq!(load_config(&path, true).unwrap(), Config::default());
        assert!(matches!(load_config(dir.join("missing.cfg"), true), Err(Error::Io(_))));
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn height_regime() {
        let s = Scenario::default();
        assert!(validate_height_regime(&s, 7.75)); // sqrt(60) = 7.746
        assert!(!validate_height_regime(&s, 30.0));
        assert!(!validate_height_regime(&s, 7.0));
    }

    #[test]
    fn deployment_validation() {
        let s = Scenario::default();
        assert!(Deployment::Distributed { radius: 30.0, height: 1.0 }.validate(&s).is_ok());
        assert!(Deployment::Distributed { radius: 30.5, height: 1.0 }.validate(&s).is_err());
        assert!(Deployment::Colocated { height: 0.0 }.validate(&s).is_err());
    }
}
