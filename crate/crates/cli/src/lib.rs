// SPDX-License-Identifier: Apache-2.0

//! The `dapb` command line.
//!
//! Every analysis command produces a [`SweepTable`] whose metadata echoes
//! the full configuration, the command arguments and the tool version, so
//! a CSV can be regenerated from its own header. Exit codes: 0 success or
//! compliant, 1 non-compliant, 2 usage or configuration error, 3 numeric
//! failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use dapb_core::geometry::{ca_power_limit, da_height_asymptotic, da_height_finite, dae_positions, hotspot_asymptotic, max_density_finite};
use dapb_core::harvest::{avg_power_ca, avg_power_da, ergodic_power_at, radial_profile_da};
use dapb_core::montecarlo::{efficiency_cdf, exceedance, quantile, simulate_avg_power};
use dapb_core::optimize::{objective, optimal_radius_alpha2, optimal_radius_alpha4, DEFAULT_EPS};
use dapb_core::scenario::load_config;
use dapb_core::table::format_sig;
use dapb_core::{Config, Deployment, Error, GroundPoint, RadiusSolution, Scenario, SweepTable, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONCOMPLIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::Parse { .. }
                | Error::UnknownKey { .. }
                | Error::Invalid { .. }
                | Error::Io(_)
                | Error::Regime { .. }
                | Error::UnsupportedAlpha(_) => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Power,
    Antennas,
    Height,
    UserDistance,
    Radius,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Power => "P",
            Axis::Antennas => "N",
            Axis::Height => "h_C",
            Axis::UserDistance => "r_MS",
            Axis::Radius => "r",
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Axis::Power, Axis::Antennas, Axis::Height, Axis::UserDistance, Axis::Radius]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown sweep axis `{s}` (expected P, N, h_C, r_MS or r)"))
    }
}

/// `AXIS=lo:hi:step`, inclusive of `hi` when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Sweep {
    pub fn new(axis: Axis, lo: f64, hi: f64, step: f64) -> Sweep {
        Sweep { axis, lo, hi, step }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (axis, range) = s.split_once('=').ok_or("expected AXIS=lo:hi:step")?;
        let parts: Vec<&str> = range.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err("expected AXIS=lo:hi:step".into());
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
        let sweep = Sweep { axis: axis.trim().parse()?, lo: num(lo)?, hi: num(hi)?, step: num(step)? };
        if !(sweep.step > 0.0) || !(sweep.hi >= sweep.lo) || !sweep.lo.is_finite() || !sweep.hi.is_finite() {
            return Err(format!("`{range}` needs lo <= hi and step > 0"));
        }
        Ok(sweep)
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.axis.name(), self.lo, self.hi, self.step)
    }
}

#[derive(Debug, Parser)]
#[command(name = "dapb", version = VERSION, about = "Power-beacon deployment analysis under a radiation-safety cap")]
pub struct Cli {
    /// Configuration file (key=value lines); defaults apply otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override the path-loss exponent.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Accept diode ideality factors outside [1, 2].
    #[arg(long, global = true)]
    pub no_strict: bool,
    /// Worker threads for simulations (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ring antenna height versus ring radius.
    Height {
        /// Ring radius grid, `r=lo:hi:step` (default 0 to R in steps of 0.5).
        #[arg(long)]
        sweep: Option<Sweep>,
        /// Co-located heights to tabulate (default: h_C of the config).
        #[arg(long, value_delimiter = ',')]
        hc: Vec<f64>,
    },
    /// Cell-average (or, for r_MS, per-user) harvested power of both deployments.
    Power {
        /// One of P, N, h_C, r_MS.
        #[arg(long)]
        sweep: Sweep,
        /// Add a Monte Carlo column for the ring deployment.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Efficiency versus ring radius for alpha 2 and 4, with the optima.
    Optimize {
        #[arg(long)]
        sweep: Option<Sweep>,
    },
    /// Transmit power needed for a target average harvested power.
    Budget {
        /// Target cell-average harvested power in watts.
        #[arg(long, default_value_t = 1e-3)]
        target: f64,
        #[arg(long)]
        sweep: Option<Sweep>,
    },
    /// Efficiency CDFs and simulation-versus-closed-form checks.
    Simulate {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Radiation-density compliance report.
    Comply,
}

fn provenance(table: &mut SweepTable, cfg: &Config) {
    table.meta("version", VERSION);
    for (k, v) in cfg.entries() {
        table.meta(format!("config.{k}"), v);
    }
}

fn radius_grid(cfg: &Config, sweep: Option<Sweep>, default_step: f64) -> CliResult<Vec<f64>> {
    let sweep = sweep.unwrap_or(Sweep::new(Axis::Radius, 0.0, cfg.scenario.cell_radius, default_step));
    if sweep.axis != Axis::Radius {
        return Err(usage(format!("this command sweeps r, not {}", sweep.axis.name())));
    }
    let grid = sweep.values();
    if grid.iter().any(|r| !(0.0..=cfg.scenario.cell_radius).contains(r)) {
        return Err(usage(format!("r grid must lie in [0, R = {}]", cfg.scenario.cell_radius)));
    }
    Ok(grid)
}

/// Ring height versus ring radius: the large-N law and the exhaustive
/// finite-N search, for each co-located height in `h_cs`.
pub fn cmd_height(cfg: &Config, r_grid: &[f64], h_cs: &[f64]) -> CliResult<SweepTable> {
    let mut columns = vec!["r".to_string()];
    for h in h_cs {
        columns.push(format!("h_D_asymptotic@h_C={h}"));
        columns.push(format!("h_D_finite@h_C={h}"));
    }
    let mut table = SweepTable::new(&columns)?;
    provenance(&mut table, cfg);
    for &r in r_grid {
        let mut row = vec![r];
        for &h in h_cs {
            row.push(da_height_asymptotic(r, h));
            row.push(da_height_finite(&cfg.scenario, r, h)?);
        }
        table.push_row(row)?;
    }
    Ok(table)
}

/// Harvested power of both deployments along one axis. For `P`, `N` and
/// `h_C` the values are cell averages; for `r_MS` they are the ergodic
/// power of a user at that distance from the center (large-N ring).
pub fn cmd_power(cfg: &Config, sweep: Sweep, simulate: Option<(usize, u64)>) -> CliResult<SweepTable> {
    if sweep.axis == Axis::Radius {
        return Err(usage("power sweeps P, N, h_C or r_MS"));
    }
    if simulate.is_some() && sweep.axis == Axis::UserDistance {
        return Err(usage("--simulate applies to cell averages, not to an r_MS sweep"));
    }
    let mut columns = vec![sweep.axis.name(), "ca_closed", "da_closed"];
    if simulate.is_some() {
        columns.extend(["da_sim", "da_sim_std_error"]);
    }
    let mut table = SweepTable::new(&columns)?;
    provenance(&mut table, cfg);
    let rect = &cfg.rectenna;
    let r = cfg.dae_radius;
    for v in sweep.values() {
        let mut s = cfg.scenario;
        let mut h_c = cfg.h_c;
        match sweep.axis {
            Axis::Power => s.power = v,
            Axis::Antennas => {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(usage(format!("N must be a positive integer, got {v}")));
                }
                s.antennas = v as usize;
            }
            Axis::Height => h_c = v,
            Axis::UserDistance | Axis::Radius => {}
        }
        s.validate()?;
        if !(h_c > 0.0) {
            return Err(usage(format!("h_C must be positive, got {v}")));
        }
        let h_d = da_height_asymptotic(r, h_c);
        let mut row = vec![v];
        if sweep.axis == Axis::UserDistance {
            let ca = ergodic_power_at(&s, rect, &Deployment::Colocated { height: h_c }, GroundPoint::new(v, 0.0))?;
            row.extend([ca, radial_profile_da(&s, rect, r, h_d, v)?]);
        } else {
            row.extend([avg_power_ca(&s, rect, h_c), avg_power_da(&s, rect, r, h_d)?]);
        }
        if let Some((samples, seed)) = simulate {
            let dep = Deployment::Distributed { radius: r, height: h_d };
            let sim = simulate_avg_power(&s, rect, &dep, samples, seed)?;
            row.extend([sim.mean, sim.std_error]);
        }
        table.push_row(row)?;
    }
    if let Some((samples, seed)) = simulate {
        table.meta("samples", samples).meta("seed", seed);
    }
    Ok(table)
}

/// Marker column values of [`cmd_optimize`] and [`cmd_budget`].
pub const MARK_NONE: f64 = 0.0;
pub const MARK_ALPHA2: f64 = 2.0;
pub const MARK_ALPHA4: f64 = 4.0;

fn solve_both(cfg: &Config) -> CliResult<(RadiusSolution, RadiusSolution)> {
    let (s, rect) = (&cfg.scenario, &cfg.rectenna);
    Ok((optimal_radius_alpha2(s, rect, cfg.h_c)?, optimal_radius_alpha4(s, rect, cfg.h_c, DEFAULT_EPS)?))
}

/// `r` grid with the two optima merged in, each tagged with its marker.
fn marked_grid(r_grid: &[f64], a2: &RadiusSolution, a4: &RadiusSolution) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = r_grid.iter().map(|&r| (r, MARK_NONE)).collect();
    pts.push((a2.r_star, MARK_ALPHA2));
    pts.push((a4.r_star, MARK_ALPHA4));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts
}

fn solution_meta(table: &mut SweepTable, a2: &RadiusSolution, a4: &RadiusSolution) {
    for (tag, sol) in [("alpha2", a2), ("alpha4", a4)] {
        table
            .meta(format!("result.{tag}.r_star"), format_sig(sol.r_star, 12))
            .meta(format!("result.{tag}.efficiency"), format_sig(sol.efficiency_at_r_star, 12))
            .meta(format!("result.{tag}.method"), sol.method.name())
            .meta(format!("result.{tag}.candidates"), sol.candidates.len());
    }
}

/// Efficiency versus ring radius for α = 2 and α = 4 with the co-located
/// baseline, plus one flagged row at each optimum.
pub fn cmd_optimize(cfg: &Config, r_grid: &[f64]) -> CliResult<(SweepTable, RadiusSolution, RadiusSolution)> {
    let (s, rect, h_c) = (&cfg.scenario, &cfg.rectenna, cfg.h_c);
    let (a2, a4) = solve_both(cfg)?;
    let mut table = SweepTable::new(&["r", "efficiency_alpha2", "efficiency_alpha4", "ca_efficiency_alpha2", "ca_efficiency_alpha4", "marker"])?;
    provenance(&mut table, cfg);
    solution_meta(&mut table, &a2, &a4);
    let ca2 = objective(s, rect, 2.0, h_c, 0.0)?;
    let ca4 = objective(s, rect, 4.0, h_c, 0.0)?;
    for (r, mark) in marked_grid(r_grid, &a2, &a4) {
        table.push_row(vec![r, objective(s, rect, 2.0, h_c, r)?, objective(s, rect, 4.0, h_c, r)?, ca2, ca4, mark])?;
    }
    Ok((table, a2, a4))
}

/// Transmit power for a cell-average harvested power of `target` watts,
/// versus ring radius, with the co-located requirement for reference.
pub fn cmd_budget(cfg: &Config, target: f64, r_grid: &[f64]) -> CliResult<SweepTable> {
    if !(target > 0.0) {
        return Err(usage(format!("--target must be positive, got {target}")));
    }
    let (s, rect, h_c) = (&cfg.scenario, &cfg.rectenna, cfg.h_c);
    let (a2, a4) = solve_both(cfg)?;
    let mut table = SweepTable::new(&["r", "power_alpha2", "power_alpha4", "ca_power_alpha2", "ca_power_alpha4", "marker"])?;
    provenance(&mut table, cfg);
    table.meta("target", target);
    solution_meta(&mut table, &a2, &a4);
    let ca2 = target / objective(s, rect, 2.0, h_c, 0.0)?;
    let ca4 = target / objective(s, rect, 4.0, h_c, 0.0)?;
    let saving = |ca: f64, sol: &RadiusSolution| 10.0 * (ca / (target / sol.efficiency_at_r_star)).log10();
    table
        .meta("result.alpha2.saving_db", format_sig(saving(ca2, &a2), 12))
        .meta("result.alpha4.saving_db", format_sig(saving(ca4, &a4), 12));
    for (r, mark) in marked_grid(r_grid, &a2, &a4) {
        let p2 = target / objective(s, rect, 2.0, h_c, r)?;
        let p4 = target / objective(s, rect, 4.0, h_c, r)?;
        table.push_row(vec![r, p2, p4, ca2, ca4, mark])?;
    }
    Ok(table)
}

/// Probability levels of the CDF table.
pub const CDF_LEVELS: usize = 100;

/// Efficiency quantiles of both deployments over uniformly placed users,
/// and Monte Carlo means against the closed forms for α = 2 and α = 4.
pub fn cmd_simulate(cfg: &Config, samples: usize, seed: u64) -> CliResult<SweepTable> {
    let (s, rect) = (&cfg.scenario, &cfg.rectenna);
    let (ca, da) = (cfg.colocated(), cfg.distributed());
    let cdf_ca = efficiency_cdf(s, rect, &ca, samples, seed)?;
    let cdf_da = efficiency_cdf(s, rect, &da, samples, seed)?;
    let mut table = SweepTable::new(&["probability", "efficiency_ca", "efficiency_da"])?;
    provenance(&mut table, cfg);
    table.meta("samples", samples).meta("seed", seed);
    table
        .meta("result.ca.p_efficiency_above_0.005", format_sig(exceedance(&cdf_ca, 0.005), 12))
        .meta("result.da.p_efficiency_above_0.005", format_sig(exceedance(&cdf_da, 0.005), 12));
    for alpha in [2.0, 4.0] {
        let sa = s.with_alpha(alpha);
        for (tag, dep) in [("ca", ca), ("da", da)] {
            let sim = simulate_avg_power(&sa, rect, &dep, samples, seed)?;
            let exact = match dep {
                Deployment::Colocated { height } => avg_power_ca(&sa, rect, height),
                Deployment::Distributed { radius, height } => avg_power_da(&sa, rect, radius, height)?,
            };
            let key = format!("result.{tag}.alpha{alpha}");
            table
                .meta(format!("{key}.sim_mean"), format_sig(sim.mean, 12))
                .meta(format!("{key}.std_error"), format_sig(sim.std_error, 12))
                .meta(format!("{key}.closed_form"), format_sig(exact, 12))
                .meta(format!("{key}.z"), format_sig(sim.z_score(exact), 12));
        }
    }
    for k in 1..=CDF_LEVELS {
        let q = k as f64 / CDF_LEVELS as f64;
        table.push_row(vec![q, quantile(&cdf_ca, q), quantile(&cdf_da, q)])?;
    }
    Ok(table)
}

/// Outcome of the radiation-density check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceReport {
    pub power: f64,
    pub h_c: f64,
    pub dae_radius: f64,
    pub h_d: f64,
    pub antennas: usize,
    /// Peak density of the co-located beacon, `P / (4π h_C²)`.
    pub ca_peak: f64,
    /// Peak density of the ring in the large-N limit.
    pub da_asymptotic: f64,
    /// Peak density of the actual `N`-antenna ring.
    pub da_finite: f64,
    pub psi0: f64,
    /// Largest power the co-located beacon may radiate at `h_C`.
    pub power_limit: f64,
    /// Lowest co-located height that is compliant at power `P`.
    pub min_h_c: f64,
}

impl ComplianceReport {
    pub fn max_density(&self) -> f64 {
        self.ca_peak.max(self.da_asymptotic).max(self.da_finite)
    }

    pub fn compliant(&self) -> bool {
        self.max_density() <= self.psi0
    }
}

impl fmt::Display for ComplianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = |x: f64| format_sig(x, 6);
        writeln!(f, "P = {} W, h_C = {} m, r = {} m, h_D = {} m, N = {}", g(self.power), g(self.h_c), g(self.dae_radius), g(self.h_d), self.antennas)?;
        writeln!(f, "co-located peak density:      {} W/m^2", g(self.ca_peak))?;
        writeln!(f, "ring peak density (large N):  {} W/m^2", g(self.da_asymptotic))?;
        let label = format!("ring peak density (N = {}):", self.antennas);
        writeln!(f, "{label:<29} {} W/m^2", g(self.da_finite))?;
        writeln!(f, "max density:                  {} W/m^2", g(self.max_density()))?;
        writeln!(f, "threshold psi0:               {} W/m^2", g(self.psi0))?;
        writeln!(f, "power limit at h_C:           {} W", g(self.power_limit))?;
        writeln!(f, "minimum compliant h_C:        {} m", g(self.min_h_c))?;
        write!(f, "{}", if self.compliant() { "PASS" } else { "FAIL" })
    }
}

pub fn cmd_comply(cfg: &Config) -> CliResult<ComplianceReport> {
    let s: &Scenario = &cfg.scenario;
    let (p, h_c, r) = (s.power, cfg.h_c, cfg.dae_radius);
    let h_d = da_height_asymptotic(r, h_c);
    let layout = dae_positions(r, s.antennas, h_d);
    Ok(ComplianceReport {
        power: p,
        h_c,
        dae_radius: r,
        h_d,
        antennas: s.antennas,
        ca_peak: p / (4.0 * std::f64::consts::PI * h_c * h_c),
        da_asymptotic: hotspot_asymptotic(p, r, h_c).density,
        da_finite: max_density_finite(p, &layout, s.cell_radius).density,
        psi0: s.psi0,
        power_limit: ca_power_limit(h_c, s.psi0),
        min_h_c: (p / (4.0 * std::f64::consts::PI * s.psi0)).sqrt(),
    })
}

fn load(cli: &Cli) -> CliResult<Config> {
    let strict = !cli.no_strict;
    let mut cfg = match &cli.config {
        Some(path) => load_config(path, strict)?,
        None => Config::default(),
    };
    if let Some(alpha) = cli.alpha {
        cfg.scenario.alpha = alpha;
    }
    cfg.validate(strict)?;
    Ok(cfg)
}

/// What a command hands back to [`run`].
enum Outcome {
    Table(SweepTable),
    Report(String, i32),
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cfg = load(cli)?;
    let (name, args, mut table) = match &cli.command {
        Command::Height { sweep, hc } => {
            let grid = radius_grid(&cfg, *sweep, 0.5)?;
            let hcs = if hc.is_empty() { vec![cfg.h_c] } else { hc.clone() };
            if hcs.iter().any(|h| !(*h > 0.0)) {
                return Err(usage("--hc values must be positive"));
            }
            let joined = hcs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
            let mut args = vec![("hc", joined)];
            if let Some(sw) = sweep {
                args.push(("sweep", sw.to_string()));
            }
            ("height", args, cmd_height(&cfg, &grid, &hcs)?)
        }
        Command::Power { sweep, simulate, samples, seed } => {
            let sim = simulate.then_some((*samples, *seed));
            let mut args = vec![("sweep", sweep.to_string())];
            if *simulate {
                args.push(("simulate", String::new()));
            }
            ("power", args, cmd_power(&cfg, *sweep, sim)?)
        }
        Command::Optimize { sweep } => {
            let grid = radius_grid(&cfg, *sweep, cfg.scenario.cell_radius / 300.0)?;
            let (table, a2, a4) = cmd_optimize(&cfg, &grid)?;
            eprintln!("alpha=2: r* = {} m ({})", format_sig(a2.r_star, 9), a2.method.name());
            eprintln!("alpha=4: r* = {} m ({}, {} root(s))", format_sig(a4.r_star, 9), a4.method.name(), a4.candidates.len());
            ("optimize", sweep.map(|s| vec![("sweep", s.to_string())]).unwrap_or_default(), table)
        }
        Command::Budget { target, sweep } => {
            let grid = radius_grid(&cfg, *sweep, cfg.scenario.cell_radius / 300.0)?;
            let mut args = vec![("target", target.to_string())];
            if let Some(sw) = sweep {
                args.push(("sweep", sw.to_string()));
            }
            ("budget", args, cmd_budget(&cfg, *target, &grid)?)
        }
        Command::Simulate { samples, seed } => (
            "simulate",
            vec![("samples", samples.to_string()), ("seed", seed.to_string())],
            cmd_simulate(&cfg, *samples, *seed)?,
        ),
        Command::Comply => {
            let report = cmd_comply(&cfg)?;
            let code = if report.compliant() { EXIT_OK } else { EXIT_NONCOMPLIANT };
            return Ok(Outcome::Report(report.to_string(), code));
        }
    };
    let mut head = vec![("command".to_string(), name.to_string())];
    head.extend(args.into_iter().map(|(k, v)| (format!("arg.{k}"), v)));
    table.metadata.splice(0..0, head);
    Ok(Outcome::Table(table))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Only the first pool request in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(Outcome::Table(table)) => {
            let written = match &cli.out {
                Some(path) => table.write(path).map_err(CliError::from),
                None => std::io::stdout().write_all(table.to_csv().as_bytes()).map_err(|e| CliError::Core(Error::Io(e.to_string()))),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Ok(Outcome::Report(text, code)) => {
            println!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
