//! Command-line driver: argument types and one function per subcommand.
//!
//! State indices on the command line are 1-based (the ground state is 1);
//! the library itself is 0-based.

pub mod catalog;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::classical::{
    lyapunov_survey, poincare_section, section_energy, ClassicalSystem, EnergyConvention, Integrator,
    LyapunovSpec, SectionSpec, DEFAULT_H,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    find_avoided_crossings, fundamentals, scan, spectrum_at, Symmetry, Tracking, TwoModeBasis, DEFAULT_N_SINGLE,
};
use crate::morse::MorseWell;
use crate::observables::{
    diagnose_scan, probability_density, DiagnosticsOptions, EntropyBasis, FidelityStep, DEFAULT_PAD,
};
use crate::params::{gamma, zeta, MoleculeParams, PathSpec, DEFAULT_T_STEP};

pub use catalog::{parse_catalog, read_catalog, CatalogEntry};
pub use output::{format_number, Cell, Format, OutputSet, Table};

#[derive(Parser, Debug)]
#[command(
    name = "lnt",
    version,
    about = "Coupled Morse oscillators along the water → CO2 local-to-normal path"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ζ–γ locality diagram for the built-in endpoints and an optional catalog.
    Diagram(DiagramArgs),
    /// Spectrum, per-state diagnostics and avoided crossings along the path.
    Scan(ScanArgs),
    /// Coordinate-space probability densities of selected states.
    Density(DensityArgs),
    /// Poincaré sections at the energy of a quantum state.
    Poincare(PoincareArgs),
    /// Largest Lyapunov exponents over the section's initial-condition grid.
    Lyapunov(LyapunovArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct BasisArgs {
    /// Morse levels per oscillator.
    #[arg(long, default_value_t = DEFAULT_N_SINGLE)]
    pub n_single: usize,
    /// symmetric | antisymmetric | full
    #[arg(long, default_value = "symmetric")]
    pub symmetry: Symmetry,
}

impl BasisArgs {
    fn basis(&self) -> Result<TwoModeBasis> {
        TwoModeBasis::new(self.n_single, self.symmetry)
    }
}

#[derive(Args, Debug, Clone)]
pub struct PathArgs {
    /// Lower end of the t = x_g window (default: the CO2 endpoint).
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    /// Upper end of the window (default: the water endpoint).
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T_STEP)]
    pub t_step: f64,
}

impl PathArgs {
    /// Uniform grid over the window, starting at the water side.
    pub fn path(&self) -> Result<PathSpec> {
        let full = PathSpec::default_path();
        let (lo, hi) = full.t_range();
        let t_min = self.t_min.unwrap_or(lo);
        let t_max = self.t_max.unwrap_or(hi);
        if !(t_min < t_max) {
            return Err(Error::Config(format!("--t-min ({t_min}) must be below --t-max ({t_max})")));
        }
        if t_min < lo || t_max > hi {
            return Err(Error::Config(format!("t window [{t_min}, {t_max}] leaves the path [{lo}, {hi}]")));
        }
        if !(self.t_step > 0.0 && self.t_step.is_finite()) {
            return Err(Error::Config(format!("--t-step must be positive, got {}", self.t_step)));
        }
        let local_first = (full.local_endpoint.x_g - t_max).abs() <= (full.local_endpoint.x_g - t_min).abs();
        let (start, end) = if local_first { (t_max, t_min) } else { (t_min, t_max) };
        PathSpec::uniform(full.local_endpoint, full.normal_endpoint, start, end, self.t_step)
    }
}

#[derive(Args, Debug, Clone)]
pub struct DiagramArgs {
    /// Extra molecules (`name x_f=… x_g=… [omega=… kappa=…] [nu1=… nu3=…]` per line).
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Morse levels per oscillator used for the built-in fundamentals.
    #[arg(long, default_value_t = DEFAULT_N_SINGLE)]
    pub n_single: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub path: PathArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// States (1-based) for diagnostics and avoided crossings.
    #[arg(long, value_delimiter = ',', default_values_t = [26usize, 27, 28])]
    pub states: Vec<usize>,
    /// Fidelity step; defaults to the grid step.
    #[arg(long)]
    pub delta_t: Option<f64>,
    /// State identity along the scan: energy | overlap
    #[arg(long, default_value = "energy")]
    pub tracking: Tracking,
    /// Entropy bipartition: label | product
    #[arg(long, default_value = "label")]
    pub entropy_basis: EntropyBasis,
    /// Extra harmonic levels for the normal-mode map.
    #[arg(long, default_value_t = DEFAULT_PAD)]
    pub pad: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [26usize, 27, 28])]
    pub states: Vec<usize>,
    /// Path values at which densities are evaluated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [-0.015, -0.05, -0.1, -0.15, -0.2])]
    pub t_values: Vec<f64>,
    /// Square grid `min,max,points` shared by both coordinates.
    #[arg(long, allow_hyphen_values = true, default_value = "-2,6,201")]
    pub grid: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SectionArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [-0.015, -0.1, -0.15, -0.2, -0.571])]
    pub t_values: Vec<f64>,
    /// State (1-based) whose eigenenergy fixes the classical energy.
    #[arg(long, value_delimiter = ',', default_values_t = [27usize])]
    pub states: Vec<usize>,
    /// shifted (above the quantum ground state) | as-is
    #[arg(long, default_value = "shifted")]
    pub energy_convention: EnergyConvention,
    /// Initial conditions per axis, `N` or `NxM`.
    #[arg(long, default_value = "16")]
    pub ic_grid: String,
}

#[derive(Args, Debug, Clone)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub section: SectionArgs,
    /// Integration step in units of 1/ω.
    #[arg(long, default_value_t = DEFAULT_H)]
    pub h: f64,
    #[arg(long, default_value_t = 400)]
    pub max_crossings: usize,
    #[arg(long, default_value_t = 2e4)]
    pub max_time: f64,
    /// leapfrog | yoshida4
    #[arg(long, default_value = "yoshida4")]
    pub integrator: Integrator,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub section: SectionArgs,
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    /// Integration time per trajectory in units of 1/ω.
    #[arg(long, default_value_t = 2e4)]
    pub horizon: f64,
    #[arg(long, default_value = "leapfrog")]
    pub integrator: Integrator,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Runs one parsed command and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Diagram(a) => cmd_diagram(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Density(a) => cmd_density(a),
        Command::Poincare(a) => cmd_poincare(a),
        Command::Lyapunov(a) => cmd_lyapunov(a),
    }
}

/// 1-based CLI states to 0-based indices, checked against the basis.
fn zero_based(states: &[usize], dim: usize) -> Result<Vec<usize>> {
    if states.is_empty() {
        return Err(Error::Config("at least one state is required".into()));
    }
    states
        .iter()
        .map(|&s| {
            if s == 0 || s > dim {
                Err(Error::Config(format!("state {s} outside 1..={dim}")))
            } else {
                Ok(s - 1)
            }
        })
        .collect()
}

fn check_t_values(t_values: &[f64]) -> Result<PathSpec> {
    let path = PathSpec::default_path();
    if t_values.is_empty() {
        return Err(Error::Config("at least one t value is required".into()));
    }
    for &t in t_values {
        path.params_at(t).map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(path)
}

/// Short decimal label for file names.
pub fn t_label(t: f64) -> String {
    format!("{t:.6}")
}

fn zeta_of(nu: (f64, f64)) -> Result<f64> {
    zeta(nu.0 - nu.1, 0.5 * (nu.0 + nu.1))
}

pub fn cmd_diagram(a: &DiagramArgs) -> Result<Vec<PathBuf>> {
    let user = match &a.catalog {
        Some(p) => read_catalog(p)?,
        None => Vec::new(),
    };
    let mut table = Table::new(&["name", "x_f", "x_g", "gamma", "zeta"]);
    for (name, p) in [("H2O", MoleculeParams::water()), ("CO2", MoleculeParams::carbon_dioxide())] {
        let z = zeta_of(fundamentals(&p, a.n_single)?)?;
        table.push(vec![Cell::Text(name.into()), p.x_f.into(), p.x_g.into(), p.gamma().into(), z.into()]);
    }
    for e in &user {
        let z = e.fundamentals.map(zeta_of).transpose()?;
        table.push(vec![
            Cell::Text(e.name.clone()),
            e.x_f.into(),
            e.x_g.into(),
            gamma(e.x_f, e.x_g).into(),
            z.into(),
        ]);
    }
    let mut out = OutputSet::new();
    out.add_table(&a.output.out, "zeta_gamma", &table, a.output.format);
    out.commit(&a.output.out)
}

pub fn cmd_scan(a: &ScanArgs) -> Result<Vec<PathBuf>> {
    let basis = a.basis.basis()?;
    let path = a.path.path()?;
    if path.t_grid.len() < 3 {
        return Err(Error::Config("scan needs at least 3 grid points".into()));
    }
    let states = zero_based(&a.states, basis.dim())?;
    let grid_step = (path.t_grid[1] - path.t_grid[0]).abs();
    let step = match a.delta_t {
        None => FidelityStep::GridStep,
        Some(dt) if !(dt > 0.0 && dt.is_finite()) => {
            return Err(Error::Config(format!("--delta-t must be positive, got {dt}")))
        }
        Some(dt) if (dt - grid_step).abs() <= 1e-12 * grid_step => FidelityStep::GridStep,
        Some(dt) => FidelityStep::Offset(dt),
    };
    let opts = DiagnosticsOptions {
        step,
        pad: a.pad,
        entropy: a.entropy_basis,
    };
    if a.pad < 4 {
        return Err(Error::Config(format!("--pad must be at least 4, got {}", a.pad)));
    }

    let points = scan(&path, &basis, a.tracking)?;
    let diags = diagnose_scan(&path, &basis, &points, &states, &opts)?;

    let mut spectrum = Table::new(&["t", "state_index", "energy_cm1"]);
    for p in &points {
        for (k, &e) in p.energies.iter().enumerate() {
            spectrum.push(vec![p.t.into(), (k + 1).into(), e.into()]);
        }
    }
    let mut obs = Table::new(&[
        "t",
        "state_index",
        "fidelity",
        "entropy",
        "max_local_v1",
        "max_local_v2",
        "max_local_weight",
        "max_normal_nu1",
        "max_normal_nu3",
        "max_normal_weight",
        "complete_polyad_flag",
    ]);
    for d in &diags {
        let c = &d.components;
        obs.push(vec![
            d.t.into(),
            (d.state + 1).into(),
            d.fidelity.into(),
            d.entropy.into(),
            c.max_local.0 .0.into(),
            c.max_local.0 .1.into(),
            c.max_local.1.into(),
            c.max_normal.0 .0.into(),
            c.max_normal.0 .1.into(),
            c.max_normal.1.into(),
            c.in_complete_polyads.into(),
        ]);
    }
    let mut crossings = Table::new(&["state_index", "t_star", "gap_cm1"]);
    for &s in &states {
        if s + 1 >= basis.dim() {
            continue;
        }
        for c in find_avoided_crossings(&points, s)? {
            crossings.push(vec![(s + 1).into(), c.t_star.into(), c.gap.into()]);
        }
    }

    let dir = &a.output.out;
    let mut out = OutputSet::new();
    out.add_table(dir, "spectrum", &spectrum, a.output.format);
    out.add_table(dir, "observables", &obs, a.output.format);
    out.add_table(dir, "avoided_crossings", &crossings, a.output.format);
    out.commit(dir)
}

/// Parses `min,max,points`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("grid must be 'min,max,points', got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

pub fn cmd_density(a: &DensityArgs) -> Result<Vec<PathBuf>> {
    let basis = a.basis.basis()?;
    let states = zero_based(&a.states, basis.dim())?;
    let path = check_t_values(&a.t_values)?;
    let grid = parse_grid(&a.grid)?;
    let dir = &a.output.out;
    let mut out = OutputSet::new();
    for &t in &a.t_values {
        let p = path.params_at(t)?;
        let point = spectrum_at(&basis, &p)?;
        let well = MorseWell::new(p.kappa, p.omega, basis.n_single())?;
        for &s in &states {
            let rho = probability_density(&point.state(s)?, &basis, &well, &grid, &grid)?;
            let mut table = Table::new(&["q1", "q2", "rho"]);
            for (i, &q1) in grid.iter().enumerate() {
                for (j, &q2) in grid.iter().enumerate() {
                    table.push(vec![q1.into(), q2.into(), rho[(i, j)].into()]);
                }
            }
            out.add_table(dir, &format!("density_{}_{}", s + 1, t_label(t)), &table, a.output.format);
        }
    }
    out.commit(dir)
}

/// Parses `N` or `NxM`.
pub fn parse_ic_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("ic grid must be 'N' or 'NxM', got '{s}'"));
    let (a, b) = match s.split_once('x') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

struct SectionSetup {
    t: f64,
    params: MoleculeParams,
    state: usize,
    energy_cm1: f64,
    energy: f64,
    system: ClassicalSystem,
}

fn section_setups(a: &SectionArgs) -> Result<Vec<SectionSetup>> {
    let basis = a.basis.basis()?;
    let states = zero_based(&a.states, basis.dim())?;
    let path = check_t_values(&a.t_values)?;
    let mut out = Vec::new();
    for &t in &a.t_values {
        let params = path.params_at(t)?;
        let point = spectrum_at(&basis, &params)?;
        for &s in &states {
            out.push(SectionSetup {
                t,
                params,
                state: s,
                energy_cm1: point.energies[s],
                energy: section_energy(&point, s, a.energy_convention)?,
                system: ClassicalSystem::from_params(&params)?,
            });
        }
    }
    Ok(out)
}

pub fn cmd_poincare(a: &PoincareArgs) -> Result<Vec<PathBuf>> {
    if a.section.states.len() != 1 {
        return Err(Error::Config("poincare takes exactly one state".into()));
    }
    let ic_grid = parse_ic_grid(&a.section.ic_grid)?;
    if !(a.h > 0.0 && a.h.is_finite()) {
        return Err(Error::Config(format!("--h must be positive, got {}", a.h)));
    }
    if a.max_crossings == 0 || !(a.max_time > 0.0) {
        return Err(Error::Config("--max-crossings and --max-time must be positive".into()));
    }
    let dir = &a.output.out;
    let mut out = OutputSet::new();
    for setup in section_setups(&a.section)? {
        let spec = SectionSpec {
            energy: setup.energy,
            q2_section: 0.0,
            max_crossings: a.max_crossings,
            max_time: a.max_time,
            h: a.h,
            ic_grid,
            integrator: a.integrator,
        };
        let res = poincare_section(&spec, &setup.system)?;
        let mut table = Table::new(&["trajectory_id", "q1", "p1"]);
        for pt in &res.points {
            table.push(vec![pt.trajectory.into(), pt.q1.into(), pt.p1.into()]);
        }
        let stem = format!("poincare_{}", t_label(setup.t));
        out.add_table(dir, &stem, &table, a.output.format);
        let meta = json!({
            "t": setup.t,
            "params": setup.params,
            "state_index": setup.state + 1,
            "n_single": a.section.basis.n_single,
            "symmetry": a.section.basis.symmetry.to_string(),
            "energy_cm1": setup.energy_cm1,
            "energy_convention": a.section.energy_convention.to_string(),
            "energy": setup.energy,
            "section": {"coordinate": "q2", "value": 0.0, "direction": "dq2/dtau > 0"},
            "h": a.h,
            "integrator": a.integrator.to_string(),
            "ic_grid": [ic_grid.0, ic_grid.1],
            "initial_conditions": res.initial_conditions,
            "escaped": res.escaped,
            "points": res.points.len(),
            "max_crossings": a.max_crossings,
            "max_time": a.max_time,
            "diagnostic": res.diagnostic,
        });
        out.add(dir.join(format!("{stem}_meta.json")), output::json_bytes(&meta));
    }
    out.commit(dir)
}

pub fn cmd_lyapunov(a: &LyapunovArgs) -> Result<Vec<PathBuf>> {
    let ic_grid = parse_ic_grid(&a.section.ic_grid)?;
    let spec = LyapunovSpec {
        horizon: a.horizon,
        h: a.h,
        integrator: a.integrator,
        ..Default::default()
    };
    if !(a.h > 0.0) || (a.horizon / a.h) < 1e4 {
        return Err(Error::Config("--horizon / --h must be at least 1e4 steps".into()));
    }
    let mut table = Table::new(&[
        "t",
        "state_index",
        "energy",
        "initial_conditions",
        "escaped",
        "max_exponent",
        "mean_exponent",
    ]);
    for setup in section_setups(&a.section)? {
        let mut section = SectionSpec::new(setup.energy);
        section.ic_grid = ic_grid;
        let survey = lyapunov_survey(&section, &setup.system, &spec)?;
        table.push(vec![
            setup.t.into(),
            (setup.state + 1).into(),
            setup.energy.into(),
            survey.outcomes.len().into(),
            survey.escaped.into(),
            survey.max.into(),
            survey.mean.into(),
        ]);
    }
    let dir = &a.output.out;
    let mut out = OutputSet::new();
    out.add_table(dir, "lyapunov", &table, a.output.format);
    out.commit(dir)
}

/// Reads a CSV written by this tool back into header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("-2,6,201").unwrap();
        assert_eq!((g.len(), g[0], g[200]), (201, -2.0, 6.0));
        assert!(parse_grid("6,-2,10").is_err());
        assert!(parse_grid("0,1").is_err());
        assert_eq!(parse_ic_grid("16").unwrap(), (16, 16));
        assert_eq!(parse_ic_grid("8x4").unwrap(), (8, 4));
        assert!(parse_ic_grid("0").is_err());
    }

    #[test]
    fn default_window_starts_at_water() {
        let args = PathArgs {
            t_min: Some(-0.2),
            t_max: None,
            t_step: DEFAULT_T_STEP,
        };
        let p = args.path().unwrap();
        assert_eq!(p.t_grid[0], -0.015);
        assert_eq!(*p.t_grid.last().unwrap(), -0.2);
        assert_eq!(p.t_grid.len(), 371);
        let bad = PathArgs {
            t_min: Some(-0.9),
            ..args
        };
        assert!(bad.path().is_err());
    }

    #[test]
    fn states_are_one_based() {
        assert_eq!(zero_based(&[1, 27], 78).unwrap(), vec![0, 26]);
        assert!(zero_based(&[0], 78).is_err());
        assert!(zero_based(&[79], 78).is_err());
    }

    #[test]
    fn t_labels() {
        assert_eq!(t_label(-0.015), "-0.015000");
    }
}
