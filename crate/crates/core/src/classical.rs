//! Classical counterpart of the two-oscillator Hamiltonian: symplectic
//! integration, Poincaré sections and a largest-Lyapunov-exponent estimate.
//!
//! In units of `ħω`, with time in units of `1/ω`,
//!
//! ```text
//! H = (p̄₁² + p̄₂²)/κ + (2t/κ) p̄₁p̄₂ + (κ/4)(y₁² + y₂²) + (κ x_f/2) y₁y₂,   yᵢ = 1 − e^{−q̄ᵢ}
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SpectrumPoint;
use crate::params::MoleculeParams;

/// Default integration step (units of `1/ω`).
pub const DEFAULT_H: f64 = 0.005;
/// Trajectories with any `q̄` beyond this are treated as dissociated.
pub const ESCAPE_BOUND: f64 = 50.0;

const SECTION_TOL: f64 = 1e-8;

/// Point in the four-dimensional phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PhaseState {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        Self { q1, q2, p1, p2 }
    }

    pub fn is_finite(&self) -> bool {
        self.q1.is_finite() && self.q2.is_finite() && self.p1.is_finite() && self.p2.is_finite()
    }

    /// Oscillator exchange `1 ↔ 2`.
    pub fn swapped(&self) -> Self {
        Self::new(self.q2, self.q1, self.p2, self.p1)
    }

    fn escaped(&self) -> bool {
        self.q1 > ESCAPE_BOUND || self.q2 > ESCAPE_BOUND
    }

    fn as_array(&self) -> [f64; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Symplectic scheme used to advance the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Second-order position Verlet.
    Leapfrog,
    /// Fourth-order triple-jump composition of leapfrog steps.
    #[default]
    Yoshida4,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leapfrog" => Ok(Self::Leapfrog),
            "yoshida4" => Ok(Self::Yoshida4),
            _ => Err(Error::Config(format!("unknown integrator '{s}' (leapfrog|yoshida4)"))),
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Leapfrog => "leapfrog",
            Self::Yoshida4 => "yoshida4",
        })
    }
}

/// The classical Hamiltonian at one path point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalSystem {
    kappa: f64,
    x_f: f64,
    t: f64,
}

impl ClassicalSystem {
    pub fn new(kappa: f64, x_f: f64, t: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(x_f.abs() < 1.0 && t.abs() < 1.0) {
            return Err(Error::Domain(format!("couplings must lie in (-1, 1), got x_f={x_f}, t={t}")));
        }
        Ok(Self { kappa, x_f, t })
    }

    /// System for a path point; the kinetic coupling is `t = x_g`.
    pub fn from_params(p: &MoleculeParams) -> Result<Self> {
        p.validate()?;
        Self::new(p.kappa, p.x_f, p.x_g)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn x_f(&self) -> f64 {
        self.x_f
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn kinetic(&self, s: &PhaseState) -> f64 {
        (s.p1 * s.p1 + s.p2 * s.p2 + 2.0 * self.t * s.p1 * s.p2) / self.kappa
    }

    pub fn potential(&self, q1: f64, q2: f64) -> f64 {
        let y1 = -(-q1).exp_m1();
        let y2 = -(-q2).exp_m1();
        0.25 * self.kappa * (y1 * y1 + y2 * y2) + 0.5 * self.kappa * self.x_f * y1 * y2
    }

    /// `E/ħω`.
    pub fn energy(&self, s: &PhaseState) -> f64 {
        self.kinetic(s) + self.potential(s.q1, s.q2)
    }

    /// Energy of oscillator 1 alone, conserved when uncoupled.
    pub fn single_energy(&self, q: f64, p: f64) -> f64 {
        let y = -(-q).exp_m1();
        p * p / self.kappa + 0.25 * self.kappa * y * y
    }

    fn velocity(&self, p1: f64, p2: f64) -> (f64, f64) {
        let c = 2.0 / self.kappa;
        (c * (p1 + self.t * p2), c * (p2 + self.t * p1))
    }

    fn force(&self, q1: f64, q2: f64) -> (f64, f64) {
        let e1 = (-q1).exp();
        let e2 = (-q2).exp();
        let (y1, y2) = (1.0 - e1, 1.0 - e2);
        let a = 0.5 * self.kappa;
        let b = 0.5 * self.kappa * self.x_f;
        (-(a * y1 + b * y2) * e1, -(a * y2 + b * y1) * e2)
    }

    fn leapfrog(&self, s: PhaseState, h: f64) -> PhaseState {
        let (v1, v2) = self.velocity(s.p1, s.p2);
        let q1 = s.q1 + 0.5 * h * v1;
        let q2 = s.q2 + 0.5 * h * v2;
        let (f1, f2) = self.force(q1, q2);
        let p1 = s.p1 + h * f1;
        let p2 = s.p2 + h * f2;
        let (v1, v2) = self.velocity(p1, p2);
        PhaseState::new(q1 + 0.5 * h * v1, q2 + 0.5 * h * v2, p1, p2)
    }

    fn advance_unchecked(&self, s: PhaseState, h: f64, integrator: Integrator) -> PhaseState {
        match integrator {
            Integrator::Leapfrog => self.leapfrog(s, h),
            Integrator::Yoshida4 => {
                let c = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - c);
                let w0 = -c * w1;
                let s = self.leapfrog(s, w1 * h);
                let s = self.leapfrog(s, w0 * h);
                self.leapfrog(s, w1 * h)
            }
        }
    }

    /// One leapfrog step.
    pub fn step(&self, s: &PhaseState, h: f64) -> Result<PhaseState> {
        self.advance(s, h, Integrator::Leapfrog)
    }

    /// One step of the chosen integrator; negative `h` runs backwards.
    pub fn advance(&self, s: &PhaseState, h: f64, integrator: Integrator) -> Result<PhaseState> {
        if !(h != 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("step size must be finite and nonzero, got {h}")));
        }
        let out = self.advance_unchecked(*s, h, integrator);
        if !out.is_finite() {
            return Err(Error::Integration(format!("non-finite state after step from {s:?}")));
        }
        Ok(out)
    }
}

/// `E/ħω` of a phase point for parameters `p` at path value `t`.
pub fn classical_energy(s: &PhaseState, p: &MoleculeParams, t: f64) -> Result<f64> {
    Ok(ClassicalSystem::new(p.kappa, p.x_f, t)?.energy(s))
}

/// One leapfrog step for parameters `p` at path value `t`.
pub fn step(s: &PhaseState, h: f64, p: &MoleculeParams, t: f64) -> Result<PhaseState> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {h}")));
    }
    ClassicalSystem::new(p.kappa, p.x_f, t)?.step(s, h)
}

/// How a quantum eigenenergy is converted to a classical section energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyConvention {
    /// `(E_α − E_0)/ħω(t)`: excitation above the quantum ground state.
    #[default]
    Shifted,
    /// `E_α/ħω(t)`, zero-point energy included.
    AsIs,
}

impl std::str::FromStr for EnergyConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted" => Ok(Self::Shifted),
            "as-is" | "asis" => Ok(Self::AsIs),
            _ => Err(Error::Config(format!("unknown energy convention '{s}' (shifted|as-is)"))),
        }
    }
}

impl std::fmt::Display for EnergyConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Shifted => "shifted",
            Self::AsIs => "as-is",
        })
    }
}

/// Classical energy `E/ħω` matching quantum state `alpha` (0-based).
pub fn section_energy(point: &SpectrumPoint, alpha: usize, convention: EnergyConvention) -> Result<f64> {
    let e = *point.energies.get(alpha).ok_or(Error::Index {
        index: alpha,
        len: point.dim(),
    })?;
    let e = match convention {
        EnergyConvention::Shifted => e - point.energies[0],
        EnergyConvention::AsIs => e,
    };
    Ok(e / point.params.omega)
}

/// Poincaré section settings. The surface is `q̄₂ = q2_section` crossed
/// with `dq̄₂/dτ > 0`, which is the `p̄₂`-root selected by the energy
/// constraint (`p̄₂ = −t p̄₁ + √…`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub energy: f64,
    pub q2_section: f64,
    pub max_crossings: usize,
    pub max_time: f64,
    pub h: f64,
    /// Initial conditions per axis over `(q̄₁, p̄₁)`.
    pub ic_grid: (usize, usize),
    pub integrator: Integrator,
}

impl SectionSpec {
    pub fn new(energy: f64) -> Self {
        Self {
            energy,
            q2_section: 0.0,
            max_crossings: 400,
            max_time: 2e4,
            h: DEFAULT_H,
            ic_grid: (16, 16),
            integrator: Integrator::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Domain(format!("step size must be positive, got {}", self.h)));
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::Domain(format!(
                "section energy must lie above the potential minimum, got {}",
                self.energy
            )));
        }
        if self.ic_grid.0 == 0 || self.ic_grid.1 == 0 {
            return Err(Error::Domain("initial-condition grid must be non-empty".into()));
        }
        if !(self.max_time > 0.0) || self.max_crossings == 0 {
            return Err(Error::Domain("max_time and max_crossings must be positive".into()));
        }
        Ok(())
    }
}

/// Admissible `(q̄₁, p̄₁)` rectangle on the section at `spec.energy`.
pub fn ic_rectangle(spec: &SectionSpec, sys: &ClassicalSystem) -> Result<((f64, f64), (f64, f64))> {
    spec.validate()?;
    // On the section V = a y₁² + b y₁ + a y₂²; p̄₂ real needs (1 − t²) p̄₁² ≤ κ(E − V).
    let y2 = -(-spec.q2_section).exp_m1();
    let a = 0.25 * sys.kappa();
    let b = 0.5 * sys.kappa() * sys.x_f() * y2;
    let v_min = a * y2 * y2 - b * b / (4.0 * a);
    let room = spec.energy - v_min;
    if room <= 0.0 {
        return Err(Error::Domain(format!("energy {} does not reach the section", spec.energy)));
    }
    let half = (room / a).sqrt();
    let y_lo = -b / (2.0 * a) - half;
    let y_hi = -b / (2.0 * a) + half;
    let q_lo = -(1.0 - y_lo).ln();
    let q_hi = if y_hi < 1.0 { -(1.0 - y_hi).ln() } else { ESCAPE_BOUND };
    let p_max = (sys.kappa() * room / (1.0 - sys.t() * sys.t())).sqrt();
    Ok(((q_lo, q_hi), (-p_max, p_max)))
}

/// `p̄₂` on the section for given `(q̄₁, p̄₁)`, or `None` if inadmissible.
pub fn section_momentum(sys: &ClassicalSystem, energy: f64, q2: f64, q1: f64, p1: f64) -> Option<f64> {
    let t = sys.t();
    let disc = t * t * p1 * p1 - p1 * p1 - sys.kappa() * (sys.potential(q1, q2) - energy);
    if disc < 0.0 {
        return None;
    }
    Some(-t * p1 + disc.sqrt())
}

/// Cell-centred grid of admissible initial conditions, in trajectory-id order.
pub fn initial_conditions(spec: &SectionSpec, sys: &ClassicalSystem) -> Result<Vec<PhaseState>> {
    let ((q_lo, q_hi), (p_lo, p_hi)) = ic_rectangle(spec, sys)?;
    let (nq, np) = spec.ic_grid;
    let mut out = Vec::new();
    for i in 0..nq {
        let q1 = q_lo + (i as f64 + 0.5) * (q_hi - q_lo) / nq as f64;
        for j in 0..np {
            let p1 = p_lo + (j as f64 + 0.5) * (p_hi - p_lo) / np as f64;
            if let Some(p2) = section_momentum(sys, spec.energy, spec.q2_section, q1, p1) {
                out.push(PhaseState::new(q1, spec.q2_section, p1, p2));
            }
        }
    }
    Ok(out)
}

/// One recorded section crossing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub trajectory: usize,
    pub q1: f64,
    pub p1: f64,
    /// Full phase point at the refined crossing.
    pub state: PhaseState,
}

/// Section points plus bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionResult {
    pub points: Vec<SectionPoint>,
    pub initial_conditions: usize,
    pub escaped: usize,
    /// Set when nothing could be computed (e.g. no admissible initial condition).
    pub diagnostic: Option<String>,
}

/// Integrates from the start of a step to the section by solving for the
/// partial step length with a safeguarded secant (regula falsi) iteration.
fn refine_crossing(
    sys: &ClassicalSystem,
    start: PhaseState,
    h: f64,
    q_star: f64,
    integrator: Integrator,
) -> PhaseState {
    let g = |tau: f64| -> (f64, PhaseState) {
        let s = if tau == 0.0 {
            start
        } else {
            sys.advance_unchecked(start, tau, integrator)
        };
        (s.q2 - q_star, s)
    };
    let (mut a, mut fa) = (0.0, start.q2 - q_star);
    let (mut b, (mut fb, mut sb)) = (h, g(h));
    let mut side = 0;
    for _ in 0..100 {
        if fb.abs() < SECTION_TOL {
            return sb;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let (fc, sc) = g(c);
        if fc.abs() < SECTION_TOL {
            return sc;
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            sb = sc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < 1e-15 * h {
            return sb;
        }
    }
    sb
}

fn trace_section(sys: &ClassicalSystem, spec: &SectionSpec, id: usize, ic: PhaseState) -> (Vec<SectionPoint>, bool) {
    let n_steps = (spec.max_time / spec.h).ceil() as u64;
    let q_star = spec.q2_section;
    let mut s = ic;
    let mut pts = Vec::new();
    for _ in 0..n_steps {
        let next = sys.advance_unchecked(s, spec.h, spec.integrator);
        if !next.is_finite() || next.escaped() {
            return (pts, true);
        }
        if s.q2 < q_star && next.q2 >= q_star {
            let c = refine_crossing(sys, s, spec.h, q_star, spec.integrator);
            pts.push(SectionPoint {
                trajectory: id,
                q1: c.q1,
                p1: c.p1,
                state: c,
            });
            if pts.len() >= spec.max_crossings {
                break;
            }
        }
        s = next;
    }
    (pts, false)
}

/// Poincaré section over the initial-condition grid; trajectories run in
/// parallel and are merged in trajectory-id order.
pub fn poincare_section(spec: &SectionSpec, sys: &ClassicalSystem) -> Result<SectionResult> {
    let ics = match initial_conditions(spec, sys) {
        Ok(ics) => ics,
        Err(Error::Domain(msg)) if spec.validate().is_ok() => {
            return Ok(SectionResult {
                points: Vec::new(),
                initial_conditions: 0,
                escaped: 0,
                diagnostic: Some(msg),
            })
        }
        Err(e) => return Err(e),
    };
    if ics.is_empty() {
        return Ok(SectionResult {
            points: Vec::new(),
            initial_conditions: 0,
            escaped: 0,
            diagnostic: Some("no admissible initial condition on the section".into()),
        });
    }
    let traced: Vec<(Vec<SectionPoint>, bool)> = ics
        .par_iter()
        .enumerate()
        .map(|(id, &ic)| trace_section(sys, spec, id, ic))
        .collect();
    let escaped = traced.iter().filter(|(_, e)| *e).count();
    Ok(SectionResult {
        points: traced.into_iter().flat_map(|(p, _)| p).collect(),
        initial_conditions: ics.len(),
        escaped,
        diagnostic: None,
    })
}

/// Benettin two-trajectory settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpec {
    pub horizon: f64,
    pub h: f64,
    pub offset: f64,
    pub renormalize_every: usize,
    pub integrator: Integrator,
}

impl Default for LyapunovSpec {
    fn default() -> Self {
        Self {
            horizon: 2e4,
            h: 0.01,
            offset: 1e-8,
            renormalize_every: 100,
            integrator: Integrator::Leapfrog,
        }
    }
}

/// Result of one Lyapunov run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LyapunovOutcome {
    /// Largest exponent per unit dimensionless time.
    Bounded(f64),
    /// Reference or shadow trajectory passed the escape bound at this time.
    Escaped(f64),
}

impl LyapunovOutcome {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Self::Bounded(l) => Some(*l),
            Self::Escaped(_) => None,
        }
    }
}

fn distance(a: &PhaseState, b: &PhaseState) -> f64 {
    let (a, b) = (a.as_array(), b.as_array());
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest Lyapunov exponent from the stretching of a shadow trajectory.
pub fn lyapunov_estimate(ic: &PhaseState, sys: &ClassicalSystem, spec: &LyapunovSpec) -> Result<LyapunovOutcome> {
    if !(spec.h > 0.0) || spec.renormalize_every == 0 || !(spec.offset > 0.0) {
        return Err(Error::Domain("invalid Lyapunov settings".into()));
    }
    let n_steps = (spec.horizon / spec.h).round() as usize;
    if n_steps < 10_000 {
        return Err(Error::Domain(format!(
            "horizon/h must be at least 1e4 steps, got {n_steps}"
        )));
    }
    if !ic.is_finite() {
        return Err(Error::Integration("non-finite initial condition".into()));
    }
    // fixed, generic perturbation direction
    let dir = [0.5, 0.5, 0.5, -0.5];
    let shadow_of = |s: &PhaseState, scale: f64, d: [f64; 4]| {
        let a = s.as_array();
        PhaseState::from_array([
            a[0] + scale * d[0],
            a[1] + scale * d[1],
            a[2] + scale * d[2],
            a[3] + scale * d[3],
        ])
    };
    let mut x = *ic;
    let mut y = shadow_of(ic, spec.offset, dir);
    let mut sum_log = 0.0;
    let mut elapsed = 0.0;
    let mut step = 0;
    while step < n_steps {
        let block = spec.renormalize_every.min(n_steps - step);
        for _ in 0..block {
            x = sys.advance_unchecked(x, spec.h, spec.integrator);
            y = sys.advance_unchecked(y, spec.h, spec.integrator);
        }
        step += block;
        elapsed = step as f64 * spec.h;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Integration(format!("non-finite state at time {elapsed}")));
        }
        if x.escaped() || y.escaped() {
            return Ok(LyapunovOutcome::Escaped(elapsed));
        }
        let d = distance(&x, &y);
        if d == 0.0 {
            return Err(Error::Integration("shadow trajectory collapsed onto reference".into()));
        }
        sum_log += (d / spec.offset).ln();
        let (xa, ya) = (x.as_array(), y.as_array());
        let unit = [
            (ya[0] - xa[0]) / d,
            (ya[1] - xa[1]) / d,
            (ya[2] - xa[2]) / d,
            (ya[3] - xa[3]) / d,
        ];
        y = shadow_of(&x, spec.offset, unit);
    }
    Ok(LyapunovOutcome::Bounded(sum_log / elapsed))
}

/// Lyapunov estimates over a section's initial-condition grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSurvey {
    /// One entry per admissible initial condition, trajectory-id order.
    pub outcomes: Vec<LyapunovOutcome>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub escaped: usize,
}

pub fn lyapunov_survey(section: &SectionSpec, sys: &ClassicalSystem, spec: &LyapunovSpec) -> Result<LyapunovSurvey> {
    let ics = initial_conditions(section, sys)?;
    let outcomes = ics
        .par_iter()
        .map(|ic| lyapunov_estimate(ic, sys, spec))
        .collect::<Result<Vec<_>>>()?;
    let bounded: Vec<f64> = outcomes.iter().filter_map(|o| o.exponent()).collect();
    let max = bounded.iter().copied().reduce(f64::max);
    let mean = (!bounded.is_empty()).then(|| bounded.iter().sum::<f64>() / bounded.len() as f64);
    Ok(LyapunovSurvey {
        escaped: outcomes.len() - bounded.len(),
        outcomes,
        max,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn water() -> ClassicalSystem {
        ClassicalSystem::from_params(&MoleculeParams::water()).unwrap()
    }

    #[test]
    fn energy_landmarks() {
        let s = water();
        assert_eq!(s.energy(&PhaseState::new(0.0, 0.0, 0.0, 0.0)), 0.0);
        let plateau = s.energy(&PhaseState::new(60.0, 0.0, 0.0, 0.0));
        assert_abs_diff_eq!(plateau, s.kappa() / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn time_reversal() {
        let s = water();
        let a = PhaseState::new(0.3, -0.2, 1.5, -0.7);
        let b = s.step(&a, 0.01).unwrap();
        let back = s.step(&PhaseState::new(b.q1, b.q2, -b.p1, -b.p2), 0.01).unwrap();
        for (x, y) in [(back.q1, a.q1), (back.q2, a.q2), (-back.p1, a.p1), (-back.p2, a.p2)] {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let p = MoleculeParams::water();
        let a = PhaseState::new(0.0, 0.0, 1.0, 0.0);
        assert!(step(&a, 0.0, &p, p.x_g).is_err());
        assert!(step(&a, -0.1, &p, p.x_g).is_err());
        assert!(ClassicalSystem::new(48.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn nonfinite_state_is_integration_failure() {
        let s = water();
        let a = PhaseState::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(matches!(s.step(&a, 0.01), Err(Error::Integration(_))));
    }

    #[test]
    fn section_momentum_satisfies_shell() {
        let s = water();
        let p2 = section_momentum(&s, 5.0, 0.0, 0.1, 2.0).unwrap();
        let e = s.energy(&PhaseState::new(0.1, 0.0, 2.0, p2));
        assert_abs_diff_eq!(e, 5.0, epsilon = 1e-12);
        assert!(section_momentum(&s, 5.0, 0.0, 0.1, 100.0).is_none());
    }

    #[test]
    fn conventions_parse() {
        assert_eq!("as-is".parse::<EnergyConvention>().unwrap(), EnergyConvention::AsIs);
        assert_eq!("leapfrog".parse::<Integrator>().unwrap(), Integrator::Leapfrog);
        assert!("rk4".parse::<Integrator>().is_err());
    }

    #[test]
    fn lyapunov_needs_enough_steps() {
        let s = water();
        let spec = LyapunovSpec {
            horizon: 10.0,
            ..Default::default()
        };
        assert!(lyapunov_estimate(&PhaseState::new(0.1, 0.0, 0.0, 1.0), &s, &spec).is_err());
    }
}
