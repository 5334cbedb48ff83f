//! The linear water → CO₂ path and scalar locality measures.

use std::f64::consts::FRAC_2_PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of parameter space: coupling ratios, harmonic frequency
/// (cm⁻¹) and Morse depth parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    /// Force-constant ratio `f_rr′ / f_rr`.
    pub x_f: f64,
    /// Kinetic (g-matrix) ratio `g°_rr′ / g°_rr`; doubles as the path parameter `t`.
    pub x_g: f64,
    pub omega: f64,
    pub kappa: f64,
}

impl MoleculeParams {
    pub fn new(x_f: f64, x_g: f64, omega: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            x_f,
            x_g,
            omega,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_f, self.x_g, self.omega, self.kappa]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain(format!("non-finite parameters {self:?}")));
        }
        if self.x_f.abs() >= 1.0 || self.x_g.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "|x_f| and |x_g| must be below 1 (x_f = {}, x_g = {})",
                self.x_f, self.x_g
            )));
        }
        if self.omega <= 0.0 {
            return Err(Error::Domain(format!("omega must be positive, got {}", self.omega)));
        }
        if self.kappa <= 2.0 {
            return Err(Error::Domain(format!("kappa must exceed 2, got {}", self.kappa)));
        }
        Ok(())
    }

    /// The water-like local-mode endpoint.
    pub fn water() -> Self {
        Self {
            x_f: -0.012,
            x_g: -0.015,
            omega: 1853.0,
            kappa: 48.0,
        }
    }

    /// The CO₂-like normal-mode endpoint.
    pub fn carbon_dioxide() -> Self {
        Self {
            x_f: 0.047,
            x_g: -0.571,
            omega: 959.0,
            kappa: 160.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.x_f, self.x_g)
    }

    pub fn harmonic_couplings(&self) -> HarmonicCouplings {
        harmonic_couplings(self)
    }
}

/// Endpoints plus the grid of `t = x_g` values to visit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub local_endpoint: MoleculeParams,
    pub normal_endpoint: MoleculeParams,
    pub t_grid: Vec<f64>,
}

/// Grid step of the default path.
pub const DEFAULT_T_STEP: f64 = 5e-4;

impl PathSpec {
    pub fn new(local: MoleculeParams, normal: MoleculeParams, t_grid: Vec<f64>) -> Result<Self> {
        local.validate()?;
        normal.validate()?;
        if local.x_g == normal.x_g {
            return Err(Error::Domain("path endpoints share the same x_g".into()));
        }
        let path = Self {
            local_endpoint: local,
            normal_endpoint: normal,
            t_grid,
        };
        if path.t_grid.len() < 2 {
            return Err(Error::Domain("path grid needs at least 2 points".into()));
        }
        let increasing = path.t_grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = path.t_grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Domain("path grid must be strictly monotone".into()));
        }
        for &t in &path.t_grid {
            path.check_t(t)?;
        }
        Ok(path)
    }

    /// Evenly spaced grid from `t_start` to `t_end` (both included) with a
    /// spacing as close to `|step|` as the interval allows.
    pub fn uniform(
        local: MoleculeParams,
        normal: MoleculeParams,
        t_start: f64,
        t_end: f64,
        step: f64,
    ) -> Result<Self> {
        if !(step.is_finite() && step != 0.0) {
            return Err(Error::Domain(format!("invalid step {step}")));
        }
        let intervals = ((t_end - t_start).abs() / step.abs()).round().max(1.0) as usize;
        let grid = (0..=intervals)
            .map(|i| {
                if i == intervals {
                    t_end
                } else {
                    t_start + (t_end - t_start) * i as f64 / intervals as f64
                }
            })
            .collect();
        Self::new(local, normal, grid)
    }

    /// Water → CO₂, 1113 points with step 5×10⁻⁴, starting at the water end.
    pub fn default_path() -> Self {
        let local = MoleculeParams::water();
        let normal = MoleculeParams::carbon_dioxide();
        Self::uniform(local, normal, local.x_g, normal.x_g, DEFAULT_T_STEP)
            .expect("built-in path is valid")
    }

    /// Same endpoints, different grid.
    pub fn with_grid(&self, t_grid: Vec<f64>) -> Result<Self> {
        Self::new(self.local_endpoint, self.normal_endpoint, t_grid)
    }

    /// Closed interval of admissible `t`.
    pub fn t_range(&self) -> (f64, f64) {
        let (a, b) = (self.local_endpoint.x_g, self.normal_endpoint.x_g);
        (a.min(b), a.max(b))
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain(format!("t = {t} outside the path interval [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Parameters at `t`: `x_g = t`; `x_f`, `ω`, `κ` affine in `t` and
    /// pinned to both endpoints.
    pub fn params_at(&self, t: f64) -> Result<MoleculeParams> {
        self.check_t(t)?;
        let l = &self.local_endpoint;
        let n = &self.normal_endpoint;
        let u = (t - l.x_g) / (n.x_g - l.x_g);
        let lerp = |a: f64, b: f64| a + (b - a) * u;
        let p = if t == l.x_g {
            *l
        } else if t == n.x_g {
            *n
        } else {
            MoleculeParams {
                x_f: lerp(l.x_f, n.x_f),
                x_g: t,
                omega: lerp(l.omega, n.omega),
                kappa: lerp(l.kappa, n.kappa),
            }
        };
        p.validate()?;
        Ok(p)
    }
}

/// Locality condition `γ = (x_f − x_g)²/8`.
pub fn gamma(x_f: f64, x_g: f64) -> f64 {
    let d = x_f - x_g;
    d * d / 8.0
}

/// `ζ = (2/π) arctan(ΔE/Ē)` from the fundamentals' difference and mean.
pub fn zeta(delta_e: f64, mean_e: f64) -> Result<f64> {
    if !(mean_e > 0.0) {
        return Err(Error::Domain(format!("mean fundamental must be positive, got {mean_e}")));
    }
    Ok(FRAC_2_PI * (delta_e / mean_e).atan())
}

/// Degree of locality `ξ = (2/π) arctan(λ/ωx)`.
pub fn xi(lambda: f64, omega_x: f64) -> Result<f64> {
    if omega_x == 0.0 {
        return Err(Error::Domain("anharmonicity omega_x must be nonzero".into()));
    }
    Ok(FRAC_2_PI * (lambda / omega_x).atan())
}

/// Couplings and normal frequencies of the quadratic two-oscillator model, cm⁻¹.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCouplings {
    /// Polyad-preserving coupling `(ħω/2)(x_f + x_g)`.
    pub lambda: f64,
    /// Polyad-breaking coupling `(ħω/2)(x_f − x_g)`.
    pub lambda_prime: f64,
    pub omega_g: f64,
    pub omega_u: f64,
}

pub fn harmonic_couplings(p: &MoleculeParams) -> HarmonicCouplings {
    let half = 0.5 * p.omega;
    HarmonicCouplings {
        lambda: half * (p.x_f + p.x_g),
        lambda_prime: half * (p.x_f - p.x_g),
        omega_g: p.omega * ((1.0 + p.x_f) * (1.0 + p.x_g)).sqrt(),
        omega_u: p.omega * ((1.0 - p.x_f) * (1.0 - p.x_g)).sqrt(),
    }
}

/// Morse range parameter `β = √(2ω / (ħ κ g°_rr))`.
///
/// Only meaningful with a user-supplied `g°_rr` and `ħ` in units consistent
/// with `ω`; none of the dimensionless computations need it.
pub fn morse_beta(p: &MoleculeParams, g_rr: f64, hbar: f64) -> Result<f64> {
    if !(g_rr > 0.0 && hbar > 0.0) {
        return Err(Error::Domain("g_rr and hbar must be positive".into()));
    }
    Ok((2.0 * p.omega / (hbar * p.kappa * g_rr)).sqrt())
}
