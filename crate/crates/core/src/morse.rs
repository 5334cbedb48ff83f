//! Single Morse oscillator in dimensionless form.
//!
//! With `q̄ = βq` and `y = 1 − e^{−q̄}` the oscillator Hamiltonian in units of
//! `ħω` reads `p̄²/κ + (κ/4) y²`, `p̄ = −i d/dq̄`. Bound states are
//!
//! ```text
//! ψ_v(q̄) = N_v z^s e^{−z/2} L_v^{(2s)}(z),   z = κ e^{−q̄},   s = (κ − 1)/2 − v
//! ```
//!
//! with energies `ε(v) = (v + ½) − (v + ½)²/κ`. Matrix elements of `ŷ` and
//! `d/dq̄` are computed by adaptive quadrature, which is also used to check
//! the closed-form normalization constant every time a well is tabulated.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, QuadSettings};

/// Lower edge of the default quadrature window in `q̄`.
pub const QBAR_MIN: f64 = -3.0;
/// Upper edge of the default quadrature window in `q̄`; widened for shallow wells.
pub const QBAR_MAX: f64 = 12.0;

const NORM_TOL: f64 = 1e-8;

/// A Morse well with `n_basis` retained bound levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorseWell {
    kappa: f64,
    omega: f64,
    n_basis: usize,
}

impl MorseWell {
    /// `kappa = 2j + 1` must exceed `2·n_basis` so every retained level sits
    /// below the top of the Morse progression.
    pub fn new(kappa: f64, omega: f64, n_basis: usize) -> Result<Self> {
        if n_basis == 0 {
            return Err(Error::Domain("n_basis must be at least 1".into()));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !(kappa.is_finite() && kappa > 2.0 * n_basis as f64) {
            return Err(Error::Domain(format!(
                "kappa = {kappa} does not support {n_basis} bound levels (need kappa > {})",
                2 * n_basis
            )));
        }
        Ok(Self {
            kappa,
            omega,
            n_basis,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// Well depth `D = ħωκ/4` in cm⁻¹.
    pub fn depth(&self) -> f64 {
        self.omega * self.kappa / 4.0
    }

    fn check_level(&self, v: usize) -> Result<()> {
        if v >= self.n_basis {
            return Err(Error::Index {
                index: v,
                len: self.n_basis,
            });
        }
        Ok(())
    }

    /// Dimensionless level energy `ε(v)`; multiply by `ħω` for cm⁻¹.
    pub fn energy(&self, v: usize) -> Result<f64> {
        self.check_level(v)?;
        Ok(level_energy(self.kappa, v))
    }

    /// Normalized eigenfunction `ψ_v` sampled on a strictly increasing grid.
    pub fn wavefunction(&self, v: usize, qbar_grid: &[f64]) -> Result<Vec<f64>> {
        self.check_level(v)?;
        check_grid(qbar_grid)?;
        let level = Level::new(self.kappa, v);
        Ok(qbar_grid.iter().map(|&q| level.eval(q).0).collect())
    }

    /// `dψ_v/dq̄` sampled on a strictly increasing grid.
    pub fn wavefunction_derivative(&self, v: usize, qbar_grid: &[f64]) -> Result<Vec<f64>> {
        self.check_level(v)?;
        check_grid(qbar_grid)?;
        let level = Level::new(self.kappa, v);
        Ok(qbar_grid.iter().map(|&q| level.eval(q).1).collect())
    }

    /// All retained eigenfunctions at one point, as a `n_basis` vector.
    pub(crate) fn eval_all(&self, q: f64, out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate().take(self.n_basis) {
            *o = Level::new(self.kappa, v).eval(q).0;
        }
    }

    /// Quadrature window covering every retained level to below 1e-12 in ψ².
    pub fn quadrature_window(&self) -> (f64, f64) {
        let s_min = 0.5 * (self.kappa - 1.0) - (self.n_basis - 1) as f64;
        let hi = QBAR_MAX.max(self.kappa.ln() + 30.0 / s_min);
        (QBAR_MIN, hi)
    }

    /// Symmetric matrix `⟨v′|ŷ|v⟩`, `ŷ = 1 − e^{−q̄}`.
    pub fn matrix_y(&self) -> Result<DMatrix<f64>> {
        Ok(self.matrices()?.y.clone())
    }

    /// Antisymmetric matrix `M = ⟨v′|d/dq̄|v⟩`; the momentum is `p̄ = −iM`.
    pub fn matrix_p(&self) -> Result<DMatrix<f64>> {
        Ok(self.matrices()?.m.clone())
    }

    /// Tabulated `ŷ`, `d/dq̄` and Gram matrices, cached per `(κ, n_basis)`.
    pub fn matrices(&self) -> Result<Arc<MorseMatrices>> {
        let key = (format!("{:.11e}", self.kappa), self.n_basis);
        let cache = matrix_cache();
        if let Some(hit) = cache.read().expect("morse cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let computed = Arc::new(self.compute_matrices(QuadSettings {
            initial_panels: self.default_panels(),
            ..QuadSettings::default()
        })?);
        cache
            .write()
            .expect("morse cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&computed));
        Ok(computed)
    }

    fn default_panels(&self) -> usize {
        let (a, b) = self.quadrature_window();
        // Panel width a fraction of the ground-state width √(2/κ).
        ((b - a) * self.kappa.sqrt() / 0.5).ceil().max(64.0) as usize
    }

    /// Uncached tabulation with explicit quadrature settings.
    pub fn compute_matrices(&self, settings: QuadSettings) -> Result<MorseMatrices> {
        let n = self.n_basis;
        let levels: Vec<Level> = (0..n).map(|v| Level::new(self.kappa, v)).collect();
        let (a, b) = self.quadrature_window();
        let nn = n * n;
        let mut psi = vec![0.0; n];
        let mut dpsi = vec![0.0; n];
        // d/dq̄ elements grow like √κ; integrate them at unit scale
        let d_scale = self.kappa.sqrt();
        let (vals, err) = integrate_vec(
            |q, out| {
                for (v, lvl) in levels.iter().enumerate() {
                    let (p, d) = lvl.eval(q);
                    psi[v] = p;
                    dpsi[v] = d / d_scale;
                }
                let y = -(-q).exp_m1();
                for i in 0..n {
                    for j in 0..n {
                        let pp = psi[i] * psi[j];
                        out[i * n + j] = pp;
                        out[nn + i * n + j] = pp * y;
                        out[2 * nn + i * n + j] = psi[i] * dpsi[j];
                    }
                }
            },
            a,
            b,
            3 * nn,
            settings,
        )?;

        let gram = DMatrix::from_fn(n, n, |i, j| vals[i * n + j]);
        let raw_y = DMatrix::from_fn(n, n, |i, j| vals[nn + i * n + j]);
        let raw_d = DMatrix::from_fn(n, n, |i, j| vals[2 * nn + i * n + j] * d_scale);

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        if worst > NORM_TOL {
            return Err(Error::Accuracy {
                what: format!("Morse eigenfunction orthonormality at kappa = {}", self.kappa),
                achieved: worst,
                wanted: NORM_TOL,
            });
        }

        let y = (&raw_y + raw_y.transpose()) * 0.5;
        let m = (&raw_d - raw_d.transpose()) * 0.5;
        Ok(MorseMatrices {
            kappa: self.kappa,
            y,
            m,
            gram,
            quadrature_error: err,
        })
    }
}

/// Quadrature-derived single-oscillator matrices.
#[derive(Clone, Debug)]
pub struct MorseMatrices {
    pub kappa: f64,
    /// `⟨v′|ŷ|v⟩`, symmetrized.
    pub y: DMatrix<f64>,
    /// `⟨v′|d/dq̄|v⟩`, antisymmetrized.
    pub m: DMatrix<f64>,
    /// Raw overlap matrix from quadrature.
    pub gram: DMatrix<f64>,
    /// Final error estimate, with the `d/dq̄` block measured in units of √κ.
    pub quadrature_error: f64,
}

type CacheKey = (String, usize);

fn matrix_cache() -> &'static RwLock<HashMap<CacheKey, Arc<MorseMatrices>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<MorseMatrices>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub(crate) fn level_energy(kappa: f64, v: usize) -> f64 {
    let x = v as f64 + 0.5;
    x - x * x / kappa
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Precomputed constants for one level.
#[derive(Clone, Copy, Debug)]
struct Level {
    kappa: f64,
    v: usize,
    s: f64,
    alpha: f64,
    ln_norm: f64,
}

impl Level {
    fn new(kappa: f64, v: usize) -> Self {
        let alpha = kappa - 2.0 * v as f64 - 1.0;
        let s = 0.5 * alpha;
        // N² = v! α / Γ(v + α + 1)
        let ln_norm = 0.5 * (ln_gamma(v as f64 + 1.0) + alpha.ln() - ln_gamma(v as f64 + alpha + 1.0));
        Self {
            kappa,
            v,
            s,
            alpha,
            ln_norm,
        }
    }

    /// Returns `(ψ, dψ/dq̄)` at `q̄`.
    fn eval(&self, q: f64) -> (f64, f64) {
        let ln_z = self.kappa.ln() - q;
        let z = ln_z.exp();
        let ln_pref = self.ln_norm + self.s * ln_z - 0.5 * z;
        if ln_pref < -745.0 {
            return (0.0, 0.0);
        }
        let pref = ln_pref.exp();
        let l = laguerre(self.v, self.alpha, z);
        let psi = pref * l;
        let dl = if self.v == 0 {
            0.0
        } else {
            laguerre(self.v - 1, self.alpha + 1.0, z)
        };
        let dpsi = -(self.s - 0.5 * z) * psi + pref * z * dl;
        (psi, dpsi)
    }
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by upward recurrence.
pub(crate) fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
