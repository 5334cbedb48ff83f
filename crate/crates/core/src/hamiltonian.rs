//! Two coupled Morse oscillators: symmetry-adapted basis, Hamiltonian
//! assembly, dense diagonalization and parametric scans.
//!
//! In units of `ħω` the Hamiltonian is
//!
//! ```text
//! H/ħω = Σᵢ ε(vᵢ) + (2t/κ) p̄₁p̄₂ + (κ x_f / 2) ŷ₁ŷ₂,     t = x_g
//! ```
//!
//! and with `p̄ = −iM` the kinetic coupling is the real matrix `−(2t/κ) M⊗M`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morse::{level_energy, MorseWell};
use crate::params::{MoleculeParams, PathSpec};

/// Default number of Morse levels per oscillator.
pub const DEFAULT_N_SINGLE: usize = 12;

/// Exchange-symmetry block of the two-oscillator product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    Full,
}

impl std::str::FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "sym" | "s" => Ok(Symmetry::Symmetric),
            "antisymmetric" | "anti" | "a" => Ok(Symmetry::Antisymmetric),
            "full" | "f" => Ok(Symmetry::Full),
            other => Err(Error::Config(format!("unknown symmetry '{other}'"))),
        }
    }
}

impl std::fmt::Display for Symmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::Full => "full",
        })
    }
}

/// Local product basis `|v₁v₂⟩` restricted to one symmetry block.
///
/// States are ordered by ascending polyad `P_L = v₁ + v₂`, then ascending
/// `v₁`. Symmetric and antisymmetric labels carry `v₁ ≤ v₂` (`v₁ < v₂`) and
/// stand for the normalized combinations `(|v₁v₂⟩ ± |v₂v₁⟩)/√2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoModeBasis {
    n_single: usize,
    symmetry: Symmetry,
    states: Vec<(usize, usize)>,
}

impl TwoModeBasis {
    pub fn new(n_single: usize, symmetry: Symmetry) -> Result<Self> {
        if n_single == 0 {
            return Err(Error::Domain("n_single must be at least 1".into()));
        }
        let mut states = Vec::new();
        for p in 0..=2 * (n_single - 1) {
            for v1 in 0..=p {
                let v2 = p - v1;
                if v1 >= n_single || v2 >= n_single {
                    continue;
                }
                let keep = match symmetry {
                    Symmetry::Symmetric => v1 <= v2,
                    Symmetry::Antisymmetric => v1 < v2,
                    Symmetry::Full => true,
                };
                if keep {
                    states.push((v1, v2));
                }
            }
        }
        Ok(Self {
            n_single,
            symmetry,
            states,
        })
    }

    pub fn n_single(&self) -> usize {
        self.n_single
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Largest polyad whose every product state is inside the truncation.
    pub fn complete_polyad_max(&self) -> usize {
        self.n_single - 1
    }

    pub fn polyad(&self, index: usize) -> usize {
        let (a, b) = self.states[index];
        a + b
    }

    /// Isometry from this block into the `n²` product space (row index `v₁·n + v₂`).
    pub fn embedding(&self) -> DMatrix<f64> {
        let n = self.n_single;
        let mut e = DMatrix::zeros(n * n, self.dim());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (k, &(v1, v2)) in self.states.iter().enumerate() {
            match self.symmetry {
                Symmetry::Full => e[(v1 * n + v2, k)] = 1.0,
                Symmetry::Symmetric if v1 == v2 => e[(v1 * n + v2, k)] = 1.0,
                Symmetry::Symmetric => {
                    e[(v1 * n + v2, k)] = r;
                    e[(v2 * n + v1, k)] = r;
                }
                Symmetry::Antisymmetric => {
                    e[(v1 * n + v2, k)] = r;
                    e[(v2 * n + v1, k)] = -r;
                }
            }
        }
        e
    }

    /// Coefficient matrix `C[v₁, v₂] = ⟨v₁v₂|ψ⟩` in the full product basis.
    pub fn product_coefficients(&self, psi: &[f64]) -> Result<DMatrix<f64>> {
        if psi.len() != self.dim() {
            return Err(Error::Construction(format!(
                "state has {} components, basis has {}",
                psi.len(),
                self.dim()
            )));
        }
        let n = self.n_single;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut c = DMatrix::zeros(n, n);
        for (&amp, &(v1, v2)) in psi.iter().zip(&self.states) {
            match self.symmetry {
                Symmetry::Full => c[(v1, v2)] += amp,
                Symmetry::Symmetric if v1 == v2 => c[(v1, v2)] += amp,
                Symmetry::Symmetric => {
                    c[(v1, v2)] += r * amp;
                    c[(v2, v1)] += r * amp;
                }
                Symmetry::Antisymmetric => {
                    c[(v1, v2)] += r * amp;
                    c[(v2, v1)] -= r * amp;
                }
            }
        }
        Ok(c)
    }
}

/// Which single-oscillator ingredients enter the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Ingredients {
    /// Morse energies and quadrature matrix elements.
    #[default]
    Morse,
    /// Harmonic ladder: `ε = v + ½`, `ŷ → (a + a†)/√κ`, `d/dq̄ → (√κ/2)(a − a†)`.
    Harmonic,
}

/// `H/ħc` in cm⁻¹ for the given block, with `t = p.x_g`.
pub fn build_hamiltonian(basis: &TwoModeBasis, p: &MoleculeParams) -> Result<DMatrix<f64>> {
    build_hamiltonian_with(basis, p, Ingredients::Morse)
}

pub fn build_hamiltonian_with(
    basis: &TwoModeBasis,
    p: &MoleculeParams,
    ingredients: Ingredients,
) -> Result<DMatrix<f64>> {
    p.validate()?;
    let n = basis.n_single();
    let (eps, y, m): (Vec<f64>, DMatrix<f64>, DMatrix<f64>) = match ingredients {
        Ingredients::Morse => {
            let well = MorseWell::new(p.kappa, p.omega, n)?;
            let mats = well.matrices()?;
            let eps = (0..n).map(|v| level_energy(p.kappa, v)).collect();
            (eps, mats.y.clone(), mats.m.clone())
        }
        Ingredients::Harmonic => {
            let eps = (0..n).map(|v| v as f64 + 0.5).collect();
            let sk = p.kappa.sqrt();
            let mut y = DMatrix::zeros(n, n);
            let mut m = DMatrix::zeros(n, n);
            for v in 0..n.saturating_sub(1) {
                let a = ((v + 1) as f64).sqrt();
                y[(v, v + 1)] = a / sk;
                y[(v + 1, v)] = a / sk;
                m[(v, v + 1)] = 0.5 * sk * a;
                m[(v + 1, v)] = -0.5 * sk * a;
            }
            (eps, y, m)
        }
    };
    if y.nrows() != n || m.nrows() != n {
        return Err(Error::Construction("single-oscillator matrix size mismatch".into()));
    }

    let kinetic = -2.0 * p.x_g / p.kappa;
    let potential = 0.5 * p.kappa * p.x_f;
    let mut full = m.kronecker(&m) * kinetic + y.kronecker(&y) * potential;
    for v1 in 0..n {
        for v2 in 0..n {
            full[(v1 * n + v2, v1 * n + v2)] += eps[v1] + eps[v2];
        }
    }
    let e = basis.embedding();
    let mut h = e.transpose() * full * &e * p.omega;
    let d = h.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = avg;
            h[(j, i)] = avg;
        }
    }
    Ok(h)
}

/// Eigen-decomposition of `H(t)` at one path point.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub t: f64,
    pub params: MoleculeParams,
    /// Ascending, cm⁻¹ (ascending within state identity for overlap tracking).
    pub energies: Vec<f64>,
    /// Orthonormal columns in the [`TwoModeBasis`] ordering.
    pub eigenvectors: DMatrix<f64>,
}

impl SpectrumPoint {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvector of state `alpha` (0-based).
    pub fn state(&self, alpha: usize) -> Result<Vec<f64>> {
        if alpha >= self.dim() {
            return Err(Error::Index {
                index: alpha,
                len: self.dim(),
            });
        }
        Ok(self.eigenvectors.column(alpha).iter().copied().collect())
    }
}

fn degeneracy_tol(energies: &[f64]) -> f64 {
    let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    1e-10 * scale
}

fn dominant_index(col: nalgebra::DVectorView<'_, f64>) -> usize {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > best_abs {
            best_abs = v.abs();
            best = i;
        }
    }
    best
}

/// Dense symmetric eigen-decomposition, energies ascending, each eigenvector
/// signed so its largest-magnitude component is positive. Exactly degenerate
/// levels are ordered by the label of their dominant component.
pub fn diagonalize(
    basis: &TwoModeBasis,
    t: f64,
    params: MoleculeParams,
    h: DMatrix<f64>,
) -> Result<SpectrumPoint> {
    let d = h.nrows();
    if h.ncols() != d || d != basis.dim() {
        return Err(Error::Construction(format!(
            "matrix {}x{} does not match basis dimension {}",
            h.nrows(),
            h.ncols(),
            basis.dim()
        )));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite Hamiltonian entries".into()));
    }
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen(format!("symmetric eigensolver did not converge at t = {t}")))?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        let dom = dominant_index(col.as_view());
        if col[dom] < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(dst, &col);
    }
    let mut point = SpectrumPoint {
        t,
        params,
        energies,
        eigenvectors: vecs,
    };

    // tie-break exact degeneracies by dominant label
    let tol = degeneracy_tol(&point.energies);
    for_each_degenerate_group(&point.energies.clone(), tol, |lo, hi| {
        let mut idx: Vec<usize> = (lo..hi).collect();
        idx.sort_by_key(|&k| basis.states()[dominant_index(point.eigenvectors.column(k))]);
        let vecs: Vec<DVector<f64>> = idx.iter().map(|&k| point.eigenvectors.column(k).clone_owned()).collect();
        for (off, v) in vecs.into_iter().enumerate() {
            point.eigenvectors.set_column(lo + off, &v);
        }
    });
    Ok(point)
}

fn for_each_degenerate_group(energies: &[f64], tol: f64, mut f: impl FnMut(usize, usize)) {
    let mut lo = 0;
    while lo < energies.len() {
        let mut hi = lo + 1;
        while hi < energies.len() && energies[hi] - energies[hi - 1] <= tol {
            hi += 1;
        }
        if hi - lo > 1 {
            f(lo, hi);
        }
        lo = hi;
    }
}

/// Builds and diagonalizes `H` at one set of parameters (`t = p.x_g`).
pub fn spectrum_at(basis: &TwoModeBasis, p: &MoleculeParams) -> Result<SpectrumPoint> {
    let h = build_hamiltonian(basis, p)?;
    diagonalize(basis, p.x_g, *p, h)
}

/// How state identity is carried from one grid point to the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tracking {
    /// State α is the α-th lowest level at every `t`.
    #[default]
    Energy,
    /// State α follows the eigenvector of maximal overlap with its predecessor.
    Overlap,
}

impl std::str::FromStr for Tracking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" => Ok(Tracking::Energy),
            "overlap" => Ok(Tracking::Overlap),
            other => Err(Error::Config(format!("unknown tracking mode '{other}'"))),
        }
    }
}

/// One [`SpectrumPoint`] per grid value, in grid order, with eigenvector
/// signs made continuous along the grid.
pub fn scan(path: &PathSpec, basis: &TwoModeBasis, tracking: Tracking) -> Result<Vec<SpectrumPoint>> {
    let mut points = path
        .t_grid
        .par_iter()
        .map(|&t| {
            let p = path.params_at(t)?;
            spectrum_at(basis, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    align_states(&mut points, tracking);
    Ok(points)
}

/// Sequential post-pass: state matching and sign continuity.
pub fn align_states(points: &mut [SpectrumPoint], tracking: Tracking) {
    for i in 1..points.len() {
        let (head, tail) = points.split_at_mut(i);
        let prev = &head[i - 1];
        let cur = &mut tail[0];
        let overlaps = prev.eigenvectors.transpose() * &cur.eigenvectors;
        match tracking {
            Tracking::Energy => {
                let tol = degeneracy_tol(&cur.energies);
                let energies = cur.energies.clone();
                for_each_degenerate_group(&energies, tol, |lo, hi| {
                    greedy_match(cur, &overlaps, lo, hi);
                });
            }
            Tracking::Overlap => {
                let d = cur.dim();
                greedy_match(cur, &overlaps, 0, d);
            }
        }
        for a in 0..cur.dim() {
            let ov = prev.eigenvectors.column(a).dot(&cur.eigenvectors.column(a));
            if ov < 0.0 {
                cur.eigenvectors.column_mut(a).neg_mut();
            }
        }
    }
}

/// Reorders states `lo..hi` of `cur` so that previous state `a` (in order)
/// takes the unassigned current state of largest |overlap|.
fn greedy_match(cur: &mut SpectrumPoint, overlaps: &DMatrix<f64>, lo: usize, hi: usize) {
    let mut free: Vec<usize> = (lo..hi).collect();
    let mut perm = Vec::with_capacity(hi - lo);
    for a in lo..hi {
        let (pos, _) = free
            .iter()
            .enumerate()
            .map(|(pos, &k)| (pos, overlaps[(a, k)].abs()))
            .fold((0, -1.0), |best, x| if x.1 > best.1 { x } else { best });
        perm.push(free.remove(pos));
    }
    let energies: Vec<f64> = perm.iter().map(|&k| cur.energies[k]).collect();
    let vecs: Vec<DVector<f64>> = perm.iter().map(|&k| cur.eigenvectors.column(k).clone_owned()).collect();
    for (off, (e, v)) in energies.into_iter().zip(vecs).enumerate() {
        cur.energies[lo + off] = e;
        cur.eigenvectors.set_column(lo + off, &v);
    }
}

/// A local minimum of the gap `E_{α+1} − E_α` along a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidedCrossing {
    /// Lower state of the pair, 0-based.
    pub state: usize,
    pub t_star: f64,
    pub gap: f64,
    /// Grid index of the sampled minimum.
    pub grid_index: usize,
    /// `|⟨Ψ_α(t_{k−w})|Ψ_{α+1}(t_{k+w})⟩|²` with `w` = [`EXCHANGE_HALF_WINDOW`]
    /// grid steps around the minimum `k`.
    pub exchange: f64,
}

/// Grid steps on either side of a gap minimum used to measure character exchange.
pub const EXCHANGE_HALF_WINDOW: usize = 5;

impl AvoidedCrossing {
    /// The two states swap character across the minimum; gap minima
    /// without a swap are broad approaches rather than avoided crossings.
    pub fn exchanges_character(&self) -> bool {
        self.exchange > 0.5
    }
}

/// All interior local minima of `E_{α+1} − E_α`, each refined by a parabola
/// through the minimum and its two neighbours and tagged with its
/// character exchange.
pub fn find_avoided_crossings(points: &[SpectrumPoint], alpha: usize) -> Result<Vec<AvoidedCrossing>> {
    if points.len() < 3 {
        return Err(Error::Domain("need at least 3 scan points".into()));
    }
    let dim = points[0].dim();
    if alpha + 1 >= dim {
        return Err(Error::Index {
            index: alpha + 1,
            len: dim,
        });
    }
    let gaps: Vec<f64> = points.iter().map(|p| p.energies[alpha + 1] - p.energies[alpha]).collect();
    let mut out = Vec::new();
    for k in 1..points.len() - 1 {
        if !(gaps[k] < gaps[k - 1] && gaps[k] <= gaps[k + 1]) {
            continue;
        }
        let (t0, t1, t2) = (points[k - 1].t, points[k].t, points[k + 1].t);
        let (g0, g1, g2) = (gaps[k - 1], gaps[k], gaps[k + 1]);
        let (t_star, gap) = parabola_vertex((t0, g0), (t1, g1), (t2, g2)).unwrap_or((t1, g1));
        let before = &points[k.saturating_sub(EXCHANGE_HALF_WINDOW)];
        let after = &points[(k + EXCHANGE_HALF_WINDOW).min(points.len() - 1)];
        let cross = before.eigenvectors.column(alpha).dot(&after.eigenvectors.column(alpha + 1));
        out.push(AvoidedCrossing {
            state: alpha,
            t_star,
            gap: gap.clamp(0.0, g1),
            grid_index: k,
            exchange: cross * cross,
        });
    }
    Ok(out)
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<(f64, f64)> {
    let d1 = (b.1 - a.1) / (b.0 - a.0);
    let d2 = (c.1 - b.1) / (c.0 - b.0);
    let curv = (d2 - d1) / (c.0 - a.0);
    if !(curv > 0.0) {
        return None;
    }
    // g(t) = b.1 + slope_b (t − b.0) + curv (t − b.0)²
    let slope_b = d1 + curv * (b.0 - a.0);
    let dt = -slope_b / (2.0 * curv);
    let lo = a.0.min(c.0);
    let hi = a.0.max(c.0);
    let t = (b.0 + dt).clamp(lo, hi);
    let dt = t - b.0;
    Some((t, b.1 + slope_b * dt + curv * dt * dt))
}

/// Fundamentals `(ν₁, ν₃)` in cm⁻¹: the lowest symmetric and lowest
/// antisymmetric excitations above the ground state.
pub fn fundamentals(p: &MoleculeParams, n_single: usize) -> Result<(f64, f64)> {
    let sym = spectrum_at(&TwoModeBasis::new(n_single, Symmetry::Symmetric)?, p)?;
    let anti = spectrum_at(&TwoModeBasis::new(n_single, Symmetry::Antisymmetric)?, p)?;
    let e0 = sym.energies[0];
    Ok((sym.energies[1] - e0, anti.energies[0] - e0))
}
