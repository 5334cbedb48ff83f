//! Quantum diagnostics of eigenstates: fidelity, entanglement entropy,
//! maximum local and normal components, coordinate-space densities.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{spectrum_at, SpectrumPoint, TwoModeBasis};
use crate::morse::MorseWell;
use crate::params::{harmonic_couplings, MoleculeParams, PathSpec};

const NORM_TOL: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-8;
const LABEL_TOL: f64 = 1e-3;

/// Extra harmonic levels used when building a [`NormalBasisMap`].
pub const DEFAULT_PAD: usize = 4;

fn check_unit(psi: &[f64], what: &str) -> Result<()> {
    let n2: f64 = psi.iter().map(|x| x * x).sum();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::Contract(format!("{what} has squared norm {n2}, expected 1")));
    }
    Ok(())
}

/// `|⟨a|b⟩|²` for two unit vectors in the same basis.
pub fn fidelity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!(
            "fidelity between vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    check_unit(a, "first state")?;
    check_unit(b, "second state")?;
    let ov: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((ov * ov).clamp(0.0, 1.0))
}

/// Which oscillator is kept when tracing out the other one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oscillator {
    First,
    Second,
}

/// Reduced density matrix of one oscillator.
pub fn reduced_density_matrix(psi: &[f64], basis: &TwoModeBasis, keep: Oscillator) -> Result<DMatrix<f64>> {
    let c = basis.product_coefficients(psi)?;
    let rho = match keep {
        Oscillator::First => &c * c.transpose(),
        Oscillator::Second => c.transpose() * &c,
    };
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::Contract(format!("reduced density matrix has trace {tr}")));
    }
    Ok(rho)
}

fn von_neumann(rho: DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(rho);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Entanglement entropy (nats) between the two oscillators.
pub fn entanglement_entropy(psi: &[f64], basis: &TwoModeBasis) -> Result<f64> {
    entanglement_entropy_of(psi, basis, Oscillator::First)
}

pub fn entanglement_entropy_of(psi: &[f64], basis: &TwoModeBasis, keep: Oscillator) -> Result<f64> {
    let rho = reduced_density_matrix(psi, basis, keep)?;
    let s = von_neumann(rho);
    Ok(s.min((basis.n_single() as f64).ln()))
}

/// How a symmetry-adapted state is split into two oscillators for the
/// entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyBasis {
    /// Each symmetry-adapted ket `|v₁v₂⟩` is read as the product `|v₁⟩|v₂⟩`
    /// (`v₁ ≤ v₂`), so a single local label carries no entropy.
    #[default]
    Label,
    /// States are expanded back to the full product basis first; the
    /// exchange symmetrization itself then contributes `ln 2`.
    Product,
}

impl std::str::FromStr for EntropyBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "label" => Ok(Self::Label),
            "product" => Ok(Self::Product),
            _ => Err(Error::Config(format!("unknown entropy basis '{s}' (label|product)"))),
        }
    }
}

impl std::fmt::Display for EntropyBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Label => "label",
            Self::Product => "product",
        })
    }
}

/// Entropy with the state's labels read as product kets (see
/// [`EntropyBasis::Label`]).
pub fn label_entropy(psi: &[f64], basis: &TwoModeBasis) -> Result<f64> {
    if psi.len() != basis.dim() {
        return Err(Error::Contract(format!(
            "state has {} components, basis has {}",
            psi.len(),
            basis.dim()
        )));
    }
    let n = basis.n_single();
    let mut c = DMatrix::zeros(n, n);
    for (&amp, &(v1, v2)) in psi.iter().zip(basis.states()) {
        c[(v1, v2)] = amp;
    }
    let rho = &c * c.transpose();
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::Contract(format!("reduced density matrix has trace {tr}")));
    }
    Ok(von_neumann(rho).min((n as f64).ln()))
}

/// Entropy in the chosen convention.
pub fn entropy(psi: &[f64], basis: &TwoModeBasis, convention: EntropyBasis) -> Result<f64> {
    match convention {
        EntropyBasis::Label => label_entropy(psi, basis),
        EntropyBasis::Product => entanglement_entropy(psi, basis),
    }
}

/// Harmonic ladder operator truncated to `levels` states.
fn ladder(levels: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(levels, levels);
    for v in 0..levels.saturating_sub(1) {
        a[(v, v + 1)] = ((v + 1) as f64).sqrt();
    }
    a
}

/// Local-mode ladder operators `(a₁, a₂)` on the `levels²` product space.
fn local_ladders(levels: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let a = ladder(levels);
    let id = DMatrix::identity(levels, levels);
    (a.kronecker(&id), id.kronecker(&a))
}

/// The quadratic two-oscillator Hamiltonian in the local harmonic product
/// basis `|n₁n₂⟩` (row index `n₁·levels + n₂`), cm⁻¹:
/// `ħω Σ(n̂ᵢ + ½) + λ(a₁†a₂ + a₁a₂†) + λ′(a₁†a₂† + a₁a₂)`.
pub fn harmonic_local_hamiltonian(p: &MoleculeParams, levels: usize) -> DMatrix<f64> {
    let c = harmonic_couplings(p);
    let (a1, a2) = local_ladders(levels);
    let n = levels * levels;
    let mut h = DMatrix::zeros(n, n);
    for n1 in 0..levels {
        for n2 in 0..levels {
            h[(n1 * levels + n2, n1 * levels + n2)] = p.omega * ((n1 + n2) as f64 + 1.0);
        }
    }
    let hop = a1.transpose() * &a2;
    let pair = &a1 * &a2;
    h += (&hop + hop.transpose()) * c.lambda;
    h += (&pair + pair.transpose()) * c.lambda_prime;
    h
}

/// Squeezing parameters `(r_g, r_u)` of the Bogoliubov rotation that
/// diagonalizes the quadratic model in the symmetric/antisymmetric modes.
pub fn squeeze_parameters(p: &MoleculeParams) -> (f64, f64) {
    let c = harmonic_couplings(p);
    let r_g = 0.5 * (c.lambda_prime / (p.omega + c.lambda)).atanh();
    let r_u = 0.5 * (-c.lambda_prime / (p.omega - c.lambda)).atanh();
    (r_g, r_u)
}

/// Normal number operators `(ν̂₁, ν̂₃)` on the `levels²` product space.
pub fn normal_number_operators(p: &MoleculeParams, levels: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a1, a2) = local_ladders(levels);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a_g = (&a1 + &a2) * r;
    let a_u = (&a1 - &a2) * r;
    let (r_g, r_u) = squeeze_parameters(p);
    let number = |a: &DMatrix<f64>, sq: f64| {
        let b = a * sq.cosh() + a.transpose() * sq.sinh();
        b.transpose() * b
    };
    (number(&a_g, r_g), number(&a_u, r_u))
}

/// Normal-mode eigenstates `|ν₁ν₃⟩` expressed in the local harmonic basis.
#[derive(Clone, Debug)]
pub struct NormalBasisMap {
    n_single: usize,
    pad: usize,
    /// `(n_single + pad)²` rows, one orthonormal column per retained label.
    u: DMatrix<f64>,
    labels: Vec<(usize, usize)>,
}

impl NormalBasisMap {
    /// Diagonalizes `W = K·ν̂₁ + ν̂₃` on a product space padded by `pad`
    /// levels per oscillator and keeps the states of complete normal
    /// polyads `ν₁ + ν₃ ≤ n_single − 1`.
    pub fn build(p: &MoleculeParams, n_single: usize, pad: usize) -> Result<Self> {
        p.validate()?;
        if n_single == 0 {
            return Err(Error::Domain("n_single must be at least 1".into()));
        }
        if pad < 4 {
            return Err(Error::Domain(format!("pad must be at least 4, got {pad}")));
        }
        let levels = n_single + pad;
        let (nu1, nu3) = normal_number_operators(p, levels);
        let k = (4 * levels) as f64;
        let w = &nu1 * k + &nu3;
        let eig = SymmetricEigen::new(w);

        let pmax = n_single - 1;
        let mut labels = Vec::new();
        for pn in 0..=pmax {
            for l1 in (0..=pn).rev() {
                labels.push((l1, pn - l1));
            }
        }
        let mut u = DMatrix::zeros(levels * levels, labels.len());
        let mut used = vec![false; eig.eigenvalues.len()];
        for (col, &(l1, l3)) in labels.iter().enumerate() {
            let target = k * l1 as f64 + l3 as f64;
            let (best, dist) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, &e)| (i, (e - target).abs()))
                .fold((usize::MAX, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
            let v = eig.eigenvectors.column(best);
            let e1 = v.dot(&(&nu1 * v));
            let e3 = v.dot(&(&nu3 * v));
            let off = (e1 - l1 as f64).abs().max((e3 - l3 as f64).abs()).max(dist / k);
            if off > LABEL_TOL {
                return Err(Error::Truncation(format!(
                    "normal state ({l1},{l3}) not resolved with pad {pad} (label error {off:.2e})"
                )));
            }
            used[best] = true;
            u.set_column(col, &v);
        }
        Ok(Self {
            n_single,
            pad,
            u,
            labels,
        })
    }

    /// [`NormalBasisMap::build`] with the pad grown until labels resolve.
    pub fn build_adaptive(p: &MoleculeParams, n_single: usize, pad: usize) -> Result<Self> {
        let mut pad = pad.max(4);
        loop {
            match Self::build(p, n_single, pad) {
                Err(Error::Truncation(_)) if pad < 4 * n_single + 16 => pad += 2,
                other => return other,
            }
        }
    }

    pub fn n_single(&self) -> usize {
        self.n_single
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn levels(&self) -> usize {
        self.n_single + self.pad
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// Columns are normal states in the padded local basis.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Column for label `(ν₁, ν₃)`, if retained.
    pub fn column(&self, label: (usize, usize)) -> Option<DVector<f64>> {
        let i = self.labels.iter().position(|&l| l == label)?;
        Some(self.u.column(i).clone_owned())
    }

    /// Embeds a Morse-basis product coefficient matrix into the padded
    /// harmonic space under the identification `|n₁n₂⟩ → |v₁v₂⟩`.
    pub fn embed(&self, c: &DMatrix<f64>) -> Result<DVector<f64>> {
        if c.nrows() != self.n_single || c.ncols() != self.n_single {
            return Err(Error::Contract(format!(
                "coefficients are {}x{}, map expects n_single = {}",
                c.nrows(),
                c.ncols(),
                self.n_single
            )));
        }
        let levels = self.levels();
        let mut x = DVector::zeros(levels * levels);
        for v1 in 0..self.n_single {
            for v2 in 0..self.n_single {
                x[v1 * levels + v2] = c[(v1, v2)];
            }
        }
        Ok(x)
    }

    /// Normal amplitudes `Uᵀx` of an embedded state.
    pub fn normal_amplitudes(&self, x: &DVector<f64>) -> DVector<f64> {
        self.u.transpose() * x
    }
}

/// Largest local and normal squared components of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub max_local: ((usize, usize), f64),
    pub max_normal: ((usize, usize), f64),
    /// Dominant local label lies in a complete polyad; normal amplitudes are
    /// only trustworthy when this holds.
    pub in_complete_polyads: bool,
    /// Weight not captured by the retained normal states.
    pub normal_leak: f64,
}

pub fn components(psi: &[f64], basis: &TwoModeBasis, map: &NormalBasisMap) -> Result<Components> {
    if map.n_single() != basis.n_single() {
        return Err(Error::Contract(format!(
            "normal map built for n_single = {}, basis has {}",
            map.n_single(),
            basis.n_single()
        )));
    }
    let (k_loc, w_loc) = psi
        .iter()
        .enumerate()
        .map(|(k, a)| (k, a * a))
        .fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b });
    let local_label = basis.states()[k_loc];

    let c = basis.product_coefficients(psi)?;
    let amps = map.normal_amplitudes(&map.embed(&c)?);
    let (k_nor, w_nor) = amps
        .iter()
        .enumerate()
        .map(|(k, a)| (k, a * a))
        .fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b });
    let captured: f64 = amps.iter().map(|a| a * a).sum();
    let norm: f64 = psi.iter().map(|a| a * a).sum();

    Ok(Components {
        max_local: (local_label, w_loc),
        max_normal: (map.labels()[k_nor], w_nor),
        in_complete_polyads: local_label.0 + local_label.1 <= basis.complete_polyad_max(),
        normal_leak: (norm - captured).max(0.0),
    })
}

/// `ρ(q̄₁, q̄₂) = |⟨q̄₁q̄₂|ψ⟩|²`; rows follow `q1_grid`, columns `q2_grid`.
pub fn probability_density(
    psi: &[f64],
    basis: &TwoModeBasis,
    well: &MorseWell,
    q1_grid: &[f64],
    q2_grid: &[f64],
) -> Result<DMatrix<f64>> {
    let n = basis.n_single();
    if well.n_basis() < n {
        return Err(Error::Contract(format!(
            "well tabulates {} levels, basis needs {n}",
            well.n_basis()
        )));
    }
    for g in [q1_grid, q2_grid] {
        if g.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("density grids must be strictly increasing".into()));
        }
    }
    let c = basis.product_coefficients(psi)?;
    let table = |grid: &[f64]| {
        let mut phi = DMatrix::zeros(grid.len(), n);
        let mut row = vec![0.0; well.n_basis()];
        for (i, &q) in grid.iter().enumerate() {
            well.eval_all(q, &mut row);
            for v in 0..n {
                phi[(i, v)] = row[v];
            }
        }
        phi
    };
    let phi1 = table(q1_grid);
    let phi2 = table(q2_grid);
    let amp = &phi1 * c * phi2.transpose();
    Ok(amp.map(|a| a * a))
}

/// Diagnostics of one state at one path point (state index 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub t: f64,
    pub state: usize,
    pub energy: f64,
    pub fidelity: f64,
    pub entropy: f64,
    pub components: Components,
}

/// Step used for `F_α(t) = |⟨Ψ_α(t)|Ψ_α(t + δt)⟩|²`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum FidelityStep {
    /// Next grid point (previous one at the end of the grid).
    #[default]
    GridStep,
    /// Fixed offset along the grid direction, diagonalized separately.
    Offset(f64),
}

/// Settings for [`diagnose_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsOptions {
    pub step: FidelityStep,
    pub pad: usize,
    pub entropy: EntropyBasis,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            step: FidelityStep::GridStep,
            pad: DEFAULT_PAD,
            entropy: EntropyBasis::Label,
        }
    }
}

/// Per-point, per-state diagnostics over a finished scan, grouped by point
/// then by the order of `states`.
pub fn diagnose_scan(
    path: &PathSpec,
    basis: &TwoModeBasis,
    points: &[SpectrumPoint],
    states: &[usize],
    opts: &DiagnosticsOptions,
) -> Result<Vec<StateDiagnostics>> {
    let (step, pad) = (opts.step, opts.pad);
    if points.len() < 2 {
        return Err(Error::Domain("fidelity needs at least 2 scan points".into()));
    }
    let dim = basis.dim();
    if let Some(&bad) = states.iter().find(|&&s| s >= dim) {
        return Err(Error::Index { index: bad, len: dim });
    }
    let direction = (points[1].t - points[0].t).signum();
    let per_point = points
        .par_iter()
        .enumerate()
        .map(|(i, point)| {
            let partner: SpectrumPoint = match step {
                FidelityStep::GridStep => {
                    let j = if i + 1 < points.len() { i + 1 } else { i - 1 };
                    points[j].clone()
                }
                FidelityStep::Offset(dt) => {
                    let (lo, hi) = path.t_range();
                    let mut t2 = point.t + direction * dt.abs();
                    if !(lo..=hi).contains(&t2) {
                        t2 = point.t - direction * dt.abs();
                    }
                    spectrum_at(basis, &path.params_at(t2)?)?
                }
            };
            let map = NormalBasisMap::build_adaptive(&point.params, basis.n_single(), pad)?;
            states
                .iter()
                .map(|&s| {
                    let psi = point.state(s)?;
                    Ok(StateDiagnostics {
                        t: point.t,
                        state: s,
                        energy: point.energies[s],
                        fidelity: fidelity(&psi, &partner.state(s)?)?,
                        entropy: entropy(&psi, basis, opts.entropy)?,
                        components: components(&psi, basis, &map)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Symmetry;
    use approx::assert_abs_diff_eq;

    fn unit(dim: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        v
    }

    #[test]
    fn fidelity_basics() {
        let a = [0.6, 0.8, 0.0];
        assert_abs_diff_eq!(fidelity(&a, &a).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(fidelity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert_abs_diff_eq!(fidelity(&a, &neg).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(fidelity(&[1.0, 1.0], &[1.0, 0.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn entropy_of_product_and_bell_states() {
        let b = TwoModeBasis::new(4, Symmetry::Symmetric).unwrap();
        assert_eq!(entanglement_entropy(&unit(b.dim(), 0), &b).unwrap(), 0.0);
        // symmetric label (0,1) is (|01⟩ + |10⟩)/√2
        let k = b.states().iter().position(|&l| l == (0, 1)).unwrap();
        assert_abs_diff_eq!(
            entanglement_entropy(&unit(b.dim(), k), &b).unwrap(),
            2f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_of_uniform_schmidt_state() {
        let b = TwoModeBasis::new(5, Symmetry::Symmetric).unwrap();
        let k = 4;
        let mut psi = vec![0.0; b.dim()];
        for v in 0..k {
            let i = b.states().iter().position(|&l| l == (v, v)).unwrap();
            psi[i] = (1.0 / k as f64).sqrt();
        }
        assert_abs_diff_eq!(entanglement_entropy(&psi, &b).unwrap(), (k as f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        let b = TwoModeBasis::new(3, Symmetry::Full).unwrap();
        let psi = vec![0.5; b.dim()];
        assert!(matches!(entanglement_entropy(&psi, &b), Err(Error::Contract(_))));
    }

    #[test]
    fn squeeze_closed_form_candidate() {
        // tanh 2r = λ′/(ω + λ) has the closed form r_g = ¼ ln((1+x_f)/(1+x_g))
        let p = MoleculeParams::new(0.047, -0.571, 959.0, 160.0).unwrap();
        let (r_g, r_u) = squeeze_parameters(&p);
        assert_abs_diff_eq!(r_g, 0.25 * ((1.0 + p.x_f) / (1.0 + p.x_g)).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(r_u, 0.25 * ((1.0 - p.x_f) / (1.0 - p.x_g)).ln(), epsilon = 1e-12);
    }

    #[test]
    fn unsqueezed_map_is_beam_splitter() {
        let p = MoleculeParams::new(0.0, 0.0, 1000.0, 50.0).unwrap();
        let map = NormalBasisMap::build(&p, 3, 4).unwrap();
        let levels = map.levels();
        // |ν₁=1, ν₃=0⟩ = (|10⟩ + |01⟩)/√2
        let col = map.column((1, 0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(col[levels].abs(), r, epsilon = 1e-10);
        assert_abs_diff_eq!(col[1].abs(), r, epsilon = 1e-10);
        assert_abs_diff_eq!(col[levels] * col[1], 0.5, epsilon = 1e-10);
        let col = map.column((0, 1)).unwrap();
        assert_abs_diff_eq!(col[levels] * col[1], -0.5, epsilon = 1e-10);
    }

    #[test]
    fn pad_below_minimum_is_rejected() {
        assert!(NormalBasisMap::build(&MoleculeParams::water(), 5, 2).is_err());
    }

    #[test]
    fn local_components_of_basis_state() {
        let b = TwoModeBasis::new(5, Symmetry::Symmetric).unwrap();
        let map = NormalBasisMap::build(&MoleculeParams::new(0.0, 0.0, 1000.0, 50.0).unwrap(), 5, 4).unwrap();
        let c = components(&unit(b.dim(), 3), &b, &map).unwrap();
        assert_eq!(c.max_local, (b.states()[3], 1.0));
        assert!(c.in_complete_polyads);
        let small = NormalBasisMap::build(&MoleculeParams::water(), 4, 4).unwrap();
        assert!(components(&unit(b.dim(), 0), &b, &small).is_err());
    }

    #[test]
    fn density_rejects_bad_grid() {
        let b = TwoModeBasis::new(3, Symmetry::Symmetric).unwrap();
        let w = MorseWell::new(48.0, 1853.0, 3).unwrap();
        let r = probability_density(&unit(b.dim(), 0), &b, &w, &[0.0, -1.0], &[0.0]);
        assert!(r.is_err());
    }
}
