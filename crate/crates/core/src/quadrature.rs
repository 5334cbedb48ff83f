//! Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! All components share one panel tree, so a single pass yields every
//! matrix element of a set of basis functions. Panels are bisected worst
//! first until the summed error estimate (max over components) meets the
//! requested absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings for [`integrate_vec`].
#[derive(Clone, Copy, Debug)]
pub struct QuadSettings {
    pub abs_tol: f64,
    /// Number of equal panels the interval is split into before refinement.
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            initial_panels: 64,
            max_panels: 200_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

// Max-heap on error; ties broken by position so refinement order is deterministic.
struct Ranked(Panel);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .err
            .total_cmp(&other.0.err)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut Vec<f64>) -> Panel
where
    F: FnMut(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    buf.resize(dim, 0.0);

    f(c, buf);
    for k in 0..dim {
        kron[k] += WGK[7] * buf[k];
        gauss[k] += WG[3] * buf[k];
    }
    for (j, (&x, &wk)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        for sign in [-1.0, 1.0] {
            f(c + sign * h * x, buf);
            for k in 0..dim {
                kron[k] += wk * buf[k];
            }
            if j % 2 == 1 {
                let wg = WG[j / 2];
                for k in 0..dim {
                    gauss[k] += wg * buf[k];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..dim {
        kron[k] *= h;
        gauss[k] *= h;
        err = err.max((kron[k] - gauss[k]).abs());
    }
    Panel {
        a,
        b,
        value: kron,
        err,
    }
}

/// Integrates `f` over `[a, b]`; `f(x, out)` writes `dim` integrand values.
///
/// Returns the integral and the final error estimate. Fails with
/// [`Error::Accuracy`] if the panel budget is exhausted first.
pub fn integrate_vec<F>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    settings: QuadSettings,
) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64, &mut [f64]),
{
    let n0 = settings.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut buf = Vec::with_capacity(dim);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut total_err = 0.0;
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        let p = gk15(&mut f, lo, hi, dim, &mut buf);
        total_err += p.err;
        heap.push(Ranked(p));
    }

    while total_err > settings.abs_tol {
        if heap.len() >= settings.max_panels {
            return Err(Error::Accuracy {
                what: format!("adaptive quadrature on [{a}, {b}]"),
                achieved: total_err,
                wanted: settings.abs_tol,
            });
        }
        let Ranked(worst) = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&mut f, worst.a, mid, dim, &mut buf);
        let right = gk15(&mut f, mid, worst.b, dim, &mut buf);
        total_err += left.err + right.err - worst.err;
        heap.push(Ranked(left));
        heap.push(Ranked(right));
    }

    let mut panels: Vec<Panel> = heap.into_iter().map(|r| r.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut sum = vec![0.0; dim];
    for p in &panels {
        for (s, v) in sum.iter_mut().zip(&p.value) {
            *s += v;
        }
    }
    Ok((sum, total_err.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_gaussian() {
        let (v, err) = integrate_vec(
            |x, out| {
                out[0] = x * x;
                out[1] = (-x * x).exp();
            },
            -10.0,
            10.0,
            2,
            QuadSettings::default(),
        )
        .unwrap();
        assert!((v[0] - 2000.0 / 3.0).abs() < 1e-9);
        assert!((v[1] - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(err <= 1e-10);
    }

    #[test]
    fn narrow_peak_is_resolved() {
        let s = 1e-3;
        let (v, _) = integrate_vec(
            |x, out| out[0] = (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp(),
            -1.0,
            1.0,
            1,
            QuadSettings::default(),
        )
        .unwrap();
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v[0] - exact).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_accuracy() {
        let settings = QuadSettings {
            abs_tol: 1e-14,
            initial_panels: 1,
            max_panels: 4,
        };
        let r = integrate_vec(|x, out| out[0] = x.abs().sqrt(), -1.0, 1.0, 1, settings);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }
}
