//! Heat semigroup `P_t f = f * g_t` with `g_t` the centred Gaussian of variance `t`, on grids.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{check_exponent, weighted_norm, Grid, GridFunction, Measure, VectorFieldGrid};
use crate::math::golden_max;
use crate::{Error, Result};

/// Kernel support in standard deviations.
const KERNEL_WIDTH: f64 = 8.0;

/// A functional of the semigroup time sampled on an increasing grid of times.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SemigroupCurve {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl SemigroupCurve {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() || t.is_empty() {
            return Err(Error::LengthMismatch { expected: t.len(), found: values.len() });
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter { name: "time grid ordering", value: t[0] });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(SemigroupCurve { t, values })
    }

    /// Largest value and the time where it occurs.
    pub fn sup(&self) -> (f64, f64) {
        let mut best = (self.t[0], self.values[0]);
        for (&t, &v) in self.t.iter().zip(&self.values) {
            if v > best.1 {
                best = (t, v);
            }
        }
        best
    }

    pub fn argmax(&self) -> usize {
        let mut k = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[k] {
                k = i;
            }
        }
        k
    }
}

/// Checks that a time grid is positive and strictly increasing.
pub fn check_time_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::InvalidParameter { name: "time grid length", value: 0.0 });
    }
    if let Some(&bad) = t.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveTime(bad));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter { name: "time grid ordering", value: t[0] });
    }
    Ok(())
}

/// Discrete convolution kernel indexed by offsets `-half..=half`.
pub(crate) struct Kernel {
    half: usize,
    values: Vec<f64>,
}

/// Normalised Gaussian of variance `t` and its `x`-derivative on a grid of spacing `step`.
pub(crate) fn gaussian_kernels(step: f64, t: f64) -> (Kernel, Kernel) {
    let half = ((KERNEL_WIDTH * t.sqrt() / step).ceil() as usize).max(1);
    let raw: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let x = (i as f64 - half as f64) * step;
            (-x * x / (2.0 * t)).exp()
        })
        .collect();
    let z: f64 = raw.iter().sum();
    let values: Vec<f64> = raw.iter().map(|v| v / z).collect();
    let deriv = values
        .iter()
        .enumerate()
        .map(|(i, v)| -((i as f64 - half as f64) * step / t) * v)
        .collect();
    (Kernel { half, values }, Kernel { half, values: deriv })
}

/// `out_i = sum_m k_{i-m} in_m` along axis `axis`, skipping zero inputs.
pub(crate) fn convolve_axis(grid: &Grid, data: &[f64], axis: usize, kernel: &Kernel) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    let n = grid.axis(axis).n;
    let half = kernel.half as i64;
    let range = |m: usize| {
        let lo = (m as i64 - half).max(0) as usize;
        let hi = ((m as i64 + half) as usize).min(n - 1);
        // Kernel index for output i is i - m + half.
        (lo, hi, (lo as i64 - m as i64 + half) as usize)
    };
    if axis + 1 == grid.dim() {
        for (src, dst) in data.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            for (m, &v) in src.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let (lo, hi, k0) = range(m);
                let kern = &kernel.values[k0..k0 + (hi - lo + 1)];
                for (o, k) in dst[lo..=hi].iter_mut().zip(kern) {
                    *o += v * k;
                }
            }
        }
    } else {
        let row = grid.stride(axis);
        for m in 0..n {
            let src = &data[m * row..(m + 1) * row];
            if src.iter().all(|&v| v == 0.0) {
                continue;
            }
            let (lo, hi, k0) = range(m);
            for i in lo..=hi {
                let k = kernel.values[k0 + i - lo];
                let dst = &mut out[i * row..(i + 1) * row];
                for (o, v) in dst.iter_mut().zip(src) {
                    *o += k * v;
                }
            }
        }
    }
    out
}

/// Gaussian smoothing of raw samples with standard deviation `sigma` on every axis.
pub(crate) fn smooth_samples(grid: &Grid, data: &[f64], sigma: f64) -> Vec<f64> {
    let mut cur = data.to_vec();
    for k in 0..grid.dim() {
        let (g, _) = gaussian_kernels(grid.axis(k).step(), sigma * sigma);
        cur = convolve_axis(grid, &cur, k, &g);
    }
    cur
}

fn check_heat_input(f: &GridFunction, t: f64) -> Result<()> {
    f.require_measure(Measure::Lebesgue)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(())
}

/// `P_t f` and `grad P_t f` sharing the separable passes.
pub fn heat_smooth(f: &GridFunction, t: f64) -> Result<(GridFunction, VectorFieldGrid)> {
    check_heat_input(f, t)?;
    let grid = f.grid();
    let kern: Vec<(Kernel, Kernel)> =
        (0..grid.dim()).map(|k| gaussian_kernels(grid.axis(k).step(), t)).collect();
    let x = f.samples();
    if grid.dim() == 1 {
        let p = convolve_axis(grid, x, 0, &kern[0].0);
        let d = convolve_axis(grid, x, 0, &kern[0].1);
        let grad = VectorFieldGrid::new(vec![f.with_samples_unchecked(d)])?;
        return Ok((f.with_samples_unchecked(p), grad));
    }
    let a = convolve_axis(grid, x, 1, &kern[1].0);
    let b = convolve_axis(grid, x, 1, &kern[1].1);
    let p = convolve_axis(grid, &a, 0, &kern[0].0);
    let d0 = convolve_axis(grid, &a, 0, &kern[0].1);
    let d1 = convolve_axis(grid, &b, 0, &kern[0].0);
    let grad = VectorFieldGrid::new(vec![f.with_samples_unchecked(d0), f.with_samples_unchecked(d1)])?;
    Ok((f.with_samples_unchecked(p), grad))
}

pub fn heat_apply(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_heat_input(f, t)?;
    let grid = f.grid();
    let mut cur = f.samples().to_vec();
    for k in (0..grid.dim()).rev() {
        let (g, _) = gaussian_kernels(grid.axis(k).step(), t);
        cur = convolve_axis(grid, &cur, k, &g);
    }
    Ok(f.with_samples_unchecked(cur))
}

pub fn heat_gradient(f: &GridFunction, t: f64) -> Result<VectorFieldGrid> {
    Ok(heat_smooth(f, t)?.1)
}

/// Sup over a time grid of `t^{(1-alpha)/2} ||grad T_t f||_p` for some semigroup `T`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UFunctional {
    pub value: f64,
    pub argmax_t: f64,
    pub p: f64,
    pub alpha: f64,
    pub curve: SemigroupCurve,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidParameter { name: "alpha", value: alpha })
    }
}

/// Heat-gradient functional `sup_t t^{(1-alpha)/2} ||grad P_t f||_p` over `t_grid`.
pub fn u_functional(f: &GridFunction, p: f64, alpha: f64, t_grid: &[f64]) -> Result<UFunctional> {
    check_exponent(p)?;
    check_alpha(alpha)?;
    check_time_grid(t_grid)?;
    let w = f.weights();
    let values = t_grid
        .iter()
        .map(|&t| {
            let g = heat_gradient(f, t)?;
            Ok(t.powf(0.5 * (1.0 - alpha)) * weighted_norm(&g.magnitude(), &w, p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let curve = SemigroupCurve::new(t_grid.to_vec(), values)?;
    let (argmax_t, value) = curve.sup();
    Ok(UFunctional { value, argmax_t, p, alpha, curve })
}

/// Norm curves of the heat flow for several exponents at once.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatCurves {
    pub t: Vec<f64>,
    pub exponents: Vec<f64>,
    /// `||f - P_t f||_p`, one row per exponent.
    pub approximation: Vec<Vec<f64>>,
    /// `||grad P_t f||_p`, one row per exponent.
    pub gradient: Vec<Vec<f64>>,
}

impl HeatCurves {
    pub fn compute(f: &GridFunction, exponents: &[f64], t_grid: &[f64]) -> Result<Self> {
        check_time_grid(t_grid)?;
        for &p in exponents {
            check_exponent(p)?;
        }
        let w = f.weights();
        let mut approximation = vec![Vec::with_capacity(t_grid.len()); exponents.len()];
        let mut gradient = vec![Vec::with_capacity(t_grid.len()); exponents.len()];
        for &t in t_grid {
            let (pt, grad) = heat_smooth(f, t)?;
            let diff: Vec<f64> = f.samples().iter().zip(pt.samples()).map(|(a, b)| a - b).collect();
            let mag = grad.magnitude();
            for (k, &p) in exponents.iter().enumerate() {
                approximation[k].push(weighted_norm(&diff, &w, p));
                gradient[k].push(weighted_norm(&mag, &w, p));
            }
        }
        Ok(HeatCurves { t: t_grid.to_vec(), exponents: exponents.to_vec(), approximation, gradient })
    }

    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.exponents.iter().position(|&q| q == p)
    }
}

/// Refines the sup of `eval` near the best point of a sampled curve.
///
/// Golden-section search in `log t` between the neighbours of the grid argmax; when the
/// argmax is the first grid time, three further decades below are probed as well.
pub fn refine_curve_sup<F>(mut eval: F, curve: &SemigroupCurve) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut best_t, mut best) = curve.sup();
    let k = curve.argmax();
    let n = curve.t.len();
    if k == 0 {
        for j in 1..=3 {
            let t = curve.t[0] * 10f64.powi(-j);
            let v = eval(t)?;
            if v > best {
                best = v;
                best_t = t;
            }
        }
    }
    if n >= 2 {
        let lo = curve.t[k.saturating_sub(1)].ln();
        let hi = curve.t[(k + 1).min(n - 1)].ln();
        let mut err = None;
        let (lt, v) = golden_max(
            |s| match eval(s.exp()) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            24,
        );
        if let Some(e) = err {
            return Err(e);
        }
        if v > best {
            best = v;
            best_t = lt.exp();
        }
    }
    Ok((best_t, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_corpus;

    #[test]
    fn gaussian_bump_closed_form() {
        let g = Grid::line(-8.0, 8.0, 4097).unwrap();
        let f = build_corpus("gaussian_bump", &g).unwrap();
        for &t in &[0.01, 0.3, 1.0] {
            let (pt, grad) = heat_smooth(&f, t).unwrap();
            for i in (0..4097).step_by(7) {
                let x = g.point(i)[0];
                if x.abs() > 4.0 {
                    continue;
                }
                let exact = (1.0 + t).powf(-0.5) * (-x * x / (2.0 * (1.0 + t))).exp();
                let dexact = -x / (1.0 + t) * exact;
                assert!((pt.samples()[i] - exact).abs() <= 1e-6 * exact.abs().max(1e-3));
                assert!((grad.component(0).samples()[i] - dexact).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn two_dimensional_matches_product() {
        let g = Grid::square(-8.0, 8.0, 161).unwrap();
        let f = build_corpus("gaussian_bump", &g).unwrap();
        let t = 0.5;
        let (pt, grad) = heat_smooth(&f, t).unwrap();
        for i in (0..g.len()).step_by(97) {
            let x = g.point(i);
            let r2 = x[0] * x[0] + x[1] * x[1];
            let exact = (-r2 / (2.0 * (1.0 + t))).exp() / (1.0 + t);
            assert!((pt.samples()[i] - exact).abs() < 1e-8);
            assert!((grad.component(1).samples()[i] + x[1] / (1.0 + t) * exact).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_gaussian_tag_and_bad_time() {
        let g = Grid::line(-8.0, 8.0, 65).unwrap();
        let h = build_corpus("hermite(1)", &g).unwrap();
        assert!(heat_apply(&h, 1.0).is_err());
        let f = build_corpus("hat", &g).unwrap();
        assert!(matches!(heat_apply(&f, 0.0), Err(Error::NonPositiveTime(_))));
        assert!(u_functional(&f, 1.0, 0.5, &[1.0, 0.5]).is_err());
    }
}
