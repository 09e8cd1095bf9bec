//! Sampled functions on uniform one- and two-dimensional grids.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::math::{lagrange_stencil, normal_pdf};
use crate::{Error, Result};

/// One uniformly sampled coordinate axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidGrid("axis bounds must be finite"));
        }
        if hi <= lo {
            return Err(Error::InvalidGrid("axis upper bound must exceed lower bound"));
        }
        if n < 2 {
            return Err(Error::InvalidGrid("axis needs at least two nodes"));
        }
        Ok(Axis { lo, hi, n })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    /// Fractional node index of coordinate `x`.
    pub fn frac_index(&self, x: f64) -> f64 {
        (x - self.lo) / self.step()
    }

    pub fn side(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }
}

/// Tensor grid in one or two dimensions. Samples are stored row-major with axis 0 outermost.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid("only one- and two-dimensional grids are supported"));
        }
        for a in &axes {
            Axis::new(a.lo, a.hi, a.n)?;
        }
        Ok(Grid { axes })
    }

    pub fn line(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid::new(vec![Axis::new(lo, hi, n)?])
    }

    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let a = Axis::new(lo, hi, n)?;
        Grid::new(vec![a, a])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).product()
    }

    pub fn min_step(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).fold(0.0, f64::max)
    }

    pub fn min_side(&self) -> f64 {
        self.axes.iter().map(|a| a.side()).fold(f64::INFINITY, f64::min)
    }

    /// Largest admissible shift length: a tenth of the shortest side.
    pub fn shift_cap(&self) -> f64 {
        0.1 * self.min_side()
    }

    /// Stride of axis `k` in the flat sample layout.
    pub fn stride(&self, k: usize) -> usize {
        self.axes[k + 1..].iter().map(|a| a.n).product()
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [flat, 0]
        } else {
            let n1 = self.axes[1].n;
            [flat / n1, flat % n1]
        }
    }

    /// Coordinates of a flat index; unused entries are zero.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 2];
        for (k, a) in self.axes.iter().enumerate() {
            x[k] = a.coord(idx[k]);
        }
        x
    }

    /// First flat index of every line running along axis `k`, plus the stride along it.
    pub fn lines(&self, k: usize) -> (Vec<usize>, usize) {
        let stride = self.stride(k);
        let starts = if self.dim() == 1 {
            vec![0]
        } else if k == 0 {
            (0..self.axes[1].n).collect()
        } else {
            (0..self.axes[0].n).map(|i| i * self.axes[1].n).collect()
        };
        (starts, stride)
    }

    /// Grid keeping every other node, when every axis has an even number of cells.
    pub fn decimated(&self) -> Option<Grid> {
        if self.axes.iter().all(|a| (a.n - 1) % 2 == 0 && a.n >= 5) {
            Some(Grid {
                axes: self.axes.iter().map(|a| Axis { lo: a.lo, hi: a.hi, n: a.n.div_ceil(2) }).collect(),
            })
        } else {
            None
        }
    }
}

/// Reference measure for norms and integrals on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Measure {
    Lebesgue,
    Gaussian,
}

impl Measure {
    /// Density with respect to Lebesgue measure at `x`.
    pub fn density(&self, x: &[f64]) -> f64 {
        match self {
            Measure::Lebesgue => 1.0,
            Measure::Gaussian => x.iter().map(|&v| normal_pdf(v)).product(),
        }
    }
}

/// Checks that `p` lies in `[1, inf]`.
pub fn check_exponent(p: f64) -> Result<f64> {
    if p >= 1.0 && !p.is_nan() {
        Ok(p)
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// Dual exponent `p / (p - 1)`, with `1` and `inf` exchanged.
pub fn dual_exponent(p: f64) -> Result<f64> {
    let p = check_exponent(p)?;
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

/// `(sum w |v|^p)^{1/p}`, or `max |v|` over nodes for `p = inf`.
pub fn weighted_norm(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
    } else if p == 2.0 {
        values.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt()
    } else {
        values
            .iter()
            .zip(weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Samples of a scalar function on a grid, tagged with its reference measure.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridFunction {
    grid: Grid,
    measure: Measure,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, measure: Measure, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(GridFunction { grid, measure, samples })
    }

    pub fn zeros(grid: Grid, measure: Measure) -> Self {
        let n = grid.len();
        GridFunction { grid, measure, samples: vec![0.0; n] }
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, measure: Measure, f: F) -> Result<Self> {
        let d = grid.dim();
        let samples = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        GridFunction::new(grid, measure, samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Same grid and measure with new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        GridFunction::new(self.grid.clone(), self.measure, samples)
    }

    pub(crate) fn with_samples_unchecked(&self, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), self.grid.len());
        GridFunction { grid: self.grid.clone(), measure: self.measure, samples }
    }

    /// Quadrature weights: cell volume times the measure density at each node.
    pub fn weights(&self) -> Vec<f64> {
        quadrature_weights(&self.grid, self.measure)
    }

    pub fn require_measure(&self, m: Measure) -> Result<()> {
        if self.measure == m {
            Ok(())
        } else {
            Err(Error::MeasureMismatch { expected: m, found: self.measure })
        }
    }

    pub fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: d, found: self.dim() })
        }
    }

    /// Integral against the reference measure.
    pub fn integral(&self) -> f64 {
        self.weights().iter().zip(&self.samples).map(|(w, v)| w * v).sum()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute sample on the outermost layer of nodes.
    pub fn boundary_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.grid.len() {
            let idx = self.grid.unflatten(i);
            let on_edge = (0..self.dim()).any(|k| idx[k] == 0 || idx[k] + 1 == self.grid.axis(k).n);
            if on_edge {
                m = m.max(self.samples[i].abs());
            }
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.with_samples_unchecked(self.samples.iter().map(|v| c * v).collect())
    }

    /// `self - other`, requiring the same grid and measure.
    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.with_samples_unchecked(
            self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("grid functions live on different grids"));
        }
        other.require_measure(self.measure)
    }

    /// Every other node, when the grid allows it.
    pub fn decimated(&self) -> Option<Self> {
        let g = self.grid.decimated()?;
        let samples = if self.dim() == 1 {
            self.samples.iter().step_by(2).copied().collect()
        } else {
            let n1 = self.grid.axis(1).n;
            let mut out = Vec::with_capacity(g.len());
            for i in (0..self.grid.axis(0).n).step_by(2) {
                for j in (0..n1).step_by(2) {
                    out.push(self.samples[i * n1 + j]);
                }
            }
            out
        };
        Some(GridFunction { grid: g, measure: self.measure, samples })
    }

    /// Six-point Lagrange interpolation per axis. Outside the box, Lebesgue-tagged
    /// functions vanish and Gaussian-tagged ones continue the boundary interpolant.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut stencils = [(0usize, [0.0f64; 6], 0usize); 2];
        for k in 0..d {
            let a = self.grid.axis(k);
            let u = a.frac_index(x[k]);
            if self.measure == Measure::Lebesgue && (u < -1e-9 || u > (a.n - 1) as f64 + 1e-9) {
                return 0.0;
            }
            stencils[k] = lagrange_stencil(u, a.n);
        }
        if d == 1 {
            let (s, w, len) = stencils[0];
            (0..len).map(|j| w[j] * self.samples[s + j]).sum()
        } else {
            let n1 = self.grid.axis(1).n;
            let (s0, w0, l0) = stencils[0];
            let (s1, w1, l1) = stencils[1];
            let mut acc = 0.0;
            for a in 0..l0 {
                let row = (s0 + a) * n1 + s1;
                let mut inner = 0.0;
                for b in 0..l1 {
                    inner += w1[b] * self.samples[row + b];
                }
                acc += w0[a] * inner;
            }
            acc
        }
    }
}

pub fn quadrature_weights(grid: &Grid, measure: Measure) -> Vec<f64> {
    let vol = grid.cell_volume();
    match measure {
        Measure::Lebesgue => vec![vol; grid.len()],
        Measure::Gaussian => {
            let d = grid.dim();
            (0..grid.len()).map(|i| vol * measure.density(&grid.point(i)[..d])).collect()
        }
    }
}

/// `L^p` norm with respect to the function's reference measure.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    let p = check_exponent(p)?;
    Ok(weighted_norm(&f.samples, &f.weights(), p))
}

/// Unit vector in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.len() > 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: v.len() });
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter { name: "direction length", value: norm });
        }
        Ok(Direction(v.into_iter().map(|c| c / norm).collect()))
    }

    pub fn axis(dim: usize, k: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Direction(v)
    }

    pub fn from_angle(theta: f64) -> Self {
        Direction(vec![theta.cos(), theta.sin()])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn negated(&self) -> Self {
        Direction(self.0.iter().map(|c| -c).collect())
    }

    /// The vector `t e`.
    pub fn scaled(&self, t: f64) -> Vec<f64> {
        self.0.iter().map(|c| c * t).collect()
    }
}

/// `f_h(x) = f(x - h)` by linear interpolation, with zero extension outside the grid.
pub fn shift(f: &GridFunction, h: &[f64]) -> Result<GridFunction> {
    f.require_measure(Measure::Lebesgue)?;
    let d = f.dim();
    if h.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h.len() });
    }
    let norm = h.iter().map(|c| c * c).sum::<f64>().sqrt();
    let cap = f.grid.shift_cap();
    if !norm.is_finite() || norm > cap * (1.0 + 1e-12) {
        return Err(Error::ShiftTooLarge { norm, cap });
    }
    Ok(f.with_samples_unchecked(shift_samples(&f.grid, &f.samples, h)))
}

/// Linear-interpolation translate of raw samples; no validation.
pub(crate) fn shift_samples(grid: &Grid, samples: &[f64], h: &[f64]) -> Vec<f64> {
    let d = grid.dim();
    // Per axis: source index i - s, split as integer offset m and fraction.
    let mut m = [0i64; 2];
    let mut frac = [0.0f64; 2];
    for k in 0..d {
        let s = h[k] / grid.axis(k).step();
        let fl = s.floor();
        m[k] = fl as i64;
        frac[k] = s - fl;
    }
    // f(x_i - h) = (1 - frac) F(i - m) + frac F(i - m - 1).
    let n0 = grid.axis(0).n as i64;
    if d == 1 {
        let get = |j: i64| if j >= 0 && j < n0 { samples[j as usize] } else { 0.0 };
        (0..n0)
            .map(|i| (1.0 - frac[0]) * get(i - m[0]) + frac[0] * get(i - m[0] - 1))
            .collect()
    } else {
        let n1 = grid.axis(1).n as i64;
        let get = |a: i64, b: i64| {
            if a >= 0 && a < n0 && b >= 0 && b < n1 {
                samples[(a * n1 + b) as usize]
            } else {
                0.0
            }
        };
        let mut out = Vec::with_capacity((n0 * n1) as usize);
        let (f0, f1) = (frac[0], frac[1]);
        for i in 0..n0 {
            let a = i - m[0];
            for j in 0..n1 {
                let b = j - m[1];
                let v = (1.0 - f0) * ((1.0 - f1) * get(a, b) + f1 * get(a, b - 1))
                    + f0 * ((1.0 - f1) * get(a - 1, b) + f1 * get(a - 1, b - 1));
                out.push(v);
            }
        }
        out
    }
}

/// Second-order finite-difference partial derivative along axis `k`.
pub fn partial(f: &GridFunction, k: usize) -> Result<GridFunction> {
    if k >= f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: k + 1 });
    }
    Ok(f.with_samples_unchecked(partial_samples(&f.grid, &f.samples, k)))
}

pub(crate) fn partial_samples(grid: &Grid, samples: &[f64], k: usize) -> Vec<f64> {
    let a = grid.axis(k);
    let n = a.n;
    let inv = 1.0 / a.step();
    let mut out = vec![0.0; samples.len()];
    let (starts, stride) = grid.lines(k);
    for s in starts {
        let at = |i: usize| samples[s + i * stride];
        if n == 2 {
            let d = (at(1) - at(0)) * inv;
            out[s] = d;
            out[s + stride] = d;
            continue;
        }
        out[s] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * 0.5 * inv;
        for i in 1..n - 1 {
            out[s + i * stride] = (at(i + 1) - at(i - 1)) * 0.5 * inv;
        }
        out[s + (n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * 0.5 * inv;
    }
    out
}

/// `d/de f` for a unit direction `e`.
pub fn directional_derivative(f: &GridFunction, e: &Direction) -> Result<GridFunction> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: e.dim() });
    }
    let mut acc = vec![0.0; f.samples.len()];
    for (k, &c) in e.components().iter().enumerate() {
        if c != 0.0 {
            let d = partial_samples(&f.grid, &f.samples, k);
            acc.iter_mut().zip(&d).for_each(|(a, v)| *a += c * v);
        }
    }
    Ok(f.with_samples_unchecked(acc))
}

/// Vector field with one grid function per coordinate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VectorFieldGrid {
    components: Vec<GridFunction>,
}

impl VectorFieldGrid {
    pub fn new(components: Vec<GridFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or(Error::InvalidGrid("vector field needs at least one component"))?;
        if components.len() != first.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: components.len() });
        }
        for c in &components[1..] {
            first.compatible(c)?;
        }
        Ok(VectorFieldGrid { components })
    }

    /// The field `e psi`.
    pub fn along(psi: &GridFunction, e: &Direction) -> Result<Self> {
        if e.dim() != psi.dim() {
            return Err(Error::DimensionMismatch { expected: psi.dim(), found: e.dim() });
        }
        VectorFieldGrid::new(e.components().iter().map(|&c| psi.scaled(c)).collect())
    }

    pub fn components(&self) -> &[GridFunction] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &GridFunction {
        &self.components[k]
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn measure(&self) -> Measure {
        self.components[0].measure()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Pointwise Euclidean length at every node.
    pub fn magnitude(&self) -> Vec<f64> {
        let n = self.grid().len();
        (0..n)
            .map(|i| self.components.iter().map(|c| c.samples[i] * c.samples[i]).sum::<f64>().sqrt())
            .collect()
    }

    /// `L^q` norm of the pointwise Euclidean length.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        let q = check_exponent(q)?;
        Ok(weighted_norm(&self.magnitude(), &self.components[0].weights(), q))
    }

    pub fn scaled(&self, c: f64) -> Self {
        VectorFieldGrid { components: self.components.iter().map(|g| g.scaled(c)).collect() }
    }
}

/// Plain divergence `sum_k d_k Phi_k`.
pub fn divergence(field: &VectorFieldGrid) -> GridFunction {
    let first = &field.components[0];
    let mut acc = vec![0.0; first.samples.len()];
    for (k, c) in field.components.iter().enumerate() {
        let d = partial_samples(c.grid(), &c.samples, k);
        acc.iter_mut().zip(&d).for_each(|(a, v)| *a += v);
    }
    first.with_samples_unchecked(acc)
}

/// Gaussian divergence `sum_k (d_k Phi_k - x_k Phi_k)`, the negative adjoint of the gradient in `L^2(gamma)`.
pub fn divergence_gamma(field: &VectorFieldGrid) -> Result<GridFunction> {
    field.components[0].require_measure(Measure::Gaussian)?;
    let mut div = divergence(field);
    let grid = field.grid().clone();
    let d = grid.dim();
    for i in 0..grid.len() {
        let x = grid.point(i);
        for k in 0..d {
            div.samples[i] -= x[k] * field.components[k].samples[i];
        }
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_norm_and_shift() {
        let g = Grid::line(-4.0, 4.0, 801).unwrap();
        let f = GridFunction::from_fn(g, Measure::Lebesgue, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        let d = shift(&f, &[0.25]).unwrap().sub(&f).unwrap();
        assert!((d.lp_norm(1.0).unwrap() - 0.5).abs() < 0.02);
        assert!(shift(&f, &[0.81]).is_err());
    }

    #[test]
    fn derivative_of_quadratic_is_exact() {
        let g = Grid::square(-1.0, 1.0, 21).unwrap();
        let f = GridFunction::from_fn(g, Measure::Lebesgue, |x| x[0] * x[0] + 3.0 * x[0] * x[1]).unwrap();
        let e = Direction::new(vec![1.0, 1.0]).unwrap();
        let d = directional_derivative(&f, &e).unwrap();
        for i in 0..f.grid().len() {
            let x = f.grid().point(i);
            let exact = (2.0 * x[0] + 3.0 * x[1] + 3.0 * x[0]) / 2f64.sqrt();
            assert!((d.samples()[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_divergence_of_constant_field() {
        let g = Grid::line(-6.0, 6.0, 121).unwrap();
        let one = GridFunction::from_fn(g, Measure::Gaussian, |_| 1.0).unwrap();
        let field = VectorFieldGrid::new(vec![one]).unwrap();
        let div = divergence_gamma(&field).unwrap();
        for i in 0..121 {
            assert!((div.samples()[i] + div.grid().point(i)[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Axis::new(1.0, 0.0, 10).is_err());
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        let g = Grid::line(0.0, 1.0, 3).unwrap();
        assert!(GridFunction::new(g.clone(), Measure::Lebesgue, vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(GridFunction::new(g, Measure::Lebesgue, vec![0.0; 2]).is_err());
        assert!(check_exponent(0.5).is_err());
        assert_eq!(dual_exponent(1.0).unwrap(), f64::INFINITY);
        assert_eq!(dual_exponent(2.0).unwrap(), 2.0);
    }

    #[test]
    fn eval_inside_and_outside() {
        let g = Grid::square(-2.0, 2.0, 41).unwrap();
        let f = GridFunction::from_fn(g.clone(), Measure::Lebesgue, |x| x[0] * x[1] * x[1]).unwrap();
        assert!((f.eval(&[0.33, -0.71]) - 0.33 * 0.71 * 0.71).abs() < 1e-12);
        assert_eq!(f.eval(&[3.0, 0.0]), 0.0);
        let h = GridFunction::from_fn(g, Measure::Gaussian, |x| x[0] + x[1] * x[1]).unwrap();
        let v = h.eval(&[3.0, 2.5]);
        assert!((v - (3.0 + 6.25)).abs() < 1e-6, "{v}");
    }
}
