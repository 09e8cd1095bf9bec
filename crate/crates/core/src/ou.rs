//! Ornstein-Uhlenbeck semigroup `T_t f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) Z)`, Gaussian
//! constants, Hermite expansions and conditional expectations.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{check_exponent, weighted_norm, Axis, Grid, GridFunction, Measure, VectorFieldGrid};
use crate::heat::{check_alpha, check_time_grid, SemigroupCurve, UFunctional};
use crate::math::{adaptive_simpson, gamma, hermite_values, lagrange_stencil, normal_pdf, GaussHermite};
use crate::{Error, Result};

pub const DEFAULT_NODES: usize = 128;
pub const DEFAULT_DEGREE: usize = 64;

/// `C(p) = (E|Z|^p)^{1/p}` for a standard normal `Z`, closed form.
pub fn moment_constant(p: f64) -> Result<f64> {
    let p = check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let m = 2f64.powf(0.5 * p) * gamma(0.5 * (p + 1.0)) / core::f64::consts::PI.sqrt();
    Ok(m.powf(1.0 / p))
}

/// `C(p)` by adaptive quadrature of `|x|^p` against the Gaussian density.
pub fn moment_constant_quadrature(p: f64) -> Result<f64> {
    let p = check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let g = |x: f64| x.powf(p) * normal_pdf(x);
    let m = 2.0 * (adaptive_simpson(g, 0.0, 1.0, 1e-16) + adaptive_simpson(g, 1.0, 12.0, 1e-16)
        + adaptive_simpson(g, 12.0, 60.0, 1e-16));
    Ok(m.powf(1.0 / p))
}

/// `c_t = int_0^t e^{-s} (1 - e^{-2s})^{-1/2} ds = arccos(e^{-t})`.
pub fn ct(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok((-t).exp().acos())
}

/// `c_t` by quadrature after the substitution `s = u^2`, which removes the endpoint singularity.
pub fn ct_quadrature(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    let g = |u: f64| {
        if u == 0.0 {
            core::f64::consts::SQRT_2
        } else {
            let s = u * u;
            2.0 * u * (-s).exp() / (-(-2.0 * s).exp_m1()).sqrt()
        }
    };
    Ok(adaptive_simpson(g, 0.0, t.sqrt(), 1e-15))
}

/// `E|Z|^a` for a standard normal vector in dimension `n`.
pub fn gaussian_abs_moment(a: f64, n: usize) -> f64 {
    let nf = n as f64;
    2f64.powf(0.5 * a) * gamma(0.5 * (nf + a)) / gamma(0.5 * nf)
}

/// Constant in `V <= C(n, alpha) ||f||_{p,alpha}`: `E|Z|^alpha + E|Z|^{1+alpha}`.
pub fn shift_variation_constant(n: usize, alpha: f64) -> f64 {
    gaussian_abs_moment(alpha, n) + gaussian_abs_moment(1.0 + alpha, n)
}

/// Constant bounding the Gaussian variation functional by the Bessel-potential norm.
pub fn embedding_constant(p: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::InvalidParameter { name: "alpha (embedding needs alpha < 1)", value: alpha });
    }
    let q = crate::grid::dual_exponent(p)?;
    let g = gamma(0.5 * alpha);
    Ok((2.0 / alpha) / g + 2.0 / (g * (1.0 - alpha)) * moment_constant(q)?)
}

/// Gaussian constants for an exponent, cross-checked against quadrature on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianConstants {
    pub p: f64,
    pub cp: f64,
    /// `C(q)` for the dual exponent, when finite.
    pub cq: Option<f64>,
    /// Largest disagreement between closed forms and quadrature seen during the check.
    pub residual: f64,
}

impl GaussianConstants {
    pub fn new(p: f64) -> Result<Self> {
        let cp = moment_constant(p)?;
        let mut residual = (cp - moment_constant_quadrature(p)?).abs();
        let q = crate::grid::dual_exponent(p)?;
        let cq = if q.is_finite() {
            let c = moment_constant(q)?;
            residual = residual.max((c - moment_constant_quadrature(q)?).abs());
            Some(c)
        } else {
            None
        };
        for &t in &[1e-3, 0.1, 1.0, 10.0] {
            residual = residual.max((ct(t)? - ct_quadrature(t)?).abs());
        }
        if residual > 1e-10 {
            return Err(Error::InvalidParameter { name: "constant cross-check residual", value: residual });
        }
        Ok(GaussianConstants { p, cp, cq, residual })
    }

    pub fn ct(&self, t: f64) -> Result<f64> {
        ct(t)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LineKind {
    Apply,
    Gradient,
}

/// Gauss-Hermite evaluation of the OU semigroup on grids and on closed-form inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct OuEngine {
    rule: GaussHermite,
}

impl Default for OuEngine {
    fn default() -> Self {
        OuEngine::new(DEFAULT_NODES).expect("default Gauss-Hermite rule")
    }
}

fn time_factors(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(((-t).exp(), (-(-2.0 * t).exp_m1()).sqrt()))
}

impl OuEngine {
    pub fn new(nodes: usize) -> Result<Self> {
        Ok(OuEngine { rule: GaussHermite::new(nodes)? })
    }

    pub fn rule(&self) -> &GaussHermite {
        &self.rule
    }

    fn coefficients(&self, t: f64, kind: LineKind) -> Result<(f64, f64, Vec<f64>)> {
        let (a, s) = time_factors(t)?;
        let c = match kind {
            LineKind::Apply => self.rule.weights.clone(),
            LineKind::Gradient => {
                self.rule.nodes.iter().zip(&self.rule.weights).map(|(y, w)| w * y * a / s).collect()
            }
        };
        Ok((a, s, c))
    }

    /// Dense `n x n` matrix of the one-dimensional operator on an axis.
    fn line_matrix(&self, axis: &Axis, t: f64, kind: LineKind) -> Result<Vec<f64>> {
        let (a, s, c) = self.coefficients(t, kind)?;
        let n = axis.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            let x = axis.coord(i);
            let row = &mut m[i * n..(i + 1) * n];
            for (y, ci) in self.rule.nodes.iter().zip(&c) {
                let (start, w, len) = lagrange_stencil(axis.frac_index(a * x + s * y), n);
                for j in 0..len {
                    row[start + j] += ci * w[j];
                }
            }
        }
        Ok(m)
    }

    fn apply_line_direct(&self, axis: &Axis, values: &[f64], t: f64, kind: LineKind) -> Result<Vec<f64>> {
        let (a, s, c) = self.coefficients(t, kind)?;
        let n = axis.n;
        Ok((0..n)
            .map(|i| {
                let x = axis.coord(i);
                let mut acc = 0.0;
                for (y, ci) in self.rule.nodes.iter().zip(&c) {
                    let (start, w, len) = lagrange_stencil(axis.frac_index(a * x + s * y), n);
                    let mut v = 0.0;
                    for j in 0..len {
                        v += w[j] * values[start + j];
                    }
                    acc += ci * v;
                }
                acc
            })
            .collect())
    }

    fn apply_axis(&self, grid: &Grid, data: &[f64], k: usize, t: f64, kind: LineKind) -> Result<Vec<f64>> {
        let axis = grid.axis(k);
        if grid.dim() == 1 {
            return self.apply_line_direct(axis, data, t, kind);
        }
        let m = self.line_matrix(axis, t, kind)?;
        let n = axis.n;
        let mut out = vec![0.0; data.len()];
        if k == 1 {
            for (src, dst) in data.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
                for (i, o) in dst.iter_mut().enumerate() {
                    *o = m[i * n..(i + 1) * n].iter().zip(src).map(|(a, b)| a * b).sum();
                }
            }
        } else {
            let row = grid.stride(0);
            for i in 0..n {
                let dst = &mut out[i * row..(i + 1) * row];
                for j in 0..n {
                    let c = m[i * n + j];
                    if c == 0.0 {
                        continue;
                    }
                    for (o, v) in dst.iter_mut().zip(&data[j * row..(j + 1) * row]) {
                        *o += c * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `T_t f` and `grad T_t f` on the grid of `f`.
    pub fn smooth(&self, f: &GridFunction, t: f64) -> Result<(GridFunction, VectorFieldGrid)> {
        f.require_measure(Measure::Gaussian)?;
        let grid = f.grid();
        let x = f.samples();
        if grid.dim() == 1 {
            let p = self.apply_axis(grid, x, 0, t, LineKind::Apply)?;
            let d = self.apply_axis(grid, x, 0, t, LineKind::Gradient)?;
            return Ok((f.with_samples_unchecked(p), VectorFieldGrid::new(vec![f.with_samples_unchecked(d)])?));
        }
        let a = self.apply_axis(grid, x, 1, t, LineKind::Apply)?;
        let b = self.apply_axis(grid, x, 1, t, LineKind::Gradient)?;
        let p = self.apply_axis(grid, &a, 0, t, LineKind::Apply)?;
        let d0 = self.apply_axis(grid, &a, 0, t, LineKind::Gradient)?;
        let d1 = self.apply_axis(grid, &b, 0, t, LineKind::Apply)?;
        let grad = VectorFieldGrid::new(vec![f.with_samples_unchecked(d0), f.with_samples_unchecked(d1)])?;
        Ok((f.with_samples_unchecked(p), grad))
    }

    pub fn apply(&self, f: &GridFunction, t: f64) -> Result<GridFunction> {
        f.require_measure(Measure::Gaussian)?;
        let grid = f.grid();
        let mut cur = f.samples().to_vec();
        for k in (0..grid.dim()).rev() {
            cur = self.apply_axis(grid, &cur, k, t, LineKind::Apply)?;
        }
        Ok(f.with_samples_unchecked(cur))
    }

    pub fn gradient(&self, f: &GridFunction, t: f64) -> Result<VectorFieldGrid> {
        Ok(self.smooth(f, t)?.1)
    }

    /// `T_t f` for a closed-form `f`, by tensor Gauss-Hermite quadrature at every node.
    pub fn apply_fn<F: Fn(&[f64]) -> f64>(&self, f: F, grid: &Grid, t: f64) -> Result<GridFunction> {
        let (a, s) = time_factors(t)?;
        let d = grid.dim();
        let (ys, ws) = (&self.rule.nodes, &self.rule.weights);
        GridFunction::from_fn(grid.clone(), Measure::Gaussian, |x| {
            if d == 1 {
                ys.iter().zip(ws).map(|(y, w)| w * f(&[a * x[0] + s * y])).sum()
            } else {
                let mut acc = 0.0;
                for (y0, w0) in ys.iter().zip(ws) {
                    for (y1, w1) in ys.iter().zip(ws) {
                        acc += w0 * w1 * f(&[a * x[0] + s * y0, a * x[1] + s * y1]);
                    }
                }
                acc
            }
        })
    }

    /// Expectation over the coordinate `1 - keep` of a two-dimensional Gaussian-tagged function.
    pub fn conditional_expectation(&self, f: &GridFunction, keep: usize) -> Result<GridFunction> {
        f.require_measure(Measure::Gaussian)?;
        f.require_dim(2)?;
        if keep > 1 {
            return Err(Error::DimensionMismatch { expected: 2, found: keep + 1 });
        }
        let drop = 1 - keep;
        let grid = f.grid();
        let dropped = grid.axis(drop);
        let mut r = vec![0.0; dropped.n];
        for (y, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let (start, l, len) = lagrange_stencil(dropped.frac_index(*y), dropped.n);
            for j in 0..len {
                r[start + j] += w * l[j];
            }
        }
        let kept = *grid.axis(keep);
        let (_, stride) = grid.lines(drop);
        let keep_stride = grid.stride(keep);
        let samples = (0..kept.n)
            .map(|i| (0..dropped.n).map(|j| r[j] * f.samples()[i * keep_stride + j * stride]).sum())
            .collect();
        GridFunction::new(Grid::new(vec![kept])?, Measure::Gaussian, samples)
    }
}

/// Gaussian gradient functional `sup_t t^{(1-alpha)/2} ||grad T_t f||_{L^p(gamma)}` over `t_grid`.
pub fn u_gamma_functional(
    engine: &OuEngine,
    f: &GridFunction,
    p: f64,
    alpha: f64,
    t_grid: &[f64],
) -> Result<UFunctional> {
    check_exponent(p)?;
    check_alpha(alpha)?;
    check_time_grid(t_grid)?;
    let w = f.weights();
    let values = t_grid
        .iter()
        .map(|&t| {
            let g = engine.gradient(f, t)?;
            Ok(t.powf(0.5 * (1.0 - alpha)) * weighted_norm(&g.magnitude(), &w, p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let curve = SemigroupCurve::new(t_grid.to_vec(), values)?;
    let (argmax_t, value) = curve.sup();
    Ok(UFunctional { value, argmax_t, p, alpha, curve })
}

/// Norm curves of the OU flow for several exponents at once.
#[derive(Debug, Clone, PartialEq)]
pub struct OuCurves {
    pub t: Vec<f64>,
    pub exponents: Vec<f64>,
    /// `||f - T_t f||_p`, one row per exponent.
    pub approximation: Vec<Vec<f64>>,
    /// `||grad T_t f||_p`, one row per exponent.
    pub gradient: Vec<Vec<f64>>,
}

impl OuCurves {
    pub fn compute(engine: &OuEngine, f: &GridFunction, exponents: &[f64], t_grid: &[f64]) -> Result<Self> {
        check_time_grid(t_grid)?;
        for &p in exponents {
            check_exponent(p)?;
        }
        let w = f.weights();
        let mut approximation = vec![Vec::with_capacity(t_grid.len()); exponents.len()];
        let mut gradient = vec![Vec::with_capacity(t_grid.len()); exponents.len()];
        for &t in t_grid {
            let (tt, grad) = engine.smooth(f, t)?;
            let diff: Vec<f64> = f.samples().iter().zip(tt.samples()).map(|(a, b)| a - b).collect();
            let mag = grad.magnitude();
            for (k, &p) in exponents.iter().enumerate() {
                approximation[k].push(weighted_norm(&diff, &w, p));
                gradient[k].push(weighted_norm(&mag, &w, p));
            }
        }
        Ok(OuCurves { t: t_grid.to_vec(), exponents: exponents.to_vec(), approximation, gradient })
    }

    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.exponents.iter().position(|&q| q == p)
    }
}

/// Coefficients of an expansion in orthonormal Hermite polynomials.
///
/// In two dimensions `coeffs[m * (degree + 1) + n]` multiplies `h_m(x) h_n(y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HermiteCoeffs {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<f64>,
    /// `||f||^2 - sum c^2`, clamped at zero; zero for expansions given directly.
    pub tail_energy: f64,
}

impl HermiteCoeffs {
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (degree + 1).pow(dim as u32);
        if !(dim == 1 || dim == 2) {
            return Err(Error::DimensionMismatch { expected: 1, found: dim });
        }
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch { expected, found: coeffs.len() });
        }
        Ok(HermiteCoeffs { dim, degree, coeffs, tail_energy: 0.0 })
    }

    /// Projection of a Gaussian-tagged grid function by grid quadrature.
    pub fn from_grid(f: &GridFunction, degree: usize) -> Result<Self> {
        f.require_measure(Measure::Gaussian)?;
        let w = f.weights();
        let grid = f.grid();
        let dim = grid.dim();
        let mut coeffs = vec![0.0; (degree + 1).pow(dim as u32)];
        let mut norm_sq = 0.0;
        for i in 0..grid.len() {
            let x = grid.point(i);
            let v = f.samples()[i] * w[i];
            norm_sq += f.samples()[i] * v;
            let hx = hermite_values(degree, x[0]);
            if dim == 1 {
                coeffs.iter_mut().zip(&hx).for_each(|(c, h)| *c += v * h);
            } else {
                let hy = hermite_values(degree, x[1]);
                for (m, a) in hx.iter().enumerate() {
                    let row = &mut coeffs[m * (degree + 1)..(m + 1) * (degree + 1)];
                    row.iter_mut().zip(&hy).for_each(|(c, b)| *c += v * a * b);
                }
            }
        }
        let tail_energy = (norm_sq - coeffs.iter().map(|c| c * c).sum::<f64>()).max(0.0);
        Ok(HermiteCoeffs { dim, degree, coeffs, tail_energy })
    }

    /// Projection of a closed-form function by tensor Gauss-Hermite quadrature.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(f: F, dim: usize, degree: usize, rule: &GaussHermite) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::DimensionMismatch { expected: 1, found: dim });
        }
        let mut coeffs = vec![0.0; (degree + 1).pow(dim as u32)];
        let mut norm_sq = 0.0;
        let hs: Vec<Vec<f64>> = rule.nodes.iter().map(|&y| hermite_values(degree, y)).collect();
        for (a, (ya, wa)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            if dim == 1 {
                let v = f(&[*ya]);
                norm_sq += wa * v * v;
                coeffs.iter_mut().zip(&hs[a]).for_each(|(c, h)| *c += wa * v * h);
                continue;
            }
            for (b, (yb, wb)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let v = f(&[*ya, *yb]);
                let w = wa * wb;
                norm_sq += w * v * v;
                for (m, hm) in hs[a].iter().enumerate() {
                    let row = &mut coeffs[m * (degree + 1)..(m + 1) * (degree + 1)];
                    row.iter_mut().zip(&hs[b]).for_each(|(c, hn)| *c += w * v * hm * hn);
                }
            }
        }
        let tail_energy = (norm_sq - coeffs.iter().map(|c| c * c).sum::<f64>()).max(0.0);
        Ok(HermiteCoeffs { dim, degree, coeffs, tail_energy })
    }

    /// Total degree of each coefficient slot.
    fn total_degree(&self, idx: usize) -> usize {
        if self.dim == 1 {
            idx
        } else {
            idx / (self.degree + 1) + idx % (self.degree + 1)
        }
    }

    fn with_multiplier<F: Fn(usize) -> f64>(&self, mult: F) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * mult(self.total_degree(i))).collect();
        HermiteCoeffs { dim: self.dim, degree: self.degree, coeffs, tail_energy: 0.0 }
    }

    /// `T_t` as the multiplier `e^{-n t}`.
    pub fn ou_apply(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(self.with_multiplier(|n| (-(n as f64) * t).exp()))
    }

    /// Bessel potential `(I + L)^{-alpha/2}`, the multiplier `(1 + n)^{-alpha/2}`.
    pub fn bessel_potential(&self, alpha: f64) -> Self {
        self.with_multiplier(|n| (1.0 + n as f64).powf(-0.5 * alpha))
    }

    /// `(sum (1 + n)^alpha c_n^2)^{1/2}`, the `H^{2,alpha}` norm.
    pub fn sobolev_norm(&self, alpha: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (1.0 + self.total_degree(i) as f64).powf(alpha) * c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let hx = hermite_values(self.degree, x[0]);
        if self.dim == 1 {
            return self.coeffs.iter().zip(&hx).map(|(c, h)| c * h).sum();
        }
        let hy = hermite_values(self.degree, x[1]);
        let mut acc = 0.0;
        for (m, a) in hx.iter().enumerate() {
            let row = &self.coeffs[m * (self.degree + 1)..(m + 1) * (self.degree + 1)];
            acc += a * row.iter().zip(&hy).map(|(c, b)| c * b).sum::<f64>();
        }
        acc
    }

    /// Samples on a grid of matching dimension, tagged Gaussian.
    pub fn synthesize(&self, grid: &Grid) -> Result<GridFunction> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: grid.dim() });
        }
        GridFunction::from_fn(grid.clone(), Measure::Gaussian, |x| self.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_corpus;

    #[test]
    fn constants_match_known_values() {
        assert!((moment_constant(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((moment_constant(1.0).unwrap() - (2.0 / core::f64::consts::PI).sqrt()).abs() < 1e-14);
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.0] {
            let r = (moment_constant(p).unwrap() - moment_constant_quadrature(p).unwrap()).abs();
            assert!(r < 1e-10, "p={p} residual {r}");
        }
        for &t in &[1e-4, 0.01, 0.5, 2.0, 30.0] {
            assert!((ct(t).unwrap() - ct_quadrature(t).unwrap()).abs() < 1e-10, "t={t}");
            assert!(ct(t).unwrap() <= (2.0 * t).sqrt() + 1e-15);
        }
        assert!((ct(40.0).unwrap() - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(GaussianConstants::new(1.0).unwrap().cq.is_none());
        assert!((embedding_constant(2.0, 0.5).unwrap() - 2.206_525_302_641_674_5).abs() < 1e-12);
        assert!((gaussian_abs_moment(1.0, 1) - (2.0 / core::f64::consts::PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hermite_eigenfunctions_decay() {
        let engine = OuEngine::default();
        let g = Grid::line(-8.0, 8.0, 1025).unwrap();
        for n in 1..=4u32 {
            let f = build_corpus(&alloc::format!("hermite({n})"), &g).unwrap();
            let t = 0.7;
            let tf = engine.apply(&f, t).unwrap();
            let decay = (-(n as f64) * t).exp();
            for i in (0..1025).step_by(13) {
                assert!((tf.samples()[i] - decay * f.samples()[i]).abs() < 1e-8 * (1.0 + f.samples()[i].abs()));
            }
        }
    }

    #[test]
    fn gradient_of_x_and_sandwich_value() {
        let engine = OuEngine::default();
        let g = Grid::line(-8.0, 8.0, 513).unwrap();
        let f = build_corpus("hermite(1)", &g).unwrap();
        let grad = engine.gradient(&f, 0.3).unwrap();
        assert!(grad.component(0).samples().iter().all(|v| (v - (-0.3f64).exp()).abs() < 1e-10));
        let ts = crate::math::log_spaced(1e-3, 10.0, 400).unwrap();
        let u = u_gamma_functional(&engine, &f, 2.0, 0.5, &ts).unwrap();
        let exact = 0.25f64.powf(0.25) * (-0.25f64).exp();
        assert!((u.value - exact).abs() < 1e-4, "{}", u.value);
    }

    #[test]
    fn spectral_and_quadrature_routes_agree() {
        let engine = OuEngine::default();
        let f = |x: &[f64]| (x[0]).sin() + 0.3 * x[0] * x[0];
        let coeffs = HermiteCoeffs::from_fn(f, 1, 48, engine.rule()).unwrap();
        assert!(coeffs.tail_energy < 1e-12);
        let g = Grid::line(-6.0, 6.0, 241).unwrap();
        for &t in &[0.05, 0.5, 2.0] {
            let quad = engine.apply_fn(f, &g, t).unwrap();
            let spec = coeffs.ou_apply(t).unwrap().synthesize(&g).unwrap();
            let diff = quad.sub(&spec).unwrap().lp_norm(2.0).unwrap();
            assert!(diff < 1e-8 * coeffs.l2_norm(), "t={t} diff={diff}");
        }
    }

    #[test]
    fn two_dimensional_tensor_matches_closed_form() {
        let engine = OuEngine::new(64).unwrap();
        let g = Grid::square(-8.0, 8.0, 65).unwrap();
        let f = build_corpus("x_plus_y2", &g).unwrap();
        let t = 0.4;
        let (tf, grad) = engine.smooth(&f, t).unwrap();
        let a = (-t).exp();
        for i in (0..g.len()).step_by(31) {
            let x = g.point(i);
            let exact = a * x[0] + a * a * x[1] * x[1] + 1.0 - a * a;
            assert!((tf.samples()[i] - exact).abs() < 1e-9);
            assert!((grad.component(0).samples()[i] - a).abs() < 1e-9);
            assert!((grad.component(1).samples()[i] - 2.0 * a * a * x[1]).abs() < 1e-8);
        }
        let e1 = engine.conditional_expectation(&f, 0).unwrap();
        for i in 0..65 {
            let x = e1.grid().point(i)[0];
            assert!((e1.samples()[i] - (x + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn bessel_potential_and_norms() {
        let c = HermiteCoeffs::from_coeffs(1, 3, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((c.sobolev_norm(0.5) - 2.0f64.powf(0.5)).abs() < 1e-14);
        assert!((c.bessel_potential(0.5).coeffs[3] - 0.5f64.powf(0.5)).abs() < 1e-14);
    }
}
