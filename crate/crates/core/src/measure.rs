//! Shift regularity of gridded measures: total variation under translation, Hölder
//! profiles, the induced shift metric and dyadic chaining on conditional slices.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Direction, Grid, GridFunction};
use crate::heat::{check_time_grid, SemigroupCurve};
use crate::math::normal_mass;
use crate::{Error, Result};

/// Non-negative masses attached to the nodes of a grid (each node owns its cell).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridMeasure {
    grid: Grid,
    mass: Vec<f64>,
}

impl GridMeasure {
    pub fn new(grid: Grid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: mass.len() });
        }
        if let Some(i) = mass.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(GridMeasure { grid, mass })
    }

    /// Masses `density(x) * cell volume`.
    pub fn from_density<F: Fn(&[f64]) -> f64>(grid: Grid, density: F) -> Result<Self> {
        let vol = grid.cell_volume();
        let d = grid.dim();
        let mass = (0..grid.len()).map(|i| density(&grid.point(i)[..d]) * vol).collect();
        GridMeasure::new(grid, mass)
    }

    /// Standard Gaussian with exact cell masses.
    pub fn gaussian(grid: Grid) -> Result<Self> {
        let d = grid.dim();
        let per_axis: Vec<Vec<f64>> = grid
            .axes()
            .iter()
            .map(|a| {
                let h = 0.5 * a.step();
                (0..a.n).map(|i| normal_mass(a.coord(i) - h, a.coord(i) + h)).collect()
            })
            .collect();
        let mass = (0..grid.len())
            .map(|i| {
                let idx = grid.unflatten(i);
                (0..d).map(|k| per_axis[k][idx[k]]).product()
            })
            .collect();
        GridMeasure::new(grid, mass)
    }

    /// Measure with density given by a non-negative grid function.
    pub fn from_grid_function(f: &GridFunction) -> Result<Self> {
        let vol = f.grid().cell_volume();
        if let Some(i) = f.samples().iter().position(|&v| v < -1e-14) {
            return Err(Error::InvalidParameter { name: "negative density", value: f.samples()[i] });
        }
        GridMeasure::new(f.grid().clone(), f.samples().iter().map(|v| v.max(0.0) * vol).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// `sum |mu_i - nu_i|`, the total variation of the difference.
pub fn tv_distance(a: &GridMeasure, b: &GridMeasure) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::InvalidGrid("measures live on different grids"));
    }
    Ok(a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum())
}

/// Translate by `h`: every node mass is split linearly between the nodes around its
/// destination. Mass pushed off the grid is lost.
pub fn shift_measure(mu: &GridMeasure, h: &[f64]) -> Result<GridMeasure> {
    let grid = &mu.grid;
    let d = grid.dim();
    if h.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h.len() });
    }
    let mut m = [0i64; 2];
    let mut frac = [0.0f64; 2];
    for k in 0..d {
        let s = h[k] / grid.axis(k).step();
        if !s.is_finite() {
            return Err(Error::InvalidParameter { name: "shift", value: h[k] });
        }
        m[k] = s.floor() as i64;
        frac[k] = s - s.floor();
    }
    let mut out = vec![0.0; mu.mass.len()];
    let n0 = grid.axis(0).n as i64;
    if d == 1 {
        for (i, &w) in mu.mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (j, part) in [(i as i64 + m[0], 1.0 - frac[0]), (i as i64 + m[0] + 1, frac[0])] {
                if part > 0.0 && j >= 0 && j < n0 {
                    out[j as usize] += w * part;
                }
            }
        }
    } else {
        let n1 = grid.axis(1).n as i64;
        for (flat, &w) in mu.mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (i, j) = (flat as i64 / n1, flat as i64 % n1);
            for (a, pa) in [(i + m[0], 1.0 - frac[0]), (i + m[0] + 1, frac[0])] {
                if pa == 0.0 || a < 0 || a >= n0 {
                    continue;
                }
                for (b, pb) in [(j + m[1], 1.0 - frac[1]), (j + m[1] + 1, frac[1])] {
                    if pb > 0.0 && b >= 0 && b < n1 {
                        out[(a * n1 + b) as usize] += w * pa * pb;
                    }
                }
            }
        }
    }
    GridMeasure::new(grid.clone(), out)
}

/// `tv(mu_{t v}, mu)`.
pub fn shift_variation(mu: &GridMeasure, v: &[f64], t: f64) -> Result<f64> {
    let h: Vec<f64> = v.iter().map(|c| c * t).collect();
    tv_distance(&shift_measure(mu, &h)?, mu)
}

/// Least-squares fit `log tv ≈ log C + exponent log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HolderFit {
    pub exponent: f64,
    pub constant: f64,
    pub points_used: usize,
    /// Smallest fitted time, at least four cells.
    pub t_min: f64,
}

/// `t -> tv(mu_{t e}, mu)` over `t_grid` and its log-log fit on times of at least four cells.
pub fn holder_profile(mu: &GridMeasure, e: &Direction, t_grid: &[f64]) -> Result<(SemigroupCurve, HolderFit)> {
    check_time_grid(t_grid)?;
    if e.dim() != mu.grid.dim() {
        return Err(Error::DimensionMismatch { expected: mu.grid.dim(), found: e.dim() });
    }
    let values =
        t_grid.iter().map(|&t| shift_variation(mu, e.components(), t)).collect::<Result<Vec<f64>>>()?;
    let curve = SemigroupCurve::new(t_grid.to_vec(), values)?;
    let floor = 4.0 * mu.grid.max_step();
    let pts: Vec<(f64, f64)> = curve
        .t
        .iter()
        .zip(&curve.values)
        .filter(|(t, v)| **t >= floor * (1.0 - 1e-12) && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter { name: "fit points above four cells", value: pts.len() as f64 });
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let fit = HolderFit {
        exponent,
        constant: (my - exponent * mx).exp(),
        points_used: pts.len(),
        t_min: floor,
    };
    Ok((curve, fit))
}

/// `sup_t tv(t) / t^alpha` over a sampled profile.
pub fn holder_constant(curve: &SemigroupCurve, alpha: f64) -> f64 {
    curve.t.iter().zip(&curve.values).map(|(t, v)| v / t.powf(alpha)).fold(0.0, f64::max)
}

/// `sup_{t in ±t_grid} tv(mu_{t v}, mu) / |t|^alpha`, zero for `v = 0`.
pub fn shift_metric_norm(mu: &GridMeasure, v: &[f64], alpha: f64, t_grid: &[f64]) -> Result<f64> {
    if v.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for &t in t_grid {
        for s in [t, -t] {
            best = best.max(shift_variation(mu, v, s)? / t.powf(alpha));
        }
    }
    Ok(best)
}

/// Outcome of checking the metric axioms of `d(h1, h2) = sup_t tv(mu_{t(h1-h2)}, mu)/|t|^alpha`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub points: usize,
    pub triples_checked: usize,
    pub max_asymmetry: f64,
    pub max_self_distance: f64,
    pub max_translation_defect: f64,
    /// Largest `d(a, c) - d(a, b) - d(b, c)` relative to the right side.
    pub worst_triangle_excess: f64,
    pub triangle_violations: usize,
    pub slack: f64,
}

impl MetricReport {
    pub fn pass(&self) -> bool {
        self.max_asymmetry <= 1e-8
            && self.max_self_distance == 0.0
            && self.max_translation_defect <= 1e-8
            && self.triangle_violations == 0
    }
}

/// Checks symmetry, identity, translation invariance and the triangle inequality on all
/// ordered triples of distinct points of `h_list`, allowing relative `slack` in the triangle.
pub fn metric_axioms_check(
    mu: &GridMeasure,
    h_list: &[Vec<f64>],
    alpha: f64,
    t_grid: &[f64],
    slack: f64,
) -> Result<MetricReport> {
    check_time_grid(t_grid)?;
    let k = h_list.len();
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();
    let mut dist = vec![0.0; k * k];
    let mut max_asym: f64 = 0.0;
    let mut max_self: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            dist[i * k + j] = shift_metric_norm(mu, &diff(&h_list[i], &h_list[j]), alpha, t_grid)?;
        }
        max_self = max_self.max(dist[i * k + i]);
    }
    for i in 0..k {
        for j in 0..k {
            max_asym = max_asym.max((dist[i * k + j] - dist[j * k + i]).abs());
        }
    }
    // Translating both points by a common vector leaves their difference unchanged.
    let mut max_trans: f64 = 0.0;
    if k >= 2 {
        let c = &h_list[0];
        for i in 1..k {
            let a: Vec<f64> = h_list[i].iter().zip(c).map(|(x, y)| x + y).collect();
            let b: Vec<f64> = h_list[1 % k].iter().zip(c).map(|(x, y)| x + y).collect();
            let moved = shift_metric_norm(mu, &diff(&a, &b), alpha, t_grid)?;
            max_trans = max_trans.max((moved - dist[i * k + 1]).abs());
        }
    }
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut triples = 0;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if a == b || b == c || a == c {
                    continue;
                }
                triples += 1;
                let rhs = dist[a * k + b] + dist[b * k + c];
                let excess = (dist[a * k + c] - rhs) / rhs.max(1e-300);
                worst = worst.max(excess);
                if dist[a * k + c] > rhs * (1.0 + slack) + 1e-12 {
                    violations += 1;
                }
            }
        }
    }
    Ok(MetricReport {
        points: k,
        triples_checked: triples,
        max_asymmetry: max_asym,
        max_self_distance: max_self,
        max_translation_defect: max_trans,
        worst_triangle_excess: if triples == 0 { 0.0 } else { worst },
        triangle_violations: violations,
        slack,
    })
}

/// Normalised slices of a 2D measure along `shift_axis`, one per node of the other axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSlices {
    pub shift_axis: usize,
    /// Coordinates along the conditioning axis.
    pub coords: Vec<f64>,
    /// Marginal mass of each slice.
    pub marginal: Vec<f64>,
    /// Probability measure on the shift axis, `None` where the marginal vanishes.
    pub slices: Vec<Option<GridMeasure>>,
}

pub fn conditional_slices(mu: &GridMeasure, shift_axis: usize) -> Result<ConditionalSlices> {
    let grid = &mu.grid;
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
    }
    if shift_axis > 1 {
        return Err(Error::DimensionMismatch { expected: 2, found: shift_axis + 1 });
    }
    let other = 1 - shift_axis;
    let line_grid = Grid::new(vec![*grid.axis(shift_axis)])?;
    let (starts, stride) = grid.lines(shift_axis);
    let n = grid.axis(shift_axis).n;
    let mut coords = Vec::with_capacity(starts.len());
    let mut marginal = Vec::with_capacity(starts.len());
    let mut slices = Vec::with_capacity(starts.len());
    for (j, s) in starts.into_iter().enumerate() {
        let row: Vec<f64> = (0..n).map(|i| mu.mass[s + i * stride]).collect();
        let total: f64 = row.iter().sum();
        coords.push(grid.axis(other).coord(j));
        marginal.push(total);
        slices.push(if total > 0.0 {
            Some(GridMeasure::new(line_grid.clone(), row.iter().map(|m| m / total).collect())?)
        } else {
            None
        });
    }
    Ok(ConditionalSlices { shift_axis, coords, marginal, slices })
}

/// Chaining outcome for one slice.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainingRow {
    pub coord: f64,
    pub marginal: f64,
    /// `max_{1 <= n <= depth} 2^{n beta} tv(mu_{2^-n}, mu)`.
    pub dyadic_constant: f64,
    /// `max(2, dyadic_constant / (1 - 2^{-beta}))`.
    pub bound_constant: f64,
    /// Largest `tv(mu_s, mu) / (bound_constant s^beta)` over the sampled shifts.
    pub worst_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainingReport {
    pub beta: f64,
    pub depth: u32,
    pub rows: Vec<ChainingRow>,
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Bounds `tv(mu^y_s, mu^y)` at each sampled `s in (0, 1]` by dyadic chaining from the
/// shifts `2^{-n}`, `n = 1..=depth`, and checks the bound on every slice.
pub fn chaining_check(
    slices: &ConditionalSlices,
    beta: f64,
    depth: u32,
    samples: &[f64],
    slack: f64,
) -> Result<ChainingReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter { name: "beta", value: beta });
    }
    if depth == 0 {
        return Err(Error::InvalidParameter { name: "depth", value: 0.0 });
    }
    if let Some(&s) = samples.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::InvalidParameter { name: "sample shift", value: s });
    }
    let mut rows = Vec::new();
    for ((slice, &coord), &marginal) in slices.slices.iter().zip(&slices.coords).zip(&slices.marginal) {
        let Some(mu) = slice else { continue };
        let mut dyadic: f64 = 0.0;
        for n in 1..=depth {
            let s = 2f64.powi(-(n as i32));
            dyadic = dyadic.max(2f64.powf(n as f64 * beta) * shift_variation(mu, &[1.0], s)?);
        }
        let bound = (dyadic / (1.0 - 2f64.powf(-beta))).max(2.0);
        let mut worst: f64 = 0.0;
        for &s in samples {
            worst = worst.max(shift_variation(mu, &[1.0], s)? / (bound * s.powf(beta)));
        }
        rows.push(ChainingRow {
            coord,
            marginal,
            dyadic_constant: dyadic,
            bound_constant: bound,
            worst_ratio: worst,
            pass: worst <= 1.0 + slack,
        });
    }
    let worst_ratio = rows.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(ChainingReport { beta, depth, rows, worst_ratio, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{log_spaced, normal_cdf};

    #[test]
    fn gaussian_shift_tv_matches_closed_form() {
        let g = Grid::line(-8.0, 8.0, 4097).unwrap();
        let mu = GridMeasure::gaussian(g).unwrap();
        for &h in &[0.05, 0.3, 1.0] {
            let tv = shift_variation(&mu, &[1.0], h).unwrap();
            let exact = 2.0 * (2.0 * normal_cdf(h / 2.0) - 1.0);
            assert!((tv - exact).abs() < 1e-4, "{h} {tv} {exact}");
        }
    }

    #[test]
    fn holder_fit_of_gaussian() {
        let g = Grid::line(-8.0, 8.0, 4097).unwrap();
        let mu = GridMeasure::gaussian(g).unwrap();
        let ts = log_spaced(1e-3, 0.1, 24).unwrap();
        let (curve, fit) = holder_profile(&mu, &Direction::axis(1, 0), &ts).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.02);
        let c = (2.0 / core::f64::consts::PI).sqrt();
        assert!((fit.constant - c).abs() < 0.01 * c, "{}", fit.constant);
        assert!((holder_constant(&curve, 1.0) - c).abs() < 0.01 * c);
    }

    #[test]
    fn product_slices_share_constant() {
        let g = Grid::new(vec![crate::Axis::new(-4.0, 4.0, 1025).unwrap(), crate::Axis::new(0.0, 1.0, 9).unwrap()]).unwrap();
        let mu = GridMeasure::from_density(g, |x| crate::math::normal_pdf(x[0]) * (1.0 + x[1])).unwrap();
        let sl = conditional_slices(&mu, 0).unwrap();
        let rep = chaining_check(&sl, 1.0, 7, &[0.01, 0.1, 0.33, 0.9], 1e-9).unwrap();
        assert!(rep.pass);
        let c0 = rep.rows[0].dyadic_constant;
        assert!(rep.rows.iter().all(|r| (r.dyadic_constant - c0).abs() < 1e-10 * c0));
    }

    #[test]
    fn metric_axioms_on_gaussian() {
        let g = Grid::square(-6.0, 6.0, 97).unwrap();
        let mu = GridMeasure::gaussian(g).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![0.3, -0.2], vec![-0.5, 0.4], vec![0.1, 0.7]];
        let ts = log_spaced(0.05, 1.0, 8).unwrap();
        let rep = metric_axioms_check(&mu, &pts, 0.5, &ts, 0.02).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }
}
