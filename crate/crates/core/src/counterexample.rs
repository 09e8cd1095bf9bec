//! A function whose derivative pairing is bounded along one direction while almost
//! every slice has unbounded sine coefficients `k^alpha a_k(y)`:
//!
//! `f(x, y) = 1_{[0, 2 pi]}(x) sum_{k >= k0} sin(k x) k^{-alpha} sqrt(ln k) 1_{J_k}(y)`,
//! with `|J_k| = 1 / (k ln k)` laid end to end on the circle `[0, 1)`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Grid, GridFunction, Measure};
use crate::math::{adaptive_simpson, fft};
use crate::{Error, Result};

use core::f64::consts::PI;

/// Parameters of the truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CounterexampleSpec {
    pub alpha: f64,
    /// Largest frequency kept, `N`.
    pub n_terms: usize,
    pub k_start: usize,
}

impl CounterexampleSpec {
    pub fn new(alpha: f64, n_terms: usize, k_start: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha });
        }
        if k_start < 2 {
            return Err(Error::InvalidParameter { name: "k_start", value: k_start as f64 });
        }
        if n_terms < k_start {
            return Err(Error::InvalidParameter { name: "n_terms", value: n_terms as f64 });
        }
        Ok(CounterexampleSpec { alpha, n_terms, k_start })
    }
}

/// The truncated series with its interval placement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counterexample {
    pub spec: CounterexampleSpec,
    /// Left end of `J_k` on the circle, for `k = k_start..=n_terms`.
    pub starts: Vec<f64>,
    pub lengths: Vec<f64>,
}

/// `|J_k| = 1 / (k ln k)`.
pub fn interval_length(k: usize) -> f64 {
    let kf = k as f64;
    1.0 / (kf * kf.ln())
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

impl Counterexample {
    pub fn new(spec: CounterexampleSpec) -> Result<Self> {
        let spec = CounterexampleSpec::new(spec.alpha, spec.n_terms, spec.k_start)?;
        let count = spec.n_terms - spec.k_start + 1;
        let mut starts = Vec::with_capacity(count);
        let mut lengths = Vec::with_capacity(count);
        let mut pos = 0.0f64;
        for k in spec.k_start..=spec.n_terms {
            let len = interval_length(k);
            starts.push(pos);
            lengths.push(len);
            pos = frac(pos + len);
        }
        Ok(Counterexample { spec, starts, lengths })
    }

    /// `k^{-alpha} sqrt(ln k)`.
    pub fn coefficient(&self, k: usize) -> f64 {
        let kf = k as f64;
        kf.powf(-self.spec.alpha) * kf.ln().sqrt()
    }

    fn slot(&self, k: usize) -> Option<usize> {
        (k >= self.spec.k_start && k <= self.spec.n_terms).then(|| k - self.spec.k_start)
    }

    pub fn covers(&self, k: usize, y: f64) -> bool {
        match self.slot(k) {
            Some(i) => frac(y - self.starts[i]) < self.lengths[i],
            None => false,
        }
    }

    /// Frequencies `k <= limit` whose interval contains `y`, increasing.
    pub fn covering(&self, y: f64, limit: usize) -> Vec<usize> {
        (self.spec.k_start..=self.spec.n_terms.min(limit)).filter(|&k| self.covers(k, y)).collect()
    }

    /// Length of `J_k` inside `[a, b]`, for `0 <= a <= b <= 1`.
    pub fn overlap(&self, k: usize, a: f64, b: f64) -> f64 {
        let Some(i) = self.slot(k) else { return 0.0 };
        let (s, len) = (self.starts[i], self.lengths[i]);
        let piece = |lo: f64, hi: f64| (hi.min(b) - lo.max(a)).max(0.0);
        if s + len <= 1.0 {
            piece(s, s + len)
        } else {
            piece(s, 1.0) + piece(0.0, s + len - 1.0)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if !(0.0..=2.0 * PI).contains(&x) || !(0.0..=1.0).contains(&y) {
            return 0.0;
        }
        self.covering(y, usize::MAX).iter().map(|&k| self.coefficient(k) * (k as f64 * x).sin()).sum()
    }

    /// `||f||_2^2 = pi sum_k k^{-2 alpha - 1}`.
    pub fn l2_norm_sq(&self) -> f64 {
        let s = 2.0 * self.spec.alpha + 1.0;
        PI * (self.spec.k_start..=self.spec.n_terms).map(|k| (k as f64).powf(-s)).sum::<f64>()
    }

    /// Squared `L^2` norm of the discarded terms `k > N`, by the midpoint tail integral.
    pub fn tail_l2_sq(&self) -> f64 {
        let a = self.spec.alpha;
        PI * (self.spec.n_terms as f64 + 0.5).powf(-2.0 * a) / (2.0 * a)
    }

    /// Samples on a 2D Lebesgue grid with axis 0 for `x` and axis 1 for `y`; the
    /// `y`-indicators are averaged over each grid cell.
    pub fn to_grid(&self, grid: &Grid) -> Result<GridFunction> {
        if grid.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
        }
        let (ax, ay) = (grid.axis(0), grid.axis(1));
        let dy = ay.step();
        let mut samples = vec![0.0; grid.len()];
        let xs: Vec<f64> = ax.coords();
        for k in self.spec.k_start..=self.spec.n_terms {
            let i = k - self.spec.k_start;
            let c = self.coefficient(k);
            let (s, len) = (self.starts[i], self.lengths[i]);
            // Rows whose cells can meet J_k (possibly wrapped).
            let pieces = if s + len <= 1.0 { [(s, s + len), (0.0, 0.0)] } else { [(s, 1.0), (0.0, s + len - 1.0)] };
            for (lo, hi) in pieces {
                if hi <= lo {
                    continue;
                }
                let j0 = (ay.frac_index(lo) - 1.0).floor().max(0.0) as usize;
                let j1 = ((ay.frac_index(hi) + 1.0).ceil().max(0.0) as usize).min(ay.n - 1);
                for j in j0..=j1 {
                    let y = ay.coord(j);
                    let a = (y - 0.5 * dy).max(0.0).max(lo);
                    let b = (y + 0.5 * dy).min(1.0).min(hi);
                    let frac = (b - a).max(0.0) / dy;
                    if frac == 0.0 {
                        continue;
                    }
                    for (xi, &x) in xs.iter().enumerate() {
                        if (0.0..=2.0 * PI).contains(&x) {
                            samples[xi * ay.n + j] += c * frac * (k as f64 * x).sin();
                        }
                    }
                }
            }
        }
        GridFunction::new(grid.clone(), Measure::Lebesgue, samples)
    }
}

fn fft_len(k_max: usize, n_terms: usize) -> usize {
    (8 * k_max).max(4 * n_terms).max(64).next_power_of_two()
}

/// `int_0^{2 pi} g(x) sin(k x) dx` for `k = 1..=k_max` from `m` periodic samples of `g`.
fn sine_coefficients(samples: Vec<f64>, k_max: usize) -> Result<Vec<f64>> {
    let m = samples.len();
    let mut re = samples;
    let mut im = vec![0.0; m];
    fft(&mut re, &mut im, false)?;
    let h = 2.0 * PI / m as f64;
    Ok((1..=k_max).map(|k| -h * im[k]).collect())
}

/// `a_k(y) = int_0^{2 pi} f(x, y) sin(k x) dx` for `k = 1..=k_max` (entry `k - 1`).
pub fn slice_coefficients(ce: &Counterexample, y: f64, k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter { name: "k_max", value: 0.0 });
    }
    let m = fft_len(k_max, ce.spec.n_terms);
    let covering = ce.covering(y, usize::MAX);
    let samples = (0..m)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / m as f64;
            covering.iter().map(|&k| ce.coefficient(k) * (k as f64 * x).sin()).sum()
        })
        .collect();
    sine_coefficients(samples, k_max)
}

/// Sine coefficients of the grid row nearest to `y`, by the trapezoid rule over `[0, 2 pi]`.
pub fn slice_coefficients_grid(f: &GridFunction, y: f64, k_max: usize) -> Result<Vec<f64>> {
    f.require_dim(2)?;
    let (ax, ay) = (f.grid().axis(0), f.grid().axis(1));
    let j = ay.frac_index(y).round().clamp(0.0, (ay.n - 1) as f64) as usize;
    let dx = ax.step();
    let mut out = vec![0.0; k_max];
    for i in 0..ax.n {
        let x = ax.coord(i);
        if !(-1e-12..=2.0 * PI + 1e-12).contains(&x) {
            continue;
        }
        let v = f.samples()[i * ay.n + j] * dx;
        for (k, o) in out.iter_mut().enumerate() {
            *o += v * ((k + 1) as f64 * x).sin();
        }
    }
    Ok(out)
}

/// `max_{k <= k_max} k^alpha a_k(y)` and its maximiser.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlowupProfile {
    pub y: f64,
    pub value: f64,
    pub argmax_k: usize,
}

pub fn slice_blowup_profile(ce: &Counterexample, y: f64, k_max: usize) -> Result<BlowupProfile> {
    let a = slice_coefficients(ce, y, k_max)?;
    let mut best = BlowupProfile { y, value: 0.0, argmax_k: 0 };
    for (i, &ak) in a.iter().enumerate() {
        let k = i + 1;
        let v = (k as f64).powf(ce.spec.alpha) * ak;
        if v > best.value {
            best = BlowupProfile { y, value: v, argmax_k: k };
        }
    }
    Ok(best)
}

/// Profile in `x` for separable test functions `phi(x, y) = a(x) b(y)` on `[0, 2 pi]`.
pub struct XProfile {
    pub label: String,
    pub value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// Profile in `y`, supported in `[lo, hi] ⊂ [0, 1]`.
pub struct YProfile {
    pub label: String,
    pub value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lo: f64,
    pub hi: f64,
}

/// Separable test functions for [`directional_bound_scan`].
pub struct TestFamily {
    pub x: Vec<XProfile>,
    pub y: Vec<YProfile>,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

fn bump_deriv(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - u * u;
        bump(u) * (-2.0 * u / (d * d))
    }
}

impl TestFamily {
    /// Smooth bumps on `[0, 2 pi]` modulated by `cos(w x)` and `sin(w x)` for the listed
    /// frequencies, times `1` or smooth bumps on dyadic subintervals of `[0, 1]` of depth up to `depth`.
    pub fn standard(freqs: &[f64], depth: u32) -> Self {
        let mut x = Vec::new();
        for &w in freqs {
            for phase in [0.0, 0.5 * PI] {
                if w == 0.0 && phase != 0.0 {
                    continue;
                }
                let value = move |t: f64| bump((t - PI) / PI) * (w * t + phase).cos();
                let derivative = move |t: f64| {
                    let u = (t - PI) / PI;
                    bump_deriv(u) / PI * (w * t + phase).cos() - w * bump(u) * (w * t + phase).sin()
                };
                x.push(XProfile {
                    label: alloc::format!("bump*cos({w}x+{phase:.3})"),
                    value: Box::new(value),
                    derivative: Box::new(derivative),
                });
            }
        }
        let mut y = vec![YProfile { label: "one".into(), value: Box::new(|_| 1.0), lo: 0.0, hi: 1.0 }];
        for level in 1..=depth {
            let cells = 1usize << level;
            for j in 0..cells {
                let lo = j as f64 / cells as f64;
                let hi = (j + 1) as f64 / cells as f64;
                let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                y.push(YProfile {
                    label: alloc::format!("bump[{lo},{hi}]"),
                    value: Box::new(move |t| bump((t - c) / r)),
                    lo,
                    hi,
                });
            }
        }
        TestFamily { x, y }
    }
}

/// Largest separable quotient found for one truncation level.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub n_terms: usize,
    pub max_quotient: f64,
    pub best_x: String,
    pub best_y: String,
}

/// `sup |int d_x phi f| / (||phi||_inf^alpha ||d_x phi||_inf^{1 - alpha})` over the family, for
/// each truncation level in `n_list`.
pub fn directional_bound_scan(
    alpha: f64,
    k_start: usize,
    family: &TestFamily,
    n_list: &[usize],
) -> Result<Vec<ScanRow>> {
    let n_max = *n_list.iter().max().ok_or(Error::InvalidParameter { name: "n_list length", value: 0.0 })?;
    let ce = Counterexample::new(CounterexampleSpec::new(alpha, n_max, k_start)?)?;
    let m = fft_len(64, n_max).max(8192);
    // x-side: sine coefficients of a' and sup norms.
    let xs: Vec<(Vec<f64>, f64, f64)> = family
        .x
        .iter()
        .map(|p| {
            let pts: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
            let d: Vec<f64> = pts.iter().map(|&t| (p.derivative)(t)).collect();
            let sup_a = pts.iter().map(|&t| (p.value)(t).abs()).fold(0.0, f64::max);
            let sup_d = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
            Ok((sine_coefficients(d, n_max)?, sup_a, sup_d))
        })
        .collect::<Result<_>>()?;
    // y-side: integrals of b over each J_k and sup norms.
    let ys: Vec<(Vec<f64>, f64)> = family
        .y
        .iter()
        .map(|p| {
            let b: Vec<f64> = (k_start..=n_max)
                .map(|k| {
                    let i = k - k_start;
                    let (s, len) = (ce.starts[i], ce.lengths[i]);
                    let pieces = if s + len <= 1.0 { [(s, s + len), (0.0, 0.0)] } else { [(s, 1.0), (0.0, s + len - 1.0)] };
                    pieces
                        .iter()
                        .map(|&(lo, hi)| {
                            let (a, b) = (lo.max(p.lo), hi.min(p.hi));
                            if b > a { adaptive_simpson(|t| (p.value)(t), a, b, 1e-14 * (b - a)) } else { 0.0 }
                        })
                        .sum()
                })
                .collect();
            let sup = (0..=4096).map(|j| (p.value)(p.lo + (p.hi - p.lo) * j as f64 / 4096.0).abs()).fold(0.0, f64::max);
            (b, sup)
        })
        .collect();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut best = ScanRow { n_terms: n, max_quotient: 0.0, best_x: String::new(), best_y: String::new() };
        for (px, (a, sup_a, sup_d)) in family.x.iter().zip(&xs) {
            for (py, (b, sup_b)) in family.y.iter().zip(&ys) {
                let den = sup_a.powf(alpha) * sup_d.powf(1.0 - alpha) * sup_b;
                if den == 0.0 {
                    continue;
                }
                let num: f64 = (k_start..=n).map(|k| ce.coefficient(k) * a[k - 1] * b[k - k_start]).sum();
                let q = num.abs() / den;
                if q > best.max_quotient {
                    best.max_quotient = q;
                    best.best_x = px.label.clone();
                    best.best_y = py.label.clone();
                }
            }
        }
        rows.push(best);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_and_lengths() {
        let ce = Counterexample::new(CounterexampleSpec::new(0.5, 10_000, 2).unwrap()).unwrap();
        let total: f64 = ce.lengths.iter().sum();
        assert!((total - 3.0150).abs() < 1e-3, "{total}");
        for j in 0..1000 {
            let y = (j as f64 + 0.5) / 1000.0;
            assert!(ce.covering(y, usize::MAX).len() >= 3);
        }
    }

    #[test]
    fn slice_profile_matches_largest_cover() {
        let ce = Counterexample::new(CounterexampleSpec::new(0.5, 200, 2).unwrap()).unwrap();
        for &y in &[0.1, 0.37, 0.9] {
            let prof = slice_blowup_profile(&ce, y, 512).unwrap();
            let kstar = *ce.covering(y, 512).last().unwrap();
            let exact = PI * (kstar as f64).ln().sqrt();
            assert_eq!(prof.argmax_k, kstar);
            assert!((prof.value - exact).abs() < 1e-9 * exact);
        }
    }

    #[test]
    fn single_term_closed_form() {
        let family = TestFamily {
            x: vec![XProfile {
                label: "-cos(2x)/2".into(),
                value: Box::new(|t| -(2.0 * t).cos() / 2.0),
                derivative: Box::new(|t| (2.0 * t).sin()),
            }],
            y: vec![YProfile { label: "one".into(), value: Box::new(|_| 1.0), lo: 0.0, hi: 1.0 }],
        };
        let rows = directional_bound_scan(0.5, 2, &family, &[2]).unwrap();
        let exact = PI / (2.0 * 2f64.ln().sqrt());
        assert!((rows[0].max_quotient - exact).abs() < 1e-9, "{}", rows[0].max_quotient);
    }

    #[test]
    fn grid_norm_matches_series() {
        let ce = Counterexample::new(CounterexampleSpec::new(0.5, 32, 2).unwrap()).unwrap();
        let grid = Grid::new(vec![
            crate::Axis::new(0.0, 2.0 * PI, 1025).unwrap(),
            crate::Axis::new(0.0, 1.0, 2049).unwrap(),
        ])
        .unwrap();
        let f = ce.to_grid(&grid).unwrap();
        let n2 = f.lp_norm(2.0).unwrap().powi(2);
        assert!((n2 - ce.l2_norm_sq()).abs() < 0.01 * ce.l2_norm_sq(), "{n2} {}", ce.l2_norm_sq());
        let a = slice_coefficients_grid(&f, 0.3, 40).unwrap();
        let exact = slice_coefficients(&ce, 0.3, 40).unwrap();
        for k in 0..40 {
            assert!((a[k] - exact[k]).abs() < 0.05, "{k} {} {}", a[k], exact[k]);
        }
    }
}
