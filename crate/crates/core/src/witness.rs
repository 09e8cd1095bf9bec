//! Divergence-quotient witnesses: lower bounds for the variation functional
//! `sup int div(Phi) f / (||Phi||_q^alpha ||div Phi||_q^{1-alpha})`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{
    check_exponent, dual_exponent, partial_samples, shift_samples, weighted_norm, Direction, Grid, GridFunction,
    Measure, VectorFieldGrid,
};
use crate::heat::{check_alpha, heat_smooth, smooth_samples};
use crate::ou::OuEngine;
use crate::seminorm::{besov_scan, besov_seminorm, ShiftGrid};
use crate::{Error, Result};

/// Divergence norms at or below this are rejected.
pub const MIN_DIVERGENCE_NORM: f64 = 1e-10;

/// Test object paired with a function in a quotient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TestObject {
    /// Vector field `Phi`, paired through its divergence.
    Field(VectorFieldGrid),
    /// Scalar `phi` paired through `d/de phi`.
    Directional { phi: GridFunction, direction: Direction },
}

impl TestObject {
    pub fn grid(&self) -> &Grid {
        match self {
            TestObject::Field(v) => v.grid(),
            TestObject::Directional { phi, .. } => phi.grid(),
        }
    }

    pub fn negated(&self) -> Self {
        match self {
            TestObject::Field(v) => TestObject::Field(v.scaled(-1.0)),
            TestObject::Directional { phi, direction } => {
                TestObject::Directional { phi: phi.scaled(-1.0), direction: direction.clone() }
            }
        }
    }

    /// Component samples of the equivalent vector field.
    fn field_samples(&self) -> Vec<Vec<f64>> {
        match self {
            TestObject::Field(v) => v.components().iter().map(|c| c.samples().to_vec()).collect(),
            TestObject::Directional { phi, direction } => direction
                .components()
                .iter()
                .map(|&c| phi.samples().iter().map(|v| c * v).collect())
                .collect(),
        }
    }
}

/// How a witness was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Construction {
    Supplied,
    /// Integrated dual of a shift difference.
    ShiftDual,
    /// Dual of a smoothed gradient.
    SemigroupGradient,
    ConstantField,
    RandomFourier,
}

/// A test object together with the quotient it achieves.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuotientWitness {
    /// Sign-normalised so that the numerator is non-negative.
    pub test: TestObject,
    pub quotient: f64,
    pub numerator: f64,
    pub norm_field: f64,
    pub norm_div: f64,
    pub p: f64,
    pub alpha: f64,
    pub construction: Construction,
    /// Shift used by a shift-dual construction.
    pub shift: Option<Vec<f64>>,
}

/// Evaluates quotients for raw field samples against a fixed function.
struct Pairing<'a> {
    f: &'a GridFunction,
    weights: Vec<f64>,
    q: f64,
    alpha: f64,
}

struct Parts {
    numerator: f64,
    norm_field: f64,
    norm_div: f64,
}

impl Parts {
    fn quotient(&self, alpha: f64) -> f64 {
        if self.norm_div <= MIN_DIVERGENCE_NORM {
            return 0.0;
        }
        self.numerator.abs() / (self.norm_field.powf(alpha) * self.norm_div.powf(1.0 - alpha))
    }
}

impl<'a> Pairing<'a> {
    fn new(f: &'a GridFunction, p: f64, alpha: f64) -> Result<Self> {
        let q = dual_exponent(p)?;
        check_alpha(alpha)?;
        Ok(Pairing { f, weights: f.weights(), q, alpha })
    }

    /// Divergence matching the measure of `f`.
    fn divergence(&self, comps: &[Vec<f64>]) -> Vec<f64> {
        let grid = self.f.grid();
        let mut div = vec![0.0; grid.len()];
        for (k, c) in comps.iter().enumerate() {
            let d = partial_samples(grid, c, k);
            div.iter_mut().zip(&d).for_each(|(a, v)| *a += v);
        }
        if self.f.measure() == Measure::Gaussian {
            for (i, dv) in div.iter_mut().enumerate() {
                let x = grid.point(i);
                for (k, c) in comps.iter().enumerate() {
                    *dv -= x[k] * c[i];
                }
            }
        }
        div
    }

    fn parts_with_div(&self, comps: &[Vec<f64>], div: &[f64]) -> Parts {
        let numerator = div.iter().zip(self.f.samples()).zip(&self.weights).map(|((d, v), w)| d * v * w).sum();
        let n = self.weights.len();
        let mag: Vec<f64> = (0..n).map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()).collect();
        Parts {
            numerator,
            norm_field: weighted_norm(&mag, &self.weights, self.q),
            norm_div: weighted_norm(div, &self.weights, self.q),
        }
    }

    fn parts(&self, comps: &[Vec<f64>]) -> Parts {
        let div = self.divergence(comps);
        self.parts_with_div(comps, &div)
    }
}

/// Quotient of `f` against a test object; the object is flipped if the pairing is negative.
pub fn v_quotient(f: &GridFunction, test: &TestObject, p: f64, alpha: f64) -> Result<QuotientWitness> {
    check_exponent(p)?;
    if test.grid() != f.grid() {
        return Err(Error::InvalidGrid("test object and function live on different grids"));
    }
    if let TestObject::Directional { direction, .. } = test {
        if direction.dim() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: direction.dim() });
        }
    }
    let pairing = Pairing::new(f, p, alpha)?;
    let comps = test.field_samples();
    let parts = pairing.parts(&comps);
    if !(parts.norm_div > MIN_DIVERGENCE_NORM) {
        return Err(Error::VanishingDivergence(parts.norm_div));
    }
    let (test, numerator) = if parts.numerator < 0.0 {
        (test.negated(), -parts.numerator)
    } else {
        (test.clone(), parts.numerator)
    };
    Ok(QuotientWitness {
        test,
        quotient: parts.quotient(alpha),
        numerator,
        norm_field: parts.norm_field,
        norm_div: parts.norm_div,
        p,
        alpha,
        construction: Construction::Supplied,
        shift: None,
    })
}

/// Integrated dual test function for the shift `h`: with `g = f_h - f` and `phi` the
/// mollified dual of `g`, returns `psi(x) = int_0^{|h|} phi(x + s e) ds` as the field `e psi`.
pub fn psi_construction(f: &GridFunction, h: &[f64], p: f64) -> Result<TestObject> {
    psi_with_smoothing(f, h, p, 2.0 * f.grid().min_step())
}

fn psi_with_smoothing(f: &GridFunction, h: &[f64], p: f64, sigma: f64) -> Result<TestObject> {
    f.require_measure(Measure::Lebesgue)?;
    check_exponent(p)?;
    let grid = f.grid();
    let len = h.iter().map(|c| c * c).sum::<f64>().sqrt();
    let e = Direction::new(h.to_vec())?;
    let g = crate::grid::shift(f, h)?.sub(f)?;
    let w = f.weights();
    let gn = weighted_norm(g.samples(), &w, p);
    if gn == 0.0 {
        return Err(Error::VanishingDivergence(0.0));
    }
    let phi_raw: Vec<f64> = g
        .samples()
        .iter()
        .map(|&v| {
            if p == 1.0 {
                if v == 0.0 { 0.0 } else { v.signum() }
            } else if p.is_infinite() {
                0.0
            } else {
                v.signum() * (v.abs() / gn).powf(p - 1.0)
            }
        })
        .collect();
    let phi_raw = if p.is_infinite() {
        // Point mass at the maximiser, spread over one cell.
        let k = g.samples().iter().enumerate().fold(0, |b, (i, v)| if v.abs() > g.samples()[b].abs() { i } else { b });
        let mut v = vec![0.0; g.samples().len()];
        v[k] = g.samples()[k].signum() / w[k];
        v
    } else {
        phi_raw
    };
    let q = dual_exponent(p)?;
    let mut phi = if sigma > 0.0 { smooth_samples(grid, &phi_raw, sigma) } else { phi_raw };
    let pn = weighted_norm(&phi, &w, q);
    if q.is_infinite() {
        phi.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
    } else if pn > 1.0 {
        phi.iter_mut().for_each(|v| *v /= pn);
    }
    let psi = line_integral(grid, &phi, &e, len);
    Ok(TestObject::Field(VectorFieldGrid::along(&f.with_samples_unchecked(psi), &e)?))
}

/// `int_0^len phi(x + s e) ds` at every node, zero extension outside the grid.
fn line_integral(grid: &Grid, phi: &[f64], e: &Direction, len: f64) -> Vec<f64> {
    let comps = e.components();
    let axis_aligned = comps.iter().filter(|c| c.abs() > 1e-14).count() == 1;
    if axis_aligned {
        let k = comps.iter().position(|c| c.abs() > 1e-14).unwrap_or(0);
        let sign = comps[k].signum();
        let ax = grid.axis(k);
        let n = ax.n;
        let dx = ax.step();
        let mut out = vec![0.0; phi.len()];
        let (starts, stride) = grid.lines(k);
        let mut cum = vec![0.0; n];
        for s in starts {
            for i in 1..n {
                cum[i] = cum[i - 1] + 0.5 * dx * (phi[s + (i - 1) * stride] + phi[s + i * stride]);
            }
            let at = |u: f64| -> f64 {
                if u <= 0.0 {
                    0.0
                } else if u >= (n - 1) as f64 {
                    cum[n - 1]
                } else {
                    let j = u.floor() as usize;
                    let t = u - j as f64;
                    (1.0 - t) * cum[j] + t * cum[j + 1]
                }
            };
            let off = len / dx;
            for i in 0..n {
                let u = i as f64;
                out[s + i * stride] = if sign > 0.0 { at(u + off) - at(u) } else { at(u) - at(u - off) };
            }
        }
        return out;
    }
    let steps = ((2.0 * len / grid.min_step()).ceil() as usize).clamp(8, 4096);
    let ds = len / steps as f64;
    let mut out = vec![0.0; phi.len()];
    for j in 0..=steps {
        let s = j as f64 * ds;
        let wt = if j == 0 || j == steps { 0.5 * ds } else { ds };
        // phi(x + s e) is the translate by -s e.
        let sh = shift_samples(grid, phi, &e.scaled(-s));
        out.iter_mut().zip(&sh).for_each(|(o, v)| *o += wt * v);
    }
    out
}

/// Parameters of [`v_lower_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSearch {
    /// Coordinate ascent stops after this many sweeps without improvement.
    pub budget: usize,
    pub seed: u64,
    /// Trigonometric modes per axis for the random search.
    pub modes: usize,
    /// Number of best scan shifts that receive a shift-dual witness.
    pub shift_candidates: usize,
    /// Smoothing times for semigroup-gradient witnesses.
    pub smoothing_times: Vec<f64>,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        WitnessSearch {
            budget: 3,
            seed: 0x5eed,
            modes: 6,
            shift_candidates: 8,
            smoothing_times: vec![1e-3, 1e-2, 0.1, 1.0],
        }
    }
}

/// `|G|^{p-2} G` pointwise, the field that saturates the pairing with `G` in `L^p`.
fn dual_field(comps: &[Vec<f64>], p: f64) -> Vec<Vec<f64>> {
    let n = comps[0].len();
    let mut out = vec![vec![0.0; n]; comps.len()];
    for i in 0..n {
        let m = comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt();
        if m == 0.0 {
            continue;
        }
        let s = if p.is_infinite() { 1.0 } else { m.powf(p - 2.0) };
        for (o, c) in out.iter_mut().zip(comps) {
            o[i] = s * c[i];
        }
    }
    out
}

fn field_from(f: &GridFunction, comps: Vec<Vec<f64>>) -> Result<TestObject> {
    Ok(TestObject::Field(VectorFieldGrid::new(
        comps.into_iter().map(|c| f.with_samples_unchecked(c)).collect(),
    )?))
}

/// Smooth bump on `[-1, 1]`.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Random trigonometric fields improved by coordinate ascent on their coefficients.
fn random_search(f: &GridFunction, pairing: &Pairing, search: &WitnessSearch) -> Result<Option<Vec<Vec<f64>>>> {
    let grid = f.grid();
    let d = grid.dim();
    let n = grid.len();
    // Window and normalised coordinates per axis.
    let mut centre = [0.0; 2];
    let mut radius = [1.0; 2];
    let gaussian = f.measure() == Measure::Gaussian;
    for k in 0..d {
        let ax = grid.axis(k);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let tiny = 1e-12 * f.max_abs();
        for i in 0..n {
            if f.samples()[i].abs() > tiny {
                let x = grid.point(i)[k];
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if gaussian || !lo.is_finite() {
            lo = ax.lo;
            hi = ax.hi;
        } else {
            let margin = 0.25 * (hi - lo) + 4.0 * ax.step();
            lo = (lo - margin).max(ax.lo + 2.0 * ax.step());
            hi = (hi + margin).min(ax.hi - 2.0 * ax.step());
        }
        centre[k] = 0.5 * (lo + hi);
        radius[k] = (0.5 * (hi - lo)).max(ax.step());
    }
    let modes = if d == 1 { search.modes } else { search.modes.min(2) };
    // Scalar basis: products over axes of {1, cos(pi j u), sin(pi j u)}.
    let per_axis = 2 * modes + 1;
    let count = per_axis.pow(d as u32);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    for b in 0..count {
        let mut idx = [0usize; 2];
        idx[0] = b % per_axis;
        idx[1] = b / per_axis;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid.point(i);
                let mut acc = 1.0;
                for k in 0..d {
                    let u = (x[k] - centre[k]) / radius[k];
                    let j = idx[k];
                    let freq = core::f64::consts::PI * j.div_ceil(2) as f64;
                    acc *= if j == 0 {
                        1.0
                    } else if j % 2 == 1 {
                        (freq * u).cos()
                    } else {
                        (freq * u).sin()
                    };
                    if !gaussian {
                        acc *= bump(u);
                    }
                }
                acc
            })
            .collect();
        basis.push(v);
    }
    // Each coefficient multiplies one basis function in one component.
    let ncoef = count * d;
    let divs: Vec<Vec<f64>> = (0..ncoef)
        .map(|c| {
            let mut comps = vec![vec![0.0; n]; d];
            comps[c % d] = basis[c / d].clone();
            pairing.divergence(&comps)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut coef: Vec<f64> = (0..ncoef).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let assemble = |coef: &[f64]| {
        let mut comps = vec![vec![0.0; n]; d];
        let mut div = vec![0.0; n];
        for (c, &a) in coef.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            comps[c % d].iter_mut().zip(&basis[c / d]).for_each(|(o, v)| *o += a * v);
            div.iter_mut().zip(&divs[c]).for_each(|(o, v)| *o += a * v);
        }
        (comps, div)
    };
    let (mut comps, mut div) = assemble(&coef);
    let mut best = pairing.parts_with_div(&comps, &div).quotient(pairing.alpha);
    let mut step = 0.5;
    let mut idle = 0;
    let mut sweeps = 0;
    while idle < search.budget && sweeps < 200 {
        sweeps += 1;
        let mut improved = false;
        for c in 0..ncoef {
            for delta in [step, -step] {
                let comp = c % d;
                comps[comp].iter_mut().zip(&basis[c / d]).for_each(|(o, v)| *o += delta * v);
                div.iter_mut().zip(&divs[c]).for_each(|(o, v)| *o += delta * v);
                let val = pairing.parts_with_div(&comps, &div).quotient(pairing.alpha);
                if val > best * (1.0 + 1e-12) {
                    best = val;
                    coef[c] += delta;
                    improved = true;
                    break;
                }
                comps[comp].iter_mut().zip(&basis[c / d]).for_each(|(o, v)| *o -= delta * v);
                div.iter_mut().zip(&divs[c]).for_each(|(o, v)| *o -= delta * v);
            }
        }
        if !improved {
            idle += 1;
            step *= 0.5;
        }
    }
    let (comps, _) = assemble(&coef);
    Ok(if best > 0.0 { Some(comps) } else { None })
}

/// Best quotient over structured and searched test fields; a lower bound for the
/// variation functional of `f` on its grid.
pub fn v_lower_bound(f: &GridFunction, p: f64, alpha: f64, search: &WitnessSearch) -> Result<QuotientWitness> {
    check_exponent(p)?;
    let pairing = Pairing::new(f, p, alpha)?;
    let d = f.dim();
    let n = f.grid().len();
    let mut candidates: Vec<(TestObject, Construction, Option<Vec<f64>>)> = Vec::new();

    if f.measure() == Measure::Lebesgue {
        let shifts = ShiftGrid::for_function(f)?;
        let mut scan = besov_scan(f, p, alpha, &shifts)?;
        scan.sort_by(|a, b| b.quotient.total_cmp(&a.quotient));
        for s in scan.iter().take(search.shift_candidates) {
            if s.quotient > 0.0 {
                if let Ok(t) = psi_construction(f, &s.h, p) {
                    candidates.push((t, Construction::ShiftDual, Some(s.h.clone())));
                }
            }
        }
        let refined = besov_seminorm(f, p, alpha, &shifts)?;
        if refined.value > 0.0 {
            for sigma in [0.0, 2.0 * f.grid().min_step()] {
                if let Ok(t) = psi_with_smoothing(f, &refined.witness_h, p, sigma) {
                    candidates.push((t, Construction::ShiftDual, Some(refined.witness_h.clone())));
                }
            }
        }
        for &t in &search.smoothing_times {
            let (_, grad) = heat_smooth(f, t)?;
            let comps: Vec<Vec<f64>> = grad.components().iter().map(|c| c.samples().to_vec()).collect();
            candidates.push((field_from(f, dual_field(&comps, p))?, Construction::SemigroupGradient, None));
        }
    } else {
        for k in 0..d {
            let mut comps = vec![vec![0.0; n]; d];
            comps[k] = vec![1.0; n];
            candidates.push((field_from(f, comps)?, Construction::ConstantField, None));
        }
        let engine = OuEngine::new(64)?;
        for &t in &search.smoothing_times {
            let grad = engine.gradient(f, t)?;
            let comps: Vec<Vec<f64>> = grad.components().iter().map(|c| c.samples().to_vec()).collect();
            candidates.push((field_from(f, dual_field(&comps, p))?, Construction::SemigroupGradient, None));
        }
    }
    if let Some(comps) = random_search(f, &pairing, search)? {
        candidates.push((field_from(f, comps)?, Construction::RandomFourier, None));
    }

    let mut best: Option<QuotientWitness> = None;
    for (test, construction, shift) in candidates {
        let Ok(mut w) = v_quotient(f, &test, p, alpha) else { continue };
        w.construction = construction;
        w.shift = shift;
        if best.as_ref().is_none_or(|b| w.quotient > b.quotient) {
            best = Some(w);
        }
    }
    match best {
        Some(b) => Ok(b),
        None => {
            // Nothing pairs non-trivially (for instance f = 0): report a zero quotient.
            let grid = f.grid();
            let mut comps = vec![vec![0.0; n]; d];
            comps[0] = (0..n)
                .map(|i| {
                    let x = grid.point(i);
                    (0..d).map(|k| bump(x[k] / (0.4 * grid.axis(k).side()))).product()
                })
                .collect();
            let mut w = v_quotient(f, &field_from(f, comps)?, p, alpha)?;
            w.construction = Construction::Supplied;
            Ok(w)
        }
    }
}
