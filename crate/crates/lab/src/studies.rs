//! Counterexample and measure studies assembled from the core estimators.

use std::f64::consts::PI;

use besov_core::counterexample::{
    directional_bound_scan, slice_blowup_profile, slice_coefficients_grid, Counterexample, CounterexampleSpec,
    ScanRow, TestFamily,
};
use besov_core::grid::Direction;
use besov_core::math::{log_spaced, normal_cdf};
use besov_core::measure::{
    chaining_check, conditional_slices, holder_profile, metric_axioms_check, shift_variation, ChainingReport,
    GridMeasure, HolderFit, MetricReport,
};
use besov_core::{Axis, Grid, GridFunction, Measure};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;

/// Blow-up profile of one slice at one truncation level.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub y: f64,
    pub n_terms: usize,
    pub value: f64,
    pub argmax_k: usize,
    /// `pi sqrt(ln k*)` for the largest covering frequency `k*`.
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Growth {
    pub from_terms: usize,
    pub to_terms: usize,
    /// Slices whose profile strictly increased.
    pub increased: usize,
    pub total: usize,
}

/// Slice profiles computed from the sampled 2D grid against the exact coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct GridCheck {
    pub n_terms: usize,
    pub nx: usize,
    pub ny: usize,
    pub k_max: usize,
    pub max_relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub k_start: usize,
    pub n_terms: Vec<usize>,
    pub profiles: Vec<ProfileRow>,
    pub max_profile_error: f64,
    pub growth: Option<Growth>,
    pub scan: Vec<ScanRow>,
    /// `|q(N_last) - q(N_first)| / q(N_first)` for the directional scan.
    pub scan_relative_change: f64,
    pub grid_check: GridCheck,
}

pub fn sample_ys(count: usize) -> Vec<f64> {
    (0..count).map(|i| (i as f64 + 0.5) / count as f64).collect()
}

pub fn counterexample_study(cfg: &RunConfig) -> Result<CounterexampleReport> {
    let mut terms = cfg.ce_terms.clone();
    terms.sort_unstable();
    terms.dedup();
    let ys = sample_ys(cfg.ce_y_samples);
    let mut profiles = Vec::new();
    for &n in &terms {
        let ce = Counterexample::new(CounterexampleSpec::new(cfg.ce_alpha, n, cfg.ce_k_start)?)?;
        let rows: Vec<Result<ProfileRow>> = ys
            .par_iter()
            .map(|&y| {
                let p = slice_blowup_profile(&ce, y, n)?;
                let predicted = if p.argmax_k >= 2 { PI * (p.argmax_k as f64).ln().sqrt() } else { 0.0 };
                let relative_error = if predicted > 0.0 { (p.value - predicted).abs() / predicted } else { 1.0 };
                Ok(ProfileRow { y, n_terms: n, value: p.value, argmax_k: p.argmax_k, predicted, relative_error })
            })
            .collect();
        for r in rows {
            profiles.push(r?);
        }
    }
    let max_profile_error = profiles.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    let growth = (terms.len() >= 2).then(|| {
        let (a, b) = (terms[0], terms[terms.len() - 1]);
        let at = |n: usize| profiles.iter().filter(move |r| r.n_terms == n);
        let increased = at(a).zip(at(b)).filter(|(lo, hi)| hi.value > lo.value * (1.0 + 1e-12)).count();
        Growth { from_terms: a, to_terms: b, increased, total: ys.len() }
    });
    let family = TestFamily::standard(&cfg.ce_freqs, cfg.ce_depth);
    let scan = directional_bound_scan(cfg.ce_alpha, cfg.ce_k_start, &family, &terms)?;
    let scan_relative_change = match (scan.first(), scan.last()) {
        (Some(a), Some(b)) if a.max_quotient > 0.0 => (b.max_quotient - a.max_quotient).abs() / a.max_quotient,
        _ => 0.0,
    };
    let grid_check = counterexample_grid_check(cfg, terms[0])?;
    Ok(CounterexampleReport {
        alpha: cfg.ce_alpha,
        k_start: cfg.ce_k_start,
        n_terms: terms,
        profiles,
        max_profile_error,
        growth,
        scan,
        scan_relative_change,
        grid_check,
    })
}

fn counterexample_grid_check(cfg: &RunConfig, n_terms: usize) -> Result<GridCheck> {
    let ce = Counterexample::new(CounterexampleSpec::new(cfg.ce_alpha, n_terms, cfg.ce_k_start)?)?;
    let grid = Grid::new(vec![Axis::new(0.0, 2.0 * PI, cfg.ce_grid_nx)?, Axis::new(0.0, 1.0, cfg.ce_grid_ny)?])?;
    let f = ce.to_grid(&grid)?;
    let k_max = ((cfg.ce_grid_nx - 1) / 4).clamp(1, n_terms);
    let ny = cfg.ce_grid_ny;
    // Interior rows whose cell no interval endpoint crosses compare exactly.
    let dy = 1.0 / (ny - 1) as f64;
    let rows: Vec<usize> = (1..ny - 1).step_by(((ny - 2) / 8).max(1)).collect();
    let mut worst: f64 = 0.0;
    for j in rows {
        let y = j as f64 * dy;
        let clean = (cfg.ce_k_start..=n_terms).all(|k| {
            let a = ce.covers(k, y - 0.5 * dy);
            a == ce.covers(k, y) && a == ce.covers(k, y + 0.5 * dy)
        });
        if !clean {
            continue;
        }
        let from_grid = slice_coefficients_grid(&f, y, k_max)?;
        let exact = slice_blowup_profile(&ce, y, k_max)?;
        let grid_value = from_grid
            .iter()
            .enumerate()
            .map(|(i, a)| ((i + 1) as f64).powf(cfg.ce_alpha) * a)
            .fold(0.0, f64::max);
        if exact.value > 0.0 {
            worst = worst.max((grid_value - exact.value).abs() / exact.value);
        }
    }
    Ok(GridCheck { n_terms, nx: cfg.ce_grid_nx, ny, k_max, max_relative_deviation: worst })
}

/// Shifted-Gaussian total variation against `2 (2 Phi(t/2) - 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct TvRow {
    pub t: f64,
    pub grid: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderSummary {
    pub fit: HolderFit,
    pub t: Vec<f64>,
    pub tv: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainingSummary {
    pub measure: String,
    pub report: ChainingReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub tv: Vec<TvRow>,
    pub max_tv_error: f64,
    pub holder: HolderSummary,
    pub metric: MetricReport,
    pub chaining: Vec<ChainingSummary>,
}

/// Density `1 + eps f` of the counterexample on `[0, 2 pi] x [0, 1]`, with `eps` keeping it
/// at least one half.
pub fn counterexample_measure(cfg: &RunConfig, nx: usize, ny: usize, n_terms: usize) -> Result<GridMeasure> {
    let ce = Counterexample::new(CounterexampleSpec::new(cfg.ce_alpha, n_terms, cfg.ce_k_start)?)?;
    let grid = Grid::new(vec![Axis::new(0.0, 2.0 * PI, nx)?, Axis::new(0.0, 1.0, ny)?])?;
    let f = ce.to_grid(&grid)?;
    let eps = 0.5 / f.max_abs().max(1e-300);
    let density = GridFunction::new(grid, Measure::Lebesgue, f.samples().iter().map(|v| 1.0 + eps * v).collect())?;
    Ok(GridMeasure::from_grid_function(&density)?)
}

pub fn measure_study(cfg: &RunConfig) -> Result<MeasureReport> {
    let mu = GridMeasure::gaussian(Grid::line(-8.0, 8.0, cfg.measure_n)?)?;
    let tv: Vec<TvRow> = [0.05, 0.1, 0.3, 1.0, 2.0]
        .iter()
        .map(|&t| {
            Ok(TvRow { t, grid: shift_variation(&mu, &[1.0], t)?, exact: 2.0 * (2.0 * normal_cdf(t / 2.0) - 1.0) })
        })
        .collect::<Result<_>>()?;
    let max_tv_error = tv.iter().map(|r| (r.grid - r.exact).abs()).fold(0.0, f64::max);
    let ts = log_spaced(1e-3, 0.1, 24)?;
    let (curve, fit) = holder_profile(&mu, &Direction::axis(1, 0), &ts)?;
    let holder = HolderSummary { fit, t: curve.t.clone(), tv: curve.values.clone() };

    let mu2 = GridMeasure::gaussian(Grid::square(-6.0, 6.0, 97)?)?;
    let pts = vec![vec![0.0, 0.0], vec![0.3, -0.2], vec![-0.5, 0.4], vec![0.1, 0.7]];
    let metric = metric_axioms_check(&mu2, &pts, 0.5, &log_spaced(0.05, 1.0, 8)?, 0.02)?;

    let product = GridMeasure::from_density(
        Grid::new(vec![Axis::new(-4.0, 4.0, 1025)?, Axis::new(0.0, 1.0, 9)?])?,
        |x| besov_core::math::normal_pdf(x[0]) * (1.0 + x[1]),
    )?;
    let ce_mu = counterexample_measure(cfg, 1025, 33, 1000)?;
    let samples = log_spaced(2f64.powi(-(cfg.chaining_depth as i32)), 1.0, 32)?;
    let mut chaining = Vec::new();
    for (label, m) in [("gaussian-product", &product), ("counterexample-density", &ce_mu)] {
        let slices = conditional_slices(m, 0)?;
        for &beta in &cfg.beta {
            let report = chaining_check(&slices, beta, cfg.chaining_depth, &samples, 1e-9)?;
            chaining.push(ChainingSummary { measure: label.to_string(), report });
        }
    }
    Ok(MeasureReport { tv, max_tv_error, holder, metric, chaining })
}
