//! Inequality certificates: each entry compares a computed left side with a right side
//! built from grid estimates and explicit constants, with a slack measured by comparing
//! the grid with its 2x decimation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::corpus::CorpusFunction;
use crate::grid::{weighted_norm, Grid, GridFunction, Measure};
use crate::heat::{check_alpha, check_time_grid, refine_curve_sup, HeatCurves, SemigroupCurve};
use crate::math::log_spaced;
use crate::ou::{
    ct, embedding_constant, gaussian_abs_moment, shift_variation_constant, GaussianConstants, HermiteCoeffs,
    OuCurves, OuEngine,
};
use crate::seminorm::{besov_seminorm, kantorovich_norm_1d, BesovEstimate, ShiftGrid};
use crate::witness::{v_lower_bound, QuotientWitness, WitnessSearch};
use crate::{Error, Result};

/// How an entry's verdict should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Soundness {
    /// Grid estimates enter on the side that keeps a pass meaningful.
    Sound,
    /// Both sides are grid lower estimates; a failure is evidence against the inequality.
    Check,
    /// Reported for context only.
    Informative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Pass,
    Fail,
    Informative,
}

/// What an entry was computed from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntryInputs {
    pub function: String,
    pub measure: Measure,
    pub dim: usize,
    pub grid_n: usize,
    pub p: f64,
    pub alpha: f64,
    /// Time of the reported point on a semigroup curve.
    pub t: Option<f64>,
    /// Shift attaining a seminorm estimate.
    pub h: Option<Vec<f64>>,
    /// Constant multiplying the right side.
    pub constant: f64,
    /// Number of curve points checked, and how many passed.
    pub points: usize,
    pub points_passed: usize,
}

/// One inequality check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateEntry {
    pub name: String,
    /// The inequality in symbols.
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Slack applied to the right side, `measured_slack` clamped to `[floor, cap]`.
    pub slack: f64,
    pub measured_slack: f64,
    /// `rhs (1 + slack) - lhs`.
    pub margin: f64,
    pub pass: bool,
    pub verdict: Verdict,
    pub soundness: Soundness,
    pub inputs: EntryInputs,
}

impl CertificateEntry {
    /// Sort key: name, then function, exponent and smoothness.
    pub fn sort_key(&self) -> (String, String, u64, u64, u64) {
        (
            self.name.clone(),
            self.inputs.function.clone(),
            self.inputs.p.to_bits(),
            self.inputs.alpha.to_bits(),
            self.inputs.t.unwrap_or(0.0).to_bits(),
        )
    }
}

/// Sorts entries into their canonical order.
pub fn sort_entries(entries: &mut [CertificateEntry]) {
    entries.sort_by(|a, b| {
        a.name
            .cmp(&b.name)
            .then_with(|| a.inputs.function.cmp(&b.inputs.function))
            .then_with(|| a.inputs.p.total_cmp(&b.inputs.p))
            .then_with(|| a.inputs.alpha.total_cmp(&b.inputs.alpha))
            .then_with(|| a.inputs.t.unwrap_or(0.0).total_cmp(&b.inputs.t.unwrap_or(0.0)))
    });
}

/// Settings shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyConfig {
    pub exponents: Vec<f64>,
    pub alphas: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub search: WitnessSearch,
    pub slack_floor: f64,
    pub slack_cap: f64,
    pub ou_nodes: usize,
    /// Tolerance for the conditional-expectation commutation residual.
    pub commutation_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            exponents: vec![1.0, 2.0],
            alphas: vec![0.5, 1.0],
            t_grid: log_spaced(1e-4, 1e2, 64).expect("static time grid"),
            search: WitnessSearch::default(),
            slack_floor: 1e-4,
            slack_cap: 0.05,
            ou_nodes: crate::ou::DEFAULT_NODES,
            commutation_tol: 1e-6,
        }
    }
}

impl CertifyConfig {
    pub fn validate(&self) -> Result<()> {
        for &p in &self.exponents {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidExponent(p));
            }
        }
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        check_time_grid(&self.t_grid)?;
        if !(self.slack_floor >= 0.0 && self.slack_cap >= self.slack_floor) {
            return Err(Error::InvalidParameter { name: "slack bounds", value: self.slack_cap });
        }
        Ok(())
    }
}

/// A quantity computed on the grid and, when possible, on its decimation.
#[derive(Debug, Clone, Copy)]
struct Pair {
    fine: f64,
    coarse: Option<f64>,
}

impl Pair {
    fn rel_change(&self) -> f64 {
        match self.coarse {
            None => 0.0,
            Some(c) => {
                let d = (self.fine - c).abs();
                if d == 0.0 {
                    0.0
                } else {
                    d / self.fine.abs().max(c.abs()).max(1e-300)
                }
            }
        }
    }

    fn map2(self, other: Pair, f: impl Fn(f64, f64) -> f64) -> Pair {
        Pair {
            fine: f(self.fine, other.fine),
            coarse: match (self.coarse, other.coarse) {
                (Some(a), Some(b)) => Some(f(a, b)),
                _ => None,
            },
        }
    }

    fn scale(self, c: f64) -> Pair {
        Pair { fine: c * self.fine, coarse: self.coarse.map(|v| c * v) }
    }
}

struct Judged {
    slack: f64,
    measured: f64,
    margin: f64,
    pass: bool,
    verdict: Verdict,
}

fn judge(cfg: &CertifyConfig, soundness: Soundness, lhs: Pair, rhs: Pair) -> Judged {
    let measured = lhs.rel_change().max(rhs.rel_change());
    let slack = measured.clamp(cfg.slack_floor, cfg.slack_cap);
    let margin = rhs.fine * (1.0 + slack) - lhs.fine;
    let pass = margin >= 0.0;
    let verdict = match soundness {
        Soundness::Informative => Verdict::Informative,
        _ if pass => Verdict::Pass,
        _ if measured > cfg.slack_cap => Verdict::Informative,
        _ => Verdict::Fail,
    };
    Judged { slack, measured, margin, pass, verdict }
}

fn point_entry(
    cfg: &CertifyConfig,
    name: &str,
    statement: &str,
    soundness: Soundness,
    lhs: Pair,
    rhs: Pair,
    inputs: EntryInputs,
) -> CertificateEntry {
    let j = judge(cfg, soundness, lhs, rhs);
    CertificateEntry {
        name: name.to_string(),
        statement: statement.to_string(),
        lhs: lhs.fine,
        rhs: rhs.fine,
        slack: j.slack,
        measured_slack: j.measured,
        margin: j.margin,
        pass: j.pass,
        verdict: j.verdict,
        soundness,
        inputs: EntryInputs { points: 1, points_passed: usize::from(j.pass), ..inputs },
    }
}

/// One entry for a whole curve: reports the worst point, fails if any point fails.
fn curve_entry(
    cfg: &CertifyConfig,
    name: &str,
    statement: &str,
    soundness: Soundness,
    t: &[f64],
    lhs: &[Pair],
    rhs: &[Pair],
    inputs: EntryInputs,
) -> CertificateEntry {
    let judged: Vec<Judged> = lhs.iter().zip(rhs).map(|(l, r)| judge(cfg, soundness, *l, *r)).collect();
    let ratio = |i: usize| lhs[i].fine / (rhs[i].fine * (1.0 + judged[i].slack)).max(1e-300);
    let any_fail = judged.iter().any(|j| j.verdict == Verdict::Fail);
    let mut worst = None::<usize>;
    for i in 0..t.len() {
        if any_fail && judged[i].verdict != Verdict::Fail {
            continue;
        }
        if worst.is_none_or(|w| ratio(i) > ratio(w)) {
            worst = Some(i);
        }
    }
    let w = worst.unwrap_or(0);
    let verdict = if soundness == Soundness::Informative {
        Verdict::Informative
    } else if any_fail {
        Verdict::Fail
    } else if judged.iter().any(|j| j.verdict == Verdict::Informative) {
        Verdict::Informative
    } else {
        Verdict::Pass
    };
    let passed = judged.iter().filter(|j| j.pass).count();
    CertificateEntry {
        name: name.to_string(),
        statement: statement.to_string(),
        lhs: lhs[w].fine,
        rhs: rhs[w].fine,
        slack: judged[w].slack,
        measured_slack: judged[w].measured,
        margin: judged[w].margin,
        pass: passed == t.len(),
        verdict,
        soundness,
        inputs: EntryInputs { t: Some(t[w]), points: t.len(), points_passed: passed, ..inputs },
    }
}

fn inputs_for(label: &str, f: &GridFunction, p: f64, alpha: f64, constant: f64) -> EntryInputs {
    EntryInputs {
        function: label.to_string(),
        measure: f.measure(),
        dim: f.dim(),
        grid_n: f.grid().axis(0).n,
        p,
        alpha,
        t: None,
        h: None,
        constant,
        points: 0,
        points_passed: 0,
    }
}

fn u_grid(curve_row: &[f64], t: &[f64], alpha: f64) -> f64 {
    curve_row.iter().zip(t).map(|(g, t)| t.powf(0.5 * (1.0 - alpha)) * g).fold(0.0, f64::max)
}

/// Grid quantities of a Lebesgue-tagged function for every `(p, alpha)`.
struct LebesgueData {
    curves: HeatCurves,
    /// Indexed like `exponents x alphas`.
    seminorm: Vec<BesovEstimate>,
    witness: Vec<QuotientWitness>,
}

fn lebesgue_data(f: &GridFunction, cfg: &CertifyConfig) -> Result<LebesgueData> {
    let curves = HeatCurves::compute(f, &cfg.exponents, &cfg.t_grid)?;
    let shifts = ShiftGrid::for_function(f)?;
    let mut seminorm = Vec::new();
    let mut witness = Vec::new();
    for &p in &cfg.exponents {
        for &a in &cfg.alphas {
            seminorm.push(besov_seminorm(f, p, a, &shifts)?);
            witness.push(v_lower_bound(f, p, a, &cfg.search)?);
        }
    }
    Ok(LebesgueData { curves, seminorm, witness })
}

fn pick<T, U: Copy>(fine: &T, coarse: Option<&T>, get: impl Fn(&T) -> U) -> (U, Option<U>) {
    (get(fine), coarse.map(get))
}

fn pair(fine: f64, coarse: Option<f64>) -> Pair {
    Pair { fine, coarse }
}

/// Shift-seminorm, heat and gradient inequalities for a Lebesgue-tagged function.
pub fn certify_lebesgue_suite(label: &str, f: &GridFunction, cfg: &CertifyConfig) -> Result<Vec<CertificateEntry>> {
    cfg.validate()?;
    f.require_measure(Measure::Lebesgue)?;
    let fine = lebesgue_data(f, cfg)?;
    let coarse = match f.decimated() {
        Some(c) => Some(lebesgue_data(&c, cfg)?),
        None => None,
    };
    let n = f.dim();
    let nf = n as f64;
    let t = &cfg.t_grid;
    let mut out = Vec::new();
    let na = cfg.alphas.len();
    for (pi, &p) in cfg.exponents.iter().enumerate() {
        for (ai, &a) in cfg.alphas.iter().enumerate() {
            let k = pi * na + ai;
            let (s, sc) = pick(&fine, coarse.as_ref(), |d| d.seminorm[k].value);
            let (w, wc) = pick(&fine, coarse.as_ref(), |d| d.witness[k].quotient);
            let (s, w) = (pair(s, sc), pair(w, wc));
            let h = Some(fine.seminorm[k].witness_h.clone());

            let (c_up, st_up) = if n == 1 {
                (1.0 / (1.0 + a) + 1.0, "V_{p,a}(f) <= ((1+a)^{-1} + 1) |f|_{p,a}")
            } else {
                (shift_variation_constant(n, a), "V_{p,a}(f) <= (E|Z|^a + E|Z|^{1+a}) |f|_{p,a}")
            };
            let mut inp = inputs_for(label, f, p, a, c_up);
            inp.h = h.clone();
            out.push(point_entry(cfg, "lebesgue/variation-upper", st_up, Soundness::Check, w, s.scale(c_up), inp));

            let c_lo = 2f64.powf(a - 1.0);
            let mut inp = inputs_for(label, f, p, a, c_lo);
            inp.h = h.clone();
            out.push(point_entry(
                cfg,
                "lebesgue/variation-lower",
                "2^{a-1} |f|_{p,a} <= V_{p,a}(f)",
                Soundness::Sound,
                s.scale(c_lo),
                w,
                inp,
            ));

            let approx = |d: &LebesgueData, i: usize| d.curves.approximation[pi][i];
            let lhs: Vec<Pair> =
                (0..t.len()).map(|i| pair(approx(&fine, i), coarse.as_ref().map(|c| approx(c, i)))).collect();
            let c11 = gaussian_abs_moment(a, n);
            let rhs: Vec<Pair> = t.iter().map(|&ti| s.scale(c11 * ti.powf(0.5 * a))).collect();
            out.push(curve_entry(
                cfg,
                "lebesgue/heat-approximation-seminorm",
                "||f - P_t f||_p <= E|Z|^a |f|_{p,a} t^{a/2}",
                Soundness::Sound,
                t,
                &lhs,
                &rhs,
                inputs_for(label, f, p, a, c11),
            ));

            let (u, uc) = pick(&fine, coarse.as_ref(), |d| u_grid(&d.curves.gradient[pi], t, a));
            let u = pair(u, uc);
            let c12 = 4.0 / a * nf.sqrt();
            let rhs: Vec<Pair> = t.iter().map(|&ti| u.scale(c12 * ti.powf(0.5 * a))).collect();
            out.push(curve_entry(
                cfg,
                "lebesgue/heat-approximation-gradient",
                "||f - P_t f||_p <= 4 a^{-1} sqrt(n) U_{p,a}(f) t^{a/2}",
                Soundness::Sound,
                t,
                &lhs,
                &rhs,
                inputs_for(label, f, p, a, c12),
            ));

            let c_ua = nf.powf(0.5 * (1.0 - a));
            out.push(point_entry(
                cfg,
                "lebesgue/gradient-by-variation",
                "U_{p,a}(f) <= n^{(1-a)/2} V_{p,a}(f)",
                Soundness::Informative,
                u,
                w.scale(c_ua),
                inputs_for(label, f, p, a, c_ua),
            ));
            let c_vu = 4.0 * nf.sqrt() / a + 1.0;
            out.push(point_entry(
                cfg,
                "lebesgue/variation-by-gradient",
                "V_{p,a}(f) <= (4 sqrt(n) / a + 1) U_{p,a}(f)",
                Soundness::Check,
                w,
                u.scale(c_vu),
                inputs_for(label, f, p, a, c_vu),
            ));
        }
    }
    Ok(out)
}

/// Grid quantities of a Gaussian-tagged function for every `(p, alpha)`.
struct GaussianData {
    curves: OuCurves,
    mean: f64,
    /// `||f - E f||_p` per exponent.
    centred: Vec<f64>,
    /// Refined Gaussian gradient functional, indexed `exponents x alphas`.
    u_refined: Vec<f64>,
    witness: Vec<QuotientWitness>,
}

fn gaussian_data(f: &GridFunction, cfg: &CertifyConfig, engine: &OuEngine) -> Result<GaussianData> {
    let curves = OuCurves::compute(engine, f, &cfg.exponents, &cfg.t_grid)?;
    let w = f.weights();
    let mean = f.integral();
    let centred_samples: Vec<f64> = f.samples().iter().map(|v| v - mean).collect();
    let centred = cfg.exponents.iter().map(|&p| weighted_norm(&centred_samples, &w, p)).collect();
    let mut u_refined = Vec::new();
    let mut witness = Vec::new();
    for (pi, &p) in cfg.exponents.iter().enumerate() {
        for &a in &cfg.alphas {
            let values: Vec<f64> =
                curves.gradient[pi].iter().zip(&cfg.t_grid).map(|(g, t)| t.powf(0.5 * (1.0 - a)) * g).collect();
            let curve = SemigroupCurve::new(cfg.t_grid.clone(), values)?;
            let (_, u) = refine_curve_sup(
                |t| {
                    let g = engine.gradient(f, t)?;
                    Ok(t.powf(0.5 * (1.0 - a)) * weighted_norm(&g.magnitude(), &w, p))
                },
                &curve,
            )?;
            u_refined.push(u);
            witness.push(v_lower_bound(f, p, a, &cfg.search)?);
        }
    }
    Ok(GaussianData { curves, mean, centred, u_refined, witness })
}

/// OU approximation, Poincaré, sandwich and interpolation inequalities for a 1D
/// Gaussian-tagged function.
pub fn certify_gaussian_suite(
    label: &str,
    f: &GridFunction,
    cfg: &CertifyConfig,
    engine: &OuEngine,
) -> Result<Vec<CertificateEntry>> {
    cfg.validate()?;
    f.require_measure(Measure::Gaussian)?;
    let fine = gaussian_data(f, cfg, engine)?;
    let coarse_f = f.decimated();
    let coarse = match &coarse_f {
        Some(c) => Some(gaussian_data(c, cfg, engine)?),
        None => None,
    };
    let kant = if f.dim() == 1 && fine.mean.abs() <= 1e-10 * (1.0 + f.max_abs()) {
        let k = kantorovich_norm_1d(f).ok();
        let kc = coarse_f.as_ref().and_then(|c| kantorovich_norm_1d(c).ok());
        k.map(|k| pair(k, kc))
    } else {
        None
    };
    let t = &cfg.t_grid;
    let na = cfg.alphas.len();
    let mut out = Vec::new();
    for (pi, &p) in cfg.exponents.iter().enumerate() {
        let consts = GaussianConstants::new(p)?;
        let cp = consts.cp;
        for (ai, &a) in cfg.alphas.iter().enumerate() {
            let k = pi * na + ai;
            let (u, uc) = pick(&fine, coarse.as_ref(), |d| d.u_refined[k]);
            let u = pair(u, uc);
            let (w, wc) = pick(&fine, coarse.as_ref(), |d| d.witness[k].quotient);
            let w = pair(w, wc);
            let c_vu = 4.0 * cp / a + 1.0;
            let v_up = u.scale(c_vu);

            let approx = |d: &GaussianData, i: usize| d.curves.approximation[pi][i];
            let lhs: Vec<Pair> =
                (0..t.len()).map(|i| pair(approx(&fine, i), coarse.as_ref().map(|c| approx(c, i)))).collect();
            let c21 = 2f64.powf(1.0 - a) * cp.powf(a);
            let ctp: Vec<f64> = t.iter().map(|&ti| ct(ti).map(|c| c.powf(a))).collect::<Result<_>>()?;
            for (name, v, sound) in [
                ("gaussian/ou-approximation-variation", v_up, Soundness::Sound),
                ("gaussian/ou-approximation-witness", w, Soundness::Sound),
            ] {
                let rhs: Vec<Pair> = ctp.iter().map(|&c| v.scale(c21 * c)).collect();
                let mut e = curve_entry(
                    cfg,
                    name,
                    "||f - T_t f||_p <= 2^{1-a} C(p)^a c_t^a V_{p,a}(f)",
                    sound,
                    t,
                    &lhs,
                    &rhs,
                    inputs_for(label, f, p, a, c21),
                );
                if name.ends_with("witness") && e.verdict == Verdict::Fail {
                    // A lower estimate of V on the right side cannot refute the inequality.
                    e.verdict = Verdict::Informative;
                    e.soundness = Soundness::Informative;
                }
                out.push(e);
            }

            let (cen, cenc) = pick(&fine, coarse.as_ref(), |d| d.centred[pi]);
            let c_poinc = 2f64.powf(1.0 - 2.0 * a) * core::f64::consts::PI.powf(a) * cp.powf(a);
            for (name, v) in [("gaussian/poincare-variation", v_up), ("gaussian/poincare-witness", w)] {
                let mut e = point_entry(
                    cfg,
                    name,
                    "||f - E f||_p <= 2^{1-2a} pi^a C(p)^a V_{p,a}(f)",
                    Soundness::Sound,
                    pair(cen, cenc),
                    v.scale(c_poinc),
                    inputs_for(label, f, p, a, c_poinc),
                );
                if name.ends_with("witness") && e.verdict == Verdict::Fail {
                    e.verdict = Verdict::Informative;
                    e.soundness = Soundness::Informative;
                }
                out.push(e);
            }

            let (ug, ugc) = pick(&fine, coarse.as_ref(), |d| u_grid(&d.curves.gradient[pi], t, a));
            let ug = pair(ug, ugc);
            let c22 = 4.0 * cp / a;
            let rhs: Vec<Pair> = t.iter().map(|&ti| ug.scale(c22 * ti.powf(0.5 * a))).collect();
            out.push(curve_entry(
                cfg,
                "gaussian/ou-approximation-gradient",
                "||f - T_t f||_p <= 4 C(p) a^{-1} t^{a/2} U^gamma_{p,a}(f)",
                Soundness::Sound,
                t,
                &lhs,
                &rhs,
                inputs_for(label, f, p, a, c22),
            ));

            if let Some(cq) = consts.cq {
                let c = cq.powf(1.0 - a);
                out.push(point_entry(
                    cfg,
                    "gaussian/gradient-by-variation",
                    "U^gamma_{p,a}(f) <= C(q)^{1-a} V_{p,a}(f)",
                    Soundness::Informative,
                    ug,
                    w.scale(c),
                    inputs_for(label, f, p, a, c),
                ));
            }
            out.push(point_entry(
                cfg,
                "gaussian/variation-by-gradient",
                "V_{p,a}(f) <= (4 C(p) / a + 1) U^gamma_{p,a}(f)",
                Soundness::Check,
                w,
                v_up,
                inputs_for(label, f, p, a, c_vu),
            ));

            if p == 1.0 {
                if let Some(kn) = kant {
                    let norm1 = pair(
                        f.lp_norm(1.0)?,
                        match &coarse_f {
                            Some(c) => Some(c.lp_norm(1.0)?),
                            None => None,
                        },
                    );
                    let e1 = 1.0 / (1.0 + a);
                    let e2 = a / (1.0 + a);
                    for (name, v) in [("gaussian/interpolation-variation", v_up), ("gaussian/interpolation-witness", w)] {
                        let rhs = v.map2(kn, |vv, kk| 3.0 * vv.powf(e1) * kk.powf(e2));
                        let mut e = point_entry(
                            cfg,
                            name,
                            "||f||_1 <= 3 V_{1,a}(f)^{1/(1+a)} ||f||_K^{a/(1+a)}",
                            Soundness::Sound,
                            norm1,
                            rhs,
                            inputs_for(label, f, p, a, 3.0),
                        );
                        if name.ends_with("witness") && e.verdict == Verdict::Fail {
                            e.verdict = Verdict::Informative;
                            e.soundness = Soundness::Informative;
                        }
                        out.push(e);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `V_{2,alpha}(f) <= C(2, alpha) ||f||_{H^{2,alpha}}` for a Hermite expansion sampled on `grid`.
pub fn certify_embedding_p2(
    label: &str,
    coeffs: &HermiteCoeffs,
    alpha: f64,
    grid: &Grid,
    cfg: &CertifyConfig,
) -> Result<CertificateEntry> {
    let c = embedding_constant(2.0, alpha)?;
    let f = coeffs.synthesize(grid)?;
    let w = v_lower_bound(&f, 2.0, alpha, &cfg.search)?.quotient;
    let wc = match f.decimated() {
        Some(g) => Some(v_lower_bound(&g, 2.0, alpha, &cfg.search)?.quotient),
        None => None,
    };
    let norm = coeffs.sobolev_norm(alpha);
    Ok(point_entry(
        cfg,
        "gaussian/embedding",
        "V_{2,a}(f) <= C(2,a) ||f||_{H^{2,a}}",
        Soundness::Check,
        pair(w, wc),
        pair(c * norm, Some(c * norm)),
        inputs_for(label, &f, 2.0, alpha, c),
    ))
}

/// Conditional expectation onto the first coordinate: variation monotonicity and
/// commutation with the OU semigroup, for a 2D Gaussian-tagged function.
pub fn certify_projection_suite(
    label: &str,
    f: &GridFunction,
    cfg: &CertifyConfig,
    engine: &OuEngine,
) -> Result<Vec<CertificateEntry>> {
    cfg.validate()?;
    f.require_measure(Measure::Gaussian)?;
    f.require_dim(2)?;
    struct Data {
        u_refined: Vec<f64>,
        w2: Vec<f64>,
        w1: Vec<f64>,
        residual: Vec<(f64, f64)>,
    }
    let data = |g: &GridFunction| -> Result<Data> {
        let proj = engine.conditional_expectation(g, 0)?;
        let gd = gaussian_data(g, cfg, engine)?;
        let mut w1 = Vec::new();
        for &p in &cfg.exponents {
            for &a in &cfg.alphas {
                w1.push(v_lower_bound(&proj, p, a, &cfg.search)?.quotient);
            }
        }
        let mut residual = Vec::new();
        for &t in &[0.1, 1.0] {
            let a = engine.conditional_expectation(&engine.apply(g, t)?, 0)?;
            let b = engine.apply(&proj, t)?;
            residual.push((t, a.sub(&b)?.lp_norm(2.0)?));
        }
        Ok(Data { u_refined: gd.u_refined, w2: gd.witness.iter().map(|w| w.quotient).collect(), w1, residual })
    };
    let fine = data(f)?;
    let coarse = match f.decimated() {
        Some(c) => Some(data(&c)?),
        None => None,
    };
    let na = cfg.alphas.len();
    let mut out = Vec::new();
    for (pi, &p) in cfg.exponents.iter().enumerate() {
        let cp = GaussianConstants::new(p)?.cp;
        for (ai, &a) in cfg.alphas.iter().enumerate() {
            let k = pi * na + ai;
            let c_vu = 4.0 * cp / a + 1.0;
            let (w1, w1c) = pick(&fine, coarse.as_ref(), |d| d.w1[k]);
            let (u, uc) = pick(&fine, coarse.as_ref(), |d| d.u_refined[k]);
            let (w2, w2c) = pick(&fine, coarse.as_ref(), |d| d.w2[k]);
            out.push(point_entry(
                cfg,
                "projection/variation-monotone",
                "V_{p,a}(E_1 f) <= V_{p,a}(f)",
                Soundness::Sound,
                pair(w1, w1c),
                pair(u, uc).scale(c_vu),
                inputs_for(label, f, p, a, c_vu),
            ));
            out.push(point_entry(
                cfg,
                "projection/witness-compare",
                "V_{p,a}(E_1 f) <= V_{p,a}(f)",
                Soundness::Informative,
                pair(w1, w1c),
                pair(w2, w2c),
                inputs_for(label, f, p, a, 1.0),
            ));
        }
    }
    for (i, &(t, r)) in fine.residual.iter().enumerate() {
        let mut inp = inputs_for(label, f, 2.0, 1.0, 1.0);
        inp.t = Some(t);
        let rc = coarse.as_ref().map(|c| c.residual[i].1);
        let mut e = point_entry(
            cfg,
            "projection/commutation",
            "||E_1 T_t f - T_t E_1 f||_2 <= tol",
            Soundness::Sound,
            pair(r, rc),
            pair(cfg.commutation_tol, Some(cfg.commutation_tol)),
            inp,
        );
        // Fixed tolerance: no discretisation slack.
        e.slack = 0.0;
        e.margin = cfg.commutation_tol - r;
        e.pass = e.margin >= 0.0;
        e.verdict = if e.pass { Verdict::Pass } else { Verdict::Fail };
        out.push(e);
    }
    Ok(out)
}

/// Which suite a planned job runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SuiteKind {
    Lebesgue,
    Gaussian,
    Projection,
    Embedding,
}

/// One unit of certification work.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyJob {
    pub kind: SuiteKind,
    pub function: CorpusFunction,
    pub grid: Grid,
    /// Smoothness for embedding jobs.
    pub alpha: Option<f64>,
}

/// Default grids: 1D on `[-8, 8]` with 4097 nodes, 2D Lebesgue 257^2 and 2D Gaussian 129^2.
pub fn default_jobs() -> Result<Vec<CertifyJob>> {
    jobs_with_sizes(4097, 257, 129)
}

/// The default job list on `[-8, 8]` with the given node counts per axis.
pub fn jobs_with_sizes(n_line: usize, n_lebesgue_2d: usize, n_gaussian_2d: usize) -> Result<Vec<CertifyJob>> {
    let line = Grid::line(-8.0, 8.0, n_line)?;
    let sq_l = Grid::square(-8.0, 8.0, n_lebesgue_2d)?;
    let sq_g = Grid::square(-8.0, 8.0, n_gaussian_2d)?;
    let mut jobs = Vec::new();
    for name in ["indicator", "hat", "gaussian_bump", "weierstrass(0.5)"] {
        jobs.push(CertifyJob { kind: SuiteKind::Lebesgue, function: CorpusFunction::parse(name)?, grid: line.clone(), alpha: None });
    }
    for name in ["indicator", "gaussian_bump"] {
        jobs.push(CertifyJob { kind: SuiteKind::Lebesgue, function: CorpusFunction::parse(name)?, grid: sq_l.clone(), alpha: None });
    }
    for n in 1..=4 {
        jobs.push(CertifyJob { kind: SuiteKind::Gaussian, function: CorpusFunction::Hermite(n), grid: line.clone(), alpha: None });
    }
    for (n, a) in [(0u32, 0.5), (1, 0.5), (2, 0.5), (4, 0.25)] {
        jobs.push(CertifyJob { kind: SuiteKind::Embedding, function: CorpusFunction::Hermite(n), grid: line.clone(), alpha: Some(a) });
    }
    for f in [CorpusFunction::Hermite2(1, 0), CorpusFunction::Hermite2(1, 1), CorpusFunction::XPlusY2] {
        jobs.push(CertifyJob { kind: SuiteKind::Projection, function: f, grid: sq_g.clone(), alpha: None });
    }
    Ok(jobs)
}

/// Label used in entries: function name with a dimension suffix for 2D grids.
pub fn job_label(job: &CertifyJob) -> String {
    if job.grid.dim() == 2 && job.function.supports_dim(1) {
        format!("{}[2d]", job.function.name())
    } else {
        job.function.name()
    }
}

/// Runs one job.
pub fn run_job(job: &CertifyJob, cfg: &CertifyConfig, engine: &OuEngine) -> Result<Vec<CertificateEntry>> {
    let label = job_label(job);
    match job.kind {
        SuiteKind::Lebesgue => certify_lebesgue_suite(&label, &job.function.sample(&job.grid)?, cfg),
        SuiteKind::Gaussian => certify_gaussian_suite(&label, &job.function.sample(&job.grid)?, cfg, engine),
        SuiteKind::Projection => certify_projection_suite(&label, &job.function.sample(&job.grid)?, cfg, engine),
        SuiteKind::Embedding => {
            let CorpusFunction::Hermite(n) = job.function else {
                return Err(Error::Unsupported("embedding jobs take a 1D Hermite polynomial"));
            };
            let mut c = vec![0.0; n as usize + 1];
            c[n as usize] = 1.0;
            let coeffs = HermiteCoeffs::from_coeffs(1, n as usize, c)?;
            let alpha = job.alpha.ok_or(Error::InvalidParameter { name: "alpha", value: f64::NAN })?;
            Ok(vec![certify_embedding_p2(&label, &coeffs, alpha, &job.grid, cfg)?])
        }
    }
}

/// Counts of entries by verdict.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub informative: usize,
}

pub fn summarize(entries: &[CertificateEntry]) -> Summary {
    let mut s = Summary { total: entries.len(), ..Summary::default() };
    for e in entries {
        match e.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Informative => s.informative += 1,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_corpus;

    fn small_cfg() -> CertifyConfig {
        CertifyConfig { t_grid: log_spaced(1e-3, 10.0, 12).unwrap(), ..CertifyConfig::default() }
    }

    #[test]
    fn lebesgue_suite_on_hat() {
        let g = Grid::line(-8.0, 8.0, 1025).unwrap();
        let f = build_corpus("hat", &g).unwrap();
        let entries = certify_lebesgue_suite("hat", &f, &small_cfg()).unwrap();
        assert_eq!(entries.len(), 4 * 6);
        for e in &entries {
            assert_ne!(e.verdict, Verdict::Fail, "{e:?}");
        }
    }

    #[test]
    fn poincare_holds_trivially_for_constants() {
        let g = Grid::line(-8.0, 8.0, 513).unwrap();
        let f = build_corpus("hermite(0)", &g).unwrap();
        let engine = OuEngine::new(64).unwrap();
        let cfg = CertifyConfig { exponents: vec![2.0], alphas: vec![0.5], ..small_cfg() };
        let entries = certify_gaussian_suite("one", &f, &cfg, &engine).unwrap();
        let e = entries.iter().find(|e| e.name == "gaussian/poincare-variation").unwrap();
        assert!(e.lhs < 1e-12 && e.pass);
    }

    #[test]
    fn slack_rules() {
        let cfg = CertifyConfig::default();
        let j = judge(&cfg, Soundness::Sound, pair(1.0, Some(1.0)), pair(0.99995, Some(0.99995)));
        assert!(j.pass && j.slack == 1e-4);
        let j = judge(&cfg, Soundness::Sound, pair(1.2, Some(1.0)), pair(1.0, Some(1.0)));
        assert_eq!(j.verdict, Verdict::Informative);
        let j = judge(&cfg, Soundness::Check, pair(1.2, Some(1.19)), pair(1.0, Some(1.0)));
        assert_eq!(j.verdict, Verdict::Fail);
    }
}
