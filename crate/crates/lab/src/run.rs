//! Subcommand execution.

use std::path::PathBuf;

use besov_core::certify::{
    default_jobs, jobs_with_sizes, run_job, sort_entries, summarize, CertificateEntry, Summary,
};
use besov_core::corpus::CorpusFunction;
use besov_core::heat::{u_functional, HeatCurves};
use besov_core::ou::{u_gamma_functional, OuCurves, OuEngine};
use besov_core::seminorm::{besov_seminorm, BesovEstimate, ShiftGrid};
use besov_core::witness::{v_lower_bound, Construction};
use besov_core::{Grid, GridFunction, Measure};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Plan, RunConfig, Subcommand};
use crate::error::{LabError, Result};
use crate::formats::{file_stem, grid_function_rows, read_grid_function, write_csv, write_grid_function, write_json};
use crate::studies::{counterexample_study, measure_study};

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Files written, relative to the output directory, in creation order.
    pub files: Vec<PathBuf>,
    /// A non-informative certificate entry failed.
    pub certificate_failure: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.certificate_failure)
    }
}

/// Validates the configuration and runs its subcommand.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.subcommand {
        Subcommand::Corpus => corpus(cfg),
        Subcommand::Seminorm => seminorm(cfg),
        Subcommand::Semigroup => semigroup(cfg),
        Subcommand::Certify => certify(cfg),
        Subcommand::Counterexample => counterexample(cfg),
        Subcommand::Measure => measure(cfg),
    }
}

fn grid_for(cfg: &RunConfig) -> Result<Grid> {
    Ok(if cfg.dim == 1 { Grid::line(cfg.lo, cfg.hi, cfg.n)? } else { Grid::square(cfg.lo, cfg.hi, cfg.n)? })
}

/// The functions a run operates on: the input file if given, else the named corpus entries.
pub fn load_functions(cfg: &RunConfig) -> Result<Vec<(String, GridFunction)>> {
    if let Some(path) = &cfg.input {
        let f = read_grid_function(path)?;
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into());
        return Ok(vec![(label, f)]);
    }
    let grid = grid_for(cfg)?;
    cfg.functions
        .iter()
        .map(|name| {
            let f = CorpusFunction::parse(name).map_err(|e| LabError::config("functions", e.to_string()))?;
            Ok((f.name(), f.sample(&grid)?))
        })
        .collect()
}

fn corpus(cfg: &RunConfig) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Item {
        function: String,
        measure: Measure,
        dim: usize,
        n: usize,
        file: String,
        csv: String,
    }
    let mut files = Vec::new();
    let mut items = Vec::new();
    for (label, f) in load_functions(cfg)? {
        let stem = file_stem(&label);
        let bin = PathBuf::from("corpus").join(format!("{stem}.bgf"));
        let csv = PathBuf::from("corpus").join(format!("{stem}.csv"));
        write_grid_function(&cfg.out.join(&bin), &f)?;
        let (header, rows) = grid_function_rows(&f);
        write_csv(&cfg.out.join(&csv), cfg, &header, &rows)?;
        items.push(Item {
            function: label,
            measure: f.measure(),
            dim: f.dim(),
            n: f.grid().axis(0).n,
            file: bin.to_string_lossy().into_owned(),
            csv: csv.to_string_lossy().into_owned(),
        });
        files.push(bin);
        files.push(csv);
    }
    #[derive(Serialize)]
    struct Payload {
        functions: Vec<Item>,
    }
    write_json(&cfg.out.join("corpus.json"), cfg, Payload { functions: items })?;
    files.push("corpus.json".into());
    Ok(Outcome { files, certificate_failure: false })
}

/// Witness summary without the sampled test field.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessSummary {
    pub quotient: f64,
    pub numerator: f64,
    pub norm_field: f64,
    pub norm_div: f64,
    pub construction: Construction,
    pub shift: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeminormRow {
    pub function: String,
    pub measure: Measure,
    pub p: f64,
    pub alpha: f64,
    /// Shift seminorm; only defined for Lebesgue-tagged functions.
    pub seminorm: Option<BesovEstimate>,
    /// Grid supremum of the semigroup gradient functional.
    pub u: f64,
    pub u_argmax_t: f64,
    pub witness: WitnessSummary,
}

pub fn seminorm_rows(cfg: &RunConfig, functions: &[(String, GridFunction)]) -> Result<Vec<SeminormRow>> {
    let t_grid = cfg.t_grid()?;
    let search = cfg.search();
    let engine = OuEngine::default();
    let mut tasks = Vec::new();
    for (i, _) in functions.iter().enumerate() {
        for &p in &cfg.p {
            for &a in &cfg.alpha {
                tasks.push((i, p, a));
            }
        }
    }
    tasks
        .par_iter()
        .map(|&(i, p, alpha)| {
            let (label, f) = &functions[i];
            let seminorm = match f.measure() {
                Measure::Lebesgue => Some(besov_seminorm(f, p, alpha, &ShiftGrid::with_count(f, cfg.h_count)?)?),
                Measure::Gaussian => None,
            };
            let u = match f.measure() {
                Measure::Lebesgue => u_functional(f, p, alpha, &t_grid)?,
                Measure::Gaussian => u_gamma_functional(&engine, f, p, alpha, &t_grid)?,
            };
            let w = v_lower_bound(f, p, alpha, &search)?;
            Ok(SeminormRow {
                function: label.clone(),
                measure: f.measure(),
                p,
                alpha,
                seminorm,
                u: u.value,
                u_argmax_t: u.argmax_t,
                witness: WitnessSummary {
                    quotient: w.quotient,
                    numerator: w.numerator,
                    norm_field: w.norm_field,
                    norm_div: w.norm_div,
                    construction: w.construction,
                    shift: w.shift,
                },
            })
        })
        .collect()
}

fn seminorm(cfg: &RunConfig) -> Result<Outcome> {
    let functions = load_functions(cfg)?;
    let rows = seminorm_rows(cfg, &functions)?;
    #[derive(Serialize)]
    struct Payload {
        estimates: Vec<SeminormRow>,
    }
    write_json(&cfg.out.join("seminorm.json"), cfg, Payload { estimates: rows })?;
    Ok(Outcome { files: vec!["seminorm.json".into()], certificate_failure: false })
}

/// Times, approximation errors and gradient norms, one row per exponent.
type Curves = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>);

fn semigroup(cfg: &RunConfig) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Functional {
        function: String,
        semigroup: &'static str,
        p: f64,
        alpha: f64,
        value: f64,
        argmax_t: f64,
        curves: String,
    }
    let t_grid = cfg.t_grid()?;
    let engine = OuEngine::default();
    let functions = load_functions(cfg)?;
    let computed: Vec<Result<Curves>> = functions
        .par_iter()
        .map(|(_, f)| {
            Ok(match f.measure() {
                Measure::Lebesgue => {
                    let c = HeatCurves::compute(f, &cfg.p, &t_grid)?;
                    (c.t, c.approximation, c.gradient)
                }
                Measure::Gaussian => {
                    let c = OuCurves::compute(&engine, f, &cfg.p, &t_grid)?;
                    (c.t, c.approximation, c.gradient)
                }
            })
        })
        .collect();
    let mut files = Vec::new();
    let mut functionals = Vec::new();
    for ((label, f), res) in functions.iter().zip(computed) {
        let (t, approx, grad) = res?;
        let csv = PathBuf::from("semigroup").join(format!("{}.csv", file_stem(label)));
        let mut header = vec!["t".to_string()];
        for p in &cfg.p {
            header.push(format!("approximation_p{p}"));
            header.push(format!("gradient_p{p}"));
        }
        let rows: Vec<Vec<f64>> = (0..t.len())
            .map(|i| {
                let mut r = vec![t[i]];
                for k in 0..cfg.p.len() {
                    r.push(approx[k][i]);
                    r.push(grad[k][i]);
                }
                r
            })
            .collect();
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(&cfg.out.join(&csv), cfg, &header_refs, &rows)?;
        for (k, &p) in cfg.p.iter().enumerate() {
            for &alpha in &cfg.alpha {
                let (argmax_t, value) = t
                    .iter()
                    .zip(&grad[k])
                    .map(|(&ti, g)| (ti, ti.powf(0.5 * (1.0 - alpha)) * g))
                    .fold((t[0], f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
                functionals.push(Functional {
                    function: label.clone(),
                    semigroup: match f.measure() {
                        Measure::Lebesgue => "heat",
                        Measure::Gaussian => "ornstein-uhlenbeck",
                    },
                    p,
                    alpha,
                    value,
                    argmax_t,
                    curves: csv.to_string_lossy().into_owned(),
                });
            }
        }
        files.push(csv);
    }
    #[derive(Serialize)]
    struct Payload {
        functionals: Vec<Functional>,
    }
    write_json(&cfg.out.join("semigroup.json"), cfg, Payload { functionals })?;
    files.push("semigroup.json".into());
    Ok(Outcome { files, certificate_failure: false })
}

/// Runs the certificate suites of the configured plan and returns sorted entries.
pub fn certificate_entries(cfg: &RunConfig) -> Result<Vec<CertificateEntry>> {
    let ccfg = cfg.certify_config()?;
    let engine = OuEngine::default();
    let jobs = match cfg.plan {
        Plan::Default => default_jobs()?,
        Plan::Quick => jobs_with_sizes(513, 65, 33)?,
    };
    let results: Vec<Result<Vec<CertificateEntry>>> =
        jobs.par_iter().map(|job| Ok(run_job(job, &ccfg, &engine)?)).collect();
    let mut entries = Vec::new();
    for r in results {
        entries.extend(r?);
    }
    sort_entries(&mut entries);
    Ok(entries)
}

fn certify(cfg: &RunConfig) -> Result<Outcome> {
    let entries = certificate_entries(cfg)?;
    let summary = summarize(&entries);
    #[derive(Serialize)]
    struct Payload {
        summary: Summary,
        entries: Vec<CertificateEntry>,
    }
    write_json(&cfg.out.join("certificates.json"), cfg, Payload { summary, entries })?;
    Ok(Outcome { files: vec!["certificates.json".into()], certificate_failure: summary.fail > 0 })
}

fn counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let report = counterexample_study(cfg)?;
    let rows: Vec<Vec<f64>> = report
        .profiles
        .iter()
        .map(|r| vec![r.y, r.n_terms as f64, r.value, r.argmax_k as f64, r.predicted])
        .collect();
    write_csv(
        &cfg.out.join("counterexample_profiles.csv"),
        cfg,
        &["y", "n_terms", "profile", "argmax_k", "predicted"],
        &rows,
    )?;
    write_json(&cfg.out.join("counterexample.json"), cfg, &report)?;
    Ok(Outcome {
        files: vec!["counterexample_profiles.csv".into(), "counterexample.json".into()],
        certificate_failure: false,
    })
}

fn measure(cfg: &RunConfig) -> Result<Outcome> {
    let report = measure_study(cfg)?;
    let rows: Vec<Vec<f64>> = report.holder.t.iter().zip(&report.holder.tv).map(|(t, v)| vec![*t, *v]).collect();
    write_csv(&cfg.out.join("measure_holder.csv"), cfg, &["t", "tv"], &rows)?;
    write_json(&cfg.out.join("measure.json"), cfg, &report)?;
    Ok(Outcome { files: vec!["measure_holder.csv".into(), "measure.json".into()], certificate_failure: false })
}
