//! Run configuration: defaults, a flat `key = value` file, and command-line overrides.

use std::path::{Path, PathBuf};

use besov_core::certify::CertifyConfig;
use besov_core::corpus::CorpusFunction;
use besov_core::math::log_spaced;
use besov_core::witness::WitnessSearch;
use serde::Serialize;

use crate::error::{LabError, Result};

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "BESOV_LAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Corpus,
    Seminorm,
    Semigroup,
    Certify,
    Counterexample,
    Measure,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Corpus => "corpus",
            Subcommand::Seminorm => "seminorm",
            Subcommand::Semigroup => "semigroup",
            Subcommand::Certify => "certify",
            Subcommand::Counterexample => "counterexample",
            Subcommand::Measure => "measure",
        }
    }
}

/// Grid sizes used by `certify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Plan {
    /// 4097 nodes in 1D, 257^2 for Lebesgue and 129^2 for Gaussian 2D functions.
    Default,
    /// 513 nodes in 1D, 65^2 and 33^2 in 2D.
    Quick,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub functions: Vec<String>,
    pub input: Option<PathBuf>,
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub p: Vec<f64>,
    pub alpha: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub h_count: usize,
    pub budget: usize,
    pub seed: u64,
    pub plan: Plan,
    pub ce_alpha: f64,
    pub ce_k_start: usize,
    pub ce_terms: Vec<usize>,
    pub ce_y_samples: usize,
    pub ce_freqs: Vec<f64>,
    pub ce_depth: u32,
    pub ce_grid_nx: usize,
    pub ce_grid_ny: usize,
    pub beta: Vec<f64>,
    pub chaining_depth: u32,
    pub measure_n: usize,
    /// Not echoed: runs that differ only in where they write produce identical files.
    #[serde(skip)]
    pub out: PathBuf,
}

const KEYS: &[&str] = &[
    "functions",
    "input",
    "dim",
    "lo",
    "hi",
    "n",
    "p",
    "alpha",
    "t_min",
    "t_max",
    "t_count",
    "h_count",
    "budget",
    "seed",
    "plan",
    "ce_alpha",
    "ce_k_start",
    "ce_terms",
    "ce_y_samples",
    "ce_freqs",
    "ce_depth",
    "ce_grid_nx",
    "ce_grid_ny",
    "beta",
    "chaining_depth",
    "measure_n",
    "out",
];

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| LabError::config(key, format!("cannot parse `{}`", value.trim())))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(LabError::config(key, "empty list"));
    }
    items.into_iter().map(|s| parse_one(key, s)).collect()
}

/// Splits a comma list of function names, keeping commas inside parentheses.
fn parse_functions(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in value.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    out.retain(|s| !s.is_empty());
    out
}

impl RunConfig {
    pub fn defaults(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            functions: ["indicator", "hat", "gaussian_bump", "weierstrass(0.5)"].map(String::from).to_vec(),
            input: None,
            dim: 1,
            lo: -8.0,
            hi: 8.0,
            n: 4097,
            p: vec![1.0, 2.0],
            alpha: vec![0.5, 1.0],
            t_min: 1e-4,
            t_max: 1e2,
            t_count: 64,
            h_count: besov_core::seminorm::DEFAULT_MAGNITUDES,
            budget: WitnessSearch::default().budget,
            seed: WitnessSearch::default().seed,
            plan: Plan::Default,
            ce_alpha: 0.5,
            ce_k_start: 2,
            ce_terms: vec![1000, 10000],
            ce_y_samples: 100,
            ce_freqs: vec![1.0, 2.0, 4.0, 8.0],
            ce_depth: 4,
            ce_grid_nx: 2049,
            ce_grid_ny: 257,
            beta: vec![0.25, 0.4],
            chaining_depth: 10,
            measure_n: 4097,
            out: PathBuf::from("besov-out"),
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "functions" => self.functions = parse_functions(v),
            "input" => self.input = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "dim" => self.dim = parse_one("dim", v)?,
            "lo" => self.lo = parse_one("lo", v)?,
            "hi" => self.hi = parse_one("hi", v)?,
            "n" => self.n = parse_one("n", v)?,
            "p" => self.p = parse_list("p", v)?,
            "alpha" => self.alpha = parse_list("alpha", v)?,
            "t_min" => self.t_min = parse_one("t_min", v)?,
            "t_max" => self.t_max = parse_one("t_max", v)?,
            "t_count" => self.t_count = parse_one("t_count", v)?,
            "h_count" => self.h_count = parse_one("h_count", v)?,
            "budget" => self.budget = parse_one("budget", v)?,
            "seed" => self.seed = parse_one("seed", v)?,
            "plan" => {
                self.plan = match v {
                    "default" => Plan::Default,
                    "quick" => Plan::Quick,
                    _ => return Err(LabError::config("plan", format!("expected `default` or `quick`, got `{v}`"))),
                }
            }
            "ce_alpha" => self.ce_alpha = parse_one("ce_alpha", v)?,
            "ce_k_start" => self.ce_k_start = parse_one("ce_k_start", v)?,
            "ce_terms" => self.ce_terms = parse_list("ce_terms", v)?,
            "ce_y_samples" => self.ce_y_samples = parse_one("ce_y_samples", v)?,
            "ce_freqs" => self.ce_freqs = parse_list("ce_freqs", v)?,
            "ce_depth" => self.ce_depth = parse_one("ce_depth", v)?,
            "ce_grid_nx" => self.ce_grid_nx = parse_one("ce_grid_nx", v)?,
            "ce_grid_ny" => self.ce_grid_ny = parse_one("ce_grid_ny", v)?,
            "beta" => self.beta = parse_list("beta", v)?,
            "chaining_depth" => self.chaining_depth = parse_one("chaining_depth", v)?,
            "measure_n" => self.measure_n = parse_one("measure_n", v)?,
            "out" => self.out = PathBuf::from(v),
            other => {
                return Err(LabError::config(other, format!("unknown key; expected one of: {}", KEYS.join(", "))));
            }
        }
        Ok(())
    }

    /// Applies a `KEY=VALUE` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| LabError::config(pair, "overrides take the form KEY=VALUE"))?;
        self.set(k, v)
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => LabError::MissingInput { path: path.to_path_buf() },
            _ => LabError::io(path, e),
        })?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                LabError::config(format!("{}:{}", path.display(), i + 1), "expected `key = value`")
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for &p in &self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(LabError::config("p", format!("{p} is not a finite exponent >= 1")));
            }
        }
        for &a in &self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(LabError::config("alpha", format!("{a} is outside (0, 1]")));
            }
        }
        if !(self.dim == 1 || self.dim == 2) {
            return Err(LabError::config("dim", "must be 1 or 2"));
        }
        if !(self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(LabError::config("lo", "need finite lo < hi"));
        }
        if self.n < 5 {
            return Err(LabError::config("n", "need at least 5 nodes"));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(LabError::config("t_min", "need 0 < t_min < t_max"));
        }
        if self.t_count < 2 {
            return Err(LabError::config("t_count", "need at least 2 times"));
        }
        if self.h_count < 2 {
            return Err(LabError::config("h_count", "need at least 2 shift lengths"));
        }
        if self.input.is_none() {
            if self.functions.is_empty() {
                return Err(LabError::config("functions", "no functions selected"));
            }
            for name in &self.functions {
                let f = CorpusFunction::parse(name).map_err(|e| LabError::config("functions", e.to_string()))?;
                if matches!(self.subcommand, Subcommand::Corpus | Subcommand::Seminorm | Subcommand::Semigroup)
                    && !f.supports_dim(self.dim)
                {
                    return Err(LabError::config("functions", format!("`{name}` is not defined in dimension {}", self.dim)));
                }
            }
        }
        if !(self.ce_alpha > 0.0 && self.ce_alpha < 1.0) {
            return Err(LabError::config("ce_alpha", "must lie in (0, 1)"));
        }
        if self.ce_k_start < 2 {
            return Err(LabError::config("ce_k_start", "must be at least 2"));
        }
        if self.ce_terms.iter().any(|&n| n < self.ce_k_start) {
            return Err(LabError::config("ce_terms", "every term count must be at least ce_k_start"));
        }
        if self.ce_y_samples == 0 {
            return Err(LabError::config("ce_y_samples", "must be positive"));
        }
        for &b in &self.beta {
            if !(b > 0.0 && b <= 1.0) {
                return Err(LabError::config("beta", format!("{b} is outside (0, 1]")));
            }
        }
        if self.chaining_depth == 0 {
            return Err(LabError::config("chaining_depth", "must be positive"));
        }
        if self.measure_n < 5 {
            return Err(LabError::config("measure_n", "need at least 5 nodes"));
        }
        Ok(())
    }

    pub fn t_grid(&self) -> Result<Vec<f64>> {
        Ok(log_spaced(self.t_min, self.t_max, self.t_count)?)
    }

    pub fn search(&self) -> WitnessSearch {
        WitnessSearch { budget: self.budget, seed: self.seed, ..WitnessSearch::default() }
    }

    pub fn certify_config(&self) -> Result<CertifyConfig> {
        Ok(CertifyConfig {
            exponents: self.p.clone(),
            alphas: self.alpha.clone(),
            t_grid: self.t_grid()?,
            search: self.search(),
            ..CertifyConfig::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_lists_keep_parenthesised_commas() {
        assert_eq!(parse_functions("hat, weierstrass(0.5,7),hermite(1,2)"), vec!["hat", "weierstrass(0.5,7)", "hermite(1,2)"]);
    }

    #[test]
    fn bad_values_name_the_field() {
        let mut c = RunConfig::defaults(Subcommand::Seminorm);
        let err = c.set("alpha", "0.5, x").unwrap_err();
        assert!(err.to_string().contains("`alpha`"));
        c.set("alpha", "1.5").unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("`alpha`"), "{err}");
        assert_eq!(err.exit_code(), 2);
        assert!(c.set("colour", "blue").unwrap_err().to_string().contains("`colour`"));
    }
}
