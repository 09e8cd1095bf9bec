//! Named test functions sampled on grids.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Grid, GridFunction, Measure};
use crate::math::hermite_values;
use crate::{Error, Result};

/// Half-width of the smooth cutoff applied to the lacunary series.
const WEIERSTRASS_CUTOFF: f64 = 6.0;

/// The function corpus.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CorpusFunction {
    Zero,
    /// `1_{[0,1]^d}`, sampled as cell averages.
    Indicator,
    /// `prod max(0, 1 - |x_k|)`.
    Hat,
    /// `exp(-|x|^2 / 2)`.
    GaussianBump,
    /// `chi(x) sum_{j<=J} 2^{-alpha j} cos(2^j x)` with a smooth cutoff `chi` on `[-6, 6]`.
    Weierstrass { alpha: f64, octaves: Option<u32> },
    /// Orthonormal Hermite polynomial `h_n` for the standard Gaussian.
    Hermite(u32),
    /// `h_m(x) h_n(y)`.
    Hermite2(u32, u32),
    /// `x + y^2`.
    XPlusY2,
}

/// Largest octave `J <= 10` whose wavelength keeps at least eight samples per period.
pub fn default_octaves(step: f64) -> u32 {
    let mut j = 0;
    while j < 10 && 2f64.powi(j as i32 + 1) * step <= core::f64::consts::FRAC_PI_4 {
        j += 1;
    }
    j
}

fn smooth_cutoff(x: f64) -> f64 {
    let u = x / WEIERSTRASS_CUTOFF;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

fn interval_fraction(x: f64, step: f64) -> f64 {
    let lo = (x - 0.5 * step).max(0.0);
    let hi = (x + 0.5 * step).min(1.0);
    ((hi - lo) / step).clamp(0.0, 1.0)
}

impl CorpusFunction {
    /// Parses names such as `indicator`, `weierstrass(0.5)`, `hermite(3)`, `hermite(1,1)`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let unknown = || Error::UnknownCorpus(name.to_string());
        let (head, args) = match name.find('(') {
            Some(i) => {
                let inner = name[i + 1..].strip_suffix(')').ok_or_else(unknown)?;
                let args: Vec<&str> = inner.split(',').map(str::trim).collect();
                (&name[..i], args)
            }
            None => (name, Vec::new()),
        };
        let int = |s: &str| s.parse::<u32>().map_err(|_| unknown());
        let real = |s: &str| s.parse::<f64>().map_err(|_| unknown());
        let f = match (head, args.len()) {
            ("zero", 0) => CorpusFunction::Zero,
            ("indicator", 0) => CorpusFunction::Indicator,
            ("hat", 0) => CorpusFunction::Hat,
            ("gaussian_bump", 0) => CorpusFunction::GaussianBump,
            ("weierstrass", 1) => CorpusFunction::Weierstrass { alpha: real(args[0])?, octaves: None },
            ("weierstrass", 2) => {
                CorpusFunction::Weierstrass { alpha: real(args[0])?, octaves: Some(int(args[1])?) }
            }
            ("hermite", 1) => CorpusFunction::Hermite(int(args[0])?),
            ("hermite", 2) => CorpusFunction::Hermite2(int(args[0])?, int(args[1])?),
            ("x_plus_y2", 0) => CorpusFunction::XPlusY2,
            _ => return Err(unknown()),
        };
        if let CorpusFunction::Weierstrass { alpha, .. } = f {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParameter { name: "Weierstrass exponent", value: alpha });
            }
        }
        Ok(f)
    }

    /// Canonical name, accepted by [`CorpusFunction::parse`].
    pub fn name(&self) -> String {
        match self {
            CorpusFunction::Zero => "zero".into(),
            CorpusFunction::Indicator => "indicator".into(),
            CorpusFunction::Hat => "hat".into(),
            CorpusFunction::GaussianBump => "gaussian_bump".into(),
            CorpusFunction::Weierstrass { alpha, octaves: None } => format!("weierstrass({alpha})"),
            CorpusFunction::Weierstrass { alpha, octaves: Some(j) } => {
                format!("weierstrass({alpha},{j})")
            }
            CorpusFunction::Hermite(n) => format!("hermite({n})"),
            CorpusFunction::Hermite2(m, n) => format!("hermite({m},{n})"),
            CorpusFunction::XPlusY2 => "x_plus_y2".into(),
        }
    }

    pub fn measure(&self) -> Measure {
        match self {
            CorpusFunction::Hermite(_) | CorpusFunction::Hermite2(..) | CorpusFunction::XPlusY2 => {
                Measure::Gaussian
            }
            _ => Measure::Lebesgue,
        }
    }

    /// Dimensions the function is defined in.
    pub fn supports_dim(&self, d: usize) -> bool {
        match self {
            CorpusFunction::Zero
            | CorpusFunction::Indicator
            | CorpusFunction::Hat
            | CorpusFunction::GaussianBump => d == 1 || d == 2,
            CorpusFunction::Weierstrass { .. } | CorpusFunction::Hermite(_) => d == 1,
            CorpusFunction::Hermite2(..) | CorpusFunction::XPlusY2 => d == 2,
        }
    }

    /// Point value. The lacunary series uses `octaves_default` when no octave count is fixed.
    pub fn eval(&self, x: &[f64], octaves_default: u32) -> f64 {
        match self {
            CorpusFunction::Zero => 0.0,
            CorpusFunction::Indicator => {
                if x.iter().all(|v| (0.0..=1.0).contains(v)) {
                    1.0
                } else {
                    0.0
                }
            }
            CorpusFunction::Hat => x.iter().map(|v| (1.0 - v.abs()).max(0.0)).product(),
            CorpusFunction::GaussianBump => (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
            CorpusFunction::Weierstrass { alpha, octaves } => {
                let chi = smooth_cutoff(x[0]);
                if chi == 0.0 {
                    return 0.0;
                }
                let jmax = octaves.unwrap_or(octaves_default);
                let mut acc = 0.0;
                let mut freq = 1.0;
                for j in 0..=jmax {
                    acc += 2f64.powf(-alpha * j as f64) * (freq * x[0]).cos();
                    freq *= 2.0;
                }
                chi * acc
            }
            CorpusFunction::Hermite(n) => hermite_values(*n as usize, x[0])[*n as usize],
            CorpusFunction::Hermite2(m, n) => {
                hermite_values(*m as usize, x[0])[*m as usize] * hermite_values(*n as usize, x[1])[*n as usize]
            }
            CorpusFunction::XPlusY2 => x[0] + x[1] * x[1],
        }
    }

    /// Samples on `grid` with the function's own measure tag.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        let d = grid.dim();
        if !self.supports_dim(d) {
            return Err(Error::Unsupported("corpus function is not defined in this dimension"));
        }
        let octaves = default_octaves(grid.axis(0).step());
        match self {
            CorpusFunction::Indicator => {
                let steps: Vec<f64> = grid.axes().iter().map(|a| a.step()).collect();
                GridFunction::from_fn(grid.clone(), Measure::Lebesgue, |x| {
                    x.iter().zip(&steps).map(|(&v, &s)| interval_fraction(v, s)).product()
                })
            }
            _ => GridFunction::from_fn(grid.clone(), self.measure(), |x| self.eval(x, octaves)),
        }
    }
}

/// Samples the named corpus function on `grid`.
pub fn build_corpus(name: &str, grid: &Grid) -> Result<GridFunction> {
    CorpusFunction::parse(name)?.sample(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_l1_norm_is_exact() {
        let g = Grid::line(-8.0, 8.0, 4097).unwrap();
        let f = build_corpus("indicator", &g).unwrap();
        assert!((f.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-12);
        let g2 = Grid::square(-8.0, 8.0, 257).unwrap();
        let f2 = build_corpus("indicator", &g2).unwrap();
        assert!((f2.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_corpus_vanishes_on_boundary() {
        let g = Grid::line(-8.0, 8.0, 4097).unwrap();
        for name in ["indicator", "hat", "gaussian_bump", "weierstrass(0.5)"] {
            let f = build_corpus(name, &g).unwrap();
            assert!(f.boundary_max() <= 1e-8 * f.max_abs().max(1.0), "{name}");
        }
    }

    #[test]
    fn names_round_trip_and_unknown_rejected() {
        for name in ["indicator", "weierstrass(0.5)", "weierstrass(0.5,7)", "hermite(3)", "hermite(1,2)", "x_plus_y2"] {
            assert_eq!(CorpusFunction::parse(name).unwrap().name(), name);
        }
        assert!(matches!(CorpusFunction::parse("nonsense"), Err(Error::UnknownCorpus(_))));
        assert!(CorpusFunction::parse("weierstrass(1.5)").is_err());
        assert!(build_corpus("hermite(2)", &Grid::square(-1.0, 1.0, 5).unwrap()).is_err());
    }

    #[test]
    fn octave_default_resolves_grid() {
        assert_eq!(default_octaves(1.0 / 256.0), 7);
        assert_eq!(default_octaves(1e-6), 10);
    }

    #[test]
    fn hermite_is_normalised() {
        let g = Grid::line(-10.0, 10.0, 4001).unwrap();
        let f = build_corpus("hermite(4)", &g).unwrap();
        assert_eq!(f.measure(), Measure::Gaussian);
        assert!((f.lp_norm(2.0).unwrap() - 1.0).abs() < 1e-10);
    }
}
