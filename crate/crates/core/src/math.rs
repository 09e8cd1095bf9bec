//! Special functions, quadrature rules, a radix-2 FFT and small numerical helpers.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Mass of the standard normal law on `[a, b]`, accurate in both tails.
pub fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `count` points spaced evenly in log scale on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter { name: "log range", value: lo });
    }
    if count < 2 {
        return Err(Error::InvalidParameter { name: "point count", value: count as f64 });
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[count - 1] = hi;
    Ok(out)
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Orthonormal Hermite polynomials `h_0..=h_n` at `x` for the standard Gaussian measure.
pub fn hermite_values(n: usize, x: f64) -> Vec<f64> {
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    if n >= 1 {
        h[1] = x;
    }
    for k in 1..n {
        h[k + 1] = (x * h[k] - (k as f64).sqrt() * h[k - 1]) / ((k + 1) as f64).sqrt();
    }
    h
}

/// Gauss-Hermite rule for the standard Gaussian measure (weights sum to one).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 512 {
            return Err(Error::InvalidParameter { name: "Gauss-Hermite node count", value: n as f64 });
        }
        // Newton iteration on the orthonormal Hermite recurrence for the weight exp(-x^2).
        let pim4 = 0.751_125_544_464_942_5;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 1.0;
            for _ in 0..200 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let sqrt_pi = core::f64::consts::PI.sqrt();
        let mut nodes: Vec<f64> = x.iter().map(|v| v * core::f64::consts::SQRT_2).collect();
        let mut weights: Vec<f64> = w.iter().map(|v| v / sqrt_pi).collect();
        nodes.reverse();
        weights.reverse();
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let total: f64 = weights.iter().sum();
        if !(total - 1.0).abs().le(&1e-10) {
            return Err(Error::InvalidParameter { name: "Gauss-Hermite weight sum", value: total });
        }
        Ok(GaussHermite { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E g(Z)` for `Z ~ N(0, 1)`.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * g(y)).sum()
    }
}

/// In-place radix-2 FFT, `X_k = sum_j x_j exp(-2 pi i j k / n)`; the inverse is scaled by `1/n`.
pub fn fft(re: &mut [f64], im: &mut [f64], inverse: bool) -> Result<()> {
    let n = re.len();
    if im.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: im.len() });
    }
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter { name: "FFT length", value: n as f64 });
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let half = n / 2;
    let (tw_re, tw_im): (Vec<f64>, Vec<f64>) = (0..half.max(1))
        .map(|k| {
            let a = sign * 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .unzip();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let (wr, wi) = (tw_re[k * stride], tw_im[k * stride]);
                let a = start + k;
                let b = a + len / 2;
                let xr = re[b] * wr - im[b] * wi;
                let xi = re[b] * wi + im[b] * wr;
                re[b] = re[a] - xr;
                im[b] = im[a] - xi;
                re[a] += xr;
                im[a] += xi;
            }
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        re.iter_mut().for_each(|v| *v *= s);
        im.iter_mut().for_each(|v| *v *= s);
    }
    Ok(())
}

/// Six-point Lagrange stencil for fractional index `u` on a line of `n` nodes.
///
/// Returns the first stencil node, the weights and the stencil length.
pub fn lagrange_stencil(u: f64, n: usize) -> (usize, [f64; 6], usize) {
    let len = n.min(6);
    let mut w = [0.0; 6];
    if len == 1 {
        w[0] = 1.0;
        return (0, w, 1);
    }
    let base = u.floor() as i64 - (len as i64 / 2 - 1);
    let start = base.clamp(0, (n - len) as i64) as usize;
    let nodes: [f64; 6] = core::array::from_fn(|j| (start + j) as f64);
    for j in 0..len {
        let mut num = 1.0;
        let mut den = 1.0;
        for m in 0..len {
            if m != j {
                num *= u - nodes[m];
                den *= nodes[j] - nodes[m];
            }
        }
        w[j] = num / den;
    }
    (start, w, len)
}

/// Evaluates the piecewise six-point interpolant of `values` at fractional index `u`.
pub fn interp_line(values: &[f64], u: f64) -> f64 {
    let (start, w, len) = lagrange_stencil(u, values.len());
    let mut acc = 0.0;
    for j in 0..len {
        acc += w[j] * values[start + j];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        let rule = GaussHermite::new(128).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!((rule.expect(|y| y * y) - 1.0).abs() < 1e-12);
        assert!((rule.expect(|y| y.powi(4)) - 3.0).abs() < 1e-11);
        assert!((rule.expect(|y| y.powi(6)) - 15.0).abs() < 1e-10);
        assert!((rule.expect(|y| y.cos()) - (-0.5f64).exp()).abs() < 1e-14);
        let small = GaussHermite::new(5).unwrap();
        assert!((small.expect(|y| y.powi(8)) - 105.0).abs() < 1e-9);
    }

    #[test]
    fn hermite_orthonormality_under_rule() {
        let rule = GaussHermite::new(64).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let v = rule.expect(|y| {
                    let h = hermite_values(8, y);
                    h[a] * h[b]
                });
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-12, "{a} {b} {v}");
            }
        }
    }

    #[test]
    fn fft_matches_direct_dft() {
        let n = 16;
        let x: Vec<f64> = (0..n).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let mut re = x.clone();
        let mut im = vec![0.0; n];
        fft(&mut re, &mut im, false).unwrap();
        for k in 0..n {
            let (mut sr, mut si) = (0.0, 0.0);
            for (j, v) in x.iter().enumerate() {
                let a = -2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64;
                sr += v * a.cos();
                si += v * a.sin();
            }
            assert!((sr - re[k]).abs() < 1e-12 && (si - im[k]).abs() < 1e-12);
        }
        fft(&mut re, &mut im, true).unwrap();
        for j in 0..n {
            assert!((re[j] - x[j]).abs() < 1e-13 && im[j].abs() < 1e-13);
        }
    }

    #[test]
    fn simpson_and_normal() {
        let v = adaptive_simpson(normal_pdf, -10.0, 10.0, 1e-14);
        assert!((v - 1.0).abs() < 1e-12);
        assert!((normal_mass(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-14);
        assert!((gamma(0.5) - core::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lagrange_reproduces_quintics() {
        let vals: Vec<f64> = (0..20).map(|i| {
            let x = i as f64 * 0.1;
            x.powi(5) - 2.0 * x * x + 1.0
        }).collect();
        for &u in &[0.3, 4.5, 17.9, 19.0, -1.5, 21.0] {
            let x = u * 0.1;
            let exact = x.powi(5) - 2.0 * x * x + 1.0;
            assert!((interp_line(&vals, u) - exact).abs() < 1e-10, "{u}");
        }
    }

    #[test]
    fn golden_finds_peak() {
        let (x, v) = golden_max(|t| -(t - 0.3) * (t - 0.3), 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-7 && v.abs() < 1e-12);
    }
}
