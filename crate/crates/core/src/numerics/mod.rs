//! Shared numerical infrastructure: quadrature, root bracketing, finite
//! differences, domain truncation and a few one-dimensional searches.

mod jet;
mod quadrature;

pub use jet::Jet;
pub use quadrature::{gauss_7, gauss_kronrod_15, integrate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::EnergySlice;

/// Default absolute quadrature tolerance.
pub const ABS_TOL: f64 = 1e-10;
/// Default relative quadrature tolerance.
pub const REL_TOL: f64 = 1e-9;
/// Default asymptotic flatness threshold on |k^2 - k_inf^2|.
pub const TAIL_TOL: f64 = 1e-12;
/// Default position tolerance for refined roots.
pub const ROOT_TOL: f64 = 1e-12;
/// Default number of scan cells used for bracketing and shape checks.
pub const N_SCAN: usize = 2048;
/// Truncation windows never grow beyond this half-size.
pub const WINDOW_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: ABS_TOL, rel_tol: REL_TOL, max_depth: 40, tail_tol: TAIL_TOL }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.tail_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_depth < 10 {
            return Err(Error::InvalidConfig("max_depth must be at least 10".into()));
        }
        Ok(())
    }
}

/// Every numeric knob an [`EnergySlice`] carries into bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    pub quad: QuadratureConfig,
    pub root_tol: f64,
    pub n_scan: usize,
    /// Integrand magnitude at the window edge above which a bound is
    /// declared divergent.
    pub divergence_tol: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig { quad: QuadratureConfig::default(), root_tol: ROOT_TOL, n_scan: N_SCAN, divergence_tol: 1e-8 }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.root_tol > 0.0) || self.n_scan < 16 || !(self.divergence_tol > 0.0) {
            return Err(Error::InvalidConfig("root_tol and divergence_tol must be positive, n_scan >= 16".into()));
        }
        Ok(())
    }
}

/// Scan `[a, b]` on `n_scan` uniform cells and refine every sign change of
/// `f` by bisection to within `tol` in position.
///
/// Isolated exact zeros on the scan grid are reported as roots; runs of
/// exact zeros (a function vanishing identically) are not. Features
/// narrower than one scan cell can be missed.
pub fn bracket_roots_tol(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n_scan: usize, tol: f64) -> Vec<f64> {
    let n = n_scan.max(1);
    let xs: Vec<f64> = grid(a, b, n).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..=n {
        if fs[i] == 0.0 {
            let left_zero = i > 0 && fs[i - 1] == 0.0;
            let right_zero = i < n && fs[i + 1] == 0.0;
            if !left_zero && !right_zero {
                roots.push(xs[i]);
            }
        } else if i > 0 && fs[i - 1] != 0.0 && (fs[i - 1] < 0.0) != (fs[i] < 0.0) {
            roots.push(bisect(f, xs[i - 1], xs[i], fs[i - 1], tol));
        }
    }
    roots
}

/// [`bracket_roots_tol`] at the default root tolerance.
pub fn bracket_roots(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n_scan: usize) -> Vec<f64> {
    bracket_roots_tol(f, a, b, n_scan, ROOT_TOL)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let neg_lo = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Fourth-order central finite difference of order 1 or 2.
///
/// Without an explicit step, `h = eps^(1/3) (1 + |x|)` for the first
/// derivative and `h = eps^(1/4) (1 + |x|)` for the second.
pub fn fd_derivative(f: &dyn Fn(f64) -> f64, x: f64, order: u8, h_step: Option<f64>) -> f64 {
    let scale = 1.0 + x.abs();
    match order {
        1 => {
            let h = h_step.unwrap_or(f64::EPSILON.cbrt() * scale);
            (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
        }
        2 => {
            let h = h_step.unwrap_or(f64::EPSILON.powf(0.25) * scale);
            (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
        }
        _ => panic!("fd_derivative supports order 1 or 2, got {order}"),
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)` after at most `max_evals` evaluations.
pub fn golden_section_min(
    f: &mut dyn FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    max_evals: usize,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while evals < max_evals && (b - a) > x_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Location and value of the maximum of `f` on `[a, b]`: a scan on `n`
/// cells followed by golden-section refinement around the best sample.
pub fn scan_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let step = (b - a) / n as f64;
    let mut best = (a, f(a));
    for i in 1..=n {
        let x = a + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let lo = (best.0 - step).max(a);
    let hi = (best.0 + step).min(b);
    let (x, neg) = golden_section_min(&mut |x| -f(x), lo, hi, 120, 1e-13 * (1.0 + best.0.abs()));
    if -neg > best.1 {
        (x, -neg)
    } else {
        best
    }
}

/// Count direction reversals of a sampled sequence, ignoring steps smaller
/// than `noise`. Returns `(rises_then_falls, falls_then_rises)`.
pub fn count_reversals(samples: &[f64], noise: f64) -> (usize, usize) {
    let mut last = 0i8;
    let mut up_down = 0;
    let mut down_up = 0;
    for w in samples.windows(2) {
        let d = w[1] - w[0];
        let s = if d > noise {
            1
        } else if d < -noise {
            -1
        } else {
            0
        };
        if s == 0 {
            continue;
        }
        if last == 1 && s == -1 {
            up_down += 1;
        } else if last == -1 && s == 1 {
            down_up += 1;
        }
        last = s;
    }
    (up_down, down_up)
}

/// Uniform sample grid with `n` cells (`n + 1` points) on `[a, b]`.
pub fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (b - a) / n as f64;
    (0..=n).map(move |i| if i == n { b } else { a + step * i as f64 })
}

/// Grow a window outward from `initial` until `deviation` stays below
/// `tail_tol` beyond each edge, then bisect each edge onto the outermost
/// crossing.
///
/// `deviation(x, side)` receives `side = -1` for the left edge and `+1` for
/// the right edge. The returned window always contains `initial`.
pub fn truncate_window(
    deviation: &dyn Fn(f64, i8) -> f64,
    initial: (f64, f64),
    scale: f64,
    tail_tol: f64,
) -> Result<(f64, f64)> {
    let edge = |side: i8| -> Result<f64> {
        let base = if side < 0 { initial.0 } else { initial.1 };
        let at = |dist: f64| base + side as f64 * dist;
        let flat_from = |dist: f64| {
            [1.0, 1.5, 2.0, 3.0].iter().all(|m| deviation(at(dist * m), side) < tail_tol)
                && deviation(at(dist), side) < tail_tol
        };
        if deviation(at(0.0), side) < tail_tol && flat_from(scale) {
            return Ok(base);
        }
        let mut fail = 0.0;
        let mut step = scale;
        loop {
            if step > WINDOW_CAP {
                return Err(Error::NoConvergence(format!(
                    "potential tail is not flat within {tail_tol:e} inside |x| < {WINDOW_CAP:e}"
                )));
            }
            if deviation(at(step), side) < tail_tol && flat_from(step) {
                break;
            }
            fail = step;
            step *= 2.0;
        }
        let (mut lo, mut hi) = (fail, step);
        while hi - lo > 1e-9 * scale.max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if deviation(at(mid), side) < tail_tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(at(hi))
    };
    Ok((edge(-1)?, edge(1)?))
}

/// Smallest window outside which k^2 sits within `tail_tol` of its
/// asymptotic values.
pub fn truncate_domain(slice: &EnergySlice, tail_tol: f64) -> Result<(f64, f64)> {
    let profile = slice.profile();
    let (lo, hi) = profile.extent();
    let scale = profile.scale();
    let (vm, vp) = (profile.v_minus_inf(), profile.v_plus_inf());
    let dev = |x: f64, side: i8| {
        let target = if side < 0 { vm } else { vp };
        (profile.value(x) - target).abs()
    };
    truncate_window(&dev, (lo - scale, hi + scale), scale, tail_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        let r = bracket_roots(&|x| x * x - 2.0, 0.0, 2.0, 100);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_roots_when_identically_zero() {
        assert!(bracket_roots(&|_| 0.0, -1.0, 1.0, 64).is_empty());
        assert_eq!(bracket_roots(&|x: f64| x, -1.0, 1.0, 64), vec![0.0]);
    }

    #[test]
    fn no_roots_when_positive() {
        assert!(bracket_roots(&|x: f64| 1.0 + x * x, -3.0, 3.0, 64).is_empty());
    }

    #[test]
    fn fd_orders() {
        assert_eq!(fd_derivative(&|_| 1.0, 0.3, 1, None), 0.0);
        assert!(fd_derivative(&|_| 4.2, 0.3, 1, None).abs() < 1e-9);
        assert!(fd_derivative(&|_| 4.2, 0.3, 2, None).abs() < 1e-6);
        assert!((fd_derivative(&|x| x * x, 3.0, 1, None) - 6.0).abs() < 1e-8);
        // d²/dx² sech x = sech x (1 - 2 sech² x)
        let s = 1.0 / 1f64.cosh();
        let exact = s * (1.0 - 2.0 * s * s);
        let got = fd_derivative(&|x: f64| 1.0 / x.cosh(), 1.0, 2, None);
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, f) = golden_section_min(&mut |x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 200, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversal_counting() {
        assert_eq!(count_reversals(&[0.0, 1.0, 2.0, 2.0, 1.0, 0.0], 0.0), (1, 0));
        assert_eq!(count_reversals(&[0.0, 1.0, 0.0, 1.0, 0.0], 0.0), (2, 1));
        assert_eq!(count_reversals(&[0.0; 5], 0.0), (0, 0));
    }
}
