//! Positive trial functions (h, j, J, H) and the auxiliary χ.
//!
//! Built-in families evaluate through [`Jet`]s, so first and second
//! derivatives are exact. Closures without derivatives fall back to
//! finite differences; sampled data goes through a clamped cubic spline.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, fd_derivative, gauss_7, Jet};
use crate::profiles::{EnergySlice, Params};

type EvalFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialFamily {
    Constant,
    TanhInterpolant,
    Bump,
    SechBump,
    LocalWaveNumber,
    MaxCut,
    ExpIntegralOfChi,
    CustomSampled,
    Custom,
}

impl TrialFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialFamily::Constant => "constant",
            TrialFamily::TanhInterpolant => "tanh-interpolant",
            TrialFamily::Bump => "bump",
            TrialFamily::SechBump => "sech-bump",
            TrialFamily::LocalWaveNumber => "local-wave-number",
            TrialFamily::MaxCut => "max-cut",
            TrialFamily::ExpIntegralOfChi => "exp-integral-of-chi",
            TrialFamily::CustomSampled => "custom-sampled",
            TrialFamily::Custom => "custom",
        }
    }
}

/// A trial function together with the places where it is not smooth.
///
/// `jumps` are discontinuities of the value; `kinks` are points where the
/// value is continuous but the first derivative is not.
#[derive(Clone)]
pub struct TrialFunction {
    family: TrialFamily,
    params: Params,
    eval: EvalFn,
    jumps: Vec<f64>,
    kinks: Vec<f64>,
}

impl fmt::Debug for TrialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrialFunction")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("jumps", &self.jumps)
            .field("kinks", &self.kinks)
            .finish()
    }
}

fn params_of(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl TrialFunction {
    fn build(
        family: TrialFamily,
        params: Params,
        eval: impl Fn(f64) -> Jet + Send + Sync + 'static,
        jumps: Vec<f64>,
        kinks: Vec<f64>,
    ) -> Self {
        TrialFunction { family, params, eval: Arc::new(eval), jumps, kinks }
    }

    pub fn constant(c: f64) -> Self {
        Self::build(TrialFamily::Constant, params_of(&[("value", c)]), move |_| Jet::constant(c), vec![], vec![])
    }

    /// `left + (right − left)·½(1 + tanh((x − center)/width))`.
    pub fn tanh_interpolant(left: f64, right: f64, center: f64, width: f64) -> Self {
        let p = params_of(&[("left", left), ("right", right), ("center", center), ("width", width)]);
        Self::build(
            TrialFamily::TanhInterpolant,
            p,
            move |x| (((Jet::var(x) - center) / width).tanh() + 1.0) * (0.5 * (right - left)) + left,
            vec![],
            vec![],
        )
    }

    /// `base + amplitude·sech²((x − center)/width)`.
    pub fn bump(base: f64, amplitude: f64, center: f64, width: f64) -> Self {
        let p = params_of(&[("base", base), ("amplitude", amplitude), ("center", center), ("width", width)]);
        Self::build(
            TrialFamily::Bump,
            p,
            move |x| ((Jet::var(x) - center) / width).sech().powf(2.0) * amplitude + base,
            vec![],
            vec![],
        )
    }

    /// `base + amplitude·sech((x − center)/width)`.
    pub fn sech_bump(base: f64, amplitude: f64, center: f64, width: f64) -> Self {
        let p = params_of(&[("base", base), ("amplitude", amplitude), ("center", center), ("width", width)]);
        Self::build(
            TrialFamily::SechBump,
            p,
            move |x| ((Jet::var(x) - center) / width).sech() * amplitude + base,
            vec![],
            vec![],
        )
    }

    /// The local wave number `k(x) = √k²(x)`, jumping wherever the
    /// potential does. Non-positive where `k² ≤ 0`.
    pub fn local_wave_number(slice: &EnergySlice) -> Self {
        let s = slice.clone();
        Self::build(
            TrialFamily::LocalWaveNumber,
            Params::new(),
            move |x| {
                let k2 = s.k2_jet(x);
                if k2.v > 0.0 {
                    k2.sqrt()
                } else {
                    Jet::constant(0.0)
                }
            },
            slice.profile().discontinuities(),
            vec![],
        )
    }

    /// `√max{k², Δ²}`. Kinks sit at the roots of `k² − Δ²` inside `window`.
    pub fn max_cut(slice: &EnergySlice, delta: f64, window: (f64, f64)) -> Self {
        let s = slice.clone();
        let d2 = delta * delta;
        let f = |x: f64| slice.k2(x) - d2;
        let cfg = slice.numerics();
        let kinks = numerics::bracket_roots_tol(&f, window.0, window.1, cfg.n_scan, cfg.root_tol);
        Self::build(
            TrialFamily::MaxCut,
            params_of(&[("delta", delta)]),
            move |x| {
                let k2 = s.k2_jet(x);
                if k2.v > d2 {
                    k2.sqrt()
                } else {
                    Jet::constant(delta)
                }
            },
            slice.profile().discontinuities(),
            kinks,
        )
    }

    /// `J(x) = exp ∫_{window.0}^{x} χ`, tabulated on `cells` uniform cells.
    ///
    /// Derivatives follow from `J′ = χJ` and `J″ = (χ′ + χ²)J`.
    pub fn exp_integral_of_chi(chi: TrialFunction, window: (f64, f64), cells: usize) -> Self {
        let (a, b) = window;
        let n = cells.max(1);
        let h = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + h * i as f64 }).collect();
        let c = chi.clone();
        let g = move |x: f64| c.value(x);
        let mut cum = vec![0.0; n + 1];
        for i in 0..n {
            cum[i + 1] = cum[i] + gauss_7(&g, xs[i], xs[i + 1]);
        }
        let mut params = chi.params.clone();
        params.insert("window_min".into(), a);
        params.insert("window_max".into(), b);
        let jumps = chi.jumps.clone();
        let kinks = chi.kinks.clone();
        let c = chi;
        Self::build(
            TrialFamily::ExpIntegralOfChi,
            params,
            move |x| {
                let g = |y: f64| c.value(y);
                let integral = if x <= a {
                    -gauss_7(&g, x, a)
                } else if x >= b {
                    cum[n] + gauss_7(&g, b, x)
                } else {
                    let i = (((x - a) / h) as usize).min(n - 1);
                    cum[i] + gauss_7(&g, xs[i], x)
                };
                let j = integral.exp();
                let ch = c.jet(x);
                Jet::new(j, ch.v * j, (ch.d1 + ch.v * ch.v) * j)
            },
            jumps,
            kinks,
        )
    }

    /// Clamped cubic spline through `(xs, ys)` with zero end slopes,
    /// extended by constants outside the sampled range.
    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::InvalidParam("a sampled trial function needs at least two (x, y) pairs".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParam("sample positions must be strictly increasing".into()));
        }
        let m = clamped_spline_moments(&xs, &ys);
        let params = params_of(&[("samples", n as f64), ("x_min", xs[0]), ("x_max", xs[n - 1])]);
        Ok(Self::build(TrialFamily::CustomSampled, params, move |x| spline_eval(&xs, &ys, &m, x), vec![], vec![]))
    }

    /// Wrap a plain closure; derivatives by fourth-order finite differences.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(
            TrialFamily::Custom,
            Params::new(),
            move |x| {
                let g = |y: f64| f(y);
                Jet::new(f(x), fd_derivative(&g, x, 1, None), fd_derivative(&g, x, 2, None))
            },
            vec![],
            vec![],
        )
    }

    /// Wrap a closure written in terms of jets.
    pub fn from_jet(f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self::build(TrialFamily::Custom, Params::new(), move |x| f(Jet::var(x)), vec![], vec![])
    }

    /// Mark positions where the function jumps or has a kink.
    pub fn with_singular_points(mut self, jumps: Vec<f64>, kinks: Vec<f64>) -> Self {
        self.jumps.extend(jumps);
        self.kinks.extend(kinks);
        self
    }

    /// `self^p`, keeping the family tag and recording the exponent.
    pub fn powf(&self, p: f64) -> Self {
        let inner = self.clone();
        let mut params = self.params.clone();
        let prev = params.get("power").copied().unwrap_or(1.0);
        params.insert("power".into(), prev * p);
        Self::build(self.family, params, move |x| inner.jet(x).powf(p), self.jumps.clone(), self.kinks.clone())
    }

    /// Pointwise product; the family tag of `self` is kept.
    pub fn mul(&self, other: &TrialFunction) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut params = self.params.clone();
        for (k, v) in &other.params {
            params.entry(format!("factor.{k}")).or_insert(*v);
        }
        let mut jumps = self.jumps.clone();
        jumps.extend(&other.jumps);
        let mut kinks = self.kinks.clone();
        kinks.extend(&other.kinks);
        Self::build(self.family, params, move |x| a.jet(x) * b.jet(x), jumps, kinks)
    }

    /// `c · self`.
    pub fn scale(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::build(self.family, self.params.clone(), move |x| inner.jet(x) * c, self.jumps.clone(), self.kinks.clone())
    }

    pub fn family(&self) -> TrialFamily {
        self.family
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn is_smooth(&self) -> bool {
        self.jumps.is_empty() && self.kinks.is_empty()
    }

    pub fn jet(&self, x: f64) -> Jet {
        (self.eval)(x)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).v
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.jet(x).d1
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.jet(x).d2
    }

    /// Check `value > 0` on a uniform scan of `window` and on both sides of
    /// every jump.
    pub fn check_positive(&self, window: (f64, f64), n_scan: usize) -> Result<()> {
        let check = |x: f64| {
            let v = self.value(x);
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonPositive { x, value: v })
            }
        };
        for x in numerics::grid(window.0, window.1, n_scan) {
            check(x)?;
        }
        for &j in &self.jumps {
            let eps = 1e-9 * (1.0 + j.abs());
            check(j - eps)?;
            check(j + eps)?;
        }
        Ok(())
    }
}

/// Second-derivative moments of the clamped spline with zero end slopes.
fn clamped_spline_moments(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0 * h[0];
    upper[0] = h[0];
    rhs[0] = 6.0 * slope[0];
    for i in 1..n - 1 {
        lower[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    lower[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = -6.0 * slope[n - 2];
    // Thomas algorithm.
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

fn spline_eval(xs: &[f64], ys: &[f64], m: &[f64], x: f64) -> Jet {
    let n = xs.len();
    if x <= xs[0] {
        return Jet::constant(ys[0]);
    }
    if x >= xs[n - 1] {
        return Jet::constant(ys[n - 1]);
    }
    let i = xs.partition_point(|&p| p <= x).saturating_sub(1).min(n - 2);
    let h = xs[i + 1] - xs[i];
    let (l, r) = (xs[i + 1] - x, x - xs[i]);
    let ca = ys[i] / h - m[i] * h / 6.0;
    let cb = ys[i + 1] / h - m[i + 1] * h / 6.0;
    Jet::new(
        m[i] * l.powi(3) / (6.0 * h) + m[i + 1] * r.powi(3) / (6.0 * h) + ca * l + cb * r,
        -m[i] * l * l / (2.0 * h) + m[i + 1] * r * r / (2.0 * h) - ca + cb,
        m[i] * l / h + m[i + 1] * r / h,
    )
}
