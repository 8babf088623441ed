//! Rigorous lower bounds `T ≥ sech²θ` on the transmission probability, the
//! WKB estimate for comparison, and the matching particle-number bounds.
//!
//! Every bound reduces to evaluating a non-negative functional `θ` of the
//! potential and of one or two positive trial functions. Integrals run over
//! the whole line: the slice window is grown until the integrand itself has
//! decayed below the tail tolerance, and a window that never closes marks
//! the bound as divergent (`T ≥ 0`).

pub mod trial;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{self, bracket_roots_tol, count_reversals, integrate, scan_max, truncate_window};
use crate::profiles::{forbidden_regions, EnergySlice, Params};

pub use trial::{TrialFamily, TrialFunction};

/// Which formula produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundFamily {
    Basic,
    Weak,
    HConst,
    MonotoneH,
    SingleExtremum,
    DeltaCut,
    KMin,
    ImprovedHj,
    ImprovedHBigJ,
    ImprovedBigHBigJ,
    ChiForm,
    Schwartzian,
    LowEnergy,
    OldLowEnergy,
    WkbLike,
    DeltaMg,
    Best,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 17] = [
        BoundFamily::Basic,
        BoundFamily::Weak,
        BoundFamily::HConst,
        BoundFamily::MonotoneH,
        BoundFamily::SingleExtremum,
        BoundFamily::DeltaCut,
        BoundFamily::KMin,
        BoundFamily::ImprovedHj,
        BoundFamily::ImprovedHBigJ,
        BoundFamily::ImprovedBigHBigJ,
        BoundFamily::ChiForm,
        BoundFamily::Schwartzian,
        BoundFamily::LowEnergy,
        BoundFamily::OldLowEnergy,
        BoundFamily::WkbLike,
        BoundFamily::DeltaMg,
        BoundFamily::Best,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundFamily::Basic => "basic",
            BoundFamily::Weak => "weak",
            BoundFamily::HConst => "hconst",
            BoundFamily::MonotoneH => "monotone-h",
            BoundFamily::SingleExtremum => "single-extremum",
            BoundFamily::DeltaCut => "delta-cut",
            BoundFamily::KMin => "kmin",
            BoundFamily::ImprovedHj => "improved-hj",
            BoundFamily::ImprovedHBigJ => "improved-hJ",
            BoundFamily::ImprovedBigHBigJ => "improved-HJ",
            BoundFamily::ChiForm => "chi-form",
            BoundFamily::Schwartzian => "schwartzian",
            BoundFamily::LowEnergy => "low-energy",
            BoundFamily::OldLowEnergy => "old-low-energy",
            BoundFamily::WkbLike => "wkb-like",
            BoundFamily::DeltaMg => "delta-mg",
            BoundFamily::Best => "best",
        }
    }

    pub fn parse(name: &str) -> Option<BoundFamily> {
        BoundFamily::ALL.iter().copied().find(|f| f.as_str() == name)
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BoundFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One named contribution to `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

fn terms(kv: &[(&str, f64)]) -> Vec<Term> {
    kv.iter().map(|(n, v)| Term { name: n.to_string(), value: *v }).collect()
}

/// `T ≥ bound = sech²θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub theta: f64,
    pub bound: f64,
    pub family: BoundFamily,
    pub params: Params,
    pub diagnostics: Vec<Term>,
    /// The defining integral diverges; `theta` is infinite and `bound` is 0.
    pub divergent: bool,
}

/// `sech²θ`, written to stay finite for large `θ`.
pub fn sech2(theta: f64) -> f64 {
    let e = (-2.0 * theta.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

impl BoundResult {
    pub fn new(family: BoundFamily, theta: f64, params: Params, diagnostics: Vec<Term>) -> Self {
        BoundResult { theta, bound: sech2(theta), family, params, diagnostics, divergent: false }
    }

    pub fn divergent(family: BoundFamily, params: Params) -> Self {
        BoundResult { theta: f64::INFINITY, bound: 0.0, family, params, diagnostics: Vec::new(), divergent: true }
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

/// `N ≤ sinh²θ`, the particle-production form of a transmission bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleBound {
    pub n_bound: f64,
    pub theta: f64,
}

pub fn to_particle_bound(b: &BoundResult) -> Result<ParticleBound> {
    if b.divergent || !b.theta.is_finite() {
        return Err(Error::DivergentBound);
    }
    let s = b.theta.sinh();
    Ok(ParticleBound { n_bound: s * s, theta: b.theta })
}

// ---------------------------------------------------------------------------
// Integration over the line

/// Integral of `f` over the whole line, or `None` when `f` does not decay.
///
/// The quadrature is cut at `splits` and at every root of either component
/// of `inner`, so integrands of the form `|g|` or `√(a² + b²)` are never
/// integrated across a kink. Both components are scanned in one pass.
fn line_integral(
    slice: &EnergySlice,
    f: &dyn Fn(f64) -> f64,
    inner: &dyn Fn(f64) -> [f64; 2],
    splits: &[f64],
) -> Result<Option<f64>> {
    let cfg = slice.numerics();
    let base = slice.window()?;
    let scale = slice.profile().scale();
    let dev = |x: f64, _side: i8| {
        let v = f(x).abs();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (a, b) = match truncate_window(&dev, base, scale, cfg.quad.tail_tol) {
        Ok(w) => w,
        Err(Error::NoConvergence(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut cuts: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    cuts.extend(slice.profile().discontinuities());
    cuts.extend(pair_roots(inner, a, b, cfg.n_scan, cfg.root_tol));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    integrate(f, a, b, &cuts, &cfg.quad).map(Some)
}

/// Sign changes of either component of `g` on a uniform scan, refined by
/// bisection.
fn pair_roots(g: &dyn Fn(f64) -> [f64; 2], a: f64, b: f64, n_scan: usize, tol: f64) -> Vec<f64> {
    let xs: Vec<f64> = numerics::grid(a, b, n_scan.max(1)).collect();
    let gs: Vec<[f64; 2]> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for c in 0..2 {
        let one = |x: f64| g(x)[c];
        for i in 1..xs.len() {
            let (f0, f1) = (gs[i - 1][c], gs[i][c]);
            if f0 == 0.0 || f1 == 0.0 {
                // Exact zeros on the grid are cut points only when isolated.
                if f1 == 0.0 && f0 != 0.0 && gs.get(i + 1).map_or(true, |n| n[c] != 0.0) {
                    roots.push(xs[i]);
                }
            } else if (f0 < 0.0) != (f1 < 0.0) {
                roots.extend(bracket_roots_tol(&one, xs[i - 1], xs[i], 1, tol));
            }
        }
    }
    roots
}

/// A single inner expression padded with a root-free constant.
fn single(g: impl Fn(f64) -> f64) -> impl Fn(f64) -> [f64; 2] {
    move |x| [g(x), 1.0]
}

/// `½ Σ |ln(h(x⁺)/h(x⁻))|` over the jumps of `h`.
fn jump_log_sum(h: &TrialFunction) -> f64 {
    h.jumps()
        .iter()
        .map(|&x| {
            let eps = 1e-9 * (1.0 + x.abs());
            0.5 * (h.value(x + eps) / h.value(x - eps)).ln().abs()
        })
        .sum()
}

fn check_trial(slice: &EnergySlice, t: &TrialFunction) -> Result<(f64, f64)> {
    let w = slice.window()?;
    t.check_positive(w, slice.numerics().n_scan)?;
    Ok(w)
}

fn params_of(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn trial_params(prefix: &str, t: &TrialFunction) -> Params {
    t.params().iter().map(|(k, v)| (format!("{prefix}.{k}"), *v)).collect()
}

// ---------------------------------------------------------------------------
// Shape certification

/// Samples of `k²` on the scan grid.
fn k2_samples(slice: &EnergySlice, window: (f64, f64)) -> Vec<f64> {
    numerics::grid(window.0, window.1, slice.numerics().n_scan).map(|x| slice.k2(x)).collect()
}

fn k2_noise(slice: &EnergySlice) -> f64 {
    let e = slice.energy().abs();
    let v = slice.profile().v_minus_inf().abs().max(slice.profile().v_plus_inf().abs());
    1e-12 * (e + v + slice.profile().height().abs()).max(1e-300)
}

/// The single-hump condition on `k²`: no interior maximum and at most one
/// interior minimum, certified from the sign pattern of sampled differences.
fn certify_single_hump(slice: &EnergySlice, window: (f64, f64)) -> Result<()> {
    let (up_down, down_up) = count_reversals(&k2_samples(slice, window), k2_noise(slice));
    if up_down > 0 {
        return Err(Error::PreconditionFailed(format!(
            "k^2 has {up_down} interior maximum/maxima (potential well); single-hump shape required"
        )));
    }
    if down_up > 1 {
        return Err(Error::PreconditionFailed(format!(
            "multiple minima of k^2 detected ({down_up}); single-hump shape required"
        )));
    }
    Ok(())
}

/// Require `V ≥ V(±∞)`, i.e. `k² ≤ k∞²` everywhere sampled.
fn certify_positive_potential(slice: &EnergySlice, window: (f64, f64), k_inf: f64) -> Result<()> {
    let k2_inf = k_inf * k_inf;
    let tol = k2_noise(slice);
    for x in numerics::grid(window.0, window.1, slice.numerics().n_scan) {
        if slice.k2(x) > k2_inf + tol {
            return Err(Error::PreconditionFailed(format!(
                "potential dips below its asymptote at x = {x}; an everywhere-positive potential is required"
            )));
        }
    }
    Ok(())
}

/// Minimum of `k²` over the window: scan, refinement, and the interior of
/// each constant piece of a sharp profile.
pub fn k2_min(slice: &EnergySlice, window: (f64, f64)) -> f64 {
    let neg = |x: f64| -slice.k2(x);
    let mut m = -scan_max(&neg, window.0, window.1, slice.numerics().n_scan).1;
    let mut d = slice.profile().discontinuities();
    d.sort_by(f64::total_cmp);
    for w in d.windows(2) {
        m = m.min(slice.k2(0.5 * (w[0] + w[1])));
    }
    m
}

// ---------------------------------------------------------------------------
// Baseline bound and its weak form

/// Pointwise integrand `√(h′² + (k² − h²)²)/(2h)` of the baseline bound.
pub fn theta_integrand<'a>(slice: &'a EnergySlice, h: &'a TrialFunction) -> Result<impl Fn(f64) -> f64 + 'a> {
    check_trial(slice, h)?;
    Ok(move |x: f64| {
        let hj = h.jet(x);
        let q = slice.k2(x) - hj.v * hj.v;
        (hj.d1 * hj.d1 + q * q).sqrt() / (2.0 * hj.v)
    })
}

/// `θ = ∫ √(h′² + (k² − h²)²)/(2h)`; jumps of `h` add `½|Δ ln h|`.
pub fn bound_basic(slice: &EnergySlice, h: &TrialFunction) -> Result<BoundResult> {
    let params = trial_params("h", h);
    let f = theta_integrand(slice, h)?;
    let d1 = |x: f64| h.d1(x);
    let q = |x: f64| {
        let v = h.value(x);
        slice.k2(x) - v * v
    };
    let mut splits = h.jumps().to_vec();
    splits.extend(h.kinks());
    let Some(integral) = line_integral(slice, &f, &|x| [d1(x), q(x)], &splits)? else {
        return Ok(BoundResult::divergent(BoundFamily::Basic, params));
    };
    let jumps = jump_log_sum(h);
    Ok(BoundResult::new(
        BoundFamily::Basic,
        integral + jumps,
        params,
        terms(&[("integral", integral), ("jumps", jumps)]),
    ))
}

/// The triangle-inequality weakening `θ = ½∫[|(ln h)′| + |k² − h²|/h]`.
pub fn bound_basic_weak(slice: &EnergySlice, h: &TrialFunction) -> Result<BoundResult> {
    let params = trial_params("h", h);
    check_trial(slice, h)?;
    let log_part = |x: f64| {
        let j = h.jet(x);
        0.5 * (j.d1 / j.v).abs()
    };
    let mismatch = |x: f64| {
        let v = h.value(x);
        0.5 * (slice.k2(x) - v * v).abs() / v
    };
    let d1 = |x: f64| h.d1(x);
    let q = |x: f64| {
        let v = h.value(x);
        slice.k2(x) - v * v
    };
    let mut splits = h.jumps().to_vec();
    splits.extend(h.kinks());
    let lp = line_integral(slice, &log_part, &single(d1), &splits)?;
    let mm = line_integral(slice, &mismatch, &single(q), &splits)?;
    let (Some(lp), Some(mm)) = (lp, mm) else {
        return Ok(BoundResult::divergent(BoundFamily::Weak, params));
    };
    let jumps = jump_log_sum(h);
    Ok(BoundResult::new(
        BoundFamily::Weak,
        lp + jumps + mm,
        params,
        terms(&[("log-derivative", lp), ("jumps", jumps), ("mismatch", mm)]),
    ))
}

// ---------------------------------------------------------------------------
// Special cases

/// The closed-form specialisations of the baseline bound.
#[derive(Debug, Clone)]
pub enum SpecialCase {
    /// `h = k∞`.
    HConst,
    /// `h` interpolating monotonically between `k(−∞)` and `k(+∞)`; `None`
    /// picks `h = k` when that is positive and monotone, otherwise a tanh
    /// interpolant.
    MonotoneH(Option<TrialFunction>),
    /// `h` with exactly one extremum; `None` picks `h = k` where `k² > 0`.
    SingleExtremum(Option<TrialFunction>),
    /// `h² = max{k², Δ²}`.
    DeltaCut(f64),
    /// The `Δ → k_min` limit of `DeltaCut`.
    KMin,
}

/// `∫ |k∞² − k²|/(2k∞)` over the allowed part of the line, or over all of
/// it when `forbidden` is empty; forbidden intervals contribute zero.
fn mismatch_integral(slice: &EnergySlice, k_inf: f64, forbidden: &[(f64, f64)]) -> Result<Option<f64>> {
    let k2_inf = k_inf * k_inf;
    let masked = !forbidden.is_empty();
    let f = |x: f64| {
        let k2 = slice.k2(x);
        if masked && k2 < 0.0 {
            0.0
        } else {
            (k2_inf - k2).abs() / (2.0 * k_inf)
        }
    };
    let g = move |x: f64| k2_inf - slice.k2(x);
    let splits: Vec<f64> = forbidden.iter().flat_map(|&(a, b)| [a, b]).collect();
    line_integral(slice, &f, &single(g), &splits)
}

pub fn bound_special(slice: &EnergySlice, case: &SpecialCase) -> Result<BoundResult> {
    let (km, kp) = (slice.k_minus_inf(), slice.k_plus_inf());
    match case {
        SpecialCase::HConst => {
            let k = slice.k_inf()?;
            let params = params_of(&[("h", k)]);
            match mismatch_integral(slice, k, &[])? {
                Some(i) => Ok(BoundResult::new(BoundFamily::HConst, i, params, terms(&[("integral", i)]))),
                None => Ok(BoundResult::divergent(BoundFamily::HConst, params)),
            }
        }
        SpecialCase::MonotoneH(h) => {
            let w = slice.window()?;
            let h = match h {
                Some(h) => h.clone(),
                None => default_monotone_h(slice, w),
            };
            check_trial(slice, &h)?;
            let samples: Vec<f64> = numerics::grid(w.0, w.1, slice.numerics().n_scan).map(|x| h.value(x)).collect();
            let (a, b) = count_reversals(&samples, 1e-12 * (km + kp));
            if a + b > 0 {
                return Err(Error::PreconditionFailed("trial function h is not monotone".into()));
            }
            let log = 0.5 * (kp / km).ln().abs();
            extremal_case(slice, BoundFamily::MonotoneH, &h, log)
        }
        SpecialCase::SingleExtremum(h) => {
            let w = slice.window()?;
            let h = match h {
                Some(h) => h.clone(),
                None => {
                    if k2_min(slice, w) <= 0.0 {
                        return Err(Error::PreconditionFailed(
                            "no default h: k^2 <= 0 somewhere; supply a positive trial function".into(),
                        ));
                    }
                    TrialFunction::local_wave_number(slice)
                }
            };
            check_trial(slice, &h)?;
            let n = slice.numerics().n_scan;
            let samples: Vec<f64> = numerics::grid(w.0, w.1, n).map(|x| h.value(x)).collect();
            let (up_down, down_up) = count_reversals(&samples, 1e-12 * (km + kp));
            let h_ext = match (up_down, down_up) {
                (1, 0) => scan_max(&|x| h.value(x), w.0, w.1, n).1,
                (0, 1) => -scan_max(&|x| -h.value(x), w.0, w.1, n).1,
                _ => {
                    return Err(Error::PreconditionFailed(format!(
                        "trial function h must have exactly one extremum (found {})",
                        up_down + down_up
                    )))
                }
            };
            let log = 0.5 * (kp * km / (h_ext * h_ext)).ln().abs();
            let mut r = extremal_case(slice, BoundFamily::SingleExtremum, &h, log)?;
            r.params.insert("h_ext".into(), h_ext);
            Ok(r)
        }
        SpecialCase::DeltaCut(delta) => {
            let w = slice.window()?;
            let delta = *delta;
            check_delta(slice, w, delta, true)?;
            certify_single_hump(slice, w)?;
            let d2 = delta * delta;
            let log = 0.5 * (kp * km / d2).ln();
            let params = params_of(&[("delta", delta)]);
            let cut = cut_terms(slice, d2)?;
            let Some(cut) = cut else {
                return Ok(BoundResult::divergent(BoundFamily::DeltaCut, params));
            };
            let integral = cut.linear_integral / (2.0 * delta);
            Ok(BoundResult::new(
                BoundFamily::DeltaCut,
                log + integral,
                params,
                terms(&[("log", log), ("integral", integral)]),
            ))
        }
        SpecialCase::KMin => {
            let w = slice.window()?;
            let m = k2_min(slice, w);
            if !(m > 0.0) {
                return Err(Error::PreconditionFailed(format!("KMin needs k^2 > 0 everywhere (min k^2 = {m:e})")));
            }
            certify_single_hump(slice, w)?;
            let log = 0.5 * (kp * km / m).ln();
            Ok(BoundResult::new(BoundFamily::KMin, log, params_of(&[("k2_min", m)]), terms(&[("log", log)])))
        }
    }
}

fn default_monotone_h(slice: &EnergySlice, w: (f64, f64)) -> TrialFunction {
    let samples = k2_samples(slice, w);
    let (a, b) = count_reversals(&samples, k2_noise(slice));
    if a + b == 0 && samples.iter().all(|&v| v > 0.0) {
        TrialFunction::local_wave_number(slice)
    } else {
        let p = slice.profile();
        TrialFunction::tanh_interpolant(slice.k_minus_inf(), slice.k_plus_inf(), p.center(), p.scale())
    }
}

/// `log + ½∫|k² − h²|/h` for the monotone and single-extremum cases.
fn extremal_case(slice: &EnergySlice, family: BoundFamily, h: &TrialFunction, log: f64) -> Result<BoundResult> {
    let params = trial_params("h", h);
    let f = |x: f64| {
        let v = h.value(x);
        0.5 * (slice.k2(x) - v * v).abs() / v
    };
    let q = |x: f64| {
        let v = h.value(x);
        slice.k2(x) - v * v
    };
    let mut splits = h.jumps().to_vec();
    splits.extend(h.kinks());
    match line_integral(slice, &f, &single(q), &splits)? {
        Some(i) => Ok(BoundResult::new(family, log + i, params, terms(&[("log", log), ("integral", i)]))),
        None => Ok(BoundResult::divergent(family, params)),
    }
}

fn check_delta(slice: &EnergySlice, w: (f64, f64), delta: f64, need_above_min: bool) -> Result<()> {
    let k_lo = slice.k_minus_inf().min(slice.k_plus_inf());
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(format!("delta must be positive, got {delta}")));
    }
    if delta > k_lo * (1.0 + 1e-12) {
        return Err(Error::InvalidDelta(format!("delta = {delta} exceeds min(k(-inf), k(+inf)) = {k_lo}")));
    }
    if need_above_min {
        let m = k2_min(slice, w);
        if delta * delta < m * (1.0 - 1e-12) {
            return Err(Error::InvalidDelta(format!("delta^2 = {} is below min k^2 = {m}", delta * delta)));
        }
    }
    Ok(())
}

/// Pieces of the `max{k², Δ²}` constructions.
#[derive(Debug, Clone, Copy)]
struct CutTerms {
    /// `max √(Δ² − k²)` (zero if the region `Δ² > k²` is empty).
    peak: f64,
    /// `∫_{Δ²>k²} √(Δ² − k²)`.
    sqrt_integral: f64,
    /// `∫_{Δ²>k²} (Δ² − k²)`.
    linear_integral: f64,
}

fn cut_terms(slice: &EnergySlice, d2: f64) -> Result<Option<CutTerms>> {
    // Differences at the rounding level of d2 itself count as zero, so that
    // d2 = k_inf^2 leaves the tails exactly flat.
    let g = |x: f64| {
        let k2 = slice.k2(x);
        let v = d2 - k2;
        if v.abs() <= 4.0 * f64::EPSILON * d2.abs().max(k2.abs()) {
            0.0
        } else {
            v
        }
    };
    let sq = |x: f64| g(x).max(0.0).sqrt();
    let lin = |x: f64| g(x).max(0.0);
    let w = slice.window()?;
    let mut peak = scan_max(&lin, w.0, w.1, slice.numerics().n_scan).1;
    let mut d = slice.profile().discontinuities();
    d.sort_by(f64::total_cmp);
    for p in d.windows(2) {
        peak = peak.max(lin(0.5 * (p[0] + p[1])));
    }
    let (Some(s), Some(l)) =
        (line_integral(slice, &sq, &single(g), &[])?, line_integral(slice, &lin, &single(g), &[])?)
    else {
        return Ok(None);
    };
    Ok(Some(CutTerms { peak: peak.sqrt(), sqrt_integral: s, linear_integral: l }))
}

// ---------------------------------------------------------------------------
// Improved bounds

/// The three equivalent improved-bound integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImprovedForm {
    /// `(h, j)` with `j = X′`.
    #[serde(rename = "hj")]
    Hj,
    /// `(h, J)` with `J⁻² = X′`.
    #[serde(rename = "hJ")]
    HBigJ,
    /// `(H, J)` with `h = HJ²`.
    #[serde(rename = "HJ")]
    BigHBigJ,
}

impl ImprovedForm {
    pub fn family(&self) -> BoundFamily {
        match self {
            ImprovedForm::Hj => BoundFamily::ImprovedHj,
            ImprovedForm::HBigJ => BoundFamily::ImprovedHBigJ,
            ImprovedForm::BigHBigJ => BoundFamily::ImprovedBigHBigJ,
        }
    }

    pub fn parse(s: &str) -> Option<ImprovedForm> {
        match s {
            "hj" => Some(ImprovedForm::Hj),
            "hJ" => Some(ImprovedForm::HBigJ),
            "HJ" => Some(ImprovedForm::BigHBigJ),
            _ => None,
        }
    }
}

/// `(a, q, denominator)` such that the integrand is `√(a² + q²)/denominator`.
fn improved_parts(form: ImprovedForm, k2: f64, f1: numerics::Jet, f2: numerics::Jet) -> (f64, f64, f64) {
    match form {
        ImprovedForm::Hj => {
            let (h, j) = (f1, f2);
            let r = j.d1 / j.v;
            let q = (k2 - 0.5 * j.d2 / j.v + 0.75 * r * r) / j.v - j.v * h.v * h.v;
            (h.d1, q, 2.0 * h.v)
        }
        ImprovedForm::HBigJ => {
            let (h, big_j) = (f1, f2);
            let j2 = big_j.v * big_j.v;
            let q = j2 * k2 + big_j.v * big_j.d2 - h.v * h.v / j2;
            (h.d1, q, 2.0 * h.v)
        }
        ImprovedForm::BigHBigJ => {
            let (big_h, big_j) = (f1, f2);
            let a = big_h.d1 + 2.0 * big_h.v * big_j.d1 / big_j.v;
            let q = k2 + big_j.d2 / big_j.v - big_h.v * big_h.v;
            (a, q, 2.0 * big_h.v)
        }
    }
}

/// Evaluate one of the improved bounds with trial functions `f1` (h or H)
/// and `f2` (j or J).
pub fn bound_improved(
    slice: &EnergySlice,
    form: ImprovedForm,
    f1: &TrialFunction,
    f2: &TrialFunction,
) -> Result<BoundResult> {
    if !f1.jumps().is_empty() || !f2.jumps().is_empty() {
        return Err(Error::PreconditionFailed(
            "improved bounds need continuous trial functions; jumps are not supported".into(),
        ));
    }
    let (n1, n2) = match form {
        ImprovedForm::Hj => ("h", "j"),
        ImprovedForm::HBigJ => ("h", "J"),
        ImprovedForm::BigHBigJ => ("H", "J"),
    };
    let mut params = trial_params(n1, f1);
    params.extend(trial_params(n2, f2));
    check_trial(slice, f1)?;
    check_trial(slice, f2)?;
    let parts = |x: f64| improved_parts(form, slice.k2(x), f1.jet(x), f2.jet(x));
    let f = |x: f64| {
        let (a, q, d) = parts(x);
        (a * a + q * q).sqrt() / d
    };
    let pair = |x: f64| {
        let (a, q, _) = parts(x);
        [a, q]
    };
    let mut splits = f1.kinks().to_vec();
    splits.extend(f2.kinks());
    match line_integral(slice, &f, &pair, &splits)? {
        Some(i) => Ok(BoundResult::new(form.family(), i, params, terms(&[("integral", i)]))),
        None => Ok(BoundResult::divergent(form.family(), params)),
    }
}

/// The general `(H, χ)` form with `J = exp∫χ`:
/// `θ = ∫ ½√([H′/H + 2χ]² + [k² + χ² + χ′ − H²]²/H²)`.
///
/// `chi` may take any sign; only `H` must be positive.
pub fn bound_chi_form(slice: &EnergySlice, big_h: &TrialFunction, chi: &TrialFunction) -> Result<BoundResult> {
    if !big_h.jumps().is_empty() || !chi.jumps().is_empty() {
        return Err(Error::PreconditionFailed("chi-form bound needs continuous H and chi".into()));
    }
    let mut params = trial_params("H", big_h);
    params.extend(trial_params("chi", chi));
    check_trial(slice, big_h)?;
    let parts = |x: f64| {
        let h = big_h.jet(x);
        let c = chi.jet(x);
        let a = h.d1 / h.v + 2.0 * c.v;
        let q = (slice.k2(x) + c.v * c.v + c.d1 - h.v * h.v) / h.v;
        (a, q)
    };
    let f = |x: f64| {
        let (a, q) = parts(x);
        0.5 * (a * a + q * q).sqrt()
    };
    let pair = |x: f64| {
        let (a, q) = parts(x);
        [a, q]
    };
    let mut splits = big_h.kinks().to_vec();
    splits.extend(chi.kinks());
    match line_integral(slice, &f, &pair, &splits)? {
        Some(i) => Ok(BoundResult::new(BoundFamily::ChiForm, i, params, terms(&[("integral", i)]))),
        None => Ok(BoundResult::divergent(BoundFamily::ChiForm, params)),
    }
}

// ---------------------------------------------------------------------------
// Explicit bounds

/// `θ = ½∫|w w″|` with `w = (k²)^(−1/4)`.
pub fn bound_schwartzian(slice: &EnergySlice) -> Result<BoundResult> {
    let k_inf = slice.k_inf()?;
    let w = slice.window()?;
    let m = k2_min(slice, w);
    if !(m > 0.0) {
        return Err(Error::ForbiddenRegionPresent { min_k2: m });
    }
    if !slice.profile().is_smooth() {
        return Err(Error::PreconditionFailed(
            "the Schwartzian bound needs a smooth potential; this profile has jumps".into(),
        ));
    }
    let ww2 = |x: f64| {
        let w = slice.k2_jet(x).powf(-0.25);
        w.v * w.d2
    };
    let f = |x: f64| 0.5 * ww2(x).abs();
    let params = params_of(&[("k_inf", k_inf)]);
    match line_integral(slice, &f, &single(ww2), &[])? {
        Some(i) => Ok(BoundResult::new(BoundFamily::Schwartzian, i, params, terms(&[("integral", i)]))),
        None => Ok(BoundResult::divergent(BoundFamily::Schwartzian, params)),
    }
}

/// `θ = max√(k∞² − k²)/k∞ + ∫√(k∞² − k²)` for single-hump positive potentials.
pub fn bound_low_energy(slice: &EnergySlice) -> Result<BoundResult> {
    let k = slice.k_inf()?;
    let w = slice.window()?;
    certify_positive_potential(slice, w, k)?;
    certify_single_hump(slice, w)?;
    let params = params_of(&[("k_inf", k)]);
    let Some(c) = cut_terms(slice, k * k)? else {
        return Ok(BoundResult::divergent(BoundFamily::LowEnergy, params));
    };
    let peak = c.peak / k;
    Ok(BoundResult::new(
        BoundFamily::LowEnergy,
        peak + c.sqrt_integral,
        params,
        terms(&[("peak", peak), ("integral", c.sqrt_integral)]),
    ))
}

/// `θ = (1/(2k∞))∫(k∞² − k²)` for positive potentials.
pub fn bound_old_low_energy(slice: &EnergySlice) -> Result<BoundResult> {
    let k = slice.k_inf()?;
    let w = slice.window()?;
    certify_positive_potential(slice, w, k)?;
    let params = params_of(&[("k_inf", k)]);
    let Some(c) = cut_terms(slice, k * k)? else {
        return Ok(BoundResult::divergent(BoundFamily::OldLowEnergy, params));
    };
    let i = c.linear_integral / (2.0 * k);
    Ok(BoundResult::new(BoundFamily::OldLowEnergy, i, params, terms(&[("integral", i)])))
}

/// `θ = ∫κ + κ_max/k∞ + k∞L/2 + ∫_{k²>0}|k∞² − k²|/(2k∞)`.
///
/// Requires at most one forbidden interval with `κ` rising then falling
/// inside it, so that the total variation of `κ` equals `2κ_max`.
pub fn bound_wkb_like(slice: &EnergySlice) -> Result<BoundResult> {
    let k = slice.k_inf()?;
    let w = slice.window()?;
    let fr = forbidden_regions(slice, w)?;
    if fr.intervals.len() > 1 {
        return Err(Error::PreconditionFailed(format!(
            "{} separate forbidden regions; the WKB-like bound needs a single hump",
            fr.intervals.len()
        )));
    }
    if let Some(&(a, b)) = fr.intervals.first() {
        let kappa: Vec<f64> =
            numerics::grid(a, b, slice.numerics().n_scan).map(|x| (-slice.k2(x)).max(0.0).sqrt()).collect();
        let (up_down, down_up) = count_reversals(&kappa, 1e-12 * fr.kappa_max.max(k));
        if down_up > 0 || up_down > 1 {
            return Err(Error::PreconditionFailed(
                "kappa has more than one maximum inside the forbidden region".into(),
            ));
        }
    }
    let params = params_of(&[("k_inf", k)]);
    let Some(allowed) = mismatch_integral(slice, k, &fr.intervals)? else {
        return Ok(BoundResult::divergent(BoundFamily::WkbLike, params));
    };
    let peak = fr.kappa_max / k;
    let width = k * fr.total_width / 2.0;
    let theta = fr.penetration_integral + peak + width + allowed;
    Ok(BoundResult::new(
        BoundFamily::WkbLike,
        theta,
        params,
        terms(&[
            ("penetration", fr.penetration_integral),
            ("kappa_peak", peak),
            ("width", width),
            ("allowed", allowed),
        ]),
    ))
}

/// The semiclassical estimate; not a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbEstimate {
    /// `sech²(∫κ + ln 2)`.
    pub sech2_form: f64,
    /// `exp(−2∫κ)`.
    pub exp_form: f64,
    pub penetration_integral: f64,
    /// No forbidden region: both forms are reported as 1.
    pub no_barrier: bool,
}

pub fn wkb_estimate(slice: &EnergySlice) -> Result<WkbEstimate> {
    let fr = forbidden_regions(slice, slice.window()?)?;
    if fr.is_empty() {
        return Ok(WkbEstimate { sech2_form: 1.0, exp_form: 1.0, penetration_integral: 0.0, no_barrier: true });
    }
    let i = fr.penetration_integral;
    Ok(WkbEstimate {
        sech2_form: sech2(i + std::f64::consts::LN_2),
        exp_form: (-2.0 * i).exp(),
        penetration_integral: i,
        no_barrier: false,
    })
}

/// `θ = ½ln(k₊k₋/Δ²) + max√(Δ² − k²)/Δ + ∫_{Δ²>k²}√(Δ² − k²)`.
pub fn bound_delta_mg(slice: &EnergySlice, delta: f64) -> Result<BoundResult> {
    let w = slice.window()?;
    check_delta(slice, w, delta, false)?;
    certify_single_hump(slice, w)?;
    let (km, kp) = (slice.k_minus_inf(), slice.k_plus_inf());
    let d2 = delta * delta;
    let params = params_of(&[("delta", delta)]);
    let Some(c) = cut_terms(slice, d2)? else {
        return Ok(BoundResult::divergent(BoundFamily::DeltaMg, params));
    };
    let log = 0.5 * (kp * km / d2).ln();
    let peak = c.peak / delta;
    Ok(BoundResult::new(
        BoundFamily::DeltaMg,
        log + peak + c.sqrt_integral,
        params,
        terms(&[("log", log), ("peak", peak), ("integral", c.sqrt_integral)]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::PotentialProfile;

    fn slice(name: &str, kv: &[(&str, f64)], e: f64) -> EnergySlice {
        let p: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        EnergySlice::new(PotentialProfile::named(name, &p).unwrap(), e).unwrap()
    }

    #[test]
    fn integrand_examples() {
        let s = slice("square", &[], 2.0);
        let h = TrialFunction::constant(2f64.sqrt());
        let f = theta_integrand(&s, &h).unwrap();
        assert!((f(0.5) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(f(-3.0).abs() < 1e-15);
    }

    #[test]
    fn square_half_height_is_saturated() {
        let s = slice("square", &[], 0.5);
        let b = bound_basic(&s, &TrialFunction::constant(0.5f64.sqrt())).unwrap();
        assert!((b.theta - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((b.bound - sech2(0.5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn sharp_step_weak_bound_with_h_equal_k() {
        let s = slice("sharp-step", &[], 2.0);
        let b = bound_basic_weak(&s, &TrialFunction::local_wave_number(&s)).unwrap();
        let (km, kp) = (2f64.sqrt(), 1.0);
        assert!((b.bound - 4.0 * km * kp / ((km + kp) * (km + kp))).abs() < 1e-12);
    }

    #[test]
    fn delta_mg_square_example() {
        let s = slice("square", &[], 2.0);
        let b = bound_delta_mg(&s, 1.2).unwrap();
        let expect = 0.5 * (2.0f64 / 1.44).ln() + 0.44f64.sqrt() / 1.2 + 0.44f64.sqrt();
        assert!((b.theta - expect).abs() < 1e-10, "{} vs {expect}", b.theta);
        assert_eq!(b.diagnostics.len(), 3);
    }

    #[test]
    fn wkb_like_square_terms() {
        let s = slice("square", &[], 0.5);
        let b = bound_wkb_like(&s).unwrap();
        let r = 0.5f64.sqrt();
        assert!((b.diagnostic("penetration").unwrap() - r).abs() < 1e-10);
        assert!((b.diagnostic("kappa_peak").unwrap() - 1.0).abs() < 1e-10);
        assert!((b.diagnostic("width").unwrap() - r / 2.0).abs() < 1e-10);
        assert!(b.diagnostic("allowed").unwrap().abs() < 1e-12, "{:?}", b.diagnostics);
    }

    #[test]
    fn particle_bound_identity() {
        let b = BoundResult::new(BoundFamily::HConst, 0.5f64.sqrt(), Params::new(), vec![]);
        let n = to_particle_bound(&b).unwrap();
        assert!((n.n_bound * b.bound + b.bound - 1.0).abs() < 1e-12);
        assert!(to_particle_bound(&BoundResult::divergent(BoundFamily::Basic, Params::new())).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in BoundFamily::ALL {
            assert_eq!(BoundFamily::parse(f.as_str()), Some(f));
        }
    }
}
