//! Deterministic searches over the free parameters of the bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    bound_basic, bound_delta_mg, bound_improved, bound_low_energy, bound_old_low_energy, bound_schwartzian,
    bound_special, bound_wkb_like, k2_min, BoundFamily, BoundResult, ImprovedForm, SpecialCase, Term, TrialFunction,
};
use crate::error::{Error, Result};
use crate::numerics::{count_reversals, golden_section_min};
use crate::profiles::{EnergySlice, Params};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeConfig {
    /// Bound evaluations allowed per parametric trial family.
    pub budget: usize,
    /// Points in the fallback Δ grid when θ(Δ) is not unimodal.
    pub delta_grid: usize,
    /// Golden-section evaluations for each Δ refinement.
    pub golden_evals: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { budget: 200, delta_grid: 64, golden_evals: 60 }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 || self.delta_grid < 3 || self.golden_evals < 3 {
            return Err(Error::InvalidConfig("budget >= 1, delta_grid >= 3 and golden_evals >= 3 required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    pub best_params: Params,
    pub best_bound: BoundResult,
    pub evaluations: usize,
    pub trace: Vec<(Params, f64)>,
    /// The search stopped because the evaluation budget ran out.
    pub budget_exhausted: bool,
}

/// Bound families with a free `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeltaFamily {
    DeltaCut,
    DeltaMg,
}

impl DeltaFamily {
    fn evaluate(&self, slice: &EnergySlice, delta: f64) -> Result<BoundResult> {
        match self {
            DeltaFamily::DeltaCut => bound_special(slice, &SpecialCase::DeltaCut(delta)),
            DeltaFamily::DeltaMg => bound_delta_mg(slice, delta),
        }
    }
}

struct Tracker<'a> {
    slice: &'a EnergySlice,
    trace: Vec<(Params, f64)>,
    best: Option<BoundResult>,
}

impl Tracker<'_> {
    fn record(&mut self, params: Params, r: Result<BoundResult>) -> f64 {
        let theta = match r {
            Ok(b) if !b.divergent => {
                let t = b.theta;
                if self.best.as_ref().map_or(true, |cur| t < cur.theta) {
                    self.best = Some(b);
                }
                t
            }
            _ => f64::INFINITY,
        };
        self.trace.push((params, theta));
        theta
    }

    fn finish(self, exhausted: bool, what: &str) -> Result<OptimizationReport> {
        let evaluations = self.trace.len();
        let best = self.best.ok_or_else(|| {
            Error::PreconditionFailed(format!(
                "{what}: no feasible parameter point for {} at E = {}",
                self.slice.profile().name(),
                self.slice.energy()
            ))
        })?;
        Ok(OptimizationReport {
            best_params: best.params.clone(),
            best_bound: best,
            evaluations,
            trace: self.trace,
            budget_exhausted: exhausted,
        })
    }
}

/// Valid `Δ` interval `(max(0, k_min), min{k₋, k₊}]`, with the open lower
/// end nudged inside.
fn delta_interval(slice: &EnergySlice) -> Result<(f64, f64)> {
    let hi = slice.k_minus_inf().min(slice.k_plus_inf());
    let m = k2_min(slice, slice.window()?);
    let lo = if m > 0.0 { m.sqrt() } else { 0.0 };
    if lo > hi * (1.0 + 1e-12) {
        return Err(Error::PreconditionFailed(format!("empty delta interval ({lo}, {hi}]")));
    }
    // θ grows like ln(1/Δ) as Δ → 0, so the bottom of the range is never optimal.
    Ok((lo.max(1e-3 * hi).min(hi), hi))
}

/// Minimise `θ(Δ)` for a Δ-parametrised family.
///
/// Nine probes decide whether `θ(Δ)` looks unimodal; if so a golden-section
/// search refines around the best probe, otherwise a `delta_grid` scan is
/// refined the same way.
pub fn optimize_delta(slice: &EnergySlice, family: DeltaFamily, cfg: &OptimizeConfig) -> Result<OptimizationReport> {
    cfg.validate()?;
    let (lo, hi) = delta_interval(slice)?;
    let mut tr = Tracker { slice, trace: Vec::new(), best: None };
    let eval = |tr: &mut Tracker, d: f64| {
        let mut p = Params::new();
        p.insert("delta".into(), d);
        let r = family.evaluate(slice, d);
        tr.record(p, r)
    };
    if hi - lo <= 1e-12 * hi {
        eval(&mut tr, hi);
        return tr.finish(false, "optimize_delta");
    }
    let probe = |n: usize| -> Vec<f64> { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
    let mut xs = probe(9);
    let mut ts: Vec<f64> = xs.iter().map(|&d| eval(&mut tr, d)).collect();
    let finite: Vec<f64> = ts.iter().copied().filter(|t| t.is_finite()).collect();
    let (up_down, _) = count_reversals(&finite, 1e-12);
    if up_down > 0 || finite.len() < ts.len() {
        xs = probe(cfg.delta_grid);
        ts = xs.iter().map(|&d| eval(&mut tr, d)).collect();
    }
    let i = (0..ts.len()).fold(0, |b, i| if ts[i] < ts[b] { i } else { b });
    if ts[i].is_finite() {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(xs.len() - 1)];
        golden_section_min(&mut |d| eval(&mut tr, d), a, b, cfg.golden_evals, 1e-10 * hi);
    }
    tr.finish(false, "optimize_delta")
}

/// A box of named parameters with a starting point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamBox {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub start: Vec<f64>,
}

impl ParamBox {
    pub fn new(entries: &[(&str, f64, f64, f64)]) -> Self {
        ParamBox {
            names: entries.iter().map(|e| e.0.to_string()).collect(),
            lower: entries.iter().map(|e| e.1).collect(),
            upper: entries.iter().map(|e| e.2).collect(),
            start: entries.iter().map(|e| e.3).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if self.lower.len() != n || self.upper.len() != n || self.start.len() != n {
            return Err(Error::InvalidConfig("parameter box vectors differ in length".into()));
        }
        for i in 0..n {
            if !(self.lower[i].is_finite() && self.upper[i].is_finite() && self.lower[i] <= self.upper[i]) {
                return Err(Error::InvalidConfig(format!("bad bounds for parameter {}", self.names[i])));
            }
        }
        Ok(())
    }
}

/// Parametric trial families searched by [`optimize_trial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrialSearch {
    /// Improved bound in `(H, J)` form with `H` the tanh interpolant between
    /// `k(−∞)` and `k(+∞)` (constant `k∞` when they agree) and
    /// `J = 1 + amplitude·sech²((x − center)/width)`.
    JBump,
    /// Baseline bound with `h` a tanh interpolant between `k(−∞)` and
    /// `k(+∞)`; parameters `center` and `width`.
    HInterpolant,
}

impl TrialSearch {
    /// The default search box: everything starts from the baseline choice.
    pub fn default_box(&self, slice: &EnergySlice) -> ParamBox {
        let p = slice.profile();
        let (c, s) = (p.center(), p.scale());
        let (lo, hi) = p.extent();
        let span = (hi - lo).max(s);
        match self {
            TrialSearch::JBump => ParamBox::new(&[
                ("amplitude", -0.9, 3.0, 0.0),
                ("center", c - span, c + span, c),
                ("width", 0.05 * s, 4.0 * span.max(s), span.max(s)),
            ]),
            TrialSearch::HInterpolant => {
                ParamBox::new(&[("center", c - span, c + span, c), ("width", 0.05 * s, 4.0 * span.max(s), s)])
            }
        }
    }

    fn evaluate(&self, slice: &EnergySlice, names: &[String], x: &[f64]) -> Result<BoundResult> {
        let p = slice.profile();
        let get = |k: &str, d: f64| names.iter().position(|n| n == k).map_or(d, |i| x[i]);
        let (km, kp) = (slice.k_minus_inf(), slice.k_plus_inf());
        match self {
            TrialSearch::JBump => {
                let big_h = if slice.k_inf().is_ok() {
                    TrialFunction::constant(0.5 * (km + kp))
                } else {
                    TrialFunction::tanh_interpolant(km, kp, p.center(), p.scale())
                };
                let big_j =
                    TrialFunction::bump(1.0, get("amplitude", 0.0), get("center", p.center()), get("width", p.scale()));
                bound_improved(slice, ImprovedForm::BigHBigJ, &big_h, &big_j)
            }
            TrialSearch::HInterpolant => {
                let h = TrialFunction::tanh_interpolant(km, kp, get("center", p.center()), get("width", p.scale()));
                bound_basic(slice, &h)
            }
        }
    }
}

/// Compass search over `pbox` with at most `budget` bound evaluations.
/// Points where the bound fails (non-positive trial function, divergent
/// integral) score `θ = +∞`.
pub fn optimize_trial(
    slice: &EnergySlice,
    family: TrialSearch,
    pbox: &ParamBox,
    budget: usize,
) -> Result<OptimizationReport> {
    pbox.validate()?;
    let n = pbox.names.len();
    let mut tr = Tracker { slice, trace: Vec::new(), best: None };
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(pbox.lower[i], pbox.upper[i]);
        }
    };
    let eval = |tr: &mut Tracker, x: &[f64]| {
        let p: Params = pbox.names.iter().cloned().zip(x.iter().copied()).collect();
        let r = family.evaluate(slice, &pbox.names, x);
        tr.record(p, r)
    };
    let mut x = pbox.start.clone();
    clamp(&mut x);
    let mut fx = eval(&mut tr, &x);
    let mut step: Vec<f64> = (0..n).map(|i| 0.25 * (pbox.upper[i] - pbox.lower[i])).collect();
    let min_step: Vec<f64> = (0..n).map(|i| 1e-3 * (pbox.upper[i] - pbox.lower[i]).max(1e-12)).collect();
    let mut exhausted = false;
    'search: loop {
        if (0..n).all(|i| step[i] <= min_step[i]) {
            break;
        }
        let mut improved = false;
        for i in 0..n {
            if step[i] <= min_step[i] {
                continue;
            }
            for dir in [1.0, -1.0] {
                if tr.trace.len() >= budget {
                    exhausted = true;
                    break 'search;
                }
                let mut y = x.clone();
                y[i] += dir * step[i];
                clamp(&mut y);
                if y[i] == x[i] {
                    continue;
                }
                let fy = eval(&mut tr, &y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in step.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    if tr.trace.len() >= budget && n > 0 {
        exhausted = true;
    }
    tr.finish(exhausted, "optimize_trial")
}

/// The largest lower bound among every family whose preconditions hold,
/// at default and optimised parameters. The winner's own terms come first
/// in `diagnostics`, followed by one `candidate:<family>` entry per
/// successful candidate.
pub fn best_bound(slice: &EnergySlice, cfg: &OptimizeConfig) -> BoundResult {
    type Job<'a> = Box<dyn Fn() -> Result<BoundResult> + Send + Sync + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| bound_special(slice, &SpecialCase::HConst)),
        Box::new(|| bound_special(slice, &SpecialCase::MonotoneH(None))),
        Box::new(|| bound_special(slice, &SpecialCase::SingleExtremum(None))),
        Box::new(|| bound_special(slice, &SpecialCase::KMin)),
        Box::new(|| optimize_delta(slice, DeltaFamily::DeltaCut, cfg).map(|r| r.best_bound)),
        Box::new(|| optimize_delta(slice, DeltaFamily::DeltaMg, cfg).map(|r| r.best_bound)),
        Box::new(|| bound_low_energy(slice)),
        Box::new(|| bound_old_low_energy(slice)),
        Box::new(|| bound_wkb_like(slice)),
        Box::new(|| bound_schwartzian(slice)),
        Box::new(|| {
            let b = TrialSearch::JBump.default_box(slice);
            optimize_trial(slice, TrialSearch::JBump, &b, cfg.budget).map(|r| r.best_bound)
        }),
        Box::new(|| {
            let b = TrialSearch::HInterpolant.default_box(slice);
            optimize_trial(slice, TrialSearch::HInterpolant, &b, cfg.budget).map(|r| r.best_bound)
        }),
    ];
    let results: Vec<Result<BoundResult>> = jobs.par_iter().map(|j| j()).collect();
    let ok: Vec<BoundResult> = results.into_iter().filter_map(|r| r.ok()).filter(|b| !b.divergent).collect();
    let Some(win) = ok.iter().fold(None::<&BoundResult>, |best, b| match best {
        Some(c) if c.bound >= b.bound => Some(c),
        _ => Some(b),
    }) else {
        return BoundResult::divergent(BoundFamily::Best, Params::new());
    };
    let mut out = win.clone();
    out.diagnostics.extend(ok.iter().map(|b| Term { name: format!("candidate:{}", b.family), value: b.bound }));
    out
}
