//! Potential profiles, energy slices and classically forbidden regions.
//!
//! Units follow `2m = ħ = 1`, so the local wave number obeys
//! `k²(x) = E − V(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, bracket_roots_tol, fd_derivative, integrate, scan_max, Jet, NumericsConfig};

pub type Params = BTreeMap<String, f64>;

type JetFn = Arc<dyn Fn(Jet) -> Jet + Send + Sync>;
type PlainFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Zero,
    Square { v0: f64, l: f64 },
    SmoothSquare { v0: f64, l: f64, s: f64 },
    Sech2 { v0: f64, a: f64 },
    Step { v0: f64, a: f64 },
    SharpStep { v0: f64 },
    Gaussian { v0: f64, a: f64 },
    CustomJet { f: JetFn, extent: (f64, f64), scale: f64, jumps: Vec<f64> },
    CustomPlain { f: PlainFn, extent: (f64, f64), scale: f64 },
}

/// A one-dimensional potential with finite asymptotes.
#[derive(Clone)]
pub struct PotentialProfile {
    name: String,
    params: Params,
    shape: Shape,
    v_minus_inf: f64,
    v_plus_inf: f64,
}

impl fmt::Debug for PotentialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialProfile")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("v_minus_inf", &self.v_minus_inf)
            .field("v_plus_inf", &self.v_plus_inf)
            .finish()
    }
}

/// Names and default parameters of the built-in corpus.
pub const CORPUS: &[(&str, &[(&str, f64)])] = &[
    ("zero", &[]),
    ("square", &[("V0", 1.0), ("L", 1.0)]),
    ("smooth-square", &[("V0", 1.0), ("L", 1.0), ("s", 8.0)]),
    ("sech2", &[("V0", 1.0), ("a", 1.0)]),
    ("step", &[("V0", 1.0), ("a", 1.0)]),
    ("sharp-step", &[("V0", 1.0)]),
    ("gaussian", &[("V0", 1.0), ("a", 1.0)]),
];

/// Every built-in profile at its default parameters.
pub fn make_corpus() -> Vec<PotentialProfile> {
    CORPUS
        .iter()
        .map(|(name, _)| PotentialProfile::named(name, &Params::new()).expect("corpus defaults are valid"))
        .collect()
}

fn positive(name: &str, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParam(format!("{name}: {key} must be positive and finite, got {v}")))
    }
}

impl PotentialProfile {
    /// Build a corpus profile by name, overriding any of its default parameters.
    ///
    /// Unknown parameter keys are rejected.
    pub fn named(name: &str, overrides: &Params) -> Result<Self> {
        let defaults = CORPUS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, d)| *d)
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))?;
        let mut params: Params = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(Error::UnknownParam { profile: name.to_string(), param: k.clone() });
            }
            if !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name}: {k} must be finite")));
            }
            params.insert(k.clone(), *v);
        }
        let p = |k: &str| params[k];
        let (shape, vm, vp) = match name {
            "zero" => (Shape::Zero, 0.0, 0.0),
            "square" => (Shape::Square { v0: p("V0"), l: positive(name, "L", p("L"))? }, 0.0, 0.0),
            "smooth-square" => (
                Shape::SmoothSquare { v0: p("V0"), l: positive(name, "L", p("L"))?, s: positive(name, "s", p("s"))? },
                0.0,
                0.0,
            ),
            "sech2" => (Shape::Sech2 { v0: p("V0"), a: positive(name, "a", p("a"))? }, 0.0, 0.0),
            "step" => (Shape::Step { v0: p("V0"), a: positive(name, "a", p("a"))? }, 0.0, p("V0")),
            "sharp-step" => (Shape::SharpStep { v0: p("V0") }, 0.0, p("V0")),
            "gaussian" => (Shape::Gaussian { v0: p("V0"), a: positive(name, "a", p("a"))? }, 0.0, 0.0),
            _ => unreachable!(),
        };
        Ok(PotentialProfile { name: name.to_string(), params, shape, v_minus_inf: vm, v_plus_inf: vp })
    }

    /// A user-defined smooth profile written in terms of jets, so first and
    /// second derivatives are exact. `jumps` lists any discontinuities.
    pub fn custom_jet(
        name: &str,
        f: impl Fn(Jet) -> Jet + Send + Sync + 'static,
        asymptotes: (f64, f64),
        extent: (f64, f64),
        jumps: Vec<f64>,
    ) -> Self {
        let scale = ((extent.1 - extent.0) * 0.5).max(1.0);
        PotentialProfile {
            name: name.to_string(),
            params: Params::new(),
            shape: Shape::CustomJet { f: Arc::new(f), extent, scale, jumps },
            v_minus_inf: asymptotes.0,
            v_plus_inf: asymptotes.1,
        }
    }

    /// A user-defined profile given only by values; derivatives fall back
    /// to central finite differences.
    pub fn custom_fn(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        asymptotes: (f64, f64),
        extent: (f64, f64),
    ) -> Self {
        let scale = ((extent.1 - extent.0) * 0.5).max(1.0);
        PotentialProfile {
            name: name.to_string(),
            params: Params::new(),
            shape: Shape::CustomPlain { f: Arc::new(f), extent, scale },
            v_minus_inf: asymptotes.0,
            v_plus_inf: asymptotes.1,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn v_minus_inf(&self) -> f64 {
        self.v_minus_inf
    }

    pub fn v_plus_inf(&self) -> f64 {
        self.v_plus_inf
    }

    /// The characteristic barrier height used to scale energy grids.
    pub fn height(&self) -> f64 {
        self.params.get("V0").copied().unwrap_or(0.0)
    }

    /// V(x) with exact first and second derivatives (zero away from jumps
    /// for the sharp shapes).
    pub fn jet(&self, x: f64) -> Jet {
        let xv = Jet::var(x);
        match &self.shape {
            Shape::Zero => Jet::constant(0.0),
            Shape::Square { v0, l } => Jet::constant(if (0.0..=*l).contains(&x) { *v0 } else { 0.0 }),
            Shape::SmoothSquare { v0, l, s } => ((xv * *s).tanh() - ((xv - *l) * *s).tanh()) * (0.5 * v0),
            Shape::Sech2 { v0, a } => (xv / *a).sech().powf(2.0) * *v0,
            Shape::Step { v0, a } => ((xv / *a).tanh() + 1.0) * (0.5 * v0),
            Shape::SharpStep { v0 } => Jet::constant(if x >= 0.0 { *v0 } else { 0.0 }),
            Shape::Gaussian { v0, a } => (-(xv * xv) / (a * a)).exp() * *v0,
            Shape::CustomJet { f, .. } => f(xv),
            Shape::CustomPlain { f, .. } => {
                let g = |y: f64| f(y);
                Jet::new(f(x), fd_derivative(&g, x, 1, None), fd_derivative(&g, x, 2, None))
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::CustomPlain { f, .. } => f(x),
            _ => self.jet(x).v,
        }
    }

    /// Positions where V jumps. Derivatives are not meaningful there.
    pub fn discontinuities(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Square { l, .. } => vec![0.0, *l],
            Shape::SharpStep { .. } => vec![0.0],
            Shape::CustomJet { jumps, .. } => jumps.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.discontinuities().is_empty()
    }

    /// Interval that contains the structure of the potential.
    pub fn extent(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Zero => (-1.0, 1.0),
            Shape::Square { l, .. } | Shape::SmoothSquare { l, .. } => (0.0, *l),
            Shape::Sech2 { a, .. } | Shape::Step { a, .. } | Shape::Gaussian { a, .. } => (-a, *a),
            Shape::SharpStep { .. } => (0.0, 0.0),
            Shape::CustomJet { extent, .. } | Shape::CustomPlain { extent, .. } => *extent,
        }
    }

    /// Characteristic length over which V varies.
    pub fn scale(&self) -> f64 {
        match &self.shape {
            Shape::Zero | Shape::SharpStep { .. } => 1.0,
            Shape::Square { l, .. } => l.min(1.0),
            Shape::SmoothSquare { s, .. } => 1.0 / s,
            Shape::Sech2 { a, .. } | Shape::Step { a, .. } | Shape::Gaussian { a, .. } => *a,
            Shape::CustomJet { scale, .. } | Shape::CustomPlain { scale, .. } => *scale,
        }
    }

    /// Midpoint of the extent; default centre for trial functions.
    pub fn center(&self) -> f64 {
        let (a, b) = self.extent();
        0.5 * (a + b)
    }
}

/// A profile at a fixed energy above both asymptotes.
#[derive(Debug, Clone)]
pub struct EnergySlice {
    profile: PotentialProfile,
    energy: f64,
    numerics: NumericsConfig,
}

impl EnergySlice {
    pub fn new(profile: PotentialProfile, energy: f64) -> Result<Self> {
        let threshold = profile.v_minus_inf.max(profile.v_plus_inf);
        if !(energy > threshold) || !energy.is_finite() {
            return Err(Error::InvalidEnergy { energy, threshold });
        }
        Ok(EnergySlice { profile, energy, numerics: NumericsConfig::default() })
    }

    /// Replace the numeric tolerances used by every operation on this slice.
    pub fn with_numerics(mut self, numerics: NumericsConfig) -> Result<Self> {
        numerics.validate()?;
        self.numerics = numerics;
        Ok(self)
    }

    pub fn profile(&self) -> &PotentialProfile {
        &self.profile
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn numerics(&self) -> &NumericsConfig {
        &self.numerics
    }

    pub fn k2(&self, x: f64) -> f64 {
        self.energy - self.profile.value(x)
    }

    /// k²(x) with its first and second derivatives.
    pub fn k2_jet(&self, x: f64) -> Jet {
        self.energy - self.profile.jet(x)
    }

    pub fn k_minus_inf(&self) -> f64 {
        (self.energy - self.profile.v_minus_inf).sqrt()
    }

    pub fn k_plus_inf(&self) -> f64 {
        (self.energy - self.profile.v_plus_inf).sqrt()
    }

    /// The common asymptotic wave number, if both sides agree.
    pub fn k_inf(&self) -> Result<f64> {
        let (km, kp) = (self.k_minus_inf(), self.k_plus_inf());
        if (km - kp).abs() <= 1e-12 * km.max(kp) {
            Ok(0.5 * (km + kp))
        } else {
            Err(Error::AsymmetricAsymptotics { k_minus: km, k_plus: kp })
        }
    }

    /// Truncated integration window at this slice's tail tolerance.
    pub fn window(&self) -> Result<(f64, f64)> {
        numerics::truncate_domain(self, self.numerics.quad.tail_tol)
    }
}

/// `k²(x)`; negative values mark the classically forbidden region.
pub fn k_squared(slice: &EnergySlice, x: f64) -> f64 {
    slice.k2(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForbiddenRegionSummary {
    pub intervals: Vec<(f64, f64)>,
    pub kappa_max: f64,
    pub total_width: f64,
    pub penetration_integral: f64,
}

impl ForbiddenRegionSummary {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Locate every interval of `domain` where `k² < 0` and integrate
/// `κ = √(−k²)` across them.
pub fn forbidden_regions(slice: &EnergySlice, domain: (f64, f64)) -> Result<ForbiddenRegionSummary> {
    let cfg = slice.numerics();
    let (a, b) = domain;
    let k2 = |x: f64| slice.k2(x);
    let roots = bracket_roots_tol(&k2, a, b, cfg.n_scan, cfg.root_tol);

    let mut cuts = vec![a];
    cuts.extend(roots.iter().copied().filter(|&r| r > a && r < b));
    cuts.push(b);
    cuts.dedup();

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        if k2(0.5 * (w[0] + w[1])) < 0.0 {
            match intervals.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => intervals.push((w[0], w[1])),
            }
        }
    }

    // Every negative scan sample must sit inside a reconstructed interval.
    for x in numerics::grid(a, b, cfg.n_scan) {
        if k2(x) < 0.0 && !intervals.iter().any(|&(lo, hi)| x >= lo - cfg.root_tol && x <= hi + cfg.root_tol) {
            return Err(Error::ForbiddenRegionUnresolved(format!(
                "k^2 < 0 at x = {x} but no bracketing turning points were resolved"
            )));
        }
    }

    let kappa = |x: f64| (-slice.k2(x)).max(0.0).sqrt();
    let jumps = slice.profile().discontinuities();
    let mut penetration = 0.0;
    let mut kappa_max: f64 = 0.0;
    for &(lo, hi) in &intervals {
        penetration += integrate(&kappa, lo, hi, &jumps, &cfg.quad)?;
        let n = ((cfg.n_scan as f64) * (hi - lo) / (b - a)).ceil().max(16.0) as usize;
        kappa_max = kappa_max.max(scan_max(&kappa, lo, hi, n).1);
    }
    let total_width = intervals.iter().fold(0.0, |acc, (lo, hi)| acc + (hi - lo));
    Ok(ForbiddenRegionSummary { intervals, kappa_max, total_width, penetration_integral: penetration })
}
