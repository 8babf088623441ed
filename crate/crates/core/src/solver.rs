//! Exact transmission through a piecewise-constant resampling of k²(x).
//!
//! Each segment carries plane waves (k² > 0) or real exponentials
//! (k² < 0) written in segment-local coordinates, so the growing
//! exponential never appears explicitly. Segments are chained with
//! Redheffer star products of 2×2 scattering matrices, whose entries stay
//! bounded even through thick forbidden regions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::TAIL_TOL;
use crate::profiles::{EnergySlice, Params};

/// Anything that supplies a local wave-number field with flat asymptotes.
pub trait ScatteringField {
    fn k2(&self, x: f64) -> f64;
    /// `(k²(−∞), k²(+∞))`.
    fn k2_asymptotes(&self) -> (f64, f64);
    /// Points where k² jumps; always used as grid nodes.
    fn breakpoints(&self) -> Vec<f64>;
    /// Default truncation window.
    fn default_window(&self, tail_tol: f64) -> Result<(f64, f64)>;
}

impl ScatteringField for EnergySlice {
    fn k2(&self, x: f64) -> f64 {
        EnergySlice::k2(self, x)
    }

    fn k2_asymptotes(&self) -> (f64, f64) {
        let e = self.energy();
        (e - self.profile().v_minus_inf(), e - self.profile().v_plus_inf())
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.profile().discontinuities()
    }

    fn default_window(&self, tail_tol: f64) -> Result<(f64, f64)> {
        crate::numerics::truncate_domain(self, tail_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Explicit truncation window; `None` derives one from the tail tolerance.
    pub window: Option<(f64, f64)>,
    pub n_init: usize,
    pub refine_tol: f64,
    pub max_refine: u32,
    pub tail_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { window: None, n_init: 256, refine_tol: 1e-9, max_refine: 14, tail_tol: TAIL_TOL }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some((a, b)) = self.window {
            if !(a < b) {
                return Err(Error::InvalidConfig(format!("solver window must have x_min < x_max, got ({a}, {b})")));
            }
        }
        if self.n_init < 16 {
            return Err(Error::InvalidConfig("n_init must be at least 16".into()));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidConfig("refine_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringResult {
    /// Transmission amplitude, phase referenced to the window edges.
    #[serde(serialize_with = "ser_complex")]
    pub t_amp: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub r_amp: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub unitarity_defect: f64,
    pub grid_size: usize,
    pub energy: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Scattering matrix in amplitude (not flux) normalisation.
///
/// `out_right = tf·in_left + rb·in_right`, `out_left = rf·in_left + tb·in_right`.
#[derive(Debug, Clone, Copy)]
struct SMatrix {
    tf: Complex64,
    rf: Complex64,
    tb: Complex64,
    rb: Complex64,
}

impl SMatrix {
    fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        SMatrix { tf: one, rf: zero, tb: one, rb: zero }
    }

    /// Append the interface from wave number `q1` (left) to `q2` (right).
    fn then_interface(self, q1: Complex64, q2: Complex64) -> Self {
        if q1 == q2 {
            return self;
        }
        let sum = q1 + q2;
        let r12 = (q1 - q2) / sum;
        let r21 = -r12;
        let t12 = 2.0 * q1 / sum;
        let t21 = 2.0 * q2 / sum;
        let inv = 1.0 / (1.0 - self.rb * r12);
        SMatrix {
            tf: t12 * self.tf * inv,
            rf: self.rf + self.tb * r12 * self.tf * inv,
            tb: self.tb * t21 * inv,
            rb: r21 + t12 * self.rb * t21 * inv,
        }
    }

    /// Append free propagation over length `d` with wave number `q`.
    fn then_propagation(self, q: Complex64, d: f64) -> Self {
        let p = (Complex64::i() * q * d).exp();
        SMatrix { tf: self.tf * p, rf: self.rf, tb: self.tb * p, rb: self.rb * p * p }
    }
}

/// Local wave number: `√k²` when propagating, `i√(−k²)` when evanescent.
fn wave_number(k2: f64, floor: f64) -> Complex64 {
    let k2 = if k2.abs() < floor { floor } else { k2 };
    if k2 > 0.0 {
        Complex64::new(k2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-k2).sqrt())
    }
}

/// Segment edges over `[a, b]` with every breakpoint as a node and `n`
/// segments shared out in proportion to sub-interval length.
fn segment_nodes(a: f64, b: f64, breaks: &[f64], n: usize) -> Vec<f64> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let width = b - a;
    let mut nodes = vec![a];
    for w in cuts.windows(2) {
        let m = ((n as f64) * (w[1] - w[0]) / width).round().max(1.0) as usize;
        let h = (w[1] - w[0]) / m as f64;
        for i in 1..m {
            nodes.push(w[0] + h * i as f64);
        }
        nodes.push(w[1]);
    }
    nodes
}

struct GridSolution {
    t: Complex64,
    r: Complex64,
    transmission: f64,
    reflection: f64,
    segments: usize,
}

fn solve_on_grid<F: ScatteringField + ?Sized>(field: &F, nodes: &[f64]) -> GridSolution {
    let (k2l, k2r) = field.k2_asymptotes();
    let floor = 1e-10 * k2l.abs().max(k2r.abs()).max(1e-300);
    let ql = wave_number(k2l, floor);
    let qr = wave_number(k2r, floor);
    let mut s = SMatrix::identity();
    let mut prev = ql;
    for w in nodes.windows(2) {
        let q = wave_number(field.k2(0.5 * (w[0] + w[1])), floor);
        s = s.then_interface(prev, q).then_propagation(q, w[1] - w[0]);
        prev = q;
    }
    s = s.then_interface(prev, qr);
    let transmission = (qr.re / ql.re) * s.tf.norm_sqr();
    let reflection = s.rf.norm_sqr();
    GridSolution { t: s.tf, r: s.rf, transmission, reflection, segments: nodes.len() - 1 }
}

/// Solve the scattering problem for any [`ScatteringField`].
///
/// The grid is doubled until the Richardson-extrapolated transmission
/// changes by less than `refine_tol` (relative). Sharp fields whose jumps
/// are all breakpoints are exact at every grid size.
pub fn solve_field<F: ScatteringField + ?Sized>(
    field: &F,
    energy: f64,
    cfg: &SolverConfig,
) -> Result<ScatteringResult> {
    cfg.validate()?;
    let (k2l, k2r) = field.k2_asymptotes();
    if !(k2l > 0.0 && k2r > 0.0) {
        return Err(Error::InvalidEnergy { energy, threshold: energy - k2l.min(k2r) });
    }
    let (a, b) = match cfg.window {
        Some(w) => w,
        None => field.default_window(cfg.tail_tol)?,
    };
    let breaks = field.breakpoints();

    let mut n = cfg.n_init;
    let mut coarse = solve_on_grid(field, &segment_nodes(a, b, &breaks, n));
    let mut prev_extrap: Option<(f64, f64)> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..cfg.max_refine {
        n *= 2;
        let fine = solve_on_grid(field, &segment_nodes(a, b, &breaks, n));
        let t_ex = (4.0 * fine.transmission - coarse.transmission) / 3.0;
        let r_ex = (4.0 * fine.reflection - coarse.reflection) / 3.0;
        if let Some((t_prev, _)) = prev_extrap {
            last_change = (t_ex - t_prev).abs() / t_ex.abs().max(f64::MIN_POSITIVE);
            if last_change < cfg.refine_tol {
                let transmission = t_ex.clamp(0.0, 1.0);
                let reflection = r_ex.clamp(0.0, 1.0);
                return Ok(ScatteringResult {
                    t_amp: fine.t,
                    r_amp: fine.r,
                    transmission,
                    reflection,
                    unitarity_defect: (transmission + reflection - 1.0).abs(),
                    grid_size: fine.segments,
                    energy,
                });
            }
        }
        prev_extrap = Some((t_ex, r_ex));
        coarse = fine;
    }
    Err(Error::NonConvergent { last_change, grid_size: coarse.segments })
}

/// Exact transmission and reflection for a profile at one energy.
pub fn transmission(slice: &EnergySlice, cfg: &SolverConfig) -> Result<ScatteringResult> {
    solve_field(slice, slice.energy(), cfg)
}

/// Closed-form transmission for the families that have one: `zero`,
/// `square`, `sharp-step` and `sech2` (Pöschl–Teller).
///
/// This is written independently of the numerical solver and serves as
/// its oracle.
pub fn oracle_transmission(name: &str, params: &Params, energy: f64) -> Result<f64> {
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let e = energy;
    match name {
        "zero" => Ok(1.0),
        "square" => {
            let (v0, l) = (get("V0", 1.0), get("L", 1.0));
            if !(e > 0.0) {
                return Err(Error::InvalidEnergy { energy: e, threshold: 0.0 });
            }
            let d = e - v0;
            let x = if d.abs() < 1e-14 * e.max(v0.abs()) {
                v0 * v0 * l * l / (4.0 * e)
            } else if d > 0.0 {
                let s = (d.sqrt() * l).sin();
                v0 * v0 * s * s / (4.0 * e * d)
            } else {
                let s = ((-d).sqrt() * l).sinh();
                v0 * v0 * s * s / (4.0 * e * (-d))
            };
            Ok(1.0 / (1.0 + x))
        }
        "sharp-step" => {
            let v0 = get("V0", 1.0);
            if !(e > v0.max(0.0)) {
                return Err(Error::InvalidEnergy { energy: e, threshold: v0.max(0.0) });
            }
            let (km, kp) = (e.sqrt(), (e - v0).sqrt());
            Ok(4.0 * km * kp / ((km + kp) * (km + kp)))
        }
        "sech2" => {
            let (v0, a) = (get("V0", 1.0), get("a", 1.0));
            if !(e > 0.0) {
                return Err(Error::InvalidEnergy { energy: e, threshold: 0.0 });
            }
            // T = sinh²(πka) / (sinh²(πka) + c²), with
            // c = cos(π/2 √(1−4V0a²)) or cosh(π/2 √(4V0a²−1)).
            let x = std::f64::consts::PI * e.sqrt() * a;
            let disc = 1.0 - 4.0 * v0 * a * a;
            let ln_sinh = x + (0.5 * (1.0 - (-2.0 * x).exp())).ln();
            let ratio = if disc >= 0.0 {
                let c = (std::f64::consts::FRAC_PI_2 * disc.sqrt()).cos();
                if c == 0.0 {
                    0.0
                } else {
                    (2.0 * (c.abs().ln() - ln_sinh)).exp()
                }
            } else {
                let y = std::f64::consts::FRAC_PI_2 * (-disc).sqrt();
                let ln_cosh = y + (0.5 * (1.0 + (-2.0 * y).exp())).ln();
                (2.0 * (ln_cosh - ln_sinh)).exp()
            };
            Ok(1.0 / (1.0 + ratio))
        }
        other => Err(Error::NoOracle(other.to_string())),
    }
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
    fn free_particle_transmits_fully() {
        let r = transmission(&slice("zero", &[], 1.0), &SolverConfig::default()).unwrap();
        assert!((r.transmission - 1.0).abs() < 1e-13, "{}", r.transmission);
        assert!(r.reflection < 1e-14);
    }

    #[test]
    fn square_barrier_closed_forms() {
        let above = transmission(&slice("square", &[], 2.0), &SolverConfig::default()).unwrap();
        let expected = 1.0 / (1.0 + 1f64.sin().powi(2) / 8.0);
        assert!((above.transmission - expected).abs() < 1e-10, "{}", above.transmission);
        assert!((above.transmission - 0.9187).abs() < 1e-4);

        let below = transmission(&slice("square", &[], 0.5), &SolverConfig::default()).unwrap();
        let expected = 1.0 / (1.0 + 0.5f64.sqrt().sinh().powi(2));
        assert!((below.transmission - expected).abs() < 1e-10);
        assert!((below.transmission - 0.6293).abs() < 1e-4);
        assert!(below.unitarity_defect < 1e-8);
    }

    #[test]
    fn sharp_step_flux_normalisation() {
        let r = transmission(&slice("sharp-step", &[], 2.0), &SolverConfig::default()).unwrap();
        let (km, kp) = (2f64.sqrt(), 1.0);
        let expected = 4.0 * km * kp / (km + kp).powi(2);
        assert!((r.transmission - expected).abs() < 1e-12);
        assert!((r.transmission - 0.9706).abs() < 1e-4);
    }

    #[test]
    fn oracle_values() {
        let p = |kv: &[(&str, f64)]| -> Params { kv.iter().map(|(k, v)| (k.to_string(), *v)).collect() };
        let sq = oracle_transmission("square", &p(&[("V0", 1.0), ("L", 1.0)]), 2.0).unwrap();
        assert!((sq - 0.918_687_7).abs() < 1e-6);
        let st = oracle_transmission("sharp-step", &p(&[("V0", 1.0)]), 2.0).unwrap();
        assert!((st - 0.970_562_7).abs() < 1e-6);
        assert_eq!(oracle_transmission("zero", &Params::new(), 1.0).unwrap(), 1.0);
        assert!(matches!(oracle_transmission("gaussian", &Params::new(), 1.0), Err(Error::NoOracle(_))));
    }

    #[test]
    fn energy_at_barrier_top_uses_limit() {
        let r = transmission(&slice("square", &[], 1.0), &SolverConfig::default()).unwrap();
        let o = oracle_transmission("square", &slice("square", &[], 1.0).profile().params().clone(), 1.0).unwrap();
        assert!((o - 1.0 / 1.25).abs() < 1e-14);
        assert!((r.transmission - o).abs() < 1e-7, "{} vs {}", r.transmission, o);
    }

    #[test]
    fn thick_barrier_does_not_overflow() {
        let s = slice("square", &[("V0", 1.0), ("L", 60.0)], 0.5);
        let r = transmission(&s, &SolverConfig::default()).unwrap();
        let o = oracle_transmission("square", s.profile().params(), 0.5).unwrap();
        assert!(r.transmission.is_finite() && r.transmission > 0.0);
        assert!(((r.transmission - o) / o).abs() < 1e-8, "{} vs {}", r.transmission, o);
    }

    #[test]
    fn invalid_window_rejected() {
        let cfg = SolverConfig { window: Some((1.0, -1.0)), ..SolverConfig::default() };
        assert!(transmission(&slice("zero", &[], 1.0), &cfg).is_err());
    }
}
