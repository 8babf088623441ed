//! The Miller–Good change of variables.
//!
//! A positive `X′(x)` maps the problem `u″ + k²u = 0` onto
//! `U_XX + K²(X)U = 0` with `u = U/√X′` and
//! `K² = (k² + √X′ (1/√X′)″)/X′²`. Written with `j = X′` or with
//! `X′ = J⁻²` this gives the two forms implemented here. Because
//! `Im(u* u′) = Im(U* U_X)`, both problems carry the same flux and the
//! same transmission probability.

use serde::Serialize;

use crate::bounds::TrialFunction;
use crate::error::{Error, Result};
use crate::numerics::{self, gauss_7, truncate_window, Jet};
use crate::profiles::EnergySlice;
use crate::solver::{solve_field, transmission, ScatteringField, SolverConfig};

/// Cells in the cumulative `X(x)` table.
const MAP_CELLS: usize = 4096;
/// Round-trip accuracy of `x ↦ X ↦ x`.
pub const MAP_TOL: f64 = 1e-10;

/// `−½X‴/X′ + ¾(X″/X′)²`, evaluated from the jet of `X′`.
pub fn schwartzian_term(xprime: &TrialFunction, x: f64) -> Result<f64> {
    schwartzian_of(xprime.jet(x), x)
}

fn schwartzian_of(j: Jet, x: f64) -> Result<f64> {
    if !(j.v > 0.0) {
        return Err(Error::NonPositive { x, value: j.v });
    }
    let r = j.d1 / j.v;
    Ok(-0.5 * j.d2 / j.v + 0.75 * r * r)
}

/// Which trial function defines the coordinate change.
#[derive(Debug, Clone)]
pub enum CoordinateChange {
    /// `X′ = j`.
    Jacobian(TrialFunction),
    /// `X′ = J⁻²`.
    Amplitude(TrialFunction),
}

impl CoordinateChange {
    pub fn trial(&self) -> &TrialFunction {
        match self {
            CoordinateChange::Jacobian(t) | CoordinateChange::Amplitude(t) => t,
        }
    }

    /// `X′` with its first two derivatives.
    fn xprime(&self, x: f64) -> Jet {
        match self {
            CoordinateChange::Jacobian(j) => j.jet(x),
            CoordinateChange::Amplitude(big_j) => big_j.jet(x).powf(-2.0),
        }
    }

    /// `K²` expressed at the original position `x`.
    fn k2_transformed(&self, k2: f64, x: f64) -> f64 {
        match self {
            CoordinateChange::Jacobian(j) => {
                let j = j.jet(x);
                let r = j.d1 / j.v;
                (k2 - 0.5 * j.d2 / j.v + 0.75 * r * r) / (j.v * j.v)
            }
            CoordinateChange::Amplitude(big_j) => {
                let jj = big_j.jet(x);
                let j2 = jj.v * jj.v;
                j2 * j2 * (k2 + jj.d2 / jj.v)
            }
        }
    }
}

/// The transformed scattering problem `K²(X)`.
#[derive(Debug, Clone)]
pub struct TransformedProfile {
    slice: EnergySlice,
    change: CoordinateChange,
    xs: Vec<f64>,
    big_x: Vec<f64>,
    j_minus: f64,
    j_plus: f64,
}

impl TransformedProfile {
    fn build(slice: &EnergySlice, change: CoordinateChange) -> Result<Self> {
        if !change.trial().jumps().is_empty() || !change.trial().kinks().is_empty() {
            return Err(Error::PreconditionFailed("the coordinate change needs a smooth trial function".into()));
        }
        let tol = slice.numerics().quad.tail_tol;
        let base = slice.window()?;
        let (vm, vp) = (slice.k_minus_inf().powi(2), slice.k_plus_inf().powi(2));
        let dev = |x: f64, side: i8| {
            let jp = change.xprime(x);
            if !(jp.v > 0.0) {
                return f64::INFINITY;
            }
            let k2 = slice.k2(x);
            let k2_side = if side < 0 { vm } else { vp };
            let flat = (change.k2_transformed(k2, x) - k2_side / (jp.v * jp.v)).abs();
            let slope = (jp.d1 / jp.v).abs() * tol.sqrt();
            let v = flat.max(slope);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let (a, b) = truncate_window(&dev, base, slice.profile().scale(), tol).map_err(|_| {
            Error::DivergentAsymptotics(format!(
                "X'(x) or K^2 does not flatten within {tol:e} inside |x| < {:e}",
                numerics::WINDOW_CAP
            ))
        })?;

        for x in numerics::grid(a, b, slice.numerics().n_scan) {
            let v = change.xprime(x).v;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive { x, value: v });
            }
        }

        let h = (b - a) / MAP_CELLS as f64;
        let xs: Vec<f64> = (0..=MAP_CELLS).map(|i| if i == MAP_CELLS { b } else { a + h * i as f64 }).collect();
        let g = |x: f64| change.xprime(x).v;
        let mut big_x = vec![a; MAP_CELLS + 1];
        for i in 0..MAP_CELLS {
            big_x[i + 1] = big_x[i] + gauss_7(&g, xs[i], xs[i + 1]);
        }
        let j_minus = change.xprime(a).v;
        let j_plus = change.xprime(b).v;
        if !(j_minus > 0.0 && j_plus > 0.0) {
            return Err(Error::DivergentAsymptotics("X' tends to zero at infinity".into()));
        }
        Ok(TransformedProfile { slice: slice.clone(), change, xs, big_x, j_minus, j_plus })
    }

    pub fn slice(&self) -> &EnergySlice {
        &self.slice
    }

    pub fn change(&self) -> &CoordinateChange {
        &self.change
    }

    /// The window in the original coordinate over which `X(x)` is tabulated.
    pub fn x_window(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// `X′(±∞)`, read at the window edges.
    pub fn j_inf_minus(&self) -> f64 {
        self.j_minus
    }

    pub fn j_inf_plus(&self) -> f64 {
        self.j_plus
    }

    /// `K(−∞)` and `K(+∞)`.
    pub fn k_inf(&self) -> (f64, f64) {
        (self.slice.k_minus_inf() / self.j_minus, self.slice.k_plus_inf() / self.j_plus)
    }

    #[allow(non_snake_case)]
    pub fn X_of_x(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let (a, b) = self.x_window();
        if x <= a {
            return self.big_x[0] - (a - x) * self.j_minus;
        }
        if x >= b {
            return self.big_x[n] + (x - b) * self.j_plus;
        }
        let i = self.cell_of_x(x);
        let g = |y: f64| self.change.xprime(y).v;
        self.big_x[i] + gauss_7(&g, self.xs[i], x)
    }

    fn cell_of_x(&self, x: f64) -> usize {
        let n = self.xs.len() - 1;
        let (a, b) = self.x_window();
        (((x - a) / (b - a) * n as f64) as usize).min(n - 1)
    }

    #[allow(non_snake_case)]
    pub fn x_of_X(&self, big: f64) -> f64 {
        let n = self.xs.len() - 1;
        if big <= self.big_x[0] {
            return self.xs[0] - (self.big_x[0] - big) / self.j_minus;
        }
        if big >= self.big_x[n] {
            return self.xs[n] + (big - self.big_x[n]) / self.j_plus;
        }
        let i = self.big_x.partition_point(|&v| v <= big).saturating_sub(1).min(n - 1);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.big_x[i], self.big_x[i + 1]);
        let g = |y: f64| self.change.xprime(y).v;
        let mut x = x0 + (big - y0) / (y1 - y0) * (x1 - x0);
        let (mut lo, mut hi) = (x0, x1);
        for _ in 0..50 {
            let r = y0 + gauss_7(&g, x0, x) - big;
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / g(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - x).abs() <= 1e-15 * (1.0 + x.abs());
            x = next;
            if done {
                break;
            }
        }
        x
    }

    /// `K²` at the original position `x`.
    pub fn k2_at_x(&self, x: f64) -> f64 {
        self.change.k2_transformed(self.slice.k2(x), x)
    }

    /// `K²(X)`.
    pub fn k2_transformed(&self, big: f64) -> f64 {
        self.k2_at_x(self.x_of_X(big))
    }
}

impl ScatteringField for TransformedProfile {
    fn k2(&self, big: f64) -> f64 {
        self.k2_transformed(big)
    }

    fn k2_asymptotes(&self) -> (f64, f64) {
        let (km, kp) = self.k_inf();
        (km * km, kp * kp)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.slice.profile().discontinuities().into_iter().map(|x| self.X_of_x(x)).collect()
    }

    fn default_window(&self, _tail_tol: f64) -> Result<(f64, f64)> {
        Ok((self.big_x[0], *self.big_x.last().unwrap()))
    }
}

/// `X′ = j`, `K² = (1/j²)(k² − ½j″/j + ¾(j′/j)²)`.
pub fn transform_with_j(slice: &EnergySlice, j: &TrialFunction) -> Result<TransformedProfile> {
    TransformedProfile::build(slice, CoordinateChange::Jacobian(j.clone()))
}

/// `X′ = J⁻²`, `K² = J⁴(k² + J″/J)`.
pub fn transform_with_big_j(slice: &EnergySlice, big_j: &TrialFunction) -> Result<TransformedProfile> {
    TransformedProfile::build(slice, CoordinateChange::Amplitude(big_j.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub t_original: f64,
    pub t_transformed: f64,
    pub difference: f64,
}

/// Solve the original and the transformed problem and compare `T`.
pub fn verify_invariance(
    slice: &EnergySlice,
    change: &CoordinateChange,
    cfg: &SolverConfig,
) -> Result<InvarianceReport> {
    let tp = TransformedProfile::build(slice, change.clone())?;
    let t_original = transmission(slice, cfg)?.transmission;
    let t_transformed = solve_field(&tp, slice.energy(), &SolverConfig { window: None, ..*cfg })?.transmission;
    Ok(InvarianceReport { t_original, t_transformed, difference: (t_original - t_transformed).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{Params, PotentialProfile};

    fn slice(name: &str, e: f64) -> EnergySlice {
        EnergySlice::new(PotentialProfile::named(name, &Params::new()).unwrap(), e).unwrap()
    }

    #[test]
    fn schwartzian_of_exponentials() {
        for c in [1.0, 0.3, -2.0] {
            let t = TrialFunction::from_jet(move |x| (x * (2.0 * c)).exp());
            for x in [-1.0, 0.0, 0.7] {
                assert!((schwartzian_term(&t, x).unwrap() - c * c).abs() < 1e-12);
            }
        }
        assert_eq!(schwartzian_term(&TrialFunction::constant(3.0), 1.0).unwrap(), 0.0);
        assert!(matches!(schwartzian_term(&TrialFunction::constant(-1.0), 0.0), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn identity_and_rescaling() {
        let s = slice("sech2", 2.0);
        let id = transform_with_j(&s, &TrialFunction::constant(1.0)).unwrap();
        for x in [-3.0, 0.0, 1.5] {
            assert!((id.X_of_x(x) - x).abs() < 1e-12);
            assert!((id.k2_transformed(x) - s.k2(x)).abs() < 1e-12);
        }
        let c = transform_with_j(&s, &TrialFunction::constant(2.0)).unwrap();
        let (a, _) = c.x_window();
        for x in [-3.0, 0.0, 1.5] {
            assert!((c.X_of_x(x) - (a + 2.0 * (x - a))).abs() < 1e-11);
            assert!((c.k2_at_x(x) - s.k2(x) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coordinate_maps_round_trip() {
        let s = slice("square", 2.0);
        let tp = transform_with_j(&s, &TrialFunction::sech_bump(1.0, 1.0, 0.0, 1.0)).unwrap();
        let (a, b) = tp.x_window();
        for x in numerics::grid(a, b, 97) {
            assert!((tp.x_of_X(tp.X_of_x(x)) - x).abs() < MAP_TOL);
        }
    }

    #[test]
    fn j_and_big_j_forms_agree() {
        let s = slice("gaussian", 1.7);
        let big_j = TrialFunction::bump(1.0, 0.4, 0.3, 0.9);
        let via_j = transform_with_j(&s, &big_j.powf(-2.0)).unwrap();
        let via_big_j = transform_with_big_j(&s, &big_j).unwrap();
        for x in [-2.0, -0.4, 0.3, 1.1, 2.5] {
            assert!((via_j.k2_at_x(x) - via_big_j.k2_at_x(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn transmission_is_invariant() {
        let cfg = SolverConfig::default();
        let cases = [
            (slice("zero", 1.0), CoordinateChange::Jacobian(TrialFunction::sech_bump(1.0, 1.0, 0.0, 1.0))),
            (slice("square", 2.0), CoordinateChange::Amplitude(TrialFunction::bump(1.0, 0.5, 0.5, 0.7))),
            (slice("step", 2.0), CoordinateChange::Jacobian(TrialFunction::constant(2.0))),
        ];
        for (s, change) in &cases {
            let r = verify_invariance(s, change, &cfg).unwrap();
            assert!(r.difference < 1e-6, "{} {:?}", s.profile().name(), r);
        }
    }

    #[test]
    fn growing_jacobian_is_rejected() {
        let s = slice("sech2", 2.0);
        let j = TrialFunction::from_jet(|x| (x * 0.1).exp());
        assert!(matches!(transform_with_j(&s, &j), Err(Error::DivergentAsymptotics(_))));
    }
}
