//! Second-order forward-mode differentiation.
//!
//! A [`Jet`] carries a value together with its first and second derivative
//! with respect to a single independent variable. Potentials and trial
//! functions are written once in terms of jets and get exact first and
//! second derivatives for free.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(c: f64) -> Self {
        Jet { v: c, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself, evaluated at `x`.
    pub const fn var(x: f64) -> Self {
        Jet { v: x, d1: 1.0, d2: 0.0 }
    }

    /// Apply a scalar function given its value and first two derivatives at `self.v`.
    #[inline]
    fn chain(self, g: f64, dg: f64, d2g: f64) -> Self {
        Jet { v: g, d1: dg * self.d1, d2: d2g * self.d1 * self.d1 + dg * self.d2 }
    }

    pub fn powf(self, p: f64) -> Self {
        if p == 2.0 {
            return self * self;
        }
        let u = self.v;
        if u == 0.0 {
            return self.chain(u.powf(p), p * u.powf(p - 1.0), p * (p - 1.0) * u.powf(p - 2.0));
        }
        let low = u.powf(p - 2.0);
        self.chain(low * u * u, p * low * u, p * (p - 1.0) * low)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        let s2 = 1.0 - t * t;
        self.chain(t, s2, -2.0 * t * s2)
    }

    pub fn sech(self) -> Self {
        let s = 1.0 / self.v.cosh();
        let t = self.v.tanh();
        self.chain(s, -s * t, s * (1.0 - 2.0 * s * s))
    }

    pub fn scale(self, c: f64) -> Self {
        Jet::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl From<f64> for Jet {
    fn from(c: f64) -> Self {
        Jet::constant(c)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet::new(self.v - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self.scale(1.0 / c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        Jet::new(self - j.v, -j.d1, -j.d2)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> (f64, f64) {
        let h = 1e-4;
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn composite_matches_finite_differences() {
        let g = |x: Jet| (x * 0.7).sech().powf(2.0) * (1.0 + (x - 0.3).tanh()) / (x * x + 2.0).sqrt();
        let gf = |x: f64| g(Jet::var(x)).v;
        for &x in &[-2.0, -0.4, 0.0, 0.9, 3.1] {
            let j = g(Jet::var(x));
            let (d1, d2) = fd(gf, x);
            assert!((j.d1 - d1).abs() < 1e-7, "d1 at {x}");
            assert!((j.d2 - d2).abs() < 1e-5, "d2 at {x}");
        }
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::var(1.3);
        let y = (x * x).exp().ln();
        assert!((y.v - 1.69).abs() < 1e-14);
        assert!((y.d1 - 2.6).abs() < 1e-13);
        assert!((y.d2 - 2.0).abs() < 1e-12);
    }
}
