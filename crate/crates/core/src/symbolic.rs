//! Exact coefficient arithmetic.
//!
//! Coefficients that appear in the model are products of numbers in
//! Q(sqrt 2) with integer powers of pi, G, l and mu. [`Monomial`] keeps
//! them exact so coefficient identities can be checked without rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::params::ModelParams;

/// `a + b sqrt(2)` with rational `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub a: Rational64,
    pub b: Rational64,
}

impl QSqrt2 {
    pub fn new(a: Rational64, b: Rational64) -> Self {
        Self { a, b }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::new(Rational64::new(num, den), Rational64::zero())
    }

    /// `(num/den) sqrt 2`.
    pub fn sqrt2_times(num: i64, den: i64) -> Self {
        Self::new(Rational64::zero(), Rational64::new(num, den))
    }

    pub fn zero() -> Self {
        Self::rational(0, 1)
    }

    pub fn one() -> Self {
        Self::rational(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a, -self.b)
    }

    /// Field norm `a^2 - 2 b^2`.
    pub fn norm(&self) -> Rational64 {
        self.a * self.a - Rational64::from_integer(2) * self.b * self.b
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.a / n, c.b / n))
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(self.a) + ratio_f64(self.b) * std::f64::consts::SQRT_2
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = Rational64::from_integer(2);
        Self::new(self.a * o.a + two * self.b * o.b, self.a * o.b + self.b * o.a)
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) if self.b.is_one() => write!(f, "sqrt2"),
            (true, false) if (-self.b).is_one() => write!(f, "-sqrt2"),
            (true, false) => write!(f, "{}*sqrt2", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}*sqrt2)", self.a, sign, self.b.abs())
            }
        }
    }
}

/// `coeff * pi^pi_pow * G^g_pow * l^l_pow * mu^mu_pow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: QSqrt2,
    pub pi_pow: i32,
    pub g_pow: i32,
    pub l_pow: i32,
    pub mu_pow: i32,
}

impl Monomial {
    pub fn constant(coeff: QSqrt2) -> Self {
        Self { coeff, pi_pow: 0, g_pow: 0, l_pow: 0, mu_pow: 0 }
    }

    pub fn new(coeff: QSqrt2, pi_pow: i32, g_pow: i32, l_pow: i32, mu_pow: i32) -> Self {
        Self { coeff, pi_pow, g_pow, l_pow, mu_pow }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::constant(QSqrt2::rational(num, den))
    }

    pub fn pi() -> Self {
        Self::new(QSqrt2::one(), 1, 0, 0, 0)
    }

    pub fn g() -> Self {
        Self::new(QSqrt2::one(), 0, 1, 0, 0)
    }

    pub fn l() -> Self {
        Self::new(QSqrt2::one(), 0, 0, 1, 0)
    }

    pub fn mu() -> Self {
        Self::new(QSqrt2::one(), 0, 0, 0, 1)
    }

    /// `8 pi G`.
    pub fn kappa() -> Self {
        Self::rational(8, 1) * Self::pi() * Self::g()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        Some(Self {
            coeff: self.coeff.inv()?,
            pi_pow: -self.pi_pow,
            g_pow: -self.g_pow,
            l_pow: -self.l_pow,
            mu_pow: -self.mu_pow,
        })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(*self * o.inv()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::rational(1, 1), |acc, _| acc * *self)
    }

    /// Same powers of every symbol, so the two can be added.
    pub fn same_shape(&self, o: &Self) -> bool {
        (self.pi_pow, self.g_pow, self.l_pow, self.mu_pow) == (o.pi_pow, o.g_pow, o.l_pow, o.mu_pow)
    }

    pub fn checked_add(&self, o: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(*o);
        }
        if o.is_zero() {
            return Some(*self);
        }
        self.same_shape(o).then(|| Self { coeff: self.coeff + o.coeff, ..*self })
    }

    pub fn eval(&self, p: &ModelParams) -> f64 {
        self.coeff.to_f64()
            * std::f64::consts::PI.powi(self.pi_pow)
            * p.g().powi(self.g_pow)
            * p.l().powi(self.l_pow)
            * p.mu().powi(self.mu_pow)
    }
}

impl Mul for Monomial {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            coeff: self.coeff * o.coeff,
            pi_pow: self.pi_pow + o.pi_pow,
            g_pow: self.g_pow + o.g_pow,
            l_pow: self.l_pow + o.l_pow,
            mu_pow: self.mu_pow + o.mu_pow,
        }
    }
}

impl Neg for Monomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeff: -self.coeff, ..self }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.is_zero() {
            return Ok(());
        }
        for (sym, p) in [("pi", self.pi_pow), ("G", self.g_pow), ("l", self.l_pow), ("mu", self.mu_pow)] {
            match p {
                0 => {}
                1 => write!(f, "*{sym}")?,
                _ => write!(f, "*{sym}^{p}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_arithmetic_is_exact() {
        let r2 = QSqrt2::sqrt2_times(1, 1);
        assert_eq!(r2 * r2, QSqrt2::rational(2, 1));
        let x = QSqrt2::new(Rational64::new(3, 7), Rational64::new(-2, 5));
        assert_eq!(x * x.inv().unwrap(), QSqrt2::one());
        assert!(QSqrt2::zero().inv().is_none());
    }

    #[test]
    fn monomial_algebra_and_display() {
        let m = Monomial::rational(-4, 1) * Monomial::pi() * Monomial::g();
        let q = m.div(&(Monomial::l().pow(2) * Monomial::mu().pow(2))).unwrap();
        assert_eq!(q.to_string(), "-4*pi*G*l^-2*mu^-2");
        let p = ModelParams::new(1.0 / (4.0 * std::f64::consts::PI), 1.0, 1.0).unwrap();
        assert!((q.eval(&p) + 1.0).abs() < 1e-15);
        assert!(Monomial::g().checked_add(&Monomial::l()).is_none());
    }
}
