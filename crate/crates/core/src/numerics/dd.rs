//! Double-double arithmetic (about 32 significant digits).
//!
//! Only what the closed-form engine needs: the field operations, `sqrt`,
//! `exp`, `erf` and `erfcx`. A value is the unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi) / 2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::Real;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

const PI: DoubleDouble = DoubleDouble { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

/// 1/sqrt(pi)
const FRAC_1_SQRT_PI: DoubleDouble = DoubleDouble { hi: 0.564_189_583_547_756_3, lo: 7.667_729_806_582_94e-18 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    /// Exact multiplication by a power of two.
    #[inline]
    fn ldexp(self, k: i32) -> Self {
        // split so neither factor overflows f64 exponent range
        let (k1, k2) = (k / 2, k - k / 2);
        let f1 = 2f64.powi(k1);
        let f2 = 2f64.powi(k2);
        Self { hi: self.hi * f1 * f2, lo: self.lo * f1 * f2 }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn erf_series(x: Self) -> Self {
        // erf(x) = 2/sqrt(pi) exp(-x^2) sum_k 2^k x^{2k+1} / (2k+1)!!
        // every term positive, converges for all x
        let two_x2 = x * x * Self::from(2.0);
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        loop {
            term = term * two_x2 / Self::from(2.0 * k + 1.0);
            sum += term;
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
            k += 1.0;
        }
        Self::from(2.0) * FRAC_1_SQRT_PI * (-(x * x)).exp() * sum
    }

    /// exp(x^2) erfc(x) by backward evaluation of the Laplace continued
    /// fraction, for x >= 2.5.
    fn erfcx_cf(x: Self) -> Self {
        let mut f = x;
        for k in (1..=160).rev() {
            f = x + Self::from(0.5 * k as f64) / f;
        }
        FRAC_1_SQRT_PI / f
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Self::renorm(q1, q2) + Self::from(q3)
    }
}

impl Real for DoubleDouble {
    // the transcendental functions are good to about 1e-30
    const EPSILON: f64 = 1e-30;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn exp(self) -> Self {
        if self.hi > 709.7 {
            return Self::from(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // exp(r) - 1 by Taylor series, |r| < 3.4e-4
        let mut term = r;
        let mut s = r;
        for i in 2..=12 {
            term = term * r / Self::from(i as f64);
            s += term;
        }
        // undo the 2^-10 reduction: (1+s)^2 - 1 = s(2+s)
        for _ in 0..10 {
            s = s * (s + Self::from(2.0));
        }
        (s + Self::ONE).ldexp(k as i32)
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(self.hi.sqrt());
        }
        let q = self.hi.sqrt();
        let qq = Self::from(q) * Self::from(q);
        Self::from(q) + (self - qq).mul_f64(0.5 / q)
    }

    fn erf(self) -> Self {
        if self.hi < 0.0 {
            return -(-self).erf();
        }
        if self.hi < 2.5 {
            Self::erf_series(self)
        } else if self.hi > 27.0 {
            Self::ONE
        } else {
            Self::ONE - Self::erfcx_cf(self) * (-(self * self)).exp()
        }
    }

    fn erfcx(self) -> Self {
        if self.hi < 0.0 {
            let x = -self;
            return Self::from(2.0) * (x * x).exp() - x.erfcx();
        }
        if self.hi < 2.5 {
            (self * self).exp() * (Self::ONE - Self::erf_series(self))
        } else {
            Self::erfcx_cf(self)
        }
    }

    #[inline]
    fn pi() -> Self {
        PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(hi: f64, lo: f64) -> DoubleDouble {
        DoubleDouble::new(hi, lo)
    }

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn field_operations_reach_double_double_precision() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0);
        assert!((back - DoubleDouble::ONE).to_f64().abs() < 1e-31);
        let two = DoubleDouble::from(2.0);
        let r = two.sqrt();
        assert!(((r * r) - two).to_f64().abs() < 1e-31);
    }

    // Reference values from a 50-digit evaluation, split into hi + lo.
    #[test]
    fn exp_against_high_precision_reference() {
        let cases = [
            (1.0, dd(std::f64::consts::E, 1.4456468917292502e-16)),
            (-0.5, dd(0.6065306597126334, -6.593178415491414e-19)),
            (10.0, dd(22026.465794806718, -1.3780134700517372e-12)),
            (-30.0, dd(9.357622968840175e-14, -2.1170146272646406e-30)),
        ];
        for (x, want) in cases {
            let got = DoubleDouble::from(x).exp();
            assert!(rel(got, want) < 1e-30, "exp({x}): {got:?} vs {want:?}");
        }
    }

    #[test]
    fn erf_against_high_precision_reference() {
        let cases = [
            (0.01, dd(0.011283415555849618, -6.832062095663143e-19)),
            (1.0, dd(0.8427007929497149, -2.4801011789118602e-17)),
            (2.0, dd(0.9953222650189527, 2.20719858329765e-17)),
            (3.0, dd(0.9999779095030014, 5.363397058636269e-17)),
        ];
        for (x, want) in cases {
            let got = DoubleDouble::from(x).erf();
            assert!(rel(got, want) < 1e-29, "erf({x}): {got:?} vs {want:?}");
        }
    }

    #[test]
    fn erfcx_against_high_precision_reference() {
        let cases = [
            (0.5, dd(0.6156903441929259, -2.312175868623341e-17)),
            (2.4, dd(0.21849873453703333, -2.612695377386918e-18)),
            (2.6, dd(0.20361324735670921, -3.436082104339015e-18)),
            (40.0, dd(0.014100335983377814, 1.1845145315907312e-19)),
        ];
        for (x, want) in cases {
            let got = DoubleDouble::from(x).erfcx();
            assert!(rel(got, want) < 1e-28, "erfcx({x}): {got:?} vs {want:?}");
        }
    }
}
