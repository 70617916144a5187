//! Error function family in double precision.
//!
//! `erf`/`erfc` are the FreeBSD rational approximations (via `libm`), which
//! stay within about one ulp. `erfcx` is built on top for the Gaussian-strip
//! integrals, where `exp(x^2)` and `erfc(x)` individually over/underflow.

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Error function.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, accurate in relative terms for
/// large positive `x`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfcx(-x) = 2 exp(x^2) - erfcx(x)
        return 2.0 * exp_square(x) - erfcx(-x);
    }
    if x < 2.5 {
        exp_square(x) * erfc(x)
    } else {
        continued_fraction(x, 50)
    }
}

/// `exp(x*x)` with the rounding error of the square folded back in.
#[inline]
fn exp_square(x: f64) -> f64 {
    let hi = x * x;
    let lo = x.mul_add(x, -hi);
    hi.exp() * (1.0 + lo)
}

/// Laplace continued fraction for `erfcx`, evaluated backwards from depth
/// `terms`. Converges quickly for `x >= 2.5`.
fn continued_fraction(x: f64, terms: usize) -> f64 {
    let mut f = x;
    for k in (1..=terms).rev() {
        f = x + 0.5 * k as f64 / f;
    }
    FRAC_1_SQRT_PI / f
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * i as f64)
}
