//! Log-domain helpers. `ln 0 = -inf` throughout.

use std::f64::consts::LN_2;

/// `ln(a + b)` from `ln a` and `ln b`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `n · ln x`, with `0^0 = 1`.
#[inline]
pub fn ln_pow(ln_x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_x
    }
}

/// `ln(½(1 + a))` for `a ∈ [-1, 1]`, accurate near both ends.
#[inline]
pub fn ln_half_one_plus(a: f64) -> f64 {
    if a <= -1.0 {
        f64::NEG_INFINITY
    } else {
        a.ln_1p() - LN_2
    }
}

/// `ln x` for `x >= 0`.
#[inline]
pub fn ln_nonneg(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// `exp` that maps `-inf` to an exact zero.
#[inline]
pub fn exp_or_zero(ln_x: f64) -> f64 {
    if ln_x == f64::NEG_INFINITY {
        0.0
    } else {
        ln_x.exp()
    }
}
