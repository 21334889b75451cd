//! Float formatting matching C's `%.12g`.

/// Significant digits written to CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `v` like C's `printf("%.12g", v)`: 12 significant digits, trailing
/// zeros removed, scientific notation when the decimal exponent is below -4
/// or at least 12, exponent with a sign and at least two digits.
pub fn fmt_g(v: f64) -> String {
    fmt_g_digits(v, SIGNIFICANT_DIGITS)
}

pub fn fmt_g_digits(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // `{:e}` rounds correctly to the requested digits, which fixes the exponent.
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
