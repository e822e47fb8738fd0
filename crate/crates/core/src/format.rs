//! Decimal formatting shared by every text output.

/// Formats like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// stripped, scientific notation outside `[1e-5, 10^sig)`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // round to `sig` digits first so the exponent reflects carries (9.99.. -> 10)
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The 12-significant-digit form used in CSV and membership files.
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(-2.25), "-2.25");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt12(123456.0), "123456");
        assert_eq!(fmt12(1e-7), "1e-07");
        assert_eq!(fmt12(1.5e13), "1.5e+13");
        assert_eq!(fmt12(0.0001), "0.0001");
        assert_eq!(fmt_sig(9.9999999, 3), "10");
        assert_eq!(fmt_sig(999999.0, 3), "1e+06");
    }
}
