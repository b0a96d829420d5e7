//! Locale-independent number formatting for CSV output.

/// Significant digits in every CSV float field.
pub const SIG_DIGITS: usize = 12;

/// C-style `%.{sig}g`: shortest of fixed or scientific notation with `sig`
/// significant digits, trailing zeros removed, `.` as decimal separator.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", m, sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`fmt_sig`] at [`SIG_DIGITS`].
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_printf_g() {
        // reference strings from C printf("%.12g")
        assert_eq!(fmt12(2f64.ln()), "0.69314718056");
        assert_eq!(fmt12(5f64.ln() / 3.0), "0.536479304145");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(-2.5), "-2.5");
        assert_eq!(fmt12(1e-5), "1e-05");
        assert_eq!(fmt12(0.0001), "0.0001");
        assert_eq!(fmt12(123456789012.0), "123456789012");
        assert_eq!(fmt12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(999999999999.5), "1e+12");
    }
}
