//! Deterministic float formatting for CSV and report output.
//!
//! Every floating-point value written to a results file goes through
//! [`sig9`] so that reruns of the same configuration produce byte-identical
//! files.

/// Formats `x` with 9 significant digits, `%g`-style.
///
/// Positional notation is used for decimal exponents in `[-4, 12]`,
/// scientific notation otherwise. Trailing zeros in the fraction are
/// trimmed, so `150.0` prints as `150` and `0.25` as `0.25`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }

    // `{:.8e}` rounds to 9 significant digits; re-render from its digits so
    // no second rounding happens.
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:.8e} output");
    let exp: i32 = exp.parse().expect("numeric exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 9);

    let body = if (-4..=12).contains(&exp) {
        render_positional(&digits, exp)
    } else {
        let m = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{}e{}", m, exp)
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

fn render_positional(digits: &str, exp: i32) -> String {
    let point = exp + 1; // digits before the decimal point
    let raw = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if (point as usize) >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!(
            "{}.{}",
            &digits[..point as usize],
            &digits[point as usize..]
        )
    };
    trim_fraction(&raw)
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn integers_print_bare() {
        assert_eq!(sig9(150.0), "150");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(30.0), "30");
    }

    #[test]
    fn fractions_trim_trailing_zeros() {
        assert_eq!(sig9(0.25), "0.25");
        assert_eq!(sig9(-0.25), "-0.25");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(0.0298), "0.0298");
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(123456789.123), "123456789");
        assert_eq!(sig9(1.234567894), "1.23456789");
        assert_eq!(sig9(1.234567896), "1.2345679");
    }

    #[test]
    fn extreme_exponents_use_scientific() {
        assert_eq!(sig9(1.0e-7), "1e-7");
        assert_eq!(sig9(2.5e20), "2.5e20");
        assert_eq!(sig9(-3.0e-9), "-3e-9");
    }

    #[test]
    fn non_finite() {
        assert_eq!(sig9(f64::INFINITY), "inf");
        assert_eq!(sig9(f64::NEG_INFINITY), "-inf");
        assert_eq!(sig9(f64::NAN), "nan");
    }
}
