//! Number rendering for the interchange formats.

/// Renders an IEEE-754 double at 17 significant digits (1 + 16), which
/// round-trips bit-exactly through `f64::from_str`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders an optional double; `None` becomes the empty field.
pub fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_are_parseable() {
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!("1.5000000000000000e1".parse::<f64>().unwrap(), 15.0);
        assert_eq!(fmt_opt_f64(None), "");
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
