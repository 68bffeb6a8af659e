//! Shared numeric helpers: 12-significant-digit rounding and formatting.

/// Round to 12 significant decimal digits.
///
/// Certificates store scalars rounded through this helper so that values
/// recomputed from a serialized certificate match the stored ones bit for
/// bit at the printed precision.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.11e}", x).parse().expect("round-trip of finite f64")
}

/// Shortest decimal form of the 12-significant-digit rounding of `x`.
pub fn fmt12(x: f64) -> String {
    format!("{}", sig12(x))
}

/// Fixed-width scientific form with exactly 12 significant digits.
///
/// Used for CSV rows where a uniform column format is wanted.
pub fn fmt12e(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Euclidean norm of a slice.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_to_twelve_digits() {
        assert_eq!(sig12(0.1104972361809), 0.110497236181);
        assert_eq!(sig12(1.0), 1.0);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-2.5e-300), -2.5e-300);
    }

    #[test]
    fn fmt12_round_trips() {
        let x = std::f64::consts::PI;
        let printed = fmt12(x);
        let back: f64 = printed.parse().unwrap();
        assert_eq!(back, sig12(x));
    }

    #[test]
    fn fmt12e_has_fixed_width_mantissa() {
        assert_eq!(fmt12e(0.5), "5.00000000000e-1");
    }
}
