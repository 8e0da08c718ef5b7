//! Byte-stable CSV number formatting: '.' decimal separator, 17 significant
//! digits, no locale dependence.

/// Formats a double with 17 significant digits (1 + 16 in scientific
/// notation), enough to round-trip any f64 bit pattern.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips_exactly() {
        for &x in &[
            1.0,
            -0.1,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -2.2250738585072014e-308,
        ] {
            let s = float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
        assert_eq!(float(0.0), "0");
    }
}
