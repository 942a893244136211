//! Plain-text table output shared by the sweep and stability artifacts.

/// Round-trip-safe float: 17 significant digits in scientific notation.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0647, 1e-300, -7.25e12, 0.0] {
            let s = csv_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(csv_float(1.5), "1.5000000000000000e0");
    }
}
