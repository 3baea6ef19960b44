/// Locale-independent scientific notation with 17 significant digits,
/// enough to round-trip any `f64`.
pub(crate) fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn round_trips() {
        for x in [0.1, -3.0e-300, 1.0 / 3.0, 12345.678] {
            assert_eq!(super::num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(super::num(0.5), "5.0000000000000000e-1");
    }
}
