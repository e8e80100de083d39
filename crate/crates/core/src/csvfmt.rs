//! Number formatting shared by every CSV writer.

/// 17 significant digits in scientific notation; round-trips any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
