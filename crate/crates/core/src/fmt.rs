//! Numeric formatting for output artifacts.

/// 17-significant-digit scientific notation: enough to reproduce any f64
/// exactly, so CSV artifacts diff cleanly across implementations.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}
