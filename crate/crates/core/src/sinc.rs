/// `sin(d·y/2) / d`, continuous through `d = 0` where it equals `y/2`.
///
/// Switches to the Taylor form when `|d·y| < 1e-6`.
pub(crate) fn half_angle_sinc(d: f64, y: f64) -> f64 {
    let x = 0.5 * d * y;
    if (d * y).abs() < 1e-6 {
        0.5 * y * (1.0 - x * x / 6.0)
    } else {
        x.sin() / d
    }
}
