/// Rounds to `decimals` places, ties to even.
pub fn round_half_even(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round_ties_even() / scale
}

pub fn round4(x: f64) -> f64 {
    round_half_even(x, 4)
}
