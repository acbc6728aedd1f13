//! Float formatting for text output: shortest round-trip digits (at most 17
//! significant), exponent form outside [1e-5, 1e16).

pub fn float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
