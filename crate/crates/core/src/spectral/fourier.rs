//! Fourier coefficients of the Kepler factor `1/(1 + e cos t)`.

// below this eccentricity the factor is 1 to machine precision
const CIRCULAR_CUTOFF: f64 = 1e-8;

/// `c_m = (1/2π) ∫₀^{2π} e^{-imt} / (1 + e cos t) dt`.
///
/// Closed form `c_m = r^{|m|} / √(1 - e²)` with
/// `r = (√(1 - e²) - 1)/e`, written as `-e / (1 + √(1 - e²))` to avoid
/// cancellation for small `e`.
///
/// # Panics
///
/// If `e` lies outside `[0, 1)`.
pub fn inverse_kepler_coefficient(e: f64, m: i64) -> f64 {
    assert!((0.0..1.0).contains(&e), "eccentricity {e} outside [0, 1)");
    if e <= CIRCULAR_CUTOFF {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let s = (1.0 - e * e).sqrt();
    let r = -e / (1.0 + s);
    r.powi(m.unsigned_abs() as i32) / s
}

/// Coefficients `c_m` for `m ∈ [-max_m, max_m]`, stored at index `m + max_m`.
pub(crate) fn coefficient_table(e: f64, max_m: usize) -> Vec<f64> {
    let max_m = max_m as i64;
    (-max_m..=max_m)
        .map(|m| inverse_kepler_coefficient(e, m))
        .collect()
}
