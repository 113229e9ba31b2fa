use crate::error::{invalid, Result};

/// Discarded weight targeted by [`default_schmidt_cutoff`].
pub const SCHMIDT_TAIL_WEIGHT: f64 = 1e-8;

/// Default truncation: at least `1 + ⌈20 (1 + r²)⌉`, raised until the
/// discarded weight `tanh^{2(n_max+1)} r` is below [`SCHMIDT_TAIL_WEIGHT`].
pub fn default_schmidt_cutoff(r: f64) -> usize {
    let base = 1 + (20.0 * (1.0 + r * r)).ceil() as usize;
    let t = r.tanh();
    if !(t > 0.0) {
        return base;
    }
    // smallest n with 2(n+1) ln t ≤ ln w
    let needed = (SCHMIDT_TAIL_WEIGHT.ln() / (2.0 * t.ln())).ceil() as usize;
    base.max(needed)
}

/// Photon-number Schmidt coefficients of the two-mode squeezed vacuum,
/// `c_n = tanhⁿ r / cosh r` for `n = 0..=n_max`.
pub fn schmidt_coefficients(r: f64, n_max: usize) -> Result<Vec<f64>> {
    if !r.is_finite() || r < 0.0 {
        return invalid(format!("squeezing parameter {r} must be finite and ≥ 0"));
    }
    let t = r.tanh();
    let c0 = 1.0 / r.cosh();
    Ok(std::iter::successors(Some(c0), |c| Some(c * t)).take(n_max + 1).collect())
}
