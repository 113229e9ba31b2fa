//! Figures of merit for EPR-based protocols: continuous-variable QKD with
//! direct and reverse reconciliation, coherent-state teleportation
//! (fidelity and T–V measures) and entanglement swapping.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::criteria::{evaluate, inference_variance_linear, CriterionReport};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{GaussianState, Quadrature};

/// Fidelity reachable by measure-and-prepare strategies for broad coherent ensembles.
pub const CLASSICAL_FIDELITY_LIMIT: f64 = 0.5;
/// Fidelity above which the teleported output is the best surviving copy.
pub const NO_CLONING_FIDELITY_LIMIT: f64 = 2.0 / 3.0;

/// Classical bound `(n̄ + 1)/(2n̄ + 1)` on the average fidelity over a
/// Gaussian ensemble of coherent states with mean photon number `n̄`.
pub fn classical_fidelity_bound(mean_photons: f64) -> Result<f64> {
    if !(mean_photons >= 0.0) || !mean_photons.is_finite() {
        return invalid("mean photon number must be finite and ≥ 0");
    }
    Ok((mean_photons + 1.0) / (2.0 * mean_photons + 1.0))
}

fn check_squeezing(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return invalid(format!("squeezing parameter {r} must be finite and ≥ 0"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// QKD

/// Mode indices of the QKD state built by [`qkd_state`].
pub const ALICE: usize = 0;
pub const BOB: usize = 1;
pub const EVE: usize = 2;

/// Conditional variances for the amplitude (`x`) and phase (`y`) channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPair {
    pub x: f64,
    pub y: f64,
}

impl ChannelPair {
    pub fn product(&self) -> f64 {
        self.x * self.y
    }
}

/// All conditional variances entering the QKD information rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QkdVariances {
    pub a_given_b: ChannelPair,
    pub a_given_e: ChannelPair,
    pub b_given_a: ChannelPair,
    pub b_given_e: ChannelPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QkdResult {
    #[serde(rename = "delta_I_direct")]
    pub delta_i_direct: f64,
    #[serde(rename = "delta_I_reverse")]
    pub delta_i_reverse: f64,
    #[serde(rename = "V_A_given_B")]
    pub v_a_given_b: f64,
    #[serde(rename = "V_B_given_A")]
    pub v_b_given_a: f64,
    #[serde(rename = "V_A_given_E")]
    pub v_a_given_e: f64,
    #[serde(rename = "V_B_given_E")]
    pub v_b_given_e: f64,
    pub key_possible_direct: bool,
    pub key_possible_reverse: bool,
}

impl QkdResult {
    fn from_variances(v: &QkdVariances) -> Self {
        let delta_i_direct = 0.5 * (v.a_given_e.product() / v.a_given_b.product()).log2();
        let delta_i_reverse = 0.5 * (v.b_given_e.product() / v.b_given_a.product()).log2();
        Self {
            delta_i_direct,
            delta_i_reverse,
            v_a_given_b: v.a_given_b.product(),
            v_b_given_a: v.b_given_a.product(),
            v_a_given_e: v.a_given_e.product(),
            v_b_given_e: v.b_given_e.product(),
            key_possible_direct: delta_i_direct > 0.0,
            key_possible_reverse: delta_i_reverse > 0.0,
        }
    }
}

/// Alice keeps one beam of a two-mode squeezed vacuum losslessly and sends
/// the other through a channel of transmission `eta_b`; the channel's
/// reflected port is Eve's mode. Modes are `[ALICE, BOB, EVE]`.
pub fn qkd_state(r: f64, eta_b: f64) -> Result<GaussianState> {
    check_squeezing(r)?;
    if !(eta_b > 0.0) {
        if eta_b == 0.0 {
            return Err(Error::NoChannel("eta_B = 0 transmits nothing to Bob".into()));
        }
        return invalid(format!("efficiency {eta_b} outside (0, 1]"));
    }
    GaussianState::two_mode_squeezed(r)?.apply_loss(BOB, eta_b, true)
}

/// Variance of one party's quadrature after a homodyne measurement of
/// the same quadrature on another mode, from the Gaussian posterior.
fn posterior_variance(state: &GaussianState, target: usize, measured: usize, angle: f64) -> Result<f64> {
    let post = state.condition_on_homodyne(measured, angle, 0.0)?;
    let idx = if target > measured { target - 1 } else { target };
    let q = if angle == 0.0 { Quadrature::x(idx) } else { Quadrature::p(idx) };
    post.quadrature_variance(q)
}

/// Conditional variances by Gaussian conditioning on a three-mode
/// `[Alice, Bob, Eve]` state. Eve conditions each channel on her matching
/// quadrature.
pub fn qkd_conditional_variances(state: &GaussianState) -> Result<QkdVariances> {
    if state.n_modes() != 3 {
        return invalid("QKD analysis needs an [Alice, Bob, Eve] three-mode state");
    }
    let pair = |target, measured| -> Result<ChannelPair> {
        Ok(ChannelPair {
            x: posterior_variance(state, target, measured, 0.0)?,
            y: posterior_variance(state, target, measured, FRAC_PI_2)?,
        })
    };
    Ok(QkdVariances {
        a_given_b: pair(ALICE, BOB)?,
        a_given_e: pair(ALICE, EVE)?,
        b_given_a: pair(BOB, ALICE)?,
        b_given_e: pair(BOB, EVE)?,
    })
}

/// Same quantities from covariance entries via `V_t − ⟨t, q⟩²/V_q`.
pub fn qkd_regression_variances(state: &GaussianState) -> Result<QkdVariances> {
    if state.n_modes() != 3 {
        return invalid("QKD analysis needs an [Alice, Bob, Eve] three-mode state");
    }
    let pair = |target, probe| -> Result<ChannelPair> {
        Ok(ChannelPair {
            x: inference_variance_linear(state, Quadrature::x(target), Quadrature::x(probe), None)?.variance,
            y: inference_variance_linear(state, Quadrature::p(target), Quadrature::p(probe), None)?.variance,
        })
    };
    Ok(QkdVariances {
        a_given_b: pair(ALICE, BOB)?,
        a_given_e: pair(ALICE, EVE)?,
        b_given_a: pair(BOB, ALICE)?,
        b_given_e: pair(BOB, EVE)?,
    })
}

/// Net information rates `ΔI = ½ log₂(V_{·|E}^X V_{·|E}^Y / V_{·|·}^X V_{·|·}^Y)`
/// for direct (Bob infers Alice) and reverse (Alice infers Bob) reconciliation.
pub fn qkd_rates(r: f64, eta_b: f64) -> Result<QkdResult> {
    let state = qkd_state(r, eta_b)?;
    Ok(QkdResult::from_variances(&qkd_conditional_variances(&state)?))
}

/// [`qkd_rates`] computed through [`qkd_regression_variances`].
pub fn qkd_rates_regression(r: f64, eta_b: f64) -> Result<QkdResult> {
    let state = qkd_state(r, eta_b)?;
    Ok(QkdResult::from_variances(&qkd_regression_variances(&state)?))
}

struct PairMoments {
    va_x: f64,
    va_y: f64,
    vb_x: f64,
    vb_y: f64,
    c_x: f64,
    c_y: f64,
}

fn pair_moments(state: &GaussianState, a: usize, b: usize) -> Result<PairMoments> {
    Ok(PairMoments {
        va_x: state.quadrature_variance(Quadrature::x(a))?,
        va_y: state.quadrature_variance(Quadrature::p(a))?,
        vb_x: state.quadrature_variance(Quadrature::x(b))?,
        vb_y: state.quadrature_variance(Quadrature::p(b))?,
        c_x: state.quadrature_covariance(Quadrature::x(a), Quadrature::x(b))?,
        c_y: state.quadrature_covariance(Quadrature::p(a), Quadrature::p(b))?,
    })
}

/// `V_{A|B} = [V_A^X − |⟨x^B, x^A⟩|²/V_B^X][V_A^Y − |⟨Y^B, Y^A⟩|²/V_B^Y]`.
pub fn v_a_given_b_expansion(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    let m = pair_moments(state, a, b)?;
    Ok((m.va_x - m.c_x * m.c_x / m.vb_x) * (m.va_y - m.c_y * m.c_y / m.vb_y))
}

/// Reverse-inference product exactly as commonly printed:
/// `[V_A^X − |⟨x^B, x^A⟩|²/V_A^X][V_B^Y − |⟨Y^B, Y^A⟩|²/V_A^Y]`.
///
/// The first bracket has `V_A^X` where the conditional variance of `B`
/// needs `V_B^X`; it agrees with [`v_b_given_a_symmetric`] only when
/// `V_A^X = V_B^X`. Kept for comparison with the printed expression.
pub fn v_b_given_a_printed(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    let m = pair_moments(state, a, b)?;
    Ok((m.va_x - m.c_x * m.c_x / m.va_x) * (m.vb_y - m.c_y * m.c_y / m.va_y))
}

/// `V_{B|A} = [V_B^X − |⟨x^B, x^A⟩|²/V_A^X][V_B^Y − |⟨Y^B, Y^A⟩|²/V_A^Y]`.
pub fn v_b_given_a_symmetric(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    let m = pair_moments(state, a, b)?;
    Ok((m.vb_x - m.c_x * m.c_x / m.va_x) * (m.vb_y - m.c_y * m.c_y / m.va_y))
}

/// Transmission at which the direct-reconciliation rate changes sign,
/// bracketed to `tol` by bisection over `η_B ∈ (0, 1)`.
pub fn direct_reconciliation_threshold(r: f64, tol: f64) -> Result<f64> {
    check_squeezing(r)?;
    if r == 0.0 {
        return invalid("no key is possible without squeezing");
    }
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let rate = |eta: f64| qkd_rates(r, eta).map(|q| q.delta_i_direct);
    let (mut lo, mut hi) = (1e-6, 1.0);
    if rate(lo)? > 0.0 || rate(hi)? <= 0.0 {
        return Err(Error::Degenerate("direct rate does not change sign on (0, 1]".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Teleportation

/// Efficiencies of Alice's and Bob's halves of the teleportation resource.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportLosses {
    pub eta_alice: f64,
    pub eta_bob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportResult {
    pub fidelity: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "V_product")]
    pub v_product: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Teleportation {
    pub output: GaussianState,
    pub result: TeleportResult,
}

/// `Tr(ρ₁ ρ₂)` of two single-mode Gaussian states,
/// `2 exp(−½ δᵀ (C₁ + C₂)⁻¹ δ) / √det(C₁ + C₂)` with `δ` the mean offset.
///
/// Equals the fidelity `⟨ψ|ρ₂|ψ⟩` when the first state is pure.
pub fn gaussian_overlap(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.n_modes() != 1 || b.n_modes() != 1 {
        return invalid("overlap is implemented for single-mode states");
    }
    let sum: Matrix2<f64> = a.mode_block(0)? + b.mode_block(0)?;
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular covariance sum".into()))?;
    let d = nalgebra::Vector2::new(a.mean()[0] - b.mean()[0], a.mean()[1] - b.mean()[1]);
    let quad = (d.transpose() * inv * d)[(0, 0)];
    Ok(2.0 * (-0.5 * quad).exp() / sum.determinant().sqrt())
}

/// `R_out/R_in` for one quadrature with `R = mean²/variance`.
///
/// Output means are exactly `gain ×` input means, so the ratio reduces to
/// `gain² V_in / V_out`; that form is used when the input carries no
/// displacement in this quadrature.
fn snr_ratio(mean_in: f64, var_in: f64, mean_out: f64, var_out: f64, gain: f64) -> f64 {
    if mean_in.abs() > 1e-12 {
        (mean_out * mean_out / var_out) / (mean_in * mean_in / var_in)
    } else {
        gain * gain * var_in / var_out
    }
}

/// Joint `(input, output)` state of the dual-homodyne teleporter.
///
/// With resource modes `A` (Alice) and `B` (Bob) from a two-mode squeezed
/// vacuum, Bob's output is `x_out = g x_in + (x_B − g x_A)`,
/// `p_out = g p_in + (p_B + g p_A)`. The √2 of the 50/50 Bell measurement
/// is absorbed into `g`, so `g = 1` is unity transfer.
pub fn teleport_joint(input: &GaussianState, r: f64, gain: f64, losses: Option<TeleportLosses>) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return invalid("teleporter input must be a single mode");
    }
    check_squeezing(r)?;
    if !gain.is_finite() || gain < 0.0 {
        return invalid(format!("gain {gain} must be finite and ≥ 0"));
    }
    let mut joint = input.tensor(&GaussianState::two_mode_squeezed(r)?);
    if let Some(l) = losses {
        joint = joint.apply_loss(1, l.eta_alice, false)?.apply_loss(2, l.eta_bob, false)?;
    }
    #[rustfmt::skip]
    let map = DMatrix::from_row_slice(4, 6, &[
        1.0, 0.0,  0.0, 0.0, 0.0, 0.0,
        0.0, 1.0,  0.0, 0.0, 0.0, 0.0,
        gain, 0.0, -gain, 0.0, 1.0, 0.0,
        0.0, gain,  0.0, gain, 0.0, 1.0,
    ]);
    Ok(joint.linear_image(&map))
}

/// Teleports a single-mode Gaussian `input` through a two-mode squeezed
/// resource of squeezing `r` with feed-forward `gain`.
///
/// `fidelity` is the Gaussian overlap of input and output; `T` sums the
/// signal-to-noise transfer of both quadratures; `V_product` is the
/// output-given-input conditional variance product using the input
/// state's own moments.
pub fn teleport(input: &GaussianState, r: f64, gain: f64, losses: Option<TeleportLosses>) -> Result<Teleportation> {
    let joint = teleport_joint(input, r, gain, losses)?;
    let c = joint.cov();
    let mu = joint.mean();
    let output = joint.reduced(&[1])?;
    let fidelity = gaussian_overlap(input, &output)?;
    let t = snr_ratio(mu[0], c[(0, 0)], mu[2], c[(2, 2)], gain) + snr_ratio(mu[1], c[(1, 1)], mu[3], c[(3, 3)], gain);
    let v_product = (c[(2, 2)] - c[(0, 2)].powi(2) / c[(0, 0)]) * (c[(3, 3)] - c[(1, 3)].powi(2) / c[(1, 1)]);
    Ok(Teleportation {
        output,
        result: TeleportResult { fidelity, t, v_product, gain },
    })
}

// ---------------------------------------------------------------------------
// Entanglement swapping

/// Two-mode state `[Victor, Bob_out]` after teleporting Alice's half of
/// pair 1 (squeezing `r1`, shared with Victor) through pair 2 (`r2`).
pub fn entanglement_swap_state(r1: f64, r2: f64, gain: f64) -> Result<GaussianState> {
    check_squeezing(r1)?;
    check_squeezing(r2)?;
    if !gain.is_finite() || gain < 0.0 {
        return invalid(format!("gain {gain} must be finite and ≥ 0"));
    }
    // modes: Victor, Alice's input half, Alice's resource half, Bob
    let joint = GaussianState::two_mode_squeezed(r1)?.tensor(&GaussianState::two_mode_squeezed(r2)?);
    #[rustfmt::skip]
    let map = DMatrix::from_row_slice(4, 8, &[
        1.0, 0.0, 0.0,  0.0, 0.0,   0.0, 0.0, 0.0,
        0.0, 1.0, 0.0,  0.0, 0.0,   0.0, 0.0, 0.0,
        0.0, 0.0, gain, 0.0, -gain, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0,  gain, 0.0,  gain, 0.0, 1.0,
    ]);
    Ok(joint.linear_image(&map))
}

/// Criteria between Victor's retained mode (inferred) and Bob's
/// teleported output (steering).
pub fn entanglement_swap(r1: f64, r2: f64, gain: f64) -> Result<CriterionReport> {
    evaluate(&entanglement_swap_state(r1, r2, gain)?, 0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qkd_ideal_channel() {
        let r = 0.9f64;
        let q = qkd_rates(r, 1.0).unwrap();
        let c = (2.0 * r).cosh();
        assert!((q.v_a_given_e - c * c).abs() < 1e-10);
        assert!((q.v_a_given_b - 1.0 / (c * c)).abs() < 1e-12);
        assert!((q.delta_i_direct - 0.5 * (c.powi(2) / c.powi(-2)).log2()).abs() < 1e-10);
        assert!(q.key_possible_direct && q.key_possible_reverse);
    }

    #[test]
    fn qkd_no_channel() {
        assert!(matches!(qkd_rates(1.0, 0.0), Err(Error::NoChannel(_))));
        assert!(qkd_rates(1.0, 1.5).is_err());
        assert!(qkd_rates(-1.0, 0.5).is_err());
    }

    #[test]
    fn direct_rate_vanishes_at_half_transmission() {
        for r in [0.3, 1.0, 3.0] {
            let q = qkd_rates(r, 0.5).unwrap();
            assert!(q.delta_i_direct.abs() < 1e-9, "r={r}: {}", q.delta_i_direct);
            assert!(q.delta_i_reverse > 0.0);
        }
    }

    #[test]
    fn printed_and_symmetric_reverse_forms() {
        let s = qkd_state(1.0, 0.6).unwrap();
        let printed = v_b_given_a_printed(&s, ALICE, BOB).unwrap();
        let symmetric = v_b_given_a_symmetric(&s, ALICE, BOB).unwrap();
        let cond = qkd_conditional_variances(&s).unwrap().b_given_a.product();
        assert!((symmetric - cond).abs() < 1e-12);
        assert!((printed - symmetric).abs() > 1e-3);
        // on a symmetric pair the two forms agree
        let sym = GaussianState::two_mode_squeezed(0.7).unwrap();
        assert!((v_b_given_a_printed(&sym, 0, 1).unwrap() - v_b_given_a_symmetric(&sym, 0, 1).unwrap()).abs() < 1e-14);
        let expansion = v_a_given_b_expansion(&s, ALICE, BOB).unwrap();
        assert!((expansion - qkd_conditional_variances(&s).unwrap().a_given_b.product()).abs() < 1e-12);
    }

    #[test]
    fn classical_teleport_unity_gain() {
        let input = GaussianState::coherent(1.3, -0.4).unwrap();
        let t = teleport(&input, 0.0, 1.0, None).unwrap();
        assert!((t.output.cov()[(0, 0)] - 3.0).abs() < 1e-14);
        assert!((t.output.cov()[(1, 1)] - 3.0).abs() < 1e-14);
        assert!((t.result.fidelity - 0.5).abs() < 1e-14);
        assert!((t.result.v_product - 4.0).abs() < 1e-13);
        assert!((t.result.t - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn strong_entanglement_limit() {
        let input = GaussianState::coherent(0.5, 2.0).unwrap();
        let t = teleport(&input, 5.0, 1.0, None).unwrap();
        assert!(t.result.fidelity > 0.9999);
        assert!(t.result.v_product < 1e-7);
        assert!((t.output.mean() - input.mean()).amax() < 1e-12);
    }

    #[test]
    fn fidelity_bounds() {
        assert_eq!(classical_fidelity_bound(0.0).unwrap(), 1.0);
        assert!((classical_fidelity_bound(1e9).unwrap() - 0.5).abs() < 1e-9);
        assert!(classical_fidelity_bound(-1.0).is_err());
    }

    #[test]
    fn teleport_validation() {
        let two = GaussianState::vacuum(2).unwrap();
        assert!(teleport(&two, 1.0, 1.0, None).is_err());
        let one = GaussianState::vacuum(1).unwrap();
        assert!(teleport(&one, 1.0, -0.5, None).is_err());
        let lossy = teleport(&one, 1.0, 1.0, Some(TeleportLosses { eta_alice: 0.9, eta_bob: 0.8 })).unwrap();
        let ideal = teleport(&one, 1.0, 1.0, None).unwrap();
        assert!(lossy.result.fidelity < ideal.result.fidelity);
    }

    #[test]
    fn swap_values() {
        // D = e^{-2 r1} + e^{-2 r2} at unity gain
        let rep = entanglement_swap(1.0, 1.0, 1.0).unwrap();
        assert!((rep.duan_d - 0.270_670_566_473_225_4).abs() < 1e-12, "{}", rep.duan_d);
        assert!(rep.flags.entangled_duan);
        let classical = entanglement_swap(1.5, 0.0, 1.0).unwrap();
        assert!(classical.ppt_min_symplectic >= 1.0 - 1e-12);
        let none = entanglement_swap(0.0, 0.0, 1.0).unwrap();
        assert!(none.duan_d >= 1.0 && none.epsilon_sq >= 1.0);
    }
}
