//! Discrete (Bohm) spin-EPR criterion for two spin-½ particles.
//!
//! The criterion reads `Δ_inf J_x^A Δ_inf J_y^A < ½ Σ P(J_z^B) |⟨J_z^A⟩_{J_z^B}|`.
//! Inference errors use the full conditional distributions: for a
//! two-outcome observable the optimal estimate given `B`'s result is the
//! conditional mean, so `Δ²_inf J = Σ_b P(b) Var(J^A | b)`.

use nalgebra::{Matrix2, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Steering threshold quoted for Werner states (literature value).
pub const WERNER_STEERING_THRESHOLD: f64 = 0.5;
/// Werner purity above which a Bell inequality is quoted as violable (literature value).
pub const WERNER_BELL_THRESHOLD: f64 = 0.66;
/// Detection efficiency quoted for the Bohm criterion on the singlet (literature value,
/// not derived here because the null-detection model is unspecified).
pub const SINGLET_DETECTION_EFFICIENCY_THRESHOLD: f64 = 0.62;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Unit vector naming a spin measurement direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis(Vector3<f64>);

impl Axis {
    pub const X: Axis = Axis(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: Axis = Axis(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: Axis = Axis(Vector3::new(0.0, 0.0, 1.0));

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return invalid("axis must be a finite non-zero vector");
        }
        Ok(Axis(v / n))
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// `σ·n`.
    fn pauli(&self) -> Matrix2<Complex64> {
        let [x, y, z] = [self.0.x, self.0.y, self.0.z];
        Matrix2::new(
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        )
    }

    /// Rotation by `angle` about `about` (right-handed, Rodrigues).
    pub fn rotated(&self, about: Axis, angle: f64) -> Axis {
        let k = about.0;
        let v = self.0;
        let (s, c) = angle.sin_cos();
        Axis(v * c + k.cross(&v) * s + k * k.dot(&v) * (1.0 - c))
    }
}

/// `exp(−i angle n·σ/2)`, the spin-½ representation of [`Axis::rotated`].
pub fn su2_rotation(about: Axis, angle: f64) -> Matrix2<Complex64> {
    let (s, c) = (angle / 2.0).sin_cos();
    Matrix2::identity() * Complex64::new(c, 0.0) - about.pauli() * Complex64::new(0.0, s)
}

/// Two-qubit density matrix in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<Complex64>,
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

impl TwoQubitState {
    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("density matrix has non-finite entries");
        }
        let herm_err = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > 1e-12 {
            return invalid(format!("density matrix is not Hermitian ({herm_err:.3e})"));
        }
        let tr = rho.trace();
        if (tr - C1).norm() > 1e-12 {
            return invalid(format!("trace is {tr}, expected 1"));
        }
        let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eig = herm.symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return invalid(format!("density matrix has negative eigenvalue {min_eig}"));
        }
        Ok(Self { rho: herm })
    }

    /// Singlet `(|↑↓⟩ − |↓↑⟩)/√2`.
    pub fn singlet() -> Self {
        let h = Complex64::new(0.5, 0.0);
        let mut rho = Matrix4::zeros();
        rho[(1, 1)] = h;
        rho[(2, 2)] = h;
        rho[(1, 2)] = -h;
        rho[(2, 1)] = -h;
        Self { rho }
    }

    /// `(1 − p_W) I/4 + p_W |ψ⟩⟨ψ|` with `|ψ⟩` the singlet.
    pub fn werner(p_w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_w) {
            return invalid(format!("Werner weight {p_w} outside [0, 1]"));
        }
        let mixed: Matrix4<Complex64> = Matrix4::identity() * Complex64::new((1.0 - p_w) / 4.0, 0.0);
        Ok(Self { rho: mixed + Self::singlet().rho * Complex64::new(p_w, 0.0) })
    }

    /// Product of two single-qubit states given by Bloch vectors (`|v| ≤ 1`).
    pub fn product_from_bloch(a: Vector3<f64>, b: Vector3<f64>) -> Result<Self> {
        let qubit = |v: Vector3<f64>| -> Result<Matrix2<Complex64>> {
            if v.norm() > 1.0 + 1e-12 {
                return invalid("Bloch vector longer than 1");
            }
            let sigma = Axis(v).pauli();
            Ok((Matrix2::identity() + sigma) * Complex64::new(0.5, 0.0))
        };
        Self::new(kron(&qubit(a)?, &qubit(b)?))
    }

    /// Convex combination `Σ w_k ρ_k`; weights are normalised.
    pub fn mixture(parts: &[(f64, TwoQubitState)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.is_empty() || parts.iter().any(|(w, _)| !(*w >= 0.0)) || !(total > 0.0) {
            return invalid("mixture needs non-negative weights with positive sum");
        }
        let rho = parts
            .iter()
            .fold(Matrix4::zeros(), |acc, (w, s)| acc + s.rho * Complex64::new(w / total, 0.0));
        Self::new(rho)
    }

    pub fn rho(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    /// `(U ⊗ U) ρ (U ⊗ U)†`.
    pub fn rotated(&self, u: &Matrix2<Complex64>) -> Self {
        let uu = kron(u, u);
        Self { rho: uu * self.rho * uu.adjoint() }
    }

    /// `⟨J_m^A J_n^B⟩`.
    pub fn spin_correlation(&self, a: Axis, b: Axis) -> f64 {
        let op = kron(&a.pauli(), &b.pauli()) * Complex64::new(0.25, 0.0);
        (self.rho * op).trace().re
    }

    /// Branches `(P(b), ρ_A|b)` of a `J_n^B` measurement, outcome `+½` first.
    fn conditional_branches(&self, b_axis: Axis) -> [(f64, Matrix2<Complex64>); 2] {
        let sigma = b_axis.pauli();
        [1.0, -1.0].map(|sign| {
            let proj = (Matrix2::identity() + sigma * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0);
            let projected = self.rho * kron(&Matrix2::identity(), &proj);
            let mut reduced = Matrix2::from_element(C0);
            for i in 0..2 {
                for j in 0..2 {
                    reduced[(i, j)] = projected[(2 * i, 2 * j)] + projected[(2 * i + 1, 2 * j + 1)];
                }
            }
            let prob = reduced.trace().re;
            (prob, reduced)
        })
    }
}

fn spin_mean(rho_a: &Matrix2<Complex64>, prob: f64, axis: Axis) -> f64 {
    0.5 * (rho_a * axis.pauli()).trace().re / prob
}

/// Smallest branch probability treated as a real outcome.
const MIN_BRANCH_PROB: f64 = 1e-15;

/// Inferred variances below this are roundoff on the `¼` scale and are
/// reported as exactly zero; otherwise the square root would turn `1e-17`
/// noise into a `3e-9` deviation.
const VARIANCE_FLOOR: f64 = 64.0 * f64::EPSILON * 0.25;

/// `Δ_inf J_a^A` when inferring `J` along `a_axis` at `A` from `J` along
/// `b_axis` at `B`.
pub fn inferred_spin_deviation(state: &TwoQubitState, a_axis: Axis, b_axis: Axis) -> f64 {
    let var: f64 = state
        .conditional_branches(b_axis)
        .iter()
        .filter(|(p, _)| *p > MIN_BRANCH_PROB)
        .map(|(p, rho_a)| {
            let m = spin_mean(rho_a, *p, a_axis);
            p * (0.25 - m * m).max(0.0)
        })
        .sum();
    if var < VARIANCE_FLOOR {
        0.0
    } else {
        var.sqrt()
    }
}

/// Measurement directions for the Bohm criterion: `a` holds the `(x, y, z)`
/// roles at `A`, `b` the `B` axes conditioned on for each role.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinFrame {
    pub a: [Axis; 3],
    pub b: [Axis; 3],
}

impl Default for SpinFrame {
    fn default() -> Self {
        Self { a: [Axis::X, Axis::Y, Axis::Z], b: [Axis::X, Axis::Y, Axis::Z] }
    }
}

impl SpinFrame {
    pub fn rotated(&self, about: Axis, angle: f64) -> Self {
        Self {
            a: self.a.map(|v| v.rotated(about, angle)),
            b: self.b.map(|v| v.rotated(about, angle)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCriterionReport {
    pub dinf_jx: f64,
    pub dinf_jy: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl SpinCriterionReport {
    /// `rhs − Δ_inf J_x Δ_inf J_y`; positive when the criterion holds.
    pub fn margin(&self) -> f64 {
        self.rhs - self.dinf_jx * self.dinf_jy
    }
}

/// Bohm criterion on `A`'s canonical axes, conditioning on the given `B` axes.
pub fn bohm_criterion(state: &TwoQubitState, infer_x_from: Axis, infer_y_from: Axis, rhs_axis: Axis) -> SpinCriterionReport {
    let frame = SpinFrame { a: [Axis::X, Axis::Y, Axis::Z], b: [infer_x_from, infer_y_from, rhs_axis] };
    bohm_criterion_in_frame(state, &frame)
}

pub fn bohm_criterion_in_frame(state: &TwoQubitState, frame: &SpinFrame) -> SpinCriterionReport {
    let dinf_jx = inferred_spin_deviation(state, frame.a[0], frame.b[0]);
    let dinf_jy = inferred_spin_deviation(state, frame.a[1], frame.b[1]);
    let rhs = 0.5
        * state
            .conditional_branches(frame.b[2])
            .iter()
            .filter(|(p, _)| *p > MIN_BRANCH_PROB)
            .map(|(p, rho_a)| p * spin_mean(rho_a, *p, frame.a[2]).abs())
            .sum::<f64>();
    SpinCriterionReport { dinf_jx, dinf_jy, rhs, satisfied: dinf_jx * dinf_jy < rhs }
}

/// Continuum-limit (Stokes operator) criterion `Δ_inf J_x Δ_inf J_y < ½ |⟨J_z⟩|`.
pub fn stokes_criterion(dinf_jx: f64, dinf_jy: f64, mean_jz: f64) -> Result<bool> {
    if !(dinf_jx >= 0.0) || !(dinf_jy >= 0.0) || !mean_jz.is_finite() {
        return invalid("inference errors must be non-negative and the mean finite");
    }
    Ok(dinf_jx * dinf_jy < 0.5 * mean_jz.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WernerCriterion {
    SteeringQuote,
    Bohm,
    BellQuote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    /// Computed here by bisection.
    Derived,
    /// Quoted constant; no derivation is implemented.
    Literature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerThreshold {
    pub criterion: WernerCriterion,
    pub threshold: f64,
    pub source: ThresholdSource,
}

/// Werner weight above which `criterion` holds.
///
/// `Bohm` bisects the margin of [`bohm_criterion`] over `p_W ∈ [0.5, 1]`
/// until the bracket is narrower than `resolution`; the other two return
/// the quoted literature constants.
pub fn werner_threshold_sweep(criterion: WernerCriterion, resolution: f64) -> Result<WernerThreshold> {
    if !(resolution > 0.0 && resolution <= 0.01) {
        return invalid(format!("resolution {resolution} outside (0, 0.01]"));
    }
    let (threshold, source) = match criterion {
        WernerCriterion::SteeringQuote => (WERNER_STEERING_THRESHOLD, ThresholdSource::Literature),
        WernerCriterion::BellQuote => (WERNER_BELL_THRESHOLD, ThresholdSource::Literature),
        WernerCriterion::Bohm => {
            let holds = |p: f64| {
                let s = TwoQubitState::werner(p).expect("p in range");
                bohm_criterion(&s, Axis::X, Axis::Y, Axis::Z).satisfied
            };
            let (mut lo, mut hi) = (0.5, 1.0);
            debug_assert!(!holds(lo) && holds(hi));
            while hi - lo >= resolution {
                let mid = 0.5 * (lo + hi);
                if holds(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (0.5 * (lo + hi), ThresholdSource::Derived)
        }
    };
    Ok(WernerThreshold { criterion, threshold, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_endpoints() {
        let mixed = TwoQubitState::werner(0.0).unwrap();
        assert_eq!(*mixed.rho(), Matrix4::identity() * Complex64::new(0.25, 0.0));
        let pure = TwoQubitState::werner(1.0).unwrap();
        assert!((pure.rho() * pure.rho() - pure.rho()).iter().all(|z| z.norm() < 1e-15));
        assert!(TwoQubitState::werner(1.5).is_err());
        assert!(TwoQubitState::werner(-0.1).is_err());
    }

    #[test]
    fn werner_correlations() {
        for p in [0.0, 0.3, 0.75, 1.0] {
            let s = TwoQubitState::werner(p).unwrap();
            for a in [Axis::X, Axis::Y, Axis::Z] {
                assert!((s.spin_correlation(a, a) + p / 4.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_satisfies() {
        let rep = bohm_criterion(&TwoQubitState::singlet(), Axis::X, Axis::Y, Axis::Z);
        assert_eq!(rep.dinf_jx, 0.0);
        assert_eq!(rep.dinf_jy, 0.0);
        assert_eq!(rep.rhs, 0.25);
        assert!(rep.satisfied);
    }

    #[test]
    fn product_state_fails_at_equality() {
        let s = TwoQubitState::product_from_bloch(Vector3::z(), -Vector3::z()).unwrap();
        let rep = bohm_criterion(&s, Axis::X, Axis::Y, Axis::Z);
        assert_eq!(rep.dinf_jx * rep.dinf_jy, 0.25);
        assert_eq!(rep.rhs, 0.25);
        assert!(!rep.satisfied);
    }

    #[test]
    fn stokes_examples() {
        assert!(stokes_criterion(0.0, 0.0, 0.1).unwrap());
        assert!(!stokes_criterion(0.5, 0.5, 0.4).unwrap());
        assert!(stokes_criterion(0.3, 0.3, 0.2).unwrap());
        assert!(stokes_criterion(-0.1, 0.3, 0.2).is_err());
    }

    #[test]
    fn quoted_thresholds() {
        let s = werner_threshold_sweep(WernerCriterion::SteeringQuote, 1e-3).unwrap();
        assert_eq!((s.threshold, s.source), (0.5, ThresholdSource::Literature));
        let b = werner_threshold_sweep(WernerCriterion::BellQuote, 1e-3).unwrap();
        assert_eq!((b.threshold, b.source), (0.66, ThresholdSource::Literature));
        assert!(werner_threshold_sweep(WernerCriterion::Bohm, 0.0).is_err());
        assert!(werner_threshold_sweep(WernerCriterion::Bohm, 0.02).is_err());
    }

    #[test]
    fn rejects_invalid_density_matrix() {
        let mut rho = Matrix4::identity() * Complex64::new(0.25, 0.0);
        rho[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(TwoQubitState::new(rho).is_err());
        let neg = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.2, 0.0, 0.0, -0.2).map(|v| Complex64::new(v, 0.0)));
        assert!(TwoQubitState::new(neg).is_err());
        let tr2 = Matrix4::identity() * Complex64::new(0.5, 0.0);
        assert!(TwoQubitState::new(tr2).is_err());
    }

    #[test]
    fn su2_matches_so3() {
        let about = Axis::new(0.3, -0.5, 0.8).unwrap();
        let angle = 1.1;
        let u = su2_rotation(about, angle);
        for v in [Axis::X, Axis::Y, Axis::Z, Axis::new(1.0, 2.0, 3.0).unwrap()] {
            let lhs = u * v.pauli() * u.adjoint();
            let rhs = v.rotated(about, angle).pauli();
            assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-14));
        }
    }
}
