use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use super::symplectic::{symplectic_eigenvalues, SymplecticTransform};
use super::{PHYSICALITY_TOL, SYMMETRY_TOL};
use crate::error::{invalid, Error, Result};

/// A single quadrature `x_θ = x cos θ + p sin θ` of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub mode: usize,
    cos: f64,
    sin: f64,
    angle: f64,
}

impl Quadrature {
    /// Amplitude quadrature `x` (θ = 0).
    pub fn x(mode: usize) -> Self {
        Self { mode, cos: 1.0, sin: 0.0, angle: 0.0 }
    }

    /// Phase quadrature `p` (θ = π/2).
    pub fn p(mode: usize) -> Self {
        Self { mode, cos: 0.0, sin: 1.0, angle: std::f64::consts::FRAC_PI_2 }
    }

    /// Quadrature at an arbitrary local-oscillator phase.
    ///
    /// Angles that are exact multiples of π/2 map onto `±x`/`±p` without
    /// trigonometric round-off.
    pub fn at_angle(mode: usize, theta: f64) -> Self {
        let angle = theta.rem_euclid(std::f64::consts::TAU);
        let quarter = angle / std::f64::consts::FRAC_PI_2;
        let (cos, sin) = if (quarter - quarter.round()).abs() < 1e-15 {
            match (quarter.round() as i64).rem_euclid(4) {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            }
        } else {
            (angle.cos(), angle.sin())
        };
        Self { mode, cos, sin, angle }
    }

    /// Local-oscillator phase in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Weights `(cos θ, sin θ)` on `(x, p)` of the mode.
    pub fn weights(&self) -> (f64, f64) {
        (self.cos, self.sin)
    }

    pub(crate) fn row(&self, n_modes: usize) -> DVector<f64> {
        let mut v = DVector::zeros(2 * n_modes);
        v[2 * self.mode] = self.cos;
        v[2 * self.mode + 1] = self.sin;
        v
    }
}

/// Gaussian state of `n_modes` bosonic modes: first and second moments
/// of the quadratures, ordered `(x₁, p₁, x₂, p₂, …)`, vacuum variance 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl From<GaussianState> for StateRepr {
    fn from(s: GaussianState) -> Self {
        let dim = s.cov.nrows();
        StateRepr {
            n_modes: s.n_modes(),
            mean: s.mean.iter().copied().collect(),
            cov: (0..dim).map(|i| (0..dim).map(|j| s.cov[(i, j)]).collect()).collect(),
        }
    }
}

impl TryFrom<StateRepr> for GaussianState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let dim = 2 * r.n_modes;
        if r.mean.len() != dim || r.cov.len() != dim || r.cov.iter().any(|row| row.len() != dim) {
            return invalid(format!("dimensions inconsistent with n_modes = {}", r.n_modes));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| r.cov[i][j]);
        GaussianState::new(DVector::from_vec(r.mean), cov)
    }
}

impl GaussianState {
    /// Validated constructor: symmetric, finite and physical
    /// (all symplectic eigenvalues ≥ 1 up to [`PHYSICALITY_TOL`]).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || dim % 2 != 0 || cov.ncols() != dim {
            return invalid(format!("covariance must be 2N×2N with N ≥ 1, got {}×{}", dim, cov.ncols()));
        }
        if mean.len() != dim {
            return invalid(format!("mean has length {} but covariance is {dim}×{dim}", mean.len()));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return invalid("state has non-finite entries");
        }
        let scale = cov.amax().max(1.0);
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return invalid(format!("covariance is not symmetric (max asymmetry {asym:.3e})"));
        }
        let state = Self::from_parts(mean, cov);
        let nu_min = state.min_symplectic_eigenvalue()?;
        if nu_min < 1.0 - PHYSICALITY_TOL * scale {
            return invalid(format!(
                "covariance violates the uncertainty principle (min symplectic eigenvalue {nu_min})"
            ));
        }
        Ok(state)
    }

    /// Internal constructor for results of physicality-preserving maps.
    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        let cov = (&cov + cov.transpose()) * 0.5;
        Self { mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return invalid("vacuum needs at least one mode");
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Coherent state with quadrature means `(x, p)`.
    pub fn coherent(x: f64, p: f64) -> Result<Self> {
        if !x.is_finite() || !p.is_finite() {
            return invalid("coherent amplitude must be finite");
        }
        Ok(Self {
            mean: DVector::from_vec(vec![x, p]),
            cov: DMatrix::identity(2, 2),
        })
    }

    /// Single-mode thermal state with variance `nu ≥ 1` in both quadratures.
    pub fn thermal(nu: f64) -> Result<Self> {
        if !(nu >= 1.0) || !nu.is_finite() {
            return invalid(format!("thermal variance {nu} must be finite and ≥ 1"));
        }
        Ok(Self {
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * nu,
        })
    }

    /// Two-mode squeezed vacuum: `⟨x_A x_B⟩ = sinh 2r`, `⟨p_A p_B⟩ = −sinh 2r`,
    /// all variances `cosh 2r`.
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return invalid(format!("squeezing parameter {r} must be finite and ≥ 0"));
        }
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
              c, 0.0,   s, 0.0,
            0.0,   c, 0.0,  -s,
              s, 0.0,   c, 0.0,
            0.0,  -s, 0.0,   c,
        ]);
        Ok(Self { mean: DVector::zeros(4), cov })
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn mode_block(&self, mode: usize) -> Result<Matrix2<f64>> {
        self.check_mode(mode)?;
        Ok(self.cov.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned())
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return invalid(format!("mode {mode} out of range for {}-mode state", self.n_modes()));
        }
        Ok(())
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(self.symplectic_eigenvalues()?[0])
    }

    /// True when every symplectic eigenvalue is 1 (up to the physicality slack).
    pub fn is_pure(&self) -> bool {
        let tol = 1e-8 * self.cov.amax().max(1.0);
        self.symplectic_eigenvalues()
            .map(|nu| nu.iter().all(|v| (v - 1.0).abs() < tol))
            .unwrap_or(false)
    }

    /// Mean of a quadrature.
    pub fn quadrature_mean(&self, q: Quadrature) -> Result<f64> {
        self.check_mode(q.mode)?;
        let (c, s) = q.weights();
        Ok(c * self.mean[2 * q.mode] + s * self.mean[2 * q.mode + 1])
    }

    /// Symmetrised covariance `⟨a, b⟩` of two quadratures (variance when equal).
    pub fn quadrature_covariance(&self, a: Quadrature, b: Quadrature) -> Result<f64> {
        self.check_mode(a.mode)?;
        self.check_mode(b.mode)?;
        let (ca, sa) = a.weights();
        let (cb, sb) = b.weights();
        let (i, j) = (2 * a.mode, 2 * b.mode);
        let c = &self.cov;
        Ok(ca * cb * c[(i, j)] + ca * sb * c[(i, j + 1)] + sa * cb * c[(i + 1, j)] + sa * sb * c[(i + 1, j + 1)])
    }

    pub fn quadrature_variance(&self, q: Quadrature) -> Result<f64> {
        self.quadrature_covariance(q, q)
    }

    /// Variance of an arbitrary linear combination `Σ wᵢ ξᵢ` of phase-space coordinates.
    pub fn combination_variance(&self, weights: &DVector<f64>) -> Result<f64> {
        if weights.len() != self.cov.nrows() {
            return invalid("weight vector length does not match phase-space dimension");
        }
        Ok((weights.transpose() * &self.cov * weights)[(0, 0)])
    }

    /// Reduced state of the listed modes, in the listed order (partial trace).
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return invalid("reduced state needs at least one mode");
        }
        for &m in modes {
            self.check_mode(m)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_fn(idx.len(), |i, _| self.mean[idx[i]]);
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { mean, cov })
    }

    /// Tensor product: `self`'s modes first, then `other`'s.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let (n1, n2) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(n1 + n2, n1 + n2);
        cov.view_mut((0, 0), (n1, n1)).copy_from(&self.cov);
        cov.view_mut((n1, n1), (n2, n2)).copy_from(&other.cov);
        let mean = DVector::from_iterator(n1 + n2, self.mean.iter().chain(other.mean.iter()).copied());
        Self { mean, cov }
    }

    /// Displaces the means by `delta` (same length as the phase-space vector).
    pub fn displaced(&self, delta: &DVector<f64>) -> Result<Self> {
        if delta.len() != self.mean.len() {
            return invalid("displacement length does not match phase-space dimension");
        }
        Ok(Self { mean: &self.mean + delta, cov: self.cov.clone() })
    }

    /// `μ' = S μ`, `C' = S C Sᵀ`.
    pub fn apply_symplectic(&self, s: &SymplecticTransform) -> Result<Self> {
        let full = s.embed(self.n_modes())?;
        Ok(Self::from_parts(&full * &self.mean, &full * &self.cov * full.transpose()))
    }

    /// Image of the state under a general real linear map of the quadratures
    /// (`rows` output coordinates, `2N` input coordinates).
    ///
    /// The result need not be a physical state; callers are responsible for
    /// maps that correspond to a quantum channel.
    pub(crate) fn linear_image(&self, map: &DMatrix<f64>) -> Self {
        Self::from_parts(map * &self.mean, map * &self.cov * map.transpose())
    }
}
