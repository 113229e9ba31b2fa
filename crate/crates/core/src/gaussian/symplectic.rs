use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Tolerance on `S Ω Sᵀ = Ω`.
const SYMPLECTIC_TOL: f64 = 1e-10;

/// Canonical form for `n_modes` modes: block diagonal with `[[0, 1], [-1, 0]]` blocks.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Symplectic eigenvalues of a positive-definite covariance matrix, ascending.
///
/// They are the positive eigenvalues of the Hermitian matrix
/// `C^{1/2} (iΩ) C^{1/2}`, which come in `±ν` pairs.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || dim % 2 != 0 || cov.ncols() != dim {
        return invalid(format!("covariance must be 2N×2N, got {}×{}", dim, cov.ncols()));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.amax().max(1.0);
    if eig.eigenvalues.iter().any(|&l| !(l > 1e-14 * scale)) {
        return Err(Error::InvalidArgument(
            "covariance matrix is not positive definite".into(),
        ));
    }
    let sqrt_l = eig.eigenvalues.map(f64::sqrt);
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_l) * eig.eigenvectors.transpose();

    let n = dim / 2;
    let w = omega(n);
    let a = &root * w * &root;
    // H = i·A is Hermitian because A is real antisymmetric.
    let h = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(0.0, a[(i, j)]));
    let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let vals = SymmetricEigen::new(herm).eigenvalues;
    let mut nus: Vec<f64> = vals.iter().copied().filter(|v| *v > 0.0).collect();
    nus.sort_by(|a, b| a.total_cmp(b));
    if nus.len() != n {
        // zero-crossing ambiguity at machine precision: fall back to |λ| pairs
        let mut all: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
        all.sort_by(|a, b| a.total_cmp(b));
        nus = all.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    }
    Ok(nus)
}

/// Linear canonical transform `S` acting on a subset of modes.
///
/// `matrix` is `2k×2k` for `k = modes.len()` and acts on the phase-space
/// coordinates of those modes in the listed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    modes: Vec<usize>,
}

impl SymplecticTransform {
    pub fn new(matrix: DMatrix<f64>, modes: Vec<usize>) -> Result<Self> {
        let k = modes.len();
        if k == 0 {
            return invalid("symplectic transform must act on at least one mode");
        }
        if matrix.nrows() != 2 * k || matrix.ncols() != 2 * k {
            return invalid(format!(
                "matrix is {}×{} but {} modes need {}×{}",
                matrix.nrows(),
                matrix.ncols(),
                k,
                2 * k,
                2 * k
            ));
        }
        let mut sorted = modes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return invalid("mode list contains duplicates");
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        let w = omega(k);
        let defect = (&matrix * &w * matrix.transpose() - &w).amax();
        if defect > SYMPLECTIC_TOL * matrix.amax().powi(2).max(1.0) {
            return invalid(format!("matrix is not symplectic (|SΩSᵀ − Ω| = {defect:.3e})"));
        }
        Ok(Self { matrix, modes })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            modes: (0..n_modes).collect(),
        }
    }

    /// Phase rotation by `theta`: `x → x cos θ + p sin θ`, `p → −x sin θ + p cos θ`.
    ///
    /// With this sign the rotated `x` is the homodyne quadrature `x_θ`.
    pub fn phase_shift(mode: usize, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
            modes: vec![mode],
        }
    }

    /// Single-mode squeezer `diag(e^{−r}, e^{r})`; positive `r` squeezes `x`.
    pub fn squeezer(mode: usize, r: f64) -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]),
            modes: vec![mode],
        }
    }

    /// Beam splitter with intensity transmissivity `tau`:
    /// `a₁' = √τ a₁ + √(1−τ) a₂`, `a₂' = −√(1−τ) a₁ + √τ a₂`.
    pub fn beam_splitter(mode_a: usize, mode_b: usize, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return invalid(format!("transmissivity {tau} outside [0, 1]"));
        }
        if mode_a == mode_b {
            return invalid("beam splitter needs two distinct modes");
        }
        let t = tau.sqrt();
        let s = (1.0 - tau).sqrt();
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
             t, 0.0,   s, 0.0,
           0.0,   t, 0.0,   s,
            -s, 0.0,   t, 0.0,
           0.0,  -s, 0.0,   t,
        ]);
        Ok(Self { matrix: m, modes: vec![mode_a, mode_b] })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    /// `self` followed by `next`. Both must act on the same mode list.
    pub fn then(&self, next: &SymplecticTransform) -> Result<Self> {
        if self.modes != next.modes {
            return invalid("composed transforms must act on the same mode list");
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            modes: self.modes.clone(),
        })
    }

    /// Embeds the transform into the full `2N×2N` phase space.
    pub fn embed(&self, n_modes: usize) -> Result<DMatrix<f64>> {
        if let Some(&m) = self.modes.iter().find(|&&m| m >= n_modes) {
            return invalid(format!("transform acts on mode {m} of a {n_modes}-mode state"));
        }
        let mut full = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for (a, &ma) in self.modes.iter().enumerate() {
            for (b, &mb) in self.modes.iter().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        full[(2 * ma + i, 2 * mb + j)] = self.matrix[(2 * a + i, 2 * b + j)];
                    }
                }
            }
        }
        Ok(full)
    }
}
