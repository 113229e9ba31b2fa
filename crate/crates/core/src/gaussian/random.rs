//! Random physical Gaussian states for property testing.
//!
//! Covariances are built from the Euler (Bloch–Messiah) decomposition
//! `C = O₁ Z O₂ diag(ν) O₂ᵀ Z O₁ᵀ`, with `O₁`, `O₂` random passive
//! transforms, `Z` random single-mode squeezers and `ν ≥ 1` thermal
//! symplectic eigenvalues.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::state::GaussianState;
use super::symplectic::SymplecticTransform;

/// Random passive (photon-number preserving) transform as a `2N×2N` matrix.
pub fn random_passive<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for _ in 0..2 {
        for k in 0..n_modes {
            let phase = SymplecticTransform::phase_shift(k, rng.random_range(0.0..std::f64::consts::TAU));
            m = phase.embed(n_modes).expect("mode in range") * m;
        }
        for a in 0..n_modes {
            for b in (a + 1)..n_modes {
                let bs = SymplecticTransform::beam_splitter(a, b, rng.random::<f64>()).expect("valid beam splitter");
                m = bs.embed(n_modes).expect("modes in range") * m;
            }
        }
    }
    m
}

/// Random symplectic matrix with single-mode squeezing `|r| ≤ max_squeeze`.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n_modes: usize, max_squeeze: f64) -> DMatrix<f64> {
    let mut z = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        let r = rng.random_range(-max_squeeze..=max_squeeze);
        z[(2 * k, 2 * k)] = (-r).exp();
        z[(2 * k + 1, 2 * k + 1)] = r.exp();
    }
    random_passive(rng, n_modes) * z * random_passive(rng, n_modes)
}

/// Random physical state: squeezing up to `max_squeeze`, thermal
/// eigenvalues in `[1, max_thermal]`, means drawn from `N(0, 1)`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n_modes: usize, max_squeeze: f64, max_thermal: f64) -> GaussianState {
    let s = random_symplectic(rng, n_modes, max_squeeze);
    let mut d = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        let nu = rng.random_range(1.0..=max_thermal.max(1.0));
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let mean = DVector::from_fn(2 * n_modes, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    GaussianState::from_parts(mean, &s * d * s.transpose())
}

/// Moment-matched Gaussian description of a random finite mixture of
/// two-mode product states `Σ_k w_k ρ_A^{(k)} ⊗ ρ_B^{(k)}`.
///
/// Every component is a random single-mode Gaussian on each side; the
/// result's covariance is the weighted mean of component covariances plus
/// the covariance of component means. A separable state is what the EPR
/// and Duan bounds are derived for, so this is their test population.
pub fn random_separable_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    components: usize,
    max_squeeze: f64,
    spread: f64,
) -> GaussianState {
    let components = components.max(1);
    let weights: Vec<f64> = (0..components).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut mean = DVector::zeros(4);
    let mut second = DMatrix::zeros(4, 4);
    for w in weights {
        let w = w / total;
        let a = random_state(rng, 1, max_squeeze, 2.0);
        let b = random_state(rng, 1, max_squeeze, 2.0);
        let comp = a.tensor(&b);
        let mu = comp.mean() * spread;
        second += (comp.cov() + &mu * mu.transpose()) * w;
        mean += mu * w;
    }
    let cov = second - &mean * mean.transpose();
    GaussianState::from_parts(mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::omega;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn passive_and_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..4 {
            let o = random_passive(&mut rng, n);
            assert!((&o * o.transpose() - DMatrix::identity(2 * n, 2 * n)).amax() < 1e-12);
            let s = random_symplectic(&mut rng, n, 1.0);
            let w = omega(n);
            assert!((&s * &w * s.transpose() - w).amax() < 1e-10);
        }
    }

    #[test]
    fn random_states_are_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let s = random_state(&mut rng, 2, 1.2, 3.0);
            assert!(GaussianState::new(s.mean().clone(), s.cov().clone()).is_ok());
            let m = random_separable_mixture(&mut rng, 5, 1.0, 1.5);
            assert!(GaussianState::new(m.mean().clone(), m.cov().clone()).is_ok());
        }
    }
}
