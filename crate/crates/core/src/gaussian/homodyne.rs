use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{GaussianState, Quadrature};
use crate::error::{invalid, Error, Result};

/// Number of shots drawn from one RNG substream. Block `k` always uses
/// stream `k` of the seed, so the output does not depend on how blocks are
/// distributed over threads.
pub const SAMPLE_BLOCK: usize = 4096;

/// Outcomes of repeated homodyne measurements of one mode at one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomodyneRecord {
    pub mode: usize,
    pub angle: f64,
    pub outcomes: Vec<f64>,
}

impl HomodyneRecord {
    pub fn new(mode: usize, angle: f64, outcomes: Vec<f64>) -> Result<Self> {
        if !angle.is_finite() {
            return invalid("homodyne angle must be finite");
        }
        if outcomes.iter().any(|v| !v.is_finite()) {
            return invalid("homodyne record contains non-finite samples");
        }
        Ok(Self {
            mode,
            angle: angle.rem_euclid(std::f64::consts::TAU),
            outcomes,
        })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

impl GaussianState {
    /// Gaussian posterior of the remaining modes after measuring
    /// `x_θ` of `mode` with result `outcome`.
    ///
    /// With `q` the quadrature row and `v = qᵀCq`: `C' = C − (Cq)(Cq)ᵀ/v`,
    /// `μ' = μ + Cq (outcome − qᵀμ)/v`, then the measured mode is dropped.
    /// The posterior covariance does not depend on the outcome.
    pub fn condition_on_homodyne(&self, mode: usize, angle: f64, outcome: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        if self.n_modes() < 2 {
            return invalid("conditioning a single-mode state leaves nothing");
        }
        if !outcome.is_finite() || !angle.is_finite() {
            return invalid("outcome and angle must be finite");
        }
        let n = self.n_modes();
        let q = Quadrature::at_angle(mode, angle).row(n);
        let cq = self.cov() * &q;
        let v = q.dot(&cq);
        if !(v > 1e-14 * self.cov().amax().max(1.0)) {
            return Err(Error::Degenerate(format!("measured quadrature variance {v} is not positive")));
        }
        let innovation = outcome - q.dot(self.mean());
        let mean = self.mean() + &cq * (innovation / v);
        let cov = self.cov() - &cq * cq.transpose() / v;
        let keep: Vec<usize> = (0..n).filter(|&m| m != mode).collect();
        GaussianState::from_parts(mean, cov).reduced(&keep)
    }
}

struct Projection {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
}

fn project(state: &GaussianState, settings: &[(usize, f64)]) -> Result<Projection> {
    if settings.is_empty() {
        return invalid("at least one measurement setting is required");
    }
    let mut seen = vec![false; state.n_modes()];
    for &(mode, angle) in settings {
        state.check_mode(mode)?;
        if !angle.is_finite() {
            return invalid("measurement angle must be finite");
        }
        if std::mem::replace(&mut seen[mode], true) {
            return invalid(format!("mode {mode} measured twice in one shot; settings must commute"));
        }
    }
    let n = state.n_modes();
    let k = settings.len();
    let rows = DMatrix::from_fn(k, 2 * n, |i, j| {
        let (mode, angle) = settings[i];
        Quadrature::at_angle(mode, angle).row(n)[j]
    });
    let mean = &rows * state.mean();
    let cov = &rows * state.cov() * rows.transpose();
    let chol = nalgebra::Cholesky::new(cov)
        .ok_or_else(|| Error::Degenerate("projected covariance is not positive definite".into()))?
        .unpack();
    Ok(Projection { mean, chol })
}

fn draw_block(p: &Projection, seed: u64, block: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    let k = p.mean.len();
    let mut out = Vec::with_capacity(len * k);
    let mut z = vec![0.0; k];
    for _ in 0..len {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        for i in 0..k {
            let mut v = p.mean[i];
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                v += p.chol[(i, j)] * zj;
            }
            out.push(v);
        }
    }
    out
}

fn collect_records(settings: &[(usize, f64)], blocks: Vec<Vec<f64>>, n_samples: usize) -> Result<Vec<HomodyneRecord>> {
    let k = settings.len();
    let mut columns = vec![Vec::with_capacity(n_samples); k];
    for block in blocks {
        for shot in block.chunks_exact(k) {
            for (col, &v) in columns.iter_mut().zip(shot) {
                col.push(v);
            }
        }
    }
    settings
        .iter()
        .zip(columns)
        .map(|(&(mode, angle), outcomes)| HomodyneRecord::new(mode, angle, outcomes))
        .collect()
}

fn block_lengths(n_samples: usize) -> Vec<(usize, usize)> {
    (0..n_samples.div_ceil(SAMPLE_BLOCK))
        .map(|b| (b, SAMPLE_BLOCK.min(n_samples - b * SAMPLE_BLOCK)))
        .collect()
}

/// Draws `n_samples` joint shots of the commuting quadratures `settings`
/// (one `(mode, angle)` per mode) from the state's Wigner distribution.
///
/// Returns one record per setting, in order. Deterministic for fixed
/// `seed`; blocks are generated in parallel.
pub fn sample_quadratures(
    state: &GaussianState,
    settings: &[(usize, f64)],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<HomodyneRecord>> {
    if n_samples == 0 {
        return invalid("n_samples must be positive");
    }
    let p = project(state, settings)?;
    let blocks: Vec<Vec<f64>> = block_lengths(n_samples)
        .into_par_iter()
        .map(|(b, len)| draw_block(&p, seed, b, len))
        .collect();
    collect_records(settings, blocks, n_samples)
}

/// Single-threaded twin of [`sample_quadratures`]; produces identical output.
pub fn sample_quadratures_sequential(
    state: &GaussianState,
    settings: &[(usize, f64)],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<HomodyneRecord>> {
    if n_samples == 0 {
        return invalid("n_samples must be positive");
    }
    let p = project(state, settings)?;
    let blocks = block_lengths(n_samples)
        .into_iter()
        .map(|(b, len)| draw_block(&p, seed, b, len))
        .collect();
    collect_records(settings, blocks, n_samples)
}
