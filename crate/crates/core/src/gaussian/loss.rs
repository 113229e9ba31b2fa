use serde::{Deserialize, Serialize};

use super::state::GaussianState;
use super::symplectic::SymplecticTransform;
use crate::error::{invalid, Result};

/// Per-mode transmission efficiencies, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    eta: Vec<f64>,
}

impl LossChannel {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        for &e in &eta {
            check_eta(e)?;
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Applies the loss of each listed mode in turn, discarding the environment.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if self.eta.len() != state.n_modes() {
            return invalid(format!(
                "loss channel has {} efficiencies for a {}-mode state",
                self.eta.len(),
                state.n_modes()
            ));
        }
        self.eta
            .iter()
            .enumerate()
            .try_fold(state.clone(), |s, (mode, &eta)| s.apply_loss(mode, eta, false))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return invalid(format!("efficiency {eta} outside [0, 1]"));
    }
    Ok(())
}

impl GaussianState {
    /// Mixes `mode` with a vacuum on a beam splitter of transmissivity `eta`.
    ///
    /// The mode's block becomes `η C + (1 − η) I` and its cross blocks scale
    /// by `√η`. With `keep_environment` the reflected port is appended as a
    /// new last mode, so the result stays pure when the input was.
    pub fn apply_loss(&self, mode: usize, eta: f64, keep_environment: bool) -> Result<GaussianState> {
        check_eta(eta)?;
        self.check_mode(mode)?;
        let n = self.n_modes();
        let extended = self.tensor(&GaussianState::vacuum(1)?);
        let bs = SymplecticTransform::beam_splitter(mode, n, eta)?;
        let mixed = extended.apply_symplectic(&bs)?;
        if keep_environment {
            Ok(mixed)
        } else {
            mixed.reduced(&(0..n).collect::<Vec<_>>())
        }
    }
}
