//! Parameter sweeps over one variable for one criterion family.

use std::fmt;
use std::str::FromStr;

use eprkit::criteria::{epsilon_product, evaluate, sum_criterion, CriterionFlags, CriterionReport, GainPair};
use eprkit::protocols::{entanglement_swap, qkd_rates, teleport, TeleportLosses};
use eprkit::spin::{bohm_criterion, Axis, TwoQubitState};
use eprkit::GaussianState;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::format::csv_num;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variable {
    #[serde(rename = "r")]
    R,
    #[serde(rename = "eta_A")]
    EtaA,
    #[serde(rename = "eta_B")]
    EtaB,
    /// `eta_A = eta_B` varied together.
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "p_W")]
    PW,
    #[serde(rename = "gain")]
    Gain,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::R => "r",
            Variable::EtaA => "eta_A",
            Variable::EtaB => "eta_B",
            Variable::Eta => "eta",
            Variable::PW => "p_W",
            Variable::Gain => "gain",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "r" => Variable::R,
            "eta_a" | "eta-a" => Variable::EtaA,
            "eta_b" | "eta-b" => Variable::EtaB,
            "eta" => Variable::Eta,
            "p_w" | "p-w" => Variable::PW,
            "gain" => Variable::Gain,
            _ => return Err(CliError::Usage(format!("unknown sweep variable '{s}' (r, eta_A, eta_B, eta, p_W, gain)"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Cv,
    Swap,
    Bohm,
    Teleport,
    Qkd,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Cv => "cv",
            Criterion::Swap => "swap",
            Criterion::Bohm => "bohm",
            Criterion::Teleport => "teleport",
            Criterion::Qkd => "qkd",
        }
    }

    fn accepts(self, v: Variable) -> bool {
        use Variable::*;
        match self {
            Criterion::Cv => matches!(v, R | EtaA | EtaB | Eta | Gain),
            Criterion::Swap => matches!(v, R | Gain),
            Criterion::Bohm => v == PW,
            Criterion::Teleport => matches!(v, R | EtaA | EtaB | Eta | Gain),
            Criterion::Qkd => matches!(v, R | EtaB),
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Criterion::Cv | Criterion::Swap => &[
                "epsilon_sq",
                "epsilon",
                "duan_D",
                "sum_criterion",
                "ppt_min_symplectic",
                "gx",
                "gp",
                "epr_paradox",
                "entangled_duan",
                "epr_via_duan",
                "entangled_ppt",
            ],
            Criterion::Bohm => &["dinf_jx", "dinf_jy", "rhs", "margin", "satisfied"],
            Criterion::Teleport => &["fidelity", "T", "V_product", "gain"],
            Criterion::Qkd => &[
                "delta_I_direct",
                "delta_I_reverse",
                "V_A_given_B",
                "V_B_given_A",
                "V_A_given_E",
                "V_B_given_E",
                "key_possible_direct",
                "key_possible_reverse",
            ],
        }
    }
}

impl FromStr for Criterion {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "cv" => Criterion::Cv,
            "swap" => Criterion::Swap,
            "bohm" => Criterion::Bohm,
            "teleport" => Criterion::Teleport,
            "qkd" => Criterion::Qkd,
            _ => return Err(CliError::Usage(format!("unknown criterion '{s}' (cv, swap, bohm, teleport, qkd)"))),
        })
    }
}

/// Named sweep presets for the three detection-efficiency configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `η_A = η_B = η`.
    Fig3Symmetric,
    /// `η_B = 1`, vary `η_A`.
    Fig3EtaA,
    /// `η_A = 1`, vary `η_B`.
    Fig3EtaB,
}

impl FromStr for Preset {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fig3-symmetric" | "fig3" => Preset::Fig3Symmetric,
            "fig3-eta-a" => Preset::Fig3EtaA,
            "fig3-eta-b" => Preset::Fig3EtaB,
            _ => return Err(CliError::Usage(format!("unknown preset '{s}' (fig3-symmetric, fig3-eta-a, fig3-eta-b)"))),
        })
    }
}

impl Preset {
    /// Variable, `r`, and the efficiency held fixed.
    pub fn defaults(self) -> (Variable, Params) {
        let base = Params { r: 2.0, ..Params::default() };
        match self {
            Preset::Fig3Symmetric => (Variable::Eta, base),
            Preset::Fig3EtaA => (Variable::EtaA, Params { eta_b: 1.0, ..base }),
            Preset::Fig3EtaB => (Variable::EtaB, Params { eta_a: 1.0, ..base }),
        }
    }
}

/// Values of every parameter not being swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub r: f64,
    /// Second pair's squeezing for swapping; follows `r` when unset.
    pub r2: Option<f64>,
    #[serde(rename = "eta_A")]
    pub eta_a: f64,
    #[serde(rename = "eta_B")]
    pub eta_b: f64,
    #[serde(rename = "p_W")]
    pub p_w: f64,
    /// Fixed inference / feed-forward gain; regression gains (cv) or unity
    /// (teleport, swap) when unset.
    pub gain: Option<f64>,
    /// Coherent teleporter input.
    pub x: f64,
    pub p: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self { r: 1.0, r2: None, eta_a: 1.0, eta_b: 1.0, p_w: 1.0, gain: None, x: 1.0, p: 1.0 }
    }
}

impl Params {
    fn with(mut self, var: Variable, value: f64) -> Self {
        match var {
            Variable::R => self.r = value,
            Variable::EtaA => self.eta_a = value,
            Variable::EtaB => self.eta_b = value,
            Variable::Eta => {
                self.eta_a = value;
                self.eta_b = value;
            }
            Variable::PW => self.p_w = value,
            Variable::Gain => self.gain = Some(value),
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub criterion: Criterion,
    pub variable: Variable,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub fixed: Params,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(CliError::Usage(format!("sweep range needs lo < hi (got {} .. {})", self.lo, self.hi)));
        }
        if self.steps < 2 {
            return Err(CliError::Usage("sweep needs at least 2 steps".into()));
        }
        if !self.criterion.accepts(self.variable) {
            return Err(CliError::Usage(format!(
                "criterion '{}' cannot be swept over '{}'",
                self.criterion.name(),
                self.variable
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| if i == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n as f64 })
            .collect()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub cells: Vec<String>,
    pub json: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec![self.spec.variable.name()];
        h.extend_from_slice(self.spec.criterion.columns());
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| std::iter::once(csv_num(r.value)).chain(r.cells.iter().cloned()).collect())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.spec.criterion,
            "variable": self.spec.variable,
            "range": { "lo": self.spec.lo, "hi": self.spec.hi, "steps": self.spec.steps },
            "fixed": self.spec.fixed,
            "rows": self.rows.iter().map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("value".into(), json!(r.value));
                if let Value::Object(m) = &r.json {
                    obj.extend(m.clone());
                }
                Value::Object(obj)
            }).collect::<Vec<_>>(),
        })
    }
}

fn b(v: bool) -> String {
    v.to_string()
}

/// Criteria at fixed inference gains `g = g′ = gain`; `D` stays at unit gain.
fn report_at_gain(state: &GaussianState, gain: f64) -> Result<CriterionReport, CliError> {
    let mut rep = evaluate(state, 0, 1)?;
    let gains = GainPair::new(gain, gain)?;
    rep.epsilon_sq = epsilon_product(state, 0, 1, Some(gains))?;
    rep.sum_criterion = sum_criterion(state, 0, 1, gains)?;
    rep.gains_used.a_from_b = gains;
    rep.flags = CriterionFlags::from_values(rep.epsilon_sq, rep.duan_d, rep.ppt_min_symplectic);
    Ok(rep)
}

fn cv_cells(rep: &CriterionReport) -> Vec<String> {
    vec![
        csv_num(rep.epsilon_sq),
        csv_num(rep.epsilon()),
        csv_num(rep.duan_d),
        csv_num(rep.sum_criterion),
        csv_num(rep.ppt_min_symplectic),
        csv_num(rep.gains_used.a_from_b.g),
        csv_num(rep.gains_used.a_from_b.g_prime),
        b(rep.flags.epr_paradox),
        b(rep.flags.entangled_duan),
        b(rep.flags.epr_via_duan),
        b(rep.flags.entangled_ppt),
    ]
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn lossy_pair(r: f64, eta_a: f64, eta_b: f64) -> Result<GaussianState, CliError> {
    Ok(GaussianState::two_mode_squeezed(r)?.apply_loss(0, eta_a, false)?.apply_loss(1, eta_b, false)?)
}

pub fn evaluate_point(criterion: Criterion, p: &Params) -> Result<(Vec<String>, Value), CliError> {
    match criterion {
        Criterion::Cv => {
            let state = lossy_pair(p.r, p.eta_a, p.eta_b)?;
            let rep = match p.gain {
                Some(g) => report_at_gain(&state, g)?,
                None => evaluate(&state, 0, 1)?,
            };
            Ok((cv_cells(&rep), to_value(&rep)?))
        }
        Criterion::Swap => {
            let rep = entanglement_swap(p.r, p.r2.unwrap_or(p.r), p.gain.unwrap_or(1.0))?;
            Ok((cv_cells(&rep), to_value(&rep)?))
        }
        Criterion::Bohm => {
            let rep = bohm_criterion(&TwoQubitState::werner(p.p_w)?, Axis::X, Axis::Y, Axis::Z);
            let cells = vec![
                csv_num(rep.dinf_jx),
                csv_num(rep.dinf_jy),
                csv_num(rep.rhs),
                csv_num(rep.margin()),
                b(rep.satisfied),
            ];
            let mut v = to_value(&rep)?;
            v["margin"] = json!(rep.margin());
            Ok((cells, v))
        }
        Criterion::Teleport => {
            let input = GaussianState::coherent(p.x, p.p)?;
            let losses = (p.eta_a < 1.0 || p.eta_b < 1.0).then_some(TeleportLosses { eta_alice: p.eta_a, eta_bob: p.eta_b });
            let t = teleport(&input, p.r, p.gain.unwrap_or(1.0), losses)?.result;
            let cells = vec![csv_num(t.fidelity), csv_num(t.t), csv_num(t.v_product), csv_num(t.gain)];
            Ok((cells, to_value(&t)?))
        }
        Criterion::Qkd => {
            let q = qkd_rates(p.r, p.eta_b)?;
            let cells = vec![
                csv_num(q.delta_i_direct),
                csv_num(q.delta_i_reverse),
                csv_num(q.v_a_given_b),
                csv_num(q.v_b_given_a),
                csv_num(q.v_a_given_e),
                csv_num(q.v_b_given_e),
                b(q.key_possible_direct),
                b(q.key_possible_reverse),
            ];
            Ok((cells, to_value(&q)?))
        }
    }
}

/// Evaluates the grid in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let rows = spec
        .grid()
        .into_par_iter()
        .map(|value| {
            let (cells, json) = evaluate_point(spec.criterion, &spec.fixed.with(spec.variable, value))?;
            Ok(SweepRow { value, cells, json })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SweepTable { spec: spec.clone(), rows })
}
