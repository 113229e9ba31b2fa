//! Published continuous-variable EPR and inseparability results.

use serde::Serialize;

/// Slack on `ε² ≤ (2D)²` for experimental uncertainty.
pub const CONSISTENCY_SLACK: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub id: &'static str,
    pub year: u16,
    pub epsilon_sq: Option<f64>,
    /// The product was deduced by the authors rather than measured directly.
    pub epsilon_sq_inferred: bool,
    #[serde(rename = "duan_D")]
    pub duan_d: Option<f64>,
    /// Single-quadrature inference variance, for results reported only that way.
    pub inference_var_x: Option<f64>,
    /// Listed in the historical survey, but no value is available here.
    pub citation_only: bool,
    pub notes: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordVerdict {
    /// `ε² < 1`; absent when no product is known.
    pub epr_paradox: Option<bool>,
    /// `D < 1`.
    pub entangled: Option<bool>,
    /// `D < 0.5`, which implies `ε < 1` through `ε ≤ 2D`.
    pub epr_inferable: Option<bool>,
    /// `ε² ≤ (2D)² + slack` when both are present.
    pub consistent: bool,
    /// At least one value present, or marked citation-only.
    pub well_formed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedRecord {
    #[serde(flatten)]
    pub record: ExperimentRecord,
    pub verdict: RecordVerdict,
}

impl ExperimentRecord {
    pub fn verdict(&self) -> RecordVerdict {
        let consistent = match (self.epsilon_sq, self.duan_d) {
            (Some(e), Some(d)) => e <= (2.0 * d).powi(2) + CONSISTENCY_SLACK,
            _ => true,
        };
        let has_value = self.epsilon_sq.is_some() || self.duan_d.is_some() || self.inference_var_x.is_some();
        RecordVerdict {
            epr_paradox: self.epsilon_sq.map(|e| e < 1.0),
            entangled: self.duan_d.map(|d| d < 1.0),
            epr_inferable: self.duan_d.map(|d| d < 0.5),
            consistent,
            well_formed: has_value != self.citation_only,
        }
    }

    pub fn checked(&self) -> CheckedRecord {
        CheckedRecord { record: self.clone(), verdict: self.verdict() }
    }
}

const fn measured(id: &'static str, year: u16, eps: Option<f64>, inferred: bool, d: Option<f64>, notes: &'static str) -> ExperimentRecord {
    ExperimentRecord {
        id,
        year,
        epsilon_sq: eps,
        epsilon_sq_inferred: inferred,
        duan_d: d,
        inference_var_x: None,
        citation_only: false,
        notes,
    }
}

const fn cited(id: &'static str, year: u16, notes: &'static str) -> ExperimentRecord {
    ExperimentRecord {
        id,
        year,
        epsilon_sq: None,
        epsilon_sq_inferred: false,
        duan_d: None,
        inference_var_x: None,
        citation_only: true,
        notes,
    }
}

pub static CATALOG: &[ExperimentRecord] = &[
    measured("ou1992", 1992, Some(0.70), false, None, "first direct quadrature test; nondegenerate parametric amplifier; no causal separation"),
    cited("zhang2000", 2000, "bright-beam entanglement; product inferred from a variance-product measurement"),
    measured("silberhorn2001", 2001, Some(0.64), true, Some(0.40), "fibre solitons; not loss-corrected; product deduced from D by beam symmetry (+/-0.08)"),
    measured("julsgaard2001", 2001, None, false, Some(0.82), "two atomic ensembles; entangled but too weak for a direct EPR test"),
    cited("schori2002", 2002, "atomic-ensemble entanglement"),
    measured("bowen2002", 2002, Some(0.72), false, None, "polarisation Stokes operators"),
    measured("bowen2003", 2003, Some(0.58), false, None, "two squeezed beams on a 50/50 splitter; lowest directly measured product"),
    ExperimentRecord {
        id: "zhang2003",
        year: 2003,
        epsilon_sq: None,
        epsilon_sq_inferred: false,
        duan_d: None,
        inference_var_x: Some(0.62),
        citation_only: false,
        notes: "twin-beam intensities; conditional variance of one quadrature only",
    },
    cited("glockl2003", 2003, "pulsed fibre entanglement"),
    measured("howell2004", 2004, Some(0.01), false, None, "photon-pair position and momentum; coincidence-conditioned data, not an a priori test"),
    cited("josse2004", 2004, "atomic-medium polarisation squeezing"),
    cited("hayasaka2004", 2004, "continuous-wave OPO entanglement"),
    cited("takei2005", 2005, "entanglement swapping"),
    measured("laurat2005", 2005, Some(0.42), true, None, "product inferred assuming beam symmetry"),
    measured("wenger2005", 2005, Some(1.06), false, Some(0.7), "pulsed OPA; not corrected for detector losses: no paradox"),
    measured("wenger2005-corrected", 2005, Some(0.83), false, None, "same data corrected for detector losses; no causal separation"),
    cited("huntington2005", 2005, "polarisation entanglement"),
    cited("villar2005", 2005, "above-threshold OPO"),
    cited("nandan2005", 2005, "fibre-based entanglement"),
    cited("jing2006", 2006, "above-threshold OPO"),
    cited("takei2006", 2006, "high-fidelity teleportation resource"),
    cited("yoshino2007", 2007, "continuous-wave entanglement"),
    cited("zhang2007", 2007, "degenerate waveguide OPA, pulsed"),
    cited("dong2007", 2007, "fibre entanglement"),
    cited("keller2008", 2008, "telecom-band entanglement"),
    cited("grosse2008", 2008, "two-colour entanglement"),
    cited("wagner2008", 2008, "spatial entanglement"),
    cited("boyer2008", 2008, "four-wave mixing in atomic vapour"),
];

pub fn find(id: &str) -> Option<&'static ExperimentRecord> {
    CATALOG.iter().find(|r| r.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalog_passes_checks() {
        for rec in CATALOG {
            let v = rec.verdict();
            assert!(v.consistent && v.well_formed, "{}", rec.id);
        }
        let mut ids: Vec<_> = CATALOG.iter().map(|r| r.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CATALOG.len());
    }

    #[test]
    fn verdicts() {
        let s = find("silberhorn2001").unwrap().verdict();
        assert_eq!(s.epr_inferable, Some(true));
        assert_eq!(find("wenger2005").unwrap().verdict().epr_paradox, Some(false));
        assert_eq!(find("wenger2005-corrected").unwrap().verdict().epr_paradox, Some(true));
        let j = find("julsgaard2001").unwrap().verdict();
        assert_eq!((j.entangled, j.epr_inferable), (Some(true), Some(false)));
        let bad = measured("x", 2000, Some(0.9), false, Some(0.3), "");
        assert!(!bad.verdict().consistent);
    }
}
