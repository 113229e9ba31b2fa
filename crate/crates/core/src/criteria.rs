//! Continuous-variable EPR, steering and entanglement criteria.
//!
//! All criteria are evaluated between a "steered" mode `A`, whose
//! quadratures are inferred, and a "steering" mode `B`, whose results are
//! used for the inference. Quadratures `x` and `p` are the θ = 0 and
//! θ = π/2 homodyne phases.
//!
//! * `ε² = Δ²_inf x · Δ²_inf p` with the linear-regression inference
//!   `x − g x^B`, `p + g′ p^B`; `ε² < 1` is the EPR paradox. For Gaussian
//!   states and Gaussian measurements this coincides with `B` steering `A`
//!   (a known result, not checked here).
//! * `D = [Δ²(x − x^B) + Δ²(p + p^B)]/4` at unit gain; `D < 1` witnesses
//!   entanglement and `D < 1/2` implies `ε < 1` through `ε ≤ 2D`.
//! * `ν̃`, the least symplectic eigenvalue of the partial transpose;
//!   `ν̃ < 1` is necessary and sufficient for two-mode Gaussian entanglement.

use nalgebra::DMatrix;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::gaussian::{symplectic_eigenvalues, GaussianState, HomodyneRecord, Quadrature};

/// Gains of the inference combinations `x − g x^B` and `p + g′ p^B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPair {
    pub g: f64,
    pub g_prime: f64,
}

impl GainPair {
    pub const UNIT: GainPair = GainPair { g: 1.0, g_prime: 1.0 };
    pub const ZERO: GainPair = GainPair { g: 0.0, g_prime: 0.0 };

    pub fn new(g: f64, g_prime: f64) -> Result<Self> {
        if !g.is_finite() || !g_prime.is_finite() {
            return invalid("gains must be finite");
        }
        Ok(Self { g, g_prime })
    }
}

/// Result of estimating a target quadrature linearly from a probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearInference {
    /// `Δ²(target − gain · probe)`.
    pub variance: f64,
    pub gain: f64,
    /// `d = ⟨target − gain · probe⟩`.
    pub intercept: f64,
}

/// Linear estimate `target ≈ gain · probe + d`.
///
/// Without an explicit gain the regression optimum
/// `g = ⟨target, probe⟩ / Δ²probe` is used, giving
/// `Δ²target − ⟨target, probe⟩²/Δ²probe`, which for Gaussian states is the
/// conditional variance.
pub fn inference_variance_linear(
    state: &GaussianState,
    target: Quadrature,
    probe: Quadrature,
    gain: Option<f64>,
) -> Result<LinearInference> {
    if target.mode == probe.mode {
        return invalid("target and probe must be different modes");
    }
    let vt = state.quadrature_variance(target)?;
    let vp = state.quadrature_variance(probe)?;
    let c = state.quadrature_covariance(target, probe)?;
    let gain = match gain {
        Some(g) if !g.is_finite() => return invalid("gain must be finite"),
        Some(g) => g,
        None => {
            if !(vp > 0.0) {
                return Err(Error::DegenerateProbe(format!("probe variance {vp}")));
            }
            c / vp
        }
    };
    let variance = vt - 2.0 * gain * c + gain * gain * vp;
    let intercept = state.quadrature_mean(target)? - gain * state.quadrature_mean(probe)?;
    Ok(LinearInference { variance, gain, intercept })
}

fn check_pair(state: &GaussianState, a: usize, b: usize) -> Result<()> {
    state.check_mode(a)?;
    state.check_mode(b)?;
    if a == b {
        return invalid("criteria need two distinct modes");
    }
    Ok(())
}

/// Inference variances `(Δ²(x − g x^B), Δ²(p + g′ p^B))`.
fn channel_variances(state: &GaussianState, a: usize, b: usize, gains: Option<GainPair>) -> Result<(f64, f64)> {
    check_pair(state, a, b)?;
    let vx = inference_variance_linear(state, Quadrature::x(a), Quadrature::x(b), gains.map(|g| g.g))?;
    // p + g′ p^B is p − (−g′) p^B
    let vp = inference_variance_linear(state, Quadrature::p(a), Quadrature::p(b), gains.map(|g| -g.g_prime))?;
    Ok((vx.variance, vp.variance))
}

/// Regression-optimal gains `(g, g′)` for inferring `A` from `B`.
pub fn regression_gains(state: &GaussianState, a: usize, b: usize) -> Result<GainPair> {
    check_pair(state, a, b)?;
    let gx = inference_variance_linear(state, Quadrature::x(a), Quadrature::x(b), None)?.gain;
    let gp = inference_variance_linear(state, Quadrature::p(a), Quadrature::p(b), None)?.gain;
    Ok(GainPair { g: gx, g_prime: -gp })
}

/// `ε² = Δ²(x − g x^B) Δ²(p + g′ p^B)`, at the regression optimum when
/// `gains` is `None`.
pub fn epsilon_product(state: &GaussianState, a: usize, b: usize, gains: Option<GainPair>) -> Result<f64> {
    let (vx, vp) = channel_variances(state, a, b, gains)?;
    Ok(vx * vp)
}

/// Closed-form `Δ_inf X Δ_inf Y` for a two-mode squeezed vacuum after
/// efficiencies `η_A`, `η_B`:
/// `1 − η_A (cosh 2r − 1)(2 η_B − 1) / (1 − η_B + η_B cosh 2r)`.
///
/// This is `ε` (not squared); by the symmetry of the two channels it also
/// equals each single-channel inference variance.
pub fn epr_product_analytic(r: f64, eta_a: f64, eta_b: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return invalid(format!("squeezing parameter {r} must be finite and ≥ 0"));
    }
    for eta in [eta_a, eta_b] {
        if !(0.0..=1.0).contains(&eta) {
            return invalid(format!("efficiency {eta} outside [0, 1]"));
        }
    }
    let c = (2.0 * r).cosh();
    Ok(1.0 - eta_a * (c - 1.0) * (2.0 * eta_b - 1.0) / (1.0 - eta_b + eta_b * c))
}

/// `Δ²(x − g x^B) + Δ²(p + g′ p^B)`; below 2 demonstrates EPR.
pub fn sum_criterion(state: &GaussianState, a: usize, b: usize, gains: GainPair) -> Result<f64> {
    let (vx, vp) = channel_variances(state, a, b, Some(gains))?;
    Ok(vx + vp)
}

/// Duan–Giedke–Cirac–Zoller value `D = [Δ²(x − x^B) + Δ²(p + p^B)]/4` at unit gain.
pub fn duan_value(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    Ok(sum_criterion(state, a, b, GainPair::UNIT)? / 4.0)
}

/// `D` evaluated at arbitrary gains. Never used for the `D < 1` verdict.
pub fn duan_value_with_gains(state: &GaussianState, a: usize, b: usize, gains: GainPair) -> Result<f64> {
    Ok(sum_criterion(state, a, b, gains)? / 4.0)
}

/// Least symplectic eigenvalue of a two-mode covariance after `p_B → −p_B`.
pub fn partial_transpose_min_symplectic(cov: &DMatrix<f64>) -> Result<f64> {
    if cov.nrows() != 4 || cov.ncols() != 4 {
        return invalid("partial transpose needs a 4×4 two-mode covariance");
    }
    let mut flipped = cov.clone();
    for k in 0..4 {
        if k != 3 {
            flipped[(3, k)] = -flipped[(3, k)];
            flipped[(k, 3)] = -flipped[(k, 3)];
        }
    }
    Ok(symplectic_eigenvalues(&flipped)?[0])
}

/// Simon's PPT test: `ν̃ < 1` iff the reduced state of `(a, b)` is entangled.
pub fn ppt_min_symplectic(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    check_pair(state, a, b)?;
    let pair = state.reduced(&[a, b])?;
    partial_transpose_min_symplectic(pair.cov())
}

/// Verdicts derived from the numeric fields of a [`CriterionReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionFlags {
    pub epr_paradox: bool,
    pub entangled_duan: bool,
    pub epr_via_duan: bool,
    pub entangled_ppt: bool,
}

/// Relative margin below a threshold before a flag is raised, so that
/// states sitting exactly on a bound (vacuum, products) are not reported
/// as violating it because of roundoff.
pub const FLAG_MARGIN: f64 = 1e-12;

fn below(value: f64, bound: f64) -> bool {
    value < bound * (1.0 - FLAG_MARGIN)
}

impl CriterionFlags {
    pub fn from_values(epsilon_sq: f64, duan_d: f64, ppt_min_symplectic: f64) -> Self {
        Self {
            epr_paradox: below(epsilon_sq, 1.0),
            entangled_duan: below(duan_d, 1.0),
            epr_via_duan: below(duan_d, 0.5),
            entangled_ppt: below(ppt_min_symplectic, 1.0),
        }
    }
}

/// Regression gains in both inference directions.
///
/// Serialised as `{gx, gp, gx_prime, gp_prime}`: `gx`/`gp` infer `A` from
/// `B` (the gains behind `epsilon_sq`), the primed pair infers `B` from `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportGains {
    pub a_from_b: GainPair,
    pub b_from_a: GainPair,
}

impl Serialize for ReportGains {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("gx", &self.a_from_b.g)?;
        m.serialize_entry("gx_prime", &self.b_from_a.g)?;
        m.serialize_entry("gp", &self.a_from_b.g_prime)?;
        m.serialize_entry("gp_prime", &self.b_from_a.g_prime)?;
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionStdErr {
    pub epsilon_sq: f64,
    #[serde(rename = "duan_D")]
    pub duan_d: f64,
}

/// All CV criteria for one ordered mode pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub epsilon_sq: f64,
    #[serde(rename = "duan_D")]
    pub duan_d: f64,
    /// Sum criterion at the regression gains.
    pub sum_criterion: f64,
    pub ppt_min_symplectic: f64,
    #[serde(rename = "gains")]
    pub gains_used: ReportGains,
    pub flags: CriterionFlags,
    /// Jackknife standard errors; `None` for analytic reports.
    pub stderr: Option<CriterionStdErr>,
}

impl CriterionReport {
    /// `ε`, the unsquared EPR product.
    pub fn epsilon(&self) -> f64 {
        self.epsilon_sq.sqrt()
    }
}

/// Analytic report between modes `a` (inferred) and `b` (steering).
pub fn evaluate(state: &GaussianState, a: usize, b: usize) -> Result<CriterionReport> {
    let a_from_b = regression_gains(state, a, b)?;
    let b_from_a = regression_gains(state, b, a)?;
    let epsilon_sq = epsilon_product(state, a, b, Some(a_from_b))?;
    let duan_d = duan_value(state, a, b)?;
    let sum = sum_criterion(state, a, b, a_from_b)?;
    let nu = ppt_min_symplectic(state, a, b)?;
    Ok(CriterionReport {
        epsilon_sq,
        duan_d,
        sum_criterion: sum,
        ppt_min_symplectic: nu,
        gains_used: ReportGains { a_from_b, b_from_a },
        flags: CriterionFlags::from_values(epsilon_sq, duan_d, nu),
        stderr: None,
    })
}

/// One commuting-setting run: joint shots of mode `A` (`a`) and mode `B` (`b`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub a: HomodyneRecord,
    pub b: HomodyneRecord,
}

impl SampleRun {
    pub fn new(a: HomodyneRecord, b: HomodyneRecord) -> Result<Self> {
        if a.len() != b.len() {
            return invalid(format!("run records have different lengths ({} vs {})", a.len(), b.len()));
        }
        if a.mode == b.mode {
            return invalid("run records must be on different modes");
        }
        Ok(Self { a, b })
    }
}

/// Number of jackknife blocks used by [`criteria_from_samples`].
pub const JACKKNIFE_BLOCKS: usize = 100;

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sa: f64,
    sb: f64,
    saa: f64,
    sbb: f64,
    sab: f64,
}

impl Moments {
    fn of(a: &[f64], b: &[f64]) -> Self {
        a.iter().zip(b).fold(Moments::default(), |m, (&x, &y)| Moments {
            n: m.n + 1.0,
            sa: m.sa + x,
            sb: m.sb + y,
            saa: m.saa + x * x,
            sbb: m.sbb + y * y,
            sab: m.sab + x * y,
        })
    }

    fn minus(&self, o: &Moments) -> Moments {
        Moments {
            n: self.n - o.n,
            sa: self.sa - o.sa,
            sb: self.sb - o.sb,
            saa: self.saa - o.saa,
            sbb: self.sbb - o.sbb,
            sab: self.sab - o.sab,
        }
    }

    fn plus(&self, o: &Moments) -> Moments {
        Moments {
            n: self.n + o.n,
            sa: self.sa + o.sa,
            sb: self.sb + o.sb,
            saa: self.saa + o.saa,
            sbb: self.sbb + o.sbb,
            sab: self.sab + o.sab,
        }
    }

    fn var_a(&self) -> f64 {
        self.saa / self.n - (self.sa / self.n).powi(2)
    }

    fn var_b(&self) -> f64 {
        self.sbb / self.n - (self.sb / self.n).powi(2)
    }

    fn cov(&self) -> f64 {
        self.sab / self.n - (self.sa / self.n) * (self.sb / self.n)
    }

    fn residual(&self) -> f64 {
        self.var_a() - self.cov().powi(2) / self.var_b()
    }
}

/// `(ε², D)` from x-run and p-run moments.
fn sample_statistics(x: &Moments, p: &Moments) -> (f64, f64) {
    let eps = x.residual() * p.residual();
    let dx = x.var_a() + x.var_b() - 2.0 * x.cov();
    let dp = p.var_a() + p.var_b() + 2.0 * p.cov();
    (eps, (dx + dp) / 4.0)
}

fn block_moments(run: &SampleRun, blocks: usize) -> Vec<Moments> {
    let n = run.a.len();
    (0..blocks)
        .map(|k| {
            let (lo, hi) = (k * n / blocks, (k + 1) * n / blocks);
            Moments::of(&run.a.outcomes[lo..hi], &run.b.outcomes[lo..hi])
        })
        .collect()
}

fn is_angle(angle: f64, target: f64) -> bool {
    let d = (angle - target).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d) < 1e-9
}

/// Empirical [`CriterionReport`] from homodyne sample records.
///
/// `runs` must contain an x-run (both settings at θ = 0) and a separate
/// p-run (both at θ = π/2) on the same pair of modes. Moments use the
/// `1/n` normalisation; gains are the sample regression slopes. The
/// partial-transpose eigenvalue is computed with the unmeasured `x`–`p`
/// cross covariances set to zero. Standard errors on `ε²` and `D` come
/// from a delete-one-block jackknife over [`JACKKNIFE_BLOCKS`] blocks.
pub fn criteria_from_samples(runs: &[SampleRun]) -> Result<CriterionReport> {
    use std::f64::consts::FRAC_PI_2;
    let find = |theta: f64| {
        runs.iter()
            .find(|r| is_angle(r.a.angle, theta) && is_angle(r.b.angle, theta))
    };
    let x_run = find(0.0).ok_or_else(|| Error::InvalidArgument("missing (x^A, x^B) run".into()))?;
    let p_run = find(FRAC_PI_2).ok_or_else(|| Error::InvalidArgument("missing (p^A, p^B) run".into()))?;
    for run in [x_run, p_run] {
        if run.a.len() != run.b.len() {
            return invalid("run records have mismatched lengths");
        }
        if run.a.len() < 2 {
            return invalid("each run needs at least two samples");
        }
    }
    if x_run.a.mode != p_run.a.mode || x_run.b.mode != p_run.b.mode || x_run.a.mode == x_run.b.mode {
        return invalid("x-run and p-run must measure the same ordered pair of distinct modes");
    }

    let blocks = JACKKNIFE_BLOCKS.min(x_run.a.len()).min(p_run.a.len());
    let bx = block_moments(x_run, blocks);
    let bp = block_moments(p_run, blocks);
    let tx = bx.iter().fold(Moments::default(), |acc, m| acc.plus(m));
    let tp = bp.iter().fold(Moments::default(), |acc, m| acc.plus(m));

    for m in [&tx, &tp] {
        if !(m.var_b() > 0.0) || !(m.var_a() > 0.0) {
            return Err(Error::DegenerateProbe("sample variance is zero".into()));
        }
    }

    let (epsilon_sq, duan_d) = sample_statistics(&tx, &tp);
    let leave_out: Vec<(f64, f64)> = (0..blocks)
        .map(|k| sample_statistics(&tx.minus(&bx[k]), &tp.minus(&bp[k])))
        .collect();
    let jk = |vals: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = vals.collect();
        let b = v.len() as f64;
        let mean = v.iter().sum::<f64>() / b;
        ((b - 1.0) / b * v.iter().map(|t| (t - mean).powi(2)).sum::<f64>()).sqrt()
    };
    let se_eps = jk(&mut leave_out.iter().map(|t| t.0));
    let se_d = jk(&mut leave_out.iter().map(|t| t.1));

    let a_from_b = GainPair { g: tx.cov() / tx.var_b(), g_prime: -tp.cov() / tp.var_b() };
    let b_from_a = GainPair { g: tx.cov() / tx.var_a(), g_prime: -tp.cov() / tp.var_a() };
    let sum = tx.residual() + tp.residual();

    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        tx.var_a(), 0.0,        tx.cov(),   0.0,
        0.0,        tp.var_a(), 0.0,        tp.cov(),
        tx.cov(),   0.0,        tx.var_b(), 0.0,
        0.0,        tp.cov(),   0.0,        tp.var_b(),
    ]);
    let nu = partial_transpose_min_symplectic(&cov)?;

    Ok(CriterionReport {
        epsilon_sq,
        duan_d,
        sum_criterion: sum,
        ppt_min_symplectic: nu,
        gains_used: ReportGains { a_from_b, b_from_a },
        flags: CriterionFlags::from_values(epsilon_sq, duan_d, nu),
        stderr: Some(CriterionStdErr { epsilon_sq: se_eps, duan_d: se_d }),
    })
}

/// Samples the x-run and p-run for modes `(a, b)` of `state` and
/// evaluates [`criteria_from_samples`]. The two runs use independent
/// substreams derived from `seed`.
pub fn criteria_from_state_samples(
    state: &GaussianState,
    a: usize,
    b: usize,
    n_samples: usize,
    seed: u64,
) -> Result<CriterionReport> {
    use crate::gaussian::sample_quadratures;
    use std::f64::consts::FRAC_PI_2;
    check_pair(state, a, b)?;
    let mut runs = Vec::with_capacity(2);
    for (i, theta) in [0.0, FRAC_PI_2].into_iter().enumerate() {
        let rec = sample_quadratures(state, &[(a, theta), (b, theta)], n_samples, seed.wrapping_mul(2).wrapping_add(i as u64))?;
        let mut it = rec.into_iter();
        let (ra, rb) = (it.next().expect("two records"), it.next().expect("two records"));
        runs.push(SampleRun::new(ra, rb)?);
    }
    criteria_from_samples(&runs)
}

/// Causal separation of the two measurement events: `L > c (t_A − t_B + Δt)`.
pub fn causally_separated(distance: f64, t_a: f64, t_b: f64, dt: f64, c: f64) -> Result<bool> {
    if [distance, t_a, t_b, dt, c].iter().any(|v| !v.is_finite()) {
        return invalid("all arguments must be finite");
    }
    if distance < 0.0 || dt < 0.0 {
        return invalid("distance and measurement window must be non-negative");
    }
    Ok(distance > c * (t_a - t_b + dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmsv(r: f64) -> GaussianState {
        GaussianState::two_mode_squeezed(r).unwrap()
    }

    #[test]
    fn uncorrelated_inference() {
        let s = GaussianState::thermal(2.0).unwrap().tensor(&GaussianState::vacuum(1).unwrap());
        let inf = inference_variance_linear(&s, Quadrature::x(0), Quadrature::x(1), None).unwrap();
        assert_eq!(inf.gain, 0.0);
        assert_eq!(inf.variance, 2.0);
    }

    #[test]
    fn product_states_raise_no_flags() {
        for r in [0.5, 1.0, 2.0, 3.0] {
            let s = tmsv(r).apply_loss(1, 0.0, false).unwrap();
            let rep = evaluate(&s, 0, 1).unwrap();
            assert!((rep.ppt_min_symplectic - 1.0).abs() < 1e-12);
            let f = rep.flags;
            assert!(!(f.epr_paradox || f.entangled_duan || f.epr_via_duan || f.entangled_ppt), "r={r}: {f:?}");
        }
        assert!(!evaluate(&tmsv(0.0), 0, 1).unwrap().flags.entangled_ppt);
    }

    #[test]
    fn ideal_gain_and_variance() {
        for r in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let inf = inference_variance_linear(&tmsv(r), Quadrature::x(0), Quadrature::x(1), None).unwrap();
            assert!((inf.gain - (2.0 * r).tanh()).abs() < 1e-12);
            assert!((inf.variance - 1.0 / (2.0 * r).cosh()).abs() < 1e-12);
            let g = regression_gains(&tmsv(r), 0, 1).unwrap();
            assert!((g.g_prime - (2.0 * r).tanh()).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_unit_gain() {
        // 2(cosh 2 − sinh 2) = 2e^{-2}
        let inf = inference_variance_linear(&tmsv(1.0), Quadrature::x(0), Quadrature::x(1), Some(1.0)).unwrap();
        assert!((inf.variance - 0.270_670_566_473_225_4).abs() < 1e-12, "{}", inf.variance);
        assert_eq!(inf.intercept, 0.0);
    }

    #[test]
    fn intercept_tracks_means() {
        let s = tmsv(0.5).displaced(&nalgebra::DVector::from_vec(vec![2.0, 0.0, 1.0, 0.0])).unwrap();
        let inf = inference_variance_linear(&s, Quadrature::x(0), Quadrature::x(1), Some(0.5)).unwrap();
        assert!((inf.intercept - 1.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_probe() {
        // a probe with zero variance cannot come from a physical state; build one directly
        let cov = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0, 1.0]));
        let s = GaussianState::from_parts(nalgebra::DVector::zeros(4), cov);
        let err = inference_variance_linear(&s, Quadrature::x(0), Quadrature::x(1), None);
        assert!(matches!(err, Err(Error::DegenerateProbe(_))));
        assert!(inference_variance_linear(&s, Quadrature::x(0), Quadrature::x(0), None).is_err());
    }

    #[test]
    fn vacuum_values() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(epsilon_product(&v, 0, 1, None).unwrap(), 1.0);
        assert_eq!(duan_value(&v, 0, 1).unwrap(), 1.0);
        assert_eq!(sum_criterion(&v, 0, 1, GainPair::ZERO).unwrap(), 2.0);
        assert!((ppt_min_symplectic(&v, 0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(epsilon_product(&v, 0, 0, None).is_err());
    }

    #[test]
    fn two_mode_squeezed_values() {
        let s = tmsv(2.0);
        let eps = epsilon_product(&s, 0, 1, None).unwrap();
        assert!((eps - 1.0 / 4.0f64.cosh().powi(2)).abs() < 1e-14);
        assert!((eps - 1.340_950_683_025_896_9e-3).abs() < 1e-15, "{eps}");
        let s1 = tmsv(1.0);
        assert!((duan_value(&s1, 0, 1).unwrap() - (-2.0f64).exp()).abs() < 1e-13);
        assert!((sum_criterion(&s1, 0, 1, GainPair::UNIT).unwrap() - 4.0 * (-2.0f64).exp()).abs() < 1e-13);
        for r in [0.3, 1.0, 2.0] {
            let nu = ppt_min_symplectic(&tmsv(r), 0, 1).unwrap();
            assert!((nu - (-2.0 * r).exp()).abs() < 1e-10 * (2.0 * r).cosh(), "r={r}: {nu}");
        }
    }

    #[test]
    fn lossy_pipeline_at_eighty_percent() {
        let s = tmsv(2.0).apply_loss(0, 0.8, false).unwrap().apply_loss(1, 0.8, false).unwrap();
        let eps_sq = epsilon_product(&s, 0, 1, None).unwrap();
        let analytic = epr_product_analytic(2.0, 0.8, 0.8).unwrap();
        // value frozen from the closed form
        assert!((analytic - 0.427_215_097_733_690_96).abs() < 1e-14, "{analytic}");
        assert!((eps_sq - analytic * analytic).abs() < 1e-12);
        assert!((eps_sq - 0.182_512_739_731_607_12).abs() < 1e-12, "{eps_sq}");
    }

    #[test]
    fn analytic_special_cases() {
        for r in [0.0, 0.7, 2.5] {
            for eta_a in [0.0, 0.3, 1.0] {
                assert!((epr_product_analytic(r, eta_a, 0.5).unwrap() - 1.0).abs() < 1e-15);
                assert!((epr_product_analytic(0.0, eta_a, 0.8).unwrap() - 1.0).abs() < 1e-15);
            }
            let ideal = epr_product_analytic(r, 1.0, 1.0).unwrap();
            assert!((ideal - 1.0 / (2.0 * r).cosh()).abs() < 1e-14);
        }
        assert!(epr_product_analytic(-1.0, 1.0, 1.0).is_err());
        assert!(epr_product_analytic(1.0, 1.1, 1.0).is_err());
    }

    #[test]
    fn entangled_without_epr() {
        let s = tmsv(1.0).apply_loss(0, 0.3, false).unwrap().apply_loss(1, 0.3, false).unwrap();
        let rep = evaluate(&s, 0, 1).unwrap();
        assert!(rep.ppt_min_symplectic < 1.0);
        assert!(rep.epsilon_sq > 1.0);
        assert!(rep.flags.entangled_ppt && !rep.flags.epr_paradox);
    }

    #[test]
    fn epsilon_bounded_by_twice_duan() {
        for r in [0.2, 1.0, 1.7] {
            let s = tmsv(r).apply_loss(1, 0.6, false).unwrap();
            let eps = epsilon_product(&s, 0, 1, Some(GainPair::UNIT)).unwrap().sqrt();
            assert!(eps <= 2.0 * duan_value(&s, 0, 1).unwrap() + 1e-15);
        }
    }

    #[test]
    fn sum_below_two_implies_product_below_one() {
        let s = tmsv(0.4).apply_loss(0, 0.9, false).unwrap();
        for g in [0.2, 0.5, 0.9, 1.3] {
            let gains = GainPair::new(g, g).unwrap();
            if sum_criterion(&s, 0, 1, gains).unwrap() < 2.0 {
                assert!(epsilon_product(&s, 0, 1, Some(gains)).unwrap() < 1.0);
            }
        }
    }

    #[test]
    fn report_json_fields() {
        let rep = evaluate(&tmsv(0.5), 0, 1).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        for key in ["epsilon_sq", "duan_D", "sum_criterion", "ppt_min_symplectic", "gains", "flags", "stderr"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["gx", "gx_prime", "gp", "gp_prime"] {
            assert!(v["gains"].get(key).is_some(), "missing gains.{key}");
        }
        assert!(v["stderr"].is_null());
        assert_eq!(v["flags"]["epr_paradox"], true);
    }

    #[test]
    fn causality() {
        assert!(causally_separated(10.0, 0.0, 0.0, 1.0, 1.0).unwrap());
        assert!(!causally_separated(0.5, 0.0, 0.0, 1.0, 1.0).unwrap());
        assert!(!causally_separated(3.0, 2.0, 0.0, 1.0, 1.0).unwrap());
        assert!(causally_separated(-1.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(causally_separated(1.0, f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sample_run_validation() {
        let a = HomodyneRecord::new(0, 0.0, vec![0.1, 0.2, 0.3]).unwrap();
        let b = HomodyneRecord::new(1, 0.0, vec![0.1, 0.2]).unwrap();
        assert!(SampleRun::new(a.clone(), b).is_err());
        let b = HomodyneRecord::new(1, 0.0, vec![0.1, 0.2, 0.5]).unwrap();
        let x_run = SampleRun::new(a, b).unwrap();
        // no p-run
        assert!(matches!(criteria_from_samples(&[x_run.clone()]), Err(Error::InvalidArgument(_))));
        let short = SampleRun {
            a: HomodyneRecord::new(0, std::f64::consts::FRAC_PI_2, vec![0.1]).unwrap(),
            b: HomodyneRecord::new(1, std::f64::consts::FRAC_PI_2, vec![0.4]).unwrap(),
        };
        assert!(criteria_from_samples(&[x_run, short]).is_err());
    }
}
