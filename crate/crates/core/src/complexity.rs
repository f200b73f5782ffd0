//! Strong-state-complexity probability bounds, measurement-class counts and
//! near-orthogonal packing counts.
//!
//! Every bound is evaluated in natural-log space. Reports carry the log value,
//! the raw value (when representable) and a `vacuous` flag for probability
//! bounds that reach 1. Dimensions `D` here are complex state-space dimensions,
//! `D = 2^n` for n qubits, for all three groups.

use serde::Serialize;
use serde_json::{json, Value};

use crate::haar::{sample_state, GroupId, GroupKind, PureState};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::RunningStats;
use crate::{Error, Result};

/// Closed-form evaluation of a bound with its inputs echoed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub group: Option<GroupKind>,
    pub formula_id: String,
    /// The reported value; probability bounds are clamped to [0, 1].
    pub value: f64,
    /// The unclamped value, `exp(log_value)` (infinite if it overflows).
    pub raw_value: f64,
    pub log_value: f64,
    pub log10_value: f64,
    /// Set when a probability bound is ≥ 1, or a count bound is < 1.
    pub vacuous: bool,
    pub inputs: Value,
    /// Intermediate quantities and alternative-mode values.
    pub extras: Value,
}

impl BoundReport {
    fn probability(group: Option<GroupKind>, formula_id: &str, log_value: f64, inputs: Value) -> Self {
        let raw = log_value.exp();
        Self {
            group,
            formula_id: formula_id.into(),
            value: raw.clamp(0.0, 1.0),
            raw_value: raw,
            log_value,
            log10_value: log_value / std::f64::consts::LN_10,
            vacuous: raw >= 1.0,
            inputs,
            extras: Value::Null,
        }
    }

    fn count(group: Option<GroupKind>, formula_id: &str, log_value: f64, inputs: Value) -> Self {
        let raw = log_value.exp();
        Self {
            group,
            formula_id: formula_id.into(),
            value: raw,
            raw_value: raw,
            log_value,
            log10_value: log_value / std::f64::consts::LN_10,
            vacuous: raw < 1.0,
            inputs,
            extras: Value::Null,
        }
    }

    fn with_extras(mut self, extras: Value) -> Self {
        self.extras = extras;
        self
    }
}

/// Circuit-size parameters: `n` qubits, `r` gates from a gate set of size
/// `gate_set_size`, distinguishing advantage `1 − 1/D − δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexityParams {
    pub n: u32,
    pub r: u32,
    pub delta: f64,
    pub gate_set_size: u64,
}

impl ComplexityParams {
    pub fn dim(&self) -> f64 {
        2f64.powi(self.n as i32)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 1000 {
            return Err(Error::InvalidParameter(format!("qubit count {} outside 1..=1000", self.n)));
        }
        if self.gate_set_size == 0 {
            return Err(Error::InvalidParameter("gate set must be nonempty".into()));
        }
        Ok(())
    }

    fn log_circuit_factor(&self) -> f64 {
        self.r as f64 * ((self.n as f64 + 1.0).ln() + (self.gate_set_size as f64).ln())
    }

    fn echo(&self) -> Value {
        json!({"n": self.n, "r": self.r, "delta": self.delta, "gate_set_size": self.gate_set_size, "D": self.dim()})
    }
}

/// Design order and accuracy of an ε-approximate k-design.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignParams {
    pub k: u32,
    pub epsilon: f64,
}

impl DesignParams {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("design order must be ≥ 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("ε must be ≥ 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// `ln |𝖬_r|` bound: `ln(2 D (n+1)^r |𝖦|^r)`.
pub fn log_measurement_class_size_bound(params: &ComplexityParams) -> Result<f64> {
    params.validate()?;
    Ok(std::f64::consts::LN_2 + params.n as f64 * std::f64::consts::LN_2 + params.log_circuit_factor())
}

/// Number of measurements implementable with at most r gates is ≤ `2D (n+1)^r |𝖦|^r`.
pub fn measurement_class_size_bound(params: &ComplexityParams) -> Result<BoundReport> {
    let log = log_measurement_class_size_bound(params)?;
    Ok(BoundReport::count(None, "measurement_class_size", log, params.echo()))
}

fn check_delta_unit(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Contract(format!("δ must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Probability that a Haar-random state has strong δ-state complexity at most r:
/// `4D(n+1)^r|𝖦|^r` times `e^{9/64} e^{−(D−2)(1−δ)²/32}` (SO),
/// `e^{7/32} e^{−D(1−δ)²/16}` (Sp) or `e^{3/32} e^{−D(1−δ)²/16}` (SU).
pub fn low_complexity_prob_bound(kind: GroupKind, params: &ComplexityParams) -> Result<BoundReport> {
    params.validate()?;
    check_delta_unit(params.delta)?;
    let d = params.dim();
    if kind == GroupKind::SO && d < 3.0 {
        return Err(Error::Domain("the SO branch needs D ≥ 3".into()));
    }
    let gap = (1.0 - params.delta).powi(2);
    let (constant, exponent) = match kind {
        GroupKind::SO => (9.0 / 64.0, (d - 2.0) * gap / 32.0),
        GroupKind::Sp => (7.0 / 32.0, d * gap / 16.0),
        GroupKind::SU => (3.0 / 32.0, d * gap / 16.0),
    };
    let log = 4f64.ln() + d.ln() + params.log_circuit_factor() + constant - exponent;
    Ok(BoundReport::probability(
        Some(kind),
        &format!("low_complexity.{}", kind.to_string().to_lowercase()),
        log,
        params.echo(),
    )
    .with_extras(json!({"log_prefactor": 4f64.ln() + d.ln() + params.log_circuit_factor() + constant, "exponent": exponent})))
}

/// How `m` is chosen in the design-based bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentOrder {
    /// m = k/3 as a real exponent, the simplified closed form.
    RealThird,
    /// m = ⌊k/3⌋, evaluating the unsimplified moment bound with integer m.
    IntegerFloor,
}

/// Upper end of the admissible δ window, `1/2 − 1/D − 1/(2 D^{3/2})`.
pub fn design_delta_window(d: f64) -> f64 {
    0.5 - 1.0 / d - 0.5 / d.powf(1.5)
}

/// The ε-approximate k-design version of [`low_complexity_prob_bound`].
///
/// With `m = k/3` the bound is `2^{2k/3}` times
/// `4|𝖦|^r (32k/3)^{k/3} (n+1)^r D (D−2)^{−k/3} + ε` (SO),
/// `4|𝖦|^r (16k/3)^{k/3} (n+1)^r D (D+2)^{−k/3} + ε` (Sp) or
/// `4|𝖦|^r (16k/3)^{k/3} (n+1)^r D^{1−k/3} + ε` (SU).
/// [`MomentOrder::IntegerFloor`] instead evaluates
/// `(1 − 1/D − δ)^{−2m} (4D(n+1)^r|𝖦|^r (x m)^m + (ε/D^k)(D^{3/2} + 1)^{2m})`
/// with `x = 32/(D−2), 8/(D/2+1), 16/D` and `m = ⌊k/3⌋`.
pub fn design_low_complexity_prob_bound(
    kind: GroupKind,
    params: &ComplexityParams,
    design: &DesignParams,
    order: MomentOrder,
) -> Result<BoundReport> {
    params.validate()?;
    design.validate()?;
    let d = params.dim();
    if design.k <= 3 {
        return Err(Error::Domain(format!("the design bound needs k > 3, got k = {}", design.k)));
    }
    let upper = design_delta_window(d);
    if !(params.delta > 0.0 && params.delta < upper) {
        return Err(Error::Domain(format!(
            "δ = {} outside the window (0, 1/2 − 1/D − 1/(2D^(3/2))) = (0, {upper})",
            params.delta
        )));
    }
    if kind == GroupKind::SO && d <= 2.0 {
        return Err(Error::Domain("the SO branch needs D > 2".into()));
    }
    let k = design.k as f64;
    let eps = design.epsilon;
    let circuit = params.log_circuit_factor();
    let mut inputs = params.echo();
    inputs["k"] = json!(design.k);
    inputs["epsilon"] = json!(eps);
    inputs["moment_order"] = json!(order);
    let tag = kind.to_string().to_lowercase();

    let (log, m) = match order {
        MomentOrder::RealThird => {
            let third = k / 3.0;
            let log_main = 4f64.ln()
                + circuit
                + match kind {
                    GroupKind::SO => third * (32.0 * third).ln() + d.ln() - third * (d - 2.0).ln(),
                    GroupKind::Sp => third * (16.0 * third).ln() + d.ln() - third * (d + 2.0).ln(),
                    GroupKind::SU => third * (16.0 * third).ln() + (1.0 - third) * d.ln(),
                };
            (2.0 * third * std::f64::consts::LN_2 + log_add(log_main, eps.ln()), third)
        }
        MomentOrder::IntegerFloor => {
            let m = (design.k / 3) as f64;
            let x = match kind {
                GroupKind::SO => 32.0 / (d - 2.0),
                GroupKind::Sp => 8.0 / (d / 2.0 + 1.0),
                GroupKind::SU => 16.0 / d,
            };
            let log_main = 4f64.ln() + d.ln() + circuit + m * (x * m).ln();
            let log_design = eps.ln() - k * d.ln() + 2.0 * m * (d.powf(1.5) + 1.0).ln();
            (-2.0 * m * (1.0 - 1.0 / d - params.delta).ln() + log_add(log_main, log_design), m)
        }
    };
    let id = match order {
        MomentOrder::RealThird => format!("design_low_complexity.{tag}"),
        MomentOrder::IntegerFloor => format!("design_low_complexity.{tag}.integer_m"),
    };
    Ok(BoundReport::probability(Some(kind), &id, log, inputs).with_extras(json!({"m": m, "delta_window_upper": upper})))
}

/// `ln(e^a + e^b)`, with `ln 0 = −∞` allowed.
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_delta_packing(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("Δ must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Number of Haar-random states that are pairwise at trace distance ≥ 1 − Δ
/// with probability > 1/2: `¼ e^{−29/64} e^{DΔ⁴/32}` (SO), `¼ e^{−1} e^{DΔ⁴/8}` (Sp),
/// `¼ e^{−1/4} e^{DΔ⁴/16}` (SU).
pub fn packing_count(kind: GroupKind, d: f64, delta: f64) -> Result<BoundReport> {
    check_delta_packing(delta)?;
    if !(d >= 2.0) {
        return Err(Error::InvalidDimension(format!("D must be ≥ 2, got {d}")));
    }
    let q = delta.powi(4);
    let log = (0.25f64).ln()
        + match kind {
            GroupKind::SO => -29.0 / 64.0 + d * q / 32.0,
            GroupKind::Sp => -1.0 + d * q / 8.0,
            GroupKind::SU => -0.25 + d * q / 16.0,
        };
    Ok(BoundReport::count(
        Some(kind),
        &format!("packing.{}", kind.to_string().to_lowercase()),
        log,
        json!({"D": d, "Delta": delta}),
    ))
}

/// Packing count for an ε-approximate k-design:
/// `N = ½((2−Δ)Δ − 1/D)^k / (2 x^{k/2} + 2^k ε)` with `x = 16k/(D−2), 8k/(D+2), 8k/D`.
pub fn design_packing_count(kind: GroupKind, d: f64, delta: f64, design: &DesignParams) -> Result<BoundReport> {
    check_delta_packing(delta)?;
    design.validate()?;
    let margin = (2.0 - delta) * delta - 1.0 / d;
    if !(margin > 0.0) {
        return Err(Error::Domain(format!("need (2−Δ)Δ > 1/D; got (2−Δ)Δ − 1/D = {margin}")));
    }
    if kind == GroupKind::SO && d <= 2.0 {
        return Err(Error::Domain("the SO branch needs D > 2".into()));
    }
    let k = design.k as f64;
    let x = match kind {
        GroupKind::SO => 16.0 * k / (d - 2.0),
        GroupKind::Sp => 8.0 * k / (d + 2.0),
        GroupKind::SU => 8.0 * k / d,
    };
    let log_den = log_add(2f64.ln() + 0.5 * k * x.ln(), k * std::f64::consts::LN_2 + design.epsilon.ln());
    let log = 0.5f64.ln() + k * margin.ln() - log_den;
    Ok(BoundReport::count(
        Some(kind),
        &format!("design_packing.{}", kind.to_string().to_lowercase()),
        log,
        json!({"D": d, "Delta": delta, "k": design.k, "epsilon": design.epsilon}),
    )
    .with_extras(json!({"log_denominator": log_den, "design_term": 2f64.powf(k) * design.epsilon})))
}

/// The design packing count at `ε = 2^{−k} D^{−k/2}` and `Δ = D^{−1/3}`, with
/// the scaling exponent `ln N / ln(D/k)` in the extras.
pub fn corollary_packing_count(kind: GroupKind, d: f64, k: u32) -> Result<BoundReport> {
    let kf = k as f64;
    let design = DesignParams {
        k,
        epsilon: 2f64.powf(-kf) * d.powf(-kf / 2.0),
    };
    let delta = d.powf(-1.0 / 3.0);
    let mut report = design_packing_count(kind, d, delta, &design)?;
    report.formula_id = format!("design_packing.corollary.{}", kind.to_string().to_lowercase());
    let exponent = report.log_value / (d / kf).ln();
    report.extras["epsilon"] = json!(design.epsilon);
    report.extras["Delta"] = json!(delta);
    report.extras["scaling_exponent"] = json!(exponent);
    Ok(report)
}

/// Extremes of pairwise overlaps within a set of states.
#[derive(Clone, Debug, Serialize)]
pub struct PairwiseReport {
    pub group: GroupId,
    pub n_states: usize,
    pub max_fidelity: f64,
    pub min_trace_distance: f64,
    pub mean_fidelity: f64,
    pub mean_fidelity_se: f64,
    /// Largest |T − √(1 − F)| over all pairs.
    pub relation_error: f64,
}

/// Pairwise fidelities `|⟨ψᵢ|ψⱼ⟩|²` and trace distances of the given states.
pub fn pairwise_report(states: &[PureState]) -> Result<PairwiseReport> {
    if states.len() < 2 {
        return Err(Error::InvalidParameter("need at least two states".into()));
    }
    let amps: Vec<Vec<num_complex::Complex64>> = states.iter().map(|s| s.amplitudes()).collect();
    let mut stats = RunningStats::default();
    let mut max_f = 0.0_f64;
    let mut min_t = f64::INFINITY;
    let mut relation = 0.0_f64;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let f = crate::numerics::fidelity(&states[i].state, &states[j].state)?;
            let t = crate::numerics::trace_distance(&states[i].state, &states[j].state)?;
            debug_assert_eq!(amps[i].len(), amps[j].len());
            relation = relation.max((t - (1.0 - f).max(0.0).sqrt()).abs());
            stats.push(f);
            max_f = max_f.max(f);
            min_t = min_t.min(t);
        }
    }
    Ok(PairwiseReport {
        group: states[0].source_group,
        n_states: states.len(),
        max_fidelity: max_f,
        min_trace_distance: min_t,
        mean_fidelity: stats.mean(),
        mean_fidelity_se: stats.std_error(),
        relation_error: relation,
    })
}

/// Samples `n_states` Haar-random states (state `i` from substream `i`) and
/// reports their pairwise extremes.
pub fn empirical_pairwise_fidelity(group: GroupId, n_states: usize, rng: &RngStream) -> Result<PairwiseReport> {
    if n_states < 2 {
        return Err(Error::InvalidParameter("need at least two states".into()));
    }
    let states: Vec<PureState> = (0..n_states)
        .map(|i| sample_state(group, &mut rng.substream(i as u64)))
        .collect();
    pairwise_report(&states)
}
