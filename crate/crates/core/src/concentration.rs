//! Lévy concentration bounds, empirical tails and the design deviation bound.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::haar::{sample_group_element, GroupElement, GroupId, GroupKind};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{binomial_se, mc_collect};
use crate::{Error, Result};

/// The group constant `C_G`: 4/(D−2) for SO, 2/D for SU, 1/(D+1) for Sp.
pub fn levy_constant(group: GroupId) -> Result<f64> {
    let d = group.dim as f64;
    match group.kind {
        GroupKind::SO if group.dim <= 2 => Err(Error::Domain(format!(
            "the Lévy constant 4/(D−2) is undefined for SO({})",
            group.dim
        ))),
        GroupKind::SO => Ok(4.0 / (d - 2.0)),
        GroupKind::SU => Ok(2.0 / d),
        GroupKind::Sp => Ok(1.0 / (d + 1.0)),
    }
}

/// `Pr(|f − E f| ≥ τ) ≤ 2 exp(−τ² / (2 L² C_G))` for `L`-Lipschitz `f`.
pub fn levy_bound(group: GroupId, lipschitz: f64, tau: f64) -> Result<f64> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("τ must be positive, got {tau}")));
    }
    let c = levy_constant(group)?;
    Ok(2.0 * (-tau * tau / (2.0 * lipschitz * lipschitz * c)).exp())
}

/// The sub-Gaussian rate `a = 1/(2 L² C_G)` implied by [`levy_bound`].
pub fn levy_rate(group: GroupId, lipschitz: f64) -> Result<f64> {
    Ok(1.0 / (2.0 * lipschitz * lipschitz * levy_constant(group)?))
}

type GroupFn = dyn Fn(&GroupElement) -> f64 + Send + Sync;

/// A real function on the group with a declared Lipschitz constant with
/// respect to the Hilbert–Schmidt distance.
#[derive(Clone)]
pub struct LipschitzFunctional {
    name: String,
    lipschitz_bound: f64,
    eval: Arc<GroupFn>,
    /// Largest |f(V₁) − f(V₂)| / ‖V₁ − V₂‖₂ seen on the registration probes.
    pub observed_ratio: f64,
}

impl fmt::Debug for LipschitzFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzFunctional")
            .field("name", &self.name)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("observed_ratio", &self.observed_ratio)
            .finish()
    }
}

pub const LIPSCHITZ_PROBES: usize = 100;

impl LipschitzFunctional {
    /// Registers `eval`, recording the largest difference quotient over random
    /// pairs from `group`. The check is soft: see [`Self::probe_violation`].
    pub fn new<F>(name: impl Into<String>, group: GroupId, lipschitz_bound: f64, eval: F) -> Result<Self>
    where
        F: Fn(&GroupElement) -> f64 + Send + Sync + 'static,
    {
        if !(lipschitz_bound > 0.0 && lipschitz_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("Lipschitz bound must be positive, got {lipschitz_bound}")));
        }
        let mut rng = RngStream::new(0x6c69_7073, group.dim as u64);
        let mut observed_ratio = 0.0_f64;
        for _ in 0..LIPSCHITZ_PROBES {
            let a = sample_group_element(group, &mut rng);
            let b = sample_group_element(group, &mut rng);
            let dist = (a.to_complex() - b.to_complex()).norm();
            if dist > 0.0 {
                observed_ratio = observed_ratio.max((eval(&a) - eval(&b)).abs() / dist);
            }
        }
        Ok(Self {
            name: name.into(),
            lipschitz_bound,
            eval: Arc::new(eval),
            observed_ratio,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn eval(&self, u: &GroupElement) -> f64 {
        (self.eval)(u)
    }

    /// Whether a registration probe exceeded the declared constant.
    pub fn probe_violation(&self) -> bool {
        self.observed_ratio > self.lipschitz_bound * (1.0 + 1e-12)
    }

    /// `U ↦ |⟨target|U|0⟩|² = ⟨0|U† M U|0⟩` for the projector `M = |target⟩⟨target|`,
    /// which is 2-Lipschitz.
    pub fn basis_projector(group: GroupId, target: usize) -> Result<Self> {
        if target >= group.complex_dim() {
            return Err(Error::InvalidDimension(format!("basis index {target} outside {group}")));
        }
        Self::new(format!("|<{target}|U|0>|^2"), group, 2.0, move |u| match u.matrix() {
            crate::DenseMatrix::Real(m) => m[(target, 0)].powi(2),
            crate::DenseMatrix::Complex(m) => m[(target, 0)].norm_sqr(),
            crate::DenseMatrix::Quaternion(m) => m.to_complex()[(target, 0)].norm_sqr(),
        })
    }

    pub fn constant(group: GroupId, value: f64) -> Result<Self> {
        Self::new(format!("const {value}"), group, 1.0, move |_| value)
    }
}

/// Empirical deviation probabilities beside the analytic Lévy bound.
#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub group: GroupId,
    pub functional: String,
    pub lipschitz: f64,
    pub tau_grid: Vec<f64>,
    pub empirical_tail: Vec<f64>,
    pub std_error: Vec<f64>,
    pub analytic_bound: Vec<f64>,
    pub n_samples: usize,
    pub empirical_mean: f64,
    pub exact_mean: Option<f64>,
}

impl TailReport {
    /// Grid points where `empirical > bound + z·SE`.
    pub fn violations(&self, z: f64) -> Vec<f64> {
        self.tau_grid
            .iter()
            .zip(&self.empirical_tail)
            .zip(self.std_error.iter().zip(&self.analytic_bound))
            .filter(|((_, e), (se, b))| **e > **b + z * **se)
            .map(|((t, _), _)| *t)
            .collect()
    }

    /// Largest `(empirical − bound) / SE` over the grid (negative when every
    /// point is below its bound). Zero-SE points count only if they exceed the bound.
    pub fn worst_z(&self) -> f64 {
        self.empirical_tail
            .iter()
            .zip(self.std_error.iter().zip(&self.analytic_bound))
            .map(|(e, (se, b))| {
                let gap = e - b;
                if *se > 0.0 {
                    gap / se
                } else if gap > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with columns `tau,empirical,bound,se`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Resource(format!("csv write failed: {e}"));
        csv.write_record(["tau", "empirical", "bound", "se"]).map_err(io)?;
        for i in 0..self.tau_grid.len() {
            csv.write_record([
                self.tau_grid[i].to_string(),
                self.empirical_tail[i].to_string(),
                self.analytic_bound[i].to_string(),
                self.std_error[i].to_string(),
            ])
            .map_err(io)?;
        }
        csv.flush().map_err(|e| Error::Resource(e.to_string()))
    }
}

/// The grid {0.05, 0.10, …, 0.50}.
pub fn default_tau_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.05).collect()
}

/// Fraction of samples with `|f(U) − mean| ≥ τ`, using the sample mean.
pub fn empirical_tail(
    group: GroupId,
    f: &LipschitzFunctional,
    tau_grid: &[f64],
    n_samples: usize,
    rng: &RngStream,
) -> Result<TailReport> {
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!("empirical tails need ≥ 1000 samples, got {n_samples}")));
    }
    let values = mc_collect(n_samples, rng, |r| f.eval(&sample_group_element(group, r)));
    let mean = values.iter().sum::<f64>() / n_samples as f64;
    let mut empirical = Vec::with_capacity(tau_grid.len());
    let mut se = Vec::with_capacity(tau_grid.len());
    let mut bound = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let p = values.iter().filter(|v| (*v - mean).abs() >= tau).count() as f64 / n_samples as f64;
        empirical.push(p);
        se.push(binomial_se(p, n_samples));
        bound.push(levy_bound(group, f.lipschitz_bound(), tau)?);
    }
    Ok(TailReport {
        group,
        functional: f.name().to_string(),
        lipschitz: f.lipschitz_bound(),
        tau_grid: tau_grid.to_vec(),
        empirical_tail: empirical,
        std_error: se,
        analytic_bound: bound,
        n_samples,
        empirical_mean: mean,
        exact_mean: None,
    })
}

/// Inputs of [`design_deviation_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignDeviationParams {
    pub group: GroupId,
    /// Design order.
    pub k: u32,
    pub epsilon: f64,
    /// Polynomial degree of f.
    #[serde(rename = "K")]
    pub degree: u32,
    /// Bound on the sum of absolute coefficients of f.
    pub alpha: f64,
    /// |E f| under the Haar measure.
    pub mean_abs: f64,
    pub delta: f64,
    pub m: u32,
    /// Sub-Gaussian rate from the Lévy bound, typically [`levy_rate`].
    pub a: f64,
}

/// The constant `C` in the sub-Gaussian moment bound `E|f − E f|^{2m} ≤ C (m/a)^m`.
pub const MOMENT_CONSTANT: f64 = 2.0;

/// `Pr(|f − E_Haar f| ≥ δ) ≤ δ^{−2m} (C (m/a)^m + (ε/D^k)(α + |E f|)^{2m})` for
/// `U` from an ε-approximate k-design, with D the dimension of the state space.
pub fn design_deviation_bound(p: &DesignDeviationParams) -> Result<f64> {
    if p.m == 0 || 2 * p.m * p.degree > p.k {
        return Err(Error::Contract(format!(
            "need integer m ≥ 1 with 2mK ≤ k; got m = {}, K = {}, k = {}",
            p.m, p.degree, p.k
        )));
    }
    if !(p.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ must be positive, got {}", p.delta)));
    }
    if !(p.epsilon >= 0.0 && p.alpha >= 0.0 && p.mean_abs >= 0.0 && p.a > 0.0) {
        return Err(Error::InvalidParameter("ε, α, |E f| must be ≥ 0 and a > 0".into()));
    }
    if p.delta.is_infinite() {
        return Ok(0.0);
    }
    let m = p.m as f64;
    let d = p.group.complex_dim() as f64;
    let moment = MOMENT_CONSTANT * (m / p.a).powf(m);
    let design = p.epsilon / d.powi(p.k as i32) * (p.alpha + p.mean_abs).powf(2.0 * m);
    Ok((moment + design) / p.delta.powf(2.0 * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn levy_constants() {
        assert_eq!(levy_constant(GroupId::so(4).unwrap()).unwrap(), 2.0);
        assert_eq!(levy_constant(GroupId::su(8).unwrap()).unwrap(), 0.25);
        assert_eq!(levy_constant(GroupId::sp(3).unwrap()).unwrap(), 0.25);
        assert!(matches!(levy_constant(GroupId::so(2).unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn levy_bound_examples() {
        let so4 = GroupId::so(4).unwrap();
        let b = levy_bound(so4, 2.0, 1.0).unwrap();
        assert!((b - 2.0 * (-1.0f64 / 16.0).exp()).abs() < 1e-15);
        assert!((b - 1.8788).abs() < 1e-4);
        assert!((levy_bound(so4, 2.0, 1e-9).unwrap() - 2.0).abs() < 1e-12);
        assert!(levy_bound(so4, 2.0, 0.0).is_err());
        assert!(levy_bound(GroupId::so(2).unwrap(), 2.0, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn levy_bound_decreasing_and_scale_invariant(
            d in 3usize..200, kind in 0usize..3,
            l in 0.1f64..10.0, t1 in 0.01f64..5.0, t2 in 0.01f64..5.0, s in 0.1f64..10.0,
        ) {
            let g = GroupId::new(GroupKind::ALL[kind], d).unwrap();
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            prop_assume!(hi - lo > 1e-6);
            let b_lo = levy_bound(g, l, lo).unwrap();
            let b_hi = levy_bound(g, l, hi).unwrap();
            prop_assert!(b_hi <= b_lo);
            prop_assert!(b_lo <= 2.0);
            let scaled = levy_bound(g, s * l, s * lo).unwrap();
            prop_assert!((scaled - b_lo).abs() <= 1e-12 * b_lo.max(1e-300));
        }
    }

    #[test]
    fn projector_functional_is_two_lipschitz() {
        for g in [GroupId::so(6).unwrap(), GroupId::su(6).unwrap(), GroupId::sp(3).unwrap()] {
            let f = LipschitzFunctional::basis_projector(g, 1).unwrap();
            assert!(!f.probe_violation(), "{g}: {}", f.observed_ratio);
        }
        let lying = LipschitzFunctional::new("100·Re U00", GroupId::su(2).unwrap(), 1.0, |u| 100.0 * u.to_complex()[(0, 0)].re).unwrap();
        assert!(lying.probe_violation());
    }

    #[test]
    fn constant_functional_has_no_tail() {
        let g = GroupId::su(4).unwrap();
        let f = LipschitzFunctional::constant(g, 0.3).unwrap();
        let report = empirical_tail(g, &f, &default_tau_grid(), 1000, &RngStream::new(50, 0)).unwrap();
        assert!(report.empirical_tail.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn tails_respect_levy_bound() {
        for g in [GroupId::so(16).unwrap(), GroupId::su(16).unwrap(), GroupId::sp(16).unwrap()] {
            let f = LipschitzFunctional::basis_projector(g, 0).unwrap();
            let r = empirical_tail(g, &f, &default_tau_grid(), 4000, &RngStream::new(51, g.dim as u64)).unwrap();
            assert!(r.violations(3.0).is_empty(), "{g}: {r:?}");
            for w in r.empirical_tail.windows(2) {
                assert!(w[1] <= w[0]);
            }
        }
        let g = GroupId::so(4).unwrap();
        let f = LipschitzFunctional::basis_projector(g, 0).unwrap();
        assert!(empirical_tail(g, &f, &[0.1], 10, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn fidelity_mean_in_so64() {
        let g = GroupId::so(64).unwrap();
        let f = LipschitzFunctional::basis_projector(g, 0).unwrap();
        let r = empirical_tail(g, &f, &[0.1], 10_000, &RngStream::new(52, 0)).unwrap();
        let values = mc_collect(10_000, &RngStream::new(52, 0), |r| f.eval(&sample_group_element(g, r)));
        let stats: crate::numerics::stats::RunningStats = values.into_iter().collect();
        assert!((stats.mean() - r.empirical_mean).abs() < 1e-15);
        assert!((r.empirical_mean - 1.0 / 64.0).abs() < 5.0 * stats.std_error());
    }

    #[test]
    fn tail_csv() {
        let g = GroupId::su(4).unwrap();
        let f = LipschitzFunctional::basis_projector(g, 0).unwrap();
        let r = empirical_tail(g, &f, &[0.1, 0.2], 1000, &RngStream::new(53, 0)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tau,empirical,bound,se"));
        assert_eq!(text.lines().count(), 3);
    }

    fn pin_params() -> DesignDeviationParams {
        let g = GroupId::su(8).unwrap();
        DesignDeviationParams {
            group: g,
            k: 4,
            epsilon: 0.0,
            degree: 1,
            alpha: 8.0 * 8f64.sqrt(),
            mean_abs: 1.0,
            delta: 0.5,
            m: 2,
            a: 8.0 / 16.0,
        }
    }

    #[test]
    fn design_deviation_pin_and_limits() {
        // δ^{-4} · 2 · (2 / 0.5)² = 16 · 32.
        assert_eq!(design_deviation_bound(&pin_params()).unwrap(), 512.0);
        let far = DesignDeviationParams {
            delta: f64::INFINITY,
            ..pin_params()
        };
        assert_eq!(design_deviation_bound(&far).unwrap(), 0.0);
        let big = DesignDeviationParams { delta: 1e6, ..pin_params() };
        assert!(design_deviation_bound(&big).unwrap() < 1e-20);
        let bad = DesignDeviationParams { m: 3, ..pin_params() };
        assert!(matches!(design_deviation_bound(&bad), Err(Error::Contract(_))));
        assert_eq!(levy_rate(GroupId::su(8).unwrap(), 2.0).unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn design_deviation_nondecreasing_in_epsilon(e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let a = design_deviation_bound(&DesignDeviationParams { epsilon: lo, ..pin_params() }).unwrap();
            let b = design_deviation_bound(&DesignDeviationParams { epsilon: hi, ..pin_params() }).unwrap();
            prop_assert!(b >= a);
        }
    }
}
