//! Born distributions, total-variation distance to uniform, the expected-TV
//! constants and statistical-query lower bounds.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::complexity::BoundReport;
use crate::gaussian::MomentEstimate;
use crate::haar::{sample_group_element_with, sample_state, GroupElement, GroupId, GroupKind, PureState, SamplerOptions};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{binomial_se, mc_collect, mc_scalar};
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Outcome probabilities of a computational-basis measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BornDistribution {
    pub probs: Vec<f64>,
    pub source: GroupId,
}

impl BornDistribution {
    pub fn new(mut probs: Vec<f64>, source: GroupId) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < -1e-15) {
            return Err(Error::InvalidParameter("probabilities must be finite and nonnegative".into()));
        }
        for p in probs.iter_mut() {
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { probs, source })
    }

    pub fn from_state(psi: &PureState) -> Result<Self> {
        Self::new(psi.probabilities(), psi.source_group)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// CSV rows `x,p`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Resource(format!("csv write failed: {e}"));
        csv.write_record(["x", "p"]).map_err(io)?;
        for (x, p) in self.probs.iter().enumerate() {
            csv.write_record([x.to_string(), format!("{p:e}")]).map_err(io)?;
        }
        csv.flush().map_err(|e| Error::Resource(e.to_string()))
    }
}

/// `P_U(x) = |⟨x|U|0⟩|²`.
pub fn born_distribution(element: &GroupElement) -> Result<BornDistribution> {
    BornDistribution::from_state(&element.first_column())
}

/// `½ Σ_x |P(x) − 1/D|`.
pub fn tv_to_uniform(p: &BornDistribution) -> f64 {
    let u = 1.0 / p.dim() as f64;
    0.5 * p.probs.iter().map(|x| (x - u).abs()).sum::<f64>()
}

/// `(M_G, Δ_G)`: the asymptotic mean of the TV distance to uniform and the
/// bound on its deviation at `n` qubits.
pub fn expected_tv_constants(kind: GroupKind, n: u32) -> (f64, f64) {
    let d = 2f64.powi(n as i32);
    match kind {
        GroupKind::SO => ((2.0 / (std::f64::consts::PI * std::f64::consts::E)).sqrt(), 1.0 / (2.0 * d).sqrt()),
        GroupKind::SU | GroupKind::Sp => ((-1.0f64).exp(), 2f64.powf(-(n as f64) / 2.0 - 1.0)),
    }
}

/// How Born distributions are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingRoute {
    /// First column of a sampled group element (full QR or Gram–Schmidt).
    #[serde(alias = "elements")]
    GroupElements,
    /// A sampled state; same law as `U|0⟩`, at O(D) cost per sample.
    Pushforward,
}

impl std::str::FromStr for SamplingRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pushforward" | "states" => Ok(SamplingRoute::Pushforward),
            "elements" | "group_elements" => Ok(SamplingRoute::GroupElements),
            other => Err(Error::InvalidParameter(format!("unknown sampling route '{other}', expected pushforward or elements"))),
        }
    }
}

fn sample_born<R: rand::Rng + ?Sized>(group: GroupId, route: SamplingRoute, rng: &mut R) -> Vec<f64> {
    match route {
        SamplingRoute::GroupElements => {
            let options = SamplerOptions {
                normalize_determinant: false,
            };
            sample_group_element_with(group, rng, options).first_column().probabilities()
        }
        SamplingRoute::Pushforward => sample_state(group, rng).probabilities(),
    }
}

/// Largest qubit count accepted by [`estimate_expected_tv`].
pub const MAX_TV_QUBITS: u32 = 11;

#[derive(Clone, Debug, Serialize)]
pub struct TvEstimate {
    pub group: GroupId,
    pub n: u32,
    pub route: SamplingRoute,
    pub estimate: MomentEstimate,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// `[M − Δ, M + Δ]`.
    pub band: (f64, f64),
    pub in_band: bool,
    /// Membership in `[M − Δ − 3SE, M + Δ + 3SE]`.
    pub in_band_3se: bool,
}

/// Monte Carlo mean of `d_TV(P_U, 𝒰)` over Haar-random `U` on `n` qubits.
pub fn estimate_expected_tv(kind: GroupKind, n: u32, n_samples: usize, rng: &RngStream, route: SamplingRoute) -> Result<TvEstimate> {
    if n > MAX_TV_QUBITS {
        return Err(Error::Resource(format!("expected-TV sampling supports n ≤ {MAX_TV_QUBITS}, got {n}")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let group = GroupId::for_qubits(kind, n)?;
    let stats = mc_scalar(n_samples, rng, |r| {
        let probs = sample_born(group, route, r);
        let u = 1.0 / probs.len() as f64;
        0.5 * probs.iter().map(|x| (x - u).abs()).sum::<f64>()
    });
    let estimate = MomentEstimate {
        value: stats.mean(),
        std_error: stats.std_error(),
        n_samples,
        normalization: 1.0,
    };
    let (m, delta) = expected_tv_constants(kind, n);
    let v = estimate.value;
    let se3 = 3.0 * estimate.std_error;
    Ok(TvEstimate {
        group,
        n,
        route,
        estimate,
        m,
        delta,
        band: (m - delta, m + delta),
        in_band: (m - delta..=m + delta).contains(&v),
        in_band_3se: (m - delta - se3..=m + delta + se3).contains(&v),
    })
}

/// Statistical-query parameters: tolerance τ, accuracy ε, success fraction β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqParams {
    pub n: u32,
    pub tau: f64,
    pub epsilon: f64,
    pub beta: f64,
}

impl SqParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 1000 {
            return Err(Error::InvalidParameter(format!("qubit count {} outside 1..=1000", self.n)));
        }
        for (name, v) in [("τ", self.tau), ("ε", self.epsilon)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("β must lie in (0, 1], got {}", self.beta)));
        }
        Ok(())
    }
}

/// `ξ_G = M_G − Δ_G − (ε + τ)`.
pub fn sq_xi(kind: GroupKind, params: &SqParams) -> f64 {
    let (m, delta) = expected_tv_constants(kind, params.n);
    m - delta - (params.epsilon + params.tau)
}

/// Tail bounds `(𝔣, 𝔲)` with exponents proportional to `D = 2^n`.
pub fn sq_dimension_bounds(kind: GroupKind, params: &SqParams) -> (f64, f64) {
    let d = 2f64.powi(params.n as i32);
    let xi = sq_xi(kind, params);
    let (t2, x2) = (params.tau * params.tau, xi * xi);
    match kind {
        GroupKind::SO => (2.0 * (-(d - 2.0) * t2 / 32.0).exp(), 2.0 * (-(d - 2.0) * x2 / 8.0).exp()),
        GroupKind::Sp => (2.0 * (-(d / 2.0 + 1.0) * t2 / 8.0).exp(), 2.0 * (-(d / 2.0 + 1.0) * x2 / 2.0).exp()),
        GroupKind::SU => (2.0 * (-d * t2 / 16.0).exp(), 2.0 * (-d * x2 / 4.0).exp()),
    }
}

/// Tail bounds `(𝔣, 𝔲) = (2e^{−C_G τ²/8}, 2e^{−ξ² C_G/2})` with the group
/// constant in the exponent. `None` when `C_G` is undefined.
pub fn sq_levy_constant_bounds(kind: GroupKind, params: &SqParams) -> Option<(f64, f64)> {
    // The Lévy constant at D = 2^n, without the sampler's dimension cap.
    let d = 2f64.powi(params.n as i32);
    let c = match kind {
        GroupKind::SO if d <= 2.0 => return None,
        GroupKind::SO => 4.0 / (d - 2.0),
        GroupKind::SU => 2.0 / d,
        GroupKind::Sp => 1.0 / (d / 2.0 + 1.0),
    };
    let xi = sq_xi(kind, params);
    Some((2.0 * (-c * params.tau * params.tau / 8.0).exp(), 2.0 * (-xi * xi * c / 2.0).exp()))
}

/// Lower bound on the number of τ-accurate statistical queries needed to learn
/// Born distributions of Haar-random states to accuracy ε with probability β:
/// `q + 1 ≥ (β − 𝔲) / 𝔣`. The dimension mode is reported; the Lévy-constant mode and
/// whether the two agree are in the extras.
pub fn sq_lower_bound(kind: GroupKind, params: &SqParams) -> Result<BoundReport> {
    params.validate()?;
    let (m, delta) = expected_tv_constants(kind, params.n);
    let xi = sq_xi(kind, params);
    if xi < 0.0 {
        return Err(Error::Domain(format!(
            "accuracy restriction ε ≤ M_G − Δ_G − 2τ violated: ξ_G = M_G − Δ_G − (ε + τ) = {xi:.6} < 0 \
             (M_G = {m:.6}, Δ_G = {delta:.6})"
        )));
    }
    let (f, u) = sq_dimension_bounds(kind, params);
    let q = (params.beta - u) / f - 1.0;
    let alternate = sq_levy_constant_bounds(kind, params).map(|(lf, lu)| {
        let lq = (params.beta - lu) / lf - 1.0;
        json!({"f_bound": lf, "u_bound": lu, "q_lower": lq})
    });
    let agree = alternate
        .as_ref()
        .and_then(|l| l["q_lower"].as_f64())
        .map(|lq| (lq - q).abs() <= 1e-9 * q.abs().max(1.0));
    let mut report = BoundReport {
        group: Some(kind),
        formula_id: format!("sq_lower_bound.{}", kind.to_string().to_lowercase()),
        value: q,
        raw_value: q,
        log_value: q.ln(),
        log10_value: q.log10(),
        vacuous: q <= 0.0,
        inputs: json!(params),
        extras: json!({
            "M": m,
            "Delta": delta,
            "xi": xi,
            "f_bound": f,
            "u_bound": u,
            "q_lower": q,
            "no_nontrivial_bound": q <= 0.0,
            "levy_constant_mode": alternate,
            "modes_agree": agree,
        }),
    };
    if q <= 0.0 {
        report.log_value = f64::NEG_INFINITY;
        report.log10_value = f64::NEG_INFINITY;
    }
    Ok(report)
}

/// A lower-bound witness for the maximally distinguishable fraction.
#[derive(Clone, Debug, Serialize)]
pub struct DistinguishableFraction {
    pub group: GroupId,
    pub tau: f64,
    pub fraction: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// The dimension-mode bound on 𝔣 for comparison.
    pub f_bound: f64,
    pub label: &'static str,
}

/// Estimates `Pr_U(|Σ_x P_U(x) φ(x) − mean_x φ(x)| ≥ τ)` for a fixed `φ` with
/// values in [−1, 1].
pub fn empirical_distinguishable_fraction(
    kind: GroupKind,
    n: u32,
    phi: &[f64],
    tau: f64,
    n_samples: usize,
    rng: &RngStream,
    route: SamplingRoute,
) -> Result<DistinguishableFraction> {
    let group = GroupId::for_qubits(kind, n)?;
    let d = group.complex_dim();
    if phi.len() != d {
        return Err(Error::Contract(format!("φ has {} entries, expected {d}", phi.len())));
    }
    if phi.iter().any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(Error::Contract("φ must take values in [−1, 1]".into()));
    }
    if !(tau > 0.0) || n_samples == 0 {
        return Err(Error::InvalidParameter("need τ > 0 and at least one sample".into()));
    }
    let uniform_mean = phi.iter().sum::<f64>() / d as f64;
    let hits = mc_collect(n_samples, rng, |r| {
        let p = sample_born(group, route, r);
        let gap = p.iter().zip(phi).map(|(a, b)| a * b).sum::<f64>() - uniform_mean;
        if gap.abs() >= tau {
            1.0
        } else {
            0.0
        }
    });
    let fraction = hits.iter().sum::<f64>() / n_samples as f64;
    let params = SqParams {
        n,
        tau: tau.min(0.999),
        epsilon: 1e-3,
        beta: 1.0,
    };
    Ok(DistinguishableFraction {
        group,
        tau,
        fraction,
        std_error: binomial_se(fraction, n_samples),
        n_samples,
        f_bound: sq_dimension_bounds(kind, &params).0,
        label: "lower-bound witness",
    })
}

/// Parity `(−1)^{popcount(x)}` on `n` bits.
pub fn parity(n: u32) -> Vec<f64> {
    (0..1usize << n)
        .map(|x| if x.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_group_element;
    use crate::numerics::{CMatrix, DenseMatrix, RMatrix};

    #[test]
    fn born_of_identity_is_point_mass() {
        let g = GroupId::su(4).unwrap();
        let p = born_distribution(&GroupElement::identity(g)).unwrap();
        assert_eq!(p.probs, vec![1.0, 0.0, 0.0, 0.0]);
        assert!((tv_to_uniform(&p) - 0.75).abs() < 1e-15);
        for d in [2usize, 8, 32] {
            let g = GroupId::su(d).unwrap();
            let p = born_distribution(&GroupElement::identity(g)).unwrap();
            assert!((tv_to_uniform(&p) - (1.0 - 1.0 / d as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn real_hadamard_gives_uniform() {
        let h = RMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]) / 2f64.sqrt();
        let hh = h.kronecker(&h);
        let g = GroupId::so(4).unwrap();
        let e = GroupElement::from_matrix(g, DenseMatrix::Real(hh)).unwrap();
        let p = born_distribution(&e).unwrap();
        assert!(p.probs.iter().all(|x| (x - 0.25).abs() < 1e-15));
        assert!(tv_to_uniform(&p) < 1e-15);
    }

    #[test]
    fn random_born_distributions_are_normalized_and_bounded() {
        let mut rng = RngStream::new(70, 0);
        for g in [GroupId::so(16).unwrap(), GroupId::su(16).unwrap(), GroupId::sp(8).unwrap()] {
            for _ in 0..50 {
                let p = born_distribution(&sample_group_element(g, &mut rng)).unwrap();
                assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let tv = tv_to_uniform(&p);
                assert!((0.0..=1.0 - 1.0 / 16.0).contains(&tv));
            }
        }
        let g = GroupId::su(2).unwrap();
        assert!(matches!(BornDistribution::new(vec![0.6, 0.6], g), Err(Error::NotNormalized(_))));
        let u = CMatrix::identity(2, 2);
        assert!(GroupElement::from_matrix(g, DenseMatrix::Complex(u)).is_ok());
    }

    #[test]
    fn constants() {
        let (m, d) = expected_tv_constants(GroupKind::SO, 10);
        assert!((m - 0.483_941_4).abs() < 1e-7);
        assert!((d - 0.022_097).abs() < 1e-5);
        let (m, d) = expected_tv_constants(GroupKind::SU, 10);
        assert!((m - 0.367_879_4).abs() < 1e-7);
        assert_eq!(d, 2f64.powi(-6));
        assert_eq!(expected_tv_constants(GroupKind::Sp, 10), expected_tv_constants(GroupKind::SU, 10));
    }

    #[test]
    fn expected_tv_bands_at_eight_qubits() {
        for kind in GroupKind::ALL {
            for route in [SamplingRoute::Pushforward, SamplingRoute::GroupElements] {
                let e = estimate_expected_tv(kind, 8, 200, &RngStream::new(71, kind as u64), route).unwrap();
                assert!(e.in_band_3se, "{kind} {route:?}: {e:?}");
            }
        }
        assert!(matches!(
            estimate_expected_tv(GroupKind::SU, 12, 10, &RngStream::new(0, 0), SamplingRoute::Pushforward),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn routes_agree_in_distribution() {
        let g = GroupId::for_qubits(GroupKind::Sp, 5).unwrap();
        let tv = |route| {
            mc_collect(4000, &RngStream::new(72, route as u64), |r| {
                let p = BornDistribution::new(sample_born(g, route, r), g).unwrap();
                tv_to_uniform(&p)
            })
        };
        let ks = crate::numerics::stats::ks_two_sample(&tv(SamplingRoute::Pushforward), &tv(SamplingRoute::GroupElements));
        assert!(ks.p_value > 1e-3, "{ks:?}");
    }

    #[test]
    fn sq_su_example() {
        let p = SqParams {
            n: 10,
            tau: 0.1,
            epsilon: 0.1,
            beta: 0.5,
        };
        let r = sq_lower_bound(GroupKind::SU, &p).unwrap();
        let xi = r.extras["xi"].as_f64().unwrap();
        assert!((xi - 0.152_254).abs() < 1e-6);
        assert!((r.extras["u_bound"].as_f64().unwrap() - 0.00529).abs() < 1e-5);
        assert!((r.extras["f_bound"].as_f64().unwrap() - 1.0546).abs() < 1e-4);
        assert!((r.value + 0.531).abs() < 1e-3);
        assert!(r.vacuous);
        assert_eq!(r.extras["no_nontrivial_bound"], json!(true));
        assert_eq!(r.extras["modes_agree"], json!(false));
        // Pure function.
        assert_eq!(sq_lower_bound(GroupKind::SU, &p).unwrap(), r);
    }

    #[test]
    fn levy_constant_mode_uses_the_concentration_constant() {
        let p = SqParams {
            n: 6,
            tau: 0.1,
            epsilon: 0.1,
            beta: 0.5,
        };
        for kind in GroupKind::ALL {
            let c = crate::concentration::levy_constant(GroupId::for_qubits(kind, 6).unwrap()).unwrap();
            let (f, _) = sq_levy_constant_bounds(kind, &p).unwrap();
            assert!((f - 2.0 * (-c * 0.01 / 8.0).exp()).abs() < 1e-15);
        }
        assert!(sq_levy_constant_bounds(GroupKind::SO, &SqParams { n: 1, ..p }).is_none());
        assert!(sq_levy_constant_bounds(GroupKind::SU, &SqParams { n: 40, ..p }).is_some());
    }

    #[test]
    fn sq_domain_and_flags() {
        let bad = SqParams {
            n: 10,
            tau: 0.2,
            epsilon: 0.2,
            beta: 0.5,
        };
        match sq_lower_bound(GroupKind::SU, &bad) {
            Err(Error::Domain(msg)) => assert!(msg.contains("ε ≤ M_G − Δ_G − 2τ")),
            other => panic!("{other:?}"),
        }
        // β at or below the 𝔲 bound gives no nontrivial bound.
        let p = SqParams {
            n: 4,
            tau: 0.05,
            epsilon: 0.05,
            beta: 0.1,
        };
        let r = sq_lower_bound(GroupKind::SO, &p).unwrap();
        assert!(r.extras["u_bound"].as_f64().unwrap() >= 0.1);
        assert!(r.value <= 0.0 && r.vacuous);
        // Large n: the bound becomes enormous.
        let big = sq_lower_bound(GroupKind::SU, &SqParams { n: 20, tau: 0.1, epsilon: 0.1, beta: 1.0 }).unwrap();
        assert!(big.value > 1e10 && !big.vacuous);
    }

    #[test]
    fn sq_monotonicity() {
        for kind in GroupKind::ALL {
            let base = SqParams {
                n: 14,
                tau: 0.05,
                epsilon: 0.05,
                beta: 0.5,
            };
            let q = |p: SqParams| sq_lower_bound(kind, &p).unwrap().value;
            let mut last = f64::NEG_INFINITY;
            for beta in [0.2, 0.4, 0.6, 0.8, 1.0] {
                let v = q(SqParams { beta, ..base });
                assert!(v >= last);
                last = v;
            }
            // Coarser queries carry less information: 𝔣 falls with τ, so the
            // query count rises while 𝔲 stays negligible.
            let mut last = f64::NEG_INFINITY;
            for tau in [0.02, 0.04, 0.06, 0.08, 0.1] {
                let p = SqParams { tau, ..base };
                assert!(sq_dimension_bounds(kind, &p).1 < 1e-6);
                let v = q(p);
                assert!(v >= last, "{kind}");
                last = v;
            }
        }
    }

    #[test]
    fn distinguishable_fraction_examples() {
        let n = 8;
        let rng = RngStream::new(73, 0);
        let r = empirical_distinguishable_fraction(GroupKind::SO, n, &parity(n), 0.3, 10_000, &rng, SamplingRoute::Pushforward).unwrap();
        assert!(r.fraction <= r.f_bound + 3.0 * r.std_error);
        let ones = vec![1.0; 256];
        let r = empirical_distinguishable_fraction(GroupKind::SU, n, &ones, 1e-9, 1000, &rng, SamplingRoute::Pushforward).unwrap();
        assert_eq!(r.fraction, 0.0);
        let r = empirical_distinguishable_fraction(GroupKind::SU, n, &parity(n), 2.5, 1000, &rng, SamplingRoute::Pushforward).unwrap();
        assert_eq!(r.fraction, 0.0);
        let mut out_of_range = parity(n);
        out_of_range[3] = 1.5;
        assert!(matches!(
            empirical_distinguishable_fraction(GroupKind::SU, n, &out_of_range, 0.1, 10, &rng, SamplingRoute::Pushforward),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn born_csv() {
        let g = GroupId::su(4).unwrap();
        let p = born_distribution(&GroupElement::identity(g)).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
