//! The acceptance suite: nine numerical checks run at a quick or full scale.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::born::{estimate_expected_tv, sq_lower_bound, SamplingRoute, SqParams};
use crate::commutant::{commutant_basis, mc_twirl_many, random_density_matrix, twirl};
use crate::complexity::{
    design_low_complexity_prob_bound, design_packing_count, low_complexity_prob_bound, measurement_class_size_bound,
    packing_count, ComplexityParams, DesignParams, MomentOrder,
};
use crate::concentration::{
    default_tau_grid, design_deviation_bound, empirical_tail, levy_bound, levy_constant, DesignDeviationParams,
    LipschitzFunctional,
};
use crate::gaussian::{chi_square_moment, haar_expect_direct, haar_expect_gaussian, random_homogeneous_polynomial, HomogeneousFunctional};
use crate::haar::{sample_state, GroupId, GroupKind};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::mc_vector;
use crate::numerics::{gaussian_vector, CMatrix, FieldTag};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Reduced sample counts; the whole suite runs in about a minute.
    Quick,
    /// The stated sample counts.
    Full,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            other => Err(Error::InvalidParameter(format!("unknown scale '{other}', expected quick or full"))),
        }
    }
}

impl Scale {
    fn samples(self, full: usize, quick: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub details: Value,
    pub elapsed_secs: f64,
    pub budget_secs: f64,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.elapsed_secs <= self.budget_secs
    }

    /// `PASS [3] exact moment pins (0.4 s, budget 60 s)`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} [{}] {} ({:.1} s, budget {:.0} s{})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_secs,
            self.budget_secs,
            if self.within_budget() { "" } else { ", over budget" }
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub scale: Scale,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Runs one criterion, timing it and turning errors into failures.
fn timed(id: u32, name: &str, budget_secs: f64, body: impl FnOnce() -> Result<(bool, Value)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, details) = match body() {
        Ok(r) => r,
        Err(e) => (false, json!({"error": e.to_string()})),
    };
    CriterionResult {
        id,
        name: name.into(),
        passed,
        details,
        elapsed_secs: start.elapsed().as_secs_f64(),
        budget_secs,
    }
}

fn stream(seed: u64, criterion: u64) -> RngStream {
    RngStream::new(seed, 1000 + criterion)
}

fn group(kind: GroupKind, d: usize) -> Result<GroupId> {
    GroupId::new(kind, d)
}

/// Mean Born probabilities of Haar-random states equal 1/D at every outcome.
pub fn criterion_1(seed: u64, scale: Scale) -> CriterionResult {
    timed(1, "uniform average Born distribution", 60.0, || {
        let n = scale.samples(100_000, 20_000);
        let root = stream(seed, 1);
        let mut rows = Vec::new();
        let mut ok = true;
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            for (di, d) in [4usize, 8, 16].into_iter().enumerate() {
                let g = group(kind, d)?;
                let dim = g.complex_dim();
                let stats = mc_vector(n, dim, &root.substream((gi * 3 + di) as u64), |r, out| {
                    out.copy_from_slice(&sample_state(g, r).probabilities());
                });
                let target = 1.0 / dim as f64;
                let z = stats
                    .iter()
                    .map(|s| (s.mean() - target).abs() / s.std_error())
                    .fold(0.0, f64::max);
                ok &= z <= 5.0;
                rows.push(json!({"group": g.to_string(), "complex_dim": dim, "max_z": z}));
            }
        }
        Ok((ok, json!({"n_samples": n, "tolerance_se": 5.0, "cells": rows})))
    })
}

/// Gaussian-integration estimates agree with direct Haar averages for random
/// homogeneous polynomials.
pub fn criterion_2(seed: u64, scale: Scale) -> CriterionResult {
    timed(2, "Gaussian-integration oracle equivalence", 300.0, || {
        let n = scale.samples(100_000, 10_000);
        let polys = scale.samples(20, 5);
        let root = stream(seed, 2);
        let mut worst = 0.0_f64;
        let mut failures = Vec::new();
        let mut cells = 0;
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            for (di, d) in [2usize, 4, 8].into_iter().enumerate() {
                let g = group(kind, d)?;
                for k in 1..=3u32 {
                    let cell = root.substream((gi * 100 + di * 10 + k as usize) as u64);
                    let mut poly_rng = cell.substream(u64::MAX);
                    for p in 0..polys {
                        let (f, _) = random_homogeneous_polynomial(g, k, 3, &mut poly_rng)?;
                        // Same stream for both routes: common random numbers.
                        let s = cell.substream(p as u64);
                        let a = haar_expect_gaussian(g, &f, n, &s)?;
                        let b = haar_expect_direct(g, &f, n, &s)?;
                        let z = a.z_score(&b);
                        worst = worst.max(z);
                        cells += 1;
                        if z > 3.0 {
                            failures.push(json!({"group": g.to_string(), "k": k, "poly": p, "z": z, "gaussian": a.value, "direct": b.value}));
                        }
                    }
                }
            }
        }
        Ok((
            failures.is_empty(),
            json!({"n_samples": n, "polynomials": cells, "tolerance_se": 3.0, "max_z": worst, "failures": failures}),
        ))
    })
}

/// `E x₁⁴ = 3/(D(D+2))` on SO(D) and χ² moments against Monte Carlo.
pub fn criterion_3(seed: u64, scale: Scale) -> CriterionResult {
    timed(3, "exact moment pins", 60.0, || {
        let n_poly = scale.samples(100_000, 20_000);
        let n_chi = scale.samples(1_000_000, 100_000);
        let root = stream(seed, 3);
        let mut ok = true;
        let mut quartic = Vec::new();
        for d in [4usize, 8, 16] {
            let g = GroupId::so(d)?;
            let f = HomogeneousFunctional::coordinate_power(g, 0, 2)?;
            let est = haar_expect_gaussian(g, &f, n_poly, &root.substream(d as u64))?;
            let exact = 3.0 / (d * (d + 2)) as f64;
            let z = (est.value - exact).abs() / est.std_error;
            ok &= z <= 5.0;
            quartic.push(json!({"D": d, "estimate": est.value, "exact": exact, "z": z}));
        }
        let mut chi = Vec::new();
        for dof in [2u32, 4, 8] {
            let stats = mc_vector(n_chi, 3, &root.substream(100 + dof as u64), |r, out| {
                let g = gaussian_vector(dof as usize, FieldTag::Real, r).expect("dof > 0");
                let s = g.norm_sqr();
                out[0] = s;
                out[1] = s * s;
                out[2] = s * s * s;
            });
            for k in 1..=3u32 {
                let exact = chi_square_moment(dof, k)?;
                let s = &stats[k as usize - 1];
                let z = (s.mean() - exact).abs() / s.std_error();
                ok &= z <= 5.0;
                chi.push(json!({"dof": dof, "k": k, "estimate": s.mean(), "exact": exact, "z": z}));
            }
        }
        Ok((ok, json!({"tolerance_se": 5.0, "quartic": quartic, "chi_square": chi})))
    })
}

/// Expected TV distance to uniform at n = 10 lies in the constant band.
pub fn criterion_4(seed: u64, scale: Scale) -> CriterionResult {
    timed(4, "expected TV distance bands", 600.0, || {
        let root = stream(seed, 4);
        let mut ok = true;
        let mut rows = Vec::new();
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            let e = estimate_expected_tv(kind, 10, 200, &root.substream(gi as u64), SamplingRoute::Pushforward)?;
            ok &= e.in_band_3se;
            rows.push(json!({
                "group": e.group.to_string(), "estimate": e.estimate.value, "se": e.estimate.std_error,
                "M": e.m, "Delta": e.delta, "in_band": e.in_band, "in_band_3se": e.in_band_3se,
            }));
        }
        // Full group elements at n = 8, reported beside the state route.
        let cross_n = scale.samples(200, 50);
        let mut cross = Vec::new();
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            let e = estimate_expected_tv(kind, 8, cross_n, &root.substream(10 + gi as u64), SamplingRoute::GroupElements)?;
            cross.push(json!({"group": e.group.to_string(), "estimate": e.estimate.value, "se": e.estimate.std_error, "in_band_3se": e.in_band_3se}));
        }
        Ok((ok, json!({"n": 10, "n_samples": 200, "route": "pushforward", "bands": rows, "element_route_n8": cross})))
    })
}

/// Empirical tails of a basis-projector functional stay under the Lévy bound.
pub fn criterion_5(seed: u64, scale: Scale) -> CriterionResult {
    timed(5, "Levy bound never violated", 180.0, || {
        let n = scale.samples(10_000, 2_000);
        let root = stream(seed, 5);
        let grid = default_tau_grid();
        let mut ok = true;
        let mut rows = Vec::new();
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            for d in [16usize, 64] {
                let g = group(kind, d)?;
                let f = LipschitzFunctional::basis_projector(g, 0)?;
                let rep = empirical_tail(g, &f, &grid, n, &root.substream((gi * 1000 + d) as u64))?;
                let violations = rep.violations(3.0);
                ok &= violations.is_empty();
                rows.push(json!({
                    "group": g.to_string(), "worst_z": rep.worst_z(), "violations": violations,
                    "empirical_mean": rep.empirical_mean, "exact_mean": 1.0 / g.complex_dim() as f64,
                }));
            }
        }
        Ok((ok, json!({"n_samples": n, "lipschitz": 2.0, "tau_grid": grid, "tolerance_se": 3.0, "cells": rows})))
    })
}

/// Floor added to Monte Carlo standard errors of entries that do not vary.
pub const TWIRL_SE_FLOOR: f64 = 1e-10;

/// Monte Carlo twirls agree with the commutant projection; the projection is
/// idempotent and trace preserving.
pub fn criterion_6(seed: u64, scale: Scale) -> CriterionResult {
    timed(6, "commutant twirl equivalence", 300.0, || {
        let n = scale.samples(100_000, 10_000);
        let inputs_per_cell = scale.samples(10, 4);
        let root = stream(seed, 6);
        let mut ok = true;
        let mut rows = Vec::new();
        for (gi, kind) in GroupKind::ALL.into_iter().enumerate() {
            let g = group(kind, 2)?;
            for k in 1..=2u32 {
                let basis = commutant_basis(g, k)?;
                let size = g.complex_dim().pow(k);
                let mut input_rng = root.substream((gi * 10 + k as usize) as u64);
                let inputs: Vec<CMatrix> = (0..inputs_per_cell).map(|_| random_density_matrix(size, &mut input_rng)).collect();
                let mc = mc_twirl_many(g, k, &inputs, n, &root.substream((gi * 10 + k as usize + 100) as u64))?;
                let mut worst_z = 0.0_f64;
                let mut idempotence = 0.0_f64;
                let mut trace = 0.0_f64;
                for (rho, est) in inputs.iter().zip(&mc) {
                    let t = twirl(rho, &basis)?;
                    let tt = twirl(&t, &basis)?;
                    idempotence = idempotence.max((&tt - &t).camax());
                    trace = trace.max((t.trace() - rho.trace()).norm());
                    worst_z = worst_z.max(est.max_z(&t, TWIRL_SE_FLOOR));
                }
                let cell_ok = worst_z <= 5.0 && idempotence <= 1e-10 && trace <= 1e-10;
                ok &= cell_ok;
                rows.push(json!({
                    "group": g.to_string(), "k": k, "basis_size": basis.len(), "max_z": worst_z,
                    "idempotence_error": idempotence, "trace_error": trace, "passed": cell_ok,
                }));
            }
        }
        Ok((ok, json!({"n_samples": n, "inputs_per_cell": inputs_per_cell, "tolerance_se": 5.0, "se_floor": TWIRL_SE_FLOOR, "cells": rows})))
    })
}

/// Symplectic states reproduce the first two moments of unitary states.
pub fn criterion_7(seed: u64, scale: Scale) -> CriterionResult {
    timed(7, "symplectic states as a state 2-design", 60.0, || {
        let n = scale.samples(100_000, 20_000);
        let root = stream(seed, 7);
        let d = 16usize;
        // Reference second moment from the complex Gaussian route first.
        let su = GroupId::su(d)?;
        let quartic = HomogeneousFunctional::coordinate_power(su, 0, 2)?;
        let oracle = haar_expect_gaussian(su, &quartic, n, &root.substream(0))?;
        let second = 2.0 / (d * (d + 1)) as f64;
        let oracle_z = (oracle.value - second).abs() / oracle.std_error;

        let sp = GroupId::sp(d / 2)?;
        let stats = mc_vector(n, 2 * d, &root.substream(1), |r, out| {
            for (x, p) in sample_state(sp, r).probabilities().into_iter().enumerate() {
                out[x] = p;
                out[d + x] = p * p;
            }
        });
        let first = 1.0 / d as f64;
        let z1 = stats[..d].iter().map(|s| (s.mean() - first).abs() / s.std_error()).fold(0.0, f64::max);
        let z2 = stats[d..].iter().map(|s| (s.mean() - second).abs() / s.std_error()).fold(0.0, f64::max);
        let ok = oracle_z <= 5.0 && z1 <= 5.0 && z2 <= 5.0;
        Ok((
            ok,
            json!({
                "complex_dim": d, "n_samples": n, "tolerance_se": 5.0,
                "gaussian_reference": oracle.value, "reference_exact": second, "reference_z": oracle_z,
                "first_moment_max_z": z1, "second_moment_max_z": z2,
            }),
        ))
    })
}

/// Maximum pairwise fidelity allowed among the sampled SO(1024) states.
pub const MAX_PAIRWISE_FIDELITY: f64 = 0.05;
/// Minimum pairwise trace distance required among the sampled SO(1024) states.
pub const MIN_PAIRWISE_TRACE_DISTANCE: f64 = 0.97;

/// One hundred real random states in dimension 1024 are pairwise nearly orthogonal.
pub fn criterion_8(seed: u64, _scale: Scale) -> CriterionResult {
    timed(8, "pairwise separation of SO(1024) states", 300.0, || {
        let d = 1024usize;
        let n_states = 100usize;
        let rep = crate::complexity::empirical_pairwise_fidelity(GroupId::so(d)?, n_states, &stream(seed, 8))?;
        // Overlaps of independent real unit vectors satisfy D·F ≈ χ²₁, so a union
        // bound over all pairs gives the chance of crossing the fidelity threshold.
        let pairs = (n_states * (n_states - 1) / 2) as f64;
        let chance = pairs * libm::erfc((MAX_PAIRWISE_FIDELITY * d as f64 / 2.0).sqrt());
        let ok = rep.max_fidelity <= MAX_PAIRWISE_FIDELITY && rep.min_trace_distance >= MIN_PAIRWISE_TRACE_DISTANCE;
        Ok((
            ok,
            json!({
                "max_fidelity": rep.max_fidelity, "min_trace_distance": rep.min_trace_distance,
                "mean_fidelity": rep.mean_fidelity, "expected_mean_fidelity": 1.0 / d as f64,
                "threshold_exceedance_union_bound": chance, "relation_error": rep.relation_error,
            }),
        ))
    })
}

/// A closed-form value frozen from an independent 50-digit evaluation.
pub struct Pin {
    pub name: &'static str,
    pub expected: f64,
    pub eval: fn() -> Result<f64>,
}

fn cp(n: u32, r: u32, delta: f64, gate_set_size: u64) -> ComplexityParams {
    ComplexityParams { n, r, delta, gate_set_size }
}

fn dp(k: u32, epsilon: f64) -> DesignParams {
    DesignParams { k, epsilon }
}

fn sq(n: u32, tau: f64, epsilon: f64, beta: f64) -> SqParams {
    SqParams { n, tau, epsilon, beta }
}

fn deviation(epsilon: f64) -> Result<f64> {
    let d = 8.0_f64;
    design_deviation_bound(&DesignDeviationParams {
        group: GroupId::su(8)?,
        k: 4,
        epsilon,
        degree: 1,
        alpha: d * d.sqrt(),
        mean_abs: 1.0,
        delta: 0.5,
        m: 2,
        a: d / 16.0,
    })
}

/// Reference values produced by `tests/oracles/pins.py`.
pub const PINS: &[Pin] = &[
    Pin { name: "measurement_class n=3 r=2 G=2", expected: 1024.0, eval: || Ok(measurement_class_size_bound(&cp(3, 2, 0.5, 2))?.raw_value) },
    Pin { name: "measurement_class n=10 r=5 G=3", expected: 8.0149284864e+10, eval: || Ok(measurement_class_size_bound(&cp(10, 5, 0.5, 3))?.raw_value) },
    Pin {
        name: "low_complexity SU n=10 r=1 delta=0.5 G=2",
        expected: 0.011137456633587131,
        eval: || Ok(low_complexity_prob_bound(GroupKind::SU, &cp(10, 1, 0.5, 2))?.raw_value),
    },
    Pin {
        name: "low_complexity SO n=12 r=3 delta=0.3 G=4",
        expected: 1.5770773529513509e-18,
        eval: || Ok(low_complexity_prob_bound(GroupKind::SO, &cp(12, 3, 0.3, 4))?.raw_value),
    },
    Pin {
        name: "low_complexity Sp n=11 r=2 delta=0.4 G=2",
        expected: 5.7085343524724793e-14,
        eval: || Ok(low_complexity_prob_bound(GroupKind::Sp, &cp(11, 2, 0.4, 2))?.raw_value),
    },
    Pin {
        name: "design_low_complexity SU n=8 r=2 delta=0.1 G=2 k=6 eps=0",
        expected: 82944.0,
        eval: || Ok(design_low_complexity_prob_bound(GroupKind::SU, &cp(8, 2, 0.1, 2), &dp(6, 0.0), MomentOrder::RealThird)?.raw_value),
    },
    Pin {
        name: "design_low_complexity SO n=10 r=1 delta=0.2 G=2 k=12 eps=1e-3",
        expected: 5676.4716858608623,
        eval: || Ok(design_low_complexity_prob_bound(GroupKind::SO, &cp(10, 1, 0.2, 2), &dp(12, 1e-3), MomentOrder::RealThird)?.raw_value),
    },
    Pin {
        name: "design_low_complexity Sp n=12 r=2 delta=0.2 G=2 k=9 eps=1e-6",
        expected: 1139.0806740211164,
        eval: || Ok(design_low_complexity_prob_bound(GroupKind::Sp, &cp(12, 2, 0.2, 2), &dp(9, 1e-6), MomentOrder::RealThird)?.raw_value),
    },
    Pin {
        name: "design_low_complexity_integer Sp n=10 r=1 delta=0.2 G=2 k=7 eps=1e-6",
        expected: 215.0551215657019,
        eval: || Ok(design_low_complexity_prob_bound(GroupKind::Sp, &cp(10, 1, 0.2, 2), &dp(7, 1e-6), MomentOrder::IntegerFloor)?.raw_value),
    },
    Pin { name: "packing SO D=1024 Delta=0.5", expected: 1.1741924548876449, eval: || Ok(packing_count(GroupKind::SO, 1024.0, 0.5)?.raw_value) },
    Pin { name: "packing SU D=4096 Delta=0.3", expected: 1.5485292954953712, eval: || Ok(packing_count(GroupKind::SU, 4096.0, 0.3)?.raw_value) },
    Pin { name: "packing Sp D=2048 Delta=0.6", expected: 2.3577303258741288e+13, eval: || Ok(packing_count(GroupKind::Sp, 2048.0, 0.6)?.raw_value) },
    Pin {
        name: "design_packing SU D=256 Delta=0.5 k=8 eps=0",
        expected: 6.1450750240145968,
        eval: || Ok(design_packing_count(GroupKind::SU, 256.0, 0.5, &dp(8, 0.0))?.raw_value),
    },
    Pin {
        name: "design_packing SO D=1024 Delta=0.4 k=5 eps=1e-4",
        expected: 8.0376018248740381,
        eval: || Ok(design_packing_count(GroupKind::SO, 1024.0, 0.4, &dp(5, 1e-4))?.raw_value),
    },
    Pin { name: "sq SU n=10 tau=0.1 eps=0.1 beta=0.5", expected: -0.53089919358104192, eval: || Ok(sq_lower_bound(GroupKind::SU, &sq(10, 0.1, 0.1, 0.5))?.raw_value) },
    Pin { name: "sq SO n=12 tau=0.05 eps=0.1 beta=0.9", expected: -0.38038932778035442, eval: || Ok(sq_lower_bound(GroupKind::SO, &sq(12, 0.05, 0.1, 0.9))?.raw_value) },
    Pin { name: "sq Sp n=14 tau=0.04 eps=0.2 beta=0.7", expected: 0.801785063619404, eval: || Ok(sq_lower_bound(GroupKind::Sp, &sq(14, 0.04, 0.2, 0.7))?.raw_value) },
    Pin { name: "design_deviation SU D=8 k=4 eps=0 K=1 m=2 delta=0.5 a=D/16", expected: 512.0, eval: || deviation(0.0) },
    Pin { name: "design_deviation SU D=8 k=4 eps=0.01 K=1 m=2 delta=0.5 a=D/16", expected: 524.17376795624349, eval: || deviation(0.01) },
    Pin { name: "levy SO D=16 L=2 tau=0.3", expected: 1.922780240490163, eval: || levy_bound(GroupId::so(16)?, 2.0, 0.3) },
];

/// Relative tolerance for [`PINS`].
pub const PIN_TOLERANCE: f64 = 1e-10;

/// A call that must fail with a domain error and one just inside the window that must succeed.
struct DomainCheck {
    name: &'static str,
    outside: fn() -> Result<()>,
    inside: fn() -> Result<()>,
}

const DOMAIN_CHECKS: &[DomainCheck] = &[
    DomainCheck {
        name: "delta window of the design bound",
        outside: || design_low_complexity_prob_bound(GroupKind::SU, &cp(8, 2, 0.497, 2), &dp(6, 0.0), MomentOrder::RealThird).map(drop),
        inside: || design_low_complexity_prob_bound(GroupKind::SU, &cp(8, 2, 0.495, 2), &dp(6, 0.0), MomentOrder::RealThird).map(drop),
    },
    DomainCheck {
        name: "design order k > 3",
        outside: || design_low_complexity_prob_bound(GroupKind::SU, &cp(8, 2, 0.1, 2), &dp(3, 0.0), MomentOrder::RealThird).map(drop),
        inside: || design_low_complexity_prob_bound(GroupKind::SU, &cp(8, 2, 0.1, 2), &dp(4, 0.0), MomentOrder::RealThird).map(drop),
    },
    DomainCheck {
        name: "xi_G >= 0 in the query bound",
        outside: || sq_lower_bound(GroupKind::SU, &sq(10, 0.1, 0.26, 0.5)).map(drop),
        inside: || sq_lower_bound(GroupKind::SU, &sq(10, 0.1, 0.25, 0.5)).map(drop),
    },
    DomainCheck {
        name: "Levy constant of SO(D) needs D > 2",
        outside: || levy_constant(GroupId::so(2)?).map(drop),
        inside: || levy_constant(GroupId::so(3)?).map(drop),
    },
    DomainCheck {
        name: "design packing needs (2-Delta)Delta > 1/D",
        outside: || design_packing_count(GroupKind::SU, 4.0, 0.1, &dp(8, 0.0)).map(drop),
        inside: || design_packing_count(GroupKind::SU, 4.0, 0.2, &dp(8, 0.0)).map(drop),
    },
];

/// Closed-form calculators reproduce the high-precision pins, and domain
/// errors fire exactly outside the validity windows.
pub fn criterion_9(_seed: u64, _scale: Scale) -> CriterionResult {
    timed(9, "closed-form calculator pins", 1.0, || {
        let mut ok = PINS.len() >= 12;
        let mut pins = Vec::new();
        for pin in PINS {
            let (value, rel) = match (pin.eval)() {
                Ok(v) => (Some(v), ((v - pin.expected) / pin.expected).abs()),
                Err(_) => (None, f64::INFINITY),
            };
            ok &= rel <= PIN_TOLERANCE;
            pins.push(json!({"name": pin.name, "expected": pin.expected, "value": value, "relative_error": rel}));
        }
        let mut domains = Vec::new();
        for check in DOMAIN_CHECKS {
            let outside = matches!((check.outside)(), Err(Error::Domain(_)));
            let inside = (check.inside)().is_ok();
            ok &= outside && inside;
            domains.push(json!({"name": check.name, "raised_outside": outside, "accepted_inside": inside}));
        }
        Ok((ok, json!({"tolerance": PIN_TOLERANCE, "pins": pins, "domain_checks": domains})))
    })
}

pub type CriterionFn = fn(u64, Scale) -> CriterionResult;

pub const CRITERIA: [CriterionFn; 9] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
];

/// Runs every criterion, calling `on_result` as each finishes.
pub fn verify_all_with(seed: u64, scale: Scale, mut on_result: impl FnMut(&CriterionResult)) -> VerifyReport {
    let criteria: Vec<CriterionResult> = CRITERIA
        .iter()
        .map(|c| {
            let r = c(seed, scale);
            on_result(&r);
            r
        })
        .collect();
    VerifyReport {
        seed,
        scale,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

pub fn verify_all(seed: u64, scale: Scale) -> VerifyReport {
    verify_all_with(seed, scale, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pins_hold() {
        let r = criterion_9(0, Scale::Quick);
        assert!(r.passed, "{}", serde_json::to_string_pretty(&r.details).unwrap());
        assert!(PINS.len() >= 12);
    }

    #[test]
    fn quick_criteria_are_deterministic() {
        let a = criterion_3(5, Scale::Quick);
        let b = criterion_3(5, Scale::Quick);
        assert_eq!(a.details, b.details);
        assert!(a.passed);
    }

    #[test]
    fn scale_parses() {
        assert_eq!("Quick".parse::<Scale>().unwrap(), Scale::Quick);
        assert!("medium".parse::<Scale>().is_err());
    }
}
