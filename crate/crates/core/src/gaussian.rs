//! Haar moments through Gaussian integration.
//!
//! For a function `f` homogeneous of degree `2k` on the state space of a group,
//! the Haar average over normalized states equals the average of `f` over
//! unnormalized Gaussian vectors divided by `E‖g‖^{2k}`, the `k`-th moment of a
//! χ² variable with as many degrees of freedom as real Gaussian components
//! (D for SO, 2D for SU, 4D for Sp). [`haar_expect_direct`] is the brute-force
//! oracle that averages over sampled states instead.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;

use crate::haar::{sample_state, GroupId, GroupKind};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{ks_two_sample, mc_vector, pearson, sharded, KsResult, RunningStats};
use crate::numerics::{gaussian_vector, FieldTag};
use crate::{Error, Result};

/// `E[X^k]` for `X ~ χ²_dof`, i.e. `2^k Γ(k + dof/2) / Γ(dof/2)`.
pub fn chi_square_moment(dof: u32, k: u32) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidParameter("χ² needs dof ≥ 1".into()));
    }
    let log = chi_square_log_moment(dof, k);
    if log > f64::MAX.ln() {
        return Err(Error::Range(format!("χ²_{dof} moment of order {k} overflows (ln = {log:.1})")));
    }
    // The rising product Π (dof + 2j) is exact for integer inputs.
    Ok((0..k).map(|j| (dof + 2 * j) as f64).product())
}

/// `ln E[X^k]` through log-Γ.
pub fn chi_square_log_moment(dof: u32, k: u32) -> f64 {
    let h = dof as f64 / 2.0;
    k as f64 * std::f64::consts::LN_2 + libm::lgamma(k as f64 + h) - libm::lgamma(h)
}

/// Number of real Gaussian components of a state vector for `group`.
pub fn real_components(group: GroupId) -> u32 {
    (group.dim * group.field().components()) as u32
}

/// `k! 2^k binom(base + k − 1, k)` with base = D/2, D, 2D for SO, SU, Sp.
pub fn normalization_constant(group: GroupId, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("normalization needs k ≥ 1".into()));
    }
    chi_square_moment(real_components(group), k)
}

type EvalFn = dyn Fn(&[Complex64]) -> f64 + Send + Sync;

/// A real-valued function on complex amplitude vectors that is homogeneous of
/// even degree `2k`. SO inputs are real vectors promoted to complex and Sp inputs
/// are embedded complex 2D-vectors.
#[derive(Clone)]
pub struct HomogeneousFunctional {
    name: String,
    field: FieldTag,
    dim: usize,
    degree_2k: u32,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for HomogeneousFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousFunctional")
            .field("name", &self.name)
            .field("field", &self.field)
            .field("dim", &self.dim)
            .field("degree_2k", &self.degree_2k)
            .finish()
    }
}

pub const HOMOGENEITY_PROBES: usize = 8;
const HOMOGENEITY_TOL: f64 = 1e-8;

impl HomogeneousFunctional {
    /// Registers `eval` for states of `group`, checking homogeneity on random
    /// probes `f(a·x) = |a|^{2k} f(x)` with real `a` for SO and complex `a` otherwise.
    pub fn new<F>(name: impl Into<String>, group: GroupId, degree_2k: u32, eval: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> f64 + Send + Sync + 'static,
    {
        if degree_2k == 0 || !degree_2k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("degree {degree_2k} must be even and positive")));
        }
        let f = Self {
            name: name.into(),
            field: group.field(),
            dim: group.complex_dim(),
            degree_2k,
            eval: Arc::new(eval),
        };
        let mut rng = RngStream::new(0x686f_6d6f, degree_2k as u64);
        let mut worst = 0.0_f64;
        for _ in 0..HOMOGENEITY_PROBES {
            let x = gaussian_vector(group.dim, group.field(), &mut rng)?.to_complex();
            let modulus = Uniform::new(0.5, 2.0).expect("valid range").sample(&mut rng);
            let a = match group.kind {
                GroupKind::SO => Complex64::new(if rng.random::<bool>() { modulus } else { -modulus }, 0.0),
                _ => Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU)),
            };
            let ax: Vec<Complex64> = x.iter().map(|z| a * z).collect();
            let fx = f.eval(&x);
            let scale = modulus.powi(degree_2k as i32);
            let deviation = (f.eval(&ax) - scale * fx).abs() / (1.0 + scale * fx.abs());
            if !deviation.is_finite() {
                return Err(Error::NotHomogeneous {
                    degree: degree_2k,
                    deviation: f64::INFINITY,
                });
            }
            worst = worst.max(deviation);
        }
        if worst > HOMOGENEITY_TOL {
            return Err(Error::NotHomogeneous {
                degree: degree_2k,
                deviation: worst,
            });
        }
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_2k(&self) -> u32 {
        self.degree_2k
    }

    pub fn k(&self) -> u32 {
        self.degree_2k / 2
    }

    pub fn eval(&self, x: &[Complex64]) -> f64 {
        (self.eval)(x)
    }

    /// `|x_i|^{2k}`.
    pub fn coordinate_power(group: GroupId, index: usize, k: u32) -> Result<Self> {
        if index >= group.complex_dim() {
            return Err(Error::InvalidDimension(format!("coordinate {index} outside {group}")));
        }
        Self::new(format!("|x_{index}|^{}", 2 * k), group, 2 * k, move |x| x[index].norm_sqr().powi(k as i32))
    }
}

/// One term `c · Π z_{a_j} · Π conj(z_{b_j})` of a balanced polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monomial {
    pub coefficient: (f64, f64),
    pub plain: Vec<usize>,
    pub conjugated: Vec<usize>,
}

/// A random real polynomial homogeneous of degree `2k`.
///
/// For SO it is `Σ c Π x_{i_j}` over `2k` real coordinates. For SU and Sp it is
/// `Re Σ c Π z_a Π z̄_b` with `k` plain and `k` conjugated factors, which is
/// invariant under complex phases and so homogeneous in `|a|`.
pub fn random_homogeneous_polynomial<R: Rng + ?Sized>(
    group: GroupId,
    k: u32,
    terms: usize,
    rng: &mut R,
) -> Result<(HomogeneousFunctional, Vec<Monomial>)> {
    if k == 0 || terms == 0 {
        return Err(Error::InvalidParameter("polynomial needs k ≥ 1 and at least one term".into()));
    }
    let n = group.complex_dim();
    let real = group.kind == GroupKind::SO;
    let monomials: Vec<Monomial> = (0..terms)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            let (np, nc) = if real { (2 * k, 0) } else { (k, k) };
            Monomial {
                coefficient: (re, im),
                plain: (0..np).map(|_| rng.random_range(0..n)).collect(),
                conjugated: (0..nc).map(|_| rng.random_range(0..n)).collect(),
            }
        })
        .collect();
    let terms_for_eval = monomials.clone();
    let f = HomogeneousFunctional::new(format!("random degree-{} polynomial", 2 * k), group, 2 * k, move |x| {
        terms_for_eval
            .iter()
            .map(|m| {
                let mut acc = Complex64::new(m.coefficient.0, m.coefficient.1);
                for &i in &m.plain {
                    acc *= x[i];
                }
                for &i in &m.conjugated {
                    acc *= x[i].conj();
                }
                acc.re
            })
            .sum()
    })?;
    Ok((f, monomials))
}

/// A Monte Carlo moment estimate. `normalization` is the constant the raw
/// Gaussian mean was divided by (1 for direct estimates).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub normalization: f64,
}

impl MomentEstimate {
    fn from_stats(stats: &RunningStats, normalization: f64) -> Self {
        Self {
            value: stats.mean() / normalization,
            std_error: stats.std_error() / normalization,
            n_samples: stats.count() as usize,
            normalization,
        }
    }

    /// `|a − b| / √(σ_a² + σ_b²)`; infinite when both errors vanish and the
    /// values differ.
    pub fn z_score(&self, other: &MomentEstimate) -> f64 {
        let diff = (self.value - other.value).abs();
        let se = self.std_error.hypot(other.std_error);
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// JSON record for an estimate.
#[derive(Clone, Debug, Serialize)]
pub struct MomentRecord {
    pub group: GroupKind,
    #[serde(rename = "D")]
    pub dim: usize,
    pub k: u32,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub normalization: f64,
}

impl MomentRecord {
    pub fn new(group: GroupId, k: u32, estimate: &MomentEstimate) -> Self {
        Self {
            group: group.kind,
            dim: group.dim,
            k,
            value: estimate.value,
            std_error: estimate.std_error,
            n_samples: estimate.n_samples,
            normalization: estimate.normalization,
        }
    }
}

fn check_match(group: GroupId, f: &HomogeneousFunctional) -> Result<()> {
    if f.field() != group.field() || f.dim() != group.complex_dim() {
        return Err(Error::Contract(format!(
            "functional '{}' is registered for {:?} vectors of length {}, but {group} states are {:?} of length {}",
            f.name(),
            f.field(),
            f.dim(),
            group.field(),
            group.complex_dim()
        )));
    }
    Ok(())
}

/// Haar expectation of `f` as (Gaussian mean of `f`) / `normalization_constant`.
///
/// Draws consume `rng` exactly as [`haar_expect_direct`] does, so calling both
/// with the same stream evaluates them on the same Gaussian vectors (the direct
/// route normalizes them first).
pub fn haar_expect_gaussian(group: GroupId, f: &HomogeneousFunctional, n_samples: usize, rng: &RngStream) -> Result<MomentEstimate> {
    check_match(group, f)?;
    let c = normalization_constant(group, f.k())?;
    let field = group.field();
    let stats = mc_vector(n_samples, 1, rng, |r, out| {
        let g = gaussian_vector(group.dim, field, r).expect("group dims are positive");
        out[0] = f.eval(&g.to_complex());
    });
    Ok(MomentEstimate::from_stats(&stats[0], c))
}

/// Direct Monte Carlo mean of `f` over Haar-random states.
pub fn haar_expect_direct(group: GroupId, f: &HomogeneousFunctional, n_samples: usize, rng: &RngStream) -> Result<MomentEstimate> {
    check_match(group, f)?;
    let stats = mc_vector(n_samples, 1, rng, |r, out| {
        out[0] = f.eval(&sample_state(group, r).amplitudes());
    });
    Ok(MomentEstimate::from_stats(&stats[0], 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub dof: u32,
    pub n_samples: usize,
    /// Pearson correlation between ‖g‖ and g₁/‖g‖.
    pub correlation: f64,
    /// KS test of g₁/‖g‖ for ‖g‖ below versus above its median.
    pub conditional_ks: Option<KsResult>,
    /// Set for dof = 1, where the angular statistic is ±1.
    pub degenerate: bool,
}

/// Checks independence of the radius and direction of a standard Gaussian vector.
pub fn radial_angular_independence(dof: u32, n_samples: usize, rng: &RngStream) -> Result<IndependenceReport> {
    if dof == 0 {
        return Err(Error::InvalidParameter("dof must be ≥ 1".into()));
    }
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!("independence check needs ≥ 10⁴ samples, got {n_samples}")));
    }
    let d = dof as usize;
    let draws: Vec<(f64, f64)> = sharded(n_samples, rng, |count, r| {
        (0..count)
            .map(|_| {
                let g = gaussian_vector(d, FieldTag::Real, r).expect("dof ≥ 1");
                let radius = g.norm_sqr().sqrt();
                (radius, g.components()[0] / radius)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let (radii, angles): (Vec<f64>, Vec<f64>) = draws.iter().copied().unzip();
    let correlation = pearson(&radii, &angles);
    if dof == 1 {
        return Ok(IndependenceReport {
            dof,
            n_samples,
            correlation,
            conditional_ks: None,
            degenerate: true,
        });
    }
    let mut sorted = radii.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let (low, high): (Vec<(f64, f64)>, Vec<(f64, f64)>) = draws.iter().partition(|(r, _)| *r < median);
    let low: Vec<f64> = low.into_iter().map(|p| p.1).collect();
    let high: Vec<f64> = high.into_iter().map(|p| p.1).collect();
    Ok(IndependenceReport {
        dof,
        n_samples,
        correlation,
        conditional_ks: Some(ks_two_sample(&low, &high)),
        degenerate: false,
    })
}
