//! First- and second-moment commutants and the twirling channels they define.
//!
//! The twirl `ρ ↦ E_U U^{⊗k} ρ U^{†⊗k}` is the orthogonal projection onto the
//! commutant of `{U^{⊗k}}`, so with a Hilbert–Schmidt orthonormal basis `B_η`
//! it equals `Σ_η Tr(B_η† ρ) B_η`. Bases are built from spanning operators by
//! Gram–Schmidt in a fixed listing order; operators that are linearly dependent
//! on earlier ones are dropped.
//!
//! Spanning sets (on `ℂ^n ⊗ ℂ^n`, with `|M⟩ = Σ M_ij |ij⟩`):
//!
//! | group | k = 1 | k = 2 |
//! |-------|-------|-------|
//! | SU(D) | 𝕀 | 𝕀, F |
//! | SO(D), D ≥ 3 | 𝕀 | 𝕀, F, \|𝕀⟩⟨𝕀\| (plus the Hodge operator for D = 4) |
//! | SO(2) | 𝕀, iJ | 𝕀, F, \|𝕀⟩⟨𝕀\|, \|J⟩⟨J\|, \|𝕀⟩⟨J\| ± h.c., iJ⊗𝕀, 𝕀⊗iJ |
//! | Sp(D) | 𝕀 | 𝕀, F, \|Ω⟩⟨Ω\| |
//!
//! Here `F` is the flip, `J = [[0, 1], [-1, 0]]` and `Ω` is the symplectic form
//! of the embedding. SO(2) is abelian and SO(4) preserves the Levi-Civita
//! tensor, which is why both need more than the three orthogonal-group operators.

use num_complex::Complex64;
use serde::Serialize;

use crate::haar::{sample_group_element, GroupElement, GroupId, GroupKind};
use crate::numerics::quaternion::symplectic_form;
use crate::numerics::rng::RngStream;
use crate::numerics::stats::mc_vector;
use crate::numerics::{hs_inner, kron_power, operator_norm, CMatrix};
use crate::{Error, Result};

/// Largest `n^k` (complex dimension to the power k) handled densely.
pub const MAX_TENSOR_DIM: usize = 64;

const DEPENDENCE_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A Hilbert–Schmidt orthonormal, Hermitian basis of a commutant.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub group: GroupId,
    pub order_k: u32,
    pub elements: Vec<CMatrix>,
    /// Name of the spanning operator each element was orthonormalized from.
    pub labels: Vec<String>,
}

impl CommutantBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Side length of the matrices in the basis.
    pub fn space_dim(&self) -> usize {
        self.group.complex_dim().pow(self.order_k)
    }

    /// Largest |Tr(Bᵢ† Bⱼ) − δᵢⱼ|.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner(a, b) - c(target)).norm());
            }
        }
        worst
    }

    /// Largest entrywise |[V^{⊗k}, B]| over the basis.
    pub fn commutator_error(&self, v: &GroupElement) -> f64 {
        let vk = kron_power(&v.to_complex(), self.order_k as usize);
        self.elements
            .iter()
            .map(|b| (&vk * b - b * &vk).camax())
            .fold(0.0, f64::max)
    }
}

fn gram_schmidt(group: GroupId, order_k: u32, spanning: Vec<(String, CMatrix)>) -> CommutantBasis {
    let mut elements: Vec<CMatrix> = Vec::new();
    let mut labels = Vec::new();
    for (label, m) in spanning {
        let scale = hs_inner(&m, &m).re.sqrt();
        let mut r = m;
        for b in &elements {
            let proj = hs_inner(b, &r);
            r -= b * proj;
        }
        let norm = hs_inner(&r, &r).re.sqrt();
        if norm > DEPENDENCE_TOL * scale.max(1.0) {
            elements.push(r / c(norm));
            labels.push(label);
        }
    }
    CommutantBasis {
        group,
        order_k,
        elements,
        labels,
    }
}

fn check_size(group: GroupId, k: u32) -> Result<usize> {
    let n = group.complex_dim();
    match n.checked_pow(k) {
        Some(size) if size <= MAX_TENSOR_DIM => Ok(size),
        _ => Err(Error::Resource(format!(
            "{group} with k = {k} needs {n}^{k}-dimensional operators; limit is {MAX_TENSOR_DIM}"
        ))),
    }
}

fn j2() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)])
}

fn vectorize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n * n, 1, |idx, _| m[(idx / n, idx % n)])
}

fn outer(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b.adjoint()
}

/// The flip `F|ab⟩ = |ba⟩` on `ℂ^n ⊗ ℂ^n`.
pub fn flip(n: usize) -> CMatrix {
    let mut f = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            f[(b * n + a, a * n + b)] = c(1.0);
        }
    }
    f
}

fn permutation_sign(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `Σ ε_abcd |ab⟩⟨cd|` on `ℂ^4 ⊗ ℂ^4`.
fn hodge_operator() -> CMatrix {
    let mut e = CMatrix::zeros(16, 16);
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    e[(a * 4 + b, cc * 4 + d)] = c(permutation_sign([a, b, cc, d]));
                }
            }
        }
    }
    e
}

fn spanning_set(group: GroupId, k: u32) -> Vec<(String, CMatrix)> {
    let n = group.complex_dim();
    let id = CMatrix::identity(n, n);
    match k {
        1 => {
            let mut s = vec![("I".to_string(), id)];
            if group.kind == GroupKind::SO && n == 2 {
                s.push(("iJ".into(), j2() * I));
            }
            s
        }
        _ => {
            let id2 = CMatrix::identity(n * n, n * n);
            let mut s = vec![("I".to_string(), id2), ("F".to_string(), flip(n))];
            match group.kind {
                GroupKind::SU => {}
                GroupKind::SO => {
                    let vi = vectorize(&id);
                    s.push(("|I><I|".into(), outer(&vi, &vi)));
                    if n == 2 {
                        let vj = vectorize(&j2());
                        let ij = outer(&vi, &vj);
                        s.push(("|J><J|".into(), outer(&vj, &vj)));
                        s.push(("|I><J|+|J><I|".into(), &ij + ij.adjoint()));
                        s.push(("i(|I><J|-|J><I|)".into(), (&ij - ij.adjoint()) * I));
                        s.push(("iJ⊗I".into(), (j2() * I).kronecker(&id)));
                        s.push(("I⊗iJ".into(), id.kronecker(&(j2() * I))));
                    }
                    if n == 4 {
                        s.push(("Hodge".into(), hodge_operator()));
                    }
                }
                GroupKind::Sp => {
                    let vo = vectorize(&symplectic_form(group.dim));
                    s.push(("|Ω><Ω|".into(), outer(&vo, &vo)));
                }
            }
            s
        }
    }
}

/// Orthonormal basis of the first-moment commutant.
pub fn first_moment_basis(group: GroupId) -> CommutantBasis {
    gram_schmidt(group, 1, spanning_set(group, 1))
}

/// Orthonormal basis of the second-moment commutant.
pub fn second_moment_basis(group: GroupId) -> Result<CommutantBasis> {
    check_size(group, 2)?;
    Ok(gram_schmidt(group, 2, spanning_set(group, 2)))
}

/// Basis of order 1 or 2.
pub fn commutant_basis(group: GroupId, k: u32) -> Result<CommutantBasis> {
    match k {
        1 => Ok(first_moment_basis(group)),
        2 => second_moment_basis(group),
        _ => Err(Error::InvalidParameter(format!("commutants are available for k ∈ {{1, 2}}, got {k}"))),
    }
}

/// Projection of `rho` onto the span of `basis`.
pub fn twirl(rho: &CMatrix, basis: &CommutantBasis) -> Result<CMatrix> {
    let n = basis.space_dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Contract(format!(
            "{}×{} input does not match the {n}×{n} commutant of {} at k = {}",
            rho.nrows(),
            rho.ncols(),
            basis.group,
            basis.order_k
        )));
    }
    let mut out = CMatrix::zeros(n, n);
    for b in &basis.elements {
        out += b * hs_inner(b, rho);
    }
    Ok(out)
}

/// The first-moment twirl. Equal to `Tr(ρ) 𝕀/D` except for SO(2), whose
/// abelian action also keeps the `iJ` component of complex inputs.
pub fn first_moment_channel(group: GroupId, rho: &CMatrix) -> Result<CMatrix> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::Contract(format!("input is {}×{}, not square", rho.nrows(), rho.ncols())));
    }
    twirl(rho, &first_moment_basis(group))
}

/// Monte Carlo twirl with entrywise standard errors (real and imaginary parts).
#[derive(Clone, Debug)]
pub struct McTwirl {
    pub mean: CMatrix,
    pub std_error_re: nalgebra::DMatrix<f64>,
    pub std_error_im: nalgebra::DMatrix<f64>,
    pub n_samples: usize,
}

impl McTwirl {
    /// Largest entrywise |mean − target| / SE, with `floor` added to each SE.
    pub fn max_z(&self, target: &CMatrix, floor: f64) -> f64 {
        let mut worst = 0.0_f64;
        for (idx, t) in target.iter().enumerate() {
            let m = self.mean.as_slice()[idx];
            let zr = (m.re - t.re).abs() / (self.std_error_re.as_slice()[idx] + floor);
            let zi = (m.im - t.im).abs() / (self.std_error_im.as_slice()[idx] + floor);
            worst = worst.max(zr).max(zi);
        }
        worst
    }

    /// Largest entrywise |mean − target|.
    pub fn max_deviation(&self, target: &CMatrix) -> f64 {
        (&self.mean - target).camax()
    }
}

/// Monte Carlo twirls of several inputs, sharing the sampled group elements.
pub fn mc_twirl_many(group: GroupId, k: u32, inputs: &[CMatrix], n_samples: usize, rng: &RngStream) -> Result<Vec<McTwirl>> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("Monte Carlo twirl supports k ∈ {{1, 2}}, got {k}")));
    }
    let n = check_size(group, k)?;
    for rho in inputs {
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Contract(format!("inputs must be {n}×{n}")));
        }
    }
    let block = 2 * n * n;
    let stats = mc_vector(n_samples, block * inputs.len(), rng, |r, out| {
        let u = sample_group_element(group, r).to_complex();
        let uk = kron_power(&u, k as usize);
        let uk_adj = uk.adjoint();
        for (i, rho) in inputs.iter().enumerate() {
            let y = &uk * rho * &uk_adj;
            let dst = &mut out[i * block..(i + 1) * block];
            for (j, z) in y.iter().enumerate() {
                dst[2 * j] = z.re;
                dst[2 * j + 1] = z.im;
            }
        }
    });
    Ok((0..inputs.len())
        .map(|i| {
            let s = &stats[i * block..(i + 1) * block];
            McTwirl {
                mean: CMatrix::from_fn(n, n, |r, col| {
                    let j = col * n + r;
                    Complex64::new(s[2 * j].mean(), s[2 * j + 1].mean())
                }),
                std_error_re: nalgebra::DMatrix::from_fn(n, n, |r, col| s[2 * (col * n + r)].std_error()),
                std_error_im: nalgebra::DMatrix::from_fn(n, n, |r, col| s[2 * (col * n + r) + 1].std_error()),
                n_samples,
            }
        })
        .collect())
}

/// Monte Carlo average of `U^{⊗k} ρ U^{†⊗k}` over Haar-random `U`.
pub fn mc_twirl(group: GroupId, k: u32, rho: &CMatrix, n_samples: usize, rng: &RngStream) -> Result<McTwirl> {
    Ok(mc_twirl_many(group, k, std::slice::from_ref(rho), n_samples, rng)?.remove(0))
}

/// Operator-norm distance between the empirical twirl over `ensemble` and the
/// exact twirl of `reference`.
pub fn design_moment_deviation(ensemble: &[GroupElement], reference: GroupId, k: u32, rho: &CMatrix) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::Contract("ensemble is empty".into()));
    }
    let basis = commutant_basis(reference, k)?;
    let exact = twirl(rho, &basis)?;
    let n = reference.complex_dim();
    let mut empirical = CMatrix::zeros(exact.nrows(), exact.ncols());
    for v in ensemble {
        let u = v.to_complex();
        if u.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "ensemble element acts on ℂ^{}, reference {reference} on ℂ^{n}",
                u.nrows()
            )));
        }
        let uk = kron_power(&u, k as usize);
        empirical += &uk * rho * uk.adjoint();
    }
    empirical /= c(ensemble.len() as f64);
    Ok(operator_norm(&(empirical - exact)))
}

/// Summary of a commutant basis for reports.
#[derive(Clone, Debug, Serialize)]
pub struct BasisSummary {
    pub group: GroupId,
    pub order_k: u32,
    pub size: usize,
    pub labels: Vec<String>,
    pub orthonormality_error: f64,
}

impl From<&CommutantBasis> for BasisSummary {
    fn from(b: &CommutantBasis) -> Self {
        Self {
            group: b.group,
            order_k: b.order_k,
            size: b.len(),
            labels: b.labels.clone(),
            orthonormality_error: b.orthonormality_error(),
        }
    }
}

/// A random density matrix `G G† / Tr(G G†)` with complex Ginibre `G`.
pub fn random_density_matrix<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    use rand_distr::StandardNormal;
    let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}
