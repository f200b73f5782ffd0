//! Field-generic dense linear algebra, Gaussian draws, norms and distances.

pub mod quaternion;
pub mod rng;
pub mod stats;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use quaternion::QuaternionMatrix;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Tolerance on the 2-norm for "unit vector" preconditions.
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Real,
    Complex,
    Quaternion,
}

impl FieldTag {
    /// Real components per scalar: 1, 2 or 4.
    pub fn components(self) -> usize {
        match self {
            FieldTag::Real => 1,
            FieldTag::Complex => 2,
            FieldTag::Quaternion => 4,
        }
    }
}

/// A vector over ℝ, ℂ or ℍ stored as interleaved real components.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeVector {
    field: FieldTag,
    components: Vec<f64>,
}

impl AmplitudeVector {
    pub fn new(field: FieldTag, components: Vec<f64>) -> Result<Self> {
        let width = field.components();
        if components.is_empty() || !components.len().is_multiple_of(width) {
            return Err(Error::InvalidDimension(format!(
                "{} components cannot form a nonempty {:?} vector",
                components.len(),
                field
            )));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { field, components })
    }

    pub fn from_real(xs: Vec<f64>) -> Result<Self> {
        Self::new(FieldTag::Real, xs)
    }

    pub fn from_complex(zs: &[Complex64]) -> Result<Self> {
        Self::new(FieldTag::Complex, zs.iter().flat_map(|z| [z.re, z.im]).collect())
    }

    /// Computational basis vector `|index⟩` over ℝ or ℂ.
    pub fn basis(field: FieldTag, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidDimension(format!("basis index {index} ≥ {dim}")));
        }
        let width = field.components();
        let mut c = vec![0.0; dim * width];
        c[index * width] = 1.0;
        Self::new(field, c)
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.components.len() / self.field.components()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Squared 2-norm (sum of squares of all real components).
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            field: self.field,
            components: self.components.iter().map(|x| x * s).collect(),
        }
    }

    pub fn quaternions(&self) -> Option<Vec<quaternion::Quaternion>> {
        (self.field == FieldTag::Quaternion).then(|| {
            self.components
                .chunks_exact(4)
                .map(|c| quaternion::Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect()
        })
    }

    /// Complex amplitudes. Quaternionic vectors use the interleaved embedding of
    /// [`quaternion`] and therefore have length `2·dim`.
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self.field {
            FieldTag::Real => self.components.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            FieldTag::Complex => self
                .components
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
            FieldTag::Quaternion => quaternion::embed_vector(&self.quaternions().unwrap_or_default()),
        }
    }
}

/// Dense matrix over one of the three fields.
#[derive(Clone, Debug, PartialEq)]
pub enum DenseMatrix {
    Real(RMatrix),
    Complex(CMatrix),
    Quaternion(QuaternionMatrix),
}

impl DenseMatrix {
    pub fn field(&self) -> FieldTag {
        match self {
            DenseMatrix::Real(_) => FieldTag::Real,
            DenseMatrix::Complex(_) => FieldTag::Complex,
            DenseMatrix::Quaternion(_) => FieldTag::Quaternion,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            DenseMatrix::Real(m) => m.nrows(),
            DenseMatrix::Complex(m) => m.nrows(),
            DenseMatrix::Quaternion(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            DenseMatrix::Real(m) => m.ncols(),
            DenseMatrix::Complex(m) => m.ncols(),
            DenseMatrix::Quaternion(m) => m.cols(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            DenseMatrix::Real(m) => m.iter().all(|x| x.is_finite()),
            DenseMatrix::Complex(m) => m.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            DenseMatrix::Quaternion(m) => m.is_finite(),
        }
    }

    /// Complex form; quaternionic matrices are embedded (doubling both sizes).
    pub fn to_complex(&self) -> CMatrix {
        match self {
            DenseMatrix::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            DenseMatrix::Complex(m) => m.clone(),
            DenseMatrix::Quaternion(m) => m.to_complex(),
        }
    }

    fn singular_values(&self) -> Vec<f64> {
        match self {
            DenseMatrix::Real(m) => m.clone().singular_values().iter().copied().collect(),
            DenseMatrix::Complex(m) => m.clone().singular_values().iter().copied().collect(),
            DenseMatrix::Quaternion(m) => {
                // Each quaternionic singular value appears twice in the embedding.
                let mut s: Vec<f64> = m.to_complex().singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                s.into_iter().step_by(2).collect()
            }
        }
    }
}

/// Independent standard normal real components: `dim` scalars over `field`.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, field: FieldTag, rng: &mut R) -> Result<AmplitudeVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension("gaussian vector needs dim ≥ 1".into()));
    }
    let components = (0..dim * field.components())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    AmplitudeVector::new(field, components)
}

/// Schatten p-norm: the vector p-norm of the singular values. `p = f64::INFINITY`
/// gives the operator norm.
pub fn schatten_norm(a: &DenseMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("Schatten index p = {p} must be ≥ 1")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let s = a.singular_values();
    Ok(vector_p_norm(&s, p))
}

pub fn vector_p_norm(xs: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        xs.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        xs.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        xs.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Operator norm (largest singular value) of a complex matrix.
pub fn operator_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().iter().fold(0.0_f64, |m, &x| m.max(x))
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Pure-state trace distance `√(1 − |⟨ψ|φ⟩|²)`.
pub fn trace_distance(psi: &AmplitudeVector, phi: &AmplitudeVector) -> Result<f64> {
    Ok((1.0 - fidelity(psi, phi)?).max(0.0).sqrt())
}

/// `|⟨ψ|φ⟩|²` for unit vectors over ℝ or ℂ.
pub fn fidelity(psi: &AmplitudeVector, phi: &AmplitudeVector) -> Result<f64> {
    for v in [psi, phi] {
        if v.field() == FieldTag::Quaternion {
            return Err(Error::Contract(
                "trace distance takes real or complex amplitudes; embed quaternionic states first".into(),
            ));
        }
        let norm = v.norm_sqr().sqrt();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(norm));
        }
    }
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", psi.dim(), phi.dim())));
    }
    let overlap: Complex64 = psi
        .to_complex()
        .iter()
        .zip(phi.to_complex())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Kronecker power `A^{⊗k}`.
pub fn kron_power(a: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..k {
        out = out.kronecker(a);
    }
    out
}

pub fn complex_from_real(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;
    use crate::numerics::stats::RunningStats;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_complex(n: usize, rng: &mut RngStream) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }

    #[test]
    fn gaussian_vector_shapes_and_determinism() {
        let a = gaussian_vector(3, FieldTag::Real, &mut RngStream::new(5, 0)).unwrap();
        let b = gaussian_vector(3, FieldTag::Real, &mut RngStream::new(5, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 3);
        let q = gaussian_vector(3, FieldTag::Quaternion, &mut RngStream::new(5, 0)).unwrap();
        assert_eq!(q.components().len(), 12);
        assert_eq!(q.to_complex().len(), 6);
        assert!(matches!(
            gaussian_vector(0, FieldTag::Complex, &mut RngStream::new(5, 0)),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn gaussian_squared_norm_means() {
        // E‖g‖² = (real components per entry)·D.
        for (field, d, expect) in [(FieldTag::Real, 6, 6.0), (FieldTag::Quaternion, 3, 12.0)] {
            let mut rng = RngStream::new(17, field.components() as u64);
            let s: RunningStats = (0..100_000)
                .map(|_| gaussian_vector(d, field, &mut rng).unwrap().norm_sqr())
                .collect();
            assert!(
                (s.mean() - expect).abs() < 5.0 * s.std_error(),
                "{field:?}: {} vs {expect}",
                s.mean()
            );
        }
    }

    #[test]
    fn schatten_identity() {
        let id = DenseMatrix::Real(RMatrix::identity(5, 5));
        assert!((schatten_norm(&id, 2.0).unwrap() - 5f64.sqrt()).abs() < 1e-12);
        assert!((schatten_norm(&id, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!((schatten_norm(&id, 1.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(matches!(schatten_norm(&id, 0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn schatten_quaternion_identity_counts_each_value_once() {
        let id = DenseMatrix::Quaternion(QuaternionMatrix::identity(3));
        assert!((schatten_norm(&id, 1.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let e0 = AmplitudeVector::basis(FieldTag::Real, 2, 0).unwrap();
        let e1 = AmplitudeVector::basis(FieldTag::Real, 2, 1).unwrap();
        let plus = AmplitudeVector::from_real(vec![0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        assert!(trace_distance(&e0, &e0).unwrap().abs() < 1e-12);
        assert!((trace_distance(&e0, &e1).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&plus, &e0).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let bad = AmplitudeVector::from_real(vec![1.0, 1.0]).unwrap();
        assert!(matches!(trace_distance(&bad, &e0), Err(Error::NotNormalized(_))));
        let e3 = AmplitudeVector::basis(FieldTag::Real, 3, 0).unwrap();
        assert!(matches!(trace_distance(&e3, &e0), Err(Error::DimensionMismatch(_))));
    }

    fn unit(v: Vec<f64>) -> AmplitudeVector {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        AmplitudeVector::new(FieldTag::Complex, v.iter().map(|x| x / n).collect()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn schatten_monotone_and_reverse(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = RngStream::new(seed, 0);
            let a = DenseMatrix::Complex(random_complex(d, &mut rng));
            let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
            let norms: Vec<f64> = ps.iter().map(|&p| schatten_norm(&a, p).unwrap()).collect();
            for i in 0..ps.len() {
                for j in i..ps.len() {
                    prop_assert!(norms[i] >= norms[j] * (1.0 - 1e-12));
                    let expo = 1.0 / ps[i] - if ps[j].is_infinite() { 0.0 } else { 1.0 / ps[j] };
                    prop_assert!(norms[i] <= (d as f64).powf(expo) * norms[j] * (1.0 + 1e-12));
                }
            }
        }

        #[test]
        fn entrywise_sum_chain(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = RngStream::new(seed, 1);
            let m = random_complex(d, &mut rng);
            let entry_sum: f64 = m.iter().map(|z| z.norm()).sum();
            let hs: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let op = operator_norm(&m);
            let df = d as f64;
            prop_assert!(entry_sum <= df * hs * (1.0 + 1e-12));
            prop_assert!(df * hs <= df * df.sqrt() * op * (1.0 + 1e-12));
        }

        #[test]
        fn trace_distance_is_a_metric(
            a in proptest::collection::vec(-1.0f64..1.0, 8),
            b in proptest::collection::vec(-1.0f64..1.0, 8),
            c in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            prop_assume!(a.iter().chain(&b).chain(&c).all(|x| x.abs() > 1e-3));
            let (a, b, c) = (unit(a), unit(b), unit(c));
            let ab = trace_distance(&a, &b).unwrap();
            let ba = trace_distance(&b, &a).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
