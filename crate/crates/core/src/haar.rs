//! Haar-random group elements and pure states for SO(D), SU(D) and Sp(D).
//!
//! Group elements come from a Ginibre matrix over the group's field followed by
//! a QR factorization whose triangular factor is forced to have a positive real
//! diagonal. SO flips its first column on the det = −1 coset. Sp uses
//! quaternionic Gram–Schmidt and is returned in the complex embedding of
//! [`crate::numerics::quaternion`].
//!
//! States are normalized Gaussian vectors over the field. For Sp the
//! quaternionic vector is returned as its embedded complex 2D-vector, which has
//! the same law as the first column of a sampled Sp element.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::numerics::quaternion::{symplectic_form, QuaternionMatrix};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{ks_two_sample, mc_collect, KsResult};
use crate::numerics::{gaussian_vector, AmplitudeVector, CMatrix, DenseMatrix, FieldTag, RMatrix};
use crate::{Error, Result};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const DETERMINANT_TOL: f64 = 1e-8;
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Largest dimension accepted for dense sampling.
pub const MAX_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    SO,
    SU,
    Sp,
}

impl GroupKind {
    pub const ALL: [GroupKind; 3] = [GroupKind::SO, GroupKind::SU, GroupKind::Sp];

    pub fn field(self) -> FieldTag {
        match self {
            GroupKind::SO => FieldTag::Real,
            GroupKind::SU => FieldTag::Complex,
            GroupKind::Sp => FieldTag::Quaternion,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::SO => "SO",
            GroupKind::SU => "SU",
            GroupKind::Sp => "Sp",
        })
    }
}

impl FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so" => Ok(GroupKind::SO),
            "su" | "u" => Ok(GroupKind::SU),
            "sp" => Ok(GroupKind::Sp),
            other => Err(Error::InvalidParameter(format!("unknown group '{other}' (expected so, su or sp)"))),
        }
    }
}

/// A classical compact group. For Sp, `dim` is the quaternionic dimension and
/// elements act on ℂ^{2·dim}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupId {
    pub kind: GroupKind,
    pub dim: usize,
}

impl GroupId {
    pub fn new(kind: GroupKind, dim: usize) -> Result<Self> {
        let min = if kind == GroupKind::Sp { 1 } else { 2 };
        if dim < min {
            return Err(Error::InvalidDimension(format!("{kind}({dim}) needs dim ≥ {min}")));
        }
        if dim > MAX_DIM {
            return Err(Error::Resource(format!("{kind}({dim}) exceeds the dense limit {MAX_DIM}")));
        }
        Ok(Self { kind, dim })
    }

    pub fn so(dim: usize) -> Result<Self> {
        Self::new(GroupKind::SO, dim)
    }

    pub fn su(dim: usize) -> Result<Self> {
        Self::new(GroupKind::SU, dim)
    }

    pub fn sp(dim: usize) -> Result<Self> {
        Self::new(GroupKind::Sp, dim)
    }

    /// The group acting on `n` qubits: D = 2^n for SO and SU, D = 2^(n−1) for Sp.
    pub fn for_qubits(kind: GroupKind, n: u32) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(Error::InvalidDimension(format!("qubit count {n} outside 1..=12")));
        }
        let dim = match kind {
            GroupKind::Sp => 1usize << (n - 1),
            _ => 1usize << n,
        };
        Self::new(kind, dim)
    }

    pub fn field(&self) -> FieldTag {
        self.kind.field()
    }

    /// Dimension of the complex space the group acts on.
    pub fn complex_dim(&self) -> usize {
        match self.kind {
            GroupKind::Sp => 2 * self.dim,
            _ => self.dim,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.dim)
    }
}

/// A sampled group element. SO elements are real; SU and Sp elements are
/// complex (Sp in its 2D×2D embedding).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    group: GroupId,
    matrix: DenseMatrix,
}

/// Worst-case deviations from the defining constraints.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub unitarity: f64,
    pub determinant: Option<f64>,
    pub symplectic: Option<f64>,
}

impl ConstraintReport {
    pub fn holds(&self) -> bool {
        self.unitarity <= UNITARITY_TOL
            && self.determinant.is_none_or(|d| d <= DETERMINANT_TOL)
            && self.symplectic.is_none_or(|s| s <= SYMPLECTIC_TOL)
    }
}

impl GroupElement {
    /// Wraps a matrix after checking the group's defining constraints.
    pub fn from_matrix(group: GroupId, matrix: DenseMatrix) -> Result<Self> {
        let expected_field = match group.kind {
            GroupKind::SO => FieldTag::Real,
            _ => FieldTag::Complex,
        };
        let n = group.complex_dim();
        if matrix.field() != expected_field || matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Contract(format!(
                "{group} needs a {n}×{n} {expected_field:?} matrix, got {}×{} {:?}",
                matrix.rows(),
                matrix.cols(),
                matrix.field()
            )));
        }
        let element = Self { group, matrix };
        let report = element.constraint_report();
        if !report.holds() {
            return Err(Error::Contract(format!("matrix is not in {group}: {report:?}")));
        }
        Ok(element)
    }

    pub fn identity(group: GroupId) -> Self {
        let n = group.complex_dim();
        let matrix = match group.kind {
            GroupKind::SO => DenseMatrix::Real(RMatrix::identity(n, n)),
            _ => DenseMatrix::Complex(CMatrix::identity(n, n)),
        };
        Self { group, matrix }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn to_complex(&self) -> CMatrix {
        self.matrix.to_complex()
    }

    /// `U|0⟩` as a state.
    pub fn first_column(&self) -> PureState {
        let state = match &self.matrix {
            DenseMatrix::Real(m) => AmplitudeVector::from_real(m.column(0).iter().copied().collect()),
            DenseMatrix::Complex(m) => AmplitudeVector::from_complex(&m.column(0).iter().copied().collect::<Vec<_>>()),
            DenseMatrix::Quaternion(_) => unreachable!("group elements are stored real or complex"),
        }
        .expect("columns of a finite matrix are valid amplitude vectors");
        PureState {
            state,
            source_group: self.group,
        }
    }

    pub fn constraint_report(&self) -> ConstraintReport {
        let u = self.to_complex();
        let n = u.nrows();
        let gram = u.adjoint() * &u;
        let unitarity = max_abs_diff(&gram, &CMatrix::identity(n, n));
        let determinant = match self.group.kind {
            GroupKind::Sp => None,
            _ => Some((u.clone().determinant() - Complex64::new(1.0, 0.0)).norm()),
        };
        let symplectic = (self.group.kind == GroupKind::Sp).then(|| {
            let omega = symplectic_form(self.group.dim);
            max_abs_diff(&(&u * &omega * u.transpose()), &omega)
        });
        ConstraintReport {
            unitarity,
            determinant,
            symplectic,
        }
    }
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// A normalized state vector together with the group it was drawn from.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub state: AmplitudeVector,
    pub source_group: GroupId,
}

impl PureState {
    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.state.to_complex()
    }

    /// Squared magnitudes `|⟨x|ψ⟩|²` in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        match self.state.field() {
            FieldTag::Real => self.state.components().iter().map(|x| x * x).collect(),
            _ => self.amplitudes().iter().map(|z| z.norm_sqr()).collect(),
        }
    }
}

/// Options for [`sample_group_element_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerOptions {
    /// For SU: divide by a D-th root of the determinant so that det = 1. When
    /// false the sample is Haar on U(D), which differs only by a global phase.
    pub normalize_determinant: bool,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            normalize_determinant: true,
        }
    }
}

/// A Haar-random element of `group`.
pub fn sample_group_element(group: GroupId, rng: &mut RngStream) -> GroupElement {
    sample_group_element_with(group, rng, SamplerOptions::default())
}

pub fn sample_group_element_with<R: Rng + ?Sized>(group: GroupId, rng: &mut R, options: SamplerOptions) -> GroupElement {
    let d = group.dim;
    let matrix = match group.kind {
        GroupKind::SO => DenseMatrix::Real(haar_orthogonal(d, rng, true)),
        GroupKind::SU => {
            let mut u = haar_unitary(d, rng);
            if options.normalize_determinant {
                let phase = u.clone().determinant().arg() / d as f64;
                u *= Complex64::from_polar(1.0, -phase);
            }
            DenseMatrix::Complex(u)
        }
        GroupKind::Sp => {
            let mut q = QuaternionMatrix::ginibre(d, d, rng);
            q.orthonormalize_columns();
            DenseMatrix::Complex(q.to_complex())
        }
    };
    GroupElement { group, matrix }
}

/// Haar-random orthogonal matrix; restricted to det = +1 when `special`.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R, special: bool) -> RMatrix {
    let g = RMatrix::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    let r_diag = r.diagonal();
    for (j, r) in r_diag.iter().enumerate() {
        if *r < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if special && q.clone().determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar-random unitary matrix on U(d).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    let r_diag = r.diagonal();
    for (j, r) in r_diag.iter().enumerate() {
        let norm = r.norm();
        if norm > 0.0 {
            let phase = r / norm;
            for x in q.column_mut(j).iter_mut() {
                *x *= phase;
            }
        }
    }
    q
}

/// A Haar-random pure state for `group`: a normalized Gaussian vector over the
/// group's field (embedded into ℂ^{2D} for Sp).
pub fn sample_state<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> PureState {
    let field = group.field();
    let v = loop {
        let g = gaussian_vector(group.dim, field, rng).expect("group dims are positive");
        let norm = g.norm_sqr().sqrt();
        if norm > 1e-30 {
            break g.scaled(1.0 / norm);
        }
    };
    let state = match field {
        FieldTag::Quaternion => AmplitudeVector::from_complex(&v.to_complex()).expect("finite embedding"),
        _ => v,
    };
    PureState {
        state,
        source_group: group,
    }
}

/// Scalar statistics used to probe invariance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatistic {
    ReTrace,
    ReEntry01,
    Fidelity00,
}

impl ProbeStatistic {
    pub const ALL: [ProbeStatistic; 3] = [ProbeStatistic::ReTrace, ProbeStatistic::ReEntry01, ProbeStatistic::Fidelity00];

    pub fn eval(self, u: &CMatrix) -> f64 {
        match self {
            ProbeStatistic::ReTrace => u.trace().re,
            ProbeStatistic::ReEntry01 => u[(0, 1)].re,
            ProbeStatistic::Fidelity00 => u[(0, 0)].norm_sqr(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceProbe {
    pub probe: usize,
    pub statistic: ProbeStatistic,
    pub side: Side,
    pub ks: KsResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub group: GroupId,
    pub n_samples: usize,
    pub probes: Vec<InvarianceProbe>,
}

impl InvarianceReport {
    pub fn p_values(&self) -> Vec<f64> {
        self.probes.iter().map(|p| p.ks.p_value).collect()
    }

    pub fn min_p_value(&self) -> f64 {
        self.p_values().into_iter().fold(1.0, f64::min)
    }
}

/// Two-sample KS tests of `t(U)` against `t(VU')` and `t(U'V)` for fixed
/// probes `V`, where `U` and `U'` are independent Haar batches.
pub fn invariance_check(group: GroupId, n_samples: usize, probe_count: usize, rng: &RngStream) -> Result<InvarianceReport> {
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!("invariance check needs ≥ 1000 samples, got {n_samples}")));
    }
    let mut probe_rng = rng.substream(u64::MAX);
    let probes: Vec<CMatrix> = (0..probe_count)
        .map(|_| sample_group_element(group, &mut probe_rng).to_complex())
        .collect();
    let draw = |stream: u64, f: &(dyn Fn(&CMatrix) -> f64 + Sync)| {
        mc_collect(n_samples, &rng.substream(stream), |r| f(&sample_group_element(group, r).to_complex()))
    };

    let mut out = Vec::new();
    for statistic in ProbeStatistic::ALL {
        let base = draw(3 * statistic as u64, &|u| statistic.eval(u));
        for (p, v) in probes.iter().enumerate() {
            for side in [Side::Left, Side::Right] {
                let stream = 1000 + 10 * p as u64 + 2 * statistic as u64 + side as u64;
                let moved = draw(stream, &|u| match side {
                    Side::Left => statistic.eval(&(v * u)),
                    Side::Right => statistic.eval(&(u * v)),
                });
                out.push(InvarianceProbe {
                    probe: p,
                    statistic,
                    side,
                    ks: ks_two_sample(&base, &moved),
                });
            }
        }
    }
    Ok(InvarianceReport {
        group,
        n_samples,
        probes: out,
    })
}

/// Writes a matrix as CSV, one row per matrix row. Complex entries become
/// `re,im` column pairs; quaternionic matrices are embedded first.
pub fn write_matrix_csv<W: Write>(writer: W, m: &DenseMatrix) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Resource(format!("csv write failed: {e}"));
    match m {
        DenseMatrix::Real(r) => {
            for row in r.row_iter() {
                csv.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(io)?;
            }
        }
        _ => {
            let c = m.to_complex();
            for row in c.row_iter() {
                csv.write_record(row.iter().flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)]))
                    .map_err(io)?;
            }
        }
    }
    csv.flush().map_err(|e| Error::Resource(e.to_string()))
}

/// Writes a state as CSV rows `index,re,im`.
pub fn write_state_csv<W: Write>(writer: W, psi: &PureState) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Resource(format!("csv write failed: {e}"));
    csv.write_record(["index", "re", "im"]).map_err(io)?;
    for (i, z) in psi.amplitudes().iter().enumerate() {
        csv.write_record([i.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])
            .map_err(io)?;
    }
    csv.flush().map_err(|e| Error::Resource(e.to_string()))
}

/// Real matrix helper for callers building SO elements by hand.
pub fn real_matrix(rows: usize, cols: usize, row_major: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, row_major)
}
