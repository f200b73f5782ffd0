//! Quaternions, quaternionic matrices and their complex embedding.
//!
//! Quaternionic vectors form a *right* module: scalars multiply from the right
//! and matrices act from the left. Writing `q = a + b·j` with complex `a, b`,
//! the embedding sends a vector entry to the complex pair `(a, b̄)` and a matrix
//! entry to the 2×2 block `[[a, -b], [b̄, ā]]`, interleaved so that quaternionic
//! coordinate `ℓ` occupies complex rows `2ℓ` and `2ℓ+1`. With `q = w + x·i + y·j + z·k`
//! the pair is `(w + i·x, y - i·z)`. Embedded matrices `M` satisfy
//! `M Ω = Ω M̄` for `Ω = 𝕀 ⊗ [[0, 1], [-1, 0]]`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Standard quaternionic Gaussian: four independent N(0,1) components.
    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
    }

    /// The complex pair `(a, b̄)` for `self = a + b·j`.
    pub fn to_complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, -self.z))
    }

    pub fn from_complex_pair(a: Complex64, b_conj: Complex64) -> Self {
        Self::new(a.re, a.im, b_conj.re, -b_conj.im)
    }

    /// The 2×2 complex block `[[a, -b], [b̄, ā]]`, row major.
    pub fn to_complex_block(self) -> [[Complex64; 2]; 2] {
        let a = Complex64::new(self.w, self.x);
        let b = Complex64::new(self.y, self.z);
        [[a, -b], [b.conj(), a.conj()]]
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Square-or-rectangular quaternionic matrix, stored column major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Quaternionic Ginibre matrix: iid standard quaternionic Gaussian entries.
    pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| Quaternion::gaussian(rng)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[Quaternion] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|q| q.w.is_finite() && q.x.is_finite() && q.y.is_finite() && q.z.is_finite())
    }

    /// Modified Gram–Schmidt on the columns, in place. Returns the diagonal of the
    /// triangular factor (the column norms before normalization), which is real and
    /// positive for full-rank input.
    pub fn orthonormalize_columns(&mut self) -> Vec<f64> {
        let n = self.rows;
        let mut diag = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let (done, rest) = self.data.split_at_mut(j * n);
            let v = &mut rest[..n];
            for i in 0..j {
                let u = &done[i * n..(i + 1) * n];
                let mut c = Quaternion::ZERO;
                for (ur, vr) in u.iter().zip(v.iter()) {
                    c += ur.conj() * *vr;
                }
                for (vr, ur) in v.iter_mut().zip(u.iter()) {
                    *vr -= *ur * c;
                }
            }
            let norm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
            diag.push(norm);
            let inv = 1.0 / norm;
            for q in v.iter_mut() {
                *q = q.scale(inv);
            }
        }
        diag
    }

    /// The interleaved complex embedding, of size `2·rows × 2·cols`.
    pub fn to_complex(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(2 * self.rows, 2 * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                let b = self[(r, c)].to_complex_block();
                out[(2 * r, 2 * c)] = b[0][0];
                out[(2 * r, 2 * c + 1)] = b[0][1];
                out[(2 * r + 1, 2 * c)] = b[1][0];
                out[(2 * r + 1, 2 * c + 1)] = b[1][1];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for QuaternionMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[c * self.rows + r]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuaternionMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[c * self.rows + r]
    }
}

impl Mul for &QuaternionMatrix {
    type Output = QuaternionMatrix;
    fn mul(self, o: &QuaternionMatrix) -> QuaternionMatrix {
        assert_eq!(self.cols, o.rows, "quaternion matrix shape mismatch");
        QuaternionMatrix::from_fn(self.rows, o.cols, |r, c| {
            (0..self.cols).fold(Quaternion::ZERO, |acc, t| acc + self[(r, t)] * o[(t, c)])
        })
    }
}

/// Embeds a quaternionic vector into `ℂ^{2n}` with the interleaved layout.
pub fn embed_vector(v: &[Quaternion]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for q in v {
        let (a, b) = q.to_complex_pair();
        out.push(a);
        out.push(b);
    }
    out
}

/// Inverse of [`embed_vector`].
pub fn unembed_vector(v: &[Complex64]) -> Vec<Quaternion> {
    v.chunks_exact(2)
        .map(|p| Quaternion::from_complex_pair(p[0], p[1]))
        .collect()
}

/// The symplectic form in the interleaved layout, `𝕀_n ⊗ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(quaternionic_dim: usize) -> DMatrix<Complex64> {
    let mut omega = DMatrix::<Complex64>::zeros(2 * quaternionic_dim, 2 * quaternionic_dim);
    for l in 0..quaternionic_dim {
        omega[(2 * l, 2 * l + 1)] = Complex64::new(1.0, 0.0);
        omega[(2 * l + 1, 2 * l)] = Complex64::new(-1.0, 0.0);
    }
    omega
}
