use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = ONE;
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut out = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            out[(i, i)] = C64::new(d, 0.0);
        }
        out
    }

    /// Stacks the given vectors as columns.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: c.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot_u(self.row(i), v)).collect())
    }

    /// `selfᴴ v`
    pub fn adjoint_mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: v.len(),
            });
        }
        let mut out = vec![ZERO; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        Ok(out)
    }

    /// Relative Hermitian defect `‖A − Aᴴ‖_F / ‖A‖_F` (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// `scale · X Xᴴ`, exploiting Hermitian symmetry.
    pub fn gram(&self, scale: f64) -> Self {
        gram_scaled(self, scale)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Unconjugated sum `Σ aₖ bₖ`.
#[inline]
pub(crate) fn dot_u(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Hermitian inner product `aᴴ b`.
#[inline]
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// `s₁ᴴ M s₂`
pub fn quad_form(s1: &[C64], m: &ComplexMatrix, s2: &[C64]) -> Result<C64> {
    if s1.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            actual: s1.len(),
        });
    }
    let ms2 = m.mul_vec(s2)?;
    Ok(inner(s1, &ms2))
}

fn gram_scaled(x: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let (m, k) = (x.rows(), x.cols());
    let mut re = Vec::with_capacity(m * k);
    let mut im = Vec::with_capacity(m * k);
    for z in &x.data {
        re.push(z.re);
        im.push(z.im);
    }
    let mut out = ComplexMatrix::zeros(m, m);
    let mut add = |i: usize, j: usize, (s_re, s_im): (f64, f64)| {
        out[(i, j)] += C64::new(s_re, s_im);
    };

    // 2×2 tiles of the upper triangle, swept in cache-sized slabs of columns
    const SLAB: usize = 512;
    let pairs = m / 2;
    let mut c0 = 0;
    while c0 < k {
        let c1 = (c0 + SLAB).min(k);
        let span = |i: usize| i * k + c0..i * k + c1;
        for bi in 0..pairs {
            let (i0, i1) = (2 * bi, 2 * bi + 1);
            let a = [&re[span(i0)], &im[span(i0)], &re[span(i1)], &im[span(i1)]];
            for bj in bi..pairs {
                let (j0, j1) = (2 * bj, 2 * bj + 1);
                let b = [&re[span(j0)], &im[span(j0)], &re[span(j1)], &im[span(j1)]];
                let t = split_dot_2x2(a, b);
                add(i0, j0, t[0]);
                add(i0, j1, t[1]);
                add(i1, j0, t[2]);
                add(i1, j1, t[3]);
            }
        }
        if m % 2 == 1 {
            let last = m - 1;
            for i in 0..m {
                let t = split_dot(&re[span(i)], &im[span(i)], &re[span(last)], &im[span(last)]);
                add(i, last, t);
            }
        }
        c0 = c1;
    }
    for i in 0..m {
        for j in i..m {
            let v = out[(i, j)] * scale;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    for i in 0..m {
        out[(i, i)].im = 0.0;
    }
    out
}

/// `Σ aₖ conj(bₖ)` for the four pairings of two rows `a` and two rows `b`,
/// each given as `[re₀, im₀, re₁, im₁]`. Returns `(a₀b₀, a₀b₁, a₁b₀, a₁b₁)`.
#[inline]
fn split_dot_2x2(a: [&[f64]; 4], b: [&[f64]; 4]) -> [(f64, f64); 4] {
    const LANES: usize = 4;
    let mut acc = [[0.0f64; LANES]; 8];
    let n = a[0].len();
    let main = n - n % LANES;
    let mut t = 0;
    let lanes = |v: &[f64], t: usize| -> [f64; LANES] { v[t..t + LANES].try_into().expect("lane width") };
    while t < main {
        let (xr0, xi0, xr1, xi1) = (lanes(a[0], t), lanes(a[1], t), lanes(a[2], t), lanes(a[3], t));
        let (yr0, yi0, yr1, yi1) = (lanes(b[0], t), lanes(b[1], t), lanes(b[2], t), lanes(b[3], t));
        for l in 0..LANES {
            let (ar0, ai0, ar1, ai1) = (xr0[l], xi0[l], xr1[l], xi1[l]);
            let (br0, bi0, br1, bi1) = (yr0[l], yi0[l], yr1[l], yi1[l]);
            acc[0][l] += ar0 * br0 + ai0 * bi0;
            acc[1][l] += ai0 * br0 - ar0 * bi0;
            acc[2][l] += ar0 * br1 + ai0 * bi1;
            acc[3][l] += ai0 * br1 - ar0 * bi1;
            acc[4][l] += ar1 * br0 + ai1 * bi0;
            acc[5][l] += ai1 * br0 - ar1 * bi0;
            acc[6][l] += ar1 * br1 + ai1 * bi1;
            acc[7][l] += ai1 * br1 - ar1 * bi1;
        }
        t += LANES;
    }
    let mut s = [0.0f64; 8];
    for (sv, lanes) in s.iter_mut().zip(&acc) {
        *sv = lanes.iter().sum();
    }
    for t in main..n {
        let (ar0, ai0, ar1, ai1) = (a[0][t], a[1][t], a[2][t], a[3][t]);
        let (br0, bi0, br1, bi1) = (b[0][t], b[1][t], b[2][t], b[3][t]);
        s[0] += ar0 * br0 + ai0 * bi0;
        s[1] += ai0 * br0 - ar0 * bi0;
        s[2] += ar0 * br1 + ai0 * bi1;
        s[3] += ai0 * br1 - ar0 * bi1;
        s[4] += ar1 * br0 + ai1 * bi0;
        s[5] += ai1 * br0 - ar1 * bi0;
        s[6] += ar1 * br1 + ai1 * bi1;
        s[7] += ai1 * br1 - ar1 * bi1;
    }
    [(s[0], s[1]), (s[2], s[3]), (s[4], s[5]), (s[6], s[7])]
}

/// `Σ aₖ conj(bₖ)` over split real/imaginary planes.
#[inline]
fn split_dot(a_re: &[f64], a_im: &[f64], b_re: &[f64], b_im: &[f64]) -> (f64, f64) {
    const LANES: usize = 8;
    let mut acc_re = [0.0f64; LANES];
    let mut acc_im = [0.0f64; LANES];
    let n = a_re.len();
    let main = n - n % LANES;
    for (((ar, ai), br), bi) in a_re[..main]
        .chunks_exact(LANES)
        .zip(a_im[..main].chunks_exact(LANES))
        .zip(b_re[..main].chunks_exact(LANES))
        .zip(b_im[..main].chunks_exact(LANES))
    {
        for l in 0..LANES {
            acc_re[l] += ar[l] * br[l] + ai[l] * bi[l];
            acc_im[l] += ai[l] * br[l] - ar[l] * bi[l];
        }
    }
    let mut s_re: f64 = acc_re.iter().sum();
    let mut s_im: f64 = acc_im.iter().sum();
    for t in main..n {
        s_re += a_re[t] * b_re[t] + a_im[t] * b_im[t];
        s_im += a_im[t] * b_re[t] - a_re[t] * b_im[t];
    }
    (s_re, s_im)
}
