//! Hermitian eigendecomposition by Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson-style shifts.
//!
//! Leading eigenvectors alone can be recovered by inverse iteration on the
//! tridiagonal form, which skips the O(m³) eigenvector accumulation. The
//! cyclic Jacobi solver in [`super::jacobi`] is an independent route used to
//! cross-check both paths.

use serde::{Deserialize, Serialize};

use super::matrix::{inner, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Max QL iterations spent on a single eigenvalue.
const QL_ITERATION_BUDGET: usize = 60;

/// Accepted relative asymmetry of an input declared Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

/// Eigenvalues sorted descending with the matching orthonormal eigenvectors as
/// columns of `vectors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// All eigenvalues (descending) plus the eigenvectors of the leading `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// `V · diag(values) · Vᴴ`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * lam;
                for (o, vj) in out.row_mut(i).iter_mut().zip(&v) {
                    *o += vi * vj.conj();
                }
            }
        }
        out
    }

    /// Solves `A x = b` through the decomposition. Fails with `Singular` when
    /// the smallest eigenvalue is not above `1e-12 · ‖A‖₂`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        let smallest = self.values.last().copied().unwrap_or(0.0);
        if smallest <= 1e-12 * self.spectral_norm() {
            return Err(Error::Singular { smallest });
        }
        let coeffs = self.vectors.adjoint_mul_vec(b)?;
        let scaled: Vec<C64> = coeffs
            .iter()
            .zip(&self.values)
            .map(|(c, &lam)| c / lam)
            .collect();
        self.vectors.mul_vec(&scaled)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let reduced = Tridiagonal::reduce(a)?;
    let n = reduced.dim();
    let mut d = reduced.diag.clone();
    let mut e = reduced.off.clone();
    e.push(0.0);
    // rows of `z` are eigenvectors of the real tridiagonal
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, Some(&mut z))?;
    let order = descending_order(&d);
    let values = order.iter().map(|&i| d[i]).collect();
    let rows: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| reduced.back_transform(&z[i * n..(i + 1) * n]))
        .collect();
    Ok(HermitianEig {
        values,
        vectors: columns_to_matrix(n, rows),
    })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigvals(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let reduced = Tridiagonal::reduce(a)?;
    let mut d = reduced.diag;
    let mut e = reduced.off;
    e.push(0.0);
    tql2(&mut d, &mut e, None)?;
    let order = descending_order(&d);
    Ok(order.iter().map(|&i| d[i]).collect())
}

/// All eigenvalues and the `k` leading eigenvectors.
pub fn hermitian_eig_leading(a: &ComplexMatrix, k: usize) -> Result<PartialEig> {
    let reduced = Tridiagonal::reduce(a)?;
    let n = reduced.dim();
    if k > n {
        return Err(Error::RankTooLarge { rank: k, dim: n });
    }
    let mut d = reduced.diag.clone();
    let mut e = reduced.off.clone();
    e.push(0.0);
    tql2(&mut d, &mut e, None)?;
    let order = descending_order(&d);
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let real_vectors = inverse_iteration(&reduced.diag, &reduced.off, &values[..k]);
    let rows = real_vectors
        .iter()
        .map(|z| reduced.back_transform(z))
        .collect();
    Ok(PartialEig {
        values,
        vectors: columns_to_matrix(n, rows),
    })
}

pub(crate) fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: a.cols(),
        });
    }
    let asymmetry = a.hermitian_defect();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// Stable descending order: equal values keep their original index order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order
}

/// Scales `v` so that its largest-modulus entry (first one on ties) is real
/// and positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mod {
            best_mod = m;
            best = i;
        }
    }
    if best_mod <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = C64::new(v[best].re, 0.0);
}

fn columns_to_matrix(n: usize, mut columns: Vec<Vec<C64>>) -> ComplexMatrix {
    for c in columns.iter_mut() {
        fix_phase(c);
    }
    ComplexMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
}

/// Hermitian `A = Q D T Dᴴ Qᴴ` with `T` real symmetric tridiagonal, `D` a
/// diagonal of unit phases and `Q` a product of Householder reflectors.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    phases: Vec<C64>,
    /// `(offset, v)` for `H = I − 2 v vᴴ` acting on indices `offset..`.
    reflectors: Vec<(usize, Vec<C64>)>,
}

impl Tridiagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn reduce(a: &ComplexMatrix) -> Result<Self> {
        check_hermitian(a)?;
        let n = a.rows();
        // symmetrised working copy
        let mut w = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
        let mut sub = vec![ZERO; n.saturating_sub(1)];
        let mut reflectors = Vec::new();

        for k in 0..n.saturating_sub(2) {
            let len = n - k - 1;
            let x: Vec<C64> = (k + 1..n).map(|i| w[(i, k)]).collect();
            let tail: f64 = x[1..].iter().map(C64::norm_sqr).sum();
            if tail == 0.0 {
                sub[k] = x[0];
                continue;
            }
            let x0_abs = x[0].norm();
            let xnorm = (x0_abs * x0_abs + tail).sqrt();
            let phase = if x0_abs > 0.0 { x[0] / x0_abs } else { ONE };
            let alpha = -phase * xnorm;
            let mut v = x;
            v[0] -= alpha;
            let vnorm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            sub[k] = alpha;

            // trailing block B ← H B H via p = B v, w = p − (vᴴp) v
            let off = k + 1;
            let mut p = vec![ZERO; len];
            for (i, pi) in p.iter_mut().enumerate() {
                let row = &w.row(off + i)[off..];
                *pi = row.iter().zip(&v).map(|(&b, &vj)| b * vj).sum();
            }
            let beta = inner(&v, &p).re;
            for (pi, vi) in p.iter_mut().zip(&v) {
                *pi -= beta * vi;
            }
            for i in 0..len {
                let (vi2, pi2) = (2.0 * v[i], 2.0 * p[i]);
                let row = &mut w.row_mut(off + i)[off..];
                for (j, b) in row.iter_mut().enumerate() {
                    *b -= vi2 * p[j].conj() + pi2 * v[j].conj();
                }
            }
            reflectors.push((off, v));
        }
        if n >= 2 {
            sub[n - 2] = w[(n - 1, n - 2)];
        }

        let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
        let mut phases = vec![ONE; n];
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            let mag = sub[k].norm();
            phases[k + 1] = if mag > 0.0 { phases[k] * (sub[k] / mag) } else { phases[k] };
            off.push(mag);
        }
        Ok(Self {
            diag,
            off,
            phases,
            reflectors,
        })
    }

    /// Maps an eigenvector of the real tridiagonal back to one of `A`.
    fn back_transform(&self, z: &[f64]) -> Vec<C64> {
        let mut y: Vec<C64> = z.iter().zip(&self.phases).map(|(&zi, &d)| d * zi).collect();
        for (off, v) in self.reflectors.iter().rev() {
            let seg = &mut y[*off..];
            let proj = 2.0 * inner(v, seg);
            for (yi, vi) in seg.iter_mut().zip(v) {
                *yi -= proj * vi;
            }
        }
        y
    }
}

/// Implicit QL on a real symmetric tridiagonal (`d` diagonal, `e[i]` coupling
/// `i` and `i+1`, `e[n-1] = 0`). When given, rows of `z` are rotated along so
/// that row `i` ends as the eigenvector of `d[i]`.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_ITERATION_BUDGET {
                    return Err(Error::NoConvergence {
                        budget: QL_ITERATION_BUDGET,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvectors of the real symmetric tridiagonal `(diag, off)` for the given
/// (descending, accurate) eigenvalues, by inverse iteration with
/// reorthogonalisation inside clusters.
fn inverse_iteration(diag: &[f64], off: &[f64], lambdas: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let tnorm = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let cluster_gap = 1e-3 * tnorm;
    let separation = 10.0 * f64::EPSILON * tnorm;

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
    let mut shifts: Vec<f64> = Vec::with_capacity(lambdas.len());
    for (j, &lam) in lambdas.iter().enumerate() {
        let mut shift = lam;
        if let Some(&prev) = shifts.last() {
            if prev - shift < separation {
                shift = prev - separation;
            }
        }
        shifts.push(shift);
        let cluster_start = (0..j)
            .rev()
            .take_while(|&i| lambdas[i] - lam <= cluster_gap)
            .last()
            .unwrap_or(j);

        let lu = TridiagLu::factor(diag, off, shift, tnorm);
        let mut x = start_vector(n, j);
        for _ in 0..4 {
            lu.solve(&mut x);
            for prev in &out[cluster_start..j] {
                let proj: f64 = prev.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, pi) in x.iter_mut().zip(prev) {
                    *xi -= proj * pi;
                }
            }
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm == 0.0 || !nrm.is_finite() {
                x = start_vector(n, j + 7);
                continue;
            }
            for xi in x.iter_mut() {
                *xi /= nrm;
            }
        }
        out.push(x);
    }
    out
}

fn start_vector(n: usize, salt: usize) -> Vec<f64> {
    // fixed xorshift stream: deterministic, generic enough not to be
    // orthogonal to any particular eigenvector
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (salt as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

/// LU with partial pivoting of `T − σI` for tridiagonal `T`.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tnorm: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let tiny = f64::EPSILON * tnorm;
        for di in d.iter_mut() {
            if di.abs() < tiny {
                *di = if *di < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
