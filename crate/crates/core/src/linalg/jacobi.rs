//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Slower than the tridiagonal route but unconditionally orthogonal and
//! algorithmically independent, which makes it the reference in tests.

use super::eig::{check_hermitian, fix_phase, HermitianEig};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Rotations allowed per unit of `m²`.
const ROTATIONS_PER_M2: usize = 30;

/// Eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation `J = D·G` first strips the phase of `a_pq` with a diagonal
/// unitary and then applies a real Givens rotation, so `JᴴAJ` has a zero
/// `(p, q)` entry. Fails with `NoConvergence` past `30·m²` rotations.
pub fn hermitian_eig_jacobi(a: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut w = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let budget = ROTATIONS_PER_M2 * n * n;
    let scale = w.frobenius_norm();
    let target = (1e-15 * scale).powi(2);
    let mut rotations = 0usize;

    loop {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| w[(p, q)].norm_sqr())
            .sum();
        if off <= target || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE || mag <= 1e-18 * scale {
                    continue;
                }
                rotations += 1;
                if rotations > budget {
                    return Err(Error::NoConvergence { budget });
                }
                let phase = apq / mag; // e^{iφ}
                let theta = (w[(q, q)].re - w[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut w, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase.conj());
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut columns: Vec<Vec<C64>> = order.iter().map(|&j| v.column(j)).collect();
    for c in columns.iter_mut() {
        fix_phase(c);
    }
    Ok(HermitianEig {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, j| columns[j][i]),
    })
}

/// `w ← Jᴴ w J` for the rotation built from `(c, s, e^{iφ})`.
fn rotate(w: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    rotate_columns(w, p, q, c, s, phase.conj());
    let n = w.rows();
    for k in 0..n {
        let (mp, mq) = (w[(p, k)], w[(q, k)]);
        w[(p, k)] = c * mp - s * phase * mq;
        w[(q, k)] = s * mp + c * phase * mq;
    }
    w[(p, q)] = C64::new(0.0, 0.0);
    w[(q, p)] = C64::new(0.0, 0.0);
    w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
    w[(q, q)] = C64::new(w[(q, q)].re, 0.0);
}

/// `m ← m J` where `conj_phase = e^{−iφ}`.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, conj_phase: C64) {
    for k in 0..m.rows() {
        let row = m.row_mut(k);
        let (ap, aq) = (row[p], row[q]);
        row[p] = c * ap - s * conj_phase * aq;
        row[q] = s * ap + c * conj_phase * aq;
    }
}
