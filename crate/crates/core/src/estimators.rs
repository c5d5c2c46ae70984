//! Empirical quantities: subspace projectors, the four filters, SINR losses
//! and spectral transforms of the sample eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig_leading, inner, norm, ComplexMatrix, HermitianEig, C64};
use crate::scenario::{CovarianceModel, SampleSet};

/// Relative threshold on `aᴴΠ⊥RΠ⊥a` below which the steering vector is
/// considered to lie in the interference subspace.
const DEGENERATE_STEERING: f64 = 1e-14;

/// Anything that can play the role of `Π⊥` in a low-rank filter.
pub trait ComplementOperator {
    /// `Π⊥ v`
    fn apply_complement(&self, v: &[C64]) -> Vec<C64>;
}

/// Dense interference projector and its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorPair {
    pub pi_c: ComplexMatrix,
    pub pi_c_perp: ComplexMatrix,
}

impl ProjectorPair {
    /// Projector onto the span of the orthonormal columns of `basis`.
    pub fn from_basis(basis: &ComplexMatrix) -> Self {
        let m = basis.rows();
        let pi_c = ComplexMatrix::from_fn(m, m, |i, j| {
            basis.row(i).iter().zip(basis.row(j)).map(|(a, b)| a * b.conj()).sum()
        });
        let pi_c_perp = ComplexMatrix::identity(m).sub(&pi_c).expect("square");
        Self { pi_c, pi_c_perp }
    }

    pub fn rank(&self) -> f64 {
        self.pi_c.trace().re
    }
}

impl ComplementOperator for ProjectorPair {
    fn apply_complement(&self, v: &[C64]) -> Vec<C64> {
        self.pi_c_perp.mul_vec(v).expect("conformable")
    }
}

/// Complement of the span of orthonormal columns, applied without forming
/// the dense projector.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceComplement {
    pub basis: ComplexMatrix,
}

impl ComplementOperator for SubspaceComplement {
    fn apply_complement(&self, v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        for i in 0..self.basis.cols() {
            let u = self.basis.column(i);
            let c = inner(&u, v);
            for (o, ui) in out.iter_mut().zip(&u) {
                *o -= c * ui;
            }
        }
        out
    }
}

/// `Π_c = Σ_{i≤r} uᵢuᵢᴴ` of the true covariance.
pub fn true_projectors(model: &CovarianceModel) -> ProjectorPair {
    ProjectorPair::from_basis(model.basis())
}

/// Projector on the `r` leading SCM eigenvectors.
pub fn estimated_projectors(samples: &SampleSet, r: usize) -> Result<ProjectorPair> {
    let m = samples.dim();
    if r >= m {
        return Err(Error::RankTooLarge { rank: r, dim: m });
    }
    let basis = ComplexMatrix::from_fn(m, r, |i, j| samples.eig.vectors[(i, j)]);
    Ok(ProjectorPair::from_basis(&basis))
}

/// Leading-`r` SCM subspace straight from the SCM, skipping the full
/// eigenvector computation.
pub fn estimated_complement(scm: &ComplexMatrix, r: usize) -> Result<SubspaceComplement> {
    let m = scm.rows();
    if r >= m {
        return Err(Error::RankTooLarge { rank: r, dim: m });
    }
    Ok(SubspaceComplement {
        basis: hermitian_eig_leading(scm, r)?.vectors,
    })
}

/// `w_opt = R⁻¹a`, `ŵ = R̂⁻¹a` (absent when K < m), `w_LR = Π⊥a`, `ŵ_LR = Π̂⊥a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filters {
    pub w_opt: Vec<C64>,
    pub w_hat: Option<Vec<C64>>,
    pub w_lr: Vec<C64>,
    pub w_hat_lr: Vec<C64>,
}

pub fn filters(model: &CovarianceModel, samples: &SampleSet, a: &[C64]) -> Result<Filters> {
    check_dim(model, a)?;
    let (m, k) = (model.dim(), samples.k);
    let w_hat = if k < m {
        None
    } else {
        Some(samples.eig.solve(a).map_err(|e| match e {
            Error::Singular { .. } => Error::AdaptiveFilterUnavailable { k, m },
            other => other,
        })?)
    };
    let estimated = estimated_projectors(samples, model.rank())?;
    Ok(Filters {
        w_opt: model.inverse_apply(a),
        w_hat,
        w_lr: true_projectors(model).apply_complement(a),
        w_hat_lr: estimated.apply_complement(a),
    })
}

/// `ρ̂ = |aᴴR̂⁻¹a|² / [(aᴴR̂⁻¹RR̂⁻¹a)(aᴴR⁻¹a)]`; needs `K ≥ m + 2`.
pub fn sinr_loss_fullrank(samples: &SampleSet, model: &CovarianceModel, a: &[C64]) -> Result<f64> {
    let (m, k) = (model.dim(), samples.k);
    if k < m + 2 {
        return Err(Error::AdaptiveFilterUnavailable { k, m });
    }
    sinr_loss_with_estimate(&samples.eig, model, a)
}

/// Full-rank SINR loss with an arbitrary covariance estimate given by its
/// eigendecomposition (passing the eigendecomposition of R yields 1).
pub fn sinr_loss_with_estimate(estimate: &HermitianEig, model: &CovarianceModel, a: &[C64]) -> Result<f64> {
    check_dim(model, a)?;
    let w = estimate.solve(a)?;
    let num = inner(a, &w).norm_sqr();
    let den = inner(&w, &model.apply(&w)).re * inner(a, &model.inverse_apply(a)).re;
    Ok(num / den)
}

/// `ρ_LR = |aᴴΠ⊥a|² / [(aᴴΠ⊥RΠ⊥a)(aᴴR⁻¹a)]` for the supplied complement
/// operator (true, estimated or deterministic-equivalent).
pub fn sinr_loss_lr(model: &CovarianceModel, a: &[C64], projector: &impl ComplementOperator) -> Result<f64> {
    check_dim(model, a)?;
    let w = projector.apply_complement(a);
    let filtered_power = inner(&w, &model.apply(&w)).re;
    if filtered_power <= DEGENERATE_STEERING * norm(a).powi(2) * model.spectral_norm() {
        return Err(Error::DegenerateSteering);
    }
    let num = inner(a, &w).norm_sqr();
    Ok(num / (filtered_power * inner(a, &model.inverse_apply(a)).re))
}

fn check_dim(model: &CovarianceModel, a: &[C64]) -> Result<()> {
    if a.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: a.len(),
        });
    }
    Ok(())
}

/// Empirical and predicted SINR losses for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrLossReport {
    /// Adaptive full-rank loss; absent when not measured or K < m + 2.
    pub rho_hat: Option<f64>,
    /// Low-rank loss with the true projector.
    pub rho_lr: f64,
    /// Adaptive low-rank loss; absent when not measured.
    pub rho_hat_lr: Option<f64>,
    /// `1 − c`; absent outside its regime (c ≥ 1).
    pub pred_fullrank: Option<f64>,
    /// Low-rank loss with the deterministic-equivalent projector.
    pub pred_lr_spiked: f64,
    /// `1 − r/K`; absent when K ≤ r.
    pub pred_gifo: Option<f64>,
    /// Reason for any absent prediction.
    pub flag: Option<String>,
}

/// Right-continuous empirical CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// `(1/m)·#{k : λ_k ≤ x}`
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

pub fn empirical_cdf(eigvals: &[f64]) -> Result<EmpiricalCdf> {
    if eigvals.is_empty() {
        return Err(Error::InvalidArgument("empirical CDF of an empty sample".into()));
    }
    let mut sorted = eigvals.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

/// `(1/m)·Σ 1/(λᵢ − z)` for `Im z > 0`.
pub fn empirical_stieltjes(eigvals: &[f64], z: C64) -> Result<C64> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument(format!("Stieltjes transform needs Im z > 0, got {z}")));
    }
    if eigvals.is_empty() {
        return Err(Error::InvalidArgument("Stieltjes transform of an empty sample".into()));
    }
    let sum: C64 = eigvals.iter().map(|&l| 1.0 / (C64::new(l, 0.0) - z)).sum();
    Ok(sum / eigvals.len() as f64)
}

/// ε-smoothed density `(1/π)·Im b(x + iε)`; tends to the density as ε → 0.
pub fn pdf_from_stieltjes(stieltjes: impl Fn(C64) -> C64, x: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing must be positive, got {eps}")));
    }
    Ok(stieltjes(C64::new(x, eps)).im / std::f64::consts::PI)
}
