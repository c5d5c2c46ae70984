//! ULA jamming scenario: steering vectors, low-rank-plus-white covariance,
//! spiked spectrum and synthetic secondary data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complex_gauss_matrix, hermitian_eig, inner, norm, ComplexMatrix, HermitianEig, C64, ZERO,
};

/// Collinearity above which two jammer steering vectors are rejected.
const COLLINEARITY_LIMIT: f64 = 1.0 - 1e-10;

fn default_sigma2() -> f64 {
    1.0
}

fn default_spacing() -> f64 {
    0.5
}

/// Jamming scenario. Angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of sensors.
    pub m: usize,
    /// Jammer count; inferred from the AoA list when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    pub jammer_aoas_deg: Vec<f64>,
    /// Diagonal of Λ, strictly decreasing.
    pub jammer_powers: Vec<f64>,
    /// JNR / tr(Λ) in dB; the interference term is scaled by `10^{jnr_db/10}`.
    pub jnr_db: f64,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default = "default_spacing")]
    pub spacing_over_wavelength: f64,
    /// Rescale R so that `tr(R) = m·σ²` instead of using the raw JNR scaling.
    #[serde(default)]
    pub trace_normalized: bool,
}

impl ScenarioConfig {
    /// 100 sensors, jammers at −20°/0°/20° with Λ = diag(6, 2, 1), 10 dB.
    pub fn paper() -> Self {
        Self {
            m: 100,
            r: None,
            jammer_aoas_deg: vec![-20.0, 0.0, 20.0],
            jammer_powers: vec![6.0, 2.0, 1.0],
            jnr_db: 10.0,
            sigma2: 1.0,
            spacing_over_wavelength: 0.5,
            trace_normalized: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.r.unwrap_or(self.jammer_aoas_deg.len())
    }

    /// `s = 10^{jnr_db/10}`.
    pub fn jnr_scale(&self) -> f64 {
        10f64.powf(self.jnr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        let bad = |field, reason: &str| {
            Err(Error::InvalidScenario {
                field,
                reason: reason.to_string(),
            })
        };
        if self.m < 2 {
            return bad("m", "at least two sensors are required");
        }
        if r == 0 || r >= self.m {
            return bad("r", "jammer count must satisfy 1 <= r < m");
        }
        if self.jammer_aoas_deg.len() != r {
            return bad("jammer_aoas_deg", "length must equal r");
        }
        if self.jammer_powers.len() != r {
            return bad("jammer_powers", "length must equal r");
        }
        if self.jammer_aoas_deg.iter().any(|a| !a.is_finite()) {
            return bad("jammer_aoas_deg", "angles must be finite");
        }
        if self.jammer_powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return bad("jammer_powers", "powers must be positive and finite");
        }
        if self.jammer_powers.windows(2).any(|w| w[0] <= w[1]) {
            return bad("jammer_powers", "powers must be strictly decreasing");
        }
        if !self.jnr_db.is_finite() {
            return bad("jnr_db", "must be finite");
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2", "must be positive and finite");
        }
        if !(self.spacing_over_wavelength > 0.0 && self.spacing_over_wavelength.is_finite()) {
            return bad("spacing_over_wavelength", "must be positive and finite");
        }
        Ok(())
    }
}

/// True covariance `R = U·diag(λ − σ²)·Uᴴ + σ²I` with orthonormal `U` (m×r).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModel {
    covariance: ComplexMatrix,
    spikes: Vec<f64>,
    basis: ComplexMatrix,
    sigma2: f64,
}

impl CovarianceModel {
    /// Builds the model from an orthonormal basis and spike eigenvalues
    /// (non-increasing, all above `sigma2`).
    pub fn from_spikes(basis: ComplexMatrix, spikes: Vec<f64>, sigma2: f64) -> Result<Self> {
        let (m, r) = (basis.rows(), basis.cols());
        if spikes.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                actual: spikes.len(),
            });
        }
        if r >= m {
            return Err(Error::RankTooLarge { rank: r, dim: m });
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidArgument("sigma2 must be positive".into()));
        }
        if spikes.iter().any(|&l| !(l > sigma2 && l.is_finite())) {
            return Err(Error::InvalidArgument(
                "spike eigenvalues must exceed the noise power".into(),
            ));
        }
        if spikes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "spike eigenvalues must be non-increasing".into(),
            ));
        }
        let gram = basis.adjoint().matmul(&basis)?;
        if gram.sub(&ComplexMatrix::identity(r))?.frobenius_norm() > 1e-9 {
            return Err(Error::InvalidArgument("basis must be orthonormal".into()));
        }
        let mut covariance = ComplexMatrix::identity(m).scaled(sigma2);
        for (i, &lam) in spikes.iter().enumerate() {
            let u = basis.column(i);
            let w = lam - sigma2;
            for p in 0..m {
                let up = u[p] * w;
                for (c, uq) in covariance.row_mut(p).iter_mut().zip(&u) {
                    *c += up * uq.conj();
                }
            }
        }
        Ok(Self {
            covariance,
            spikes,
            basis,
            sigma2,
        })
    }

    /// `σ²·I_m` (no spikes).
    pub fn white(m: usize, sigma2: f64) -> Result<Self> {
        Self::from_spikes(ComplexMatrix::zeros(m, 0), Vec::new(), sigma2)
    }

    pub fn dim(&self) -> usize {
        self.covariance.rows()
    }

    pub fn rank(&self) -> usize {
        self.spikes.len()
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// λ₁ ≥ … ≥ λ_r.
    pub fn spikes(&self) -> &[f64] {
        &self.spikes
    }

    /// Full spectrum: spikes followed by σ² with multiplicity m − r.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = self.spikes.clone();
        v.resize(self.dim(), self.sigma2);
        v
    }

    /// Columns are u₁ … u_r.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn eigenvector(&self, i: usize) -> Result<Vec<C64>> {
        if i >= self.rank() {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            });
        }
        Ok(self.basis.column(i))
    }

    /// Dense R.
    pub fn covariance(&self) -> &ComplexMatrix {
        &self.covariance
    }

    pub fn spectral_norm(&self) -> f64 {
        self.spikes.first().copied().unwrap_or(self.sigma2)
    }

    /// Coordinates `uᵢᴴv` of `v` in the spike basis.
    pub fn spike_coords(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rank())
            .map(|i| {
                (0..self.dim())
                    .map(|p| self.basis[(p, i)].conj() * v[p])
                    .sum()
            })
            .collect()
    }

    /// `R v` through the eigenstructure.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.spectral_apply(v, |lam| lam)
    }

    /// `R⁻¹ v` through the eigenstructure.
    pub fn inverse_apply(&self, v: &[C64]) -> Vec<C64> {
        self.spectral_apply(v, |lam| 1.0 / lam)
    }

    fn spectral_apply(&self, v: &[C64], f: impl Fn(f64) -> f64) -> Vec<C64> {
        let base = f(self.sigma2);
        let mut out: Vec<C64> = v.iter().map(|x| x * base).collect();
        let coords = self.spike_coords(v);
        for (i, (&lam, c)) in self.spikes.iter().zip(&coords).enumerate() {
            let w = c * (f(lam) - base);
            for (p, o) in out.iter_mut().enumerate() {
                *o += self.basis[(p, i)] * w;
            }
        }
        out
    }

    /// `R^{1/2}·Y = σY + U·diag(√λ − σ)·UᴴY`.
    pub fn sqrt_mul(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, r) = (self.dim(), self.rank());
        if y.rows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: y.rows(),
            });
        }
        let k = y.cols();
        let sigma = self.sigma2.sqrt();
        // C = diag(√λ − σ)·UᴴY, accumulated row by row of Y
        let mut coef = vec![ZERO; r * k];
        for p in 0..m {
            let yrow = y.row(p);
            for i in 0..r {
                let u = self.basis[(p, i)].conj();
                for (c, yv) in coef[i * k..(i + 1) * k].iter_mut().zip(yrow) {
                    *c += u * yv;
                }
            }
        }
        for (i, &lam) in self.spikes.iter().enumerate() {
            let d = lam.sqrt() - sigma;
            for c in coef[i * k..(i + 1) * k].iter_mut() {
                *c *= d;
            }
        }
        let mut x = y.scaled(sigma);
        for p in 0..m {
            let xrow = x.row_mut(p);
            for i in 0..r {
                let u = self.basis[(p, i)];
                for (xv, c) in xrow.iter_mut().zip(&coef[i * k..(i + 1) * k]) {
                    *xv += u * c;
                }
            }
        }
        Ok(x)
    }
}

/// ULA response `a_k = exp(j·2π·(d/l₀)·k·sin θ)`, `k = 0 … m−1`.
pub fn steering_vector(theta_deg: f64, m: usize, spacing_over_wavelength: f64) -> Vec<C64> {
    let cycles = spacing_over_wavelength * theta_deg.to_radians().sin();
    let frac = cycles - cycles.floor();
    (0..m)
        .map(|k| {
            let turns = (k as f64 * frac).fract();
            C64::from_polar(1.0, std::f64::consts::TAU * turns)
        })
        .collect()
}

/// Orthonormalises `a(θᵢ)/√m` in the given order (Gram–Schmidt, two passes).
pub fn jammer_basis(aoas_deg: &[f64], m: usize, spacing_over_wavelength: f64) -> Result<ComplexMatrix> {
    let scale = 1.0 / (m as f64).sqrt();
    let normalized: Vec<Vec<C64>> = aoas_deg
        .iter()
        .map(|&t| {
            steering_vector(t, m, spacing_over_wavelength)
                .into_iter()
                .map(|z| z * scale)
                .collect()
        })
        .collect();
    for (j, aj) in normalized.iter().enumerate() {
        for (i, ai) in normalized.iter().enumerate().skip(j + 1) {
            if inner(aj, ai).norm() > COLLINEARITY_LIMIT {
                return Err(Error::DegenerateJammers { first: j, second: i });
            }
        }
    }
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(normalized.len());
    for (i, a) in normalized.iter().enumerate() {
        let mut v = a.clone();
        for _ in 0..2 {
            for u in &basis {
                let proj = inner(u, &v);
                for (vk, uk) in v.iter_mut().zip(u) {
                    *vk -= proj * uk;
                }
            }
        }
        let n = norm(&v);
        if n < 1e-10 {
            return Err(Error::DegenerateJammers {
                first: i.saturating_sub(1),
                second: i,
            });
        }
        v.iter_mut().for_each(|z| *z /= n);
        basis.push(v);
    }
    Ok(ComplexMatrix::from_fn(m, basis.len(), |i, j| basis[j][i]))
}

/// `R = s·UΛUᴴ + σ²I` with `s = 10^{jnr_db/10}`.
pub fn build_covariance(cfg: &ScenarioConfig) -> Result<CovarianceModel> {
    cfg.validate()?;
    let s = cfg.jnr_scale();
    let spikes: Vec<f64> = cfg.jammer_powers.iter().map(|p| cfg.sigma2 + s * p).collect();
    let model = build_covariance_with_eigenvalues(cfg, &spikes)?;
    if !cfg.trace_normalized {
        return Ok(model);
    }
    let factor = cfg.m as f64 * cfg.sigma2 / model.covariance().trace().re;
    CovarianceModel::from_spikes(
        model.basis,
        model.spikes.iter().map(|l| l * factor).collect(),
        cfg.sigma2 * factor,
    )
}

/// Covariance with the scenario's jammer basis but explicitly given spike
/// eigenvalues (one per listed AoA, taken in order); noise power `cfg.sigma2`.
pub fn build_covariance_with_eigenvalues(cfg: &ScenarioConfig, spikes: &[f64]) -> Result<CovarianceModel> {
    if spikes.len() > cfg.jammer_aoas_deg.len() {
        return Err(Error::InvalidScenario {
            field: "jammer_aoas_deg",
            reason: format!("{} eigenvalues given but only {} jammer AoAs", spikes.len(), cfg.jammer_aoas_deg.len()),
        });
    }
    let basis = jammer_basis(&cfg.jammer_aoas_deg[..spikes.len()], cfg.m, cfg.spacing_over_wavelength)?;
    CovarianceModel::from_spikes(basis, spikes.to_vec(), cfg.sigma2)
}

/// `τ = 1 + ω + c(1+ω)/ω`: almost-sure limit of the sample spike (σ² = 1).
pub fn spike_limit(omega: f64, c: f64) -> f64 {
    1.0 + omega + c * (1.0 + omega) / omega
}

/// `χ = (1 − c/ω²)/(1 + c/ω)`: asymptotic eigenvector alignment.
pub fn eigvec_alignment(omega: f64, c: f64) -> f64 {
    (1.0 - c / (omega * omega)) / (1.0 + c / omega)
}

/// Spiked-model quantities in σ²-normalised units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikedSpectrum {
    pub omegas: Vec<f64>,
    pub c: f64,
    pub taus: Vec<f64>,
    pub chis: Vec<f64>,
    pub psis: Vec<f64>,
    pub sigma2: f64,
}

impl SpikedSpectrum {
    pub fn from_omegas(omegas: Vec<f64>, c: f64, sigma2: f64) -> Self {
        let taus = omegas.iter().map(|&w| spike_limit(w, c)).collect();
        let chis: Vec<f64> = omegas.iter().map(|&w| eigvec_alignment(w, c)).collect();
        let psis = chis.iter().map(|x| 1.0 - x).collect();
        Self {
            omegas,
            c,
            taus,
            chis,
            psis,
            sigma2,
        }
    }

    /// Sample-spike limits in the model's units, `σ²·τᵢ`.
    pub fn scaled_taus(&self) -> Vec<f64> {
        self.taus.iter().map(|t| t * self.sigma2).collect()
    }
}

/// `ωᵢ = λᵢ/σ² − 1` with the derived τ, χ, ψ at aspect ratio `c = m/K`.
pub fn spiked_spectrum(model: &CovarianceModel, c: f64) -> Result<SpikedSpectrum> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
    }
    let omegas = model.spikes().iter().map(|l| l / model.sigma2() - 1.0).collect();
    Ok(SpikedSpectrum::from_omegas(omegas, c, model.sigma2()))
}

/// Secondary data with its SCM and the SCM's eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub x: ComplexMatrix,
    pub k: usize,
    pub scm: ComplexMatrix,
    pub eig: HermitianEig,
}

impl SampleSet {
    /// Wraps an explicit `m × K` data matrix.
    pub fn from_data(x: ComplexMatrix) -> Result<Self> {
        let k = x.cols();
        if k == 0 {
            return Err(Error::InvalidArgument("at least one snapshot is required".into()));
        }
        let scm = x.gram(1.0 / k as f64);
        let eig = hermitian_eig(&scm)?;
        Ok(Self { x, k, scm, eig })
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }
}

/// `K` snapshots `X = R^{1/2}Y`, `Y` iid CN(0, 1) from `seed`.
pub fn draw_samples(model: &CovarianceModel, k: usize, seed: u64) -> Result<SampleSet> {
    SampleSet::from_data(draw_data(model, k, seed)?)
}

/// Secondary data only, without the eigendecomposition.
pub fn draw_data(model: &CovarianceModel, k: usize, seed: u64) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("at least one snapshot is required".into()));
    }
    model.sqrt_mul(&complex_gauss_matrix(model.dim(), k, seed))
}

/// SCM `(1/K)·X·Xᴴ` of freshly drawn data.
pub fn sample_scm(model: &CovarianceModel, k: usize, seed: u64) -> Result<ComplexMatrix> {
    Ok(draw_data(model, k, seed)?.gram(1.0 / k as f64))
}
