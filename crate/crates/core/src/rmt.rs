//! Large-dimensional predictions under the spiked model: Marčenko–Pastur
//! law, separation condition, deterministic-equivalent projector, structured
//! quadratic forms and SINR-loss limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{sinr_loss_lr, ComplementOperator};
use crate::linalg::{inner, quad_form, ComplexMatrix, C64};
use crate::scenario::{spiked_spectrum, steering_vector, CovarianceModel, SpikedSpectrum};

/// Distance to `√c` inside which a violated separation is flagged as
/// near-boundary.
const NEAR_BOUNDARY: f64 = 1e-9;

/// Marčenko–Pastur law of aspect ratio `c` (unit variance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpLaw {
    pub c: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Point mass at zero, `max(0, 1 − 1/c)`.
    pub atom_at_zero: f64,
}

impl MpLaw {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
        }
        let sc = c.sqrt();
        Ok(Self {
            c,
            lambda_minus: (1.0 - sc).powi(2),
            lambda_plus: (1.0 + sc).powi(2),
            atom_at_zero: (1.0 - 1.0 / c).max(0.0),
        })
    }

    /// Continuous part of the density.
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.lambda_minus || x >= self.lambda_plus || x <= 0.0 {
            return 0.0;
        }
        ((self.lambda_plus - x) * (x - self.lambda_minus)).sqrt() / (2.0 * std::f64::consts::PI * self.c * x)
    }
}

/// Continuous MP density at `x`; zero outside `(λ₋, λ₊)` or for invalid `c`.
pub fn mp_pdf(x: f64, c: f64) -> f64 {
    MpLaw::new(c).map_or(0.0, |law| law.pdf(x))
}

/// `ωᵢ − √c` per spike; separation holds iff every margin is positive.
pub fn separation_margin(spectrum: &SpikedSpectrum) -> Vec<f64> {
    let sc = spectrum.c.sqrt();
    spectrum.omegas.iter().map(|w| w - sc).collect()
}

/// Fails with `SeparationViolated` unless every margin is strictly positive.
pub fn check_separation(spectrum: &SpikedSpectrum) -> Result<()> {
    let margins = separation_margin(spectrum);
    let indices: Vec<usize> = margins
        .iter()
        .enumerate()
        .filter(|(_, &d)| !(d > 0.0))
        .map(|(i, _)| i)
        .collect();
    if indices.is_empty() {
        return Ok(());
    }
    let near_boundary = indices.iter().any(|&i| margins[i].abs() <= NEAR_BOUNDARY);
    Err(Error::SeparationViolated {
        indices,
        near_boundary,
    })
}

/// `Π̄ = Σ_{i≤r} ψᵢuᵢuᵢᴴ + Σ_{i>r} uᵢuᵢᴴ = I − Σ_{i≤r} χᵢuᵢuᵢᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicProjector {
    /// ψᵢ for the spike directions; the remaining weights are 1.
    pub psis: Vec<f64>,
    pub basis: ComplexMatrix,
}

impl DeterministicProjector {
    pub fn chis(&self) -> Vec<f64> {
        self.psis.iter().map(|p| 1.0 - p).collect()
    }

    /// All m weights, spike directions first.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = self.psis.clone();
        w.resize(self.basis.rows(), 1.0);
        w
    }

    pub fn apply(&self, s: &[C64]) -> Vec<C64> {
        let mut out = s.to_vec();
        for (i, &psi) in self.psis.iter().enumerate() {
            let u = self.basis.column(i);
            let c = inner(&u, s) * (1.0 - psi);
            for (o, ui) in out.iter_mut().zip(&u) {
                *o -= c * ui;
            }
        }
        out
    }

    pub fn dense(&self) -> ComplexMatrix {
        let m = self.basis.rows();
        let mut out = ComplexMatrix::identity(m);
        for (i, chi) in self.chis().into_iter().enumerate() {
            let u = self.basis.column(i);
            for p in 0..m {
                let up = u[p] * chi;
                for (o, uq) in out.row_mut(p).iter_mut().zip(&u) {
                    *o -= up * uq.conj();
                }
            }
        }
        out
    }
}

impl ComplementOperator for DeterministicProjector {
    fn apply_complement(&self, v: &[C64]) -> Vec<C64> {
        self.apply(v)
    }
}

pub fn deterministic_projector(model: &CovarianceModel, c: f64) -> Result<DeterministicProjector> {
    let spectrum = spiked_spectrum(model, c)?;
    check_separation(&spectrum)?;
    Ok(DeterministicProjector {
        psis: spectrum.psis,
        basis: model.basis().clone(),
    })
}

/// Deterministic equivalent `s₁ᴴΠ̄BΠ̄s₂` of `s₁ᴴΠ̂⊥BΠ̂⊥s₂`.
pub fn deterministic_structured_qf(
    s1: &[C64],
    b: &ComplexMatrix,
    s2: &[C64],
    model: &CovarianceModel,
    c: f64,
) -> Result<C64> {
    check_vec(model, s1)?;
    check_vec(model, s2)?;
    let proj = deterministic_projector(model, c)?;
    quad_form(&proj.apply(s1), b, &proj.apply(s2))
}

/// `η(j₁, j₂) = χ_{j₁}χ_{j₂}·s₁ᴴΠ_{j₁}BΠ_{j₂}s₂` with `Π_j = u_ju_jᴴ`
/// (0-based spike indices).
pub fn deterministic_base_qf(
    j1: usize,
    j2: usize,
    s1: &[C64],
    b: &ComplexMatrix,
    s2: &[C64],
    model: &CovarianceModel,
    c: f64,
) -> Result<C64> {
    let r = model.rank();
    for j in [j1, j2] {
        if j >= r {
            return Err(Error::IndexOutOfRange { index: j, rank: r });
        }
    }
    check_vec(model, s1)?;
    check_vec(model, s2)?;
    let spectrum = spiked_spectrum(model, c)?;
    check_separation(&spectrum)?;
    let u1 = model.eigenvector(j1)?;
    let u2 = model.eigenvector(j2)?;
    let chis = spectrum.chis[j1] * spectrum.chis[j2];
    Ok(inner(s1, &u1) * quad_form(&u1, b, &u2)? * inner(&u2, s2) * chis)
}

/// `s₁ᴴBs₂ − Σᵢ χᵢ(s₁ᴴΠᵢBs₂ + s₁ᴴBΠᵢs₂) + Σ_{j₁,j₂} η(j₁, j₂)`: the
/// term-by-term expansion of `s₁ᴴΠ̄BΠ̄s₂`.
pub fn assembled_structured_qf(
    s1: &[C64],
    b: &ComplexMatrix,
    s2: &[C64],
    model: &CovarianceModel,
    c: f64,
) -> Result<C64> {
    check_vec(model, s1)?;
    check_vec(model, s2)?;
    let spectrum = spiked_spectrum(model, c)?;
    check_separation(&spectrum)?;
    let r = model.rank();
    let bs2 = b.mul_vec(s2)?;
    let s1b = b.adjoint_mul_vec(s1)?; // Bᴴs₁, so s₁ᴴB·v = inner(Bᴴs₁, v)
    let mut total = inner(s1, &bs2);
    for i in 0..r {
        let u = model.eigenvector(i)?;
        let left = inner(s1, &u) * inner(&u, &bs2);
        let right = inner(&s1b, &u) * inner(&u, s2);
        total -= (left + right) * spectrum.chis[i];
    }
    for j1 in 0..r {
        for j2 in 0..r {
            total += deterministic_base_qf(j1, j2, s1, b, s2, model, c)?;
        }
    }
    Ok(total)
}

/// `1 − c`, defined for `0 < c < 1`.
pub fn predict_sinr_loss_fullrank(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
    }
    if c >= 1.0 {
        return Err(Error::InvalidRegime(format!(
            "full-rank limit needs c < 1 (sample covariance singular), got c = {c}"
        )));
    }
    Ok(1.0 - c)
}

/// Low-rank SINR loss with `Π⊥` replaced by the deterministic equivalent.
pub fn predict_sinr_loss_lr(model: &CovarianceModel, a: &[C64], c: f64) -> Result<f64> {
    sinr_loss_lr(model, a, &deterministic_projector(model, c)?)
}

/// `1 − r/K`, defined for `K > r`.
pub fn predict_gifo_baseline(r: usize, k: usize) -> Result<f64> {
    if k <= r {
        return Err(Error::InvalidArgument(format!("baseline needs K > r (K = {k}, r = {r})")));
    }
    Ok(1.0 - r as f64 / k as f64)
}

/// Where the spiked low-rank prediction collapses near a jammer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceBreak {
    /// First grid angle, scanning towards the jammer, below half the plateau.
    pub theta_deg: Option<f64>,
    /// Median prediction on the reference grid more than 15° from the jammer.
    pub plateau: f64,
    pub jammer_deg: f64,
}

/// Reference grid for the far-field plateau: −89.5° … 89.5° by 0.5°.
fn plateau_grid() -> impl Iterator<Item = f64> {
    (0..=358).map(|i| -89.5 + 0.5 * i as f64)
}

/// Locates the performance break of the spiked prediction on `theta_grid`
/// relative to the jammer nearest the grid centre.
pub fn performance_break(
    model: &CovarianceModel,
    jammer_aoas_deg: &[f64],
    spacing_over_wavelength: f64,
    k: usize,
    theta_grid: &[f64],
) -> Result<PerformanceBreak> {
    if theta_grid.is_empty() || jammer_aoas_deg.is_empty() {
        return Err(Error::InvalidArgument("performance break needs angles and jammers".into()));
    }
    let m = model.dim();
    let c = m as f64 / k as f64;
    let projector = deterministic_projector(model, c)?;
    let predict = |theta: f64| -> Result<Option<f64>> {
        match sinr_loss_lr(model, &steering_vector(theta, m, spacing_over_wavelength), &projector) {
            Ok(v) => Ok(Some(v)),
            Err(Error::DegenerateSteering) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (lo, hi) = theta_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &t| (l.min(t), h.max(t)));
    let centre = 0.5 * (lo + hi);
    let jammer = jammer_aoas_deg
        .iter()
        .copied()
        .min_by(|a, b| (a - centre).abs().total_cmp(&(b - centre).abs()))
        .expect("non-empty");

    let mut far = Vec::new();
    for theta in plateau_grid().filter(|t| (t - jammer).abs() > 15.0) {
        if let Some(v) = predict(theta)? {
            far.push(v);
        }
    }
    let plateau = median(&mut far);

    let mut order: Vec<usize> = (0..theta_grid.len()).collect();
    order.sort_by(|&i, &j| {
        let (di, dj) = ((theta_grid[i] - jammer).abs(), (theta_grid[j] - jammer).abs());
        dj.total_cmp(&di).then(i.cmp(&j))
    });
    let mut theta_deg = None;
    for i in order {
        if let Some(v) = predict(theta_grid[i])? {
            if v < 0.5 * plateau {
                theta_deg = Some(theta_grid[i]);
                break;
            }
        }
    }
    Ok(PerformanceBreak {
        theta_deg,
        plateau,
        jammer_deg: jammer,
    })
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn check_vec(model: &CovarianceModel, v: &[C64]) -> Result<()> {
    if v.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: v.len(),
        });
    }
    Ok(())
}
