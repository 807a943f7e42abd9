//! Explicit perturbations of the canonical blocks with closed-form pencil
//! spectra, and the machinery to verify the predictions numerically.
//!
//! Each family perturbs one canonical block into a matrix whose palindromic
//! pencil has known, pairwise distinct eigenvalues:
//!
//! * even `Γ_k`: an anti-diagonal perturbation splits the pencil into `k/2`
//!   scalar pairs with eigenvalues `α(1+ε_{2j}) / (α^⋆(1+ε_{2j-1}))` and
//!   their reciprocal partners;
//! * odd `Γ_k`: the same with a fixed central entry, eigenvalues
//!   `α(-1+ε_{2j}) / (α^⋆(1+ε_{2j-1}))`, partners, and the unit eigenvalue
//!   `-α/α^⋆`;
//! * `H_{2k}(μ)`: a diagonal perturbation of the bottom-left block moves the
//!   eigenvalues to `-(|μ|+ε_i)·e^{iφ}` and partners, `φ = arg μ`.

use crate::blocks::{gamma_block, h_block, UNIT_MODULUS_TOL};
use crate::classify::{classify_generic_full, BundleClass, ClassifyOptions};
use crate::error::{Error, Result};
use crate::matrix::{direct_sum, CMatrix, Complex, StarKind};
use crate::spectrum::{match_spectra, pencil_eigenvalues, PredictedSpectrum, Spectrum};

const ONE: Complex = Complex::new(1.0, 0.0);

fn check_alpha(alpha: Complex, star: StarKind) -> Result<()> {
    match star {
        StarKind::ConjugateTranspose => {
            if (alpha.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "|α| = 1 required, got |α| = {}",
                    alpha.norm()
                )));
            }
        }
        StarKind::Transpose => {
            if alpha != ONE {
                return Err(Error::InvalidParameter(format!(
                    "α must be 1 under transpose, got {alpha}"
                )));
            }
        }
    }
    Ok(())
}

fn check_positive(eps: &[f64]) -> Result<()> {
    if eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter(
            "perturbation magnitudes must be positive and finite".into(),
        ));
    }
    Ok(())
}

/// Default schedule `ε_j = j·δ` for the even Γ perturbation.
pub fn gamma_even_eps_schedule(k: usize, delta: f64) -> Result<Vec<f64>> {
    if k == 0 || k % 2 != 0 {
        return Err(Error::InvalidParameter("k must be even and positive".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("δ must be positive".into()));
    }
    Ok((1..=k).map(|j| j as f64 * delta).collect())
}

/// Default schedule `ε_j = j·δ` for the odd Γ perturbation; the closed-form
/// spectrum needs `δ < 1/k` to keep the perturbed moduli inside the circle.
pub fn gamma_odd_eps_schedule(k: usize, delta: f64) -> Result<Vec<f64>> {
    if k < 3 || k % 2 != 1 {
        return Err(Error::InvalidParameter("k must be odd and at least 3".into()));
    }
    if !(delta > 0.0) || delta >= 1.0 / k as f64 {
        return Err(Error::InvalidParameter(format!(
            "δ must satisfy 0 < δ < 1/k = {}",
            1.0 / k as f64
        )));
    }
    Ok((1..k).map(|j| j as f64 * delta).collect())
}

/// Strictly decreasing default schedule `ε_i = (k+1-i)·δ` for the H
/// perturbation.
pub fn h_eps_schedule(k: usize, delta: f64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::ZeroBlockSize);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("δ must be positive".into()));
    }
    Ok((1..=k).map(|i| (k + 1 - i) as f64 * delta).collect())
}

/// Anti-diagonal perturbation of an even Γ block: `α·(Γ_k + Γ_k(ε))`.
/// Ascending from the bottom-left, the anti-diagonal of `Γ_k(ε)` carries
/// `ε_1, -ε_3, ε_5, …`; descending from the top-right it carries
/// `-ε_2, ε_4, -ε_6, …`.
pub fn gamma_perturbation_even(
    k: usize,
    alpha: Complex,
    eps: &[f64],
    star: StarKind,
) -> Result<CMatrix> {
    if k == 0 || k % 2 != 0 {
        return Err(Error::InvalidParameter("k must be even and positive".into()));
    }
    if eps.len() != k {
        return Err(Error::InvalidParameter(format!(
            "need {k} perturbation magnitudes, got {}",
            eps.len()
        )));
    }
    check_positive(eps)?;
    check_alpha(alpha, star)?;
    let mut m = gamma_block(k)?;
    for r in 0..k {
        let col = k - 1 - r;
        let value = if r < k / 2 {
            // j-th entry from the top, j = r+1: (-1)^j ε_{2j}.
            let j = r + 1;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * eps[2 * j - 1]
        } else {
            // b-th entry from the bottom, b = k-r: (-1)^(b-1) ε_{2b-1}.
            let b = k - r;
            let sign = if (b - 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * eps[2 * b - 2]
        };
        m[(r, col)] += Complex::new(value, 0.0);
    }
    Ok(m.scale(alpha))
}

/// Closed-form pencil eigenvalues of [`gamma_perturbation_even`], all with
/// multiplicity one.
pub fn gamma_even_predicted(
    k: usize,
    alpha: Complex,
    eps: &[f64],
    star: StarKind,
) -> Result<PredictedSpectrum> {
    if k % 2 != 0 || eps.len() != k {
        return Err(Error::InvalidParameter("k must be even with k magnitudes".into()));
    }
    let astar = star.apply(alpha);
    let mut out = PredictedSpectrum {
        entries: Vec::new(),
        singular: false,
    };
    for j in 1..=k / 2 {
        let lambda = alpha * (1.0 + eps[2 * j - 1]) / (astar * (1.0 + eps[2 * j - 2]));
        out.push(lambda, 1);
        out.push(ONE / star.apply(lambda), 1);
    }
    Ok(out)
}

/// Anti-diagonal perturbation of an odd Γ block with fixed central entry:
/// `α·(Γ_k + Γ̂_k(ε))`, `ε` of length `k-1`.
pub fn gamma_perturbation_odd(
    k: usize,
    alpha: Complex,
    eps: &[f64],
    star: StarKind,
) -> Result<CMatrix> {
    if k < 3 || k % 2 != 1 {
        return Err(Error::InvalidParameter("k must be odd and at least 3".into()));
    }
    if eps.len() != k - 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} perturbation magnitudes, got {}",
            k - 1,
            eps.len()
        )));
    }
    check_positive(eps)?;
    check_alpha(alpha, star)?;
    let half = (k - 1) / 2;
    let mut m = gamma_block(k)?;
    for r in 0..k {
        if r == half {
            continue; // central anti-diagonal entry stays unperturbed
        }
        let col = k - 1 - r;
        let value = if r < half {
            let j = r + 1;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * eps[2 * j - 1]
        } else {
            let b = k - r;
            let sign = if (b - 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * eps[2 * b - 2]
        };
        m[(r, col)] += Complex::new(value, 0.0);
    }
    Ok(m.scale(alpha))
}

/// Closed-form pencil eigenvalues of [`gamma_perturbation_odd`]: the scalar
/// pairs plus the persistent unit eigenvalue `-α/α^⋆`.
pub fn gamma_odd_predicted(
    k: usize,
    alpha: Complex,
    eps: &[f64],
    star: StarKind,
) -> Result<PredictedSpectrum> {
    if k < 3 || k % 2 != 1 || eps.len() != k - 1 {
        return Err(Error::InvalidParameter(
            "k must be odd ≥ 3 with k-1 magnitudes".into(),
        ));
    }
    let astar = star.apply(alpha);
    let mut out = PredictedSpectrum {
        entries: Vec::new(),
        singular: false,
    };
    for j in 1..=(k - 1) / 2 {
        let lambda = alpha * (-1.0 + eps[2 * j - 1]) / (astar * (1.0 + eps[2 * j - 2]));
        out.push(lambda, 1);
        out.push(ONE / star.apply(lambda), 1);
    }
    out.push(-alpha / astar, 1);
    Ok(out)
}

/// Diagonal perturbation of `H_{2k}(μ)`: adds `diag(ε_i·e^{iφ})` to the
/// bottom-left block, `φ = arg μ`. Magnitudes must be strictly decreasing.
pub fn h_perturbation(k: usize, mu: Complex, eps: &[f64], _star: StarKind) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::ZeroBlockSize);
    }
    if eps.len() != k {
        return Err(Error::InvalidParameter(format!(
            "need {k} perturbation magnitudes, got {}",
            eps.len()
        )));
    }
    check_positive(eps)?;
    if eps.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParameter(
            "perturbation magnitudes must be strictly decreasing".into(),
        ));
    }
    if mu.norm() < 1.0 - UNIT_MODULUS_TOL {
        return Err(Error::InvalidParameter(format!(
            "|μ| ≥ 1 required, got {}",
            mu.norm()
        )));
    }
    let phase = Complex::from_polar(1.0, mu.arg());
    let mut m = h_block(k, mu)?;
    for i in 0..k {
        m[(k + i, i)] += phase * eps[i];
    }
    Ok(m)
}

/// Closed-form pencil eigenvalues of [`h_perturbation`]:
/// `λ_i = -(|μ|+ε_i)·e^{iφ}` and the reciprocal partners.
pub fn h_predicted(k: usize, mu: Complex, eps: &[f64], star: StarKind) -> Result<PredictedSpectrum> {
    if eps.len() != k {
        return Err(Error::InvalidParameter("need k magnitudes".into()));
    }
    let phi = mu.arg();
    let mut out = PredictedSpectrum {
        entries: Vec::new(),
        singular: false,
    };
    for &e in eps {
        let lambda = -Complex::from_polar(mu.norm() + e, phi);
        out.push(lambda, 1);
        out.push(ONE / star.apply(lambda), 1);
    }
    Ok(out)
}

/// The deformation of `I_{2·count}` into a generic transpose-case form:
/// a direct sum of `count` blocks `[[0, 1], [1 + 1/(j·k), 0]]`.
pub fn identity_to_hyperbolic_sequence(count: usize, k: usize) -> Result<CMatrix> {
    if count == 0 || k == 0 {
        return Err(Error::InvalidParameter("count and k must be positive".into()));
    }
    let blocks: Vec<CMatrix> = (1..=count)
        .map(|j| {
            let mut b = CMatrix::zeros(2, 2);
            b[(0, 1)] = ONE;
            b[(1, 0)] = Complex::new(1.0 + 1.0 / (j * k) as f64, 0.0);
            b
        })
        .collect();
    direct_sum(&blocks)
}

/// Which sign convention of the predicted list matched the computed
/// spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchedConvention {
    /// Predicted values matched as stated.
    Direct,
    /// Predicted values matched after a global `λ ↦ -λ` flip.
    Negated,
}

/// Numerical confirmation of a closed-form prediction.
#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub perturbed: CMatrix,
    pub predicted: PredictedSpectrum,
    pub computed: Spectrum,
    pub max_rel_error: f64,
    pub convention: MatchedConvention,
    pub classified: BundleClass,
}

/// Compute the pencil spectrum of `perturbed`, match it against `predicted`
/// under both global sign conventions, and classify the matrix. Fails when
/// neither convention matches within `10·tol`.
pub fn verify_prediction(
    perturbed: &CMatrix,
    predicted: &PredictedSpectrum,
    star: StarKind,
    tol: f64,
) -> Result<PerturbationReport> {
    let computed = pencil_eigenvalues(perturbed, star)?;
    let direct = match_spectra(&predicted.entries, &computed.values)?;
    let negated_entries: Vec<(Complex, usize)> = predicted
        .entries
        .iter()
        .map(|&(v, m)| (-v, m))
        .collect();
    let negated = match_spectra(&negated_entries, &computed.values)?;

    let (convention, error) = if direct.max_rel_error() <= negated.max_rel_error() {
        (MatchedConvention::Direct, direct.max_rel_error())
    } else {
        (MatchedConvention::Negated, negated.max_rel_error())
    };
    if error > 10.0 * tol {
        return Err(Error::PredictionMismatch { best_error: error });
    }
    let classified = classify_generic_full(perturbed, star, ClassifyOptions::default())?.class;
    Ok(PerturbationReport {
        perturbed: perturbed.clone(),
        predicted: predicted.clone(),
        computed,
        max_rel_error: error,
        convention,
        classified,
    })
}
