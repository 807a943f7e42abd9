//! Eigenvalues of the palindromic pencil `A + λA^⋆` and the dense complex
//! eigensolver behind them.
//!
//! For invertible `A` the pencil eigenvalues are the eigenvalues of
//! `M = -(A^⋆)^{-1} A`, computed here by unitary Hessenberg reduction and
//! implicitly shifted QR iteration. Eigenvalues whose modulus lands near 1
//! are then polished with inverse iteration on the original pencil, which
//! restores the accuracy that forming `M` costs on ill conditioned inputs:
//! a unit eigenvalue of a `*`-palindromic pencil satisfies
//! `λ = -(x^*Ax)/(x^*A^*x)` at its eigenvector, a quotient of conjugates
//! with modulus exactly 1, and the analogous transpose-case quotient is
//! identically -1.

use crate::blocks::{BlockSpec, CanonicalFormSpec};
use crate::error::{Error, Result};
use crate::lu::LuFactors;
use crate::matrix::{CMatrix, Complex, StarKind};

/// Default unit-modulus tolerance: `||λ|-1| / ‖A‖_F ≤ 1e-14`.
pub const DEFAULT_UNIT_TOL: f64 = 1e-14;

/// Half-width of the `||λ|-1|` band inside which eigenvalues get the
/// pencil-based refinement pass.
const REFINE_WINDOW: f64 = 1e-3;

/// A refined eigenvalue may move at most this far (relative) from the QR
/// output before the refinement is rejected as divergent.
const REFINE_ACCEPT: f64 = 1e-4;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

// ---------------------------------------------------------------------------
// Dense eigensolver: Hessenberg reduction + implicit single-shift QR.
// ---------------------------------------------------------------------------

fn idx(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Reduce to upper Hessenberg form by Hermitian unitary reflectors.
/// Transformations are not accumulated; only eigenvalues are wanted.
fn hessenberg_in_place(h: &mut [Complex], n: usize) {
    for j in 0..n.saturating_sub(2) {
        let m = n - j - 1; // length of the column tail below the diagonal
        let norm = {
            let mut s = 0.0;
            for i in 0..m {
                s += h[idx(n, j + 1 + i, j)].norm_sqr();
            }
            s.sqrt()
        };
        if norm == 0.0 {
            continue;
        }
        let alpha = h[idx(n, j + 1, j)];
        let phase = if alpha == ZERO {
            ONE
        } else {
            alpha / alpha.norm()
        };
        let beta = -phase * norm;
        let mut v = vec![ZERO; m];
        v[0] = alpha - beta;
        for i in 1..m {
            v[i] = h[idx(n, j + 1 + i, j)];
        }
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;

        // Left: rows j+1..n, columns j..n.
        for c in j..n {
            let mut dot = ZERO;
            for i in 0..m {
                dot += v[i].conj() * h[idx(n, j + 1 + i, c)];
            }
            dot *= tau;
            for i in 0..m {
                let dv = v[i] * dot;
                h[idx(n, j + 1 + i, c)] -= dv;
            }
        }
        // Right: columns j+1..n, all rows.
        for r in 0..n {
            let mut dot = ZERO;
            for i in 0..m {
                dot += h[idx(n, r, j + 1 + i)] * v[i];
            }
            dot *= tau;
            for i in 0..m {
                let dv = dot * v[i].conj();
                h[idx(n, r, j + 1 + i)] -= dv;
            }
        }
        h[idx(n, j + 1, j)] = beta;
        for i in 2..=m {
            h[idx(n, j + i, j)] = ZERO;
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [-s̄, c]]` (c real) with
/// `G·[f, g]^T = [r, 0]^T`.
fn givens(f: Complex, g: Complex) -> (f64, Complex) {
    if g == ZERO {
        return (1.0, ZERO);
    }
    if f == ZERO {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = fa / d;
    let s = (f / fa) * (g.conj() / d);
    (c, s)
}

/// Eigenvalues of a 2×2 block, larger-modulus root by the stable quadratic
/// formula and the other from the determinant.
fn eig2(a: Complex, b: Complex, c: Complex, d: Complex) -> (Complex, Complex) {
    let half_tr = (a + d) * 0.5;
    let p = (a - d) * 0.5;
    let q = (p * p + b * c).sqrt();
    let r1 = half_tr + q;
    let r2 = half_tr - q;
    let (big, _small) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
    if big == ZERO {
        return (ZERO, ZERO);
    }
    let det = a * d - b * c;
    (big, det / big)
}

/// Wilkinson shift: the eigenvalue of the trailing 2×2 closest to `h[m][m]`.
fn wilkinson_shift(h: &[Complex], n: usize, m: usize) -> Complex {
    let a = h[idx(n, m - 1, m - 1)];
    let b = h[idx(n, m - 1, m)];
    let c = h[idx(n, m, m - 1)];
    let d = h[idx(n, m, m)];
    let p = (a - d) * 0.5;
    let bc = b * c;
    let mut q = (p * p + bc).sqrt();
    if p.re * q.re + p.im * q.im < 0.0 {
        q = -q;
    }
    let den = p + q;
    if den == ZERO {
        d
    } else {
        d - bc / den
    }
}

/// Eigenvalues of an upper Hessenberg matrix by implicitly shifted QR with
/// deflation. Fails after `30·n²` sweeps without convergence.
fn qr_eigenvalues(h: &mut [Complex], n: usize) -> Result<Vec<Complex>> {
    let eps = f64::EPSILON;
    let hnorm: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let floor_tol = eps * hnorm.max(f64::MIN_POSITIVE);
    let mut eigs = vec![ZERO; n];
    let max_sweeps = (30 * n * n).max(60);
    let mut sweeps = 0usize;
    let mut stagnation = 0usize;
    let mut m = n as isize - 1;

    while m >= 0 {
        let mu = m as usize;
        // Find the start of the active block, zeroing negligible subdiagonals.
        let mut l = mu;
        while l > 0 {
            let sub = h[idx(n, l, l - 1)].norm();
            let mut tol = eps * (h[idx(n, l - 1, l - 1)].norm() + h[idx(n, l, l)].norm());
            if tol == 0.0 {
                tol = floor_tol;
            }
            if sub <= tol {
                h[idx(n, l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }

        if l == mu {
            eigs[mu] = h[idx(n, mu, mu)];
            m -= 1;
            stagnation = 0;
            continue;
        }
        if l + 1 == mu {
            let (e1, e2) = eig2(
                h[idx(n, l, l)],
                h[idx(n, l, mu)],
                h[idx(n, mu, l)],
                h[idx(n, mu, mu)],
            );
            eigs[l] = e1;
            eigs[mu] = e2;
            m -= 2;
            stagnation = 0;
            continue;
        }

        sweeps += 1;
        stagnation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NumericalFailure { iterations: sweeps });
        }
        let sigma = if stagnation % 10 == 0 {
            // Exceptional shift to break limit cycles.
            h[idx(n, mu, mu)] + Complex::new(0.75 * h[idx(n, mu, mu - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h, n, mu)
        };

        // Implicit single-shift sweep over the active block l..=mu.
        let mut x = h[idx(n, l, l)] - sigma;
        let mut y = h[idx(n, l + 1, l)];
        for j in l..mu {
            let (c, s) = givens(x, y);
            let col0 = if j == l { l } else { j - 1 };
            for col in col0..=mu {
                let a = h[idx(n, j, col)];
                let b = h[idx(n, j + 1, col)];
                h[idx(n, j, col)] = c * a + s * b;
                h[idx(n, j + 1, col)] = -s.conj() * a + c * b;
            }
            let row_end = mu.min(j + 2);
            for row in l..=row_end {
                let a = h[idx(n, row, j)];
                let b = h[idx(n, row, j + 1)];
                h[idx(n, row, j)] = c * a + s.conj() * b;
                h[idx(n, row, j + 1)] = -s * a + c * b;
            }
            if j + 1 < mu {
                x = h[idx(n, j + 1, j)];
                y = h[idx(n, j + 2, j)];
            }
        }
    }
    Ok(eigs)
}

/// Peel off eigenvalues that a symmetric permutation exposes as (nearly)
/// decoupled: a row or column whose off-diagonal mass within the active set
/// is at rounding level contributes its diagonal entry directly. Discarding
/// that mass is a backward perturbation of the same size the QR iteration
/// commits, and for matrices that are triangular up to solver fill (such as
/// the pencil reductions of canonical blocks, where clustered eigenvalues
/// would otherwise splash by `eps^(1/k)`), it recovers the spectrum to
/// working accuracy.
fn isolate_decoupled(m: &[Complex], n: usize, eigs: &mut Vec<Complex>) -> Vec<usize> {
    let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tau = 4.0 * f64::EPSILON * norm;
    let mut active: Vec<bool> = vec![true; n];
    let mut remaining = n;
    loop {
        let mut changed = false;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let row_off: f64 = (0..n)
                .filter(|&j| j != i && active[j])
                .map(|j| m[idx(n, i, j)].norm())
                .sum();
            if row_off <= tau {
                eigs.push(m[idx(n, i, i)]);
                active[i] = false;
                remaining -= 1;
                changed = true;
                continue;
            }
            let col_off: f64 = (0..n)
                .filter(|&j| j != i && active[j])
                .map(|j| m[idx(n, j, i)].norm())
                .sum();
            if col_off <= tau {
                eigs.push(m[idx(n, i, i)]);
                active[i] = false;
                remaining -= 1;
                changed = true;
            }
        }
        if !changed || remaining == 0 {
            break;
        }
    }
    (0..n).filter(|&i| active[i]).collect()
}

/// Eigenvalues of a dense complex square matrix.
pub fn matrix_eigenvalues(a: &CMatrix) -> Result<Vec<Complex>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut eigs = Vec::with_capacity(n);
    let kept = isolate_decoupled(a.entries(), n, &mut eigs);
    let m = kept.len();
    if m == 0 {
        return Ok(eigs);
    }
    let mut h = vec![ZERO; m * m];
    for (r, &i) in kept.iter().enumerate() {
        for (c, &j) in kept.iter().enumerate() {
            h[idx(m, r, c)] = a[(i, j)];
        }
    }
    if m == 1 {
        eigs.push(h[0]);
        return Ok(eigs);
    }
    hessenberg_in_place(&mut h, m);
    eigs.extend(qr_eigenvalues(&mut h, m)?);
    Ok(eigs)
}

// ---------------------------------------------------------------------------
// Pencil spectrum.
// ---------------------------------------------------------------------------

/// Modulus class of a pencil eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusLabel {
    Inside,
    Unit,
    Outside,
}

/// How `||λ| - 1|` is compared against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitRule {
    /// `||λ|-1| / ‖A‖_F ≤ tol` — the scale-dependent rule.
    ScaledByNorm { tol: f64 },
    /// `||λ|-1| ≤ tol` — scale-free alternative.
    Absolute { tol: f64 },
}

impl Default for UnitRule {
    fn default() -> Self {
        UnitRule::ScaledByNorm { tol: DEFAULT_UNIT_TOL }
    }
}

/// Eigenvalues of `A + λA^⋆` with modulus labels.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex>,
    pub moduli: Vec<f64>,
    pub labels: Vec<ModulusLabel>,
    /// Frobenius norm of the source matrix, used by the scaled unit rule.
    pub source_norm: f64,
}

impl Spectrum {
    fn from_values(values: Vec<Complex>, source_norm: f64) -> Self {
        let moduli: Vec<f64> = values.iter().map(|z| z.norm()).collect();
        let labels = vec![ModulusLabel::Outside; values.len()];
        let mut s = Spectrum {
            values,
            moduli,
            labels,
            source_norm,
        };
        s.count_unit_with(UnitRule::default());
        s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Relabel with the scaled rule at tolerance `unit_tol` and return the
    /// number of unit eigenvalues.
    pub fn count_unit(&mut self, unit_tol: f64) -> usize {
        self.count_unit_with(UnitRule::ScaledByNorm { tol: unit_tol })
    }

    /// Relabel with an explicit rule and return the unit count.
    pub fn count_unit_with(&mut self, rule: UnitRule) -> usize {
        let bound = match rule {
            UnitRule::ScaledByNorm { tol } => tol * self.source_norm,
            UnitRule::Absolute { tol } => tol,
        };
        let mut count = 0;
        for (j, &r) in self.moduli.iter().enumerate() {
            self.labels[j] = if (r - 1.0).abs() <= bound {
                count += 1;
                ModulusLabel::Unit
            } else if r < 1.0 {
                ModulusLabel::Inside
            } else {
                ModulusLabel::Outside
            };
        }
        count
    }

    pub fn unit_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l == ModulusLabel::Unit)
            .count()
    }
}

/// Options for [`pencil_eigenvalues_with`].
#[derive(Debug, Clone, Copy)]
pub struct PencilOptions {
    /// Polish eigenvalues with `||λ|-1|` below this bound by inverse
    /// iteration on the pencil. Zero disables refinement.
    pub refine_window: f64,
}

impl Default for PencilOptions {
    fn default() -> Self {
        PencilOptions {
            refine_window: REFINE_WINDOW,
        }
    }
}

/// Eigenvalues of the pencil `A + λA^⋆` for invertible `A`, with the default
/// near-unit refinement pass.
pub fn pencil_eigenvalues(a: &CMatrix, star: StarKind) -> Result<Spectrum> {
    pencil_eigenvalues_with(a, star, PencilOptions::default())
}

pub fn pencil_eigenvalues_with(
    a: &CMatrix,
    star: StarKind,
    opts: PencilOptions,
) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let astar = a.star(star);
    let f = LuFactors::factor(&astar).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::NearSingular { ratio: 0.0 },
        other => other,
    })?;
    if f.is_near_singular() {
        return Err(Error::NearSingular {
            ratio: f.pivot_ratio(),
        });
    }
    let m = f.solve(a)?.scale(Complex::new(-1.0, 0.0));
    let mut values = matrix_eigenvalues(&m)?;
    if opts.refine_window > 0.0 {
        refine_near_unit(a, &astar, star, &mut values, opts.refine_window);
    }
    Ok(Spectrum::from_values(values, a.frobenius_norm()))
}

/// Fixed, generic start vector for inverse iteration.
fn iteration_seed(n: usize) -> Vec<Complex> {
    (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_894_9;
            let u = (i as f64 + 1.0) * 0.414_213_562_373_095_1;
            Complex::new(1.0 + t.fract(), 0.5 + u.fract())
        })
        .collect()
}

fn normalize(v: &mut [Complex]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Right near-null vector of `A + z·A^⋆` by two steps of inverse iteration.
fn pencil_eigenvector(a: &CMatrix, astar: &CMatrix, z: Complex) -> Option<Vec<Complex>> {
    let n = a.rows();
    let shifted = a.add(&astar.scale(z)).ok()?;
    let factors = match LuFactors::factor(&shifted) {
        Ok(f) => f,
        Err(_) => {
            // z sits exactly on the eigenvalue; nudge off by a few ulps.
            let bumped = a.add(&astar.scale(z * (1.0 + 1e-14))).ok()?;
            LuFactors::factor(&bumped).ok()?
        }
    };
    let mut v = iteration_seed(n);
    normalize(&mut v);
    for _ in 0..2 {
        if factors.solve_vec(&mut v).is_err() {
            return None;
        }
        normalize(&mut v);
    }
    Some(v)
}

fn quadratic_form(y: &[Complex], m: &CMatrix, x: &[Complex], star: StarKind) -> Complex {
    // y^⋆ M x, where ⋆ conjugates y for the `*` case and does not for `⊤`.
    let n = m.rows();
    let mut total = ZERO;
    for i in 0..n {
        let mut row = ZERO;
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        let yi = match star {
            StarKind::ConjugateTranspose => y[i].conj(),
            StarKind::Transpose => y[i],
        };
        total += yi * row;
    }
    total
}

/// Polish eigenvalues near the unit circle with inverse iteration on the
/// pencil and structured Rayleigh quotients. Divergent updates (for example
/// at defective eigenvalues, where the quotients degenerate) are discarded.
fn refine_near_unit(
    a: &CMatrix,
    astar: &CMatrix,
    star: StarKind,
    values: &mut [Complex],
    window: f64,
) {
    let n = values.len();
    let raw: Vec<Complex> = values.to_vec();
    for j in 0..n {
        let lambda = raw[j];
        if (lambda.norm() - 1.0).abs() > window {
            continue;
        }
        // The reciprocal partner 1/λ^⋆ identifies the left eigenvector: it
        // is the right eigenvector of the partner eigenvalue. A unit (resp.
        // -1 under transpose) eigenvalue is its own partner.
        let target = star.reciprocal_partner(lambda);
        let mut partner = j;
        let mut best = (raw[j] - target).norm();
        for (k, &cand) in raw.iter().enumerate() {
            let d = (cand - target).norm();
            if d < best {
                best = d;
                partner = k;
            }
        }

        let mut z = lambda;
        for _round in 0..2 {
            let x = match pencil_eigenvector(a, astar, z) {
                Some(v) => v,
                None => break,
            };
            let candidate = if partner == j {
                match star {
                    StarKind::Transpose => {
                        // x^T A x = x^T A^T x identically, so the quotient is
                        // exactly -1; meaningful only near -1, which the
                        // acceptance guard enforces.
                        Complex::new(-1.0, 0.0)
                    }
                    StarKind::ConjugateTranspose => {
                        let w = quadratic_form(&x, a, &x, star);
                        if w == ZERO {
                            break;
                        }
                        -w / w.conj()
                    }
                }
            } else {
                let zp = if partner < j { values[partner] } else { raw[partner] };
                let y = match pencil_eigenvector(a, astar, zp) {
                    Some(v) => v,
                    None => break,
                };
                let num = quadratic_form(&y, a, &x, star);
                let den = quadratic_form(&y, astar, &x, star);
                if den == ZERO {
                    break;
                }
                -num / den
            };
            if !candidate.re.is_finite() || !candidate.im.is_finite() {
                break;
            }
            if (candidate - lambda).norm() > REFINE_ACCEPT * (1.0 + lambda.norm()) {
                break;
            }
            let moved = (candidate - z).norm();
            z = candidate;
            if moved <= 1e-9 * (1.0 + z.norm()) {
                break;
            }
        }
        values[j] = z;
    }
}

// ---------------------------------------------------------------------------
// Reciprocal pairing.
// ---------------------------------------------------------------------------

/// Result of matching non-unit eigenvalues into `(λ, 1/λ^⋆)` pairs.
#[derive(Debug, Clone)]
pub struct PairingReport {
    /// Matched index pairs with their residuals.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Unit-labelled indices, exempt from pairing.
    pub unit_exempt: Vec<usize>,
    pub max_residual: f64,
    /// True when every residual is at most the requested tolerance.
    pub within_tol: bool,
}

/// Greedy minimum-distance matching of the non-unit eigenvalues of `s` into
/// reciprocal pairs. Unit-labelled eigenvalues are exempt. Fails when an odd
/// number of non-unit eigenvalues cannot form pairs.
pub fn reciprocal_pairing(s: &Spectrum, star: StarKind, pair_tol: f64) -> Result<PairingReport> {
    let non_unit: Vec<usize> = (0..s.len())
        .filter(|&j| s.labels[j] != ModulusLabel::Unit)
        .collect();
    let unit_exempt: Vec<usize> = (0..s.len())
        .filter(|&j| s.labels[j] == ModulusLabel::Unit)
        .collect();
    if non_unit.len() % 2 != 0 {
        return Err(Error::PairingFailure { unpaired: 1 });
    }

    let residual = |i: usize, j: usize| -> f64 {
        let li = s.values[i];
        let lj = s.values[j];
        (li - star.reciprocal_partner(lj)).norm() / li.norm().max(1.0)
    };

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (a, &i) in non_unit.iter().enumerate() {
        for &j in non_unit.iter().skip(a + 1) {
            candidates.push((residual(i, j).max(residual(j, i)), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut used = vec![false; s.len()];
    let mut pairs = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (r, i, j) in candidates {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        max_residual = max_residual.max(r);
        pairs.push((i, j, r));
    }
    let unpaired = non_unit.iter().filter(|&&i| !used[i]).count();
    if unpaired > 0 {
        return Err(Error::PairingFailure { unpaired });
    }
    Ok(PairingReport {
        pairs,
        unit_exempt,
        max_residual,
        within_tol: max_residual <= pair_tol,
    })
}

// ---------------------------------------------------------------------------
// Predicted spectra of canonical forms.
// ---------------------------------------------------------------------------

/// Closed-form pencil spectrum of a canonical form: eigenvalues with
/// multiplicities, plus a singular flag when Type 0 blocks are present.
#[derive(Debug, Clone)]
pub struct PredictedSpectrum {
    pub entries: Vec<(Complex, usize)>,
    pub singular: bool,
}

impl PredictedSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn push(&mut self, value: Complex, multiplicity: usize) {
        for entry in &mut self.entries {
            if entry.0 == value {
                entry.1 += multiplicity;
                return;
            }
        }
        self.entries.push((value, multiplicity));
    }

    /// Number of entries with unit modulus (exact, up to 1e-12).
    pub fn unit_multiplicity(&self) -> usize {
        self.entries
            .iter()
            .filter(|(v, _)| (v.norm() - 1.0).abs() <= 1e-12)
            .map(|&(_, m)| m)
            .sum()
    }
}

/// Pencil eigenvalues a canonical form must produce:
///
/// * `H_{2k}(μ)` contributes `-μ` and `-1/μ^⋆`, each with multiplicity `k`;
/// * `α·Γ_k` contributes `(-1)^k · α/α^⋆` with multiplicity `k`;
/// * `J_k(0)` makes the realized matrix singular and contributes nothing.
pub fn predicted_spectrum(spec: &CanonicalFormSpec) -> Result<PredictedSpectrum> {
    let violations = spec.validate();
    if !violations.is_empty() {
        let msg = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::InvalidSpec(msg));
    }
    let mut out = PredictedSpectrum {
        entries: Vec::new(),
        singular: false,
    };
    for block in &spec.blocks {
        match *block {
            BlockSpec::Type0 { .. } => out.singular = true,
            BlockSpec::TypeI { k, alpha } => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let v = alpha / spec.star.apply(alpha) * sign;
                out.push(v, k);
            }
            BlockSpec::TypeII { k, mu } => {
                out.push(-mu, k);
                out.push(-star_reciprocal(spec.star, mu), k);
            }
        }
    }
    Ok(out)
}

fn star_reciprocal(star: StarKind, z: Complex) -> Complex {
    ONE / star.apply(z)
}

// ---------------------------------------------------------------------------
// Multiset matching of computed against predicted spectra.
// ---------------------------------------------------------------------------

/// Outcome of matching a computed spectrum against a predicted one.
#[derive(Debug, Clone)]
pub struct SpectrumMatch {
    /// Largest relative error over multiplicity-1 entries.
    pub max_simple_error: f64,
    /// Largest relative centroid error over multiplicity-≥2 clusters.
    pub max_cluster_error: f64,
    /// Largest member distance from its cluster's predicted value.
    pub max_member_spread: f64,
}

impl SpectrumMatch {
    pub fn max_rel_error(&self) -> f64 {
        self.max_simple_error.max(self.max_cluster_error)
    }
}

/// Greedy nearest-neighbour assignment of computed eigenvalues to predicted
/// `(value, multiplicity)` entries. Multiple eigenvalues are matched as
/// clusters: each cluster claims its `m` nearest computed values (largest
/// multiplicities first) and is scored by its centroid, since a
/// multiplicity-`m` eigenvalue splits into a ring whose first-order terms
/// cancel in the mean.
pub fn match_spectra(predicted: &[(Complex, usize)], computed: &[Complex]) -> Result<SpectrumMatch> {
    let total: usize = predicted.iter().map(|&(_, m)| m).sum();
    if total != computed.len() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "predicted multiplicity {total} vs {} computed eigenvalues",
                computed.len()
            ),
        });
    }
    let mut order: Vec<usize> = (0..predicted.len()).collect();
    order.sort_by(|&a, &b| predicted[b].1.cmp(&predicted[a].1));

    let mut used = vec![false; computed.len()];
    let mut result = SpectrumMatch {
        max_simple_error: 0.0,
        max_cluster_error: 0.0,
        max_member_spread: 0.0,
    };
    for &pi in &order {
        let (v, m) = predicted[pi];
        let scale = v.norm().max(1.0);
        let mut dists: Vec<(f64, usize)> = computed
            .iter()
            .enumerate()
            .filter(|(c, _)| !used[*c])
            .map(|(c, &z)| ((z - v).norm(), c))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut centroid = ZERO;
        for &(d, c) in dists.iter().take(m) {
            used[c] = true;
            centroid += computed[c];
            result.max_member_spread = result.max_member_spread.max(d / scale);
        }
        centroid /= m as f64;
        let err = (centroid - v).norm() / scale;
        if m == 1 {
            result.max_simple_error = result.max_simple_error.max(err);
        } else {
            result.max_cluster_error = result.max_cluster_error.max(err);
        }
    }
    Ok(result)
}
