//! Canonical blocks for congruence and *congruence, symbolic block specs,
//! validation, and realization as dense matrices.
//!
//! Every square complex matrix is congruent (resp. *congruent) to a direct
//! sum of three block families:
//!
//! * Type 0 — nilpotent Jordan blocks `J_k(0)`;
//! * Type I — anti-triangular blocks `Γ_k` (scaled by a unit `α` under `*`);
//! * Type II — paired blocks `H_{2k}(μ) = [0 I_k; J_k(μ) 0]`.
//!
//! Parameter domains differ per star kind; `validate` checks them all and
//! reports every violated constraint.

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, CMatrix, Complex, StarKind};
use crate::rng::RngStream;
use std::fmt;

/// Tolerance on `||α| - 1|` for unit-modulus parameters supplied by users.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Minimum pairwise separation enforced when sampling generic parameters.
pub const PARAMETER_SEPARATION: f64 = 1e-3;

/// `J_k(0)`: k×k, zero diagonal, ones on the superdiagonal.
pub fn jordan_zero_block(k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::ZeroBlockSize);
    }
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k - 1 {
        m[(i, i + 1)] = Complex::new(1.0, 0.0);
    }
    Ok(m)
}

/// `J_k(mu)`: k×k upper bidiagonal Jordan block.
pub fn jordan_block(k: usize, mu: Complex) -> Result<CMatrix> {
    let mut m = jordan_zero_block(k)?;
    for i in 0..k {
        m[(i, i)] = mu;
    }
    Ok(m)
}

/// `Γ_k`: k×k anti-triangular with nonzeros on the anti-diagonal and the
/// first super-anti-diagonal. Row `i` (from the top, 1-based) carries the
/// sign `(-1)^(k-i)` in both of its nonzero positions, so the bottom row is
/// `1 1`, the row above `-1 -1`, and the top-right corner is `(-1)^(k+1)`.
pub fn gamma_block(k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::ZeroBlockSize);
    }
    let mut m = CMatrix::zeros(k, k);
    for r in 0..k {
        let sign = if (k - 1 - r) % 2 == 0 { 1.0 } else { -1.0 };
        m[(r, k - 1 - r)] = Complex::new(sign, 0.0);
        if k - r < k {
            m[(r, k - r)] = Complex::new(sign, 0.0);
        }
    }
    Ok(m)
}

/// `H_{2k}(mu)`: 2k×2k with `I_k` top-right and `J_k(mu)` bottom-left.
pub fn h_block(k: usize, mu: Complex) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::ZeroBlockSize);
    }
    let mut m = CMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        m[(i, k + i)] = Complex::new(1.0, 0.0);
    }
    let j = jordan_block(k, mu)?;
    m.write_block(k, 0, &j);
    Ok(m)
}

/// One summand of a canonical form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockSpec {
    /// `J_k(0)`; present only in singular matrices.
    Type0 { k: usize },
    /// `α·Γ_k`; `α` must be 1 under transpose, unit modulus under `*`.
    TypeI { k: usize, alpha: Complex },
    /// `H_{2k}(μ)`; contributes size `2k`.
    TypeII { k: usize, mu: Complex },
}

impl BlockSpec {
    pub fn size(&self) -> usize {
        match *self {
            BlockSpec::Type0 { k } | BlockSpec::TypeI { k, .. } => k,
            BlockSpec::TypeII { k, .. } => 2 * k,
        }
    }

    pub fn realize(&self) -> Result<CMatrix> {
        match *self {
            BlockSpec::Type0 { k } => jordan_zero_block(k),
            BlockSpec::TypeI { k, alpha } => Ok(gamma_block(k)?.scale(alpha)),
            BlockSpec::TypeII { k, mu } => h_block(k, mu),
        }
    }
}

/// Is `mu` in the transpose-case fundamental domain for Type II-(a):
/// `|μ| > 1`, or `μ = e^{iθ}` with `0 < θ < π`?
pub fn in_transpose_fundamental_domain(mu: Complex) -> bool {
    let r = mu.norm();
    if r > 1.0 + UNIT_MODULUS_TOL {
        return true;
    }
    if (r - 1.0).abs() <= UNIT_MODULUS_TOL {
        let theta = mu.arg();
        return theta > 0.0 && theta < std::f64::consts::PI;
    }
    false
}

/// Map an admissible transpose-case `μ` (`μ ≠ 0`, `μ ≠ (-1)^{k+1}`) into the
/// fundamental domain, using that `μ` and `1/μ` describe the same block.
/// `μ = (-1)^k` is left untouched.
pub fn normalize_transpose_mu(k: usize, mu: Complex) -> Complex {
    let type_iib = if k % 2 == 0 { 1.0 } else { -1.0 };
    if mu == Complex::new(type_iib, 0.0) {
        return mu;
    }
    if in_transpose_fundamental_domain(mu) {
        return mu;
    }
    let inv = Complex::new(1.0, 0.0) / mu;
    if in_transpose_fundamental_domain(inv) {
        return inv;
    }
    mu
}

/// A single violated constraint found by [`CanonicalFormSpec::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending block, or `None` for spec-level constraints.
    pub block: Option<usize>,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.block {
            Some(i) => write!(f, "block {}: {}", i, self.constraint),
            None => write!(f, "{}", self.constraint),
        }
    }
}

/// Symbolic canonical form: a star kind plus an ordered block list.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFormSpec {
    pub star: StarKind,
    pub blocks: Vec<BlockSpec>,
}

impl CanonicalFormSpec {
    pub fn new(star: StarKind, blocks: Vec<BlockSpec>) -> Self {
        CanonicalFormSpec { star, blocks }
    }

    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn has_type0(&self) -> bool {
        self.blocks
            .iter()
            .any(|b| matches!(b, BlockSpec::Type0 { .. }))
    }

    /// Check every block parameter against its admissible domain. Returns
    /// one record per violated constraint; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.blocks.is_empty() {
            out.push(Violation {
                block: None,
                constraint: "spec must contain at least one block".into(),
            });
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let mut push = |msg: String| {
                out.push(Violation {
                    block: Some(i),
                    constraint: msg,
                })
            };
            match *b {
                BlockSpec::Type0 { k } => {
                    if k == 0 {
                        push("block size must be positive".into());
                    }
                }
                BlockSpec::TypeI { k, alpha } => {
                    if k == 0 {
                        push("block size must be positive".into());
                    }
                    match self.star {
                        StarKind::ConjugateTranspose => {
                            if (alpha.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                                push(format!("|α| = 1 required, got |α| = {}", alpha.norm()));
                            }
                        }
                        StarKind::Transpose => {
                            if alpha != Complex::new(1.0, 0.0) {
                                push(format!("α must be 1 under transpose, got {alpha}"));
                            }
                        }
                    }
                }
                BlockSpec::TypeII { k, mu } => {
                    if k == 0 {
                        push("block size must be positive".into());
                    }
                    match self.star {
                        StarKind::ConjugateTranspose => {
                            if mu.norm() <= 1.0 {
                                push(format!("|μ| > 1 required, got |μ| = {}", mu.norm()));
                            }
                        }
                        StarKind::Transpose => {
                            let type_iib = if k % 2 == 0 { 1.0 } else { -1.0 };
                            let is_iib = mu == Complex::new(type_iib, 0.0);
                            if !is_iib && !in_transpose_fundamental_domain(mu) {
                                push(format!(
                                    "μ must satisfy |μ| > 1, or μ = e^(iθ) with 0 < θ < π, \
                                     or μ = (-1)^k, got {mu}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Realize the spec as a dense block-diagonal matrix, in block order.
    pub fn realize(&self) -> Result<CMatrix> {
        let violations = self.validate();
        if !violations.is_empty() {
            let msg = violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::InvalidSpec(msg));
        }
        let blocks: Vec<CMatrix> = self
            .blocks
            .iter()
            .map(|b| b.realize())
            .collect::<Result<_>>()?;
        direct_sum(&blocks)
    }

    /// Replace every transpose-case Type II parameter by its fundamental
    /// domain representative (`μ` vs `1/μ`). No-op for `*`.
    pub fn normalized(&self) -> CanonicalFormSpec {
        if self.star != StarKind::Transpose {
            return self.clone();
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| match *b {
                BlockSpec::TypeII { k, mu } => BlockSpec::TypeII {
                    k,
                    mu: normalize_transpose_mu(k, mu),
                },
                other => other,
            })
            .collect();
        CanonicalFormSpec {
            star: self.star,
            blocks,
        }
    }

    /// Blocks sorted into a reporting order: Type 0 by size descending, then
    /// Type I by size and argument of `α`, then Type II by size and `μ`
    /// lexicographically. Realization order is never changed by this.
    pub fn sorted_normal(&self) -> CanonicalFormSpec {
        let mut blocks = self.blocks.clone();
        blocks.sort_by(|a, b| block_order_key(a).partial_cmp(&block_order_key(b)).unwrap());
        CanonicalFormSpec {
            star: self.star,
            blocks,
        }
    }

    /// Parse the semicolon grammar, e.g. `"J0(2);G(3)*1+0i;H(1)*3+0i"`.
    pub fn parse(star: StarKind, text: &str) -> Result<Self> {
        let blocks = parse_blocks(text)?;
        Ok(CanonicalFormSpec { star, blocks })
    }
}

fn block_order_key(b: &BlockSpec) -> (u8, i64, f64, f64, f64) {
    match *b {
        BlockSpec::Type0 { k } => (0, -(k as i64), 0.0, 0.0, 0.0),
        BlockSpec::TypeI { k, alpha } => (1, k as i64, alpha.arg(), 0.0, 0.0),
        BlockSpec::TypeII { k, mu } => (2, k as i64, mu.re, mu.im, 0.0),
    }
}

impl fmt::Display for CanonicalFormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| match *b {
                BlockSpec::Type0 { k } => format!("J0({k})"),
                BlockSpec::TypeI { k, alpha } => {
                    format!("G({k})*{}", format_complex(alpha))
                }
                BlockSpec::TypeII { k, mu } => format!("H({k})*{}", format_complex(mu)),
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

fn format_complex(z: Complex) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parse `FLOAT ('+'|'-') FLOAT 'i'`, e.g. `3+0i`, `2.5-1.0i`, `-1e-3+2i`.
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s = text.trim();
    let body = s
        .strip_suffix(['i', 'I'])
        .ok_or_else(|| Error::SpecParse(format!("complex literal {s:?} must end in 'i'")))?;
    // Find the separating sign: a '+'/'-' after position 0 that is not part
    // of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for p in (1..bytes.len()).rev() {
        let c = bytes[p];
        if (c == b'+' || c == b'-') && !matches!(bytes[p - 1], b'e' | b'E') {
            split = Some(p);
            break;
        }
    }
    let p = split
        .ok_or_else(|| Error::SpecParse(format!("complex literal {s:?} needs 're±im i' form")))?;
    let re: f64 = body[..p]
        .parse()
        .map_err(|_| Error::SpecParse(format!("bad real part in {s:?}")))?;
    let sign = if bytes[p] == b'-' { -1.0 } else { 1.0 };
    let im: f64 = body[p + 1..]
        .parse()
        .map_err(|_| Error::SpecParse(format!("bad imaginary part in {s:?}")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::SpecParse(format!("non-finite complex literal {s:?}")));
    }
    Ok(Complex::new(re, sign * im))
}

/// Parse the block list of the spec grammar.
pub fn parse_blocks(text: &str) -> Result<Vec<BlockSpec>> {
    let mut out = Vec::new();
    for raw in text.split(';') {
        let part = raw.trim();
        if part.is_empty() {
            return Err(Error::SpecParse("empty block in spec string".into()));
        }
        let block = if let Some(rest) = part.strip_prefix("J0(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::SpecParse(format!("missing ')' in {part:?}")))?;
            let k: usize = inner
                .trim()
                .parse()
                .map_err(|_| Error::SpecParse(format!("bad size in {part:?}")))?;
            BlockSpec::Type0 { k }
        } else if let Some(rest) = part.strip_prefix("G(") {
            let (k, z) = parse_sized_param(rest, part)?;
            BlockSpec::TypeI { k, alpha: z }
        } else if let Some(rest) = part.strip_prefix("H(") {
            let (k, z) = parse_sized_param(rest, part)?;
            BlockSpec::TypeII { k, mu: z }
        } else {
            return Err(Error::SpecParse(format!(
                "unknown block {part:?}; expected J0(k), G(k)*a+bi, or H(k)*a+bi"
            )));
        };
        out.push(block);
    }
    Ok(out)
}

fn parse_sized_param(rest: &str, part: &str) -> Result<(usize, Complex)> {
    let close = rest
        .find(')')
        .ok_or_else(|| Error::SpecParse(format!("missing ')' in {part:?}")))?;
    let k: usize = rest[..close]
        .trim()
        .parse()
        .map_err(|_| Error::SpecParse(format!("bad size in {part:?}")))?;
    let tail = &rest[close + 1..];
    let lit = tail
        .strip_prefix('*')
        .ok_or_else(|| Error::SpecParse(format!("expected '*' before parameter in {part:?}")))?;
    Ok((k, parse_complex(lit)?))
}

/// Build a generic canonical form.
///
/// For `*`: `ell` Type II blocks `H_2(μ_i)` with distinct `|μ_i| > 1`, plus
/// `n - 2·ell` Type I scalars with unit `α_j` and pairwise distinct `α_j²`.
/// For transpose: `ell` must equal `⌊n/2⌋`; the form is `⌊n/2⌋` distinct
/// `H_2(μ_i)` blocks plus a trailing `Γ_1` when `n` is odd.
///
/// Parameters are resampled until pairwise separations reach `1e-3` in the
/// metric that matters for classification (`|μ_i - μ_j|`, `|α_i² ± α_j²|`).
pub fn generic_spec(
    n: usize,
    ell: usize,
    star: StarKind,
    rng: &mut RngStream,
) -> Result<CanonicalFormSpec> {
    if n == 0 {
        return Err(Error::ZeroDimension { rows: n, cols: n });
    }
    let half = n / 2;
    match star {
        StarKind::ConjugateTranspose => {
            if ell > half {
                return Err(Error::EllOutOfRange { n, ell });
            }
        }
        StarKind::Transpose => {
            if ell != half {
                return Err(Error::EllOutOfRange { n, ell });
            }
        }
    }

    let mut mus: Vec<Complex> = Vec::with_capacity(ell);
    while mus.len() < ell {
        let mu = Complex::from_polar(
            rng.uniform_range(1.5, 3.0),
            rng.uniform_range(0.0, std::f64::consts::TAU),
        );
        if mus.iter().all(|m| (m - mu).norm() >= PARAMETER_SEPARATION) {
            mus.push(mu);
        }
    }

    let mut blocks: Vec<BlockSpec> = mus
        .into_iter()
        .map(|mu| BlockSpec::TypeII { k: 1, mu })
        .collect();

    match star {
        StarKind::ConjugateTranspose => {
            let mut alphas: Vec<Complex> = Vec::with_capacity(n - 2 * ell);
            while alphas.len() < n - 2 * ell {
                let alpha = rng.unit_complex();
                let sq = alpha * alpha;
                let ok = alphas.iter().all(|a| {
                    let asq = a * a;
                    (asq - sq).norm() >= PARAMETER_SEPARATION
                        && (asq + sq).norm() >= PARAMETER_SEPARATION
                });
                if ok {
                    alphas.push(alpha);
                }
            }
            blocks.extend(
                alphas
                    .into_iter()
                    .map(|alpha| BlockSpec::TypeI { k: 1, alpha }),
            );
        }
        StarKind::Transpose => {
            if n % 2 == 1 {
                blocks.push(BlockSpec::TypeI {
                    k: 1,
                    alpha: Complex::new(1.0, 0.0),
                });
            }
        }
    }

    Ok(CanonicalFormSpec { star, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn jordan_blocks() {
        assert_eq!(jordan_zero_block(1).unwrap(), CMatrix::zeros(1, 1));
        let j2 = jordan_zero_block(2).unwrap();
        assert_eq!(
            j2,
            CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
        );
        // rank of J_3(0) is 2: two independent columns.
        let j3 = jordan_zero_block(3).unwrap();
        let nonzero_cols = (0..3)
            .filter(|&j| (0..3).any(|i| j3[(i, j)] != c(0.0, 0.0)))
            .count();
        assert_eq!(nonzero_cols, 2);
        assert!(jordan_zero_block(0).is_err());
    }

    #[test]
    fn gamma_small_cases() {
        assert_eq!(
            gamma_block(1).unwrap(),
            CMatrix::from_real_rows(&[&[1.0]]).unwrap()
        );
        assert_eq!(
            gamma_block(2).unwrap(),
            CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 1.0]]).unwrap()
        );
        assert_eq!(
            gamma_block(3).unwrap(),
            CMatrix::from_real_rows(&[
                &[0.0, 0.0, 1.0],
                &[0.0, -1.0, -1.0],
                &[1.0, 1.0, 0.0]
            ])
            .unwrap()
        );
        // Top-right corner carries (-1)^(k+1).
        for k in 1..=9 {
            let g = gamma_block(k).unwrap();
            let expect = if k % 2 == 0 { -1.0 } else { 1.0 };
            assert_eq!(g[(0, k - 1)], c(expect, 0.0), "corner of k={k}");
        }
    }

    #[test]
    fn gamma_bottom_rows_are_paired_ones() {
        for k in 2..=8 {
            let g = gamma_block(k).unwrap();
            assert_eq!(g[(k - 1, 0)], c(1.0, 0.0));
            assert_eq!(g[(k - 1, 1)], c(1.0, 0.0));
            if k >= 3 {
                assert_eq!(g[(k - 2, 1)], c(-1.0, 0.0));
                assert_eq!(g[(k - 2, 2)], c(-1.0, 0.0));
            }
        }
    }

    #[test]
    fn gamma_has_unit_determinant_modulus() {
        use crate::lu::LuFactors;
        for k in 1..=32 {
            let g = gamma_block(k).unwrap();
            let f = LuFactors::factor(&g).unwrap();
            assert!(!f.is_near_singular(), "Γ_{k} near singular");
            // |det| = 1 since the anti-diagonal entries are ±1: check via
            // solving against the identity and measuring the product norm
            // indirectly with the inverse norm bound.
            let inv = crate::lu::inverse(&g).unwrap();
            let prod = g.mul(&inv).unwrap();
            assert!(prod.max_abs_diff(&CMatrix::identity(k)) < 1e-12);
        }
    }

    #[test]
    fn h_block_layout() {
        let h = h_block(1, c(3.0, 0.0)).unwrap();
        assert_eq!(
            h,
            CMatrix::from_real_rows(&[&[0.0, 1.0], &[3.0, 0.0]]).unwrap()
        );
        let mu = c(0.5, 1.5);
        let h4 = h_block(2, mu).unwrap();
        assert_eq!(h4[(0, 2)], c(1.0, 0.0));
        assert_eq!(h4[(1, 3)], c(1.0, 0.0));
        assert_eq!(h4[(2, 0)], mu);
        assert_eq!(h4[(2, 1)], c(1.0, 0.0));
        assert_eq!(h4[(3, 1)], mu);
        assert_eq!(h4[(3, 0)], c(0.0, 0.0));
        // det(H_2(μ)) = -μ.
        let h2 = h_block(1, mu).unwrap();
        let det = h2[(0, 0)] * h2[(1, 1)] - h2[(0, 1)] * h2[(1, 0)];
        assert_eq!(det, -mu);
    }

    #[test]
    fn realize_examples() {
        let alpha = Complex::from_polar(1.0, FRAC_PI_4);
        let spec = CanonicalFormSpec::new(
            StarKind::ConjugateTranspose,
            vec![BlockSpec::TypeI { k: 1, alpha }],
        );
        let m = spec.realize().unwrap();
        assert_eq!(m.rows(), 1);
        assert_eq!(m[(0, 0)], alpha);

        let spec = CanonicalFormSpec::new(
            StarKind::ConjugateTranspose,
            vec![
                BlockSpec::TypeII { k: 1, mu: c(3.0, 0.0) },
                BlockSpec::TypeI { k: 1, alpha: c(1.0, 0.0) },
            ],
        );
        let m = spec.realize().unwrap();
        let expect = CMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0],
            &[3.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(m, expect);

        // H_2(-1) under transpose is the Type II-(b) block for k=1.
        let spec = CanonicalFormSpec::new(
            StarKind::Transpose,
            vec![BlockSpec::TypeII { k: 1, mu: c(-1.0, 0.0) }],
        );
        assert!(spec.validate().is_empty());
        assert!(spec.realize().is_ok());
    }

    #[test]
    fn validate_examples() {
        let spec = CanonicalFormSpec::new(
            StarKind::ConjugateTranspose,
            vec![BlockSpec::TypeII { k: 1, mu: c(0.5, 0.0) }],
        );
        let v = spec.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].constraint.contains("|μ| > 1"));
        assert_eq!(v[0].block, Some(0));

        let spec = CanonicalFormSpec::new(
            StarKind::Transpose,
            vec![BlockSpec::TypeI { k: 2, alpha: c(0.0, 1.0) }],
        );
        let v = spec.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].constraint.contains("α must be 1"));

        let spec = CanonicalFormSpec::new(
            StarKind::Transpose,
            vec![BlockSpec::TypeII {
                k: 1,
                mu: Complex::from_polar(1.0, FRAC_PI_3),
            }],
        );
        assert!(spec.validate().is_empty());

        // μ = +1 for k odd is excluded under transpose.
        let spec = CanonicalFormSpec::new(
            StarKind::Transpose,
            vec![BlockSpec::TypeII { k: 1, mu: c(1.0, 0.0) }],
        );
        assert_eq!(spec.validate().len(), 1);
    }

    #[test]
    fn realize_reports_every_violation() {
        let spec = CanonicalFormSpec::new(
            StarKind::ConjugateTranspose,
            vec![
                BlockSpec::TypeII { k: 1, mu: c(0.5, 0.0) },
                BlockSpec::TypeI { k: 1, alpha: c(2.0, 0.0) },
            ],
        );
        match spec.realize() {
            Err(Error::InvalidSpec(msg)) => {
                assert!(msg.contains("block 0"));
                assert!(msg.contains("block 1"));
            }
            other => panic!("expected InvalidSpec, got {other:?}"),
        }
    }

    #[test]
    fn transpose_mu_normalization() {
        let inside = c(0.25, 0.25);
        let norm = normalize_transpose_mu(1, inside);
        assert!((norm - Complex::new(1.0, 0.0) / inside).norm() < 1e-15);
        let upper = Complex::from_polar(1.0, 0.3);
        assert_eq!(normalize_transpose_mu(1, upper), upper);
        let lower = Complex::from_polar(1.0, -0.3);
        assert!((normalize_transpose_mu(1, lower) - upper).norm() < 1e-12);
        // Type II-(b) values stay put.
        assert_eq!(normalize_transpose_mu(1, c(-1.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(normalize_transpose_mu(2, c(1.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn generic_spec_shapes() {
        let mut rng = RngStream::new(1, 0);
        let s = generic_spec(2, 1, StarKind::ConjugateTranspose, &mut rng).unwrap();
        assert_eq!(s.blocks.len(), 1);
        match s.blocks[0] {
            BlockSpec::TypeII { k: 1, mu } => assert!(mu.norm() > 1.0),
            ref b => panic!("unexpected block {b:?}"),
        }

        let s = generic_spec(3, 0, StarKind::ConjugateTranspose, &mut rng).unwrap();
        assert_eq!(s.blocks.len(), 3);
        let sq: Vec<Complex> = s
            .blocks
            .iter()
            .map(|b| match *b {
                BlockSpec::TypeI { k: 1, alpha } => alpha * alpha,
                ref b => panic!("unexpected block {b:?}"),
            })
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!((sq[i] - sq[j]).norm() >= PARAMETER_SEPARATION);
            }
        }

        let s = generic_spec(3, 1, StarKind::Transpose, &mut rng).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert!(matches!(s.blocks[0], BlockSpec::TypeII { k: 1, .. }));
        assert!(
            matches!(s.blocks[1], BlockSpec::TypeI { k: 1, alpha } if alpha == c(1.0, 0.0))
        );

        assert!(generic_spec(4, 3, StarKind::ConjugateTranspose, &mut rng).is_err());
        assert!(generic_spec(4, 1, StarKind::Transpose, &mut rng).is_err());
    }

    #[test]
    fn generic_specs_validate_clean() {
        let mut rng = RngStream::new(77, 1);
        for n in 1..=10 {
            for ell in 0..=n / 2 {
                let s = generic_spec(n, ell, StarKind::ConjugateTranspose, &mut rng).unwrap();
                assert!(s.validate().is_empty());
                assert_eq!(s.total_size(), n);
            }
            let s = generic_spec(n, n / 2, StarKind::Transpose, &mut rng).unwrap();
            assert!(s.validate().is_empty());
            assert_eq!(s.total_size(), n);
        }
    }

    #[test]
    fn grammar_round_trip() {
        let text = "J0(2);G(3)*1+0i;H(1)*3+0i";
        let blocks = parse_blocks(text).unwrap();
        assert_eq!(
            blocks,
            vec![
                BlockSpec::Type0 { k: 2 },
                BlockSpec::TypeI { k: 3, alpha: c(1.0, 0.0) },
                BlockSpec::TypeII { k: 1, mu: c(3.0, 0.0) },
            ]
        );
        let spec = CanonicalFormSpec::new(StarKind::ConjugateTranspose, blocks);
        let rendered = spec.to_string();
        assert_eq!(parse_blocks(&rendered).unwrap(), spec.blocks);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("3+0i").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("2.5-1.0i").unwrap(), c(2.5, -1.0));
        assert_eq!(parse_complex("-1e-3+2i").unwrap(), c(-1e-3, 2.0));
        assert_eq!(parse_complex("1.5e2-3.25e-1i").unwrap(), c(150.0, -0.325));
        assert!(parse_complex("3").is_err());
        assert!(parse_complex("3i").is_err());
        assert!(parse_complex("a+bi").is_err());
    }

    #[test]
    fn grammar_errors() {
        assert!(parse_blocks("").is_err());
        assert!(parse_blocks("J0(2);;H(1)*3+0i").is_err());
        assert!(parse_blocks("Q(2)").is_err());
        assert!(parse_blocks("G(2)3+0i").is_err());
        assert!(parse_blocks("H(x)*3+0i").is_err());
    }

    #[test]
    fn normal_ordering_groups_types() {
        let spec = CanonicalFormSpec::new(
            StarKind::ConjugateTranspose,
            vec![
                BlockSpec::TypeII { k: 1, mu: c(3.0, 0.0) },
                BlockSpec::Type0 { k: 1 },
                BlockSpec::TypeI { k: 1, alpha: c(1.0, 0.0) },
                BlockSpec::Type0 { k: 3 },
            ],
        );
        let sorted = spec.sorted_normal();
        assert_eq!(
            sorted.blocks,
            vec![
                BlockSpec::Type0 { k: 3 },
                BlockSpec::Type0 { k: 1 },
                BlockSpec::TypeI { k: 1, alpha: c(1.0, 0.0) },
                BlockSpec::TypeII { k: 1, mu: c(3.0, 0.0) },
            ]
        );
    }

    #[test]
    fn pi_boundary_is_not_fundamental() {
        // θ = π means μ = -1, which is Type II-(b) for odd k, not II-(a).
        assert!(!in_transpose_fundamental_domain(c(-1.0, 0.0)));
        assert!(!in_transpose_fundamental_domain(c(1.0, 0.0)));
        assert!(in_transpose_fundamental_domain(c(-2.0, 0.0)));
    }
}
