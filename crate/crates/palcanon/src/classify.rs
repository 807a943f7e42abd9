//! Classification of matrices into the generic bundles, and symbolic bundle
//! membership for canonical form specs.
//!
//! Numerically, a generic matrix is recognized through its palindromic
//! pencil: under `*` the bundle index `ℓ` satisfies `n - 2ℓ = #unit
//! eigenvalues`; under transpose the generic bundle has no unit eigenvalues
//! for even `n` and exactly the eigenvalue `-1` for odd `n`.
//!
//! Symbolically, two specs describe the same bundle exactly when their block
//! signatures agree and their parameter equality patterns are isomorphic.
//! For the `*` case all of the mod-2 pair conditions collapse to equality of
//! the per-block key `v = (-1)^ℓ · α²`, which is precisely the pencil
//! eigenvalue the block produces; Type II blocks compare by `μ` directly.

use crate::blocks::{BlockSpec, CanonicalFormSpec};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Complex, StarKind};
use crate::spectrum::{
    pencil_eigenvalues, reciprocal_pairing, ModulusLabel, Spectrum, UnitRule, DEFAULT_UNIT_TOL,
};

/// Default relative gap below which two computed eigenvalues are treated as
/// a repeated eigenvalue (and the input as non-generic).
pub const DEFAULT_DISTINCT_TOL: f64 = 1e-8;

/// Why a matrix was not recognized as generic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonGenericReason {
    Singular,
    RepeatedEigenvalue,
    UnexpectedUnitCount,
    PairCollision,
    NumericalFailure,
}

impl NonGenericReason {
    pub fn tag(&self) -> &'static str {
        match self {
            NonGenericReason::Singular => "Singular",
            NonGenericReason::RepeatedEigenvalue => "RepeatedEigenvalue",
            NonGenericReason::UnexpectedUnitCount => "UnexpectedUnitCount",
            NonGenericReason::PairCollision => "PairCollision",
            NonGenericReason::NumericalFailure => "NumericalFailure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Classification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleClass {
    /// `*`-generic with `ℓ` hyperbolic pairs: `n - 2ℓ` unit eigenvalues.
    GenericStar { ell: usize },
    /// Transpose-generic; the parity decides whether `-1` is present.
    GenericCongruence { parity: Parity },
    NonGeneric { reason: NonGenericReason },
}

impl BundleClass {
    pub fn is_generic(&self) -> bool {
        !matches!(self, BundleClass::NonGeneric { .. })
    }
}

/// Knobs for [`classify_generic_full`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub unit_rule: UnitRule,
    pub distinct_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            unit_rule: UnitRule::ScaledByNorm { tol: DEFAULT_UNIT_TOL },
            distinct_tol: DEFAULT_DISTINCT_TOL,
        }
    }
}

/// Classification together with the evidence it was based on.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: BundleClass,
    pub n: usize,
    /// Unit count, when a spectrum was computed.
    pub unit_count: Option<usize>,
    pub spectrum: Option<Spectrum>,
}

impl Classification {
    /// One-line report: `class=G*|Gc|NG ell=<int|-> n=<n> unit_count=<int|->
    /// reason=<tag|->`.
    pub fn report_line(&self) -> String {
        let (class, ell, reason) = match self.class {
            BundleClass::GenericStar { ell } => ("G*", ell.to_string(), "-".to_string()),
            BundleClass::GenericCongruence { .. } => ("Gc", "-".to_string(), "-".to_string()),
            BundleClass::NonGeneric { reason } => ("NG", "-".to_string(), reason.tag().to_string()),
        };
        let unit = self.unit_count.map_or("-".to_string(), |u| u.to_string());
        format!(
            "class={class} ell={ell} n={} unit_count={unit} reason={reason}",
            self.n
        )
    }
}

/// Classify `a` into a generic bundle, or report why it is not generic.
pub fn classify_generic(
    a: &CMatrix,
    star: StarKind,
    unit_tol: f64,
    distinct_tol: f64,
) -> Result<BundleClass> {
    let opts = ClassifyOptions {
        unit_rule: UnitRule::ScaledByNorm { tol: unit_tol },
        distinct_tol,
    };
    Ok(classify_generic_full(a, star, opts)?.class)
}

pub fn classify_generic_full(
    a: &CMatrix,
    star: StarKind,
    opts: ClassifyOptions,
) -> Result<Classification> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let non_generic = |reason| Classification {
        class: BundleClass::NonGeneric { reason },
        n,
        unit_count: None,
        spectrum: None,
    };

    let mut spectrum = match pencil_eigenvalues(a, star) {
        Ok(s) => s,
        Err(Error::NearSingular { .. }) => return Ok(non_generic(NonGenericReason::Singular)),
        Err(Error::NumericalFailure { .. }) => {
            return Ok(non_generic(NonGenericReason::NumericalFailure))
        }
        Err(e) => return Err(e),
    };

    let max_mod = spectrum.moduli.iter().cloned().fold(0.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (spectrum.values[i] - spectrum.values[j]).norm() < opts.distinct_tol * max_mod {
                return Ok(Classification {
                    class: BundleClass::NonGeneric {
                        reason: NonGenericReason::RepeatedEigenvalue,
                    },
                    n,
                    unit_count: None,
                    spectrum: Some(spectrum),
                });
            }
        }
    }

    let m = spectrum.count_unit_with(opts.unit_rule);
    let done = |class| {
        Ok(Classification {
            class,
            n,
            unit_count: Some(m),
            spectrum: Some(spectrum.clone()),
        })
    };

    match star {
        StarKind::ConjugateTranspose => {
            if m % 2 != n % 2 || m > n {
                return done(BundleClass::NonGeneric {
                    reason: NonGenericReason::UnexpectedUnitCount,
                });
            }
            done(BundleClass::GenericStar { ell: (n - m) / 2 })
        }
        StarKind::Transpose => {
            let expected_units = n % 2;
            if m != expected_units {
                return done(BundleClass::NonGeneric {
                    reason: NonGenericReason::UnexpectedUnitCount,
                });
            }
            if n % 2 == 1 {
                let unit_idx = spectrum
                    .labels
                    .iter()
                    .position(|&l| l == ModulusLabel::Unit)
                    .expect("one unit label");
                if (spectrum.values[unit_idx] - Complex::new(-1.0, 0.0)).norm() > 1e-6 {
                    return done(BundleClass::NonGeneric {
                        reason: NonGenericReason::UnexpectedUnitCount,
                    });
                }
            }
            // Each non-unit eigenvalue must be reciprocal-paired with exactly
            // one other; a collision with a third pair's member means the
            // block parameters μ are not distinct.
            let pairing = match reciprocal_pairing(&spectrum, star, f64::INFINITY) {
                Ok(p) => p,
                Err(Error::PairingFailure { .. }) => {
                    return done(BundleClass::NonGeneric {
                        reason: NonGenericReason::NumericalFailure,
                    })
                }
                Err(e) => return Err(e),
            };
            let mut partner_of = vec![usize::MAX; n];
            for &(i, j, _) in &pairing.pairs {
                partner_of[i] = j;
                partner_of[j] = i;
            }
            for i in 0..n {
                if spectrum.labels[i] == ModulusLabel::Unit {
                    continue;
                }
                let recip = star.reciprocal_partner(spectrum.values[i]);
                for k in 0..n {
                    if k == i || k == partner_of[i] || spectrum.labels[k] == ModulusLabel::Unit {
                        continue;
                    }
                    let gap = (spectrum.values[k] - recip).norm();
                    if gap < opts.distinct_tol * spectrum.values[k].norm().max(1.0) {
                        return done(BundleClass::NonGeneric {
                            reason: NonGenericReason::PairCollision,
                        });
                    }
                }
            }
            done(BundleClass::GenericCongruence {
                parity: if n % 2 == 0 { Parity::Even } else { Parity::Odd },
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter sets (the S_·(A) sets used by the direct-sum hypotheses).
// ---------------------------------------------------------------------------

/// Sets of block parameters of a canonical form, without multiplicity.
#[derive(Debug, Clone, Default)]
pub struct ParameterSets {
    /// Transpose case: μ of Type II-(a) blocks (`μ = (-1)^k` excluded).
    pub s_h_t: Vec<Complex>,
    /// `*` case: α of Type I blocks.
    pub s_gamma: Vec<Complex>,
    /// `{α² : α ∈ s_gamma}`.
    pub s_gamma2: Vec<Complex>,
    /// `{-α² : α ∈ s_gamma}`.
    pub s_gamma2_neg: Vec<Complex>,
    /// `*` case: μ of Type II blocks.
    pub s_h_star: Vec<Complex>,
}

fn push_unique(set: &mut Vec<Complex>, z: Complex) {
    if !set.contains(&z) {
        set.push(z);
    }
}

fn is_type_iib(k: usize, mu: Complex) -> bool {
    let v = if k % 2 == 0 { 1.0 } else { -1.0 };
    mu == Complex::new(v, 0.0)
}

/// Collect the parameter sets of a spec. Equality is exact.
pub fn parameter_sets(spec: &CanonicalFormSpec) -> ParameterSets {
    let mut out = ParameterSets::default();
    for block in &spec.blocks {
        match (*block, spec.star) {
            (BlockSpec::TypeI { alpha, .. }, StarKind::ConjugateTranspose) => {
                push_unique(&mut out.s_gamma, alpha);
                push_unique(&mut out.s_gamma2, alpha * alpha);
                push_unique(&mut out.s_gamma2_neg, -(alpha * alpha));
            }
            (BlockSpec::TypeII { k: _, mu }, StarKind::ConjugateTranspose) => {
                push_unique(&mut out.s_h_star, mu);
            }
            (BlockSpec::TypeII { k, mu }, StarKind::Transpose) if !is_type_iib(k, mu) => {
                push_unique(&mut out.s_h_t, mu);
            }
            _ => {}
        }
    }
    out
}

fn disjoint(a: &[Complex], b: &[Complex]) -> bool {
    a.iter().all(|z| !b.contains(z))
}

// ---------------------------------------------------------------------------
// Equality patterns and symbolic bundle membership.
// ---------------------------------------------------------------------------

/// Pairwise equal/distinct verdicts between same-type blocks of a spec.
///
/// For Type I pairs the recorded verdict is the constrained relation of the
/// bundle definition: `α_i² = α_j²` when the sizes share parity and
/// `α_i² = -α_j²` when they do not — both equivalent to equality of
/// `v = (-1)^ℓ α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityPattern {
    /// Size parity `ℓ_i mod 2` of each Type I block.
    pub gamma_parity: Vec<u8>,
    /// Constrained-relation verdict for each Type I pair.
    pub gamma_equal: Vec<Vec<bool>>,
    /// `μ_i = μ_j` verdicts for Type II pairs.
    pub h_equal: Vec<Vec<bool>>,
}

impl EqualityPattern {
    pub fn of(spec: &CanonicalFormSpec) -> Self {
        let gammas: Vec<(usize, Complex)> = spec
            .blocks
            .iter()
            .filter_map(|b| match *b {
                BlockSpec::TypeI { k, alpha } => Some((k, alpha)),
                _ => None,
            })
            .collect();
        let mus: Vec<Complex> = spec
            .blocks
            .iter()
            .filter_map(|b| match *b {
                BlockSpec::TypeII { mu, .. } => Some(mu),
                _ => None,
            })
            .collect();
        let keys: Vec<Complex> = gammas.iter().map(|&(k, a)| gamma_key(k, a)).collect();
        let gamma_equal = (0..gammas.len())
            .map(|i| (0..gammas.len()).map(|j| keys[i] == keys[j]).collect())
            .collect();
        let h_equal = (0..mus.len())
            .map(|i| (0..mus.len()).map(|j| mus[i] == mus[j]).collect())
            .collect();
        EqualityPattern {
            gamma_parity: gammas.iter().map(|&(k, _)| (k % 2) as u8).collect(),
            gamma_equal,
            h_equal,
        }
    }
}

/// The comparison key `(-1)^ℓ · α²` of a Type I block: two blocks are
/// bundle-equivalent precisely when their keys agree.
fn gamma_key(k: usize, alpha: Complex) -> Complex {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    alpha * alpha * sign
}

/// Group items by an exact complex key and return the multiset of sorted
/// size lists, itself sorted: the partition signature compared by
/// membership.
fn partition_signature(items: &[(Complex, usize)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Complex, Vec<usize>)> = Vec::new();
    for &(key, size) in items {
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, sizes)) => sizes.push(size),
            None => groups.push((key, vec![size])),
        }
    }
    let mut sig: Vec<Vec<usize>> = groups
        .into_iter()
        .map(|(_, mut sizes)| {
            sizes.sort_unstable();
            sizes
        })
        .collect();
    sig.sort();
    sig
}

fn validated(spec: &CanonicalFormSpec) -> Result<()> {
    let violations = spec.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

/// Does a matrix with canonical form `a_spec` belong to the bundle of
/// `c_spec`? True when the block signatures agree and the parameter equality
/// patterns are isomorphic under a size-preserving bijection.
pub fn bundle_membership(a_spec: &CanonicalFormSpec, c_spec: &CanonicalFormSpec) -> Result<bool> {
    if a_spec.star != c_spec.star {
        return Err(Error::InvalidParameter(
            "bundle membership needs matching star kinds".into(),
        ));
    }
    if a_spec.total_size() != c_spec.total_size() {
        return Err(Error::InvalidParameter(format!(
            "bundle membership needs matching sizes ({} vs {})",
            a_spec.total_size(),
            c_spec.total_size()
        )));
    }
    validated(a_spec)?;
    validated(c_spec)?;
    Ok(block_signature(a_spec) == block_signature(c_spec))
}

type Signature = (
    Vec<usize>,      // Type 0 sizes
    Vec<usize>,      // transpose Type II-(b) sizes
    Vec<usize>,      // Type I sizes
    Vec<Vec<usize>>, // Type I partition by v-key (`*` only)
    Vec<Vec<usize>>, // Type II(-a) partition by μ
);

fn block_signature(spec: &CanonicalFormSpec) -> Signature {
    let mut zero_sizes: Vec<usize> = Vec::new();
    let mut iib_sizes: Vec<usize> = Vec::new();
    let mut gamma_sizes: Vec<usize> = Vec::new();
    let mut gamma_items: Vec<(Complex, usize)> = Vec::new();
    let mut h_items: Vec<(Complex, usize)> = Vec::new();
    for block in &spec.blocks {
        match *block {
            BlockSpec::Type0 { k } => zero_sizes.push(k),
            BlockSpec::TypeI { k, alpha } => {
                gamma_sizes.push(k);
                if spec.star == StarKind::ConjugateTranspose {
                    gamma_items.push((gamma_key(k, alpha), k));
                }
            }
            BlockSpec::TypeII { k, mu } => {
                if spec.star == StarKind::Transpose && is_type_iib(k, mu) {
                    iib_sizes.push(k);
                } else {
                    h_items.push((mu, k));
                }
            }
        }
    }
    zero_sizes.sort_unstable();
    iib_sizes.sort_unstable();
    gamma_sizes.sort_unstable();
    (
        zero_sizes,
        iib_sizes,
        gamma_sizes,
        partition_signature(&gamma_items),
        partition_signature(&h_items),
    )
}

/// Do two specs generate the same bundle? Specs of different total size are
/// bundles in different spaces and compare unequal.
pub fn bundle_equal(c1: &CanonicalFormSpec, c2: &CanonicalFormSpec) -> Result<bool> {
    if c1.total_size() != c2.total_size() {
        validated(c1)?;
        validated(c2)?;
        return Ok(false);
    }
    Ok(bundle_membership(c1, c2)? && bundle_membership(c2, c1)?)
}

/// Sufficient condition for `A_1 ⊕ … ⊕ A_q` to lie in the closure of the
/// bundle of `C_1 ⊕ … ⊕ C_q`: per-summand membership plus pairwise
/// disjointness of the parameter sets of the `C_i`. A `false` answer means
/// the hypotheses fail, not that membership fails.
pub fn direct_sum_closure_check(
    a_specs: &[CanonicalFormSpec],
    c_specs: &[CanonicalFormSpec],
    star: StarKind,
) -> Result<bool> {
    if a_specs.is_empty() || a_specs.len() != c_specs.len() {
        return Err(Error::InvalidParameter(
            "direct sum check needs equally long, non-empty spec lists".into(),
        ));
    }
    for (a, c) in a_specs.iter().zip(c_specs) {
        if a.star != star || c.star != star {
            return Err(Error::InvalidParameter(
                "all specs must share the requested star kind".into(),
            ));
        }
        if a.total_size() != c.total_size() {
            return Err(Error::InvalidParameter(format!(
                "summand size mismatch ({} vs {})",
                a.total_size(),
                c.total_size()
            )));
        }
    }
    for (a, c) in a_specs.iter().zip(c_specs) {
        if !bundle_membership(a, c)? {
            return Ok(false);
        }
    }
    let sets: Vec<ParameterSets> = c_specs.iter().map(parameter_sets).collect();
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i == j {
                continue;
            }
            let ok = match star {
                StarKind::ConjugateTranspose => {
                    disjoint(&sets[i].s_gamma2, &sets[j].s_gamma2)
                        && disjoint(&sets[i].s_gamma2, &sets[j].s_gamma2_neg)
                        && disjoint(&sets[i].s_h_star, &sets[j].s_h_star)
                }
                StarKind::Transpose => disjoint(&sets[i].s_h_t, &sets[j].s_h_t),
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Break parameter collisions across a list of specs by rotating the j-th
/// colliding value with `e^(i/(j·k))`, in deterministic scan order. Type I
/// parameters collide when `α²` meets another spec's `α̃²` or `-α̃²`; Type II
/// parameters collide on plain equality. Non-colliding parameters are left
/// untouched. Larger `k` means smaller rotations.
pub fn make_parameters_distinct(
    specs: &[CanonicalFormSpec],
    k: usize,
) -> Result<Vec<CanonicalFormSpec>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let sets: Vec<ParameterSets> = specs.iter().map(parameter_sets).collect();

    // One entry per (value, spec) occurrence, in scan order.
    let mut alpha_entries: Vec<(usize, Complex)> = Vec::new();
    let mut mu_entries: Vec<(usize, Complex)> = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let mut seen_alpha: Vec<Complex> = Vec::new();
        let mut seen_mu: Vec<Complex> = Vec::new();
        for block in &spec.blocks {
            match *block {
                BlockSpec::TypeI { alpha, .. }
                    if spec.star == StarKind::ConjugateTranspose
                        && !seen_alpha.contains(&alpha) =>
                {
                    seen_alpha.push(alpha);
                    let sq = alpha * alpha;
                    let collides = sets.iter().enumerate().any(|(j, s)| {
                        j != i && (s.s_gamma2.contains(&sq) || s.s_gamma2_neg.contains(&sq))
                    });
                    if collides {
                        alpha_entries.push((i, alpha));
                    }
                }
                BlockSpec::TypeII { k: bk, mu } if !seen_mu.contains(&mu) => {
                    if spec.star == StarKind::Transpose && is_type_iib(bk, mu) {
                        continue;
                    }
                    seen_mu.push(mu);
                    let collides = sets.iter().enumerate().any(|(j, s)| {
                        j != i
                            && match spec.star {
                                StarKind::ConjugateTranspose => s.s_h_star.contains(&mu),
                                StarKind::Transpose => s.s_h_t.contains(&mu),
                            }
                    });
                    if collides {
                        mu_entries.push((i, mu));
                    }
                }
                _ => {}
            }
        }
    }

    let rotation =
        |index: usize| -> Complex { Complex::from_polar(1.0, 1.0 / ((index + 1) * k) as f64) };

    let mut out: Vec<CanonicalFormSpec> = specs.to_vec();
    for (pos, &(spec_idx, alpha)) in alpha_entries.iter().enumerate() {
        let rot = rotation(pos);
        for block in &mut out[spec_idx].blocks {
            if let BlockSpec::TypeI { alpha: a, .. } = block {
                if *a == alpha {
                    *a *= rot;
                }
            }
        }
    }
    for (pos, &(spec_idx, mu)) in mu_entries.iter().enumerate() {
        let rot = rotation(pos);
        for block in &mut out[spec_idx].blocks {
            if let BlockSpec::TypeII { mu: m, .. } = block {
                if *m == mu {
                    *m *= rot;
                }
            }
        }
    }
    // Rotations can push transpose-case unit-circle parameters out of the
    // fundamental domain; normalize them back.
    Ok(out.into_iter().map(|s| s.normalized()).collect())
}
