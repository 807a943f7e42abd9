//! Dense complex matrices and the small set of operations everything else
//! builds on: direct sums, (conjugate) transposition, Frobenius norms,
//! matrix products.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

/// Complex scalar used throughout the crate.
pub type Complex = Complex64;

/// Which involution `⋆` stands for: plain transpose or conjugate transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarKind {
    /// `A^T` — congruence (`P^T A P`).
    Transpose,
    /// `A^*` — *congruence (`P^* A P`).
    ConjugateTranspose,
}

impl StarKind {
    /// Apply `⋆` to a scalar: identity for transpose, conjugation for `*`.
    pub fn apply(self, z: Complex) -> Complex {
        match self {
            StarKind::Transpose => z,
            StarKind::ConjugateTranspose => z.conj(),
        }
    }

    /// The reciprocal partner `1/λ^⋆` of a pencil eigenvalue.
    pub fn reciprocal_partner(self, lambda: Complex) -> Complex {
        Complex::new(1.0, 0.0) / self.apply(lambda)
    }
}

impl fmt::Display for StarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarKind::Transpose => write!(f, "transpose"),
            StarKind::ConjugateTranspose => write!(f, "conjugate-transpose"),
        }
    }
}

/// Dense row-major complex matrix. All entries are finite; constructors
/// reject NaN and infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl CMatrix {
    /// Build a matrix from a row-major entry list.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(CMatrix { rows, cols, entries })
    }

    /// Zero matrix. Panics only on zero dimensions.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        CMatrix {
            rows,
            cols,
            entries: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    /// Convenience constructor from real row slices (tests, fixtures).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    context: "ragged row list".into(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex::new(x, 0.0)));
        }
        CMatrix::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    /// Transpose or conjugate transpose, selected by `star`.
    pub fn star(&self, star: StarKind) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = star.apply(self[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        self.star(StarKind::Transpose)
    }

    pub fn conj_transpose(&self) -> CMatrix {
        self.star(StarKind::ConjugateTranspose)
    }

    /// `sqrt(Σ |a_ij|²)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "add {}x{} to {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "multiply {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `P^⋆ A P` for the given star kind.
    pub fn congruence(&self, p: &CMatrix, star: StarKind) -> Result<CMatrix> {
        p.star(star).mul(self)?.mul(p)
    }

    /// Copy `block` into `self` with its (0,0) entry at `(row, col)`.
    pub fn write_block(&mut self, row: usize, col: usize, block: &CMatrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Block-diagonal matrix with `blocks` down the diagonal, in list order.
pub fn direct_sum(blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.is_empty() {
        return Err(Error::EmptyDirectSum);
    }
    for (index, b) in blocks.iter().enumerate() {
        if !b.is_square() {
            return Err(Error::NonSquareBlock {
                index,
                rows: b.rows,
                cols: b.cols,
            });
        }
    }
    let n: usize = blocks.iter().map(|b| b.rows).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        out.write_block(offset, offset, b);
        offset += b.rows;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn direct_sum_of_scalars() {
        let a = CMatrix::new(1, 1, vec![c(1.0, 0.0)]).unwrap();
        let b = CMatrix::new(1, 1, vec![c(2.0, 0.0)]).unwrap();
        let s = direct_sum(&[a, b]).unwrap();
        let expect = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn direct_sum_places_blocks_in_order() {
        // H_2(3) ⊕ [α] puts the 2x2 block top-left and α at (2,2).
        let h = CMatrix::from_real_rows(&[&[0.0, 1.0], &[3.0, 0.0]]).unwrap();
        let alpha = c(0.25, -0.5);
        let a = CMatrix::new(1, 1, vec![alpha]).unwrap();
        let s = direct_sum(&[h, a]).unwrap();
        assert_eq!(s.rows(), 3);
        assert_eq!(s[(0, 1)], c(1.0, 0.0));
        assert_eq!(s[(1, 0)], c(3.0, 0.0));
        assert_eq!(s[(2, 2)], alpha);
        assert_eq!(s[(0, 2)], c(0.0, 0.0));
        assert_eq!(s[(2, 0)], c(0.0, 0.0));
    }

    #[test]
    fn direct_sum_gamma2_gamma1() {
        // Γ_2 ⊕ Γ_1 assembled by hand from the block displays.
        let g2 = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 1.0]]).unwrap();
        let g1 = CMatrix::from_real_rows(&[&[1.0]]).unwrap();
        let s = direct_sum(&[g2, g1]).unwrap();
        let expect = CMatrix::from_real_rows(&[
            &[0.0, -1.0, 0.0],
            &[1.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn direct_sum_rejects_bad_input() {
        assert!(matches!(direct_sum(&[]), Err(Error::EmptyDirectSum)));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            direct_sum(&[rect]),
            Err(Error::NonSquareBlock { index: 0, .. })
        ));
    }

    #[test]
    fn star_transpose_scalars() {
        let i = CMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(i.star(StarKind::Transpose)[(0, 0)], c(0.0, 1.0));
        assert_eq!(i.star(StarKind::ConjugateTranspose)[(0, 0)], c(0.0, -1.0));
    }

    #[test]
    fn conj_transpose_swaps_and_conjugates() {
        let mu = c(2.0, 3.0);
        let a = CMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), mu, c(0.0, 0.0)]).unwrap();
        let h = a.conj_transpose();
        assert_eq!(h[(0, 1)], mu.conj());
        assert_eq!(h[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn frobenius_norm_basics() {
        assert!((CMatrix::identity(3).frobenius_norm() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(CMatrix::zeros(4, 4).frobenius_norm(), 0.0);
        let a = CMatrix::from_real_rows(&[&[3.0, 4.0]]).unwrap();
        assert!((a.frobenius_norm() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_non_finite_and_bad_shapes() {
        assert!(matches!(
            CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            CMatrix::new(1, 1, vec![c(0.0, f64::INFINITY)]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            CMatrix::new(0, 1, vec![]),
            Err(Error::ZeroDimension { .. })
        ));
        assert!(matches!(
            CMatrix::new(2, 2, vec![c(0.0, 0.0)]),
            Err(Error::EntryCount { .. })
        ));
    }
}
