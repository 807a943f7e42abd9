//! LU factorization with partial pivoting for dense complex matrices.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Complex};

/// Pivot-ratio threshold below which a factorization is reported near
/// singular. Callers that need eigenvalues must refuse such inputs instead
/// of solving through them.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-13;

/// Packed LU factors of a square matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    // L (unit lower, implicit diagonal) and U packed in one matrix.
    lu: Vec<Complex>,
    perm: Vec<usize>,
    swaps: usize,
    min_pivot: f64,
    source_norm: f64,
}

impl LuFactors {
    /// Factor `a` as `P·a = L·U`. Fails only on an exact zero pivot; near
    /// singularity is reported through [`LuFactors::pivot_ratio`].
    pub fn factor(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            // Partial pivoting on column k.
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            let pn = pivot.norm();
            if pn == 0.0 {
                return Err(Error::SingularMatrix { step: k });
            }
            min_pivot = min_pivot.min(pn);
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                if m != Complex::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let ukj = lu[k * n + j];
                        lu[i * n + j] -= m * ukj;
                    }
                }
            }
        }

        Ok(LuFactors {
            n,
            lu,
            perm,
            swaps,
            min_pivot,
            source_norm: a.frobenius_norm(),
        })
    }

    /// Determinant from the factorization: sign of the permutation times the
    /// product of the pivots.
    pub fn det(&self) -> Complex {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        let mut d = Complex::new(sign, 0.0);
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Smallest pivot magnitude relative to the Frobenius norm of the input.
    pub fn pivot_ratio(&self) -> f64 {
        if self.source_norm == 0.0 {
            0.0
        } else {
            self.min_pivot / self.source_norm
        }
    }

    pub fn is_near_singular(&self) -> bool {
        self.pivot_ratio() < NEAR_SINGULAR_RATIO
    }

    /// Solve `a·X = b` for every column of `b`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.rows() != self.n {
            return Err(Error::DimensionMismatch {
                context: format!("solve: rhs has {} rows, expected {}", b.rows(), self.n),
            });
        }
        let n = self.n;
        let m = b.cols();
        let mut x = CMatrix::zeros(n, m);
        let mut col = vec![Complex::new(0.0, 0.0); n];
        for j in 0..m {
            for i in 0..n {
                col[i] = b[(self.perm[i], j)];
            }
            // Forward substitution with unit lower factor.
            for i in 1..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s;
            }
            // Back substitution with U.
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s / self.lu[i * n + i];
            }
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        Ok(x)
    }

    /// Solve for a single vector, in place on a slice.
    pub fn solve_vec(&self, v: &mut [Complex]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: format!("solve_vec: length {}, expected {}", v.len(), self.n),
            });
        }
        let n = self.n;
        let mut col = vec![Complex::new(0.0, 0.0); n];
        for i in 0..n {
            col[i] = v[self.perm[i]];
        }
        for i in 1..n {
            let mut s = col[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * col[k];
            }
            col[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= self.lu[i * n + k] * col[k];
            }
            col[i] = s / self.lu[i * n + i];
        }
        v.copy_from_slice(&col);
        Ok(())
    }
}

/// Solution of `a·X = b` together with the singularity estimate of `a`.
#[derive(Debug, Clone)]
pub struct LuSolution {
    pub x: CMatrix,
    /// Smallest pivot magnitude divided by `‖a‖_F`.
    pub pivot_ratio: f64,
    /// True when `pivot_ratio < 1e-13`; the solution is still returned.
    pub near_singular: bool,
}

/// Solve `a·X = b` by LU with partial pivoting.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<LuSolution> {
    let f = LuFactors::factor(a)?;
    let x = f.solve(b)?;
    Ok(LuSolution {
        x,
        pivot_ratio: f.pivot_ratio(),
        near_singular: f.is_near_singular(),
    })
}

/// Inverse through LU; convenience for small matrices.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    Ok(lu_solve(a, &CMatrix::identity(a.rows()))?.x)
}

/// Determinant; zero when elimination hits an exact zero pivot.
pub fn determinant(a: &CMatrix) -> Result<Complex> {
    match LuFactors::factor(a) {
        Ok(f) => Ok(f.det()),
        Err(Error::SingularMatrix { .. }) => Ok(Complex::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Complex;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let s = lu_solve(&CMatrix::identity(2), &b).unwrap();
        assert!(s.x.max_abs_diff(&b) < 1e-15);
        assert!(!s.near_singular);
    }

    #[test]
    fn diagonal_inverse() {
        let a = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 4.0]]).unwrap();
        let s = lu_solve(&a, &CMatrix::identity(2)).unwrap();
        let expect = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.25]]).unwrap();
        assert!(s.x.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn gamma2_inverse_matches_adjugate() {
        // Γ_2 = [[0,-1],[1,1]] has det 1, so the inverse is the adjugate
        // [[1,1],[-1,0]], worked out by hand.
        let g2 = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 1.0]]).unwrap();
        let inv = inverse(&g2).unwrap();
        let expect = CMatrix::from_real_rows(&[&[1.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(inv.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn exact_zero_pivot_is_singular() {
        let z = CMatrix::zeros(3, 3);
        assert!(matches!(
            lu_solve(&z, &CMatrix::identity(3)),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn near_singular_is_flagged_but_solved() {
        let a = CMatrix::new(
            2,
            2,
            vec![
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(1e-15, 0.0),
            ],
        )
        .unwrap();
        let s = lu_solve(&a, &CMatrix::identity(2)).unwrap();
        assert!(s.near_singular);
        assert!(s.pivot_ratio < 1e-13);
        assert!((s.x[(1, 1)].re - 1e15).abs() / 1e15 < 1e-12);
    }

    #[test]
    fn residual_small_for_random_like_system() {
        // Deterministic full matrix with a complex twist.
        let n = 8;
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = ((i * 7 + j * 3 + 1) % 11) as f64 - 5.0;
                let w = ((i * 5 + j * 13 + 2) % 7) as f64 - 3.0;
                a[(i, j)] = Complex::new(v, 0.5 * w);
            }
        }
        let x = lu_solve(&a, &CMatrix::identity(n)).unwrap().x;
        let r = a.mul(&x).unwrap().sub(&CMatrix::identity(n)).unwrap();
        assert!(r.frobenius_norm() < 1e-12);
    }
}
