//! Dense matrices over a finite field: row reduction, rank, kernels.
//!
//! Everything targets small dimensions (at most 12), so the implementation
//! is straightforward Gauss-Jordan with exact arithmetic.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::{FieldElement, FiniteField};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FiniteField,
    rows: usize,
    cols: usize,
    /// Row-major.
    data: Vec<FieldElement>,
}

/// Result of a kernel computation: `rank + basis.len() == cols` always.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub rank: usize,
    pub basis: Vec<Vec<FieldElement>>,
}

impl Matrix {
    pub fn zeros(field: &FiniteField, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &FiniteField, dim: usize) -> Matrix {
        let mut m = Matrix::zeros(field, dim, dim);
        for i in 0..dim {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_fn(
        field: &FiniteField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                debug_assert_eq!(v.field(), field);
                data.push(v);
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose c-th column is `cols[c]`.
    pub fn from_columns(field: &FiniteField, rows: usize, cols: &[Vec<FieldElement>]) -> Matrix {
        Matrix::from_fn(field, rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        assert_eq!(self.field, rhs.field, "field mismatch");
        Matrix::from_fn(&self.field, self.rows, rhs.cols, |r, c| {
            let mut acc = self.field.zero();
            for k in 0..self.cols {
                acc = &acc + &(&self[(r, k)] * &rhs[(k, c)]);
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for c in 0..self.cols {
                    acc = &acc + &(&self[(r, c)] * &v[c]);
                }
                acc
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise x ↦ x^(p^t); negative t is the inverse automorphism.
    pub fn frobenius_entrywise(&self, t: i64) -> Matrix {
        self.map(|e| e.frobenius(t))
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = m[(row, col)].inv();
            for c in col..m.cols {
                m[(row, c)] = &m[(row, c)] * &inv;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for c in col..m.cols {
                        m[(r, c)] = &m[(r, c)] - &(&factor * &m[(row, c)]);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of {x : A·x = 0}. The free-variable construction guarantees
    /// rank + basis.len() = cols.
    pub fn kernel_basis(&self) -> KernelBasis {
        let (r, pivots) = self.rref();
        let rank = pivots.len();
        let mut basis = Vec::with_capacity(self.cols - rank);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -&r[(prow, free)];
            }
            debug_assert!(self.mul_vec(&v).iter().all(|e| e.is_zero()));
            basis.push(v);
        }
        KernelBasis { rank, basis }
    }

    /// Dimension over the field of the kernel of the semilinear map
    /// x ↦ A·φ^twist(x). The coordinatewise p-power is an additive bijection
    /// carrying subspaces to subspaces of equal dimension (the field is
    /// perfect), so this is cols − rank(A) independent of the twist.
    pub fn semilinear_kernel_dim(&self, _twist: i64) -> usize {
        self.cols - self.rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:?} ", self[(r, c)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
