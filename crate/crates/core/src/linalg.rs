//! Dense exact linear algebra at desk scale.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from(v)).collect())
                .collect(),
        )
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] += &t;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn rank(&self) -> usize {
        row_reduce(self).1.len()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row-echelon form and the (strictly increasing) pivot columns.
pub fn row_reduce(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let pivots = row_reduce_in_place(&mut a);
    (a, pivots)
}

pub fn row_reduce_in_place(a: &mut Matrix) -> Vec<usize> {
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a[(r, c)].inv();
        for j in c..cols {
            if !a[(r, j)].is_zero() {
                a[(r, j)] = &a[(r, j)] * &inv;
            }
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let t = &f * &a[(r, j)];
                a[(i, j)] -= &t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space `{v : m v = 0}` as column vectors.
pub fn kernel(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (rref, pivots) = row_reduce(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); m.cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rref[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b` for one particular solution, if any.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows);
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let pivots = row_reduce_in_place(&mut aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[(r, m.cols)].clone();
    }
    Some(x)
}

/// Right inverse `s` with `m s = 1`, built from the pivot columns of the
/// reduced form of `[m | 1]`. Fails unless `m` has full row rank.
pub fn right_inverse(m: &Matrix) -> Result<Matrix> {
    let (rows, cols) = (m.rows, m.cols);
    let mut aug = Matrix::zeros(rows, cols + rows);
    for i in 0..rows {
        for j in 0..cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, cols + i)] = Scalar::one();
    }
    let pivots = row_reduce_in_place(&mut aug);
    let rank = pivots.iter().filter(|&&p| p < cols).count();
    if rank < rows {
        return Err(Error::NotSurjective {
            degree: 0,
            rank,
            target_dim: rows,
        });
    }
    // row r of the reduced form reads x_{p_r} + Σ_free (…) = (E b)_r ; setting
    // the free variables to zero gives the pivot-column section.
    let mut s = Matrix::zeros(cols, rows);
    for (r, &p) in pivots.iter().enumerate() {
        for j in 0..rows {
            s[(p, j)] = aug[(r, cols + j)].clone();
        }
    }
    Ok(s)
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    assert_eq!(m.rows, m.cols);
    right_inverse(m).ok()
}

/// Incrementally maintained reduced echelon basis of a subspace of `k^dim`.
/// Rows are kept fully reduced, so membership tests and normal forms are a
/// single pass.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    pub dim: usize,
    /// (pivot column, row) with rows monic at the pivot and zero at every
    /// other pivot column.
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        p.sort_unstable();
        p
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &Vec<Scalar>)> {
        self.rows.iter().map(|(p, r)| (*p, r))
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut [Scalar]) {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    let t = &f * x;
                    v[j] -= &t;
                }
            }
        }
    }

    /// Inserts `v`; returns false if it was already in the span.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (j, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    let t = &f * x;
                    row[j] -= &t;
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Scalar::is_zero)
    }
}
