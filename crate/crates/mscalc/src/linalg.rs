//! Exact dense linear algebra over the rationals with deterministic pivoting.

use num_traits::{One, Zero};

use crate::rat::{abs_numer, Q};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Q::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for i in 0..rows {
                m.data[i][j] = c[i].clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.data[i][j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Q::is_zero))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        self.data
            .iter()
            .map(|row| row.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i][j] += &other.data[i][j];
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        let mut out = self.clone();
        for row in &mut out.data {
            for x in row {
                *x *= c;
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        rref(&mut m).len()
    }
}

/// Reduces `m` to reduced row echelon form in place and returns the pivot
/// columns. Within a column the pivot row is the one with the largest
/// absolute numerator, ties broken by the lowest row index.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let n = m.cols;
    reduce_on_prefix(m, n)
}

/// Solves `a·x = b`, setting free variables to zero; `None` if inconsistent.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    solve_many(a, &[b.to_vec()]).map(|mut v| v.remove(0))
}

/// Solves `a·x = b` for several right-hand sides with one reduction.
pub fn solve_many(a: &Matrix, bs: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let mut aug = Matrix::zeros(a.rows, a.cols + bs.len());
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.data[i][j] = a.data[i][j].clone();
        }
        for (k, b) in bs.iter().enumerate() {
            aug.data[i][a.cols + k] = b[i].clone();
        }
    }
    let pivots = reduce_on_prefix(&mut aug, a.cols);
    for i in pivots.len()..a.rows {
        if aug.data[i][a.cols..].iter().any(|x| !x.is_zero()) {
            return None;
        }
    }
    let mut out = vec![vec![Q::zero(); a.cols]; bs.len()];
    for (r, &c) in pivots.iter().enumerate() {
        for (k, x) in out.iter_mut().enumerate() {
            x[c] = aug.data[r][a.cols + k].clone();
        }
    }
    Some(out)
}

/// RREF restricted to choosing pivots among the first `ncols` columns.
fn reduce_on_prefix(m: &mut Matrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..m.rows {
            if m.data[i][c].is_zero() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if abs_numer(&m.data[i][c]) > abs_numer(&m.data[b][c]) => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else { continue };
        m.data.swap(r, p);
        let inv = m.data[r][c].recip();
        for x in &mut m.data[r] {
            *x *= &inv;
        }
        let pivot_row = m.data[r].clone();
        for i in 0..m.rows {
            if i == r || m.data[i][c].is_zero() {
                continue;
            }
            let factor = m.data[i][c].clone();
            for (x, y) in m.data[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space, one vector per free column (that entry set to 1).
pub fn kernel(a: &Matrix) -> Vec<Vec<Q>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let mut out = Vec::new();
    for free in (0..a.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); a.cols];
        v[free] = Q::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m.data[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Echelon basis (nonzero RREF rows) of the span of the given vectors.
pub fn span_basis(len: usize, vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut m = Matrix::zeros(vectors.len(), len);
    for (i, v) in vectors.iter().enumerate() {
        m.data[i] = v.clone();
    }
    let k = rref(&mut m).len();
    m.data.truncate(k);
    m.data
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    if a.rows != a.cols {
        return None;
    }
    let cols = solve_many(a, &Matrix::identity(a.rows).columns())?;
    if a.rank() < a.rows {
        return None;
    }
    Some(Matrix::from_columns(a.rows, &cols))
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Q::is_zero)
}

/// `Σ c_k v_k` for vectors of equal length.
pub fn combine(len: usize, terms: &[(Q, &[Q])]) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qf};

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix { rows: rows.len(), cols: rows[0].len(), data: rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect() }
    }

    #[test]
    fn solve_and_kernel() {
        let a = mat(&[&[1, 2, 3], &[2, 4, 7]]);
        let x = solve(&a, &[q(1), q(3)]).unwrap();
        assert_eq!(a.apply(&x), vec![q(1), q(3)]);
        assert_eq!(x[1], q(0), "free variable is zero");
        let k = kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.apply(&k[0])));
        assert!(solve(&mat(&[&[1, 1], &[1, 1]]), &[q(1), q(2)]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = mat(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(inverse(&mat(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(inverse(&mat(&[&[2]])).unwrap().data[0][0], qf(1, 2));
    }

    #[test]
    fn pivot_prefers_largest_numerator() {
        let mut m = mat(&[&[1, 0], &[3, 1]]);
        let p = rref(&mut m);
        assert_eq!(p, vec![0, 1]);
        assert_eq!(m, Matrix::identity(2));
    }
}
