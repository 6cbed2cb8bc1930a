//! Minimal dense linear algebra: row-major matrices, LU factorization with
//! partial pivoting, solves and inversion. Sized for the few-hundred-state
//! chains this crate works with.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n_rows: usize, n_cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// self * other
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = Matrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// self * v (column vector)
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n_cols, v.len());
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// v^T * self (row vector times matrix)
    pub fn vecmat(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n_rows, v.len());
        let mut out = vec![0.0; self.n_cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        out
    }

    /// Max-norm of self - other.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// LU factorization with partial pivoting (PA = LU, packed in place).
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: Matrix,
    perm: Vec<usize>,
}

pub fn lu_factor(a: &Matrix) -> Result<LuFactor> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[(col, col)].abs();
        for r in col + 1..n {
            let v = lu[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 || !pivot_val.is_finite() {
            return Err(Error::SingularSystem);
        }
        if pivot_row != col {
            perm.swap(col, pivot_row);
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
        }
        let inv_pivot = 1.0 / lu[(col, col)];
        for r in col + 1..n {
            let m = lu[(r, col)] * inv_pivot;
            lu[(r, col)] = m;
            if m == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let upd = lu[(col, j)];
                lu[(r, j)] -= m * upd;
            }
        }
    }
    Ok(LuFactor { lu, perm })
}

impl LuFactor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n_rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Ly = Pb
        for i in 1..n {
            let mut acc = x[i];
            let row = self.lu.row(i);
            for (k, xk) in x.iter().enumerate().take(i) {
                acc -= row[k] * xk;
            }
            x[i] = acc;
        }
        // Ux = y
        for i in (0..n).rev() {
            let mut acc = x[i];
            let row = self.lu.row(i);
            for (k, xk) in x.iter().enumerate().skip(i + 1) {
                acc -= row[k] * xk;
            }
            x[i] = acc / row[i];
        }
        x
    }

    /// One step of iterative refinement against the original matrix.
    pub fn refine(&self, a: &Matrix, b: &[f64], x: &mut [f64]) {
        let ax = a.matvec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = self.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }

    /// Iterative refinement with the residual accumulated in compensated
    /// (error-free transformation) arithmetic, which keeps refinement
    /// effective even when |x| is many orders above |b|.
    pub fn refine_compensated(&self, a: &Matrix, b: &[f64], x: &mut [f64]) {
        let n = self.lu.n_rows;
        let mut r = vec![0.0; n];
        for i in 0..n {
            r[i] = compensated_residual(b[i], a.row(i), x);
        }
        let dx = self.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
}

/// b - row . x with TwoProduct/TwoSum compensation (Ogita-Rump-Oishi dot2).
fn compensated_residual(b: f64, row: &[f64], x: &[f64]) -> f64 {
    let mut sum = b;
    let mut err = 0.0;
    for (&a, &xi) in row.iter().zip(x) {
        let p = -a * xi;
        let p_err = (-a).mul_add(xi, -p);
        // TwoSum(sum, p)
        let s = sum + p;
        let bb = s - sum;
        let s_err = (sum - (s - bb)) + (p - bb);
        sum = s;
        err += p_err + s_err;
    }
    sum + err
}

/// Solve a x = b with partial-pivot LU plus compensated refinement.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let lu = lu_factor(a)?;
    let mut x = lu.solve(b);
    lu.refine_compensated(a, b, &mut x);
    Ok(x)
}

/// Dense inverse via column solves, with two compensated refinement steps
/// per column.
pub fn invert(a: &Matrix) -> Result<Matrix> {
    let n = a.n_rows();
    let lu = lu_factor(a)?;
    let mut out = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let mut x = lu.solve(&e);
        lu.refine_compensated(a, &e, &mut x);
        lu.refine_compensated(a, &e, &mut x);
        for (row, &v) in x.iter().enumerate() {
            out[(row, col)] = v;
        }
        e[col] = 0.0;
    }
    Ok(out)
}
