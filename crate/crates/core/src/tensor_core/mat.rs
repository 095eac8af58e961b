//! Fixed-capacity dense matrices (at most 4×4) and small vector helpers.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported row or column count.
pub const MAX_DIM: usize = 4;

/// Dense `m × n` matrix with `m, n ≤ 4`, stored in a fixed 4×4 array.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat {
    m: usize,
    n: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.m, self.n)?;
        for i in 0..self.m {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.a[i][j])?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    /// Zero matrix of shape `m × n`.
    ///
    /// # Panics
    /// If either dimension is 0 or exceeds [`MAX_DIM`].
    pub fn zeros(m: usize, n: usize) -> Mat {
        assert!(
            (1..=MAX_DIM).contains(&m) && (1..=MAX_DIM).contains(&n),
            "Mat dimensions {m}x{n} outside 1..=4"
        );
        Mat { m, n, a: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut r = Mat::zeros(n, n);
        for i in 0..n {
            r.a[i][i] = 1.0;
        }
        r
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Mat {
        let mut r = Mat::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                r.a[i][j] = f(i, j);
            }
        }
        r
    }

    /// Builds a matrix from row slices; all rows must share a length.
    pub fn from_rows(rows: &[&[f64]]) -> Mat {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Mat::from_fn(m, n, |i, j| rows[i][j])
    }

    /// Row-major flat constructor.
    pub fn from_row_slice(m: usize, n: usize, data: &[f64]) -> Result<Mat> {
        if data.len() != m * n || m == 0 || n == 0 || m > MAX_DIM || n > MAX_DIM {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {m}x{n} matrix",
                data.len()
            )));
        }
        Ok(Mat::from_fn(m, n, |i, j| data[i * n + j]))
    }

    pub fn diag(d: &[f64]) -> Mat {
        Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// `a ⊗ b`, the matrix with entries `a_i b_j`.
    pub fn outer(a: &[f64], b: &[f64]) -> Mat {
        Mat::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.m * self.n);
        for i in 0..self.m {
            v.extend_from_slice(&self.a[i][..self.n]);
        }
        v
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.a[i][..self.n].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.a[i][j]).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.n, self.m, |i, j| self.a[j][i])
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat::from_fn(self.m, self.n, |i, j| s * self.a[i][j])
    }

    /// Frobenius inner product `⟨A, B⟩ = tr(AᵀB)`.
    pub fn dot(&self, other: &Mat) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dot shape mismatch");
        let mut s = 0.0;
        for i in 0..self.m {
            for j in 0..self.n {
                s += self.a[i][j] * other.a[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.m {
            for j in 0..self.n {
                r = r.max(self.a[i][j].abs());
            }
        }
        r
    }

    pub fn trace(&self) -> f64 {
        (0..self.m.min(self.n)).map(|i| self.a[i][i]).sum()
    }

    pub fn sym(&self) -> Mat {
        assert!(self.is_square());
        Mat::from_fn(self.n, self.n, |i, j| 0.5 * (self.a[i][j] + self.a[j][i]))
    }

    pub fn skew(&self) -> Mat {
        assert!(self.is_square());
        Mat::from_fn(self.n, self.n, |i, j| 0.5 * (self.a[i][j] - self.a[j][i]))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.m, "matmul inner dimension mismatch");
        Mat::from_fn(self.m, other.n, |i, j| {
            (0..self.n).map(|k| self.a[i][k] * other.a[k][j]).sum()
        })
    }

    /// `A v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "mul_vec length mismatch");
        (0..self.m)
            .map(|i| (0..self.n).map(|j| self.a[i][j] * v[j]).sum())
            .collect()
    }

    /// `Aᵀ v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.m, "tr_mul_vec length mismatch");
        (0..self.n)
            .map(|j| (0..self.m).map(|i| self.a[i][j] * v[i]).sum())
            .collect()
    }

    /// Top-left `r × c` sub-block starting at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Mat {
        assert!(i0 + r <= self.m && j0 + c <= self.n, "block out of range");
        Mat::from_fn(r, c, |i, j| self.a[i0 + i][j0 + j])
    }

    /// Stacks `top` above `bottom` (equal column counts).
    pub fn vstack(top: &Mat, bottom: &Mat) -> Result<Mat> {
        if top.n != bottom.n || top.m + bottom.m > MAX_DIM {
            return Err(Error::Dimension(format!(
                "cannot stack {:?} over {:?}",
                top.shape(),
                bottom.shape()
            )));
        }
        Ok(Mat::from_fn(top.m + bottom.m, top.n, |i, j| {
            if i < top.m {
                top.a[i][j]
            } else {
                bottom.a[i - top.m][j]
            }
        }))
    }

    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "det of non-square matrix");
        let a = &self.a;
        match self.n {
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => (0..4)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * a[0][j] * self.minor(0, j).det()
                })
                .sum(),
        }
    }

    /// Matrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Mat {
        assert!(self.m > 1 && self.n > 1);
        Mat::from_fn(self.m - 1, self.n - 1, |r, c| {
            let rr = if r < i { r } else { r + 1 };
            let cc = if c < j { c } else { c + 1 };
            self.a[rr][cc]
        })
    }

    /// Cofactor matrix, `cof A = det(A) A⁻ᵀ` when `A` is invertible.
    pub fn cof(&self) -> Mat {
        assert!(self.is_square(), "cof of non-square matrix");
        let a = &self.a;
        match self.n {
            1 => Mat::from_rows(&[&[1.0]]),
            2 => Mat::from_rows(&[&[a[1][1], -a[1][0]], &[-a[0][1], a[0][0]]]),
            3 => Mat::from_fn(3, 3, |i, j| {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]
            }),
            _ => Mat::from_fn(4, 4, |i, j| {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                sign * self.minor(i, j).det()
            }),
        }
    }

    pub fn inverse(&self) -> Result<Mat> {
        let d = self.det();
        let scale = self.max_abs().powi(self.n as i32);
        if d == 0.0 || !d.is_finite() || d.abs() <= 1e-14 * scale {
            return Err(Error::Singular(format!("det = {d:e}")));
        }
        Ok(self.cof().transpose().scale(1.0 / d))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.m && j < self.n, "index ({i},{j}) out of {}x{}", self.m, self.n);
        &self.a[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.m && j < self.n, "index ({i},{j}) out of {}x{}", self.m, self.n);
        &mut self.a[i][j]
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(self, o: Mat) -> Mat {
        assert_eq!(self.shape(), o.shape(), "add shape mismatch");
        Mat::from_fn(self.m, self.n, |i, j| self.a[i][j] + o.a[i][j])
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(self, o: Mat) -> Mat {
        assert_eq!(self.shape(), o.shape(), "sub shape mismatch");
        Mat::from_fn(self.m, self.n, |i, j| self.a[i][j] - o.a[i][j])
    }
}

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Mat {
    type Output = Mat;
    fn mul(self, s: f64) -> Mat {
        self.scale(s)
    }
}

impl Mul<Mat> for f64 {
    type Output = Mat;
    fn mul(self, a: Mat) -> Mat {
        a.scale(self)
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, o: Mat) -> Mat {
        self.matmul(&o)
    }
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// `a / |a|`.
pub fn normalized(a: &[f64]) -> Vec<f64> {
    let r = norm(a);
    a.iter().map(|v| v / r).collect()
}

/// Unit vector `e_k` in `ℝⁿ`.
pub fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// 3D cross product.
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Scalar 2D cross product `a₁b₂ − a₂b₁`.
pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
