use super::Scalar;
use num_traits::{One, Signed, Zero};

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
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
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> Scalar {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut r = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)] += a * b;
                    }
                }
            }
        }
        r
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn commutator(&self, o: &Matrix) -> Matrix {
        self.mul(o).sub(&o.mul(self))
    }

    /// Is `self` a scalar multiple of the identity? Returns the scalar.
    pub fn as_scalar_identity(&self) -> Option<Scalar> {
        if self.rows != self.cols || self.rows == 0 {
            return None;
        }
        let c = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { c.clone() } else { Scalar::zero() };
                if self[(i, j)] != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Determinant by Gaussian elimination over Q.
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut d = Scalar::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Scalar::zero();
            };
            if piv != c {
                a.swap_rows(piv, c);
                d = -d;
            }
            let pv = a[(c, c)].clone();
            d *= &pv;
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] / &pv;
                for k in c..n {
                    let t = &f * &a[(c, k)];
                    a[(r, k)] -= t;
                }
            }
        }
        d
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut row = 0;
        for c in 0..self.cols {
            let Some(piv) = (row..self.rows).find(|&r| !a[(r, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(piv, row);
            let pv = a[(row, c)].clone();
            for r in row + 1..self.rows {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] / &pv;
                for k in c..self.cols {
                    let t = &f * &a[(row, k)];
                    a[(r, k)] -= t;
                }
            }
            row += 1;
            if row == self.rows {
                break;
            }
        }
        row
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    /// Solve `self · x = b` for all right-hand sides (columns of `b`);
    /// `None` if inconsistent. Free variables are set to 0.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows);
        let (n, m, w) = (self.rows, self.cols, b.cols);
        let mut a = Matrix::from_fn(n, m + w, |i, j| {
            if j < m {
                self[(i, j)].clone()
            } else {
                b[(i, j - m)].clone()
            }
        });
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..m {
            let Some(piv) = (row..n).find(|&r| !a[(r, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(piv, row);
            let inv = a[(row, c)].recip();
            for k in c..m + w {
                a[(row, k)] = &a[(row, k)] * &inv;
            }
            for r in 0..n {
                if r != row && !a[(r, c)].is_zero() {
                    let f = a[(r, c)].clone();
                    for k in c..m + w {
                        let t = &f * &a[(row, k)];
                        a[(r, k)] -= t;
                    }
                }
            }
            pivots.push(c);
            row += 1;
            if row == n {
                break;
            }
        }
        for r in row..n {
            if (m..m + w).any(|k| !a[(r, k)].is_zero()) {
                return None;
            }
        }
        let mut x = Matrix::zeros(m, w);
        for (r, &c) in pivots.iter().enumerate() {
            for k in 0..w {
                x[(c, k)] = a[(r, m + k)].clone();
            }
        }
        Some(x)
    }

    /// Characteristic polynomial `det(t - A)`, coefficients low -> high
    /// (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut c = vec![Scalar::zero(); n + 1];
        c[n] = Scalar::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let prev = c[n - k + 1].clone();
            mk = self.mul(&mk).add(&Matrix::identity(n).scale(&prev));
            let am = self.mul(&mk);
            let tr: Scalar = (0..n).map(|i| am[(i, i)].clone()).sum();
            c[n - k] = -tr / Scalar::from_integer((k as i64).into());
        }
        c
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}
