//! Dense matrices over Q(i) with exact Gaussian elimination.

use num::{One, Zero};

use super::scalar::GaussianRational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = GaussianRational::one();
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<GaussianRational>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Gauss-Jordan elimination. Pivots are the leftmost nonzero entry in
    /// each column scan; no magnitude-based pivoting is needed.
    pub fn rref(&self) -> Rref {
        self.rref_limited(self.cols)
    }

    /// Elimination choosing pivots only among the first `limit` columns;
    /// row operations still apply to every column.
    fn rref_limited(&self, limit: usize) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().unwrap();
            for k in c..m.cols {
                let v = &m[(r, k)] * &inv;
                m[(r, k)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for k in c..m.cols {
                    if m[(r, k)].is_zero() {
                        continue;
                    }
                    let delta = &factor * &m[(r, k)];
                    m[(i, k)] -= &delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    /// Rank over Q(i).
    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<GaussianRational>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![GaussianRational::zero(); self.cols];
                x[fc] = GaussianRational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = -&matrix[(row, fc)];
                }
                x
            })
            .collect()
    }

    /// One solution of `A x = b`, or `None` when inconsistent. Free
    /// variables are set to zero.
    pub fn solve(&self, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = ExactMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Determinant of a square matrix by elimination.
    pub fn determinant(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let k = self.rows;
        let mut a = self.clone();
        let mut det = GaussianRational::one();
        for c in 0..k {
            let Some(p) = (c..k).find(|&r| !a[(r, c)].is_zero()) else {
                return GaussianRational::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            det = &det * &a[(c, c)];
            let inv = a[(c, c)].inv().unwrap();
            for r in c + 1..k {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let factor = &a[(r, c)] * &inv;
                for j in c..k {
                    let delta = &factor * &a[(c, j)];
                    a[(r, j)] -= &delta;
                }
            }
        }
        det
    }

    /// Solves `A x = b` for several right-hand sides with one elimination.
    pub fn solve_many(&self, rhs: &[Vec<GaussianRational>]) -> Vec<Option<Vec<GaussianRational>>> {
        let k = rhs.len();
        let mut aug = ExactMatrix::zeros(self.rows, self.cols + k);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            for (j, b) in rhs.iter().enumerate() {
                assert_eq!(b.len(), self.rows);
                aug[(r, self.cols + j)] = b[r].clone();
            }
        }
        let Rref { matrix, pivots } = aug.rref_limited(self.cols);
        let rank = pivots.len();
        (0..k)
            .map(|j| {
                let col = self.cols + j;
                if (rank..self.rows).any(|r| !matrix[(r, col)].is_zero()) {
                    return None;
                }
                let mut x = vec![GaussianRational::zero(); self.cols];
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = matrix[(row, col)].clone();
                }
                Some(x)
            })
            .collect()
    }

    pub fn mul_vec(&self, x: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for c in 0..self.cols {
                    if !self[(r, c)].is_zero() && !x[c].is_zero() {
                        acc += &(&self[(r, c)] * &x[c]);
                    }
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = GaussianRational;
    fn index(&self, (r, c): (usize, usize)) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussianRational {
        &mut self.data[r * self.cols + c]
    }
}
