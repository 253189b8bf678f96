//! Dense matrices over F2, sized for Mackey functor levels (a handful of rows).

use std::fmt;

/// A `rows x cols` matrix over F2, acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from row-major 0/1 rows. `cols` is needed for matrices with no rows.
    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Option<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return None;
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return None,
                }
            }
        }
        Some(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    /// `self * rhs`; `None` on a shape mismatch.
    pub fn mul(&self, rhs: &F2Matrix) -> Option<F2Matrix> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = F2Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.get(k, j) {
                        let v = out.get(i, j);
                        out.set(i, j, !v);
                    }
                }
            }
        }
        Some(out)
    }

    pub fn add(&self, rhs: &F2Matrix) -> Option<F2Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a ^ b).collect();
        Some(F2Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| !v)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            if pivot != rank {
                for j in 0..m.cols {
                    let (a, b) = (m.get(pivot, j), m.get(rank, j));
                    m.set(pivot, j, b);
                    m.set(rank, j, a);
                }
            }
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    for j in 0..m.cols {
                        let v = m.get(r, j) ^ m.get(rank, j);
                        m.set(r, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &F2Matrix) -> F2Matrix {
        let mut out = F2Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Matrix{:?}", self.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_products() {
        let m = F2Matrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3).unwrap();
        assert_eq!(m.rank(), 2);
        let sq = m.mul(&m).unwrap();
        assert_eq!(sq.to_rows(), vec![vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(F2Matrix::identity(4).rank(), 4);
        assert_eq!(F2Matrix::zeros(0, 3).rank(), 0);
        assert!(m.mul(&F2Matrix::zeros(2, 2)).is_none());
        assert!(F2Matrix::from_rows(&[vec![2]], 1).is_none());
    }
}
