use crate::error::{HardyError, Result};
use crate::scalar::Scalar;

use super::BandMatrix;

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    n: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    /// Adds a symmetric edge coupling `t (u_a - u_b)` to rows `a` and `b`.
    pub fn add_edge(&mut self, a: usize, b: usize, t: T) {
        self.add(a, a, t);
        self.add(b, b, t);
        self.add(a, b, -t);
        self.add(b, a, -t);
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        self.entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry present") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// Square compressed-sparse-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or_else(T::zero)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = T::zero();
            for k in s..e {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Returns `self + diag(d)`.
    pub fn plus_diagonal(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.n {
            return Err(HardyError::Parameter(format!(
                "diagonal of length {} for matrix of order {}",
                d.len(),
                self.n
            )));
        }
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate() {
            let (s, e) = (out.row_ptr[i], out.row_ptr[i + 1]);
            match (s..e).find(|&k| out.cols[k] == i) {
                Some(k) => out.vals[k] += di,
                None => {
                    return Err(HardyError::Numerical(format!(
                        "row {i} has no diagonal slot"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// Maximum `|a_ij - a_ji|` over stored entries.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Copies the lower triangle into banded storage.
    pub fn to_band(&self) -> BandMatrix<T> {
        let mut band = BandMatrix::zeros(self.n, self.bandwidth());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    band.set(i, j, v);
                }
            }
        }
        band
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v.to_f64_lossy();
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_symmetric() {
        let mut b = TripletBuilder::<f64>::new(3);
        b.add_edge(0, 1, 2.0);
        b.add_edge(1, 2, 1.0);
        b.add(0, 0, 0.5);
        let m = b.build();
        assert_eq!(m.get(0, 0), 2.5);
        assert_eq!(m.get(1, 1), 3.0);
        assert_eq!(m.get(0, 1), -2.0);
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.bandwidth(), 1);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![0.5, 0.0, 0.0]);
    }
}
