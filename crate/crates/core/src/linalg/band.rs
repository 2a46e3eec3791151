use crate::error::{HardyError, Result};
use crate::scalar::Scalar;

/// Symmetric matrix in lower banded storage: row `i` keeps columns
/// `i - bandwidth ..= i`.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bw: bandwidth,
            data: vec![T::zero(); n * (bandwidth + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Entry `(i, j)` of the symmetric matrix.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            T::zero()
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Sets the symmetric pair `(i, j)`/`(j, i)`; requires `|i - j| <= bandwidth`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add_diagonal(&mut self, d: &[T]) {
        assert_eq!(d.len(), self.n);
        for (i, &di) in d.iter().enumerate() {
            let k = self.idx(i, i);
            self.data[k] += di;
        }
    }

    /// Replaces the rows and columns of `fixed` nodes by the identity, the
    /// symmetric way of imposing Dirichlet values on interior nodes. The
    /// caller moves the removed couplings to the right-hand side.
    pub fn constrain(&mut self, fixed: &[bool]) {
        assert_eq!(fixed.len(), self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                if fixed[i] || fixed[j] {
                    let k = self.idx(i, j);
                    self.data[k] = if i == j { T::one() } else { T::zero() };
                }
            }
        }
    }

    /// LDLᵀ factorization without pivoting. Succeeds for any matrix whose
    /// leading principal minors are nonzero; the signs of `D` give the
    /// inertia (Sylvester).
    pub fn factorize(mut self) -> Result<BandLdl<T>> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut d = vec![T::zero(); n];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let (before, rest) = self.data.split_at_mut(i * w);
            let row_i = &mut rest[..w];
            for j in lo..i {
                let row_j = &before[j * w..(j + 1) * w];
                let si = lo + bw - i;
                let sj = lo + bw - j;
                let len = j - lo;
                let mut acc = T::zero();
                for (a, b) in row_i[si..si + len].iter().zip(&row_j[sj..sj + len]) {
                    acc += *a * *b;
                }
                row_i[j + bw - i] -= acc;
            }
            let mut di = row_i[bw];
            for k in lo..i {
                let wk = row_i[k + bw - i];
                di -= wk * wk / d[k];
            }
            if di == T::zero() || !di.is_finite() {
                return Err(HardyError::Numerical(format!(
                    "zero or non-finite pivot at row {i} of {n}"
                )));
            }
            d[i] = di;
            for k in lo..i {
                row_i[k + bw - i] /= d[k];
            }
        }
        Ok(BandLdl {
            n,
            bw,
            l: self.data,
            d,
        })
    }
}

/// Banded `L D Lᵀ` factors.
#[derive(Debug, Clone)]
pub struct BandLdl<T> {
    n: usize,
    bw: usize,
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> BandLdl<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of negative pivots, i.e. the number of negative eigenvalues.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < T::zero()).count()
    }

    pub fn pivots(&self) -> &[T] {
        &self.d
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.n);
        let (bw, w) = (self.bw, self.bw + 1);
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * w..(i + 1) * w];
            let mut acc = T::zero();
            for (lik, xk) in row[lo + bw - i..bw].iter().zip(&x[lo..i]) {
                acc += *lik * *xk;
            }
            x[i] -= acc;
        }
        for (xi, &di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..self.n).rev() {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * w..(i + 1) * w];
            let xi = x[i];
            for (lik, xk) in row[lo + bw - i..bw].iter().zip(&mut x[lo..i]) {
                *xk -= *lik * xi;
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tridiag(n: usize, diag: f64) -> BandMatrix<f64> {
        let mut m = BandMatrix::zeros(n, 1);
        for i in 0..n {
            m.set(i, i, diag);
            if i > 0 {
                m.set(i, i - 1, -1.0);
            }
        }
        m
    }

    #[test]
    fn inertia_of_shifted_laplacian() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2cos(kπ/(n+1))
        let n = 20;
        let shift = 2.0 - 2.0 * (3.5 * std::f64::consts::PI / 21.0).cos();
        let ldl = tridiag(n, 2.0 - shift).factorize().unwrap();
        assert_eq!(ldl.negative_pivots(), 3);
    }

    proptest! {
        #[test]
        fn solves_random_spd_band(seed in 0u64..1000, n in 2usize..40, bw in 1usize..6) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bw = bw.min(n - 1);
            let mut m = BandMatrix::<f64>::zeros(n, bw);
            for i in 0..n {
                let lo = i.saturating_sub(bw);
                let mut rowsum = 0.0;
                for j in lo..i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    m.set(i, j, v);
                    rowsum += v.abs();
                }
                m.set(i, i, 2.0 * (bw as f64) + 1.0 + rowsum);
            }
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut b = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    b[i] += m.get(i, j) * x[j];
                }
            }
            let ldl = m.factorize().unwrap();
            prop_assert_eq!(ldl.negative_pivots(), 0);
            let y = ldl.solve(&b);
            for (a, e) in y.iter().zip(&x) {
                prop_assert!((a - e).abs() < 1e-10);
            }
        }
    }
}
