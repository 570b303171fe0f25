use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest dimension accepted by [`pfaffian_oracle`].
pub const ORACLE_MAX_DIM: usize = 12;

const SKEW_TOL: f64 = 1e-12;

/// Antisymmetric complex matrix, checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    a: DMatrix<Complex64>,
}

impl SkewMatrix {
    pub fn new(a: DMatrix<Complex64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
        }
        let n = a.nrows();
        for i in 0..n {
            for j in i..n {
                let dev = (a[(i, j)] + a[(j, i)]).norm();
                if !(dev <= SKEW_TOL) {
                    return Err(Error::NotSkew { i, j, dev });
                }
            }
        }
        Ok(Self { a })
    }

    /// Builds the matrix from its strict upper triangle `f(i, j)`, `i < j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        Self { a }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut a = DMatrix::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, cols: r.len() });
            }
            for (j, &x) in r.iter().enumerate() {
                a[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self::new(a)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[(i, j)]
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// `A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        let a = DMatrix::from_fn(n, n, |i, j| self.a[(perm[i], perm[j])]);
        Self { a }
    }
}

/// Pfaffian by Parlett–Reid skew tridiagonalization with partial pivoting.
///
/// Odd dimensions give exactly zero.
pub fn pfaffian(a: &SkewMatrix) -> Complex64 {
    let n = a.dim();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut m = a.a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        // pivot: largest entry in column k below the diagonal
        let mut kp = k + 1;
        let mut best = m[(k + 1, k)].norm();
        for r in k + 2..n {
            let v = m[(r, k)].norm();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|r| m[(r, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Signed sum over perfect matchings. Exponential cost; test oracle only.
pub fn pfaffian_oracle(a: &SkewMatrix) -> Result<Complex64> {
    let n = a.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::TooLarge { n, max: ORACLE_MAX_DIM });
    }
    if n % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(matching_sum(&a.a, &idx))
}

// Expansion along the first remaining index: Pf = sum_j (-1)^{j+1} a_{0j} Pf(A minus {0, j}).
fn matching_sum(a: &DMatrix<Complex64>, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let first = idx[0];
    let mut total = Complex64::new(0.0, 0.0);
    for p in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(q, _)| q + 1 != p)
            .map(|(_, &x)| x)
            .collect();
        let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * a[(first, idx[p])] * matching_sum(a, &rest);
    }
    total
}
