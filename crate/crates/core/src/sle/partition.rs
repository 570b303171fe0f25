use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::numerics::{central_diff_default, pfaffian, SkewMatrix};
use crate::{Error, Result};

fn check_ordered(xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.len() % 2 == 1 {
        return Err(Error::OddCount(xs.len()));
    }
    for (i, w) in xs.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("points must be strictly increasing (x[{i}] = {}, x[{}] = {})", w[0], i + 1, w[1])));
        }
    }
    Ok(())
}

fn pf_complex(xs: &[Complex64]) -> Result<Complex64> {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] == xs[j] {
                return Err(Error::Coincident(i, j));
            }
        }
    }
    Ok(pfaffian(&SkewMatrix::from_upper(xs.len(), |i, j| 1.0 / (xs[i] - xs[j]))))
}

/// `Z(x) = Pf[1/(x_i − x_j)]` for ordered boundary points.
pub fn partition_function(xs: &[f64]) -> Result<f64> {
    check_ordered(xs)?;
    let z: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(pf_complex(&z)?.re)
}

/// `∂_{x_i} log Z = Σ_j (A^{−1})_{ij} / (x_i − x_j)²` with `A_{ij} = 1/(x_i − x_j)`.
pub fn grad_log_partition(xs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddCount(n));
    }
    if n == 2 {
        let g = -1.0 / (xs[0] - xs[1]);
        return Ok(vec![g, -g]);
    }
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / (xs[i] - xs[j]) });
    let inv = a.try_inverse().ok_or_else(|| Error::Singular("Pfaffian matrix of the driving points".into()))?;
    Ok((0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| inv[(i, j)] / (xs[i] - xs[j]).powi(2)).sum()).collect())
}

/// Residuals of the three global Ward equations and of the null-field
/// equation at each point, each divided by the sum of the absolute values
/// of its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeReport {
    pub translation: f64,
    pub scaling: f64,
    pub special_conformal: f64,
    pub null_field: Vec<f64>,
}

impl PdeReport {
    pub fn max(&self) -> f64 {
        self.null_field.iter().copied().fold(self.translation.max(self.scaling).max(self.special_conformal), f64::max)
    }
}

fn relative(terms: &[f64]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

/// Finite-difference residuals of `Σ∂_i Z`, `Σ(x_i∂_i + ½)Z`,
/// `Σ(x_i²∂_i + x_i)Z` and of
/// `[(3/4)∂_i² + Σ_{l≠i}(∂_l/(x_l − x_i) − ½/(x_l − x_i)²)] Z`.
pub fn pde_residuals(xs: &[f64]) -> Result<PdeReport> {
    check_ordered(xs)?;
    let n = xs.len();
    let base: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let z0 = pf_complex(&base)?.re;
    let along = |i: usize, order: u8| -> Result<f64> {
        let f = |x: Complex64| {
            let mut p = base.clone();
            p[i] = x;
            pf_complex(&p).unwrap_or(Complex64::new(f64::NAN, 0.0))
        };
        Ok(central_diff_default(f, base[i], order)?.re)
    };
    let d1: Vec<f64> = (0..n).map(|i| along(i, 1)).collect::<Result<_>>()?;
    let mut t = Vec::new();
    let mut s = Vec::new();
    let mut c = Vec::new();
    for i in 0..n {
        t.push(d1[i]);
        s.push(xs[i] * d1[i]);
        s.push(0.5 * z0);
        c.push(xs[i] * xs[i] * d1[i]);
        c.push(xs[i] * z0);
    }
    let mut null_field = Vec::with_capacity(n);
    for i in 0..n {
        let mut terms = vec![0.75 * along(i, 2)?];
        for l in (0..n).filter(|&l| l != i) {
            let d = xs[l] - xs[i];
            terms.push(d1[l] / d);
            terms.push(-0.5 * z0 / (d * d));
        }
        null_field.push(relative(&terms));
    }
    Ok(PdeReport { translation: relative(&t), scaling: relative(&s), special_conformal: relative(&c), null_field })
}
