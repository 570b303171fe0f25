use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::correlator::halfplane_derivative_correlator;
use crate::{Error, Result};

type Q = Ratio<i64>;

/// Linear differential operator in the `w_i` with coefficients
/// `c · Π_i (w_i − z)^{e_i}`, acting on a correlator `G(z; w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    n: usize,
    /// `(exponents e, derivative multi-index α) → c`
    terms: BTreeMap<(Vec<i32>, Vec<usize>), Q>,
}

impl DiffOp {
    pub fn identity(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![0; n], vec![0; n]), Q::from_integer(1));
        Self { n, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(map: &mut BTreeMap<(Vec<i32>, Vec<usize>), Q>, key: (Vec<i32>, Vec<usize>), c: Q) {
        let e = map.entry(key).or_insert_with(Q::zero);
        *e += c;
    }

    /// `𝓛_{−k} ∘ self` with
    /// `𝓛_{−k} = Σ_i { ½(k−1)/(w_i−z)^k − (w_i−z)^{1−k} ∂_{w_i} }`.
    pub fn then_l(&self, k: usize) -> Self {
        let k = k as i32;
        let mut out = BTreeMap::new();
        for ((e, a), &c) in &self.terms {
            for i in 0..self.n {
                if k != 1 {
                    let mut e2 = e.clone();
                    e2[i] -= k;
                    Self::add(&mut out, (e2, a.clone()), c * Q::new(i64::from(k - 1), 2));
                }
                // ∂_{w_i} hits the coefficient
                if e[i] != 0 {
                    let mut e2 = e.clone();
                    e2[i] += -k;
                    Self::add(&mut out, (e2, a.clone()), -c * Q::from_integer(i64::from(e[i])));
                }
                // and the correlator
                let mut e2 = e.clone();
                e2[i] += 1 - k;
                let mut a2 = a.clone();
                a2[i] += 1;
                Self::add(&mut out, (e2, a2), -c);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { n: self.n, terms: out }
    }

    /// Evaluates the operator on `⟨ψ(z)Πψ(w_i)⟩_ℍ`.
    pub fn eval(&self, z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
        if ws.len() != self.n {
            return Err(Error::InvalidArgument(format!("operator built for {} points, got {}", self.n, ws.len())));
        }
        let mut pts = vec![z];
        pts.extend_from_slice(ws);
        let mut total = Complex64::new(0.0, 0.0);
        for ((e, a), c) in &self.terms {
            let mut orders = vec![0];
            orders.extend_from_slice(a);
            let g = halfplane_derivative_correlator(&pts, &orders)?;
            let coef: Complex64 = e.iter().zip(ws).map(|(&ei, &w)| (w - z).powi(ei)).product();
            total += c.to_f64().unwrap_or(f64::NAN) * coef * g;
        }
        Ok(total)
    }
}

/// `𝓛_{−k_1} ⋯ 𝓛_{−k_r}` for `ks = [k_1, …, k_r]` (written order; `k_r` acts
/// first), for `n` points `w_i`.
pub fn descendant_operator(ks: &[usize], n: usize) -> Result<DiffOp> {
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::InvalidArgument("descendant indices must be positive".into()));
    }
    Ok(ks.iter().rev().fold(DiffOp::identity(n), |op, &k| op.then_l(k)))
}

/// `⟨(L_{−k_1}⋯L_{−k_r}ψ)(z) Πψ(w_i)⟩_ℍ` by the differential operators `𝓛_{−k}`.
pub fn descendant_correlator(ks: &[usize], z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
    for (i, &w) in ws.iter().enumerate() {
        if w == z {
            return Err(Error::Coincident(0, i + 1));
        }
    }
    descendant_operator(ks, ws.len())?.eval(z, ws)
}

/// The individual terms of
/// `[(3/4)∂_z² − Σ_i (½/(z−w_i)² + 1/(z−w_i) ∂_{w_i})] ⟨ψ(z)Πψ(w_i)⟩_ℍ`,
/// the `∂_z²` term first.
pub fn null_field_terms(z: Complex64, ws: &[Complex64]) -> Result<Vec<Complex64>> {
    if ws.len() % 2 == 0 {
        return Err(Error::OddCount(ws.len() + 1));
    }
    let mut pts = vec![z];
    pts.extend_from_slice(ws);
    let n = pts.len();
    let corr = |orders: &[usize]| halfplane_derivative_correlator(&pts, orders);
    let base = corr(&vec![0; n])?;
    let mut orders = vec![0; n];
    orders[0] = 2;
    let mut terms = vec![0.75 * corr(&orders)?];
    for i in 0..ws.len() {
        let r = z - ws[i];
        let mut o = vec![0; n];
        o[i + 1] = 1;
        terms.push(-0.5 / (r * r) * base);
        terms.push(-corr(&o)? / r);
    }
    Ok(terms)
}

pub fn null_field_residual(z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
    Ok(null_field_terms(z, ws)?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_is_primary() {
        let ws = [c(0.5, 2.0)];
        let z = c(0.0, 1.0);
        let v = descendant_correlator(&[], z, &ws).unwrap();
        assert!((v - 1.0 / (z - ws[0])).norm() < 1e-15);
    }

    #[test]
    fn level_one_is_translation() {
        let op = descendant_operator(&[1], 3).unwrap();
        // L_{-1} = -Σ ∂_{w_i}: three terms with unit coefficient
        assert_eq!(op.len(), 3);
    }

    #[test]
    fn rejects_zero_index() {
        assert!(descendant_operator(&[2, 0], 1).is_err());
    }
}
