use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::fock::{FockVector, Monomial, TruncationConfig, Q};
use super::virasoro::apply_virasoro_string;
use crate::cft::{derivative_correlator, halfplane_wick, ConformalChart, CorrelatorRequest, HInsertion, MAX_DERIVATIVE_ORDER};
use crate::{Error, Result};

/// Partitions of `n` written as `[k_1 ≥ k_2 ≥ …]`, i.e. PBW-ordered strings
/// `L_{−k_1}⋯L_{−k_r}`.
pub fn pbw_strings(n: i64) -> Vec<Vec<i64>> {
    fn rec(rem: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            rec(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Coefficients `c_s` with `Σ_s c_s L_{−s} ψ_{−1/2}|0⟩` equal to the level
/// component of `state` at level `twice / 2`, by exact elimination. Any
/// solution is returned when the strings are dependent.
pub fn descendant_decomposition(state: &FockVector, twice: u32, cfg: &TruncationConfig) -> Result<Vec<(Vec<i64>, Q)>> {
    let part = state.level_part(twice);
    if part.is_zero() {
        return Ok(Vec::new());
    }
    if twice % 2 == 0 {
        return Err(Error::OutsideSpan(format!("even component at level {}: {part}", twice / 2)));
    }
    let strings = pbw_strings((twice as i64 - 1) / 2);
    let psi = FockVector::from_modes(&[1])?;
    let columns: Vec<FockVector> = strings.iter().map(|s| apply_virasoro_string(s, &psi, cfg)).collect::<Result<_>>()?;
    let mut rows: Vec<Monomial> = columns.iter().chain(std::iter::once(&part)).flat_map(|c| c.terms().map(|(m, _)| m.clone())).collect();
    rows.sort();
    rows.dedup();
    let ncol = columns.len();
    // augmented matrix [A | b]
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|m| {
            let mut r: Vec<Q> = columns.iter().map(|c| c.coefficient(m)).collect();
            r.push(part.coefficient(m));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncol {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = Q::one() / a[row][col];
        for x in a[row].iter_mut() {
            *x *= inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..=ncol {
                    let d = a[row][c] * f;
                    a[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[ncol].is_zero()) {
        return Err(Error::OutsideSpan(part.to_string()));
    }
    Ok(pivots.iter().enumerate().map(|(r, &c)| (strings[c].clone(), a[r][ncol])).filter(|(_, q)| !q.is_zero()).collect())
}

/// Result of [`chi_correlator`]; `odd_parity` flags a total odd fermion
/// number, for which the value is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValue {
    pub value: Complex64,
    pub odd_parity: bool,
}

fn q_f64(q: Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Correlator of the fields of `states` at `points` in the chart's domain.
///
/// Each state must be the vacuum (identity field) or lie in the Virasoro
/// descendant span of `ψ_{−1/2}|0⟩`; membership is checked level by level.
/// On the identity chart a monomial `ψ_{−k_1−1/2}⋯|0⟩` is the normal-ordered
/// product `:∂^{k_1}ψ/k_1! ⋯:` and the value is an exact derivative
/// Pfaffian. On other charts only single-fermion components (`L_{−1}`
/// strings, `∂^k ψ` with `k ≤ 3`) are supported.
pub fn chi_correlator(states: &[FockVector], points: &[Complex64], chart: &ConformalChart, cfg: &TruncationConfig) -> Result<ChiValue> {
    if states.len() != points.len() {
        return Err(Error::InvalidArgument(format!("{} states for {} points", states.len(), points.len())));
    }
    let mut parity = 0;
    for s in states {
        for t in s.levels_twice() {
            if t != 0 {
                descendant_decomposition(s, t, cfg)?;
            }
        }
        parity += s.parity().ok_or_else(|| Error::OutsideSpan(format!("mixed parity state {s}")))?;
    }
    if parity % 2 == 1 {
        return Ok(ChiValue { value: Complex64::new(0.0, 0.0), odd_parity: true });
    }
    let identity = matches!(chart, ConformalChart::Identity);
    if !identity {
        if let Some(s) = states.iter().find(|s| s.terms().any(|(m, _)| m.len() > 1 || m.first().is_some_and(|&a| (a as usize - 1) / 2 > MAX_DERIVATIVE_ORDER))) {
            return Err(Error::InvalidArgument(format!("{s} needs the identity chart")));
        }
    }
    let expanded: Vec<Vec<(&Monomial, &Q)>> = states.iter().map(|s| s.terms().collect()).collect();
    if expanded.iter().any(|e| e.is_empty()) {
        return Ok(ChiValue { value: Complex64::new(0.0, 0.0), odd_parity: false });
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut choice = vec![0usize; states.len()];
    'outer: loop {
        let mut coeff = 1.0;
        let mut ins = Vec::new();
        let mut zeroed = Vec::new();
        let mut pts = Vec::new();
        let mut orders = Vec::new();
        for (slot, &c) in choice.iter().enumerate() {
            let (m, q) = expanded[slot][c];
            coeff *= q_f64(*q);
            let start = ins.len();
            for &a in m {
                let k = (a as usize - 1) / 2;
                coeff /= factorial(k);
                ins.push(HInsertion::d(points[slot], k));
                pts.push(points[slot]);
                orders.push(k);
            }
            for x in start..ins.len() {
                for y in x + 1..ins.len() {
                    zeroed.push((x, y));
                }
            }
        }
        let value = if identity {
            halfplane_wick(&ins, &zeroed)?
        } else if pts.is_empty() {
            Complex64::new(1.0, 0.0)
        } else {
            derivative_correlator(&CorrelatorRequest { chart: chart.clone(), points: pts, derivative_orders: orders })?
        };
        total += coeff * value;
        for slot in 0..choice.len() {
            choice[slot] += 1;
            if choice[slot] < expanded[slot].len() {
                continue 'outer;
            }
            choice[slot] = 0;
        }
        break;
    }
    Ok(ChiValue { value: total, odd_parity: false })
}

/// `|χ(ψ(z+ε)ψ(z)Πψ(w)) − χ(Πψ(w))/ε|` for each `ε`: the contraction
/// `ψ_{(0)}ψ = |0⟩` removes the pole, leaving a bounded remainder.
pub fn chi_ope_remainders(chart: &ConformalChart, z: Complex64, spectators: &[Complex64], eps: &[f64], cfg: &TruncationConfig) -> Result<Vec<f64>> {
    let psi = FockVector::from_modes(&[1])?;
    let rest_states = vec![psi.clone(); spectators.len()];
    let contracted = chi_correlator(&rest_states, spectators, chart, cfg)?.value;
    eps.iter()
        .map(|&e| {
            let mut pts = vec![z + e, z];
            pts.extend_from_slice(spectators);
            let states = vec![psi.clone(); pts.len()];
            let full = chi_correlator(&states, &pts, chart, cfg)?.value;
            Ok((full - contracted / e).norm())
        })
        .collect()
}

