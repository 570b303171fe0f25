use num_traits::{One, Zero};

use super::fock::{monomial_level_twice, psi, FockVector, TruncationConfig, Q};
use crate::Result;

/// Generalized binomial `C(i, k)` for integer `i`.
fn binom(i: i64, k: i64) -> Q {
    let mut num = Q::one();
    for t in 0..k {
        num *= Q::from_integer(i - t);
        num /= Q::from_integer(t + 1);
    }
    num
}

/// `u_{(j)} v`: the `j`-th mode of `Y(u, z) = Σ_j u_{(j)} z^{−j−1}`.
///
/// For `u = ψ_{−k−1/2} u′` the field is `:(∂^k ψ/k!) Y(u′, z):`, whose modes
/// are `Σ_{i<0} A_{(i)} u′_{(j−i−1)} + (−1)^{|u′|} Σ_{i≥0} u′_{(j−i−1)} A_{(i)}`
/// with `A_{(i)} = (−1)^k C(i, k) ψ_{i−k+1/2}`. The vacuum gives the identity.
pub fn vertex_mode(u: &FockVector, j: i64, v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (m, c) in u.terms() {
        out.add_assign_scaled(&vertex_monomial(m, j, v, cfg)?, *c);
    }
    Ok(out)
}

fn vertex_monomial(u: &[u32], j: i64, v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    if v.is_zero() {
        return Ok(FockVector::zero());
    }
    let Some((&a, rest)) = u.split_first() else {
        return Ok(if j == -1 { v.clone() } else { FockVector::zero() });
    };
    let k = (a as i64 - 1) / 2;
    let tw_b = monomial_level_twice(rest) as i64;
    let tw_v = v.level_twice() as i64;
    let sign_k = if k % 2 == 0 { Q::one() } else { -Q::one() };
    // A_{(i)} w = (−1)^k C(i, k) ψ_{i−k+1/2} w
    let a_mode = |i: i64, w: &FockVector| -> Result<FockVector> {
        let c = sign_k * binom(i, k);
        if c.is_zero() {
            return Ok(FockVector::zero());
        }
        Ok(psi(2 * (i - k) + 1, w, cfg)?.scaled(c))
    };
    let mut out = FockVector::zero();
    // b_{(n)} lowers the level by n + 1 − wt(b); it vanishes once that exceeds level(v)
    let n_max = (tw_b + tw_v - 2).div_euclid(2);
    let mut i = -1;
    while j - i - 1 <= n_max {
        let bv = vertex_monomial(rest, j - i - 1, v, cfg)?;
        out.add_assign_scaled(&a_mode(i, &bv)?, Q::one());
        i -= 1;
    }
    let parity = if rest.len() % 2 == 0 { Q::one() } else { -Q::one() };
    // ψ_{i−k+1/2} annihilates v once i − k + 1/2 exceeds level(v)
    let i_max = k + (tw_v - 1).div_euclid(2);
    for i in k.max(0)..=i_max {
        let av = a_mode(i, v)?;
        out.add_assign_scaled(&vertex_monomial(rest, j - i - 1, &av, cfg)?, parity);
    }
    Ok(out)
}
