use num_traits::{One, Zero};

use super::fock::{apply_psi_mode, basis_states, monomial_level_twice, psi, FockVector, ModeIndex, Monomial, TruncationConfig, Q};
use crate::Result;

/// `L_m v = −½ Σ_k (k + m/2) :ψ_{m+k}ψ_{−k}: v + a0 δ_{m,0} v`.
pub fn apply_virasoro_mode(m: i64, v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    let mx = v.terms().flat_map(|(mono, _)| mono.first().copied()).max().unwrap_or(0) as i64;
    let r = mx + 2 * m.abs() + 1;
    let mut out = FockVector::zero();
    let mut b = -r;
    if b % 2 == 0 {
        b -= 1;
    }
    while b <= r {
        // pair ψ_{A/2} ψ_{B/2} with A + B = 2m, weight (B − m·2)/4 in halves
        let a = 2 * m - b;
        let coeff = Q::new(b - m, 4);
        let term = if a > 0 && b < 0 {
            psi(b, &psi(a, v, cfg)?, cfg)?.scaled(-coeff)
        } else {
            psi(a, &psi(b, v, cfg)?, cfg)?.scaled(coeff)
        };
        out.add_assign_scaled(&term, Q::one());
        b += 2;
    }
    if m == 0 {
        out.add_assign_scaled(v, cfg.a0);
    }
    Ok(out)
}

/// `L_{−k_1} ⋯ L_{−k_r} v` with `k_r` applied first.
pub fn apply_virasoro_string(ks: &[i64], v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    let mut out = v.clone();
    for &k in ks.iter().rev() {
        out = apply_virasoro_mode(-k, &out, cfg)?;
    }
    Ok(out)
}

/// Which relation a [`CommutatorEntry`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorKind {
    /// `[L_m, ψ_n] + (m/2 + n) ψ_{m+n}`; `n` is stored doubled.
    VirasoroFermion,
    /// `[L_m, L_n] − (m − n) L_{m+n} − (1/24) m(m² − 1) δ_{m+n,0}`.
    VirasoroVirasoro,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorEntry {
    pub kind: CommutatorKind,
    pub m: i64,
    /// `n` for the Virasoro pair, `2n` for the fermion pair.
    pub n: i64,
    pub max_deviation: Q,
    pub states_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorReport {
    pub cfg: TruncationConfig,
    pub entries: Vec<CommutatorEntry>,
}

impl CommutatorReport {
    pub fn max_deviation(&self) -> Q {
        self.entries.iter().map(|e| e.max_deviation).max().unwrap_or_else(Q::zero)
    }

    pub fn states_checked(&self) -> usize {
        self.entries.iter().map(|e| e.states_checked).sum()
    }

    /// One line per pair: `kind m n numerator denominator`.
    pub fn to_table(&self) -> String {
        let mut s = String::from("relation  m  n  max_deviation_numerator  denominator\n");
        for e in &self.entries {
            let (label, n) = match e.kind {
                CommutatorKind::VirasoroFermion => ("L_psi", super::fock::half(e.n)),
                CommutatorKind::VirasoroVirasoro => ("L_L", e.n.to_string()),
            };
            s.push_str(&format!(
                "{label}  {}  {n}  {}  {}\n",
                e.m,
                e.max_deviation.numer(),
                e.max_deviation.denom()
            ));
        }
        s
    }
}

fn shifted(level: i64, by: i64) -> i64 {
    // L_m and ψ_{m/2} lower the level by m (twice units: 2m)
    level - by
}

/// Both commutator families on every basis state whose images under both
/// orderings stay inside the truncation, for `|m|, |n| ≤ L − ½`.
pub fn commutator_tables(cfg: &TruncationConfig) -> Result<CommutatorReport> {
    let cap = cfg.twice_level() as i64;
    let basis: Vec<Monomial> = basis_states(cfg.twice_level());
    let max_int = (cap - 1) / 2;
    let safe = |lvl: i64, steps: &[i64]| -> bool {
        // every partial application along either ordering must stay in [0, cap]
        let mut ok = true;
        for order in [steps.to_vec(), steps.iter().rev().copied().collect::<Vec<_>>()] {
            let mut l = lvl;
            for s in order {
                l = shifted(l, s);
                ok &= l <= cap;
            }
        }
        ok
    };
    let mut entries = Vec::new();
    for m in -max_int..=max_int {
        for n2 in (-(cap - 1)..=cap - 1).step_by(2) {
            let mut dev = Q::zero();
            let mut count = 0;
            for mono in &basis {
                let lvl = monomial_level_twice(mono) as i64;
                if !safe(lvl, &[2 * m, n2]) {
                    continue;
                }
                let v = FockVector::from_modes(mono)?;
                let pn = ModeIndex::new(n2 as i32)?;
                let lhs = apply_virasoro_mode(m, &apply_psi_mode(pn, &v, cfg)?, cfg)?;
                let rhs = apply_psi_mode(pn, &apply_virasoro_mode(m, &v, cfg)?, cfg)?;
                let mut d = lhs;
                d.add_assign_scaled(&rhs, -Q::one());
                if let Ok(pmn) = ModeIndex::new((2 * m + n2) as i32) {
                    d.add_assign_scaled(&apply_psi_mode(pmn, &v, cfg)?, Q::new(2 * m + 2 * n2, 4));
                }
                dev = dev.max(d.max_abs());
                count += 1;
            }
            entries.push(CommutatorEntry { kind: CommutatorKind::VirasoroFermion, m, n: n2, max_deviation: dev, states_checked: count });
        }
        for n in -max_int..=max_int {
            let mut dev = Q::zero();
            let mut count = 0;
            for mono in &basis {
                let lvl = monomial_level_twice(mono) as i64;
                if !safe(lvl, &[2 * m, 2 * n]) {
                    continue;
                }
                let v = FockVector::from_modes(mono)?;
                let mut d = apply_virasoro_mode(m, &apply_virasoro_mode(n, &v, cfg)?, cfg)?;
                d.add_assign_scaled(&apply_virasoro_mode(n, &apply_virasoro_mode(m, &v, cfg)?, cfg)?, -Q::one());
                d.add_assign_scaled(&apply_virasoro_mode(m + n, &v, cfg)?, Q::from_integer(n - m));
                if m + n == 0 {
                    d.add_assign_scaled(&v, -Q::new(m * (m * m - 1), 24));
                }
                dev = dev.max(d.max_abs());
                count += 1;
            }
            entries.push(CommutatorEntry { kind: CommutatorKind::VirasoroVirasoro, m, n, max_deviation: dev, states_checked: count });
        }
    }
    Ok(CommutatorReport { cfg: *cfg, entries })
}

/// `(L_{−2} + sign·(3/4) L_{−1}²) ψ_{−1/2}|0⟩`.
pub fn singular_vector(sign: i8, cfg: &TruncationConfig) -> Result<FockVector> {
    if sign != 1 && sign != -1 {
        return Err(crate::Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
    }
    let psi = FockVector::from_modes(&[1])?;
    let mut out = apply_virasoro_string(&[2], &psi, cfg)?;
    out.add_assign_scaled(&apply_virasoro_string(&[1, 1], &psi, cfg)?, Q::new(3 * sign as i64, 4));
    Ok(out)
}
