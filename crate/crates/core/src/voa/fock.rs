use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational coefficient.
pub type Q = Ratio<i64>;

/// A fermion mode `ψ_n`, `n ∈ ℤ + ½`, stored as `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    twice_value: i32,
}

impl ModeIndex {
    pub fn new(twice_value: i32) -> Result<Self> {
        if twice_value % 2 == 0 {
            return Err(Error::InvalidArgument(format!("mode 2n = {twice_value} is not odd")));
        }
        Ok(Self { twice_value })
    }

    pub fn twice_value(self) -> i32 {
        self.twice_value
    }
}

/// `ψ_{−a_1/2} ψ_{−a_2/2} ⋯ |0⟩` as the list `[a_1, a_2, …]` of odd
/// positive integers, strictly decreasing.
pub type Monomial = Vec<u32>;

pub fn monomial_level_twice(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Level cap and the constant in `L_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationConfig {
    twice_level: u32,
    pub a0: Q,
}

impl TruncationConfig {
    /// Cap `L = twice_level / 2`, at least 5/2.
    pub fn new(twice_level: u32, a0: Q) -> Result<Self> {
        if twice_level < 5 {
            return Err(Error::InvalidArgument(format!("truncation level {twice_level}/2 is below 5/2")));
        }
        Ok(Self { twice_level, a0 })
    }

    pub fn with_level(twice_level: u32) -> Result<Self> {
        Self::new(twice_level, Q::zero())
    }

    pub fn twice_level(&self) -> u32 {
        self.twice_level
    }

    pub(crate) fn check(&self, twice: u32) -> Result<()> {
        if twice > self.twice_level {
            return Err(Error::Truncation { level: half(twice as i64), cap: half(self.twice_level as i64) });
        }
        Ok(())
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { twice_level: 12, a0: Q::zero() }
    }
}

pub(crate) fn half(twice: i64) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

/// Finite combination of monomials with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, Q>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(Vec::new())
    }

    /// A basis monomial; the list is sorted into decreasing order with the
    /// matching sign, and a repeated mode gives zero.
    pub fn from_modes(twice_abs: &[u32]) -> Result<Self> {
        if let Some(a) = twice_abs.iter().find(|a| *a % 2 == 0) {
            return Err(Error::InvalidArgument(format!("mode -{a}/2 is not half-odd")));
        }
        let mut v = Self::vacuum();
        let cfg = TruncationConfig::new(u32::MAX, Q::zero())?;
        for &a in twice_abs.iter().rev() {
            v = apply_psi_mode(ModeIndex::new(-(a as i32))?, &v, &cfg)?;
        }
        Ok(v)
    }

    pub(crate) fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Q::one());
        Self { terms }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, Q::one());
        out
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: Q) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), *v * c);
        }
    }

    pub fn scaled(&self, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_assign_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> Q {
        self.terms.get(m).copied().unwrap_or_else(Q::zero)
    }

    /// Twice the largest level present (0 for the zero vector).
    pub fn level_twice(&self) -> u32 {
        self.terms.keys().map(|m| monomial_level_twice(m)).max().unwrap_or(0)
    }

    /// Component of a given level.
    pub fn level_part(&self, twice: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if monomial_level_twice(m) == twice {
                out.add_term(m.clone(), *c);
            }
        }
        out
    }

    pub fn levels_twice(&self) -> Vec<u32> {
        let mut l: Vec<u32> = self.terms.keys().map(|m| monomial_level_twice(m)).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// `Some(0 | 1)` if every term has the same fermion parity.
    pub fn parity(&self) -> Option<usize> {
        let mut p = self.terms.keys().map(|m| m.len() % 2);
        let first = p.next()?;
        p.all(|x| x == first).then_some(first)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest level first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| monomial_level_twice(b.0).cmp(&monomial_level_twice(a.0)).then(b.0.cmp(a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}·")?;
            }
            for x in m {
                write!(f, "ψ_{{-{}}}", half(*x as i64))?;
            }
            write!(f, "|0>")?;
        }
        Ok(())
    }
}

/// All monomials of level at most `twice_level / 2`, vacuum first, then by
/// level.
pub fn basis_states(twice_level: u32) -> Vec<Monomial> {
    fn rec(max_part: u32, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        out.push(prefix.clone());
        let mut a = 1;
        while a < max_part && a <= budget {
            prefix.push(a);
            rec(a, budget - a, prefix, out);
            prefix.pop();
            a += 2;
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(u32::MAX, twice_level, &mut prefix, &mut out);
    out.sort_by(|a, b| monomial_level_twice(a).cmp(&monomial_level_twice(b)).then(a.cmp(b)));
    out
}

/// `ψ_n v`. Creation inserts the mode at its sorted position with the sign
/// of the moves; annihilation contracts the matching mode.
pub fn apply_psi_mode(n: ModeIndex, v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    let t = n.twice_value();
    let a = t.unsigned_abs();
    let mut out = FockVector::zero();
    for (m, c) in &v.terms {
        if t < 0 {
            if m.contains(&a) {
                continue;
            }
            let pos = m.iter().take_while(|&&b| b > a).count();
            cfg.check(monomial_level_twice(m) + a)?;
            let mut nm = m.clone();
            nm.insert(pos, a);
            out.add_term(nm, if pos % 2 == 0 { *c } else { -*c });
        } else if let Some(pos) = m.iter().position(|&b| b == a) {
            let mut nm = m.clone();
            nm.remove(pos);
            out.add_term(nm, if pos % 2 == 0 { *c } else { -*c });
        }
    }
    Ok(out)
}

pub(crate) fn psi(twice: i64, v: &FockVector, cfg: &TruncationConfig) -> Result<FockVector> {
    let t = i32::try_from(twice).map_err(|_| Error::InvalidArgument(format!("mode {twice}/2 out of range")))?;
    apply_psi_mode(ModeIndex::new(t)?, v, cfg)
}
