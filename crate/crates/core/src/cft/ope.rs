use num_complex::Complex64;

use super::chart::{ConformalChart, Jet};
use super::correlator::{halfplane_derivative_correlator, halfplane_kernel, npoint};
use crate::numerics::central_diff_default;
use super::ward::{virasoro_halfplane, TInsertion};
use crate::Result;

/// Probe separations, largest first.
pub const OPE_SEPARATIONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Remainders may grow by at most this factor across the probe range.
const GROWTH_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpePair {
    PsiPsi,
    TPsi,
    TT,
}

impl OpePair {
    pub fn label(&self) -> &'static str {
        match self {
            Self::PsiPsi => "psi_psi",
            Self::TPsi => "T_psi",
            Self::TT => "T_T",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "psi_psi" => Some(Self::PsiPsi),
            "T_psi" => Some(Self::TPsi),
            "T_T" => Some(Self::TT),
            _ => None,
        }
    }

    /// Coefficient of the leading singularity: 1, 1/2 and 1/4.
    pub fn expected_leading(&self) -> f64 {
        match self {
            Self::PsiPsi => 1.0,
            Self::TPsi => 0.5,
            Self::TT => 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpeReport {
    pub pair: OpePair,
    pub chart_kind: &'static str,
    pub separations: Vec<f64>,
    /// `|product − singular template|` at each separation.
    pub remainders: Vec<f64>,
    /// Fitted coefficient of the leading pole, normalized by the spectator
    /// correlator.
    pub leading_coefficient: Complex64,
    /// `|R(ε_min)| / |R(ε_max)|`.
    pub growth: f64,
    /// For `T_psi`: the ε → 0 remainder divided by `¾⟨∂²ψ(w)ψ(a)⟩_D`.
    pub regular_ratio: Option<Complex64>,
}

impl OpeReport {
    pub fn bounded(&self) -> bool {
        self.growth.is_finite() && self.growth <= GROWTH_BOUND
    }

    pub fn leading_error(&self) -> f64 {
        (self.leading_coefficient - self.pair.expected_leading()).norm()
    }
}

/// Default probe geometry: base point and two spectators, chosen inside ℍ
/// and inside the strip `0 < Im z < π`.
pub const OPE_BASE: Complex64 = Complex64 { re: 0.3, im: 1.2 };
pub const OPE_SPECTATORS: [Complex64; 2] = [Complex64 { re: 1.0, im: 0.6 }, Complex64 { re: -0.8, im: 2.0 }];

pub fn ope_singularity_check(chart: &ConformalChart, pair: OpePair) -> Result<OpeReport> {
    ope_singularity_check_at(chart, pair, OPE_BASE, &OPE_SPECTATORS)
}

struct Domain<'a> {
    chart: &'a ConformalChart,
}

impl Domain<'_> {
    fn jet(&self, z: Complex64) -> Result<Jet> {
        self.chart.checked_jet(z)
    }

    fn jac(&self, pts: &[Complex64]) -> Result<Complex64> {
        pts.iter().map(|&p| Ok(self.jet(p)?.d1.sqrt())).product()
    }

    fn images(&self, pts: &[Complex64]) -> Result<Vec<Complex64>> {
        pts.iter().map(|&p| Ok(self.jet(p)?.g)).collect()
    }

    /// `⟨T(t_1)⋯Πψ(w)⟩_D` with each `T` subtracted against the flat kernel:
    /// `T(t) = g′(t)² T_ℍ(g t) + S_g(t)/24`, expanded over which insertions
    /// take the Schwarzian term.
    fn t_corr(&self, ts: &[Complex64], ws: &[Complex64]) -> Result<Complex64> {
        let jac = self.jac(ws)?;
        let us = self.images(ws)?;
        let jets: Vec<Jet> = ts.iter().map(|&t| self.jet(t)).collect::<Result<_>>()?;
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0u32..(1 << ts.len()) {
            let mut pre = jac;
            let mut ins = Vec::new();
            for (k, j) in jets.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    pre *= j.d1 * j.d1;
                    ins.push(TInsertion { z: j.g, deriv: 0 });
                } else {
                    pre *= j.schwarzian() / 24.0;
                }
            }
            if pre.norm() != 0.0 {
                total += pre * virasoro_halfplane(&ins, &us)?;
            }
        }
        Ok(total)
    }

    /// `∂_t ⟨T(t)Πψ(w)⟩_D` for the flat-subtracted `T`.
    fn dt_corr(&self, t: Complex64, ws: &[Complex64]) -> Result<Complex64> {
        let j = self.jet(t)?;
        let us = self.images(ws)?;
        let jac = self.jac(ws)?;
        let v0 = virasoro_halfplane(&[TInsertion { z: j.g, deriv: 0 }], &us)?;
        let v1 = virasoro_halfplane(&[TInsertion { z: j.g, deriv: 1 }], &us)?;
        let ds = central_diff_default(|x| self.chart.jet(x).schwarzian(), t, 1)?;
        let base = jac * halfplane_derivative_correlator(&us, &vec![0; us.len()])?;
        Ok(jac * (2.0 * j.d1 * j.d2 * v0 + j.d1 * j.d1 * j.d1 * v1) + ds / 24.0 * base)
    }

    /// `∂_w^k ⟨ψ(w)ψ(a)⟩_D` for `k ≤ 2`.
    fn psi_pair_deriv(&self, w: Complex64, a: Complex64, k: usize) -> Result<Complex64> {
        let (jw, ja) = (self.jet(w)?, self.jet(a)?);
        let (r, ra) = (jw.d1.sqrt(), ja.d1.sqrt());
        let f = |o: usize| halfplane_kernel(jw.g, o, ja.g, 0);
        // derivatives of r = √g′: r′ = g″/(2r), r″ = g‴/(2r) − g″²/(4r³)
        let r1 = jw.d2 / (2.0 * r);
        let r2 = jw.d3 / (2.0 * r) - jw.d2 * jw.d2 / (4.0 * r * r * r);
        Ok(ra * match k {
            0 => r * f(0),
            1 => r1 * f(0) + r * jw.d1 * f(1),
            _ => r2 * f(0) + 2.0 * r1 * jw.d1 * f(1) + r * (jw.d2 * f(1) + jw.d1 * jw.d1 * f(2)),
        })
    }
}

pub fn ope_singularity_check_at(
    chart: &ConformalChart,
    pair: OpePair,
    w: Complex64,
    spectators: &[Complex64; 2],
) -> Result<OpeReport> {
    let dom = Domain { chart };
    let [a, b] = *spectators;
    let eps = OPE_SEPARATIONS.to_vec();
    // spectator normalization, template(ε), product(ε), leading power
    let (spect, power): (Complex64, i32) = match pair {
        OpePair::PsiPsi => (npoint(chart, &[a, b])?, 1),
        OpePair::TPsi => (dom.psi_pair_deriv(w, a, 0)?, 2),
        OpePair::TT => (npoint(chart, &[a, b])?, 4),
    };
    let product = |e: f64| -> Result<Complex64> {
        let z = w + e;
        match pair {
            OpePair::PsiPsi => npoint(chart, &[z, w, a, b]),
            OpePair::TPsi => dom.t_corr(&[z], &[w, a]),
            OpePair::TT => dom.t_corr(&[z, w], &[a, b]),
        }
    };
    let (c1, c2) = match pair {
        OpePair::PsiPsi => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        OpePair::TPsi => (Complex64::new(0.0, 0.0), dom.psi_pair_deriv(w, a, 1)?),
        OpePair::TT => (2.0 * dom.t_corr(&[w], &[a, b])?, dom.dt_corr(w, &[a, b])?),
    };
    let lead = pair.expected_leading();
    let template = |e: f64| -> Complex64 {
        let e = Complex64::new(e, 0.0);
        match pair {
            OpePair::PsiPsi => spect / e,
            OpePair::TPsi => lead * spect / (e * e) + c2 / e,
            OpePair::TT => lead * spect / e.powi(4) + c1 / (e * e) + c2 / e,
        }
    };
    let mut remainders = Vec::new();
    for &e in &eps {
        remainders.push((product(e)? - template(e)).norm());
    }
    let growth = remainders.last().unwrap() / remainders[0].max(1e-300);

    let e_min = *eps.last().unwrap();
    let fit = |e: f64| -> Result<Complex64> { Ok(product(e)? * e.powi(power) / spect) };
    let leading_coefficient = match pair {
        // O(ε) correction removed by one Richardson step
        OpePair::PsiPsi | OpePair::TPsi => 2.0 * fit(0.5 * e_min)? - fit(e_min)?,
        OpePair::TT => fit(e_min)?,
    };
    let regular_ratio = match pair {
        OpePair::TPsi => {
            let r = |e: f64| -> Result<Complex64> { Ok(product(e)? - template(e)) };
            let r0 = 2.0 * r(0.5 * e_min)? - r(e_min)?;
            Some(r0 / (0.75 * dom.psi_pair_deriv(w, a, 2)?))
        }
        _ => None,
    };
    Ok(OpeReport {
        pair,
        chart_kind: chart.kind(),
        separations: eps,
        remainders,
        leading_coefficient,
        growth,
        regular_ratio,
    })
}
