use num_complex::Complex64;

use super::chart::{ConformalChart, Jet};
use super::correlator::{halfplane_derivative_correlator, halfplane_kernel, halfplane_wick, HInsertion};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative separation `η / d` used in the subtracted limit, `d` being the
/// distance from `z` to the nearest other insertion.
pub const T_SUBTRACTION_ETA: f64 = 1e-4;

/// Insertion of `T` (`deriv = 0`) or `∂T` (`deriv = 1`) on ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TInsertion {
    pub z: Complex64,
    pub deriv: usize,
}

/// `⟨T(t_1)⋯ ψ(w_1)⋯⟩_ℍ` with `T = −½:ψ∂ψ:` and `∂T = −½:ψ∂²ψ:`
/// (the term `:∂ψ∂ψ:` vanishes). Self-contractions are dropped.
pub fn virasoro_halfplane(ts: &[TInsertion], ws: &[Complex64]) -> Result<Complex64> {
    let mut ins = Vec::with_capacity(2 * ts.len() + ws.len());
    let mut zeroed = Vec::new();
    for t in ts {
        if t.deriv > 1 {
            return Err(Error::InvalidArgument("only T and dT insertions are supported".into()));
        }
        zeroed.push((ins.len(), ins.len() + 1));
        ins.push(HInsertion::psi(t.z));
        ins.push(HInsertion::d(t.z, 1 + t.deriv));
    }
    ins.extend(ws.iter().map(|&w| HInsertion::psi(w)));
    let pf = halfplane_wick(&ins, &zeroed)?;
    Ok(pf * (-0.5f64).powi(ts.len() as i32))
}

fn nearest(z: Complex64, ws: &[Complex64]) -> Result<f64> {
    let mut d = f64::INFINITY;
    for (i, &w) in ws.iter().enumerate() {
        let r = (z - w).norm();
        if r == 0.0 {
            return Err(Error::Coincident(0, i + 1));
        }
        d = d.min(r);
    }
    Ok(if d.is_finite() { d } else { 1.0 })
}

/// `⟨T(z)Πψ(w_i)⟩_ℍ` from the subtracted limit
/// `−½[⟨ψ(z)∂ψ(z+η)Π⟩ − ∂_w(1/(z−w))|_{w=z+η} ⟨Π⟩]`, one Richardson level in η.
pub fn t_halfplane_subtracted(z: Complex64, ws: &[Complex64], eta_rel: f64) -> Result<Complex64> {
    if ws.len() % 2 == 1 {
        return Err(Error::OddCount(ws.len() + 2));
    }
    let d = nearest(z, ws)?;
    let mut pts = vec![z, z];
    pts.extend_from_slice(ws);
    let mut orders = vec![0, 1];
    orders.extend(std::iter::repeat(0).take(ws.len()));
    let base = if ws.is_empty() { Complex64::new(1.0, 0.0) } else { halfplane_derivative_correlator(ws, &vec![0; ws.len()])? };
    let at = |eta: f64| -> Result<Complex64> {
        let mut p = pts.clone();
        p[1] = z + eta;
        let full = halfplane_derivative_correlator(&p, &orders)?;
        let sing = halfplane_kernel(z, 0, z + eta, 1);
        Ok(-0.5 * (full - sing * base))
    };
    let eta = eta_rel * d;
    Ok(2.0 * at(0.5 * eta)? - at(eta)?)
}

/// Both sides of the ℍ Ward identity
/// `⟨TΠψ⟩ = Σ_i [½/(z−w_i)² + 1/(z−w_i) ∂_{w_i}] ⟨Πψ⟩`.
pub fn ward_halfplane(z: Complex64, ws: &[Complex64]) -> Result<(Complex64, Complex64)> {
    let lhs = t_halfplane_subtracted(z, ws, T_SUBTRACTION_ETA)?;
    let rhs = ward_halfplane_rhs(z, ws)?;
    Ok((lhs, rhs))
}

fn ward_halfplane_rhs(z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
    if ws.is_empty() {
        return Ok(ZERO);
    }
    let base = halfplane_derivative_correlator(ws, &vec![0; ws.len()])?;
    let mut rhs = ZERO;
    for i in 0..ws.len() {
        let mut orders = vec![0; ws.len()];
        orders[i] = 1;
        let d = halfplane_derivative_correlator(ws, &orders)?;
        let r = z - ws[i];
        rhs += 0.5 / (r * r) * base + d / r;
    }
    Ok(rhs)
}

struct Transported {
    jz: Jet,
    jws: Vec<Jet>,
    jac: Complex64,
    us: Vec<Complex64>,
}

fn transport(chart: &ConformalChart, z: Complex64, ws: &[Complex64]) -> Result<Transported> {
    let jz = chart.checked_jet(z)?;
    let jws: Vec<Jet> = ws.iter().map(|&w| chart.checked_jet(w)).collect::<Result<_>>()?;
    let jac = jws.iter().map(|j| j.d1.sqrt()).product();
    let us = jws.iter().map(|j| j.g).collect();
    Ok(Transported { jz, jws, jac, us })
}

/// `⟨T(z)Πψ(w_i)⟩_D` where `T` is subtracted against the flat kernel
/// `1/(z−w)`: `g′(z)² ⟨T(g z)Πψ(g w)⟩_ℍ Π g′(w_i)^{1/2} + (1/24) S_g(z) ⟨Πψ⟩_D`.
/// The ℍ factor uses the subtracted limit.
pub fn t_domain(chart: &ConformalChart, z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
    let t = transport(chart, z, ws)?;
    let th = t_halfplane_subtracted(t.jz.g, &t.us, T_SUBTRACTION_ETA)?;
    let cd = domain_base(&t)?;
    Ok(t.jz.d1 * t.jz.d1 * th * t.jac + t.jz.schwarzian() / 24.0 * cd)
}

fn domain_base(t: &Transported) -> Result<Complex64> {
    if t.us.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(t.jac * halfplane_derivative_correlator(&t.us, &vec![0; t.us.len()])?)
}

/// Both sides of the domain Ward identity. The right side is
/// `(Σ_i [g′(z)²/(2(g(z)−g(w_i))²) + g′(z)² g′(w_i)⁻¹/(g(z)−g(w_i)) ∂_{w_i}] + S_g(z)/24) ⟨Πψ⟩_D`
/// with `∂_{w_i}` acting on the ℍ correlator at the image points, the Jacobian
/// `Π g′(w_j)^{1/2}` held fixed.
pub fn ward_domain(chart: &ConformalChart, z: Complex64, ws: &[Complex64]) -> Result<(Complex64, Complex64)> {
    let lhs = t_domain(chart, z, ws)?;
    let t = transport(chart, z, ws)?;
    let cd = domain_base(&t)?;
    let gz2 = t.jz.d1 * t.jz.d1;
    let mut rhs = t.jz.schwarzian() / 24.0 * cd;
    for i in 0..ws.len() {
        let mut orders = vec![0; ws.len()];
        orders[i] = 1;
        // ∂_{w_i} of F(g(w)) with the Jacobian fixed: g′(w_i) ∂_u F
        let dfix = t.jac * t.jws[i].d1 * halfplane_derivative_correlator(&t.us, &orders)?;
        let r = t.jz.g - t.us[i];
        rhs += gz2 / (2.0 * r * r) * cd + gz2 / (t.jws[i].d1 * r) * dfix;
    }
    Ok((lhs, rhs))
}

/// The fully expanded small-separation form of the domain Ward identity,
/// evaluated term by term with `g` derivatives taken at `w_i`. It is an
/// asymptotic statement and is reported, not asserted.
pub fn ward_domain_expanded(chart: &ConformalChart, z: Complex64, ws: &[Complex64]) -> Result<Complex64> {
    let t = transport(chart, z, ws)?;
    let cd = domain_base(&t)?;
    let mut total = ZERO;
    for i in 0..ws.len() {
        let j = t.jws[i];
        let (r1, r3) = (j.d2 / j.d1, j.d3 / j.d1);
        let s = j.schwarzian();
        let mut orders = vec![0; ws.len()];
        orders[i] = 1;
        // full derivative of the domain correlator
        let d = t.jac * j.d1 * halfplane_derivative_correlator(&t.us, &orders)? + 0.5 * r1 * cd;
        let e = z - ws[i];
        total += 0.5 / (e * e) * cd
            + (0.5 * r1 * cd + d) / e
            + e * (s - r3 / 6.0 + 1.75 * r1 * r1) * d
            + 1.5 * r1 * d;
        // the constant term is written once; with several w_i it is averaged
        total += (s / 8.0 + r3 / 4.0) * cd / ws.len() as f64;
    }
    Ok(total)
}
