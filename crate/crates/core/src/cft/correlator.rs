use num_complex::Complex64;

use super::chart::ConformalChart;
use crate::numerics::{central_diff, pfaffian, SkewMatrix};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Largest insertion count for [`wick_pairing_oracle`].
pub const WICK_MAX_POINTS: usize = 10;

fn check_distinct(points: &[Complex64]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::Coincident(i, j));
            }
        }
    }
    Ok(())
}

/// `f↑_{z′}(z) = (i/2π)(1/(z − z′) + 1/(z − z̄′))`.
pub fn f_up_halfplane(z: Complex64, zp: Complex64) -> Result<Complex64> {
    halfplane_parafermion(z, zp, 1.0)
}

/// `f↓_{z′}(z) = (i/2π)(−1/(z − z′) + 1/(z − z̄′))`.
pub fn f_down_halfplane(z: Complex64, zp: Complex64) -> Result<Complex64> {
    halfplane_parafermion(z, zp, -1.0)
}

fn halfplane_parafermion(z: Complex64, zp: Complex64, s: f64) -> Result<Complex64> {
    if z == zp {
        return Err(Error::Coincident(0, 1));
    }
    if !(z.im > 0.0 && zp.im > 0.0) {
        return Err(Error::InvalidArgument("points must lie in the open upper half-plane".into()));
    }
    let pre = Complex64::new(0.0, 0.5 / std::f64::consts::PI);
    Ok(pre * (s / (z - zp) + 1.0 / (z - zp.conj())))
}

/// `√g′(z) √g′(w) / (g(z) − g(w))` with principal square roots.
pub fn two_point(chart: &ConformalChart, z: Complex64, w: Complex64) -> Result<Complex64> {
    if z == w {
        return Err(Error::Coincident(0, 1));
    }
    let (jz, jw) = (chart.checked_jet(z)?, chart.checked_jet(w)?);
    let den = chart.image_difference(z, w);
    if den.norm() == 0.0 {
        return Err(Error::Coincident(0, 1));
    }
    Ok(jz.d1.sqrt() * jw.d1.sqrt() / den)
}

/// Skew table of [`two_point`] values.
pub fn two_point_table(chart: &ConformalChart, points: &[Complex64]) -> Result<SkewMatrix> {
    check_distinct(points)?;
    let jets: Vec<_> = points.iter().map(|&p| chart.checked_jet(p)).collect::<Result<_>>()?;
    let roots: Vec<Complex64> = jets.iter().map(|j| j.d1.sqrt()).collect();
    let mut bad = None;
    let m = SkewMatrix::from_upper(points.len(), |i, j| {
        let den = chart.image_difference(points[i], points[j]);
        if den.norm() == 0.0 {
            bad = Some((i, j));
        }
        roots[i] * roots[j] / den
    });
    if let Some((i, j)) = bad {
        return Err(Error::Coincident(i, j));
    }
    Ok(m)
}

/// `⟨ψ(z_1)⋯ψ(z_2n)⟩_D` as the Pfaffian of the two-point table.
pub fn npoint(chart: &ConformalChart, points: &[Complex64]) -> Result<Complex64> {
    if points.len() % 2 == 1 {
        return Err(Error::OddCount(points.len()));
    }
    Ok(pfaffian(&two_point_table(chart, points)?))
}

/// Signed sum over perfect pairings of two-point values.
pub fn wick_pairing_oracle(chart: &ConformalChart, points: &[Complex64]) -> Result<Complex64> {
    if points.len() > WICK_MAX_POINTS {
        return Err(Error::TooLarge { n: points.len(), max: WICK_MAX_POINTS });
    }
    if points.len() % 2 == 1 {
        return Err(Error::OddCount(points.len()));
    }
    let t = two_point_table(chart, points)?;
    let idx: Vec<usize> = (0..points.len()).collect();
    Ok(pairing_sum(&t, &idx))
}

fn pairing_sum(t: &SkewMatrix, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return ONE;
    }
    let mut total = ZERO;
    for p in 1..idx.len() {
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|&(q, _)| q + 1 != p).map(|(_, &x)| x).collect();
        // moving idx[p] next to idx[0] crosses p - 1 fermions
        let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * t.get(idx[0], idx[p]) * pairing_sum(t, &rest);
    }
    total
}

/// Insertion of `∂^order ψ` at a point of ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HInsertion {
    pub z: Complex64,
    pub order: usize,
}

impl HInsertion {
    pub fn psi(z: Complex64) -> Self {
        Self { z, order: 0 }
    }
    pub fn d(z: Complex64, order: usize) -> Self {
        Self { z, order }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∂_z^a ∂_w^b (z − w)^{−1} = (−1)^a (a + b)! / (z − w)^{a+b+1}`.
pub fn halfplane_kernel(z: Complex64, a: usize, w: Complex64, b: usize) -> Complex64 {
    let s = if a % 2 == 0 { 1.0 } else { -1.0 };
    s * factorial(a + b) / (z - w).powi((a + b + 1) as i32)
}

/// Wick–Pfaffian of derivative fields on ℍ. Pairs listed in `zeroed` get a
/// vanishing contraction (normal ordering of fields sharing a point).
pub fn halfplane_wick(ins: &[HInsertion], zeroed: &[(usize, usize)]) -> Result<Complex64> {
    if ins.len() % 2 == 1 {
        return Ok(ZERO);
    }
    let is_zeroed = |i: usize, j: usize| zeroed.iter().any(|&(a, b)| (a == i && b == j) || (a == j && b == i));
    for i in 0..ins.len() {
        for j in i + 1..ins.len() {
            if ins[i].z == ins[j].z && !is_zeroed(i, j) {
                return Err(Error::Coincident(i, j));
            }
        }
    }
    let m = SkewMatrix::from_upper(ins.len(), |i, j| {
        if is_zeroed(i, j) {
            ZERO
        } else {
            halfplane_kernel(ins[i].z, ins[i].order, ins[j].z, ins[j].order)
        }
    });
    Ok(pfaffian(&m))
}

/// `⟨∂^{a_1}ψ(z_1)⋯∂^{a_k}ψ(z_k)⟩_ℍ` by Pfaffian multilinearity (exact).
pub fn halfplane_derivative_correlator(points: &[Complex64], orders: &[usize]) -> Result<Complex64> {
    if points.len() != orders.len() {
        return Err(Error::InvalidArgument("points and orders differ in length".into()));
    }
    if points.len() % 2 == 1 {
        return Err(Error::OddCount(points.len()));
    }
    let ins: Vec<HInsertion> = points.iter().zip(orders).map(|(&z, &o)| HInsertion::d(z, o)).collect();
    halfplane_wick(&ins, &[])
}

/// Points, chart and per-point derivative orders.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorRequest {
    pub chart: ConformalChart,
    pub points: Vec<Complex64>,
    pub derivative_orders: Vec<usize>,
}

/// Largest per-point derivative order of [`derivative_correlator`].
pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// Mixed partial of [`npoint`] by nested central differences.
///
/// Each difference level has truncation `O(h⁴)` after Richardson, while
/// roundoff grows like `ε/h^K` for a total derivative order `K`. The step is
/// `h = d·ε^{1/(K+4)}` with `d` the smaller of 1 and the distance to the
/// nearest other insertion.
pub fn derivative_correlator(req: &CorrelatorRequest) -> Result<Complex64> {
    let n = req.points.len();
    if req.derivative_orders.len() != n {
        return Err(Error::InvalidArgument("points and orders differ in length".into()));
    }
    if let Some(&o) = req.derivative_orders.iter().find(|&&o| o > MAX_DERIVATIVE_ORDER) {
        return Err(Error::InvalidArgument(format!("derivative order {o} > {MAX_DERIVATIVE_ORDER}")));
    }
    if n % 2 == 1 {
        return Err(Error::OddCount(n));
    }
    check_distinct(&req.points)?;
    let total = req.derivative_orders.iter().sum::<usize>() as f64;
    let steps: Vec<f64> = (0..n)
        .map(|i| {
            let d = (0..n).filter(|&j| j != i).map(|j| (req.points[i] - req.points[j]).norm()).fold(f64::INFINITY, f64::min);
            d.min(1.0) * f64::EPSILON.powf(1.0 / (total + 4.0))
        })
        .collect();
    let mut pts = req.points.clone();
    nested(&req.chart, &mut pts, &req.derivative_orders, &steps, 0)
}

fn nested(chart: &ConformalChart, pts: &mut Vec<Complex64>, orders: &[usize], steps: &[f64], i: usize) -> Result<Complex64> {
    if i == pts.len() {
        return npoint(chart, pts);
    }
    let order = orders[i];
    if order == 0 {
        return nested(chart, pts, orders, steps, i + 1);
    }
    let base = pts[i];
    let err = std::cell::RefCell::new(None);
    let f = |x: Complex64| -> Complex64 {
        let mut local = pts.clone();
        local[i] = x;
        let r = match order {
            1 | 2 => nested(chart, &mut local, orders, steps, i + 1),
            // third order as the first derivative of the second
            _ => {
                let mut inner = orders.to_vec();
                inner[i] = 2;
                let g = |y: Complex64| {
                    let mut l2 = local.clone();
                    l2[i] = y;
                    nested(chart, &mut l2, &inner, steps, i + 1).unwrap_or(Complex64::new(f64::NAN, 0.0))
                };
                central_diff(g, x, 2, steps[i])
            }
        };
        match r {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let out = central_diff(f, base, if order == 2 { 2 } else { 1 }, steps[i]);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    out
}

/// `two_point(z, w) − 1/(z − w) − ((z − w)/12) S_g(w)`.
pub fn two_point_expansion_remainder(chart: &ConformalChart, z: Complex64, w: Complex64) -> Result<Complex64> {
    let tp = two_point(chart, z, w)?;
    let s = chart.checked_jet(w)?.schwarzian();
    Ok(tp - 1.0 / (z - w) - (z - w) / 12.0 * s)
}
