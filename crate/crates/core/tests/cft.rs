use isingff::cft::*;
use isingff::numerics::{central_diff, pfaffian, pfaffian_oracle};
use isingff::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn moebius() -> ConformalChart {
    // real coefficients with ad - bc = 5 > 0: an automorphism of ℍ
    ConformalChart::moebius(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0))
}

fn strip() -> ConformalChart {
    ConformalChart::horizontal_strip_to_h(std::f64::consts::PI)
}

fn charts() -> Vec<ConformalChart> {
    vec![ConformalChart::Identity, moebius(), strip()]
}

#[test]
fn schwarzian_composition_rule() {
    let f = ConformalChart::moebius(c(1.0, 0.2), c(0.5, 0.0), c(0.1, 0.1), c(1.0, 0.0));
    let g = ConformalChart::horizontal_strip_to_h(2.0);
    let fg = ConformalChart::compose(vec![g.clone(), f.clone()]);
    for z in [c(0.1, 0.5), c(-0.3, 1.2), c(0.7, 0.9)] {
        let jg = g.jet(z);
        let lhs = schwarzian(&fg, z).unwrap();
        let rhs = schwarzian(&f, jg.g).unwrap() * jg.d1 * jg.d1 + schwarzian(&g, z).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn composition_chain_rule_against_differences() {
    let ch = ConformalChart::compose(vec![ConformalChart::rotation(0.3), strip(), moebius()]);
    let z = c(0.2, 1.1);
    let j = ch.jet(z);
    let d1 = central_diff(|x| ch.jet(x).g, z, 1, 1e-4).unwrap();
    let d2 = central_diff(|x| ch.jet(x).d1, z, 1, 1e-4).unwrap();
    let d3 = central_diff(|x| ch.jet(x).d2, z, 1, 1e-4).unwrap();
    assert!((d1 - j.d1).norm() < 1e-9 * j.d1.norm().max(1.0));
    assert!((d2 - j.d2).norm() < 1e-9 * j.d2.norm().max(1.0));
    assert!((d3 - j.d3).norm() < 1e-8 * j.d3.norm().max(1.0));
}

#[test]
fn residue_of_f_up() {
    // (1/2πi)∮ f↑ around z′, trapezoidal rule on a small circle
    let zp = c(0.3, 1.5);
    let r = 0.1;
    let n = 256;
    let mut integral = c(0.0, 0.0);
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        let e = Complex64::from_polar(r, t);
        let dz = c(0.0, 1.0) * e * (std::f64::consts::TAU / n as f64);
        integral += f_up_halfplane(zp + e, zp).unwrap() * dz;
    }
    // 2πi Res = ∮ f↑ dz
    assert!((integral - c(-1.0, 0.0)).norm() < 1e-12, "{integral}");
    let mut down = c(0.0, 0.0);
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        let e = Complex64::from_polar(r, t);
        let dz = c(0.0, 1.0) * e * (std::f64::consts::TAU / n as f64);
        down += f_down_halfplane(zp + e, zp).unwrap() * dz;
    }
    assert!((down - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn expansion_remainder_is_quadratic() {
    for ch in [moebius(), strip()] {
        let w = c(0.2, 1.3);
        let dir = Complex64::from_polar(1.0, 0.4);
        let mut prev = None;
        for k in 0..4 {
            let eps = 0.1 / 2f64.powi(k);
            let r = two_point_expansion_remainder(&ch, w + eps * dir, w).unwrap().norm();
            // möbius charts reproduce 1/(z-w) exactly, leaving roundoff only
            if let Some(p) = prev {
                assert!(r < 1e-12 || p / r >= 3.0, "{} ratio {}", ch.kind(), p / r);
            }
            prev = Some(r);
        }
    }
}

#[test]
fn npoint_matches_wick_and_oracle() {
    let pts = [c(0.0, 1.0), c(0.0, 2.0), c(0.0, 3.0), c(0.0, 4.0)];
    let a = npoint(&ConformalChart::Identity, &pts).unwrap();
    let b = wick_pairing_oracle(&ConformalChart::Identity, &pts).unwrap();
    assert!((a - b).norm() < 1e-14);
    // explicit pairing sum
    let k = |i: usize, j: usize| 1.0 / (pts[i] - pts[j]);
    let direct = k(0, 1) * k(2, 3) - k(0, 2) * k(1, 3) + k(0, 3) * k(1, 2);
    assert!((a - direct).norm() < 1e-14);
    let six = [c(0.1, 0.5), c(-0.4, 1.0), c(1.0, 2.0), c(0.3, 0.2), c(-1.2, 0.9), c(0.6, 3.0)];
    for ch in charts() {
        let t = two_point_table(&ch, &six).unwrap();
        let (p, o) = (pfaffian(&t), pfaffian_oracle(&t).unwrap());
        assert!((p - o).norm() <= 1e-9 * o.norm());
        assert!((npoint(&ch, &six).unwrap() - wick_pairing_oracle(&ch, &six).unwrap()).norm() <= 1e-9 * o.norm());
    }
    let two = npoint(&moebius(), &six[..2]).unwrap();
    assert_eq!(two, two_point(&moebius(), six[0], six[1]).unwrap());
}

#[test]
fn derivative_correlator_cases() {
    let (z, w) = (c(0.0, 1.0), c(0.0, 2.0));
    let req = |o: Vec<usize>| CorrelatorRequest { chart: ConformalChart::Identity, points: vec![z, w], derivative_orders: o };
    let d0 = derivative_correlator(&req(vec![0, 0])).unwrap();
    assert_eq!(d0, npoint(&ConformalChart::Identity, &[z, w]).unwrap());
    let d1 = derivative_correlator(&req(vec![1, 0])).unwrap();
    assert!((d1 + 1.0 / ((z - w) * (z - w))).norm() < 1e-7);
    // Clairaut on a curved chart
    let pts = vec![c(0.2, 1.0), c(-0.3, 2.1), c(0.5, 0.4), c(1.1, 1.7)];
    let mk = |o: Vec<usize>| CorrelatorRequest { chart: strip(), points: pts.clone(), derivative_orders: o };
    let a = derivative_correlator(&mk(vec![1, 1, 0, 0])).unwrap();
    let mut swapped = pts.clone();
    swapped.swap(0, 1);
    let b = -derivative_correlator(&CorrelatorRequest { chart: strip(), points: swapped, derivative_orders: vec![1, 1, 0, 0] })
        .unwrap();
    assert!((a - b).norm() < 1e-6, "{a} vs {b}");
}

#[test]
fn exact_derivatives_match_differences_on_halfplane() {
    let pts = vec![c(0.2, 1.0), c(-0.3, 2.1), c(0.5, 0.4), c(1.1, 1.7)];
    // third derivatives nest two difference levels and lose about three digits
    for (orders, tol) in [
        (vec![1, 0, 0, 0], 1e-7),
        (vec![2, 1, 0, 0], 1e-6),
        (vec![1, 1, 1, 1], 1e-6),
        (vec![0, 0, 3, 1], 1e-4),
    ] {
        let exact = halfplane_derivative_correlator(&pts, &orders).unwrap();
        let num = derivative_correlator(&CorrelatorRequest {
            chart: ConformalChart::Identity,
            points: pts.clone(),
            derivative_orders: orders.clone(),
        })
        .unwrap();
        assert!((exact - num).norm() < tol * exact.norm().max(1.0), "{orders:?}: {exact} vs {num}");
    }
}

#[test]
fn ward_halfplane_cases() {
    let (l, r) = ward_halfplane(c(0.0, 3.0), &[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
    assert!((l - r).norm() < 1e-7, "{l} {r}");
    let ws = [c(0.0, 1.0), c(0.5, 2.0)];
    let (l, r) = ward_halfplane(c(1e3, 1e3), &ws).unwrap();
    let z4 = 2e6f64.powi(2);
    // both sides decay like |z|^-4; the subtracted left side carries roundoff
    // of order 1e-14 from the 1/η² cancellation
    assert!(l.norm() * z4 < 10.0 && r.norm() * z4 < 10.0, "{l} {r}");
    assert!(r.norm() * z4 > 1e-3);
    assert!((l - r).norm() < 1e-13, "{l} vs {r}");
}

#[test]
fn ward_domain_all_charts() {
    let z = c(0.4, 1.9);
    for ch in charts() {
        for ws in [vec![c(0.0, 1.0), c(0.5, 2.5)], vec![c(0.0, 1.0), c(0.5, 2.5), c(-0.7, 0.6), c(1.2, 1.1)]] {
            let (l, r) = ward_domain(&ch, z, &ws).unwrap();
            assert!((l - r).norm() < 1e-6, "{}: {l} vs {r}", ch.kind());
        }
    }
    let ws = [c(0.0, 1.0), c(0.5, 2.5)];
    let (a, _) = ward_domain(&ConformalChart::Identity, z, &ws).unwrap();
    let (b, _) = ward_halfplane(z, &ws).unwrap();
    assert_eq!(a, b);
}

#[test]
fn descendants() {
    let z = c(0.2, 1.0);
    let ws = [c(0.0, 2.0), c(-0.5, 0.7), c(1.0, 1.5)];
    let l1 = descendant_correlator(&[1], z, &ws).unwrap();
    let fd = central_diff(
        |x| {
            let mut p = vec![x];
            p.extend_from_slice(&ws);
            npoint(&ConformalChart::Identity, &p).unwrap()
        },
        z,
        1,
        1e-5,
    )
    .unwrap();
    assert!((l1 - fd).norm() < 1e-7);
    let deg = descendant_correlator(&[2], z, &ws[..1]).unwrap() - 0.75 * descendant_correlator(&[1, 1], z, &ws[..1]).unwrap();
    assert!(deg.norm() < 1e-7, "{deg}");
    let deg3 = descendant_correlator(&[2], z, &ws).unwrap() - 0.75 * descendant_correlator(&[1, 1], z, &ws).unwrap();
    assert!(deg3.norm() < 1e-7, "{deg3}");
}

#[test]
fn null_field_cases() {
    let r = null_field_residual(c(0.0, 1.0), &[c(0.0, 2.0)]).unwrap();
    assert!(r.norm() < 1e-12);
    let r = null_field_residual(c(0.0, 1.0), &[c(0.0, 2.0), c(0.0, 3.0), c(0.0, 5.0)]).unwrap();
    assert!(r.norm() < 1e-10);
    let pts = [c(0.3, 0.8), c(-1.0, 1.4), c(0.9, 2.2), c(0.1, 3.0)];
    let t1 = null_field_terms(pts[0], &pts[1..]).unwrap();
    let t2 = null_field_terms(2.0 * pts[0], &pts[1..].iter().map(|p| 2.0 * p).collect::<Vec<_>>()).unwrap();
    // each term is homogeneous of degree -(2 + 2) for four insertions
    for (a, b) in t1.iter().zip(&t2) {
        assert!((a - b * 16.0).norm() < 1e-12 * a.norm().max(1.0));
    }
}

#[test]
fn null_field_against_differences() {
    let z = c(0.3, 0.8);
    let ws = [c(-1.0, 1.4), c(0.9, 2.2), c(0.1, 3.0)];
    let corr = |z: Complex64, ws: &[Complex64]| {
        let mut p = vec![z];
        p.extend_from_slice(ws);
        npoint(&ConformalChart::Identity, &p).unwrap()
    };
    let mut res = 0.75 * central_diff(|x| corr(x, &ws), z, 2, 1e-3).unwrap();
    for i in 0..ws.len() {
        let d = central_diff(
            |x| {
                let mut w2 = ws.to_vec();
                w2[i] = x;
                corr(z, &w2)
            },
            ws[i],
            1,
            1e-5,
        )
        .unwrap();
        res -= 0.5 / ((z - ws[i]) * (z - ws[i])) * corr(z, &ws) + d / (z - ws[i]);
    }
    assert!(res.norm() < 1e-6, "{res}");
}

#[test]
fn ope_reports() {
    for ch in [ConformalChart::Identity, moebius(), strip()] {
        for pair in [OpePair::PsiPsi, OpePair::TPsi, OpePair::TT] {
            let r = ope_singularity_check(&ch, pair).unwrap();
            assert!(r.bounded(), "{} {:?}: {:?}", ch.kind(), pair, r.remainders);
            assert!(r.leading_error() < 1e-4, "{} {:?}: {}", ch.kind(), pair, r.leading_coefficient);
        }
    }
    let r = ope_singularity_check(&ConformalChart::Identity, OpePair::TPsi).unwrap();
    let ratio = r.regular_ratio.unwrap();
    assert!((ratio - 1.0).norm() < 1e-4, "{ratio}");
}

proptest! {
    #[test]
    fn npoint_antisymmetric(xs in proptest::collection::vec((-2.0f64..2.0, 0.2f64..3.0), 4), k in 0usize..3) {
        let pts: Vec<Complex64> = xs.iter().map(|&(a, b)| c(a, b)).collect();
        prop_assume!((0..4).all(|i| (i + 1..4).all(|j| (pts[i] - pts[j]).norm() > 1e-2)));
        let a = npoint(&moebius(), &pts).unwrap();
        let mut q = pts.clone();
        q.swap(k, k + 1);
        let b = npoint(&moebius(), &q).unwrap();
        prop_assert!((a + b).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn chart_covariance(xs in proptest::collection::vec((-1.5f64..1.5, 0.2f64..2.8), 4)) {
        let pts: Vec<Complex64> = xs.iter().map(|&(a, b)| c(a, b)).collect();
        prop_assume!((0..4).all(|i| (i + 1..4).all(|j| (pts[i] - pts[j]).norm() > 1e-2)));
        for ch in [moebius(), strip()] {
            let d = npoint(&ch, &pts).unwrap();
            let imgs: Vec<Complex64> = pts.iter().map(|&p| ch.jet(p).g).collect();
            let jac: Complex64 = pts.iter().map(|&p| ch.jet(p).d1.sqrt()).product();
            let h = npoint(&ConformalChart::Identity, &imgs).unwrap();
            prop_assert!((d - jac * h).norm() <= 1e-9 * d.norm().max(1.0));
            let t = two_point_table(&ch, &pts).unwrap();
            let pf = pfaffian(&t);
            let det = t.matrix().determinant();
            prop_assert!((pf * pf - det).norm() <= 1e-8 * det.norm().max(1e-300));
        }
    }
}
