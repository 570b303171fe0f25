use isingff::cft::{descendant_correlator, npoint, ConformalChart};
use isingff::numerics::central_diff_default;
use isingff::voa::*;
use isingff::Complex64;
use num_traits::{One, Zero};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fv(modes: &[u32]) -> FockVector {
    FockVector::from_modes(modes).unwrap()
}

fn psi_state() -> FockVector {
    fv(&[1])
}

#[test]
fn basis_small_levels() {
    assert_eq!(basis_states(1), vec![vec![], vec![1]]);
    let b = basis_states(4);
    assert!(b.contains(&vec![3]) && b.contains(&vec![3, 1]));
    assert_eq!(b.len(), 4);
}

#[test]
fn basis_count_matches_generating_function() {
    // Π_k (1 + q^{k+1/2}) in powers of q^{1/2}
    let cap = 12usize;
    let mut poly = vec![0u64; cap + 1];
    poly[0] = 1;
    for a in (1..=cap).step_by(2) {
        for d in (a..=cap).rev() {
            poly[d] += poly[d - a];
        }
    }
    let total: u64 = poly.iter().sum();
    let basis = basis_states(cap as u32);
    assert_eq!(basis.len() as u64, total);
    for (d, &n) in poly.iter().enumerate() {
        assert_eq!(basis.iter().filter(|m| monomial_level_twice(m) as usize == d).count() as u64, n);
    }
}

#[test]
fn psi_mode_examples() {
    let cfg = TruncationConfig::default();
    let m = |t| ModeIndex::new(t).unwrap();
    let one = apply_psi_mode(m(-1), &FockVector::vacuum(), &cfg).unwrap();
    assert_eq!(one, psi_state());
    assert_eq!(apply_psi_mode(m(1), &one, &cfg).unwrap(), FockVector::vacuum());
    assert!(apply_psi_mode(m(-1), &one, &cfg).unwrap().is_zero());
    assert!(ModeIndex::new(2).is_err());
    let tight = TruncationConfig::with_level(5).unwrap();
    assert!(apply_psi_mode(m(-7), &FockVector::vacuum(), &tight).is_err());
}

#[test]
fn clifford_relations_exact() {
    let cfg = TruncationConfig::with_level(8).unwrap();
    let basis = basis_states(8);
    for a in (-7i32..=7).step_by(2) {
        for b in (-7i32..=7).step_by(2) {
            for mono in &basis {
                let lvl = monomial_level_twice(mono) as i32;
                if lvl - a > 8 || lvl - b > 8 || lvl - a - b > 8 {
                    continue;
                }
                let v = fv(mono);
                let (ma, mb) = (ModeIndex::new(a).unwrap(), ModeIndex::new(b).unwrap());
                let mut d = apply_psi_mode(ma, &apply_psi_mode(mb, &v, &cfg).unwrap(), &cfg).unwrap();
                d.add_assign_scaled(&apply_psi_mode(mb, &apply_psi_mode(ma, &v, &cfg).unwrap(), &cfg).unwrap(), Q::one());
                if a + b == 0 {
                    d.add_assign_scaled(&v, -Q::one());
                }
                assert!(d.is_zero(), "{{ψ_{a}/2, ψ_{b}/2}} on {mono:?}: {d}");
            }
        }
    }
}

#[test]
fn virasoro_examples() {
    let cfg = TruncationConfig::default();
    let p = psi_state();
    assert_eq!(apply_virasoro_mode(-1, &p, &cfg).unwrap(), fv(&[3]));
    assert_eq!(apply_virasoro_mode(0, &p, &cfg).unwrap(), p.scaled(Q::new(1, 2)));
    assert!(apply_virasoro_mode(1, &p, &cfg).unwrap().is_zero());
    assert!(apply_virasoro_mode(0, &FockVector::vacuum(), &cfg).unwrap().is_zero());
    let shifted = TruncationConfig::new(12, Q::new(1, 16)).unwrap();
    assert_eq!(apply_virasoro_mode(0, &p, &shifted).unwrap(), p.scaled(Q::new(9, 16)));
    // the conformal vector
    let nu = apply_virasoro_mode(-2, &FockVector::vacuum(), &cfg).unwrap();
    assert_eq!(nu, fv(&[3, 1]).scaled(Q::new(1, 2)));
}

#[test]
fn commutators_exact_at_level_six() {
    let cfg = TruncationConfig::with_level(12).unwrap();
    let r = commutator_tables(&cfg).unwrap();
    assert!(r.max_deviation().is_zero(), "{}", r.to_table());
    assert!(r.states_checked() > 1000);
    let diag = commutator_tables(&TruncationConfig::new(12, Q::new(1, 16)).unwrap()).unwrap();
    assert!(!diag.max_deviation().is_zero());
    // only the central pairs break, by 2m·a0
    for e in diag.entries.iter().filter(|e| !e.max_deviation.is_zero()) {
        assert_eq!(e.kind, CommutatorKind::VirasoroVirasoro);
        assert_eq!(e.m + e.n, 0);
        assert_eq!(e.max_deviation, Q::new(2 * e.m.abs(), 16));
    }
}

#[test]
fn central_term_on_vacuum() {
    let cfg = TruncationConfig::default();
    let vac = FockVector::vacuum();
    let l2 = apply_virasoro_mode(2, &apply_virasoro_mode(-2, &vac, &cfg).unwrap(), &cfg).unwrap();
    assert_eq!(l2, vac.scaled(Q::new(1, 4)));
}

#[test]
fn singular_vector_signs() {
    let cfg = TruncationConfig::default();
    assert!(singular_vector(-1, &cfg).unwrap().is_zero());
    let plus = singular_vector(1, &cfg).unwrap();
    assert_eq!(plus, fv(&[5]).scaled(Q::from_integer(3)));
    assert_eq!(apply_virasoro_mode(0, &plus, &cfg).unwrap(), plus.scaled(Q::new(5, 2)));
    assert_eq!(plus.to_string(), "3·ψ_{-5/2}|0>");
    assert!(singular_vector(0, &cfg).is_err());
}

#[test]
fn vertex_generator_case() {
    let cfg = TruncationConfig::with_level(14).unwrap();
    for mono in basis_states(7) {
        let v = fv(&mono);
        for j in -3i64..=4 {
            let lhs = vertex_mode(&psi_state(), j, &v, &cfg).unwrap();
            let rhs = apply_psi_mode(ModeIndex::new((2 * j + 1) as i32).unwrap(), &v, &cfg).unwrap();
            assert_eq!(lhs, rhs, "j={j} v={v}");
        }
    }
    let vac = vertex_mode(&psi_state(), 0, &psi_state(), &cfg).unwrap();
    assert_eq!(vac, FockVector::vacuum());
}

#[test]
fn vertex_of_conformal_vector_is_virasoro() {
    let cfg = TruncationConfig::with_level(12).unwrap();
    let nu = fv(&[3, 1]).scaled(Q::new(1, 2));
    for mono in basis_states(8) {
        let v = fv(&mono);
        for j in -1i64..=6 {
            let lhs = vertex_mode(&nu, j, &v, &cfg).unwrap();
            let rhs = apply_virasoro_mode(j - 1, &v, &cfg).unwrap();
            assert_eq!(lhs, rhs, "j={j} v={v}");
        }
    }
}

#[test]
fn vertex_vacuum_and_creation() {
    let cfg = TruncationConfig::default();
    let v = fv(&[3, 1]);
    // Y(|0⟩) is the identity; u_{(−1)}|0⟩ = u
    assert_eq!(vertex_mode(&FockVector::vacuum(), -1, &v, &cfg).unwrap(), v);
    assert_eq!(vertex_mode(&v, -1, &FockVector::vacuum(), &cfg).unwrap(), v);
    assert!(vertex_mode(&v, 0, &FockVector::vacuum(), &cfg).unwrap().is_zero());
}

#[test]
fn pbw_decomposition() {
    let cfg = TruncationConfig::default();
    assert_eq!(pbw_strings(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
    let d = descendant_decomposition(&fv(&[5]), 5, &cfg).unwrap();
    assert_eq!(d.len(), 1);
    // every odd state at level 9/2 is a descendant, including the three-fermion one
    let three = fv(&[5, 3, 1]);
    let d = descendant_decomposition(&three, 9, &cfg).unwrap();
    let mut rebuilt = FockVector::zero();
    for (s, q) in &d {
        rebuilt.add_assign_scaled(&apply_virasoro_string(s, &psi_state(), &cfg).unwrap(), *q);
    }
    assert_eq!(rebuilt, three);
    assert!(descendant_decomposition(&fv(&[3, 1]), 4, &cfg).is_err());
}

#[test]
fn chi_axiom_one() {
    let cfg = TruncationConfig::default();
    let id = ConformalChart::Identity;
    let v = chi_correlator(&[psi_state(), psi_state()], &[c(0.0, 1.0), c(0.0, 2.0)], &id, &cfg).unwrap();
    assert!((v.value - c(0.0, 1.0)).norm() < 1e-15 && !v.odd_parity);
    let pts = [c(0.1, 1.0), c(-0.4, 0.7), c(1.3, 2.0), c(0.5, 0.3)];
    for chart in [id.clone(), ConformalChart::horizontal_strip_to_h(1.0)] {
        let pts: Vec<_> = if matches!(chart, ConformalChart::Identity) { pts.to_vec() } else { pts.iter().map(|z| z * 0.3).collect() };
        let v = chi_correlator(&vec![psi_state(); 4], &pts, &chart, &cfg).unwrap().value;
        let pf = npoint(&chart, &pts).unwrap();
        assert!((v - pf).norm() <= 1e-14 * pf.norm());
    }
    let odd = chi_correlator(&[psi_state(), psi_state(), psi_state()], &pts[..3], &id, &cfg).unwrap();
    assert!(odd.odd_parity && odd.value == c(0.0, 0.0));
    let t = fv(&[3, 1]);
    assert!(chi_correlator(&[t, FockVector::vacuum()], &pts[..2], &id, &cfg).is_err());
}

#[test]
fn chi_axiom_two() {
    let cfg = TruncationConfig::default();
    let l1psi = apply_virasoro_mode(-1, &psi_state(), &cfg).unwrap();
    let (z2, w) = (c(0.0, 2.0), c(0.3, 0.9));
    for chart in [ConformalChart::Identity, ConformalChart::rotation(0.7), ConformalChart::horizontal_strip_to_h(4.0)] {
        let z = c(0.2, 1.0);
        let lhs = chi_correlator(&[l1psi.clone(), psi_state(), psi_state(), psi_state()], &[z, z2, w, c(-0.5, 1.5)], &chart, &cfg).unwrap().value;
        let f = |x: Complex64| chi_correlator(&vec![psi_state(); 4], &[x, z2, w, c(-0.5, 1.5)], &chart, &cfg).unwrap().value;
        let rhs = central_diff_default(f, z, 1).unwrap();
        assert!((lhs - rhs).norm() < 1e-7 * (1.0 + rhs.norm()), "{}: {lhs} vs {rhs}", chart.kind());
    }
}

#[test]
fn chi_matches_descendant_operators() {
    let cfg = TruncationConfig::default();
    let z = c(0.1, 1.2);
    let ws = [c(-0.7, 0.8), c(0.9, 0.5), c(0.2, 2.5)];
    for ks in [vec![2], vec![3], vec![2, 1], vec![1, 2], vec![4]] {
        let state = apply_virasoro_string(&ks.iter().map(|&k| k as i64).collect::<Vec<_>>(), &psi_state(), &cfg).unwrap();
        let mut states = vec![state];
        states.extend(vec![psi_state(); 3]);
        let mut pts = vec![z];
        pts.extend_from_slice(&ws);
        let chi = chi_correlator(&states, &pts, &ConformalChart::Identity, &cfg).unwrap().value;
        let op = descendant_correlator(&ks, z, &ws).unwrap();
        assert!((chi - op).norm() < 1e-10 * (1.0 + op.norm()), "{ks:?}: {chi} vs {op}");
    }
}

#[test]
fn chi_ope_bounded() {
    let cfg = TruncationConfig::default();
    let r = chi_ope_remainders(&ConformalChart::Identity, c(0.2, 1.0), &[c(1.0, 0.5), c(-0.6, 2.0)], &[1e-1, 1e-2, 1e-3], &cfg).unwrap();
    assert!(r.iter().all(|x| x.is_finite() && *x < 10.0), "{r:?}");
    assert!(r[2] < 2.0 * r[0].max(1e-3));
}
