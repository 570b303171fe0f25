use isingff::cft::wick_pairing_oracle;
use isingff::cft::ConformalChart;
use isingff::numerics::{central_diff_default, RngStream};
use isingff::sle::*;
use isingff::voa::TruncationConfig;
use isingff::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn kappa_matches_central_charge() {
    kappa_consistency().unwrap();
}

#[test]
fn partition_examples() {
    assert!((partition_function(&[0.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    let xs = [0.0, 1.0, 2.0, 4.0];
    let z = partition_function(&xs).unwrap();
    let pts: Vec<Complex64> = xs.iter().map(|&x| c(x, 0.0)).collect();
    let oracle = wick_pairing_oracle(&ConformalChart::Identity, &pts).unwrap();
    assert!((z - oracle.re).abs() < 1e-14);
    assert!(partition_function(&[1.0, 0.0]).is_err());
    assert!(partition_function(&[0.0, 1.0, 2.0]).is_err());
    // homogeneity of degree −n
    let z2 = partition_function(&xs.map(|x| 2.0 * x)).unwrap();
    assert!((z2 - z / 4.0).abs() < 1e-14);
}

#[test]
fn grad_log_matches_differences() {
    for xs in [vec![-0.3, 1.7], vec![0.0, 1.0, 2.0, 4.0], vec![-2.0, -0.5, 0.3, 1.1, 2.5, 4.0]] {
        let g = grad_log_partition(&xs).unwrap();
        for i in 0..xs.len() {
            let f = |x: Complex64| {
                let mut p = xs.clone();
                p[i] = x.re;
                c(partition_function(&p).unwrap().abs().ln(), 0.0)
            };
            let fd = central_diff_default(f, c(xs[i], 0.0), 1).unwrap().re;
            assert!((fd - g[i]).abs() < 1e-7 * (1.0 + g[i].abs()), "{xs:?} {i}: {fd} vs {}", g[i]);
        }
    }
}

#[test]
fn pde_residuals_small() {
    for xs in [vec![0.0, 1.0], vec![-1.3, 0.4], vec![0.0, 1.0, 2.0, 4.0], vec![-3.0, -1.0, 0.5, 2.0]] {
        let r = pde_residuals(&xs).unwrap();
        assert!(r.max() < 1e-5, "{xs:?}: {r:?}");
    }
    // the n = 1 null-field terms cancel: (3/4)·2 − 1 − 1/2 = 0
    let r = pde_residuals(&[0.0, 1.0]).unwrap();
    assert!(r.null_field.iter().all(|&x| x < 1e-9));
}

#[test]
fn zero_noise_oracle() {
    let mut e = LoewnerEnsemble::new(vec![0.0], &[c(0.0, 1.0), c(1e3, 0.0), c(0.0, 1e3)], RngStream::new(0, 0), 1e-4).unwrap();
    e.driving = Driving::Frozen;
    e.swallow_eps = 0.0;
    for k in 1..=5 {
        e.evolve(500).unwrap();
        let t = e.t;
        assert!((t - 0.05 * k as f64).abs() < 1e-12);
        let z = c(0.0, 1.0);
        assert!((e.tracked[0].g - (z * z + 4.0 * t).sqrt()).norm() < 1e-4, "t={t}: {}", e.tracked[0].g);
        for p in &e.tracked[1..] {
            assert!((p.g - p.w).norm() < 1e-2 * t);
        }
    }
    let mut e = LoewnerEnsemble::new(vec![0.0], &[c(0.0, 1.0)], RngStream::new(0, 0), 1e-4).unwrap();
    e.driving = Driving::Frozen;
    e.evolve(1000).unwrap();
    assert!((e.tracked[0].g - c(0.0, 0.6f64.sqrt())).norm() < 1e-10);
    // exact derivative of √(z² + 4t)
    assert!((e.tracked[0].g_prime - c(0.0, 1.0) / e.tracked[0].g).norm() < 1e-9);
}

#[test]
fn euler_flow_is_first_order() {
    // away from the tip the Euler flow converges at rate dt
    let run = |dt: f64| {
        let mut e = LoewnerEnsemble::new(vec![0.0], &[c(0.5, 1.0)], RngStream::new(0, 0), dt).unwrap();
        e.driving = Driving::Frozen;
        e.flow = GFlow::Euler;
        e.evolve((0.1 / dt).round() as usize).unwrap();
        let z = c(0.5, 1.0);
        (e.tracked[0].g - (z * z + 0.4).sqrt()).norm()
    };
    let (a, b) = (run(1e-3), run(5e-4));
    assert!(a / b > 1.8 && a / b < 2.2, "{a} {b}");
}

#[test]
fn far_partner_drift_is_small() {
    let e = LoewnerEnsemble::new(vec![0.0, 1e3], &[], RngStream::new(0, 0), 1e-4).unwrap();
    let b = e.drift().unwrap();
    assert!(b[0].abs() < 2e-3 && (b[0] - 1e-3).abs() < 1e-12);
}

#[test]
fn strong_convergence_under_refinement() {
    // coupled noise: a coarse increment is the sum of two fine ones
    let t_end = 0.05;
    let path = |dt: f64, fine: &[f64]| {
        let mut e = LoewnerEnsemble::new(vec![0.0, 5.0], &[], RngStream::new(0, 0), dt).unwrap();
        let ratio = ((dt / 1e-5).round()) as usize;
        let steps = (t_end / dt).round() as usize;
        for s in 0..steps {
            let mut db = [0.0, 0.0];
            for r in 0..ratio {
                db[0] += fine[2 * (s * ratio + r)];
                db[1] += fine[2 * (s * ratio + r) + 1];
            }
            e.step_with(&db).unwrap();
        }
        e.x
    };
    let mut errs = [0.0; 3];
    let paths = 50;
    for p in 0..paths {
        let fine = isingff::numerics::brownian_increments(&mut RngStream::new(5, p), 2 * 5000, 1e-5).unwrap();
        let reference = path(1e-5, &fine);
        for (k, dt) in [4e-4, 2e-4, 1e-4].iter().enumerate() {
            let x = path(*dt, &fine);
            errs[k] += (x[0] - reference[0]).abs() / paths as f64;
        }
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[0] / errs[1] > std::f64::consts::SQRT_2 * 0.9, "{errs:?}");
}

#[test]
fn observable_basics() {
    let ens = LoewnerEnsemble::new(vec![0.0, 10.0], &[c(-2.0, 0.0), c(-1.0, 0.0)], RngStream::new(0, 0), 1e-4).unwrap();
    let o = observable(&ens).unwrap();
    assert!(o.re.is_finite() && o.im.abs() < 1e-15);
    let swapped = LoewnerEnsemble::new(vec![0.0, 10.0], &[c(-1.0, 0.0), c(-2.0, 0.0)], RngStream::new(0, 0), 1e-4).unwrap();
    assert!((observable(&swapped).unwrap() + o).norm() < 1e-14);
    let none = LoewnerEnsemble::new(vec![0.0, 10.0], &[], RngStream::new(0, 0), 1e-4).unwrap();
    assert_eq!(observable(&none).unwrap(), c(1.0, 0.0));
}

#[test]
fn observable_seed_relabeling() {
    // n = 2: exchanging two seeds flips Z and χ together
    let mut ens = LoewnerEnsemble::new(vec![-1.0, 0.0, 2.0, 3.0], &[c(0.5, 0.7), c(1.0, 1.5)], RngStream::new(0, 0), 1e-4).unwrap();
    ens.evolve(20).unwrap();
    let o = observable(&ens).unwrap();
    let pts: Vec<Complex64> = ens.x.iter().map(|&x| c(x, 0.0)).chain(ens.tracked.iter().map(|p| p.g)).collect();
    let j: Complex64 = ens.tracked.iter().map(|p| p.g_prime.sqrt()).product();
    let mut perm = pts.clone();
    perm.swap(0, 2);
    let num = isingff::cft::npoint(&ConformalChart::Identity, &perm).unwrap();
    let den = isingff::cft::npoint(&ConformalChart::Identity, &perm[..4]).unwrap();
    assert!((j * num / den - o).norm() < 1e-12 * o.norm());
}

#[test]
fn martingale_small_run() {
    let spec = ObservableSpec::new(vec![0.0, 10.0], vec![c(-2.0, 0.0), c(-1.0, 0.0)], 1e-6).unwrap();
    let cfg = McConfig { paths: 2000, t_max: 0.1, dt: 1e-4, localize: Some(0.1), ..Default::default() };
    let r = martingale_mc_test(&spec, &cfg).unwrap();
    assert_eq!(r.checkpoints.len(), 5);
    assert!(r.pass(), "{r:?}");
    // bit-stable under rerun
    assert_eq!(martingale_mc_test(&spec, &cfg).unwrap(), r);
    let empty = ObservableSpec::new(vec![0.0, 10.0], vec![], 1e-6).unwrap();
    let r0 = martingale_mc_test(&empty, &cfg).unwrap();
    assert!(r0.checkpoints.iter().all(|c| c.z_score == 0.0));
    assert!(martingale_mc_test(&spec, &McConfig { paths: 10, ..cfg }).is_err());
}

#[test]
fn boundary_observable_is_strict_local_martingale() {
    // without stopping, −O behaves like a positive supermartingale: the mean
    // rises above O_0 as paths approach the field points
    let spec = ObservableSpec::new(vec![0.0, 10.0], vec![c(-2.0, 0.0), c(-1.0, 0.0)], 1e-6).unwrap();
    let cfg = McConfig { paths: 2000, t_max: 0.3, dt: 1e-3, ..Default::default() };
    let r = martingale_mc_test(&spec, &cfg).unwrap();
    let last = r.checkpoints.last().unwrap();
    assert!(r.o0.re < 0.0 && last.z_score > 5.0, "{r:?}");
}

#[test]
fn generator_drift_vanishes_on_psi() {
    let cfg = TruncationConfig::with_level(8).unwrap();
    assert!(generator_drift_on_psi(&cfg).unwrap().is_zero());
    let m = generator_matrices(&cfg).unwrap();
    assert_eq!(basis_levels_twice(&m.basis), vec![1, 3, 5, 7]);
    let psi = m.basis.iter().position(|b| b == &vec![1]).unwrap();
    assert!(m.drift.column(psi).iter().all(|&x| x == 0.0));
}

#[test]
fn generator_without_noise() {
    let cfg = TruncationConfig::with_level(8).unwrap();
    let m = generator_matrices(&cfg).unwrap();
    let s = evolve_martingale_generator(&m, &vec![0.0; 1000], 1e-3, 100).unwrap();
    let psi = m.basis.iter().position(|b| b == &vec![1]).unwrap();
    for coeffs in &s.coefficients {
        assert_eq!(coeffs[psi], 1.0);
        assert!(coeffs.iter().enumerate().all(|(i, &x)| i == psi || x == 0.0));
    }
}

#[test]
fn generator_mean_constant() {
    let cfg = TruncationConfig::with_level(8).unwrap();
    let r = generator_mc_test(&cfg, 2000, 0.3, 1e-3, 5, 7).unwrap();
    assert!(r.pass(), "{r:?}");
}
