use num_complex::Complex64;
use rayon::prelude::*;

use super::loewner::{Driving, GFlow, LoewnerEnsemble, DEFAULT_DT, DEFAULT_SWALLOW_EPS};
use super::partition::partition_function;
use crate::cft::{npoint, ConformalChart};
use crate::numerics::{brownian_increments, RngStream};
use crate::{Error, Result};

/// Boundary seeds of the curves and field points `W_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    pub boundary_points: Vec<f64>,
    pub field_points: Vec<Complex64>,
}

impl ObservableSpec {
    pub fn new(boundary_points: Vec<f64>, field_points: Vec<Complex64>, swallow_eps: f64) -> Result<Self> {
        if boundary_points.is_empty() || boundary_points.len() % 2 == 1 {
            return Err(Error::OddCount(boundary_points.len()));
        }
        let all: Vec<Complex64> = boundary_points.iter().map(|&x| Complex64::new(x, 0.0)).chain(field_points.iter().copied()).collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if (all[i] - all[j]).norm() <= swallow_eps {
                    return Err(Error::Coincident(i, j));
                }
            }
        }
        Ok(Self { boundary_points, field_points })
    }
}

/// `J_t χ(ψ^{⊗2n} ⊗ ψ^{⊗m})(X_t; g_t(W)) / Z(X_t)` with
/// `J_t = Π_k g_t′(W_k)^{1/2}`.
pub fn observable(ens: &LoewnerEnsemble) -> Result<Complex64> {
    if ens.tracked.is_empty() {
        // numerator and denominator are the same Pfaffian
        partition_function(&ens.x)?;
        return Ok(Complex64::new(1.0, 0.0));
    }
    let z = partition_function(&ens.x)?;
    let mut pts: Vec<Complex64> = ens.x.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut jac = Complex64::new(1.0, 0.0);
    for p in &ens.tracked {
        pts.push(p.g);
        jac *= p.sqrt_g_prime;
    }
    if pts.len() % 2 == 1 {
        return Err(Error::OddCount(pts.len()));
    }
    Ok(jac * npoint(&ConformalChart::Identity, &pts)? / z)
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub paths: usize,
    pub t_max: f64,
    pub dt: f64,
    pub seed: u64,
    pub swallow_eps: f64,
    pub checkpoints: usize,
    pub driving: Driving,
    pub flow: GFlow,
    /// When set, a path's observable is frozen the first time a tracked
    /// image comes this close to a driving point (the stopped process).
    /// The gap is only checked after each step, so a step can land well
    /// inside the radius; keep `√(κ dt)` small against it.
    pub localize: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 10_000,
            t_max: 0.3,
            dt: DEFAULT_DT,
            seed: 42,
            swallow_eps: DEFAULT_SWALLOW_EPS,
            checkpoints: 5,
            driving: Driving::Sle,
            flow: GFlow::SlitMap,
            localize: None,
        }
    }
}

/// Smallest path count accepted by [`martingale_mc_test`].
pub const MIN_PATHS: usize = 1000;

/// Largest tolerated fraction of swallowed paths.
pub const MAX_SWALLOWED_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCheckpoint {
    pub t: f64,
    pub mean: Complex64,
    pub se: Complex64,
    /// Larger of the real and imaginary z-scores of `mean − O_0`.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub o0: Complex64,
    pub paths: usize,
    pub swallowed: usize,
    pub checkpoints: Vec<McCheckpoint>,
}

impl McReport {
    pub fn swallowed_fraction(&self) -> f64 {
        self.swallowed as f64 / self.paths as f64
    }

    pub fn max_abs_z(&self) -> f64 {
        self.checkpoints.iter().map(|c| c.z_score.abs()).fold(0.0, f64::max)
    }

    pub fn inconclusive(&self) -> bool {
        self.swallowed_fraction() >= MAX_SWALLOWED_FRACTION
    }

    /// `|z| < 3` at every checkpoint with few swallowed paths.
    pub fn pass(&self) -> bool {
        !self.inconclusive() && self.max_abs_z() < 3.0
    }
}

fn z_component(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Simulates independent ensembles (path `p` uses stream `p`) and compares
/// the observable's sample mean at evenly spaced checkpoints with `O_0`.
pub fn martingale_mc_test(spec: &ObservableSpec, cfg: &McConfig) -> Result<McReport> {
    if cfg.paths < MIN_PATHS {
        return Err(Error::InvalidArgument(format!("{} paths; at least {MIN_PATHS} needed", cfg.paths)));
    }
    if cfg.checkpoints == 0 || !(cfg.t_max > 0.0) {
        return Err(Error::InvalidArgument("need a positive horizon and at least one checkpoint".into()));
    }
    let total_steps = (cfg.t_max / cfg.dt).round() as usize;
    let marks: Vec<usize> = (1..=cfg.checkpoints).map(|c| (c * total_steps).div_ceil(cfg.checkpoints)).collect();
    let make = |p: usize| -> Result<LoewnerEnsemble> {
        let mut e = LoewnerEnsemble::new(spec.boundary_points.clone(), &spec.field_points, RngStream::new(cfg.seed, p as u64), cfg.dt)?;
        e.swallow_eps = cfg.swallow_eps;
        e.driving = cfg.driving;
        e.flow = cfg.flow;
        Ok(e)
    };
    let o0 = observable(&make(0)?)?;
    let per_path: Vec<Option<Vec<Complex64>>> = (0..cfg.paths)
        .into_par_iter()
        .map(|p| -> Result<Option<Vec<Complex64>>> {
            let mut e = make(p)?;
            let mut out = Vec::with_capacity(marks.len());
            let mut done = 0;
            let mut frozen: Option<Complex64> = None;
            for &m in &marks {
                if frozen.is_none() {
                    let result = match cfg.localize {
                        None => e.evolve(m - done),
                        Some(radius) => (|| {
                            let n = e.x.len();
                            let db = brownian_increments(&mut e.rng, n * (m - done), e.dt)?;
                            for chunk in db.chunks(n) {
                                e.step_with(chunk)?;
                                if e.min_gap() < radius {
                                    frozen = Some(observable(&e)?);
                                    break;
                                }
                            }
                            Ok(())
                        })(),
                    };
                    match result {
                        Ok(()) => {}
                        Err(Error::Swallowed(_)) => return Ok(None),
                        Err(err) => return Err(err),
                    }
                    done = m;
                }
                out.push(match frozen {
                    Some(v) => v,
                    None => observable(&e)?,
                });
            }
            Ok(Some(out))
        })
        .collect::<Result<_>>()?;
    let alive: Vec<&Vec<Complex64>> = per_path.iter().flatten().collect();
    let swallowed = cfg.paths - alive.len();
    let k = alive.len() as f64;
    let mut checkpoints = Vec::with_capacity(marks.len());
    for (c, &m) in marks.iter().enumerate() {
        let mut mean = Complex64::new(0.0, 0.0);
        for v in &alive {
            mean += v[c];
        }
        mean /= k;
        let (mut vr, mut vi) = (0.0, 0.0);
        for v in &alive {
            vr += (v[c].re - mean.re).powi(2);
            vi += (v[c].im - mean.im).powi(2);
        }
        let se = Complex64::new((vr / (k - 1.0) / k).sqrt(), (vi / (k - 1.0) / k).sqrt());
        let d = mean - o0;
        let (zr, zi) = (z_component(d.re, se.re), z_component(d.im, se.im));
        let z_score = if zr.abs() >= zi.abs() { zr } else { zi };
        checkpoints.push(McCheckpoint { t: m as f64 * cfg.dt, mean, se, z_score });
    }
    Ok(McReport { o0, paths: cfg.paths, swallowed, checkpoints })
}
