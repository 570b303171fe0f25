use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::loewner::KAPPA;
use crate::numerics::{brownian_increments, RngStream};
use crate::voa::{apply_virasoro_mode, apply_virasoro_string, basis_states, monomial_level_twice, FockVector, Monomial, TruncationConfig, Q};
use crate::{Error, Result};

/// `(−2L_{−2} + (3/2)L_{−1}²)ψ_{−1/2}|0⟩`, computed exactly; it vanishes by
/// the level-two singular vector.
pub fn generator_drift_on_psi(cfg: &TruncationConfig) -> Result<FockVector> {
    let psi = FockVector::from_modes(&[1])?;
    let mut out = apply_virasoro_string(&[2], &psi, cfg)?.scaled(Q::from_integer(-2));
    out.add_assign_scaled(&apply_virasoro_string(&[1, 1], &psi, cfg)?, Q::new(3, 2));
    Ok(out)
}

/// Odd-sector basis up to the truncation level with the matrices of
/// `L_{−1}` and of the drift `A = −2L_{−2} + (3/2)L_{−1}²`. Components
/// raised past the cap are dropped; since `L_{−k}` raises the level, the
/// kept block is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrices {
    pub basis: Vec<Monomial>,
    pub l_minus1: DMatrix<f64>,
    pub drift: DMatrix<f64>,
}

pub fn generator_matrices(cfg: &TruncationConfig) -> Result<GeneratorMatrices> {
    let cap = cfg.twice_level();
    let basis: Vec<Monomial> = basis_states(cap).into_iter().filter(|m| m.len() % 2 == 1).collect();
    let wide = TruncationConfig::new(cap + 4, cfg.a0)?;
    let n = basis.len();
    let to_col = |v: &FockVector, mat: &mut DMatrix<f64>, col: usize| {
        for (row, m) in basis.iter().enumerate() {
            mat[(row, col)] = v.coefficient(m).to_f64().unwrap_or(f64::NAN);
        }
    };
    let mut l1 = DMatrix::zeros(n, n);
    let mut l2 = DMatrix::zeros(n, n);
    for (col, m) in basis.iter().enumerate() {
        let v = FockVector::from_modes(m)?;
        to_col(&apply_virasoro_mode(-1, &v, &wide)?, &mut l1, col);
        to_col(&apply_virasoro_mode(-2, &v, &wide)?, &mut l2, col);
    }
    let drift = &l2 * -2.0 + &l1 * &l1 * 1.5;
    Ok(GeneratorMatrices { basis, l_minus1: l1, drift })
}

/// Coefficients of `G_t ψ_{−1/2}|0⟩` in the odd basis at each recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSeries {
    pub basis: Vec<Monomial>,
    pub times: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
}

/// Integrates `dG = G[(−2L_{−2} + (3/2)L_{−1}²)dt − dξ L_{−1}]` from
/// `G_0 = I` with the increments `dξ` (Euler steps), recording every
/// `record_every` steps and at the end.
pub fn evolve_martingale_generator(mats: &GeneratorMatrices, dxi: &[f64], dt: f64, record_every: usize) -> Result<GeneratorSeries> {
    if !(dt > 0.0) {
        return Err(Error::BadStep(dt));
    }
    let n = mats.basis.len();
    let psi = mats.basis.iter().position(|m| m == &vec![1]).ok_or_else(|| Error::InvalidArgument("basis lacks ψ".into()))?;
    let id = DMatrix::<f64>::identity(n, n);
    let mut g = id.clone();
    let mut series = GeneratorSeries { basis: mats.basis.clone(), times: vec![0.0], coefficients: vec![g.column(psi).iter().copied().collect()] };
    let every = record_every.max(1);
    for (s, &x) in dxi.iter().enumerate() {
        let step = &id + &mats.drift * dt - &mats.l_minus1 * x;
        g = &g * step;
        if (s + 1) % every == 0 || s + 1 == dxi.len() {
            series.times.push((s + 1) as f64 * dt);
            series.coefficients.push(g.column(psi).iter().copied().collect());
        }
    }
    Ok(series)
}

/// Per checkpoint and basis state: the mean coefficient, its standard
/// error and the z-score against the value at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMcReport {
    pub basis: Vec<Monomial>,
    pub times: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
    pub z_scores: Vec<Vec<f64>>,
}

impl GeneratorMcReport {
    pub fn max_abs_z(&self) -> f64 {
        self.z_scores.iter().flatten().map(|z| z.abs()).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_abs_z() < 3.0
    }
}

/// Monte Carlo of [`evolve_martingale_generator`] with `dξ = √κ dB`, path
/// `p` on stream `p`.
pub fn generator_mc_test(cfg: &TruncationConfig, paths: usize, t_max: f64, dt: f64, checkpoints: usize, seed: u64) -> Result<GeneratorMcReport> {
    if paths < 2 || checkpoints == 0 {
        return Err(Error::InvalidArgument("need at least two paths and one checkpoint".into()));
    }
    let mats = generator_matrices(cfg)?;
    let steps = (t_max / dt).round() as usize;
    let every = (steps / checkpoints).max(1);
    let runs: Vec<GeneratorSeries> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let db = brownian_increments(&mut RngStream::new(seed, p as u64), steps, dt)?;
            let dxi: Vec<f64> = db.iter().map(|b| KAPPA.sqrt() * b).collect();
            evolve_martingale_generator(&mats, &dxi, dt, every)
        })
        .collect::<Result<_>>()?;
    let n = mats.basis.len();
    let times = runs[0].times[1..].to_vec();
    let k = paths as f64;
    let (mut means, mut ses, mut zs) = (Vec::new(), Vec::new(), Vec::new());
    for c in 1..runs[0].times.len() {
        let (mut mrow, mut srow, mut zrow) = (Vec::new(), Vec::new(), Vec::new());
        for b in 0..n {
            let mean = runs.iter().map(|r| r.coefficients[c][b]).sum::<f64>() / k;
            let var = runs.iter().map(|r| (r.coefficients[c][b] - mean).powi(2)).sum::<f64>() / (k - 1.0);
            let se = (var / k).sqrt();
            let d = mean - runs[0].coefficients[0][b];
            let z = if se > 0.0 { d / se } else if d.is_zero() { 0.0 } else { f64::INFINITY };
            mrow.push(mean);
            srow.push(se);
            zrow.push(z);
        }
        means.push(mrow);
        ses.push(srow);
        zs.push(zrow);
    }
    Ok(GeneratorMcReport { basis: mats.basis, times, means, std_errors: ses, z_scores: zs })
}

/// Level of each basis state, doubled.
pub fn basis_levels_twice(basis: &[Monomial]) -> Vec<u32> {
    basis.iter().map(|m| monomial_level_twice(m)).collect()
}
