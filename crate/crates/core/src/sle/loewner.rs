use num_complex::Complex64;

use super::partition::grad_log_partition;
use crate::numerics::{brownian_increments, RngStream};
use crate::{Error, Result};

/// SLE parameter matching central charge ½.
pub const KAPPA: f64 = 3.0;

/// Default time step.
pub const DEFAULT_DT: f64 = 1e-4;

/// Default proximity guard between tracked images and driving points.
pub const DEFAULT_SWALLOW_EPS: f64 = 1e-6;

/// How the driving points move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driving {
    /// `dX^i = √3 dB^i + (3∂_i log Z + Σ_{l≠i} 2/(X^i − X^l)) dt`.
    Sle,
    /// As [`Driving::Sle`] without the pair term (a deliberately wrong drift).
    SleWithoutPairDrift,
    /// Driving points held fixed: no noise, no drift.
    Frozen,
}

/// Integrator for the tracked `g_t(w)` and `g_t′(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFlow {
    /// Per step and per driving point, the exact map of the Loewner flow
    /// with that point frozen: `g ← X + √((g − X)² + 4dt)`.
    SlitMap,
    /// Explicit Euler on `dg = Σ 2/(g − X) dt`, `dg′ = −Σ 2g′/(g − X)² dt`.
    Euler,
}

/// A point followed by the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tracked {
    pub w: Complex64,
    pub g: Complex64,
    pub g_prime: Complex64,
    /// `g′^{1/2}` continued along the flow from 1 (no branch jumps).
    pub sqrt_g_prime: Complex64,
}

impl Tracked {
    pub fn new(w: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { w, g: w, g_prime: one, sqrt_g_prime: one }
    }
}

/// State of `2n` simultaneously growing chordal curves.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerEnsemble {
    pub t: f64,
    pub x: Vec<f64>,
    pub tracked: Vec<Tracked>,
    pub rng: RngStream,
    pub dt: f64,
    pub swallow_eps: f64,
    pub driving: Driving,
    pub flow: GFlow,
}

impl LoewnerEnsemble {
    pub fn new(x: Vec<f64>, points: &[Complex64], rng: RngStream, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::BadStep(dt));
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("no driving points".into()));
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("driving points must be strictly increasing".into()));
        }
        let ens = Self {
            t: 0.0,
            x,
            tracked: points.iter().map(|&w| Tracked::new(w)).collect(),
            rng,
            dt,
            swallow_eps: DEFAULT_SWALLOW_EPS,
            driving: Driving::Sle,
            flow: GFlow::SlitMap,
        };
        ens.check()?;
        Ok(ens)
    }

    /// `κ = 3`.
    pub fn kappa(&self) -> f64 {
        KAPPA
    }

    /// Drift of each driving point.
    pub fn drift(&self) -> Result<Vec<f64>> {
        let n = self.x.len();
        let mut b = match self.driving {
            Driving::Frozen => return Ok(vec![0.0; n]),
            Driving::Sle | Driving::SleWithoutPairDrift => grad_log_partition(&self.x)?.into_iter().map(|g| KAPPA * g).collect::<Vec<_>>(),
        };
        if self.driving == Driving::Sle {
            for i in 0..n {
                for l in (0..n).filter(|&l| l != i) {
                    b[i] += 2.0 / (self.x[i] - self.x[l]);
                }
            }
        }
        Ok(b)
    }

    fn check(&self) -> Result<()> {
        for w in self.x.windows(2) {
            if !(w[1] - w[0] > self.swallow_eps) {
                return Err(Error::Swallowed(self.t));
            }
        }
        for p in &self.tracked {
            let finite = p.g.re.is_finite() && p.g.im.is_finite() && p.g_prime.re.is_finite() && p.g_prime.im.is_finite();
            if !finite || p.g_prime == Complex64::new(0.0, 0.0) {
                return Err(Error::Swallowed(self.t));
            }
            if self.x.iter().any(|&x| (p.g - x).norm() < self.swallow_eps) {
                return Err(Error::Swallowed(self.t));
            }
        }
        Ok(())
    }

    /// One step with the given Brownian increments `ΔB^i` (ignored when
    /// frozen). The flow uses the driving values at the start of the step.
    pub fn step_with(&mut self, db: &[f64]) -> Result<()> {
        let dt = self.dt;
        if self.driving != Driving::Frozen && db.len() != self.x.len() {
            return Err(Error::InvalidArgument(format!("{} increments for {} driving points", db.len(), self.x.len())));
        }
        for p in &mut self.tracked {
            match self.flow {
                GFlow::SlitMap => {
                    for &x in &self.x {
                        let d = p.g - x;
                        let s = (d * d + 4.0 * dt).sqrt();
                        // the branch continuous in dt
                        let s = if (s - d).norm() <= (s + d).norm() { s } else { -s };
                        p.g_prime *= d / s;
                        p.sqrt_g_prime *= (d / s).sqrt();
                        p.g = x + s;
                    }
                }
                GFlow::Euler => {
                    let (mut dg, mut dgp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                    for &x in &self.x {
                        let d = p.g - x;
                        dg += 2.0 * dt / d;
                        dgp -= 2.0 * dt * p.g_prime / (d * d);
                    }
                    p.g += dg;
                    p.sqrt_g_prime *= (1.0 + dgp / p.g_prime).sqrt();
                    p.g_prime += dgp;
                }
            }
        }
        if self.driving != Driving::Frozen {
            let b = self.drift()?;
            let sigma = KAPPA.sqrt();
            for i in 0..self.x.len() {
                self.x[i] += b[i] * dt + sigma * db[i];
            }
        }
        self.t += dt;
        self.check()
    }

    /// `steps` steps with increments from the ensemble's stream.
    pub fn evolve(&mut self, steps: usize) -> Result<()> {
        if self.driving == Driving::Frozen {
            for _ in 0..steps {
                self.step_with(&[])?;
            }
            return Ok(());
        }
        let n = self.x.len();
        let db = brownian_increments(&mut self.rng, n * steps, self.dt)?;
        for chunk in db.chunks(n) {
            self.step_with(chunk)?;
        }
        Ok(())
    }

    /// Smallest distance from a tracked image to a driving point.
    pub fn min_gap(&self) -> f64 {
        self.tracked.iter().flat_map(|p| self.x.iter().map(move |&x| (p.g - x).norm())).fold(f64::INFINITY, f64::min)
    }
}

/// `(3κ − 8)(6 − κ)/(2κ)` and `(6 − κ)/(2κ)` at `κ = 3`, as exact
/// fractions; both equal ½.
pub fn kappa_consistency() -> Result<()> {
    use num_rational::Ratio;
    let k = Ratio::from_integer(3i64);
    let c = (Ratio::from_integer(3) * k - 8) * (Ratio::from_integer(6) - k) / (Ratio::from_integer(2) * k);
    let h = (Ratio::from_integer(6) - k) / (Ratio::from_integer(2) * k);
    let half = Ratio::new(1, 2);
    if c != half || h != half {
        return Err(Error::InvalidArgument(format!("kappa = 3 gives c = {c}, h = {h}")));
    }
    Ok(())
}
