//! `isingff`: command-line front end to the verification suites.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage error, 3 inconclusive. The only
//! environment variable that matters is `RAYON_NUM_THREADS`, which caps the
//! worker threads of the Monte Carlo runs; results do not depend on it.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Level, List, Settings};
use isingff::voa::Q;
use isingff::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(#[from] isingff::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use isingff::Error as E;
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 1,
            Self::Core(e) => match e {
                E::InvalidArgument(_)
                | E::Geometry(_)
                | E::TooLarge { .. }
                | E::Truncation { .. }
                | E::OddCount(_)
                | E::Coincident(..)
                | E::BadStep(_) => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory [default: isingff-out/<subcommand>]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file; explicit flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transfer-matrix partition function against enumeration, Clifford relations, induced rotation
    LatticeVerify {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Lattice two-point function against the continuum strip correlator
    LatticeScaling {
        /// Half-widths M, comma separated
        #[arg(long)]
        widths: Option<List<usize>>,
        #[arg(long)]
        beta: Option<f64>,
        /// Half-height N = factor · M
        #[arg(long)]
        height_factor: Option<usize>,
        /// Physical strip width
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Ward identities for T inserted into fermion correlators
    CftWard {
        /// identity, moebius, strip or all
        #[arg(long)]
        chart: Option<commands::ChartSel>,
        /// Largest number of fermion pairs
        #[arg(long)]
        n: Option<usize>,
        /// Insertion point of T
        #[arg(long, allow_hyphen_values = true)]
        z: Option<Complex64>,
        /// Explicit fermion points (overrides --n)
        #[arg(long, allow_hyphen_values = true)]
        ws: Option<List<Complex64>>,
    },
    /// Level-two null-field equation at random configurations
    CftNullfield {
        /// Largest number of fermion pairs
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        configs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Operator product expansions against their singular templates
    CftOpe {
        #[arg(long)]
        chart: Option<commands::ChartSel>,
        /// psi_psi, T_psi, T_T or all
        #[arg(long)]
        pair: Option<commands::PairSel>,
    },
    /// Sugawara commutators on the truncated Fock space, exactly
    VoaCommutators {
        /// Truncation level (integer or half-integer)
        #[arg(long)]
        level: Option<Level>,
        /// Vacuum shift of L_0, e.g. 0 or 1/16
        #[arg(long)]
        a0: Option<Q>,
    },
    /// Level-two singular vector of the fermion
    VoaSingular {
        #[arg(long)]
        level: Option<Level>,
    },
    /// Translation, scaling, special conformal and null-field PDEs for Z
    SlePde {
        /// Boundary points, strictly increasing (default: one n=1 and one n=2 configuration)
        #[arg(long, allow_hyphen_values = true)]
        xs: Option<List<f64>>,
    },
    /// Monte Carlo martingale test of the fermion observable under SLE_3
    SleMartingale {
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        checkpoints: Option<usize>,
        #[arg(long)]
        swallow_eps: Option<f64>,
        /// Curve seeds on the real line
        #[arg(long, allow_hyphen_values = true)]
        x: Option<List<f64>>,
        /// Field points (real for boundary fermions)
        #[arg(long, allow_hyphen_values = true)]
        w: Option<List<Complex64>>,
        /// Freeze each path once a field-point image comes within this distance of a driving point
        #[arg(long)]
        localize: Option<f64>,
        /// Negative control: drop the pair drift 2/(X_i − X_l)
        #[arg(long)]
        broken_drift: bool,
        /// slit or euler
        #[arg(long)]
        flow: Option<commands::FlowSel>,
    },
    /// Monte Carlo of the graded coefficients of G_t ψ_{-1/2}|0>
    SleGenerator {
        #[arg(long)]
        level: Option<Level>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        checkpoints: Option<usize>,
    },
}

#[derive(Debug, Parser)]
#[command(name = "isingff", version, about = "Free-fermion Ising model: lattice, CFT, VOA and SLE checks")]
struct Top {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn run(top: Top) -> Result<report::Outcome, CliError> {
    let name = commands::name(&top.command);
    let mut settings = Settings::load(top.common.config.as_deref())?;
    let rep = commands::execute(top.command, &mut settings)?;
    let dir = top.common.out.unwrap_or_else(|| PathBuf::from("isingff-out").join(name));
    rep.write(&dir, &settings.echo(name))?;
    print!("{}", rep.summary());
    println!("artifacts: {}", dir.display());
    Ok(rep.outcome)
}

fn main() -> ExitCode {
    let top = match Top::try_parse() {
        Ok(t) => t,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(top) {
        Ok(o) => ExitCode::from(o.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
