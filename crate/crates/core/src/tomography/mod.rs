//! Density-matrix reconstruction from coincidence counts.
//!
//! Linear inversion through the dual basis seeds a maximum-likelihood search
//! over ρ = T†T/Tr(T†T), with T lower triangular. Two optimizers are
//! available: a downhill simplex with restarts and simulated annealing.

pub mod annealing;
mod data;
mod likelihood;
mod linear;
pub mod nelder_mead;
mod param;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use data::{CountRecord, TomographyData};
pub use likelihood::{likelihood_gradient, log_likelihood, TRACE_FLOOR};
pub use linear::{linear_inversion, LinearEstimate, NORMALISATION_LABELS};
pub use param::{rho_from_t, TriangularParam};

use crate::error::{Error, Result};
use crate::linalg;
use crate::projectors::dual_basis;
use crate::state::DensityMatrix4;
use annealing::AnnealingOptions;
use nelder_mead::SimplexOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Simplex,
    Annealing,
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptimizerKind::Simplex => "simplex",
            OptimizerKind::Annealing => "annealing",
        })
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" | "nelder-mead" | "nelder_mead" => Ok(OptimizerKind::Simplex),
            "annealing" | "simulated-annealing" => Ok(OptimizerKind::Annealing),
            other => Err(Error::Config(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub max_restarts: usize,
    /// A restart that gains less than this in ln L (absolute) confirms the
    /// optimum, whatever the relative tolerance says.
    pub likelihood_tol: f64,
    /// Eigenvalue floor used when projecting the linear estimate.
    pub psd_floor: f64,
    pub simplex: SimplexOptions,
    pub annealing: AnnealingOptions,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Simplex,
            seed: 0,
            max_restarts: 10,
            likelihood_tol: 1e-3,
            psd_floor: 1e-6,
            simplex: SimplexOptions {
                scale: 0.05,
                rel_tol: 1e-9,
                max_evaluations: 100_000,
            },
            annealing: AnnealingOptions {
                scale: 0.05,
                probes: 50,
                cooling: 0.9,
                steps_per_level: 200,
                floor: 1e-6,
            },
        }
    }
}

impl MleOptions {
    pub fn with_optimizer(mut self, optimizer: OptimizerKind) -> Self {
        self.optimizer = optimizer;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub final_log_likelihood: f64,
    /// Objective evaluations across all runs.
    pub iterations: usize,
    pub optimizer: OptimizerKind,
    pub restarts: usize,
    /// Tr(T†T) at the returned optimum.
    pub trace_before_normalization: f64,
    /// Tr(T†T) where the direct search stopped, before the exact step along
    /// the scale direction.
    pub search_trace: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub rho: DensityMatrix4,
    pub param: TriangularParam,
    pub linear: LinearEstimate,
    pub diagnostics: Diagnostics,
}

/// Maximum-likelihood density matrix for `data`.
///
/// On [`Error::NonConvergence`] the best point found is attached to the error.
pub fn mle_reconstruct(data: &TomographyData, opts: &MleOptions) -> Result<Reconstruction> {
    let dual = dual_basis(data.projectors())?;
    let linear = linear_inversion(data, &dual)?;
    let start = linalg::clip_to_density(&linear.matrix, opts.psd_floor);
    let start = TriangularParam::from_density(&start)
        .or_else(|_| TriangularParam::from_density(&linalg::clip_to_density(&start, 1e-3)))?;

    let objective = |x: &[f64]| {
        let p = TriangularParam::new(x.try_into().expect("16 parameters"));
        -log_likelihood(&p, data)
    };

    let (x, evaluations, restarts, converged) = match opts.optimizer {
        OptimizerKind::Simplex => {
            let mut x = start.t.to_vec();
            let mut fx = objective(&x);
            let mut evaluations = 1;
            let mut outcome = None;
            for restart in 0..=opts.max_restarts {
                let r = nelder_mead::minimize(objective, &x, &opts.simplex);
                evaluations += r.evaluations;
                let improvement = fx - r.f;
                if r.f < fx {
                    x = r.x;
                    fx = r.f;
                }
                // A converged run that cannot improve on its own starting
                // point confirms the optimum.
                let tol = (opts.simplex.rel_tol * fx.abs()).max(opts.likelihood_tol);
                if restart > 0 && r.converged && improvement <= tol {
                    outcome = Some(restart);
                    break;
                }
            }
            match outcome {
                Some(restarts) => (x, evaluations, restarts, true),
                None => (x, evaluations, opts.max_restarts, false),
            }
        }
        OptimizerKind::Annealing => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let r = annealing::minimize(objective, &start.t, &opts.annealing, &mut rng);
            (r.x, r.evaluations, 0, true)
        }
    };

    let found = TriangularParam::from_slice(&x)?;
    let search_trace = found.norm_sqr();
    // The likelihood is exactly maximised along T → cT at Tr(T†T) = 1.
    let param = found.scaled(search_trace.sqrt().recip());
    let rho = rho_from_t(&param)?;
    let diagnostics = Diagnostics {
        final_log_likelihood: log_likelihood(&param, data),
        iterations: evaluations,
        optimizer: opts.optimizer,
        restarts,
        trace_before_normalization: param.norm_sqr(),
        search_trace,
        seed: opts.seed,
    };
    let rec = Reconstruction {
        rho,
        param,
        linear,
        diagnostics,
    };
    if converged {
        Ok(rec)
    } else {
        Err(Error::NonConvergence {
            restarts,
            best: Box::new(rec),
        })
    }
}
