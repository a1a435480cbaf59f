//! Parameter sweeps. Results come back in input order whatever the
//! number of worker threads, so parallel and sequential runs agree exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::odeint::IntegrationConfig;
use crate::profile::{solve_profile, ProfileTrajectory, SolveOptions};
use crate::regimes::WaveParameters;
use crate::scalar::Real;
use crate::seed::SeedSpec;
use crate::surface::SurfaceProfile;

/// Maps `f` over `items` on `jobs` threads (`jobs ≤ 1` runs inline).
pub fn par_map<I, R, F>(items: &[I], jobs: usize, f: F) -> Result<Vec<R>>
where
    I: Sync,
    R: Send,
    F: Fn(&I) -> R + Sync + Send,
{
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// Solves one profile per parameter tuple.
pub fn sweep_profiles<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &[WaveParameters<T>],
    spec: &SeedSpec<T>,
    a_max: T,
    cfg: &IntegrationConfig<T>,
    opts: &SolveOptions<T>,
    jobs: usize,
) -> Result<Vec<Result<ProfileTrajectory<T>>>> {
    par_map(params, jobs, |p| solve_profile(surface, p, spec, a_max, cfg, opts))
}
