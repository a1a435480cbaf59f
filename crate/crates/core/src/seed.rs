//! Leading-order seeds on the unstable manifold through `s(0) = 0`.
//!
//! Near the cross the nontrivial solution behaves like `s ≈ q0·a^κ`; the
//! seed places `(s, s_a, σ)` on that law at a small `a_seed` and
//! [`validate_seed`] certifies it by re-seeding closer to the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odeint::IntegrationConfig;
use crate::profile::{solve_profile, ConeFamily, ProfileState, SolveOptions};
use crate::regimes::{classify, RegimeCase, WaveParameters};
use crate::scalar::{lit, Real};
use crate::selfsimilar::SelfSimilarState;
use crate::surface::{SurfaceProfile, SERIES_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec<T> {
    /// Shooting amplitude, `s ≈ q0·a^κ`.
    pub q0: T,
    pub a_seed: T,
    pub consistency_tol: T,
    /// Largest `a_seed` accepted as inside the manifold chart.
    pub validity_radius: T,
}

impl<T: Real> SeedSpec<T> {
    pub fn new(q0: T) -> Self {
        SeedSpec { q0, a_seed: lit(1e-6), consistency_tol: lit(1e-8), validity_radius: lit(1e-2) }
    }

    pub fn with_a_seed(self, a_seed: T) -> Self {
        SeedSpec { a_seed, ..self }
    }
}

/// `κ` for Case I parameters, a regime error otherwise.
pub fn case_one_kappa<T: Real>(params: &WaveParameters<T>) -> Result<T> {
    let report = classify(params)?;
    if report.case != RegimeCase::CaseI {
        return Err(Error::Regime(format!(
            "nontrivial seeds exist only in Case I, parameters are {:?}",
            report.case
        )));
    }
    if params.c == T::zero() {
        return Err(Error::Regime("the equivariant solver requires c ≠ 0".into()));
    }
    Ok(report.kappa)
}

fn check_spec<T: Real>(spec: &SeedSpec<T>, kappa: T) -> Result<T> {
    if !(spec.a_seed > T::zero()) || !spec.q0.is_finite() {
        return Err(Error::Config("a_seed must be positive and q0 finite".into()));
    }
    if spec.a_seed > spec.validity_radius {
        return Err(Error::Config(format!(
            "a_seed = {} exceeds the validity radius {}",
            spec.a_seed, spec.validity_radius
        )));
    }
    let s = spec.q0 * spec.a_seed.powf(kappa);
    if !(s.abs() < lit(SERIES_THRESHOLD)) {
        return Err(Error::Config(format!("seed amplitude |q0·a_seed^κ| = {} is not small", s.abs())));
    }
    Ok(s)
}

/// Seed for the hyperbolic profile, with `σ` from the algebraic identity.
pub fn seed_state<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    spec: &SeedSpec<T>,
) -> Result<ProfileState<T>> {
    let kappa = case_one_kappa(params)?;
    let s = check_spec(spec, kappa)?;
    let a = spec.a_seed;
    let s_a = kappa * spec.q0 * a.powf(kappa - T::one());
    let sigma = -params.c * surface.f_over_gamma(s)? / a;
    Ok(ProfileState { a, s, s_a, sigma })
}

/// Seed for the self-similar profile at `r = a_seed`.
pub fn seed_selfsimilar<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    spec: &SeedSpec<T>,
) -> Result<SelfSimilarState<T>> {
    let p = seed_state(surface, params, spec)?;
    Ok(SelfSimilarState { r: p.a, s: p.s, s_r: p.s_a, sigma: p.sigma })
}

/// Relative discrepancy at `a_match` between runs seeded at `a_seed` and
/// `a_seed/4`.
pub fn validate_seed<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    spec: &SeedSpec<T>,
    a_match: T,
    cfg: &IntegrationConfig<T>,
) -> Result<T> {
    case_one_kappa(params)?;
    if !(a_match > spec.a_seed) {
        return Err(Error::Config("a_match must exceed a_seed".into()));
    }
    if spec.q0 == T::zero() {
        return Ok(T::zero());
    }
    let opts = SolveOptions::new(ConeFamily::Horizontal);
    let coarse = solve_profile(surface, params, spec, a_match, cfg, &opts)?;
    let fine_spec = spec.with_a_seed(spec.a_seed * lit(0.25));
    let fine = solve_profile(surface, params, &fine_spec, a_match, cfg, &opts)?;
    let (x, y) = (coarse.final_state(), fine.final_state());
    let rel = |u: T, v: T| (u - v).abs() / u.abs().max(v.abs()).max(T::min_positive_value());
    Ok(rel(x.s, y.s).max(rel(x.s_a, y.s_a)).max(rel(x.sigma, y.sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> (SurfaceProfile<f64>, WaveParameters<f64>) {
        (SurfaceProfile::sphere(), WaveParameters::new(-1.0, 1.0, 1.0, -3.0))
    }

    #[test]
    fn trivial_seed_is_zero() {
        let (s, p) = reference();
        let st = seed_state(&s, &p, &SeedSpec::new(0.0)).unwrap();
        assert_eq!((st.s, st.s_a, st.sigma), (0.0, 0.0, 0.0));
    }

    #[test]
    fn reference_seed_values() {
        let (s, p) = reference();
        let st = seed_state(&s, &p, &SeedSpec::new(0.1)).unwrap();
        let kappa = 1.75f64.sqrt();
        assert!((st.s / (0.1 * 1e-6f64.powf(kappa)) - 1.0).abs() < 1e-15);
        assert!((st.s - 1.156e-9).abs() < 0.001e-9);
        // σ ≈ −(c/2) q0 a^{κ−1}
        let lead = -0.5 * 0.1 * 1e-6f64.powf(kappa - 1.0);
        assert!((st.sigma / lead - 1.0).abs() < 1e-15);
        assert!((st.a * st.sigma / st.s + 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_case_one_and_bad_specs() {
        let s = SurfaceProfile::<f64>::sphere();
        let p3 = WaveParameters::new(1.0, 1.0, -3.0, -3.0);
        assert!(matches!(seed_state(&s, &p3, &SeedSpec::new(0.1)), Err(Error::Regime(_))));
        let (_, p) = reference();
        assert!(seed_state(&s, &p, &SeedSpec::new(0.1).with_a_seed(0.5)).is_err());
        assert!(seed_state(&s, &p, &SeedSpec::new(1e9)).is_err());
    }
}
