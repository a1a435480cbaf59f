//! Self-similar profiles `r ↦ (s, s_r, σ)` with `r = a·t^{−1/2}`.
//!
//! The system is the three-state profile equation with the drift
//! coefficient `c` replaced by `c − ε r²/2`, where `ε = +1` in the
//! horizontal cones and `ε = −1` in the vertical ones. Solutions through
//! the cross conserve `r²(s_r² + (σ − 2μ̂Γ/r)²) = H(s)` with `μ̂ = εμ_eff`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odeint::{integrate, Event, IntegrationConfig, Termination, Trajectory};
use crate::profile::{profile_rhs, ConeFamily, ProfileState};
use crate::regimes::WaveParameters;
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::seed::{seed_selfsimilar, SeedSpec};
use crate::surface::SurfaceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarState<T> {
    pub r: T,
    pub s: T,
    pub s_r: T,
    pub sigma: T,
}

/// Sign of the `r²/2` drift term for a cone family.
pub fn drift_sign<T: Real>(family: ConeFamily) -> T {
    match family {
        ConeFamily::Horizontal => T::one(),
        ConeFamily::Vertical => -T::one(),
    }
}

/// Right-hand side with an explicit drift sign `eps`; `eps = 0` is the
/// hyperbolic three-state system.
pub fn similarity_rhs<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    st: &SelfSimilarState<T>,
    eps: T,
) -> Result<SelfSimilarState<T>> {
    let c_eff = params.c - eps * st.r * st.r * lit(0.5);
    let p = WaveParameters { c: c_eff, ..*params };
    let d = profile_rhs(surface, &p, &ProfileState { a: st.r, s: st.s, s_a: st.s_r, sigma: st.sigma })?;
    Ok(SelfSimilarState { r: T::one(), s: d.ds, s_r: d.ds_a, sigma: d.dsigma })
}

/// Derivatives of `(s, s_r, σ)` in the cones of `family`; `params` are the
/// horizontal-cone parameters.
pub fn selfsim_rhs<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    family: ConeFamily,
    st: &SelfSimilarState<T>,
) -> Result<SelfSimilarState<T>> {
    similarity_rhs(surface, &family.params(params), st, drift_sign(family))
}

/// `r²(s_r² + (σ − 2μ̂Γ/r)²) − H(s)` relative to `1 + |H(s)|`.
fn invariant_residual<T: Real>(
    surface: &SurfaceProfile<T>,
    hp: &WaveParameters<T>,
    st: &SelfSimilarState<T>,
) -> T {
    let gam = surface.gamma(st.s);
    let h = surface.cap_h(hp, st.s);
    let tang = st.sigma - lit::<T>(2.0) * hp.mu * gam / st.r;
    let lhs = st.r * st.r * (st.s_r * st.s_r + tang * tang);
    (lhs - h).abs() / (T::one() + h.abs())
}

#[derive(Debug, Clone)]
pub struct SelfSimilarTrajectory<T: Real> {
    surface: SurfaceProfile<T>,
    params: WaveParameters<T>,
    family: ConeFamily,
    spec: SeedSpec<T>,
    path: Trajectory<T, 3>,
    h_params: WaveParameters<T>,
    invariant: T,
}

impl<T: Real> SelfSimilarTrajectory<T> {
    pub fn surface(&self) -> &SurfaceProfile<T> {
        &self.surface
    }

    pub fn params(&self) -> &WaveParameters<T> {
        &self.params
    }

    pub fn family(&self) -> ConeFamily {
        self.family
    }

    pub fn spec(&self) -> &SeedSpec<T> {
        &self.spec
    }

    /// Parameters whose `H` is conserved along this trajectory.
    pub fn invariant_params(&self) -> &WaveParameters<T> {
        &self.h_params
    }

    pub fn termination(&self) -> &Termination {
        self.path.termination()
    }

    pub fn r_start(&self) -> T {
        self.path.t_start()
    }

    pub fn r_end(&self) -> T {
        self.path.t_end()
    }

    pub fn knots(&self) -> Vec<SelfSimilarState<T>> {
        self.path.times().zip(self.path.states()).map(|(r, y)| state(r, y)).collect()
    }

    /// Dense-output state; below the seed radius the seed law is used.
    pub fn state_at(&self, r: T) -> Option<SelfSimilarState<T>> {
        if r > T::zero() && r < self.r_start() {
            let kappa = self.params.kappa()?;
            let q0 = self.spec.q0;
            let s = q0 * r.powf(kappa);
            let sigma = -self.params.c * self.surface.f_over_gamma(s).ok()? / r;
            return Some(SelfSimilarState { r, s, s_r: kappa * q0 * r.powf(kappa - T::one()), sigma });
        }
        self.path.eval(r).map(|y| state(r, &y))
    }

    /// Invariant residual at one state.
    pub fn h_residual(&self, st: &SelfSimilarState<T>) -> T {
        invariant_residual(&self.surface, &self.h_params, st)
    }

    /// Maximum invariant residual over knots and step midpoints.
    pub fn max_h_residual(&self) -> T {
        self.invariant
    }
}

fn state<T: Real>(r: T, y: &[T; 3]) -> SelfSimilarState<T> {
    SelfSimilarState { r, s: y[0], s_r: y[1], sigma: y[2] }
}

/// Integrates the self-similar profile from the seed to `r_max`.
pub fn solve_selfsimilar<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    family: ConeFamily,
    spec: &SeedSpec<T>,
    r_max: T,
    cfg: &IntegrationConfig<T>,
) -> Result<SelfSimilarTrajectory<T>> {
    let eff = family.params(params);
    let eps = drift_sign::<T>(family);
    let seed = seed_selfsimilar(surface, &eff, spec)?;
    if !(r_max > seed.r) || !r_max.is_finite() {
        return Err(Error::Config(format!("r_max = {r_max} must exceed the seed radius {}", seed.r)));
    }
    let rhs = |r: T, y: &[T; 3]| match similarity_rhs(surface, &eff, &state(r, y), eps) {
        Ok(d) => [d.s, d.s_r, d.sigma],
        Err(_) => [T::nan(); 3],
    };
    let s0 = surface.s0();
    let mut events = Vec::new();
    if surface.is_compact() {
        events.push(Event::new("pole_contact", true, move |_, y: &[T; 3]| s0 - y[0].abs()));
    }
    let path = integrate(rhs, [seed.s, seed.s_r, seed.sigma], (seed.r, r_max), cfg, &events)?;
    match path.termination() {
        Termination::ReachedEnd => {}
        other => {
            return Err(Error::Integration(format!("self-similar run stopped at r = {}: {other}", path.t_end())))
        }
    }
    let h_params = WaveParameters { mu: eps * eff.mu, ..eff };
    let mut out = SelfSimilarTrajectory {
        surface: surface.clone(),
        params: *params,
        family,
        spec: *spec,
        path,
        h_params,
        invariant: T::zero(),
    };
    out.invariant = max_invariant(&out);
    Ok(out)
}

fn max_invariant<T: Real>(traj: &SelfSimilarTrajectory<T>) -> T {
    let mut worst = T::zero();
    let knots = traj.knots();
    for (i, k) in knots.iter().enumerate() {
        worst = worst.max(traj.h_residual(k));
        if let Some(next) = knots.get(i + 1) {
            if let Some(mid) = traj.state_at((k.r + next.r) * lit(0.5)) {
                worst = worst.max(traj.h_residual(&mid));
            }
        }
    }
    worst
}

/// Maximum invariant residual over the trajectory.
pub fn check_h_invariant<T: Real>(traj: &SelfSimilarTrajectory<T>) -> T {
    traj.max_h_residual()
}

/// Anything that can report `s(r)` on `[r_start, r_end]`.
pub trait RadialSampler<T> {
    fn r_range(&self) -> (T, T);
    fn s_at(&self, r: T) -> Option<T>;
}

impl<T: Real> RadialSampler<T> for SelfSimilarTrajectory<T> {
    fn r_range(&self) -> (T, T) {
        (self.r_start(), self.r_end())
    }

    fn s_at(&self, r: T) -> Option<T> {
        self.state_at(r).map(|s| s.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SStar<T> {
    pub s_star: T,
    /// Fitted exponent of `|s − s★|`.
    pub rate: T,
}

const TAIL_SAMPLES: usize = 4000;
const RATE_BLOCKS: usize = 24;

/// Limit `s★` as the mean over `[0.8 r_max, r_max]` and the decay exponent
/// of the per-block maximum of `|s − s★|` over the preceding decade.
pub fn estimate_s_star<T: Real>(sampler: &impl RadialSampler<T>) -> Result<SStar<T>> {
    let (r0, r_max) = sampler.r_range();
    if r_max < lit(50.0) {
        return Err(Error::Undetermined(format!("tail extraction needs r_max ≥ 50, got {r_max}")));
    }
    let lo = r_max * lit(0.8);
    let mut sum = T::zero();
    let n = TAIL_SAMPLES;
    for i in 0..=n {
        let r = lo + (r_max - lo) * from_usize::<T>(i) / from_usize(n);
        let s = sampler.s_at(r).ok_or_else(|| Error::Undetermined("tail sample outside trajectory".into()))?;
        let w: T = if i == 0 || i == n { lit(0.5) } else { T::one() };
        sum = sum + w * s;
    }
    let s_star = sum / from_usize(n);

    let dec_lo = (lo * lit(0.1)).max(r0);
    let ratio = (lo / dec_lo).ln();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in 0..RATE_BLOCKS {
        let b_lo = dec_lo * (ratio * from_usize::<T>(b) / from_usize(RATE_BLOCKS)).exp();
        let b_hi = dec_lo * (ratio * from_usize::<T>(b + 1) / from_usize(RATE_BLOCKS)).exp();
        let m = 200;
        let mut peak = T::zero();
        for i in 0..=m {
            let r = b_lo + (b_hi - b_lo) * from_usize::<T>(i) / from_usize(m);
            if let Some(s) = sampler.s_at(r) {
                peak = peak.max((s - s_star).abs());
            }
        }
        if peak > T::zero() {
            xs.push(((b_lo * b_hi).sqrt()).ln());
            ys.push(peak.ln());
        }
    }
    if xs.len() < RATE_BLOCKS / 2 {
        return Ok(SStar { s_star, rate: T::nan() });
    }
    let (rate, _) = crate::scalar::linear_fit(&xs, &ys)
        .ok_or_else(|| Error::Undetermined("rate regression is ill-conditioned".into()))?;
    Ok(SStar { s_star, rate })
}

/// `c² < −4(bk + k²)` and `2μc − bk + k²F(s₀) < 0` on a compact target.
pub fn interior_star_condition<T: Real>(surface: &SurfaceProfile<T>, params: &WaveParameters<T>) -> Result<bool> {
    if !surface.is_compact() {
        return Err(Error::Domain("the interior condition needs a compact target".into()));
    }
    let p = params;
    let case_one = p.c * p.c < lit::<T>(-4.0) * p.m();
    Ok(case_one && star_condition_value(surface, p) < T::zero())
}

/// `2μc − bk + k²F(s₀)`.
pub fn star_condition_value<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>) -> T {
    let f0 = surface.f_at_pole();
    lit::<T>(2.0) * p.mu * p.c - p.b * p.k + p.k * p.k * f0
}

/// JSON-friendly summary of a self-similar run.
#[derive(Debug, Clone, Serialize)]
pub struct SelfSimilarSummary {
    pub s_star: Option<f64>,
    pub rate: Option<f64>,
    pub s_one: Option<f64>,
    pub interior_condition: Option<bool>,
    pub max_h_residual: f64,
}

pub fn summarize<T: Real>(traj: &SelfSimilarTrajectory<T>) -> SelfSimilarSummary {
    let star = estimate_s_star(traj).ok();
    let s_one = traj.surface.s_one(&traj.h_params).ok().map(|v| to_f64(v.value));
    SelfSimilarSummary {
        s_star: star.map(|s| to_f64(s.s_star)),
        rate: star.map(|s| to_f64(s.rate)).filter(|v| v.is_finite()),
        s_one: s_one.filter(|v| v.is_finite()),
        interior_condition: interior_star_condition(&traj.surface, &traj.h_params).ok(),
        max_h_residual: to_f64(traj.max_h_residual()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> (SurfaceProfile<f64>, WaveParameters<f64>) {
        (SurfaceProfile::sphere(), WaveParameters::new(3.0, 1.0, -1.0, -3.0))
    }

    #[test]
    fn trivial_state_is_stationary() {
        let (s, p) = reference();
        let d = selfsim_rhs(&s, &p, ConeFamily::Horizontal, &SelfSimilarState { r: 2.0, s: 0.0, s_r: 0.0, sigma: 0.0 })
            .unwrap();
        assert_eq!((d.s, d.s_r, d.sigma), (0.0, 0.0, 0.0));
    }

    #[test]
    fn zero_drift_is_the_hyperbolic_system() {
        let (s, p) = reference();
        let st = SelfSimilarState { r: 1.7, s: 0.4, s_r: -0.2, sigma: 0.3 };
        let d = similarity_rhs(&s, &p, &st, 0.0).unwrap();
        let e = profile_rhs(&s, &p, &ProfileState { a: 1.7, s: 0.4, s_a: -0.2, sigma: 0.3 }).unwrap();
        assert_eq!((d.s, d.s_r, d.sigma), (e.ds, e.ds_a, e.dsigma));
    }

    #[test]
    fn vertical_variant_flips_drift() {
        let (s, p) = reference();
        let st = SelfSimilarState { r: 1.3, s: 0.4, s_r: 0.1, sigma: 0.2 };
        let h = similarity_rhs(&s, &p, &st, 1.0).unwrap();
        let v = similarity_rhs(&s, &p, &st, -1.0).unwrap();
        let z = similarity_rhs(&s, &p, &st, 0.0).unwrap();
        // σ_r is affine in the drift with slope r·s_r/2
        assert!((h.sigma - z.sigma - 0.5 * 1.3 * 0.1).abs() < 1e-15);
        assert!((v.sigma - z.sigma + 0.5 * 1.3 * 0.1).abs() < 1e-15);
    }

    #[test]
    fn interior_condition_examples() {
        let s = SurfaceProfile::<f64>::sphere();
        assert!(interior_star_condition(&s, &WaveParameters::new(3.0, 1.0, -1.0, -3.0)).unwrap());
        assert!(!interior_star_condition(&s, &WaveParameters::new(1.0, 1.0, -1.0, -3.0)).unwrap());
        assert!(interior_star_condition(&SurfaceProfile::pseudo_sphere(), &WaveParameters::new(3.0, 1.0, -1.0, -3.0))
            .is_err());
    }

    struct Flat(f64);

    impl RadialSampler<f64> for Flat {
        fn r_range(&self) -> (f64, f64) {
            (1.0, 100.0)
        }
        fn s_at(&self, _: f64) -> Option<f64> {
            Some(self.0)
        }
    }

    #[test]
    fn constant_tail() {
        let st = estimate_s_star(&Flat(0.5)).unwrap();
        assert_eq!(st.s_star, 0.5);
        assert!(st.rate.is_nan());
    }

    struct Decay;

    impl RadialSampler<f64> for Decay {
        fn r_range(&self) -> (f64, f64) {
            (1.0, 200.0)
        }
        fn s_at(&self, r: f64) -> Option<f64> {
            Some(0.7 + 3.0 * (0.25 * r * r).sin() / (r * r))
        }
    }

    #[test]
    fn synthetic_inverse_square_tail() {
        let st = estimate_s_star(&Decay).unwrap();
        assert!((st.s_star - 0.7).abs() < 1e-6);
        assert!((st.rate + 2.0).abs() < 0.1, "{}", st.rate);
    }
}
