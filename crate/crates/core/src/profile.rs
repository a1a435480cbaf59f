//! Hyperbolic-variable standing-wave profiles `a ↦ (s, s_a, σ)`.
//!
//! The primary formulation evolves `(s, s_a)` with `σ = −cF/(aΓ)` slaved
//! algebraically. On compact targets the state switches to the pole chart
//! `s̃ = s₀ − |s|` whenever `|s|` comes within [`SolveOptions::pole_switch`]
//! of `s₀`, so the singular potential is always evaluated in well-conditioned
//! variables. The three-state formulation is kept for cross-checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odeint::{integrate, Event, IntegrationConfig, Termination, Trajectory};
use crate::quad;
use crate::regimes::{vertical_params, WaveParameters};
use crate::scalar::{lit, Real};
use crate::seed::{seed_state, SeedSpec};
use crate::surface::SurfaceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState<T> {
    pub a: T,
    pub s: T,
    pub s_a: T,
    pub sigma: T,
}

/// `d/da` of `(s, s_a, σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDerivative<T> {
    pub ds: T,
    pub ds_a: T,
    pub dsigma: T,
}

/// Which pair of opposite cones a profile is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeFamily {
    Horizontal,
    /// Same equation with `μ ↦ −μ`.
    Vertical,
}

impl ConeFamily {
    pub fn params<T: Real>(self, p: &WaveParameters<T>) -> WaveParameters<T> {
        match self {
            ConeFamily::Horizontal => *p,
            ConeFamily::Vertical => vertical_params(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// `(s, s_a)` with `σ` from the algebraic identity.
    Reduced,
    /// `(s, s_a, σ)` integrated directly.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub family: ConeFamily,
    pub formulation: Formulation,
    /// Stop quietly on blow-up instead of failing.
    pub allow_blowup: bool,
    /// Distance to `±s₀` below which the pole chart is used; the chart is
    /// left again at 1.5 times this distance.
    pub pole_switch: T,
}

impl<T: Real> SolveOptions<T> {
    pub fn new(family: ConeFamily) -> Self {
        SolveOptions { family, formulation: Formulation::Reduced, allow_blowup: false, pole_switch: lit(0.1) }
    }

    pub fn formulation(self, formulation: Formulation) -> Self {
        SolveOptions { formulation, ..self }
    }

    pub fn allow_blowup(self, allow: bool) -> Self {
        SolveOptions { allow_blowup: allow, ..self }
    }
}

/// Coordinates used on one stretch of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Origin,
    /// `s = sign·(s₀ − s̃)` with state `(s̃, s̃_a)`.
    Pole(i8),
}

/// A sample with the surface data needed downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint<T> {
    pub a: T,
    pub s: T,
    pub s_a: T,
    pub sigma: T,
    pub gamma: T,
    pub gamma_s: T,
    pub f: T,
    /// `G(s)`.
    pub g: T,
    /// `s₀ − |s|`, exact in the pole chart; `+∞` on non-compact targets.
    pub pole_distance: T,
}

impl<T: Real> ProfilePoint<T> {
    pub fn state(&self) -> ProfileState<T> {
        ProfileState { a: self.a, s: self.s, s_a: self.s_a, sigma: self.sigma }
    }

    /// `E = a²/2 (s_a² + σ²) + G − μa²F`.
    pub fn energy(&self, mu: T) -> T {
        let a2 = self.a * self.a;
        lit::<T>(0.5) * a2 * (self.s_a * self.s_a + self.sigma * self.sigma) + self.g - mu * a2 * self.f
    }
}

#[derive(Debug, Clone)]
enum Path<T> {
    Reduced(Trajectory<T, 2>),
    Full(Trajectory<T, 3>),
}

#[derive(Debug, Clone)]
struct Segment<T> {
    chart: Chart,
    path: Path<T>,
}

impl<T: Real> Segment<T> {
    fn a_start(&self) -> T {
        match &self.path {
            Path::Reduced(t) => t.t_start(),
            Path::Full(t) => t.t_start(),
        }
    }

    fn a_end(&self) -> T {
        match &self.path {
            Path::Reduced(t) => t.t_end(),
            Path::Full(t) => t.t_end(),
        }
    }

    fn knots(&self) -> Vec<(T, [T; 3])> {
        match &self.path {
            Path::Reduced(t) => t.times().zip(t.states()).map(|(a, y)| (a, [y[0], y[1], T::zero()])).collect(),
            Path::Full(t) => t.times().zip(t.states().iter().copied()).collect(),
        }
    }

    fn eval(&self, a: T) -> Option<[T; 3]> {
        match &self.path {
            Path::Reduced(t) => t.eval(a).map(|y| [y[0], y[1], T::zero()]),
            Path::Full(t) => t.eval(a),
        }
    }
}

/// Summary of the residual monitors of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals<T> {
    /// Max of `|aΓσ + cF| / (1 + |cF|)` over knots and step midpoints.
    pub sigma_identity: T,
    /// Max of `|E(a₂) − E(a₁) + ∫2μaF| / (1 + |E(a₁)|)` over knot pairs
    /// with `a₁` drawn from up to 512 evenly spaced anchor knots.
    pub energy_law: T,
    /// Min of `s₀ − |s|` over knots.
    pub min_pole_distance: T,
}

/// Solution of the profile equation on `[a_seed, a_end]`.
#[derive(Clone)]
pub struct ProfileTrajectory<T: Real> {
    surface: SurfaceProfile<T>,
    params: WaveParameters<T>,
    effective: WaveParameters<T>,
    spec: SeedSpec<T>,
    kappa: T,
    options: SolveOptions<T>,
    segments: Vec<Segment<T>>,
    termination: Termination,
    knots: Vec<ProfilePoint<T>>,
    /// `∫_{a_seed}^{a_i} 2μaF da` at each knot.
    work: Vec<T>,
    residuals: Residuals<T>,
}

/// `G_s − c²G̃`, the derivative of the reduced potential.
fn reduced_force<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, s: T) -> T {
    let tg = surface.tilde_g(s).unwrap_or_else(|_| T::nan());
    surface.cap_g_s(p, s) - p.c * p.c * tg
}

/// `s_aa` of the reduced equation.
pub fn reduced_rhs<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, a: T, s: T, s_a: T) -> T {
    -s_a / a + p.mu * surface.gamma(s) - reduced_force(surface, p, s) / (a * a)
}

/// `s̃_aa` in the pole chart near `+s₀`.
fn pole_rhs<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, a: T, y: &[T; 2]) -> [T; 2] {
    let Ok(fr) = surface.pole_frame(y[0]) else {
        return [T::nan(), T::nan()];
    };
    let k = p.k;
    let g_s = fr.gamma * (k * k * fr.gamma_s + p.b * k - lit::<T>(2.0) * k * k * fr.f);
    let force = g_s - p.c * p.c * fr.tilde_g;
    [y[1], -y[1] / a - p.mu * fr.gamma + force / (a * a)]
}

/// Three-state right-hand side.
pub fn profile_rhs<T: Real>(
    surface: &SurfaceProfile<T>,
    p: &WaveParameters<T>,
    st: &ProfileState<T>,
) -> Result<ProfileDerivative<T>> {
    let ProfileState { a, s, s_a, sigma } = *st;
    if !(a > T::zero()) {
        return Err(Error::Domain("profile equation needs a > 0".into()));
    }
    let (gam, gs, _) = surface.eval(s);
    let ratio = if sigma == T::zero() {
        T::zero()
    } else if gam == T::zero() || surface.at_nontrivial_zero(s) {
        return Err(Error::Domain(format!("Γ(s) = 0 at s = {s} with σ ≠ 0")));
    } else {
        gs * sigma / gam
    };
    let c = p.c;
    Ok(ProfileDerivative {
        ds: s_a,
        ds_a: ratio * sigma - s_a / a - surface.cap_g_s(p, s) / (a * a) + p.mu * gam + c / a * sigma,
        dsigma: -ratio * s_a - sigma / a - c / a * s_a,
    })
}

/// `σ` forced by the identity `aΓσ + cF = 0`.
pub fn slaved_sigma<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, a: T, s: T) -> T {
    -p.c * surface.f_over_gamma(s).unwrap_or_else(|_| T::nan()) / a
}

/// `|aΓσ + cF| / (1 + |cF|)` at one state.
pub fn sigma_residual<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, st: &ProfileState<T>) -> T {
    let (gam, _, f) = surface.eval(st.s);
    let cf = p.c * f;
    (st.a * gam * st.sigma + cf).abs() / (T::one() + cf.abs())
}

pub fn energy<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, st: &ProfileState<T>) -> T {
    let a2 = st.a * st.a;
    lit::<T>(0.5) * a2 * (st.s_a * st.s_a + st.sigma * st.sigma) + surface.cap_g(p, st.s)
        - p.mu * a2 * surface.cap_f(st.s)
}

fn point<T: Real>(
    surface: &SurfaceProfile<T>,
    p: &WaveParameters<T>,
    chart: Chart,
    formulation: Formulation,
    a: T,
    y: [T; 3],
) -> ProfilePoint<T> {
    let s0 = surface.s0();
    match chart {
        Chart::Origin => {
            let s = y[0];
            let (gamma, gamma_s, f) = surface.eval(s);
            let sigma = match formulation {
                Formulation::Reduced => slaved_sigma(surface, p, a, s),
                Formulation::Full => y[2],
            };
            let pole_distance = if surface.is_compact() { s0 - s.abs() } else { T::infinity() };
            ProfilePoint { a, s, s_a: y[1], sigma, gamma, gamma_s, f, g: surface.cap_g(p, s), pole_distance }
        }
        Chart::Pole(sign) => {
            let sg: T = lit(f64::from(sign));
            let (st, st_a) = (y[0], y[1]);
            let nan = T::nan();
            let fr = surface.pole_frame(st).ok();
            let (gamma, gamma_s, f) = fr.map_or((nan, nan, nan), |fr| (sg * fr.gamma, fr.gamma_s, fr.f));
            let k = p.k;
            let g = lit::<T>(0.5) * k * k * gamma * gamma + p.b * k * f - k * k * f * f;
            ProfilePoint {
                a,
                s: sg * (s0 - st),
                s_a: -sg * st_a,
                sigma: -p.c * f / (a * gamma),
                gamma,
                gamma_s,
                f,
                g,
                pole_distance: st,
            }
        }
    }
}

const ENTER_POLE: &str = "enter_pole";
const LEAVE_POLE: &str = "leave_pole";
const POLE_CONTACT: &str = "pole_contact";
const MAX_SEGMENTS: usize = 100_000;

/// Integrates the profile from the seed to `a_max`.
pub fn solve_profile<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    spec: &SeedSpec<T>,
    a_max: T,
    cfg: &IntegrationConfig<T>,
    opts: &SolveOptions<T>,
) -> Result<ProfileTrajectory<T>> {
    let eff = opts.family.params(params);
    let seed = seed_state(surface, &eff, spec)?;
    if !(a_max > seed.a) || !a_max.is_finite() {
        return Err(Error::Config(format!("a_max = {a_max} must exceed a_seed = {}", seed.a)));
    }
    let (segments, termination) = match opts.formulation {
        Formulation::Reduced => run_reduced(surface, &eff, &seed, a_max, cfg, opts)?,
        Formulation::Full => run_full(surface, &eff, &seed, a_max, cfg, opts)?,
    };
    let kappa = eff.kappa().unwrap_or_else(T::zero);
    Ok(ProfileTrajectory::assemble(surface.clone(), *params, eff, *spec, kappa, *opts, segments, termination))
}

fn stop_reason<T: Real>(term: &Termination, a: T, allow_blowup: bool) -> Result<bool> {
    match term {
        Termination::ReachedEnd => Ok(true),
        Termination::BlowUp if allow_blowup => Ok(true),
        Termination::BlowUp => Err(Error::Integration(format!("profile blew up near a = {a}"))),
        Termination::StepLimit => Err(Error::Integration(format!("step limit reached near a = {a}"))),
        Termination::Event(name) if name == POLE_CONTACT => Err(Error::Integration(format!(
            "profile reached the opposite pole at a = {a}; c ≠ 0 forbids this, so the integration is inaccurate"
        ))),
        Termination::Event(_) => Ok(false),
    }
}

type Run<T> = (Vec<Segment<T>>, Termination);

fn run_reduced<T: Real>(
    surface: &SurfaceProfile<T>,
    p: &WaveParameters<T>,
    seed: &ProfileState<T>,
    a_max: T,
    cfg: &IntegrationConfig<T>,
    opts: &SolveOptions<T>,
) -> Result<Run<T>> {
    let s0 = surface.s0();
    let compact = surface.is_compact();
    let enter = opts.pole_switch;
    let leave = enter * lit(1.5);
    let mut chart = Chart::Origin;
    let mut a = seed.a;
    let mut y = [seed.s, seed.s_a];
    let mut segments = Vec::new();
    loop {
        let traj = match chart {
            Chart::Origin => {
                let mut events = Vec::new();
                if compact {
                    events.push(Event::new(ENTER_POLE, true, move |_, y: &[T; 2]| s0 - y[0].abs() - enter));
                }
                integrate(|a, y: &[T; 2]| [y[1], reduced_rhs(surface, p, a, y[0], y[1])], y, (a, a_max), cfg, &events)?
            }
            Chart::Pole(_) => {
                let events = [
                    Event::new(LEAVE_POLE, true, move |_, y: &[T; 2]| y[0] - leave),
                    Event::new(POLE_CONTACT, true, |_, y: &[T; 2]| y[0]),
                ];
                integrate(|a, y: &[T; 2]| pole_rhs(surface, p, a, y), y, (a, a_max), cfg, &events)?
            }
        };
        let term = traj.termination().clone();
        let (a_end, y_end) = traj.last();
        segments.push(Segment { chart, path: Path::Reduced(traj) });
        if stop_reason(&term, a_end, opts.allow_blowup)? || a_end >= a_max {
            return Ok((segments, term));
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Integration("too many chart switches".into()));
        }
        a = a_end;
        match chart {
            Chart::Origin => {
                let sign: i8 = if y_end[0] < T::zero() { -1 } else { 1 };
                let sg: T = lit(f64::from(sign));
                y = [s0 - sg * y_end[0], -sg * y_end[1]];
                chart = Chart::Pole(sign);
            }
            Chart::Pole(sign) => {
                let sg: T = lit(f64::from(sign));
                y = [sg * (s0 - y_end[0]), -sg * y_end[1]];
                chart = Chart::Origin;
            }
        }
    }
}

fn run_full<T: Real>(
    surface: &SurfaceProfile<T>,
    p: &WaveParameters<T>,
    seed: &ProfileState<T>,
    a_max: T,
    cfg: &IntegrationConfig<T>,
    opts: &SolveOptions<T>,
) -> Result<Run<T>> {
    let s0 = surface.s0();
    let mut events = Vec::new();
    if surface.is_compact() {
        events.push(Event::new(POLE_CONTACT, true, move |_, y: &[T; 3]| s0 - y[0].abs()));
    }
    let rhs = |a: T, y: &[T; 3]| {
        let st = ProfileState { a, s: y[0], s_a: y[1], sigma: y[2] };
        match profile_rhs(surface, p, &st) {
            Ok(d) => [d.ds, d.ds_a, d.dsigma],
            Err(_) => [T::nan(); 3],
        }
    };
    let traj = integrate(rhs, [seed.s, seed.s_a, seed.sigma], (seed.a, a_max), cfg, &events)?;
    let term = traj.termination().clone();
    stop_reason(&term, traj.t_end(), opts.allow_blowup)?;
    Ok((vec![Segment { chart: Chart::Origin, path: Path::Full(traj) }], term))
}

impl<T: Real> ProfileTrajectory<T> {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        surface: SurfaceProfile<T>,
        params: WaveParameters<T>,
        effective: WaveParameters<T>,
        spec: SeedSpec<T>,
        kappa: T,
        options: SolveOptions<T>,
        segments: Vec<Segment<T>>,
        termination: Termination,
    ) -> Self {
        let mut out = ProfileTrajectory {
            surface,
            params,
            effective,
            spec,
            kappa,
            options,
            segments,
            termination,
            knots: Vec::new(),
            work: Vec::new(),
            residuals: Residuals { sigma_identity: T::zero(), energy_law: T::zero(), min_pole_distance: T::zero() },
        };
        out.build_knots();
        out.residuals = out.compute_residuals();
        out
    }

    fn make_point(&self, chart: Chart, a: T, y: [T; 3]) -> ProfilePoint<T> {
        point(&self.surface, &self.effective, chart, self.options.formulation, a, y)
    }

    fn build_knots(&mut self) {
        let mut knots: Vec<ProfilePoint<T>> = Vec::new();
        let mut work: Vec<T> = Vec::new();
        let two_mu = lit::<T>(2.0) * self.effective.mu;
        for seg in &self.segments {
            let pts = seg.knots();
            for (i, (a, y)) in pts.iter().enumerate() {
                let pt = self.make_point(seg.chart, *a, *y);
                if i == 0 {
                    // shared knot at a chart switch
                    if knots.last().is_some_and(|k| k.a == *a) {
                        continue;
                    }
                    knots.push(pt);
                    work.push(T::zero());
                    continue;
                }
                let a_prev = pts[i - 1].0;
                let mut f = |x: T| {
                    let y = seg.eval(x).unwrap_or([T::nan(); 3]);
                    two_mu * x * self.make_point(seg.chart, x, y).f
                };
                let inc = quad::kronrod15(&mut f, a_prev, *a);
                let prev = *work.last().unwrap_or(&T::zero());
                knots.push(pt);
                work.push(prev + inc);
            }
        }
        self.knots = knots;
        self.work = work;
    }

    fn compute_residuals(&self) -> Residuals<T> {
        let p = &self.effective;
        let mut sig = T::zero();
        let mut check = |pt: &ProfilePoint<T>| {
            let cf = p.c * pt.f;
            let r = (pt.a * pt.gamma * pt.sigma + cf).abs() / (T::one() + cf.abs());
            sig = if r.is_nan() { T::nan() } else { sig.max(r) };
        };
        for w in self.knots.windows(2) {
            check(&w[0]);
            if let Some(mid) = self.point_at((w[0].a + w[1].a) * lit(0.5)) {
                check(&mid);
            }
        }
        if let Some(last) = self.knots.last() {
            check(last);
        }
        let energies: Vec<T> = self.knots.iter().map(|k| k.energy(p.mu)).collect();
        let d: Vec<T> = energies.iter().zip(&self.work).map(|(e, w)| *e + *w).collect();
        let n = d.len();
        let stride = (n / 512).max(1);
        let mut law = T::zero();
        for j in (0..n).step_by(stride) {
            let scale = T::one() + energies[j].abs();
            for i in j + 1..n {
                law = law.max((d[i] - d[j]).abs() / scale);
            }
        }
        let min_pole = self.knots.iter().fold(T::infinity(), |m, k| m.min(k.pole_distance));
        Residuals { sigma_identity: sig, energy_law: law, min_pole_distance: min_pole }
    }

    pub fn surface(&self) -> &SurfaceProfile<T> {
        &self.surface
    }

    /// Parameters as given, before any cone-family flip.
    pub fn params(&self) -> &WaveParameters<T> {
        &self.params
    }

    /// Parameters of the equation actually integrated.
    pub fn effective_params(&self) -> &WaveParameters<T> {
        &self.effective
    }

    pub fn spec(&self) -> &SeedSpec<T> {
        &self.spec
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn options(&self) -> &SolveOptions<T> {
        &self.options
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn residuals(&self) -> &Residuals<T> {
        &self.residuals
    }

    /// One sample per accepted step, chart switches merged.
    pub fn knots(&self) -> &[ProfilePoint<T>] {
        &self.knots
    }

    pub fn charts(&self) -> Vec<(Chart, T, T)> {
        self.segments.iter().map(|s| (s.chart, s.a_start(), s.a_end())).collect()
    }

    pub fn a_start(&self) -> T {
        self.knots[0].a
    }

    pub fn a_end(&self) -> T {
        self.knots[self.knots.len() - 1].a
    }

    pub fn final_state(&self) -> ProfileState<T> {
        self.knots[self.knots.len() - 1].state()
    }

    /// Dense-output sample; below `a_seed` the seed law is used.
    pub fn point_at(&self, a: T) -> Option<ProfilePoint<T>> {
        if !(a > T::zero()) || a > self.a_end() {
            return None;
        }
        if a < self.a_start() {
            let (q0, kappa) = (self.spec.q0, self.kappa);
            let s = q0 * a.powf(kappa);
            let s_a = kappa * q0 * a.powf(kappa - T::one());
            return Some(self.make_point(Chart::Origin, a, [s, s_a, slaved_sigma(&self.surface, &self.effective, a, s)]));
        }
        let idx = self.segments.partition_point(|s| s.a_end() < a).min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        seg.eval(a).map(|y| self.make_point(seg.chart, a, y))
    }

    pub fn state_at(&self, a: T) -> Option<ProfileState<T>> {
        self.point_at(a).map(|p| p.state())
    }

    pub fn energy_at(&self, a: T) -> Option<T> {
        self.point_at(a).map(|p| p.energy(self.effective.mu))
    }

    /// `∫_{a_seed}^{a} 2μa'F da'` by quadrature of the dense output.
    pub fn energy_work(&self, a: T) -> Option<T> {
        if !(a >= self.a_start() && a <= self.a_end()) {
            return None;
        }
        let i = self.knots.partition_point(|k| k.a <= a).saturating_sub(1);
        let two_mu = lit::<T>(2.0) * self.effective.mu;
        let a_i = self.knots[i].a;
        if a == a_i {
            return Some(self.work[i]);
        }
        let mut f = |x: T| two_mu * x * self.point_at(x).map_or(T::nan(), |p| p.f);
        Some(self.work[i] + quad::kronrod15(&mut f, a_i, a))
    }

    /// `|E(a₂) − E(a₁) + ∫_{a₁}^{a₂} 2μaF da| / (1 + |E(a₁)|)`.
    pub fn energy_law_defect(&self, a1: T, a2: T) -> Option<T> {
        let e1 = self.energy_at(a1)?;
        let e2 = self.energy_at(a2)?;
        let w = self.energy_work(a2)? - self.energy_work(a1)?;
        Some((e2 - e1 + w).abs() / (T::one() + e1.abs()))
    }
}

/// Maximum σ-identity residual over knots and step midpoints.
pub fn check_sigma_identity<T: Real>(traj: &ProfileTrajectory<T>) -> T {
    traj.residuals().sigma_identity
}

/// Output of [`radial_probe`].
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport<T> {
    /// Jacobian of the `c = 0` log-time system `(s, ρ = a s_a, a)` at the origin.
    pub jacobian: [[T; 3]; 3],
    pub spectrum: [T; 3],
    pub unstable_direction: [T; 3],
    /// `Q(1) = s_a(1)² + c²F²/Γ²` at the probe start.
    pub q_start: T,
    /// `min Q / Q(1)` over `[a_min, 1]` on the backward run, when `c ≠ 0` and the data are nontrivial.
    pub q_min_ratio: Option<T>,
}

/// Log-time radial system with `c = 0`: `(s_τ, ρ_τ, a_τ) = (ρ, μa²Γ, a)`.
fn radial_tau_rhs<T: Real>(surface: &SurfaceProfile<T>, mu: T, y: [T; 3]) -> [T; 3] {
    let [s, rho, a] = y;
    [rho, mu * a * a * surface.gamma(s), a]
}

/// Linear analysis at the cross for `k = 0` and the backward `Q`-test from
/// data `(s, s_a)` prescribed at `a = 1`.
pub fn radial_probe<T: Real>(
    surface: &SurfaceProfile<T>,
    params: &WaveParameters<T>,
    s1: T,
    s_a1: T,
    a_min: T,
    cfg: &IntegrationConfig<T>,
) -> Result<ProbeReport<T>> {
    if params.k != T::zero() {
        return Err(Error::Regime("the radial probe needs k = 0".into()));
    }
    if !(a_min > T::zero() && a_min < T::one()) {
        return Err(Error::Config("a_min must lie in (0, 1)".into()));
    }
    let h: T = lit(1e-6);
    let mut jac = [[T::zero(); 3]; 3];
    for j in 0..3 {
        let mut up = [T::zero(); 3];
        let mut dn = [T::zero(); 3];
        up[j] = h;
        dn[j] = -h;
        let (fu, fd) = (radial_tau_rhs(surface, params.mu, up), radial_tau_rhs(surface, params.mu, dn));
        for i in 0..3 {
            jac[i][j] = (fu[i] - fd[i]) / (h + h);
        }
    }
    let lower_zero = jac[1][0] == T::zero() && jac[2][0] == T::zero() && jac[2][1] == T::zero();
    if !lower_zero {
        return Err(Error::Domain("radial Jacobian is not triangular".into()));
    }
    let spectrum = [jac[0][0], jac[1][1], jac[2][2]];
    let unstable_direction = [T::zero(), T::zero(), T::one()];

    let c = params.c;
    let q = |a: T, s: T, s_a: T| {
        let fog = surface.f_over_gamma(s).unwrap_or_else(|_| T::nan());
        a * a * s_a * s_a + c * c * fog * fog
    };
    let q_start = q(T::one(), s1, s_a1);
    let q_min_ratio = if c != T::zero() && q_start > T::zero() {
        let mut run_cfg = *cfg;
        run_cfg.log_time = true;
        let traj = integrate(
            |a, y: &[T; 2]| [y[1], reduced_rhs(surface, params, a, y[0], y[1])],
            [s1, s_a1],
            (T::one(), a_min),
            &run_cfg,
            &[],
        )?;
        if traj.termination() != &Termination::ReachedEnd {
            return Err(Error::Integration(format!("radial probe stopped: {}", traj.termination())));
        }
        let mut m = T::infinity();
        for (a, y) in traj.times().zip(traj.states()) {
            m = m.min(q(a, y[0], y[1]) / q_start);
        }
        Some(m)
    } else {
        None
    };
    Ok(ProbeReport { jacobian: jac, spectrum, unstable_direction, q_start, q_min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> (SurfaceProfile<f64>, WaveParameters<f64>) {
        (SurfaceProfile::sphere(), WaveParameters::new(-1.0, 1.0, 1.0, -3.0))
    }

    #[test]
    fn trivial_state_is_stationary() {
        let (s, p) = reference();
        let d = profile_rhs(&s, &p, &ProfileState { a: 1.0, s: 0.0, s_a: 0.0, sigma: 0.0 }).unwrap();
        assert_eq!((d.ds, d.ds_a, d.dsigma), (0.0, 0.0, 0.0));
        assert_eq!(reduced_rhs(&s, &p, 1.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn small_s_linearization() {
        let (s, p) = reference();
        let (a, x, xa) = (0.7, 1e-7, 3e-7);
        let lin = -xa / a + p.mu * x - (p.m() + p.c * p.c / 4.0) * x / (a * a);
        assert!((reduced_rhs(&s, &p, a, x, xa) / lin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formulations_agree_on_slaved_states() {
        let (s, p) = reference();
        for &(a, x, xa) in &[(0.3, 0.2, 0.5), (2.0, -1.1, 0.1), (5.0, 2.5, -0.3)] {
            let st = ProfileState { a, s: x, s_a: xa, sigma: slaved_sigma(&s, &p, a, x) };
            let full = profile_rhs(&s, &p, &st).unwrap().ds_a;
            let red = reduced_rhs(&s, &p, a, x, xa);
            assert!((full - red).abs() <= 1e-12 * (1.0 + red.abs()), "{full} {red}");
        }
    }

    #[test]
    fn full_rhs_rejects_pole_with_sigma() {
        let (s, p) = reference();
        let st = ProfileState { a: 1.0, s: std::f64::consts::PI, s_a: 0.0, sigma: 0.1 };
        assert!(matches!(profile_rhs(&s, &p, &st), Err(Error::Domain(_))));
    }

    #[test]
    fn pole_chart_matches_origin_equation() {
        let s = SurfaceProfile::<f64>::sphere();
        let p = WaveParameters::new(1.0, 1.0, 1.0, -3.0);
        let (a, st, st_a) = (3.0, 0.3, 0.2);
        let x = std::f64::consts::PI - st;
        let direct = reduced_rhs(&s, &p, a, x, -st_a);
        let chart = pole_rhs(&s, &p, a, &[st, st_a]);
        assert!((chart[1] + direct).abs() < 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn corrupted_sigma_is_detected() {
        let (s, p) = reference();
        let (a, x) = (2.0, 0.8);
        let sigma = slaved_sigma(&s, &p, a, x);
        let good = sigma_residual(&s, &p, &ProfileState { a, s: x, s_a: 0.0, sigma });
        let bad = sigma_residual(&s, &p, &ProfileState { a, s: x, s_a: 0.0, sigma: sigma * 1.01 });
        assert!(good < 1e-15);
        assert!(bad > 1e-3 && bad < 1e-2);
    }

    #[test]
    fn trivial_profile_is_zero() {
        let (s, p) = reference();
        let cfg = IntegrationConfig::default();
        let t = solve_profile(&s, &p, &SeedSpec::new(0.0), 10.0, &cfg, &SolveOptions::new(ConeFamily::Horizontal))
            .unwrap();
        assert!(t.knots().iter().all(|k| k.s == 0.0 && k.s_a == 0.0 && k.sigma == 0.0));
        assert_eq!(t.residuals().sigma_identity, 0.0);
        assert_eq!(t.residuals().energy_law, 0.0);
        assert_eq!(energy(&s, &p, &t.final_state()), 0.0);
    }

    #[test]
    fn radial_spectrum_is_exact() {
        let s = SurfaceProfile::<f64>::sphere();
        let p = WaveParameters::new(-1.0, 0.0, 1.0, 0.0);
        let r = radial_probe(&s, &p, 0.0, 0.0, 1e-6, &IntegrationConfig::default()).unwrap();
        assert_eq!(r.spectrum, [0.0, 0.0, 1.0]);
        assert_eq!(r.q_start, 0.0);
        assert!(r.q_min_ratio.is_none());
        assert!(radial_probe(&s, &WaveParameters::new(-1.0, 1.0, 1.0, 0.0), 0.0, 0.0, 1e-6, &IntegrationConfig::default()).is_err());
    }
}
