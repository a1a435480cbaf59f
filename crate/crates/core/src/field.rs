//! Assembly of `(u, φ)` on the plane from the cone profiles, and numerical
//! checks of the compatibility conditions on the cross `|x| = |y|`.
//!
//! Points are addressed by characteristic coordinates `ξ = x + y`,
//! `η = x − y`, so that `a = √|ξη|` and `α = ½ ln|ξ/η|` stay accurate
//! arbitrarily close to the cross.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odeint::IntegrationConfig;
use crate::profile::{solve_profile, ConeFamily, ProfileTrajectory, SolveOptions};
use crate::quad;
use crate::regimes::WaveParameters;
use crate::scalar::{from_usize, linear_fit, lit, Real};
use crate::seed::SeedSpec;
use crate::selfsimilar::{solve_selfsimilar, SelfSimilarTrajectory};
use crate::surface::SurfaceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cone {
    #[serde(rename = "h+")]
    HPlus,
    #[serde(rename = "h-")]
    HMinus,
    #[serde(rename = "v+")]
    VPlus,
    #[serde(rename = "v-")]
    VMinus,
    #[serde(rename = "cross")]
    Cross,
}

impl Cone {
    pub fn tag(self) -> &'static str {
        match self {
            Cone::HPlus => "h+",
            Cone::HMinus => "h-",
            Cone::VPlus => "v+",
            Cone::VMinus => "v-",
            Cone::Cross => "cross",
        }
    }

    pub fn family(self) -> Option<ConeFamily> {
        match self {
            Cone::HPlus | Cone::HMinus => Some(ConeFamily::Horizontal),
            Cone::VPlus | Cone::VMinus => Some(ConeFamily::Vertical),
            Cone::Cross => None,
        }
    }

    fn of(xi_pos: bool, eta_pos: bool) -> Cone {
        match (xi_pos, eta_pos) {
            (true, true) => Cone::HPlus,
            (false, false) => Cone::HMinus,
            (true, false) => Cone::VPlus,
            (false, true) => Cone::VMinus,
        }
    }
}

/// `(a, α, cone)` from characteristic coordinates.
pub fn characteristic_coords<T: Real>(xi: T, eta: T) -> (T, T, Cone) {
    if xi == T::zero() || eta == T::zero() {
        return (T::zero(), T::zero(), Cone::Cross);
    }
    let (ax, ae) = (xi.abs(), eta.abs());
    let a = ax.sqrt() * ae.sqrt();
    let alpha = lit::<T>(0.5) * (ax.ln() - ae.ln());
    (a, alpha, Cone::of(xi > T::zero(), eta > T::zero()))
}

/// `a = √|x² − y²|`, `α = ½ ln(|x+y|/|x−y|)` and the cone of `(x, y)`.
pub fn hyperbolic_coords<T: Real>(x: T, y: T) -> (T, T, Cone) {
    characteristic_coords(x + y, x - y)
}

#[derive(Clone)]
enum Source<T: Real> {
    Trivial,
    Hyperbolic(Box<ProfileTrajectory<T>>),
    SelfSimilar(Box<SelfSimilarTrajectory<T>>),
}

#[derive(Debug, Clone, Copy)]
struct Local<T> {
    gamma: T,
    gamma_s: T,
    f: T,
    /// `β' = σ/Γ`.
    beta_rate: T,
}

/// One cone family's profile with cumulative phase integrals.
#[derive(Clone)]
pub struct ConeProfile<T: Real> {
    source: Source<T>,
    surface: SurfaceProfile<T>,
    k: T,
    q0: T,
    kappa: T,
    knots: Vec<T>,
    /// `∫_{x₀}^{x_i} σ/Γ`.
    beta_cum: Vec<T>,
    /// `∫_0^{x_i} 2kF/x'`.
    psi_cum: Vec<T>,
    beta_one: T,
}

impl<T: Real> ConeProfile<T> {
    /// `s ≡ 0`, the constant map.
    pub fn trivial(surface: &SurfaceProfile<T>, params: &WaveParameters<T>) -> Self {
        ConeProfile {
            source: Source::Trivial,
            surface: surface.clone(),
            k: params.k,
            q0: T::zero(),
            kappa: T::zero(),
            knots: Vec::new(),
            beta_cum: Vec::new(),
            psi_cum: Vec::new(),
            beta_one: T::zero(),
        }
    }

    pub fn hyperbolic(traj: ProfileTrajectory<T>) -> Result<Self> {
        let knots: Vec<T> = traj.knots().iter().map(|p| p.a).collect();
        let surface = traj.surface().clone();
        let (k, q0, kappa) = (traj.params().k, traj.spec().q0, traj.kappa());
        Self::build(Source::Hyperbolic(Box::new(traj)), surface, k, q0, kappa, knots)
    }

    pub fn selfsimilar(traj: SelfSimilarTrajectory<T>) -> Result<Self> {
        let knots: Vec<T> = traj.knots().iter().map(|p| p.r).collect();
        let surface = traj.surface().clone();
        let p = traj.params();
        let kappa = p.kappa().unwrap_or_else(T::zero);
        let (k, q0) = (p.k, traj.spec().q0);
        Self::build(Source::SelfSimilar(Box::new(traj)), surface, k, q0, kappa, knots)
    }

    fn build(source: Source<T>, surface: SurfaceProfile<T>, k: T, q0: T, kappa: T, knots: Vec<T>) -> Result<Self> {
        let mut out = ConeProfile {
            source,
            surface,
            k,
            q0,
            kappa,
            knots,
            beta_cum: Vec::new(),
            psi_cum: Vec::new(),
            beta_one: T::zero(),
        };
        let n = out.knots.len();
        let mut beta = vec![T::zero(); n];
        let mut psi = vec![T::zero(); n];
        psi[0] = out.psi_series(out.knots[0]);
        for i in 1..n {
            let (l, r) = (out.knots[i - 1], out.knots[i]);
            beta[i] = beta[i - 1] + quad::kronrod15(|x| out.local(x).beta_rate, l, r);
            psi[i] = psi[i - 1] + quad::kronrod15(|x| out.psi_rate(x), l, r);
        }
        out.beta_cum = beta;
        out.psi_cum = psi;
        if !(out.x_end() >= T::one()) {
            return Err(Error::Config("profiles must extend to at least a = 1 for the phase anchor".into()));
        }
        out.beta_one = out.beta_raw(T::one());
        Ok(out)
    }

    fn x_start(&self) -> T {
        self.knots.first().copied().unwrap_or_else(T::zero)
    }

    /// Largest radius covered; unbounded for the trivial profile.
    pub fn x_end(&self) -> T {
        self.knots.last().copied().unwrap_or_else(T::infinity)
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.source, Source::Trivial)
    }

    fn local(&self, x: T) -> Local<T> {
        let nan = T::nan();
        let (gamma, gamma_s, f, sigma) = match &self.source {
            Source::Trivial => (T::zero(), T::one(), T::zero(), T::zero()),
            Source::Hyperbolic(t) => t.point_at(x).map_or((nan, nan, nan, nan), |p| (p.gamma, p.gamma_s, p.f, p.sigma)),
            Source::SelfSimilar(t) => t.state_at(x).map_or((nan, nan, nan, nan), |st| {
                let (g, gs, f) = self.surface.eval(st.s);
                (g, gs, f, st.sigma)
            }),
        };
        let beta_rate = if sigma == T::zero() { T::zero() } else { sigma / gamma };
        Local { gamma, gamma_s, f, beta_rate }
    }

    fn psi_rate(&self, x: T) -> T {
        lit::<T>(2.0) * self.k * self.local(x).f / x
    }

    /// `∫_0^x 2kF/x'` along the seed law `s = q0 x^κ`.
    fn psi_series(&self, x: T) -> T {
        if self.kappa == T::zero() {
            return T::zero();
        }
        self.k * self.q0 * self.q0 * x.powf(self.kappa + self.kappa) / (self.kappa + self.kappa)
    }

    fn locate(&self, x: T) -> usize {
        self.knots.partition_point(|k| *k <= x).saturating_sub(1)
    }

    /// `∫_{x₀}^{x} σ/Γ`, by log-variable quadrature below the seed radius.
    fn beta_raw(&self, x: T) -> T {
        if self.is_trivial() {
            return T::zero();
        }
        let x0 = self.x_start();
        if x < x0 {
            let g = |u: T| {
                let v = u.exp();
                v * self.local(v).beta_rate
            };
            return -quad::kronrod15(g, x.ln(), x0.ln());
        }
        let i = self.locate(x);
        if x == self.knots[i] {
            return self.beta_cum[i];
        }
        self.beta_cum[i] + quad::kronrod15(|v| self.local(v).beta_rate, self.knots[i], x)
    }

    /// `β(x)` with `β(1) = 0`.
    pub fn beta(&self, x: T) -> T {
        self.beta_raw(x) - self.beta_one
    }

    /// `∫_0^x 2kF(s(x'))/x' dx'`.
    pub fn psi_integral(&self, x: T) -> T {
        if self.is_trivial() {
            return T::zero();
        }
        let x0 = self.x_start();
        if x <= x0 {
            return self.psi_series(x);
        }
        let i = self.locate(x);
        if x == self.knots[i] {
            return self.psi_cum[i];
        }
        self.psi_cum[i] + quad::kronrod15(|v| self.psi_rate(v), self.knots[i], x)
    }

    /// `(Γ_s(s), Γ(s))` at radius `x`.
    pub fn frame(&self, x: T) -> (T, T) {
        let l = self.local(x);
        (l.gamma_s, l.gamma)
    }
}

/// `ψ(a) = b ln a − ∫_0^a 2kF/a'`.
pub fn psi_profile<T: Real>(profile: &ConeProfile<T>, params: &WaveParameters<T>, a: T) -> Result<T> {
    if !(a > T::zero()) || a > profile.x_end() {
        return Err(Error::Domain(format!("ψ requested at a = {a} outside (0, {}]", profile.x_end())));
    }
    Ok(params.b * a.ln() - profile.psi_integral(a))
}

/// Value of the field at one point; `phi` is `None` on the cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue<T> {
    pub cone: Cone,
    pub u: [T; 3],
    pub phi: Option<T>,
}

/// Anything that evaluates `(u, φ)` at `(t, ξ, η)`.
pub trait FieldSampler<T> {
    fn eval(&self, t: T, xi: T, eta: T) -> Result<FieldValue<T>>;
}

/// The assembled equivariant solution.
#[derive(Clone)]
pub struct FieldSolution<T: Real> {
    surface: SurfaceProfile<T>,
    params: WaveParameters<T>,
    horizontal: ConeProfile<T>,
    vertical: ConeProfile<T>,
    selfsimilar: bool,
}

impl<T: Real> FieldSolution<T> {
    pub fn from_profiles(
        surface: &SurfaceProfile<T>,
        params: &WaveParameters<T>,
        horizontal: ConeProfile<T>,
        vertical: ConeProfile<T>,
        selfsimilar: bool,
    ) -> Self {
        FieldSolution { surface: surface.clone(), params: *params, horizontal, vertical, selfsimilar }
    }

    /// Solves both cone families out to `x_max` (`a` or `r`). On a
    /// non-compact target the family whose effective `μ` is positive
    /// carries the constant map.
    pub fn solve(
        surface: &SurfaceProfile<T>,
        params: &WaveParameters<T>,
        spec: &SeedSpec<T>,
        x_max: T,
        cfg: &IntegrationConfig<T>,
        selfsimilar: bool,
    ) -> Result<Self> {
        let mut out = [None, None];
        for (slot, family) in out.iter_mut().zip([ConeFamily::Horizontal, ConeFamily::Vertical]) {
            let eff = family.params(params);
            let profile = if !surface.is_compact() && eff.mu > T::zero() {
                ConeProfile::trivial(surface, params)
            } else if selfsimilar {
                ConeProfile::selfsimilar(solve_selfsimilar(surface, params, family, spec, x_max, cfg)?)?
            } else {
                ConeProfile::hyperbolic(solve_profile(surface, params, spec, x_max, cfg, &SolveOptions::new(family))?)?
            };
            *slot = Some(profile);
        }
        let [h, v] = out;
        Ok(Self::from_profiles(surface, params, h.expect("horizontal"), v.expect("vertical"), selfsimilar))
    }

    pub fn surface(&self) -> &SurfaceProfile<T> {
        &self.surface
    }

    pub fn params(&self) -> &WaveParameters<T> {
        &self.params
    }

    pub fn is_selfsimilar(&self) -> bool {
        self.selfsimilar
    }

    pub fn profile(&self, family: ConeFamily) -> &ConeProfile<T> {
        match family {
            ConeFamily::Horizontal => &self.horizontal,
            ConeFamily::Vertical => &self.vertical,
        }
    }

    pub fn eval_xy(&self, t: T, x: T, y: T) -> Result<FieldValue<T>> {
        self.eval(t, x + y, x - y)
    }
}

impl<T: Real> FieldSampler<T> for FieldSolution<T> {
    fn eval(&self, t: T, xi: T, eta: T) -> Result<FieldValue<T>> {
        if self.selfsimilar && !(t > T::zero()) {
            return Err(Error::Config("self-similar fields are defined for t > 0".into()));
        }
        let (a, alpha, cone) = characteristic_coords(xi, eta);
        let Some(family) = cone.family() else {
            return Ok(FieldValue { cone, u: [T::one(), T::zero(), T::zero()], phi: None });
        };
        let profile = self.profile(family);
        let (x, clock) = if self.selfsimilar { (a / t.sqrt(), t.ln()) } else { (a, t) };
        if x > profile.x_end() {
            return Err(Error::Domain(format!("radius {x} exceeds the solved range {}", profile.x_end())));
        }
        let p = &self.params;
        let (gs, g) = profile.frame(x);
        let phase = profile.beta(x) + p.k * alpha + p.mu * clock;
        let u = [gs, g * phase.cos(), g * phase.sin()];
        let phi = p.c * alpha + p.b * x.ln() - profile.psi_integral(x);
        Ok(FieldValue { cone, u, phi: Some(phi) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
    pub nx: usize,
    pub ny: usize,
    pub t: T,
    /// Extra rows of nodes along `x ± y = ±2^{−j}`, `j = 1..=refine`,
    /// one per grid column, appended after the rectangle.
    #[serde(default)]
    pub refine: usize,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        let l: T = lit(10.0);
        GridSpec { xmin: -l, xmax: l, ymin: -l, ymax: l, nx: 512, ny: 512, t: T::one(), refine: 16 }
    }
}

impl<T: Real> GridSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.xmin, self.xmax, self.ymin, self.ymax, self.t].iter().all(|v| v.is_finite());
        if !finite || self.nx < 2 || self.ny < 2 || !(self.xmax > self.xmin) || !(self.ymax > self.ymin) {
            return Err(Error::Config("grid needs finite bounds with xmax > xmin, ymax > ymin and nx, ny ≥ 2".into()));
        }
        Ok(())
    }

    /// Largest `√|x² − y²|` on the grid.
    pub fn max_radius(&self) -> T {
        let xm = self.xmin.abs().max(self.xmax.abs());
        let ym = self.ymin.abs().max(self.ymax.abs());
        xm.max(ym)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNode<T> {
    pub x: T,
    pub y: T,
    pub value: FieldValue<T>,
}

#[derive(Debug, Clone)]
pub struct FieldGrid<T> {
    pub t: T,
    pub nx: usize,
    pub ny: usize,
    /// Row-major in `y`, then `x`, followed by the refinement bands.
    pub nodes: Vec<FieldNode<T>>,
}

/// Samples the field on a rectangular grid; nodes are evaluated in
/// parallel and returned in a fixed order.
pub fn sample_field<T: Real>(field: &FieldSolution<T>, grid: &GridSpec<T>) -> Result<FieldGrid<T>> {
    grid.validate()?;
    let coord = |lo: T, hi: T, n: usize, i: usize| lo + (hi - lo) * from_usize::<T>(i) / from_usize(n - 1);
    let mut points: Vec<(T, T)> = (0..grid.nx * grid.ny)
        .map(|idx| (coord(grid.xmin, grid.xmax, grid.nx, idx % grid.nx), coord(grid.ymin, grid.ymax, grid.ny, idx / grid.nx)))
        .collect();
    for j in 1..=grid.refine {
        let d = lit::<T>(2.0).powi(-(j as i32));
        for (sign, off) in [(T::one(), -d), (T::one(), d), (-T::one(), d), (-T::one(), -d)] {
            for i in 0..grid.nx {
                let x = coord(grid.xmin, grid.xmax, grid.nx, i);
                let y = sign * x + off;
                if y >= grid.ymin && y <= grid.ymax {
                    points.push((x, y));
                }
            }
        }
    }
    let nodes = points
        .into_par_iter()
        .map(|(x, y)| field.eval_xy(grid.t, x, y).map(|value| FieldNode { x, y, value }))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldGrid { t: grid.t, nx: grid.nx, ny: grid.ny, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Undetermined,
}

impl Verdict {
    fn from(ok: Option<bool>) -> Self {
        match ok {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Undetermined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityVerdicts {
    /// Each `φ₁^±`, `φ₂^±` agrees across its two constituent cones.
    pub continuity: Verdict,
    pub jumps: Verdict,
    pub constants: Verdict,
    pub zero_sum: Verdict,
    pub u_xi_decay: Verdict,
    pub overall: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityReport<T> {
    pub phi1_plus: T,
    pub phi1_minus: T,
    pub phi2_plus: T,
    pub phi2_minus: T,
    pub jump_phi1: T,
    pub jump_phi2: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub u_xi_decay_exponent: T,
    pub verdicts: CompatibilityVerdicts,
}

/// Regression settings for [`compatibility_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityOptions<T> {
    /// Fixed distances from the cross at which the log-coefficients are fitted.
    pub anchors: [T; 3],
    /// Exponents `j` of the probe offsets `2^{−j}` for the log-coefficients.
    pub log_range: (i32, i32),
    /// Exponents `j` of the offsets for the `u_ξ` decay fit.
    pub decay_range: (i32, i32),
    pub tol: T,
}

impl<T: Real> Default for CompatibilityOptions<T> {
    fn default() -> Self {
        CompatibilityOptions {
            anchors: [lit(0.25), lit(0.5), T::one()],
            log_range: (20, 40),
            decay_range: (12, 32),
            tol: lit(1e-6),
        }
    }
}

/// Slope and intercept of `φ(along, ±2^{−j})` against `ln 2^{−j}`.
fn log_fit<T: Real>(
    eval: &dyn Fn(T) -> Result<Option<T>>,
    range: (i32, i32),
) -> Result<Option<(T, T)>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in range.0..=range.1 {
        let d = lit::<T>(2.0).powi(-j);
        if let Some(phi) = eval(d)? {
            xs.push(d.ln());
            ys.push(phi);
        }
    }
    Ok(linear_fit(&xs, &ys).filter(|(s, i)| s.is_finite() && i.is_finite()))
}

/// Per (sign of the fixed coordinate, sign of the probe): the
/// (slope, intercept) fits, one per anchor.
type SideFits<T> = Vec<((bool, bool), Vec<(T, T)>)>;

/// Estimates the log-decomposition of `φ` and the decay of `u_ξ` near the cross.
pub fn compatibility_report<T: Real>(
    field: &impl FieldSampler<T>,
    t: T,
    kappa: T,
    opts: &CompatibilityOptions<T>,
) -> Result<CompatibilityReport<T>> {
    let phi_at = |xi: T, eta: T| field.eval(t, xi, eta).map(|v| v.phi);
    let mut one: SideFits<T> = Vec::new();
    let mut two: SideFits<T> = Vec::new();
    let mut undetermined = false;
    for fixed_pos in [true, false] {
        for probe_pos in [true, false] {
            let mut c1s = Vec::new();
            let mut c2s = Vec::new();
            for anchor in opts.anchors {
                let fx = if fixed_pos { anchor } else { -anchor };
                let sg = |d: T| if probe_pos { d } else { -d };
                let f1 = log_fit(&|d| phi_at(fx, sg(d)), opts.log_range)?;
                let f2 = log_fit(&|d| phi_at(sg(d), fx), opts.log_range)?;
                match (f1, f2) {
                    (Some(a), Some(b)) => {
                        c1s.push(a);
                        c2s.push(b);
                    }
                    _ => undetermined = true,
                }
            }
            one.push(((fixed_pos, probe_pos), c1s));
            two.push(((fixed_pos, probe_pos), c2s));
        }
    }
    let nan = T::nan();
    let mean = |v: &[(T, T)]| {
        if v.is_empty() {
            nan
        } else {
            v.iter().fold(T::zero(), |s, (c, _)| s + *c) / from_usize(v.len())
        }
    };
    let get = |tab: &SideFits<T>, key: (bool, bool)| -> Vec<(T, T)> {
        tab.iter().find(|(k, _)| *k == key).map(|(_, v)| v.clone()).unwrap_or_default()
    };
    // φ₁: fixed ξ, probe η. φ₁⁺ lives on η > 0 (h+ for ξ > 0, v− for ξ < 0).
    let p1_hp = get(&one, (true, true));
    let p1_vm = get(&one, (false, true));
    let p1_vp = get(&one, (true, false));
    let p1_hm = get(&one, (false, false));
    // φ₂: fixed η, probe ξ. φ₂⁺ lives on ξ > 0 (h+ for η > 0, v+ for η < 0).
    let p2_hp = get(&two, (true, true));
    let p2_vp = get(&two, (false, true));
    let p2_vm = get(&two, (true, false));
    let p2_hm = get(&two, (false, false));

    let phi1_plus = (mean(&p1_hp) + mean(&p1_vm)) * lit(0.5);
    let phi1_minus = (mean(&p1_vp) + mean(&p1_hm)) * lit(0.5);
    let phi2_plus = (mean(&p2_hp) + mean(&p2_vp)) * lit(0.5);
    let phi2_minus = (mean(&p2_vm) + mean(&p2_hm)) * lit(0.5);
    let continuity_gap = (mean(&p1_hp) - mean(&p1_vm))
        .abs()
        .max((mean(&p1_vp) - mean(&p1_hm)).abs())
        .max((mean(&p2_hp) - mean(&p2_vp)).abs())
        .max((mean(&p2_vm) - mean(&p2_hm)).abs());

    // φ₃ on an axis: intercept minus the other log term at the anchor.
    let axis = |fits: &[(T, T)], other_coef: T| -> Vec<T> {
        fits.iter().zip(opts.anchors).map(|((_, icpt), anchor)| *icpt - other_coef * anchor.ln()).collect()
    };
    let worst = |a: Vec<T>, b: Vec<T>| -> T {
        if a.is_empty() || a.len() != b.len() {
            return nan;
        }
        a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    };
    let c1 = worst(axis(&p1_vp, mean(&p2_vp)), axis(&p1_hp, mean(&p2_hp)));
    let c3 = worst(axis(&p1_vm, mean(&p2_vm)), axis(&p1_hm, mean(&p2_hm)));
    let c2 = worst(axis(&p2_hm, mean(&p1_hm)), axis(&p2_vp, mean(&p1_vp)));
    let c4 = worst(axis(&p2_hp, mean(&p1_hp)), axis(&p2_vm, mean(&p1_vm)));

    // zero-sum of φ₃ at the origin, probed at |ξ| = |η| = 2^{−log_range.1}
    let d = lit::<T>(2.0).powi(-opts.log_range.1);
    let phi3 = |xi: T, eta: T, c1: T, c2: T| -> Result<Option<T>> {
        Ok(phi_at(xi, eta)?.map(|p| p - c1 * eta.abs().ln() - c2 * xi.abs().ln()))
    };
    let z = [
        phi3(-d, -d, mean(&p1_hm), mean(&p2_hm))?,
        phi3(d, d, mean(&p1_hp), mean(&p2_hp))?,
        phi3(-d, d, mean(&p1_vm), mean(&p2_vm))?,
        phi3(d, -d, mean(&p1_vp), mean(&p2_vp))?,
    ];
    let zero_sum = match z {
        [Some(hm), Some(hp), Some(vm), Some(vp)] => Some((hm + hp - vm - vp).abs()),
        _ => None,
    };

    let exponent = u_xi_decay(field, t, opts)?;
    let tol = opts.tol;
    let ok = |v: T| if v.is_finite() { Some(v < tol) } else { None };
    let jump_phi1 = phi1_plus - phi1_minus;
    let jump_phi2 = phi2_plus - phi2_minus;
    let continuity = if undetermined { None } else { ok(continuity_gap) };
    let jumps = ok(jump_phi1.abs().max(jump_phi2.abs()));
    let constants = ok(c1.max(c2).max(c3).max(c4));
    let zero = zero_sum.and_then(ok);
    let decay = (!exponent.is_nan()).then(|| exponent >= kappa * lit(0.5) - lit(0.05));
    let parts = [continuity, jumps, constants, zero, decay];
    let overall = if parts.iter().any(|p| p.is_none()) {
        None
    } else {
        Some(parts.iter().all(|p| *p == Some(true)))
    };
    Ok(CompatibilityReport {
        phi1_plus,
        phi1_minus,
        phi2_plus,
        phi2_minus,
        jump_phi1,
        jump_phi2,
        c1,
        c2,
        c3,
        c4,
        u_xi_decay_exponent: exponent,
        verdicts: CompatibilityVerdicts {
            continuity: Verdict::from(continuity),
            jumps: Verdict::from(jumps),
            constants: Verdict::from(constants),
            zero_sum: Verdict::from(zero),
            u_xi_decay: Verdict::from(decay),
            overall: Verdict::from(overall),
        },
    })
}

/// Smallest fitted exponent `p` in `|u_ξ(ξ, ±2^{−j})| ~ 2^{−jp}` over
/// both signs of `ξ` and `η`, from central differences in `ξ`.
/// Infinite when `u_ξ` vanishes identically.
pub fn u_xi_decay<T: Real>(field: &impl FieldSampler<T>, t: T, opts: &CompatibilityOptions<T>) -> Result<T> {
    let xi0 = opts.anchors[1];
    let h = xi0 * lit(1e-5);
    let mut worst = T::infinity();
    for xs in [T::one(), -T::one()] {
        for es in [T::one(), -T::one()] {
            let mut lx = Vec::new();
            let mut ly = Vec::new();
            for j in opts.decay_range.0..=opts.decay_range.1 {
                let eta = es * lit::<T>(2.0).powi(-j);
                let up = field.eval(t, xs * xi0 + h, eta)?.u;
                let dn = field.eval(t, xs * xi0 - h, eta)?.u;
                let norm = (0..3).map(|i| ((up[i] - dn[i]) / (h + h)).powi(2)).fold(T::zero(), |s, v| s + v).sqrt();
                if norm > T::zero() {
                    lx.push(eta.abs().ln());
                    ly.push(norm.ln());
                }
            }
            if lx.len() >= 3 {
                if let Some((slope, _)) = linear_fit(&lx, &ly) {
                    worst = worst.min(slope);
                }
            }
        }
    }
    Ok(worst)
}

/// Rotation of the target about its axis by `theta`.
pub fn rotate_u<T: Real>(u: [T; 3], theta: T) -> [T; 3] {
    let (sn, cs) = theta.sin_cos();
    [u[0], u[1] * cs - u[2] * sn, u[1] * sn + u[2] * cs]
}

fn value_gap<T: Real>(got: &FieldValue<T>, u: [T; 3], phi: Option<T>) -> T {
    let du = (0..3).fold(T::zero(), |m, i| m.max((got.u[i] - u[i]).abs()));
    match (got.phi, phi) {
        (Some(a), Some(b)) => du.max((a - b).abs()),
        (None, None) => du,
        _ => T::infinity(),
    }
}

/// Defect of `u(t, e^{α₀}ξ, e^{−α₀}η) = R(kα₀)u(t, ξ, η)` and `φ ↦ φ + cα₀`.
pub fn boost_defect<T: Real>(field: &FieldSolution<T>, t: T, xi: T, eta: T, alpha0: T) -> Result<T> {
    let p = field.params();
    let base = field.eval(t, xi, eta)?;
    let moved = field.eval(t, xi * alpha0.exp(), eta * (-alpha0).exp())?;
    Ok(value_gap(&moved, rotate_u(base.u, p.k * alpha0), base.phi.map(|f| f + p.c * alpha0)))
}

/// Defect of the time symmetry taking `t` to `t + dt`: a rotation by `μ dt`
/// for standing waves, and the parabolic scaling `(ξ, η) ↦ λ(ξ, η)` with
/// `λ² = (t + dt)/t` and rotation `μ ln λ²` for self-similar fields.
pub fn time_shift_defect<T: Real>(field: &FieldSolution<T>, t: T, xi: T, eta: T, dt: T) -> Result<T> {
    let p = field.params();
    let base = field.eval(t, xi, eta)?;
    let t1 = t + dt;
    let (moved, angle) = if field.is_selfsimilar() {
        let l2 = t1 / t;
        let l = l2.sqrt();
        (field.eval(t1, xi * l, eta * l)?, p.mu * l2.ln())
    } else {
        (field.eval(t1, xi, eta)?, p.mu * dt)
    };
    Ok(value_gap(&moved, rotate_u(base.u, angle), base.phi))
}
