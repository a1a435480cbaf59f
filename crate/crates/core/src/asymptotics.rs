//! Large-`a` tails: decay to the rotation centre for `μ < 0`, approach to
//! the opposite pole for `μ > 0` on compact targets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::odeint::Termination;
use crate::profile::ProfileTrajectory;
use crate::regimes::WaveParameters;
use crate::scalar::{from_usize, least_squares, linear_fit, lit, Real};
use crate::surface::SurfaceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scenario {
    DecayToCenter,
    PoleDegenerate,
    PoleGeneric,
    Unbounded,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticFit<T> {
    pub scenario: Scenario,
    #[serde(rename = "E_inf")]
    pub e_inf: T,
    pub theta0: T,
    pub freq: T,
    pub log_drift: T,
    pub rate_exponent: T,
    pub window: (T, T),
}

impl<T: Real> AsymptoticFit<T> {
    fn undetermined(window: (T, T)) -> Self {
        let nan = T::nan();
        AsymptoticFit {
            scenario: Scenario::Undetermined,
            e_inf: nan,
            theta0: nan,
            freq: nan,
            log_drift: nan,
            rate_exponent: nan,
            window,
        }
    }
}

/// Profile data needed by the tail fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSample<T> {
    pub a: T,
    pub s: T,
    pub s_a: T,
    /// `s₀ − |s|`.
    pub pole_distance: T,
}

/// Any source of profile samples, so fits also run on synthetic input.
pub trait ProfileSampler<T> {
    fn a_range(&self) -> (T, T);
    fn sample(&self, a: T) -> Option<TailSample<T>>;
}

impl<T: Real> ProfileSampler<T> for ProfileTrajectory<T> {
    fn a_range(&self) -> (T, T) {
        (self.a_start(), self.a_end())
    }

    fn sample(&self, a: T) -> Option<TailSample<T>> {
        self.point_at(a).map(|p| TailSample { a, s: p.s, s_a: p.s_a, pole_distance: p.pole_distance })
    }
}

fn check_window<T: Real>(sampler: &impl ProfileSampler<T>, window: (T, T)) -> Result<()> {
    let (lo, hi) = sampler.a_range();
    if !(window.0 > T::zero() && window.0 < window.1 && window.0 >= lo && window.1 <= hi) {
        return Err(Error::Domain(format!(
            "window [{}, {}] is not inside the sampled range [{lo}, {hi}]",
            window.0, window.1
        )));
    }
    Ok(())
}

/// Uniform samples over the window with spacing at most `step`.
fn grid<T: Real>(sampler: &impl ProfileSampler<T>, window: (T, T), step: T) -> Result<Vec<TailSample<T>>> {
    let n = ((window.1 - window.0) / step).ceil().to_usize().unwrap_or(1).max(16);
    (0..=n)
        .map(|i| {
            let a = window.0 + (window.1 - window.0) * from_usize::<T>(i) / from_usize(n);
            sampler.sample(a).ok_or_else(|| Error::Domain(format!("no sample at a = {a}")))
        })
        .collect()
}

fn trapezoid_mean<T: Real>(xs: &[T], ys: &[T]) -> T {
    let mut acc = T::zero();
    for i in 1..xs.len() {
        acc = acc + (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]) * lit(0.5);
    }
    acc / (xs[xs.len() - 1] - xs[0])
}

fn unwrap<T: Real>(raw: &[T]) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    let mut out = Vec::with_capacity(raw.len());
    let mut acc = T::zero();
    for (i, r) in raw.iter().enumerate() {
        if i == 0 {
            acc = *r;
        } else {
            let mut d = *r - raw[i - 1];
            d = d - two_pi * (d / two_pi).round();
            acc = acc + d;
        }
        out.push(acc);
    }
    out
}

/// Exponent of the per-block peak-to-peak of `ys` against `a`.
fn block_rate<T: Real>(xs: &[T], ys: &[T], blocks: usize) -> T {
    let n = xs.len();
    if n < blocks * 4 {
        return T::nan();
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for b in 0..blocks {
        let (i0, i1) = (b * n / blocks, (b + 1) * n / blocks);
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for y in &ys[i0..i1] {
            lo = lo.min(*y);
            hi = hi.max(*y);
        }
        let ptp = hi - lo;
        if ptp > T::zero() && ptp.is_finite() {
            lx.push(((xs[i0] * xs[i1 - 1]).sqrt()).ln());
            ly.push(ptp.ln());
        }
    }
    if lx.len() < blocks / 2 {
        return T::nan();
    }
    linear_fit(&lx, &ly).map_or(T::nan(), |(slope, _)| slope)
}

/// Zero crossings of `s` in the window, each refined by bisection.
pub fn zero_crossings<T: Real>(sampler: &impl ProfileSampler<T>, window: (T, T), step: T) -> Result<Vec<T>> {
    check_window(sampler, window)?;
    let pts = grid(sampler, window, step)?;
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if !(l.s * r.s < T::zero()) {
            continue;
        }
        let (mut lo, mut hi, mut slo) = (l.a, r.a, l.s);
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            let sm = sampler.sample(mid).map_or(T::nan(), |p| p.s);
            if (sm < T::zero()) == (slo < T::zero()) {
                lo = mid;
                slo = sm;
            } else {
                hi = mid;
            }
        }
        out.push((lo + hi) * lit(0.5));
    }
    Ok(out)
}

/// Window mean and max relative deviation of `a(|μ|s² + s_a²)/2`.
pub fn amplitude_energy<T: Real>(
    sampler: &impl ProfileSampler<T>,
    mu: T,
    window: (T, T),
) -> Result<(T, T)> {
    check_window(sampler, window)?;
    let step = lit::<T>(0.05) / mu.abs().sqrt().max(lit(1e-3));
    let pts = grid(sampler, window, step)?;
    let xs: Vec<T> = pts.iter().map(|p| p.a).collect();
    let ys: Vec<T> = pts.iter().map(|p| p.a * (mu.abs() * p.s * p.s + p.s_a * p.s_a) * lit(0.5)).collect();
    let mean = trapezoid_mean(&xs, &ys);
    let dev = ys.iter().fold(T::zero(), |m, y| m.max((*y - mean).abs()));
    Ok((mean, dev / mean.abs()))
}

/// Tail fit for `μ < 0`, `s ≈ √(−2E∞/(aμ)) cos θ(a)`.
pub fn fit_decay_to_center<T: Real>(
    sampler: &impl ProfileSampler<T>,
    params: &WaveParameters<T>,
    surface: &SurfaceProfile<T>,
    window: (T, T),
) -> Result<AsymptoticFit<T>> {
    let mu = params.mu;
    if !(mu < T::zero()) {
        return Err(Error::Regime("decay to the centre needs μ < 0".into()));
    }
    check_window(sampler, window)?;
    let root = (-mu).sqrt();
    let step = T::PI() / (root * lit(64.0));
    let crossings = zero_crossings(sampler, window, step)?;
    if crossings.len() < 10 {
        return Ok(AsymptoticFit::undetermined(window));
    }
    let spacing = (crossings[crossings.len() - 1] - crossings[0]) / from_usize(crossings.len() - 1);
    let freq = T::PI() / spacing;

    let pts = grid(sampler, window, step)?;
    let xs: Vec<T> = pts.iter().map(|p| p.a).collect();
    let mut e = Vec::with_capacity(pts.len());
    let mut raw = Vec::with_capacity(pts.len());
    for p in &pts {
        let sa = p.a.sqrt();
        let w = sa * p.s;
        let w_a = p.s / (sa + sa) + sa * p.s_a;
        e.push(lit::<T>(0.5) * w_a * w_a + w * w / (lit::<T>(8.0) * p.a * p.a) - mu * p.a * surface.cap_f(p.s));
        raw.push((w_a / root).atan2(w));
    }
    let e_inf = trapezoid_mean(&xs, &e);
    let theta = unwrap(&raw);
    // the 1/a column absorbs the next-order phase correction
    let rows: Vec<Vec<T>> = xs.iter().map(|a| vec![*a, a.ln(), T::one(), a.recip()]).collect();
    let coef = least_squares(&rows, &theta).ok_or_else(|| Error::Undetermined("phase regression failed".into()))?;
    Ok(AsymptoticFit {
        scenario: Scenario::DecayToCenter,
        e_inf,
        theta0: coef[2],
        freq,
        log_drift: -coef[1],
        rate_exponent: block_rate(&xs, &e, 16),
        window,
    })
}

/// Polar data of the pole approach: `w = √a·(s₀ − |s|)` and its derivative.
fn pole_w<T: Real>(p: &TailSample<T>) -> (T, T) {
    let sa = p.a.sqrt();
    let d = p.pole_distance;
    let d_a = if p.s < T::zero() { p.s_a } else { -p.s_a };
    (sa * d, d / (sa + sa) + sa * d_a)
}

/// Min and max of `μw²` over the window.
pub fn pole_extrema<T: Real>(sampler: &impl ProfileSampler<T>, mu: T, window: (T, T)) -> Result<(T, T)> {
    check_window(sampler, window)?;
    let step = lit::<T>(0.01) / mu.abs().sqrt().max(lit(1e-3));
    let pts = grid(sampler, window, step)?;
    Ok(pts.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
        let (w, _) = pole_w(p);
        (lo.min(mu * w * w), hi.max(mu * w * w))
    }))
}

/// Tail fit for `μ > 0` on a compact target.
pub fn fit_approach_to_pole<T: Real>(
    sampler: &impl ProfileSampler<T>,
    params: &WaveParameters<T>,
    surface: &SurfaceProfile<T>,
    window: (T, T),
) -> Result<AsymptoticFit<T>> {
    if !surface.is_compact() {
        return Err(Error::Domain("the pole approach needs a compact target".into()));
    }
    let mu = params.mu;
    if !(mu > T::zero()) {
        return Err(Error::Regime("the pole approach needs μ > 0".into()));
    }
    check_window(sampler, window)?;
    let root = mu.sqrt();
    let cf0 = params.c * surface.f_at_pole();
    let step = T::PI() / (root * lit(64.0));
    let pts = grid(sampler, window, step)?;
    let xs: Vec<T> = pts.iter().map(|p| p.a).collect();
    let mut e = Vec::with_capacity(pts.len());
    let mut w2 = Vec::with_capacity(pts.len());
    for p in &pts {
        let (w, w_a) = pole_w(p);
        e.push(lit::<T>(0.5) * (w_a * w_a + mu * w * w) + cf0 * cf0 / (lit::<T>(2.0) * w * w));
        w2.push(w * w);
    }
    let e_inf = trapezoid_mean(&xs, &e);
    let floor = root * cf0.abs();
    let mean_w2 = trapezoid_mean(&xs, &w2);
    let (lo, hi) = w2.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), v| (l.min(*v), h.max(*v)));
    let rate_exponent = block_rate(&xs, &e, 16);
    if (e_inf - floor).abs() < lit::<T>(1e-4) * e_inf && hi - lo < lit::<T>(1e-3) * mean_w2 {
        return Ok(AsymptoticFit {
            scenario: Scenario::PoleDegenerate,
            e_inf,
            theta0: T::nan(),
            freq: T::zero(),
            log_drift: T::zero(),
            rate_exponent,
            window,
        });
    }
    let raw: Vec<T> = pts
        .iter()
        .map(|p| {
            let (w, w_a) = pole_w(p);
            (w * w - e_inf / mu).atan2(w * w_a / root)
        })
        .collect();
    let theta = unwrap(&raw);
    let (freq, theta0) = linear_fit(&xs, &theta).ok_or_else(|| Error::Undetermined("phase regression failed".into()))?;
    Ok(AsymptoticFit { scenario: Scenario::PoleGeneric, e_inf, theta0, freq, log_drift: T::zero(), rate_exponent, window })
}

/// Scenario from the sign of `μ`, compactness and how the run ended.
pub fn classify_tail<T: Real>(
    traj: &ProfileTrajectory<T>,
    params: &WaveParameters<T>,
    surface: &SurfaceProfile<T>,
) -> Scenario {
    if traj.termination() == &Termination::BlowUp {
        return Scenario::Unbounded;
    }
    let (a0, a1) = (traj.a_start(), traj.a_end());
    let window = ((a1 * lit(0.5)).max(a0), a1);
    if params.mu < T::zero() {
        let bounded = traj.knots().iter().filter(|k| k.a >= window.0).all(|k| k.s.abs() < lit(1.0));
        return if bounded { Scenario::DecayToCenter } else { Scenario::Undetermined };
    }
    if params.mu > T::zero() && surface.is_compact() {
        return fit_approach_to_pole(traj, params, surface, window).map_or(Scenario::Undetermined, |f| f.scenario);
    }
    Scenario::Undetermined
}
