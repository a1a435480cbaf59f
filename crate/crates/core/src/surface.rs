//! Target surfaces of revolution with metric `ds² + Γ(s)² dβ²`.
//!
//! Besides `Γ` and the area potential `F(s) = ∫₀ˢ Γ`, this module hosts the
//! effective potentials of the profile equations:
//!
//! * `G = ½k²Γ² + bkF − k²F²`
//! * `G̃ = Γ_s F²/Γ³ − F/Γ = −(F²/(2Γ²))_s`
//! * `H = −2G + 4μcF + 4μ²Γ²`
//!
//! For `|s| < SERIES_THRESHOLD` the quotients are evaluated from truncated
//! Taylor series in `s²`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::regimes::WaveParameters;
use crate::scalar::{from_usize, lit, Real};
use crate::series::{SurfaceSeries, TERMS};

/// Below this `|s|` the series branch is used.
pub const SERIES_THRESHOLD: f64 = 1e-4;

const TABLE_KNOTS: usize = 2048;
const OPEN_TABLE_END: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Sphere,
    PseudoSphere,
    Custom,
}

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Quintic Hermite table of `F` built from `(F, Γ, Γ_s)` at uniform knots.
struct FTable<T> {
    h: T,
    f: Vec<T>,
    d1: Vec<T>,
    d2: Vec<T>,
}

struct Custom<T> {
    gamma: ScalarFn<T>,
    gamma_s: ScalarFn<T>,
    table: FTable<T>,
}

/// Surface of revolution, immutable after construction.
#[derive(Clone)]
pub struct SurfaceProfile<T> {
    kind: SurfaceKind,
    s0: T,
    gamma3_at_0: T,
    series: SurfaceSeries<T>,
    custom: Option<Arc<Custom<T>>>,
}

impl<T: Real> fmt::Debug for SurfaceProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceProfile")
            .field("kind", &self.kind)
            .field("s0", &self.s0)
            .field("gamma3_at_0", &self.gamma3_at_0)
            .finish()
    }
}

/// Geometry at `s = ±s₀ ∓ s̃`, evaluated without forming `s₀ − s̃`.
#[derive(Debug, Clone, Copy)]
pub struct PoleFrame<T> {
    pub gamma: T,
    pub gamma_s: T,
    /// `F(s₀) − F(s)`.
    pub f1: T,
    pub f: T,
    pub tilde_g: T,
}

fn taylor_odd<T: Real>(sign: f64) -> [T; TERMS] {
    let mut c = [T::zero(); TERMS];
    let mut fact = 1.0f64;
    for (j, slot) in c.iter_mut().enumerate() {
        let n = 2 * j + 1;
        if n > 1 {
            fact *= ((n - 1) * n) as f64;
        }
        *slot = lit(sign.powi(j as i32) / fact);
    }
    c
}

fn hermite5<T: Real>(h: T, t: T, y0: [T; 3], y1: [T; 3]) -> T {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let c = |x: f64| lit::<T>(x);
    let h00 = T::one() - c(10.0) * t3 + c(15.0) * t4 - c(6.0) * t5;
    let h01 = t - c(6.0) * t3 + c(8.0) * t4 - c(3.0) * t5;
    let h02 = c(0.5) * t2 - c(1.5) * t3 + c(1.5) * t4 - c(0.5) * t5;
    let h12 = c(0.5) * t3 - t4 + c(0.5) * t5;
    let h11 = -c(4.0) * t3 + c(7.0) * t4 - c(3.0) * t5;
    let h10 = c(10.0) * t3 - c(15.0) * t4 + c(6.0) * t5;
    h00 * y0[0] + h01 * h * y0[1] + h02 * h * h * y0[2] + h12 * h * h * y1[2] + h11 * h * y1[1] + h10 * y1[0]
}

impl<T: Real> FTable<T> {
    fn build(gamma: &ScalarFn<T>, gamma_s: &ScalarFn<T>, end: T) -> Result<Self> {
        let n = TABLE_KNOTS;
        let h = end / from_usize(n);
        let mut f = Vec::with_capacity(n + 1);
        let mut d1 = Vec::with_capacity(n + 1);
        let mut d2 = Vec::with_capacity(n + 1);
        // compensated running sum of panel integrals
        let (mut acc, mut comp) = (T::zero(), T::zero());
        for i in 0..=n {
            let s = h * from_usize(i);
            if i > 0 {
                let prev = h * from_usize(i - 1);
                let q = quad::adaptive(|x| gamma(x), prev, s, T::epsilon(), T::epsilon() * lit(8.0), 64)?;
                let y = q.value - comp;
                let t = acc + y;
                comp = (t - acc) - y;
                acc = t;
            }
            let (g, gs) = (gamma(s), gamma_s(s));
            if !(g.is_finite() && gs.is_finite()) {
                return Err(Error::Domain(format!("custom Γ not finite at s={s}")));
            }
            f.push(acc);
            d1.push(g);
            d2.push(gs);
        }
        Ok(FTable { h, f, d1, d2 })
    }

    fn end(&self) -> T {
        self.h * from_usize(self.f.len() - 1)
    }

    fn eval(&self, gamma: &ScalarFn<T>, s: T) -> T {
        let n = self.f.len() - 1;
        let pos = s / self.h;
        let i = pos.floor().to_usize().unwrap_or(0).min(n - 1);
        if i == 0 {
            // first panel: direct quadrature keeps relative accuracy as F → 0
            return quad::kronrod15(|x| gamma(x), T::zero(), s);
        }
        let t = pos - from_usize(i);
        hermite5(
            self.h,
            t,
            [self.f[i], self.d1[i], self.d2[i]],
            [self.f[i + 1], self.d1[i + 1], self.d2[i + 1]],
        )
    }
}

impl<T: Real> SurfaceProfile<T> {
    /// Unit sphere, `Γ = sin s`.
    pub fn sphere() -> Self {
        SurfaceProfile {
            kind: SurfaceKind::Sphere,
            s0: T::PI(),
            gamma3_at_0: -T::one(),
            series: SurfaceSeries::from_odd_coefficients(taylor_odd(-1.0)),
            custom: None,
        }
    }

    /// Hyperbolic plane, `Γ = sinh s`.
    pub fn pseudo_sphere() -> Self {
        SurfaceProfile {
            kind: SurfaceKind::PseudoSphere,
            s0: T::infinity(),
            gamma3_at_0: T::one(),
            series: SurfaceSeries::from_odd_coefficients(taylor_odd(1.0)),
            custom: None,
        }
    }

    /// User-supplied profile. `s0 = None` means non-compact.
    ///
    /// The small-`s` series uses only `Γ'''(0)`; higher coefficients are
    /// taken as zero.
    pub fn custom(gamma: ScalarFn<T>, gamma_s: ScalarFn<T>, gamma3_at_0: T, s0: Option<T>) -> Result<Self> {
        let tol = lit::<T>(1e-10).max(T::epsilon() * lit(100.0));
        if gamma(T::zero()).abs() > tol || (gamma_s(T::zero()) - T::one()).abs() > tol {
            return Err(Error::Domain("custom Γ must satisfy Γ(0)=0, Γ_s(0)=1".into()));
        }
        let end = match s0 {
            Some(s0) => {
                if !(s0 > T::zero() && s0.is_finite()) {
                    return Err(Error::Domain("s0 must be positive".into()));
                }
                if gamma(s0).abs() > tol || (gamma_s(s0) + T::one()).abs() > tol {
                    return Err(Error::Domain("compact Γ must satisfy Γ(s0)=0, Γ_s(s0)=−1".into()));
                }
                s0
            }
            None => lit(OPEN_TABLE_END),
        };
        for i in 1..256 {
            let s = end * from_usize(i) / lit(256.0);
            let g = gamma(s);
            if !(g > T::zero()) {
                return Err(Error::Domain(format!("Γ must be positive on (0, s0); Γ({s}) = {g}")));
            }
            let odd = gamma(-s) + g;
            if odd.abs() > tol * (T::one() + g.abs()) {
                return Err(Error::Domain("Γ must be odd".into()));
            }
        }
        let mut odd = [T::zero(); TERMS];
        odd[0] = T::one();
        odd[1] = gamma3_at_0 / lit(6.0);
        let table = FTable::build(&gamma, &gamma_s, end)?;
        Ok(SurfaceProfile {
            kind: SurfaceKind::Custom,
            s0: s0.unwrap_or(T::infinity()),
            gamma3_at_0,
            series: SurfaceSeries::from_odd_coefficients(odd),
            custom: Some(Arc::new(Custom { gamma, gamma_s, table })),
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Radial diameter; `+∞` for non-compact surfaces.
    pub fn s0(&self) -> T {
        self.s0
    }

    pub fn gamma3_at_0(&self) -> T {
        self.gamma3_at_0
    }

    pub fn is_compact(&self) -> bool {
        self.s0.is_finite()
    }

    pub fn gamma(&self, s: T) -> T {
        match self.kind {
            SurfaceKind::Sphere => s.sin(),
            SurfaceKind::PseudoSphere => s.sinh(),
            SurfaceKind::Custom => (self.custom_ref().gamma)(s),
        }
    }

    pub fn gamma_s(&self, s: T) -> T {
        match self.kind {
            SurfaceKind::Sphere => s.cos(),
            SurfaceKind::PseudoSphere => s.cosh(),
            SurfaceKind::Custom => (self.custom_ref().gamma_s)(s),
        }
    }

    /// `F(s) = ∫₀ˢ Γ`.
    pub fn cap_f(&self, s: T) -> T {
        let two = lit::<T>(2.0);
        match self.kind {
            SurfaceKind::Sphere => {
                let h = (s / two).sin();
                two * h * h
            }
            SurfaceKind::PseudoSphere => {
                let h = (s / two).sinh();
                two * h * h
            }
            SurfaceKind::Custom => self.custom_f(s),
        }
    }

    /// `(Γ, Γ_s, F)` at `s`.
    pub fn eval(&self, s: T) -> (T, T, T) {
        (self.gamma(s), self.gamma_s(s), self.cap_f(s))
    }

    /// `F(s₀)`; infinite for non-compact surfaces.
    pub fn f_at_pole(&self) -> T {
        if self.is_compact() {
            self.cap_f(self.s0)
        } else {
            T::infinity()
        }
    }

    fn custom_ref(&self) -> &Custom<T> {
        self.custom.as_deref().expect("custom surface data")
    }

    fn custom_f(&self, s: T) -> T {
        let c = self.custom_ref();
        let mut x = s.abs();
        if self.is_compact() {
            // F is even, 2s₀-periodic and symmetric about s₀
            let period = self.s0 + self.s0;
            x = x - (x / period).floor() * period;
            if x > self.s0 {
                x = period - x;
            }
            return c.table.eval(&c.gamma, x);
        }
        let end = c.table.end();
        if x <= end {
            c.table.eval(&c.gamma, x)
        } else {
            let tail = quad::adaptive(|v| (c.gamma)(v), end, x, T::zero(), T::epsilon() * lit(16.0), 4096)
                .map(|q| q.value)
                .unwrap_or(T::nan());
            c.table.f[c.table.f.len() - 1] + tail
        }
    }

    fn use_series(&self, s: T) -> bool {
        s.abs() < lit(SERIES_THRESHOLD)
    }

    /// True when `s` is a zero of `Γ` other than the origin.
    pub(crate) fn at_nontrivial_zero(&self, s: T) -> bool {
        if s == T::zero() || !self.is_compact() {
            return false;
        }
        let n = (s / self.s0).round();
        n != T::zero() && (s - n * self.s0).abs() <= lit::<T>(8.0) * T::epsilon() * s.abs().max(T::one())
    }

    /// `G(s)` for the given parameters.
    pub fn cap_g(&self, p: &WaveParameters<T>, s: T) -> T {
        let k2 = p.k * p.k;
        if self.use_series(s) {
            let z = s * s;
            let g = self.series.g.eval(z);
            let f = self.series.f.eval(z);
            return z * (lit::<T>(0.5) * k2 * g * g + p.b * p.k * f - k2 * z * f * f);
        }
        let (gam, _, f) = self.eval(s);
        lit::<T>(0.5) * k2 * gam * gam + p.b * p.k * f - k2 * f * f
    }

    /// `G_s/Γ = k²Γ_s + bk − 2k²F`, smooth through `s = 0`.
    pub fn g_s_over_gamma(&self, p: &WaveParameters<T>, s: T) -> T {
        let k2 = p.k * p.k;
        k2 * self.gamma_s(s) + p.b * p.k - lit::<T>(2.0) * k2 * self.cap_f(s)
    }

    /// `G_s`.
    pub fn cap_g_s(&self, p: &WaveParameters<T>, s: T) -> T {
        self.gamma(s) * self.g_s_over_gamma(p, s)
    }

    /// `F/Γ`; a domain error at zeros of `Γ` other than the origin.
    pub fn f_over_gamma(&self, s: T) -> Result<T> {
        if self.use_series(s) {
            return Ok(s * self.series.fog.eval(s * s));
        }
        if self.at_nontrivial_zero(s) {
            return Err(Error::Domain(format!("F/Γ undefined at zero of Γ, s={s}")));
        }
        let half = s * lit(0.5);
        Ok(match self.kind {
            SurfaceKind::Sphere => half.tan(),
            SurfaceKind::PseudoSphere => half.tanh(),
            SurfaceKind::Custom => self.custom_f(s) / self.gamma(s),
        })
    }

    /// `G̃ = Γ_s F²/Γ³ − F/Γ`.
    pub fn tilde_g(&self, s: T) -> Result<T> {
        if self.use_series(s) {
            return Ok(s * self.series.tg.eval(s * s));
        }
        if self.at_nontrivial_zero(s) {
            return Err(Error::Domain(format!("G̃ undefined at zero of Γ, s={s}")));
        }
        let half = s * lit(0.5);
        let mh = lit::<T>(-0.5);
        Ok(match self.kind {
            SurfaceKind::Sphere => {
                let c = half.cos();
                mh * half.tan() / (c * c)
            }
            SurfaceKind::PseudoSphere => {
                let c = half.cosh();
                mh * half.tanh() / (c * c)
            }
            SurfaceKind::Custom => self.tilde_g_direct(s),
        })
    }

    /// The defining quotient formula, without the series or closed-form branches.
    pub fn tilde_g_direct(&self, s: T) -> T {
        let (g, gs, f) = self.eval(s);
        gs * f * f / (g * g * g) - f / g
    }

    /// `G` from its defining formula, without the series branch.
    pub fn cap_g_direct(&self, p: &WaveParameters<T>, s: T) -> T {
        let (gam, _, f) = self.eval(s);
        let k2 = p.k * p.k;
        lit::<T>(0.5) * k2 * gam * gam + p.b * p.k * f - k2 * f * f
    }

    /// Self-similar conserved-quantity function `H = −2G + 4μcF + 4μ²Γ²`.
    pub fn cap_h(&self, p: &WaveParameters<T>, s: T) -> T {
        let gam = self.gamma(s);
        lit::<T>(-2.0) * self.cap_g(p, s)
            + lit::<T>(4.0) * p.mu * p.c * self.cap_f(s)
            + lit::<T>(4.0) * p.mu * p.mu * gam * gam
    }

    /// `lim H(s)/s² = −(k²+bk) + 2μc + 4μ²`.
    pub fn cap_h_curvature(&self, p: &WaveParameters<T>) -> T {
        -p.m() + lit::<T>(2.0) * p.mu * p.c + lit::<T>(4.0) * p.mu * p.mu
    }

    /// Geometry near the pole at `sign·s₀`, parameterized by the distance `s̃ ≥ 0`.
    pub fn pole_frame(&self, s_tilde: T) -> Result<PoleFrame<T>> {
        if !self.is_compact() {
            return Err(Error::Domain("pole frame requires a compact surface".into()));
        }
        if s_tilde == T::zero() {
            return Err(Error::Domain("pole frame evaluated at the pole".into()));
        }
        let two = lit::<T>(2.0);
        let half = s_tilde / two;
        match self.kind {
            SurfaceKind::Sphere => {
                let sh = half.sin();
                let f1 = two * sh * sh;
                let cot = half.cos() / sh;
                Ok(PoleFrame {
                    gamma: s_tilde.sin(),
                    gamma_s: -s_tilde.cos(),
                    f1,
                    f: two - f1,
                    tilde_g: lit::<T>(-0.5) * cot / (sh * sh),
                })
            }
            _ => {
                let c = self.custom_ref();
                let s = self.s0 - s_tilde;
                let gamma = (c.gamma)(s);
                let gamma_s = (c.gamma_s)(s);
                let f1 = quad::kronrod15(|x| (c.gamma)(x), s, self.s0);
                let f = self.f_at_pole() - f1;
                let tilde_g = gamma_s * f * f / (gamma * gamma * gamma) - f / gamma;
                Ok(PoleFrame { gamma, gamma_s, f1, f, tilde_g })
            }
        }
    }

    /// First positive zero of `H` on `(0, min(s₀, 50)]`.
    pub fn s_one(&self, p: &WaveParameters<T>) -> Result<SOne<T>> {
        if !(self.cap_h_curvature(p) > T::zero()) {
            return Err(Error::Regime("H''(0) ≤ 0: H is not positive near s = 0".into()));
        }
        let end = self.s0.min(lit(OPEN_TABLE_END));
        let half = 2048usize;
        let mut grid: Vec<T> = Vec::with_capacity(2 * half);
        let lo = end * lit(1e-8);
        let ratio = (end / lo).ln();
        for i in 0..half {
            grid.push(lo * (ratio * from_usize(i) / from_usize(half - 1)).exp());
            grid.push(end * from_usize(i + 1) / from_usize(half));
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        grid.dedup();
        if let Some(last) = grid.last_mut() {
            *last = end;
        }
        let mut prev = T::zero();
        for &s in &grid {
            let h = self.cap_h(p, s);
            if h < T::zero() {
                let (mut a, mut b) = (prev, s);
                if a == T::zero() {
                    a = s * lit(0.5);
                }
                while (b - a) > lit::<T>(1e-12) * b {
                    let mid = (a + b) * lit(0.5);
                    if self.cap_h(p, mid) < T::zero() {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                return Ok(SOne { value: (a + b) * lit(0.5), sign_change: true });
            }
            prev = s;
        }
        Ok(SOne { value: T::infinity(), sign_change: false })
    }
}

/// Outcome of the `s₁` search: `value = +∞` with `sign_change = false`
/// means no sign change up to `min(s₀, 50)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SOne<T> {
    pub value: T,
    pub sign_change: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, k: f64, c: f64, b: f64) -> WaveParameters<f64> {
        WaveParameters::new(mu, k, c, b)
    }

    fn sine_custom() -> SurfaceProfile<f64> {
        SurfaceProfile::custom(Arc::new(f64::sin), Arc::new(f64::cos), -1.0, Some(std::f64::consts::PI)).unwrap()
    }

    #[test]
    fn sphere_reference_values() {
        let s = SurfaceProfile::<f64>::sphere();
        let (g, gs, f) = s.eval(std::f64::consts::FRAC_PI_2);
        assert!((g - 1.0).abs() < 1e-15 && gs.abs() < 1e-15 && (f - 1.0).abs() < 1e-15);
        let (g, gs, f) = s.eval(std::f64::consts::PI);
        assert!(g.abs() < 1e-15 && (gs + 1.0).abs() < 1e-15 && (f - 2.0).abs() < 1e-15);
        assert_eq!(SurfaceProfile::<f64>::pseudo_sphere().eval(0.0), (0.0, 1.0, 0.0));
    }

    #[test]
    fn tilde_g_small_and_mid() {
        let s = SurfaceProfile::<f64>::sphere();
        assert_eq!(s.tilde_g(0.0).unwrap(), 0.0);
        assert!((s.tilde_g(1e-6).unwrap() + 2.5e-7).abs() < 1e-13);
        assert!((s.tilde_g(std::f64::consts::FRAC_PI_2).unwrap() + 1.0).abs() < 1e-14);
        assert!(matches!(s.tilde_g(std::f64::consts::PI), Err(Error::Domain(_))));
        assert!(matches!(s.f_over_gamma(-std::f64::consts::PI), Err(Error::Domain(_))));
    }

    #[test]
    fn series_matches_closed_form_at_threshold() {
        for surf in [SurfaceProfile::<f64>::sphere(), SurfaceProfile::pseudo_sphere(), sine_custom()] {
            let p = params(3.0, 1.0, -1.0, -3.0);
            let x = SERIES_THRESHOLD;
            let ser = x * surf.series.tg.eval(x * x);
            let direct = surf.tilde_g_direct(x);
            assert!((ser - direct).abs() <= 1e-12 * direct.abs(), "{:?}", surf.kind());
            let gser = surf.cap_g(&p, x * (1.0 - 1e-15));
            let gdir = surf.cap_g_direct(&p, x);
            assert!((gser - gdir).abs() <= 1e-12 * gdir.abs());
        }
    }

    #[test]
    fn custom_sine_reproduces_sphere() {
        let c = sine_custom();
        let s = SurfaceProfile::<f64>::sphere();
        for i in 0..200 {
            let x = -7.0 + 0.0713 * i as f64;
            assert!((c.cap_f(x) - s.cap_f(x)).abs() < 5e-14, "F({x})");
        }
        assert!((c.f_at_pole() - 2.0).abs() < 1e-14, "{}", c.f_at_pole() - 2.0);
        let fr = c.pole_frame(1e-3).unwrap();
        let sr = s.pole_frame(1e-3).unwrap();
        assert!((fr.tilde_g / sr.tilde_g - 1.0).abs() < 1e-9);
        assert!((fr.f1 - sr.f1).abs() < 1e-16);
    }

    #[test]
    fn custom_rejects_bad_profiles() {
        let bad = SurfaceProfile::<f64>::custom(Arc::new(|x: f64| x.sin() + 0.1), Arc::new(f64::cos), -1.0, None);
        assert!(bad.is_err());
        let even = SurfaceProfile::<f64>::custom(Arc::new(|x: f64| x + x * x), Arc::new(|x| 1.0 + 2.0 * x), 0.0, None);
        assert!(even.is_err());
    }

    #[test]
    fn cap_g_values() {
        let s = SurfaceProfile::<f64>::sphere();
        let p = params(3.0, 1.0, -1.0, -3.0);
        assert!((s.cap_g(&p, std::f64::consts::FRAC_PI_2) + 3.5).abs() < 1e-14);
        assert!((s.cap_g(&p, std::f64::consts::PI) + 10.0).abs() < 1e-14);
        assert_eq!(s.cap_g(&p, 0.0), 0.0);
        assert!((s.cap_h(&p, std::f64::consts::PI) + 4.0).abs() < 1e-13);
        assert!((s.cap_h_curvature(&p) - 32.0).abs() < 1e-15);
    }

    #[test]
    fn pole_frame_consistent_with_direct() {
        let s = SurfaceProfile::<f64>::sphere();
        let st = 0.3;
        let fr = s.pole_frame(st).unwrap();
        let x = std::f64::consts::PI - st;
        assert!((fr.gamma - x.sin()).abs() < 1e-15);
        assert!((fr.f - s.cap_f(x)).abs() < 1e-14);
        assert!((fr.tilde_g - s.tilde_g(x).unwrap()).abs() < 1e-12 * fr.tilde_g.abs());
        assert!(SurfaceProfile::<f64>::pseudo_sphere().pole_frame(0.1).is_err());
    }

    #[test]
    fn s_one_reference() {
        let s = SurfaceProfile::<f64>::sphere();
        let p = params(3.0, 1.0, -1.0, -3.0);
        let r = s.s_one(&p).unwrap();
        assert!(r.sign_change && r.value > 0.0 && r.value < std::f64::consts::PI);
        assert!(s.cap_h(&p, r.value).abs() < 1e-10);
        let none = SurfaceProfile::<f64>::pseudo_sphere().s_one(&params(3.0, 1.0, 1.0, -3.0)).unwrap();
        assert!(!none.sign_change && none.value.is_infinite());
        assert!(matches!(s.s_one(&params(0.0, 1.0, 1.0, 1.0)), Err(Error::Regime(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let s = SurfaceProfile::<f32>::sphere();
        let p = WaveParameters::new(3.0f32, 1.0, -1.0, -3.0);
        assert!((s.cap_g(&p, std::f32::consts::FRAC_PI_2) + 3.5).abs() < 1e-5);
        assert!((s.tilde_g(1e-5).unwrap() + 2.5e-6).abs() < 1e-10);
    }
}
