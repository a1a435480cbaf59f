//! Adaptive explicit Runge–Kutta integration (DOP853) with dense output and
//! event location.
//!
//! The state is a fixed-size array `[T; N]`; the right-hand side is any
//! `FnMut(t, &y) -> y'`. With [`IntegrationConfig::log_time`] the problem is
//! integrated in `τ = ln t` (only for `t > 0`), which keeps step sizes
//! proportional to `t` near a singular origin. Every public time argument
//! and every stored time is in the original variable.

mod dop853;

use std::fmt;

use crate::error::Error;
use crate::scalar::{lit, Real};
use dop853::*;

/// Step-size control and guard settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on `|h|` in the integration variable.
    pub max_step: T,
    /// Terminate with [`Termination::BlowUp`] once `|y|∞` exceeds this.
    pub blowup_norm: T,
    /// Attempted-step budget.
    pub max_steps: usize,
    /// Integrate in `τ = ln t`.
    pub log_time: bool,
    /// First trial step in the integration variable; estimated when `None`.
    pub initial_step: Option<T>,
}

impl<T: Real> Default for IntegrationConfig<T> {
    fn default() -> Self {
        IntegrationConfig {
            rtol: lit(1e-10),
            atol: lit(1e-12),
            max_step: T::infinity(),
            blowup_norm: lit(1e8),
            max_steps: 10_000_000,
            log_time: false,
            initial_step: None,
        }
    }
}

impl<T: Real> IntegrationConfig<T> {
    pub fn with_tolerances(rtol: T, atol: T) -> Self {
        IntegrationConfig { rtol, atol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rtol > T::zero() && self.atol > T::zero()) {
            return Err(Error::Config("rtol and atol must be positive".into()));
        }
        if !(self.blowup_norm > T::zero()) || !(self.max_step > T::zero()) {
            return Err(Error::Config("blowup_norm and max_step must be positive".into()));
        }
        Ok(())
    }
}

/// Why an integration stopped without error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    Event(String),
    BlowUp,
    StepLimit,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::ReachedEnd => write!(f, "ReachedEnd"),
            Termination::Event(name) => write!(f, "Event({name})"),
            Termination::BlowUp => write!(f, "BlowUp"),
            Termination::StepLimit => write!(f, "StepLimit"),
        }
    }
}

/// Scalar event function; a root is any sign change along the solution.
pub struct Event<'a, T, const N: usize> {
    pub name: String,
    pub terminal: bool,
    pub g: Box<dyn Fn(T, &[T; N]) -> T + 'a>,
}

impl<'a, T, const N: usize> Event<'a, T, N> {
    pub fn new(name: &str, terminal: bool, g: impl Fn(T, &[T; N]) -> T + 'a) -> Self {
        Event { name: name.to_string(), terminal, g: Box::new(g) }
    }
}

/// A located event root.
#[derive(Debug, Clone, PartialEq)]
pub struct EventHit<T, const N: usize> {
    pub name: String,
    pub t: T,
    pub y: [T; N],
}

/// Hard integration failures, carrying the last accepted state.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegrationError<T, const N: usize> {
    NonFinite { t: T, y: [T; N] },
    StepSizeUnderflow { t: T, y: [T; N] },
    Config(String),
}

impl<T: Real, const N: usize> fmt::Display for IntegrationError<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrationError::NonFinite { t, y } => {
                write!(f, "non-finite right-hand side near t={t:e}, last state {y:?}")
            }
            IntegrationError::StepSizeUnderflow { t, y } => {
                write!(f, "step size underflow at t={t:e}, last state {y:?}")
            }
            IntegrationError::Config(m) => write!(f, "{m}"),
        }
    }
}

impl<T: Real, const N: usize> From<IntegrationError<T, N>> for Error {
    fn from(e: IntegrationError<T, N>) -> Self {
        match e {
            IntegrationError::Config(m) => Error::Config(m),
            other => Error::Integration(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
struct DenseStep<T, const N: usize> {
    x0: T,
    h: T,
    cont: [[T; N]; 8],
}

impl<T: Real, const N: usize> DenseStep<T, N> {
    fn eval(&self, x: T) -> [T; N] {
        let s = (x - self.x0) / self.h;
        let s1 = T::one() - s;
        let c = &self.cont;
        let mut out = [T::zero(); N];
        for i in 0..N {
            let conpar = c[4][i] + s * (c[5][i] + s1 * (c[6][i] + s * c[7][i]));
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * conpar)));
        }
        out
    }
}

/// Accepted steps with dense output between consecutive knots.
#[derive(Debug, Clone)]
pub struct Trajectory<T, const N: usize> {
    xs: Vec<T>,
    ys: Vec<[T; N]>,
    steps: Vec<DenseStep<T, N>>,
    log_time: bool,
    termination: Termination,
    events: Vec<EventHit<T, N>>,
    rejected: usize,
}

impl<T: Real, const N: usize> Trajectory<T, N> {
    fn to_t(&self, x: T) -> T {
        if self.log_time {
            x.exp()
        } else {
            x
        }
    }

    fn to_x(&self, t: T) -> T {
        if self.log_time {
            t.ln()
        } else {
            t
        }
    }

    /// Number of knots (initial point plus accepted steps).
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn t(&self, i: usize) -> T {
        self.to_t(self.xs[i])
    }

    pub fn y(&self, i: usize) -> [T; N] {
        self.ys[i]
    }

    pub fn t_start(&self) -> T {
        self.t(0)
    }

    pub fn t_end(&self) -> T {
        self.t(self.len() - 1)
    }

    pub fn last(&self) -> (T, [T; N]) {
        (self.t_end(), self.ys[self.len() - 1])
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.xs.iter().map(move |x| self.to_t(*x))
    }

    pub fn states(&self) -> &[[T; N]] {
        &self.ys
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn events(&self) -> &[EventHit<T, N>] {
        &self.events
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn is_log_time(&self) -> bool {
        self.log_time
    }

    fn forward(&self) -> bool {
        self.xs.len() < 2 || self.xs[1] > self.xs[0]
    }

    /// Index of the step whose interval contains integration variable `x`.
    fn step_index(&self, x: T) -> Option<usize> {
        let n = self.xs.len();
        if n < 2 {
            return None;
        }
        let (lo, hi) = if self.forward() { (self.xs[0], self.xs[n - 1]) } else { (self.xs[n - 1], self.xs[0]) };
        if !(x >= lo && x <= hi) {
            return None;
        }
        let fwd = self.forward();
        let idx = self.xs.partition_point(|v| if fwd { *v <= x } else { *v >= x });
        Some(idx.saturating_sub(1).min(n - 2))
    }

    /// Dense-output state at `t`; `None` outside the integrated range.
    pub fn eval(&self, t: T) -> Option<[T; N]> {
        if self.xs.len() == 1 {
            return (t == self.t(0)).then(|| self.ys[0]);
        }
        let x = self.to_x(t);
        let i = self.step_index(x)?;
        if x == self.xs[i] {
            return Some(self.ys[i]);
        }
        if x == self.xs[i + 1] {
            return Some(self.ys[i + 1]);
        }
        Some(self.steps[i].eval(x))
    }

    /// Knot intervals `(t_i, t_{i+1})` in the original variable.
    pub fn intervals(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.windows(2).map(move |w| (self.to_t(w[0]), self.to_t(w[1])))
    }
}

struct Tableau<T> {
    c: [T; 17],
    rows: Vec<Vec<(usize, T)>>,
    b: Vec<(usize, T)>,
    er: Vec<(usize, T)>,
    bhh: [T; 3],
    extra: Vec<Vec<(usize, T)>>,
    d: Vec<Vec<(usize, T)>>,
}

fn row<T: Real>(r: &[(usize, f64)]) -> Vec<(usize, T)> {
    r.iter().map(|(i, v)| (*i, lit(*v))).collect()
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let mut c = [T::zero(); 17];
        for (i, v) in [
            (2, C2),
            (3, C3),
            (4, C4),
            (5, C5),
            (6, C6),
            (7, C7),
            (8, C8),
            (9, C9),
            (10, C10),
            (11, C11),
            (12, 1.0),
            (13, 1.0),
            (14, C14),
            (15, C15),
            (16, C16),
        ] {
            c[i] = lit(v);
        }
        let rows = vec![
            row(&[(1, A21)]),
            row(&[(1, A31), (2, A32)]),
            row(&[(1, A41), (3, A43)]),
            row(&[(1, A51), (3, A53), (4, A54)]),
            row(&[(1, A61), (4, A64), (5, A65)]),
            row(&[(1, A71), (4, A74), (5, A75), (6, A76)]),
            row(&[(1, A81), (4, A84), (5, A85), (6, A86), (7, A87)]),
            row(&[(1, A91), (4, A94), (5, A95), (6, A96), (7, A97), (8, A98)]),
            row(&[(1, A101), (4, A104), (5, A105), (6, A106), (7, A107), (8, A108), (9, A109)]),
            row(&[(1, A111), (4, A114), (5, A115), (6, A116), (7, A117), (8, A118), (9, A119), (10, A1110)]),
            row(&[
                (1, A121),
                (4, A124),
                (5, A125),
                (6, A126),
                (7, A127),
                (8, A128),
                (9, A129),
                (10, A1210),
                (11, A1211),
            ]),
        ];
        let b = row(&[(1, B1), (6, B6), (7, B7), (8, B8), (9, B9), (10, B10), (11, B11), (12, B12)]);
        let er = row(&[(1, ER1), (6, ER6), (7, ER7), (8, ER8), (9, ER9), (10, ER10), (11, ER11), (12, ER12)]);
        let extra = vec![
            row(&[(1, A141), (7, A147), (8, A148), (9, A149), (10, A1410), (11, A1411), (12, A1412), (13, A1413)]),
            row(&[(1, A151), (6, A156), (7, A157), (8, A158), (11, A1511), (12, A1512), (13, A1513), (14, A1514)]),
            row(&[(1, A161), (6, A166), (7, A167), (8, A168), (9, A169), (13, A1613), (14, A1614), (15, A1615)]),
        ];
        let d = vec![
            row(&[
                (1, D41),
                (6, D46),
                (7, D47),
                (8, D48),
                (9, D49),
                (10, D410),
                (11, D411),
                (12, D412),
                (13, D413),
                (14, D414),
                (15, D415),
                (16, D416),
            ]),
            row(&[
                (1, D51),
                (6, D56),
                (7, D57),
                (8, D58),
                (9, D59),
                (10, D510),
                (11, D511),
                (12, D512),
                (13, D513),
                (14, D514),
                (15, D515),
                (16, D516),
            ]),
            row(&[
                (1, D61),
                (6, D66),
                (7, D67),
                (8, D68),
                (9, D69),
                (10, D610),
                (11, D611),
                (12, D612),
                (13, D613),
                (14, D614),
                (15, D615),
                (16, D616),
            ]),
            row(&[
                (1, D71),
                (6, D76),
                (7, D77),
                (8, D78),
                (9, D79),
                (10, D710),
                (11, D711),
                (12, D712),
                (13, D713),
                (14, D714),
                (15, D715),
                (16, D716),
            ]),
        ];
        Tableau { c, rows, b, er, bhh: [lit(BHH1), lit(BHH2), lit(BHH3)], extra, d }
    }
}

fn combo<T: Real, const N: usize>(k: &[[T; N]; 17], terms: &[(usize, T)]) -> [T; N] {
    let mut out = [T::zero(); N];
    for (j, w) in terms {
        for i in 0..N {
            out[i] = out[i] + *w * k[*j][i];
        }
    }
    out
}

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, d: &[T; N]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] = out[i] + h * d[i];
    }
    out
}

fn all_finite<T: Real, const N: usize>(y: &[T; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn inf_norm<T: Real, const N: usize>(y: &[T; N]) -> T {
    y.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Integrates `y' = rhs(t, y)` from `t_range.0` to `t_range.1`.
pub fn integrate<T, F, const N: usize>(
    mut rhs: F,
    y0: [T; N],
    t_range: (T, T),
    cfg: &IntegrationConfig<T>,
    events: &[Event<'_, T, N>],
) -> Result<Trajectory<T, N>, IntegrationError<T, N>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    cfg.validate().map_err(|e| IntegrationError::Config(e.to_string()))?;
    let (t0, t1) = t_range;
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(IntegrationError::Config("integration range must be finite".into()));
    }
    if cfg.log_time && !(t0 > T::zero() && t1 > T::zero()) {
        return Err(IntegrationError::Config("log-time integration needs t > 0".into()));
    }
    let log_time = cfg.log_time;
    let to_t = |x: T| if log_time { x.exp() } else { x };
    let (x0, x1) = if log_time { (t0.ln(), t1.ln()) } else { (t0, t1) };
    let mut f = |x: T, y: &[T; N]| -> [T; N] {
        if log_time {
            let t = x.exp();
            rhs(t, y).map(|v| v * t)
        } else {
            rhs(x, y)
        }
    };

    let mut traj = Trajectory {
        xs: vec![x0],
        ys: vec![y0],
        steps: Vec::new(),
        log_time,
        termination: Termination::ReachedEnd,
        events: Vec::new(),
        rejected: 0,
    };
    if x0 == x1 {
        return Ok(traj);
    }
    if !all_finite(&y0) {
        return Err(IntegrationError::NonFinite { t: t0, y: y0 });
    }

    let tab = Tableau::<T>::new();
    let dir = if x1 > x0 { T::one() } else { -T::one() };
    let n_t: T = lit(N as f64);
    let safe: T = lit(0.9);
    let facc1: T = lit(1.0 / 0.333);
    let facc2: T = lit(1.0 / 6.0);
    let expo1: T = lit(1.0 / 8.0);
    let hmax = cfg.max_step.min((x1 - x0).abs());
    let (rtol, atol) = (cfg.rtol, cfg.atol);

    let mut k = [[T::zero(); N]; 17];
    let mut x = x0;
    let mut y = y0;
    k[1] = f(x, &y);
    if !all_finite(&k[1]) {
        return Err(IntegrationError::NonFinite { t: t0, y: y0 });
    }

    let mut h = match cfg.initial_step {
        Some(h) => h.abs().min(hmax) * dir,
        None => initial_step(&mut f, x, &y, &k[1], dir, hmax, rtol, atol),
    };

    let mut g_prev: Vec<T> = events.iter().map(|e| (e.g)(t0, &y0)).collect();
    let mut last_rejected = false;
    let mut nonfinite_streak = 0usize;
    let mut nonfinite_seen = false;
    let mut attempts = 0usize;

    loop {
        if attempts >= cfg.max_steps {
            traj.termination = Termination::StepLimit;
            return Ok(traj);
        }
        attempts += 1;
        if h.abs() <= T::epsilon() * lit(16.0) * x.abs().max(T::one()) {
            if nonfinite_seen {
                return Err(IntegrationError::NonFinite { t: to_t(x), y });
            }
            return Err(IntegrationError::StepSizeUnderflow { t: to_t(x), y });
        }
        let mut last = false;
        if (x + h - x1) * dir >= T::zero() {
            h = x1 - x;
            last = true;
        }

        for (s, terms) in tab.rows.iter().enumerate() {
            let stage = s + 2;
            let yi = axpy(&y, h, &combo(&k, terms));
            k[stage] = f(x + tab.c[stage] * h, &yi);
        }
        let incr = combo(&k, &tab.b);
        let y_new = axpy(&y, h, &incr);
        let finite = (2..=12).all(|j| all_finite(&k[j])) && all_finite(&y_new);
        if !finite {
            nonfinite_streak += 1;
            nonfinite_seen = true;
            traj.rejected += 1;
            if nonfinite_streak > 60 {
                return Err(IntegrationError::NonFinite { t: to_t(x), y });
            }
            h = h * lit(0.5);
            last_rejected = true;
            continue;
        }

        let er = combo(&k, &tab.er);
        let mut err = T::zero();
        let mut err2 = T::zero();
        for i in 0..N {
            let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
            let e2 = incr[i] - tab.bhh[0] * k[1][i] - tab.bhh[1] * k[9][i] - tab.bhh[2] * k[12][i];
            err2 = err2 + (e2 / sk) * (e2 / sk);
            err = err + (er[i] / sk) * (er[i] / sk);
        }
        let mut deno = err + lit::<T>(0.01) * err2;
        if deno <= T::zero() {
            deno = T::one();
        }
        let err = h.abs() * err * (T::one() / (n_t * deno)).sqrt();
        let fac11 = err.powf(expo1);
        let fac = facc2.max(facc1.min(fac11 / safe));
        let mut h_new = h / fac;

        if err <= T::one() {
            let x_new = x + h;
            k[13] = f(x_new, &y_new);
            if !all_finite(&k[13]) {
                nonfinite_streak += 1;
                nonfinite_seen = true;
                traj.rejected += 1;
                if nonfinite_streak > 60 {
                    return Err(IntegrationError::NonFinite { t: to_t(x), y });
                }
                h = h * lit(0.5);
                last_rejected = true;
                continue;
            }
            nonfinite_streak = 0;

            let dense = dense_step(&mut f, &tab, &mut k, x, h, &y, &y_new);
            traj.steps.push(dense);
            traj.xs.push(x_new);
            traj.ys.push(y_new);

            // event scan on the accepted step
            let mut hits: Vec<(T, usize, [T; N])> = Vec::new();
            for (ei, ev) in events.iter().enumerate() {
                let g_new = (ev.g)(to_t(x_new), &y_new);
                let g_old = g_prev[ei];
                let crossed = (g_old < T::zero() && g_new >= T::zero()) || (g_old > T::zero() && g_new <= T::zero());
                if crossed {
                    let step = traj.steps.last().expect("dense step present");
                    let (xr, yr) = locate_root(step, ev, to_t, x, x_new, g_old);
                    hits.push((xr, ei, yr));
                }
                if g_new != T::zero() {
                    g_prev[ei] = g_new;
                }
            }
            hits.sort_by(|a, b| ((a.0 - b.0) * dir).partial_cmp(&T::zero()).unwrap_or(std::cmp::Ordering::Equal));
            let mut stop = None;
            for (xr, ei, yr) in hits {
                if stop.is_some() {
                    break;
                }
                traj.events.push(EventHit { name: events[ei].name.clone(), t: to_t(xr), y: yr });
                if events[ei].terminal {
                    stop = Some((xr, yr, events[ei].name.clone()));
                }
            }
            if let Some((xr, yr, name)) = stop {
                let n = traj.xs.len();
                traj.xs[n - 1] = xr;
                traj.ys[n - 1] = yr;
                traj.termination = Termination::Event(name);
                return Ok(traj);
            }

            if inf_norm(&y_new) > cfg.blowup_norm {
                traj.termination = Termination::BlowUp;
                return Ok(traj);
            }
            if last {
                traj.termination = Termination::ReachedEnd;
                return Ok(traj);
            }
            k[1] = k[13];
            x = x_new;
            y = y_new;
            if h_new.abs() > hmax {
                h_new = hmax * dir;
            }
            if last_rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            last_rejected = false;
        } else {
            h_new = h / facc1.min(fac11 / safe);
            last_rejected = true;
            traj.rejected += 1;
        }
        h = h_new;
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_step<T: Real, const N: usize>(
    f: &mut impl FnMut(T, &[T; N]) -> [T; N],
    x: T,
    y: &[T; N],
    f0: &[T; N],
    dir: T,
    hmax: T,
    rtol: T,
    atol: T,
) -> T {
    let mut dnf = T::zero();
    let mut dny = T::zero();
    for i in 0..N {
        let sk = atol + rtol * y[i].abs();
        dnf = dnf + (f0[i] / sk) * (f0[i] / sk);
        dny = dny + (y[i] / sk) * (y[i] / sk);
    }
    let mut h = if dnf <= lit(1e-10) || dny <= lit(1e-10) {
        lit(1e-6)
    } else {
        (dny / dnf).sqrt() * lit(0.01)
    };
    h = h.min(hmax) * dir;
    let y1 = axpy(y, h, f0);
    let f1 = f(x + h, &y1);
    let mut der2 = T::zero();
    for i in 0..N {
        let sk = atol + rtol * y[i].abs();
        let d = (f1[i] - f0[i]) / sk;
        der2 = der2 + d * d;
    }
    let der2 = der2.sqrt() / h.abs();
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if !der12.is_finite() {
        h.abs() * lit(1e-3)
    } else if der12 <= lit(1e-15) {
        lit::<T>(1e-6).max(h.abs() * lit(1e-3))
    } else {
        (lit::<T>(0.01) / der12).powf(lit(1.0 / 8.0))
    };
    (h.abs() * lit(100.0)).min(h1).min(hmax) * dir
}

#[allow(clippy::needless_range_loop)]
fn dense_step<T: Real, const N: usize>(
    f: &mut impl FnMut(T, &[T; N]) -> [T; N],
    tab: &Tableau<T>,
    k: &mut [[T; N]; 17],
    x: T,
    h: T,
    y: &[T; N],
    y_new: &[T; N],
) -> DenseStep<T, N> {
    let mut cont = [[T::zero(); N]; 8];
    for i in 0..N {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k[1][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[13][i] - bspl;
    }
    for (j, terms) in tab.extra.iter().enumerate() {
        let stage = 14 + j;
        let yi = axpy(y, h, &combo(k, terms));
        k[stage] = f(x + tab.c[stage] * h, &yi);
    }
    for (j, terms) in tab.d.iter().enumerate() {
        let v = combo(k, terms);
        for i in 0..N {
            cont[4 + j][i] = h * v[i];
        }
    }
    DenseStep { x0: x, h, cont }
}

fn locate_root<T: Real, const N: usize>(
    step: &DenseStep<T, N>,
    ev: &Event<'_, T, N>,
    to_t: impl Fn(T) -> T,
    x_lo: T,
    x_hi: T,
    g_lo: T,
) -> (T, [T; N]) {
    let (mut a, mut b) = (x_lo, x_hi);
    let neg_lo = g_lo < T::zero();
    let tol = lit::<T>(1e-13);
    for _ in 0..200 {
        let scale = to_t(a).abs().max(T::one());
        if (to_t(b) - to_t(a)).abs() <= tol * scale {
            break;
        }
        let mid = a + (b - a) * lit(0.5);
        if mid == a || mid == b {
            break;
        }
        let ym = step.eval(mid);
        let gm = (ev.g)(to_t(mid), &ym);
        if (gm < T::zero()) == neg_lo && gm != T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    (b, step.eval(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let cfg = IntegrationConfig::<f64>::default();
        let tr = integrate(|_t, y: &[f64; 1]| [-y[0]], [1.0], (0.0, 1.0), &cfg, &[]).unwrap();
        assert_eq!(tr.termination(), &Termination::ReachedEnd);
        assert!((tr.last().1[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(tr.t_end(), 1.0);
    }

    #[test]
    fn harmonic_energy_over_hundred_periods() {
        let cfg = IntegrationConfig::<f64>::default();
        let tend = 200.0 * std::f64::consts::PI;
        let tr = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], (0.0, tend), &cfg, &[]).unwrap();
        let worst = tr.states().iter().map(|y| (0.5 * (y[0] * y[0] + y[1] * y[1]) - 0.5).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "drift {worst}");
    }

    #[test]
    fn event_on_circle() {
        // the root is only as accurate as the solution itself
        let cfg = IntegrationConfig::<f64>::with_tolerances(1e-13, 1e-15);
        let ev = [Event::new("y1", true, |_t, y: &[f64; 2]| y[0])];
        let tr = integrate(|_t, y: &[f64; 2]| [-y[1], y[0]], [1.0, 0.0], (0.0, 3.0), &cfg, &ev).unwrap();
        assert_eq!(tr.termination(), &Termination::Event("y1".into()));
        assert!((tr.t_end() - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{}", tr.t_end());
    }

    #[test]
    fn non_terminal_events_are_recorded_in_order() {
        let cfg = IntegrationConfig::<f64>::default();
        let ev = [Event::new("zero", false, |_t, y: &[f64; 2]| y[0])];
        let tr = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], (0.0, 20.0), &cfg, &ev).unwrap();
        let ts: Vec<f64> = tr.events().iter().map(|e| e.t).collect();
        assert_eq!(ts.len(), 6);
        for (i, t) in ts.iter().enumerate() {
            assert!((t - (i + 1) as f64 * std::f64::consts::PI).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_output_matches_solution_and_knots() {
        let cfg = IntegrationConfig::<f64>::default();
        let tr = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], (0.0, 10.0), &cfg, &[]).unwrap();
        for i in 0..200 {
            let t = 0.05 * i as f64;
            assert!((tr.eval(t).unwrap()[0] - t.sin()).abs() < 1e-9);
        }
        for i in 1..tr.len() - 1 {
            let left = tr.steps[i - 1].eval(tr.xs[i]);
            assert!((left[0] - tr.ys[i][0]).abs() < 1e-14);
        }
        assert!(tr.eval(10.5).is_none());
    }

    #[test]
    fn log_time_handles_singular_scale() {
        // y' = 2y/t has y = t²
        let cfg = IntegrationConfig { log_time: true, blowup_norm: 1e20, ..IntegrationConfig::<f64>::default() };
        let tr = integrate(|t, y: &[f64; 1]| [2.0 * y[0] / t], [1.0], (1e-6, 10.0), &cfg, &[]).unwrap();
        assert!((tr.last().1[0] / 1e14 - 1.0).abs() < 1e-9);
        assert!((tr.eval(1e-3).unwrap()[0] / 1e6 - 1.0).abs() < 1e-9);
        assert!(tr.len() < 400);
    }

    #[test]
    fn backward_integration() {
        let cfg = IntegrationConfig::<f64>::default();
        let tr = integrate(|_t, y: &[f64; 1]| [y[0]], [1.0], (0.0, -2.0), &cfg, &[]).unwrap();
        assert!((tr.last().1[0] - (-2.0f64).exp()).abs() < 1e-10);
        assert!((tr.eval(-1.0).unwrap()[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_and_step_limit() {
        let cfg = IntegrationConfig::<f64>::default();
        let tr = integrate(|_t, y: &[f64; 1]| [y[0] * y[0]], [1.0], (0.0, 2.0), &cfg, &[]).unwrap();
        assert_eq!(tr.termination(), &Termination::BlowUp);
        let tight = IntegrationConfig { max_steps: 5, ..cfg };
        let tr = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], (0.0, 1e3), &tight, &[]).unwrap();
        assert_eq!(tr.termination(), &Termination::StepLimit);
    }

    #[test]
    fn nan_reports_last_valid_state() {
        let cfg = IntegrationConfig::<f64>::default();
        let err = integrate(|t, y: &[f64; 1]| [if t > 0.5 { f64::NAN } else { y[0] }], [1.0], (0.0, 1.0), &cfg, &[])
            .unwrap_err();
        match err {
            IntegrationError::NonFinite { t, y } => {
                assert!(t <= 0.5 && y[0].is_finite());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eighth_order_convergence_with_fixed_steps() {
        let mut errs = Vec::new();
        for h in [0.5, 0.25, 0.125] {
            let cfg = IntegrationConfig {
                rtol: 1.0,
                atol: 1.0,
                max_step: h,
                initial_step: Some(h),
                ..IntegrationConfig::<f64>::default()
            };
            let tr = integrate(|_t, y: &[f64; 1]| [-y[0]], [1.0], (0.0, 10.0), &cfg, &[]).unwrap();
            errs.push((tr.last().1[0] - (-10.0f64).exp()).abs());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 7.0 && order < 9.5, "observed order {order}");
        }
    }

    #[test]
    fn deterministic() {
        let cfg = IntegrationConfig::<f64>::default();
        let run = || integrate(|t, y: &[f64; 2]| [y[1], -y[0] * t.cos()], [1.0, 0.0], (0.0, 30.0), &cfg, &[]).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.xs, b.xs);
        assert_eq!(a.ys, b.ys);
    }

    #[test]
    fn single_precision_runs() {
        let cfg = IntegrationConfig::<f32>::with_tolerances(1e-5, 1e-7);
        let tr = integrate(|_t, y: &[f32; 1]| [-y[0]], [1.0f32], (0.0, 1.0), &cfg, &[]).unwrap();
        assert!((tr.last().1[0] - (-1.0f32).exp()).abs() < 1e-5);
    }
}
