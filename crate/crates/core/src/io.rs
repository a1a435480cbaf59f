//! CSV and JSON output, and re-validation of profile CSV files.
//!
//! Numbers are written with 17 significant digits so that files read back
//! bit-for-bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::odeint::{integrate, IntegrationConfig};
use crate::profile::{energy, reduced_rhs, ProfileState, ProfileTrajectory};
use crate::regimes::WaveParameters;
use crate::scalar::{lit, to_f64, Real};
use crate::selfsimilar::SelfSimilarTrajectory;
use crate::surface::SurfaceProfile;

pub const PROFILE_HEADER: [&str; 5] = ["a", "s", "s_a", "sigma", "energy"];
pub const SELFSIM_HEADER: [&str; 5] = ["r", "s", "s_r", "sigma", "H_residual"];
pub const FIELD_HEADER: [&str; 8] = ["t", "x", "y", "u0", "u1", "u2", "phi", "cone"];
pub const LOG_SINGULAR: &str = "LOG_SINGULAR";

/// 17 significant digits in scientific notation.
pub fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.16e}", to_f64(x))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// One row per accepted step of a hyperbolic profile.
pub fn write_profile_csv<W: Write, T: Real>(w: W, traj: &ProfileTrajectory<T>) -> Result<()> {
    let mu = traj.effective_params().mu;
    let rows = traj.knots().iter().map(|p| {
        [p.a, p.s, p.s_a, p.sigma, p.energy(mu)].iter().map(|v| fmt_num(*v)).collect()
    });
    write_rows(w, &PROFILE_HEADER, rows)
}

pub fn write_selfsim_csv<W: Write, T: Real>(w: W, traj: &SelfSimilarTrajectory<T>) -> Result<()> {
    let rows = traj.knots().into_iter().map(|st| {
        [st.r, st.s, st.s_r, st.sigma, traj.h_residual(&st)].iter().map(|v| fmt_num(*v)).collect()
    });
    write_rows(w, &SELFSIM_HEADER, rows)
}

pub fn write_field_csv<W: Write, T: Real>(w: W, grid: &FieldGrid<T>) -> Result<()> {
    let rows = grid.nodes.iter().map(|n| {
        let v = &n.value;
        let mut row: Vec<String> = [grid.t, n.x, n.y, v.u[0], v.u[1], v.u[2]].iter().map(|x| fmt_num(*x)).collect();
        row.push(v.phi.map_or_else(|| LOG_SINGULAR.to_string(), fmt_num));
        row.push(v.cone.tag().to_string());
        row
    });
    write_rows(w, &FIELD_HEADER, rows)
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, S: Serialize + ?Sized>(mut w: W, value: &S) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub a: f64,
    pub s: f64,
    pub s_a: f64,
    pub sigma: f64,
    pub energy: f64,
}

pub fn read_profile_csv<R: Read>(r: R) -> Result<Vec<ProfileRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(PROFILE_HEADER.iter().copied()) {
        return Err(Error::Config(format!("expected header {}", PROFILE_HEADER.join(","))));
    }
    rd.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub tol: f64,
    /// Data row (0-based) where the worst value occurs.
    pub row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, tol: f64, values: impl Iterator<Item = (usize, f64)>) -> Check {
    let mut worst = 0.0;
    let mut row = None;
    for (i, v) in values {
        if v.is_nan() || v > worst {
            worst = if v.is_nan() { f64::INFINITY } else { v };
            row = Some(i);
        }
    }
    Check { name: name.into(), passed: worst < tol, worst, tol, row }
}

/// Re-checks a profile CSV against the equations it claims to solve:
/// the σ identity, the energy column, and step-to-step consistency of
/// `(s, s_a)` and of the energy law under re-integration.
pub fn validate_profile_rows(
    surface: &SurfaceProfile<f64>,
    params: &WaveParameters<f64>,
    rows: &[ProfileRow],
    cfg: &IntegrationConfig<f64>,
) -> Result<ValidationReport> {
    if rows.len() < 2 {
        return Err(Error::Config("need at least two data rows".into()));
    }
    let state = |r: &ProfileRow| ProfileState { a: r.a, s: r.s, s_a: r.s_a, sigma: r.sigma };
    let finite = rows.iter().enumerate().map(|(i, r)| {
        let ok = [r.a, r.s, r.s_a, r.sigma, r.energy].iter().all(|v| v.is_finite()) && r.a > 0.0;
        (i, if ok { 0.0 } else { 1.0 })
    });
    let mut checks = vec![check("finite", 0.5, finite)];
    checks.push(check(
        "monotone_a",
        0.5,
        rows.windows(2).enumerate().map(|(i, w)| (i + 1, if w[1].a > w[0].a { 0.0 } else { 1.0 })),
    ));
    // scale-free, so that corrupted rows near the seed are still caught
    checks.push(check(
        "sigma_identity",
        1e-8,
        rows.iter().enumerate().map(|(i, r)| {
            let (gam, _, f) = surface.eval(r.s);
            let (x, y) = (r.a * gam * r.sigma, params.c * f);
            let scale = x.abs().max(y.abs());
            (i, if scale > 0.0 { (x + y).abs() / scale } else { 0.0 })
        }),
    ));
    checks.push(check(
        "energy_column",
        1e-9,
        rows.iter().enumerate().map(|(i, r)| {
            let e = energy(surface, params, &state(r));
            (i, (e - r.energy).abs() / (1.0 + e.abs()))
        }),
    ));
    if checks.iter().any(|c| !c.passed) {
        return Ok(ValidationReport { rows: rows.len(), checks });
    }
    let tight = IntegrationConfig { rtol: cfg.rtol * lit::<f64>(1e-2), atol: cfg.atol * lit::<f64>(1e-2), ..*cfg };
    let tol = (cfg.rtol * 1e4).max(1e-9);
    let mut step = Vec::with_capacity(rows.len());
    let mut law = Vec::with_capacity(rows.len());
    for (i, w) in rows.windows(2).enumerate() {
        let (l, r) = (&w[0], &w[1]);
        let rhs = |a: f64, y: &[f64; 3]| {
            [y[1], reduced_rhs(surface, params, a, y[0], y[1]), 2.0 * params.mu * a * surface.cap_f(y[0])]
        };
        let run = integrate(rhs, [l.s, l.s_a, 0.0], (l.a, r.a), &tight, &[]);
        let (ds, dl) = match run {
            Ok(tr) => {
                let y = tr.last().1;
                let scale = 1.0 + r.s.abs() + r.s_a.abs();
                let ds = ((y[0] - r.s).abs() + (y[1] - r.s_a).abs()) / scale;
                let dl = (r.energy - l.energy + y[2]).abs() / (1.0 + l.energy.abs());
                (ds, dl)
            }
            Err(_) => (f64::INFINITY, f64::INFINITY),
        };
        step.push((i + 1, ds));
        law.push((i + 1, dl));
    }
    checks.push(check("step_consistency", tol, step.into_iter()));
    checks.push(check("energy_law", tol, law.into_iter()));
    Ok(ValidationReport { rows: rows.len(), checks })
}
