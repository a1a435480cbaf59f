//! Parameter classification around the invariant plane `{a = 0, s = 0}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::{lit, Real};
use crate::surface::SurfaceProfile;

/// Equivariance parameters `(μ, k, c, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParameters<T> {
    pub mu: T,
    pub k: T,
    pub c: T,
    pub b: T,
}

impl<T: Real> WaveParameters<T> {
    pub fn new(mu: T, k: T, c: T, b: T) -> Self {
        WaveParameters { mu, k, c, b }
    }

    /// `k² + bk`, whose sign decides the local structure.
    pub fn m(&self) -> T {
        self.k * self.k + self.b * self.k
    }

    /// Hölder exponent `κ = √(−(k²+bk) − c²/4)`; `None` outside Case I.
    pub fn kappa(&self) -> Option<T> {
        let k2 = -self.m() - self.c * self.c * lit(0.25);
        (k2 > T::zero()).then(|| k2.sqrt())
    }

    pub fn is_finite(&self) -> bool {
        self.mu.is_finite() && self.k.is_finite() && self.c.is_finite() && self.b.is_finite()
    }
}

/// Parameters governing the vertical cones: the same profile equation with `μ ↦ −μ`.
pub fn vertical_params<T: Real>(p: &WaveParameters<T>) -> WaveParameters<T> {
    WaveParameters { mu: -p.mu, ..*p }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeCase {
    CaseI,
    CaseII,
    CaseIII,
    #[serde(rename = "Degenerate_b_eq_minus_k")]
    DegenerateBEqMinusK,
    #[serde(rename = "Positive_k2_bk")]
    PositiveK2Bk,
    /// `k = 0`: only the radial probe applies.
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport<T> {
    pub case: RegimeCase,
    /// `κ` in Case I, zero otherwise.
    pub kappa: T,
    /// `√(−(k²+bk))` when `k²+bk ≤ 0`.
    pub r0: Option<T>,
    pub cos_gamma_plus: Option<T>,
    pub jacobian_eigenvalues: Option<[T; 4]>,
    pub monodromy_lambda: Option<T>,
}

fn case_of<T: Real>(p: &WaveParameters<T>) -> RegimeCase {
    let m = p.m();
    let c2 = p.c * p.c;
    if p.k == T::zero() {
        RegimeCase::Radial
    } else if p.b == -p.k {
        RegimeCase::DegenerateBEqMinusK
    } else if m > T::zero() {
        RegimeCase::PositiveK2Bk
    } else {
        let gap = c2 + lit::<T>(4.0) * m;
        let scale = c2.max(lit::<T>(4.0) * m.abs());
        if gap.abs() <= lit::<T>(64.0) * T::epsilon() * scale {
            RegimeCase::CaseII
        } else if gap < T::zero() {
            RegimeCase::CaseI
        } else {
            RegimeCase::CaseIII
        }
    }
}

/// Right-hand side of the log-time system in `(s, r, γ, a)` with `τ = log a`.
pub fn tau_rhs<T: Real>(surface: &SurfaceProfile<T>, p: &WaveParameters<T>, y: [T; 4]) -> [T; 4] {
    let [s, r, g, a] = y;
    let (gam, gs, _) = surface.eval(s);
    let gsg = surface.g_s_over_gamma(p, s);
    let mua2 = p.mu * a * a;
    [
        r * gam * g.cos(),
        (-gs * r * r - gsg + mua2) * g.cos(),
        (-gs * r + gsg / r - mua2 / r) * g.sin() - p.c,
        a,
    ]
}

/// Diagonal of the log-time Jacobian at `(0, r₀, γ₊, 0)`, which is exactly
/// diagonal there because every off-diagonal entry carries `Γ(0)`,
/// `∂_s(G_s/Γ)(0)` or `r₀² + k² + bk`.
fn fixed_point_spectrum<T: Real>(p: &WaveParameters<T>, r0: T, cos_gp: T) -> [T; 4] {
    let m = p.m();
    [r0 * cos_gp, lit::<T>(-2.0) * r0 * cos_gp, (m / r0 - r0) * cos_gp, T::one()]
}

pub fn classify<T: Real>(p: &WaveParameters<T>) -> Result<RegimeReport<T>> {
    if !p.is_finite() {
        return Err(Error::Config("non-finite parameters".into()));
    }
    let case = case_of(p);
    let m = p.m();
    let r0 = (m <= T::zero()).then(|| (-m).sqrt());
    let mut report = RegimeReport {
        case,
        kappa: T::zero(),
        r0,
        cos_gamma_plus: None,
        jacobian_eigenvalues: None,
        monodromy_lambda: None,
    };
    match case {
        RegimeCase::CaseI => {
            let r0 = r0.unwrap_or(T::zero());
            let cg = (T::one() + p.c * p.c / (lit::<T>(4.0) * m)).sqrt();
            report.kappa = p.kappa().unwrap_or(T::zero());
            report.cos_gamma_plus = Some(cg);
            report.jacobian_eigenvalues = Some(fixed_point_spectrum(p, r0, cg));
        }
        RegimeCase::CaseII => {
            report.cos_gamma_plus = Some(T::zero());
            report.jacobian_eigenvalues = Some([T::zero(), T::zero(), T::zero(), T::one()]);
        }
        RegimeCase::CaseIII => {
            report.monodromy_lambda = Some(monodromy_lambda(p)?);
        }
        _ => {}
    }
    Ok(report)
}

/// Nontrivial `a`-multiplier of the Case III invariant circle,
/// `exp(−∫₀^{2π} dγ / (2r₀ sin γ + c))`.
pub fn monodromy_lambda<T: Real>(p: &WaveParameters<T>) -> Result<T> {
    if case_of(p) != RegimeCase::CaseIII {
        return Err(Error::Regime(format!(
            "monodromy requires Case III (c² > −4(k²+bk) > 0), got {:?}",
            case_of(p)
        )));
    }
    let amp = lit::<T>(2.0) * (-p.m()).sqrt();
    let c = p.c;
    let two_pi = lit::<T>(2.0) * T::PI();
    let tol = lit::<T>(1e-14).max(T::epsilon() * lit(64.0));
    let q = quad::adaptive(|g: T| T::one() / (amp * g.sin() + c), T::zero(), two_pi, T::zero(), tol, 20_000)?;
    Ok((-q.value).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(mu: f64, k: f64, c: f64, b: f64) -> WaveParameters<f64> {
        WaveParameters::new(mu, k, c, b)
    }

    #[test]
    fn reference_case_one() {
        let r = classify(&p(-1.0, 1.0, 1.0, -3.0)).unwrap();
        assert_eq!(r.case, RegimeCase::CaseI);
        assert!((r.kappa - 1.75f64.sqrt()).abs() < 1e-15);
        assert!((r.r0.unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.cos_gamma_plus.unwrap() - (7.0f64 / 8.0).sqrt()).abs() < 1e-15);
        let e = r.jacobian_eigenvalues.unwrap();
        assert!((e[1] + 2.0 * r.kappa).abs() < 1e-14 && (e[2] - e[1]).abs() < 1e-14);
    }

    #[test]
    fn equality_is_case_two() {
        let r = classify(&p(1.0, 1.0, 8f64.sqrt(), -3.0)).unwrap();
        assert_eq!(r.case, RegimeCase::CaseII);
        assert_eq!(r.jacobian_eigenvalues, Some([0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn special_cases() {
        assert_eq!(classify(&p(1.0, 2.0, 1.0, -2.0)).unwrap().case, RegimeCase::DegenerateBEqMinusK);
        assert_eq!(classify(&p(1.0, 1.0, 1.0, 3.0)).unwrap().case, RegimeCase::PositiveK2Bk);
        assert_eq!(classify(&p(1.0, 0.0, 1.0, 3.0)).unwrap().case, RegimeCase::Radial);
        assert!(classify(&p(f64::NAN, 1.0, 1.0, 3.0)).is_err());
    }

    #[test]
    fn monodromy_spot_values() {
        let up = monodromy_lambda(&p(1.0, 1.0, -3.0, -3.0)).unwrap();
        assert!((up / (2.0 * std::f64::consts::PI).exp() - 1.0).abs() < 1e-12);
        let down = monodromy_lambda(&p(1.0, 1.0, 3.0, -3.0)).unwrap();
        assert!((down * (2.0 * std::f64::consts::PI).exp() - 1.0).abs() < 1e-12);
        assert!(matches!(monodromy_lambda(&p(1.0, 1.0, -2.8, -3.0)), Err(Error::Regime(_))));
    }

    #[test]
    fn vertical_params_flip_mu_only() {
        let q = p(-1.0, 1.0, 1.0, -3.0);
        assert_eq!(vertical_params(&q), p(1.0, 1.0, 1.0, -3.0));
        assert_eq!(vertical_params(&vertical_params(&q)), q);
    }

    #[test]
    fn json_field_names() {
        let r = classify(&p(-1.0, 1.0, 1.0, -3.0)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["case", "kappa", "r0", "cos_gamma_plus", "jacobian_eigenvalues", "monodromy_lambda"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["case"], "CaseI");
        let d = serde_json::to_value(classify(&p(1.0, 1.0, 1.0, -1.0)).unwrap()).unwrap();
        assert_eq!(d["case"], "Degenerate_b_eq_minus_k");
    }
}
