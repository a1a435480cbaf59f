mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use hyperwave::field::{boost_defect, time_shift_defect, FieldSolution};
use hyperwave::odeint::IntegrationConfig;
use hyperwave::profile::{reduced_rhs, solve_profile, ConeFamily, SolveOptions};
use hyperwave::regimes::{classify, monodromy_lambda, vertical_params, RegimeCase, WaveParameters};
use hyperwave::seed::SeedSpec;
use hyperwave::selfsimilar::star_condition_value;
use hyperwave::surface::SurfaceProfile;
use proptest::prelude::*;

fn surfaces() -> [SurfaceProfile<f64>; 2] {
    [SurfaceProfile::sphere(), SurfaceProfile::pseudo_sphere()]
}

/// `(μ, k, c, b)` with `c² < −4(k² + bk)`.
fn case_one() -> impl Strategy<Value = WaveParameters<f64>> {
    (-3.0..3.0f64, 0.2..3.0f64, 0.3..4.0f64, 0.05..0.95f64, any::<bool>()).prop_map(|(mu, k, gap, frac, neg)| {
        let b = -k - gap;
        let m = k * k + b * k;
        let c = frac * 2.0 * (-m).sqrt();
        WaveParameters::new(mu, k, if neg { -c } else { c }, b)
    })
}

fn standing_field() -> &'static FieldSolution<f64> {
    static FIELD: OnceLock<FieldSolution<f64>> = OnceLock::new();
    FIELD.get_or_init(|| {
        let p = WaveParameters::new(-1.0, 1.0, 1.0, -3.0);
        FieldSolution::solve(&SurfaceProfile::sphere(), &p, &SeedSpec::new(0.1), 4.0, &IntegrationConfig::default(), false)
            .unwrap()
    })
}

fn similarity_field() -> &'static FieldSolution<f64> {
    static FIELD: OnceLock<FieldSolution<f64>> = OnceLock::new();
    FIELD.get_or_init(|| {
        let p = WaveParameters::new(3.0, 1.0, -1.0, -3.0);
        FieldSolution::solve(&SurfaceProfile::sphere(), &p, &SeedSpec::new(0.1), 40.0, &IntegrationConfig::default(), true)
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surface_parity(s in -3.0..3.0f64) {
        for surf in surfaces() {
            prop_assert_eq!(surf.gamma(-s), -surf.gamma(s));
            prop_assert_eq!(surf.gamma_s(-s), surf.gamma_s(s));
            prop_assert_eq!(surf.cap_f(-s), surf.cap_f(s));
        }
    }

    #[test]
    fn profile_equation_is_odd(p in case_one(), a in 0.01..50.0f64, s in -3.0..3.0f64, s_a in -5.0..5.0f64) {
        for surf in surfaces() {
            let up = reduced_rhs(&surf, &p, a, s, s_a);
            let dn = reduced_rhs(&surf, &p, a, -s, -s_a);
            prop_assert!((up + dn).abs() <= 1e-12 * (1.0 + up.abs()), "{} {}", up, dn);
        }
    }

    #[test]
    fn mirror_seeds_give_mirror_profiles(p in case_one(), q0 in 0.01..0.5f64) {
        let p = WaveParameters { mu: -p.mu.abs() - 0.1, ..p };
        prop_assume!(q0 * 1e-6f64.powf(p.kappa().unwrap()) < 1e-5);
        let surf = SurfaceProfile::sphere();
        let opts = SolveOptions::new(ConeFamily::Horizontal);
        let cfg = IntegrationConfig::default();
        let plus = solve_profile(&surf, &p, &SeedSpec::new(q0), 5.0, &cfg, &opts).unwrap();
        let minus = solve_profile(&surf, &p, &SeedSpec::new(-q0), 5.0, &cfg, &opts).unwrap();
        prop_assert_eq!(plus.knots().len(), minus.knots().len());
        for (u, v) in plus.knots().iter().zip(minus.knots()) {
            prop_assert!(u.a == v.a && (u.s + v.s).abs() <= 1e-12 && (u.sigma + v.sigma).abs() <= 1e-12);
        }
    }

    #[test]
    fn vertical_duality_is_an_involution(mu in -9.0..9.0f64, k in -9.0..9.0f64, c in -9.0..9.0f64, b in -9.0..9.0f64) {
        let p = WaveParameters::new(mu, k, c, b);
        prop_assert_eq!(vertical_params(&vertical_params(&p)), p);
        let (r, v) = (classify(&p).unwrap(), classify(&vertical_params(&p)).unwrap());
        prop_assert_eq!(r.kappa.to_bits(), v.kappa.to_bits());
    }

    #[test]
    fn case_one_spectrum(p in case_one()) {
        let r = classify(&p).unwrap();
        prop_assert_eq!(r.case, RegimeCase::CaseI);
        let kappa = r.kappa;
        let e = r.jacobian_eigenvalues.unwrap();
        let want = [kappa, -2.0 * kappa, -2.0 * kappa, 1.0];
        for (x, w) in e.iter().zip(want) {
            prop_assert!((x - w).abs() <= 1e-14 * (1.0 + w.abs()), "{:?} vs {:?}", e, want);
        }
    }

    #[test]
    fn monodromy_closed_form(k in 0.3..2.5f64, gap in 0.2..3.0f64, over in 0.05..2.0f64, neg in any::<bool>()) {
        let b = -k - gap;
        let m = k * k + b * k;
        let c = 2.0 * (-m).sqrt() * (1.0 + over) * if neg { -1.0 } else { 1.0 };
        let lam = monodromy_lambda(&WaveParameters::new(1.0, k, c, b)).unwrap();
        let want = (-(c.signum()) * 2.0 * PI / (c * c + 4.0 * m).sqrt()).exp();
        prop_assert!((lam / want - 1.0).abs() < 1e-10);
        prop_assert_eq!(lam > 1.0, c < 0.0);
    }

    #[test]
    fn h_at_pole_identity(mu in -3.0..3.0f64, k in -3.0..3.0f64, c in -3.0..3.0f64, b in -3.0..3.0f64) {
        let s = SurfaceProfile::sphere();
        let p = WaveParameters::new(mu, k, c, b);
        let h = s.cap_h(&p, PI);
        prop_assert!((4.0 * star_condition_value(&s, &p) - h).abs() <= 1e-12 * (1.0 + h.abs()));
    }

    #[test]
    fn field_equivariance(x in -2.0..2.0f64, y in -2.0..2.0f64, t in -3.0..3.0f64, alpha in -0.7..0.7f64, dt in -3.0..3.0f64) {
        let f = standing_field();
        prop_assert!(boost_defect(f, t, x + y, x - y, alpha).unwrap() < 1e-10);
        prop_assert!(time_shift_defect(f, t, x + y, x - y, dt).unwrap() < 1e-12);
    }

    #[test]
    fn similarity_scaling(x in -3.0..3.0f64, y in -3.0..3.0f64, t in 0.5..2.0f64, lam in 0.5..2.0f64, alpha in -0.5..0.5f64) {
        let f = similarity_field();
        let dt = (lam * lam - 1.0) * t;
        prop_assert!(time_shift_defect(f, t, x + y, x - y, dt).unwrap() < 1e-10);
        prop_assert!(boost_defect(f, t, x + y, x - y, alpha).unwrap() < 1e-10);
    }
}
