mod common;

use hyperwave::field::{compatibility_report, CompatibilityOptions, FieldSampler, FieldSolution, Verdict};
use hyperwave::odeint::IntegrationConfig;
use hyperwave::profile::{radial_probe, solve_profile, ConeFamily, SolveOptions};
use hyperwave::regimes::{classify, tau_rhs, WaveParameters};
use hyperwave::seed::{validate_seed, SeedSpec};
use hyperwave::surface::SurfaceProfile;

use common::{big_sqrt, fd_jacobian, log_space, slope};

fn reference() -> WaveParameters<f64> {
    WaveParameters::new(-1.0, 1.0, 1.0, -3.0)
}

#[test]
fn rational_square_roots() {
    assert_eq!(big_sqrt(4, 1), 2.0);
    assert_eq!(big_sqrt(2, 1), std::f64::consts::SQRT_2);
    assert!((big_sqrt(7, 4) - 1.3228756555322954).abs() < 1e-16);
}

#[test]
fn reported_spectrum_matches_numerical_jacobian() {
    let s = SurfaceProfile::sphere();
    for p in [reference(), WaveParameters::new(0.7, 2.0, -1.5, -3.5), WaveParameters::new(-2.0, 0.5, 0.2, -4.0)] {
        let r = classify(&p).unwrap();
        let (r0, cg) = (r.r0.unwrap(), r.cos_gamma_plus.unwrap());
        let gamma = (-p.c / (2.0 * r0)).atan2(cg);
        let fixed = [0.0, r0, gamma, 0.0];
        let at = tau_rhs(&s, &p, fixed);
        assert!(at.iter().all(|v| v.abs() < 1e-14), "{at:?}");
        let jac = fd_jacobian(|y| tau_rhs(&s, &p, y), fixed, 1e-4);
        let eig = r.jacobian_eigenvalues.unwrap();
        for i in 0..4 {
            assert!((jac[i][i] - eig[i]).abs() < 1e-8, "{i}: {} vs {}", jac[i][i], eig[i]);
            for j in 0..4 {
                if i != j {
                    assert!(jac[i][j].abs() < 1e-8, "({i},{j}) = {}", jac[i][j]);
                }
            }
        }
    }
}

#[test]
fn seed_reference_value() {
    let s = SurfaceProfile::sphere();
    let spec = SeedSpec::new(0.1);
    let traj = solve_profile(&s, &reference(), &spec, 1.0, &IntegrationConfig::default(), &SolveOptions::new(ConeFamily::Horizontal))
        .unwrap();
    let first = traj.knots()[0];
    assert_eq!(first.a, 1e-6);
    assert!((first.s - 1.156e-9).abs() < 1e-12);
    assert!(validate_seed(&s, &reference(), &spec, 1e-2, &IntegrationConfig::default()).unwrap() < 1e-8);
}

/// The seed error is second order in `a_seed`.
#[test]
fn seed_consistency_order() {
    let s = SurfaceProfile::sphere();
    let cfg = IntegrationConfig::with_tolerances(1e-13, 1e-16);
    let coarse = validate_seed(&s, &reference(), &SeedSpec::new(0.1).with_a_seed(4e-4), 1e-2, &cfg).unwrap();
    let fine = validate_seed(&s, &reference(), &SeedSpec::new(0.1).with_a_seed(1e-4), 1e-2, &cfg).unwrap();
    let ratio = coarse / fine;
    assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
}

#[test]
fn radial_probe_reference() {
    let rep = radial_probe(
        &SurfaceProfile::sphere(),
        &WaveParameters::new(-1.0, 0.0, 1.0, 0.0),
        1e-3,
        0.0,
        1e-6,
        &IntegrationConfig::default(),
    )
    .unwrap();
    assert_eq!(rep.spectrum, [0.0, 0.0, 1.0]);
    assert!(rep.q_min_ratio.unwrap() >= 1e-3);
    let trivial = radial_probe(
        &SurfaceProfile::sphere(),
        &WaveParameters::new(-1.0, 0.0, 1.0, 0.0),
        0.0,
        0.0,
        1e-6,
        &IntegrationConfig::default(),
    )
    .unwrap();
    assert_eq!(trivial.q_start, 0.0);
}

/// `|u − (1,0,0)| ~ a^κ` across the cross when `κ < 1`.
#[test]
fn holder_continuity_across_the_cross() {
    let p = WaveParameters::new(-1.0, 1.0, 1.0, -2.0);
    let kappa = p.kappa().unwrap();
    assert!(kappa < 1.0);
    let f = FieldSolution::solve(&SurfaceProfile::sphere(), &p, &SeedSpec::new(0.1), 2.0, &IntegrationConfig::default(), false)
        .unwrap();
    for (xi, sign) in [(0.5, 1.0), (-0.5, 1.0), (0.5, -1.0), (-0.5, -1.0)] {
        let etas = log_space(1e-12, 1e-2, 25);
        let la: Vec<f64> = etas.iter().map(|e| (0.5 * e).sqrt().ln()).collect();
        let ld: Vec<f64> = etas
            .iter()
            .map(|e| {
                let u = f.eval(0.3, xi, sign * e).unwrap().u;
                ((u[0] - 1.0).powi(2) + u[1].powi(2) + u[2].powi(2)).sqrt().ln()
            })
            .collect();
        let exponent = slope(&la, &ld);
        assert!(exponent >= kappa.min(1.0) - 0.05, "exponent {exponent} vs κ {kappa}");
    }
}

#[test]
fn pseudo_sphere_uses_constant_map_where_mu_is_positive() {
    let s = SurfaceProfile::pseudo_sphere();
    let p = reference();
    let f = FieldSolution::solve(&s, &p, &SeedSpec::new(0.1), 3.0, &IntegrationConfig::default(), false).unwrap();
    assert!(f.profile(ConeFamily::Vertical).is_trivial());
    assert!(!f.profile(ConeFamily::Horizontal).is_trivial());
    let v = f.eval(0.0, 0.5, -2.0).unwrap();
    assert_eq!(v.u, [1.0, 0.0, 0.0]);
    let r = compatibility_report(&f, 0.0, p.kappa().unwrap(), &CompatibilityOptions::default()).unwrap();
    assert_eq!(r.verdicts.overall, Verdict::Pass);
}

#[test]
fn field_needs_solved_range() {
    let f = FieldSolution::solve(&SurfaceProfile::sphere(), &reference(), &SeedSpec::new(0.1), 2.0, &IntegrationConfig::default(), false)
        .unwrap();
    assert!(matches!(f.eval_xy(0.0, 5.0, 0.0), Err(hyperwave::Error::Domain(_))));
}
