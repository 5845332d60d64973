//! Library output against reference values from `fixtures/oracles.py`.

use hammerloc::certify::{certify_shell_ball, certify_shell_interval, CertifyOptions};
use hammerloc::expr::SamplingPolicy;
use hammerloc::kernels::{compute_cone_constant, GridSpec};
use hammerloc::quadrature::{kernel_profile, profile_extrema, QuadratureRule, QuadratureSpec, TGrid, Weight};
use hammerloc::solve::{default_initial_guess, InitialGuess};
use hammerloc::{presets, Expression, Kernel};
use serde_json::Value;

const TOL: f64 = 1e-8;

fn oracle(key: &str) -> f64 {
    let text = include_str!("fixtures/oracles.json");
    let v: Value = serde_json::from_str(text).unwrap();
    v[key].as_f64().unwrap_or_else(|| panic!("no oracle `{key}`"))
}

fn rule() -> QuadratureRule {
    QuadratureRule::from_spec(QuadratureSpec::default()).unwrap()
}

fn extremum(k: &Kernel, weight: &str, s: (f64, f64), window: (f64, f64)) -> (f64, f64, f64, f64) {
    let w = Expression::parse(weight).unwrap();
    let p = kernel_profile(k, Weight::Expr(&w), s, TGrid::on(window, 1025), &rule()).unwrap();
    let e = profile_extrema(&p, window).unwrap();
    (e.min, e.argmin, e.max, e.argmax)
}

fn quick() -> CertifyOptions {
    CertifyOptions {
        sampling: SamplingPolicy {
            samples_per_axis: 24,
            refinement_rounds: 2,
        },
        check_kernels: false,
        ..CertifyOptions::default()
    }
}

#[test]
fn k1_window_profile_minimum() {
    let (min, ..) = extremum(&Kernel::dirichlet(), "1", (0.25, 0.75), (0.25, 0.75));
    assert!((min - oracle("k1_window_profile_min")).abs() < TOL);
}

#[test]
fn k1_profile_maximum() {
    let (.., max, at) = extremum(&Kernel::dirichlet(), "1", (0.0, 1.0), (0.0, 1.0));
    assert!((max - oracle("k1_profile_max")).abs() < TOL);
    assert!((at - oracle("k1_profile_argmax")).abs() < 1e-6);
}

#[test]
fn k2_identity_weight() {
    // ∫ (2 − s) s ds is the k2 profile of `t` at t = 0
    let (.., max, at) = extremum(&Kernel::sturm_liouville(), "t", (0.0, 1.0), (0.0, 1.0));
    assert!((max - oracle("k2_identity_weight_integral")).abs() < TOL);
    assert_eq!(at, 0.0);
}

#[test]
fn k2_profile_maximum() {
    let (.., max, _) = extremum(&Kernel::sturm_liouville(), "1", (0.0, 1.0), (0.0, 1.0));
    assert!((max - oracle("k2_profile_max")).abs() < TOL);
}

#[test]
fn numex_certificate_extrema() {
    let (p, spec, bounds) = presets::numex();
    let cert = certify_shell_interval(&p, &spec, &bounds, &quick()).unwrap();
    let get = |id: &str| cert.condition(id).unwrap();
    assert!((get("rho1_lower").integral.extremum - oracle("numex_rho1_extremum")).abs() < TOL);
    assert!((get("rho2_upper").integral.extremum - oracle("numex_rho2_extremum")).abs() < TOL);
    assert!((get("alpha_lower").integral.extremum - oracle("numex_alpha_extremum")).abs() < TOL);
    assert!((get("alpha_lower").integral.at_t - oracle("numex_alpha_argmin")).abs() < 1e-12);
    assert!((get("beta_upper").integral.extremum - oracle("numex_beta_extremum")).abs() < TOL);
    assert!((get("beta_upper").integral.at_t - oracle("numex_beta_argmax")).abs() < 1e-12);

    let v: Value = serde_json::from_str(include_str!("fixtures/oracles.json")).unwrap();
    let margins: Vec<f64> = cert.conditions.iter().map(|c| c.margin).collect();
    for (m, o) in margins.iter().zip(v["numex_margins"].as_array().unwrap()) {
        assert!((m - o.as_f64().unwrap()).abs() < TOL, "{margins:?}");
    }
}

#[test]
fn ex2_ball_extremum() {
    let (p, spec, bounds) = presets::ex2();
    let cert = certify_shell_ball(&p, &spec, &bounds, &quick()).unwrap();
    let r = cert.condition("r2_ball").unwrap();
    assert!((r.integral.extremum - oracle("ex2_ball_extremum")).abs() < TOL);
}

#[test]
fn numex_polynomial_guess() {
    let (_, spec, _) = presets::numex();
    let (u, _) = default_initial_guess(&spec, &InitialGuess::numex_polynomial(), 1025).unwrap();
    assert!((u.values()[512] - oracle("numex_polynomial_u_half")).abs() < TOL);
}

#[test]
fn cone_constants_against_brute_force() {
    // the brute-force scan stops short of s = 0 and s = 1, where the
    // infimum is approached, so it sits slightly above the true constant
    let k1 = Kernel::dirichlet();
    let c1 = compute_cone_constant(&k1, &k1.default_cone_data().unwrap().envelope, (0.25, 0.75), GridSpec::default())
        .unwrap()
        .value;
    assert!(c1 <= oracle("c1_brute") && oracle("c1_brute") - c1 < 1e-3);
    let k2 = Kernel::sturm_liouville();
    let c2 = compute_cone_constant(&k2, &k2.default_cone_data().unwrap().envelope, (0.0, 1.0), GridSpec::default())
        .unwrap()
        .value;
    assert!(c2 <= oracle("c2_brute") && oracle("c2_brute") - c2 < 1e-3);
}
