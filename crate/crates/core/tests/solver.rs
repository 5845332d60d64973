use hammerloc::operators::NodeInterpolation;
use hammerloc::solve::*;
use hammerloc::{presets, GridFunction};

fn newton(n: usize) -> SolveParams {
    SolveParams {
        grid: n,
        ..SolveParams::default()
    }
}

fn ex2_refinement_gap(interpolation: NodeInterpolation) -> f64 {
    let (p, spec, _) = presets::ex2();
    let solve_on = |n| {
        let (u0, v0) = default_initial_guess(&spec, &InitialGuess::Midshell, n).unwrap();
        newton_nystrom(&p, (&u0, &v0), &SolveParams { interpolation, ..newton(n) }).unwrap()
    };
    let coarse = solve_on(513);
    let fine = solve_on(1025);
    assert!(coarse.converged && fine.converged);
    // every coarse grid point is a fine grid point
    let gap = |a: &GridFunction, b: &GridFunction| {
        (0..513).map(|i| (a.values()[i] - b.values()[2 * i]).abs()).fold(0.0, f64::max)
    };
    gap(&coarse.u, &fine.u).max(gap(&coarse.v, &fine.v))
}

#[test]
fn ex2_is_stable_under_grid_refinement() {
    let gap = ex2_refinement_gap(NodeInterpolation::Cubic);
    assert!(gap <= 1e-4, "{gap}");
}

#[test]
fn linear_node_interpolation_misses_the_refinement_bound() {
    // second order: about 1.2e-4 absolute against ||u|| ≈ 22.5
    let gap = ex2_refinement_gap(NodeInterpolation::Linear);
    assert!(gap > 1e-4 && gap < 2e-4, "{gap}");
}

#[test]
fn numex_newton_converges_quadratically() {
    let (p, spec, _) = presets::numex();
    let n = 257;
    let (u0, v0) = default_initial_guess(&spec, &InitialGuess::numex_polynomial(), n).unwrap();
    let res = newton_nystrom(
        &p,
        (&u0, &v0),
        &SolveParams {
            region: Some(spec),
            ..newton(n)
        },
    )
    .unwrap();
    assert!(res.converged);
    let r: Vec<f64> = res.history.iter().map(|h| h.r1.max(h.r2)).collect();
    // r_{k+1} / r_k² stays bounded once close, until round-off takes over
    let tail: Vec<f64> = r
        .windows(2)
        .filter(|w| w[0] < 1e-1 && w[1] > 1e-11)
        .map(|w| w[1] / (w[0] * w[0]))
        .collect();
    assert!(tail.len() >= 2, "{r:?}");
    assert!(tail.iter().all(|&q| q < 10.0), "{tail:?}");
    let rep = res.localization.unwrap();
    assert!(rep.consistent, "{rep:?}");
}

#[test]
fn zero_pair_is_outside_the_numex_shell() {
    let (p, spec, _) = presets::numex();
    let n = 65;
    let z = GridFunction::zeros(n).unwrap();
    let res = picard(&p, (&z, &z), &SolveParams { method: Method::Picard, max_iter: 1, ..newton(n) }).unwrap();
    let zero = SolveResult { u: z.clone(), v: z, converged: true, ..res };
    let rep = check_localization(&zero, &spec, &p.cone1);
    assert!(!rep.consistent);
    assert!(!rep.check("sup_u >= rho2").unwrap().holds);
    assert!(!rep.check("u nontrivial").unwrap().holds);
}

#[test]
fn picard_and_newton_agree_on_ex2() {
    let (p, spec, _) = presets::ex2();
    let n = 257;
    let (u0, v0) = default_initial_guess(&spec, &InitialGuess::Midshell, n).unwrap();
    let a = newton_nystrom(&p, (&u0, &v0), &newton(n)).unwrap();
    let b = picard(
        &p,
        (&u0, &v0),
        &SolveParams {
            method: Method::Picard,
            homogeneity: Some(2.0),
            ..newton(n)
        },
    )
    .unwrap();
    assert!(a.converged && b.converged);
    assert!(a.u.distance(&b.u).unwrap() <= 1e-6);
    assert!(a.v.distance(&b.v).unwrap() <= 1e-6);
    let rep = check_localization(&b, &spec, &p.cone1);
    assert!(rep.consistent, "{rep:?}");
}

#[test]
fn multi_start_on_ex2_finds_trivial_and_nontrivial() {
    let (p, spec, _) = presets::ex2();
    let lattice = amplitude_lattice(&spec, p.cone1.c, 6);
    let ms = multi_start(&p, &spec, &lattice, &newton(65)).unwrap();
    assert_eq!(ms.starts.len(), lattice.len());
    let sups: Vec<f64> = ms.solutions.iter().map(|s| s.u.sup_norm()).collect();
    assert!(sups.iter().any(|&s| s == 0.0), "{sups:?}");
    assert!(sups.iter().any(|&s| s > 4.0), "{sups:?}");
    for (i, a) in ms.solutions.iter().enumerate() {
        for b in &ms.solutions[i + 1..] {
            assert!(a.u.distance(&b.u).unwrap().max(a.v.distance(&b.v).unwrap()) > DEDUP_DISTANCE);
        }
    }
}
