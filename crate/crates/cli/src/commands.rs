use anyhow::Result;
use serde_json::json;

use hammerloc::certify::{self, CertifyOptions};
use hammerloc::kernels::{check_kernel, GridSpec, KernelCheck};
use hammerloc::solve::{self, SolveParams, SolveResult};

use crate::output::{self, stamp};
use crate::problem::{self, Bounds, Loaded};
use crate::{CommonArgs, SolveArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;

/// Default number of nonzero amplitudes for multi-start.
const DEFAULT_STARTS: usize = 8;

pub fn certify(args: &CommonArgs) -> Result<u8> {
    let l = problem::load(&args.problem)?;
    let d = CertifyOptions::default();
    let opts = CertifyOptions {
        t_points: args.grid.unwrap_or(d.t_points),
        tol: args.tol.unwrap_or(d.tol),
        ..d
    };
    let cert = match &l.bounds {
        Bounds::Interval(b) => certify::certify_shell_interval(&l.problem, &l.spec, b, &opts)?,
        Bounds::Ball(b) => certify::certify_shell_ball(&l.problem, &l.spec, b, &opts)?,
    };
    let verdict = if cert.passed() { "PASS" } else { "FAIL" };
    let value = stamp(cert.to_json(), &l.name, !args.no_timestamp);
    output::write_json(&args.out, "certificate.json", &value)?;
    let text = certify::json_to_text(&format!("localization certificate: {verdict}"), &value);
    output::write_text(&args.out, "certificate.txt", &text)?;

    println!("{}: {verdict}", l.name);
    for c in &cert.conditions {
        let mark = if c.pass { "ok" } else { "FAIL" };
        let tight = if c.tight { " (tight)" } else { "" };
        println!("  {:<12} margin {:+.6e}{tight} {mark}", c.id, c.margin);
    }
    for s in &cert.localization {
        println!("  => {s}");
    }
    Ok(if cert.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn params(l: &Loaded, args: &SolveArgs) -> SolveParams {
    let p = l.params.clone();
    SolveParams {
        grid: args.common.grid.unwrap_or(p.grid),
        tol: args.common.tol.unwrap_or(p.tol),
        method: args.method.map(Into::into).unwrap_or(p.method),
        ..p
    }
}

fn print_result(res: &SolveResult) {
    println!(
        "  {:?} after {} iterations, residual {:.3e}",
        res.status, res.iterations, res.residual()
    );
    if let Some(rep) = &res.localization {
        for c in &rep.checks {
            let mark = if c.holds { "ok" } else { "FAIL" };
            println!("  {:<26} {:>14.6} vs {:<10} {mark}", c.name, c.value, c.bound);
        }
    }
}

fn exit_code(res: &SolveResult) -> u8 {
    match &res.localization {
        _ if !res.converged => EXIT_FAIL,
        Some(rep) if !rep.consistent => EXIT_INCONSISTENT,
        _ => EXIT_OK,
    }
}

pub fn solve(args: &SolveArgs) -> Result<u8> {
    let c = &args.common;
    let l = problem::load(&c.problem)?;
    let params = params(&l, args);
    let (u0, v0) = solve::default_initial_guess(&l.spec, &l.guess, params.grid)?;
    let res = solve::solve(&l.problem, (&u0, &v0), &params)?;

    output::write_text(&c.out, "solution.csv", &output::solution_csv(&res.u, &res.v))?;
    let sol = stamp(output::solution_json(&res)?, &l.name, !c.no_timestamp);
    output::write_json(&c.out, "solution.json", &sol)?;
    let loc = json!({ "spec": l.spec, "report": res.localization });
    output::write_json(&c.out, "localization.json", &stamp(loc, &l.name, !c.no_timestamp))?;
    output::write_text(&c.out, "iterations.jsonl", &output::iterations_jsonl(&res.history)?)?;

    println!("{}:", l.name);
    print_result(&res);
    Ok(exit_code(&res))
}

pub fn multi_start(args: &SolveArgs) -> Result<u8> {
    let c = &args.common;
    let l = problem::load(&c.problem)?;
    let params = params(&l, args);
    let count = args.multi_start.unwrap_or(DEFAULT_STARTS);
    let lattice = solve::amplitude_lattice(&l.spec, l.problem.cone1.c, count);
    let ms = solve::multi_start(&l.problem, &l.spec, &lattice, &params)?;

    let mut solutions = Vec::new();
    let mut best = EXIT_FAIL;
    println!("{}: {} distinct solutions from {} starts", l.name, ms.solutions.len(), lattice.len());
    for (k, s) in ms.solutions.iter().enumerate() {
        let rep = solve::check_localization(s, &l.spec, &l.problem.cone1);
        best = match (best, rep.consistent) {
            (_, true) => EXIT_OK,
            (EXIT_OK, false) => EXIT_OK,
            _ => EXIT_INCONSISTENT,
        };
        output::write_text(&c.out, &format!("solution_{k}.csv"), &output::solution_csv(&s.u, &s.v))?;
        solutions.push(json!({
            "index": k,
            "sup_u": s.u.sup_norm(),
            "min_v": s.v.min_value(),
            "max_v": s.v.max_value(),
            "residual": s.residual(),
            "localization": rep,
        }));
        println!(
            "  [{k}] sup u {:.6}, v in [{:.6}, {:.6}], consistent: {}",
            s.u.sup_norm(),
            s.v.min_value(),
            s.v.max_value(),
            rep.consistent
        );
    }
    let value = json!({ "spec": l.spec, "starts": ms.starts, "solutions": solutions });
    output::write_json(&c.out, "multistart.json", &stamp(value, &l.name, !c.no_timestamp))?;
    Ok(best)
}

fn row(label: &str, k: &KernelCheck) -> String {
    let ok = |b: bool| if b { "ok" } else { "FAIL" };
    format!(
        "{label:<4} {:<10} {:<13} {:>10}  {:>12.8}  {:>9} {:>12.3e}  {:>6}  {:>10}  {}",
        k.envelope,
        format!("[{}, {}]", k.window.0, k.window.1),
        k.declared_c,
        k.computed_c,
        ok(k.upper_envelope.holds),
        k.upper_envelope.worst_margin,
        ok(k.nonnegative),
        ok(k.continuous),
        if k.holds { "pass" } else { "fail" }
    )
}

pub fn kernel_report(args: &CommonArgs) -> Result<u8> {
    let l = problem::load(&args.problem)?;
    let d = GridSpec::default();
    let grid = GridSpec {
        points: args.grid.unwrap_or(d.points),
        ..d
    };
    let p = &l.problem;
    let k1 = check_kernel(&p.kernel1, &p.cone1, grid)?;
    let k2 = check_kernel(&p.kernel2, &p.cone2, grid)?;
    println!(
        "{:<4} {:<10} {:<13} {:>10}  {:>12}  {:>9} {:>12}  {:>6}  {:>10}  result",
        "", "envelope", "window", "declared_c", "computed_c", "k <= phi", "phi margin", "k >= 0", "continuous"
    );
    println!("{}", row("k1", &k1));
    println!("{}", row("k2", &k2));
    let value = json!({ "k1": k1, "k2": k2, "grid": grid });
    output::write_json(&args.out, "kernel_report.json", &stamp(value, &l.name, !args.no_timestamp))?;
    Ok(EXIT_OK)
}
