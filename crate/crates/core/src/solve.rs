//! Fixed points of `(T1, T2)` by damped Picard iteration or Newton–Nyström,
//! plus a check of the computed pair against a localization spec.
//!
//! Iterates that leave the localization region are logged, never projected
//! back: the existence results say nothing about invariance of an iteration.

use faer::prelude::*;
use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certify::{Case, LocalizationSpec, SecondTarget};
use crate::grid::{GridError, GridFunction};
use crate::kernels::ConeData;
use crate::operators::{
    cell_aligned_rule, NodeInterpolation, Nystrom, OperatorError, Problem, Which, DEFAULT_CELL_ORDER,
};

/// Singular-Jacobian threshold on the 1-norm condition estimate.
pub const MAX_CONDITION: f64 = 1e12;
const MAX_HALVINGS: usize = 30;
const DIVERGENCE_WINDOW: usize = 10;
const FD_STEP: f64 = 1e-7;
/// Relative tolerance of [`check_localization`].
pub const LOCALIZATION_TOL: f64 = 1e-6;
/// Converged solutions closer than this in sup norm count as one.
pub const DEDUP_DISTANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    #[default]
    Newton,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    pub method: Method,
    /// Picard relaxation `θ ∈ (0, 1]`.
    pub damping: f64,
    pub max_iter: usize,
    /// Target for `max(‖u − T1‖_∞, ‖v − T2‖_∞)`.
    pub tol: f64,
    pub grid: usize,
    /// Gauss points per grid cell.
    pub cell_order: usize,
    pub interpolation: NodeInterpolation,
    /// Degree `p` of homogeneity of `f` in `u`, if known. Picard then
    /// rescales `T1` by `M^{p/(p-1)}` with `M = Σu² / Σu·T1(u)`, which
    /// removes the growing mode of a superlinear `f` without moving fixed
    /// points.
    pub homogeneity: Option<f64>,
    /// Region whose exits are logged.
    pub region: Option<LocalizationSpec>,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            method: Method::Newton,
            damping: 0.5,
            max_iter: 1000,
            tol: 1e-10,
            grid: 1025,
            cell_order: DEFAULT_CELL_ORDER,
            interpolation: NodeInterpolation::Linear,
            homogeneity: None,
            region: None,
        }
    }
}

impl SolveParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: String| Err(SolveError::InvalidParams(m));
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.grid < crate::grid::MIN_GRID_POINTS {
            return bad(format!("grid needs at least 3 points, got {}", self.grid));
        }
        if let Some(p) = self.homogeneity {
            if !(p > 1.0 && p.is_finite()) {
                return bad(format!("homogeneity degree must exceed 1, got {p}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
    SingularJacobian { estimate: f64 },
    LineSearchFailed,
    EvaluationFailed { message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Start,
    Picard,
    Newton,
    /// Picard step taken after the Newton line search gave up.
    PicardFallback,
}

/// One line of the iteration log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub step: StepKind,
    pub r1: f64,
    pub r2: f64,
    /// Newton step length after halvings, or `θ` for Picard.
    pub step_length: f64,
    pub condition_estimate: Option<f64>,
    pub u_sup: f64,
    pub u_min_window: f64,
    pub v_min: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxViolation {
    pub iteration: usize,
    pub violated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub method: Method,
    #[serde(skip)]
    pub u: GridFunction,
    #[serde(skip)]
    pub v: GridFunction,
    pub r1: f64,
    pub r2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    pub tol: f64,
    pub grid: usize,
    pub history: Vec<IterationRecord>,
    pub violations: Vec<BoxViolation>,
    pub localization: Option<LocalizationReport>,
}

impl SolveResult {
    pub fn residual(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// `u0 = sqrt(ρ1 ρ2) · 4t(1 − t)`, `v0` at the centre of the target.
    Midshell,
    /// Coefficients in ascending powers of `t`.
    Polynomial { u: Vec<f64>, v: Vec<f64> },
}

impl InitialGuess {
    /// The quartic and quadratic fits reported for the expansive example.
    pub fn numex_polynomial() -> Self {
        InitialGuess::Polynomial {
            u: vec![0.0, 50.667, -99.333, 85.333, -42.667],
            v: vec![4.0, -0.2, -1.6],
        }
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

pub fn default_initial_guess(
    spec: &LocalizationSpec,
    kind: &InitialGuess,
    n: usize,
) -> Result<(GridFunction, GridFunction), GridError> {
    match kind {
        InitialGuess::Midshell => {
            let amp = (spec.rho1 * spec.rho2).sqrt();
            let v0 = match spec.target {
                SecondTarget::Interval { alpha, beta } => 0.5 * (alpha + beta),
                SecondTarget::Ball { .. } => 0.0,
            };
            Ok((
                GridFunction::from_fn(n, |t| amp * 4.0 * t * (1.0 - t))?,
                GridFunction::constant(n, v0)?,
            ))
        }
        InitialGuess::Polynomial { u, v } => Ok((
            GridFunction::from_fn(n, |t| horner(u, t))?,
            GridFunction::from_fn(n, |t| horner(v, t))?,
        )),
    }
}

/// Picard or Newton according to `params.method`.
pub fn solve(
    problem: &Problem,
    init: (&GridFunction, &GridFunction),
    params: &SolveParams,
) -> Result<SolveResult, SolveError> {
    match params.method {
        Method::Picard => picard(problem, init, params),
        Method::Newton => newton_nystrom(problem, init, params),
    }
}

struct Session<'a> {
    problem: &'a Problem,
    ny: Nystrom,
    params: &'a SolveParams,
    n: usize,
    history: Vec<IterationRecord>,
    violations: Vec<BoxViolation>,
}

/// `T(x)` and the residual parts at one iterate.
struct Eval {
    t1: Vec<f64>,
    t2: Vec<f64>,
    r1: f64,
    r2: f64,
    /// `½‖x − T(x)‖₂²`, the line-search merit.
    merit: f64,
}

impl Eval {
    fn r(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

impl<'a> Session<'a> {
    fn new(
        problem: &'a Problem,
        init: (&GridFunction, &GridFunction),
        params: &'a SolveParams,
    ) -> Result<Self, SolveError> {
        params.validate()?;
        let n = params.grid;
        for w in [init.0, init.1] {
            if w.len() != n {
                return Err(GridError::Mismatch(w.len(), n).into());
            }
        }
        let rule = cell_aligned_rule(n, params.cell_order).map_err(OperatorError::from)?;
        let ny = Nystrom::with_interpolation(problem, n, &rule, params.interpolation)?;
        Ok(Self {
            problem,
            ny,
            params,
            n,
            history: Vec::new(),
            violations: Vec::new(),
        })
    }

    fn eval(&self, x: &[f64]) -> Result<Eval, OperatorError> {
        let (u, v) = x.split_at(self.n);
        let nv = self.ny.node_values(self.problem, u, v)?;
        let t1 = self.ny.apply_rows(Which::T1, &nv.f);
        let t2 = self.ny.apply_rows(Which::T2, &nv.g);
        let merit = 0.5
            * u.iter()
                .zip(&t1)
                .chain(v.iter().zip(&t2))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        Ok(Eval {
            r1: sup_diff(u, &t1),
            r2: sup_diff(v, &t2),
            t1,
            t2,
            merit,
        })
    }

    fn record(&mut self, iteration: usize, step: StepKind, x: &[f64], e: &Eval, step_length: f64, cond: Option<f64>) {
        let (u, v) = x.split_at(self.n);
        let u_sup = u.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let (a, b) = self.problem.cone1.window;
        let u_min_window = min_on_window(u, a, b);
        let v_min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let v_max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some(spec) = &self.params.region {
            let violated = region_checks(spec, &self.problem.cone1, u_sup, u_min_window, v_min, v_max)
                .into_iter()
                .filter(|c| !c.holds)
                .map(|c| c.name)
                .collect::<Vec<_>>();
            if !violated.is_empty() {
                self.violations.push(BoxViolation { iteration, violated });
            }
        }
        self.history.push(IterationRecord {
            iteration,
            step,
            r1: e.r1,
            r2: e.r2,
            step_length,
            condition_estimate: cond,
            u_sup,
            u_min_window,
            v_min,
            v_max,
        });
    }

    /// One relaxed Picard step from `x`, with the optional rescaling of `T1`.
    fn picard_step(&self, x: &[f64], e: &Eval) -> Vec<f64> {
        let n = self.n;
        let theta = self.params.damping;
        let scale = match self.params.homogeneity {
            Some(p) => {
                let u = &x[..n];
                let uu: f64 = u.iter().map(|a| a * a).sum();
                let ut: f64 = u.iter().zip(&e.t1).map(|(a, b)| a * b).sum();
                let m = uu / ut;
                if m.is_finite() && m > 0.0 {
                    m.powf(p / (p - 1.0))
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let mut next = Vec::with_capacity(2 * n);
        next.extend((0..n).map(|i| (1.0 - theta) * x[i] + theta * scale * e.t1[i]));
        next.extend((0..n).map(|i| (1.0 - theta) * x[n + i] + theta * e.t2[i]));
        next
    }

    fn finish(
        self,
        method: Method,
        x: Vec<f64>,
        e: &Eval,
        iterations: usize,
        status: SolveStatus,
    ) -> Result<SolveResult, SolveError> {
        let (u, v) = x.split_at(self.n);
        let mut res = SolveResult {
            method,
            u: GridFunction::new(u.to_vec())?,
            v: GridFunction::new(v.to_vec())?,
            r1: e.r1,
            r2: e.r2,
            iterations,
            converged: status == SolveStatus::Converged,
            status,
            tol: self.params.tol,
            grid: self.n,
            history: self.history,
            violations: self.violations,
            localization: None,
        };
        if let Some(spec) = &self.params.region {
            res.localization = Some(check_localization(&res, spec, &self.problem.cone1));
        }
        Ok(res)
    }

    /// Forward-difference Jacobian of `x ↦ x − T(x)`. Moving grid value `j`
    /// changes the interpolated data only at the nodes in its stencil, so
    /// each column re-evaluates `f` and `g` there alone.
    fn jacobian(&self, x: &[f64]) -> Result<Mat<f64>, OperatorError> {
        let n = self.n;
        let (u, v) = x.split_at(n);
        let nv = self.ny.node_values(self.problem, u, v)?;
        let columns = (0..2 * n)
            .into_par_iter()
            .map(|col| {
                let (j, in_v) = if col < n { (col, false) } else { (col - n, true) };
                let h = FD_STEP * (1.0 + x[col].abs());
                let mut col_vals = vec![0.0; 2 * n];
                col_vals[col] = 1.0;
                let mut touched: Vec<(usize, f64, f64)> = Vec::new();
                for &(q, phi) in self.ny.influence(j) {
                    let s = self.ny.nodes()[q];
                    let (uq, vq) = if in_v {
                        (nv.u[q], nv.v[q] + h * phi)
                    } else {
                        (nv.u[q] + h * phi, nv.v[q])
                    };
                    let fe = |which, e: &crate::expr::Expression| {
                        e.eval(s, uq, vq).map_err(|source| OperatorError::Eval {
                            which,
                            s,
                            u: uq,
                            v: vq,
                            source,
                        })
                    };
                    let df = (fe("f", &self.problem.f)? - nv.f[q]) / h;
                    let dg = (fe("g", &self.problem.g)? - nv.g[q]) / h;
                    touched.push((q, df, dg));
                }
                for i in 0..n {
                    let (r1, r2) = (self.ny.row1(i), self.ny.row2(i));
                    let mut a = 0.0;
                    let mut b = 0.0;
                    for &(q, df, dg) in &touched {
                        a += r1[q] * df;
                        b += r2[q] * dg;
                    }
                    col_vals[i] -= a;
                    col_vals[n + i] -= b;
                }
                Ok(col_vals)
            })
            .collect::<Result<Vec<_>, OperatorError>>()?;
        Ok(Mat::from_fn(2 * n, 2 * n, |i, j| columns[j][i]))
    }
}

fn min_on_window(u: &[f64], a: f64, b: f64) -> f64 {
    // the values are always finite here, so construction cannot fail
    GridFunction::new(u.to_vec())
        .and_then(|g| g.min_on_window(a, b))
        .unwrap_or(f64::NAN)
}

/// Damped Picard iteration `x ← (1 − θ) x + θ T(x)`.
pub fn picard(
    problem: &Problem,
    init: (&GridFunction, &GridFunction),
    params: &SolveParams,
) -> Result<SolveResult, SolveError> {
    let mut s = Session::new(problem, init, params)?;
    let mut x: Vec<f64> = init.0.values().iter().chain(init.1.values()).copied().collect();
    let mut e = s.eval(&x)?;
    s.record(0, StepKind::Start, &x, &e, 0.0, None);
    let mut growth = 0;
    let mut k = 0;
    let status = loop {
        if e.r() <= params.tol {
            break SolveStatus::Converged;
        }
        if k == params.max_iter {
            break SolveStatus::MaxIterations;
        }
        k += 1;
        let next = s.picard_step(&x, &e);
        let ne = match s.eval(&next) {
            Ok(ne) => ne,
            Err(err) => {
                break SolveStatus::EvaluationFailed {
                    message: err.to_string(),
                }
            }
        };
        growth = if ne.r() > e.r() { growth + 1 } else { 0 };
        x = next;
        e = ne;
        s.record(k, StepKind::Picard, &x, &e, params.damping, None);
        if growth >= DIVERGENCE_WINDOW {
            break SolveStatus::Diverged;
        }
    };
    s.finish(Method::Picard, x, &e, k, status)
}

/// Hager's estimate of `‖A⁻¹‖₁` from a factorization, as refined by Higham.
fn inverse_norm1_estimate(lu: &faer::linalg::solvers::PartialPivLu<f64>, m: usize) -> f64 {
    let mut x = Mat::<f64>::from_fn(m, 1, |_, _| 1.0 / m as f64);
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x);
        est = (0..m).map(|i| y[(i, 0)].abs()).sum::<f64>();
        let xi = Mat::<f64>::from_fn(m, 1, |i, _| if y[(i, 0)] >= 0.0 { 1.0 } else { -1.0 });
        let z = lu.solve_transpose(&xi);
        let (j, zmax) = (0..m).fold((0, 0.0), |(bj, bz), i| {
            let a = z[(i, 0)].abs();
            if a > bz {
                (i, a)
            } else {
                (bj, bz)
            }
        });
        let ztx: f64 = (0..m).map(|i| z[(i, 0)] * x[(i, 0)]).sum();
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = Mat::<f64>::from_fn(m, 1, |i, _| if i == j { 1.0 } else { 0.0 });
    }
    est
}

fn norm1(a: &Mat<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Damped Newton on the `2n` grid unknowns of `x − T(x) = 0`.
pub fn newton_nystrom(
    problem: &Problem,
    init: (&GridFunction, &GridFunction),
    params: &SolveParams,
) -> Result<SolveResult, SolveError> {
    let mut s = Session::new(problem, init, params)?;
    let n = s.n;
    let mut x: Vec<f64> = init.0.values().iter().chain(init.1.values()).copied().collect();
    let mut e = s.eval(&x)?;
    s.record(0, StepKind::Start, &x, &e, 0.0, None);
    let mut k = 0;
    let status = loop {
        if e.r() <= params.tol {
            break SolveStatus::Converged;
        }
        if k == params.max_iter {
            break SolveStatus::MaxIterations;
        }
        k += 1;
        let jac = match s.jacobian(&x) {
            Ok(j) => j,
            Err(err) => {
                break SolveStatus::EvaluationFailed {
                    message: err.to_string(),
                }
            }
        };
        let lu = jac.partial_piv_lu();
        let cond = norm1(&jac) * inverse_norm1_estimate(&lu, 2 * n);
        if !(cond <= MAX_CONDITION) {
            break SolveStatus::SingularJacobian { estimate: cond };
        }
        let rhs = Mat::<f64>::from_fn(2 * n, 1, |i, _| {
            if i < n {
                e.t1[i] - x[i]
            } else {
                e.t2[i - n] - x[i]
            }
        });
        let dx = lu.solve(&rhs);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = (0..2 * n).map(|i| x[i] + lambda * dx[(i, 0)]).collect();
            if let Ok(te) = s.eval(&trial) {
                // Armijo on the merit; the Newton direction has slope −2·merit
                if te.merit <= (1.0 - 2e-4 * lambda) * e.merit {
                    accepted = Some((trial, te));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, te)) => {
                x = trial;
                e = te;
                s.record(k, StepKind::Newton, &x, &e, lambda, Some(cond));
            }
            None => {
                let trial = s.picard_step(&x, &e);
                match s.eval(&trial) {
                    Ok(te) if te.merit < e.merit => {
                        x = trial;
                        e = te;
                        s.record(k, StepKind::PicardFallback, &x, &e, params.damping, Some(cond));
                    }
                    _ => break SolveStatus::LineSearchFailed,
                }
            }
        }
    };
    s.finish(Method::Newton, x, &e, k, status)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// Positive when the inequality holds with room to spare.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub case: Case,
    pub converged: bool,
    pub checks: Vec<InequalityCheck>,
    pub consistent: bool,
}

impl LocalizationReport {
    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ineq(name: &str, value: f64, bound: f64, at_least: bool) -> InequalityCheck {
    let margin = if at_least { value - bound } else { bound - value };
    let tol = LOCALIZATION_TOL * bound.abs().max(value.abs()).max(1.0);
    InequalityCheck {
        name: name.to_string(),
        value,
        bound,
        margin,
        holds: margin >= -tol,
    }
}

fn region_checks(
    spec: &LocalizationSpec,
    cone1: &ConeData,
    u_sup: f64,
    u_min_window: f64,
    v_min: f64,
    v_max: f64,
) -> Vec<InequalityCheck> {
    let mut out = match spec.case {
        Case::Compressive => vec![
            ineq("min_window_u >= rho1", u_min_window, spec.rho1, true),
            ineq("sup_u <= rho2", u_sup, spec.rho2, false),
        ],
        Case::Expansive => vec![
            ineq("sup_u >= rho2", u_sup, spec.rho2, true),
            ineq("min_window_u <= rho1", u_min_window, spec.rho1, false),
        ],
    };
    out.push(ineq("min_window_u >= c1 * sup_u", u_min_window, cone1.c * u_sup, true));
    match spec.target {
        SecondTarget::Interval { alpha, beta } => {
            out.push(ineq("min_v >= alpha", v_min, alpha, true));
            out.push(ineq("max_v <= beta", v_max, beta, false));
        }
        SecondTarget::Ball { r2 } => {
            out.push(ineq("sup_v <= r2", v_min.abs().max(v_max.abs()), r2, false));
        }
    }
    out
}

/// The case-appropriate inequalities on a computed pair, each with tolerance
/// `1e-6 · max(1, |value|, |bound|)`, plus nonnegativity and nontriviality
/// of `u` and membership in the first cone.
pub fn check_localization(res: &SolveResult, spec: &LocalizationSpec, cone1: &ConeData) -> LocalizationReport {
    let (u, v) = (&res.u, &res.v);
    let (a, b) = cone1.window;
    let u_sup = u.sup_norm();
    let u_min_window = u.min_on_window(a, b).unwrap_or(f64::NAN);
    let mut checks = vec![
        ineq("min_u >= 0", u.min_value(), 0.0, true),
        InequalityCheck {
            name: "u nontrivial".into(),
            value: u_sup,
            bound: 0.0,
            margin: u_sup,
            holds: u_sup > LOCALIZATION_TOL,
        },
    ];
    checks.extend(region_checks(spec, cone1, u_sup, u_min_window, v.min_value(), v.max_value()));
    LocalizationReport {
        case: spec.case,
        converged: res.converged,
        consistent: res.converged && checks.iter().all(|c| c.holds),
        checks,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartOutcome {
    pub amplitude: f64,
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
    /// Index into the distinct solutions, when converged.
    pub solution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiStart {
    pub starts: Vec<StartOutcome>,
    #[serde(skip)]
    pub solutions: Vec<SolveResult>,
}

/// Geometric lattice of `count` amplitudes spanning `[min(ρ1, ρ2)/4, R1]`,
/// preceded by zero.
pub fn amplitude_lattice(spec: &LocalizationSpec, c1: f64, count: usize) -> Vec<f64> {
    let lo = spec.rho1.min(spec.rho2) / 4.0;
    let hi = spec.r1(c1);
    let mut out = vec![0.0];
    match count {
        0 => {}
        1 => out.push(lo),
        _ => out.extend((0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))),
    }
    out
}

/// Solves from `u0 = A · 4t(1 − t)` for each amplitude `A` (with `v0` from
/// the midshell guess) and keeps converged solutions that differ by more
/// than [`DEDUP_DISTANCE`] in sup norm, in lattice order.
pub fn multi_start(
    problem: &Problem,
    spec: &LocalizationSpec,
    amplitudes: &[f64],
    params: &SolveParams,
) -> Result<MultiStart, SolveError> {
    params.validate()?;
    let n = params.grid;
    let (_, v0) = default_initial_guess(spec, &InitialGuess::Midshell, n)?;
    let runs = amplitudes
        .par_iter()
        .map(|&amp| {
            let u0 = GridFunction::from_fn(n, |t| amp * 4.0 * t * (1.0 - t))?;
            solve(problem, (&u0, &v0), params)
        })
        .collect::<Result<Vec<_>, SolveError>>()?;
    let mut solutions: Vec<SolveResult> = Vec::new();
    let mut starts = Vec::with_capacity(runs.len());
    for (&amplitude, run) in amplitudes.iter().zip(runs) {
        let mut outcome = StartOutcome {
            amplitude,
            converged: run.converged,
            residual: run.residual(),
            iterations: run.iterations,
            solution: None,
        };
        if run.converged {
            let found = solutions.iter().position(|s| {
                let du = s.u.distance(&run.u).unwrap_or(f64::INFINITY);
                let dv = s.v.distance(&run.v).unwrap_or(f64::INFINITY);
                du.max(dv) <= DEDUP_DISTANCE
            });
            outcome.solution = Some(found.unwrap_or_else(|| {
                solutions.push(run);
                solutions.len() - 1
            }));
        }
        starts.push(outcome);
    }
    Ok(MultiStart { starts, solutions })
}
