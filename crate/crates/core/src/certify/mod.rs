//! Certificates for the integral conditions that localize a solution.
//!
//! Every condition pairs a domination check (a bound function of `t` sits
//! below or above the nonlinearity on a box) with a kernel-integral
//! inequality against a radius. A certificate collects the conditions of
//! one existence statement together with the kernel checks they depend on.
//!
//! Domination checks are sampled and integrals use quadrature, so
//! certificates are numerical evidence, never proofs. Zero margins pass:
//! several of the classical examples hold with exact equality.

mod report;

pub use report::json_to_text;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{
    bound_fn_on_box, check_domination, BoundError, Box3, DominationKind, DominationReport,
    Expression, SamplingPolicy,
};
use crate::kernels::{check_kernel, GridSpec, Kernel, KernelCheck, KernelError};
use crate::operators::Problem;
use crate::quadrature::{
    kernel_profile, profile_extrema, QuadratureError, QuadratureRule, QuadratureSpec, TGrid, Weight,
};

/// Absolute tolerance on condition margins.
pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("invalid localization spec: {0}")]
    InvalidSpec(String),
    #[error("condition `{0}` needs {1}")]
    WrongTarget(&'static str, &'static str),
    #[error("condition `{id}`: {source}")]
    Bound {
        id: String,
        #[source]
        source: BoundError,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `ρ1 / c1 < ρ2`: the solution satisfies `ρ1 <= min u`, `‖u‖ <= ρ2`.
    Compressive,
    /// `ρ2 < ρ1`: the solution satisfies `ρ2 <= ‖u‖`, `min u <= ρ1`.
    Expansive,
}

/// Where the second component is localized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SecondTarget {
    /// `α <= v(t) <= β` with `0 < α < β`.
    Interval { alpha: f64, beta: f64 },
    /// `‖v‖_∞ <= r2`.
    Ball { r2: f64 },
}

impl SecondTarget {
    fn validate(&self) -> Result<(), CertifyError> {
        match *self {
            SecondTarget::Interval { alpha, beta } if !(0.0 < alpha && alpha < beta && beta.is_finite()) => {
                Err(CertifyError::InvalidSpec(format!("need 0 < alpha < beta, got [{alpha}, {beta}]")))
            }
            SecondTarget::Ball { r2 } if !(r2 > 0.0 && r2.is_finite()) => {
                Err(CertifyError::InvalidSpec(format!("need r2 > 0, got {r2}")))
            }
            _ => Ok(()),
        }
    }

    /// Range of `v` inside the region.
    pub fn v_range(&self) -> (f64, f64) {
        match *self {
            SecondTarget::Interval { alpha, beta } => (alpha, beta),
            SecondTarget::Ball { r2 } => (-r2, r2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationSpec {
    pub rho1: f64,
    pub rho2: f64,
    pub case: Case,
    pub target: SecondTarget,
}

impl LocalizationSpec {
    /// Checks the case inequality against the first cone constant.
    pub fn validate(&self, c1: f64) -> Result<(), CertifyError> {
        if !(self.rho1 > 0.0 && self.rho2 > 0.0 && self.rho1.is_finite() && self.rho2.is_finite()) {
            return Err(CertifyError::InvalidSpec(format!(
                "radii must be positive, got rho1 = {}, rho2 = {}",
                self.rho1, self.rho2
            )));
        }
        match self.case {
            Case::Compressive if !(self.rho1 / c1 < self.rho2) => Err(CertifyError::InvalidSpec(format!(
                "compressive case needs rho1/c1 < rho2 ({} / {c1} vs {})",
                self.rho1, self.rho2
            ))),
            Case::Expansive if !(self.rho2 < self.rho1) => Err(CertifyError::InvalidSpec(format!(
                "expansive case needs rho2 < rho1 ({} vs {})",
                self.rho2, self.rho1
            ))),
            _ => self.target.validate(),
        }
    }

    /// The case implied by the radii, if either inequality holds.
    pub fn infer_case(rho1: f64, rho2: f64, c1: f64) -> Option<Case> {
        if rho1 / c1 < rho2 {
            Some(Case::Compressive)
        } else if rho2 < rho1 {
            Some(Case::Expansive)
        } else {
            None
        }
    }

    /// `R1 = max(ρ1 / c1, ρ2)`, the bound on `u` used by the ball variant.
    pub fn r1(&self, c1: f64) -> f64 {
        (self.rho1 / c1).max(self.rho2)
    }
}

/// Four radii `ρa < ρb < ρc < ρd` for the three-solution statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicitySpec {
    pub radii: Vec<f64>,
    pub target: SecondTarget,
}

impl MultiplicitySpec {
    pub fn validate(&self, c1: f64) -> Result<[f64; 4], CertifyError> {
        let [ra, rb, rc, rd]: [f64; 4] = self.radii.as_slice().try_into().map_err(|_| {
            CertifyError::InvalidSpec(format!("three-solution check needs four radii, got {}", self.radii.len()))
        })?;
        if !(ra > 0.0) {
            return Err(CertifyError::InvalidSpec("radii must be positive".into()));
        }
        if !(ra / c1 < rb) {
            return Err(CertifyError::InvalidSpec(format!("need rho_a/c1 < rho_b ({ra} / {c1} vs {rb})")));
        }
        if !(rb < rc) {
            return Err(CertifyError::InvalidSpec(format!("need rho_b < rho_c ({rb} vs {rc})")));
        }
        if !(rc / c1 < rd) {
            return Err(CertifyError::InvalidSpec(format!("need rho_c/c1 < rho_d ({rc} / {c1} vs {rd})")));
        }
        self.target.validate()?;
        Ok([ra, rb, rc, rd])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundProvenance {
    UserSupplied,
    /// A constant taken from the sampled range of the nonlinearity on the box.
    BoundOnBox,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundUsed {
    pub expression: String,
    pub provenance: BoundProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominationMode {
    #[default]
    Sampled,
    /// The caller vouches for the domination; it is recorded, not checked.
    UserAsserted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationRecord {
    pub mode: DominationMode,
    pub kind: DominationKind,
    pub domain: Box3,
    pub worst_gap: Option<f64>,
    pub witness: Option<[f64; 3]>,
    pub samples: usize,
    pub holds: bool,
    pub rigorous: bool,
}

impl DominationRecord {
    fn sampled(r: DominationReport) -> Self {
        Self {
            mode: DominationMode::Sampled,
            kind: r.kind,
            domain: r.domain,
            worst_gap: Some(r.worst_gap),
            witness: Some(r.witness),
            samples: r.samples,
            holds: r.holds,
            rigorous: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralRecord {
    pub kernel: String,
    pub s_interval: (f64, f64),
    pub t_window: (f64, f64),
    pub reduction: Reduction,
    pub extremum: f64,
    pub at_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub id: String,
    pub statement: String,
    pub bound: BoundUsed,
    pub domination: DominationRecord,
    pub integral: IntegralRecord,
    pub threshold: f64,
    /// Signed so that `margin >= -tol` means the inequality holds.
    pub margin: f64,
    pub tight: bool,
    pub pass: bool,
    pub sampling: SamplingPolicy,
    pub quadrature: QuadratureSpec,
    pub t_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    /// Shell for `u`, order interval for `v`.
    ShellInterval,
    /// Shell for `u`, ball for `v`.
    ShellBall,
    /// Three solutions separated by nested shells.
    ThreeSolutions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub statement: Statement,
    pub case: Option<Case>,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub target: SecondTarget,
    pub c1: f64,
    pub window: (f64, f64),
    pub tolerance: f64,
    pub kernel_checks: Vec<KernelCheck>,
    pub conditions: Vec<ConditionRecord>,
    pub verdict: Verdict,
    /// What the verdict predicts about a solution, one inequality per entry.
    pub localization: Vec<String>,
    pub rigorous: bool,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn condition(&self, id: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub sampling: SamplingPolicy,
    pub quadrature: QuadratureSpec,
    pub t_points: usize,
    pub tol: f64,
    pub domination: DominationMode,
    pub kernel_grid: GridSpec,
    pub check_kernels: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            sampling: SamplingPolicy::default(),
            quadrature: QuadratureSpec::default(),
            t_points: 1025,
            tol: MARGIN_TOL,
            domination: DominationMode::Sampled,
            kernel_grid: GridSpec::default(),
            check_kernels: true,
        }
    }
}

/// Bound functions for the interval statement; `None` derives a constant.
#[derive(Debug, Clone, Default)]
pub struct IntervalBounds {
    pub f_lower: Option<Expression>,
    pub f_upper: Option<Expression>,
    pub g_lower: Option<Expression>,
    pub g_upper: Option<Expression>,
}

/// Bound functions for the ball statement.
#[derive(Debug, Clone, Default)]
pub struct BallBounds {
    pub f_lower: Option<Expression>,
    pub f_upper: Option<Expression>,
    pub g_abs: Option<Expression>,
}

/// Per-radius bounds on `f` (at ρa, ρb, ρc, ρd) plus the `g` bounds.
#[derive(Debug, Clone, Default)]
pub struct MultiplicityBounds {
    pub f: [Option<Expression>; 4],
    pub g_lower: Option<Expression>,
    pub g_upper: Option<Expression>,
    pub g_abs: Option<Expression>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    First,
    Second,
}

struct Condition<'a> {
    id: String,
    statement: String,
    component: Component,
    bound: Option<&'a Expression>,
    kind: DominationKind,
    domain: Box3,
    s_interval: (f64, f64),
    t_window: (f64, f64),
    reduction: Reduction,
    threshold: f64,
}

fn derive_constant_bound(
    e: &Expression,
    kind: DominationKind,
    domain: &Box3,
    policy: SamplingPolicy,
) -> Result<Expression, BoundError> {
    let value = match kind {
        DominationKind::Lower => bound_fn_on_box(|t, u, v| e.eval(t, u, v), domain, policy)?.lower.max(0.0),
        DominationKind::Upper => bound_fn_on_box(|t, u, v| e.eval(t, u, v), domain, policy)?.upper.max(0.0),
        DominationKind::AbsUpper => {
            bound_fn_on_box(|t, u, v| e.eval(t, u, v).map(f64::abs), domain, policy)?.upper
        }
    };
    Ok(Expression::constant(value))
}

fn run_condition(problem: &Problem, c: Condition<'_>, opts: &CertifyOptions) -> Result<ConditionRecord, CertifyError> {
    let (nonlinearity, kernel): (&Expression, &Kernel) = match c.component {
        Component::First => (&problem.f, &problem.kernel1),
        Component::Second => (&problem.g, &problem.kernel2),
    };
    let bound_err = |source: BoundError| CertifyError::Bound {
        id: c.id.clone(),
        source,
    };

    let derived;
    let (bound, provenance) = match c.bound {
        Some(b) => (b, BoundProvenance::UserSupplied),
        None => {
            derived = derive_constant_bound(nonlinearity, c.kind, &c.domain, opts.sampling).map_err(bound_err)?;
            (&derived, BoundProvenance::BoundOnBox)
        }
    };

    let domination = match opts.domination {
        DominationMode::Sampled => DominationRecord::sampled(
            check_domination(nonlinearity, bound, c.kind, &c.domain, opts.sampling, opts.tol).map_err(bound_err)?,
        ),
        DominationMode::UserAsserted => DominationRecord {
            mode: DominationMode::UserAsserted,
            kind: c.kind,
            domain: c.domain,
            worst_gap: None,
            witness: None,
            samples: 0,
            holds: true,
            rigorous: false,
        },
    };

    let rule = QuadratureRule::from_spec(opts.quadrature)?;
    let profile = kernel_profile(
        kernel,
        Weight::Expr(bound),
        c.s_interval,
        TGrid::on(c.t_window, opts.t_points),
        &rule,
    )?;
    let ext = profile_extrema(&profile, c.t_window)?;
    let (extremum, at_t, margin) = match c.reduction {
        Reduction::Min => (ext.min, ext.argmin, ext.min - c.threshold),
        Reduction::Max => (ext.max, ext.argmax, c.threshold - ext.max),
    };
    Ok(ConditionRecord {
        id: c.id,
        statement: c.statement,
        bound: BoundUsed {
            expression: bound.source().to_string(),
            provenance,
        },
        pass: margin >= -opts.tol && domination.holds,
        tight: margin.abs() <= opts.tol,
        domination,
        integral: IntegralRecord {
            kernel: kernel.name(),
            s_interval: c.s_interval,
            t_window: c.t_window,
            reduction: c.reduction,
            extremum,
            at_t,
        },
        threshold: c.threshold,
        margin,
        sampling: opts.sampling,
        quadrature: opts.quadrature,
        t_points: opts.t_points,
    })
}

fn lower_radius_condition<'a>(
    problem: &Problem,
    id: String,
    rho: f64,
    v_range: (f64, f64),
    bound: Option<&'a Expression>,
) -> Condition<'a> {
    let c1 = problem.cone1.c;
    let (a, b) = problem.cone1.window;
    Condition {
        statement: format!(
            "f_lower <= f on [{a},{b}]x[{rho},{}]x[{},{}] and min_{{t in [{a},{b}]}} int_{a}^{b} k1(t,s) f_lower(s) ds >= {rho}",
            rho / c1,
            v_range.0,
            v_range.1
        ),
        id,
        component: Component::First,
        bound,
        kind: DominationKind::Lower,
        domain: Box3::new((a, b), (rho, rho / c1), v_range),
        s_interval: (a, b),
        t_window: (a, b),
        reduction: Reduction::Min,
        threshold: rho,
    }
}

fn upper_radius_condition<'a>(id: String, rho: f64, v_range: (f64, f64), bound: Option<&'a Expression>) -> Condition<'a> {
    Condition {
        statement: format!(
            "f <= f_upper on [0,1]x[0,{rho}]x[{},{}] and max_{{t in [0,1]}} int_0^1 k1(t,s) f_upper(s) ds <= {rho}",
            v_range.0, v_range.1
        ),
        id,
        component: Component::First,
        bound,
        kind: DominationKind::Upper,
        domain: Box3::new((0.0, 1.0), (0.0, rho), v_range),
        s_interval: (0.0, 1.0),
        t_window: (0.0, 1.0),
        reduction: Reduction::Max,
        threshold: rho,
    }
}

fn second_lower_condition<'a>(
    problem: &Problem,
    u_range: (f64, f64),
    alpha: f64,
    beta: f64,
    bound: Option<&'a Expression>,
) -> Condition<'a> {
    let (a, b) = problem.cone1.window;
    Condition {
        id: "alpha_lower".into(),
        statement: format!(
            "g_lower <= g on [{a},{b}]x[{},{}]x[{alpha},{beta}] and min_{{t in [0,1]}} int_{a}^{b} k2(t,s) g_lower(s) ds >= {alpha}",
            u_range.0, u_range.1
        ),
        component: Component::Second,
        bound,
        kind: DominationKind::Lower,
        domain: Box3::new((a, b), u_range, (alpha, beta)),
        s_interval: (a, b),
        t_window: (0.0, 1.0),
        reduction: Reduction::Min,
        threshold: alpha,
    }
}

fn second_upper_condition<'a>(u_max: f64, alpha: f64, beta: f64, bound: Option<&'a Expression>) -> Condition<'a> {
    Condition {
        id: "beta_upper".into(),
        statement: format!(
            "g <= g_upper on [0,1]x[0,{u_max}]x[{alpha},{beta}] and max_{{t in [0,1]}} int_0^1 k2(t,s) g_upper(s) ds <= {beta}"
        ),
        component: Component::Second,
        bound,
        kind: DominationKind::Upper,
        domain: Box3::new((0.0, 1.0), (0.0, u_max), (alpha, beta)),
        s_interval: (0.0, 1.0),
        t_window: (0.0, 1.0),
        reduction: Reduction::Max,
        threshold: beta,
    }
}

fn ball_condition(u_max: f64, r2: f64, bound: Option<&Expression>) -> Condition<'_> {
    Condition {
        id: "r2_ball".into(),
        statement: format!(
            "|g| <= g_abs on [0,1]x[0,{u_max}]x[{},{r2}] and max_{{t in [0,1]}} int_0^1 k2(t,s) g_abs(s) ds <= {r2}",
            -r2
        ),
        component: Component::Second,
        bound,
        kind: DominationKind::AbsUpper,
        domain: Box3::new((0.0, 1.0), (0.0, u_max), (-r2, r2)),
        s_interval: (0.0, 1.0),
        t_window: (0.0, 1.0),
        reduction: Reduction::Max,
        threshold: r2,
    }
}

/// `f_lower <= f` on `[a,b] × [ρ1, ρ1/c1] × D_v` and
/// `min_{t∈[a,b]} ∫_a^b k1(t,s) f_lower(s) ds >= ρ1`.
pub fn certify_lower_radius(
    problem: &Problem,
    spec: &LocalizationSpec,
    f_lower: Option<&Expression>,
    opts: &CertifyOptions,
) -> Result<ConditionRecord, CertifyError> {
    spec.validate(problem.cone1.c)?;
    let c = lower_radius_condition(problem, "rho1_lower".into(), spec.rho1, spec.target.v_range(), f_lower);
    run_condition(problem, c, opts)
}

/// `f <= f_upper` on `[0,1] × [0, ρ2] × D_v` and
/// `max_t ∫_0^1 k1(t,s) f_upper(s) ds <= ρ2`.
pub fn certify_upper_radius(
    problem: &Problem,
    spec: &LocalizationSpec,
    f_upper: Option<&Expression>,
    opts: &CertifyOptions,
) -> Result<ConditionRecord, CertifyError> {
    spec.validate(problem.cone1.c)?;
    let c = upper_radius_condition("rho2_upper".into(), spec.rho2, spec.target.v_range(), f_upper);
    run_condition(problem, c, opts)
}

/// Lower bound keeping `T2` above `α`; the `u` range of the box depends on
/// the case.
pub fn certify_second_lower(
    problem: &Problem,
    spec: &LocalizationSpec,
    g_lower: Option<&Expression>,
    opts: &CertifyOptions,
) -> Result<ConditionRecord, CertifyError> {
    spec.validate(problem.cone1.c)?;
    let SecondTarget::Interval { alpha, beta } = spec.target else {
        return Err(CertifyError::WrongTarget("alpha_lower", "an interval target"));
    };
    let c1 = problem.cone1.c;
    let u_range = match spec.case {
        Case::Compressive => (spec.rho1, spec.rho2),
        Case::Expansive => (c1 * spec.rho2, spec.rho1 / c1),
    };
    run_condition(problem, second_lower_condition(problem, u_range, alpha, beta, g_lower), opts)
}

/// Upper bound keeping `T2` below `β`.
pub fn certify_second_upper(
    problem: &Problem,
    spec: &LocalizationSpec,
    g_upper: Option<&Expression>,
    opts: &CertifyOptions,
) -> Result<ConditionRecord, CertifyError> {
    spec.validate(problem.cone1.c)?;
    let SecondTarget::Interval { alpha, beta } = spec.target else {
        return Err(CertifyError::WrongTarget("beta_upper", "an interval target"));
    };
    let u_max = match spec.case {
        Case::Compressive => spec.rho2,
        Case::Expansive => spec.rho1 / problem.cone1.c,
    };
    run_condition(problem, second_upper_condition(u_max, alpha, beta, g_upper), opts)
}

/// `|g| <= g_abs` on `[0,1] × [0, R1] × [-R2, R2]` and
/// `max_t ∫_0^1 k2(t,s) g_abs(s) ds <= R2`.
pub fn certify_ball(
    problem: &Problem,
    spec: &LocalizationSpec,
    g_abs: Option<&Expression>,
    opts: &CertifyOptions,
) -> Result<ConditionRecord, CertifyError> {
    spec.validate(problem.cone1.c)?;
    let SecondTarget::Ball { r2 } = spec.target else {
        return Err(CertifyError::WrongTarget("r2_ball", "a ball target"));
    };
    run_condition(problem, ball_condition(spec.r1(problem.cone1.c), r2, g_abs), opts)
}

fn kernel_checks(problem: &Problem, opts: &CertifyOptions) -> Result<Vec<KernelCheck>, CertifyError> {
    if !opts.check_kernels {
        return Ok(Vec::new());
    }
    let first = check_kernel(&problem.kernel1, &problem.cone1, opts.kernel_grid)?;
    // the second cone is taken over the whole interval
    let mut cone2 = problem.cone2.clone();
    cone2.window = (0.0, 1.0);
    let second = check_kernel(&problem.kernel2, &cone2, opts.kernel_grid)?;
    Ok(vec![first, second])
}

fn assemble(
    problem: &Problem,
    statement: Statement,
    spec: Option<&LocalizationSpec>,
    radii: Option<Vec<f64>>,
    target: SecondTarget,
    kernel_checks: Vec<KernelCheck>,
    conditions: Vec<ConditionRecord>,
    localization: Vec<String>,
    opts: &CertifyOptions,
) -> Certificate {
    let pass = conditions.iter().all(|c| c.pass) && kernel_checks.iter().all(|k| k.holds);
    Certificate {
        statement,
        case: spec.map(|s| s.case),
        rho1: spec.map(|s| s.rho1),
        rho2: spec.map(|s| s.rho2),
        radii,
        target,
        c1: problem.cone1.c,
        window: problem.cone1.window,
        tolerance: opts.tol,
        kernel_checks,
        conditions,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        localization: if pass { localization } else { Vec::new() },
        rigorous: false,
    }
}

fn shell_statements(spec: &LocalizationSpec, window: (f64, f64)) -> Vec<String> {
    let (a, b) = window;
    let mut out = vec!["(u, v) solves the system with u >= 0 in the first cone".to_string()];
    match spec.case {
        Case::Compressive => {
            out.push(format!("{} <= min_{{t in [{a},{b}]}} u(t)", spec.rho1));
            out.push(format!("||u||_inf <= {}", spec.rho2));
        }
        Case::Expansive => {
            out.push(format!("{} <= ||u||_inf", spec.rho2));
            out.push(format!("min_{{t in [{a},{b}]}} u(t) <= {}", spec.rho1));
        }
    }
    match spec.target {
        SecondTarget::Interval { alpha, beta } => out.push(format!("{alpha} <= v(t) <= {beta} for all t")),
        SecondTarget::Ball { r2 } => out.push(format!("||v||_inf <= {r2}")),
    }
    out
}

/// All four conditions of the shell × order-interval statement.
pub fn certify_shell_interval(
    problem: &Problem,
    spec: &LocalizationSpec,
    bounds: &IntervalBounds,
    opts: &CertifyOptions,
) -> Result<Certificate, CertifyError> {
    spec.validate(problem.cone1.c)?;
    if !matches!(spec.target, SecondTarget::Interval { .. }) {
        return Err(CertifyError::WrongTarget("shell_interval", "an interval target"));
    }
    let conditions = vec![
        certify_lower_radius(problem, spec, bounds.f_lower.as_ref(), opts)?,
        certify_upper_radius(problem, spec, bounds.f_upper.as_ref(), opts)?,
        certify_second_lower(problem, spec, bounds.g_lower.as_ref(), opts)?,
        certify_second_upper(problem, spec, bounds.g_upper.as_ref(), opts)?,
    ];
    Ok(assemble(
        problem,
        Statement::ShellInterval,
        Some(spec),
        None,
        spec.target,
        kernel_checks(problem, opts)?,
        conditions,
        shell_statements(spec, problem.cone1.window),
        opts,
    ))
}

/// The three conditions of the shell × ball statement.
pub fn certify_shell_ball(
    problem: &Problem,
    spec: &LocalizationSpec,
    bounds: &BallBounds,
    opts: &CertifyOptions,
) -> Result<Certificate, CertifyError> {
    spec.validate(problem.cone1.c)?;
    if !matches!(spec.target, SecondTarget::Ball { .. }) {
        return Err(CertifyError::WrongTarget("shell_ball", "a ball target"));
    }
    let conditions = vec![
        certify_lower_radius(problem, spec, bounds.f_lower.as_ref(), opts)?,
        certify_upper_radius(problem, spec, bounds.f_upper.as_ref(), opts)?,
        certify_ball(problem, spec, bounds.g_abs.as_ref(), opts)?,
    ];
    let mut localization = shell_statements(spec, problem.cone1.window);
    localization[0] = "(u, v) solves the system with u >= 0 nontrivial in the first cone".into();
    Ok(assemble(
        problem,
        Statement::ShellBall,
        Some(spec),
        None,
        spec.target,
        kernel_checks(problem, opts)?,
        conditions,
        localization,
        opts,
    ))
}

/// Lower-radius conditions at ρa and ρc, upper-radius conditions at ρb and
/// ρd, and `T2` conditions uniform over `0 <= u <= ρd`.
pub fn certify_three_solutions(
    problem: &Problem,
    spec: &MultiplicitySpec,
    bounds: &MultiplicityBounds,
    opts: &CertifyOptions,
) -> Result<Certificate, CertifyError> {
    let [ra, rb, rc, rd] = spec.validate(problem.cone1.c)?;
    let v_range = spec.target.v_range();
    let conds = [
        lower_radius_condition(problem, "rho_a_lower".into(), ra, v_range, bounds.f[0].as_ref()),
        upper_radius_condition("rho_b_upper".into(), rb, v_range, bounds.f[1].as_ref()),
        lower_radius_condition(problem, "rho_c_lower".into(), rc, v_range, bounds.f[2].as_ref()),
        upper_radius_condition("rho_d_upper".into(), rd, v_range, bounds.f[3].as_ref()),
    ];
    let mut conditions = conds
        .into_iter()
        .map(|c| run_condition(problem, c, opts))
        .collect::<Result<Vec<_>, _>>()?;
    match spec.target {
        SecondTarget::Interval { alpha, beta } => {
            conditions.push(run_condition(
                problem,
                second_lower_condition(problem, (ra, rd), alpha, beta, bounds.g_lower.as_ref()),
                opts,
            )?);
            conditions.push(run_condition(
                problem,
                second_upper_condition(rd, alpha, beta, bounds.g_upper.as_ref()),
                opts,
            )?);
        }
        SecondTarget::Ball { r2 } => {
            conditions.push(run_condition(problem, ball_condition(rd, r2, bounds.g_abs.as_ref()), opts)?);
        }
    }
    let (a, b) = problem.cone1.window;
    let dv = match spec.target {
        SecondTarget::Interval { alpha, beta } => format!("{alpha} <= v <= {beta}"),
        SecondTarget::Ball { r2 } => format!("||v||_inf <= {r2}"),
    };
    let m = format!("min_{{t in [{a},{b}]}} u(t)");
    let localization = vec![
        format!("solution 1: {m} > {ra} and ||u||_inf < {rb}, {dv}"),
        format!("solution 2: {m} > {rc} and ||u||_inf < {rd}, {dv}"),
        format!("solution 3: {m} < {rc} and ||u||_inf > {rb}, {dv}"),
    ];
    Ok(assemble(
        problem,
        Statement::ThreeSolutions,
        None,
        Some(spec.radii.clone()),
        spec.target,
        kernel_checks(problem, opts)?,
        conditions,
        localization,
        opts,
    ))
}
