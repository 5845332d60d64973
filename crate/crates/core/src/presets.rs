//! Ready-made problems: the two classical examples with their radii and
//! bound functions, and a three-solution example.

use crate::certify::{BallBounds, Case, IntervalBounds, LocalizationSpec, MultiplicityBounds, MultiplicitySpec, SecondTarget};
use crate::expr::Expression;
use crate::operators::Problem;

fn e(s: &str) -> Expression {
    Expression::parse(s).expect("preset expressions parse")
}

pub const NUMEX_F: &str = "t*u^2*(1+sin(v)^2)";
pub const NUMEX_G: &str = "t*(2+sin(u))*(6+cos(v))";
pub const EX2_G: &str = "t*exp(v^2-2)*sin(u)";

/// Superlinear `f`, bounded `g`, expansive radii `ρ1 = 64`, `ρ2 = 4` and
/// `v ∈ [1, 14]`.
pub fn numex() -> (Problem, LocalizationSpec, IntervalBounds) {
    let p = Problem::with_builtin_kernels(e(NUMEX_F), e(NUMEX_G));
    let spec = LocalizationSpec {
        rho1: 64.0,
        rho2: 4.0,
        case: Case::Expansive,
        target: SecondTarget::Interval { alpha: 1.0, beta: 14.0 },
    };
    let bounds = IntervalBounds {
        f_lower: Some(e("1024")),
        f_upper: Some(e("32")),
        g_lower: Some(e("5*t")),
        g_upper: Some(e("21*t")),
    };
    (p, spec, bounds)
}

/// Same `f`, sign-changing `g`, `v` in the ball of radius 1.
pub fn ex2() -> (Problem, LocalizationSpec, BallBounds) {
    let p = Problem::with_builtin_kernels(e(NUMEX_F), e(EX2_G));
    let spec = LocalizationSpec {
        rho1: 64.0,
        rho2: 4.0,
        case: Case::Expansive,
        target: SecondTarget::Ball { r2: 1.0 },
    };
    let bounds = BallBounds {
        f_lower: Some(e("1024")),
        f_upper: Some(e("32")),
        g_abs: Some(e("t*exp(-1)")),
    };
    (p, spec, bounds)
}

/// A sigmoidal `f` that is small near `u = 0` and saturates far above the
/// radius `ρc = 100`, so the shells at `ρa = 1`, `ρb = 8`, `ρc = 100`,
/// `ρd = 1000` alternate between lower- and upper-radius conditions.
pub fn three_solutions() -> (Problem, MultiplicitySpec, MultiplicityBounds) {
    let p = Problem::with_builtin_kernels(e("20 + 5000*u^4/(810000+u^4)"), e("1"));
    let spec = MultiplicitySpec {
        radii: vec![1.0, 8.0, 100.0, 1000.0],
        target: SecondTarget::Interval { alpha: 0.25, beta: 2.0 },
    };
    (p, spec, MultiplicityBounds::default())
}
