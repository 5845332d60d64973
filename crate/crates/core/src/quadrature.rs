//! Composite Gauss–Legendre rules and kernel integral profiles.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expression};
use crate::grid::{grid_point, GridFunction};
use crate::kernels::{Kernel, KernelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("local order {0} outside 2..=10")]
    InvalidOrder(usize),
    #[error("need at least one panel")]
    NoPanels,
    #[error("profile needs at least 2 t points")]
    TooFewPoints,
    #[error("window [{0}, {1}] contains no profile point")]
    EmptyWindow(f64, f64),
    #[error("weight evaluation failed at s = {s}: {source}")]
    Weight {
        s: f64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// The serializable shape of a rule, recorded in certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub local_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 64,
            local_order: 5,
        }
    }
}

impl QuadratureRule {
    pub fn new(panels: usize, order: usize, lo: f64, hi: f64) -> Result<Self, QuadratureError> {
        if panels == 0 {
            return Err(QuadratureError::NoPanels);
        }
        if !(2..=10).contains(&order) {
            return Err(QuadratureError::InvalidOrder(order));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(QuadratureError::InvalidInterval(lo, hi));
        }
        let (ref_nodes, ref_weights) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        Self::map_into(&ref_nodes, &ref_weights, panels, lo, hi, |x, w| {
            nodes.push(x);
            weights.push(w);
        });
        Ok(Self {
            lo,
            hi,
            panels,
            order,
            ref_nodes,
            ref_weights,
            nodes,
            weights,
        })
    }

    pub fn from_spec(spec: QuadratureSpec) -> Result<Self, QuadratureError> {
        Self::new(spec.panels, spec.local_order, 0.0, 1.0)
    }

    fn map_into(
        ref_nodes: &[f64],
        ref_weights: &[f64],
        panels: usize,
        lo: f64,
        hi: f64,
        mut sink: impl FnMut(f64, f64),
    ) {
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let left = lo + width * p as f64;
            let mid = left + 0.5 * width;
            for (x, w) in ref_nodes.iter().zip(ref_weights) {
                sink(mid + 0.5 * width * x, 0.5 * width * w);
            }
        }
    }

    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            panels: self.panels,
            local_order: self.order,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<E>(&self, f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
        self.integrate_on(self.lo, self.hi, f)
    }

    /// Applies the same panel structure to `[lo, hi]`. Empty when `lo >= hi`.
    pub fn integrate_on<E>(
        &self,
        lo: f64,
        hi: f64,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<f64, E> {
        if lo >= hi {
            return Ok(0.0);
        }
        let width = (hi - lo) / self.panels as f64;
        let mut sum = 0.0;
        for p in 0..self.panels {
            let mid = lo + width * (p as f64 + 0.5);
            let mut panel = 0.0;
            for (x, w) in self.ref_nodes.iter().zip(&self.ref_weights) {
                panel += w * f(mid + 0.5 * width * x)?;
            }
            sum += 0.5 * width * panel;
        }
        Ok(sum)
    }
}

/// Free-function constructor matching the other module entry points.
pub fn make_rule(
    panels: usize,
    local_order: usize,
    interval: (f64, f64),
) -> Result<QuadratureRule, QuadratureError> {
    QuadratureRule::new(panels, local_order, interval.0, interval.1)
}

/// The function `w(s)` multiplying the kernel inside a profile.
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    /// A bound function written in `t`, evaluated at `t = s`.
    Expr(&'a Expression),
    /// Linear interpolation of grid values.
    Grid(&'a GridFunction),
    Func(&'a (dyn Fn(f64) -> f64 + Sync)),
}

impl Weight<'_> {
    pub fn eval(&self, s: f64) -> Result<f64, QuadratureError> {
        match self {
            Weight::Expr(e) => e
                .eval_univariate(s)
                .map_err(|source| QuadratureError::Weight { s, source }),
            Weight::Grid(g) => Ok(g.interpolate(s)),
            Weight::Func(f) => Ok(f(s)),
        }
    }
}

/// Uniform `points`-point grid on `[lo, hi]` for profile evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl TGrid {
    pub fn unit(points: usize) -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            points,
        }
    }

    pub fn on(window: (f64, f64), points: usize) -> Self {
        Self {
            lo: window.0,
            hi: window.1,
            points,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.points == 1 || self.lo == self.hi {
            return self.lo;
        }
        if i + 1 == self.points {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * grid_point(self.points, i)
    }
}

impl Default for TGrid {
    fn default() -> Self {
        Self::unit(1025)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkHandling {
    /// Split the `s` interval at `s = t` for kinked kernels.
    Split,
    /// Integrate straight across the kink.
    Ignore,
}

/// `P(t_i) ≈ ∫ k(t_i, s) w(s) ds` over an `s` interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub s_interval: (f64, f64),
}

pub fn kernel_profile(
    k: &Kernel,
    w: Weight<'_>,
    s_interval: (f64, f64),
    t_grid: TGrid,
    rule: &QuadratureRule,
) -> Result<Profile, QuadratureError> {
    kernel_profile_with(k, w, s_interval, t_grid, rule, KinkHandling::Split)
}

pub fn kernel_profile_with(
    k: &Kernel,
    w: Weight<'_>,
    s_interval: (f64, f64),
    t_grid: TGrid,
    rule: &QuadratureRule,
    kink: KinkHandling,
) -> Result<Profile, QuadratureError> {
    let (lo, hi) = s_interval;
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(QuadratureError::InvalidInterval(lo, hi));
    }
    if t_grid.points < 2 {
        return Err(QuadratureError::TooFewPoints);
    }
    let t: Vec<f64> = (0..t_grid.points).map(|i| t_grid.point(i)).collect();
    let split = kink == KinkHandling::Split && k.has_kink();
    let values = t
        .par_iter()
        .map(|&ti| {
            let integrand = |s: f64| -> Result<f64, QuadratureError> { Ok(k.eval(ti, s)? * w.eval(s)?) };
            if split && ti > lo && ti < hi {
                Ok(rule.integrate_on(lo, ti, integrand)? + rule.integrate_on(ti, hi, integrand)?)
            } else {
                rule.integrate_on(lo, hi, integrand)
            }
        })
        .collect::<Result<Vec<f64>, QuadratureError>>()?;
    Ok(Profile {
        t,
        values,
        s_interval,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrema {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

/// Extrema over profile points inside `window`, each refined once by a
/// parabola through the extremal point and its two neighbours.
pub fn profile_extrema(p: &Profile, window: (f64, f64)) -> Result<Extrema, QuadratureError> {
    let (a, b) = window;
    let slack = 1e-12;
    let inside: Vec<usize> = (0..p.t.len())
        .filter(|&i| p.t[i] >= a - slack && p.t[i] <= b + slack)
        .collect();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return Err(QuadratureError::EmptyWindow(a, b));
    };
    let mut imin = first;
    let mut imax = first;
    for &i in &inside {
        if p.values[i] < p.values[imin] {
            imin = i;
        }
        if p.values[i] > p.values[imax] {
            imax = i;
        }
    }
    let refine = |i: usize, want_min: bool| -> (f64, f64) {
        let raw = (p.values[i], p.t[i]);
        if i <= first || i >= last {
            return raw;
        }
        let (y0, y1, y2) = (p.values[i - 1], p.values[i], p.values[i + 1]);
        let (t0, t1, t2) = (p.t[i - 1], p.t[i], p.t[i + 1]);
        let h = t1 - t0;
        if (t2 - t1 - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return raw;
        }
        let curvature = y2 - 2.0 * y1 + y0;
        if (want_min && curvature <= 0.0) || (!want_min && curvature >= 0.0) {
            return raw;
        }
        let shift = -0.5 * h * (y2 - y0) / curvature;
        if shift.abs() > h {
            return raw;
        }
        let value = y1 - (y2 - y0) * (y2 - y0) / (8.0 * curvature);
        let better = if want_min { value <= y1 } else { value >= y1 };
        if better {
            (value, t1 + shift)
        } else {
            raw
        }
    };
    let (min, argmin) = refine(imin, true);
    let (max, argmax) = refine(imax, false);
    Ok(Extrema {
        min,
        argmin,
        max,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(panels: usize, order: usize) -> QuadratureRule {
        make_rule(panels, order, (0.0, 1.0)).unwrap()
    }

    fn one(_: f64) -> f64 {
        1.0
    }

    #[test]
    fn gauss_nodes_known_values() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_eq!(x[1], 0.0);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        for order in 2..=10 {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn rule_examples() {
        let r = unit(4, 3);
        let cube = r.integrate(|s| Ok::<_, ()>(s * s * s)).unwrap();
        assert!((cube - 0.25).abs() <= 1e-15);
        let ones = unit(64, 5).integrate(|_| Ok::<_, ()>(1.0)).unwrap();
        assert!((ones - 1.0).abs() < 1e-14);
        let bump = unit(3, 2).integrate(|s| Ok::<_, ()>(s * (1.0 - s))).unwrap();
        assert!((bump - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rule_invariants() {
        let r = make_rule(7, 6, (0.25, 0.75)).unwrap();
        assert!((r.weights().iter().sum::<f64>() - 0.5).abs() < 1e-14);
        assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(r.nodes().iter().all(|&x| x > 0.25 && x < 0.75));
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rule_errors() {
        assert_eq!(make_rule(0, 3, (0.0, 1.0)), Err(QuadratureError::NoPanels));
        assert_eq!(make_rule(1, 1, (0.0, 1.0)), Err(QuadratureError::InvalidOrder(1)));
        assert_eq!(make_rule(1, 11, (0.0, 1.0)), Err(QuadratureError::InvalidOrder(11)));
        assert!(matches!(make_rule(1, 3, (1.0, 0.0)), Err(QuadratureError::InvalidInterval(..))));
    }

    #[test]
    fn k2_unit_weight_profile() {
        let p = kernel_profile(&Kernel::sturm_liouville(), Weight::Func(&one), (0.0, 1.0), TGrid::default(), &unit(64, 5))
            .unwrap();
        for (t, v) in p.t.iter().zip(&p.values) {
            assert!((v - (1.5 - t * t / 2.0)).abs() < 1e-13);
        }
        let e = profile_extrema(&p, (0.0, 1.0)).unwrap();
        assert!((e.max - 1.5).abs() < 1e-13);
        assert_eq!(e.argmax, 0.0);
    }

    #[test]
    fn k1_unit_weight_profile() {
        let p = kernel_profile(&Kernel::dirichlet(), Weight::Func(&one), (0.0, 1.0), TGrid::default(), &unit(64, 5))
            .unwrap();
        let e = profile_extrema(&p, (0.0, 1.0)).unwrap();
        assert!((e.max - 0.125).abs() < 1e-13);
        assert!((e.argmax - 0.5).abs() < 1e-8);
        let inner = kernel_profile(
            &Kernel::dirichlet(),
            Weight::Func(&one),
            (0.25, 0.75),
            TGrid::on((0.25, 0.75), 513),
            &unit(64, 5),
        )
        .unwrap();
        let e = profile_extrema(&inner, (0.25, 0.75)).unwrap();
        assert!((e.min - 1.0 / 16.0).abs() < 1e-13);
        assert!(e.argmin == 0.25 || e.argmin == 0.75);
    }

    #[test]
    fn constant_profile_extrema() {
        let p = Profile {
            t: (0..11).map(|i| i as f64 / 10.0).collect(),
            values: vec![3.0; 11],
            s_interval: (0.0, 1.0),
        };
        let e = profile_extrema(&p, (0.0, 1.0)).unwrap();
        assert_eq!((e.min, e.max), (3.0, 3.0));
        assert!(matches!(profile_extrema(&p, (0.51, 0.59)), Err(QuadratureError::EmptyWindow(..))));
    }

    #[test]
    fn parabolic_refinement_finds_off_grid_vertex() {
        let t: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let values = t.iter().map(|x| (x - 0.43) * (x - 0.43) + 1.0).collect();
        let p = Profile {
            t,
            values,
            s_interval: (0.0, 1.0),
        };
        let e = profile_extrema(&p, (0.0, 1.0)).unwrap();
        assert!((e.argmin - 0.43).abs() < 1e-12);
        assert!((e.min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn splitting_at_the_kink_beats_ignoring_it() {
        let rule = unit(8, 3);
        let grid = TGrid::unit(101);
        let k = Kernel::dirichlet();
        let err = |kink| {
            let p = kernel_profile_with(&k, Weight::Func(&one), (0.0, 1.0), grid, &rule, kink).unwrap();
            p.t.iter()
                .zip(&p.values)
                .map(|(t, v)| (v - t * (1.0 - t) / 2.0).abs())
                .fold(0.0, f64::max)
        };
        let split = err(KinkHandling::Split);
        let ignore = err(KinkHandling::Ignore);
        assert!(split < 1e-14, "{split}");
        assert!(ignore > 1e-6, "{ignore}");
    }

    #[test]
    fn positivity_with_nonnegative_weight() {
        let w = |s: f64| (3.0 * s).sin().abs();
        for k in [Kernel::dirichlet(), Kernel::sturm_liouville()] {
            let p = kernel_profile(&k, Weight::Func(&w), (0.0, 1.0), TGrid::unit(129), &unit(16, 4)).unwrap();
            assert!(p.values.iter().all(|v| *v >= 0.0));
        }
    }
}
