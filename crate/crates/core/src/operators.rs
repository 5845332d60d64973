//! The Hammerstein operators
//!
//! ```text
//! T1(u, v)(t) = ∫₀¹ k1(t, s) f(s, u(s), v(s)) ds
//! T2(u, v)(t) = ∫₀¹ k2(t, s) g(s, u(s), v(s)) ds
//! ```
//!
//! in Nyström form on a uniform grid. The quadrature rule must put panel
//! boundaries on every grid point, so the kink of each kernel at `s = t_i`
//! falls on a panel boundary for every output point at once and a single
//! node set serves the whole grid. Grid values are carried to the nodes by
//! linear interpolation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expression};
pub use crate::grid::{GridError, GridFunction};
use crate::kernels::{ConeData, Kernel, KernelError};
use crate::quadrature::{QuadratureError, QuadratureRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("{which} evaluation failed at s = {s} (u = {u}, v = {v}): {source}")]
    Eval {
        which: &'static str,
        s: f64,
        u: f64,
        v: f64,
        #[source]
        source: EvalError,
    },
    #[error("quadrature rule on [{lo}, {hi}] with {panels} panels is not aligned with a {points}-point grid on [0, 1]")]
    MisalignedRule {
        lo: f64,
        hi: f64,
        panels: usize,
        points: usize,
    },
    #[error("bvp residual needs at least 5 grid points")]
    GridTooSmall,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Kernels with their cone data, plus the two nonlinearities.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kernel1: Kernel,
    pub cone1: ConeData,
    pub kernel2: Kernel,
    pub cone2: ConeData,
    pub f: Expression,
    pub g: Expression,
}

impl Problem {
    /// Built-in kernels with their default cone data.
    pub fn with_builtin_kernels(f: Expression, g: Expression) -> Self {
        let kernel1 = Kernel::dirichlet();
        let kernel2 = Kernel::sturm_liouville();
        Self {
            cone1: kernel1.default_cone_data().expect("builtin cone data"),
            cone2: kernel2.default_cone_data().expect("builtin cone data"),
            kernel1,
            kernel2,
            f,
            g,
        }
    }

    pub fn from_sources(f: &str, g: &str) -> Result<Self, crate::expr::ParseError> {
        Ok(Self::with_builtin_kernels(Expression::parse(f)?, Expression::parse(g)?))
    }
}

/// Default Gauss points per grid cell for the Nyström rule.
pub const DEFAULT_CELL_ORDER: usize = 3;

/// Composite rule with one panel per cell of an `n`-point grid.
pub fn cell_aligned_rule(n: usize, order: usize) -> Result<QuadratureRule, QuadratureError> {
    QuadratureRule::new(n.saturating_sub(1).max(1), order, 0.0, 1.0)
}

/// How grid values are carried to the quadrature nodes.
///
/// `Linear` preserves positivity and is second order. `Cubic` uses the four
/// nearest grid points and is fourth order, but can overshoot near steep
/// nonnegative data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeInterpolation {
    #[default]
    Linear,
    Cubic,
}

/// Precomputed Nyström discretization for one grid size.
///
/// Row `i` of `k1w` holds `k1(t_i, s_q) w_q` for every node `s_q`.
#[derive(Debug, Clone)]
pub struct Nystrom {
    n: usize,
    nodes: Vec<f64>,
    interpolation: NodeInterpolation,
    /// First grid index and weights of each node's stencil.
    stencil: Vec<(usize, [f64; 4])>,
    /// For each grid point, the nodes it reaches and with what weight.
    influence: Vec<Vec<(usize, f64)>>,
    k1w: Vec<f64>,
    k2w: Vec<f64>,
}

fn node_stencil(x: f64, n: usize, scheme: NodeInterpolation) -> (usize, [f64; 4]) {
    let cells = n - 1;
    let pos = x * cells as f64;
    let c = (pos.floor() as usize).min(cells - 1);
    match scheme {
        NodeInterpolation::Cubic if n >= 4 => {
            let b = c.saturating_sub(1).min(n - 4);
            let mut w = [0.0; 4];
            for (k, wk) in w.iter_mut().enumerate() {
                *wk = (0..4)
                    .filter(|&m| m != k)
                    .map(|m| (pos - (b + m) as f64) / (k as f64 - m as f64))
                    .product();
            }
            (b, w)
        }
        _ => {
            let l = pos - c as f64;
            (c, [1.0 - l, l, 0.0, 0.0])
        }
    }
}

/// Values of the nonlinearities at the quadrature nodes.
#[derive(Debug, Clone)]
pub(crate) struct NodeValues {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl Nystrom {
    pub fn new(problem: &Problem, n: usize, rule: &QuadratureRule) -> Result<Self, OperatorError> {
        Self::with_interpolation(problem, n, rule, NodeInterpolation::Linear)
    }

    pub fn with_interpolation(
        problem: &Problem,
        n: usize,
        rule: &QuadratureRule,
        interpolation: NodeInterpolation,
    ) -> Result<Self, OperatorError> {
        if n < crate::grid::MIN_GRID_POINTS {
            return Err(GridError::TooFewPoints {
                min: crate::grid::MIN_GRID_POINTS,
                got: n,
            }
            .into());
        }
        let cells = n - 1;
        let (lo, hi) = rule.interval();
        if lo != 0.0 || hi != 1.0 || rule.panels() % cells != 0 {
            return Err(OperatorError::MisalignedRule {
                lo,
                hi,
                panels: rule.panels(),
                points: n,
            });
        }
        let nodes = rule.nodes().to_vec();
        let weights = rule.weights();
        let stencil: Vec<(usize, [f64; 4])> = nodes.iter().map(|&x| node_stencil(x, n, interpolation)).collect();
        let mut influence = vec![Vec::new(); n];
        for (q, (b, w)) in stencil.iter().enumerate() {
            for (k, &wk) in w.iter().enumerate() {
                if wk != 0.0 {
                    influence[b + k].push((q, wk));
                }
            }
        }
        let q = nodes.len();
        let assemble = |k: &Kernel| -> Result<Vec<f64>, KernelError> {
            let rows = (0..n)
                .into_par_iter()
                .map(|i| {
                    let t = crate::grid::grid_point(n, i);
                    nodes
                        .iter()
                        .zip(weights)
                        .map(|(&s, &w)| Ok(k.eval(t, s)? * w))
                        .collect::<Result<Vec<f64>, KernelError>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut flat = Vec::with_capacity(n * q);
            rows.into_iter().for_each(|r| flat.extend(r));
            Ok(flat)
        };
        Ok(Self {
            n,
            k1w: assemble(&problem.kernel1)?,
            k2w: assemble(&problem.kernel2)?,
            nodes,
            interpolation,
            stencil,
            influence,
        })
    }

    /// Default discretization: [`DEFAULT_CELL_ORDER`] Gauss points per cell.
    pub fn with_default_rule(problem: &Problem, n: usize) -> Result<Self, OperatorError> {
        Self::new(problem, n, &cell_aligned_rule(n, DEFAULT_CELL_ORDER)?)
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub(crate) fn row1(&self, i: usize) -> &[f64] {
        let q = self.nodes.len();
        &self.k1w[i * q..(i + 1) * q]
    }

    pub(crate) fn row2(&self, i: usize) -> &[f64] {
        let q = self.nodes.len();
        &self.k2w[i * q..(i + 1) * q]
    }

    pub fn interpolation(&self) -> NodeInterpolation {
        self.interpolation
    }

    /// Nodes whose interpolated value depends on grid value `j`, with the
    /// weight of `j` in each.
    pub(crate) fn influence(&self, j: usize) -> &[(usize, f64)] {
        &self.influence[j]
    }

    fn check_len(&self, w: &GridFunction) -> Result<(), OperatorError> {
        if w.len() != self.n {
            return Err(GridError::Mismatch(w.len(), self.n).into());
        }
        Ok(())
    }

    fn interpolate(&self, values: &[f64]) -> Vec<f64> {
        self.stencil
            .iter()
            .map(|(b, w)| w.iter().enumerate().map(|(k, wk)| wk * values.get(b + k).copied().unwrap_or(0.0)).sum())
            .collect()
    }

    pub(crate) fn node_values(
        &self,
        problem: &Problem,
        u: &[f64],
        v: &[f64],
    ) -> Result<NodeValues, OperatorError> {
        let un = self.interpolate(u);
        let vn = self.interpolate(v);
        let eval = |which: &'static str, e: &Expression| -> Result<Vec<f64>, OperatorError> {
            self.nodes
                .iter()
                .zip(un.iter().zip(&vn))
                .map(|(&s, (&uq, &vq))| {
                    e.eval(s, uq, vq).map_err(|source| OperatorError::Eval {
                        which,
                        s,
                        u: uq,
                        v: vq,
                        source,
                    })
                })
                .collect()
        };
        Ok(NodeValues {
            f: eval("f", &problem.f)?,
            g: eval("g", &problem.g)?,
            u: un,
            v: vn,
        })
    }

    pub(crate) fn apply_rows(&self, which: Which, weights: &[f64]) -> Vec<f64> {
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                let row = match which {
                    Which::T1 => self.row1(i),
                    Which::T2 => self.row2(i),
                };
                row.iter().zip(weights).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `(T1(u, v), T2(u, v))` on the grid.
    pub fn apply(
        &self,
        problem: &Problem,
        u: &GridFunction,
        v: &GridFunction,
    ) -> Result<(GridFunction, GridFunction), OperatorError> {
        self.check_len(u)?;
        self.check_len(v)?;
        let nv = self.node_values(problem, u.values(), v.values())?;
        Ok((
            GridFunction::new(self.apply_rows(Which::T1, &nv.f))?,
            GridFunction::new(self.apply_rows(Which::T2, &nv.g))?,
        ))
    }

    pub fn apply_t1(
        &self,
        problem: &Problem,
        u: &GridFunction,
        v: &GridFunction,
    ) -> Result<GridFunction, OperatorError> {
        self.check_len(u)?;
        self.check_len(v)?;
        let nv = self.node_values(problem, u.values(), v.values())?;
        Ok(GridFunction::new(self.apply_rows(Which::T1, &nv.f))?)
    }

    pub fn apply_t2(
        &self,
        problem: &Problem,
        u: &GridFunction,
        v: &GridFunction,
    ) -> Result<GridFunction, OperatorError> {
        self.check_len(u)?;
        self.check_len(v)?;
        let nv = self.node_values(problem, u.values(), v.values())?;
        Ok(GridFunction::new(self.apply_rows(Which::T2, &nv.g))?)
    }

    /// `(‖u − T1(u, v)‖_∞, ‖v − T2(u, v)‖_∞)`.
    pub fn residual(
        &self,
        problem: &Problem,
        u: &GridFunction,
        v: &GridFunction,
    ) -> Result<(f64, f64), OperatorError> {
        let (tu, tv) = self.apply(problem, u, v)?;
        Ok((u.distance(&tu)?, v.distance(&tv)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Which {
    T1,
    T2,
}

pub fn apply_t1(
    problem: &Problem,
    u: &GridFunction,
    v: &GridFunction,
    rule: &QuadratureRule,
) -> Result<GridFunction, OperatorError> {
    Nystrom::new(problem, u.len(), rule)?.apply_t1(problem, u, v)
}

pub fn apply_t2(
    problem: &Problem,
    u: &GridFunction,
    v: &GridFunction,
    rule: &QuadratureRule,
) -> Result<GridFunction, OperatorError> {
    Nystrom::new(problem, u.len(), rule)?.apply_t2(problem, u, v)
}

pub fn residual(
    problem: &Problem,
    u: &GridFunction,
    v: &GridFunction,
    rule: &QuadratureRule,
) -> Result<(f64, f64), OperatorError> {
    Nystrom::new(problem, u.len(), rule)?.residual(problem, u, v)
}

pub fn sup_norm(w: &GridFunction) -> f64 {
    w.sup_norm()
}

pub fn min_on_window(w: &GridFunction, window: (f64, f64)) -> Result<f64, GridError> {
    w.min_on_window(window.0, window.1)
}

/// `min(min w, min_{[a,b]} w − c ‖w‖_∞)`; nonnegative iff `w` lies in the
/// first cone at grid level.
pub fn cone_margin_k1(w: &GridFunction, c: f64, window: (f64, f64)) -> Result<f64, GridError> {
    let window_min = w.min_on_window(window.0, window.1)?;
    Ok(w.min_value().min(window_min - c * w.sup_norm()))
}

/// `min_{[0,1]} w − c ‖w‖_∞`.
pub fn cone_margin_k2(w: &GridFunction, c: f64) -> f64 {
    w.min_value() - c * w.sup_norm()
}

/// Largest interior value of `|D²u_i + rhs(t_i, u_i, v_i)|` with the
/// centred second difference `D²`.
pub fn bvp_residual(u: &GridFunction, rhs: &Expression, v: &GridFunction) -> Result<f64, OperatorError> {
    second_difference_residual(u, v, |t, a, b| {
        rhs.eval(t, a, b).map_err(|source| OperatorError::Eval {
            which: "rhs",
            s: t,
            u: a,
            v: b,
            source,
        })
    })
}

/// Both boundary-value residuals of a computed pair: `u'' = −f(t, u, v)`
/// and `v'' = −g(t, u, v)`.
pub fn bvp_residuals(problem: &Problem, u: &GridFunction, v: &GridFunction) -> Result<(f64, f64), OperatorError> {
    let eval = |which: &'static str, e: &Expression, t: f64, a: f64, b: f64| {
        e.eval(t, a, b).map_err(|source| OperatorError::Eval {
            which,
            s: t,
            u: a,
            v: b,
            source,
        })
    };
    let ru = second_difference_residual(u, v, |t, a, b| eval("f", &problem.f, t, a, b))?;
    let rv = second_difference_residual(v, u, |t, b, a| eval("g", &problem.g, t, a, b))?;
    Ok((ru, rv))
}

fn second_difference_residual(
    w: &GridFunction,
    other: &GridFunction,
    rhs: impl Fn(f64, f64, f64) -> Result<f64, OperatorError>,
) -> Result<f64, OperatorError> {
    if w.len() < 5 {
        return Err(OperatorError::GridTooSmall);
    }
    if w.len() != other.len() {
        return Err(GridError::Mismatch(w.len(), other.len()).into());
    }
    let h = w.step();
    let (wv, ov) = (w.values(), other.values());
    let mut worst: f64 = 0.0;
    for i in 1..w.len() - 1 {
        let d2 = (wv[i - 1] - 2.0 * wv[i] + wv[i + 1]) / (h * h);
        worst = worst.max((d2 + rhs(w.t(i), wv[i], ov[i])?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(f: &str, g: &str) -> Problem {
        Problem::from_sources(f, g).unwrap()
    }

    fn zeros(n: usize) -> GridFunction {
        GridFunction::zeros(n).unwrap()
    }

    #[test]
    fn constant_nonlinearities() {
        let n = 1025;
        let p = problem("1", "1");
        let ny = Nystrom::with_default_rule(&p, n).unwrap();
        let (tu, tv) = ny.apply(&p, &zeros(n), &zeros(n)).unwrap();
        for (i, t) in tu.ts().enumerate() {
            assert!((tu.values()[i] - t * (1.0 - t) / 2.0).abs() < 1e-14);
            assert!((tv.values()[i] - (1.5 - t * t / 2.0)).abs() < 1e-13);
        }
        assert!((tu.values()[512] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn zero_nonlinearities() {
        let p = problem("0", "0");
        let n = 65;
        let rule = cell_aligned_rule(n, 3).unwrap();
        let u = GridFunction::constant(n, 3.0).unwrap();
        assert_eq!(apply_t1(&p, &u, &u, &rule).unwrap().sup_norm(), 0.0);
        assert_eq!(apply_t2(&p, &u, &u, &rule).unwrap().sup_norm(), 0.0);
        assert_eq!(residual(&p, &zeros(n), &zeros(n), &rule).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn numex_f_vanishes_with_u() {
        let p = problem("t*u^2*(1+sin(v)^2)", "t*(2+sin(u))*(6+cos(v))");
        let n = 129;
        let rule = cell_aligned_rule(n, 3).unwrap();
        let v = GridFunction::from_fn(n, |t| 3.0 + t).unwrap();
        assert_eq!(apply_t1(&p, &zeros(n), &v, &rule).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn linear_weight_in_k2() {
        let p = problem("0", "t");
        let n = 257;
        let t2 = apply_t2(&p, &zeros(n), &zeros(n), &cell_aligned_rule(n, 3).unwrap()).unwrap();
        assert!((t2.values()[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((t2.values()[n - 1] - 0.5).abs() < 1e-14);
        assert!((t2.max_value() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn residual_of_constant_f() {
        let p = problem("1", "0");
        let n = 1025;
        let (r1, r2) = residual(&p, &zeros(n), &zeros(n), &cell_aligned_rule(n, 3).unwrap()).unwrap();
        assert!((r1 - 0.125).abs() < 1e-15);
        assert_eq!(r2, 0.0);
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        // -w'' = s³ with zero ends gives w = (t - t⁵) / 20
        let p = problem("u", "0");
        let n = 33;
        let u = GridFunction::from_fn(n, |t| t * t * t).unwrap();
        let z = GridFunction::zeros(n).unwrap();
        let rule = cell_aligned_rule(n, 3).unwrap();
        let err = |scheme| {
            let ny = Nystrom::with_interpolation(&p, n, &rule, scheme).unwrap();
            let w = ny.apply_t1(&p, &u, &z).unwrap();
            (0..n)
                .map(|i| {
                    let t = crate::grid::grid_point(n, i);
                    (w.values()[i] - (t - t.powi(5)) / 20.0).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(NodeInterpolation::Cubic) < 1e-14);
        assert!(err(NodeInterpolation::Linear) > 1e-6);
    }

    #[test]
    fn influence_weights_sum_to_one_per_node() {
        let p = problem("u", "v");
        let n = 17;
        let rule = cell_aligned_rule(n, 3).unwrap();
        for scheme in [NodeInterpolation::Linear, NodeInterpolation::Cubic] {
            let ny = Nystrom::with_interpolation(&p, n, &rule, scheme).unwrap();
            let mut sums = vec![0.0; ny.nodes().len()];
            for j in 0..n {
                for &(q, w) in ny.influence(j) {
                    sums[q] += w;
                }
            }
            assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn misaligned_rule_is_rejected() {
        let p = problem("1", "1");
        let rule = QuadratureRule::new(10, 3, 0.0, 1.0).unwrap();
        assert!(matches!(Nystrom::new(&p, 65, &rule), Err(OperatorError::MisalignedRule { .. })));
        // two panels per cell is fine
        let rule = QuadratureRule::new(128, 2, 0.0, 1.0).unwrap();
        assert!(Nystrom::new(&p, 65, &rule).is_ok());
    }

    #[test]
    fn cone_margins() {
        // zero at the ends, so the nonnegativity part is tight
        let w = GridFunction::from_fn(1025, |t| t * (1.0 - t) / 2.0).unwrap();
        assert_eq!(cone_margin_k1(&w, 0.25, (0.25, 0.75)).unwrap(), 0.0);
        let w = GridFunction::from_fn(1025, |t| 1.0 + t * (1.0 - t)).unwrap();
        let m = cone_margin_k1(&w, 0.25, (0.25, 0.75)).unwrap();
        assert!((m - 0.875).abs() < 1e-15);
        let neg = GridFunction::constant(9, -1.0).unwrap();
        assert!(cone_margin_k1(&neg, 0.25, (0.25, 0.75)).unwrap() < 0.0);
        assert_eq!(cone_margin_k1(&zeros(9), 0.25, (0.25, 0.75)).unwrap(), 0.0);

        let w2 = GridFunction::from_fn(1025, |t| 1.5 - t * t / 2.0).unwrap();
        assert!((cone_margin_k2(&w2, 0.5) - 0.25).abs() < 1e-15);
        assert_eq!(cone_margin_k2(&zeros(9), 0.5), 0.0);
        let ramp = GridFunction::from_fn(9, |t| 1.0 - t).unwrap();
        assert_eq!(cone_margin_k2(&ramp, 0.5), -0.5);
    }

    #[test]
    fn bvp_residual_examples() {
        let one = Expression::parse("1").unwrap();
        let n = 257;
        let u = GridFunction::from_fn(n, |t| t * (1.0 - t) / 2.0).unwrap();
        assert!(bvp_residual(&u, &one, &zeros(n)).unwrap() < 1e-8);

        let rhs = Expression::parse("pi^2*sin(pi*t)").unwrap();
        let coarse = GridFunction::from_fn(65, |t| (std::f64::consts::PI * t).sin()).unwrap();
        let fine = GridFunction::from_fn(129, |t| (std::f64::consts::PI * t).sin()).unwrap();
        let rc = bvp_residual(&coarse, &rhs, &zeros(65)).unwrap();
        let rf = bvp_residual(&fine, &rhs, &zeros(129)).unwrap();
        assert!((rc / rf - 4.0).abs() < 0.05, "{rc} {rf}");
        assert!(matches!(
            bvp_residual(&GridFunction::zeros(4).unwrap(), &one, &GridFunction::zeros(4).unwrap()),
            Err(OperatorError::GridTooSmall)
        ));
    }

    #[test]
    fn bvp_residuals_swap_roles_for_v() {
        // u = t(1-t)/2 solves u'' = -1; v = 3/2 - t^2/2 solves v'' = -1,
        // and g reads u in its second slot
        let p = problem("1", "1 + 0*u");
        let n = 129;
        let u = GridFunction::from_fn(n, |t| t * (1.0 - t) / 2.0).unwrap();
        let v = GridFunction::from_fn(n, |t| 1.5 - t * t / 2.0).unwrap();
        let (ru, rv) = bvp_residuals(&p, &u, &v).unwrap();
        assert!(ru < 1e-9 && rv < 1e-9);
        let p = problem("1", "u - u + v - v + 1");
        assert!(bvp_residuals(&p, &u, &v).unwrap().1 < 1e-9);
        let p = problem("1", "8*u");
        let (_, rv) = bvp_residuals(&p, &u, &v).unwrap();
        // |8u - 1| is largest next to the ends, where u is smallest
        let h = 1.0 / 128.0;
        assert!((rv - (1.0 - 4.0 * h * (1.0 - h))).abs() < 1e-9);
    }
}
