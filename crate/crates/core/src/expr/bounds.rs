//! Sampling-based bounds of expressions over boxes in (t, u, v).
//!
//! These bounds are empirical: the reported range is the range of the values
//! actually sampled, so it always sits inside the true range. Nothing here is
//! rigorous and every report carries `rigorous: false`.

use rayon::prelude::*;
use serde::Serialize;

use super::{EvalError, Expression};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn sample(&self, count: usize, k: usize) -> f64 {
        if count <= 1 || self.width() == 0.0 {
            return self.lo;
        }
        if k + 1 == count {
            return self.hi;
        }
        self.lo + self.width() * k as f64 / (count - 1) as f64
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// A closed box `t × u × v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box3 {
    pub t: Interval,
    pub u: Interval,
    pub v: Interval,
}

impl Box3 {
    pub fn new(t: (f64, f64), u: (f64, f64), v: (f64, f64)) -> Self {
        Self {
            t: Interval::new(t.0, t.1),
            u: Interval::new(u.0, u.1),
            v: Interval::new(v.0, v.1),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.t.is_valid() && self.u.is_valid() && self.v.is_valid()
    }

    fn axes(&self) -> [Interval; 3] {
        [self.t, self.u, self.v]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPolicy {
    pub samples_per_axis: usize,
    pub refinement_rounds: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        Self {
            samples_per_axis: 64,
            refinement_rounds: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxBounds {
    pub lower: f64,
    pub argmin: [f64; 3],
    pub upper: f64,
    pub argmax: [f64; 3],
    pub samples: usize,
    pub rigorous: bool,
}

/// An evaluation failure inside the box, with the offending point.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("{source} at (t, u, v) = ({}, {}, {})", point[0], point[1], point[2])]
pub struct BoxEvalError {
    pub point: [f64; 3],
    #[source]
    pub source: EvalError,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum BoundError {
    #[error("invalid box (each interval needs finite lo <= hi)")]
    InvalidBox,
    #[error("sampling policy needs at least one sample per axis")]
    InvalidPolicy,
    #[error(transparent)]
    Eval(#[from] BoxEvalError),
}

#[derive(Debug, Clone, Copy)]
struct Extreme {
    value: f64,
    point: [f64; 3],
    // lexicographic sample index, used to break ties deterministically
    order: (usize, usize),
}

impl Extreme {
    fn better_min(self, other: Self) -> Self {
        if other.value < self.value || (other.value == self.value && other.order < self.order) {
            other
        } else {
            self
        }
    }

    fn better_max(self, other: Self) -> Self {
        if other.value > self.value || (other.value == self.value && other.order < self.order) {
            other
        } else {
            self
        }
    }
}

/// Empirical range of `e` over `domain`.
pub fn bound_on_box(
    e: &Expression,
    domain: &Box3,
    policy: SamplingPolicy,
) -> Result<BoxBounds, BoundError> {
    bound_fn_on_box(|t, u, v| e.eval(t, u, v), domain, policy)
}

/// Same as [`bound_on_box`] for an arbitrary function of (t, u, v).
///
/// A tensor grid with `samples_per_axis` points per non-degenerate axis is
/// scanned first. Each refinement round then places a 5×5×5 stencil around
/// the current argmin and argmax with half the previous spacing.
pub fn bound_fn_on_box<F>(
    f: F,
    domain: &Box3,
    policy: SamplingPolicy,
) -> Result<BoxBounds, BoundError>
where
    F: Fn(f64, f64, f64) -> Result<f64, EvalError> + Sync,
{
    if !domain.is_valid() {
        return Err(BoundError::InvalidBox);
    }
    if policy.samples_per_axis == 0 {
        return Err(BoundError::InvalidPolicy);
    }
    let axes = domain.axes();
    let counts = axes.map(|a| {
        if a.width() == 0.0 {
            1
        } else {
            policy.samples_per_axis.max(2)
        }
    });
    let eval = |p: [f64; 3]| f(p[0], p[1], p[2]).map_err(|source| BoxEvalError { point: p, source });

    let (mut lo, mut hi) = (0..counts[0])
        .into_par_iter()
        .map(|i| -> Result<(Extreme, Extreme), BoxEvalError> {
            let t = axes[0].sample(counts[0], i);
            let mut best: Option<(Extreme, Extreme)> = None;
            for j in 0..counts[1] {
                let u = axes[1].sample(counts[1], j);
                for k in 0..counts[2] {
                    let p = [t, u, axes[2].sample(counts[2], k)];
                    let x = Extreme {
                        value: eval(p)?,
                        point: p,
                        order: (0, (i * counts[1] + j) * counts[2] + k),
                    };
                    best = Some(match best {
                        None => (x, x),
                        Some((a, b)) => (a.better_min(x), b.better_max(x)),
                    });
                }
            }
            Ok(best.expect("at least one sample per axis"))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .reduce(|(a, b), (c, d)| (a.better_min(c), b.better_max(d)))
        .expect("at least one t sample");

    let mut samples = counts.iter().product::<usize>();
    let mut spacing = [0, 1, 2].map(|d| {
        if counts[d] > 1 {
            axes[d].width() / (counts[d] - 1) as f64
        } else {
            0.0
        }
    });
    for round in 1..=policy.refinement_rounds {
        spacing = spacing.map(|h| h / 2.0);
        let mut stencil = |centre: [f64; 3], keep_min: bool, acc: Extreme| -> Result<Extreme, BoxEvalError> {
            let mut acc = acc;
            let mut n = 0;
            for a in -2i32..=2 {
                for b in -2i32..=2 {
                    for c in -2i32..=2 {
                        let offs = [a, b, c];
                        let p = [0, 1, 2].map(|d| axes[d].clamp(centre[d] + offs[d] as f64 * spacing[d]));
                        let x = Extreme {
                            value: eval(p)?,
                            point: p,
                            order: (round, n),
                        };
                        n += 1;
                        acc = if keep_min { acc.better_min(x) } else { acc.better_max(x) };
                    }
                }
            }
            samples += n;
            Ok(acc)
        };
        lo = stencil(lo.point, true, lo)?;
        hi = stencil(hi.point, false, hi)?;
    }

    Ok(BoxBounds {
        lower: lo.value,
        argmin: lo.point,
        upper: hi.value,
        argmax: hi.point,
        samples,
        rigorous: false,
    })
}

/// Which side of the comparison the bound function sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominationKind {
    /// `bound(t) <= f(t, u, v)`
    Lower,
    /// `f(t, u, v) <= bound(t)`
    Upper,
    /// `|f(t, u, v)| <= bound(t)`
    AbsUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub kind: DominationKind,
    pub domain: Box3,
    /// Smallest sampled value of the gap (`f - bound` for `Lower`,
    /// `bound - f` or `bound - |f|` otherwise).
    pub worst_gap: f64,
    pub witness: [f64; 3],
    pub holds: bool,
    pub samples: usize,
    pub rigorous: bool,
}

/// Compares `f` against a bound function of `t` at shared samples.
///
/// The gap tolerance is `tol * (1 + |bound|)` at the witness.
pub fn check_domination(
    f: &Expression,
    bound: &Expression,
    kind: DominationKind,
    domain: &Box3,
    policy: SamplingPolicy,
    tol: f64,
) -> Result<DominationReport, BoundError> {
    let gap = |t: f64, u: f64, v: f64| -> Result<f64, EvalError> {
        let fv = f.eval(t, u, v)?;
        let bv = bound.eval(t, u, v)?;
        Ok(match kind {
            DominationKind::Lower => fv - bv,
            DominationKind::Upper => bv - fv,
            DominationKind::AbsUpper => bv - fv.abs(),
        })
    };
    let bounds = bound_fn_on_box(gap, domain, policy)?;
    let [t, u, v] = bounds.argmin;
    let scale = 1.0 + bound.eval(t, u, v).map(f64::abs).unwrap_or(0.0);
    Ok(DominationReport {
        kind,
        domain: *domain,
        worst_gap: bounds.lower,
        witness: bounds.argmin,
        holds: bounds.lower >= -tol * scale,
        samples: bounds.samples,
        rigorous: false,
    })
}
