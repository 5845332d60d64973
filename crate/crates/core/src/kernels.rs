//! Green's-function kernels, their envelopes and cone constants.
//!
//! A kernel `k` comes with an envelope `Φ` and a constant `c` such that
//! `k(t, s) <= Φ(s)` everywhere and `c Φ(s) <= k(t, s)` for `t` in a window
//! `[a, b]`. Those two inequalities are what force the integral operators to
//! map nonnegative functions into the cones used for localization.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expression, ParseError, Var, VarSet};
use crate::grid::grid_point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel argument ({t}, {s}) outside [0, 1]^2")]
    OutOfDomain { t: f64, s: f64 },
    #[error("kernel evaluation failed at (t, s) = ({t}, {s}): {source}")]
    Eval {
        t: f64,
        s: f64,
        #[source]
        source: EvalError,
    },
    #[error("envelope evaluation failed at s = {s}: {source}")]
    EnvelopeEval {
        s: f64,
        #[source]
        source: EvalError,
    },
    #[error("envelope is negative at s = {s} ({value})")]
    NegativeEnvelope { s: f64, value: f64 },
    #[error("envelope vanishes on an interval around s = {s}")]
    EnvelopeVanishes { s: f64 },
    #[error("kernel piece uses variable `{0}`; only t and s are allowed")]
    BadVariable(&'static str),
    #[error("invalid cone data: {0}")]
    InvalidConeData(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone)]
pub enum KernelKind {
    /// `(1 - t) s` for `s <= t`, `t (1 - s)` for `s > t`.
    Dirichlet,
    /// `2 - t` for `s <= t`, `2 - s` for `s > t`.
    SturmLiouville,
    /// User kernel given by its two branches in `(t, s)`.
    Piecewise { below: Expression, above: Expression },
}

#[derive(Debug, Clone)]
pub struct Kernel {
    kind: KernelKind,
}

/// Green's function of `-u'' = h`, `u(0) = u(1) = 0`.
pub fn eval_k1(t: f64, s: f64) -> Result<f64, KernelError> {
    check_domain(t, s)?;
    Ok(k1(t, s))
}

/// Green's function of `-v'' = h`, `v'(0) = 0`, `v(1) + v'(1) = 0`.
pub fn eval_k2(t: f64, s: f64) -> Result<f64, KernelError> {
    check_domain(t, s)?;
    Ok(k2(t, s))
}

#[inline]
fn k1(t: f64, s: f64) -> f64 {
    if s <= t {
        (1.0 - t) * s
    } else {
        t * (1.0 - s)
    }
}

#[inline]
fn k2(t: f64, s: f64) -> f64 {
    if s <= t {
        2.0 - t
    } else {
        2.0 - s
    }
}

fn check_domain(t: f64, s: f64) -> Result<(), KernelError> {
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(KernelError::OutOfDomain { t, s })
    }
}

impl Kernel {
    pub fn dirichlet() -> Self {
        Self {
            kind: KernelKind::Dirichlet,
        }
    }

    pub fn sturm_liouville() -> Self {
        Self {
            kind: KernelKind::SturmLiouville,
        }
    }

    /// `below` applies for `s <= t`, `above` for `s > t`.
    pub fn piecewise(below: Expression, above: Expression) -> Result<Self, KernelError> {
        for piece in [&below, &above] {
            if let Some(bad) = piece
                .variables()
                .into_iter()
                .find(|v| !matches!(v, Var::T | Var::S))
            {
                return Err(KernelError::BadVariable(bad.name()));
            }
        }
        Ok(Self {
            kind: KernelKind::Piecewise { below, above },
        })
    }

    pub fn piecewise_from_str(below: &str, above: &str) -> Result<Self, KernelError> {
        Self::piecewise(
            Expression::parse_with(below, VarSet::Ts)?,
            Expression::parse_with(above, VarSet::Ts)?,
        )
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            KernelKind::Dirichlet => "k1_dirichlet".into(),
            KernelKind::SturmLiouville => "k2_sturm_liouville".into(),
            KernelKind::Piecewise { below, above } => {
                format!("piecewise(s<=t: {}; s>t: {})", below.source(), above.source())
            }
        }
    }

    /// Every supported kernel may have a derivative jump across `s = t`.
    pub fn has_kink(&self) -> bool {
        true
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64, KernelError> {
        check_domain(t, s)?;
        self.eval_unchecked(t, s)
    }

    pub(crate) fn eval_unchecked(&self, t: f64, s: f64) -> Result<f64, KernelError> {
        match &self.kind {
            KernelKind::Dirichlet => Ok(k1(t, s)),
            KernelKind::SturmLiouville => Ok(k2(t, s)),
            KernelKind::Piecewise { below, above } => {
                let piece = if s <= t { below } else { above };
                piece
                    .eval_ts(t, s)
                    .map_err(|source| KernelError::Eval { t, s, source })
            }
        }
    }

    /// Envelope, constant and window known for the built-in kernels.
    pub fn default_cone_data(&self) -> Option<ConeData> {
        match self.kind {
            KernelKind::Dirichlet => ConeData::new("s*(1-s)", 0.25, (0.25, 0.75)).ok(),
            KernelKind::SturmLiouville => ConeData::new("2-s", 0.5, (0.0, 1.0)).ok(),
            KernelKind::Piecewise { .. } => None,
        }
    }

    /// Largest jump `|k(t, t⁻) - k(t, t⁺)|` over `n` sampled diagonal points.
    pub fn kink_jump(&self, n: usize) -> Result<f64, KernelError> {
        let mut jump: f64 = 0.0;
        for i in 0..n {
            let t = grid_point(n, i);
            let left = match &self.kind {
                KernelKind::Piecewise { below, .. } => below
                    .eval_ts(t, t)
                    .map_err(|source| KernelError::Eval { t, s: t, source })?,
                _ => self.eval_unchecked(t, t)?,
            };
            let right = match &self.kind {
                KernelKind::Piecewise { above, .. } => above
                    .eval_ts(t, t)
                    .map_err(|source| KernelError::Eval { t, s: t, source })?,
                KernelKind::Dirichlet => t * (1.0 - t),
                KernelKind::SturmLiouville => 2.0 - t,
            };
            jump = jump.max((left - right).abs());
        }
        Ok(jump)
    }
}

/// Envelope `Φ(s)`, constant `c` and window `[a, b]` for one kernel.
#[derive(Debug, Clone, Serialize)]
pub struct ConeData {
    pub envelope: Expression,
    pub c: f64,
    pub window: (f64, f64),
}

impl ConeData {
    pub fn new(envelope: &str, c: f64, window: (f64, f64)) -> Result<Self, KernelError> {
        let envelope = Expression::parse_with(envelope, VarSet::S)?;
        Self::from_parts(envelope, c, window)
    }

    pub fn from_parts(envelope: Expression, c: f64, window: (f64, f64)) -> Result<Self, KernelError> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(KernelError::InvalidConeData(format!("c = {c} must lie in (0, 1]")));
        }
        let (a, b) = window;
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(KernelError::InvalidConeData(format!(
                "window [{a}, {b}] must satisfy 0 <= a <= b <= 1"
            )));
        }
        Ok(Self { envelope, c, window })
    }

    pub fn phi(&self, s: f64) -> Result<f64, KernelError> {
        self.envelope
            .eval_univariate(s)
            .map_err(|source| KernelError::EnvelopeEval { s, source })
    }
}

/// Resolution of kernel grid scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    /// Uniform points per axis on [0, 1].
    pub points: usize,
    /// Upper limit on 10× local densification passes around the argmin.
    pub refine_passes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 1025,
            refine_passes: 12,
        }
    }
}

/// Envelope values below this are skipped in the ratio `k / Φ`.
pub const ENVELOPE_CUTOFF: f64 = 1e-10;

const ENVELOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub holds: bool,
    /// `min Φ(s) - k(t, s)` over the grid.
    pub worst_margin: f64,
    pub witness: (f64, f64),
    pub points: usize,
}

fn envelope_values(phi: &Expression, n: usize) -> Result<Vec<f64>, KernelError> {
    (0..n)
        .map(|j| {
            let s = grid_point(n, j);
            let value = phi
                .eval_univariate(s)
                .map_err(|source| KernelError::EnvelopeEval { s, source })?;
            if value < 0.0 {
                return Err(KernelError::NegativeEnvelope { s, value });
            }
            Ok(value)
        })
        .collect()
}

/// Checks `k(t, s) <= Φ(s)` on a `points × points` grid.
pub fn verify_upper_envelope(
    k: &Kernel,
    phi: &Expression,
    grid: GridSpec,
) -> Result<EnvelopeReport, KernelError> {
    let n = grid.points.max(2);
    let phis = envelope_values(phi, n)?;
    let (worst_margin, witness) = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = grid_point(n, i);
            let mut best = (f64::INFINITY, (t, 0.0));
            for (j, &p) in phis.iter().enumerate() {
                let s = grid_point(n, j);
                let margin = p - k.eval_unchecked(t, s)?;
                if margin < best.0 {
                    best = (margin, (t, s));
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, KernelError>>()?
        .into_iter()
        .fold((f64::INFINITY, (0.0, 0.0)), |acc, x| if x.0 < acc.0 { x } else { acc });
    Ok(EnvelopeReport {
        holds: worst_margin >= -ENVELOPE_TOL,
        worst_margin,
        witness,
        points: n * n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeConstant {
    /// `min k(t, s) / Φ(s)` over the sampled set; an upper estimate of the
    /// best constant.
    pub value: f64,
    pub argmin: (f64, f64),
    pub rows: usize,
}

/// Estimates the largest `c` with `c Φ(s) <= k(t, s)` for `t ∈ window`.
///
/// Each `t` row takes the minimum ratio over the `s` grid, then densifies
/// 10× around its argmin until the row minimum stops moving. Rows are the
/// grid points inside the window plus both window endpoints.
pub fn compute_cone_constant(
    k: &Kernel,
    phi: &Expression,
    window: (f64, f64),
    grid: GridSpec,
) -> Result<ConeConstant, KernelError> {
    let (a, b) = window;
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(KernelError::InvalidConeData(format!("window [{a}, {b}] outside [0, 1]")));
    }
    let n = grid.points.max(3);
    let phis = envelope_values(phi, n)?;
    for j in 1..n - 2 {
        if phis[j] < ENVELOPE_CUTOFF && phis[j + 1] < ENVELOPE_CUTOFF {
            return Err(KernelError::EnvelopeVanishes { s: grid_point(n, j) });
        }
    }

    let mut rows: Vec<f64> = (0..n).map(|i| grid_point(n, i)).filter(|t| *t >= a && *t <= b).collect();
    rows.push(a);
    rows.push(b);
    rows.sort_by(f64::total_cmp);
    rows.dedup();

    let h = 1.0 / (n - 1) as f64;
    let results = rows
        .par_iter()
        .map(|&t| -> Result<(f64, f64), KernelError> {
            let mut best = (f64::INFINITY, f64::NAN);
            for (j, &p) in phis.iter().enumerate() {
                if p < ENVELOPE_CUTOFF {
                    continue;
                }
                let s = grid_point(n, j);
                let r = k.eval_unchecked(t, s)? / p;
                if r < best.0 {
                    best = (r, s);
                }
            }
            let mut spacing = h;
            for _ in 0..grid.refine_passes {
                if !best.1.is_finite() {
                    break;
                }
                spacing /= 10.0;
                let before = best.0;
                let centre = best.1;
                for m in -10i32..=10 {
                    let s = (centre + m as f64 * spacing).clamp(0.0, 1.0);
                    let p = phi
                        .eval_univariate(s)
                        .map_err(|source| KernelError::EnvelopeEval { s, source })?;
                    if p < ENVELOPE_CUTOFF {
                        continue;
                    }
                    let r = k.eval_unchecked(t, s)? / p;
                    if r < best.0 {
                        best = (r, s);
                    }
                }
                if before - best.0 <= 1e-13 * before.abs() {
                    break;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = ConeConstant {
        value: f64::INFINITY,
        argmin: (f64::NAN, f64::NAN),
        rows: rows.len(),
    };
    for (t, (value, s)) in rows.iter().zip(results) {
        if value < out.value {
            out.value = value;
            out.argmin = (*t, s);
        }
    }
    if !out.value.is_finite() {
        return Err(KernelError::EnvelopeVanishes { s: 0.5 });
    }
    Ok(out)
}

/// Everything checked about one kernel and its cone data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCheck {
    pub kernel: String,
    pub envelope: String,
    pub window: (f64, f64),
    pub declared_c: f64,
    pub computed_c: f64,
    pub c_argmin: (f64, f64),
    pub c_holds: bool,
    pub upper_envelope: EnvelopeReport,
    pub min_value: f64,
    pub nonnegative: bool,
    pub kink_jump: f64,
    pub continuous: bool,
    pub holds: bool,
    pub rigorous: bool,
}

/// Nonnegativity, continuity across `s = t`, the envelope bound and the
/// declared cone constant, all on grids.
pub fn check_kernel(k: &Kernel, cone: &ConeData, grid: GridSpec) -> Result<KernelCheck, KernelError> {
    let upper_envelope = verify_upper_envelope(k, &cone.envelope, grid)?;
    let constant = compute_cone_constant(k, &cone.envelope, cone.window, grid)?;
    let n = grid.points.max(2);
    let min_value = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = grid_point(n, i);
            (0..n).try_fold(f64::INFINITY, |m, j| Ok(m.min(k.eval_unchecked(t, grid_point(n, j))?)))
        })
        .collect::<Result<Vec<f64>, KernelError>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let kink_jump = k.kink_jump(n)?;
    let c_holds = constant.value >= cone.c - 1e-9;
    let nonnegative = min_value >= 0.0;
    let continuous = kink_jump <= 1e-12;
    Ok(KernelCheck {
        kernel: k.name(),
        envelope: cone.envelope.source().to_string(),
        window: cone.window,
        declared_c: cone.c,
        computed_c: constant.value,
        c_argmin: constant.argmin,
        c_holds,
        holds: c_holds && nonnegative && continuous && upper_envelope.holds,
        upper_envelope,
        min_value,
        nonnegative,
        kink_jump,
        continuous,
        rigorous: false,
    })
}
