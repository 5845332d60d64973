//! Problem files: one JSON document per system, shipped schema in
//! `schema/problem.schema.json`.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use hammerloc::certify::{BallBounds, Case, IntervalBounds, LocalizationSpec, SecondTarget};
use hammerloc::expr::{Expression, VarSet};
use hammerloc::kernels::{ConeData, Kernel};
use hammerloc::operators::{NodeInterpolation, Problem};
use hammerloc::solve::{InitialGuess, Method, SolveParams};

/// Bundled fixtures, reachable by name when no file of that name exists.
pub const BUNDLED: [(&str, &str); 2] = [
    ("numex", include_str!("../fixtures/numex.json")),
    ("ex2", include_str!("../fixtures/ex2.json")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub kernels: KernelsSection,
    #[serde(default)]
    pub cones: ConesSection,
    pub f: String,
    pub g: String,
    pub localization: LocalizationSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub initial_guess: GuessSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsSection {
    #[serde(default = "dirichlet")]
    pub k1: KernelSpec,
    #[serde(default = "sturm_liouville")]
    pub k2: KernelSpec,
}

impl Default for KernelsSection {
    fn default() -> Self {
        Self {
            k1: dirichlet(),
            k2: sturm_liouville(),
        }
    }
}

fn dirichlet() -> KernelSpec {
    KernelSpec::Builtin(BuiltinKernel::Dirichlet)
}

fn sturm_liouville() -> KernelSpec {
    KernelSpec::Builtin(BuiltinKernel::SturmLiouville)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Builtin(BuiltinKernel),
    /// Branches in `t` and `s`: `below` for `s <= t`, `above` for `s > t`.
    Piecewise { below: String, above: String },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKernel {
    #[serde(alias = "k1")]
    Dirichlet,
    #[serde(alias = "k2")]
    SturmLiouville,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConesSection {
    pub k1: Option<ConeSpec>,
    pub k2: Option<ConeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub envelope: String,
    pub c: f64,
    #[serde(default = "unit_window")]
    pub window: [f64; 2],
}

fn unit_window() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    Compressive,
    Expansive,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSection {
    #[serde(default)]
    pub case: Option<CaseName>,
    pub rho1: f64,
    pub rho2: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub r2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub f_lower: Option<String>,
    pub f_upper: Option<String>,
    pub g_lower: Option<String>,
    pub g_upper: Option<String>,
    pub g_abs: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Picard,
    Newton,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Picard => Method::Picard,
            MethodName::Newton => Method::Newton,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: Option<MethodName>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub damping: Option<f64>,
    pub max_iter: Option<usize>,
    pub cell_order: Option<usize>,
    pub interpolation: Option<NodeInterpolation>,
    pub homogeneity: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GuessSection {
    #[default]
    Midshell,
    /// Coefficients in ascending powers of `t`.
    Polynomial { u: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone)]
pub enum Bounds {
    Interval(IntervalBounds),
    Ball(BallBounds),
}

/// A problem file with every expression parsed and every default filled.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub problem: Problem,
    pub spec: LocalizationSpec,
    pub bounds: Bounds,
    pub params: SolveParams,
    pub guess: InitialGuess,
}

/// Reads `arg` as a path, or as the name of a bundled fixture when no such
/// file exists.
pub fn load(arg: &Path) -> Result<Loaded> {
    let (text, fallback_name) = if arg.exists() {
        let text = std::fs::read_to_string(arg).with_context(|| format!("reading {}", arg.display()))?;
        let stem = arg.file_stem().map(|s| s.to_string_lossy().into_owned());
        (text, stem.unwrap_or_default())
    } else if let Some((name, text)) = BUNDLED.iter().find(|(n, _)| Path::new(n) == arg) {
        (text.to_string(), name.to_string())
    } else {
        bail!("no problem file at {} (bundled: numex, ex2)", arg.display());
    };
    let file = parse(&text)?;
    resolve(file, fallback_name)
}

/// Deserializes with the JSON path of the offending field in any error.
pub fn parse(text: &str) -> Result<ProblemFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("schema error at `{path}`: {}", e.into_inner())
    })
}

fn expr(path: &str, source: &str, vars: VarSet) -> Result<Expression> {
    Expression::parse_with(source, vars).map_err(|e| anyhow!("`{path}`: {e} in {source:?}"))
}

fn opt_expr(path: &str, source: &Option<String>) -> Result<Option<Expression>> {
    source.as_deref().map(|s| expr(path, s, VarSet::Tuv)).transpose()
}

fn kernel(path: &str, spec: &KernelSpec) -> Result<Kernel> {
    Ok(match spec {
        KernelSpec::Builtin(BuiltinKernel::Dirichlet) => Kernel::dirichlet(),
        KernelSpec::Builtin(BuiltinKernel::SturmLiouville) => Kernel::sturm_liouville(),
        KernelSpec::Piecewise { below, above } => Kernel::piecewise(
            expr(&format!("{path}.piecewise.below"), below, VarSet::Ts)?,
            expr(&format!("{path}.piecewise.above"), above, VarSet::Ts)?,
        )
        .map_err(|e| anyhow!("`{path}`: {e}"))?,
    })
}

fn cone(path: &str, k: &Kernel, spec: &Option<ConeSpec>) -> Result<ConeData> {
    match spec {
        Some(c) => {
            let envelope = expr(&format!("{path}.envelope"), &c.envelope, VarSet::S)?;
            ConeData::from_parts(envelope, c.c, (c.window[0], c.window[1])).map_err(|e| anyhow!("`{path}`: {e}"))
        }
        None => k
            .default_cone_data()
            .ok_or_else(|| anyhow!("`{path}`: a piecewise kernel needs its envelope, c and window")),
    }
}

pub fn resolve(file: ProblemFile, fallback_name: String) -> Result<Loaded> {
    let kernel1 = kernel("kernels.k1", &file.kernels.k1)?;
    let kernel2 = kernel("kernels.k2", &file.kernels.k2)?;
    let cone1 = cone("cones.k1", &kernel1, &file.cones.k1)?;
    let cone2 = cone("cones.k2", &kernel2, &file.cones.k2)?;
    let problem = Problem {
        f: expr("f", &file.f, VarSet::Tuv)?,
        g: expr("g", &file.g, VarSet::Tuv)?,
        kernel1,
        cone1,
        kernel2,
        cone2,
    };

    let loc = &file.localization;
    let target = match (loc.alpha, loc.beta, loc.r2) {
        (Some(alpha), Some(beta), None) => SecondTarget::Interval { alpha, beta },
        (None, None, Some(r2)) => SecondTarget::Ball { r2 },
        _ => bail!("`localization`: give either alpha and beta, or r2"),
    };
    let c1 = problem.cone1.c;
    let case = match loc.case {
        Some(CaseName::Compressive) => Case::Compressive,
        Some(CaseName::Expansive) => Case::Expansive,
        None => LocalizationSpec::infer_case(loc.rho1, loc.rho2, c1)
            .ok_or_else(|| anyhow!("`localization`: radii fit neither the compressive nor the expansive case"))?,
    };
    let spec = LocalizationSpec {
        rho1: loc.rho1,
        rho2: loc.rho2,
        case,
        target,
    };
    spec.validate(c1).map_err(|e| anyhow!("`localization`: {e}"))?;

    let b = &file.bounds;
    let bounds = match target {
        SecondTarget::Interval { .. } => {
            if b.g_abs.is_some() {
                bail!("`bounds.g_abs`: only used with an r2 target");
            }
            Bounds::Interval(IntervalBounds {
                f_lower: opt_expr("bounds.f_lower", &b.f_lower)?,
                f_upper: opt_expr("bounds.f_upper", &b.f_upper)?,
                g_lower: opt_expr("bounds.g_lower", &b.g_lower)?,
                g_upper: opt_expr("bounds.g_upper", &b.g_upper)?,
            })
        }
        SecondTarget::Ball { .. } => {
            if b.g_lower.is_some() || b.g_upper.is_some() {
                bail!("`bounds`: g_lower and g_upper are only used with an alpha, beta target");
            }
            Bounds::Ball(BallBounds {
                f_lower: opt_expr("bounds.f_lower", &b.f_lower)?,
                f_upper: opt_expr("bounds.f_upper", &b.f_upper)?,
                g_abs: opt_expr("bounds.g_abs", &b.g_abs)?,
            })
        }
    };

    let s = &file.solver;
    let d = SolveParams::default();
    let params = SolveParams {
        method: s.method.map(Method::from).unwrap_or(d.method),
        damping: s.damping.unwrap_or(d.damping),
        max_iter: s.max_iter.unwrap_or(d.max_iter),
        tol: s.tol.unwrap_or(d.tol),
        grid: s.grid.unwrap_or(d.grid),
        cell_order: s.cell_order.unwrap_or(d.cell_order),
        interpolation: s.interpolation.unwrap_or(d.interpolation),
        homogeneity: s.homogeneity,
        region: Some(spec),
    };
    let guess = match file.initial_guess {
        GuessSection::Midshell => InitialGuess::Midshell,
        GuessSection::Polynomial { u, v } => InitialGuess::Polynomial { u, v },
    };
    Ok(Loaded {
        name: file.name.unwrap_or(fallback_name),
        problem,
        spec,
        bounds,
        params,
        guess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numex_text() -> &'static str {
        BUNDLED[0].1
    }

    #[test]
    fn bundled_fixtures_load() {
        for (name, text) in BUNDLED {
            let l = resolve(parse(text).unwrap(), String::new()).unwrap();
            assert_eq!(l.name, name);
            assert_eq!(l.spec.case, Case::Expansive);
        }
    }

    #[test]
    fn unknown_field_names_its_path() {
        let text = numex_text().replace("\"rho1\"", "\"rho_1\"");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("`localization.rho_1`"), "{err}");
    }

    #[test]
    fn wrong_type_names_its_path() {
        let text = numex_text().replace("\"grid\": 1025", "\"grid\": \"big\"");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("`solver.grid`"), "{err}");
    }

    #[test]
    fn parse_errors_carry_field_and_position() {
        let mut file = parse(numex_text()).unwrap();
        file.g = "t*(2+".into();
        let err = resolve(file, String::new()).unwrap_err().to_string();
        assert!(err.starts_with("`g`:"), "{err}");
        assert!(err.contains("position 5"), "{err}");
    }

    #[test]
    fn kernel_variables_are_checked() {
        let mut file = parse(numex_text()).unwrap();
        file.kernels.k1 = KernelSpec::Piecewise {
            below: "u*s".into(),
            above: "t".into(),
        };
        let err = resolve(file, String::new()).unwrap_err().to_string();
        assert!(err.contains("kernels.k1.piecewise.below"), "{err}");
    }

    #[test]
    fn piecewise_kernel_needs_cone_data() {
        let mut file = parse(numex_text()).unwrap();
        file.cones.k2 = None;
        file.kernels.k2 = KernelSpec::Piecewise {
            below: "2-t".into(),
            above: "2-s".into(),
        };
        let err = resolve(file, String::new()).unwrap_err().to_string();
        assert!(err.contains("cones.k2"), "{err}");
    }

    #[test]
    fn case_is_inferred_and_targets_are_exclusive() {
        let mut file = parse(numex_text()).unwrap();
        file.localization.case = None;
        assert_eq!(resolve(file, String::new()).unwrap().spec.case, Case::Expansive);
        let mut file = parse(numex_text()).unwrap();
        file.localization.r2 = Some(1.0);
        assert!(resolve(file, String::new()).is_err());
    }
}
