use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;
use xorder_core::asymptotics::{classify_variation, decide_comparability, VariationLabel};
use xorder_core::config::{RunConfig, Suite};
use xorder_core::fixtures::{run_suite, SuiteReport};
use xorder_core::grid::GridSpec;
use xorder_core::orders::{quantile_compose, saunders_moran_d, v_values, SmFamily};
use xorder_core::report::{classification_document, to_pretty, verdict_document, write_curve_csv};
use xorder_core::systems::{build_system, SystemSpec};
use xorder_core::Lifetime;

use crate::args::{ClassifyArgs, CompareArgs, CurveArgs, CurveKind, FamilyKind, FixturesArgs, Tuning};

/// Upper quantile used for default curve ranges.
const CURVE_UPPER_LEVEL: f64 = 1.0 - 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Document { path: PathBuf, source: xorder_core::Error },
    #[error(transparent)]
    Core(#[from] xorder_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: not valid JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Decisive,
    Inconclusive,
    Mismatch,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Decisive => 0,
            Outcome::Inconclusive => 2,
            Outcome::Mismatch => 3,
        }
    }
}

fn load_system(path: &Path) -> CliResult<SystemSpec> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let doc: Value = serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })?;
    build_system(&doc).map_err(|source| CliError::Document { path: path.into(), source })
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_csv(path: &Path, rows: &[(f64, f64)]) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    write_curve_csv(io::BufWriter::new(file), rows).map_err(|source| CliError::Io { path: path.into(), source })
}

fn run_config(t: &Tuning) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(x) = t.x_max {
        cfg.x_max = x;
    }
    if let Some(n) = t.grid {
        cfg.grid_points = n;
    }
    if let Some(e) = t.tol {
        cfg.epsilon = e;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn h_rows(x: &SystemSpec, y: &SystemSpec, grid: &GridSpec) -> CliResult<Vec<(f64, f64)>> {
    grid.points().into_iter().map(|t| Ok((t, quantile_compose(x, y, t)?))).collect()
}

pub fn compare(args: &CompareArgs) -> CliResult<Outcome> {
    let mut cfg = run_config(&args.tuning)?;
    cfg.out = args.out.clone();
    cfg.curves = args.curves.clone();
    let x = load_system(&args.lhs)?;
    let y = load_system(&args.rhs)?;
    let verdict = decide_comparability(&x, &y, &cfg.decide())?;
    if let Some(path) = &cfg.curves {
        let grid = GridSpec::linear(0.0, x.quantile(CURVE_UPPER_LEVEL)?, cfg.grid_points);
        write_csv(path, &h_rows(&x, &y, &grid)?)?;
    }
    write_output(cfg.out.as_deref(), &to_pretty(&verdict_document(&verdict)))?;
    Ok(if verdict.relation.is_decisive() { Outcome::Decisive } else { Outcome::Inconclusive })
}

pub fn classify(args: &ClassifyArgs) -> CliResult<Outcome> {
    let sys = load_system(&args.dist)?;
    let class = classify_variation(&sys);
    write_output(args.out.as_deref(), &to_pretty(&classification_document(&class)))?;
    Ok(if class.label == VariationLabel::Unknown { Outcome::Inconclusive } else { Outcome::Decisive })
}

fn require<'a, T>(v: &'a Option<T>, flag: &str, kind: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| CliError::Usage(format!("curve --kind {kind} needs --{flag}")))
}

fn curve_grid(args: &CurveArgs, lo: f64, hi: impl FnOnce() -> CliResult<f64>) -> CliResult<GridSpec> {
    let lo = args.lo.unwrap_or(lo);
    let hi = match args.hi {
        Some(h) => h,
        None => hi()?,
    };
    let grid = GridSpec::linear(lo, hi, args.grid);
    grid.validate()?;
    Ok(grid)
}

pub fn curve(args: &CurveArgs) -> CliResult<Outcome> {
    let rows = match args.kind {
        CurveKind::H => {
            let x = load_system(require(&args.lhs, "lhs", "h")?)?;
            let y = load_system(require(&args.rhs, "rhs", "h")?)?;
            let grid = curve_grid(args, 0.0, || Ok(x.quantile(CURVE_UPPER_LEVEL)?))?;
            h_rows(&x, &y, &grid)?
        }
        CurveKind::V => {
            let a = *require(&args.a, "a", "V")?;
            let b = *require(&args.b, "b", "V")?;
            if !(a > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(CliError::Usage(format!("V needs a > 0 and finite b, got a = {a}, b = {b}")));
            }
            let x = load_system(require(&args.lhs, "lhs", "V")?)?;
            let y = load_system(require(&args.rhs, "rhs", "V")?)?;
            let grid = curve_grid(args, 0.0, || Ok(y.quantile(CURVE_UPPER_LEVEL)?))?;
            let points = grid.points();
            let v = v_values(&x, &y, a, b, &points);
            points.into_iter().zip(v).collect()
        }
        CurveKind::D => {
            let kind = *require(&args.family, "family", "D")?;
            let alpha = *require(&args.alpha, "alpha", "D")?;
            let path = require(&args.base, "base", "D")?;
            let base = load_system(path)?.as_distribution().ok_or_else(|| {
                CliError::Usage(format!("{}: the family base must be a single distribution", path.display()))
            })?;
            let family = match kind {
                FamilyKind::Power => SmFamily::Power { base },
                FamilyKind::Scale => SmFamily::Scale { base },
            };
            let member = family.member(alpha)?;
            let lo = member.quantile(1e-3)?;
            let grid = curve_grid(args, lo, || Ok(member.quantile(CURVE_UPPER_LEVEL)?))?;
            grid.points()
                .into_iter()
                .map(|t| Ok((t, saunders_moran_d(&family, alpha, t)?)))
                .collect::<CliResult<Vec<_>>>()?
        }
    };
    write_csv(&args.out, &rows)?;
    Ok(Outcome::Decisive)
}

fn print_diff(report: &SuiteReport) {
    let mut err = io::stderr().lock();
    for o in report.outcomes.iter().filter(|o| !o.pass) {
        let _ = writeln!(err, "FAIL {}\n  - expected: {}\n  + observed: {}", o.id, o.expected, o.observed);
        if !o.note.is_empty() {
            let _ = writeln!(err, "    {}", o.note);
        }
    }
}

pub fn fixtures(args: &FixturesArgs) -> CliResult<Outcome> {
    let suite: Suite = args.suite.parse()?;
    let mut cfg = run_config(&args.tuning)?;
    cfg.suite = Some(suite);
    let report = run_suite(suite, &cfg)?;

    let mut summary = String::new();
    for o in &report.outcomes {
        summary.push_str(&format!("{} {}: {}\n", if o.pass { "ok  " } else { "FAIL" }, o.id, o.observed));
    }
    summary.push_str(&format!("suite {}: {} passed, {} failed\n", report.suite, report.passed, report.failed));
    write_output(None, &summary)?;
    if let Some(path) = &args.out {
        let doc = serde_json::to_value(&report).expect("reports serialize");
        write_output(Some(path), &to_pretty(&doc))?;
    }
    if report.all_passed() {
        Ok(Outcome::Decisive)
    } else {
        print_diff(&report);
        Ok(Outcome::Mismatch)
    }
}
