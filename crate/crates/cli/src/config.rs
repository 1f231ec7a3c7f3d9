//! Run configuration: a flat TOML document plus an optional `[sweep]` table
//! whose arrays are expanded into the cartesian product of runs.
//!
//! ```toml
//! solver = "bous"
//! eps = 0.05
//! mu = 0.1
//! initial = "gaussian(0.1, 14, 2)"
//!
//! [sweep]
//! eps = [0.01, 0.04]
//! ```

use std::fmt;
use std::path::Path;

use thiserror::Error;
use toml::{Table, Value};
use wsi_core::{Bathymetry, ClosureKind, Grid1D, Numerics, Parameters, Problem, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Sv,
    Bous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Rest,
    /// `a exp(-((x - x0) / w)^2)`, periodically wrapped.
    Gaussian { a: f64, x0: f64, w: f64 },
    /// `a sin(k x)`.
    Sine { a: f64, k: f64 },
}

impl Initial {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text == "rest" {
            return Ok(Initial::Rest);
        }
        let (name, args) = text
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(|| format!("expected \"rest\", \"gaussian(a, x0, w)\" or \"sine(a, k)\", got {text:?}"))?;
        let args = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|e| format!("bad argument {a:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        match (name.trim(), args.as_slice()) {
            ("gaussian", &[a, x0, w]) if w > 0.0 => Ok(Initial::Gaussian { a, x0, w }),
            ("gaussian", &[_, _, _]) => Err("gaussian width must be > 0".into()),
            ("sine", &[a, k]) => Ok(Initial::Sine { a, k }),
            (name, args) => Err(format!("unknown profile {name:?} with {} arguments", args.len())),
        }
    }

    /// Elevation sampled on the grid.
    pub fn zeta(&self, grid: &Grid1D) -> Vec<f64> {
        let nodes = grid.nodes();
        match *self {
            Initial::Rest => vec![0.0; grid.n],
            Initial::Gaussian { a, x0, w } => nodes
                .iter()
                .map(|x| a * (-(grid.wrap_offset(x - x0) / w).powi(2)).exp())
                .collect(),
            Initial::Sine { a, k } => nodes.iter().map(|x| a * (k * x).sin()).collect(),
        }
    }
}

impl fmt::Display for Initial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initial::Rest => write!(f, "rest"),
            Initial::Gaussian { a, x0, w } => write!(f, "gaussian({a:?}, {x0:?}, {w:?})"),
            Initial::Sine { a, k } => write!(f, "sine({a:?}, {k:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonMode {
    Fixed,
    /// The configured horizon is `T0`; the run lasts `T0 / sqrt(eps)`.
    EpsSqrtScaled,
}

/// A validated single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub closure: ClosureKind,
    pub params: Parameters,
    pub numerics: Numerics,
    pub n: usize,
    pub length: f64,
    pub amplitude: f64,
    pub radius: f64,
    pub center: f64,
    pub initial: Initial,
    pub v0: f64,
    pub horizon: f64,
    pub horizon_mode: HorizonMode,
    pub output_interval: f64,
    pub workers: usize,
    /// Constant of the Boussinesq velocity estimate.
    pub c0: f64,
}

impl RunConfig {
    pub fn problem(&self) -> wsi_core::Result<Problem> {
        let grid = Grid1D::new(self.n, self.length)?;
        let bath = Bathymetry::bump(self.amplitude, self.radius, self.center)?;
        Problem::new(self.params, grid, bath, self.numerics)
    }

    /// Simulated duration after applying the horizon mode.
    pub fn effective_horizon(&self) -> f64 {
        match self.horizon_mode {
            HorizonMode::Fixed => self.horizon,
            HorizonMode::EpsSqrtScaled => self.horizon / self.params.eps.sqrt(),
        }
    }

    /// Every key with its effective value; loading this table reproduces the run.
    pub fn to_table(&self) -> Table {
        let p = &self.params;
        let num = &self.numerics;
        let mut t = Table::new();
        let mut put = |k: &str, v: Value| {
            t.insert(k.to_string(), v);
        };
        put(
            "solver",
            Value::from(match self.solver {
                SolverKind::Sv => "sv",
                SolverKind::Bous => "bous",
            }),
        );
        put(
            "closure",
            Value::from(match self.closure {
                ClosureKind::RefinedBous => "refined",
                _ => "hydrostatic",
            }),
        );
        for (k, v) in [
            ("mu", p.mu),
            ("eps", p.eps),
            ("c_fric", p.c_fric),
            ("delta_bar", p.delta_bar),
            ("m_tilde", p.m_tilde),
            ("p_atm", p.p_atm),
            ("h_min", p.h_min),
            ("v0", self.v0),
            ("length", self.length),
            ("amplitude", self.amplitude),
            ("radius", self.radius),
            ("center", self.center),
            ("horizon", self.horizon),
            ("output_interval", self.output_interval),
            ("cfl", num.cfl),
            ("nu4", num.nu4),
            ("gradient_limit", num.gradient_limit),
            ("c0", self.c0),
        ] {
            put(k, Value::from(v));
        }
        put("n", Value::from(self.n as i64));
        put("workers", Value::from(self.workers as i64));
        put("profile", Value::from("bump"));
        put("initial", Value::from(self.initial.to_string()));
        put(
            "horizon_mode",
            Value::from(match self.horizon_mode {
                HorizonMode::Fixed => "fixed",
                HorizonMode::EpsSqrtScaled => "eps_sqrt_scaled",
            }),
        );
        t
    }
}

/// One problem with a config document.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid config:\n{}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

const KEYS: &[&str] = &[
    "solver",
    "closure",
    "mu",
    "eps",
    "c_fric",
    "delta_bar",
    "m_tilde",
    "p_atm",
    "h_min",
    "v0",
    "n",
    "length",
    "profile",
    "amplitude",
    "radius",
    "center",
    "initial",
    "horizon",
    "horizon_mode",
    "output_interval",
    "cfl",
    "nu4",
    "gradient_limit",
    "workers",
    "c0",
];

const SWEEP: &str = "sweep";

/// A parsed document: the base keys and the sweep axes, in file order.
#[derive(Debug, Clone)]
pub struct Document {
    source: String,
    base: Table,
    sweep: Vec<(String, Vec<Value>)>,
    /// Unknown keys and malformed sweep axes, reported with the value errors.
    structural: Vec<Violation>,
}

impl Document {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut table: Table = source.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
            line: e.span().map(|s| line_at(source, s.start)),
            message: e.message().to_string(),
        })?;
        let mut violations = Vec::new();
        let mut sweep = Vec::new();
        match table.remove(SWEEP) {
            None => {}
            Some(Value::Table(axes)) => {
                let mut axes: Vec<_> = axes.into_iter().collect();
                axes.sort_by_key(|(k, _)| line_of(source, Some(SWEEP), k).unwrap_or(usize::MAX));
                for (key, value) in axes {
                    let line = line_of(source, Some(SWEEP), &key);
                    match value {
                        _ if !KEYS.contains(&key.as_str()) => violations.push(Violation {
                            key: format!("{SWEEP}.{key}"),
                            line,
                            message: "unknown key".into(),
                        }),
                        Value::Array(values) if !values.is_empty() => sweep.push((key, values)),
                        _ => violations.push(Violation {
                            key: format!("{SWEEP}.{key}"),
                            line,
                            message: "sweep axes must be non-empty arrays".into(),
                        }),
                    }
                }
            }
            Some(_) => violations.push(Violation {
                key: SWEEP.into(),
                line: line_of(source, None, SWEEP),
                message: "must be a table of arrays".into(),
            }),
        }
        for key in table.keys() {
            if !KEYS.contains(&key.as_str()) {
                violations.push(Violation {
                    key: key.clone(),
                    line: line_of(source, None, key),
                    message: "unknown key".into(),
                });
            }
        }
        for key in violations.iter().map(|v| v.key.clone()).collect::<Vec<_>>() {
            table.remove(&key);
        }
        Ok(Self {
            source: source.to_string(),
            base: table,
            sweep,
            structural: violations,
        })
    }

    pub fn is_sweep(&self) -> bool {
        !self.sweep.is_empty()
    }

    /// The swept keys, in file order.
    pub fn axes(&self) -> Vec<&str> {
        self.sweep.iter().map(|(k, _)| k.as_str()).collect()
    }

    /// The base run, ignoring any sweep.
    pub fn single(&self) -> Result<RunConfig, ConfigError> {
        let built = build(&self.base, &self.source, &[]);
        match (built, self.structural.is_empty()) {
            (Ok(run), true) => Ok(run),
            (built, _) => {
                let mut violations = self.structural.clone();
                violations.extend(built.err().unwrap_or_default());
                sort(&mut violations);
                Err(ConfigError::Invalid(violations))
            }
        }
    }

    /// Cartesian expansion of the sweep (last axis fastest); every run is
    /// validated and all violations are reported together.
    pub fn expand(&self) -> Result<Vec<RunConfig>, ConfigError> {
        let mut runs = Vec::new();
        let mut violations = self.structural.clone();
        for point in self.points() {
            let mut table = self.base.clone();
            for (key, value) in &point {
                table.insert(key.clone(), value.clone());
            }
            let swept: Vec<&str> = point.iter().map(|(k, _)| k.as_str()).collect();
            match build(&table, &self.source, &swept) {
                Ok(run) => runs.push(run),
                Err(errs) => {
                    let label = point
                        .iter()
                        .map(|(k, v)| format!("{k} = {v}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    for mut v in errs {
                        if !label.is_empty() {
                            v.message = format!("{} (sweep point {label})", v.message);
                        }
                        if !violations.contains(&v) {
                            violations.push(v);
                        }
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(runs)
        } else {
            sort(&mut violations);
            Err(ConfigError::Invalid(violations))
        }
    }

    fn points(&self) -> Vec<Vec<(String, Value)>> {
        let mut points = vec![Vec::new()];
        for (key, values) in &self.sweep {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push((key.clone(), v.clone()));
                        p
                    })
                })
                .collect();
        }
        points
    }
}

pub fn load_document(path: &Path) -> Result<Document, ConfigError> {
    let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Document::parse(&source)
}

/// Loads a single-run config; a `[sweep]` block is rejected.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let doc = load_document(path)?;
    if doc.is_sweep() {
        return Err(ConfigError::Invalid(vec![Violation {
            key: SWEEP.into(),
            line: line_of(&doc.source, None, SWEEP),
            message: "a sweep block needs the `sweep` subcommand".into(),
        }]));
    }
    doc.single()
}

fn sort(v: &mut [Violation]) {
    v.sort_by(|a, b| (a.line.unwrap_or(usize::MAX), &a.key).cmp(&(b.line.unwrap_or(usize::MAX), &b.key)));
}

fn line_at(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// 1-based line of `key = ...` inside `section` (`None` for the top level).
fn line_of(source: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = Some(name.trim().to_string());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            if k.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    None
}

/// Typed access to the table, recording every bad key.
struct Reader<'a> {
    table: &'a Table,
    source: &'a str,
    swept: &'a [&'a str],
    violations: Vec<Violation>,
}

impl Reader<'_> {
    fn line(&self, key: &str) -> Option<usize> {
        if self.swept.contains(&key) {
            line_of(self.source, Some(SWEEP), key)
        } else {
            line_of(self.source, None, key)
        }
    }

    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            key: key.to_string(),
            line: self.line(key),
            message: message.into(),
        });
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Float(v)) => *v,
            Some(Value::Integer(v)) => *v as f64,
            Some(other) => {
                self.fail(key, format!("expected a number, got {}", other.type_str()));
                default
            }
        }
    }

    fn count(&mut self, key: &str, default: usize) -> usize {
        match self.table.get(key) {
            None => default,
            Some(Value::Integer(v)) if *v > 0 => *v as usize,
            Some(other) => {
                self.fail(key, format!("expected a positive integer, got {other}"));
                default
            }
        }
    }

    fn string(&mut self, key: &str, default: &str) -> Option<String> {
        match self.table.get(key) {
            None => Some(default.to_string()),
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => {
                self.fail(key, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    /// Maps a core error onto the key it concerns.
    fn core(&mut self, fallback: &str, err: wsi_core::Error) {
        let key = match &err {
            wsi_core::Error::InvalidParameter { name, .. } => *name,
            wsi_core::Error::RegimeViolation { .. } => "eps",
            wsi_core::Error::SupportExceedsDomain { .. } => "radius",
            _ => fallback,
        };
        self.fail(key, err.to_string());
    }
}

fn build(table: &Table, source: &str, swept: &[&str]) -> Result<RunConfig, Vec<Violation>> {
    let mut r = Reader {
        table,
        source,
        swept,
        violations: Vec::new(),
    };
    let pd = Parameters::default();
    let nd = Numerics::default();

    let solver = match r.string("solver", "sv").as_deref() {
        Some("sv") => Some(SolverKind::Sv),
        Some("bous") => Some(SolverKind::Bous),
        Some(other) => {
            r.fail("solver", format!("expected \"sv\" or \"bous\", got {other:?}"));
            None
        }
        None => None,
    };
    let default_closure = if solver == Some(SolverKind::Bous) { "refined" } else { "hydrostatic" };
    let closure = match (solver, r.string("closure", default_closure).as_deref()) {
        (_, None) | (None, _) => None,
        (Some(SolverKind::Sv), Some("hydrostatic")) => Some(ClosureKind::HydrostaticSv),
        (Some(SolverKind::Bous), Some("hydrostatic")) => Some(ClosureKind::HydrostaticBous),
        (Some(SolverKind::Bous), Some("refined")) => Some(ClosureKind::RefinedBous),
        (Some(SolverKind::Sv), Some("refined")) => {
            r.fail("closure", "the refined closure is only valid for the Boussinesq solver");
            None
        }
        (_, Some(other)) => {
            r.fail("closure", format!("expected \"hydrostatic\" or \"refined\", got {other:?}"));
            None
        }
    };
    let params = Parameters {
        mu: r.float("mu", pd.mu),
        eps: r.float("eps", if solver == Some(SolverKind::Bous) { pd.mu } else { pd.eps }),
        c_fric: r.float("c_fric", pd.c_fric),
        delta_bar: r.float("delta_bar", pd.delta_bar),
        m_tilde: r.float("m_tilde", pd.m_tilde),
        p_atm: r.float("p_atm", pd.p_atm),
        h_min: r.float("h_min", pd.h_min),
    };
    let numerics = Numerics {
        cfl: r.float("cfl", nd.cfl),
        nu4: r.float("nu4", nd.nu4),
        gradient_limit: r.float("gradient_limit", nd.gradient_limit),
    };
    let n = r.count("n", 256);
    let length = r.float("length", 40.0);
    if let Some(profile) = r.string("profile", "bump") {
        if profile != "bump" {
            r.fail("profile", format!("only \"bump\" is available, got {profile:?}"));
        }
    }
    let amplitude = r.float("amplitude", 0.2);
    let radius = r.float("radius", 2.0);
    let center = r.float("center", length / 2.0);
    let initial = match r.string("initial", "rest").map(|s| Initial::parse(&s)) {
        Some(Ok(initial)) => Some(initial),
        Some(Err(msg)) => {
            r.fail("initial", msg);
            None
        }
        None => None,
    };
    let v0 = r.float("v0", 0.0);
    let horizon = r.float("horizon", 1.0);
    let horizon_mode = match r.string("horizon_mode", "fixed").as_deref() {
        Some("fixed") => Some(HorizonMode::Fixed),
        Some("eps_sqrt_scaled") => Some(HorizonMode::EpsSqrtScaled),
        Some(other) => {
            r.fail("horizon_mode", format!("expected \"fixed\" or \"eps_sqrt_scaled\", got {other:?}"));
            None
        }
        None => None,
    };
    let output_interval = r.float("output_interval", 0.1);
    let workers = r.count("workers", 1);
    let c0 = r.float("c0", 1.0);

    if !(horizon >= 0.0 && horizon.is_finite()) {
        r.fail("horizon", format!("must be finite and >= 0, got {horizon}"));
    }
    if !(output_interval > 0.0 && output_interval.is_finite()) {
        r.fail("output_interval", format!("must be finite and > 0, got {output_interval}"));
    }
    if !v0.is_finite() {
        r.fail("v0", "must be finite");
    }
    if !(c0 >= 0.0 && c0.is_finite()) {
        r.fail("c0", format!("must be finite and >= 0, got {c0}"));
    }

    // cross-field checks only on otherwise well-formed input
    if r.violations.is_empty() {
        if let Err(e) = params.validate() {
            r.core("eps", e);
        }
        if let Err(e) = numerics.validate() {
            r.core("cfl", e);
        }
        let regime = match solver {
            Some(SolverKind::Bous) => Regime::Boussinesq,
            _ => Regime::SaintVenant,
        };
        if let Err(e) = params.check_regime(regime) {
            r.core("eps", e);
        }
        match (Grid1D::new(n, length), Bathymetry::bump(amplitude, radius, center)) {
            (Ok(grid), Ok(bath)) => {
                if let Err(e) = bath.check_fits(&grid) {
                    r.core("radius", e);
                }
            }
            (Err(e), _) => r.core("n", e),
            (_, Err(e)) => r.core("amplitude", e),
        }
    }

    if !r.violations.is_empty() {
        return Err(r.violations);
    }
    Ok(RunConfig {
        solver: solver.expect("checked"),
        closure: closure.expect("checked"),
        params,
        numerics,
        n,
        length,
        amplitude,
        radius,
        center,
        initial: initial.expect("checked"),
        v0,
        horizon,
        horizon_mode: horizon_mode.expect("checked"),
        output_interval,
        workers,
        c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invalid(src: &str) -> Vec<Violation> {
        match Document::parse(src).and_then(|d| d.expand()) {
            Err(ConfigError::Invalid(v)) => v,
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let run = Document::parse("solver = \"sv\"\n").unwrap().single().unwrap();
        assert_eq!(run.solver, SolverKind::Sv);
        assert_eq!(run.closure, ClosureKind::HydrostaticSv);
        assert_eq!(run.params, Parameters::default());
        assert_eq!(run.numerics, Numerics::default());
        assert_eq!(run.initial, Initial::Rest);
        assert_eq!(run.center, 20.0);
    }

    #[test]
    fn regime_guard_names_the_key_and_line() {
        let v = invalid("solver = \"bous\"\nmu = 0.1\neps = 0.5\n");
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].key, "eps");
        assert_eq!(v[0].line, Some(3));
        assert!(v[0].message.contains("regime"), "{}", v[0].message);
    }

    #[test]
    fn reports_every_violation() {
        let v = invalid("solver = \"bogus\"\nbogus_key = 1\nn = -3\ninitial = \"wave(1)\"\n");
        let keys: Vec<_> = v.iter().map(|v| (v.key.as_str(), v.line)).collect();
        assert_eq!(
            keys,
            [("solver", Some(1)), ("bogus_key", Some(2)), ("n", Some(3)), ("initial", Some(4))]
        );
    }

    #[test]
    fn sweep_expands_cartesian() {
        let doc = Document::parse(
            "solver = \"bous\"\nmu = 0.2\n[sweep]\neps = [0.01, 0.04, 0.16]\nc_fric = [0.0, 0.1]\n",
        )
        .unwrap();
        assert_eq!(doc.axes(), ["eps", "c_fric"]);
        let runs = doc.expand().unwrap();
        let got: Vec<_> = runs.iter().map(|r| (r.params.eps, r.params.c_fric)).collect();
        assert_eq!(
            got,
            [(0.01, 0.0), (0.01, 0.1), (0.04, 0.0), (0.04, 0.1), (0.16, 0.0), (0.16, 0.1)]
        );
    }

    #[test]
    fn sweep_violations_point_into_the_block() {
        let v = invalid("solver = \"bous\"\nmu = 0.1\n[sweep]\neps = [0.05, 0.5]\n");
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].key.as_str(), v[0].line), ("eps", Some(4)));
        assert!(v[0].message.contains("eps = 0.5"));
    }

    #[test]
    fn initial_profiles_parse_and_roundtrip() {
        for text in ["rest", "gaussian(0.1, 14, 2)", "sine(0.5, 0.25)"] {
            let p = Initial::parse(text).unwrap();
            assert_eq!(Initial::parse(&p.to_string()).unwrap(), p);
        }
        assert!(Initial::parse("gaussian(1, 2)").is_err());
        assert!(Initial::parse("gaussian(1, 2, 0)").is_err());
    }

    #[test]
    fn table_roundtrip_reproduces_the_run() {
        let src = "solver = \"bous\"\nmu = 0.1\neps = 0.05\ninitial = \"gaussian(0.1, 14, 2)\"\nhorizon_mode = \"eps_sqrt_scaled\"\n";
        let run = Document::parse(src).unwrap().single().unwrap();
        let again = Document::parse(&run.to_table().to_string()).unwrap().single().unwrap();
        assert_eq!(run, again);
        assert!((run.effective_horizon() - 1.0 / 0.05f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_a_line() {
        match Document::parse("eps = 1\nmu = = 2\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("{other:?}"),
        }
    }
}
