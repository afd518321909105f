//! The `bellkit` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bellkit_core::detection::{self, AngleSpace, DetectionConfig, Scenario};
use bellkit_core::lhv::{check_constraints, verify_declared_bound, vertex_max};
use bellkit_core::optimize::{
    linear_grid, max_violation, rational_grid, sweep_r, sweep_u, OptimizerConfig, SearchSpace,
};
use bellkit_core::polynomial::{three_qubit_family, FamilyParams, ProbabilityForm};
use bellkit_core::presets::Preset;
use bellkit_core::Rational;
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{Signed, ToPrimitive};
use serde_json::json;

use crate::error::CliError;
use crate::formats::{
    parse_rational, CatalogEntry, CatalogFile, LhvJson, PolynomialJson, ProbabilityFormJson,
    ThresholdJson, ViolationJson,
};
use crate::output::{read_json, sig9, NumericTable, RunManifest, Sink};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Parser)]
#[command(
    name = "bellkit",
    version,
    about = "Non-homogeneous Bell inequalities for two and three qubits"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a three-qubit family member or a preset and verify its LHV bound.
    Construct(ConstructArgs),
    /// Exact classical maximum of a polynomial file.
    Lhv {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximal quantum value of a polynomial file.
    Qmax(QmaxArgs),
    /// Tabulate the E'(r) eigenvalue or the violation factor over a grid.
    Sweep(SweepArgs),
    /// Minimal detection efficiency for a violation.
    Threshold(ThresholdArgs),
    /// Probability forms of all presets, as a catalog file.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct ConstructArgs {
    /// mabk, pi5 or ci6.
    #[arg(long, conflicts_with_all = ["u", "r", "s", "t"])]
    preset: Option<String>,
    #[arg(long, required_unless_present = "preset", allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, required_unless_present = "preset", allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, required_unless_present = "preset", allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, required_unless_present = "preset", allow_hyphen_values = true)]
    t: Option<String>,
    /// Build even if the family constraints fail; bound verification then
    /// reports the excess.
    #[arg(long)]
    force: bool,
    /// Keep the unscaled coefficients and the bound 2 + u.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SettingsMode {
    Fixed,
    Optimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Space {
    Orthogonal,
    XyPlane,
    Sphere,
}

impl Space {
    fn search_space(self) -> SearchSpace {
        match self {
            Space::Orthogonal => SearchSpace::Orthogonal,
            Space::XyPlane => SearchSpace::XyPlane,
            Space::Sphere => SearchSpace::FullSphere,
        }
    }
}

#[derive(Debug, clap::Args)]
struct QmaxArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value = "optimize")]
    settings: SettingsMode,
    #[arg(long, value_enum, default_value = "orthogonal")]
    space: Space,
    #[arg(long, env = "BELLKIT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Eprime,
    ViolationFactor,
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    r_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_max: Option<String>,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value = "orthogonal")]
    space: Space,
    #[arg(long, env = "BELLKIT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Symmetric,
    OnePerfect,
    TwoPerfect,
    Frontier,
    /// The symmetric, one-perfect and two-perfect columns together.
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AngleArg {
    Xy,
    Sphere,
}

#[derive(Debug, clap::Args)]
struct ThresholdArgs {
    /// A preset name or `catalog:<path>[#entry]`.
    #[arg(long)]
    ineq: String,
    #[arg(long, value_enum, default_value = "symmetric")]
    scenario: ScenarioArg,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, env = "BELLKIT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Restarts per angle optimization; bisection probes use twice as many.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// For the frontier scenario, also tabulate the minimal eta3 on this
    /// many eta2 values spread over [0, 1].
    #[arg(long, default_value_t = 0)]
    frontier_points: usize,
    #[arg(long, value_enum, default_value = "xy")]
    space: AngleArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Construct(a) => construct(a, start),
        Command::Lhv { path, out } => lhv(&path, out, start),
        Command::Qmax(a) => qmax(a, start),
        Command::Sweep(a) => sweep(a, start),
        Command::Threshold(a) => threshold(a, start),
        Command::Catalog { out } => catalog(out, start),
    }
}

fn elapsed(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn construct(a: ConstructArgs, start: Instant) -> Result<(), CliError> {
    let (poly, parameters) = match &a.preset {
        Some(name) => (
            Preset::from_name(name)?.polynomial(),
            json!({ "preset": name }),
        ),
        None => {
            let field = |v: &Option<String>| parse_rational(v.as_deref().unwrap_or_default());
            let params = FamilyParams::new(field(&a.u)?, field(&a.r)?, field(&a.s)?, field(&a.t)?)?;
            let report = check_constraints(&params);
            if !report.all_hold() && !a.force {
                let list: Vec<String> = report.violated().iter().map(|c| c.to_string()).collect();
                return Err(CliError::Range(format!(
                    "family constraints violated: {}",
                    list.join("; ")
                )));
            }
            let raw = three_qubit_family(&params)?;
            let poly = if a.raw { raw } else { raw.primitive() };
            let parameters = json!({
                "u": params.u().to_string(),
                "r": params.r().to_string(),
                "s": params.s().to_string(),
                "t": params.t().to_string(),
                "force": a.force,
                "raw": a.raw,
            });
            (poly, parameters)
        }
    };
    let (holds, res) = verify_declared_bound(&poly)?;
    let bound = poly
        .bound()
        .expect("constructed polynomials declare a bound")
        .clone();
    eprintln!(
        "{} terms; LHV maximum {} over {} vertices; declared bound {} {}",
        poly.len(),
        res.maximum,
        res.vertices,
        bound,
        if holds { "holds" } else { "EXCEEDED" }
    );
    let mut sink = Sink::new(a.out, RunManifest::new("construct", parameters, None));
    sink.json(&PolynomialJson::from_polynomial(&poly), elapsed(start))?;
    if holds {
        Ok(())
    } else {
        Err(CliError::Range(format!(
            "bound verification failed: LHV maximum {} exceeds declared bound {bound}",
            res.maximum
        )))
    }
}

fn lhv(path: &Path, out: Option<PathBuf>, start: Instant) -> Result<(), CliError> {
    let poly = read_json::<PolynomialJson>(path)?.to_polynomial()?;
    let res = vertex_max(&poly);
    let witness: Vec<String> = res
        .witness
        .values()
        .iter()
        .map(|(v, s)| format!("{v}={}", if s.value() > 0 { "+1" } else { "-1" }))
        .collect();
    eprintln!("LHV maximum {} at {}", res.maximum, witness.join(" "));
    let parameters = json!({ "path": path.display().to_string() });
    let mut sink = Sink::new(out, RunManifest::new("lhv", parameters, None));
    sink.json(&LhvJson::new(&res, poly.bound()), elapsed(start))
}

fn qmax(a: QmaxArgs, start: Instant) -> Result<(), CliError> {
    let poly = read_json::<PolynomialJson>(&a.path)?.to_polynomial()?;
    let space = match a.settings {
        SettingsMode::Fixed => SearchSpace::FixedXy,
        SettingsMode::Optimize => a.space.search_space(),
    };
    let cfg = OptimizerConfig {
        restarts: a.restarts,
        seed: a.seed,
        search_space: space,
        ..OptimizerConfig::default()
    };
    let res = max_violation(&poly, &cfg)?;
    let space_name = match a.settings {
        SettingsMode::Fixed => "fixed-xy",
        SettingsMode::Optimize => space_label(a.space),
    };
    eprintln!(
        "value {}  factor {}  bound {}  ({space_name})",
        sig9(res.value),
        sig9(res.factor),
        sig9(res.bound)
    );
    for (i, [o1, o2]) in res.settings.sites().iter().enumerate() {
        let fmt = |c: [f64; 3]| format!("({}, {}, {})", sig9(c[0]), sig9(c[1]), sig9(c[2]));
        eprintln!(
            "  site {}: {}  {}",
            i + 1,
            fmt(o1.components()),
            fmt(o2.components())
        );
    }
    let parameters = json!({
        "path": a.path.display().to_string(),
        "settings": space_name,
        "restarts": a.restarts,
    });
    let mut sink = Sink::new(a.out, RunManifest::new("qmax", parameters, Some(a.seed)));
    sink.json(
        &ViolationJson::new(&res, space_name, a.seed),
        elapsed(start),
    )
}

fn space_label(s: Space) -> &'static str {
    match s {
        Space::Orthogonal => "orthogonal",
        Space::XyPlane => "xy-plane",
        Space::Sphere => "sphere",
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::Parse(format!("--{flag} is required for --family {family}")))
}

fn sweep(a: SweepArgs, start: Instant) -> Result<(), CliError> {
    let (table, parameters, seed) = match a.family {
        Family::Eprime => {
            let lo = required(&a.r_min, "r-min", "eprime")?;
            let hi = required(&a.r_max, "r-max", "eprime")?;
            if lo < 0.0 {
                return Err(CliError::Range(format!("r must be non-negative, got {lo}")));
            }
            let grid = linear_grid(lo, hi, a.steps)?;
            let mut table = NumericTable::new(&["r", "lambda_max"]);
            for (r, v) in sweep_r(&grid)? {
                table.push(vec![r, v]);
            }
            let asymptote = (1.0 + 17f64.sqrt()) / 2.0;
            let last = table.rows.last().expect("non-empty grid")[1];
            eprintln!(
                "asymptote (1+sqrt(17))/2 = {}; value at r = {}: {} (gap {})",
                sig9(asymptote),
                sig9(hi),
                sig9(last),
                sig9(last - asymptote)
            );
            let parameters =
                json!({ "family": "eprime", "r_min": lo, "r_max": hi, "steps": a.steps });
            (table, parameters, None)
        }
        Family::ViolationFactor => {
            let lo = parse_rational(&required(&a.u_min, "u-min", "violation-factor")?)?;
            let hi = parse_rational(&required(&a.u_max, "u-max", "violation-factor")?)?;
            if lo.is_negative() {
                return Err(CliError::Range(format!("u must be non-negative, got {lo}")));
            }
            let grid = rational_grid(&lo, &hi, a.steps)?;
            let cfg = OptimizerConfig {
                restarts: a.restarts,
                seed: a.seed,
                search_space: a.space.search_space(),
                ..OptimizerConfig::default()
            };
            let mut table = NumericTable::new(&["u", "r", "s", "t", "value", "factor"]);
            for row in sweep_u(&grid, &cfg)? {
                let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
                let p = &row.params;
                table.push(vec![
                    f(&row.u),
                    f(p.r()),
                    f(p.s()),
                    f(p.t()),
                    row.value,
                    row.factor,
                ]);
            }
            let first = table.rows.first().expect("non-empty grid")[5];
            let last = table.rows.last().expect("non-empty grid")[5];
            eprintln!(
                "factor {} at u = {lo}, {} at u = {hi}; large-u asymptote about 1.27",
                sig9(first),
                sig9(last)
            );
            let parameters = json!({
                "family": "violation-factor",
                "u_min": lo.to_string(),
                "u_max": hi.to_string(),
                "steps": a.steps,
                "space": space_label(a.space),
                "restarts": a.restarts,
            });
            (table, parameters, Some(a.seed))
        }
    };
    let mut sink = Sink::new(a.out, RunManifest::new("sweep", parameters, seed));
    sink.csv(&table, elapsed(start))
}

/// Resolves `--ineq` to a display name and a probability form.
fn inequality(arg: &str) -> Result<(String, ProbabilityForm), CliError> {
    if let Some(rest) = arg.strip_prefix("catalog:") {
        let (path, name) = match rest.split_once('#') {
            Some((p, n)) => (p, Some(n)),
            None => (rest, None),
        };
        let file: CatalogFile = read_json(Path::new(path))?;
        let entry = file.select(name)?;
        return Ok((entry.name.clone(), entry.form.to_form()?));
    }
    let preset = Preset::from_name(arg).map_err(|_| {
        CliError::Parse(format!(
            "unknown inequality {arg:?}; expected a preset or catalog:<path>"
        ))
    })?;
    Ok((preset.name().to_string(), preset.probability_form()))
}

fn threshold(a: ThresholdArgs, start: Instant) -> Result<(), CliError> {
    let (name, form) = inequality(&a.ineq)?;
    let cfg = DetectionConfig {
        restarts: a.restarts,
        threshold_restarts: 2 * a.restarts,
        seed: a.seed,
        space: match a.space {
            AngleArg::Xy => AngleSpace::XyPinned,
            AngleArg::Sphere => AngleSpace::Sphere,
        },
        ..DetectionConfig::default()
    };
    let scenarios: Vec<Scenario> = match a.scenario {
        ScenarioArg::Symmetric => vec![Scenario::Symmetric],
        ScenarioArg::OnePerfect => vec![Scenario::OnePerfect],
        ScenarioArg::TwoPerfect => vec![Scenario::TwoPerfect],
        ScenarioArg::Frontier => vec![Scenario::Frontier],
        ScenarioArg::Table => vec![
            Scenario::Symmetric,
            Scenario::OnePerfect,
            Scenario::TwoPerfect,
        ],
    };
    let mut reports = Vec::with_capacity(scenarios.len());
    for sc in &scenarios {
        let rep = if *sc == Scenario::Frontier && a.frontier_points > 0 {
            let grid = detection::eta_grid(0.0, 1.0, a.frontier_points)?;
            detection::frontier_scan(&form, &grid, a.tol, &cfg)?
        } else {
            detection::threshold(&form, *sc, a.tol, &cfg)?
        };
        reports.push(ThresholdJson::new(&name, &rep));
    }
    eprint!("{}", threshold_table(&name, &reports));
    let parameters = json!({
        "ineq": a.ineq,
        "scenario": scenarios.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "tol": a.tol,
        "restarts": a.restarts,
        "frontier_points": a.frontier_points,
        "space": match a.space { AngleArg::Xy => "xy", AngleArg::Sphere => "sphere" },
    });
    let mut sink = Sink::new(
        a.out,
        RunManifest::new("threshold", parameters, Some(a.seed)),
    );
    if reports.len() == 1 {
        sink.json(&reports[0], elapsed(start))
    } else {
        sink.json(
            &json!({ "inequality": name, "reports": reports }),
            elapsed(start),
        )
    }
}

/// One row per inequality, one column per scenario, thresholds in percent.
pub fn threshold_table(name: &str, reports: &[ThresholdJson]) -> String {
    let width = name.len().max("inequality".len());
    let mut header = format!("{:<width$}", "inequality");
    let mut row = format!("{name:<width$}");
    for r in reports {
        let w = r.scenario.len().max(7);
        header.push_str(&format!("  {:>w$}", r.scenario));
        row.push_str(&format!("  {:>w$}", format!("{:.1}%", 100.0 * r.threshold)));
    }
    let mut out = format!("{header}\n{row}\n");
    for r in reports {
        for p in &r.frontier {
            match p.eta3 {
                Some(e) => out.push_str(&format!("  eta2 {:.4}  eta3 >= {:.4}\n", p.eta2, e)),
                None => out.push_str(&format!("  eta2 {:.4}  no violation\n", p.eta2)),
            }
        }
    }
    out
}

fn catalog(out: Option<PathBuf>, start: Instant) -> Result<(), CliError> {
    let entries = Preset::ALL
        .iter()
        .map(|p| CatalogEntry {
            name: p.name().to_string(),
            form: ProbabilityFormJson::from_form(&p.probability_form()),
        })
        .collect();
    let mut sink = Sink::new(out, RunManifest::new("catalog", json!({}), None));
    sink.json(&CatalogFile::Many(entries), elapsed(start))
}
