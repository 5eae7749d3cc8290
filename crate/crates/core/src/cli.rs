//! System files, command dispatch and JSON reports for the `setdyn` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chains::{is_chain_mixing, is_chain_mixing_at, is_chain_transitive, is_chain_transitive_at, ChainVerdict};
use crate::error::{Error, Result};
use crate::hyperspace::Hyperspace;
use crate::mixing::{is_mixing, is_transitive, is_weakly_mixing, MixingFailure, MixingVerdict};
use crate::multimap::{builders, MultiMap};
use crate::rational::Rational;
use crate::shadowing::{has_shadowing, refute_average_shadowing, shadowing_holds, tent_counterexample_check};
use crate::space::{grid_interval, CompactSet, FiniteMetricSpace};
use crate::suite::{corpus, corpus_system, run_suite, Provenance, SystemSpec, TheoremId};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MetricField {
    Named(String),
    Matrix(Vec<Vec<String>>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MapField {
    Table(Vec<usize>),
    Builder(String),
}

#[derive(Debug, Deserialize)]
struct GridField {
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SystemFile {
    Explicit {
        #[serde(default)]
        name: Option<String>,
        points: Vec<String>,
        metric: MetricField,
        maps: Vec<MapField>,
    },
    Grid {
        #[serde(default)]
        name: Option<String>,
        grid: GridField,
        maps: Vec<MapField>,
    },
}

fn file_error(msg: impl Into<String>) -> Error {
    Error::SystemFile(msg.into())
}

fn label_index(space: &FiniteMetricSpace, label: &str, builder: &str) -> Result<usize> {
    space.index_of(label.trim()).ok_or_else(|| {
        let hint = if space.grid_size().is_some() { " (not a grid point)" } else { "" };
        file_error(format!("{builder}: no point labelled {:?}{hint}", label.trim()))
    })
}

fn build_map(space: &FiniteMetricSpace, field: &MapField) -> Result<Vec<usize>> {
    let n = space.len();
    match field {
        MapField::Table(t) => Ok(t.clone()),
        MapField::Builder(b) => {
            let b = b.trim();
            if b == "tent" {
                let grid = space
                    .grid_size()
                    .ok_or_else(|| file_error("tent needs a grid space"))?;
                Ok(builders::tent(grid))
            } else if b == "zero" {
                let zero = label_index(space, "0", b)?;
                builders::const_at(n, zero)
            } else if let Some(label) = b.strip_prefix("const:") {
                builders::const_at(n, label_index(space, label, b)?)
            } else if let Some(list) = b.strip_prefix("cycle:") {
                let points = list
                    .split(',')
                    .map(|l| label_index(space, l, b))
                    .collect::<Result<Vec<_>>>()?;
                builders::cycle(n, &points)
            } else {
                Err(file_error(format!("unknown map builder {b:?}")))
            }
        }
    }
}

/// Parses and validates a system description.
pub fn parse_system(text: &str, default_name: &str, provenance: Provenance) -> Result<SystemSpec> {
    let file: SystemFile =
        serde_json::from_str(text).map_err(|e| file_error(format!("cannot parse system: {e}")))?;
    let (name, space, maps) = match file {
        SystemFile::Explicit { name, points, metric, maps } => {
            let space = match metric {
                MetricField::Named(s) if s == "discrete" => FiniteMetricSpace::discrete(points)?,
                MetricField::Named(s) => return Err(file_error(format!("unknown metric {s:?}"))),
                MetricField::Matrix(rows) => {
                    let dist = rows
                        .iter()
                        .map(|r| r.iter().map(|v| v.parse::<Rational>()).collect())
                        .collect::<std::result::Result<Vec<Vec<Rational>>, _>>()?;
                    FiniteMetricSpace::new(points, dist)?
                }
            };
            (name, space, maps)
        }
        SystemFile::Grid { name, grid, maps } => (name, grid_interval(grid.n)?, maps),
    };
    let tables = maps.iter().map(|m| build_map(&space, m)).collect::<Result<Vec<_>>>()?;
    let mmap = MultiMap::for_space(&space, tables)?;
    SystemSpec::new(name.unwrap_or_else(|| default_name.to_string()), provenance, space, mmap)
}

pub fn load_system(path: &Path) -> Result<SystemSpec> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("system");
    parse_system(&text, stem, Provenance::File { path: path.display().to_string() })
}

/// SHA-256 of the space and maps, independent of name and provenance.
pub fn fingerprint(sys: &SystemSpec) -> String {
    let body = json!({ "space": sys.space, "maps": sys.mmap.tables() });
    hex::encode(Sha256::digest(body.to_string().as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Property {
    ChainTransitive,
    ChainMixing,
    Transitive,
    WeaklyMixing,
    Mixing,
    Shadowing,
    RefuteAverage,
}

impl Property {
    fn name(self) -> &'static str {
        match self {
            Property::ChainTransitive => "chain-transitive",
            Property::ChainMixing => "chain-mixing",
            Property::Transitive => "transitive",
            Property::WeaklyMixing => "weakly-mixing",
            Property::Mixing => "mixing",
            Property::Shadowing => "shadowing",
            Property::RefuteAverage => "refute-average",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "setdyn", version, about = "Exact shadowing, chain and mixing checks for multiple mappings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one property of a system file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long)]
        epsilon: Option<Rational>,
        /// May be repeated; for refute-average the values form the δ schedule.
        #[arg(long)]
        delta: Vec<Rational>,
        /// Also write one CSV row per verdict to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include wall time, which makes the report non-reproducible.
        #[arg(long)]
        timings: bool,
    },
    /// Run every applicable check on a built-in system.
    Examples {
        #[arg(long)]
        name: String,
        #[arg(long)]
        timings: bool,
    },
    /// Search seeded random systems for counterexamples to each implication.
    Suite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_points: usize,
    },
    /// The zero + tent pseudo-orbit check on a grid of step 1/N.
    Tent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: Rational,
        #[arg(long)]
        delta: Rational,
    },
}

fn labels(space: &FiniteMetricSpace, set: &CompactSet) -> Vec<String> {
    set.iter().map(|i| space.label(i).to_string()).collect()
}

fn pair_json(space: &FiniteMetricSpace, u: usize, target: &CompactSet) -> Value {
    json!({ "x": space.label(u), "A": labels(space, target) })
}

fn chain_json(space: &FiniteMetricSpace, v: &ChainVerdict) -> Value {
    let witness = v.failure.as_ref().map(|f| {
        let mut w = pair_json(space, f.x, &f.target);
        if let Some(m) = f.missing {
            w["missing_lengths"] = json!({ "from": m.start, "period": m.period });
        }
        w
    });
    json!({
        "verdict": v.holds,
        "parameters": { "delta": v.delta.map_or("all".to_string(), |d| d.to_string()) },
        "witness": witness,
    })
}

fn mixing_json(space: &FiniteMetricSpace, v: &MixingVerdict) -> Value {
    let witness = v.failure.as_ref().map(|f| match f {
        MixingFailure::Pair { u, target } => pair_json(space, *u, target),
        MixingFailure::Pairs { first, second } => json!([
            pair_json(space, first.u, &first.target),
            pair_json(space, second.u, &second.target),
        ]),
    });
    json!({ "verdict": v.holds, "parameters": {}, "witness": witness, "note": v.note })
}

struct Row {
    property: &'static str,
    result: Value,
}

fn require(value: Option<Rational>, flag: &str, property: Property) -> Result<Rational> {
    value.ok_or_else(|| {
        Error::InvalidArgument(format!("--{flag} is required for --property {}", property.name()))
    })
}

fn check_property(sys: &SystemSpec, property: Property, epsilon: Option<Rational>, deltas: &[Rational]) -> Result<Vec<Row>> {
    let space = &sys.space;
    let f = &sys.mmap;
    let one = |result: Value| Ok(vec![Row { property: property.name(), result }]);
    match property {
        Property::Transitive => one(mixing_json(space, &is_transitive(f))),
        Property::WeaklyMixing => one(mixing_json(space, &is_weakly_mixing(f))),
        Property::Mixing => one(mixing_json(space, &is_mixing(f))),
        Property::ChainTransitive | Property::ChainMixing => {
            let hs = Hyperspace::new(space, f)?;
            let verdicts: Vec<ChainVerdict> = match (property, deltas.is_empty()) {
                (Property::ChainTransitive, true) => vec![is_chain_transitive(&hs)],
                (Property::ChainMixing, true) => vec![is_chain_mixing(&hs)],
                (Property::ChainTransitive, false) => {
                    deltas.iter().map(|&d| is_chain_transitive_at(&hs, d)).collect()
                }
                _ => deltas.iter().map(|&d| is_chain_mixing_at(&hs, d)).collect(),
            };
            Ok(verdicts
                .iter()
                .map(|v| Row { property: property.name(), result: chain_json(space, v) })
                .collect())
        }
        Property::Shadowing => {
            let hs = Hyperspace::new(space, f)?;
            if epsilon.is_none() && deltas.is_empty() {
                let summary = has_shadowing(&hs);
                return one(json!({
                    "verdict": summary.holds,
                    "parameters": { "epsilon": "all", "delta": "exists" },
                    "witness": { "moduli": summary.moduli },
                }));
            }
            let eps = require(epsilon, "epsilon", property)?;
            if deltas.is_empty() {
                return Err(Error::InvalidArgument("--delta is required with --epsilon".into()));
            }
            deltas
                .iter()
                .map(|&d| {
                    let v = shadowing_holds(&hs, eps, d)?;
                    let witness = match &v.failure {
                        Some(fail) => json!({
                            "unshadowed_prefix": fail.prefix.iter().map(|s| labels(space, s)).collect::<Vec<_>>(),
                        }),
                        None => json!({
                            "uniform_shadows": v.starts.iter().map(|w| json!({
                                "start": space.label(w.start),
                                "live": w.live,
                                "shadow": w.uniform_shadow.map(|y| space.label(y)),
                            })).collect::<Vec<_>>(),
                        }),
                    };
                    Ok(Row {
                        property: property.name(),
                        result: json!({
                            "verdict": v.holds,
                            "parameters": { "epsilon": eps.to_string(), "delta": d.to_string() },
                            "witness": witness,
                        }),
                    })
                })
                .collect()
        }
        Property::RefuteAverage => {
            let eps = require(epsilon, "epsilon", property)?;
            if deltas.is_empty() {
                return Err(Error::InvalidArgument(
                    "--delta (one or more) is required for --property refute-average".into(),
                ));
            }
            let found = refute_average_shadowing(space, f, eps, deltas)?;
            let witness = found.as_ref().map(|r| {
                r.per_delta
                    .iter()
                    .map(|e| {
                        json!({
                            "delta": e.delta.to_string(),
                            "block": e.block,
                            "start": space.label(e.start),
                            "target": labels(space, &e.target),
                            "cycle": e.pseudo.cycle.iter().map(|s| labels(space, s)).collect::<Vec<_>>(),
                            "claimed_delta": e.pseudo.claimed_delta.to_string(),
                            "min_limit_average": e.min_limit_average.to_string(),
                        })
                    })
                    .collect::<Vec<_>>()
            });
            one(json!({
                "verdict": if found.is_some() { "refuted" } else { "not refuted" },
                "parameters": {
                    "epsilon": eps.to_string(),
                    "delta": deltas.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                },
                "witness": witness,
            }))
        }
    }
}

fn system_json(sys: &SystemSpec) -> Value {
    json!({
        "name": sys.name,
        "fingerprint": fingerprint(sys),
        "points": sys.space.len(),
        "maps": sys.mmap.len(),
    })
}

fn report(command: &str, sys: Option<&SystemSpec>, results: Value) -> Value {
    let mut r = json!({
        "tool": "setdyn",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "results": results,
    });
    if let Some(sys) = sys {
        r["system"] = system_json(sys);
    }
    r
}

fn timed(rows: Result<Vec<Row>>, start: Instant, timings: bool) -> Result<Vec<Value>> {
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    Ok(rows?
        .into_iter()
        .map(|row| {
            let mut v = row.result;
            v["property"] = json!(row.property);
            if timings {
                v["wall_time_ms"] = json!(elapsed);
            }
            v
        })
        .collect())
}

fn write_csv(path: &Path, results: &[Value]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["property", "verdict", "epsilon", "delta", "witness"])?;
    for r in results {
        let text = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        w.write_record([
            text(&r["property"]),
            text(&r["verdict"]),
            text(&r["parameters"]["epsilon"]),
            text(&r["parameters"]["delta"]),
            text(&r["witness"]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn examples(name: &str, timings: bool) -> Result<Value> {
    let sys = corpus_system(name).ok_or_else(|| {
        let names: Vec<String> = corpus().into_iter().map(|s| s.name).collect();
        Error::InvalidArgument(format!("unknown example {name:?}; known: {}", names.join(", ")))
    })?;
    let mut results = Vec::new();
    for p in [Property::Transitive, Property::WeaklyMixing, Property::Mixing] {
        results.extend(timed(check_property(&sys, p, None, &[]), Instant::now(), timings)?);
    }
    if sys.space.len() <= crate::hyperspace::node_cap_from_env() {
        for p in [Property::ChainTransitive, Property::ChainMixing, Property::Shadowing] {
            results.extend(timed(check_property(&sys, p, None, &[]), Instant::now(), timings)?);
        }
    } else if let Some(n) = sys.space.grid_size() {
        let eps = Rational::new(2, n as i64)?;
        let delta = Rational::new(1, n as i64)?;
        let tent = tent_counterexample_check(n, eps, delta)?;
        results.push(tent_json(&tent));
    }
    Ok(report("examples", Some(&sys), Value::Array(results)))
}

fn tent_json(r: &crate::shadowing::TentReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    v["property"] = json!("tent-pseudo-orbit");
    v["verdict"] = json!(if r.not_shadowable { "not shadowable" } else { "shadowable" });
    v
}

/// Runs a parsed command and returns the JSON report.
pub fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Check { file, property, epsilon, delta, csv, timings } => {
            let sys = load_system(&file)?;
            let results = timed(check_property(&sys, property, epsilon, &delta), Instant::now(), timings)?;
            if let Some(path) = csv {
                write_csv(&path, &results)?;
            }
            Ok(report("check", Some(&sys), Value::Array(results)))
        }
        Command::Examples { name, timings } => examples(&name, timings),
        Command::Suite { seed, count, max_points } => {
            let reports = run_suite(seed, count, max_points)?;
            // the component example is a fixed system, not part of the random search
            let search_counterexamples: usize = reports
                .iter()
                .filter(|r| r.theorem != TheoremId::ComponentsVersusWhole)
                .map(|r| r.counterexamples.len())
                .sum();
            Ok(report(
                "suite",
                None,
                json!({
                    "seed": seed,
                    "count": count,
                    "max_points": max_points,
                    "search_counterexamples": search_counterexamples,
                    "theorems": reports,
                }),
            ))
        }
        Command::Tent { n, epsilon, delta } => {
            let r = tent_counterexample_check(n, epsilon, delta)?;
            Ok(report("tent", None, tent_json(&r)))
        }
    }
}

/// Entry point for the binary: parses arguments, prints the report and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(report) => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            // a closed pipe downstream is not an analysis failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
