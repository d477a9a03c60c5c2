//! Command line surface: a JSON file format for order configurations, a
//! set of subcommands over it, and exact, deterministic output.
//!
//! Exit codes: 0 on success (whatever the mathematical verdict), 2 for
//! input and schema problems, 3 for violated preconditions, 1 for internal
//! invariant breaches.  All numbers are printed exactly, integers or
//! `p/q`; nothing is ever rounded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Roots;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::adjunction::chi_restriction;
use crate::birational::{blowdown, blowup, minimalize, BlowupCenter, ComponentRef};
use crate::catalogue;
use crate::cycles::{numerical_cycle, special_divisors};
use crate::discrepancy::classify;
use crate::lattice::{rat, Divisor, Rational};
use crate::model::{GraphVertex, OrderConfig, RamCurve, ResolutionGraph};
use crate::rationality::{
    is_numerically_rational, CheckOptions, MethodChoice, DEFAULT_BOUND, DEFAULT_NODE_CAP,
};
use crate::Error;

/// On-disk description of an order configuration.  Defaults: genus 0,
/// ram_index 1 (unramified), edge mult 1, distinct_points = meets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Rank of the order, a perfect square r².
    pub rank: u64,
    pub vertices: Vec<VertexEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub self_intersection: i64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub genus: u32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub ram_index: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub a: String,
    pub b: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub mult: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub id: String,
    pub ram_index: u32,
    pub meets: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinct_points: Option<BTreeMap<String, u32>>,
}

fn one() -> u32 {
    1
}

fn is_one(x: &u32) -> bool {
    *x == 1
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

impl ConfigFile {
    pub fn to_config(&self) -> Result<OrderConfig, Error> {
        let root = self.rank.sqrt();
        if root * root != self.rank {
            return Err(Error::Input(format!(
                "rank must be a perfect square, got {}",
                self.rank
            )));
        }
        let root = u32::try_from(root)
            .map_err(|_| Error::Input(format!("rank {} is too large", self.rank)))?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| GraphVertex::new(&v.id, v.self_intersection, v.genus))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (e.a.clone(), e.b.clone(), e.mult))
            .collect();
        let graph = ResolutionGraph::new(vertices, edges)?;
        let mut exc_ram = BTreeMap::new();
        for v in &self.vertices {
            if v.ram_index == 0 {
                return Err(Error::Input(format!(
                    "vertex `{}`: ram_index must be >= 1",
                    v.id
                )));
            }
            if v.ram_index >= 2 {
                exc_ram.insert(v.id.clone(), v.ram_index);
            }
        }
        let curves = self
            .curves
            .iter()
            .map(|c| match &c.distinct_points {
                Some(d) => RamCurve::with_distinct_points(
                    &c.id,
                    c.ram_index,
                    c.meets.clone(),
                    d.clone(),
                ),
                None => RamCurve::new(&c.id, c.ram_index, c.meets.clone()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        OrderConfig::new(graph, exc_ram, curves, root)
    }

    pub fn from_config(config: &OrderConfig) -> ConfigFile {
        let vertices = config
            .graph
            .vertices()
            .iter()
            .map(|v| VertexEntry {
                id: v.id.clone(),
                self_intersection: v.self_intersection,
                genus: v.genus,
                ram_index: config.exc_index(&v.id),
            })
            .collect();
        let edges = config
            .graph
            .edges()
            .map(|((a, b), mult)| EdgeEntry {
                a: a.clone(),
                b: b.clone(),
                mult: *mult,
            })
            .collect();
        let curves = config
            .curves
            .iter()
            .map(|c| CurveEntry {
                id: c.id.clone(),
                ram_index: c.index,
                meets: c.meets.clone(),
                distinct_points: if c.distinct_points == c.meets {
                    None
                } else {
                    Some(c.distinct_points.clone())
                },
            })
            .collect();
        ConfigFile {
            rank: config.rank(),
            vertices,
            edges,
            curves,
        }
    }
}

pub fn parse_config(path: &Path) -> Result<OrderConfig, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    file.to_config()
}

/// Canonical textual form of a configuration; `parse` of this output
/// reproduces the configuration exactly.
pub fn print_config(config: &OrderConfig) -> String {
    serde_json::to_string_pretty(&ConfigFile::from_config(config))
        .expect("config serialization cannot fail")
}

/// Parse a divisor literal `id:coeff,id:coeff,…` with integer
/// coefficients; repeated ids accumulate, omitted ids are 0.
pub fn parse_divisor(text: &str) -> Result<Divisor, Error> {
    let mut d = Divisor::zero();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (id, coeff) = part.split_once(':').ok_or_else(|| {
            Error::Input(format!("divisor entry `{part}` must look like `id:coeff`"))
        })?;
        let coeff: i64 = coeff.trim().parse().map_err(|_| {
            Error::Input(format!("divisor entry `{part}` has a non-integer coefficient"))
        })?;
        d.add_to(id.trim(), &rat(coeff));
    }
    Ok(d)
}

/// Render a divisor in the same `id:coeff` literal form the CLI accepts.
pub fn render_divisor(d: &Divisor) -> String {
    if d.is_zero() {
        return "0".to_string();
    }
    d.iter()
        .map(|(v, c)| format!("{v}:{c}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn divisor_json(d: &Divisor) -> Value {
    let mut map = serde_json::Map::new();
    for (v, c) in d.iter() {
        map.insert(v.clone(), rational_json(c));
    }
    Value::Object(map)
}

/// Integral values become JSON numbers; everything else stays an exact
/// `p/q` string.
fn rational_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.to_integer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(r.to_string())
}

fn rational_map_json(map: &BTreeMap<String, Rational>) -> Value {
    let mut out = serde_json::Map::new();
    for (k, v) in map {
        out.insert(k.clone(), Value::String(v.to_string()));
    }
    Value::Object(out)
}

fn render_rational_map(map: &BTreeMap<String, Rational>) -> String {
    if map.is_empty() {
        return "(empty)".to_string();
    }
    map.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum MethodArg {
    #[default]
    Auto,
    Special,
    Brute,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> MethodChoice {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Special => MethodChoice::Special,
            MethodArg::Brute => MethodChoice::Brute,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "numrat",
    version,
    about = "Exact numerical rationality tests for orders on surface singularities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a configuration file and report violations.
    Validate { file: PathBuf },
    /// Numerical cycle of the graph, or of a connected support subset.
    Cycle {
        file: PathBuf,
        /// Comma-separated vertex ids; default is the full graph.
        #[arg(long)]
        support: Option<String>,
    },
    /// List the special divisors of the graph.
    Special { file: PathBuf },
    /// Surface discrepancies (alpha) and order discrepancies (a).
    Disc { file: PathBuf },
    /// Discrepancies plus log terminal / crepant classification.
    Classify { file: PathBuf },
    /// Euler characteristic of the restriction to an effective divisor.
    Chi {
        file: PathBuf,
        /// Divisor literal, e.g. "E1:2,E2:1".
        #[arg(long)]
        divisor: String,
    },
    /// Decide numerical rationality (exit code 0 for both verdicts).
    Rational {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        method: MethodArg,
        /// Brute-force box size, as a multiple of the numerical cycle.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: i64,
        /// Abort the brute-force search after this many nodes.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: u64,
    },
    /// Blow up a point; prints the resulting configuration.
    Blowup {
        file: PathBuf,
        /// One or two component ids (vertex or curve) the point lies on,
        /// comma-separated; omit for a point on no tracked component.
        #[arg(long)]
        at: Option<String>,
    },
    /// Contract one exceptional (-1)-vertex; prints the result.
    Blowdown {
        file: PathBuf,
        /// Vertex id to contract.
        #[arg(long)]
        at: String,
    },
    /// Contract to the minimal configuration; prints the result.
    Minimalize { file: PathBuf },
    /// Built-in graphs and example configurations.
    #[command(subcommand)]
    Catalogue(CatalogueCmd),
}

#[derive(Debug, Subcommand)]
pub enum CatalogueCmd {
    /// Hirzebruch-Jung chain resolving the cyclic quotient of type (n, q).
    Cyclic {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
    },
    /// Named example configuration; run with a bogus name to list names.
    Fixture { name: String },
}

fn emit(as_json: bool, value: Value, human: String) {
    if as_json {
        println!("{value}");
    } else {
        println!("{human}");
    }
}

pub fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Validate { file } => {
            let config = parse_config(file)?;
            let report = config.validate();
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "code": v.code.to_string(),
                        "subject": v.subject,
                        "message": v.message,
                    })
                })
                .collect();
            let human = if report.ok() {
                "ok".to_string()
            } else {
                report
                    .violations
                    .iter()
                    .map(|v| format!("violation [{}] {}: {}", v.code, v.subject, v.message))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            emit(
                cli.json,
                json!({"ok": report.ok(), "violations": violations}),
                human,
            );
        }
        Command::Cycle { file, support } => {
            let config = parse_config(file)?;
            let support = match support {
                Some(s) => s
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty())
                    .collect(),
                None => config.graph.vertex_id_set(),
            };
            let z = numerical_cycle(&config.graph, &support)?;
            emit(cli.json, json!({"cycle": divisor_json(&z)}), render_divisor(&z));
        }
        Command::Special { file } => {
            let config = parse_config(file)?;
            let divisors = special_divisors(&config.graph)?;
            let human = divisors
                .iter()
                .map(render_divisor)
                .collect::<Vec<_>>()
                .join("\n");
            let list: Vec<Value> = divisors.iter().map(divisor_json).collect();
            emit(cli.json, json!({"special_divisors": list}), human);
        }
        Command::Disc { file } => {
            let config = parse_config(file)?;
            let cls = classify(&config)?;
            emit(
                cli.json,
                json!({
                    "alpha": rational_map_json(&cls.alpha),
                    "a": rational_map_json(&cls.a),
                }),
                format!(
                    "alpha: {}\na: {}",
                    render_rational_map(&cls.alpha),
                    render_rational_map(&cls.a)
                ),
            );
        }
        Command::Classify { file } => {
            let config = parse_config(file)?;
            let cls = classify(&config)?;
            let min_ae = cls.min_ae.as_ref();
            let mut human = format!(
                "alpha: {}\na: {}\nmin a_i e_i: {}\nlog terminal: {}\ncrepant: {}",
                render_rational_map(&cls.alpha),
                render_rational_map(&cls.a),
                min_ae.map_or("(empty graph)".to_string(), |m| m.to_string()),
                cls.log_terminal,
                cls.crepant,
            );
            for w in &cls.warnings {
                human.push_str(&format!("\nwarning: {w}"));
            }
            emit(
                cli.json,
                json!({
                    "alpha": rational_map_json(&cls.alpha),
                    "a": rational_map_json(&cls.a),
                    "min_ae": min_ae.map(|m| m.to_string()),
                    "log_terminal": cls.log_terminal,
                    "crepant": cls.crepant,
                    "warnings": cls.warnings,
                }),
                human,
            );
        }
        Command::Chi { file, divisor } => {
            let config = parse_config(file)?;
            let d = parse_divisor(divisor)?;
            let chi = chi_restriction(&config, &d)?;
            emit(cli.json, json!({"chi": chi.to_string()}), chi.to_string());
        }
        Command::Rational {
            file,
            method,
            bound,
            cap,
        } => {
            let config = parse_config(file)?;
            let opts = CheckOptions {
                method: (*method).into(),
                bound: *bound,
                node_cap: *cap,
            };
            let verdict = is_numerically_rational(&config, &opts)?;
            let mut obj = serde_json::Map::new();
            obj.insert("rational".into(), Value::from(verdict.rational));
            obj.insert("method".into(), Value::from(verdict.method.as_str()));
            if let Some(b) = verdict.bound_used {
                obj.insert("bound".into(), Value::from(b));
            }
            if let Some(w) = &verdict.witness {
                obj.insert("witness".into(), divisor_json(w));
            }
            if let Some(v) = &verdict.witness_value {
                obj.insert("witness_value".into(), Value::String(v.to_string()));
            }
            if let Some(c) = &verdict.witness_chi {
                obj.insert("chi".into(), Value::String(c.to_string()));
            }
            let mut human = format!("rational: {}\nmethod: {}", verdict.rational, verdict.method.as_str());
            if let Some(b) = verdict.bound_used {
                human.push_str(&format!("\nbound: {b}"));
            }
            if let Some(w) = &verdict.witness {
                human.push_str(&format!("\nwitness: {}", render_divisor(w)));
            }
            if let Some(v) = &verdict.witness_value {
                human.push_str(&format!("\nwitness value: {v}"));
            }
            if let Some(c) = &verdict.witness_chi {
                human.push_str(&format!("\nchi: {c}"));
            }
            emit(cli.json, Value::Object(obj), human);
        }
        Command::Blowup { file, at } => {
            let config = parse_config(file)?;
            let center = match at {
                None => BlowupCenter::smooth_point(),
                Some(s) => {
                    let refs = s
                        .split(',')
                        .map(|t| t.trim())
                        .filter(|t| !t.is_empty())
                        .map(|t| component_ref(&config, t))
                        .collect::<Result<Vec<_>, _>>()?;
                    BlowupCenter { through: refs }
                }
            };
            let (blown, _) = blowup(&config, &center)?;
            println!("{}", print_config(&blown));
        }
        Command::Blowdown { file, at } => {
            let config = parse_config(file)?;
            let (down, _) = blowdown(&config, at)?;
            println!("{}", print_config(&down));
        }
        Command::Minimalize { file } => {
            let config = parse_config(file)?;
            let (minimal, _) = minimalize(&config)?;
            println!("{}", print_config(&minimal));
        }
        Command::Catalogue(cmd) => match cmd {
            CatalogueCmd::Cyclic { n, q } => {
                let graph = catalogue::cyclic(*n, *q)?;
                println!("{}", print_config(&OrderConfig::unramified(graph)));
            }
            CatalogueCmd::Fixture { name } => {
                let fx = catalogue::fixture(name)?;
                println!("{}", print_config(&fx.config));
            }
        },
    }
    Ok(())
}

fn component_ref(config: &OrderConfig, id: &str) -> Result<ComponentRef, Error> {
    if config.graph.has_vertex(id) {
        Ok(ComponentRef::Vertex(id.to_string()))
    } else if config.curve(id).is_some() {
        Ok(ComponentRef::Curve(id.to_string()))
    } else {
        Err(Error::Input(format!(
            "`{id}` names neither a vertex nor a ramification curve"
        )))
    }
}
