//! Flat `key = value` configuration files.
//!
//! ```text
//! # comments start with '#'
//! seed = 42
//! ticks = 120
//! price_per_unit = 500
//!
//! [edges]          # optional; implies graph_mode = explicit
//! 0 25 3.5         # u v weight, vertex ids
//!
//! [manifest]       # written next to run outputs; ignored on load
//! version = 0.1.0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::accounting::Tariff;
use crate::engine::{FillSpec, SimConfig};
use crate::world::{
    complete_euclidean, Bounds, Edge, Graph, GraphMode, Position, Vertex, VertexKind, WorldConfig,
};

/// Documented keys, printed on usage errors.
pub const SCHEMA: &str = "\
Configuration keys (all optional, `key = value`, '#' starts a comment):
  seed                u64      random stream seed (default 0; BINSIM_SEED and --seed override)
  ticks               u64      horizon in ticks/minutes (default 100)
  bin_count           usize    bins placed at random (default 25)
  world_xmin/xmax     f64      world bounds (default -12 / 12)
  world_ymin/ymax     f64      world bounds (default -12 / 12)
  dump_x, dump_y      f64      dump site (default: world_xmax, world_ymax)
  depot_x, depot_y    f64      truck depot (default 0, 0)
  graph_mode          complete | explicit (default complete; explicit needs [edges])
  bin_capacity        u32      units at which a bin is full/red (default 25)
  yellow_threshold    u32      units at which a bin turns yellow (default 10)
  truck_count         usize    trucks (default 1)
  truck_capacity      u32      truck load limit (default 100)
  fill_model          unit | bernoulli (default bernoulli)
  fill_rate_min/max   f64      per-bin bernoulli rates drawn from this range (default 0.2 / 0.8)
  fill_rates          f64,...  fixed per-bin bernoulli rates, one per bin
  price_per_unit      u64      UC charged per collected unit (default 500)
  trip_cost           u64      UC per truck dump trip (default 0)
  dispatch_threshold  usize    unassigned full bins that trigger dispatch (default 1)
  citizen_step        f64      citizen wander distance per tick (default 1)
Sections:
  [edges]     one `u v weight` per line; vertex ids are bins 0..bin_count-1,
              then the dump, then the depot (omitted when at the dump)
  [manifest]  run metadata, ignored when loading
";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("key `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn schema(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        key: key.into(),
        message: message.into(),
    }
}

const KEYS: &[&str] = &[
    "seed",
    "ticks",
    "bin_count",
    "world_xmin",
    "world_xmax",
    "world_ymin",
    "world_ymax",
    "dump_x",
    "dump_y",
    "depot_x",
    "depot_y",
    "graph_mode",
    "bin_capacity",
    "yellow_threshold",
    "truck_count",
    "truck_capacity",
    "fill_model",
    "fill_rate_min",
    "fill_rate_max",
    "fill_rates",
    "price_per_unit",
    "trip_cost",
    "dispatch_threshold",
    "citizen_step",
];

const MANIFEST_KEYS: &[&str] = &[
    "version",
    "seed",
    "levels_csv",
    "ledger_csv",
    "summary",
    "manifest",
];

#[derive(PartialEq)]
enum Section {
    Top,
    Edges,
    Manifest,
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse().map(Some).map_err(|_| ConfigError::Parse {
                line: *line,
                message: format!("cannot parse `{raw}` for `{key}`"),
            }),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut section = Section::Top;
    let mut values = BTreeMap::new();
    let mut edges = Vec::new();
    let mut saw_edges = false;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "edges" => {
                    saw_edges = true;
                    Section::Edges
                }
                "manifest" => Section::Manifest,
                other => return Err(schema(&format!("[{other}]"), "unknown section")),
            };
            continue;
        }
        match section {
            Section::Edges => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let bad = || ConfigError::Parse {
                    line: line_no,
                    message: format!("expected `u v weight`, got `{line}`"),
                };
                if parts.len() != 3 {
                    return Err(bad());
                }
                let u: usize = parts[0].parse().map_err(|_| bad())?;
                let v: usize = parts[1].parse().map_err(|_| bad())?;
                let w: f64 = parts[2].parse().map_err(|_| bad())?;
                edges.push((u, v, w));
            }
            Section::Top | Section::Manifest => {
                let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                })?;
                let key = key.trim();
                let value = value.trim();
                if section == Section::Manifest {
                    if !MANIFEST_KEYS.contains(&key) {
                        return Err(schema(key, "unknown manifest key"));
                    }
                    continue;
                }
                if !KEYS.contains(&key) {
                    return Err(schema(key, "unknown key"));
                }
                if values
                    .insert(key.to_string(), (line_no, value.to_string()))
                    .is_some()
                {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("duplicate key `{key}`"),
                    });
                }
            }
        }
    }
    resolve(&Entries { values }, saw_edges.then_some(edges))
}

fn resolve(e: &Entries, edges: Option<Vec<(usize, usize, f64)>>) -> Result<SimConfig, ConfigError> {
    let d = SimConfig::default();
    let dw = WorldConfig::<f64>::default();

    let bounds = Bounds::new(
        e.get("world_xmin")?.unwrap_or(dw.bounds.xmin),
        e.get("world_xmax")?.unwrap_or(dw.bounds.xmax),
        e.get("world_ymin")?.unwrap_or(dw.bounds.ymin),
        e.get("world_ymax")?.unwrap_or(dw.bounds.ymax),
    );
    let dump_position = Position::new(
        e.get("dump_x")?.unwrap_or(bounds.xmax),
        e.get("dump_y")?.unwrap_or(bounds.ymax),
    );
    let depot_position = Position::new(
        e.get("depot_x")?.unwrap_or(dw.depot_position.x),
        e.get("depot_y")?.unwrap_or(dw.depot_position.y),
    );
    let mode: Option<String> = e.get("graph_mode")?;
    let graph_mode = match (mode.as_deref(), edges) {
        (None | Some("complete"), None) => GraphMode::CompleteEuclidean,
        (None | Some("explicit"), Some(list)) => GraphMode::ExplicitEdges(list),
        (Some("explicit"), None) => {
            return Err(schema(
                "graph_mode",
                "explicit mode needs an [edges] section",
            ))
        }
        (Some("complete"), Some(_)) => {
            return Err(schema(
                "graph_mode",
                "complete mode cannot take an [edges] section",
            ))
        }
        (Some(other), _) => {
            return Err(schema(
                "graph_mode",
                format!("`{other}` is not complete|explicit"),
            ))
        }
    };
    let world = WorldConfig {
        bin_count: e.get("bin_count")?.unwrap_or(dw.bin_count),
        bounds,
        dump_position,
        depot_position,
        graph_mode,
    };

    let fill_model: Option<String> = e.get("fill_model")?;
    let has_range = e.has("fill_rate_min") || e.has("fill_rate_max");
    let fill = match fill_model.as_deref() {
        Some("unit") => {
            if e.has("fill_rates") || has_range {
                return Err(schema("fill_model", "unit fill takes no rates"));
            }
            FillSpec::Unit
        }
        None | Some("bernoulli") => match e.values.get("fill_rates") {
            Some((line, raw)) => {
                if has_range {
                    return Err(schema(
                        "fill_rates",
                        "give either fill_rates or fill_rate_min/max",
                    ));
                }
                let rates = raw
                    .split(',')
                    .map(|r| r.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ConfigError::Parse {
                        line: *line,
                        message: format!("bad rate list `{raw}`"),
                    })?;
                FillSpec::Rates(rates)
            }
            None => {
                let (dmin, dmax) = match d.fill {
                    FillSpec::Bernoulli { min_rate, max_rate } => (min_rate, max_rate),
                    _ => unreachable!("default fill is a bernoulli range"),
                };
                FillSpec::Bernoulli {
                    min_rate: e.get("fill_rate_min")?.unwrap_or(dmin),
                    max_rate: e.get("fill_rate_max")?.unwrap_or(dmax),
                }
            }
        },
        Some(other) => {
            return Err(schema(
                "fill_model",
                format!("`{other}` is not unit|bernoulli"),
            ))
        }
    };

    let config = SimConfig {
        world,
        bin_capacity: e.get("bin_capacity")?.unwrap_or(d.bin_capacity),
        yellow_threshold: e.get("yellow_threshold")?.unwrap_or(d.yellow_threshold),
        truck_count: e.get("truck_count")?.unwrap_or(d.truck_count),
        truck_capacity: e.get("truck_capacity")?.unwrap_or(d.truck_capacity),
        fill,
        tariff: Tariff {
            price_per_unit: e.get("price_per_unit")?.unwrap_or(d.tariff.price_per_unit),
            fixed_trip_cost: e.get("trip_cost")?.unwrap_or(d.tariff.fixed_trip_cost),
        },
        dispatch_threshold: e.get("dispatch_threshold")?.unwrap_or(d.dispatch_threshold),
        ticks: e.get("ticks")?.unwrap_or(d.ticks),
        seed: e.get("seed")?.unwrap_or(d.seed),
        citizen_step: e.get("citizen_step")?.unwrap_or(d.citizen_step),
    };
    validate(&config)?;
    Ok(config)
}

/// Semantic checks, reported against the key most responsible.
pub fn validate(c: &SimConfig) -> Result<(), ConfigError> {
    if c.yellow_threshold == 0 || c.yellow_threshold >= c.bin_capacity {
        return Err(schema(
            "yellow_threshold",
            format!(
                "must satisfy 0 < yellow_threshold < bin_capacity ({})",
                c.bin_capacity
            ),
        ));
    }
    if c.bin_capacity > c.truck_capacity {
        return Err(schema(
            "bin_capacity",
            format!("exceeds truck_capacity {}", c.truck_capacity),
        ));
    }
    if c.world.bin_count == 0 {
        return Err(schema("bin_count", "must be at least 1"));
    }
    if c.truck_count == 0 {
        return Err(schema("truck_count", "must be at least 1"));
    }
    if c.dispatch_threshold == 0 {
        return Err(schema("dispatch_threshold", "must be at least 1"));
    }
    if let FillSpec::Rates(rates) = &c.fill {
        if rates.len() != c.world.bin_count {
            return Err(schema(
                "fill_rates",
                format!("{} rates for {} bins", rates.len(), c.world.bin_count),
            ));
        }
    }
    if let GraphMode::ExplicitEdges(edges) = &c.world.graph_mode {
        if let Some((u, v, w)) = edges.iter().find(|(_, _, w)| !(*w >= 0.0 && w.is_finite())) {
            return Err(schema(
                "[edges]",
                format!("edge ({u}, {v}) has invalid weight {w}"),
            ));
        }
    }
    c.validate()
        .map_err(|err| schema("config", err.to_string()))
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Fully resolved config in the file format; `parse_config` reads it back
/// to an equal value.
pub fn write_config(c: &SimConfig) -> String {
    let mut out = String::new();
    let w = &c.world;
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("seed", c.seed.to_string());
    kv("ticks", c.ticks.to_string());
    kv("bin_count", w.bin_count.to_string());
    kv("world_xmin", w.bounds.xmin.to_string());
    kv("world_xmax", w.bounds.xmax.to_string());
    kv("world_ymin", w.bounds.ymin.to_string());
    kv("world_ymax", w.bounds.ymax.to_string());
    kv("dump_x", w.dump_position.x.to_string());
    kv("dump_y", w.dump_position.y.to_string());
    kv("depot_x", w.depot_position.x.to_string());
    kv("depot_y", w.depot_position.y.to_string());
    let explicit = matches!(w.graph_mode, GraphMode::ExplicitEdges(_));
    kv(
        "graph_mode",
        if explicit { "explicit" } else { "complete" }.into(),
    );
    kv("bin_capacity", c.bin_capacity.to_string());
    kv("yellow_threshold", c.yellow_threshold.to_string());
    kv("truck_count", c.truck_count.to_string());
    kv("truck_capacity", c.truck_capacity.to_string());
    match &c.fill {
        FillSpec::Unit => kv("fill_model", "unit".into()),
        FillSpec::Bernoulli { min_rate, max_rate } => {
            kv("fill_model", "bernoulli".into());
            kv("fill_rate_min", min_rate.to_string());
            kv("fill_rate_max", max_rate.to_string());
        }
        FillSpec::Rates(rates) => {
            kv("fill_model", "bernoulli".into());
            kv(
                "fill_rates",
                rates
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
    }
    kv("price_per_unit", c.tariff.price_per_unit.to_string());
    kv("trip_cost", c.tariff.fixed_trip_cost.to_string());
    kv("dispatch_threshold", c.dispatch_threshold.to_string());
    kv("citizen_step", c.citizen_step.to_string());
    if let GraphMode::ExplicitEdges(edges) = &w.graph_mode {
        out.push_str("\n[edges]\n");
        for (u, v, weight) in edges {
            let _ = writeln!(out, "{u} {v} {weight}");
        }
    }
    out
}

/// Reads a standalone graph file for one-shot planning.
///
/// ```text
/// [vertices]
/// M 0 0          # label x y
/// O 9 0
/// [edges]        # optional; without it the graph is complete Euclidean
/// M O 9          # label label weight
/// ```
pub fn parse_graph(text: &str) -> Result<Graph<f64>, ConfigError> {
    let mut section = None;
    let mut vertices: Vec<Vertex<f64>> = Vec::new();
    let mut edges: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut raw_edges: Vec<(String, String, f64, usize)> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "vertices" => Some(false),
                "edges" => Some(true),
                other => return Err(schema(&format!("[{other}]"), "unknown graph section")),
            };
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |what: &str| ConfigError::Parse {
            line: line_no,
            message: format!("expected `{what}`, got `{line}`"),
        };
        match section {
            None => return Err(parse_err("[vertices] or [edges]")),
            Some(false) => {
                if parts.len() != 3 {
                    return Err(parse_err("label x y"));
                }
                let x: f64 = parts[1].parse().map_err(|_| parse_err("label x y"))?;
                let y: f64 = parts[2].parse().map_err(|_| parse_err("label x y"))?;
                if vertices.iter().any(|v| v.label == parts[0]) {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("duplicate label `{}`", parts[0]),
                    });
                }
                vertices.push(Vertex {
                    id: vertices.len(),
                    label: parts[0].to_string(),
                    position: Position::new(x, y),
                    kind: VertexKind::BinSite,
                });
            }
            Some(true) => {
                if parts.len() != 3 {
                    return Err(parse_err("u v weight"));
                }
                let w: f64 = parts[2].parse().map_err(|_| parse_err("u v weight"))?;
                raw_edges.push((parts[0].to_string(), parts[1].to_string(), w, line_no));
            }
        }
    }
    for (u, v, w, line) in raw_edges {
        let find = |label: &str| {
            vertices
                .iter()
                .position(|x| x.label == label)
                .ok_or_else(|| ConfigError::Parse {
                    line,
                    message: format!("unknown vertex `{label}`"),
                })
        };
        if !(w >= 0.0 && w.is_finite()) {
            return Err(ConfigError::Parse {
                line,
                message: format!("invalid weight {w}"),
            });
        }
        edges.push((find(&u)?, find(&v)?, w, line));
    }
    let result = if edges.is_empty() {
        complete_euclidean(vertices)
    } else {
        let list = edges
            .iter()
            .map(|&(u, v, weight, _)| Edge { u, v, weight })
            .collect();
        Graph::new(vertices, list)
    };
    result.map_err(|e| schema("[edges]", e.to_string()))
}
