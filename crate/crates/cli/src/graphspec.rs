//! Graph specifications: a family name plus `key=value` parameters, e.g. `cycle n=400`.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use pursuit::geometry::{build_fat_minor_grid, FatMinorModel, Pattern};
use pursuit::graph::families::{self, HubGraph};
use pursuit::graph::{Graph, TreeDecomposition};
use pursuit::strategies::{hub_branch_degree, GridRobber};

use crate::ConfigError;

pub const FAMILIES: [&str; 14] = [
    "path",
    "cycle",
    "complete",
    "square_grid",
    "grid_window",
    "room_box",
    "regular_tree",
    "random_tree",
    "random_connected",
    "series_parallel",
    "hub",
    "multitriangle",
    "fat_minor",
    "edge_list",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    pub family: String,
    pub params: BTreeMap<String, String>,
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family)?;
        for (k, v) in &self.params {
            write!(f, " {}={}", k, v)?;
        }
        Ok(())
    }
}

/// Game parameters a family may size itself from.
#[derive(Debug, Clone, Copy, Default)]
pub struct SizeHints {
    pub cops: usize,
    pub cop_speed: usize,
    pub reach: usize,
    pub rooms_t: usize,
}

/// A built graph and the structure some agents need.
pub struct BuiltGraph {
    pub graph: Graph,
    /// The spec with every derived value written out, so it rebuilds the same graph.
    pub concrete: GraphSpec,
    pub decomposition: Option<TreeDecomposition>,
    pub hub: Option<(HubGraph, usize)>,
    pub model: Option<Rc<FatMinorModel>>,
}

impl GraphSpec {
    /// Parses `family key=value ...`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut parts = text.split_whitespace();
        let family = parts.next().ok_or_else(|| ConfigError::new(0, "empty graph spec"))?.to_string();
        let mut params = BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| ConfigError::new(0, format!("graph parameter {:?} is not key=value", p)))?;
            params.insert(k.to_string(), v.to_string());
        }
        let spec = GraphSpec { family, params };
        spec.check_family()?;
        Ok(spec)
    }

    pub fn check_family(&self) -> Result<(), ConfigError> {
        if FAMILIES.contains(&self.family.as_str()) {
            Ok(())
        } else {
            Err(ConfigError::new(0, format!("unknown graph family {:?} (known: {})", self.family, FAMILIES.join(", "))))
        }
    }

    fn raw(&self, key: &str) -> Result<&str, ConfigError> {
        self.params.get(key).map(String::as_str).ok_or_else(|| ConfigError::new(0, format!("graph family {} needs {}", self.family, key)))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| ConfigError::new(0, format!("graph parameter {}={:?} is not a valid number", key, v)))
    }

    fn num_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        if self.params.contains_key(key) {
            self.num(key)
        } else {
            Ok(default)
        }
    }

    fn is_auto(&self, key: &str) -> bool {
        self.params.get(key).is_none_or(|v| v == "auto")
    }

    pub fn build(&self, hints: SizeHints) -> Result<BuiltGraph, ConfigError> {
        self.check_family()?;
        let graph_err = |e: pursuit::graph::GraphError| ConfigError::new(0, format!("{}: {}", self, e));
        let mut concrete = self.clone();
        let mut decomposition = None;
        let mut hub = None;
        let mut model = None;
        let graph = match self.family.as_str() {
            "path" => families::path(self.num("n")?).map_err(graph_err)?,
            "cycle" => families::cycle(self.num("n")?).map_err(graph_err)?,
            "complete" => families::complete(self.num("n")?).map_err(graph_err)?,
            "square_grid" => families::square_grid(self.num("rows")?, self.num("cols")?).map_err(graph_err)?,
            "grid_window" => families::grid_window(self.num("xmin")?, self.num("xmax")?, self.num("ymin")?, self.num("ymax")?).map_err(graph_err)?,
            "room_box" => {
                let t = hints.rooms_t.max(1);
                let (s, rho) = (hints.cop_speed.max(1), hints.reach.max(1));
                let margin = if self.is_auto("margin") { (2 * (3 * rho + 1) * s) as i64 } else { self.num("margin")? };
                let w = GridRobber::window_for(t, s, rho, (0, 0), margin);
                concrete = GraphSpec {
                    family: "grid_window".into(),
                    params: [("xmin", w.xmin), ("xmax", w.xmax), ("ymin", w.ymin), ("ymax", w.ymax)].iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
                };
                families::grid_window(w.xmin, w.xmax, w.ymin, w.ymax).map_err(graph_err)?
            }
            "regular_tree" => families::regular_tree(self.num("degree")?, self.num("depth")?).map_err(graph_err)?,
            "random_tree" => families::random_tree(self.num("n")?, self.num("seed")?).map_err(graph_err)?,
            "random_connected" => families::random_connected(self.num("n")?, self.num("p")?, self.num("seed")?).map_err(graph_err)?,
            "series_parallel" => {
                let (g, d) = families::series_parallel(self.num("seed")?, self.num("size")?).map_err(graph_err)?;
                decomposition = Some(d);
                g
            }
            "hub" => {
                let c = if self.is_auto("c") { hub_branch_degree(hints.cops.max(1), hints.cop_speed.max(1), hints.reach.max(1)) } else { self.num("c")? };
                let depth = self.num_or("depth", 3)?;
                concrete.params.insert("c".into(), c.to_string());
                concrete.params.insert("depth".into(), depth.to_string());
                let h = families::hub_graph(c, depth).map_err(graph_err)?;
                let g = h.graph.clone();
                hub = Some((h, c));
                g
            }
            "multitriangle" => families::subdivided_multitriangle(self.num("i")?).map_err(graph_err)?.graph,
            "fat_minor" => {
                let pattern = parse_pattern(self.raw("pattern")?)?;
                let fatness = if self.is_auto("fatness") { 2 * (hints.cop_speed.max(1) + hints.reach + 1) } else { self.num("fatness")? };
                let margin = self.num_or("margin", 2)?;
                concrete.params.insert("fatness".into(), fatness.to_string());
                concrete.params.insert("margin".into(), margin.to_string());
                let m = build_fat_minor_grid(pattern, fatness, margin).map_err(|e| ConfigError::new(0, format!("{}: {}", self, e)))?;
                let g = m.host.clone();
                model = Some(Rc::new(m));
                g
            }
            "edge_list" => {
                let path = self.raw("file")?;
                let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(0, format!("cannot read {}: {}", path, e)))?;
                Graph::parse_edge_list(&text).map_err(graph_err)?
            }
            _ => unreachable!("family checked above"),
        };
        Ok(BuiltGraph { graph, concrete, decomposition, hub, model })
    }
}

/// `k1`..`k4` for complete patterns, `grid<n>` for square grid patterns.
pub fn parse_pattern(s: &str) -> Result<Pattern, ConfigError> {
    let bad = || ConfigError::new(0, format!("unknown pattern {:?} (use k1..k4 or grid<n>)", s));
    if let Some(t) = s.strip_prefix('k') {
        t.parse().map(Pattern::Complete).map_err(|_| bad())
    } else if let Some(n) = s.strip_prefix("grid") {
        n.parse().map(Pattern::Grid).map_err(|_| bad())
    } else {
        Err(bad())
    }
}
