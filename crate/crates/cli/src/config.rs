//! Experiment configuration files.
//!
//! ```text
//! # comment
//! graph.family = room_box
//! graph.margin = auto
//! order = weak
//! cops.agent = [greedy, stationary]
//! cops.count = 1
//! cops.speed = [1, 2]
//! cops.reach = 1
//! robber.agent = grid
//! robber.t = 1
//! horizon = 10000
//! seed = 7
//! ```
//!
//! One `key = value` per line. A value in brackets is a list and makes the key an axis of
//! the parameter grid; the cells are the cartesian product of all axes, with the first
//! axis in the file varying slowest. Keys are dotted paths; `graph.<name>` entries are
//! passed to the graph family.

use std::collections::BTreeMap;

use crate::graphspec::GraphSpec;
use crate::ConfigError;

pub const COP_AGENTS: [&str; 6] = ["greedy", "intercept", "random", "random-stream", "stationary", "td"];
pub const ROBBER_AGENTS: [&str; 5] = ["grid", "cycle", "haven", "hub", "optimal"];

const KEYS: [&str; 13] = [
    "order",
    "cops.agent",
    "cops.count",
    "cops.speed",
    "cops.reach",
    "robber.agent",
    "robber.t",
    "robber.speed",
    "robber.objective",
    "horizon",
    "seed",
    "budget",
    "certify",
];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    key: String,
    values: Vec<String>,
    line: usize,
}

/// Parsed configuration before grid expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    entries: Vec<Entry>,
}

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub index: usize,
    /// Axis assignments, in file order, for labelling.
    pub axes: Vec<(String, String)>,
    values: BTreeMap<String, (String, usize)>,
}

fn split_list(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in body.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::new(line_no, format!("expected key = value, got {:?}", line)))?;
            let key = key.trim().to_string();
            let value = value.trim();
            if !(KEYS.contains(&key.as_str()) || key.starts_with("graph.")) {
                return Err(ConfigError::new(line_no, format!("unknown key {:?}", key)));
            }
            if entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::new(line_no, format!("duplicate key {:?}", key)));
            }
            let values = match value.strip_prefix('[') {
                Some(rest) => {
                    let body = rest.strip_suffix(']').ok_or_else(|| ConfigError::new(line_no, "list is missing its closing ']'"))?;
                    split_list(body)
                }
                None => vec![value.to_string()],
            };
            if values.is_empty() || values.iter().any(String::is_empty) {
                return Err(ConfigError::new(line_no, format!("empty value for {:?}", key)));
            }
            entries.push(Entry { key, values, line: line_no });
        }
        let cfg = ExperimentConfig { entries };
        cfg.validate()?;
        Ok(cfg)
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let family = self.entry("graph.family").ok_or_else(|| ConfigError::new(0, "missing key graph.family"))?;
        for f in &family.values {
            GraphSpec { family: f.clone(), params: BTreeMap::new() }.check_family().map_err(|e| e.at(family.line))?;
        }
        let cops = self.entry("cops.agent").ok_or_else(|| ConfigError::new(0, "missing key cops.agent"))?;
        for a in &cops.values {
            if !COP_AGENTS.contains(&a.as_str()) {
                return Err(ConfigError::new(cops.line, format!("unknown cop agent {:?} (known: {})", a, COP_AGENTS.join(", "))));
            }
        }
        let robber = self.entry("robber.agent").ok_or_else(|| ConfigError::new(0, "missing key robber.agent"))?;
        for a in &robber.values {
            if !ROBBER_AGENTS.contains(&a.as_str()) {
                return Err(ConfigError::new(robber.line, format!("unknown robber agent {:?} (known: {})", a, ROBBER_AGENTS.join(", "))));
            }
        }
        if cops.values.iter().any(|a| a.starts_with("random")) && self.entry("seed").is_none() {
            return Err(ConfigError::new(cops.line, "randomized cop agents need a seed"));
        }
        for e in &self.entries {
            for v in &e.values {
                check_value(&e.key, v).map_err(|msg| ConfigError::new(e.line, msg))?;
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.entries.iter().map(|e| e.values.len()).product()
    }

    /// All grid cells, first axis slowest.
    pub fn cells(&self) -> Vec<Cell> {
        let total = self.cell_count();
        (0..total)
            .map(|index| {
                let mut rest = index;
                let mut picks = vec![0; self.entries.len()];
                for (i, e) in self.entries.iter().enumerate().rev() {
                    picks[i] = rest % e.values.len();
                    rest /= e.values.len();
                }
                let mut axes = Vec::new();
                let mut values = BTreeMap::new();
                for (e, &p) in self.entries.iter().zip(&picks) {
                    if e.values.len() > 1 {
                        axes.push((e.key.clone(), e.values[p].clone()));
                    }
                    values.insert(e.key.clone(), (e.values[p].clone(), e.line));
                }
                Cell { index, axes, values }
            })
            .collect()
    }
}

fn check_value(key: &str, v: &str) -> Result<(), String> {
    let number = |v: &str| v.parse::<u64>().map(|_| ()).map_err(|_| format!("{} expects a non-negative integer, got {:?}", key, v));
    match key {
        "order" => v.parse::<pursuit::game::Order>().map(|_| ()),
        "robber.objective" => v.parse::<pursuit::game::Objective>().map(|_| ()),
        "certify" => v.parse::<bool>().map(|_| ()).map_err(|_| format!("certify expects true or false, got {:?}", v)),
        "cops.count" | "cops.speed" | "cops.reach" | "robber.t" | "horizon" | "seed" | "budget" => number(v),
        "robber.speed" if v != "auto" => number(v),
        _ => Ok(()),
    }
}

impl Cell {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn line(&self, key: &str) -> usize {
        self.values.get(key).map_or(0, |(_, l)| *l)
    }

    pub fn num(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::new(self.line(key), format!("{} expects a number, got {:?}", key, v))),
        }
    }

    pub fn graph_spec(&self) -> GraphSpec {
        let mut params = BTreeMap::new();
        for (k, (v, _)) in &self.values {
            if let Some(name) = k.strip_prefix("graph.") {
                if name != "family" {
                    params.insert(name.to_string(), v.clone());
                }
            }
        }
        GraphSpec { family: self.get("graph.family").unwrap_or_default().to_string(), params }
    }

    /// `key=value` pairs of the axes, or `-` for a single-cell config.
    pub fn label(&self) -> String {
        if self.axes.is_empty() {
            "-".into()
        } else {
            self.axes.iter().map(|(k, v)| format!("{}={}", k, v.replace(' ', ""))).collect::<Vec<_>>().join(" ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_expand_first_axis_slowest() {
        let cfg = ExperimentConfig::parse("graph.family = cycle\ngraph.n = [10, 20]\ncops.agent = greedy\ncops.speed = [1,2,3]\nrobber.agent = cycle\n").unwrap();
        let cells = cfg.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[1].label(), "graph.n=10 cops.speed=2");
        assert_eq!(cells[3].get("graph.n"), Some("20"));
    }

    #[test]
    fn objective_lists_keep_inner_commas() {
        assert_eq!(split_list("ball(center=1,radius=2), finite(1,2)"), vec!["ball(center=1,radius=2)", "finite(1,2)"]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("graph.family = cycle\ncops.agnt = greedy\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = ExperimentConfig::parse("graph.family = cycle\ncops.agent = random\nrobber.agent = cycle\n").unwrap_err();
        assert!(err.msg.contains("seed"), "{}", err);
        let err = ExperimentConfig::parse("graph.family = cycle\ncops.agent = greedy\nrobber.agent = cycle\nhorizon = x\n").unwrap_err();
        assert_eq!(err.line, 4);
    }
}
