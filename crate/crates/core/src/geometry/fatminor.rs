//! Fat minors: models, an exact verifier, grid constructions and the projection of host
//! vertices onto pattern vertices.

use std::collections::BTreeSet;
use std::fmt;

use super::GeometryError;
use crate::graph::families::{complete, grid_window, square_grid};
use crate::graph::{Graph, Vertex};

/// Branch sets and connection paths realizing `pattern` inside `host`.
#[derive(Debug, Clone)]
pub struct FatMinorModel {
    pub host: Graph,
    pub pattern: Graph,
    /// Branch set of every pattern vertex, sorted.
    pub branches: Vec<Vec<Vertex>>,
    /// One path per pattern edge `(x, y)` with `x < y`, running from `branches[x]` to `branches[y]`.
    pub paths: Vec<((Vertex, Vertex), Vec<Vertex>)>,
    pub fatness: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Branch sets are nonempty and connected; paths exist for exactly the pattern edges.
    Structure,
    BranchDistance,
    PathEndpoints,
    BranchPathDistance,
    PathDistance,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Structure => "structure",
            Condition::BranchDistance => "branch-distance",
            Condition::PathEndpoints => "path-endpoints",
            Condition::BranchPathDistance => "branch-path-distance",
            Condition::PathDistance => "path-distance",
        })
    }
}

/// A failed condition with the offending pieces and, for distance conditions, a pair of
/// host vertices closer than the fatness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub pieces: String,
    pub witness: Option<(Vertex, Vertex, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct FatMinorReport {
    pub checked: Vec<(Condition, bool)>,
    pub violations: Vec<Violation>,
}

impl FatMinorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_failure(&self, c: Condition) -> Option<&Violation> {
        self.violations.iter().find(|v| v.condition == c)
    }
}

impl fmt::Display for FatMinorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, ok) in &self.checked {
            writeln!(f, "{} {}", c, if *ok { "pass" } else { "FAIL" })?;
        }
        for v in &self.violations {
            match v.witness {
                Some((a, b, d)) => writeln!(f, "  {} {}: d({},{})={}", v.condition, v.pieces, a, b, d)?,
                None => writeln!(f, "  {} {}", v.condition, v.pieces)?,
            }
        }
        Ok(())
    }
}

fn is_connected(g: &Graph, set: &[Vertex]) -> bool {
    let Some(&start) = set.first() else { return false };
    let inside: BTreeSet<Vertex> = set.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.adj(v) {
            if inside.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == inside.len()
}

/// Closest pair between `from` (given as a distance field) and `to`, if nearer than `limit`.
fn close_pair(g: &Graph, field: &[Option<usize>], from: &[Vertex], to: &[Vertex]) -> Option<(Vertex, Vertex, usize)> {
    let (&b, d) = to.iter().filter_map(|v| field[*v].map(|d| (v, d))).min_by_key(|&(v, d)| (d, *v))?;
    let back = g.distance_field(&[b], d);
    let a = *from.iter().filter(|&&a| back[a] == Some(d)).min()?;
    Some((a, b, d))
}

impl FatMinorModel {
    pub fn path_of(&self, x: Vertex, y: Vertex) -> Option<&[Vertex]> {
        let key = (x.min(y), x.max(y));
        self.paths.iter().find(|(e, _)| *e == key).map(|(_, p)| p.as_slice())
    }

    /// Union of the branch sets of `set` and the paths of edges with both ends in `set`.
    pub fn lift(&self, set: &[Vertex]) -> Vec<Vertex> {
        let inside: BTreeSet<Vertex> = set.iter().copied().collect();
        let mut out: BTreeSet<Vertex> = BTreeSet::new();
        for &u in &inside {
            out.extend(self.branches[u].iter().copied());
        }
        for ((x, y), p) in &self.paths {
            if inside.contains(x) && inside.contains(y) {
                out.extend(p.iter().copied());
            }
        }
        out.into_iter().collect()
    }

    /// Every host vertex used by the model.
    pub fn support(&self) -> Vec<Vertex> {
        let all: Vec<Vertex> = (0..self.pattern.n()).collect();
        self.lift(&all)
    }
}

impl FatMinorModel {
    /// Text form: `fatness`, `host`, `pattern` headers, then `branch` and `path` vertex lists.
    pub fn to_text(&self) -> String {
        let list = |vs: &[Vertex]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("fatness {}\n", self.fatness);
        match self.host.grid() {
            Some(w) => out.push_str(&format!("host window {} {} {} {}\n", w.xmin, w.xmax, w.ymin, w.ymax)),
            None => {
                out.push_str(&format!("host vertices {}\n", self.host.n()));
                for (u, v) in self.host.edges() {
                    out.push_str(&format!("edge {} {}\n", u, v));
                }
            }
        }
        out.push_str(&format!("pattern vertices {}\n", self.pattern.n()));
        for (u, v) in self.pattern.edges() {
            out.push_str(&format!("pattern-edge {} {}\n", u, v));
        }
        for (x, b) in self.branches.iter().enumerate() {
            out.push_str(&format!("branch {}: {}\n", x, list(b)));
        }
        for ((x, y), p) in &self.paths {
            out.push_str(&format!("path {} {}: {}\n", x, y, list(p)));
        }
        out
    }

    /// Reads the form written by [`FatMinorModel::to_text`]. The model is not verified.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut fatness = None;
        let mut window = None;
        let mut host_n = None;
        let mut host_edges = Vec::new();
        let mut pattern_n = None;
        let mut pattern_edges = Vec::new();
        let mut branches: Vec<(usize, Vec<Vertex>)> = Vec::new();
        let mut paths = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| GeometryError::Parse { line: i + 1, msg };
            let nums = |t: &str| -> Result<Vec<i64>, GeometryError> {
                t.split_whitespace().map(|x| x.parse::<i64>().map_err(|_| err(format!("bad number {:?}", x)))).collect()
            };
            let ids = |t: &str| -> Result<Vec<Vertex>, GeometryError> {
                nums(t)?.into_iter().map(|x| usize::try_from(x).map_err(|_| err(format!("negative id {}", x)))).collect()
            };
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "fatness" => fatness = Some(ids(rest)?.first().copied().ok_or_else(|| err("missing fatness".into()))?),
                "host" => {
                    if let Some(r) = rest.strip_prefix("window") {
                        let v = nums(r)?;
                        if v.len() != 4 {
                            return Err(err("window needs xmin xmax ymin ymax".into()));
                        }
                        window = Some((v[0], v[1], v[2], v[3]));
                    } else if let Some(r) = rest.strip_prefix("vertices") {
                        host_n = ids(r)?.first().copied();
                    } else {
                        return Err(err(format!("bad host line {:?}", line)));
                    }
                }
                "edge" | "pattern-edge" => {
                    let v = ids(rest)?;
                    if v.len() != 2 {
                        return Err(err("edge needs two ids".into()));
                    }
                    if head == "edge" { &mut host_edges } else { &mut pattern_edges }.push((v[0], v[1]));
                }
                "pattern" => pattern_n = ids(rest.strip_prefix("vertices").ok_or_else(|| err("expected pattern vertices N".into()))?)?.first().copied(),
                "branch" | "path" => {
                    let (key, vs) = rest.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
                    let key = ids(key)?;
                    let vs = ids(vs)?;
                    match (head, key.as_slice()) {
                        ("branch", &[x]) => branches.push((x, vs)),
                        ("path", &[x, y]) => paths.push(((x.min(y), x.max(y)), vs)),
                        _ => return Err(err(format!("bad key in {:?}", line))),
                    }
                }
                other => return Err(err(format!("unknown record {:?}", other))),
            }
        }
        let missing = |what: &str| GeometryError::Parse { line: 0, msg: format!("missing {}", what) };
        let host = match (window, host_n) {
            (Some((a, b, c, d)), _) => grid_window(a, b, c, d)?,
            (None, Some(n)) => Graph::from_edges(n, &host_edges)?,
            _ => return Err(missing("host")),
        };
        let pattern = Graph::from_edges(pattern_n.ok_or_else(|| missing("pattern"))?, &pattern_edges)?;
        branches.sort_by_key(|b| b.0);
        if branches.iter().enumerate().any(|(i, b)| b.0 != i) {
            return Err(missing("branch sets numbered from 0"));
        }
        let branches = branches
            .into_iter()
            .map(|(_, mut b)| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(FatMinorModel { host, pattern, branches, paths, fatness: fatness.ok_or_else(|| missing("fatness"))? })
    }
}

/// Checks the four fatness conditions exhaustively. Every violation carries its witness.
pub fn verify_fat_minor(model: &FatMinorModel) -> FatMinorReport {
    let g = &model.host;
    let h = &model.pattern;
    let d = model.fatness;
    let mut report = FatMinorReport::default();
    let fail = |report: &mut FatMinorReport, condition, pieces: String, witness| {
        report.violations.push(Violation { condition, pieces, witness });
    };

    let before = report.violations.len();
    if model.branches.len() != h.n() {
        fail(&mut report, Condition::Structure, format!("{} branch sets for {} pattern vertices", model.branches.len(), h.n()), None);
    }
    for (x, b) in model.branches.iter().enumerate() {
        if b.iter().any(|&v| v >= g.n()) || !is_connected(g, b) {
            fail(&mut report, Condition::Structure, format!("branch {} is empty, disconnected or outside the host", x), None);
        }
    }
    let mut wanted: BTreeSet<(Vertex, Vertex)> = h.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    for ((x, y), p) in &model.paths {
        if !wanted.remove(&(*x, *y)) {
            fail(&mut report, Condition::Structure, format!("path {}-{} is not a pattern edge or repeats", x, y), None);
        }
        let distinct: BTreeSet<_> = p.iter().collect();
        if !g.is_walk(p) || distinct.len() != p.len() {
            fail(&mut report, Condition::Structure, format!("path {}-{} is not a path of the host", x, y), None);
        }
    }
    for (x, y) in wanted {
        fail(&mut report, Condition::Structure, format!("edge {}-{} has no path", x, y), None);
    }
    report.checked.push((Condition::Structure, report.violations.len() == before));
    if report.violations.len() != before {
        return report;
    }

    let cap = d.saturating_sub(1);
    let branch_fields: Vec<Vec<Option<usize>>> = model.branches.iter().map(|b| g.distance_field(b, cap)).collect();
    let path_fields: Vec<Vec<Option<usize>>> = model.paths.iter().map(|(_, p)| g.distance_field(p, cap)).collect();

    let before = report.violations.len();
    for x in 0..h.n() {
        for y in x + 1..h.n() {
            if d > 0 {
                if let Some(w) = close_pair(g, &branch_fields[x], &model.branches[x], &model.branches[y]) {
                    fail(&mut report, Condition::BranchDistance, format!("branches {} and {}", x, y), Some(w));
                }
            }
        }
    }
    report.checked.push((Condition::BranchDistance, report.violations.len() == before));

    let before = report.violations.len();
    for ((x, y), p) in &model.paths {
        let first = p[0];
        let last = p[p.len() - 1];
        let ends_ok = model.branches[*x].binary_search(&first).is_ok() && model.branches[*y].binary_search(&last).is_ok();
        let inner_ok = p[1..p.len() - 1].iter().all(|v| model.branches.iter().all(|b| b.binary_search(v).is_err()));
        if !ends_ok || !inner_ok || p.len() < 2 {
            fail(&mut report, Condition::PathEndpoints, format!("path {}-{}", x, y), None);
        }
    }
    report.checked.push((Condition::PathEndpoints, report.violations.len() == before));

    let before = report.violations.len();
    for (x, field) in branch_fields.iter().enumerate() {
        for ((a, b), p) in &model.paths {
            if x == *a || x == *b || d == 0 {
                continue;
            }
            if let Some(w) = close_pair(g, field, &model.branches[x], p) {
                fail(&mut report, Condition::BranchPathDistance, format!("branch {} and path {}-{}", x, a, b), Some(w));
            }
        }
    }
    report.checked.push((Condition::BranchPathDistance, report.violations.len() == before));

    let before = report.violations.len();
    for i in 0..model.paths.len() {
        for j in i + 1..model.paths.len() {
            if d == 0 {
                continue;
            }
            let ((a, b), p) = &model.paths[i];
            let ((c, e), q) = &model.paths[j];
            if let Some(w) = close_pair(g, &path_fields[i], p, q) {
                fail(&mut report, Condition::PathDistance, format!("paths {}-{} and {}-{}", a, b, c, e), Some(w));
            }
        }
    }
    report.checked.push((Condition::PathDistance, report.violations.len() == before));
    report
}

/// Pattern graphs with a grid construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Complete graph on at most four vertices.
    Complete(usize),
    /// `n x n` grid, vertex `r * n + c`.
    Grid(usize),
}

impl Pattern {
    pub fn graph(&self) -> Result<Graph, GeometryError> {
        match *self {
            Pattern::Complete(t) => complete(t).map_err(GeometryError::Graph),
            Pattern::Grid(n) => square_grid(n, n).map_err(GeometryError::Graph),
        }
    }
}

struct Canvas {
    cells: Vec<(i64, i64)>,
}

impl Canvas {
    fn segment(&mut self, to: (i64, i64)) {
        let mut cur = *self.cells.last().unwrap();
        while cur != to {
            if cur.0 != to.0 {
                cur.0 += (to.0 - cur.0).signum();
            } else {
                cur.1 += (to.1 - cur.1).signum();
            }
            self.cells.push(cur);
        }
    }

    fn route(start: (i64, i64), corners: &[(i64, i64)]) -> Vec<(i64, i64)> {
        let mut c = Canvas { cells: vec![start] };
        for &p in corners {
            c.segment(p);
        }
        c.cells
    }
}

fn staircase(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let mut cells = vec![from];
    let mut cur = from;
    while cur != to {
        if cur.0 - from.0 <= cur.1 - from.1 && cur.0 != to.0 {
            cur.0 += 1;
        } else {
            cur.1 += 1;
        }
        cells.push(cur);
    }
    cells
}

/// Fat minor of `pattern` in a grid window. Branch sets are `(2D+1) x (2D+1)` blocks and
/// paths are rectilinear; the window extends `margin` beyond the model.
pub fn build_fat_minor_grid(pattern: Pattern, fatness: usize, margin: usize) -> Result<FatMinorModel, GeometryError> {
    let d = fatness.max(1) as i64;
    let side = 2 * d + 1;
    let h = pattern.graph()?;
    let mut blocks: Vec<(i64, i64)> = Vec::new();
    let mut routes: Vec<((Vertex, Vertex), Vec<(i64, i64)>)> = Vec::new();
    let top = side - 1;
    match pattern {
        Pattern::Complete(t) => {
            if t > 4 {
                return Err(GeometryError::Unsupported(format!("K_{} has no planar grid layout", t)));
            }
            let gap = 2 * d;
            let far = 3 * gap + side;
            let corners = [(0, 0), (far, 0), (0, far), (far, far)];
            blocks.extend_from_slice(&corners[..t]);
            for &(x, y) in &[(0usize, 1usize), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
                if y >= t {
                    continue;
                }
                let cells = match (x, y) {
                    (0, 1) => Canvas::route((top, 0), &[(far, 0)]),
                    (0, 2) => Canvas::route((0, top), &[(0, far)]),
                    (0, 3) => staircase((top, top), (far, far)),
                    (1, 2) => Canvas::route((far + top, 0), &[(far + top, -gap), (-gap, -gap), (-gap, far + top), (0, far + top)]),
                    (1, 3) => Canvas::route((far + top, top), &[(far + top, far)]),
                    (2, 3) => Canvas::route((top, far + top), &[(far, far + top)]),
                    _ => unreachable!(),
                };
                routes.push(((x, y), cells));
            }
        }
        Pattern::Grid(n) => {
            let pitch = side + 2 * d;
            for r in 0..n as i64 {
                for c in 0..n as i64 {
                    blocks.push((c * pitch, r * pitch));
                }
            }
            for r in 0..n {
                for c in 0..n {
                    let v = r * n + c;
                    let (bx, by) = blocks[v];
                    if c + 1 < n {
                        routes.push(((v, v + 1), Canvas::route((bx + top, by + d), &[(bx + pitch, by + d)])));
                    }
                    if r + 1 < n {
                        routes.push(((v, v + n), Canvas::route((bx + d, by + top), &[(bx + d, by + pitch)])));
                    }
                }
            }
            routes.sort_by_key(|(e, _)| *e);
        }
    }
    let cells = blocks.iter().flat_map(|&(x, y)| [(x, y), (x + top, y + top)]).chain(routes.iter().flat_map(|(_, r)| r.iter().copied()));
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for (x, y) in cells {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let m = margin as i64;
    let host = grid_window(xmin - m, xmax + m, ymin - m, ymax + m).map_err(GeometryError::Graph)?;
    let w = host.grid().unwrap();
    let enc = |(x, y): (i64, i64)| w.encode(x, y).unwrap();
    let branches = blocks
        .iter()
        .map(|&(bx, by)| {
            let mut b: Vec<Vertex> = (0..side).flat_map(|dy| (0..side).map(move |dx| (bx + dx, by + dy))).map(enc).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let paths = routes.into_iter().map(|(e, r)| (e, r.into_iter().map(enc).collect())).collect();
    Ok(FatMinorModel { host, pattern: h, branches, paths, fatness })
}

/// Pattern vertices each host vertex projects to: branch sets within `D/2 - 1`, or failing
/// that the lower endpoint of every path within `D/2 - 1`.
#[derive(Debug, Clone)]
pub struct Projection {
    sets: Vec<Vec<Vertex>>,
}

impl Projection {
    pub fn new(model: &FatMinorModel) -> Self {
        let g = &model.host;
        let mut sets = vec![Vec::new(); g.n()];
        let Some(radius) = (model.fatness / 2).checked_sub(1) else {
            return Projection { sets };
        };
        let mut near_branch = vec![false; g.n()];
        for (u, b) in model.branches.iter().enumerate() {
            for (v, d) in g.distance_field(b, radius).into_iter().enumerate() {
                if d.is_some() {
                    sets[v].push(u);
                    near_branch[v] = true;
                }
            }
        }
        for ((x, _), p) in &model.paths {
            for (v, d) in g.distance_field(p, radius).into_iter().enumerate() {
                if d.is_some() && !near_branch[v] && !sets[v].contains(x) {
                    sets[v].push(*x);
                }
            }
        }
        for s in sets.iter_mut() {
            s.sort_unstable();
        }
        Projection { sets }
    }

    pub fn of(&self, v: Vertex) -> &[Vertex] {
        &self.sets[v]
    }

    /// Union over a set of host vertices.
    pub fn of_set(&self, vs: &[Vertex]) -> Vec<Vertex> {
        let out: BTreeSet<Vertex> = vs.iter().flat_map(|&v| self.sets[v].iter().copied()).collect();
        out.into_iter().collect()
    }

    /// Host vertices projecting to more than one pattern vertex.
    pub fn ambiguous(&self) -> usize {
        self.sets.iter().filter(|s| s.len() > 1).count()
    }
}
