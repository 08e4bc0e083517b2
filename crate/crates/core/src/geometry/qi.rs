//! Quasi-isometric embeddings, the virtual-cop bookkeeping that moves shadows of the real
//! cops inside the image, and a robber that plays a source-graph strategy in the target.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeometryError;
use crate::game::{
    validate_robber_path, AgentError, CopAgent, Counters, GameParams, GameState, Objective, Phase, RobberAgent, Status,
};
use crate::graph::families::{grid_window, path, subdivide};
use crate::graph::{Graph, Vertex};

/// Map `h` from the source graph into the target graph with distortion constant `c`.
#[derive(Debug, Clone)]
pub struct QiEmbedding {
    pub source: Graph,
    pub target: Graph,
    pub map: Vec<Vertex>,
    pub c: usize,
    image: Vec<Vertex>,
    in_image: Vec<bool>,
    preimage: Vec<Option<Vertex>>,
    to_image: Vec<usize>,
}

impl QiEmbedding {
    pub fn new(source: Graph, target: Graph, map: Vec<Vertex>, c: usize) -> Result<Self, GeometryError> {
        if c == 0 {
            return Err(GeometryError::Embedding("constant must be at least 1".into()));
        }
        if map.len() != source.n() {
            return Err(GeometryError::Embedding(format!("map has {} entries for {} vertices", map.len(), source.n())));
        }
        if let Some(&v) = map.iter().find(|&&v| v >= target.n()) {
            return Err(GeometryError::Embedding(format!("image vertex {} outside the target", v)));
        }
        let mut in_image = vec![false; target.n()];
        let mut preimage = vec![None; target.n()];
        for (x, &u) in map.iter().enumerate() {
            in_image[u] = true;
            preimage[u].get_or_insert(x);
        }
        let image: Vec<Vertex> = (0..target.n()).filter(|&u| in_image[u]).collect();
        let to_image = target.distance_field(&image, usize::MAX).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect();
        Ok(QiEmbedding { source, target, map, c, image, in_image, preimage, to_image })
    }

    /// Path on `len` vertices mapped onto row 0 of the grid window `[0, len) x [-below, above]`.
    pub fn path_row(len: usize, below: usize, above: usize) -> Result<Self, GeometryError> {
        let g = path(len)?;
        let h = grid_window(0, len as i64 - 1, -(below as i64), above as i64)?;
        let w = h.grid().unwrap();
        let map = (0..len).map(|i| w.encode(i as i64, 0).unwrap()).collect();
        Self::new(g, h, map, 1)
    }

    /// `g` into its `times`-fold subdivision, identity on original vertices.
    pub fn subdivision(g: Graph, times: usize) -> Result<Self, GeometryError> {
        let h = subdivide(&g, times);
        let map = (0..g.n()).collect();
        Self::new(g, h, map, times + 1)
    }

    /// Parses `c <C>` followed by `gID hID` lines.
    pub fn parse(source: Graph, target: Graph, text: &str) -> Result<Self, GeometryError> {
        let mut c = None;
        let mut map = vec![None; source.n()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| GeometryError::Parse { line: i + 1, msg: msg.into() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["c", v] => c = Some(v.parse::<usize>().map_err(|_| err("bad constant"))?),
                [a, b] => {
                    let x: usize = a.parse().map_err(|_| err("bad source id"))?;
                    let y: usize = b.parse().map_err(|_| err("bad target id"))?;
                    *map.get_mut(x).ok_or_else(|| err("source id out of range"))? = Some(y);
                }
                _ => return Err(err("expected `c <C>` or `gID hID`")),
            }
        }
        let c = c.ok_or(GeometryError::Parse { line: 0, msg: "missing `c` header".into() })?;
        let map = map
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| GeometryError::Embedding(format!("vertex {} unmapped", x))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, map, c)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("c {}\n", self.c);
        for (x, y) in self.map.iter().enumerate() {
            out.push_str(&format!("{} {}\n", x, y));
        }
        out
    }

    pub fn image(&self) -> &[Vertex] {
        &self.image
    }

    pub fn in_image(&self, v: Vertex) -> bool {
        self.in_image[v]
    }

    /// Membership in the `c`-neighbourhood of the image.
    pub fn near_image(&self, v: Vertex) -> bool {
        self.to_image[v] <= self.c
    }

    pub fn dist_to_image(&self, v: Vertex) -> usize {
        self.to_image[v]
    }

    /// Lowest source vertex mapped to `u`.
    pub fn preimage(&self, u: Vertex) -> Option<Vertex> {
        self.preimage[u]
    }

    /// Nearest image vertices of `v`, following the descent of the distance to the image.
    pub fn project(&self, v: Vertex) -> Vec<Vertex> {
        let mut seen = HashMap::from([(v, ())]);
        let mut stack = vec![v];
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            if self.in_image[x] {
                out.push(x);
                continue;
            }
            for &y in self.target.adj(x) {
                if self.to_image[y] + 1 == self.to_image[x] && seen.insert(y, ()).is_none() {
                    stack.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Walk from `a` to `b` inside the image neighbourhood: the images of a shortest source
    /// path between their lowest preimages, joined by shortest target paths. Returns the walk
    /// and the number of joining segments.
    pub fn image_walk(&self, a: Vertex, b: Vertex) -> Option<(Vec<Vertex>, usize)> {
        let x = self.preimage(a)?;
        let y = self.preimage(b)?;
        let route = self.source.shortest_path(x, y, usize::MAX)?;
        self.realize(&route)
    }

    /// Target walk through the images of a source walk.
    pub fn realize(&self, route: &[Vertex]) -> Option<(Vec<Vertex>, usize)> {
        let mut walk = vec![self.map[route[0]]];
        let mut segments = 0;
        for w in route.windows(2) {
            let (p, q) = (self.map[w[0]], self.map[w[1]]);
            if p == q {
                continue;
            }
            let seg = self.target.shortest_path(p, q, 2 * self.c)?;
            walk.extend_from_slice(&seg[1..]);
            segments += 1;
        }
        Some((walk, segments))
    }
}

/// Nearest vertices of `set` to `v` by breadth-first search.
pub fn shadow_project(h: &Graph, set: &[Vertex], v: Vertex) -> Vec<Vertex> {
    let mut member = vec![false; h.n()];
    for &u in set {
        member[u] = true;
    }
    let mut seen = vec![false; h.n()];
    seen[v] = true;
    let mut layer = vec![v];
    while !layer.is_empty() {
        let mut hits: Vec<Vertex> = layer.iter().copied().filter(|&x| member[x]).collect();
        if !hits.is_empty() {
            hits.sort_unstable();
            return hits;
        }
        let mut next = Vec::new();
        for &x in &layer {
            for &y in h.adj(x) {
                if !seen[y] {
                    seen[y] = true;
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    Vec::new()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiViolation {
    pub x: Vertex,
    pub y: Vertex,
    pub source_dist: usize,
    pub target_dist: usize,
    /// `true` for the lower inequality.
    pub lower: bool,
}

#[derive(Debug, Clone, Default)]
pub struct QiReport {
    pub pairs: usize,
    pub exhaustive: bool,
    pub violations: Vec<QiViolation>,
}

impl QiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for QiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs {} ({})", self.pairs, if self.exhaustive { "all" } else { "sampled" })?;
        for v in self.violations.iter().take(10) {
            let side = if v.lower { "lower" } else { "upper" };
            writeln!(f, "  {} bound fails at ({}, {}): source {}, target {}", side, v.x, v.y, v.source_dist, v.target_dist)?;
        }
        write!(f, "{}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// Checks `d_G/C - C <= d_H(h, h) <= C d_G + C` on all pairs when there are at most
/// `pair_budget` of them, otherwise on `pair_budget` seeded random pairs.
pub fn verify_qi_embedding(emb: &QiEmbedding, pair_budget: usize, seed: u64) -> QiReport {
    let n = emb.source.n();
    let c = emb.c;
    let mut report = QiReport { exhaustive: n * n.saturating_sub(1) / 2 <= pair_budget, ..QiReport::default() };
    let check = |x: Vertex, y: Vertex, dg: usize, dh: usize, report: &mut QiReport| {
        report.pairs += 1;
        if dh > c * dg + c {
            report.violations.push(QiViolation { x, y, source_dist: dg, target_dist: dh, lower: false });
        }
        if dg > c * (dh + c) {
            report.violations.push(QiViolation { x, y, source_dist: dg, target_dist: dh, lower: true });
        }
    };
    if report.exhaustive {
        for x in 0..n {
            let dg = emb.source.distance_field(&[x], usize::MAX);
            let dh = emb.target.distance_field(&[emb.map[x]], usize::MAX);
            for y in x + 1..n {
                check(x, y, dg[y].unwrap(), dh[emb.map[y]].unwrap(), &mut report);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pair_budget {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            let dg = emb.source.dist_capped(x, y, usize::MAX).unwrap().finite().unwrap();
            let dh = emb.target.dist_capped(emb.map[x], emb.map[y], usize::MAX).unwrap().finite().unwrap();
            check(x, y, dg, dh, &mut report);
        }
    }
    report
}

/// Speeds and reaches of the three layers of the transfer, as functions of the distortion
/// `c`, the cop speed `s`, the reach `rho` and the source robber speed `s_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferConstants {
    pub c: usize,
    pub s: usize,
    pub rho: usize,
    pub s_r: usize,
    /// Shadow speed.
    pub s_u: usize,
    /// Shadow reach.
    pub rho_u: usize,
    /// Source cop speed.
    pub s_g: usize,
    /// Source cop reach.
    pub rho_g: usize,
    /// Target robber speed.
    pub s_star: usize,
}

impl TransferConstants {
    pub fn shadow_speed(c: usize, s: usize) -> usize {
        500 * c.pow(3) * s
    }

    pub fn shadow_reach(c: usize, rho: usize) -> usize {
        2 * rho + c + 16 * c.pow(3) * (rho + c)
    }

    pub fn source_speed(c: usize, s: usize) -> usize {
        c * Self::shadow_speed(c, s) + c * c
    }

    pub fn source_reach(c: usize, rho: usize) -> usize {
        c * Self::shadow_reach(c, rho) + c * c
    }

    pub fn lifted_speed(c: usize, s_r: usize) -> usize {
        5 * c.pow(3) * s_r
    }

    pub fn new(c: usize, s: usize, rho: usize, s_r: usize) -> Self {
        TransferConstants {
            c,
            s,
            rho,
            s_r,
            s_u: Self::shadow_speed(c, s),
            rho_u: Self::shadow_reach(c, rho),
            s_g: Self::source_speed(c, s),
            rho_g: Self::source_reach(c, rho),
            s_star: Self::lifted_speed(c, s_r),
        }
    }

    /// Distance from the image below which a cop counts as close.
    pub fn close(&self) -> usize {
        32 * self.s
    }

    /// Distance from the shadow below which a relocation is made in one step.
    pub fn near(&self) -> usize {
        100 * self.s
    }

    /// Factor in the shadow-distance rule.
    pub fn r2_factor(&self) -> usize {
        16 * self.c.pow(3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShadowClass {
    /// Cop within `32s` of the image and the shadow among its nearest image vertices.
    Safe1,
    /// Cop far from the image, joined to `witness` by a short path staying far from it,
    /// with the shadow among the nearest image vertices of `witness`.
    Safe2 { witness: Vertex },
    /// Shadow on its way along a relocation walk.
    Transitioning { witness: Vertex, target: Vertex, rest: Vec<Vertex>, steps: usize, step_bound: usize },
}

impl ShadowClass {
    fn tag(&self) -> u64 {
        match self {
            ShadowClass::Safe1 => 1,
            ShadowClass::Safe2 { .. } => 2,
            ShadowClass::Transitioning { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowCase {
    Stay,
    Near,
    Far,
    Continue,
}

/// What happened to one shadow in one stage.
#[derive(Debug, Clone)]
pub struct ShadowStep {
    pub case: ShadowCase,
    pub walk: Vec<Vertex>,
    pub arrived: bool,
    /// The relocation needed more steps than the schedule bound allows.
    pub extra_step: bool,
    pub failures: Vec<String>,
}

/// A real cop in the target graph and its shadow in the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualCop {
    pub real: Vertex,
    pub shadow: Vertex,
    pub class: ShadowClass,
}

fn dist(g: &Graph, a: Vertex, b: Vertex, cap: usize) -> Option<usize> {
    g.dist_capped(a, b, cap).ok().and_then(|d| d.finite())
}

impl VirtualCop {
    pub fn new(emb: &QiEmbedding, k: &TransferConstants, v: Vertex) -> Self {
        let shadow = emb.project(v)[0];
        let class = if emb.dist_to_image(v) <= k.close() { ShadowClass::Safe1 } else { ShadowClass::Safe2 { witness: v } };
        VirtualCop { real: v, shadow, class }
    }

    fn in_projection(emb: &QiEmbedding, w: Vertex, u: Vertex) -> bool {
        emb.project(w).binary_search(&u).is_ok()
    }

    /// Safe class of `(v, u)`, trying each candidate witness.
    pub fn classify(emb: &QiEmbedding, k: &TransferConstants, v: Vertex, u: Vertex, witnesses: &[Vertex]) -> Option<ShadowClass> {
        if emb.dist_to_image(v) <= k.close() {
            return Self::in_projection(emb, v, u).then_some(ShadowClass::Safe1);
        }
        for &w in witnesses {
            if !Self::in_projection(emb, w, u) {
                continue;
            }
            let budget = emb.dist_to_image(w) / 4;
            let far = |x: Vertex| emb.dist_to_image(x) > k.close();
            if emb.target.shortest_path_where(w, budget, far, |x| x == v).is_some() {
                return Some(ShadowClass::Safe2 { witness: w });
            }
        }
        None
    }

    /// Checks the distance rule: every nearest image vertex `w` of the cop has
    /// `d(shadow, w) <= 16 c^3 d(cop, w)`.
    pub fn check_r2(emb: &QiEmbedding, k: &TransferConstants, v: Vertex, u: Vertex) -> Result<(), String> {
        for w in emb.project(v) {
            let dvw = emb.dist_to_image(v);
            let bound = k.r2_factor() * dvw;
            if dist(&emb.target, u, w, bound).is_none() {
                return Err(format!("shadow {} farther than {} from nearest image vertex {} of cop {}", u, bound, w, v));
            }
        }
        Ok(())
    }

    /// Image-neighbourhood vertices within `rho` of the cop that are farther than `rho_u` from the shadow.
    pub fn transfer_failures(emb: &QiEmbedding, k: &TransferConstants, v: Vertex, u: Vertex) -> (usize, Vec<Vertex>) {
        let from_shadow = emb.target.multi_source_dist_capped(&[u], k.rho_u).unwrap_or_default();
        let near_cop = emb.target.multi_source_dist_capped(&[v], k.rho).unwrap_or_default();
        let mut checked = 0;
        let mut bad: Vec<Vertex> = Vec::new();
        for &x in near_cop.keys() {
            if emb.near_image(x) {
                checked += 1;
                if !from_shadow.contains_key(&x) {
                    bad.push(x);
                }
            }
        }
        bad.sort_unstable();
        (checked, bad)
    }

    fn check_walk(emb: &QiEmbedding, k: &TransferConstants, from: Vertex, walk: &[Vertex], failures: &mut Vec<String>) {
        if walk.first() != Some(&from) || !emb.target.is_walk(walk) {
            failures.push(format!("shadow walk {:?} does not start at {}", walk.first(), from));
        }
        if walk.len() - 1 > k.s_u {
            failures.push(format!("shadow moved {} > {}", walk.len() - 1, k.s_u));
        }
        if let Some(&x) = walk.iter().find(|&&x| !emb.near_image(x)) {
            failures.push(format!("shadow walk leaves the image neighbourhood at {}", x));
        }
        if !emb.in_image(*walk.last().unwrap()) {
            failures.push(format!("shadow move ends outside the image at {}", walk.last().unwrap()));
        }
    }

    /// Greedy prefix of `rest` (which starts at the shadow) of length at most `s_u` ending in the image.
    fn greedy_step(emb: &QiEmbedding, k: &TransferConstants, rest: &[Vertex]) -> Option<usize> {
        let limit = k.s_u.min(rest.len() - 1);
        (1..=limit).rev().find(|&j| emb.in_image(rest[j]))
    }

    /// Updates the shadow after the real cop moved to `v`.
    pub fn step(&mut self, emb: &QiEmbedding, k: &TransferConstants, v: Vertex) -> ShadowStep {
        let u0 = self.shadow;
        let v0 = self.real;
        self.real = v;
        let mut out = ShadowStep { case: ShadowCase::Stay, walk: vec![u0], arrived: false, extra_step: false, failures: Vec::new() };
        let mut relocate = true;

        if let ShadowClass::Transitioning { witness, target, rest, steps, step_bound } = &mut self.class {
            out.case = ShadowCase::Continue;
            relocate = false;
            match Self::greedy_step(emb, k, rest) {
                Some(j) => {
                    out.walk = rest[..=j].to_vec();
                    rest.drain(..j);
                    *steps += 1;
                    if *steps > *step_bound {
                        out.extra_step = true;
                    }
                }
                None => out.failures.push(format!("no image vertex within {} along the relocation walk", k.s_u)),
            }
            if rest.len() == 1 {
                out.arrived = true;
                let (w, t) = (*witness, *target);
                self.shadow = t;
                match Self::classify(emb, k, v, t, &[w, v]) {
                    Some(c) => self.class = c,
                    None => {
                        out.failures.push(format!("cop {} and shadow {} not in a safe state after relocating", v, t));
                        self.class = ShadowClass::Safe2 { witness: w };
                    }
                }
            } else {
                self.shadow = rest[0];
            }
        } else {
            let witnesses: Vec<Vertex> = match self.class {
                ShadowClass::Safe2 { witness } => vec![witness, v],
                _ => vec![v],
            };
            if let Some(c) = Self::classify(emb, k, v, u0, &witnesses) {
                self.class = c;
                relocate = false;
            }
        }

        if relocate {
            let u = emb.project(v)[0];
            let d_vu0 = dist(&emb.target, v, u0, k.near());
            let prior_witness = match self.class {
                ShadowClass::Safe2 { witness } => Some(witness),
                _ => None,
            };
            let d_u0u = dist(&emb.target, u0, u, usize::MAX).unwrap_or(usize::MAX);
            let Some((walk, segments)) = emb.image_walk(u0, u) else {
                out.failures.push(format!("no image walk from {} to {}", u0, u));
                return out;
            };
            if segments > emb.c * d_u0u + emb.c * emb.c {
                out.failures.push(format!("image walk has {} segments for distance {}", segments, d_u0u));
            }
            let c3 = emb.c.pow(3);
            match (d_vu0, prior_witness) {
                (Some(_), _) | (None, None) => {
                    if d_vu0.is_none() {
                        out.failures.push(format!("far move of cop {} -> {} without a far witness", v0, v));
                    }
                    out.case = ShadowCase::Near;
                    let bound = 400 * emb.c * emb.c * k.s + 2 * c3;
                    if walk.len() - 1 > bound {
                        out.failures.push(format!("near relocation of length {} exceeds {}", walk.len() - 1, bound));
                    }
                    if walk.len() - 1 > k.s_u {
                        relocate_in_steps(self, emb, k, walk, v, 0, &mut out);
                    } else {
                        out.walk = walk;
                        self.shadow = u;
                        self.class = Self::classify(emb, k, v, u, &[v]).unwrap_or(ShadowClass::Safe2 { witness: v });
                    }
                }
                (None, Some(w0)) => {
                    out.case = ShadowCase::Far;
                    let a = dist(&emb.target, u0, w0, usize::MAX).unwrap_or(0);
                    if a < 79 * k.s {
                        out.failures.push(format!("far move with witness distance {} below {}", a, 79 * k.s));
                    }
                    let bound = c3 * (5 * a + 6 * k.s);
                    if walk.len() - 1 > bound {
                        out.failures.push(format!("far relocation of length {} exceeds {}", walk.len() - 1, bound));
                    }
                    let schedule = (5 * a + 6 * k.s).div_ceil(498 * k.s);
                    if 40 * k.s * schedule > a {
                        out.failures.push(format!("schedule of {} steps exceeds a fortieth of {}", schedule, a));
                    }
                    relocate_in_steps(self, emb, k, walk, v, schedule, &mut out);
                }
            }
        }

        Self::check_walk(emb, k, u0, &out.walk, &mut out.failures);
        if let Err(e) = Self::check_r2(emb, k, v, self.shadow) {
            out.failures.push(e);
        }
        out
    }
}

fn relocate_in_steps(cop: &mut VirtualCop, emb: &QiEmbedding, k: &TransferConstants, walk: Vec<Vertex>, v: Vertex, bound: usize, out: &mut ShadowStep) {
    let target = *walk.last().unwrap();
    let Some(j) = VirtualCop::greedy_step(emb, k, &walk) else {
        out.failures.push(format!("no image vertex within {} along the relocation walk", k.s_u));
        return;
    };
    out.walk = walk[..=j].to_vec();
    out.extra_step = bound < 1;
    cop.shadow = walk[j];
    if j + 1 == walk.len() {
        out.arrived = true;
        cop.class = VirtualCop::classify(emb, k, v, target, &[v]).unwrap_or_else(|| {
            out.failures.push(format!("cop {} and shadow {} not in a safe state after relocating", v, target));
            ShadowClass::Safe2 { witness: v }
        });
    } else {
        cop.class = ShadowClass::Transitioning { witness: v, target, rest: walk[j..].to_vec(), steps: 1, step_bound: bound };
    }
}

/// Cops that cycle through fixed waypoints at full speed along lowest-id shortest paths.
#[derive(Debug, Clone)]
pub struct Wanderer {
    pub waypoints: Vec<Vec<Vertex>>,
    pub speed: usize,
    pub reach: usize,
    next: Vec<usize>,
    routes: Vec<Vec<Vertex>>,
}

impl Wanderer {
    pub fn new(waypoints: Vec<Vec<Vertex>>, speed: usize, reach: usize) -> Self {
        let next = waypoints.iter().map(|w| 1 % w.len().max(1)).collect();
        let routes = vec![Vec::new(); waypoints.len()];
        Wanderer { waypoints, speed, reach, next, routes }
    }

    /// `k` cops alternating between random image vertices and random vertices in the
    /// farthest band from the image, so they leave the image and come back.
    pub fn away_and_back(emb: &QiEmbedding, k: usize, legs: usize, speed: usize, reach: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = &emb.target;
        let top = (0..h.n()).map(|v| emb.dist_to_image(v)).max().unwrap_or(0);
        let far: Vec<Vertex> = (0..h.n()).filter(|&v| 10 * emb.dist_to_image(v) >= 7 * top).collect();
        let mut waypoints = Vec::new();
        for _ in 0..k {
            let mut w = Vec::new();
            for leg in 0..legs {
                let pool = if leg % 3 == 0 { emb.image() } else { far.as_slice() };
                w.push(*pool.choose(&mut rng).unwrap());
            }
            waypoints.push(w);
        }
        Wanderer::new(waypoints, speed, reach)
    }

    pub fn start(&self) -> Vec<Vertex> {
        self.waypoints.iter().map(|w| w[0]).collect()
    }

    pub fn advance(&mut self, h: &Graph, current: &[Vertex]) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(current.len());
        for (j, &c) in current.iter().enumerate() {
            let goal = self.waypoints[j][self.next[j]];
            let route = &mut self.routes[j];
            if route.first() != Some(&c) || route.last() != Some(&goal) {
                *route = h.shortest_path(c, goal, usize::MAX).unwrap_or_else(|| vec![c]);
            }
            let idx = self.speed.min(route.len() - 1);
            if idx == route.len() - 1 {
                self.next[j] = (self.next[j] + 1) % self.waypoints[j].len();
            }
            out.push(route[idx]);
            route.drain(..idx);
        }
        out
    }
}

impl CopAgent for Wanderer {
    fn name(&self) -> String {
        "wanderer".into()
    }

    fn count(&self) -> usize {
        self.waypoints.len()
    }

    fn speed(&mut self) -> usize {
        self.speed
    }

    fn reach(&mut self, _robber_speed: Option<usize>) -> usize {
        self.reach
    }

    fn place(&mut self, _g: &Graph, _params: &GameParams) -> Result<Vec<Vertex>, AgentError> {
        Ok(self.start())
    }

    fn step(&mut self, g: &Graph, _params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        Ok(self.advance(g, &state.cops))
    }

    fn memory(&self) -> Vec<u64> {
        self.next.iter().map(|&i| i as u64).collect()
    }
}

/// Tallies of a transfer simulation.
#[derive(Debug, Clone, Default)]
pub struct TransferReport {
    pub stages: usize,
    pub r1_checks: usize,
    pub r2_checks: usize,
    pub transfer_checks: usize,
    pub near_moves: usize,
    pub far_moves: usize,
    pub arrivals: usize,
    pub extra_steps: usize,
    pub max_far_from_image: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stages={} r1={} r2={} transfer={} near={} far={} arrivals={} extra_steps={} max_dist_to_image={} failures={}",
            self.stages,
            self.r1_checks,
            self.r2_checks,
            self.transfer_checks,
            self.near_moves,
            self.far_moves,
            self.arrivals,
            self.extra_steps,
            self.max_far_from_image,
            self.failure_count
        )?;
        for e in &self.failures {
            write!(f, "\n  {}", e)?;
        }
        Ok(())
    }
}

/// Moves the wanderers for `stages` stages, updating one shadow per cop and checking both
/// shadow rules and capture transfer after every move.
pub fn simulate_transfer(emb: &QiEmbedding, k: &TransferConstants, cops: &mut Wanderer, stages: usize) -> TransferReport {
    let mut report = TransferReport::default();
    let mut pos = cops.start();
    let mut shadows: Vec<VirtualCop> = pos.iter().map(|&v| VirtualCop::new(emb, k, v)).collect();
    let fail = |report: &mut TransferReport, stage: usize, msg: String| {
        report.failure_count += 1;
        if report.failures.len() < 10 {
            report.failures.push(format!("stage {}: {}", stage, msg));
        }
    };
    for (v, sc) in pos.iter().zip(&shadows) {
        if let Err(e) = VirtualCop::check_r2(emb, k, *v, sc.shadow) {
            fail(&mut report, 0, e);
        }
    }
    for stage in 1..=stages {
        pos = cops.advance(&emb.target, &pos);
        for (j, &v) in pos.iter().enumerate() {
            report.max_far_from_image = report.max_far_from_image.max(emb.dist_to_image(v));
            let st = shadows[j].step(emb, k, v);
            report.r1_checks += 1;
            report.r2_checks += 1;
            match st.case {
                ShadowCase::Near => report.near_moves += 1,
                ShadowCase::Far => report.far_moves += 1,
                _ => {}
            }
            report.arrivals += usize::from(st.arrived && st.case != ShadowCase::Near);
            report.extra_steps += usize::from(st.extra_step);
            for e in st.failures {
                fail(&mut report, stage, format!("cop {}: {}", j, e));
            }
            let (checked, bad) = VirtualCop::transfer_failures(emb, k, v, shadows[j].shadow);
            report.transfer_checks += checked;
            if let Some(x) = bad.first() {
                fail(&mut report, stage, format!("cop {} at {} reaches {} but shadow {} is farther than {}", j, v, x, shadows[j].shadow, k.rho_u));
            }
        }
        report.stages = stage;
    }
    report
}

/// Plays a source-graph robber strategy in the target graph through shadows of the cops.
pub struct LiftedRobber<A> {
    emb: Rc<QiEmbedding>,
    inner: A,
    cop_speed: usize,
    source_speed: usize,
    consts: Option<TransferConstants>,
    source_params: Option<GameParams>,
    shadows: Vec<VirtualCop>,
    position: Vertex,
    counters: Counters,
    notes: Vec<String>,
}

impl<A: RobberAgent> LiftedRobber<A> {
    pub fn new(emb: Rc<QiEmbedding>, inner: A) -> Self {
        LiftedRobber {
            emb,
            inner,
            cop_speed: 1,
            source_speed: 1,
            consts: None,
            source_params: None,
            shadows: Vec::new(),
            position: 0,
            counters: Counters::new(),
            notes: Vec::new(),
        }
    }

    /// Current position of the robber in the source graph.
    pub fn source_position(&self) -> Vertex {
        self.position
    }

    pub fn shadows(&self) -> &[VirtualCop] {
        &self.shadows
    }

    fn bump(&mut self, key: &str, by: u64) {
        *self.counters.entry(key.into()).or_insert(0) += by;
    }

    fn source_cops(&self) -> Vec<Vertex> {
        self.shadows.iter().map(|c| self.emb.preimage(c.shadow).unwrap()).collect()
    }

    fn map_objective(&self, obj: &Objective) -> Objective {
        let c = self.emb.c;
        match obj {
            Objective::ProtectBall { center, radius } => Objective::ProtectBall { center: self.emb.map[*center], radius: c * radius + c },
            Objective::Divergence { center } => Objective::Divergence { center: self.emb.map[*center] },
            Objective::ProtectFinite(set) => {
                let mut img: Vec<Vertex> = set.iter().map(|&x| self.emb.map[x]).collect();
                img.sort_unstable();
                img.dedup();
                Objective::ProtectFinite(img)
            }
        }
    }
}

impl<A: RobberAgent> RobberAgent for LiftedRobber<A> {
    fn name(&self) -> String {
        format!("lifted({})", self.inner.name())
    }

    fn speed(&mut self, _g: &Graph, cop_speed: usize, reach: Option<usize>) -> Result<usize, AgentError> {
        let c = self.emb.c;
        self.cop_speed = cop_speed;
        let s_g = TransferConstants::source_speed(c, cop_speed);
        self.source_speed = self.inner.speed(&self.emb.source, s_g, reach.map(|r| TransferConstants::source_reach(c, r)))?;
        Ok(TransferConstants::lifted_speed(c, self.source_speed))
    }

    fn objective(&mut self, _g: &Graph, cop_speed: usize, _robber_speed: usize, reach: usize) -> Result<Objective, AgentError> {
        let k = TransferConstants::new(self.emb.c, cop_speed, reach, self.source_speed);
        self.consts = Some(k);
        let obj = self.inner.objective(&self.emb.source, k.s_g, k.s_r, k.rho_g)?;
        let lifted = self.map_objective(&obj);
        self.source_params = Some(GameParams {
            cops: 0,
            cop_speed: k.s_g,
            robber_speed: k.s_r,
            reach: k.rho_g,
            objective: obj,
            order: crate::game::Order::Weak,
        });
        Ok(lifted)
    }

    fn place(&mut self, _g: &Graph, params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        let k = self.consts.ok_or_else(|| AgentError::Config("objective not negotiated".into()))?;
        self.shadows = cops.iter().map(|&v| VirtualCop::new(&self.emb, &k, v)).collect();
        let sp = self.source_params.as_mut().unwrap();
        sp.cops = cops.len();
        sp.order = params.order;
        let sp = sp.clone();
        let source_cops = self.source_cops();
        self.position = self.inner.place(&self.emb.source, &sp, &source_cops)?;
        Ok(self.emb.map[self.position])
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let k = self.consts.ok_or_else(|| AgentError::Config("objective not negotiated".into()))?;
        let before = self.source_cops();
        for j in 0..self.shadows.len() {
            let st = self.shadows[j].step(&self.emb, &k, state.cops[j]);
            self.bump("shadow_checks", 1);
            self.bump("extra_steps", u64::from(st.extra_step));
            if let Some(e) = st.failures.first() {
                return Err(AgentError::Invariant(format!("shadow of cop {}: {}", j, e)));
            }
            let (checked, bad) = VirtualCop::transfer_failures(&self.emb, &k, state.cops[j], self.shadows[j].shadow);
            self.bump("transfer_checks", checked as u64);
            if let Some(x) = bad.first() {
                return Err(AgentError::Invariant(format!("cop {} reaches {} but its shadow is farther than {}", j, x, k.rho_u)));
            }
        }
        let after = self.source_cops();
        let src = &self.emb.source;
        for (a, b) in before.iter().zip(&after) {
            if dist(src, *a, *b, k.s_g).is_none() {
                return Err(AgentError::Invariant(format!("source cop moved {} -> {} farther than {}", a, b, k.s_g)));
            }
        }
        let sp = self.source_params.clone().unwrap();
        if crate::game::threat(src, &after, self.position, k.rho_g).is_some() {
            self.bump("virtual_captures", 1);
            self.notes.push(format!("stage {}: source strategy captured at {}", state.stage, self.position));
            return Ok(vec![state.robber]);
        }
        let sstate = GameState { stage: state.stage, cops: after.clone(), robber: self.position, phase: Phase::RobberToMove, status: Status::Running };
        let route = self.inner.step(src, &sp, &sstate)?;
        validate_robber_path(src, &after, self.position, &route, k.s_r, k.rho_g)
            .map_err(|e| AgentError::Invariant(format!("source strategy move illegal: {}", e)))?;
        let (walk, _) = self.emb.realize(&route).ok_or_else(|| AgentError::Invariant("unrealizable source move".into()))?;
        if walk.len() - 1 > k.s_star {
            return Err(AgentError::Invariant(format!("lifted move of length {} exceeds {}", walk.len() - 1, k.s_star)));
        }
        validate_robber_path(g, &state.cops, state.robber, &walk, params.robber_speed, params.reach)
            .map_err(|e| AgentError::Invariant(format!("lifted move illegal in the target: {}", e)))?;
        self.position = *route.last().unwrap();
        self.bump("moves", 1);
        Ok(walk)
    }

    fn memory(&self) -> Vec<u64> {
        let mut m = vec![self.position as u64];
        for c in &self.shadows {
            m.push(c.shadow as u64);
            m.push(c.class.tag());
            match &c.class {
                ShadowClass::Safe2 { witness } => m.push(*witness as u64),
                ShadowClass::Transitioning { witness, rest, steps, .. } => {
                    m.extend([*witness as u64, rest.len() as u64, *steps as u64]);
                }
                ShadowClass::Safe1 => {}
            }
        }
        m.extend(self.inner.memory());
        m
    }

    fn notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn counters(&self) -> Counters {
        let mut c = self.counters.clone();
        for (key, v) in self.inner.counters() {
            c.insert(format!("source.{}", key), v);
        }
        c
    }
}
