//! Room strategy for the robber on the square lattice.

use std::collections::HashMap;

use crate::game::{AgentError, Counters, GameParams, GameState, Objective, RobberAgent};
use crate::graph::{Graph, GridWindow, Vertex};

/// `2t+1` square rooms of side `5ρ(t+1)s` in a row, forming the box `B`, with
/// `t+1` horizontal corridors on the rows `5ρs·j` (`j = 0..=t`) of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomLayout {
    pub t: usize,
    pub s: usize,
    pub reach: usize,
    /// Lower-left corner of `B`.
    pub origin: (i64, i64),
}

impl RoomLayout {
    pub fn new(t: usize, s: usize, reach: usize, origin: (i64, i64)) -> Self {
        RoomLayout { t, s, reach, origin }
    }

    pub fn side(&self) -> i64 {
        (5 * self.reach * (self.t + 1) * self.s) as i64
    }

    pub fn rooms(&self) -> usize {
        2 * self.t + 1
    }

    pub fn robber_speed(t: usize, s: usize) -> usize {
        5 * (t + 1) * (2 * t + 1) * s
    }

    pub fn safe_threshold(&self) -> usize {
        (2 * self.reach + 1) * self.s
    }

    pub fn super_safe_threshold(&self) -> usize {
        (3 * self.reach + 1) * self.s
    }

    /// `[xmin, xmax] x [ymin, ymax]` of the box `B`.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let (x0, y0) = self.origin;
        (x0, x0 + self.rooms() as i64 * self.side() - 1, y0, y0 + self.side() - 1)
    }

    pub fn in_box(&self, x: i64, y: i64) -> bool {
        let (a, b, c, d) = self.bounds();
        x >= a && x <= b && y >= c && y <= d
    }

    pub fn room_of(&self, x: i64, y: i64) -> Option<usize> {
        if !self.in_box(x, y) {
            return None;
        }
        Some(((x - self.origin.0) / self.side()) as usize)
    }

    pub fn room_center(&self, room: usize) -> (i64, i64) {
        let l = self.side();
        (self.origin.0 + room as i64 * l + l / 2, self.origin.1 + l / 2)
    }

    pub fn corridor_row(&self, j: usize) -> i64 {
        self.origin.1 + (5 * self.reach * self.s * j) as i64
    }

    /// Wall columns of room `from` facing `to`, and of `to` facing `from`.
    fn walls(&self, from: usize, to: usize) -> (i64, i64) {
        let l = self.side();
        let x0 = self.origin.0;
        if from < to {
            (x0 + (from as i64 + 1) * l - 1, x0 + to as i64 * l)
        } else {
            (x0 + from as i64 * l, x0 + (to as i64 + 1) * l - 1)
        }
    }

    /// Corridor `j` from room `from` to room `to`, as lattice points.
    pub fn corridor(&self, from: usize, to: usize, j: usize) -> Vec<(i64, i64)> {
        let (a, b) = self.walls(from, to);
        let y = self.corridor_row(j);
        let step = if a <= b { 1 } else { -1 };
        let mut out = Vec::new();
        let mut x = a;
        loop {
            out.push((x, y));
            if x == b {
                break;
            }
            x += step;
        }
        out
    }

    /// In-room path from `p` to the start of corridor `j`, moving vertically first.
    pub fn in_room_path(&self, p: (i64, i64), from: usize, to: usize, j: usize) -> Vec<(i64, i64)> {
        let (wall, _) = self.walls(from, to);
        let y = self.corridor_row(j);
        let mut out = vec![p];
        let (mut cx, mut cy) = p;
        while cy != y {
            cy += (y - cy).signum();
            out.push((cx, cy));
        }
        while cx != wall {
            cx += (wall - cx).signum();
            out.push((cx, cy));
        }
        out
    }

    /// Room exits: the corridor endpoints on the walls of `room`.
    pub fn exits(&self, room: usize) -> Vec<(i64, i64)> {
        let l = self.side();
        let left = self.origin.0 + room as i64 * l;
        let mut out = Vec::new();
        for j in 0..=self.t {
            let y = self.corridor_row(j);
            if room > 0 {
                out.push((left, y));
            }
            if room + 1 < self.rooms() {
                out.push((left + l - 1, y));
            }
        }
        out
    }

    /// Longest `Q + P_i` over all start points, room pairs and corridors.
    pub fn worst_route(&self) -> usize {
        let l = self.side();
        let mut worst = 0;
        for from in 0..self.rooms() {
            for to in 0..self.rooms() {
                if from == to {
                    continue;
                }
                for j in 0..=self.t {
                    let corridor = self.corridor(from, to, j).len() - 1;
                    let (wall, _) = self.walls(from, to);
                    let left = self.origin.0 + from as i64 * l;
                    // farthest in-room point from the corridor start is a corner
                    let y = self.corridor_row(j);
                    let far_x = (wall - left).abs().max((wall - (left + l - 1)).abs());
                    let far_y = (y - self.origin.1).abs().max((y - (self.origin.1 + l - 1)).abs());
                    worst = worst.max(corridor + (far_x + far_y) as usize);
                }
            }
        }
        worst
    }

    /// Minimum graph distance between distinct corridors joining the same two rooms,
    /// measured by BFS in `g` and capped at `5ρs`.
    pub fn min_corridor_gap(&self, g: &Graph, w: &GridWindow) -> Result<usize, AgentError> {
        let cap = 5 * self.reach * self.s;
        let mut best = cap;
        for from in 0..self.rooms() {
            for to in from + 1..self.rooms() {
                let paths: Vec<Vec<Vertex>> = (0..=self.t)
                    .map(|j| encode_all(w, &self.corridor(from, to, j)))
                    .collect::<Result<_, _>>()?;
                for a in 0..paths.len() {
                    let field = g.multi_source_dist_capped(&paths[a], cap).map_err(|e| AgentError::Config(e.to_string()))?;
                    for p in &paths[a + 1..] {
                        for v in p {
                            if let Some(&d) = field.get(v) {
                                best = best.min(d);
                            }
                        }
                    }
                }
            }
        }
        Ok(best)
    }
}

fn encode_all(w: &GridWindow, pts: &[(i64, i64)]) -> Result<Vec<Vertex>, AgentError> {
    pts.iter()
        .map(|&(x, y)| w.encode(x, y).ok_or_else(|| AgentError::Config(format!("({}, {}) is outside the window", x, y))))
        .collect()
}

/// Robber that waits in a safe room and relocates through a clear corridor to a
/// super-safe room over exactly `ρ` stages.
pub struct GridRobber {
    t: usize,
    origin: (i64, i64),
    layout: Option<RoomLayout>,
    window: Option<GridWindow>,
    /// Remaining relocation legs, each a path for one stage.
    plan: Vec<Vec<Vertex>>,
    notes: Vec<String>,
    counters: Counters,
}

impl GridRobber {
    pub fn new(t: usize, origin: (i64, i64)) -> Self {
        GridRobber { t, origin, layout: None, window: None, plan: Vec::new(), notes: Vec::new(), counters: Counters::new() }
    }

    pub fn layout(&self) -> Option<&RoomLayout> {
        self.layout.as_ref()
    }

    /// Window containing `B` with `margin` extra lattice points on every side.
    pub fn window_for(t: usize, s: usize, reach: usize, origin: (i64, i64), margin: i64) -> GridWindow {
        let (a, b, c, d) = RoomLayout::new(t, s, reach, origin).bounds();
        GridWindow { xmin: a - margin, xmax: b + margin, ymin: c - margin, ymax: d + margin }
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.to_string()).or_insert(0) += 1;
    }

    fn fail(&mut self, key: &str, msg: String) -> AgentError {
        self.bump(key);
        AgentError::Invariant(msg)
    }

    /// Distance from the cops to each room, capped at the super-safe threshold.
    fn room_distances(&self, g: &Graph, cops: &[Vertex]) -> (Vec<Option<usize>>, HashMap<Vertex, usize>) {
        let layout = self.layout.as_ref().unwrap();
        let w = self.window.unwrap();
        let cap = layout.super_safe_threshold();
        let mut per_room = vec![None; layout.rooms()];
        let field = if cops.is_empty() { HashMap::new() } else { g.multi_source_dist_capped(cops, cap).unwrap_or_default() };
        for (&v, &d) in &field {
            let (x, y) = w.decode(v);
            if let Some(r) = layout.room_of(x, y) {
                per_room[r] = Some(per_room[r].map_or(d, |old: usize| old.min(d)));
            }
        }
        (per_room, field)
    }
}

impl RobberAgent for GridRobber {
    fn name(&self) -> String {
        format!("grid-robber(t={})", self.t)
    }

    fn speed(&mut self, _g: &Graph, cop_speed: usize, _reach: Option<usize>) -> Result<usize, AgentError> {
        Ok(RoomLayout::robber_speed(self.t, cop_speed))
    }

    fn objective(&mut self, g: &Graph, cop_speed: usize, robber_speed: usize, reach: usize) -> Result<Objective, AgentError> {
        if reach < 1 {
            return Err(AgentError::Config("room strategy needs reach at least 1".into()));
        }
        let w = g.grid().ok_or_else(|| AgentError::Config("room strategy needs a grid window".into()))?;
        let layout = RoomLayout::new(self.t, cop_speed, reach, self.origin);
        let (a, b, c, d) = layout.bounds();
        if !(w.contains(a, c) && w.contains(b, d)) {
            return Err(AgentError::Config(format!("window does not contain the box [{},{}]x[{},{}]", a, b, c, d)));
        }
        if layout.worst_route() > reach * robber_speed {
            return Err(AgentError::Invariant(format!(
                "route of length {} exceeds {} stages at speed {}",
                layout.worst_route(),
                reach,
                robber_speed
            )));
        }
        let gap = layout.min_corridor_gap(g, &w)?;
        if gap < 5 * reach * cop_speed {
            return Err(AgentError::Invariant(format!("corridors only {} apart", gap)));
        }
        let center = layout.room_center(self.t);
        let radius = (layout.rooms() as i64 * layout.side()) as usize / 2 + layout.side() as usize / 2 + 2;
        self.layout = Some(layout);
        self.window = Some(w);
        Ok(Objective::ProtectBall { center: w.encode(center.0, center.1).unwrap(), radius })
    }

    fn place(&mut self, g: &Graph, _params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError> {
        let (per_room, _) = self.room_distances(g, cops);
        let layout = self.layout.clone().unwrap();
        let safe = (0..layout.rooms()).find(|&r| per_room[r].is_none_or(|d| d > layout.safe_threshold()));
        let Some(room) = safe else {
            return Err(self.fail("no_safe_room", "no safe room at placement".into()));
        };
        let (x, y) = layout.room_center(room);
        self.notes.push(format!("room={}", room));
        Ok(self.window.unwrap().encode(x, y).unwrap())
    }

    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError> {
        let layout = self.layout.clone().unwrap();
        let w = self.window.unwrap();
        let (per_room, field) = self.room_distances(g, &state.cops);
        let super_safe: Vec<usize> =
            (0..layout.rooms()).filter(|&r| per_room[r].is_none_or(|d| d > layout.super_safe_threshold())).collect();
        if super_safe.is_empty() {
            return Err(self.fail("super_safe_failures", format!("no super-safe room at stage {}", state.stage)));
        }
        if !self.plan.is_empty() {
            let leg = self.plan.remove(0);
            if let Some(&v) = leg.iter().find(|v| field.get(v).is_some_and(|&d| d <= params.reach)) {
                return Err(self.fail("corridor_failures", format!("relocation vertex {} within reach of a cop", v)));
            }
            return Ok(leg);
        }
        let (x, y) = w.decode(state.robber);
        let room = layout
            .room_of(x, y)
            .ok_or_else(|| self.fail("left_box", format!("robber at ({}, {}) outside the box", x, y)))?;
        if per_room[room].is_none_or(|d| d > layout.safe_threshold()) {
            self.bump("waits");
            return Ok(vec![state.robber]);
        }
        let target = super_safe[0];
        let clear = (0..=layout.t).find(|&j| {
            layout.corridor(room, target, j).iter().all(|&(cx, cy)| {
                let v = w.encode(cx, cy).unwrap();
                field.get(&v).is_none_or(|&d| d > 2 * layout.reach * layout.s)
            })
        });
        let Some(j) = clear else {
            return Err(self.fail("corridor_failures", format!("no clear corridor from room {} to {}", room, target)));
        };
        let mut pts = layout.in_room_path((x, y), room, target, j);
        pts.extend(layout.corridor(room, target, j).into_iter().skip(1));
        let route = encode_all(&w, &pts)?;
        let len = route.len() - 1;
        let stages = layout.reach;
        if len > stages * params.robber_speed {
            return Err(self.fail("route_too_long", format!("route of length {} over {} stages", len, stages)));
        }
        let cut = |m: usize| (m * len).div_ceil(stages);
        self.plan = (0..stages).map(|m| route[cut(m)..=cut(m + 1)].to_vec()).collect();
        self.bump("relocations");
        self.notes.push(format!("relocate from={} to={} corridor={}", room, target, j));
        let leg = self.plan.remove(0);
        if let Some(&v) = leg.iter().find(|v| field.get(v).is_some_and(|&d| d <= params.reach)) {
            return Err(self.fail("corridor_failures", format!("relocation vertex {} within reach of a cop", v)));
        }
        Ok(leg)
    }

    fn memory(&self) -> Vec<u64> {
        self.plan.iter().flat_map(|leg| leg.iter().map(|&v| v as u64).chain(std::iter::once(u64::MAX))).collect()
    }

    fn notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn counters(&self) -> Counters {
        self.counters.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_for_one_and_two_cops() {
        let l1 = RoomLayout::new(1, 1, 1, (0, 0));
        assert_eq!(RoomLayout::robber_speed(1, 1), 30);
        assert_eq!(l1.side(), 10);
        assert_eq!(l1.bounds(), (0, 29, 0, 9));
        assert_eq!((l1.safe_threshold(), l1.super_safe_threshold()), (3, 4));
        let l2 = RoomLayout::new(2, 1, 1, (0, 0));
        assert_eq!(RoomLayout::robber_speed(2, 1), 75);
        assert_eq!(l2.side(), 15);
        assert_eq!(l2.rooms(), 5);
    }

    #[test]
    fn routes_fit_in_reach_stages() {
        for t in 1..=3 {
            for s in 1..=2 {
                for reach in 1..=2 {
                    let l = RoomLayout::new(t, s, reach, (0, 0));
                    assert!(l.worst_route() <= reach * RoomLayout::robber_speed(t, s));
                }
            }
        }
    }

    #[test]
    fn corridors_are_far_apart() {
        let l = RoomLayout::new(2, 1, 1, (0, 0));
        let w = GridRobber::window_for(2, 1, 1, (0, 0), 3);
        let g = crate::graph::families::grid_window(w.xmin, w.xmax, w.ymin, w.ymax).unwrap();
        assert_eq!(l.min_corridor_gap(&g, &w).unwrap(), 5);
        for from in 0..l.rooms() {
            for to in 0..l.rooms() {
                if from != to {
                    for j in 0..=l.t {
                        assert!(l.corridor(from, to, j).iter().all(|&(x, y)| l.in_box(x, y)));
                    }
                }
            }
        }
    }
}
