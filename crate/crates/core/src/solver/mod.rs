//! Exact solving on finite instances: game arenas with Buchi and safety fixed points,
//! exact treewidth, havens and slim-triangle hyperbolicity.

pub mod agents;
pub mod arena;
pub mod haven;
pub mod hyperbolicity;
pub mod minimax;
pub mod product;
pub mod solve;
pub mod treewidth;

pub use agents::{match_cops, replay_strategies, ArenaCops, ArenaRobber, ReplayOutcome};
pub use arena::{arena_size, build_arena, Arena, ArenaState, StateId, DEFAULT_BUDGET};
pub use haven::{components_without, haven_of_order, touch, Haven, HavenKind, HAVEN_SEARCH_LIMIT};
pub use hyperbolicity::{delta_hyperbolicity_slim, geodesic_triangles, GeodesicTriangle, SlimDelta};
pub use minimax::{minimax_winners, visit_values};
pub use product::{best_response, BestResponseRobber, ProductArena};
pub use solve::{copwin, solve_buchi, solve_safety, solve_safety_within, target_states, winning_placements, Winner, WinningSets};
pub use treewidth::{from_elimination_order, treewidth_exact, TREEWIDTH_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("arena needs {states} states, budget is {budget}")]
    Budget { states: usize, budget: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("graph has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("cop agent failed while building the product arena: {0}")]
    Agent(String),
}

/// Turn-based game graph with capture sinks, as seen by the fixed-point solvers.
pub trait GameGraph {
    fn num_states(&self) -> usize;
    fn cops_to_move(&self, s: usize) -> bool;
    fn is_capture(&self, s: usize) -> bool;
    /// Cop-turn, non-capture states with the robber on an objective vertex.
    fn is_target(&self, s: usize) -> bool;
    fn for_each_successor(&self, s: usize, f: impl FnMut(usize));
    fn for_each_predecessor(&self, s: usize, f: impl FnMut(usize));

    fn successors(&self, s: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_successor(s, |t| out.push(t));
        out
    }
}
