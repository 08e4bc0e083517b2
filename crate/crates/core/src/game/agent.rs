use std::collections::BTreeMap;

use thiserror::Error;

use super::{GameParams, GameState, Objective};
use crate::graph::{Graph, Vertex};

/// Named tallies an agent reports about its own invariants.
pub type Counters = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    /// A property the strategy relies on failed during play.
    #[error("invariant failed: {0}")]
    Invariant(String),
    /// The agent cannot be used with this graph or these parameters.
    #[error("configuration: {0}")]
    Config(String),
}

pub trait CopAgent {
    fn name(&self) -> String;
    /// Number of cops this agent controls.
    fn count(&self) -> usize;
    fn speed(&mut self) -> usize;
    /// Reach choice. In the strong order the robber's speed is already known.
    fn reach(&mut self, robber_speed: Option<usize>) -> usize;
    fn place(&mut self, g: &Graph, params: &GameParams) -> Result<Vec<Vertex>, AgentError>;
    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError>;
    /// Whether moves are a function of the play so far and `memory()`.
    fn deterministic(&self) -> bool {
        true
    }
    /// Fingerprint of internal state that can influence future moves.
    fn memory(&self) -> Vec<u64> {
        Vec::new()
    }
    /// Annotations produced since the last call.
    fn notes(&mut self) -> Vec<String> {
        Vec::new()
    }
    fn counters(&self) -> Counters {
        Counters::new()
    }
}

pub trait RobberAgent {
    fn name(&self) -> String;
    /// Speed choice after seeing the cop speed (and the reach in the weak order).
    fn speed(&mut self, g: &Graph, cop_speed: usize, reach: Option<usize>) -> Result<usize, AgentError>;
    /// Objective choice once speeds and reach are fixed.
    fn objective(&mut self, g: &Graph, cop_speed: usize, robber_speed: usize, reach: usize) -> Result<Objective, AgentError>;
    fn place(&mut self, g: &Graph, params: &GameParams, cops: &[Vertex]) -> Result<Vertex, AgentError>;
    /// Path starting at the robber's vertex.
    fn step(&mut self, g: &Graph, params: &GameParams, state: &GameState) -> Result<Vec<Vertex>, AgentError>;
    fn deterministic(&self) -> bool {
        true
    }
    fn memory(&self) -> Vec<u64> {
        Vec::new()
    }
    fn notes(&mut self) -> Vec<String> {
        Vec::new()
    }
    fn counters(&self) -> Counters {
        Counters::new()
    }
}
