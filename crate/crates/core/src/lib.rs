//! Cops-and-robber pursuit games on graphs: a rule-exact game engine, the
//! constructive robber and cop strategies, an exact finite-arena solver and
//! checkers for coarse-geometric certificates.

pub mod graph;
pub mod game;
pub mod strategies;
pub mod solver;
pub mod geometry;
pub mod suite;
