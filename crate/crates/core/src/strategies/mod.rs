//! Robber and cop strategies.

pub mod cycle;
pub mod grid;
pub mod haven;
pub mod hub;
pub mod scripted;
pub mod td;

pub use cycle::CycleRobber;
pub use grid::{GridRobber, RoomLayout};
pub use haven::{HavenRobber, HavenStage};
pub use hub::{hub_branch_degree, HubRobber};
pub use scripted::{Placement, ScriptKind, ScriptedCops, TargetFn};
pub use td::TdCops;
