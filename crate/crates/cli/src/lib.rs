//! Command implementations behind the `pursuit` binary.

pub mod commands;
pub mod config;
pub mod graphspec;
pub mod play;

use std::fmt;

/// Bad input: unknown keys, malformed values, unusable agent or graph choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line in the config file, 0 when not tied to a line.
    pub line: usize,
    pub msg: String,
}

impl ConfigError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ConfigError { line, msg: msg.into() }
    }

    pub fn at(mut self, line: usize) -> Self {
        if self.line == 0 {
            self.line = line;
        }
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.msg)
        } else {
            f.write_str(&self.msg)
        }
    }
}

impl std::error::Error for ConfigError {}

/// How a command ended; maps onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// A checked property failed.
    Invariant,
    /// No verdict could be reached (horizon, budget, bracket).
    Inconclusive,
    ConfigFault,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Invariant => 2,
            Outcome::Inconclusive => 3,
            Outcome::ConfigFault => 4,
        }
    }

    fn severity(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Inconclusive => 1,
            Outcome::ConfigFault => 2,
            Outcome::Invariant => 3,
        }
    }

    /// The more severe of two outcomes; invariant failures dominate.
    pub fn worst(self, other: Outcome) -> Outcome {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}
