use thiserror::Error;

use crate::coalition::{AgentId, Coalition};

/// Errors raised by game construction, analysis, and incentive synthesis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsnError {
    #[error("{table} table has no entry for coalition {coalition}")]
    MissingCoalition {
        table: &'static str,
        coalition: Coalition,
    },
    #[error("coalition {coalition} references agent {agent}, but the game has {n_agents} agents")]
    AgentCountMismatch {
        coalition: Coalition,
        agent: AgentId,
        n_agents: usize,
    },
    #[error("unknown agent {agent} in coalition {coalition} (roster has {n_agents} agents)")]
    UnknownAgent {
        coalition: Coalition,
        agent: AgentId,
        n_agents: usize,
    },
    #[error("{what} needs at most {bound} agents, got {n_agents}")]
    BoundExceeded {
        what: &'static str,
        n_agents: usize,
        bound: usize,
    },
    #[error("a game needs at least one agent")]
    EmptyRoster,
    #[error("roster mismatch: {left} agents vs {right} agents")]
    RosterMismatch { left: usize, right: usize },
    #[error("allocation has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid MC-Net rule: {0}")]
    InvalidRule(String),
    #[error("target group {0} must have at least two members")]
    TargetTooSmall(Coalition),
    #[error("epsilon must be strictly positive")]
    NonpositiveEpsilon,
    #[error(
        "promoted groups {first} and {second} overlap; promoted groups must be mutually exclusive"
    )]
    PolicyInvalid { first: Coalition, second: Coalition },
    #[error("invalid policy: {0}")]
    InvalidPolicyLabel(String),
    #[error("invalid exchange scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T, E = IsnError> = std::result::Result<T, E>;

/// Checks that every member of `s` is a valid id for an `n`-agent roster.
pub(crate) fn check_roster(s: Coalition, n: usize) -> Result<()> {
    match s.agents().find(|&a| a >= n) {
        Some(agent) => Err(IsnError::UnknownAgent {
            coalition: s,
            agent,
            n_agents: n,
        }),
        None => Ok(()),
    }
}
