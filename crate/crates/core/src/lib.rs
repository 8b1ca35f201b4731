//! Industrial symbiotic networks as cooperative games.
//!
//! Firms that exchange reusable resources form a transferable-utility game
//! whose value is the cost they save together. The crate builds those games
//! (from cost tables or firm-level exchange data), represents them as basic
//! MC-Nets, computes the Shapley value and the core exactly, and synthesizes
//! subsidy/tax rules that make policy-promoted groups implementable (Shapley
//! allocation in the core) and prohibited groups unprofitable.
//!
//! All arithmetic is exact rational arithmetic via [`Money`].

pub mod coalition;
pub mod coordination;
pub mod cost;
pub mod error;
pub mod game;
pub mod lp;
pub mod mcnet;
pub mod money;
pub mod report;
pub mod scenario;
pub mod solutions;

pub use coalition::{AgentId, Coalition};
pub use coordination::{
    classify, coordinate, enforce_policy, incentive_value, synthesize_prohibition,
    synthesize_promotion, validate_policy, CoordinatedGame, Policy, PolicyLabel, PolicyVerdict,
    Promotion,
};
pub use cost::{
    optimal_exchange_plan, scenario_to_game, t_value, ExchangePlan, ExchangeScenario,
    ResourceStream, Shipment, StreamKind,
};
pub use error::{IsnError, Result};
pub use game::{check_superadditive, make_isn_game, IsnGame, Subgame, Superadditivity, TuGame};
pub use mcnet::{
    applicable, compose, evaluate, from_isn_game, net_shapley, rule_shapley, McNet, McNetRule,
};
pub use money::Money;
pub use solutions::{
    core_nonempty, in_core, is_implementable, shapley, shapley_bruteforce, Allocation, CoreResult,
};
