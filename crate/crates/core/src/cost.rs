//! Firm-level cost model behind `T(S)` and `O(S)`.
//!
//! Firms offer waste streams (otherwise discharged at a per-unit cost) and
//! demand input streams (otherwise purchased at a per-unit cost). Inside a
//! coalition, waste of firm `a` can replace input of firm `b` for the same
//! resource, paying treatment on both streams plus transport per unit, and a
//! fixed transaction cost once per ordered firm pair that actually ships.
//!
//! `T(S)` is what the coalition's firms pay with no exchange. `O(S)` is the
//! cheapest total cost over exchange plans inside `S`: a fixed-charge
//! transportation problem, solved exactly by branch and bound over the set of
//! activated firm pairs with an exact LP for the flows of each pair set.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coalition::{AgentId, Coalition};
use crate::error::{IsnError, Result};
use crate::game::{check_bound, IsnGame, ENUMERATION_BOUND};
use crate::lp::{LinearProgram, Relation};
use crate::money::Money;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamKind {
    /// Waste the firm would otherwise discharge.
    Offer { unit_discharge_cost: Money },
    /// Input the firm would otherwise buy.
    Demand { unit_purchase_cost: Money },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceStream {
    pub firm: AgentId,
    pub resource: String,
    #[serde(flatten)]
    pub kind: StreamKind,
    pub quantity: Money,
    /// Per-unit cost of making exchanged material usable, charged on every
    /// shipped unit that leaves (offer) or enters (demand) this stream.
    pub unit_treatment_cost: Money,
}

impl ResourceStream {
    pub fn offer(
        firm: AgentId,
        resource: &str,
        quantity: Money,
        discharge: Money,
        treatment: Money,
    ) -> Self {
        ResourceStream {
            firm,
            resource: resource.to_string(),
            kind: StreamKind::Offer {
                unit_discharge_cost: discharge,
            },
            quantity,
            unit_treatment_cost: treatment,
        }
    }

    pub fn demand(
        firm: AgentId,
        resource: &str,
        quantity: Money,
        purchase: Money,
        treatment: Money,
    ) -> Self {
        ResourceStream {
            firm,
            resource: resource.to_string(),
            kind: StreamKind::Demand {
                unit_purchase_cost: purchase,
            },
            quantity,
            unit_treatment_cost: treatment,
        }
    }

    /// Discharge cost for offers, purchase cost for demands.
    pub fn unit_standalone_cost(&self) -> &Money {
        match &self.kind {
            StreamKind::Offer {
                unit_discharge_cost,
            } => unit_discharge_cost,
            StreamKind::Demand { unit_purchase_cost } => unit_purchase_cost,
        }
    }

    pub fn is_offer(&self) -> bool {
        matches!(self.kind, StreamKind::Offer { .. })
    }
}

/// Exchange data for a roster of firms.
///
/// An exchange `a → b` of resource `r` is possible only if a transport cost
/// for `(a, b, r)` is given. A missing transaction cost for `(a, b)` is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeScenario {
    n_agents: usize,
    streams: Vec<ResourceStream>,
    transport: BTreeMap<(AgentId, AgentId, String), Money>,
    transaction: BTreeMap<(AgentId, AgentId), Money>,
}

impl ExchangeScenario {
    pub fn new(
        n_agents: usize,
        streams: Vec<ResourceStream>,
        transport: BTreeMap<(AgentId, AgentId, String), Money>,
        transaction: BTreeMap<(AgentId, AgentId), Money>,
    ) -> Result<Self> {
        if n_agents == 0 {
            return Err(IsnError::EmptyRoster);
        }
        let bad = |msg: String| Err(IsnError::InvalidScenario(msg));
        for (k, st) in streams.iter().enumerate() {
            if st.firm >= n_agents {
                return bad(format!("stream {k} belongs to unknown firm {}", st.firm));
            }
            if st.quantity.is_negative() {
                return bad(format!("stream {k} has negative quantity"));
            }
            if st.unit_standalone_cost().is_negative() || st.unit_treatment_cost.is_negative() {
                return bad(format!("stream {k} has a negative cost"));
            }
        }
        for ((a, b, r), cost) in &transport {
            if *a >= n_agents || *b >= n_agents {
                return bad(format!(
                    "transport {a}->{b} ({r}) references an unknown firm"
                ));
            }
            if cost.is_negative() {
                return bad(format!("transport {a}->{b} ({r}) has a negative cost"));
            }
        }
        for ((a, b), cost) in &transaction {
            if *a >= n_agents || *b >= n_agents {
                return bad(format!("transaction {a}->{b} references an unknown firm"));
            }
            if cost.is_negative() {
                return bad(format!("transaction {a}->{b} has a negative cost"));
            }
        }
        Ok(ExchangeScenario {
            n_agents,
            streams,
            transport,
            transaction,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn streams(&self) -> &[ResourceStream] {
        &self.streams
    }

    pub fn transport_cost(&self, from: AgentId, to: AgentId, resource: &str) -> Option<&Money> {
        self.transport.get(&(from, to, resource.to_string()))
    }

    pub fn transaction_cost(&self, from: AgentId, to: AgentId) -> Money {
        self.transaction
            .get(&(from, to))
            .cloned()
            .unwrap_or_default()
    }

    /// A copy with one more stream.
    pub fn with_stream(&self, stream: ResourceStream) -> Result<Self> {
        let mut streams = self.streams.clone();
        streams.push(stream);
        ExchangeScenario::new(
            self.n_agents,
            streams,
            self.transport.clone(),
            self.transaction.clone(),
        )
    }

    /// Per-unit gain of shipping from `offer` to `demand`, if the exchange is
    /// possible at all.
    fn unit_saving(&self, offer: usize, demand: usize) -> Option<Money> {
        let (o, d) = (&self.streams[offer], &self.streams[demand]);
        if !o.is_offer() || d.is_offer() || o.firm == d.firm || o.resource != d.resource {
            return None;
        }
        let transport = self.transport_cost(o.firm, d.firm, &o.resource)?;
        Some(
            o.unit_standalone_cost() + d.unit_standalone_cost()
                - &o.unit_treatment_cost
                - &d.unit_treatment_cost
                - transport,
        )
    }
}

/// One flow of material between two streams.
///
/// Field order defines the deterministic ordering of plans.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Shipment {
    pub from: AgentId,
    pub to: AgentId,
    pub resource: String,
    /// Index of the offer stream.
    pub offer: usize,
    /// Index of the demand stream.
    pub demand: usize,
    pub quantity: Money,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExchangePlan {
    pub shipments: Vec<Shipment>,
}

impl ExchangePlan {
    pub fn is_empty(&self) -> bool {
        self.shipments.is_empty()
    }

    /// Checks stream capacities, resource matching, and that both endpoints
    /// are inside `s`.
    pub fn validate(&self, scenario: &ExchangeScenario, s: Coalition) -> Result<()> {
        let bad = |msg: String| Err(IsnError::InvalidScenario(msg));
        let mut used = vec![Money::zero(); scenario.streams.len()];
        for sh in &self.shipments {
            let (Some(o), Some(d)) = (
                scenario.streams.get(sh.offer),
                scenario.streams.get(sh.demand),
            ) else {
                return bad(format!(
                    "shipment references unknown stream {}/{}",
                    sh.offer, sh.demand
                ));
            };
            if !s.contains(sh.from) || !s.contains(sh.to) {
                return bad(format!(
                    "shipment {}->{} leaves coalition {s}",
                    sh.from, sh.to
                ));
            }
            if o.firm != sh.from
                || d.firm != sh.to
                || o.resource != sh.resource
                || d.resource != sh.resource
            {
                return bad(format!(
                    "shipment {}->{} does not match its streams",
                    sh.from, sh.to
                ));
            }
            if scenario.unit_saving(sh.offer, sh.demand).is_none() {
                return bad(format!(
                    "exchange {}->{} of {} is not possible",
                    sh.from, sh.to, sh.resource
                ));
            }
            if sh.quantity.is_negative() {
                return bad("negative shipment".into());
            }
            used[sh.offer] += &sh.quantity;
            used[sh.demand] += &sh.quantity;
        }
        for (k, st) in scenario.streams.iter().enumerate() {
            if used[k] > st.quantity {
                return bad(format!("stream {k} over capacity"));
            }
        }
        Ok(())
    }

    /// Total cost of running this plan inside `s`: treatment and transport
    /// on shipped units, transaction costs for pairs that ship, and the
    /// standalone cost of every unshipped unit.
    pub fn cost(&self, scenario: &ExchangeScenario, s: Coalition) -> Money {
        let mut shipped = vec![Money::zero(); scenario.streams.len()];
        let mut pairs = std::collections::BTreeSet::new();
        let mut total = Money::zero();
        for sh in &self.shipments {
            if !sh.quantity.is_positive() {
                continue;
            }
            let (o, d) = (&scenario.streams[sh.offer], &scenario.streams[sh.demand]);
            let transport = scenario
                .transport_cost(sh.from, sh.to, &sh.resource)
                .cloned()
                .unwrap_or_default();
            total += &sh.quantity * (&o.unit_treatment_cost + &d.unit_treatment_cost + transport);
            shipped[sh.offer] += &sh.quantity;
            shipped[sh.demand] += &sh.quantity;
            pairs.insert((sh.from, sh.to));
        }
        for (a, b) in pairs {
            total += scenario.transaction_cost(a, b);
        }
        for (k, st) in scenario.streams.iter().enumerate() {
            if s.contains(st.firm) {
                total += (&st.quantity - &shipped[k]) * st.unit_standalone_cost();
            }
        }
        total
    }
}

/// Cost the coalition's firms pay without any exchange.
pub fn t_value(scenario: &ExchangeScenario, s: Coalition) -> Money {
    scenario
        .streams
        .iter()
        .filter(|st| s.contains(st.firm))
        .map(|st| &st.quantity * st.unit_standalone_cost())
        .sum()
}

struct Edge {
    offer: usize,
    demand: usize,
    pair: usize,
    saving: Money,
}

struct PlanSearch<'a> {
    scenario: &'a ExchangeScenario,
    edges: Vec<Edge>,
    pairs: Vec<(AgentId, AgentId)>,
    fixed: Vec<Money>,
    best_net: Money,
    best: Vec<Shipment>,
}

impl PlanSearch<'_> {
    /// Maximum gross saving using only edges whose pair is allowed, with the
    /// per-edge flows.
    fn flows(&self, allowed: &[bool]) -> (Money, Vec<(usize, Money)>) {
        let active: Vec<usize> = (0..self.edges.len())
            .filter(|&e| allowed[self.edges[e].pair])
            .collect();
        if active.is_empty() {
            return (Money::zero(), Vec::new());
        }
        let mut lp = LinearProgram::maximize(
            active
                .iter()
                .map(|&e| self.edges[e].saving.clone())
                .collect(),
        );
        let mut streams: Vec<usize> = active
            .iter()
            .flat_map(|&e| [self.edges[e].offer, self.edges[e].demand])
            .collect();
        streams.sort_unstable();
        streams.dedup();
        for k in streams {
            let row = active
                .iter()
                .map(|&e| {
                    let touches = self.edges[e].offer == k || self.edges[e].demand == k;
                    Money::from_integer(touches as i64)
                })
                .collect();
            lp.add(row, Relation::Le, self.scenario.streams[k].quantity.clone());
        }
        let sol = lp
            .solve()
            .optimal()
            .expect("capacity-bounded transport LP has an optimum");
        let flows = active
            .into_iter()
            .zip(sol.x)
            .filter(|(_, q)| q.is_positive())
            .collect();
        (sol.objective, flows)
    }

    fn explore(&mut self, idx: usize, chosen: &mut Vec<bool>) {
        let allowed: Vec<bool> = (0..self.pairs.len())
            .map(|p| chosen[p] || p >= idx)
            .collect();
        let (gross, flows) = self.flows(&allowed);
        let committed: Money = (0..idx)
            .filter(|&p| chosen[p])
            .map(|p| &self.fixed[p])
            .sum();
        if gross - committed < self.best_net {
            return;
        }
        if idx < self.pairs.len() {
            chosen[idx] = true;
            self.explore(idx + 1, chosen);
            chosen[idx] = false;
            self.explore(idx + 1, chosen);
            return;
        }
        let mut used = vec![false; self.pairs.len()];
        let mut gross = Money::zero();
        let mut shipments = Vec::with_capacity(flows.len());
        for (e, q) in flows {
            let edge = &self.edges[e];
            used[edge.pair] = true;
            gross += &edge.saving * &q;
            let (from, to) = self.pairs[edge.pair];
            shipments.push(Shipment {
                from,
                to,
                resource: self.scenario.streams[edge.offer].resource.clone(),
                offer: edge.offer,
                demand: edge.demand,
                quantity: q,
            });
        }
        let fixed: Money = (0..self.pairs.len())
            .filter(|&p| used[p])
            .map(|p| &self.fixed[p])
            .sum();
        let net = gross - fixed;
        shipments.sort();
        if net > self.best_net || (net == self.best_net && shipments < self.best) {
            self.best_net = net;
            self.best = shipments;
        }
    }
}

/// Cheapest exchange plan inside `s` and its total cost `O(S)`.
///
/// Among equally cheap plans found, the one with the lexicographically
/// smallest sorted shipment list wins; the empty plan beats any tie.
pub fn optimal_exchange_plan(scenario: &ExchangeScenario, s: Coalition) -> (ExchangePlan, Money) {
    let members: Vec<usize> = (0..scenario.streams.len())
        .filter(|&k| s.contains(scenario.streams[k].firm))
        .collect();
    let mut pair_index: BTreeMap<(AgentId, AgentId), usize> = BTreeMap::new();
    let mut raw_edges = Vec::new();
    for &o in &members {
        for &d in &members {
            let Some(saving) = scenario.unit_saving(o, d) else {
                continue;
            };
            let (so, sd) = (&scenario.streams[o], &scenario.streams[d]);
            if saving.is_positive() && so.quantity.is_positive() && sd.quantity.is_positive() {
                pair_index.insert((so.firm, sd.firm), 0);
                raw_edges.push((o, d, (so.firm, sd.firm), saving));
            }
        }
    }
    for (k, idx) in pair_index.values_mut().enumerate() {
        *idx = k;
    }
    let pairs: Vec<(AgentId, AgentId)> = pair_index.keys().copied().collect();
    let fixed = pairs
        .iter()
        .map(|&(a, b)| scenario.transaction_cost(a, b))
        .collect();
    let edges = raw_edges
        .into_iter()
        .map(|(offer, demand, pair, saving)| Edge {
            offer,
            demand,
            pair: pair_index[&pair],
            saving,
        })
        .collect();

    let mut search = PlanSearch {
        scenario,
        edges,
        pairs,
        fixed,
        best_net: Money::zero(),
        best: Vec::new(),
    };
    let mut chosen = vec![false; search.pairs.len()];
    search.explore(0, &mut chosen);

    let o = t_value(scenario, s) - &search.best_net;
    (
        ExchangePlan {
            shipments: search.best,
        },
        o,
    )
}

pub fn scenario_to_game(scenario: &ExchangeScenario) -> Result<IsnGame> {
    scenario_to_game_with_bound(scenario, ENUMERATION_BOUND)
}

/// `v(S) = T(S) - O(S)` for every coalition, computed in parallel. `bound`
/// may only lower the default enumeration limit.
pub fn scenario_to_game_with_bound(scenario: &ExchangeScenario, bound: usize) -> Result<IsnGame> {
    let n = scenario.n_agents;
    check_bound("the exchange scenario", n, bound.min(ENUMERATION_BOUND))?;
    let values: Vec<Money> = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| {
            let s = Coalition::from_bits(bits);
            if s.len() < 2 {
                return Money::zero();
            }
            let (_, o) = optimal_exchange_plan(scenario, s);
            t_value(scenario, s) - o
        })
        .collect();
    Ok(IsnGame::from_dense(n, values))
}
