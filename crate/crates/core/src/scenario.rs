//! Scenario files: a JSON document naming the firms and giving either cost
//! tables or exchange data, plus an optional policy.
//!
//! ```json
//! {
//!   "agents": ["A", "B"],
//!   "exchange": {
//!     "streams": [
//!       {"firm": "A", "resource": "r", "kind": "offer", "quantity": 10, "unit_discharge_cost": 5},
//!       {"firm": "B", "resource": "r", "kind": "demand", "quantity": 8,
//!        "unit_purchase_cost": 7, "unit_treatment_cost": 2}
//!     ],
//!     "transport": [{"from": "A", "to": "B", "resource": "r", "unit_cost": 1}],
//!     "transaction": [{"from": "A", "to": "B", "cost": 10}]
//!   },
//!   "policy": {"promoted": ["A,B"], "prohibited": []}
//! }
//! ```
//!
//! With `"tables": {"T": {"A,B": 106}, "O": {"A,B": 44}}` instead of
//! `exchange`, coalitions are keyed by comma-joined agent names. Numbers are
//! JSON integers or strings holding an integer, a fraction `"a/b"`, or a
//! decimal (converted exactly).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::coalition::{AgentId, Coalition};
use crate::coordination::{validate_policy, Policy, PolicyLabel, PolicyVerdict};
use crate::cost::{scenario_to_game, ExchangeScenario, ResourceStream};
use crate::error::IsnError;
use crate::game::{make_isn_game, IsnGame, ENUMERATION_BOUND};
use crate::money::Money;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("invalid scenario (field `{field}`): {message}")]
    Invalid { field: String, message: String },
    /// `message` renders coalitions with agent names where possible.
    #[error("{message}")]
    Validation {
        #[source]
        error: IsnError,
        message: String,
    },
}

impl From<IsnError> for ScenarioError {
    fn from(error: IsnError) -> Self {
        let message = error.to_string();
        ScenarioError::Validation { error, message }
    }
}

fn named(error: IsnError, agents: &[String]) -> ScenarioError {
    let name = |s: Coalition| s.display_with(|i| agents[i].as_str());
    let message = match &error {
        IsnError::MissingCoalition { table, coalition } => {
            format!(
                "{table} table has no entry for coalition {}",
                name(*coalition)
            )
        }
        IsnError::PolicyInvalid { first, second } => format!(
            "promoted groups {} and {} overlap; promoted groups must be mutually exclusive",
            name(*first),
            name(*second)
        ),
        _ => error.to_string(),
    };
    ScenarioError::Validation { error, message }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    agents: Vec<String>,
    #[serde(default)]
    tables: Option<TablesSection>,
    #[serde(default)]
    exchange: Option<ExchangeSection>,
    #[serde(default)]
    policy: Option<PolicySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TablesSection {
    #[serde(rename = "T")]
    t: BTreeMap<String, Money>,
    #[serde(rename = "O")]
    o: BTreeMap<String, Money>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExchangeSection {
    #[serde(default)]
    streams: Vec<StreamEntry>,
    #[serde(default)]
    transport: Vec<TransportEntry>,
    #[serde(default)]
    transaction: Vec<TransactionEntry>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum StreamKindTag {
    Offer,
    Demand,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StreamEntry {
    firm: String,
    resource: String,
    kind: StreamKindTag,
    quantity: Money,
    #[serde(default)]
    unit_discharge_cost: Option<Money>,
    #[serde(default)]
    unit_purchase_cost: Option<Money>,
    #[serde(default)]
    unit_treatment_cost: Option<Money>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportEntry {
    from: String,
    to: String,
    resource: String,
    unit_cost: Money,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransactionEntry {
    from: String,
    to: String,
    cost: Money,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicySection {
    #[serde(default)]
    promoted: Vec<CoalitionSpec>,
    #[serde(default)]
    prohibited: Vec<CoalitionSpec>,
}

/// `"A,B"` or `["A", "B"]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoalitionSpec {
    Joined(String),
    Names(Vec<String>),
}

/// Where a loaded game's values came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameSource {
    Tables,
    Exchange(ExchangeScenario),
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub agents: Vec<String>,
    pub source: GameSource,
    pub game: IsnGame,
    pub policy: Option<Policy>,
}

impl LoadedScenario {
    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id]
    }

    /// `{A,B}` style rendering with agent names.
    pub fn name_coalition(&self, s: Coalition) -> String {
        s.display_with(|i| self.agent_name(i))
    }

    pub fn coalition_names(&self, s: Coalition) -> Vec<String> {
        s.agents().map(|i| self.agents[i].clone()).collect()
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<LoadedScenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        ScenarioError::Parse {
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        field: ".".into(),
        message: e.to_string(),
    })?;
    build(file)
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

struct Roster {
    ids: HashMap<String, AgentId>,
}

impl Roster {
    fn id(&self, name: &str, field: &str) -> Result<AgentId, ScenarioError> {
        self.ids
            .get(name.trim())
            .copied()
            .ok_or_else(|| invalid(field, format!("unknown agent {name:?}")))
    }

    fn coalition<'a, I>(&self, names: I, field: &str) -> Result<Coalition, ScenarioError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut s = Coalition::EMPTY;
        for name in names {
            let id = self.id(name, field)?;
            if s.contains(id) {
                return Err(invalid(field, format!("agent {name:?} listed twice")));
            }
            s = s.with(id);
        }
        Ok(s)
    }

    fn joined(&self, key: &str, field: &str) -> Result<Coalition, ScenarioError> {
        if key.trim().is_empty() {
            return Ok(Coalition::EMPTY);
        }
        self.coalition(key.split(','), field)
    }

    fn spec(&self, spec: &CoalitionSpec, field: &str) -> Result<Coalition, ScenarioError> {
        match spec {
            CoalitionSpec::Joined(key) => self.joined(key, field),
            CoalitionSpec::Names(names) => self.coalition(names.iter().map(String::as_str), field),
        }
    }
}

fn build(file: ScenarioFile) -> Result<LoadedScenario, ScenarioError> {
    if file.agents.is_empty() {
        return Err(invalid("agents", "at least one agent is required"));
    }
    if file.agents.len() > ENUMERATION_BOUND {
        return Err(IsnError::BoundExceeded {
            what: "a scenario",
            n_agents: file.agents.len(),
            bound: ENUMERATION_BOUND,
        }
        .into());
    }
    let mut ids = HashMap::new();
    for (i, name) in file.agents.iter().enumerate() {
        let name = name.trim();
        if name.is_empty() || name.contains(',') {
            return Err(invalid(
                format!("agents[{i}]"),
                "agent names must be non-empty and contain no commas",
            ));
        }
        if ids.insert(name.to_string(), i).is_some() {
            return Err(invalid(
                format!("agents[{i}]"),
                format!("duplicate agent name {name:?}"),
            ));
        }
    }
    let roster = Roster { ids };
    let n = file.agents.len();
    let agents: Vec<String> = file.agents.iter().map(|a| a.trim().to_string()).collect();

    let (source, game) = match (file.tables, file.exchange) {
        (Some(tables), None) => {
            let mut t = BTreeMap::new();
            for (key, v) in tables.t {
                t.insert(roster.joined(&key, &format!("tables.T.{key}"))?, v);
            }
            let mut o = BTreeMap::new();
            for (key, v) in tables.o {
                o.insert(roster.joined(&key, &format!("tables.O.{key}"))?, v);
            }
            (
                GameSource::Tables,
                make_isn_game(n, &t, &o).map_err(|e| named(e, &agents))?,
            )
        }
        (None, Some(exchange)) => {
            let scenario = build_exchange(&roster, n, exchange)?;
            let game = scenario_to_game(&scenario)?;
            (GameSource::Exchange(scenario), game)
        }
        (Some(_), Some(_)) => {
            return Err(invalid(".", "give either `tables` or `exchange`, not both"));
        }
        (None, None) => return Err(invalid(".", "missing `tables` or `exchange` section")),
    };

    let policy = match file.policy {
        None => None,
        Some(section) => {
            let mut policy = Policy::new();
            let labeled = [
                ("promoted", PolicyLabel::Promoted, &section.promoted),
                ("prohibited", PolicyLabel::Prohibited, &section.prohibited),
            ];
            for (key, label, groups) in labeled {
                for (i, spec) in groups.iter().enumerate() {
                    let field = format!("policy.{key}[{i}]");
                    let group = roster.spec(spec, &field)?;
                    policy
                        .label(group, label)
                        .map_err(|e| invalid(&field, e.to_string()))?;
                }
            }
            if let PolicyVerdict::Overlap { first, second } = validate_policy(&policy) {
                return Err(named(IsnError::PolicyInvalid { first, second }, &agents));
            }
            Some(policy)
        }
    };

    Ok(LoadedScenario {
        agents,
        source,
        game,
        policy,
    })
}

fn build_exchange(
    roster: &Roster,
    n: usize,
    ex: ExchangeSection,
) -> Result<ExchangeScenario, ScenarioError> {
    let mut streams = Vec::with_capacity(ex.streams.len());
    for (i, st) in ex.streams.into_iter().enumerate() {
        let field = format!("exchange.streams[{i}]");
        let firm = roster.id(&st.firm, &field)?;
        let treatment = st.unit_treatment_cost.unwrap_or_default();
        let stream = match st.kind {
            StreamKindTag::Offer => {
                if st.unit_purchase_cost.is_some() {
                    return Err(invalid(
                        field,
                        "offers take unit_discharge_cost, not unit_purchase_cost",
                    ));
                }
                let cost = st
                    .unit_discharge_cost
                    .ok_or_else(|| invalid(&field, "offer needs unit_discharge_cost"))?;
                ResourceStream::offer(firm, &st.resource, st.quantity, cost, treatment)
            }
            StreamKindTag::Demand => {
                if st.unit_discharge_cost.is_some() {
                    return Err(invalid(
                        field,
                        "demands take unit_purchase_cost, not unit_discharge_cost",
                    ));
                }
                let cost = st
                    .unit_purchase_cost
                    .ok_or_else(|| invalid(&field, "demand needs unit_purchase_cost"))?;
                ResourceStream::demand(firm, &st.resource, st.quantity, cost, treatment)
            }
        };
        streams.push(stream);
    }
    let mut transport = BTreeMap::new();
    for (i, t) in ex.transport.into_iter().enumerate() {
        let field = format!("exchange.transport[{i}]");
        let key = (
            roster.id(&t.from, &field)?,
            roster.id(&t.to, &field)?,
            t.resource,
        );
        if transport.insert(key, t.unit_cost).is_some() {
            return Err(invalid(field, "duplicate transport entry"));
        }
    }
    let mut transaction = BTreeMap::new();
    for (i, t) in ex.transaction.into_iter().enumerate() {
        let field = format!("exchange.transaction[{i}]");
        let key = (roster.id(&t.from, &field)?, roster.id(&t.to, &field)?);
        if transaction.insert(key, t.cost).is_some() {
            return Err(invalid(field, "duplicate transaction entry"));
        }
    }
    Ok(ExchangeScenario::new(n, streams, transport, transaction)?)
}
