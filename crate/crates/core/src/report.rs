//! Analysis commands and their reports.
//!
//! Each command returns a serializable report. Text and JSON renderings are
//! deterministic: coalitions in ascending mask order, agents in roster order,
//! rationals in lowest terms.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coalition::Coalition;
use crate::coordination::{coordinate, enforce_policy, PolicyLabel};
use crate::error::IsnError;
use crate::game::{check_superadditive, Superadditivity, TuGame};
use crate::mcnet::{from_isn_game, McNet};
use crate::money::Money;
use crate::scenario::{GameSource, LoadedScenario};
use crate::solutions::{core_nonempty, in_core, shapley, Allocation, CoreResult};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("scenario has no policy section; `enforce` needs promoted or prohibited groups")]
    NoPolicy,
    #[error(transparent)]
    Isn(#[from] IsnError),
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ValueEntry {
    pub coalition: Vec<String>,
    pub value: Money,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Payoff {
    pub agent: String,
    pub payoff: Money,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuperadditivityReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<[Vec<String>; 2]>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CoreReport {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Payoff>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RuleReport {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub value: Money,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AnalyzeReport {
    pub command: &'static str,
    pub agents: Vec<String>,
    pub source: &'static str,
    pub values: Vec<ValueEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub superadditive: Option<SuperadditivityReport>,
    pub shapley: Vec<Payoff>,
    pub core: CoreReport,
    pub implementable: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GroupVerdict {
    pub group: Vec<String>,
    pub label: PolicyLabel,
    /// Subsidy (promoted) or tax (prohibited) placed on exactly this group.
    pub incentive: Money,
    pub coordinated_value: Money,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shapley: Option<Vec<Payoff>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implementable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unstable: Option<bool>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EnforceReport {
    pub command: &'static str,
    pub agents: Vec<String>,
    pub epsilon: Money,
    pub incentives: Vec<RuleReport>,
    pub coordinated_values: Vec<ValueEntry>,
    pub groups: Vec<GroupVerdict>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ShapleyReport {
    pub command: &'static str,
    pub agents: Vec<String>,
    pub shapley: Vec<Payoff>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CoreOnlyReport {
    pub command: &'static str,
    pub agents: Vec<String>,
    pub core: CoreReport,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct McNetReport {
    pub command: &'static str,
    pub agents: Vec<String>,
    pub rules: Vec<RuleReport>,
}

fn payoffs(sc: &LoadedScenario, x: &Allocation) -> Vec<Payoff> {
    x.payoffs()
        .iter()
        .enumerate()
        .map(|(i, p)| Payoff {
            agent: sc.agents[i].clone(),
            payoff: p.clone(),
        })
        .collect()
}

fn value_table<G: TuGame>(sc: &LoadedScenario, game: &G) -> Vec<ValueEntry> {
    Coalition::all(game.n_agents())
        .filter(|s| s.len() >= 2)
        .map(|s| ValueEntry {
            coalition: sc.coalition_names(s),
            value: game.worth(s),
        })
        .collect()
}

fn core_report(sc: &LoadedScenario, core: &CoreResult) -> CoreReport {
    match core {
        CoreResult::Nonempty(x) => CoreReport {
            status: "nonempty",
            witness: Some(payoffs(sc, x)),
        },
        CoreResult::Empty => CoreReport {
            status: "empty",
            witness: None,
        },
    }
}

fn rule_reports(sc: &LoadedScenario, net: &McNet) -> Vec<RuleReport> {
    net.rules()
        .iter()
        .map(|r| RuleReport {
            positive: sc.coalition_names(r.positive()),
            negative: sc.coalition_names(r.negative()),
            value: r.value().clone(),
        })
        .collect()
}

/// Outcome of the superadditivity validation, if it fails.
pub fn superadditivity_warning(sc: &LoadedScenario) -> Option<String> {
    match check_superadditive(&sc.game) {
        Superadditivity::Holds => None,
        Superadditivity::Violated { left, right } => Some(format!(
            "game is not superadditive: v({}) < v({}) + v({})",
            sc.name_coalition(left.union(right)),
            sc.name_coalition(left),
            sc.name_coalition(right)
        )),
    }
}

/// Values, Shapley allocation, core status, and implementability.
pub fn cmd_analyze(
    sc: &LoadedScenario,
    check_superadditivity: bool,
) -> Result<AnalyzeReport, ReportError> {
    let game = &sc.game;
    let superadditive = check_superadditivity.then(|| match check_superadditive(game) {
        Superadditivity::Holds => SuperadditivityReport {
            holds: true,
            counterexample: None,
        },
        Superadditivity::Violated { left, right } => SuperadditivityReport {
            holds: false,
            counterexample: Some([sc.coalition_names(left), sc.coalition_names(right)]),
        },
    });
    let phi = shapley(game)?;
    let core = core_nonempty(game)?;
    let implementable = in_core(game, &phi)?;
    Ok(AnalyzeReport {
        command: "analyze",
        agents: sc.agents.clone(),
        source: match sc.source {
            GameSource::Tables => "tables",
            GameSource::Exchange(_) => "exchange",
        },
        values: value_table(sc, game),
        superadditive,
        shapley: payoffs(sc, &phi),
        core: core_report(sc, &core),
        implementable,
    })
}

/// Synthesizes incentives for the scenario's policy and checks every
/// labeled group in the coordinated game.
pub fn cmd_enforce(sc: &LoadedScenario, epsilon: &Money) -> Result<EnforceReport, ReportError> {
    let policy = sc.policy.as_ref().ok_or(ReportError::NoPolicy)?;
    let net = enforce_policy(&sc.game, policy, epsilon)?;
    let coordinated = coordinate(&sc.game, &net)?;
    let mut groups = Vec::new();
    for (group, label) in policy.labels() {
        let incentive: Money = net
            .rules()
            .iter()
            .filter(|r| r.positive() == group)
            .map(|r| r.value())
            .sum();
        let coordinated_value = coordinated.worth(group);
        let mut verdict = GroupVerdict {
            group: sc.coalition_names(group),
            label,
            incentive,
            coordinated_value: coordinated_value.clone(),
            shapley: None,
            implementable: None,
            unstable: None,
        };
        match label {
            PolicyLabel::Promoted => {
                let sub = coordinated.subgame(group)?;
                let phi = shapley(&sub)?;
                verdict.implementable = Some(in_core(&sub, &phi)?);
                verdict.shapley = Some(
                    sub.members()
                        .iter()
                        .zip(phi.payoffs())
                        .map(|(&i, p)| Payoff {
                            agent: sc.agents[i].clone(),
                            payoff: p.clone(),
                        })
                        .collect(),
                );
            }
            PolicyLabel::Prohibited => {
                verdict.unstable = Some(coordinated_value.is_negative());
            }
            PolicyLabel::Permitted => {}
        }
        groups.push(verdict);
    }
    Ok(EnforceReport {
        command: "enforce",
        agents: sc.agents.clone(),
        epsilon: epsilon.clone(),
        incentives: rule_reports(sc, &net),
        coordinated_values: value_table(sc, &coordinated),
        groups,
    })
}

pub fn cmd_shapley(sc: &LoadedScenario) -> Result<ShapleyReport, ReportError> {
    Ok(ShapleyReport {
        command: "shapley",
        agents: sc.agents.clone(),
        shapley: payoffs(sc, &shapley(&sc.game)?),
    })
}

pub fn cmd_core(sc: &LoadedScenario) -> Result<CoreOnlyReport, ReportError> {
    Ok(CoreOnlyReport {
        command: "core",
        agents: sc.agents.clone(),
        core: core_report(sc, &core_nonempty(&sc.game)?),
    })
}

pub fn cmd_mcnet(sc: &LoadedScenario) -> Result<McNetReport, ReportError> {
    Ok(McNetReport {
        command: "mcnet",
        agents: sc.agents.clone(),
        rules: rule_reports(sc, &from_isn_game(&sc.game)?),
    })
}

/// Human-readable rendering.
pub trait TextReport {
    fn to_text(&self) -> String;
}

fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_values(out: &mut String, title: &str, values: &[ValueEntry]) {
    let _ = writeln!(out, "{title}:");
    let width = values
        .iter()
        .map(|v| braces(&v.coalition).len())
        .max()
        .unwrap_or(0);
    for v in values {
        let _ = writeln!(out, "  {:<width$}  {}", braces(&v.coalition), v.value);
    }
}

fn write_payoffs(out: &mut String, title: &str, payoffs: &[Payoff]) {
    let _ = writeln!(out, "{title}:");
    let width = payoffs.iter().map(|p| p.agent.len()).max().unwrap_or(0);
    for p in payoffs {
        let _ = writeln!(out, "  {:<width$}  {}", p.agent, p.payoff);
    }
}

fn inline_payoffs(payoffs: &[Payoff]) -> String {
    payoffs
        .iter()
        .map(|p| format!("{}={}", p.agent, p.payoff))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_core(out: &mut String, core: &CoreReport) {
    let _ = writeln!(out, "core: {}", core.status);
    if let Some(w) = &core.witness {
        let _ = writeln!(out, "  witness: {}", inline_payoffs(w));
    }
}

fn write_rules(out: &mut String, title: &str, rules: &[RuleReport]) {
    let _ = writeln!(out, "{title}:");
    if rules.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for r in rules {
        let _ = writeln!(
            out,
            "  ({}, {}) -> {}",
            braces(&r.positive),
            braces(&r.negative),
            r.value
        );
    }
}

impl TextReport for AnalyzeReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "agents: {}", self.agents.join(" "));
        let _ = writeln!(out, "source: {}", self.source);
        write_values(&mut out, "coalition values", &self.values);
        if let Some(sa) = &self.superadditive {
            match &sa.counterexample {
                None => {
                    let _ = writeln!(out, "superadditive: yes");
                }
                Some([l, r]) => {
                    let _ = writeln!(out, "superadditive: no ({} and {})", braces(l), braces(r));
                }
            }
        }
        write_payoffs(&mut out, "shapley value", &self.shapley);
        write_core(&mut out, &self.core);
        let _ = writeln!(out, "implementable: {}", yes_no(self.implementable));
        out
    }
}

impl TextReport for EnforceReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "agents: {}", self.agents.join(" "));
        let _ = writeln!(out, "epsilon: {}", self.epsilon);
        write_rules(&mut out, "incentive rules", &self.incentives);
        write_values(&mut out, "coordinated values", &self.coordinated_values);
        for g in &self.groups {
            let _ = writeln!(out, "{} {}:", g.label, braces(&g.group));
            match g.label {
                PolicyLabel::Promoted => {
                    let _ = writeln!(out, "  subsidy: {}", g.incentive);
                }
                _ => {
                    let _ = writeln!(out, "  tax: {}", g.incentive);
                }
            }
            let _ = writeln!(out, "  coordinated value: {}", g.coordinated_value);
            if let Some(phi) = &g.shapley {
                let _ = writeln!(out, "  shapley: {}", inline_payoffs(phi));
            }
            if let Some(ok) = g.implementable {
                let _ = writeln!(out, "  implementable: {}", yes_no(ok));
            }
            if let Some(unstable) = g.unstable {
                let _ = writeln!(out, "  unstable: {}", yes_no(unstable));
            }
        }
        out
    }
}

impl TextReport for ShapleyReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        write_payoffs(&mut out, "shapley value", &self.shapley);
        out
    }
}

impl TextReport for CoreOnlyReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        write_core(&mut out, &self.core);
        out
    }
}

impl TextReport for McNetReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        write_rules(&mut out, "mc-net rules", &self.rules);
        out
    }
}
