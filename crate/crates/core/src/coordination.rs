//! Policies, incentive synthesis, and coordinated games.
//!
//! A policy labels groups of firms as promoted, permitted, or prohibited. An
//! incentive net is an MC-Net of subsidies (positive values) and taxes
//! (negative values); the coordinated game adds it to the market game:
//! `c(S) = v(S) + ι(S)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{check_roster, IsnError, Result};
use crate::game::{IsnGame, Subgame, TuGame};
use crate::mcnet::{compose, evaluate, from_isn_game, McNet, McNetRule};
use crate::money::Money;
use crate::solutions::shapley;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyLabel {
    Promoted,
    Permitted,
    Prohibited,
}

impl fmt::Display for PolicyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyLabel::Promoted => "promoted",
            PolicyLabel::Permitted => "permitted",
            PolicyLabel::Prohibited => "prohibited",
        })
    }
}

/// Labels for groups of at least two firms; everything else is permitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Policy {
    labels: BTreeMap<Coalition, PolicyLabel>,
}

impl Policy {
    pub fn new() -> Self {
        Policy::default()
    }

    /// Labels `group`. Rejects groups smaller than two and relabeling.
    pub fn label(&mut self, group: Coalition, label: PolicyLabel) -> Result<()> {
        if group.len() < 2 {
            return Err(IsnError::InvalidPolicyLabel(format!(
                "group {group} has fewer than two members"
            )));
        }
        if let Some(existing) = self.labels.get(&group) {
            return Err(IsnError::InvalidPolicyLabel(format!(
                "group {group} is already labeled {existing}"
            )));
        }
        self.labels.insert(group, label);
        Ok(())
    }

    pub fn with(mut self, group: Coalition, label: PolicyLabel) -> Result<Self> {
        self.label(group, label)?;
        Ok(self)
    }

    /// Labeled groups in ascending mask order.
    pub fn labels(&self) -> impl Iterator<Item = (Coalition, PolicyLabel)> + '_ {
        self.labels.iter().map(|(&s, &l)| (s, l))
    }

    pub fn groups_labeled(&self, label: PolicyLabel) -> impl Iterator<Item = Coalition> + '_ {
        self.labels()
            .filter(move |(_, l)| *l == label)
            .map(|(s, _)| s)
    }

    pub fn classify(&self, s: Coalition) -> PolicyLabel {
        classify(self, s)
    }

    /// Smallest roster that contains every labeled group.
    pub fn span(&self) -> usize {
        self.labels.keys().map(|s| s.span()).max().unwrap_or(0)
    }
}

pub fn classify(policy: &Policy, s: Coalition) -> PolicyLabel {
    policy
        .labels
        .get(&s)
        .copied()
        .unwrap_or(PolicyLabel::Permitted)
}

/// Result of checking that promoted groups are mutually exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyVerdict {
    Valid,
    Overlap { first: Coalition, second: Coalition },
}

/// Valid iff the promoted groups are pairwise disjoint. Reports the first
/// overlapping pair in ascending mask order.
pub fn validate_policy(policy: &Policy) -> PolicyVerdict {
    let promoted: Vec<Coalition> = policy.groups_labeled(PolicyLabel::Promoted).collect();
    for (i, &a) in promoted.iter().enumerate() {
        if let Some(&b) = promoted[i + 1..].iter().find(|b| a.intersects(**b)) {
            return PolicyVerdict::Overlap {
                first: a,
                second: b,
            };
        }
    }
    PolicyVerdict::Valid
}

/// `ι(S)`: the sum of applicable incentive rules.
pub fn incentive_value(net: &McNet, s: Coalition) -> Money {
    evaluate(net, s)
}

/// A minimal subsidy for one promoted group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Promotion {
    pub target: Coalition,
    /// `None` when the group is already implementable.
    pub rule: Option<McNetRule>,
    pub iota_min: Money,
}

fn check_target(game: &impl TuGame, target: Coalition) -> Result<()> {
    check_roster(target, game.n_agents())?;
    if target.len() < 2 {
        return Err(IsnError::TargetTooSmall(target));
    }
    Ok(())
}

/// Smallest subsidy on exactly `target` that makes its subgame implementable.
///
/// Adding `ι` to the target's own value raises every member's Shapley payoff
/// by `ι/k` (k = |target|) and leaves every proper subgroup's value alone, so
/// the constraint of subgroup `S` needs `ι >= (v(S) - φ(S))·k/|S|`.
pub fn synthesize_promotion<G: TuGame + ?Sized>(game: &G, target: Coalition) -> Result<Promotion> {
    check_target(&game, target)?;
    let sub = Subgame::new(game, target)?;
    let phi = shapley(&sub)?;
    let k = sub.n_agents();
    let grand = sub.grand();
    let mut iota = Money::zero();
    for s in grand.subsets().skip(1).filter(|&s| s != grand) {
        let gap = sub.worth(s) - phi.coalition_sum(s);
        if gap.is_positive() {
            iota = iota.max(gap.times(k).div_count(s.len()));
        }
    }
    let rule = if iota.is_zero() {
        None
    } else {
        Some(McNetRule::exact(target, game.n_agents(), iota.clone())?)
    };
    Ok(Promotion {
        target,
        rule,
        iota_min: iota,
    })
}

/// Tax on exactly `target` leaving it worth `-ε`, less than its members earn
/// alone.
///
/// Returns `None` if `v(target)` already equals `-ε` (a zero-valued rule is
/// not a valid MC-Net rule).
pub fn synthesize_prohibition<G: TuGame + ?Sized>(
    game: &G,
    target: Coalition,
    epsilon: &Money,
) -> Result<Option<McNetRule>> {
    check_target(&game, target)?;
    if !epsilon.is_positive() {
        return Err(IsnError::NonpositiveEpsilon);
    }
    let tax = -(game.worth(target) + epsilon);
    if tax.is_zero() {
        return Ok(None);
    }
    McNetRule::exact(target, game.n_agents(), tax).map(Some)
}

/// The market game plus an incentive net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinatedGame {
    base: IsnGame,
    incentives: McNet,
}

impl CoordinatedGame {
    pub fn base(&self) -> &IsnGame {
        &self.base
    }

    pub fn incentives(&self) -> &McNet {
        &self.incentives
    }

    /// `c(S) = v(S) + ι(S)`.
    pub fn value(&self, s: Coalition) -> Result<Money> {
        check_roster(s, self.base.n_agents())?;
        Ok(self.worth(s))
    }

    /// The same game as a single MC-Net: market rules followed by incentives.
    pub fn as_mcnet(&self) -> Result<McNet> {
        compose(&from_isn_game(&self.base)?, &self.incentives)
    }

    pub fn subgame(&self, group: Coalition) -> Result<Subgame<'_, Self>> {
        Subgame::new(self, group)
    }
}

impl TuGame for CoordinatedGame {
    fn n_agents(&self) -> usize {
        self.base.n_agents()
    }

    fn worth(&self, s: Coalition) -> Money {
        self.base.worth(s) + evaluate(&self.incentives, s)
    }
}

pub fn coordinate(game: &IsnGame, incentives: &McNet) -> Result<CoordinatedGame> {
    if game.n_agents() != incentives.n_agents() {
        return Err(IsnError::RosterMismatch {
            left: game.n_agents(),
            right: incentives.n_agents(),
        });
    }
    Ok(CoordinatedGame {
        base: game.clone(),
        incentives: incentives.clone(),
    })
}

/// Incentive net for a whole policy: promotion subsidies (ascending group
/// order) followed by prohibition taxes.
///
/// Taxes are fixed first and promotions are computed on the taxed game, so a
/// prohibited subgroup inside a promoted group is accounted for. Each rule
/// targets exactly one group, and promoted groups are disjoint, so no
/// promotion disturbs another.
pub fn enforce_policy(game: &IsnGame, policy: &Policy, epsilon: &Money) -> Result<McNet> {
    if !epsilon.is_positive() {
        return Err(IsnError::NonpositiveEpsilon);
    }
    if let PolicyVerdict::Overlap { first, second } = validate_policy(policy) {
        return Err(IsnError::PolicyInvalid { first, second });
    }
    let n = game.n_agents();
    for (group, _) in policy.labels() {
        check_roster(group, n)?;
    }
    let mut taxes = McNet::empty(n);
    for group in policy.groups_labeled(PolicyLabel::Prohibited) {
        if let Some(rule) = synthesize_prohibition(game, group, epsilon)? {
            taxes.push(rule)?;
        }
    }
    let taxed = coordinate(game, &taxes)?;
    let mut net = McNet::empty(n);
    for group in policy.groups_labeled(PolicyLabel::Promoted) {
        if let Some(rule) = synthesize_promotion(&taxed, group)?.rule {
            net.push(rule)?;
        }
    }
    compose(&net, &taxes)
}
