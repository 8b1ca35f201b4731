//! Basic marginal-contribution nets.
//!
//! A rule `(P, N) ↦ v` applies to a coalition `S` when `P ⊆ S` and
//! `N ∩ S = ∅`; a net's value at `S` is the sum of its applicable rules. The
//! same structure represents ISN games (one rule per coalition) and incentive
//! regulations (subsidies and taxes).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coalition::{Coalition, MAX_AGENTS};
use crate::error::{IsnError, Result};
use crate::game::{check_bound, IsnGame, TuGame, ENUMERATION_BOUND};
use crate::money::Money;
use crate::solutions::Allocation;

/// One basic rule `(positive, negative) ↦ value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McNetRule {
    positive: Coalition,
    negative: Coalition,
    value: Money,
}

impl McNetRule {
    /// Fails if the patterns overlap, are both empty, or the value is zero.
    pub fn new(positive: Coalition, negative: Coalition, value: Money) -> Result<Self> {
        if positive.intersects(negative) {
            return Err(IsnError::InvalidRule(format!(
                "positive {positive} and negative {negative} patterns overlap"
            )));
        }
        if positive.is_empty() && negative.is_empty() {
            return Err(IsnError::InvalidRule(
                "a rule must mention at least one agent".into(),
            ));
        }
        if value.is_zero() {
            return Err(IsnError::InvalidRule("rule value must be nonzero".into()));
        }
        Ok(McNetRule {
            positive,
            negative,
            value,
        })
    }

    /// The rule `(group, N \ group) ↦ value`, which applies to `group` only.
    pub fn exact(group: Coalition, n_agents: usize, value: Money) -> Result<Self> {
        McNetRule::new(group, group.complement(n_agents), value)
    }

    pub fn positive(&self) -> Coalition {
        self.positive
    }

    pub fn negative(&self) -> Coalition {
        self.negative
    }

    pub fn value(&self) -> &Money {
        &self.value
    }

    pub fn applicable(&self, s: Coalition) -> bool {
        applicable(self, s)
    }
}

impl fmt::Display for McNetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) ↦ {}", self.positive, self.negative, self.value)
    }
}

/// `P ⊆ S` and `N ∩ S = ∅`.
pub fn applicable(rule: &McNetRule, s: Coalition) -> bool {
    rule.positive.is_subset_of(s) && !rule.negative.intersects(s)
}

/// An ordered list of rules over a fixed roster. Rule indices are positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McNet {
    n_agents: usize,
    rules: Vec<McNetRule>,
}

impl McNet {
    pub fn empty(n_agents: usize) -> Self {
        assert!(n_agents <= MAX_AGENTS);
        McNet {
            n_agents,
            rules: Vec::new(),
        }
    }

    pub fn new(n_agents: usize, rules: Vec<McNetRule>) -> Result<Self> {
        let mut net = McNet::empty(n_agents);
        for rule in rules {
            net.push(rule)?;
        }
        Ok(net)
    }

    /// Appends a rule, rejecting agents outside the roster.
    pub fn push(&mut self, rule: McNetRule) -> Result<()> {
        let mentioned = rule.positive.union(rule.negative);
        if let Some(agent) = mentioned.agents().find(|&a| a >= self.n_agents) {
            return Err(IsnError::UnknownAgent {
                coalition: mentioned,
                agent,
                n_agents: self.n_agents,
            });
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn rules(&self) -> &[McNetRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Indices of the rules applicable to `s`.
    pub fn applicable_rules(&self, s: Coalition) -> impl Iterator<Item = usize> + '_ {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| applicable(r, s))
            .map(|(i, _)| i)
    }

    pub fn evaluate(&self, s: Coalition) -> Money {
        evaluate(self, s)
    }
}

impl TuGame for McNet {
    fn n_agents(&self) -> usize {
        self.n_agents
    }

    fn worth(&self, s: Coalition) -> Money {
        evaluate(self, s)
    }
}

/// Sum of the values of all rules applicable to `s`.
pub fn evaluate(net: &McNet, s: Coalition) -> Money {
    net.rules
        .iter()
        .filter(|r| applicable(r, s))
        .map(|r| &r.value)
        .sum()
}

/// One exact rule `(S, N \ S) ↦ v(S)` per coalition with nonzero value, in
/// ascending mask order. Works for any game, including ones with a nonzero
/// empty-set value.
pub fn from_game<G: TuGame + ?Sized>(game: &G) -> Result<McNet> {
    let n = game.n_agents();
    check_bound("the MC-Net transformation", n, ENUMERATION_BOUND)?;
    let mut rules = Vec::new();
    for s in Coalition::all(n) {
        let v = game.worth(s);
        if !v.is_zero() {
            rules.push(McNetRule::exact(s, n, v)?);
        }
    }
    Ok(McNet { n_agents: n, rules })
}

/// The ISN game as a basic MC-Net: one rule `(S, N \ S) ↦ v(S)` for each
/// `|S| >= 2` with `v(S) != 0`.
pub fn from_isn_game(game: &IsnGame) -> Result<McNet> {
    from_game(game)
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigInt::one());
    for k in 1..=n {
        let next = &f[k - 1] * BigInt::from(k);
        f.push(next);
    }
    f
}

/// Per-member shares of one rule: `(positive share, negative share)`.
///
/// With `p = |P|`, `q = |N|`, each positive agent gets `v (p-1)! q! / (p+q)!`
/// and each negative agent `-v p! (q-1)! / (p+q)!`; agents the rule does not
/// mention are dummies.
fn rule_shares(rule: &McNetRule, fact: &[BigInt]) -> (Money, Money) {
    let p = rule.positive.len();
    let q = rule.negative.len();
    let v = rule.value.as_rational();
    let total = &fact[p + q];
    let pos = if p > 0 {
        v * BigRational::new(&fact[p - 1] * &fact[q], total.clone())
    } else {
        BigRational::default()
    };
    let neg = if q > 0 {
        -(v * BigRational::new(&fact[p] * &fact[q - 1], total.clone()))
    } else {
        BigRational::default()
    };
    (Money::from_rational(pos), Money::from_rational(neg))
}

/// Shapley value of the single-rule game on an `n_agents` roster.
pub fn rule_shapley(rule: &McNetRule, n_agents: usize) -> Allocation {
    let fact = factorials(rule.positive.len() + rule.negative.len());
    let (pos, neg) = rule_shares(rule, &fact);
    let mut phi = vec![Money::zero(); n_agents];
    for i in rule.positive.agents() {
        phi[i] = pos.clone();
    }
    for i in rule.negative.agents() {
        phi[i] = neg.clone();
    }
    Allocation::new(phi)
}

/// Shapley value of the whole net, summed rule by rule.
pub fn net_shapley(net: &McNet) -> Allocation {
    let fact = factorials(net.n_agents);
    let mut phi = vec![Money::zero(); net.n_agents];
    for rule in &net.rules {
        let (pos, neg) = rule_shares(rule, &fact);
        for i in rule.positive.agents() {
            phi[i] += &pos;
        }
        for i in rule.negative.agents() {
            phi[i] += &neg;
        }
    }
    Allocation::new(phi)
}

/// Concatenates two nets over the same roster; values add pointwise.
pub fn compose(a: &McNet, b: &McNet) -> Result<McNet> {
    if a.n_agents != b.n_agents {
        return Err(IsnError::RosterMismatch {
            left: a.n_agents,
            right: b.n_agents,
        });
    }
    let mut rules = a.rules.clone();
    rules.extend(b.rules.iter().cloned());
    Ok(McNet {
        n_agents: a.n_agents,
        rules,
    })
}
