//! Fairness and stability: Shapley value, core, and implementability.
//!
//! A game is *implementable* when its Shapley allocation lies in its core,
//! i.e. the fair split is also one no coalition wants to leave.

use std::ops::Index;

use itertools::Itertools;
use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{IsnError, Result};
use crate::game::{check_bound, TuGame, ENUMERATION_BOUND};
use crate::lp::{LinearProgram, Relation};
use crate::mcnet::{from_game, net_shapley};
use crate::money::Money;

/// Roster limit for the permutation-enumeration Shapley oracle.
pub const PERMUTATION_BOUND: usize = 9;

/// A payoff vector indexed by agent id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Allocation(Vec<Money>);

impl Allocation {
    pub fn new(payoffs: Vec<Money>) -> Self {
        Allocation(payoffs)
    }

    pub fn payoffs(&self) -> &[Money] {
        &self.0
    }

    pub fn into_payoffs(self) -> Vec<Money> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Money {
        self.0.iter().sum()
    }

    /// `Σ_{i ∈ s} x_i`.
    pub fn coalition_sum(&self, s: Coalition) -> Money {
        s.agents().map(|i| &self.0[i]).sum()
    }

    /// Adds `amount` to every agent's payoff.
    pub fn shifted(&self, amount: &Money) -> Allocation {
        Allocation(self.0.iter().map(|x| x + amount).collect())
    }
}

impl Index<usize> for Allocation {
    type Output = Money;

    fn index(&self, i: usize) -> &Money {
        &self.0[i]
    }
}

/// Whether the core is empty, with a member allocation when it is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreResult {
    Nonempty(Allocation),
    Empty,
}

impl CoreResult {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, CoreResult::Nonempty(_))
    }

    pub fn witness(&self) -> Option<&Allocation> {
        match self {
            CoreResult::Nonempty(x) => Some(x),
            CoreResult::Empty => None,
        }
    }
}

fn all_values<G: TuGame + ?Sized>(game: &G) -> Vec<Money> {
    Coalition::all(game.n_agents())
        .map(|s| game.worth(s))
        .collect()
}

/// Shapley value by averaging marginal contributions over all `n!` orderings.
///
/// This is the reference oracle; [`shapley`] computes the same vector in
/// `O(n 2^n)` through the MC-Net representation.
pub fn shapley_bruteforce<G: TuGame + ?Sized>(game: &G) -> Result<Allocation> {
    let n = game.n_agents();
    check_bound("permutation Shapley", n, PERMUTATION_BOUND)?;
    let values = all_values(game);
    let mut totals = vec![Money::zero(); n];
    let mut orderings = 0usize;
    for order in (0..n).permutations(n) {
        let mut before = 0usize;
        for i in order {
            let after = before | (1 << i);
            totals[i] += &values[after] - &values[before];
            before = after;
        }
        orderings += 1;
    }
    Ok(Allocation(
        totals.into_iter().map(|t| t.div_count(orderings)).collect(),
    ))
}

/// Shapley value via the game's MC-Net transformation, summed rule by rule.
pub fn shapley<G: TuGame + ?Sized>(game: &G) -> Result<Allocation> {
    Ok(net_shapley(&from_game(game)?))
}

/// `Σx = v(N)` and `x(S) >= v(S)` for every non-empty coalition.
pub fn in_core<G: TuGame + ?Sized>(game: &G, x: &Allocation) -> Result<bool> {
    let n = game.n_agents();
    if x.len() != n {
        return Err(IsnError::LengthMismatch {
            expected: n,
            found: x.len(),
        });
    }
    check_bound("core membership", n, ENUMERATION_BOUND)?;
    let grand = game.grand();
    // Coalition sums built incrementally: x(S) = x(S minus lowest) + x_lowest.
    let mut sums = vec![Money::zero(); 1 << n];
    for s in grand.subsets().skip(1) {
        let bits = s.bits();
        let low = bits.trailing_zeros() as usize;
        let total = &sums[(bits & (bits - 1)) as usize] + &x[low];
        let v = game.worth(s);
        let ok = if s == grand { total == v } else { total >= v };
        if !ok {
            return Ok(false);
        }
        sums[bits as usize] = total;
    }
    Ok(true)
}

/// Decides core non-emptiness exactly and returns a core allocation if any.
///
/// Writes `x = a + y` with `a_i = v({i})`, so `y >= 0`, and minimizes `Σy`
/// subject to `y(S) >= v(S) - a(S)` for proper coalitions. That problem is
/// solved through its dual, the balancedness program
/// `max Σ_S w(S) λ_S s.t. Σ_{S ∋ i} λ_S <= 1, λ >= 0`, which has one row per
/// agent. The row multipliers recover `y`. The core is non-empty iff
/// `Σa + min Σy <= v(N)`; any leftover is split equally.
pub fn core_nonempty<G: TuGame + ?Sized>(game: &G) -> Result<CoreResult> {
    let n = game.n_agents();
    check_bound("core computation", n, ENUMERATION_BOUND)?;
    let grand = game.grand();
    let singles: Vec<Money> = (0..n)
        .map(|i| game.worth(Coalition::singleton(i)))
        .collect();

    // Columns with w(S) <= 0 correspond to constraints implied by y >= 0.
    let columns: Vec<(Coalition, Money)> = grand
        .subsets()
        .filter(|s| s.len() >= 2 && *s != grand)
        .map(|s| {
            let base: Money = s.agents().map(|i| &singles[i]).sum();
            (s, game.worth(s) - base)
        })
        .filter(|(_, w)| w.is_positive())
        .collect();

    let (min_total, y) = if columns.is_empty() {
        (Money::zero(), vec![Money::zero(); n])
    } else {
        let mut lp = LinearProgram::maximize(columns.iter().map(|(_, w)| w.clone()).collect());
        for i in 0..n {
            let row = columns
                .iter()
                .map(|(s, _)| Money::from_integer(s.contains(i) as i64))
                .collect();
            lp.add(row, Relation::Le, Money::from_integer(1));
        }
        let sol = lp
            .solve()
            .optimal()
            .expect("balancedness program is feasible (λ = 0) and bounded (λ_S <= 1)");
        (sol.objective, sol.duals)
    };

    let base_total: Money = singles.iter().sum();
    let slack = game.worth(grand) - (base_total + &min_total);
    if slack.is_negative() {
        return Ok(CoreResult::Empty);
    }
    let share = slack.div_count(n);
    let witness = singles
        .iter()
        .zip(&y)
        .map(|(a, yi)| a + yi + &share)
        .collect();
    Ok(CoreResult::Nonempty(Allocation(witness)))
}

/// True iff the Shapley allocation lies in the core.
pub fn is_implementable<G: TuGame + ?Sized>(game: &G) -> Result<bool> {
    check_bound("implementability", game.n_agents(), ENUMERATION_BOUND)?;
    in_core(game, &shapley(game)?)
}
