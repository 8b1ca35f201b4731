//! Transferable-utility games and the normalized ISN game.
//!
//! [`TuGame`] is the minimal interface the solution concepts need: a roster
//! size and a characteristic function. [`IsnGame`] is the concrete game built
//! from avoided-cost (`T`) and incurred-cost (`O`) tables, stored densely by
//! coalition mask.

use std::collections::BTreeMap;

use crate::coalition::{AgentId, Coalition};
use crate::error::{check_roster, IsnError, Result};
use crate::money::Money;

/// Default limit on roster size for anything that enumerates all coalitions.
pub const ENUMERATION_BOUND: usize = 16;

/// A cooperative game with transferable utility.
pub trait TuGame {
    fn n_agents(&self) -> usize;

    /// Characteristic function value. `s` must fit the roster.
    fn worth(&self, s: Coalition) -> Money;

    fn grand(&self) -> Coalition {
        Coalition::grand(self.n_agents())
    }
}

impl<G: TuGame + ?Sized> TuGame for &G {
    fn n_agents(&self) -> usize {
        (**self).n_agents()
    }

    fn worth(&self, s: Coalition) -> Money {
        (**self).worth(s)
    }
}

pub(crate) fn check_bound(what: &'static str, n_agents: usize, bound: usize) -> Result<()> {
    if n_agents > bound {
        Err(IsnError::BoundExceeded {
            what,
            n_agents,
            bound,
        })
    } else {
        Ok(())
    }
}

/// A normalized ISN game: `v(S) = T(S) - O(S)` for `|S| >= 2`, zero otherwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsnGame {
    n_agents: usize,
    // Indexed by coalition mask. Entries for |S| <= 1 are kept at zero and are
    // never consulted; `worth` answers those by rule.
    values: Vec<Money>,
}

/// Builds the game `v(S) = T(S) - O(S)` from per-coalition cost tables.
///
/// Both tables must cover every coalition with at least two members. Entries
/// for the empty set or singletons are accepted and ignored.
pub fn make_isn_game(
    n_agents: usize,
    t_table: &BTreeMap<Coalition, Money>,
    o_table: &BTreeMap<Coalition, Money>,
) -> Result<IsnGame> {
    if n_agents == 0 {
        return Err(IsnError::EmptyRoster);
    }
    check_bound("an ISN game", n_agents, ENUMERATION_BOUND)?;
    for &s in t_table.keys().chain(o_table.keys()) {
        if let Some(agent) = s.agents().find(|&a| a >= n_agents) {
            return Err(IsnError::AgentCountMismatch {
                coalition: s,
                agent,
                n_agents,
            });
        }
    }
    IsnGame::try_from_fn(n_agents, |s| {
        let t = t_table.get(&s).ok_or(IsnError::MissingCoalition {
            table: "T",
            coalition: s,
        })?;
        let o = o_table.get(&s).ok_or(IsnError::MissingCoalition {
            table: "O",
            coalition: s,
        })?;
        Ok(t - o)
    })
}

impl IsnGame {
    /// Builds a game from a value function queried once per coalition with
    /// `|S| >= 2`, in ascending mask order.
    pub fn try_from_fn<F>(n_agents: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(Coalition) -> Result<Money>,
    {
        if n_agents == 0 {
            return Err(IsnError::EmptyRoster);
        }
        check_bound("an ISN game", n_agents, ENUMERATION_BOUND)?;
        let mut values = Vec::with_capacity(1 << n_agents);
        for s in Coalition::all(n_agents) {
            values.push(if s.len() >= 2 { f(s)? } else { Money::zero() });
        }
        Ok(IsnGame { n_agents, values })
    }

    pub fn from_fn<F>(n_agents: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(Coalition) -> Money,
    {
        Self::try_from_fn(n_agents, |s| Ok(f(s)))
    }

    /// Builds a game from a sparse map; coalitions with `|S| >= 2` that are
    /// absent get value zero.
    pub fn from_sparse(n_agents: usize, values: &BTreeMap<Coalition, Money>) -> Result<Self> {
        for &s in values.keys() {
            check_roster(s, n_agents)?;
        }
        Self::from_fn(n_agents, |s| values.get(&s).cloned().unwrap_or_default())
    }

    pub(crate) fn from_dense(n_agents: usize, values: Vec<Money>) -> Self {
        debug_assert_eq!(values.len(), 1 << n_agents);
        let mut values = values;
        for s in Coalition::all(n_agents).filter(|s| s.len() <= 1) {
            values[s.bits() as usize] = Money::zero();
        }
        IsnGame { n_agents, values }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// `v(S)`, or `UnknownAgent` if `s` mentions an id outside the roster.
    pub fn value(&self, s: Coalition) -> Result<Money> {
        check_roster(s, self.n_agents)?;
        Ok(self.worth(s))
    }

    /// Borrowing variant of [`IsnGame::value`] for in-roster coalitions.
    pub fn value_ref(&self, s: Coalition) -> &Money {
        &self.values[s.bits() as usize]
    }

    /// Stored values for every coalition with at least two members, in
    /// ascending mask order.
    pub fn entries(&self) -> impl Iterator<Item = (Coalition, &Money)> + '_ {
        Coalition::all(self.n_agents)
            .filter(|s| s.len() >= 2)
            .map(move |s| (s, &self.values[s.bits() as usize]))
    }

    /// Validates superadditivity: `v(S ∪ T) >= v(S) + v(T)` for all disjoint
    /// non-empty `S`, `T`.
    pub fn check_superadditive(&self) -> Superadditivity {
        check_superadditive(self)
    }
}

impl TuGame for IsnGame {
    fn n_agents(&self) -> usize {
        self.n_agents
    }

    fn worth(&self, s: Coalition) -> Money {
        if s.len() <= 1 {
            Money::zero()
        } else {
            self.values[s.bits() as usize].clone()
        }
    }
}

/// Outcome of a superadditivity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Superadditivity {
    Holds,
    /// `v(left ∪ right) < v(left) + v(right)`.
    Violated {
        left: Coalition,
        right: Coalition,
    },
}

impl Superadditivity {
    pub fn holds(&self) -> bool {
        matches!(self, Superadditivity::Holds)
    }
}

/// Scans disjoint pairs `(S, T)` with `S < T` by mask, `S` ascending, and
/// reports the first violation.
pub fn check_superadditive<G: TuGame + ?Sized>(game: &G) -> Superadditivity {
    let grand = game.grand();
    for s in grand.subsets().skip(1) {
        let vs = game.worth(s);
        for t in grand.difference(s).subsets().filter(|&t| t > s) {
            if game.worth(s.union(t)) < &vs + game.worth(t) {
                return Superadditivity::Violated { left: s, right: t };
            }
        }
    }
    Superadditivity::Holds
}

/// The restriction of a game to a group of agents, renumbered `0..k` in
/// ascending id order.
#[derive(Clone, Debug)]
pub struct Subgame<'a, G: ?Sized> {
    parent: &'a G,
    members: Vec<AgentId>,
}

impl<'a, G: TuGame + ?Sized> Subgame<'a, G> {
    pub fn new(parent: &'a G, group: Coalition) -> Result<Self> {
        check_roster(group, parent.n_agents())?;
        Ok(Subgame {
            parent,
            members: group.agents().collect(),
        })
    }

    pub fn members(&self) -> &[AgentId] {
        &self.members
    }

    /// Maps a coalition of local ids to the parent's ids.
    pub fn lift(&self, local: Coalition) -> Coalition {
        local.agents().map(|i| self.members[i]).collect()
    }
}

impl<G: TuGame + ?Sized> TuGame for Subgame<'_, G> {
    fn n_agents(&self) -> usize {
        self.members.len()
    }

    fn worth(&self, s: Coalition) -> Money {
        self.parent.worth(self.lift(s))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn tables(
        n: usize,
        diffs: &[(&[AgentId], i64)],
    ) -> (BTreeMap<Coalition, Money>, BTreeMap<Coalition, Money>) {
        let mut t = BTreeMap::new();
        let mut o = BTreeMap::new();
        for s in Coalition::all(n).filter(|s| s.len() >= 2) {
            let d = diffs.iter().find(|(g, _)| c(g) == s).map_or(0, |e| e.1);
            t.insert(s, m(100 + d));
            o.insert(s, m(100));
        }
        (t, o)
    }

    #[test]
    fn two_agent_subtraction() {
        let mut t = BTreeMap::new();
        let mut o = BTreeMap::new();
        t.insert(c(&[0, 1]), m(100));
        o.insert(c(&[0, 1]), m(80));
        let g = make_isn_game(2, &t, &o).unwrap();
        assert_eq!(g.value(c(&[0, 1])).unwrap(), m(20));
    }

    #[test]
    fn g3_from_tables() {
        let (t, o) = tables(
            3,
            &[(&[0, 1], 10), (&[0, 2], 4), (&[1, 2], 6), (&[0, 1, 2], 12)],
        );
        let g = make_isn_game(3, &t, &o).unwrap();
        assert_eq!(g, g3());
        assert_eq!(g.value(c(&[0, 1])).unwrap(), m(10));
        assert_eq!(g.value(c(&[2])).unwrap(), m(0));
        assert_eq!(g.value(Coalition::EMPTY).unwrap(), m(0));
    }

    #[test]
    fn single_agent_game_is_all_zero() {
        let g = make_isn_game(1, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(g.value(Coalition::EMPTY).unwrap(), m(0));
        assert_eq!(g.value(c(&[0])).unwrap(), m(0));
        assert!(g.check_superadditive().holds());
    }

    #[test]
    fn construction_errors() {
        let (mut t, o) = tables(3, &[]);
        t.remove(&c(&[1, 2]));
        assert_eq!(
            make_isn_game(3, &t, &o),
            Err(IsnError::MissingCoalition {
                table: "T",
                coalition: c(&[1, 2])
            })
        );
        let (mut t, o) = tables(3, &[]);
        t.insert(c(&[0, 3]), m(1));
        assert!(matches!(
            make_isn_game(3, &t, &o),
            Err(IsnError::AgentCountMismatch { agent: 3, .. })
        ));
        assert_eq!(make_isn_game(0, &t, &o), Err(IsnError::EmptyRoster));
        assert!(matches!(
            IsnGame::from_fn(17, |_| m(0)),
            Err(IsnError::BoundExceeded { bound: 16, .. })
        ));
    }

    #[test]
    fn value_rejects_unknown_agents() {
        assert!(matches!(
            g3().value(c(&[0, 5])),
            Err(IsnError::UnknownAgent { agent: 5, .. })
        ));
    }

    #[test]
    fn superadditivity_verdicts() {
        assert_eq!(g3().check_superadditive(), Superadditivity::Holds);
        let bad = sparse(3, &[(&[0, 1], 5), (&[0, 1, 2], 3)]);
        assert_eq!(
            bad.check_superadditive(),
            Superadditivity::Violated {
                left: c(&[0, 1]),
                right: c(&[2])
            }
        );
    }

    #[test]
    fn subgame_renumbers_members() {
        let g = g3();
        let sub = Subgame::new(&g, c(&[1, 2])).unwrap();
        assert_eq!(sub.n_agents(), 2);
        assert_eq!(sub.worth(c(&[0, 1])), m(6));
        assert_eq!(sub.lift(c(&[0])), c(&[1]));
    }

    fn brute_superadditive(g: &IsnGame) -> bool {
        let n = g.n_agents();
        for s in 1u64..(1 << n) {
            for t in 1u64..(1 << n) {
                if s & t != 0 {
                    continue;
                }
                let (s, t) = (Coalition::from_bits(s), Coalition::from_bits(t));
                if g.worth(s.union(t)) < g.worth(s) + g.worth(t) {
                    return false;
                }
            }
        }
        true
    }

    fn arb_game(max_n: usize) -> impl Strategy<Value = IsnGame> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(-5i64..20, 1 << n)
                .prop_map(move |vals| IsnGame::from_fn(n, |s| m(vals[s.bits() as usize])).unwrap())
        })
    }

    proptest! {
        #[test]
        fn small_coalitions_are_worth_zero(g in arb_game(8)) {
            for s in Coalition::all(g.n_agents()).filter(|s| s.len() <= 1) {
                prop_assert_eq!(g.value(s).unwrap(), m(0));
            }
        }

        #[test]
        fn tables_reproduce_differences(n in 1usize..6, seed in prop::collection::vec((0i64..50, 0i64..50), 64)) {
            let mut t = BTreeMap::new();
            let mut o = BTreeMap::new();
            for s in Coalition::all(n).filter(|s| s.len() >= 2) {
                let (a, b) = seed[s.bits() as usize];
                t.insert(s, m(a));
                o.insert(s, m(b));
            }
            let g = make_isn_game(n, &t, &o).unwrap();
            for (s, v) in g.entries() {
                prop_assert_eq!(v, &(&t[&s] - &o[&s]));
            }
        }

        #[test]
        fn superadditivity_matches_double_loop(g in arb_game(6)) {
            prop_assert_eq!(g.check_superadditive().holds(), brute_superadditive(&g));
        }
    }
}
