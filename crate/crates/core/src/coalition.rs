use std::fmt;

/// Index of an agent in a game roster. Ids are dense, `0..n`.
pub type AgentId = usize;

/// Largest roster a [`Coalition`] can describe.
pub const MAX_AGENTS: usize = 64;

/// A set of agents stored as a bitmask; bit `i` set means agent `i` is a member.
///
/// The derived ordering compares masks numerically, which is the "ascending
/// subset index" order used everywhere a deterministic coalition order is
/// needed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition `{0, .., n-1}`.
    pub fn grand(n: usize) -> Self {
        assert!(n <= MAX_AGENTS, "roster of {n} agents exceeds {MAX_AGENTS}");
        if n == MAX_AGENTS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn singleton(agent: AgentId) -> Self {
        assert!(agent < MAX_AGENTS, "agent id {agent} out of range");
        Coalition(1u64 << agent)
    }

    pub fn from_agents<I: IntoIterator<Item = AgentId>>(agents: I) -> Self {
        agents.into_iter().fold(Coalition::EMPTY, |c, a| c.with(a))
    }

    pub fn with(self, agent: AgentId) -> Self {
        Coalition(self.0 | Coalition::singleton(agent).0)
    }

    pub fn without(self, agent: AgentId) -> Self {
        Coalition(self.0 & !Coalition::singleton(agent).0)
    }

    pub fn contains(self, agent: AgentId) -> bool {
        agent < MAX_AGENTS && self.0 & (1u64 << agent) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Coalition) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    /// `N \ self` for a roster of `n` agents.
    pub fn complement(self, n: usize) -> Self {
        Coalition::grand(n).difference(self)
    }

    /// Highest member id plus one, i.e. the smallest roster containing `self`.
    pub fn span(self) -> usize {
        MAX_AGENTS - self.0.leading_zeros() as usize
    }

    /// True when every member is a valid id in a roster of `n` agents.
    pub fn fits(self, n: usize) -> bool {
        self.span() <= n
    }

    /// Members in ascending id order.
    pub fn agents(self) -> impl Iterator<Item = AgentId> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    /// All subsets of `self` (including `∅` and `self`) in ascending mask order.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Coalition(cur))
        })
    }

    /// Every coalition of an `n`-agent roster in ascending mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        Coalition::grand(n).subsets()
    }

    /// Renders the members through a naming function, e.g. `{A,B}`.
    pub fn display_with<'a, F>(self, name: F) -> String
    where
        F: Fn(AgentId) -> &'a str,
    {
        let names: Vec<&str> = self.agents().map(name).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.agents().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<AgentId> for Coalition {
    fn from_iter<I: IntoIterator<Item = AgentId>>(iter: I) -> Self {
        Coalition::from_agents(iter)
    }
}
