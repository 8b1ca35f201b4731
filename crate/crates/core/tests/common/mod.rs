//! Reference oracles and seeded generators shared by the integration tests.
//!
//! The oracles deliberately avoid the library's algorithms: Shapley values by
//! walking every ordering, core emptiness by enumerating vertices, and
//! exchange costs by trying every integer shipment vector.
#![allow(dead_code)]

use std::collections::BTreeMap;

use isn_core::{
    AgentId, Coalition, ExchangeScenario, IsnGame, Money, ResourceStream, StreamKind, TuGame,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m(n: i64) -> Money {
    Money::from_integer(n)
}

pub fn c(agents: &[AgentId]) -> Coalition {
    Coalition::from_agents(agents.iter().copied())
}

/// Random normalized game. Values of coalitions with two or more members are
/// drawn from `lo..=hi`, in halves about a quarter of the time.
pub fn random_game(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> IsnGame {
    IsnGame::from_fn(n, |s| {
        if s.len() < 2 {
            return Money::zero();
        }
        let v = rng.random_range(lo..=hi);
        if rng.random_bool(0.25) {
            Money::ratio(2 * v + 1, 2)
        } else {
            m(v)
        }
    })
    .unwrap()
}

/// Random nonempty group of at least two agents out of `n`.
pub fn random_group(rng: &mut impl Rng, n: usize) -> Coalition {
    loop {
        let s = Coalition::from_bits(rng.random_range(0..1u64 << n));
        if s.len() >= 2 {
            return s;
        }
    }
}

/// Two disjoint random groups of at least two agents each (needs `n >= 4`).
pub fn disjoint_groups(rng: &mut impl Rng, n: usize) -> (Coalition, Coalition) {
    loop {
        let a = random_group(rng, n);
        let rest = a.complement(n);
        if rest.len() < 2 {
            continue;
        }
        let picked: Vec<AgentId> = rest.agents().filter(|_| rng.random_bool(0.7)).collect();
        let b = c(&picked);
        if b.len() >= 2 {
            return (a, b);
        }
    }
}

const RESOURCES: [&str; 2] = ["r", "s"];

/// Random exchange scenario over `n` firms with `1..=max_streams` streams.
/// Quantities are integers in `1..=max_quantity`.
pub fn random_scenario(
    rng: &mut impl Rng,
    n: usize,
    max_streams: usize,
    max_quantity: i64,
) -> ExchangeScenario {
    let k = rng.random_range(1..=max_streams);
    let streams = (0..k)
        .map(|_| {
            let firm = rng.random_range(0..n);
            let resource = RESOURCES[rng.random_range(0..RESOURCES.len())];
            let quantity = m(rng.random_range(1..=max_quantity));
            let standalone = m(rng.random_range(0..=12));
            let treatment = m(rng.random_range(0..=4));
            if rng.random_bool(0.5) {
                ResourceStream::offer(firm, resource, quantity, standalone, treatment)
            } else {
                ResourceStream::demand(firm, resource, quantity, standalone, treatment)
            }
        })
        .collect();
    let mut transport = BTreeMap::new();
    let mut transaction = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for r in RESOURCES {
                if rng.random_bool(0.7) {
                    transport.insert((a, b, r.to_string()), m(rng.random_range(0..=3)));
                }
            }
            if rng.random_bool(0.6) {
                transaction.insert((a, b), m(rng.random_range(0..=15)));
            }
        }
    }
    ExchangeScenario::new(n, streams, transport, transaction).unwrap()
}

/// Shapley value by averaging marginal contributions over all `n!` orderings.
pub fn permutation_shapley<G: TuGame>(game: &G) -> Vec<Money> {
    let n = game.n_agents();
    let mut totals = vec![Money::zero(); n];
    let mut order: Vec<AgentId> = (0..n).collect();
    let mut count = 0i64;
    permute(&mut order, 0, &mut |perm| {
        let mut s = Coalition::EMPTY;
        let mut prev = game.worth(s);
        for &i in perm {
            s = s.with(i);
            let now = game.worth(s);
            totals[i] += &now - &prev;
            prev = now;
        }
        count += 1;
    });
    totals.into_iter().map(|t| t / m(count)).collect()
}

fn permute(items: &mut [AgentId], k: usize, visit: &mut impl FnMut(&[AgentId])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Solves `a x = b` by Gauss-Jordan elimination; `None` if singular.
fn solve_square(mut a: Vec<Vec<Money>>, mut b: Vec<Money>) -> Option<Vec<Money>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
            let d = &f * &b[col];
            b[r] -= d;
        }
    }
    Some(b)
}

/// A core vertex, if the core is nonempty.
///
/// The core is a bounded polytope (singleton constraints plus efficiency), so
/// it is nonempty iff some choice of `n - 1` tight coalition constraints plus
/// efficiency pins down a feasible point.
pub fn core_vertex<G: TuGame>(game: &G) -> Option<Vec<Money>> {
    let n = game.n_agents();
    let grand = Coalition::grand(n);
    let feasible = |x: &[Money]| {
        grand.subsets().skip(1).all(|s| {
            let sum: Money = s.agents().map(|i| &x[i]).sum();
            sum >= game.worth(s)
        })
    };
    let row = |s: Coalition| (0..n).map(|i| m(s.contains(i) as i64)).collect::<Vec<_>>();
    let proper: Vec<Coalition> = grand.subsets().skip(1).filter(|&s| s != grand).collect();
    if n == 1 {
        let x = vec![game.worth(grand)];
        return feasible(&x).then_some(x);
    }
    let mut pick: Vec<usize> = (0..n - 1).collect();
    loop {
        let mut a = vec![row(grand)];
        let mut b = vec![game.worth(grand)];
        for &k in &pick {
            a.push(row(proper[k]));
            b.push(game.worth(proper[k]));
        }
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                return Some(x);
            }
        }
        // next combination of n - 1 indices out of proper.len()
        let (r, top) = (pick.len(), proper.len());
        let mut i = r;
        while i > 0 && pick[i - 1] == top - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        pick[i - 1] += 1;
        for j in i..r {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// `O(S)` by trying every integer shipment vector.
///
/// Integer plans suffice: with integer capacities, the flow problem for any
/// fixed set of trading pairs has an integral optimum. Only usable for tiny
/// scenarios.
pub fn brute_force_o(sc: &ExchangeScenario, s: Coalition) -> Money {
    let streams = sc.streams();
    let edges: Vec<(usize, usize)> = (0..streams.len())
        .flat_map(|o| (0..streams.len()).map(move |d| (o, d)))
        .filter(|&(o, d)| {
            let (so, sd) = (&streams[o], &streams[d]);
            so.is_offer()
                && !sd.is_offer()
                && so.firm != sd.firm
                && so.resource == sd.resource
                && s.contains(so.firm)
                && s.contains(sd.firm)
                && sc.transport_cost(so.firm, sd.firm, &so.resource).is_some()
        })
        .collect();
    let cap: Vec<i64> = streams.iter().map(|st| to_i64(&st.quantity)).collect();
    let mut best: Option<Money> = None;
    let mut flow = vec![0i64; edges.len()];
    loop {
        let mut used = vec![0i64; streams.len()];
        for (e, &(o, d)) in edges.iter().enumerate() {
            used[o] += flow[e];
            used[d] += flow[e];
        }
        if used.iter().zip(&cap).all(|(u, q)| u <= q) {
            let cost = plan_cost(sc, s, &edges, &flow);
            if best.as_ref().is_none_or(|b| cost < *b) {
                best = Some(cost);
            }
        }
        // odometer over 0..=cap of the offer side
        let mut e = 0;
        loop {
            if e == edges.len() {
                return best.unwrap();
            }
            if flow[e] < cap[edges[e].0] {
                flow[e] += 1;
                break;
            }
            flow[e] = 0;
            e += 1;
        }
    }
}

fn plan_cost(sc: &ExchangeScenario, s: Coalition, edges: &[(usize, usize)], flow: &[i64]) -> Money {
    let streams = sc.streams();
    let mut shipped = vec![0i64; streams.len()];
    let mut pairs = std::collections::BTreeSet::new();
    let mut total = Money::zero();
    for (&(o, d), &q) in edges.iter().zip(flow) {
        if q == 0 {
            continue;
        }
        let (so, sd) = (&streams[o], &streams[d]);
        let transport = sc.transport_cost(so.firm, sd.firm, &so.resource).unwrap();
        total += m(q) * (&so.unit_treatment_cost + &sd.unit_treatment_cost + transport);
        shipped[o] += q;
        shipped[d] += q;
        pairs.insert((so.firm, sd.firm));
    }
    for (a, b) in pairs {
        total += sc.transaction_cost(a, b);
    }
    for (k, st) in streams.iter().enumerate() {
        if s.contains(st.firm) {
            let standalone = match &st.kind {
                StreamKind::Offer {
                    unit_discharge_cost,
                } => unit_discharge_cost,
                StreamKind::Demand { unit_purchase_cost } => unit_purchase_cost,
            };
            total += (&st.quantity - m(shipped[k])) * standalone;
        }
    }
    total
}

fn to_i64(x: &Money) -> i64 {
    x.to_string().parse().expect("integer quantity")
}
