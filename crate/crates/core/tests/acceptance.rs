//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.
//!
//! All comparisons are exact rational equalities; the only tolerance is the
//! relative shortfall used to probe subsidy minimality.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use common::{c, m, rng};
use isn_core::{
    coordinate, core_nonempty, enforce_policy, evaluate, from_isn_game, is_implementable,
    net_shapley, scenario_to_game, shapley, shapley_bruteforce, synthesize_promotion,
    validate_policy, Coalition, IsnError, IsnGame, McNet, McNetRule, Money, Policy, PolicyLabel,
    PolicyVerdict, TuGame,
};
use rand::Rng;

/// Relative shortfall below `ι_min` that must break implementability.
fn minimality_shortfall() -> Money {
    Money::ratio(1, 1000)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fidelity_games() -> Vec<IsnGame> {
    let mut r = rng(101);
    (0..200)
        .map(|_| {
            let n = r.random_range(2..=8);
            common::random_game(&mut r, n, -20, 60)
        })
        .collect()
}

fn shapley_games() -> Vec<IsnGame> {
    let mut r = rng(102);
    (0..100)
        .map(|_| {
            let n = r.random_range(2..=7);
            common::random_game(&mut r, n, -20, 60)
        })
        .collect()
}

fn two_firm_games() -> Vec<IsnGame> {
    let mut r = rng(104);
    (0..100)
        .map(|_| scenario_to_game(&common::random_scenario(&mut r, 2, 6, 20)).unwrap())
        .collect()
}

fn mcnet_fidelity() -> Outcome {
    let games = fidelity_games();
    let mut checked = 0usize;
    for (k, g) in games.iter().enumerate() {
        let net = from_isn_game(g).map_err(|e| e.to_string())?;
        for s in Coalition::all(g.n_agents()) {
            ensure!(
                evaluate(&net, s) == g.worth(s),
                "game {k}: coalition {s} differs"
            );
            checked += 1;
        }
    }
    Ok(format!(
        "{} games, {checked} coalitions, exact",
        games.len()
    ))
}

fn shapley_agreement() -> Outcome {
    let games = shapley_games();
    for (k, g) in games.iter().enumerate() {
        let net = from_isn_game(g).map_err(|e| e.to_string())?;
        let brute = shapley_bruteforce(g).map_err(|e| e.to_string())?;
        ensure!(
            net_shapley(&net) == brute,
            "game {k}: rule-wise and permutation Shapley differ"
        );
    }
    Ok(format!("{} games, exact", games.len()))
}

fn efficiency() -> Outcome {
    let mut count = 0;
    for (k, g) in fidelity_games()
        .iter()
        .chain(&shapley_games())
        .chain(&two_firm_games())
        .enumerate()
    {
        let phi = shapley(g).map_err(|e| e.to_string())?;
        ensure!(phi.total() == g.worth(g.grand()), "game {k}: Σφ ≠ v(N)");
        count += 1;
    }
    Ok(format!("{count} games, Σφ = v(N) exactly"))
}

fn two_firm_implementable() -> Outcome {
    let games = two_firm_games();
    let mut trading = 0;
    for (k, g) in games.iter().enumerate() {
        ensure!(
            is_implementable(g).unwrap(),
            "scenario {k} is not implementable"
        );
        trading += g.worth(g.grand()).is_positive() as usize;
    }
    ensure!(trading >= 20, "only {trading} scenarios with any saving");
    Ok(format!(
        "{} scenarios ({trading} with positive saving)",
        games.len()
    ))
}

fn g3() -> IsnGame {
    let v = [
        (c(&[0, 1]), 10),
        (c(&[0, 2]), 4),
        (c(&[1, 2]), 6),
        (c(&[0, 1, 2]), 12),
    ];
    IsnGame::from_sparse(3, &v.into_iter().map(|(s, x)| (s, m(x))).collect()).unwrap()
}

fn empty_core_detection() -> Outcome {
    let symmetric = IsnGame::from_fn(3, |s| match s.len() {
        2 => m(10),
        3 => m(12),
        _ => Money::zero(),
    })
    .unwrap();
    ensure!(
        core_nonempty(&symmetric).unwrap().witness().is_none(),
        "symmetric game reported core-nonempty"
    );

    let g = g3();
    let w = core_nonempty(&g).unwrap();
    let Some(x) = w.witness() else {
        return Err("G3 reported core-empty".into());
    };
    ensure!(x.total() == m(12), "witness is not efficient");
    for s in Coalition::all(3).skip(1) {
        let sum: Money = s.agents().map(|i| &x[i]).sum();
        ensure!(sum >= g.worth(s), "witness violates {s}");
    }

    let mut r = rng(105);
    let (mut empty, mut nonempty) = (0, 0);
    for k in 0..50 {
        let n = r.random_range(2..=4);
        let g = common::random_game(&mut r, n, 0, 30);
        let ours = core_nonempty(&g).unwrap().is_nonempty();
        ensure!(
            ours == common::core_vertex(&g).is_some(),
            "random game {k}: verdict disagrees with oracle"
        );
        if ours {
            nonempty += 1;
        } else {
            empty += 1;
        }
    }
    let shown: Vec<String> = x.payoffs().iter().map(Money::to_string).collect();
    Ok(format!("symmetric empty, G3 witness ({}), 50 random games agree ({empty} empty / {nonempty} nonempty)", shown.join(", ")))
}

fn net_with(n: usize, target: Coalition, iota: Money) -> McNet {
    let mut net = McNet::empty(n);
    if !iota.is_zero() {
        net.push(McNetRule::exact(target, n, iota).unwrap())
            .unwrap();
    }
    net
}

fn promotion_existence() -> Outcome {
    let mut r = rng(106);
    let mut positive = 0;
    let keep = Money::from_integer(1) - minimality_shortfall();
    for k in 0..100 {
        let n = r.random_range(3..=6);
        let g = common::random_game(&mut r, n, 0, 40);
        let target = common::random_group(&mut r, n);
        let promo = synthesize_promotion(&g, target).map_err(|e| e.to_string())?;
        let implementable = |iota: Money| {
            let cg = coordinate(&g, &net_with(n, target, iota)).unwrap();
            is_implementable(&cg.subgame(target).unwrap()).unwrap()
        };
        ensure!(
            implementable(promo.iota_min.clone()),
            "game {k}: target {target} not implementable"
        );
        if promo.iota_min.is_positive() {
            positive += 1;
            ensure!(
                !implementable(&promo.iota_min * &keep),
                "game {k}: a smaller subsidy than {} still works",
                promo.iota_min
            );
        }
    }
    ensure!(positive >= 20, "only {positive} games needed a subsidy");
    Ok(format!(
        "100 games implementable, {positive} minimal subsidies checked at (1 - 1/1000)"
    ))
}

fn worked_constant() -> Outcome {
    let g = g3();
    let policy = Policy::new()
        .with(c(&[0, 1, 2]), PolicyLabel::Promoted)
        .unwrap();
    let net = enforce_policy(&g, &policy, &m(1)).map_err(|e| e.to_string())?;
    ensure!(
        net.len() == 1,
        "expected one incentive rule, got {}",
        net.len()
    );
    let rule = &net.rules()[0];
    ensure!(
        rule.positive() == c(&[0, 1, 2])
            && rule.negative().is_empty()
            && *rule.value() == Money::ratio(1, 2),
        "unexpected rule {rule:?}"
    );
    let cg = coordinate(&g, &net).unwrap();
    let expected = vec![Money::ratio(9, 2), Money::ratio(11, 2), Money::ratio(5, 2)];
    ensure!(
        common::permutation_shapley(&cg) == expected,
        "permutation oracle disagrees"
    );
    ensure!(
        shapley(&cg).unwrap().into_payoffs() == expected,
        "library Shapley disagrees"
    );
    ensure!(
        is_implementable(&cg).unwrap(),
        "coordinated G3 not implementable"
    );
    Ok("subsidy 1/2, Shapley (9/2, 11/2, 5/2)".into())
}

fn mutual_exclusivity() -> Outcome {
    let mut r = rng(108);
    for k in 0..50 {
        let n = r.random_range(4..=6);
        let g = common::random_game(&mut r, n, 0, 40);
        let (a, b) = common::disjoint_groups(&mut r, n);
        let policy = Policy::new()
            .with(a, PolicyLabel::Promoted)
            .unwrap()
            .with(b, PolicyLabel::Promoted)
            .unwrap();
        let net = enforce_policy(&g, &policy, &m(1)).map_err(|e| e.to_string())?;
        let cg = coordinate(&g, &net).unwrap();
        for group in [a, b] {
            ensure!(
                is_implementable(&cg.subgame(group).unwrap()).unwrap(),
                "game {k}: {group} not implementable alongside the other group"
            );
        }
    }
    let overlapping = Policy::new()
        .with(c(&[0, 1]), PolicyLabel::Promoted)
        .unwrap()
        .with(c(&[1, 2]), PolicyLabel::Promoted)
        .unwrap();
    ensure!(
        matches!(validate_policy(&overlapping), PolicyVerdict::Overlap { .. }),
        "overlapping promoted groups accepted"
    );
    ensure!(
        matches!(
            enforce_policy(&g3(), &overlapping, &m(1)),
            Err(IsnError::PolicyInvalid { .. })
        ),
        "enforcement accepted overlapping promoted groups"
    );
    Ok("50 games with two promoted groups, overlap rejected".into())
}

fn prohibition_contract() -> Outcome {
    let mut r = rng(109);
    let mut prohibited_checked = 0;
    for k in 0..50 {
        let n = r.random_range(3..=6);
        let g = common::random_game(&mut r, n, -10, 40);
        let eps = Money::ratio(r.random_range(1..=9), r.random_range(1..=4));
        let mut policy = Policy::new();
        if n >= 4 && r.random_bool(0.5) {
            let (a, b) = common::disjoint_groups(&mut r, n);
            policy.label(a, PolicyLabel::Promoted).unwrap();
            policy.label(b, PolicyLabel::Prohibited).unwrap();
        }
        for _ in 0..r.random_range(1..=3) {
            let group = common::random_group(&mut r, n);
            let label = if r.random_bool(0.7) {
                PolicyLabel::Prohibited
            } else {
                PolicyLabel::Permitted
            };
            let _ = policy.label(group, label);
        }
        let net = enforce_policy(&g, &policy, &eps).map_err(|e| e.to_string())?;
        let cg = coordinate(&g, &net).unwrap();
        for s in Coalition::all(n) {
            match policy.classify(s) {
                PolicyLabel::Prohibited => {
                    prohibited_checked += 1;
                    ensure!(
                        cg.worth(s) == -eps.clone(),
                        "game {k}: c({s}) = {}, expected -{eps}",
                        cg.worth(s)
                    );
                }
                PolicyLabel::Permitted => {
                    ensure!(cg.worth(s) == g.worth(s), "game {k}: unlabeled {s} changed");
                }
                PolicyLabel::Promoted => {}
            }
        }
    }
    Ok(format!(
        "50 policies, {prohibited_checked} prohibited groups at -ε, all other groups unchanged"
    ))
}

fn cli_determinism() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut compared = 0;
    for scenario in ["g3", "w"] {
        let input = root.join(format!("tests/data/{scenario}.json"));
        for cmd in ["analyze", "enforce"] {
            for (ext, extra) in [("txt", None), ("json", Some(["--format", "json"]))] {
                let golden =
                    std::fs::read(root.join(format!("tests/golden/{scenario}_{cmd}.{ext}")))
                        .map_err(|e| e.to_string())?;
                for _ in 0..2 {
                    let mut command = Command::new(env!("CARGO_BIN_EXE_isn"));
                    command.arg(cmd);
                    if let Some(flags) = extra {
                        command.args(flags);
                    }
                    let out = command.arg(&input).output().map_err(|e| e.to_string())?;
                    ensure!(out.status.success(), "{cmd} {scenario} failed");
                    ensure!(
                        out.stdout == golden,
                        "{cmd} {scenario} ({ext}) differs from golden output"
                    );
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} runs byte-identical to golden files"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("MC-Net fidelity", mcnet_fidelity),
        ("Shapley agreement", shapley_agreement),
        ("efficiency", efficiency),
        ("two-firm scenarios implementable", two_firm_implementable),
        ("empty-core detection", empty_core_detection),
        ("constructive incentives", promotion_existence),
        ("worked G3 constant", worked_constant),
        ("mutual exclusivity", mutual_exclusivity),
        ("prohibition contract", prohibition_contract),
        ("CLI determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
