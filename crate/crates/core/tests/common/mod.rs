#![allow(dead_code)]

use efrlab_core::game::shipped::GameId;
use efrlab_core::game::{play_from, GameTree, NodeId, Player, StrategyPlan};
use efrlab_core::solver::{efr, justifiable, justification_context, Q};
use num_traits::Signed;

/// Brute-force justifiability: scan every belief over `rivals` whose weights
/// are fractions with denominator at most 64 (vertices included), looking for
/// one under which the candidate is at least as good as each alternative.
pub fn grid_justifiable(
    game: &GameTree,
    candidate: &StrategyPlan,
    node: NodeId,
    rivals: &[StrategyPlan],
    alternatives: &[StrategyPlan],
) -> bool {
    let owner = candidate.owner();
    let u = |mine: &StrategyPlan, r: &StrategyPlan| -> i64 {
        let leaf = match owner {
            Player::C => play_from(game, node, mine, r),
            Player::P => play_from(game, node, r, mine),
        };
        game.node(leaf).payoff().unwrap().of(owner) as i64
    };
    let gain: Vec<Vec<i64>> = alternatives
        .iter()
        .map(|a| rivals.iter().map(|r| u(candidate, r) - u(a, r)).collect())
        .collect();
    let ok = |w: &[i64]| {
        gain.iter()
            .all(|row| row.iter().zip(w).map(|(g, x)| g * x).sum::<i64>() >= 0)
    };
    let n = rivals.len();
    // Any fraction with denominator d <= 32 also has denominator 2d <= 64.
    (33..=64).any(|d| compositions(d, n, &mut Vec::new(), &ok))
}

fn compositions(left: i64, parts: usize, acc: &mut Vec<i64>, ok: &dyn Fn(&[i64]) -> bool) -> bool {
    if parts == 1 {
        acc.push(left);
        let hit = ok(acc);
        acc.pop();
        return hit;
    }
    for x in 0..=left {
        acc.push(x);
        let hit = compositions(left - x, parts - 1, acc, ok);
        acc.pop();
        if hit {
            return true;
        }
    }
    false
}

pub struct OracleTally {
    pub checked: usize,
    pub disagreements: Vec<String>,
}

/// Compares the exact check with the grid search on every (level, node,
/// candidate) context the elimination visits in each game.
pub fn compare_with_grid(games: &[GameTree]) -> OracleTally {
    let mut tally = OracleTally {
        checked: 0,
        disagreements: Vec::new(),
    };
    for g in games {
        let report = efr(g);
        for k in 0..report.levels.len() - 1 {
            for player in Player::BOTH {
                for &h in g.player_nodes(player) {
                    let (rivals, alts) = justification_context(g, &report.levels, k, player, h);
                    for cand in &report.levels[k][player.index()] {
                        let exact = justifiable(g, cand, h, &rivals, &alts).unwrap();
                        if let Some(w) = &exact {
                            let mine = w.expected_payoff(g, h, cand);
                            if alts.iter().any(|a| w.expected_payoff(g, h, a) > mine) {
                                tally.disagreements.push(format!(
                                    "{} {} at {}: witness does not justify",
                                    g.name(),
                                    cand.notation(g),
                                    g.node(h).name
                                ));
                            }
                            let total: Q = w.support().iter().map(|(_, q)| q.clone()).sum();
                            assert!(w.support().iter().all(|(_, q)| q.is_positive()));
                            assert_eq!(total, Q::from_integer(1.into()));
                        }
                        let grid = grid_justifiable(g, cand, h, &rivals, &alts);
                        tally.checked += 1;
                        if exact.is_some() != grid {
                            tally.disagreements.push(format!(
                                "{} level {k} {} at {}: exact {} grid {}",
                                g.name(),
                                cand.notation(g),
                                g.node(h).name,
                                exact.is_some(),
                                grid
                            ));
                        }
                    }
                }
            }
        }
    }
    tally
}

/// BI C, BI P, EFR C, EFR P per game, as published.
pub const GOLDEN_SETS: [(GameId, [&str; 4]); 6] = [
    (GameId::Game1, ["a;e", "c;g", "a;e", "d;g"]),
    (GameId::Game2, ["a;e", "c;g", "a;e", "c;g"]),
    (GameId::Game3, ["a;e, b;e, a;f, b;f", "c;g, d;g, c;h, d;h", "a;e, a;f, b;f", "d;g, d;h"]),
    (GameId::Game4, ["a;e, b;e, a;f, b;f", "c;g, d;g, c;h, d;h", "a;e, b;e, a;f, b;f", "c;g, d;g, c;h, d;h"]),
    (GameId::Game1Prime, ["e", "c;g", "e", "c;g"]),
    (GameId::Game3Prime, ["e, f", "c;g, d;g, c;h, d;h", "e, f", "c;g, d;g, c;h, d;h"]),
];

/// Standard normal upper tail by composite Simpson integration of the
/// density over `[x, x + 40]`.
pub fn normal_sf(x: f64) -> f64 {
    let n = 200_000;
    let (a, b) = (x, x + 40.0);
    let h = (b - a) / n as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(a) + pdf(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn oracle_p(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    let (x1, x2) = (s1 as f64, s2 as f64);
    let (m1, m2) = (n1 as f64, n2 as f64);
    let p = (x1 + x2) / (m1 + m2);
    let se = (p * (1.0 - p) * (m1 + m2) / (m1 * m2)).sqrt();
    if se == 0.0 {
        return 1.0;
    }
    let z = ((x1 / m1 - x2 / m2) / se).abs();
    (2.0 * normal_sf(z)).min(1.0)
}
