//! The computer player's per-trial plans, fixed before the session starts.
//!
//! Each plan is a best response to a conjecture about the participant's
//! plan. A schedule assigns one (plan, conjecture) pair to every
//! experimental trial; a configurable share of rounds in each game has the
//! computer open with a move other than its backward-induction root move.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::shipped::{game, GameId};
use crate::game::{enumerate_strategies, reaches, GameError, GameTree, NodeId, Player, StrategyPlan};
use crate::solver::{backward_induction, Conjecture, ConjectureSpec, SolverError, Q};

#[derive(Debug, Error)]
pub enum OpponentError {
    #[error("invalid opponent config: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("malformed schedule: {0}")]
    Schedule(String),
}

/// Where the computer's conjectures come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeliefFamily {
    /// Point masses on each participant plan.
    PointMass,
    /// For each way of fixing the participant's earlier moves, a 50-50
    /// lottery over the two moves at the participant's last node.
    Lottery,
    /// Both of the above.
    Mixed,
    /// Explicit conjectures per game; games not listed use `Mixed`.
    Custom(BTreeMap<GameId, Vec<ConjectureSpec>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpponentConfig {
    /// Share of rounds, per game where it is possible, in which the
    /// computer's root move differs from its BI root move.
    pub deviation_rate: f64,
    pub belief_family: BeliefFamily,
    pub rounds: usize,
    pub games: Vec<GameId>,
}

impl Default for OpponentConfig {
    fn default() -> Self {
        OpponentConfig {
            deviation_rate: 0.75,
            belief_family: BeliefFamily::Mixed,
            rounds: 8,
            games: GameId::ALL.to_vec(),
        }
    }
}

impl OpponentConfig {
    pub fn validate(&self) -> Result<(), OpponentError> {
        if !(0.0..=1.0).contains(&self.deviation_rate) {
            return Err(OpponentError::Config(format!(
                "deviation rate {} outside [0, 1]",
                self.deviation_rate
            )));
        }
        if self.rounds == 0 {
            return Err(OpponentError::Config("at least one round".into()));
        }
        if self.games.is_empty() {
            return Err(OpponentError::Config("no games".into()));
        }
        Ok(())
    }

    /// Rounds out of `self.rounds` that should deviate, rounded up.
    pub fn deviation_rounds(&self) -> usize {
        let exact = self.deviation_rate * self.rounds as f64;
        // Guard against 0.75 * 8 = 6.000000001 style float noise.
        let r = exact.round();
        if (exact - r).abs() < 1e-9 {
            r as usize
        } else {
            exact.ceil() as usize
        }
    }
}

/// Mover's expected payoff from `start` when C follows `c_choices` (indexed
/// by C's node slot) and P is drawn from `belief`.
fn expected_for_c(game: &GameTree, start: NodeId, c_choices: &[usize], belief: &Conjecture) -> Q {
    belief
        .support()
        .iter()
        .map(|(p, w)| {
            let mut n = start;
            while let Some(owner) = game.node(n).owner() {
                let a = match owner {
                    Player::C => c_choices[game.slot(n).expect("decision node")],
                    Player::P => p.action_at(game, n).expect("P node"),
                };
                n = game.child(n, a);
            }
            let u = game.node(n).payoff().expect("leaf").computer;
            w * Q::from_integer(BigInt::from(u))
        })
        .sum()
}

/// Belief the computer holds at `node`: the conjecture conditioned on its
/// support plans reaching `node`, or uniform over all participant plans
/// reaching it when none does.
pub fn belief_at(game: &GameTree, conjecture: &Conjecture, node: NodeId) -> Conjecture {
    conjecture.conditioned_on(game, node).unwrap_or_else(|| {
        let reaching: Vec<StrategyPlan> = enumerate_strategies(game, Player::P)
            .into_iter()
            .filter(|p| reaches(game, p, node))
            .collect();
        Conjecture::uniform(&reaching).expect("every node is reached by some plan")
    })
}

/// C plan that is optimal at every C node under [`belief_at`] that node, so
/// in particular optimal at the root. Ties go to the lexicographically
/// smallest action label.
pub fn best_response_plan(game: &GameTree, conjecture: &Conjecture) -> StrategyPlan {
    let nodes = game.player_nodes(Player::C);
    let mut choices = vec![0; nodes.len()];
    for (slot, &h) in nodes.iter().enumerate().rev() {
        let belief = belief_at(game, conjecture, h);
        let mut best: Option<(Q, &str, usize)> = None;
        for (k, a) in game.node(h).actions().iter().enumerate() {
            choices[slot] = k;
            let v = expected_for_c(game, h, &choices, &belief);
            let better = match &best {
                None => true,
                Some((bv, bl, _)) => v > *bv || (v == *bv && a.label.as_str() < *bl),
            };
            if better {
                best = Some((v, &a.label, k));
            }
        }
        choices[slot] = best.expect("decision node has actions").2;
    }
    StrategyPlan::new(game, Player::C, choices).expect("indices come from the node's actions")
}

/// Conjecture pool for `family` in `game`.
pub fn conjecture_pool(game_id: GameId, game: &GameTree, family: &BeliefFamily) -> Result<Vec<Conjecture>, OpponentError> {
    let plans = enumerate_strategies(game, Player::P);
    let points = || plans.iter().cloned().map(Conjecture::point_mass).collect::<Vec<_>>();
    let lotteries = || -> Vec<Conjecture> {
        let Some(&last) = game.player_nodes(Player::P).last() else {
            return Vec::new();
        };
        let slot = game.slot(last).expect("decision node");
        let width = game.node(last).actions().len();
        let half = Q::new(1.into(), BigInt::from(width));
        let mut seen = std::collections::BTreeSet::new();
        plans
            .iter()
            .filter(|p| seen.insert(without(p.choices(), slot)))
            .map(|p| {
                let support = (0..width)
                    .map(|a| {
                        let mut c = p.choices().to_vec();
                        c[slot] = a;
                        let plan = StrategyPlan::new(game, Player::P, c).expect("valid index");
                        (plan, half.clone())
                    })
                    .collect();
                Conjecture::new(support).expect("uniform weights")
            })
            .collect()
    };
    Ok(match family {
        BeliefFamily::PointMass => points(),
        BeliefFamily::Lottery => {
            let l = lotteries();
            if l.is_empty() {
                points()
            } else {
                l
            }
        }
        BeliefFamily::Mixed => {
            let mut v = points();
            v.extend(lotteries());
            v
        }
        BeliefFamily::Custom(map) => match map.get(&game_id) {
            Some(specs) if !specs.is_empty() => specs
                .iter()
                .map(|s| Conjecture::from_spec(game, Player::P, s))
                .collect::<Result<_, _>>()?,
            _ => return conjecture_pool(game_id, game, &BeliefFamily::Mixed),
        },
    })
}

fn without(v: &[usize], slot: usize) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i != slot)
        .map(|(_, &x)| x)
        .collect()
}

/// The computer's reference root move: the lexicographically first BI
/// choice at the root, or `None` when the participant moves first.
pub fn reference_root_move(game: &GameTree) -> Option<usize> {
    if game.node(game.root()).owner() != Some(Player::C) {
        return None;
    }
    let bi = backward_induction(game);
    bi.choices[&game.root()]
        .iter()
        .copied()
        .min_by(|&a, &b| game.label(game.root(), a).cmp(game.label(game.root(), b)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub game: GameId,
    pub round: usize,
    pub plan: StrategyPlan,
    pub justification: Conjecture,
}

impl ScheduleEntry {
    /// Whether the computer opens with something other than its reference
    /// root move.
    pub fn deviates(&self, game: &GameTree) -> bool {
        match reference_root_move(game) {
            Some(r) => self.plan.action_at(game, game.root()) != Some(r),
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpponentSchedule {
    pub seed: u64,
    pub config: OpponentConfig,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    plan: String,
    justification: ConjectureSpec,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    seed: u64,
    config: OpponentConfig,
    entries: BTreeMap<GameId, BTreeMap<usize, EntryFile>>,
}

impl OpponentSchedule {
    pub fn entry(&self, game: GameId, round: usize) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.game == game && e.round == round)
    }

    /// JSON keyed by game id, then round.
    pub fn to_json(&self) -> String {
        let mut entries: BTreeMap<GameId, BTreeMap<usize, EntryFile>> = BTreeMap::new();
        for e in &self.entries {
            let g = game(e.game);
            entries.entry(e.game).or_default().insert(
                e.round,
                EntryFile {
                    plan: e.plan.notation(&g),
                    justification: e.justification.to_spec(&g),
                },
            );
        }
        let file = ScheduleFile {
            seed: self.seed,
            config: self.config.clone(),
            entries,
        };
        serde_json::to_string_pretty(&file).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, OpponentError> {
        let file: ScheduleFile =
            serde_json::from_str(text).map_err(|e| OpponentError::Schedule(e.to_string()))?;
        let mut entries = Vec::new();
        for (id, rounds) in file.entries {
            let g = game(id);
            for (round, e) in rounds {
                entries.push(ScheduleEntry {
                    game: id,
                    round,
                    plan: StrategyPlan::parse(&g, Player::C, &e.plan)?,
                    justification: Conjecture::from_spec(&g, Player::P, &e.justification)?,
                });
            }
        }
        entries.sort_by_key(|e| (e.round, file.config.games.iter().position(|g| *g == e.game)));
        Ok(OpponentSchedule {
            seed: file.seed,
            config: file.config,
            entries,
        })
    }
}

/// Draws a conjecture per trial and stores the computer's best response to
/// it. Deviating rounds are chosen at random per game; their number is the
/// configured rate times the rounds, rounded up.
pub fn generate_schedule(config: &OpponentConfig, seed: u64) -> Result<OpponentSchedule, OpponentError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_game: Vec<Vec<ScheduleEntry>> = Vec::new();
    for &id in &config.games {
        let g = game(id);
        let reference = reference_root_move(&g);
        let pool: Vec<(Conjecture, StrategyPlan)> = conjecture_pool(id, &g, &config.belief_family)?
            .into_iter()
            .map(|c| {
                let plan = best_response_plan(&g, &c);
                (c, plan)
            })
            .collect();
        let (deviating, conforming): (Vec<_>, Vec<_>) = pool
            .iter()
            .partition(|(_, p)| reference.is_some() && p.action_at(&g, g.root()) != reference);
        let mut rounds: Vec<usize> = (1..=config.rounds).collect();
        rounds.shuffle(&mut rng);
        let n_dev = if deviating.is_empty() {
            0
        } else {
            config.deviation_rounds().min(config.rounds)
        };
        let n_dev = if conforming.is_empty() { config.rounds } else { n_dev };
        let mut entries: Vec<ScheduleEntry> = rounds
            .iter()
            .enumerate()
            .map(|(i, &round)| {
                let source = if i < n_dev { &deviating } else { &conforming };
                let (c, p) = *source.choose(&mut rng).expect("non-empty pool");
                ScheduleEntry {
                    game: id,
                    round,
                    plan: p.clone(),
                    justification: c.clone(),
                }
            })
            .collect();
        entries.sort_by_key(|e| e.round);
        per_game.push(entries);
    }
    // Trial order: round by round, games in configured order.
    let mut entries = Vec::new();
    for r in 0..config.rounds {
        for g in &per_game {
            entries.push(g[r].clone());
        }
    }
    Ok(OpponentSchedule {
        seed,
        config: config.clone(),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub game: GameId,
    pub round: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationStats {
    /// Some conjecture in the pool makes the computer leave its BI root move.
    pub capable: bool,
    pub deviations: usize,
    pub rounds: usize,
    pub realized_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub violations: Vec<Violation>,
    pub deviation: BTreeMap<GameId, DeviationStats>,
}

impl ScheduleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks every entry: at each computer node the plan must be a best
/// reply to the stored conjecture conditioned on reaching that node. Also
/// checks coverage and the per-game deviation rate.
pub fn verify_schedule(schedule: &OpponentSchedule) -> ScheduleReport {
    let cfg = &schedule.config;
    let mut violations = Vec::new();
    let mut deviation = BTreeMap::new();
    for &id in &cfg.games {
        let g = game(id);
        let all_c = enumerate_strategies(&g, Player::C);
        let mut devs = 0;
        let mut count = 0;
        for round in 1..=cfg.rounds {
            let matching: Vec<&ScheduleEntry> = schedule
                .entries
                .iter()
                .filter(|e| e.game == id && e.round == round)
                .collect();
            let e = match matching.as_slice() {
                [e] => *e,
                [] => {
                    violations.push(Violation { game: id, round, reason: "missing entry".into() });
                    continue;
                }
                _ => {
                    violations.push(Violation { game: id, round, reason: "duplicate entry".into() });
                    continue;
                }
            };
            count += 1;
            if e.plan.owner() != Player::C || e.justification.owner() != Player::P {
                violations.push(Violation { game: id, round, reason: "wrong plan owners".into() });
                continue;
            }
            devs += e.deviates(&g) as usize;
            for &h in g.player_nodes(Player::C) {
                let belief = belief_at(&g, &e.justification, h);
                let mine = expected_for_c(&g, h, e.plan.choices(), &belief);
                if let Some(better) = all_c
                    .iter()
                    .find(|a| expected_for_c(&g, h, a.choices(), &belief) > mine)
                {
                    violations.push(Violation {
                        game: id,
                        round,
                        reason: format!(
                            "{} is not a best reply at `{}` to {}; {} does better",
                            e.plan.notation(&g),
                            g.node(h).name,
                            e.justification.display(&g),
                            better.notation(&g)
                        ),
                    });
                    break;
                }
            }
        }
        let capable = reference_root_move(&g).is_some()
            && conjecture_pool(id, &g, &cfg.belief_family)
                .map(|pool| pool.iter().any(|c| {
                    ScheduleEntry { game: id, round: 0, plan: best_response_plan(&g, c), justification: c.clone() }
                        .deviates(&g)
                }))
                .unwrap_or(false);
        let realized = if count == 0 { 0.0 } else { devs as f64 / count as f64 };
        if capable && (realized - cfg.deviation_rate).abs() > 1.0 / 8.0 + 1e-12 {
            violations.push(Violation {
                game: id,
                round: 0,
                reason: format!(
                    "realized deviation rate {realized} too far from {}",
                    cfg.deviation_rate
                ),
            });
        }
        deviation.insert(
            id,
            DeviationStats {
                capable,
                deviations: devs,
                rounds: count,
                realized_rate: realized,
            },
        );
    }
    ScheduleReport { violations, deviation }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(g: &GameTree, s: &str) -> Conjecture {
        Conjecture::point_mass(StrategyPlan::parse(g, Player::P, s).unwrap())
    }

    #[test]
    fn best_responses_to_point_masses() {
        let g1 = game(GameId::Game1);
        assert_eq!(best_response_plan(&g1, &point(&g1, "d;h")).notation(&g1), "b;f");
        assert_eq!(best_response_plan(&g1, &point(&g1, "c;g")).notation(&g1), "a;e");
        let g2 = game(GameId::Game2);
        assert_eq!(best_response_plan(&g2, &point(&g2, "d;g")).notation(&g2), "b;e");
    }

    #[test]
    fn off_path_node_uses_the_fallback_belief() {
        // Point mass on c;g never reaches C's second node; uniform over d;g
        // and d;h there gives f 2 against e 2, so the smaller label e wins.
        let g1 = game(GameId::Game1);
        let plan = best_response_plan(&g1, &point(&g1, "c;g"));
        let c2 = g1.player_nodes(Player::C)[1];
        assert_eq!(g1.label(c2, plan.action_at(&g1, c2).unwrap()), "e");
    }

    #[test]
    fn zero_rate_keeps_the_reference_move() {
        let cfg = OpponentConfig {
            deviation_rate: 0.0,
            ..Default::default()
        };
        let s = generate_schedule(&cfg, 3).unwrap();
        for id in [GameId::Game1, GameId::Game2, GameId::Game1Prime] {
            let g = game(id);
            for e in s.entries.iter().filter(|e| e.game == id) {
                assert!(!e.deviates(&g));
                if id != GameId::Game1Prime {
                    assert_eq!(e.plan.action_at(&g, g.root()), Some(0));
                }
            }
        }
        assert!(verify_schedule(&s).is_clean());
    }

    #[test]
    fn default_rate_gives_six_of_eight_in_game1() {
        let s = generate_schedule(&OpponentConfig::default(), 11).unwrap();
        let g = game(GameId::Game1);
        let dev: Vec<_> = s.entries.iter().filter(|e| e.game == GameId::Game1 && e.deviates(&g)).collect();
        assert_eq!(dev.len(), 6);
        let dh = StrategyPlan::parse(&g, Player::P, "d;h").unwrap();
        for e in dev {
            assert_eq!(e.plan.notation(&g), "b;f");
            assert!(e.justification.plans().any(|p| *p == dh));
        }
        assert_eq!(s.entries.len(), 48);
    }

    #[test]
    fn schedules_are_reproducible_and_round_trip() {
        let cfg = OpponentConfig::default();
        let a = generate_schedule(&cfg, 5).unwrap();
        let b = generate_schedule(&cfg, 5).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = OpponentSchedule::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn dominated_plan_is_flagged() {
        let cfg = OpponentConfig::default();
        let mut s = generate_schedule(&cfg, 1).unwrap();
        let g = game(GameId::Game1);
        let e = s.entries.iter_mut().find(|e| e.game == GameId::Game1).unwrap();
        e.plan = StrategyPlan::parse(&g, Player::C, "b;e").unwrap();
        let r = verify_schedule(&s);
        assert!(r.violations.iter().any(|v| v.game == GameId::Game1 && v.round > 0));
    }

    #[test]
    fn bad_rate_is_rejected() {
        let cfg = OpponentConfig {
            deviation_rate: 1.5,
            ..Default::default()
        };
        assert!(generate_schedule(&cfg, 0).is_err());
    }

    #[test]
    fn rounding_goes_up() {
        let cfg = |r| OpponentConfig { deviation_rate: r, ..Default::default() };
        assert_eq!(cfg(0.75).deviation_rounds(), 6);
        assert_eq!(cfg(0.7).deviation_rounds(), 6);
        assert_eq!(cfg(0.01).deviation_rounds(), 1);
        assert_eq!(cfg(0.0).deviation_rounds(), 0);
    }
}
