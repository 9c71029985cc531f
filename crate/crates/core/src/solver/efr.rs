//! Extensive-form rationalizability by iterated elimination.
//!
//! Level 0 holds every total plan. A plan of player `i` survives level `k+1`
//! iff at every decision node `h` of `i` its continuation below `h` is a best
//! reply, among the continuations of all plans of `i` that reach `h`, to
//! some belief over the opponent plans that reach `h` at the highest level
//! `m(h) <= k` still containing such a plan. Both players are pruned
//! simultaneously; iteration stops once a level repeats, so the last two
//! entries of [`EfrReport::levels`] are equal.
//!
//! Every node of the owner is checked, including nodes the plan's own
//! earlier moves avoid, so a plan like `a;f` is held to its choice `f`.

use std::collections::{BTreeSet, HashMap};

use super::justify::justifiable;
use crate::game::{
    enumerate_strategies, play_profile, reaches, GameTree, NodeId, PathOutcome, Player,
    StrategyPlan,
};

/// Surviving plans of both players at one level.
pub type Level = [Vec<StrategyPlan>; 2];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub plan: StrategyPlan,
    /// First level the plan is missing from.
    pub level: usize,
    /// Node at which no justifying belief exists.
    pub node: NodeId,
}

#[derive(Clone, Debug)]
pub struct EfrReport {
    pub levels: Vec<Level>,
    pub outcomes: Vec<PathOutcome>,
    pub trace: Vec<Elimination>,
}

impl EfrReport {
    /// Fixpoint plans of `player`.
    pub fn strategies_of(&self, player: Player) -> &[StrategyPlan] {
        &self.levels.last().expect("at least level 0")[player.index()]
    }

    pub fn outcome_leaves(&self) -> BTreeSet<NodeId> {
        self.outcomes.iter().map(|o| o.leaf).collect()
    }
}

/// Rivals and alternatives used when judging `player`'s plans at `node` on
/// the way from level `k` to `k+1`. Plans are deduplicated by their
/// continuation below `node`.
pub fn justification_context(
    game: &GameTree,
    levels: &[Level],
    k: usize,
    player: Player,
    node: NodeId,
) -> (Vec<StrategyPlan>, Vec<StrategyPlan>) {
    let opp = player.other();
    let rivals: Vec<StrategyPlan> = (0..=k)
        .rev()
        .map(|l| -> Vec<StrategyPlan> {
            levels[l][opp.index()]
                .iter()
                .filter(|r| reaches(game, r, node))
                .cloned()
                .collect()
        })
        .find(|v| !v.is_empty())
        .expect("level 0 holds a plan reaching every node");
    let alternatives: Vec<StrategyPlan> = levels[0][player.index()]
        .iter()
        .filter(|a| reaches(game, a, node))
        .cloned()
        .collect();
    (
        dedup_by_continuation(game, rivals, node),
        dedup_by_continuation(game, alternatives, node),
    )
}

fn dedup_by_continuation(game: &GameTree, plans: Vec<StrategyPlan>, node: NodeId) -> Vec<StrategyPlan> {
    let mut seen = BTreeSet::new();
    plans
        .into_iter()
        .filter(|p| seen.insert(p.continuation(game, node)))
        .collect()
}

pub fn efr(game: &GameTree) -> EfrReport {
    let start: Level = Player::BOTH.map(|p| enumerate_strategies(game, p));
    let bound = start[0].len() + start[1].len();
    let mut levels = vec![start];
    let mut trace = Vec::new();

    for k in 0..=bound {
        let mut next: Level = [Vec::new(), Vec::new()];
        for player in Player::BOTH {
            let mut verdict: HashMap<(NodeId, Vec<usize>), bool> = HashMap::new();
            let contexts: Vec<(NodeId, Vec<StrategyPlan>, Vec<StrategyPlan>)> = game
                .player_nodes(player)
                .iter()
                .map(|&h| {
                    let (r, a) = justification_context(game, &levels, k, player, h);
                    (h, r, a)
                })
                .collect();
            for plan in &levels[k][player.index()] {
                let failed = contexts.iter().find(|(h, rivals, alts)| {
                    let key = (*h, plan.continuation(game, *h));
                    let ok = *verdict.entry(key).or_insert_with(|| {
                        justifiable(game, plan, *h, rivals, alts)
                            .expect("context satisfies preconditions")
                            .is_some()
                    });
                    !ok
                });
                match failed {
                    None => next[player.index()].push(plan.clone()),
                    Some((h, _, _)) => trace.push(Elimination {
                        plan: plan.clone(),
                        level: k + 1,
                        node: *h,
                    }),
                }
            }
        }
        let done = next == levels[k];
        levels.push(next);
        if done {
            break;
        }
    }

    let fix = levels.last().expect("non-empty");
    let mut leaves = BTreeSet::new();
    for c in &fix[0] {
        for p in &fix[1] {
            leaves.insert(play_profile(game, c, p));
        }
    }
    EfrReport {
        outcomes: leaves.into_iter().collect(),
        levels,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::shipped::{game, GameId};

    fn set(g: &GameTree, plans: &[StrategyPlan]) -> BTreeSet<String> {
        plans.iter().map(|p| p.notation(g)).collect()
    }

    fn names(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn game1_forward_induction_for_p() {
        let g = game(GameId::Game1);
        let r = efr(&g);
        assert_eq!(set(&g, r.strategies_of(Player::C)), names(&["a;e"]));
        assert_eq!(set(&g, r.strategies_of(Player::P)), names(&["d;g"]));
        // b;e goes first, at the root.
        let be = StrategyPlan::parse(&g, Player::C, "b;e").unwrap();
        let e = r.trace.iter().find(|e| e.plan == be).unwrap();
        assert_eq!((e.level, e.node), (1, g.root()));
    }

    #[test]
    fn game3_excludes_b_c() {
        let g = game(GameId::Game3);
        let r = efr(&g);
        assert_eq!(set(&g, r.strategies_of(Player::C)), names(&["a;e", "a;f", "b;f"]));
        assert_eq!(set(&g, r.strategies_of(Player::P)), names(&["d;g", "d;h"]));
        assert!(r.outcomes.iter().all(|o| o.payoff != [0, 3]));
    }

    #[test]
    fn levels_shrink_and_end_at_fixpoint() {
        for (_, g) in crate::game::shipped::experimental_games() {
            let r = efr(&g);
            for w in r.levels.windows(2) {
                for p in Player::BOTH {
                    assert!(w[1][p.index()].iter().all(|s| w[0][p.index()].contains(s)));
                }
            }
            assert!(r.strategies_of(Player::C).len() + r.strategies_of(Player::P).len() >= 2);
        }
    }
}
