use std::collections::{BTreeMap, BTreeSet};

use crate::game::{
    enumerate_strategies, play_from, GameTree, NodeId, Payoff, PathOutcome, Player, StrategyPlan,
};

/// Backward-induction results.
///
/// `choices` holds, per decision node, every action that is optimal for the
/// mover under some way of resolving ties further down.
#[derive(Clone, Debug)]
pub struct BiReport {
    pub choices: BTreeMap<NodeId, Vec<usize>>,
    pub strategies: [Vec<StrategyPlan>; 2],
    pub outcomes: Vec<PathOutcome>,
    pub spe_profiles: Vec<(StrategyPlan, StrategyPlan)>,
}

impl BiReport {
    pub fn strategies_of(&self, player: Player) -> &[StrategyPlan] {
        &self.strategies[player.index()]
    }

    pub fn outcome_leaves(&self) -> BTreeSet<NodeId> {
        self.outcomes.iter().map(|o| o.leaf).collect()
    }
}

/// Set-valued folding. `V(leaf) = {payoff}`; at a node of player `i` an
/// action is a BI choice iff some value in its child's set reaches every
/// sibling's lowest attainable `i`-payoff, and `V(node)` is the union of the
/// chosen children's sets. `V(root)` is then exactly the set of payoffs at
/// leaves reachable through BI choices alone.
pub fn backward_induction(game: &GameTree) -> BiReport {
    let mut values: Vec<BTreeSet<Payoff>> = vec![BTreeSet::new(); game.len()];
    let mut choices: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();

    // Children have larger pre-order ids, so a reverse sweep folds bottom-up.
    for i in (0..game.len()).rev() {
        let id = NodeId(i);
        let node = game.node(id);
        let Some(owner) = node.owner() else {
            values[i].insert(node.payoff().expect("leaf"));
            continue;
        };
        let floors: Vec<u32> = node
            .actions()
            .iter()
            .map(|a| {
                values[a.child.0]
                    .iter()
                    .map(|v| v.of(owner))
                    .min()
                    .expect("non-empty value set")
            })
            .collect();
        let mut here = BTreeSet::new();
        let mut chosen = Vec::new();
        for (k, a) in node.actions().iter().enumerate() {
            let bar = floors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &f)| f)
                .max()
                .unwrap_or(0);
            let child = &values[a.child.0];
            if child.iter().any(|v| v.of(owner) >= bar) {
                here.extend(child.iter().copied());
                chosen.push(k);
            }
        }
        values[i] = here;
        choices.insert(id, chosen);
    }

    let strategies = Player::BOTH.map(|p| product_plans(game, p, &choices));

    let mut leaves = Vec::new();
    let mut stack = vec![game.root()];
    while let Some(n) = stack.pop() {
        match choices.get(&n) {
            None => leaves.push(n),
            Some(acts) => stack.extend(acts.iter().rev().map(|&a| game.child(n, a))),
        }
    }
    leaves.sort();
    let outcomes = leaves
        .into_iter()
        .map(|l| PathOutcome::to_leaf(game, l))
        .collect();

    BiReport {
        choices,
        strategies,
        outcomes,
        spe_profiles: subgame_perfect_profiles(game),
    }
}

fn product_plans(
    game: &GameTree,
    player: Player,
    choices: &BTreeMap<NodeId, Vec<usize>>,
) -> Vec<StrategyPlan> {
    let sets: Vec<&Vec<usize>> = game
        .player_nodes(player)
        .iter()
        .map(|n| &choices[n])
        .collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |&a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|c| StrategyPlan::new(game, player, c).expect("BI choices are valid actions"))
        .collect()
}

/// Every profile in which no mover gains by switching the action at any
/// single decision node, given both plans elsewhere. In finite games this
/// one-shot test is equivalent to optimality in every subgame.
pub fn subgame_perfect_profiles(game: &GameTree) -> Vec<(StrategyPlan, StrategyPlan)> {
    let cs = enumerate_strategies(game, Player::C);
    let ps = enumerate_strategies(game, Player::P);
    let decisions: Vec<NodeId> = game.decision_nodes().collect();
    let mut out = Vec::new();
    for c in &cs {
        for p in &ps {
            let stable = decisions.iter().all(|&h| {
                let owner = game.node(h).owner().expect("decision");
                let here = game
                    .node(play_from(game, h, c, p))
                    .payoff()
                    .expect("leaf")
                    .of(owner);
                game.node(h).actions().iter().all(|a| {
                    game.node(play_from(game, a.child, c, p))
                        .payoff()
                        .expect("leaf")
                        .of(owner)
                        <= here
                })
            });
            if stable {
                out.push((c.clone(), p.clone()));
            }
        }
    }
    out
}
