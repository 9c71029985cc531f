use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GameError, GameTree, NodeId, Payoff, Player, Result};

/// A total plan: one action index for every decision node of `owner`, in the
/// owner's pre-order node order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyPlan {
    owner: Player,
    choices: Vec<usize>,
}

impl StrategyPlan {
    pub fn new(game: &GameTree, owner: Player, choices: Vec<usize>) -> Result<Self> {
        let nodes = game.player_nodes(owner);
        if nodes.len() != choices.len() {
            return Err(GameError::BadPlan {
                owner,
                reason: format!(
                    "{} choice(s) for {} decision node(s)",
                    choices.len(),
                    nodes.len()
                ),
            });
        }
        for (&n, &c) in nodes.iter().zip(&choices) {
            if c >= game.node(n).actions().len() {
                return Err(GameError::BadPlan {
                    owner,
                    reason: format!("action index {c} out of range at `{}`", game.node(n).name),
                });
            }
        }
        Ok(StrategyPlan { owner, choices })
    }

    /// Parses the `a;e` notation: action labels in the owner's node order.
    /// A player without decision nodes has the empty plan, written `-`.
    pub fn parse(game: &GameTree, owner: Player, notation: &str) -> Result<Self> {
        let nodes = game.player_nodes(owner);
        let labels: Vec<&str> = match notation.trim() {
            "-" | "" => Vec::new(),
            s => s.split(';').map(str::trim).collect(),
        };
        if labels.len() != nodes.len() {
            return Err(GameError::BadPlan {
                owner,
                reason: format!("`{notation}` does not name one action per decision node"),
            });
        }
        let choices = nodes
            .iter()
            .zip(labels)
            .map(|(&n, l)| game.action_index(n, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(StrategyPlan { owner, choices })
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    /// Action index this plan takes at `node`; `None` if `node` is not the
    /// owner's.
    pub fn action_at(&self, game: &GameTree, node: NodeId) -> Option<usize> {
        (game.node(node).owner() == Some(self.owner))
            .then(|| game.slot(node).map(|s| self.choices[s]))
            .flatten()
    }

    pub fn notation(&self, game: &GameTree) -> String {
        if self.choices.is_empty() {
            return "-".to_string();
        }
        game.player_nodes(self.owner)
            .iter()
            .zip(&self.choices)
            .map(|(&n, &c)| game.label(n, c))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Labels in node order, for lexicographic tie-breaking.
    pub fn label_key<'g>(&self, game: &'g GameTree) -> Vec<&'g str> {
        game.player_nodes(self.owner)
            .iter()
            .zip(&self.choices)
            .map(|(&n, &c)| game.label(n, c))
            .collect()
    }

    /// Choices restricted to the owner's nodes inside the subtree at `node`.
    pub fn continuation(&self, game: &GameTree, node: NodeId) -> Vec<usize> {
        game.player_nodes(self.owner)
            .iter()
            .zip(&self.choices)
            .filter(|(&n, _)| game.is_ancestor_or_self(node, n))
            .map(|(_, &c)| c)
            .collect()
    }

    pub fn display<'a>(&'a self, game: &'a GameTree) -> impl fmt::Display + 'a {
        struct D<'a>(&'a StrategyPlan, &'a GameTree);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.notation(self.1))
            }
        }
        D(self, game)
    }
}

/// Root-to-leaf play.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathOutcome {
    pub actions: Vec<String>,
    pub leaf: NodeId,
    pub payoff: [u32; 2],
}

impl PathOutcome {
    pub fn to_leaf(game: &GameTree, leaf: NodeId) -> Self {
        let actions = game
            .path_to(leaf)
            .into_iter()
            .map(|(n, a)| game.label(n, a).to_string())
            .collect();
        let p = game.node(leaf).payoff().expect("outcome must end at a leaf");
        PathOutcome {
            actions,
            leaf,
            payoff: [p.computer, p.participant],
        }
    }

    pub fn payoff(&self) -> Payoff {
        Payoff::new(self.payoff[0], self.payoff[1])
    }
}

impl fmt::Display for PathOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.actions.is_empty() {
            "(root)".to_string()
        } else {
            self.actions.join(",")
        };
        write!(f, "{path} -> {}", self.payoff())
    }
}

/// Every total plan of `player`, ordered lexicographically by action index
/// with the first node varying slowest.
pub fn enumerate_strategies(game: &GameTree, player: Player) -> Vec<StrategyPlan> {
    let arity: Vec<usize> = game
        .player_nodes(player)
        .iter()
        .map(|&n| game.node(n).actions().len())
        .collect();
    let total: usize = arity.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; arity.len()];
    loop {
        out.push(StrategyPlan {
            owner: player,
            choices: cur.clone(),
        });
        let mut i = arity.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < arity[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Leaf reached from `start` when both players follow their plans.
pub fn play_from(
    game: &GameTree,
    start: NodeId,
    plan_c: &StrategyPlan,
    plan_p: &StrategyPlan,
) -> NodeId {
    let mut node = start;
    loop {
        let n = game.node(node);
        let Some(owner) = n.owner() else {
            return node;
        };
        let slot = game.slot(node).expect("decision nodes have slots");
        let choice = match owner {
            Player::C => plan_c.choices[slot],
            Player::P => plan_p.choices[slot],
        };
        node = n.actions()[choice].child;
    }
}

pub fn play_profile(game: &GameTree, plan_c: &StrategyPlan, plan_p: &StrategyPlan) -> PathOutcome {
    debug_assert_eq!(plan_c.owner, Player::C);
    debug_assert_eq!(plan_p.owner, Player::P);
    PathOutcome::to_leaf(game, play_from(game, game.root(), plan_c, plan_p))
}

/// True iff `plan` takes every one of its owner's actions on the path from the
/// root down to (but excluding) `node`.
pub fn reaches(game: &GameTree, plan: &StrategyPlan, node: NodeId) -> bool {
    game.path_to(node)
        .into_iter()
        .all(|(n, a)| match game.node(n).owner() {
            Some(o) if o == plan.owner => plan.action_at(game, n) == Some(a),
            _ => true,
        })
}

/// Whether some player has two leaves with equal own payoff below one of
/// their decision nodes.
pub fn has_relevant_ties(game: &GameTree) -> bool {
    game.decision_nodes().any(|h| {
        let owner = game.node(h).owner().expect("decision node");
        let mut seen = HashSet::new();
        game.subtree(h)
            .filter_map(|n| game.node(n).payoff())
            .any(|p| !seen.insert(p.of(owner)))
    })
}
