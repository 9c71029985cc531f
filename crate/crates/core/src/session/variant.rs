use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::GameTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Normal,
    Mirrored,
}

/// Left/right presentation of each decision node. Presentation only: the
/// game itself, its labels and payoffs are untouched.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VisualVariant {
    pub orientation: BTreeMap<String, Orientation>,
}

impl VisualVariant {
    pub fn is_mirrored(&self, node_name: &str) -> bool {
        self.orientation.get(node_name) == Some(&Orientation::Mirrored)
    }

    /// Action indices of `node` from left to right.
    pub fn display_order(&self, game: &GameTree, node: crate::game::NodeId) -> Vec<usize> {
        let mut order: Vec<usize> = (0..game.node(node).actions().len()).collect();
        if self.is_mirrored(&game.node(node).name) {
            order.reverse();
        }
        order
    }

    /// Copy of `game` whose action lists follow the displayed order.
    pub fn render(&self, game: &GameTree) -> GameTree {
        game.with_action_order(|id, actions| {
            if self.is_mirrored(&game.node(id).name) {
                actions.reverse();
            }
        })
    }
}

/// `count` orientation maps for `game`, pairwise distinct while the game has
/// enough of them (`2^nodes`), drawn without replacement from all maps.
pub fn variants_for<R: Rng>(game: &GameTree, count: usize, rng: &mut R) -> Vec<VisualVariant> {
    let names: Vec<String> = game
        .decision_nodes()
        .map(|n| game.node(n).name.clone())
        .collect();
    let total = 1usize.checked_shl(names.len() as u32).unwrap_or(usize::MAX);
    let mut pool: Vec<usize> = if total <= 1 << 16 {
        let mut all: Vec<usize> = (0..total).collect();
        all.shuffle(rng);
        all
    } else {
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < count {
            seen.insert(rng.gen_range(0..total));
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.shuffle(rng);
        v
    };
    if pool.is_empty() {
        pool.push(0);
    }
    (0..count)
        .map(|i| {
            let mask = pool[i % pool.len()];
            VisualVariant {
                orientation: names
                    .iter()
                    .enumerate()
                    .map(|(b, n)| {
                        let o = if mask >> b & 1 == 1 {
                            Orientation::Mirrored
                        } else {
                            Orientation::Normal
                        };
                        (n.clone(), o)
                    })
                    .collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::shipped::{game, GameId};
    use crate::solver::solve;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eight_distinct_maps_per_game() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for id in GameId::ALL {
            let g = game(id);
            let v = variants_for(&g, 8, &mut rng);
            let set: std::collections::BTreeSet<_> = v.iter().collect();
            assert_eq!(set.len(), 8, "{id:?}");
        }
    }

    #[test]
    fn rendering_changes_nothing_the_solver_sees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in GameId::ALL {
            let g = game(id);
            for v in variants_for(&g, 8, &mut rng) {
                let r = v.render(&g);
                let (a, b) = (solve(&g).summary(&g), solve(&r).summary(&r));
                let sets = |m: &std::collections::BTreeMap<crate::game::Player, Vec<String>>| {
                    m.values()
                        .map(|v| v.iter().cloned().collect::<std::collections::BTreeSet<_>>())
                        .collect::<Vec<_>>()
                };
                assert_eq!(sets(&a.bi_strategies), sets(&b.bi_strategies));
                assert_eq!(sets(&a.efr_strategies), sets(&b.efr_strategies));
                let pay = |x: &crate::solver::SolveSummary| {
                    x.efr_outcomes.iter().map(|o| o.payoff).collect::<std::collections::BTreeSet<_>>()
                };
                assert_eq!(pay(&a), pay(&b));
            }
        }
    }
}
