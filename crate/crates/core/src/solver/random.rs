use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SolverError;
use crate::game::{has_relevant_ties, GameBuilder, GameTree, Payoff, Player};

/// Parameters for [`random_game`].
#[derive(Clone, Debug, PartialEq)]
pub struct RandomGameConfig {
    /// Maximum number of moves on any root-to-leaf path.
    pub depth: usize,
    pub branching: usize,
    pub payoff_min: u32,
    pub payoff_max: u32,
    pub forbid_relevant_ties: bool,
    /// Probability that a non-root position above `depth` is a decision node
    /// rather than a leaf.
    pub continue_prob: f64,
    /// Shapes giving either player more decision nodes than this are redrawn.
    pub max_nodes_per_player: usize,
    pub max_attempts: usize,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig {
            depth: 4,
            branching: 2,
            payoff_min: 0,
            payoff_max: 9,
            forbid_relevant_ties: false,
            continue_prob: 0.5,
            max_nodes_per_player: 7,
            max_attempts: 10_000,
        }
    }
}

enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn counts(&self, owner: Player, acc: &mut [usize; 2]) {
        if let Shape::Node(children) = self {
            acc[owner.index()] += 1;
            for c in children {
                c.counts(owner.other(), acc);
            }
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(c) => c.iter().map(Shape::leaves).sum(),
        }
    }
}

fn draw_shape(rng: &mut ChaCha8Rng, cfg: &RandomGameConfig, depth: usize) -> Shape {
    let decide = depth == 0 || (depth < cfg.depth && rng.gen_bool(cfg.continue_prob));
    if !decide {
        return Shape::Leaf;
    }
    Shape::Node(
        (0..cfg.branching)
            .map(|_| draw_shape(rng, cfg, depth + 1))
            .collect(),
    )
}

fn label(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

/// Seeded random game with alternating owners, `C` at the root.
pub fn random_game(seed: u64, cfg: &RandomGameConfig) -> Result<GameTree, SolverError> {
    if cfg.depth < 1 || cfg.branching < 2 || cfg.payoff_min > cfg.payoff_max {
        return Err(SolverError::Precondition(
            "need depth >= 1, branching >= 2 and a non-empty payoff range".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range: Vec<u32> = (cfg.payoff_min..=cfg.payoff_max).collect();

    for _ in 0..cfg.max_attempts {
        let shape = draw_shape(&mut rng, cfg, 0);
        let mut counts = [0, 0];
        shape.counts(Player::C, &mut counts);
        if counts.iter().any(|&c| c > cfg.max_nodes_per_player) {
            continue;
        }
        let n_leaves = shape.leaves();
        if cfg.forbid_relevant_ties && n_leaves > range.len() {
            continue;
        }
        // Distinct draws per player rule out relevant ties by construction.
        let payoffs: Vec<Payoff> = if cfg.forbid_relevant_ties {
            let mut cs = range.clone();
            let mut ps = range.clone();
            cs.shuffle(&mut rng);
            ps.shuffle(&mut rng);
            cs.into_iter()
                .zip(ps)
                .take(n_leaves)
                .map(|(c, p)| Payoff::new(c, p))
                .collect()
        } else {
            (0..n_leaves)
                .map(|_| Payoff::new(*range.choose(&mut rng).unwrap(), *range.choose(&mut rng).unwrap()))
                .collect()
        };
        let game = build(seed, &shape, &payoffs);
        if cfg.forbid_relevant_ties && has_relevant_ties(&game) {
            continue;
        }
        return Ok(game);
    }
    Err(SolverError::GenerationBudget(cfg.max_attempts))
}

fn build(seed: u64, shape: &Shape, payoffs: &[Payoff]) -> GameTree {
    struct Ctx<'a> {
        b: GameBuilder,
        payoffs: &'a [Payoff],
        next_leaf: usize,
        next_label: usize,
        next_node: usize,
    }
    fn go(ctx: &mut Ctx, shape: &Shape, owner: Player) -> String {
        match shape {
            Shape::Leaf => {
                let p = ctx.payoffs[ctx.next_leaf];
                ctx.next_leaf += 1;
                ctx.b.leaf(format!("l{}", ctx.next_leaf), p)
            }
            Shape::Node(children) => {
                ctx.next_node += 1;
                let name = format!("n{}", ctx.next_node);
                let labels: Vec<String> = children
                    .iter()
                    .map(|_| {
                        ctx.next_label += 1;
                        label(ctx.next_label - 1)
                    })
                    .collect();
                let kids: Vec<String> = children.iter().map(|c| go(ctx, c, owner.other())).collect();
                ctx.b
                    .decision(name, owner, labels.into_iter().zip(kids).collect())
            }
        }
    }
    let mut ctx = Ctx {
        b: GameBuilder::new(),
        payoffs,
        next_leaf: 0,
        next_label: 0,
        next_node: 0,
    };
    let root = go(&mut ctx, shape, Player::C);
    ctx.b
        .build(format!("random-{seed}"), &root)
        .expect("generated trees are valid")
}
