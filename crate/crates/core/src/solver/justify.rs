use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{belief_witness, Q};
use super::SolverError;
use crate::game::{play_from, reaches, GameTree, NodeId, Player, StrategyPlan};

/// A belief over opponent plans with exact positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjecture {
    support: Vec<(StrategyPlan, Q)>,
}

impl Conjecture {
    pub fn new(support: Vec<(StrategyPlan, Q)>) -> Result<Self, SolverError> {
        if support.is_empty() {
            return Err(SolverError::BadConjecture("empty support".into()));
        }
        let owner = support[0].0.owner();
        if support.iter().any(|(p, _)| p.owner() != owner) {
            return Err(SolverError::BadConjecture("mixed plan owners".into()));
        }
        if support.iter().any(|(_, w)| !w.is_positive()) {
            return Err(SolverError::BadConjecture("weights must be positive".into()));
        }
        let total: Q = support.iter().map(|(_, w)| w).sum();
        if total != Q::one() {
            return Err(SolverError::BadConjecture(format!("weights sum to {total}")));
        }
        let mut merged: Vec<(StrategyPlan, Q)> = Vec::with_capacity(support.len());
        for (p, w) in support {
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, acc)) => *acc += w,
                None => merged.push((p, w)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Conjecture { support: merged })
    }

    pub fn point_mass(plan: StrategyPlan) -> Self {
        Conjecture {
            support: vec![(plan, Q::one())],
        }
    }

    pub fn uniform(plans: &[StrategyPlan]) -> Result<Self, SolverError> {
        let n = Q::from_integer(BigInt::from(plans.len()));
        Conjecture::new(plans.iter().map(|p| (p.clone(), Q::one() / &n)).collect())
    }

    /// Support plans and their weights, sorted by plan.
    pub fn support(&self) -> &[(StrategyPlan, Q)] {
        &self.support
    }

    pub fn plans(&self) -> impl Iterator<Item = &StrategyPlan> {
        self.support.iter().map(|(p, _)| p)
    }

    pub fn owner(&self) -> Player {
        self.support[0].0.owner()
    }

    /// Belief conditioned on the plans that reach `node`; `None` when the
    /// support has no such plan.
    pub fn conditioned_on(&self, game: &GameTree, node: NodeId) -> Option<Conjecture> {
        let kept: Vec<(StrategyPlan, Q)> = self
            .support
            .iter()
            .filter(|(p, _)| reaches(game, p, node))
            .cloned()
            .collect();
        let mass: Q = kept.iter().map(|(_, w)| w).sum();
        if mass.is_zero() {
            return None;
        }
        Some(Conjecture {
            support: kept.into_iter().map(|(p, w)| (p, w / &mass)).collect(),
        })
    }

    /// Expected payoff to `plan`'s owner from `node` on.
    pub fn expected_payoff(&self, game: &GameTree, node: NodeId, plan: &StrategyPlan) -> Q {
        self.support
            .iter()
            .map(|(rival, w)| {
                let leaf = match plan.owner() {
                    Player::C => play_from(game, node, plan, rival),
                    Player::P => play_from(game, node, rival, plan),
                };
                let u = game.node(leaf).payoff().expect("leaf").of(plan.owner());
                w * Q::from_integer(BigInt::from(u))
            })
            .sum()
    }

    pub fn display<'a>(&'a self, game: &'a GameTree) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Conjecture, &'a GameTree);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self
                    .0
                    .support
                    .iter()
                    .map(|(p, w)| format!("{}:{}", p.notation(self.1), w))
                    .collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
        D(self, game)
    }

    /// Serializable form with plans in `a;e` notation and weights as `n/d`.
    pub fn to_spec(&self, game: &GameTree) -> ConjectureSpec {
        ConjectureSpec(
            self.support
                .iter()
                .map(|(p, w)| WeightedPlan {
                    plan: p.notation(game),
                    weight: w.to_string(),
                })
                .collect(),
        )
    }

    pub fn from_spec(game: &GameTree, owner: Player, spec: &ConjectureSpec) -> Result<Self, SolverError> {
        let support = spec
            .0
            .iter()
            .map(|wp| {
                let plan = StrategyPlan::parse(game, owner, &wp.plan)?;
                let weight: Q = wp
                    .weight
                    .parse()
                    .map_err(|_| SolverError::BadConjecture(format!("bad weight `{}`", wp.weight)))?;
                Ok((plan, weight))
            })
            .collect::<Result<Vec<_>, SolverError>>()?;
        Conjecture::new(support)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPlan {
    pub plan: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConjectureSpec(pub Vec<WeightedPlan>);

/// Searches for a belief over `rivals` under which `candidate`'s continuation
/// at `node` does at least as well as every alternative's.
///
/// Rivals and alternatives must reach `node`. The candidate is judged by its
/// continuation below `node` only, so it need not reach `node` itself; this is
/// how plans are held to their choices at nodes their own earlier moves avoid.
/// The candidate is always an implicit alternative.
pub fn justifiable(
    game: &GameTree,
    candidate: &StrategyPlan,
    node: NodeId,
    rivals: &[StrategyPlan],
    alternatives: &[StrategyPlan],
) -> Result<Option<Conjecture>, SolverError> {
    let owner = candidate.owner();
    if game.node(node).owner() != Some(owner) {
        return Err(SolverError::Precondition(format!(
            "node `{}` is not a decision node of {owner}",
            game.node(node).name
        )));
    }
    if rivals.is_empty() {
        return Err(SolverError::Precondition("no rival plans".into()));
    }
    for r in rivals {
        if r.owner() != owner.other() {
            return Err(SolverError::Precondition("rival owned by the candidate's player".into()));
        }
        if !reaches(game, r, node) {
            return Err(SolverError::Precondition(format!(
                "rival {} does not reach `{}`",
                r.notation(game),
                game.node(node).name
            )));
        }
    }
    for a in alternatives {
        if a.owner() != owner {
            return Err(SolverError::Precondition("alternative owned by the rival player".into()));
        }
        if !reaches(game, a, node) {
            return Err(SolverError::Precondition(format!(
                "alternative {} does not reach `{}`",
                a.notation(game),
                game.node(node).name
            )));
        }
    }

    let utility = |mine: &StrategyPlan, rival: &StrategyPlan| -> i64 {
        let leaf = match owner {
            Player::C => play_from(game, node, mine, rival),
            Player::P => play_from(game, node, rival, mine),
        };
        game.node(leaf).payoff().expect("leaf").of(owner) as i64
    };
    let base: Vec<i64> = rivals.iter().map(|r| utility(candidate, r)).collect();
    let gain: Vec<Vec<Q>> = alternatives
        .iter()
        .map(|a| {
            rivals
                .iter()
                .zip(&base)
                .map(|(r, b)| Q::from_integer(BigInt::from(b - utility(a, r))))
                .collect()
        })
        .collect();

    Ok(belief_witness(&gain, rivals.len()).map(|mu| {
        let support = rivals
            .iter()
            .zip(mu)
            .filter(|(_, w)| w.is_positive())
            .map(|(r, w)| (r.clone(), w))
            .collect();
        Conjecture::new(support).expect("simplex returns a distribution")
    }))
}
