use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::game::{GameTree, NodeId, Player, StrategyPlan};
use crate::solver::{backward_induction, efr};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Bi,
    Efr,
    OwnMaxMyopic,
    ExpectedValue5050,
    RiskAverse,
    Random,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] = [
        AgentKind::Bi,
        AgentKind::Efr,
        AgentKind::OwnMaxMyopic,
        AgentKind::ExpectedValue5050,
        AgentKind::RiskAverse,
        AgentKind::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Bi => "bi",
            AgentKind::Efr => "efr",
            AgentKind::OwnMaxMyopic => "own-max-myopic",
            AgentKind::ExpectedValue5050 => "expected-value5050",
            AgentKind::RiskAverse => "risk-averse",
            AgentKind::Random => "random",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "bi" => AgentKind::Bi,
            "efr" => AgentKind::Efr,
            "own-max" | "own-max-myopic" | "myopic" => AgentKind::OwnMaxMyopic,
            "ev" | "ev5050" | "expected-value" | "expected-value5050" => AgentKind::ExpectedValue5050,
            "risk-averse" | "risk" => AgentKind::RiskAverse,
            "random" => AgentKind::Random,
            _ => return Err(AnalysisError::Agent(format!("unknown agent kind `{s}`"))),
        })
    }
}

/// A synthetic participant type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub kind: AgentKind,
    /// Probability of taking a uniformly chosen other action instead.
    #[serde(default)]
    pub error_rate: f64,
    /// Fraction of the way from the lowest to the highest computer payoff of
    /// a continuation that a certain payoff must reach for a risk-averse
    /// computer to settle for it.
    #[serde(default = "default_threshold")]
    pub risk_threshold: f64,
}

fn default_threshold() -> f64 {
    0.5
}

impl AgentSpec {
    pub fn new(kind: AgentKind) -> Self {
        AgentSpec {
            kind,
            error_rate: 0.0,
            risk_threshold: default_threshold(),
        }
    }

    pub fn with_error_rate(mut self, rate: f64) -> Self {
        self.error_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(0.0..=1.0).contains(&self.error_rate) {
            return Err(AnalysisError::Agent(format!("error rate {} outside [0, 1]", self.error_rate)));
        }
        if !(0.0..=1.0).contains(&self.risk_threshold) {
            return Err(AnalysisError::Agent(format!(
                "risk threshold {} outside [0, 1]",
                self.risk_threshold
            )));
        }
        Ok(())
    }
}

/// `<kind>[:<error rate>]`, e.g. `efr` or `random` or `ev5050:0.1`.
impl FromStr for AgentSpec {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rate) = match s.split_once(':') {
            Some((k, r)) => (
                k,
                r.trim()
                    .parse::<f64>()
                    .map_err(|e| AnalysisError::Agent(format!("bad error rate `{r}`: {e}")))?,
            ),
            None => (s, 0.0),
        };
        let spec = AgentSpec::new(kind.parse()?).with_error_rate(rate);
        spec.validate()?;
        Ok(spec)
    }
}

/// Pure decision rule of an agent: one action per P node, or `None` for the
/// random agent.
fn intended(kind: AgentKind, threshold: f64, game: &GameTree) -> Vec<Option<usize>> {
    let mut out = vec![None; game.len()];
    match kind {
        AgentKind::Random => {}
        AgentKind::Bi | AgentKind::Efr => {
            let plans = if kind == AgentKind::Bi {
                backward_induction(game).strategies[Player::P.index()].clone()
            } else {
                efr(game).strategies_of(Player::P).to_vec()
            };
            let plan = first_plan(game, plans);
            for &n in game.player_nodes(Player::P) {
                out[n.0] = plan.action_at(game, n);
            }
        }
        AgentKind::OwnMaxMyopic => {
            for &n in game.player_nodes(Player::P) {
                let best = |a: usize| {
                    game.subtree(game.child(n, a))
                        .filter_map(|m| game.node(m).payoff())
                        .map(|p| p.participant)
                        .max()
                        .unwrap_or(0) as f64
                };
                out[n.0] = Some(argmax_first(game, n, best));
            }
        }
        AgentKind::ExpectedValue5050 | AgentKind::RiskAverse => {
            let model = ComputerModel { kind, threshold };
            for &n in game.player_nodes(Player::P) {
                out[n.0] = Some(argmax_first(game, n, |a| model.value(game, game.child(n, a))[1]));
            }
        }
    }
    out
}

fn first_plan(game: &GameTree, mut plans: Vec<StrategyPlan>) -> StrategyPlan {
    plans.sort_by(|a, b| a.label_key(game).cmp(&b.label_key(game)));
    plans.into_iter().next().expect("solution sets are never empty")
}

/// Action maximizing `score`; ties go to the lexicographically smallest label.
fn argmax_first(game: &GameTree, node: NodeId, score: impl Fn(usize) -> f64) -> usize {
    let mut best: Option<(f64, &str, usize)> = None;
    for (k, a) in game.node(node).actions().iter().enumerate() {
        let v = score(k);
        let better = match best {
            None => true,
            Some((bv, bl, _)) => v > bv + EPS || ((v - bv).abs() <= EPS && a.label.as_str() < bl),
        };
        if better {
            best = Some((v, &a.label, k));
        }
    }
    best.expect("decision node has actions").2
}

/// How an expected-value or risk-averse agent pictures play below a node.
struct ComputerModel {
    kind: AgentKind,
    threshold: f64,
}

impl ComputerModel {
    /// Expected `[computer, participant]` payoff from `node`. Every mover
    /// maximizes its own expectation and mixes 50-50 over tied best moves; a
    /// risk-averse computer settles for a certain payoff once it reaches the
    /// threshold point of every continuation's payoff range.
    fn value(&self, game: &GameTree, node: NodeId) -> [f64; 2] {
        let n = game.node(node);
        if let Some(p) = n.payoff() {
            return [p.computer as f64, p.participant as f64];
        }
        let owner = n.owner().expect("decision node");
        let values: Vec<[f64; 2]> = (0..n.actions().len())
            .map(|a| self.value(game, game.child(node, a)))
            .collect();
        let candidates: Vec<usize> = if self.kind == AgentKind::RiskAverse && owner == Player::C {
            self.risk_averse_candidates(game, node)
        } else {
            (0..values.len()).collect()
        };
        let i = owner.index();
        let best = candidates
            .iter()
            .map(|&a| values[a][i])
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = candidates
            .into_iter()
            .filter(|&a| values[a][i] >= best - EPS)
            .collect();
        let k = tied.len() as f64;
        tied.iter().fold([0.0, 0.0], |acc, &a| {
            [acc[0] + values[a][0] / k, acc[1] + values[a][1] / k]
        })
    }

    fn risk_averse_candidates(&self, game: &GameTree, node: NodeId) -> Vec<usize> {
        let n = game.node(node);
        let (sure, risky): (Vec<usize>, Vec<usize>) =
            (0..n.actions().len()).partition(|&a| game.node(game.child(node, a)).is_leaf());
        if sure.is_empty() || risky.is_empty() {
            return (0..n.actions().len()).collect();
        }
        let certain = sure
            .iter()
            .map(|&a| game.node(game.child(node, a)).payoff().expect("leaf").computer as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let settles = risky.iter().all(|&a| {
            let support: Vec<f64> = game
                .subtree(game.child(node, a))
                .filter_map(|m| game.node(m).payoff())
                .map(|p| p.computer as f64)
                .collect();
            let lo = support.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = support.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            certain >= lo + self.threshold * (hi - lo) - EPS
        });
        if settles {
            sure
        } else {
            risky
        }
    }

    /// The move this model expects the computer to make at `node`.
    fn predict(&self, game: &GameTree, node: NodeId) -> usize {
        let values: Vec<[f64; 2]> = (0..game.node(node).actions().len())
            .map(|a| self.value(game, game.child(node, a)))
            .collect();
        let allowed = if self.kind == AgentKind::RiskAverse {
            self.risk_averse_candidates(game, node)
        } else {
            (0..values.len()).collect()
        };
        argmax_first(game, node, |a| {
            if allowed.contains(&a) {
                values[a][0]
            } else {
                f64::NEG_INFINITY
            }
        })
    }
}

/// Agent with its per-game decisions cached by game name.
#[derive(Debug)]
pub struct Agent {
    pub spec: AgentSpec,
    plans: HashMap<String, Vec<Option<usize>>>,
}

impl Agent {
    pub fn new(spec: AgentSpec) -> Self {
        Agent {
            spec,
            plans: HashMap::new(),
        }
    }

    /// Error-free choice at `node`, `None` for the random agent.
    pub fn intended(&mut self, game: &GameTree, node: NodeId) -> Option<usize> {
        let spec = self.spec;
        self.plans
            .entry(game.name().to_string())
            .or_insert_with(|| intended(spec.kind, spec.risk_threshold, game))
            .get(node.0)
            .copied()
            .flatten()
    }

    pub fn decide<R: Rng>(&mut self, game: &GameTree, node: NodeId, rng: &mut R) -> usize {
        let n = game.node(node).actions().len();
        match self.intended(game, node) {
            None => rng.gen_range(0..n),
            Some(a) if n > 1 && self.spec.error_rate > 0.0 && rng.gen_bool(self.spec.error_rate) => {
                let other = rng.gen_range(0..n - 1);
                if other >= a {
                    other + 1
                } else {
                    other
                }
            }
            Some(a) => a,
        }
    }

    /// The computer move the agent expects at C node `node`, if it has a
    /// view on it.
    pub fn expect_computer(&self, game: &GameTree, node: NodeId) -> Option<usize> {
        match self.spec.kind {
            AgentKind::Bi => backward_induction(game)
                .choices
                .get(&node)
                .and_then(|c| c.first().copied()),
            AgentKind::Efr => {
                let plan = first_plan(game, efr(game).strategies_of(Player::C).to_vec());
                plan.action_at(game, node)
            }
            AgentKind::ExpectedValue5050 | AgentKind::RiskAverse => Some(
                ComputerModel {
                    kind: self.spec.kind,
                    threshold: self.spec.risk_threshold,
                }
                .predict(game, node),
            ),
            AgentKind::OwnMaxMyopic | AgentKind::Random => None,
        }
    }
}

/// One decision of `agent` at P node `node`.
pub fn agent_decide<R: Rng>(agent: &AgentSpec, game: &GameTree, node: NodeId, rng: &mut R) -> usize {
    Agent::new(*agent).decide(game, node, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::shipped::{game, GameId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn first_move(kind: AgentKind, id: GameId) -> String {
        let g = game(id);
        let p1 = g.player_nodes(Player::P)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = agent_decide(&AgentSpec::new(kind), &g, p1, &mut rng);
        g.label(p1, a).to_string()
    }

    #[test]
    fn solution_agents_follow_table_one() {
        assert_eq!(first_move(AgentKind::Efr, GameId::Game1), "d");
        assert_eq!(first_move(AgentKind::Efr, GameId::Game2), "c");
        assert_eq!(first_move(AgentKind::Efr, GameId::Game3), "d");
        assert_eq!(first_move(AgentKind::Efr, GameId::Game4), "c");
        assert_eq!(first_move(AgentKind::Bi, GameId::Game2), "c");
    }

    #[test]
    fn lottery_agents_split_games_three_and_four() {
        for kind in [AgentKind::ExpectedValue5050, AgentKind::RiskAverse] {
            assert_eq!(first_move(kind, GameId::Game3), "d", "{kind}");
            assert_eq!(first_move(kind, GameId::Game4), "c", "{kind}");
        }
    }

    #[test]
    fn risk_threshold_moves_the_cut() {
        let g = game(GameId::Game3);
        let p1 = g.player_nodes(Player::P)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // A certain 2 against a 1..4 range clears a 0.3 bar but not 0.5.
        let mut spec = AgentSpec::new(AgentKind::RiskAverse);
        spec.risk_threshold = 0.3;
        assert_eq!(g.label(p1, agent_decide(&spec, &g, p1, &mut rng)), "c");
    }

    #[test]
    fn own_max_goes_for_the_biggest_bin() {
        for id in GameId::ALL {
            assert_eq!(first_move(AgentKind::OwnMaxMyopic, id), "d", "{id}");
        }
    }

    #[test]
    fn errors_flip_at_the_requested_rate() {
        let g = game(GameId::Game1);
        let p1 = g.player_nodes(Player::P)[0];
        let mut agent = Agent::new(AgentSpec::new(AgentKind::Efr).with_error_rate(0.25));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let flips = (0..4000).filter(|_| agent.decide(&g, p1, &mut rng) == 0).count();
        assert!((900..1100).contains(&flips), "{flips}");
    }

    #[test]
    fn expected_computer_moves() {
        let g = game(GameId::Game3);
        let c2 = g.player_nodes(Player::C)[1];
        let ev = Agent::new(AgentSpec::new(AgentKind::ExpectedValue5050));
        assert_eq!(g.label(c2, ev.expect_computer(&g, c2).unwrap()), "f");
        let g4 = game(GameId::Game4);
        let c2 = g4.player_nodes(Player::C)[1];
        assert_eq!(g4.label(c2, ev.expect_computer(&g4, c2).unwrap()), "e");
        assert_eq!(Agent::new(AgentSpec::new(AgentKind::Random)).expect_computer(&g4, c2), None);
    }

    #[test]
    fn spec_parsing() {
        let s: AgentSpec = "ev5050:0.1".parse().unwrap();
        assert_eq!(s.kind, AgentKind::ExpectedValue5050);
        assert_eq!(s.error_rate, 0.1);
        assert!("efr:1.5".parse::<AgentSpec>().is_err());
        assert!("nobody".parse::<AgentSpec>().is_err());
        for k in AgentKind::ALL {
            assert_eq!(k.as_str().parse::<AgentKind>().unwrap(), k);
        }
    }
}
