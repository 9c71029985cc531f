//! Backward induction (with ties), extensive-form rationalizability, and
//! the theorem checks relating the two.

mod bi;
mod efr;
mod justify;
pub mod lp;
mod random;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

pub use bi::{backward_induction, subgame_perfect_profiles, BiReport};
pub use efr::{efr, justification_context, EfrReport, Elimination, Level};
pub use justify::{justifiable, Conjecture, ConjectureSpec, WeightedPlan};
pub use lp::Q;
pub use random::{random_game, RandomGameConfig};

use crate::game::{has_relevant_ties, GameError, GameTree, PathOutcome, Player};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid conjecture: {0}")]
    BadConjecture(String),
    #[error("no acceptable game after {0} attempts")]
    GenerationBudget(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Both solution concepts for one game.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub game: String,
    pub ties: bool,
    pub bi: BiReport,
    pub efr: EfrReport,
}

pub fn solve(game: &GameTree) -> SolveReport {
    SolveReport {
        game: game.name().to_string(),
        ties: has_relevant_ties(game),
        bi: backward_induction(game),
        efr: efr(game),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub ties: bool,
    pub efr_subset_of_bi: bool,
    /// Only meaningful without relevant ties: both outcome sets are the same
    /// singleton.
    pub unique_outcome_match: Option<bool>,
    pub efr_nonempty: bool,
    pub spe_outcomes_in_bi: bool,
    /// Without relevant ties, exactly one subgame-perfect profile exists.
    pub unique_spe: Option<bool>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.efr_subset_of_bi
            && self.efr_nonempty
            && self.spe_outcomes_in_bi
            && self.unique_outcome_match.unwrap_or(true)
            && self.unique_spe.unwrap_or(true)
    }
}

pub fn check_theorems(game: &GameTree) -> TheoremReport {
    check_report(game, &solve(game))
}

pub fn check_report(game: &GameTree, r: &SolveReport) -> TheoremReport {
    let bi = r.bi.outcome_leaves();
    let efr = r.efr.outcome_leaves();
    let spe_in_bi = r.bi.spe_profiles.iter().all(|(c, p)| {
        bi.contains(&crate::game::play_profile(game, c, p).leaf)
    });
    TheoremReport {
        ties: r.ties,
        efr_subset_of_bi: efr.is_subset(&bi),
        unique_outcome_match: (!r.ties).then(|| bi.len() == 1 && bi == efr),
        efr_nonempty: Player::BOTH
            .iter()
            .all(|&p| !r.efr.strategies_of(p).is_empty()),
        spe_outcomes_in_bi: spe_in_bi,
        unique_spe: (!r.ties).then(|| r.bi.spe_profiles.len() == 1),
    }
}

/// Machine-readable view of a [`SolveReport`], plans in `a;e` notation.
#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub game: String,
    pub relevant_ties: bool,
    pub bi_choices: BTreeMap<String, Vec<String>>,
    pub bi_strategies: BTreeMap<Player, Vec<String>>,
    pub bi_outcomes: Vec<PathOutcome>,
    pub spe_profiles: Vec<[String; 2]>,
    pub efr_levels: Vec<BTreeMap<Player, Vec<String>>>,
    pub efr_strategies: BTreeMap<Player, Vec<String>>,
    pub efr_outcomes: Vec<PathOutcome>,
    pub eliminations: Vec<EliminationSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationSummary {
    pub player: Player,
    pub plan: String,
    pub level: usize,
    pub node: String,
}

impl SolveReport {
    pub fn summary(&self, game: &GameTree) -> SolveSummary {
        let names = |plans: &[crate::game::StrategyPlan]| -> Vec<String> {
            plans.iter().map(|p| p.notation(game)).collect()
        };
        let by_player = |f: &dyn Fn(Player) -> Vec<String>| -> BTreeMap<Player, Vec<String>> {
            Player::BOTH.iter().map(|&p| (p, f(p))).collect()
        };
        SolveSummary {
            game: self.game.clone(),
            relevant_ties: self.ties,
            bi_choices: self
                .bi
                .choices
                .iter()
                .map(|(n, acts)| {
                    (
                        game.node(*n).name.clone(),
                        acts.iter().map(|&a| game.label(*n, a).to_string()).collect(),
                    )
                })
                .collect(),
            bi_strategies: by_player(&|p| names(self.bi.strategies_of(p))),
            bi_outcomes: self.bi.outcomes.clone(),
            spe_profiles: self
                .bi
                .spe_profiles
                .iter()
                .map(|(c, p)| [c.notation(game), p.notation(game)])
                .collect(),
            efr_levels: self
                .efr
                .levels
                .iter()
                .map(|lvl| by_player(&|p| names(&lvl[p.index()])))
                .collect(),
            efr_strategies: by_player(&|p| names(self.efr.strategies_of(p))),
            efr_outcomes: self.efr.outcomes.clone(),
            eliminations: self
                .efr
                .trace
                .iter()
                .map(|e| EliminationSummary {
                    player: e.plan.owner(),
                    plan: e.plan.notation(game),
                    level: e.level,
                    node: game.node(e.node).name.clone(),
                })
                .collect(),
        }
    }
}

/// Rows of `| game | BI strategy | EFR strategy |`, two lines per game.
pub fn render_table(rows: &[(String, &GameTree, &SolveReport)]) -> String {
    let mut lines: Vec<[String; 3]> = Vec::new();
    for (title, game, report) in rows {
        for (i, p) in Player::BOTH.iter().enumerate() {
            let join = |plans: &[crate::game::StrategyPlan]| {
                let v: Vec<String> = plans.iter().map(|s| s.notation(game)).collect();
                format!("{p}: {}", v.join(", "))
            };
            lines.push([
                if i == 0 { title.clone() } else { String::new() },
                join(report.bi.strategies_of(*p)),
                join(report.efr.strategies_of(*p)),
            ]);
        }
    }
    let header = ["Game".to_string(), "BI strategy".into(), "EFR strategy".into()];
    let widths: Vec<usize> = (0..3)
        .map(|c| {
            lines
                .iter()
                .chain(std::iter::once(&header))
                .map(|l| l[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let sep = {
        let mut s = String::from("+");
        for w in &widths {
            s.push_str(&"-".repeat(w + 2));
            s.push('+');
        }
        s
    };
    let fmt_row = |l: &[String; 3]| {
        let mut s = String::from("|");
        for (c, w) in widths.iter().enumerate() {
            let pad = w - l[c].chars().count();
            let _ = write!(s, " {}{} |", l[c], " ".repeat(pad));
        }
        s
    };
    let mut out = vec![sep.clone(), fmt_row(&header), sep.clone()];
    for (i, l) in lines.iter().enumerate() {
        out.push(fmt_row(l));
        if i % 2 == 1 {
            out.push(sep.clone());
        }
    }
    out.join("\n")
}
