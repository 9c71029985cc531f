use serde::Serialize;

use super::{Phase, Session, Step, TrialKind};
use crate::game::Player;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionView {
    pub label: String,
    pub child: String,
    pub side: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeView {
    pub name: String,
    /// `None` for bins.
    pub owner: Option<Player>,
    /// Left to right as displayed.
    pub actions: Vec<ActionView>,
    /// `[computer, participant]` marbles in a bin.
    pub bin: Option<[u32; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuestionView {
    pub prompt: &'static str,
    pub options: [&'static str; 3],
}

/// Everything the browser needs to draw the current screen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionView {
    pub participant: String,
    pub phase: Phase,
    pub trial_index: usize,
    pub trial_count: usize,
    pub trial: Option<TrialKind>,
    pub step: &'static str,
    pub root: Option<String>,
    pub nodes: Vec<NodeView>,
    pub marble: Option<String>,
    pub turn: Option<Player>,
    pub question: Option<QuestionView>,
    pub last_won: Option<u32>,
    pub total_marbles: u64,
    pub payment: String,
}

impl Session {
    pub fn view(&self) -> SessionView {
        let st = &self.state;
        let step = match (&st.phase, &st.step) {
            (Phase::Break, _) => "break",
            (Phase::Finished, _) => "finished",
            (_, Step::Ready { .. }) => "ready",
            (_, Step::Playing { .. }) => "playing",
            (_, Step::Question { .. }) => "question",
            (_, Step::Over) => "over",
            (_, Step::Idle) => "idle",
        };
        let shown = self.current_trial().filter(|_| st.step != Step::Idle);
        let nodes = shown
            .map(|t| {
                let g = &t.game;
                g.nodes()
                    .map(|(id, n)| NodeView {
                        name: n.name.clone(),
                        owner: n.owner(),
                        actions: t
                            .variant
                            .display_order(g, id)
                            .into_iter()
                            .enumerate()
                            .map(|(pos, a)| ActionView {
                                label: g.label(id, a).to_string(),
                                child: g.node(g.child(id, a)).name.clone(),
                                side: if pos == 0 { "left" } else { "right" },
                            })
                            .collect(),
                        bin: n.payoff().map(|p| [p.computer, p.participant]),
                    })
                    .collect()
            })
            .unwrap_or_default();
        SessionView {
            participant: self.config.participant.clone(),
            phase: st.phase,
            trial_index: st.trial,
            trial_count: self.trials.len(),
            trial: shown.map(|t| t.kind.clone()),
            step,
            root: shown.map(|t| t.game.node(t.game.root()).name.clone()),
            nodes,
            marble: shown.map(|t| t.game.node(st.position).name.clone()),
            turn: st.turn,
            question: matches!(st.step, Step::Question { .. }).then_some(QuestionView {
                prompt: "At your first choice, which way did you expect the computer to go next?",
                options: ["left", "right", "undecided"],
            }),
            last_won: (st.step == Step::Over)
                .then(|| st.records.last().map(|r| r.marbles_won))
                .flatten(),
            total_marbles: st.marbles,
            payment: self.payment().to_string(),
        }
    }
}
