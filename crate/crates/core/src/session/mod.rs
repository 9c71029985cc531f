//! One participant's run through the protocol: practice games, the 48
//! experimental trials with a break halfway, question prompts by group,
//! timing capture and payment. All timestamps come from the caller.

mod export;
mod log;
mod variant;
mod view;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{compute_payment, parse_export, write_csv, Cents, ExportRow, ParticipantInfo, CSV_HEADER};
pub use log::{Event, EventKind};
pub use variant::{variants_for, Orientation, VisualVariant};
pub use view::{ActionView, NodeView, QuestionView, SessionView};

use crate::game::shipped::{game, practice_games, GameId};
use crate::game::{enumerate_strategies, GameTree, NodeId, Player, StrategyPlan};
use crate::opponent::{best_response_plan, generate_schedule, OpponentConfig, OpponentError};
use crate::solver::Conjecture;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    Config(String),
    #[error(transparent)]
    Opponent(#[from] OpponentError),
    #[error("it is not {0}'s turn")]
    OutOfTurn(Player),
    #[error("no action `{0}` at the marble's node")]
    IllegalAction(String),
    #[error("computer plan prescribes `{expected}`, got `{got}`")]
    ComputerMismatch { expected: String, got: String },
    #[error("no question is pending")]
    NoPendingQuestion,
    #[error("a question must be answered first")]
    QuestionPending,
    #[error("cannot {action} while {step}")]
    WrongStep { action: &'static str, step: String },
    #[error("timestamp {ts} precedes the previous event at {last}")]
    TimeWentBackwards { ts: u64, last: u64 },
    #[error("cannot replay log: {0}")]
    Replay(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub fn question_rounds(self) -> &'static [usize] {
        match self {
            Group::A => &[3, 4, 7, 8],
            Group::B => &[7, 8],
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
        })
    }
}

impl FromStr for Group {
    type Err = SessionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Group::A),
            "B" | "b" => Ok(Group::B),
            other => Err(SessionError::Config(format!("unknown group `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub participant: String,
    pub group: Group,
    pub seed: u64,
    pub opponent: OpponentConfig,
    pub practice_count: usize,
    pub rounds: usize,
    pub game_order: Vec<GameId>,
    #[serde(default)]
    pub info: ParticipantInfo,
}

impl SessionConfig {
    pub fn new(participant: impl Into<String>, group: Group, seed: u64) -> Self {
        SessionConfig {
            participant: participant.into(),
            group,
            seed,
            opponent: OpponentConfig::default(),
            practice_count: 14,
            rounds: 8,
            game_order: GameId::ALL.to_vec(),
            info: ParticipantInfo::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Practice,
    Experimental,
    Break,
    Finished,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrialKind {
    Practice { number: usize, level: usize },
    Experimental { game: GameId, round: usize },
}

/// Everything fixed about a trial before the session starts.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSpec {
    pub kind: TrialKind,
    pub game: GameTree,
    pub variant: VisualVariant,
    pub computer_plan: StrategyPlan,
    pub justification: Conjecture,
    pub question: bool,
}

impl TrialSpec {
    pub fn is_practice(&self) -> bool {
        matches!(self.kind, TrialKind::Practice { .. })
    }
}

/// Answer options of the question prompt, as shown.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    Left,
    Right,
    Undecided,
}

/// Recorded answer: the computer move the participant expected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Move(String),
    #[serde(rename = "undecided")]
    Undecided,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Move(m) => f.write_str(m),
            Answer::Undecided => f.write_str("undecided"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub kind: TrialKind,
    pub first_choice: Option<String>,
    pub second_choice: Option<String>,
    pub t_start_ms: Option<u64>,
    pub t_first_ms: Option<u64>,
    pub t_second_ms: Option<u64>,
    pub question_answer: Option<Answer>,
    pub t_question_ms: Option<u64>,
    pub marbles_won: u32,
    pub path: Vec<String>,
}

impl TrialRecord {
    fn empty(kind: TrialKind) -> Self {
        TrialRecord {
            kind,
            first_choice: None,
            second_choice: None,
            t_start_ms: None,
            t_first_ms: None,
            t_second_ms: None,
            question_answer: None,
            t_question_ms: None,
            marbles_won: 0,
            path: Vec::new(),
        }
    }
}

/// Where the current trial stands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum Step {
    /// Game shown, waiting for the start click.
    Ready { shown_at: u64 },
    /// Marble at `position`; `arrived_at` is when it got there.
    Playing { arrived_at: u64 },
    /// Question on screen since `shown_at`.
    Question { shown_at: u64 },
    /// Marble in a bin; waiting for the next click.
    Over,
    /// Break or end of session.
    Idle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionState {
    pub phase: Phase,
    pub trial: usize,
    pub position: NodeId,
    pub turn: Option<Player>,
    pub step: Step,
    /// Marbles won in the current phase; reset when the experiment starts.
    pub marbles: u64,
    pub records: Vec<TrialRecord>,
    last_ts: u64,
    current: TrialRecord,
    p_moves: usize,
}

/// Trial plan for `config`: practice games in increasing difficulty, then
/// rounds of the experimental games in fixed order.
pub fn build_session(config: &SessionConfig) -> Result<Vec<TrialSpec>, SessionError> {
    if config.rounds == 0 && config.practice_count == 0 {
        return Err(SessionError::Config("session has no trials".into()));
    }
    if config.game_order.is_empty() && config.rounds > 0 {
        return Err(SessionError::Config("empty game order".into()));
    }
    let mut trials = Vec::new();
    let practice = practice_games();
    for i in 0..config.practice_count {
        let g = practice[i % practice.len()].clone();
        let p_plans = enumerate_strategies(&g, Player::P);
        let conj = Conjecture::uniform(&p_plans).expect("games have P plans");
        trials.push(TrialSpec {
            kind: TrialKind::Practice {
                number: i + 1,
                level: practice_level(g.decision_nodes().count()),
            },
            computer_plan: best_response_plan(&g, &conj),
            justification: conj,
            variant: VisualVariant::default(),
            game: g,
            question: false,
        });
    }
    if config.rounds == 0 {
        return Ok(trials);
    }
    let opp = OpponentConfig {
        rounds: config.rounds,
        games: config.game_order.clone(),
        ..config.opponent.clone()
    };
    let schedule = generate_schedule(&opp, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0f_7a71a75);
    let variants: Vec<Vec<VisualVariant>> = config
        .game_order
        .iter()
        .map(|&id| variants_for(&game(id), config.rounds, &mut rng))
        .collect();
    for round in 1..=config.rounds {
        for (gi, &id) in config.game_order.iter().enumerate() {
            let e = schedule.entry(id, round).expect("schedule covers every trial");
            trials.push(TrialSpec {
                kind: TrialKind::Experimental { game: id, round },
                game: game(id),
                variant: variants[gi][round - 1].clone(),
                computer_plan: e.plan.clone(),
                justification: e.justification.clone(),
                question: config.group.question_rounds().contains(&round),
            });
        }
    }
    Ok(trials)
}

fn practice_level(decision_nodes: usize) -> usize {
    decision_nodes.clamp(1, 4)
}

/// Live session: fixed trial plan, mutable state, append-only event log.
#[derive(Clone, Debug)]
pub struct Session {
    pub config: SessionConfig,
    pub trials: Vec<TrialSpec>,
    pub state: SessionState,
    events: Vec<Event>,
}

impl Session {
    pub fn new(config: SessionConfig, created_ms: u64) -> Result<Self, SessionError> {
        let trials = build_session(&config)?;
        let first = &trials[0];
        let state = SessionState {
            phase: if first.is_practice() {
                Phase::Practice
            } else {
                Phase::Experimental
            },
            trial: 0,
            position: first.game.root(),
            turn: None,
            step: Step::Ready {
                shown_at: created_ms,
            },
            marbles: 0,
            records: Vec::new(),
            last_ts: created_ms,
            current: TrialRecord::empty(first.kind.clone()),
            p_moves: 0,
        };
        let events = vec![Event {
            seq: 0,
            ts: created_ms,
            kind: EventKind::Created {
                config: Box::new(config.clone()),
            },
        }];
        Ok(Session {
            config,
            trials,
            state,
            events,
        })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn current_trial(&self) -> Option<&TrialSpec> {
        match self.state.phase {
            Phase::Finished | Phase::Break => None,
            _ => self.trials.get(self.state.trial),
        }
    }

    /// Timestamp of the latest event; later calls must not go below it.
    pub fn last_ts(&self) -> u64 {
        self.state.last_ts
    }

    /// Number of practice trials preceding the experimental ones.
    pub fn practice_len(&self) -> usize {
        self.trials.iter().filter(|t| t.is_practice()).count()
    }

    fn check_time(&self, ts: u64) -> Result<(), SessionError> {
        if ts < self.state.last_ts {
            return Err(SessionError::TimeWentBackwards {
                ts,
                last: self.state.last_ts,
            });
        }
        Ok(())
    }

    fn step_name(&self) -> String {
        match (&self.state.phase, &self.state.step) {
            (Phase::Break, _) => "on break".into(),
            (Phase::Finished, _) => "finished".into(),
            (_, Step::Ready { .. }) => "waiting for start".into(),
            (_, Step::Playing { .. }) => "playing".into(),
            (_, Step::Question { .. }) => "a question is pending".into(),
            (_, Step::Over) => "the trial is over".into(),
            (_, Step::Idle) => "idle".into(),
        }
    }

    fn log(&mut self, ts: u64, kind: EventKind) {
        self.state.last_ts = ts;
        let seq = self.events.len() as u64;
        self.events.push(Event { seq, ts, kind });
    }

    /// Start click on the shown game.
    pub fn start_trial(&mut self, ts: u64) -> Result<(), SessionError> {
        self.check_time(ts)?;
        let Step::Ready { shown_at } = self.state.step else {
            return Err(SessionError::WrongStep {
                action: "start",
                step: self.step_name(),
            });
        };
        if matches!(self.state.phase, Phase::Break | Phase::Finished) {
            return Err(SessionError::WrongStep {
                action: "start",
                step: self.step_name(),
            });
        }
        let t = &self.trials[self.state.trial];
        self.state.current.t_start_ms = Some(ts - shown_at);
        self.state.position = t.game.root();
        self.state.turn = t.game.node(t.game.root()).owner();
        self.state.step = Step::Playing { arrived_at: ts };
        self.log(ts, EventKind::Start);
        if self.state.turn.is_none() {
            self.finish_trial();
        }
        Ok(())
    }

    /// Drops the marble through `action` at the current node.
    pub fn apply_move(&mut self, actor: Player, action: &str, ts: u64) -> Result<(), SessionError> {
        self.check_time(ts)?;
        let arrived_at = match self.state.step {
            Step::Playing { arrived_at } => arrived_at,
            Step::Question { .. } => return Err(SessionError::QuestionPending),
            _ => {
                return Err(SessionError::WrongStep {
                    action: "move",
                    step: self.step_name(),
                })
            }
        };
        if self.state.turn != Some(actor) {
            return Err(SessionError::OutOfTurn(actor));
        }
        let t = &self.trials[self.state.trial];
        let g = &t.game;
        let node = self.state.position;
        let idx = g
            .node(node)
            .actions()
            .iter()
            .position(|a| a.label == action)
            .ok_or_else(|| SessionError::IllegalAction(action.to_string()))?;
        if actor == Player::C {
            let planned = t.computer_plan.action_at(g, node).expect("C node");
            if planned != idx {
                return Err(SessionError::ComputerMismatch {
                    expected: g.label(node, planned).to_string(),
                    got: action.to_string(),
                });
            }
        }
        let question = t.question;
        let next = g.child(node, idx);
        let next_owner = g.node(next).owner();
        let leaf = g.node(next).is_leaf();

        let rec = &mut self.state.current;
        rec.path.push(action.to_string());
        let mut ask = false;
        if actor == Player::P {
            let elapsed = Some(ts - arrived_at);
            match self.state.p_moves {
                0 => {
                    rec.first_choice = Some(action.to_string());
                    rec.t_first_ms = elapsed;
                    ask = question && !leaf;
                }
                1 => {
                    rec.second_choice = Some(action.to_string());
                    rec.t_second_ms = elapsed;
                }
                _ => {}
            }
            self.state.p_moves += 1;
        }
        self.state.position = next;
        self.state.turn = next_owner;
        self.state.step = if ask {
            Step::Question { shown_at: ts }
        } else {
            Step::Playing { arrived_at: ts }
        };
        self.log(
            ts,
            EventKind::Move {
                actor,
                action: action.to_string(),
            },
        );
        if leaf && !ask {
            self.finish_trial();
        }
        Ok(())
    }

    /// Records the answer to the pending question.
    pub fn answer_question(&mut self, choice: Choice, ts: u64) -> Result<(), SessionError> {
        self.check_time(ts)?;
        let Step::Question { shown_at } = self.state.step else {
            return Err(SessionError::NoPendingQuestion);
        };
        let answer = self.translate(choice);
        self.state.current.question_answer = Some(answer);
        self.state.current.t_question_ms = Some(ts - shown_at);
        self.state.step = Step::Playing { arrived_at: ts };
        self.log(ts, EventKind::Answer { choice });
        if self.trials[self.state.trial].game.node(self.state.position).is_leaf() {
            self.finish_trial();
        }
        Ok(())
    }

    /// Maps left/right to the computer move displayed on that side at its
    /// node following the participant's first choice.
    fn translate(&self, choice: Choice) -> Answer {
        let t = &self.trials[self.state.trial];
        let g = &t.game;
        let target = Some(self.state.position).filter(|&n| g.node(n).owner() == Some(Player::C));
        let side = match choice {
            Choice::Undecided => return Answer::Undecided,
            Choice::Left => 0,
            Choice::Right => 1,
        };
        match target {
            Some(n) => {
                let order = t.variant.display_order(g, n);
                let i = order[side.min(order.len() - 1)];
                Answer::Move(g.label(n, i).to_string())
            }
            None => Answer::Move(if side == 0 { "left" } else { "right" }.to_string()),
        }
    }

    fn finish_trial(&mut self) {
        let t = &self.trials[self.state.trial];
        let won = t
            .game
            .node(self.state.position)
            .payoff()
            .expect("marble in a bin")
            .participant;
        self.state.current.marbles_won = won;
        self.state.marbles += won as u64;
        let rec = std::mem::replace(&mut self.state.current, TrialRecord::empty(t.kind.clone()));
        self.state.records.push(rec);
        self.state.turn = None;
        self.state.step = Step::Over;
    }

    /// Plays the computer's scheduled moves while it has the marble.
    pub fn advance_computer(&mut self, ts: u64) -> Result<usize, SessionError> {
        let mut n = 0;
        while self.state.turn == Some(Player::C) && matches!(self.state.step, Step::Playing { .. }) {
            let t = &self.trials[self.state.trial];
            let a = t
                .computer_plan
                .action_at(&t.game, self.state.position)
                .expect("C node");
            let label = t.game.label(self.state.position, a).to_string();
            self.apply_move(Player::C, &label, ts)?;
            n += 1;
        }
        Ok(n)
    }

    /// NEXT click after a finished trial.
    pub fn next_trial(&mut self, ts: u64) -> Result<(), SessionError> {
        self.check_time(ts)?;
        if self.state.step != Step::Over {
            return Err(SessionError::WrongStep {
                action: "go to the next game",
                step: self.step_name(),
            });
        }
        let done = self.state.trial;
        let next = done + 1;
        let practice = self.practice_len();
        let experimental = self.trials.len() - practice;
        self.log(ts, EventKind::Next);
        if next == self.trials.len() {
            self.state.phase = Phase::Finished;
            self.state.step = Step::Idle;
            return Ok(());
        }
        let half = if self.config.rounds >= 2 {
            practice + (self.config.rounds / 2) * self.config.game_order.len()
        } else {
            usize::MAX
        };
        self.state.trial = next;
        self.state.p_moves = 0;
        self.state.current = TrialRecord::empty(self.trials[next].kind.clone());
        self.state.position = self.trials[next].game.root();
        if next == practice && practice > 0 {
            self.state.marbles = 0;
        }
        if next == half && experimental > 0 {
            self.state.phase = Phase::Break;
            self.state.step = Step::Idle;
            return Ok(());
        }
        self.state.phase = if self.trials[next].is_practice() {
            Phase::Practice
        } else {
            Phase::Experimental
        };
        self.state.step = Step::Ready { shown_at: ts };
        Ok(())
    }

    /// End of the break; shows the next game.
    pub fn resume(&mut self, ts: u64) -> Result<(), SessionError> {
        self.check_time(ts)?;
        if self.state.phase != Phase::Break {
            return Err(SessionError::WrongStep {
                action: "resume",
                step: self.step_name(),
            });
        }
        self.state.phase = Phase::Experimental;
        self.state.step = Step::Ready { shown_at: ts };
        self.log(ts, EventKind::Resume);
        Ok(())
    }

    /// Experimental-phase marbles so far.
    pub fn experimental_marbles(&self) -> u64 {
        self.state
            .records
            .iter()
            .filter(|r| matches!(r.kind, TrialKind::Experimental { .. }))
            .map(|r| r.marbles_won as u64)
            .sum()
    }

    pub fn payment(&self) -> Cents {
        compute_payment(self.experimental_marbles())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(group: Group) -> SessionConfig {
        SessionConfig::new("p1", group, 42)
    }

    /// Plays a whole trial: start, then P picks `pick(node)` whenever it is
    /// on turn, answering questions with `undecided`.
    fn play(s: &mut Session, ts: &mut u64, pick: &dyn Fn(&GameTree, NodeId) -> usize) {
        *ts += 100;
        s.start_trial(*ts).unwrap();
        loop {
            *ts += 10;
            s.advance_computer(*ts).unwrap();
            match s.state.step {
                Step::Question { .. } => {
                    *ts += 50;
                    s.answer_question(Choice::Undecided, *ts).unwrap();
                }
                Step::Playing { .. } if s.state.turn == Some(Player::P) => {
                    let t = &s.trials[s.state.trial];
                    let a = pick(&t.game, s.state.position);
                    let l = t.game.label(s.state.position, a).to_string();
                    *ts += 250;
                    s.apply_move(Player::P, &l, *ts).unwrap();
                }
                Step::Over => break,
                ref other => panic!("unexpected step {other:?}"),
            }
        }
        *ts += 5;
        s.next_trial(*ts).unwrap();
        if s.state.phase == Phase::Break {
            *ts += 300_000;
            s.resume(*ts).unwrap();
        }
    }

    #[test]
    fn trial_plan_shape() {
        let t = build_session(&cfg(Group::A)).unwrap();
        assert_eq!(t.len(), 14 + 48);
        assert_eq!(t.iter().filter(|t| t.question).count(), 24);
        let t = build_session(&cfg(Group::B)).unwrap();
        assert_eq!(t.iter().filter(|t| t.question).count(), 12);
        let mut c = cfg(Group::B);
        c.rounds = 1;
        c.practice_count = 0;
        let t = build_session(&c).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|t| !t.question));
    }

    #[test]
    fn computer_exit_ends_trial_without_first_choice() {
        let mut c = cfg(Group::A);
        c.practice_count = 0;
        c.opponent.deviation_rate = 0.0;
        let mut s = Session::new(c, 0).unwrap();
        s.start_trial(500).unwrap();
        s.advance_computer(600).unwrap();
        assert_eq!(s.state.step, Step::Over);
        let r = &s.state.records[0];
        assert_eq!(r.first_choice, None);
        assert_eq!(r.t_start_ms, Some(500));
        assert_eq!(r.path, ["a"]);
    }

    #[test]
    fn out_of_turn_leaves_state_untouched() {
        let mut c = cfg(Group::A);
        c.practice_count = 0;
        let mut s = Session::new(c, 0).unwrap();
        s.start_trial(10).unwrap();
        let before = s.state.clone();
        let err = s.apply_move(Player::P, "c", 20).unwrap_err();
        assert!(matches!(err, SessionError::OutOfTurn(Player::P)));
        assert_eq!(s.state, before);
        assert!(matches!(s.answer_question(Choice::Left, 30), Err(SessionError::NoPendingQuestion)));
        assert!(matches!(s.apply_move(Player::C, "zz", 30), Err(SessionError::IllegalAction(_))));
        assert!(matches!(s.apply_move(Player::C, "a", 5), Err(SessionError::TimeWentBackwards { .. })));
    }

    #[test]
    fn game3_b_d_f_h_credits_four() {
        let mut c = cfg(Group::B);
        c.practice_count = 0;
        c.rounds = 1;
        c.game_order = vec![GameId::Game3];
        c.opponent.deviation_rate = 1.0;
        let mut s = Session::new(c, 0).unwrap();
        let g = s.trials[0].game.clone();
        assert_eq!(s.trials[0].computer_plan.notation(&g), "b;f");
        s.start_trial(1).unwrap();
        s.advance_computer(2).unwrap();
        s.apply_move(Player::P, "d", 3).unwrap();
        s.advance_computer(4).unwrap();
        s.apply_move(Player::P, "h", 9).unwrap();
        let r = &s.state.records[0];
        assert_eq!(r.path, ["b", "d", "f", "h"]);
        assert_eq!(r.marbles_won, 4);
        assert_eq!((r.t_first_ms, r.t_second_ms), (Some(1), Some(5)));
    }

    #[test]
    fn question_follows_first_choice_in_flagged_rounds() {
        let mut s = Session::new(
            SessionConfig {
                practice_count: 0,
                ..cfg(Group::B)
            },
            0,
        )
        .unwrap();
        let mut ts = 0;
        let always_d = |g: &GameTree, n: NodeId| g.node(n).actions().iter().position(|a| a.label == "d").unwrap_or(0);
        for _ in 0..48 {
            play(&mut s, &mut ts, &always_d);
        }
        assert_eq!(s.state.phase, Phase::Finished);
        for r in &s.state.records {
            let TrialKind::Experimental { round, .. } = r.kind else { panic!() };
            let asked = r.question_answer.is_some();
            assert_eq!(asked, round >= 7 && r.first_choice.is_some(), "{r:?}");
        }
    }

    #[test]
    fn left_and_right_follow_the_variant() {
        let mut c = cfg(Group::A);
        c.practice_count = 0;
        c.rounds = 3;
        c.game_order = vec![GameId::Game1Prime];
        let mut s = Session::new(c, 0).unwrap();
        let mut ts = 0;
        for _ in 0..2 {
            play(&mut s, &mut ts, &|_, _| 0);
        }
        // Round 3 asks. P moves d, then the marble sits at C's node.
        s.start_trial(ts + 1).unwrap();
        s.apply_move(Player::P, "d", ts + 2).unwrap();
        let t = &s.trials[s.state.trial];
        let c1 = t.game.node_by_name("c1").unwrap();
        let expect = if t.variant.is_mirrored("c1") { "f" } else { "e" };
        assert_eq!(s.state.position, c1);
        s.answer_question(Choice::Left, ts + 9).unwrap();
        assert_eq!(s.state.current.question_answer, Some(Answer::Move(expect.into())));
        assert_eq!(s.state.current.t_question_ms, Some(7));
    }

    #[test]
    fn break_after_half_and_phase_reset() {
        let mut s = Session::new(cfg(Group::A), 0).unwrap();
        let mut ts = 0;
        for _ in 0..14 {
            play(&mut s, &mut ts, &|_, _| 0);
        }
        assert_eq!(s.state.phase, Phase::Experimental);
        assert_eq!(s.state.marbles, 0);
        for _ in 0..23 {
            play(&mut s, &mut ts, &|_, _| 0);
        }
        // The 24th experimental trial ends in a break.
        ts += 100;
        s.start_trial(ts).unwrap();
        loop {
            s.advance_computer(ts).unwrap();
            match s.state.step {
                Step::Over => break,
                Step::Question { .. } => s.answer_question(Choice::Right, ts).unwrap(),
                _ => s.apply_move(Player::P, "c", ts).unwrap(),
            }
        }
        s.next_trial(ts + 1).unwrap();
        assert_eq!(s.state.phase, Phase::Break);
        assert!(s.start_trial(ts + 2).is_err());
        s.resume(ts + 300_000).unwrap();
        assert_eq!(s.state.trial, 14 + 24);
    }
}
