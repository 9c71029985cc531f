use serde::{Deserialize, Serialize};

use super::{Choice, Session, SessionConfig, SessionError};
use crate::game::Player;

/// One line of the append-only session log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub ts: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    Created { config: Box<SessionConfig> },
    Start,
    Move { actor: Player, action: String },
    Answer { choice: Choice },
    Next,
    Resume,
}

impl Event {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }
}

impl Session {
    /// Whole log as JSON lines.
    pub fn to_jsonl(&self) -> String {
        self.events().iter().map(|e| e.to_line() + "\n").collect()
    }

    /// Rebuilds a session by re-applying every logged event.
    pub fn replay(text: &str) -> Result<Session, SessionError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first: Event = lines
            .next()
            .ok_or_else(|| SessionError::Replay("empty log".into()))
            .and_then(|l| serde_json::from_str(l).map_err(|e| SessionError::Replay(e.to_string())))?;
        let EventKind::Created { config } = first.kind else {
            return Err(SessionError::Replay("log must begin with `created`".into()));
        };
        let mut s = Session::new(*config, first.ts)?;
        for (i, line) in lines.enumerate() {
            let e: Event = serde_json::from_str(line)
                .map_err(|err| SessionError::Replay(format!("line {}: {err}", i + 2)))?;
            s.apply_event(&e)?;
        }
        Ok(s)
    }

    pub fn apply_event(&mut self, e: &Event) -> Result<(), SessionError> {
        match &e.kind {
            EventKind::Created { .. } => Err(SessionError::Replay("duplicate `created`".into())),
            EventKind::Start => self.start_trial(e.ts),
            EventKind::Move { actor, action } => self.apply_move(*actor, action, e.ts),
            EventKind::Answer { choice } => self.answer_question(*choice, e.ts),
            EventKind::Next => self.next_trial(e.ts),
            EventKind::Resume => self.resume(e.ts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{Group, Step};

    #[test]
    fn replay_reproduces_state() {
        let mut c = SessionConfig::new("r", Group::A, 3);
        c.practice_count = 2;
        c.rounds = 2;
        let mut s = Session::new(c, 100).unwrap();
        let mut ts = 100;
        while s.state.phase != crate::session::Phase::Finished {
            ts += 7;
            match s.state.step {
                Step::Ready { .. } => s.start_trial(ts).unwrap(),
                Step::Over => s.next_trial(ts).unwrap(),
                Step::Question { .. } => s.answer_question(Choice::Left, ts).unwrap(),
                Step::Idle => s.resume(ts).unwrap(),
                Step::Playing { .. } => {
                    if s.advance_computer(ts).unwrap() == 0 {
                        let t = &s.trials[s.state.trial];
                        let l = t.game.label(s.state.position, 1).to_string();
                        s.apply_move(Player::P, &l, ts).unwrap();
                    }
                }
            }
        }
        let log = s.to_jsonl();
        assert!(log.lines().all(|l| l.contains("\"type\"") && l.contains("\"ts\"")));
        let back = Session::replay(&log).unwrap();
        assert_eq!(back.state, s.state);
        assert_eq!(back.to_jsonl(), log);
        assert!(Session::replay("").is_err());
        assert!(Session::replay(log.lines().nth(1).unwrap()).is_err());
    }
}
