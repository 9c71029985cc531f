use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Group, Session, SessionError, TrialKind};
use crate::game::shipped::GameId;

pub const CSV_HEADER: &str = "participant,group,game,round,first_choice,second_choice,t_start_ms,t_first_ms,t_second_ms,question_answer,t_question_ms,marbles_won";

/// Collected before the practice phase; exported separately from the trial
/// table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantInfo {
    pub name: Option<String>,
    pub age: Option<u32>,
    pub gender: Option<String>,
    pub field_of_study: Option<String>,
}

/// Money in euro cents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cents(pub u64);

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "€{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

/// 10 euros plus 4 cents per marble, to the nearest 5 cents.
pub fn compute_payment(marbles: u64) -> Cents {
    let raw = 1000 + 4 * marbles;
    Cents((raw + 2) / 5 * 5)
}

/// One experimental trial in the export table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportRow {
    pub participant: String,
    pub group: Group,
    pub game: GameId,
    pub round: usize,
    pub first_choice: Option<String>,
    pub second_choice: Option<String>,
    pub t_start_ms: Option<u64>,
    pub t_first_ms: Option<u64>,
    pub t_second_ms: Option<u64>,
    pub question_answer: Option<String>,
    pub t_question_ms: Option<u64>,
    pub marbles_won: u32,
}

impl Session {
    pub fn export_rows(&self) -> Vec<ExportRow> {
        self.state
            .records
            .iter()
            .filter_map(|r| {
                let TrialKind::Experimental { game, round } = r.kind else {
                    return None;
                };
                Some(ExportRow {
                    participant: self.config.participant.clone(),
                    group: self.config.group,
                    game,
                    round,
                    first_choice: r.first_choice.clone(),
                    second_choice: r.second_choice.clone(),
                    t_start_ms: r.t_start_ms,
                    t_first_ms: r.t_first_ms,
                    t_second_ms: r.t_second_ms,
                    question_answer: r.question_answer.as_ref().map(|a| a.to_string()),
                    t_question_ms: r.t_question_ms,
                    marbles_won: r.marbles_won,
                })
            })
            .collect()
    }

    /// Experimental trials finished so far, as CSV with [`CSV_HEADER`].
    pub fn export_records(&self) -> String {
        write_csv(&self.export_rows())
    }

    pub fn export_metadata(&self) -> String {
        #[derive(Serialize)]
        struct Meta<'a> {
            participant: &'a str,
            group: Group,
            #[serde(flatten)]
            info: &'a super::ParticipantInfo,
            marbles: u64,
            payment_cents: u64,
        }
        serde_json::to_string_pretty(&Meta {
            participant: &self.config.participant,
            group: self.config.group,
            info: &self.config.info,
            marbles: self.experimental_marbles(),
            payment_cents: self.payment().0,
        })
        .expect("metadata serializes")
    }
}

pub fn write_csv(rows: &[ExportRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
    format!("{CSV_HEADER}\n{body}")
}

/// Parses an export table, rejecting any header other than [`CSV_HEADER`].
pub fn parse_export(text: &str) -> Result<Vec<ExportRow>, SessionError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| SessionError::Replay(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(SessionError::Replay(format!("unexpected header `{header}`")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| SessionError::Replay(e.to_string())))
        .collect()
}
