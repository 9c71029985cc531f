use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::AnalysisError;
use crate::game::shipped::GameId;
use crate::session::{ExportRow, Group};

/// First-node choices of one participant in one game, by round. `None`
/// marks a round where the node was not reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceGrid {
    pub participant: String,
    pub group: Group,
    pub game: GameId,
    pub slots: Vec<Option<String>>,
}

impl ChoiceGrid {
    pub fn reached(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn count(&self, label: &str) -> usize {
        self.slots.iter().flatten().filter(|s| *s == label).count()
    }
}

/// One grid per participant and game, participants in order of first
/// appearance, games in [`GameId::ALL`] order.
pub fn choice_grids(rows: &[ExportRow]) -> Result<Vec<ChoiceGrid>, AnalysisError> {
    let rounds = rows.iter().map(|r| r.round).max().unwrap_or(0);
    let mut order: Vec<(String, Group)> = Vec::new();
    let mut cells: BTreeMap<(String, GameId), Vec<Option<String>>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in rows {
        if r.round == 0 {
            return Err(AnalysisError::Schema(format!("{}: round numbers start at 1", r.participant)));
        }
        if !seen.insert((r.participant.clone(), r.game, r.round)) {
            return Err(AnalysisError::Schema(format!(
                "{}: {} round {} appears twice",
                r.participant, r.game, r.round
            )));
        }
        match order.iter().find(|(p, _)| *p == r.participant) {
            Some((_, g)) if *g != r.group => {
                return Err(AnalysisError::Schema(format!("{}: listed in both groups", r.participant)));
            }
            Some(_) => {}
            None => order.push((r.participant.clone(), r.group)),
        }
        cells
            .entry((r.participant.clone(), r.game))
            .or_insert_with(|| vec![None; rounds])[r.round - 1] = r.first_choice.clone();
    }
    let games: BTreeSet<GameId> = rows.iter().map(|r| r.game).collect();
    let mut out = Vec::new();
    for (p, group) in order {
        for &game in GameId::ALL.iter().filter(|g| games.contains(g)) {
            out.push(ChoiceGrid {
                slots: cells.remove(&(p.clone(), game)).unwrap_or_else(|| vec![None; rounds]),
                participant: p.clone(),
                group,
                game,
            });
        }
    }
    Ok(out)
}

pub fn grids_to_csv(grids: &[ChoiceGrid]) -> String {
    let rounds = grids.iter().map(|g| g.slots.len()).max().unwrap_or(0);
    let mut s = String::from("participant,group,game");
    for r in 1..=rounds {
        write!(s, ",r{r}").unwrap();
    }
    s.push('\n');
    for g in grids {
        write!(s, "{},{},{}", g.participant, g.group, g.game).unwrap();
        for slot in &g.slots {
            write!(s, ",{}", slot.as_deref().unwrap_or("")).unwrap();
        }
        s.push('\n');
    }
    s
}

const CELL: usize = 14;
const LABEL_W: usize = 60;
const HEADER_H: usize = 20;

/// One panel per game: a row per participant, dark grey for `c`, light grey
/// for `d`, white where the node was not reached.
pub fn grids_to_svg(grids: &[ChoiceGrid]) -> String {
    let rounds = grids.iter().map(|g| g.slots.len()).max().unwrap_or(0);
    let games: Vec<GameId> = GameId::ALL
        .into_iter()
        .filter(|id| grids.iter().any(|g| g.game == *id))
        .collect();
    let people = grids
        .iter()
        .filter(|g| Some(g.game) == games.first().copied())
        .count();
    let panel_w = LABEL_W + rounds * CELL + CELL;
    let width = panel_w * games.len().max(1);
    let height = HEADER_H + people * CELL + CELL;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    );
    for (gi, id) in games.iter().enumerate() {
        let x0 = gi * panel_w;
        writeln!(s, "<text x=\"{}\" y=\"14\">{}</text>", x0 + LABEL_W, id.title()).unwrap();
        for (row, g) in grids.iter().filter(|g| g.game == *id).enumerate() {
            let y = HEADER_H + row * CELL;
            writeln!(s, "<text x=\"{}\" y=\"{}\">{}</text>", x0 + 4, y + CELL - 3, g.participant).unwrap();
            for (k, slot) in g.slots.iter().enumerate() {
                let fill = match slot.as_deref() {
                    Some("c") => "#555555",
                    Some(_) => "#cccccc",
                    None => "#ffffff",
                };
                writeln!(
                    s,
                    "<rect x=\"{}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#999999\"/>",
                    x0 + LABEL_W + k * CELL
                )
                .unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: &str, game: GameId, round: usize, first: Option<&str>) -> ExportRow {
        ExportRow {
            participant: p.into(),
            group: Group::A,
            game,
            round,
            first_choice: first.map(String::from),
            second_choice: None,
            t_start_ms: Some(1),
            t_first_ms: None,
            t_second_ms: None,
            question_answer: None,
            t_question_ms: None,
            marbles_won: 0,
        }
    }

    #[test]
    fn all_d_gives_eight_d_slots() {
        let rows: Vec<_> = (1..=8).map(|r| row("A1", GameId::Game1, r, Some("d"))).collect();
        let g = choice_grids(&rows).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].slots, vec![Some("d".to_string()); 8]);
        assert_eq!(g[0].count("d"), 8);
    }

    #[test]
    fn computer_exit_leaves_a_blank() {
        let mut rows: Vec<_> = (1..=8).map(|r| row("A1", GameId::Game3, r, Some("c"))).collect();
        rows[2].first_choice = None;
        let g = choice_grids(&rows).unwrap();
        assert_eq!(g[0].slots[2], None);
        assert_eq!(g[0].reached(), 7);
        let csv = grids_to_csv(&g);
        assert_eq!(csv.lines().nth(1).unwrap(), "A1,A,game3,c,c,,c,c,c,c,c");
        let svg = grids_to_svg(&g);
        assert_eq!(svg.matches("#555555").count(), 7);
        assert_eq!(svg.matches("#ffffff").count(), 1);
    }

    #[test]
    fn schema_problems_are_reported() {
        let rows = vec![row("A1", GameId::Game1, 1, None), row("A1", GameId::Game1, 1, None)];
        assert!(matches!(choice_grids(&rows), Err(AnalysisError::Schema(_))));
        assert!(choice_grids(&[row("A1", GameId::Game1, 0, None)]).is_err());
        assert!(choice_grids(&[]).unwrap().is_empty());
    }
}
