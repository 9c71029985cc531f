use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::{choice_grids, ChoiceGrid};
use super::AnalysisError;
use crate::game::shipped::GameId;
use crate::session::ExportRow;

/// The participant's continuing move at the first node.
pub const FOCUS_MOVE: &str = "d";

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceClass {
    MuchMore,
    SlightlyMore,
    Equal,
    SlightlyLess,
    MuchLess,
}

impl DifferenceClass {
    pub const ALL: [DifferenceClass; 5] = [
        DifferenceClass::MuchMore,
        DifferenceClass::SlightlyMore,
        DifferenceClass::Equal,
        DifferenceClass::SlightlyLess,
        DifferenceClass::MuchLess,
    ];
}

impl fmt::Display for DifferenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DifferenceClass::MuchMore => "much_more",
            DifferenceClass::SlightlyMore => "slightly_more",
            DifferenceClass::Equal => "equal",
            DifferenceClass::SlightlyLess => "slightly_less",
            DifferenceClass::MuchLess => "much_less",
        })
    }
}

/// Cut points on the difference of d-frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Smallest difference counted as "much".
    pub much: f64,
    /// Smallest difference counted as a difference at all.
    pub slight: f64,
}

impl Default for Thresholds {
    /// Three rounds out of eight for "much", one for "slight".
    fn default() -> Self {
        Thresholds {
            much: 3.0 / 8.0,
            slight: 1.0 / 8.0,
        }
    }
}

impl Thresholds {
    pub fn classify(&self, diff: f64) -> DifferenceClass {
        let sign = diff >= 0.0;
        let m = diff.abs();
        match (m + EPS >= self.much, m + EPS >= self.slight, sign) {
            (true, _, true) => DifferenceClass::MuchMore,
            (true, _, false) => DifferenceClass::MuchLess,
            (false, true, true) => DifferenceClass::SlightlyMore,
            (false, true, false) => DifferenceClass::SlightlyLess,
            _ => DifferenceClass::Equal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairComparison {
    pub participant: String,
    pub freq_x: f64,
    pub freq_y: f64,
    pub reached_x: usize,
    pub reached_y: usize,
    pub class: DifferenceClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub game_x: GameId,
    pub game_y: GameId,
    pub thresholds: Thresholds,
    pub comparisons: Vec<PairComparison>,
    pub counts: BTreeMap<DifferenceClass, usize>,
    /// Participants in the logs, compared or not.
    pub participants: usize,
}

impl PairReport {
    /// Participants whose first node was reached in both games.
    pub fn compared(&self) -> usize {
        self.comparisons.len()
    }

    pub fn count(&self, class: DifferenceClass) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    /// Participants playing d at least as often in X as in Y.
    pub fn at_least_as_often(&self) -> usize {
        self.comparisons
            .iter()
            .filter(|c| c.freq_x + EPS >= c.freq_y)
            .count()
    }

    /// Summary sentences, one per non-empty class plus the
    /// at-least-as-often total.
    pub fn sentences(&self) -> Vec<String> {
        let n = self.compared();
        let (x, y) = (self.game_x.title(), self.game_y.title());
        let head = |k: usize| format!("{k} participants out of {n} ({}%)", percent(k, n));
        let mut out = Vec::new();
        for class in DifferenceClass::ALL {
            let k = self.count(class);
            if k == 0 {
                continue;
            }
            let tail = match class {
                DifferenceClass::MuchMore => format!("much more often in {x} than in {y}"),
                DifferenceClass::SlightlyMore => format!("only slightly more often in {x} than in {y}"),
                DifferenceClass::Equal => format!("equally often in {x} and in {y}"),
                DifferenceClass::SlightlyLess => format!("only slightly less often in {x} than in {y}"),
                DifferenceClass::MuchLess => format!("much less often in {x} than in {y}"),
            };
            out.push(format!("{} played {FOCUS_MOVE} {tail}", head(k)));
        }
        out.push(format!(
            "{} played {FOCUS_MOVE} at least as often in {x} as in {y}",
            head(self.at_least_as_often())
        ));
        out
    }
}

/// `100 k / n` rounded to the nearest integer, halves up.
pub fn percent(k: usize, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (200 * k + n) / (2 * n)
    }
}

/// Classifies every participant by how much more often they played d in
/// `game_x` than in `game_y`, over rounds where the node was reached.
pub fn compare_pair(
    rows: &[ExportRow],
    game_x: GameId,
    game_y: GameId,
    thresholds: Thresholds,
) -> Result<PairReport, AnalysisError> {
    let grids = choice_grids(rows)?;
    compare_grids(&grids, game_x, game_y, thresholds)
}

pub fn compare_grids(
    grids: &[ChoiceGrid],
    game_x: GameId,
    game_y: GameId,
    thresholds: Thresholds,
) -> Result<PairReport, AnalysisError> {
    if !(thresholds.slight > 0.0 && thresholds.slight <= thresholds.much) {
        return Err(AnalysisError::Thresholds(format!(
            "need 0 < slight <= much, got {} and {}",
            thresholds.slight, thresholds.much
        )));
    }
    let mut by_person: BTreeMap<&str, [Option<&ChoiceGrid>; 2]> = BTreeMap::new();
    let mut order = Vec::new();
    for g in grids {
        if !by_person.contains_key(g.participant.as_str()) {
            order.push(g.participant.as_str());
        }
        let e = by_person.entry(&g.participant).or_default();
        if g.game == game_x {
            e[0] = Some(g);
        }
        if g.game == game_y {
            e[1] = Some(g);
        }
    }
    let mut comparisons = Vec::new();
    for p in &order {
        let [Some(gx), Some(gy)] = by_person[p] else {
            continue;
        };
        let (rx, ry) = (gx.reached(), gy.reached());
        if rx == 0 || ry == 0 {
            continue;
        }
        let fx = gx.count(FOCUS_MOVE) as f64 / rx as f64;
        let fy = gy.count(FOCUS_MOVE) as f64 / ry as f64;
        comparisons.push(PairComparison {
            participant: p.to_string(),
            freq_x: fx,
            freq_y: fy,
            reached_x: rx,
            reached_y: ry,
            class: thresholds.classify(fx - fy),
        });
    }
    let mut counts = BTreeMap::new();
    for c in &comparisons {
        *counts.entry(c.class).or_insert(0) += 1;
    }
    Ok(PairReport {
        game_x,
        game_y,
        thresholds,
        comparisons,
        counts,
        participants: order.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::Group;

    fn grid(p: &str, game: GameId, moves: &str) -> ChoiceGrid {
        ChoiceGrid {
            participant: p.into(),
            group: Group::A,
            game,
            slots: moves
                .chars()
                .map(|c| (c != '.').then(|| c.to_string()))
                .collect(),
        }
    }

    #[test]
    fn classes_by_eighths() {
        let t = Thresholds::default();
        assert_eq!(t.classify(3.0 / 8.0), DifferenceClass::MuchMore);
        assert_eq!(t.classify(2.0 / 8.0), DifferenceClass::SlightlyMore);
        assert_eq!(t.classify(1.0 / 8.0), DifferenceClass::SlightlyMore);
        assert_eq!(t.classify(0.0), DifferenceClass::Equal);
        assert_eq!(t.classify(-1.0 / 8.0), DifferenceClass::SlightlyLess);
        assert_eq!(t.classify(-1.0), DifferenceClass::MuchLess);
    }

    #[test]
    fn identical_frequencies_are_equal() {
        let grids = vec![
            grid("A1", GameId::Game1, "dddd.ccc"),
            grid("A1", GameId::Game2, "ddddccc."),
            grid("B1", GameId::Game1, "cccccccc"),
            grid("B1", GameId::Game2, "cccccccc"),
        ];
        let r = compare_grids(&grids, GameId::Game1, GameId::Game2, Thresholds::default()).unwrap();
        assert!(r.comparisons.iter().all(|c| c.class == DifferenceClass::Equal), "{r:?}");
        assert_eq!(r.at_least_as_often(), 2);
    }

    #[test]
    fn unreached_participants_are_left_out() {
        let grids = vec![
            grid("A1", GameId::Game1, "........"),
            grid("A1", GameId::Game2, "dddddddd"),
            grid("B1", GameId::Game1, "dddddddd"),
            grid("B1", GameId::Game2, "ddcccccc"),
        ];
        let r = compare_grids(&grids, GameId::Game1, GameId::Game2, Thresholds::default()).unwrap();
        assert_eq!(r.participants, 2);
        assert_eq!(r.compared(), 1);
        assert_eq!(r.count(DifferenceClass::MuchMore), 1);
        assert_eq!(r.counts.values().sum::<usize>(), r.compared());
    }

    #[test]
    fn sentence_format() {
        let mut grids = Vec::new();
        for i in 0..50 {
            let name = format!("P{i}");
            grids.push(grid(&name, GameId::Game3, "dddddddd"));
            let y = if i < 3 { "cddddddd" } else { "dddddddd" };
            grids.push(grid(&name, GameId::Game4, y));
        }
        let r = compare_grids(&grids, GameId::Game3, GameId::Game4, Thresholds::default()).unwrap();
        let s = r.sentences();
        assert_eq!(
            s,
            vec![
                "3 participants out of 50 (6%) played d only slightly more often in Game 3 than in Game 4",
                "47 participants out of 50 (94%) played d equally often in Game 3 and in Game 4",
                "50 participants out of 50 (100%) played d at least as often in Game 3 as in Game 4",
            ]
        );
    }

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(percent(47, 50), 94);
        assert_eq!(percent(1, 8), 13);
        assert_eq!(percent(1, 3), 33);
        assert_eq!(percent(2, 3), 67);
        assert_eq!(percent(0, 0), 0);
    }

    #[test]
    fn bad_thresholds() {
        let t = Thresholds { much: 0.1, slight: 0.2 };
        assert!(compare_grids(&[], GameId::Game1, GameId::Game2, t).is_err());
    }
}
