//! The six experimental games and the practice games, compiled in from
//! `games/`.
//!
//! Leaf payoffs of the experimental games are a reconstruction that agrees
//! with every payoff stated in prose about them. The practice games are
//! generated placeholders of increasing size (one to four decision nodes)
//! and carry no canonical payoffs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{load_game, GameTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameId {
    #[serde(rename = "game1")]
    Game1,
    #[serde(rename = "game2")]
    Game2,
    #[serde(rename = "game3")]
    Game3,
    #[serde(rename = "game4")]
    Game4,
    #[serde(rename = "game1prime")]
    Game1Prime,
    #[serde(rename = "game3prime")]
    Game3Prime,
}

impl GameId {
    /// Default within-round order.
    pub const ALL: [GameId; 6] = [
        GameId::Game1,
        GameId::Game2,
        GameId::Game3,
        GameId::Game4,
        GameId::Game1Prime,
        GameId::Game3Prime,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GameId::Game1 => "game1",
            GameId::Game2 => "game2",
            GameId::Game3 => "game3",
            GameId::Game4 => "game4",
            GameId::Game1Prime => "game1prime",
            GameId::Game3Prime => "game3prime",
        }
    }

    /// Human-facing name, e.g. `Game 1′`.
    pub fn title(self) -> &'static str {
        match self {
            GameId::Game1 => "Game 1",
            GameId::Game2 => "Game 2",
            GameId::Game3 => "Game 3",
            GameId::Game4 => "Game 4",
            GameId::Game1Prime => "Game 1′",
            GameId::Game3Prime => "Game 3′",
        }
    }

    fn source(self) -> &'static str {
        match self {
            GameId::Game1 => include_str!("../../games/game1.json"),
            GameId::Game2 => include_str!("../../games/game2.json"),
            GameId::Game3 => include_str!("../../games/game3.json"),
            GameId::Game4 => include_str!("../../games/game4.json"),
            GameId::Game1Prime => include_str!("../../games/game1prime.json"),
            GameId::Game3Prime => include_str!("../../games/game3prime.json"),
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['′', '\''], "prime");
        let norm = norm.trim_end_matches(".json");
        GameId::ALL
            .into_iter()
            .find(|g| g.as_str() == norm)
            .ok_or_else(|| format!("unknown game `{s}`"))
    }
}

pub fn game(id: GameId) -> GameTree {
    load_game(id.source()).expect("shipped game files are valid")
}

pub fn experimental_games() -> Vec<(GameId, GameTree)> {
    GameId::ALL.into_iter().map(|id| (id, game(id))).collect()
}

const PRACTICE: [&str; 14] = [
    include_str!("../../games/practice/practice01.json"),
    include_str!("../../games/practice/practice02.json"),
    include_str!("../../games/practice/practice03.json"),
    include_str!("../../games/practice/practice04.json"),
    include_str!("../../games/practice/practice05.json"),
    include_str!("../../games/practice/practice06.json"),
    include_str!("../../games/practice/practice07.json"),
    include_str!("../../games/practice/practice08.json"),
    include_str!("../../games/practice/practice09.json"),
    include_str!("../../games/practice/practice10.json"),
    include_str!("../../games/practice/practice11.json"),
    include_str!("../../games/practice/practice12.json"),
    include_str!("../../games/practice/practice13.json"),
    include_str!("../../games/practice/practice14.json"),
];

/// Practice games sorted by difficulty (number of decision nodes).
pub fn practice_games() -> Vec<GameTree> {
    PRACTICE
        .iter()
        .map(|s| load_game(s).expect("shipped practice files are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player;

    #[test]
    fn main_games_have_two_nodes_per_player() {
        for id in [GameId::Game1, GameId::Game2, GameId::Game3, GameId::Game4] {
            let g = game(id);
            assert_eq!(g.player_nodes(Player::C).len(), 2);
            assert_eq!(g.player_nodes(Player::P).len(), 2);
            assert_eq!(g.leaves().count(), 5);
            assert_eq!(g.node(g.root()).owner(), Some(Player::C));
            assert!(g.alternates());
        }
    }

    #[test]
    fn truncated_games_start_with_participant() {
        for id in [GameId::Game1Prime, GameId::Game3Prime] {
            let g = game(id);
            assert_eq!(g.node(g.root()).owner(), Some(Player::P));
            assert_eq!(g.player_nodes(Player::C).len(), 1);
            assert_eq!(g.leaves().count(), 4);
            assert!(g.alternates());
        }
    }

    #[test]
    fn practice_levels_increase() {
        let sizes: Vec<usize> = practice_games()
            .iter()
            .map(|g| g.decision_nodes().count())
            .collect();
        assert_eq!(sizes.len(), 14);
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!((sizes[0], sizes[13]), (1, 4));
    }

    #[test]
    fn ids_parse() {
        assert_eq!("game1′".parse::<GameId>(), Ok(GameId::Game1Prime));
        assert_eq!("game3prime.json".parse::<GameId>(), Ok(GameId::Game3Prime));
        assert!("game5".parse::<GameId>().is_err());
    }

    #[test]
    fn round_trip_preserves_tree() {
        for (_, g) in experimental_games() {
            let again = load_game(&g.to_json()).unwrap();
            assert_eq!(again, g);
        }
    }
}
