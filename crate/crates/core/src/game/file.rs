use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GameError, GameTree, NodeKind, Payoff, Player, RawNode, Result};

/// On-disk game description.
///
/// ```json
/// {"name": "game1", "players": ["C", "P"], "root": "n1",
///  "nodes": {"n1": {"owner": "C", "actions": [{"label": "a", "child": "la"}, ...]},
///            "la": {"payoff": [3, 0]}, ...}}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub name: String,
    pub players: Vec<Player>,
    pub nodes: BTreeMap<String, NodeSpec>,
    pub root: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged, deny_unknown_fields)]
pub enum NodeSpec {
    Decision {
        owner: Player,
        actions: Vec<ActionSpec>,
    },
    Leaf {
        payoff: [u32; 2],
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub label: String,
    pub child: String,
}

/// Parses and validates a game file.
pub fn load_game(text: &str) -> Result<GameTree> {
    let file: GameFile = serde_json::from_str(text)?;
    file.into_tree()
}

impl GameFile {
    pub fn into_tree(self) -> Result<GameTree> {
        if self.players != [Player::C, Player::P] {
            return Err(GameError::Invalid(
                "players must be exactly [\"C\", \"P\"]".to_string(),
            ));
        }
        let raw = self
            .nodes
            .into_iter()
            .map(|(name, spec)| {
                let node = match spec {
                    NodeSpec::Leaf { payoff } => RawNode::Leaf(Payoff::new(payoff[0], payoff[1])),
                    NodeSpec::Decision { owner, actions } => RawNode::Decision {
                        owner,
                        actions: actions.into_iter().map(|a| (a.label, a.child)).collect(),
                    },
                };
                (name, node)
            })
            .collect();
        GameTree::from_named(self.name, raw, &self.root)
    }
}

impl From<&GameTree> for GameFile {
    fn from(game: &GameTree) -> Self {
        let nodes = game
            .nodes()
            .map(|(_, n)| {
                let spec = match &n.kind {
                    NodeKind::Leaf(p) => NodeSpec::Leaf {
                        payoff: [p.computer, p.participant],
                    },
                    NodeKind::Decision { owner, actions } => NodeSpec::Decision {
                        owner: *owner,
                        actions: actions
                            .iter()
                            .map(|a| ActionSpec {
                                label: a.label.clone(),
                                child: game.node(a.child).name.clone(),
                            })
                            .collect(),
                    },
                };
                (n.name.clone(), spec)
            })
            .collect();
        GameFile {
            name: game.name().to_string(),
            players: vec![Player::C, Player::P],
            nodes,
            root: game.node(game.root()).name.clone(),
        }
    }
}

impl GameTree {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GameFile::from(self)).expect("game files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_game() {
        let g = load_game(r#"{"name":"t","players":["C","P"],"nodes":{"z":{"payoff":[0,0]}},"root":"z"}"#)
            .unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.decision_nodes().count(), 0);
        assert_eq!(g.node(g.root()).payoff(), Some(Payoff::new(0, 0)));
    }

    #[test]
    fn dangling_child_is_rejected() {
        let text = r#"{"name":"t","players":["C","P"],"root":"r","nodes":{
            "r":{"owner":"C","actions":[{"label":"a","child":"x"},{"label":"b","child":"y"}]},
            "x":{"payoff":[1,1]}}}"#;
        let err = load_game(text).unwrap_err();
        assert!(matches!(err, GameError::Invalid(_)), "{err}");
        assert!(err.to_string().contains("undeclared"));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let text = r#"{"name":"t","players":["C","P"],"root":"r","nodes":{
            "r":{"owner":"C","actions":[{"label":"a","child":"x"},{"label":"a","child":"y"}]},
            "x":{"payoff":[1,1]},"y":{"payoff":[0,0]}}}"#;
        assert!(load_game(text).unwrap_err().to_string().contains("duplicate action"));
    }

    #[test]
    fn single_action_is_rejected() {
        let text = r#"{"name":"t","players":["C","P"],"root":"r","nodes":{
            "r":{"owner":"C","actions":[{"label":"a","child":"x"}]},
            "x":{"payoff":[1,1]}}}"#;
        assert!(load_game(text).unwrap_err().to_string().contains("at least 2"));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(load_game("{\"name\":"), Err(GameError::Parse(_))));
        assert!(matches!(
            load_game(r#"{"name":"t","players":["C","P"],"nodes":{"z":{"payoff":[-1,0]}},"root":"z"}"#),
            Err(GameError::Parse(_))
        ));
    }
}
