//! Finite two-player perfect-information game trees.
//!
//! Nodes are stored in pre-order from the root, so a [`NodeId`] is the
//! pre-order index of the node. Each player's decision nodes are likewise
//! listed in pre-order; a [`StrategyPlan`] stores one action index per entry
//! of that list.

mod file;
mod plan;
pub mod shipped;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use file::{load_game, GameFile, NodeSpec};
pub use plan::{
    enumerate_strategies, has_relevant_ties, play_from, play_profile, reaches, PathOutcome,
    StrategyPlan,
};

#[derive(Debug, Error)]
pub enum GameError {
    #[error("malformed game file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("no action `{label}` at node `{node}`")]
    UnknownAction { node: String, label: String },
    #[error("bad plan for {owner}: {reason}")]
    BadPlan { owner: Player, reason: String },
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;

/// The computer (`C`) or the participant (`P`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    C,
    P,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::C, Player::P];

    pub fn other(self) -> Player {
        match self {
            Player::C => Player::P,
            Player::P => Player::C,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::C => 0,
            Player::P => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::C => "C",
            Player::P => "P",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Marbles for the computer and the participant at a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payoff {
    pub computer: u32,
    pub participant: u32,
}

impl Payoff {
    pub fn new(computer: u32, participant: u32) -> Self {
        Payoff {
            computer,
            participant,
        }
    }

    pub fn of(&self, player: Player) -> u32 {
        match player {
            Player::C => self.computer,
            Player::P => self.participant,
        }
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.computer, self.participant)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub label: String,
    pub child: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Decision { owner: Player, actions: Vec<Action> },
    Leaf(Payoff),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    /// Parent node and the index of the action leading here.
    pub parent: Option<(NodeId, usize)>,
}

impl Node {
    pub fn owner(&self) -> Option<Player> {
        match &self.kind {
            NodeKind::Decision { owner, .. } => Some(*owner),
            NodeKind::Leaf(_) => None,
        }
    }

    pub fn actions(&self) -> &[Action] {
        match &self.kind {
            NodeKind::Decision { actions, .. } => actions,
            NodeKind::Leaf(_) => &[],
        }
    }

    pub fn payoff(&self) -> Option<Payoff> {
        match &self.kind {
            NodeKind::Leaf(p) => Some(*p),
            NodeKind::Decision { .. } => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }
}

/// A validated game tree. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    name: String,
    nodes: Vec<Node>,
    player_nodes: [Vec<NodeId>; 2],
    slots: Vec<Option<usize>>,
    subtree_end: Vec<usize>,
}

/// Raw node description used to assemble a tree before validation.
#[derive(Clone, Debug)]
pub enum RawNode {
    Decision {
        owner: Player,
        actions: Vec<(String, String)>,
    },
    Leaf(Payoff),
}

impl GameTree {
    /// Builds a tree from named nodes. Node order in `raw` is irrelevant; the
    /// result is renumbered in pre-order from `root`.
    pub fn from_named(
        name: impl Into<String>,
        raw: Vec<(String, RawNode)>,
        root: &str,
    ) -> Result<Self> {
        use std::collections::{HashMap, HashSet};

        let mut by_name: HashMap<&str, &RawNode> = HashMap::with_capacity(raw.len());
        for (n, node) in &raw {
            if by_name.insert(n.as_str(), node).is_some() {
                return Err(GameError::Invalid(format!("duplicate node id `{n}`")));
            }
        }
        if !by_name.contains_key(root) {
            return Err(GameError::Invalid(format!("root `{root}` is not a declared node")));
        }

        let mut labels = HashSet::new();
        let mut seen = HashSet::new();
        let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
        // (name, parent) stack; children pushed in reverse to keep pre-order.
        let mut stack: Vec<(&str, Option<(NodeId, usize)>)> = vec![(root, None)];
        while let Some((n, parent)) = stack.pop() {
            if !seen.insert(n) {
                return Err(GameError::Invalid(format!(
                    "node `{n}` is reachable along more than one path"
                )));
            }
            let id = NodeId(nodes.len());
            if let Some((p, a)) = parent {
                if let NodeKind::Decision { actions, .. } = &mut nodes[p.0].kind {
                    actions[a].child = id;
                }
            }
            let kind = match by_name[n] {
                RawNode::Leaf(p) => NodeKind::Leaf(*p),
                RawNode::Decision { owner, actions } => {
                    if actions.len() < 2 {
                        return Err(GameError::Invalid(format!(
                            "decision node `{n}` has {} action(s); at least 2 required",
                            actions.len()
                        )));
                    }
                    for (label, child) in actions.iter().rev() {
                        if !by_name.contains_key(child.as_str()) {
                            return Err(GameError::Invalid(format!(
                                "action `{label}` at `{n}` points to undeclared node `{child}`"
                            )));
                        }
                    }
                    let mut out = Vec::with_capacity(actions.len());
                    for (label, _) in actions {
                        validate_label(label)?;
                        if !labels.insert(label.clone()) {
                            return Err(GameError::Invalid(format!("duplicate action label `{label}`")));
                        }
                        out.push(Action {
                            label: label.clone(),
                            child: NodeId(usize::MAX),
                        });
                    }
                    for (i, (_, child)) in actions.iter().enumerate().rev() {
                        stack.push((child.as_str(), Some((id, i))));
                    }
                    NodeKind::Decision {
                        owner: *owner,
                        actions: out,
                    }
                }
            };
            nodes.push(Node {
                name: n.to_string(),
                kind,
                parent,
            });
        }
        if nodes.len() != raw.len() {
            let unreachable: Vec<&str> = raw
                .iter()
                .map(|(n, _)| n.as_str())
                .filter(|n| !seen.contains(n))
                .collect();
            return Err(GameError::Invalid(format!(
                "nodes not reachable from the root: {}",
                unreachable.join(", ")
            )));
        }
        Ok(Self::finish(name.into(), nodes))
    }

    fn finish(name: String, nodes: Vec<Node>) -> Self {
        let mut player_nodes = [Vec::new(), Vec::new()];
        let mut slots = vec![None; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            if let Some(owner) = node.owner() {
                slots[i] = Some(player_nodes[owner.index()].len());
                player_nodes[owner.index()].push(NodeId(i));
            }
        }
        // Pre-order numbering: a subtree occupies a contiguous id range.
        let mut subtree_end: Vec<usize> = (1..=nodes.len()).collect();
        for i in (0..nodes.len()).rev() {
            if let Some(last) = nodes[i].actions().last() {
                subtree_end[i] = subtree_end[last.child.0];
            }
        }
        GameTree {
            name,
            nodes,
            player_nodes,
            slots,
            subtree_end,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    /// Decision nodes of `player` in pre-order.
    pub fn player_nodes(&self, player: Player) -> &[NodeId] {
        &self.player_nodes[player.index()]
    }

    pub fn decision_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|(_, n)| !n.is_leaf()).map(|(id, _)| id)
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|(_, n)| n.is_leaf()).map(|(id, _)| id)
    }

    /// Position of a decision node within its owner's node list.
    pub fn slot(&self, node: NodeId) -> Option<usize> {
        self.slots[node.0]
    }

    /// All nodes in the subtree rooted at `node`, including `node`.
    pub fn subtree(&self, node: NodeId) -> impl Iterator<Item = NodeId> {
        (node.0..self.subtree_end[node.0]).map(NodeId)
    }

    pub fn is_ancestor_or_self(&self, ancestor: NodeId, node: NodeId) -> bool {
        ancestor.0 <= node.0 && node.0 < self.subtree_end[ancestor.0]
    }

    /// Edges from the root down to `node`, as (decision node, action index).
    pub fn path_to(&self, node: NodeId) -> Vec<(NodeId, usize)> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some((parent, a)) = self.nodes[cur.0].parent {
            path.push((parent, a));
            cur = parent;
        }
        path.reverse();
        path
    }

    pub fn action_index(&self, node: NodeId, label: &str) -> Result<usize> {
        self.node(node)
            .actions()
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| GameError::UnknownAction {
                node: self.node(node).name.clone(),
                label: label.to_string(),
            })
    }

    pub fn label(&self, node: NodeId, action: usize) -> &str {
        &self.node(node).actions()[action].label
    }

    pub fn child(&self, node: NodeId, action: usize) -> NodeId {
        self.node(node).actions()[action].child
    }

    /// Whether owners strictly alternate along every root-to-leaf path.
    pub fn alternates(&self) -> bool {
        self.decision_nodes().all(|id| {
            let owner = self.node(id).owner();
            self.node(id)
                .actions()
                .iter()
                .all(|a| match self.node(a.child).owner() {
                    Some(o) => Some(o) != owner,
                    None => true,
                })
        })
    }

    /// Same tree with action lists permuted per node. Used for presentation
    /// variants; the permuted tree is re-validated and renumbered.
    pub fn with_action_order<F>(&self, mut reorder: F) -> GameTree
    where
        F: FnMut(NodeId, &mut Vec<(String, String)>),
    {
        let raw = self
            .nodes()
            .map(|(id, n)| {
                let rn = match &n.kind {
                    NodeKind::Leaf(p) => RawNode::Leaf(*p),
                    NodeKind::Decision { owner, actions } => {
                        let mut acts: Vec<(String, String)> = actions
                            .iter()
                            .map(|a| (a.label.clone(), self.node(a.child).name.clone()))
                            .collect();
                        reorder(id, &mut acts);
                        RawNode::Decision {
                            owner: *owner,
                            actions: acts,
                        }
                    }
                };
                (n.name.clone(), rn)
            })
            .collect();
        GameTree::from_named(self.name.clone(), raw, &self.node(self.root()).name)
            .expect("permuting actions keeps the tree valid")
    }
}

fn validate_label(label: &str) -> Result<()> {
    let ok = !label.is_empty()
        && label.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && label.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(GameError::Invalid(format!(
            "action label `{label}` must be lowercase ascii (letters then digits)"
        )))
    }
}

/// Incremental construction of trees in code (generators, tests).
#[derive(Default)]
pub struct GameBuilder {
    raw: Vec<(String, RawNode)>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, name: impl Into<String>, payoff: Payoff) -> String {
        let name = name.into();
        self.raw.push((name.clone(), RawNode::Leaf(payoff)));
        name
    }

    pub fn decision(
        &mut self,
        name: impl Into<String>,
        owner: Player,
        actions: Vec<(String, String)>,
    ) -> String {
        let name = name.into();
        self.raw
            .push((name.clone(), RawNode::Decision { owner, actions }));
        name
    }

    pub fn build(self, game_name: impl Into<String>, root: &str) -> Result<GameTree> {
        GameTree::from_named(game_name, self.raw, root)
    }
}
