//! Browser bindings: solve a game, best-respond to a belief, and check the
//! BI/EFR relations on a random game. Each export is a thin wrapper over a
//! plain function returning JSON, so the logic is testable off the browser.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use efrlab_core::game::shipped::{game, GameId};
use efrlab_core::game::{enumerate_strategies, load_game, GameTree, Player, StrategyPlan};
use efrlab_core::opponent::best_response_plan;
use efrlab_core::solver::{check_report, random_game, render_table, solve, Conjecture, RandomGameConfig, Q};

fn parse_game(input: &str) -> Result<(String, GameTree), String> {
    let t = input.trim();
    if t.starts_with('{') {
        let g = load_game(t).map_err(|e| e.to_string())?;
        return Ok((g.name().to_string(), g));
    }
    let id: GameId = t.parse()?;
    Ok((id.title().to_string(), game(id)))
}

#[derive(Serialize)]
struct Solved {
    table: String,
    summary: efrlab_core::solver::SolveSummary,
}

/// Table and full summary for a shipped game name or game JSON.
pub fn solve_json(input: &str) -> Result<String, String> {
    let (title, g) = parse_game(input)?;
    let r = solve(&g);
    let out = Solved {
        table: render_table(&[(title, &g, &r)]),
        summary: r.summary(&g),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Reply {
    /// Participant plans with positive weight.
    belief: Vec<(String, f64)>,
    plan: String,
    /// Expected computer payoff of each root move under the belief, when
    /// the computer moves first.
    root_values: Vec<(String, f64)>,
}

/// Computer best reply when the participant takes the second action at its
/// `k`-th node with probability `percent[k] / 100`, independently.
pub fn best_reply_json(input: &str, percent: &[u32]) -> Result<String, String> {
    let (_, g) = parse_game(input)?;
    let p_nodes = g.player_nodes(Player::P);
    if percent.len() != p_nodes.len() {
        return Err(format!(
            "need one slider per participant node ({}), got {}",
            p_nodes.len(),
            percent.len()
        ));
    }
    if let Some(p) = percent.iter().find(|&&p| p > 100) {
        return Err(format!("{p}% is not a probability"));
    }
    let den = BigInt::from(100u32).pow(p_nodes.len() as u32);
    let mut support: Vec<(StrategyPlan, Q)> = Vec::new();
    for plan in enumerate_strategies(&g, Player::P) {
        let mut num = BigInt::from(1u32);
        for (k, &n) in p_nodes.iter().enumerate() {
            let second = plan.action_at(&g, n) == Some(1);
            let pct = if second { percent[k] } else { 100 - percent[k] };
            num *= pct;
        }
        if num > BigInt::from(0u32) {
            support.push((plan, Q::new(num, den.clone())));
        }
    }
    let conj = Conjecture::new(support).map_err(|e| e.to_string())?;
    let plan = best_response_plan(&g, &conj);
    let to_f = |q: &Q| q.to_f64().unwrap_or(f64::NAN);
    let root = g.root();
    let root_values = if g.node(root).owner() == Some(Player::C) {
        (0..g.node(root).actions().len())
            .map(|a| {
                let child = g.child(root, a);
                let v = match g.node(child).payoff() {
                    Some(p) => p.computer as f64,
                    None => {
                        let mut choices = plan.choices().to_vec();
                        choices[g.slot(root).expect("decision node")] = a;
                        let alt = StrategyPlan::new(&g, Player::C, choices).map_err(|e| e.to_string())?;
                        to_f(&conj.expected_payoff(&g, root, &alt))
                    }
                };
                Ok((g.label(root, a).to_string(), v))
            })
            .collect::<Result<_, String>>()?
    } else {
        Vec::new()
    };
    let out = Reply {
        belief: conj
            .support()
            .iter()
            .map(|(p, w)| (p.notation(&g), to_f(w)))
            .collect(),
        plan: plan.notation(&g),
        root_values,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RandomCheck {
    seed: u64,
    game: serde_json::Value,
    table: String,
    ties: bool,
    bi_outcomes: Vec<[u32; 2]>,
    efr_outcomes: Vec<[u32; 2]>,
    holds: bool,
}

/// Draws a random game and checks that its EFR outcomes sit inside its BI
/// outcomes (and coincide without relevant ties).
pub fn random_check_json(seed: u64, depth: usize, allow_ties: bool) -> Result<String, String> {
    if !(1..=6).contains(&depth) {
        return Err("depth must be between 1 and 6".into());
    }
    let cfg = RandomGameConfig {
        depth,
        forbid_relevant_ties: !allow_ties,
        payoff_max: if allow_ties { 3 } else { 9 },
        ..Default::default()
    };
    let g = random_game(seed, &cfg).map_err(|e| e.to_string())?;
    let r = solve(&g);
    let t = check_report(&g, &r);
    let out = RandomCheck {
        seed,
        game: serde_json::from_str(&g.to_json()).map_err(|e| e.to_string())?,
        table: render_table(&[(format!("seed {seed}"), &g, &r)]),
        ties: t.ties,
        bi_outcomes: r.bi.outcomes.iter().map(|o| o.payoff).collect(),
        efr_outcomes: r.efr.outcomes.iter().map(|o| o.payoff).collect(),
        holds: t.holds(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve_game(input: &str) -> Result<String, JsValue> {
    solve_json(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn best_reply(input: &str, percent: &[u32]) -> Result<String, JsValue> {
    best_reply_json(input, percent).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn random_check(seed: u32, depth: u32, allow_ties: bool) -> Result<String, JsValue> {
    random_check_json(seed as u64, depth as usize, allow_ties).map_err(|e| JsValue::from_str(&e))
}
