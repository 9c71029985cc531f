use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::agent::{Agent, AgentSpec};
use super::AnalysisError;
use crate::game::Player;
use crate::opponent::OpponentConfig;
use crate::session::{Choice, ExportRow, Group, Phase, Session, SessionConfig, Step};

/// One synthetic participant's finished session.
#[derive(Clone, Debug, Serialize)]
pub struct ParticipantLog {
    pub participant: String,
    pub group: Group,
    pub agent: AgentSpec,
    pub rows: Vec<ExportRow>,
    /// The session's event log as JSON lines.
    #[serde(skip)]
    pub events: String,
}

/// Export rows of every participant, in participant order.
pub fn all_rows(logs: &[ParticipantLog]) -> Vec<ExportRow> {
    logs.iter().flat_map(|l| l.rows.iter().cloned()).collect()
}

/// Runs `count` participants of each agent type through a full session
/// against `opponent`. Participants alternate between groups A and B and are
/// named `A1`, `B1`, `A2`, ...; each gets its own seed drawn from `seed`.
pub fn simulate_population(
    specs: &[(AgentSpec, usize)],
    opponent: &OpponentConfig,
    practice_count: usize,
    seed: u64,
) -> Result<Vec<ParticipantLog>, AnalysisError> {
    opponent.validate()?;
    for (s, _) in specs {
        s.validate()?;
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    let (mut na, mut nb) = (0, 0);
    for &(spec, count) in specs {
        for _ in 0..count {
            let i = jobs.len();
            let group = if i % 2 == 0 { Group::A } else { Group::B };
            let name = match group {
                Group::A => {
                    na += 1;
                    format!("A{na}")
                }
                Group::B => {
                    nb += 1;
                    format!("B{nb}")
                }
            };
            let mut cfg = SessionConfig::new(name, group, master.gen());
            cfg.opponent = opponent.clone();
            cfg.rounds = opponent.rounds;
            cfg.game_order = opponent.games.clone();
            cfg.practice_count = practice_count;
            jobs.push((spec, cfg));
        }
    }
    if jobs.is_empty() {
        return Ok(Vec::new());
    }
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(jobs.len());
    let chunk = jobs.len().div_ceil(workers);
    let results: Vec<Result<ParticipantLog, AnalysisError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|(spec, cfg)| run_participant(*spec, cfg.clone()))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

/// Plays one whole session with synthetic response times.
pub fn run_participant(spec: AgentSpec, config: SessionConfig) -> Result<ParticipantLog, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.rotate_left(17) ^ 0xa9e7);
    let mut agent = Agent::new(spec);
    let mut s = Session::new(config, 0)?;
    let mut ts = 0u64;
    let mut tick = |rng: &mut ChaCha8Rng, lo: u64, hi: u64| {
        ts += rng.gen_range(lo..hi);
        ts
    };
    while s.state.phase != Phase::Finished {
        match s.state.step {
            Step::Ready { .. } => s.start_trial(tick(&mut rng, 400, 2500))?,
            Step::Idle => s.resume(tick(&mut rng, 60_000, 300_000))?,
            Step::Over => s.next_trial(tick(&mut rng, 300, 1500))?,
            Step::Question { .. } => {
                let t = &s.trials[s.state.trial];
                let node = s.state.position;
                let choice = match agent.expect_computer(&t.game, node) {
                    Some(a) => {
                        let order = t.variant.display_order(&t.game, node);
                        if order.first() == Some(&a) {
                            Choice::Left
                        } else {
                            Choice::Right
                        }
                    }
                    None => Choice::Undecided,
                };
                s.answer_question(choice, tick(&mut rng, 1500, 6000))?;
            }
            Step::Playing { .. } => {
                if s.state.turn == Some(Player::C) {
                    s.advance_computer(tick(&mut rng, 500, 900))?;
                } else {
                    let t = &s.trials[s.state.trial];
                    let node = s.state.position;
                    let a = agent.decide(&t.game, node, &mut rng);
                    let label = t.game.label(node, a).to_string();
                    s.apply_move(Player::P, &label, tick(&mut rng, 600, 4000))?;
                }
            }
        }
    }
    Ok(ParticipantLog {
        participant: s.config.participant.clone(),
        group: s.config.group,
        agent: spec,
        rows: s.export_rows(),
        events: s.to_jsonl(),
    })
}
