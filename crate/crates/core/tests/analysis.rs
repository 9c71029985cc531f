mod common;

use efrlab_core::analysis::{
    all_rows, choice_grids, compare_pair, grids_to_csv, simulate_population, two_proportion_test, AgentKind,
    AgentSpec, DifferenceClass, Thresholds,
};
use efrlab_core::game::shipped::GameId;
use efrlab_core::opponent::OpponentConfig;
use efrlab_core::session::{parse_export, write_csv, ExportRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opponent(rate: f64) -> OpponentConfig {
    OpponentConfig {
        deviation_rate: rate,
        ..OpponentConfig::default()
    }
}

fn first_moves(rows: &[ExportRow], game: GameId) -> Vec<&str> {
    rows.iter()
        .filter(|r| r.game == game)
        .filter_map(|r| r.first_choice.as_deref())
        .collect()
}

#[test]
fn efr_population_against_always_deviating_computer() {
    let logs = simulate_population(&[(AgentSpec::new(AgentKind::Efr), 50)], &opponent(1.0), 0, 11).unwrap();
    assert_eq!(logs.len(), 50);
    let rows = all_rows(&logs);
    let g1 = first_moves(&rows, GameId::Game1);
    assert_eq!(g1.len(), 50 * 8);
    assert!(g1.iter().all(|m| *m == "d"));
    assert!(first_moves(&rows, GameId::Game3).iter().all(|m| *m == "d"));
    assert!(first_moves(&rows, GameId::Game2).iter().all(|m| *m == "c"));

    let r = compare_pair(&rows, GameId::Game3, GameId::Game4, Thresholds::default()).unwrap();
    assert_eq!(r.at_least_as_often(), r.compared());
    assert_eq!(r.compared(), 50);
}

#[test]
fn expected_value_agents_split_three_and_four() {
    let logs = simulate_population(
        &[(AgentSpec::new(AgentKind::ExpectedValue5050), 10)],
        &opponent(1.0),
        0,
        5,
    )
    .unwrap();
    let rows = all_rows(&logs);
    let g3 = first_moves(&rows, GameId::Game3);
    let g4 = first_moves(&rows, GameId::Game4);
    assert!(!g3.is_empty() && !g4.is_empty());
    assert!(g3.iter().all(|m| *m == "d"));
    assert!(g4.iter().all(|m| *m == "c"));
}

#[test]
fn empty_population() {
    assert!(simulate_population(&[], &OpponentConfig::default(), 0, 1).unwrap().is_empty());
    let logs = simulate_population(&[(AgentSpec::new(AgentKind::Bi), 0)], &OpponentConfig::default(), 0, 1).unwrap();
    assert!(logs.is_empty());
}

#[test]
fn deterministic_in_seed() {
    let specs = [
        (AgentSpec::new(AgentKind::Random), 3),
        (AgentSpec::new(AgentKind::Efr).with_error_rate(0.2), 3),
    ];
    let a = all_rows(&simulate_population(&specs, &OpponentConfig::default(), 2, 77).unwrap());
    let b = all_rows(&simulate_population(&specs, &OpponentConfig::default(), 2, 77).unwrap());
    let c = all_rows(&simulate_population(&specs, &OpponentConfig::default(), 2, 78).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn logs_pass_the_export_schema_and_grid_shape() {
    let specs: Vec<_> = AgentKind::ALL.iter().map(|&k| (AgentSpec::new(k), 9)).collect();
    let logs = simulate_population(&specs[..], &OpponentConfig::default(), 14, 3).unwrap();
    let mut rows = all_rows(&logs);
    rows.truncate(50 * 48);
    assert_eq!(rows.len(), 50 * 48);
    let text = write_csv(&rows);
    assert_eq!(parse_export(&text).unwrap(), rows);
    let grids = choice_grids(&rows).unwrap();
    assert_eq!(grids.len(), 300);
    assert!(grids.iter().all(|g| g.slots.len() == 8));
    assert_eq!(grids_to_csv(&grids).lines().count(), 301);
    let names: std::collections::BTreeSet<_> = logs.iter().map(|l| l.participant.as_str()).collect();
    assert!(names.contains("A1") && names.contains("B1") && names.contains("A27"));
}

#[test]
fn error_free_choices_do_not_vary() {
    let specs: Vec<_> = AgentKind::ALL
        .iter()
        .filter(|&&k| k != AgentKind::Random)
        .map(|&k| (AgentSpec::new(k), 4))
        .collect();
    let logs = simulate_population(&specs, &OpponentConfig::default(), 0, 21).unwrap();
    for grid in choice_grids(&all_rows(&logs)).unwrap() {
        let mut seen: Vec<_> = grid.slots.iter().flatten().collect();
        seen.dedup();
        assert!(seen.len() <= 1, "{grid:?}");
    }
}

#[test]
fn mixed_population_fills_three_classes() {
    let specs = [
        (AgentSpec::new(AgentKind::Efr).with_error_rate(0.15), 20),
        (AgentSpec::new(AgentKind::OwnMaxMyopic).with_error_rate(0.15), 15),
        (AgentSpec::new(AgentKind::Random), 15),
    ];
    let rows = all_rows(&simulate_population(&specs, &opponent(1.0), 0, 8).unwrap());
    let r = compare_pair(&rows, GameId::Game1, GameId::Game1Prime, Thresholds::default()).unwrap();
    let nonempty = DifferenceClass::ALL.iter().filter(|&&c| r.count(c) > 0).count();
    assert!(nonempty >= 3, "{:?}", r.counts);
    assert_eq!(r.counts.values().sum::<usize>(), r.compared());
    assert!(r.comparisons.iter().all(|c| (0.0..=1.0).contains(&c.freq_x) && (0.0..=1.0).contains(&c.freq_y)));
}

#[test]
fn proportion_test_matches_integration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n1 = rng.gen_range(1..400);
        let n2 = rng.gen_range(1..400);
        let s1 = rng.gen_range(0..=n1);
        let s2 = rng.gen_range(0..=n2);
        let got = two_proportion_test(s1, n1, s2, n2).unwrap().p_value;
        let want = common::oracle_p(s1, n1, s2, n2);
        assert!((got - want).abs() < 1e-6, "({s1},{n1},{s2},{n2}): {got} vs {want}");
        assert_eq!(got, two_proportion_test(s2, n2, s1, n1).unwrap().p_value);
    }
    assert!((common::oracle_p(12, 20, 5, 20) - 0.025_160_759_200_408_78).abs() < 1e-9);
}
