use std::process::Command;

fn efrlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_efrlab"))
        .args(args)
        .env_remove("EFRLAB_DATA")
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn game_path(name: &str) -> String {
    format!("{}/../core/games/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn solve_prints_table_row() {
    let (code, out, _) = efrlab(&["solve", "--game", &game_path("game1")]);
    assert_eq!(code, 0);
    assert!(out.contains("Game 1"));
    let efr_col: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with('|'))
        .map(|l| l.split('|').nth(3).unwrap().trim())
        .collect();
    assert!(efr_col.contains(&"C: a;e"));
    assert!(efr_col.contains(&"P: d;g"));
}

#[test]
fn solve_reads_from_data_dir_and_json() {
    let dir = format!("{}/../core/games", env!("CARGO_MANIFEST_DIR"));
    let out = Command::new(env!("CARGO_BIN_EXE_efrlab"))
        .args(["solve", "--game", "game3.json", "--json"])
        .env("EFRLAB_DATA", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["game"], "game3");
}

#[test]
fn missing_game_fails() {
    let (code, _, err) = efrlab(&["solve", "--game", "missing.json"]);
    assert_ne!(code, 0);
    assert!(err.contains("missing.json"));
}

#[test]
fn theorems_report_counts() {
    let (code, out, _) = efrlab(&["theorems", "--n", "100", "--depth", "6", "--no-ties"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "100/100 unique-outcome matches");
    let (code, out, _) = efrlab(&["theorems", "--n", "30", "--depth", "5", "--seed", "9"]);
    assert_eq!(code, 0);
    assert!(out.contains("30/30 EFR outcomes inside BI outcomes"));
}

#[test]
fn schedule_round_trip_and_bad_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = efrlab(&["schedule", "--seed", "5", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.contains("0 violations"));
    let (code, again, _) = efrlab(&["schedule", "--verify", p]);
    assert_eq!(code, 0);
    assert_eq!(out, again);
    let (code, _, _) = efrlab(&["schedule", "--deviation-rate", "1.5"]);
    assert_ne!(code, 0);
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let ana = dir.path().join("ana");
    let (code, _, err) = efrlab(&[
        "simulate",
        "--agents",
        "efr=4,random=4",
        "--practice",
        "0",
        "--out",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_dir(sim.join("events")).unwrap().count(), 8);
    let csv = sim.join("trials.csv");
    let (code, out, _) = efrlab(&["analyze", "--input", csv.to_str().unwrap(), "--out", ana.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("8 participants"));
    assert!(out.contains("played d at least as often in Game 3 as in Game 4"));
    let grids = std::fs::read_to_string(ana.join("grids.csv")).unwrap();
    assert_eq!(grids.lines().count(), 1 + 8 * 6);
    assert!(ana.join("grids.svg").exists());

    std::fs::write(dir.path().join("bad.csv"), "a,b\n1,2\n").unwrap();
    let (code, _, _) = efrlab(&["analyze", "--input", dir.path().join("bad.csv").to_str().unwrap()]);
    assert_ne!(code, 0);
    let (code, _, _) = efrlab(&["simulate", "--agents", "wizard=3"]);
    assert_ne!(code, 0);
}
