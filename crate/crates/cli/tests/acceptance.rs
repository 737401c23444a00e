//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the terminal.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::Command;
use std::time::{Duration, Instant};

use embodied::planners::{format_vertex, gtp_connect, parse_vertex, GtpError, Vertex};
use embodied::train::{train_demo, TrainDemoConfig};
use support::Check;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn rules_oracles() -> Check {
    let positions = support::random_go_positions(2024, 1000, 7);
    let tt = support::check_tromp_taylor(&positions)?;
    let legal = support::check_go_legal_moves(&positions)?;
    let ttt = support::check_ttt_minimax()?;
    Ok(format!("tromp-taylor: {tt}; legal moves: {legal}; minimax: {ttt}"))
}

fn vtrace_math() -> Check {
    let on = support::check_vtrace_on_policy(7, 10_000)?;
    let iso = support::check_stream_isolation(8, 10_000)?;
    let fd = support::check_gaussian_gradients(9, 2_000)?;
    Ok(format!("on-policy: {on}; isolation: {iso}; gaussian fd: {fd}"))
}

fn env_mechanics() -> Check {
    let rewards = support::check_reward_accounting(500, 10_000)?;
    let legality = support::check_pegs_legality(100, 20_000)?;
    let limits = support::check_time_limits(5)?;
    Ok(format!("reward accounting: {rewards}; pegs legality: {legality}; limits: {limits}"))
}

fn solvability() -> Check {
    let levels = support::check_solvability(100)?;
    let (d1, len1) = support::oracle_solve_rate(1, 100, 30_000)?;
    let (d3, len3) = support::oracle_solve_rate(3, 100, 40_000)?;
    let detail = format!(
        "{levels}; oracle pegs d1 {:.0}% (mean {len1:.0} steps), d3 {:.0}% (mean {len3:.0} steps)",
        d1 * 100.0,
        d3 * 100.0
    );
    if d1 >= 0.95 && d3 >= 0.70 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mujoxo_play() -> Check {
    let (w, d, l, len) = support::mujoxo_oracle(0.25, 200)?;
    let detail = format!("vs eps 0.25: {w} wins, {d} draws, {l} losses; mean {len:.1} control steps");
    if l == 0 && (50.0..=200.0).contains(&len) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli_run(args: &[&str]) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log = dir.path().join("ep.jsonl");
    let out = Command::new(env!("CARGO_BIN_EXE_embodied"))
        .args(args)
        .args(["--log", log.to_str().unwrap()])
        .env_remove("EMBODIED_ENGINE_CMD")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut bytes = out.stdout;
    bytes.extend(std::fs::read(&log).map_err(|e| e.to_string())?);
    Ok(bytes)
}

fn determinism() -> Check {
    let cases: [&[&str]; 3] = [
        &["run", "--game", "mujoban", "--episodes", "8", "--seed", "5", "--agent", "random"],
        &["run", "--game", "mujoxo", "--episodes", "8", "--seed", "6"],
        &["run", "--game", "mujogo", "--episodes", "3", "--seed", "7"],
    ];
    let mut bytes = 0;
    for case in cases {
        let a = cli_run(case)?;
        let b = cli_run(case)?;
        let p: Vec<&str> = case.iter().copied().chain(["--parallel", "4"]).collect();
        let c = cli_run(&p)?;
        if a != b || a != c {
            return Err(format!("{case:?}: output differs between runs or worker counts"));
        }
        bytes += a.len();
    }
    Ok(format!("3 games, 2 runs + --parallel 4 bit-identical ({bytes} bytes each)"))
}

fn gtp_codec() -> Check {
    let mut n = 0;
    for size in 5..=19 {
        for col in 0..size {
            for row in 0..size {
                let text = format_vertex(col, row, size).map_err(|e| e.to_string())?;
                if parse_vertex(&text, size) != Ok(Vertex::Point(col, row)) {
                    return Err(format!("{text} on {size}x{size}"));
                }
                n += 1;
            }
        }
    }
    let engine = format!("sh {}/../core/tests/fixtures/fake_gtp.sh", env!("CARGO_MANIFEST_DIR"));
    let mut s = gtp_connect(&engine).map_err(|e| e.to_string())?;
    let checks = [
        ("success", s.send("protocol_version").ok() == Some("2".into())),
        ("failure", matches!(s.send("fail"), Err(GtpError::Engine(m)) if m == "deliberate failure")),
        ("blank lines", s.send("noise").ok() == Some("after blank lines".into())),
        ("multi-line", s.send("multi").ok() == Some("first\nsecond".into())),
        ("usable after failure", !s.is_broken() && s.send("name").is_ok()),
    ];
    if let Some((what, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(format!("fake engine {what} case"));
    }
    Ok(format!("{n} vertices round-trip on sizes 5-19; fake engine success/failure/blank-line/multi-line framing"))
}

fn throughput() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_embodied"))
        .args(["bench", "--steps", "300000", "--report-every", "100000"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into());
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap_or("{}")).map_err(|e| e.to_string())?;
    let rate = last["steps_per_second"].as_f64().unwrap_or(0.0);
    let detail = format!("{rate:.0} Mujoban control steps/s single worker");
    if rate >= 10_000.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn training_smoke() -> Check {
    let cfg = TrainDemoConfig { stop_at: Some(0.51), max_seconds: Some(7200.0), iterations: 2000, ..TrainDemoConfig::default() };
    let report = train_demo(&cfg, |_| {}).map_err(|e| e.to_string())?;
    let detail = format!(
        "solve rate {:.0}% -> {:.0}% after {} iterations, {} env steps, {:.0} s",
        report.initial.solve_rate * 100.0,
        report.last.solve_rate * 100.0,
        report.last.iteration,
        report.last.env_steps,
        report.last.elapsed_seconds
    );
    if report.initial.solve_rate < 0.10 && report.last.solve_rate > 0.50 && report.last.elapsed_seconds < 7200.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria = [
        Criterion { name: "rules oracles", budget: Duration::from_secs(120), run: rules_oracles },
        Criterion { name: "v-trace and gaussian head", budget: Duration::from_secs(60), run: vtrace_math },
        Criterion { name: "environment mechanics", budget: Duration::from_secs(600), run: env_mechanics },
        Criterion { name: "solvability", budget: Duration::from_secs(1800), run: solvability },
        Criterion { name: "mujoxo oracle play", budget: Duration::from_secs(600), run: mujoxo_play },
        Criterion { name: "determinism", budget: Duration::from_secs(600), run: determinism },
        Criterion { name: "gtp codec", budget: Duration::from_secs(60), run: gtp_codec },
        Criterion { name: "throughput", budget: Duration::from_secs(120), run: throughput },
        Criterion { name: "training smoke", budget: Duration::from_secs(7200), run: training_smoke },
    ];
    // Accept and ignore libtest arguments; a plain word filters by name.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.as_ref().is_none_or(|f| c.name.contains(f.as_str()))) {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {} s budget", c.budget.as_secs())),
            Err(d) => (false, d),
        };
        failed += !ok as usize;
        println!("{} {}: {detail} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, c.name, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
