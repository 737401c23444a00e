//! Independent oracles shared by the integration tests and the acceptance
//! suite. Each check returns a one-line detail on success.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use embodied::control::{OracleAgent, RandomAgent};
use embodied::env::log::run_episode;
use embodied::env::Outcome;
use embodied::games::{
    generate_level, go_apply, go_legal_moves, tromp_taylor_score, Cell, Direction, GoBoard, GoMove, LevelSpec, Mark,
    SokobanState, Stone, TttBoard, TttOutcome, TttPlayer,
};
use embodied::planners::{solve_sokoban, ttt_minimax, AbstractState};
use embodied::rl::{
    dual_pg_coefficients, gaussian_head, gaussian_logp, gaussian_logp_grad, vtrace_targets, GaussianHeadParams,
    Stream, Trajectory,
};
use embodied::{EnvConfig, Environment, Game, PlannerMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

// ---------------------------------------------------------------- Go

/// Brute-force Tromp-Taylor: every empty point floods its own region.
pub fn brute_tromp_taylor(cells: &[Stone], size: usize, komi: f64) -> f64 {
    let nbrs = |i: usize| {
        let (c, r) = (i % size, i / size);
        let mut v = Vec::new();
        if c > 0 {
            v.push(i - 1);
        }
        if c + 1 < size {
            v.push(i + 1);
        }
        if r > 0 {
            v.push(i - size);
        }
        if r + 1 < size {
            v.push(i + size);
        }
        v
    };
    let mut score = 0.0;
    for (i, &s) in cells.iter().enumerate() {
        match s {
            Stone::Black => score += 1.0,
            Stone::White => score -= 1.0,
            Stone::Empty => {
                let mut seen = HashSet::from([i]);
                let mut queue = VecDeque::from([i]);
                let (mut b, mut w) = (false, false);
                while let Some(q) = queue.pop_front() {
                    for n in nbrs(q) {
                        match cells[n] {
                            Stone::Black => b = true,
                            Stone::White => w = true,
                            Stone::Empty => {
                                if seen.insert(n) {
                                    queue.push_back(n);
                                }
                            }
                        }
                    }
                }
                if b && !w {
                    score += 1.0;
                } else if w && !b {
                    score -= 1.0;
                }
            }
        }
    }
    score - komi
}

fn oracle_group(cells: &[Stone], size: usize, p: usize) -> (Vec<usize>, usize) {
    let color = cells[p];
    let mut group = vec![p];
    let mut seen = HashSet::from([p]);
    let mut libs = HashSet::new();
    let mut k = 0;
    while k < group.len() {
        let q = group[k];
        k += 1;
        let (c, r) = ((q % size) as i64, (q / size) as i64);
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nc, nr) = (c + dc, r + dr);
            if nc < 0 || nr < 0 || nc >= size as i64 || nr >= size as i64 {
                continue;
            }
            let n = (nr as usize) * size + nc as usize;
            if cells[n] == Stone::Empty {
                libs.insert(n);
            } else if cells[n] == color && seen.insert(n) {
                group.push(n);
            }
        }
    }
    (group, libs.len())
}

/// Placement with captures, suicide allowed, positional superko against
/// `history`. `None` when illegal.
pub fn oracle_play(cells: &[Stone], size: usize, me: Stone, p: usize, history: &[Vec<Stone>]) -> Option<Vec<Stone>> {
    if cells[p] != Stone::Empty {
        return None;
    }
    let them = if me == Stone::Black { Stone::White } else { Stone::Black };
    let mut next = cells.to_vec();
    next[p] = me;
    for q in 0..next.len() {
        if next[q] == them {
            let (group, libs) = oracle_group(&next, size, q);
            if libs == 0 {
                for g in group {
                    next[g] = Stone::Empty;
                }
            }
        }
    }
    let (group, libs) = oracle_group(&next, size, p);
    if libs == 0 {
        for g in group {
            next[g] = Stone::Empty;
        }
    }
    if history.contains(&next) {
        return None;
    }
    Some(next)
}

/// Positions from random playouts of random length, with the full position
/// history of each.
pub fn random_go_positions(seed: u64, count: usize, size: usize) -> Vec<(GoBoard, Vec<Vec<Stone>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut board = GoBoard::new(size, 5.5);
        let mut history = vec![board.cells().to_vec()];
        let len = rng.random_range(0..size * size * 3);
        for _ in 0..len {
            let moves = go_legal_moves(&board);
            let places: Vec<GoMove> = moves.iter().copied().filter(|m| *m != GoMove::Pass).collect();
            if places.is_empty() {
                break;
            }
            // Passing rarely keeps most playouts alive.
            let mv = if rng.random_bool(0.03) { GoMove::Pass } else { places[rng.random_range(0..places.len())] };
            board = go_apply(&board, mv).expect("legal");
            if board.is_over() {
                break;
            }
            if mv != GoMove::Pass {
                history.push(board.cells().to_vec());
            }
        }
        out.push((board, history));
    }
    out
}

pub fn check_tromp_taylor(positions: &[(GoBoard, Vec<Vec<Stone>>)]) -> Check {
    for (i, (b, _)) in positions.iter().enumerate() {
        let got = tromp_taylor_score(b, 5.5);
        let want = brute_tromp_taylor(b.cells(), b.size(), 5.5);
        if got != want {
            return Err(format!("position {i}: score {got}, oracle {want}"));
        }
    }
    Ok(format!("{} positions exact", positions.len()))
}

pub fn check_go_legal_moves(positions: &[(GoBoard, Vec<Vec<Stone>>)]) -> Check {
    let mut compared = 0usize;
    for (i, (b, history)) in positions.iter().enumerate() {
        if b.is_over() {
            continue;
        }
        let legal: HashSet<GoMove> = go_legal_moves(b).into_iter().collect();
        let mut trial: HashSet<GoMove> = HashSet::new();
        for p in 0..b.size() * b.size() {
            let applied = go_apply(b, GoMove::Play(p));
            let oracle = oracle_play(b.cells(), b.size(), b.to_move().stone(), p, history);
            match (&applied, &oracle) {
                (Ok(next), Some(cells)) if next.cells() == cells.as_slice() => {
                    trial.insert(GoMove::Play(p));
                }
                (Err(_), None) => {}
                _ => return Err(format!("position {i}, point {p}: apply {:?} vs oracle {:?}", applied.is_ok(), oracle.is_some())),
            }
            compared += 1;
        }
        if go_apply(b, GoMove::Pass).is_ok() {
            trial.insert(GoMove::Pass);
        }
        if legal != trial {
            return Err(format!("position {i}: legal move set differs from trial application"));
        }
    }
    Ok(format!("{} positions, {compared} placements agree with trial application and capture oracle", positions.len()))
}

// ---------------------------------------------------------------- tic-tac-toe

/// Negamax value for the side to move: +1 win, 0 draw, -1 loss.
pub fn negamax(b: &TttBoard, memo: &mut HashMap<TttBoard, i8>) -> i8 {
    if let Some(&v) = memo.get(b) {
        return v;
    }
    let v = match b.outcome() {
        TttOutcome::Draw => 0,
        TttOutcome::XWins | TttOutcome::OWins => -1,
        TttOutcome::Ongoing => (0..9)
            .filter(|&c| b.cells[c] == Mark::Empty)
            .map(|c| -negamax(&b.apply(c).unwrap(), memo))
            .max()
            .unwrap(),
    };
    memo.insert(*b, v);
    v
}

/// Plays `ttt_minimax` as `me` against every possible opponent line.
/// Returns (leaves, losses, value mismatches).
pub fn ttt_exhaustive(me: TttPlayer) -> (usize, usize, usize) {
    let mut memo = HashMap::new();
    let mut stack = vec![TttBoard::new()];
    let (mut leaves, mut losses, mut mismatches) = (0, 0, 0);
    while let Some(b) = stack.pop() {
        match b.outcome() {
            TttOutcome::Ongoing => {}
            o => {
                leaves += 1;
                let lost = matches!((o, me), (TttOutcome::OWins, TttPlayer::X) | (TttOutcome::XWins, TttPlayer::O));
                losses += lost as usize;
                continue;
            }
        }
        if b.to_move == me {
            let (cell, value) = ttt_minimax(&b).expect("ongoing");
            if value != negamax(&b, &mut memo) || -negamax(&b.apply(cell).unwrap(), &mut memo) != value {
                mismatches += 1;
            }
            stack.push(b.apply(cell).unwrap());
        } else {
            for c in b.legal_moves() {
                stack.push(b.apply(c).unwrap());
            }
        }
    }
    (leaves, losses, mismatches)
}

pub fn check_ttt_minimax() -> Check {
    let mut total = 0;
    for me in [TttPlayer::X, TttPlayer::O] {
        let (leaves, losses, mismatches) = ttt_exhaustive(me);
        if losses > 0 || mismatches > 0 {
            return Err(format!("as {me:?}: {losses} losses, {mismatches} value mismatches over {leaves} lines"));
        }
        total += leaves;
    }
    Ok(format!("no losses over {total} complete lines as X and O"))
}

// ---------------------------------------------------------------- V-trace

pub fn random_trajectory(rng: &mut ChaCha8Rng, on_policy: bool) -> Trajectory {
    let n = rng.random_range(1..=16);
    let vals = |rng: &mut ChaCha8Rng, k: usize| (0..k).map(|_| rng.random_range(-5.0..5.0)).collect::<Vec<f64>>();
    let behavior = vals(rng, n);
    let target = if on_policy { behavior.clone() } else { behavior.iter().map(|b| b + rng.random_range(-1.5..1.5)).collect() };
    Trajectory {
        rewards_env: vals(rng, n),
        rewards_abs: vals(rng, n),
        behavior_logp: behavior,
        target_logp: target,
        values_env: vals(rng, n + 1),
        values_abs: vals(rng, n + 1),
        done_env: (0..n).map(|_| rng.random_bool(0.15)).collect(),
        done_abs: (0..n).map(|_| rng.random_bool(0.3)).collect(),
        gamma_env: rng.random_range(0.0..0.999),
        gamma_abs: rng.random_range(0.0..0.999),
    }
}

fn stream_of(t: &Trajectory, s: Stream) -> (&[f64], &[f64], &[bool], f64) {
    match s {
        Stream::Env => (&t.rewards_env, &t.values_env, &t.done_env, t.gamma_env),
        Stream::Abs => (&t.rewards_abs, &t.values_abs, &t.done_abs, t.gamma_abs),
    }
}

/// On-policy targets by recursion: v_n = V_n, v_s = r_s + gamma (1 - d_s) v_{s+1}.
pub fn n_step_oracle(t: &Trajectory, s: Stream) -> (Vec<f64>, Vec<f64>) {
    let (r, v, d, g) = stream_of(t, s);
    let n = r.len();
    fn rec(s: usize, r: &[f64], v: &[f64], d: &[bool], g: f64) -> f64 {
        if s == r.len() {
            return v[s];
        }
        r[s] + if d[s] { 0.0 } else { g * rec(s + 1, r, v, d, g) }
    }
    let vs: Vec<f64> = (0..n).map(|k| rec(k, r, v, d, g)).collect();
    let adv = (0..n)
        .map(|k| r[k] + if d[k] { 0.0 } else { g * rec(k + 1, r, v, d, g) } - v[k])
        .collect();
    (vs, adv)
}

/// Off-policy targets from the explicit sum
/// v_s = V_s + sum_t gamma^(t-s) (prod_{i<t} c_i) rho_t delta_t, cut at dones.
pub fn vtrace_sum_oracle(t: &Trajectory, s: Stream, rho_bar: f64, c_bar: f64) -> Vec<f64> {
    let (r, v, d, g) = stream_of(t, s);
    let n = r.len();
    let ratio = |i: usize| (t.target_logp[i] - t.behavior_logp[i]).exp();
    (0..n)
        .map(|start| {
            let mut total = v[start];
            let mut weight = 1.0;
            for k in start..n {
                let cont = if d[k] { 0.0 } else { g };
                total += weight * ratio(k).min(rho_bar) * (r[k] + cont * v[k + 1] - v[k]);
                weight *= cont * ratio(k).min(c_bar);
                if weight == 0.0 {
                    break;
                }
            }
            total
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn check_vtrace_on_policy(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let t = random_trajectory(&mut rng, true);
        for s in [Stream::Env, Stream::Abs] {
            let got = vtrace_targets(&t, s, 1.0, 1.0).map_err(|e| e.to_string())?;
            let (vs, adv) = n_step_oracle(&t, s);
            for k in 0..t.len() {
                worst = worst.max((got.vs[k] - vs[k]).abs()).max((got.advantages[k] - adv[k]).abs());
                if !close(got.vs[k], vs[k], 1e-10) || !close(got.advantages[k], adv[k], 1e-10) {
                    return Err(format!("trajectory {i}, {s:?}, step {k}: {} vs {}", got.vs[k], vs[k]));
                }
            }
        }
    }
    Ok(format!("{count} trajectories, max abs error {worst:.2e}"))
}

pub fn check_vtrace_off_policy(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let t = random_trajectory(&mut rng, false);
        let c_bar = rng.random_range(0.2..1.5);
        let rho_bar = c_bar + rng.random_range(0.0..1.0);
        for s in [Stream::Env, Stream::Abs] {
            let got = vtrace_targets(&t, s, rho_bar, c_bar).map_err(|e| e.to_string())?;
            let want = vtrace_sum_oracle(&t, s, rho_bar, c_bar);
            for k in 0..t.len() {
                if !close(got.vs[k], want[k], 1e-10) {
                    return Err(format!("trajectory {i}, {s:?}, step {k}: {} vs {}", got.vs[k], want[k]));
                }
            }
        }
    }
    Ok(format!("{count} off-policy trajectories"))
}

/// Scrambling one stream's rewards, values, dones and discount leaves the
/// other stream's outputs bit-identical.
pub fn check_stream_isolation(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let on_policy = rng.random_bool(0.5);
        let t = random_trajectory(&mut rng, on_policy);
        let base = dual_pg_coefficients(&t, 1.0, 1.0).map_err(|e| e.to_string())?;
        let other = random_trajectory(&mut rng, true);
        let n = t.len();
        let mut u = t.clone();
        u.rewards_abs = (0..n).map(|_| rng.random_range(-9.0..9.0)).collect();
        u.values_abs = (0..=n).map(|_| rng.random_range(-9.0..9.0)).collect();
        u.done_abs = (0..n).map(|_| rng.random_bool(0.5)).collect();
        u.gamma_abs = other.gamma_abs;
        let a = dual_pg_coefficients(&u, 1.0, 1.0).map_err(|e| e.to_string())?;
        if a.w_env != base.w_env || a.vs_env != base.vs_env {
            return Err(format!("trajectory {i}: env stream changed with abs inputs"));
        }
        let mut w = t.clone();
        w.rewards_env = (0..n).map(|_| rng.random_range(-9.0..9.0)).collect();
        w.values_env = (0..=n).map(|_| rng.random_range(-9.0..9.0)).collect();
        w.done_env = (0..n).map(|_| rng.random_bool(0.5)).collect();
        w.gamma_env = other.gamma_env;
        let b = dual_pg_coefficients(&w, 1.0, 1.0).map_err(|e| e.to_string())?;
        if b.w_abs != base.w_abs || b.vs_abs != base.vs_abs {
            return Err(format!("trajectory {i}: abs stream changed with env inputs"));
        }
        let total = base.total();
        if (0..n).any(|k| total[k] != base.w_env[k] + base.w_abs[k]) {
            return Err(format!("trajectory {i}: total is not the sum of both streams"));
        }
    }
    Ok(format!("{count} trajectories, both directions exact"))
}

pub fn check_gaussian_gradients(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let dim = rng.random_range(1..=4);
        let params = GaussianHeadParams {
            raw_mean: (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect(),
            raw_var: (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect(),
        };
        let action: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
        let (dm, dv) = gaussian_logp_grad(&params, &action);
        let logp = |p: &GaussianHeadParams| gaussian_logp(&gaussian_head(p), &action);
        for k in 0..dim {
            for (which, analytic) in [(0, dm[k]), (1, dv[k])] {
                let (mut plus, mut minus) = (params.clone(), params.clone());
                let (a, b) = if which == 0 {
                    (&mut plus.raw_mean[k], &mut minus.raw_mean[k])
                } else {
                    (&mut plus.raw_var[k], &mut minus.raw_var[k])
                };
                *a += h;
                *b -= h;
                let fd = (logp(&plus) - logp(&minus)) / (2.0 * h);
                let rel = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-3);
                worst = worst.max(rel);
                if rel > 1e-5 {
                    return Err(format!("case {i}, dim {k}, head {which}: analytic {analytic}, fd {fd}"));
                }
            }
        }
    }
    Ok(format!("{count} cases, max relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- Sokoban

/// Direction taking `a` to `b` in exactly one legal move, checked by hand.
pub fn oracle_single_move(a: &SokobanState, b: &SokobanState) -> bool {
    let boxes: HashSet<Cell> = a.boxes().iter().copied().collect();
    Direction::ALL.into_iter().any(|d| {
        let (dx, dy) = d.delta();
        let p = a.player();
        let t = Cell { x: p.x + dx, y: p.y + dy };
        if a.is_wall(t) {
            return false;
        }
        let mut next_boxes = boxes.clone();
        if boxes.contains(&t) {
            let beyond = Cell { x: t.x + dx, y: t.y + dy };
            if a.is_wall(beyond) || boxes.contains(&beyond) {
                return false;
            }
            next_boxes.remove(&t);
            next_boxes.insert(beyond);
        }
        b.player() == t && b.boxes().iter().copied().collect::<HashSet<_>>() == next_boxes
    })
}

pub fn replay_plan(start: &SokobanState, plan: &[Direction]) -> Option<SokobanState> {
    let mut s = start.clone();
    for &d in plan {
        let next = s.apply(d).ok()?;
        if !oracle_single_move(&s, &next) {
            return None;
        }
        s = next;
    }
    Some(s)
}

pub fn check_solvability(per_difficulty: u64) -> Check {
    let mut parts = Vec::new();
    for d in 1..=5u8 {
        let spec = LevelSpec::for_difficulty(d).map_err(|e| e.to_string())?;
        let mut total_len = 0;
        for k in 0..per_difficulty {
            let level = generate_level(k, &spec).map_err(|e| format!("difficulty {d}, seed {k}: {e}"))?;
            if level.boxes().len() != spec.num_boxes {
                return Err(format!("difficulty {d}, seed {k}: {} boxes", level.boxes().len()));
            }
            let plan = solve_sokoban(&level, 2_000_000).ok_or(format!("difficulty {d}, seed {k}: no plan"))?;
            match replay_plan(&level, &plan) {
                Some(end) if end.is_solved() => total_len += plan.len(),
                _ => return Err(format!("difficulty {d}, seed {k}: plan does not replay to a solution")),
            }
        }
        parts.push(format!("d{d} mean plan {:.1}", total_len as f64 / per_difficulty as f64));
    }
    Ok(format!("{per_difficulty} levels per difficulty verified ({})", parts.join(", ")))
}

fn mujoban_config(difficulty: u8, pegs: bool, planner: PlannerMode) -> EnvConfig {
    let mut cfg = EnvConfig::for_game(Game::Mujoban);
    cfg.difficulty = Some(difficulty);
    cfg.pegs = pegs;
    cfg.planner_mode = planner;
    cfg
}

/// Oracle agent on `episodes` pegs-variant levels; returns solve fraction.
pub fn oracle_solve_rate(difficulty: u8, episodes: u64, seed_base: u64) -> Result<(f64, f64), String> {
    let mut env = Environment::new(mujoban_config(difficulty, true, PlannerMode::None)).map_err(|e| e.to_string())?;
    let mut agent = OracleAgent::new();
    let (mut solved, mut len) = (0, 0);
    for i in 0..episodes {
        let s = run_episode(&mut env, &mut agent, i, seed_base + i, None, None).map_err(|e| e.to_string())?;
        if s.outcome == Some(Outcome::Solved) {
            solved += 1;
            len += s.length;
        }
        if s.length > 900 {
            return Err(format!("episode {i} ran {} steps", s.length));
        }
    }
    Ok((solved as f64 / episodes as f64, len as f64 / solved.max(1) as f64))
}

/// Random-control Mujoban episodes: the per-step environment reward equals
/// the change in boxes on targets plus 10 on the solving step, the abstract
/// reward is paid only on a matched sub-goal, and episodes stop at the limit.
pub fn check_reward_accounting(episodes: u64, seed_base: u64) -> Check {
    let mut steps = 0u64;
    for e in 0..episodes {
        let difficulty = 1 + (e % 5) as u8;
        let mut env = Environment::new(mujoban_config(difficulty, e % 2 == 1, PlannerMode::Expert))
            .map_err(|x| x.to_string())?;
        env.reset(seed_base + e).map_err(|x| x.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed_base + e);
        let AbstractState::Sokoban(mut prev) = env.abstract_state() else { unreachable!() };
        let start_on = prev.boxes_on_target() as f64;
        let mut total = 0.0;
        while !env.is_done() {
            let r = env
                .step(&[rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)])
                .map_err(|x| x.to_string())?;
            steps += 1;
            let AbstractState::Sokoban(now) = &r.info.abstract_state else { unreachable!() };
            let solved_now = r.info.outcome == Some(Outcome::Solved);
            let want = now.boxes_on_target() as f64 - prev.boxes_on_target() as f64 + if solved_now { 10.0 } else { 0.0 };
            if r.reward_env != want {
                return Err(format!("episode {e}, step {}: reward {} expected {want}", env.step_index(), r.reward_env));
            }
            let matched = r.info.events.iter().any(|ev| matches!(ev, embodied::env::Event::AuxMatched));
            if (r.reward_abs != 0.0) != matched || (matched && r.reward_abs != 1.0) {
                return Err(format!("episode {e}, step {}: abstract reward {} matched {matched}", env.step_index(), r.reward_abs));
            }
            total += r.reward_env;
            prev = now.clone();
        }
        let end_on = prev.boxes_on_target() as f64;
        let solved = env.outcome() == Some(Outcome::Solved);
        if total != end_on - start_on + if solved { 10.0 } else { 0.0 } {
            return Err(format!("episode {e}: return {total} does not match box count change"));
        }
        if env.step_index() > env.time_limit() || (!solved && env.step_index() != env.time_limit()) {
            return Err(format!("episode {e}: ended at step {} with limit {}", env.step_index(), env.time_limit()));
        }
    }
    Ok(format!("{episodes} episodes, {steps} steps"))
}

/// Oracle agent in the pegs variant: every change of the estimated abstract
/// state is one legal Sokoban move.
pub fn check_pegs_legality(episodes: u64, seed_base: u64) -> Check {
    let mut moves = 0u64;
    let mut solved = 0;
    for e in 0..episodes {
        let difficulty = 1 + (e % 3) as u8;
        let mut env =
            Environment::new(mujoban_config(difficulty, true, PlannerMode::Expert)).map_err(|x| x.to_string())?;
        env.reset(seed_base + e).map_err(|x| x.to_string())?;
        let mut agent = OracleAgent::new();
        use embodied::env::log::Agent;
        agent.begin_episode(&env);
        let mut obs = env.observe();
        let AbstractState::Sokoban(mut prev) = env.abstract_state() else { unreachable!() };
        while !env.is_done() {
            let a = agent.act(&env, &obs);
            let r = env.step(&a).map_err(|x| x.to_string())?;
            let AbstractState::Sokoban(now) = &r.info.abstract_state else { unreachable!() };
            if now.player() != prev.player() || now.boxes() != prev.boxes() {
                if !oracle_single_move(&prev, now) {
                    return Err(format!("episode {e}, step {}: illegal abstract transition", env.step_index()));
                }
                moves += 1;
            }
            if r.info.illegal_transition_count != 0 {
                return Err(format!("episode {e}: environment counted an illegal transition"));
            }
            prev = now.clone();
            obs = r.observation;
        }
        solved += (env.outcome() == Some(Outcome::Solved)) as usize;
    }
    Ok(format!("{episodes} episodes, {moves} abstract moves all legal ({solved} solved)"))
}

/// Random agents on every game never exceed the time limits.
pub fn check_time_limits(episodes_per_case: u64) -> Check {
    let mut parts = Vec::new();
    for (game, eval, limit) in [(Game::Mujoban, false, 900), (Game::Mujoxo, false, 600), (Game::Mujogo, false, 900), (Game::Mujogo, true, 1200)] {
        let mut cfg = EnvConfig::for_game(game);
        cfg.eval_mode = eval;
        let mut env = Environment::new(cfg).map_err(|e| e.to_string())?;
        if env.time_limit() != limit {
            return Err(format!("{game} eval={eval}: limit {} expected {limit}", env.time_limit()));
        }
        let mut agent = RandomAgent::new();
        let mut longest = 0;
        for i in 0..episodes_per_case {
            let s = run_episode(&mut env, &mut agent, i, i, None, None).map_err(|e| e.to_string())?;
            if s.length > limit || (s.outcome == Some(Outcome::TimedOut) && s.length != limit) {
                return Err(format!("{game} eval={eval}: episode {i} length {} outcome {:?}", s.length, s.outcome));
            }
            longest = longest.max(s.length);
        }
        parts.push(format!("{game}{} <= {limit} (max {longest})", if eval { " eval" } else { "" }));
    }
    Ok(parts.join(", "))
}

/// MujoXo oracle against an epsilon opponent: (wins, draws, losses, mean length).
pub fn mujoxo_oracle(epsilon: f64, games: u64) -> Result<(u64, u64, u64, f64), String> {
    let mut cfg = EnvConfig::for_game(Game::Mujoxo);
    cfg.opponent.epsilon = epsilon;
    let mut env = Environment::new(cfg).map_err(|e| e.to_string())?;
    let mut agent = OracleAgent::new();
    let (mut w, mut d, mut l, mut len) = (0, 0, 0, 0);
    for i in 0..games {
        let s = run_episode(&mut env, &mut agent, i, i, None, None).map_err(|e| e.to_string())?;
        len += s.length;
        match s.outcome {
            Some(Outcome::Win) => w += 1,
            Some(Outcome::Draw) => d += 1,
            _ => l += 1,
        }
    }
    Ok((w, d, l, len as f64 / games as f64))
}
