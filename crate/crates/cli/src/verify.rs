//! The acceptance suite: twelve criteria, each reported as PASS or FAIL with
//! the numbers behind the verdict.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schelling_core::constructions::{
    binary_grid_layout, construct_2zts_grid, construct_band_grid, construct_binary_grid, construct_tree_equilibrium,
};
use schelling_core::equilibrium::placement_count;
use schelling_core::instances::{
    evaluate_bound, no_equilibrium_tree_game, poa_lb_equilibrium_welfare, poa_lb_game, pos_equilibrium_welfare,
    pos_game, pos_v_star_welfare, pos_v_star_welfare_stated, seven_type_alt_tolerance, seven_type_grid_example, BoundKind,
    BoundParams, PosSizes,
};
use schelling_core::rational::format_rational;
use schelling_core::topology::{connected_graphs, grid};
use schelling_core::{
    enumerate_equilibria, is_equilibrium, optimal_welfare, reference, social_welfare, standard_tolerance,
    tolerance_sums, utility, Assignment, EnumerationConfig, GameInstance, Rational, ToleranceKind, ToleranceVector,
};

use crate::commands::enumeration_report;
use crate::random::{random_connected, random_tolerance, random_tree};
use crate::CliError;

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub number: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {verdict} | {} | {}", self.number, self.title, self.detail)
    }
}

type Outcome = Result<(bool, String), CliError>;

fn title(number: usize) -> &'static str {
    match number {
        1 => "tree without equilibria",
        2 => "zero-tolerance grid construction",
        3 => "2-binary grid construction",
        4 => "seven-type grid witness",
        5 => "band grid construction",
        6 => "tree construction",
        7 => "equilibrium welfare lower bound",
        8 => "anarchy lower-bound instance",
        9 => "stability lower-bound instance",
        10 => "tolerant versus zero-tolerance equilibria",
        11 => "agreement with brute force",
        12 => "worker-count determinism",
        _ => "unknown",
    }
}

pub fn run_criterion(number: usize) -> Result<CriterionReport, CliError> {
    let outcome = match number {
        1 => tree_without_equilibria(),
        2 => zts_grid_sweep(),
        3 => binary_grid_sweep(),
        4 => seven_type_witness(),
        5 => band_grids(),
        6 => random_tree_constructions(),
        7 => welfare_lower_bound(),
        8 => anarchy_instance(),
        9 => stability_instance(),
        10 => tolerant_inclusion(),
        11 => brute_force_agreement(),
        12 => worker_determinism(),
        n => return Err(CliError::Usage(format!("criteria are numbered 1 to {CRITERIA}, got {n}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionReport { number, title: title(number), passed, detail })
}

/// Runs the selected criteria, or all of them when `selected` is empty.
pub fn run_criteria(selected: &[usize]) -> Result<Vec<CriterionReport>, CliError> {
    let all: Vec<usize> = (1..=CRITERIA).collect();
    let numbers = if selected.is_empty() { &all[..] } else { selected };
    numbers.iter().map(|&n| run_criterion(n)).collect()
}

fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

fn show(tv: &ToleranceVector) -> String {
    let parts: Vec<String> = tv.values().iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

fn tolerance(kind: ToleranceKind, lambda: usize, alpha: Option<usize>) -> Result<ToleranceVector, CliError> {
    Ok(standard_tolerance(kind, lambda, alpha)?)
}

fn config() -> EnumerationConfig {
    EnumerationConfig::default()
}

fn stable(game: &GameInstance, a: &Assignment) -> bool {
    is_equilibrium(game, a).0
}

type Case = (String, GameInstance, Assignment);

fn tree_without_equilibria() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for tv in [ToleranceVector::new(vec![r(1, 1), r(1, 2)])?, tolerance(ToleranceKind::Zero, 2, None)?] {
        let inst = no_equilibrium_tree_game(2, tv.clone())?;
        let start = Instant::now();
        let equilibria = enumerate_equilibria(&inst.game, &config())?;
        let secs = start.elapsed().as_secs_f64();
        let placements = placement_count(&inst.game);
        ok &= equilibria.is_empty()
            && placements == Some(2772)
            && inst.game.topology().node_count() == 11
            && inst.game.agent_count() == 10
            && secs < 10.0;
        parts.push(format!(
            "{}: {} placements, {} equilibria",
            show(&tv),
            placements.unwrap_or(0),
            equilibria.len()
        ));
    }
    Ok((ok, format!("{}; each under 10 s", parts.join("; "))))
}

fn zts_cases() -> Result<Vec<Case>, CliError> {
    let mut cases = Vec::new();
    for m in 2..=6 {
        for cols in m..=6 {
            let topology = Arc::new(grid(m, cols)?);
            for n in (4..m * cols).step_by(2) {
                let game = GameInstance::new(2, n / 2, Arc::clone(&topology), tolerance(ToleranceKind::Zero, 2, None)?)?;
                let a = construct_2zts_grid(&game)?;
                cases.push((format!("2-zts {m}x{cols} n={n}"), game, a));
            }
        }
    }
    Ok(cases)
}

fn zts_grid_sweep() -> Outcome {
    let cases = zts_cases()?;
    let failures = cases.iter().filter(|(_, g, a)| !stable(g, a)).count();
    Ok((failures == 0, format!("{} grids and agent counts, {failures} failures", cases.len())))
}

/// The 2-binary sweep, plus how many layouts needed improving jumps and a
/// note for every λ with no valid 2-binary vector.
fn binary_cases() -> Result<(Vec<Case>, usize, Vec<String>), CliError> {
    let mut cases = Vec::new();
    let mut settled = 0;
    let mut skipped = Vec::new();
    for lambda in 2..=7 {
        let tv = match standard_tolerance(ToleranceKind::AlphaBinary, lambda, Some(2)) {
            Ok(tv) => tv,
            Err(e) => {
                skipped.push(format!("lambda={lambda} has no 2-binary game ({e})"));
                continue;
            }
        };
        for m in 2..=6 {
            for cols in m..=6 {
                let topology = Arc::new(grid(m, cols)?);
                for x in (2..).take_while(|x| lambda * x < m * cols) {
                    let game = GameInstance::new(lambda, x, Arc::clone(&topology), tv.clone())?;
                    let a = construct_binary_grid(&game)?;
                    if binary_grid_layout(&game)? != a {
                        settled += 1;
                    }
                    cases.push((format!("2-binary {m}x{cols} lambda={lambda} x={x}"), game, a));
                }
            }
        }
    }
    Ok((cases, settled, skipped))
}

fn binary_grid_sweep() -> Outcome {
    let (cases, settled, skipped) = binary_cases()?;
    let failures = cases.iter().filter(|(_, g, a)| !stable(g, a)).count();
    let mut detail = format!(
        "{} cases, {failures} failures ({settled} layouts settled by improving jumps)",
        cases.len()
    );
    for note in skipped {
        detail.push_str("; ");
        detail.push_str(&note);
    }
    Ok((failures == 0 && !cases.is_empty(), detail))
}

fn seven_type_witness() -> Outcome {
    let inst = seven_type_grid_example()?;
    let a = inst.assignment("equilibrium_v").expect("labelled");
    let binary = tolerance(ToleranceKind::AlphaBinary, 7, Some(2))?;
    let base_ok = inst.game.tolerance() == &binary && stable(&inst.game, a);
    let alt = inst.game.with_tolerance(seven_type_alt_tolerance())?;
    let (alt_stable, witness) = is_equilibrium(&alt, a);
    let (gain_ok, gain) = match witness {
        Some(w) => (
            w.old_utility == r(2, 3) && w.new_utility == r(11, 15),
            format!(
                "node {} -> node {}, {} -> {}",
                w.from_node,
                w.to_node,
                format_rational(&w.old_utility),
                format_rational(&w.new_utility)
            ),
        ),
        None => (false, "no witness".into()),
    };
    Ok((
        base_ok && !alt_stable && gain_ok,
        format!(
            "stable under {}: {}; under {}: witness {gain}",
            show(&binary),
            base_ok,
            show(alt.tolerance())
        ),
    ))
}

/// Monotone vectors that agree with `tv` on its leading ones and are at least
/// as large afterwards.
fn larger_vectors(tv: &ToleranceVector, rng: &mut ChaCha8Rng, random: usize) -> Result<Vec<ToleranceVector>, CliError> {
    let one = Rational::from_integer(1);
    let ones = tv.leading_ones();
    let mut out = Vec::new();
    for delta in [r(1, 100), r(1, 10), r(1, 3), r(1, 2), r(9, 10)] {
        let cap = r(99, 100);
        let values = tv.values().iter().map(|&t| if t == one { t } else { (t + delta).min(cap) }).collect();
        out.push(ToleranceVector::new(values)?);
    }
    for _ in 0..random {
        let mut tail: Vec<Rational> = (ones..tv.lambda()).map(|_| r(rng.gen_range(0..=11), 12)).collect();
        tail.sort_by(|a, b| b.cmp(a));
        let mut values = vec![one; ones];
        values.extend(tail);
        out.push(ToleranceVector::new(values)?);
    }
    Ok(out)
}

fn band_cases() -> Result<Vec<Case>, CliError> {
    let mut cases = Vec::new();
    for (lambda, alpha, x, rows, cols) in [(4, 2, 2, 2, 5), (9, 3, 2, 4, 5), (4, 2, 2, 5, 2), (4, 3, 2, 3, 4), (9, 3, 2, 6, 5)] {
        let tv = tolerance(ToleranceKind::AlphaBinary, lambda, Some(alpha))?;
        let game = GameInstance::new(lambda, x, Arc::new(grid(rows, cols)?), tv)?;
        let a = construct_band_grid(&game)?;
        cases.push((format!("band {rows}x{cols} lambda={lambda} n={}", lambda * x), game, a));
    }
    Ok(cases)
}

fn band_grids() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = band_cases()?;
    let mut ok = true;
    let mut rechecks = 0;
    for (_, game, a) in &cases {
        ok &= stable(game, a);
        ok &= a.occupied_nodes().all(|v| utility(game, a, v).map(|u| u.value() == r(1, 1)).unwrap_or(false));
        for tv in larger_vectors(game.tolerance(), &mut rng, 20)? {
            ok &= stable(&game.with_tolerance(tv)?, a);
            rechecks += 1;
        }
    }
    let names: Vec<&str> = cases.iter().map(|(name, ..)| name.as_str()).collect();
    Ok((ok, format!("{}; every utility 1; {rechecks} rechecks under larger vectors", names.join(", "))))
}

fn tree_cases(count: usize) -> Result<Vec<Case>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = Vec::new();
    while cases.len() < count {
        let lambda = 3 + cases.len() % 4;
        let n = rng.gen_range(8..=30);
        let max_x = (n - 1) / lambda;
        if max_x < 2 {
            continue;
        }
        let x = rng.gen_range(2..=max_x);
        let alpha = if lambda == 3 { 2 } else { lambda / 2 };
        let tv = tolerance(ToleranceKind::AlphaBinary, lambda, Some(alpha))?;
        let game = GameInstance::new(lambda, x, Arc::new(random_tree(&mut rng, n)), tv)?;
        let a = construct_tree_equilibrium(&game)?;
        cases.push((format!("tree n={n} lambda={lambda} x={x}"), game, a));
    }
    Ok(cases)
}

fn random_tree_constructions() -> Outcome {
    let cases = tree_cases(60)?;
    let failures = cases.iter().filter(|(_, g, a)| !stable(g, a)).count();
    Ok((failures == 0, format!("{} random trees with 8 to 30 nodes, lambda 3 to 6, {failures} failures", cases.len())))
}

fn meets_bound(game: &GameInstance, a: &Assignment) -> bool {
    let (tau, _) = tolerance_sums(game.tolerance());
    let n = Rational::from_integer(game.agent_count() as i128);
    let lambda = Rational::from_integer(game.lambda() as i128);
    social_welfare(game, a) >= (tau * n - lambda) / lambda
}

/// Random games with at most `limit` placements.
fn small_games(seed: u64, count: usize, limit: u128, require_equilibrium: bool) -> Result<Vec<GameInstance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut games = Vec::new();
    while games.len() < count {
        let n = rng.gen_range(4..=8);
        let lambda = rng.gen_range(2..=3);
        let max_x = (n - 1) / lambda;
        if max_x < 2 {
            continue;
        }
        let x = rng.gen_range(2..=max_x);
        let extra = rng.gen_range(0..=n);
        let topology = random_connected(&mut rng, n, extra);
        let game = GameInstance::new(lambda, x, Arc::new(topology), random_tolerance(&mut rng, lambda))?;
        if !placement_count(&game).is_some_and(|c| c <= limit) {
            continue;
        }
        if require_equilibrium && enumerate_equilibria(&game, &config())?.is_empty() {
            continue;
        }
        games.push(game);
    }
    Ok(games)
}

fn welfare_lower_bound() -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    let mut tally = |game: &GameInstance, a: &Assignment| {
        checked += 1;
        violations += usize::from(!meets_bound(game, a));
    };
    for tv in [ToleranceVector::new(vec![r(1, 1), r(1, 2)])?, tolerance(ToleranceKind::Zero, 2, None)?] {
        let inst = no_equilibrium_tree_game(2, tv)?;
        for a in enumerate_equilibria(&inst.game, &config())? {
            tally(&inst.game, &a);
        }
    }
    let (binary, _, _) = binary_cases()?;
    let seven = seven_type_grid_example()?;
    let seven_case = ("seven".to_string(), seven.game.clone(), seven.assignment("equilibrium_v").expect("labelled").clone());
    for (_, game, a) in zts_cases()?.iter().chain(&binary).chain([&seven_case]).chain(&band_cases()?).chain(&tree_cases(60)?) {
        tally(game, a);
    }
    for game in small_games(7, 20, 3000, true)? {
        for a in enumerate_equilibria(&game, &config())? {
            tally(&game, &a);
        }
    }
    Ok((violations == 0, format!("{checked} equilibria checked, {violations} below (tau*n - lambda)/lambda")))
}

fn anarchy_instance() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let kinds = [ToleranceKind::Zero, ToleranceKind::Proportional, ToleranceKind::InverseProportional];
    for kind in kinds {
        let tv = tolerance(kind, 3, None)?;
        let inst = poa_lb_game(3, 1, tv.clone())?;
        let game = &inst.game;
        let n = game.agent_count();
        let eq = inst.assignment("equilibrium_v").expect("labelled");
        let optimal = inst.assignment("optimal").expect("labelled");
        let sw = social_welfare(game, eq);
        let opt = social_welfare(game, optimal);
        let ratio = opt / sw;
        ok &= n == 21 && stable(game, eq) && opt == Rational::from_integer(n as i128);
        ok &= sw == poa_lb_equilibrium_welfare(3, n, &tv);
        let params = BoundParams { lambda: 3, n, tolerance: Some(tv.clone()) };
        if kind == ToleranceKind::Zero {
            ok &= sw == r(6, 1);
            ok &= ratio == evaluate_bound(BoundKind::ZtsPoa, &params)?;
        }
        ok &= ratio == evaluate_bound(BoundKind::PoaLower, &params)?;
        parts.push(format!(
            "{}: SW(eq) {}, OPT {}, ratio {}",
            show(&tv),
            format_rational(&sw),
            format_rational(&opt),
            format_rational(&ratio)
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn stability_instance() -> Outcome {
    let b = 2;
    let sizes = PosSizes::new(b)?;
    let (bq, zq) = (Rational::from_integer(b as i128), Rational::from_integer(sizes.z as i128));
    let one = Rational::from_integer(1);
    let mut ok = true;
    let mut parts = Vec::new();
    for t1 in [r(1, 2), r(0, 1)] {
        let inst = pos_game(b, t1)?;
        let game = &inst.game;
        let eq = inst.assignment("equilibrium_v").expect("labelled");
        let star = inst.assignment("v_star").expect("labelled");
        ok &= stable(game, eq);
        let y_blue = (one + t1 * bq) / (bq + one);
        if t1 == r(0, 1) {
            ok &= y_blue == one / (bq + one);
        }
        for &v in inst.group("Y").iter().filter(|&&v| eq.is_occupied(v)) {
            ok &= utility(game, eq, v)?.value() == y_blue;
        }
        let x_floor = zq / (zq + Rational::from_integer(2));
        for &v in inst.group("X") {
            ok &= utility(game, eq, v)?.value() >= x_floor;
        }
        let sw_eq = social_welfare(game, eq);
        let sw_star = social_welfare(game, star);
        ok &= sw_eq == pos_equilibrium_welfare(sizes, t1);
        ok &= sw_star == pos_v_star_welfare(sizes, t1);
        if t1 == r(0, 1) {
            ok &= sw_star == pos_v_star_welfare_stated(sizes, t1);
        }
        parts.push(format!(
            "t1={}: Y-blue utility {}, X-red floor {}, SW(eq) {}, SW(v*) {}, SW(v*)/SW(eq) {}",
            format_rational(&t1),
            format_rational(&y_blue),
            format_rational(&x_floor),
            format_rational(&sw_eq),
            format_rational(&sw_star),
            format_rational(&(sw_star / sw_eq))
        ));
    }
    parts.push("uniqueness not checked".into());
    Ok((ok, parts.join("; ")))
}

fn tolerant_inclusion() -> Outcome {
    let zero_tv = tolerance(ToleranceKind::Zero, 2, None)?;
    let mut graphs = 0;
    let mut violations = 0;
    let mut tolerant_eqs = 0;
    for nodes in 5..=7 {
        for topology in connected_graphs(nodes) {
            graphs += 1;
            let zero = GameInstance::new(2, 2, Arc::new(topology), zero_tv.clone())?;
            let zero_eq = enumerate_equilibria(&zero, &config())?;
            for t1 in [r(1, 4), r(1, 2), r(3, 4)] {
                let tolerant = zero.with_tolerance(ToleranceVector::new(vec![r(1, 1), t1])?)?;
                let tolerant_eq = enumerate_equilibria(&tolerant, &config())?;
                tolerant_eqs += tolerant_eq.len();
                violations += tolerant_eq.iter().filter(|a| zero_eq.binary_search(a).is_err()).count();
                violations += zero_eq
                    .iter()
                    .filter(|a| !has_isolated_agent(&zero, a) && tolerant_eq.binary_search(a).is_err())
                    .count();
            }
        }
    }
    Ok((
        violations == 0,
        format!("{graphs} connected graphs on 5 to 7 nodes (smaller graphs leave no empty node), {tolerant_eqs} tolerant equilibria, {violations} violations"),
    ))
}

fn has_isolated_agent(game: &GameInstance, a: &Assignment) -> bool {
    a.occupied_nodes().any(|v| game.topology().neighbors(v).iter().all(|&w| !a.is_occupied(w)))
}

fn oracle_games() -> Result<Vec<GameInstance>, CliError> {
    small_games(11, 30, 5000, false)
}

fn render(placements: &[Vec<u8>]) -> String {
    placements
        .iter()
        .map(|slots| slots.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn brute_force_agreement() -> Outcome {
    let games = oracle_games()?;
    let mut mismatches = 0;
    let mut equilibria = 0;
    for game in &games {
        let fast: Vec<Vec<u8>> = enumerate_equilibria(game, &config())?.iter().map(|a| a.slots().to_vec()).collect();
        let slow = reference::equilibria(game);
        equilibria += slow.len();
        let (_, opt) = optimal_welfare(game, &config())?;
        mismatches += usize::from(render(&fast) != render(&slow) || opt != reference::optimum(game));
    }
    Ok((
        mismatches == 0,
        format!("{} random games, {equilibria} equilibria in total, {mismatches} disagreements", games.len()),
    ))
}

fn worker_determinism() -> Outcome {
    let games = oracle_games()?;
    let mut differing = 0;
    for game in &games {
        let one = enumeration_report(game, &EnumerationConfig { workers: 1, ..config() }, true)?;
        let eight = enumeration_report(game, &EnumerationConfig { workers: 8, ..config() }, true)?;
        differing += usize::from(one != eight);
    }
    Ok((differing == 0, format!("{} games, {differing} differing outputs between 1 and 8 workers", games.len())))
}
