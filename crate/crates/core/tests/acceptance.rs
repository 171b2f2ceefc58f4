//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p blotto-core --test acceptance`.
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated and printed as
//! FAIL; the run asserts that they keep failing, so a change in behaviour
//! shows up instead of being hidden.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use blotto_core::*;
use common::{q, Game};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const FOC_TOLERANCE: f64 = 1e-9;
const FD_TOLERANCE: f64 = 1e-6;
const DYNAMICS_STEPS: usize = 20;
const RANDOM_SEED: u64 = 0x5eed_b10770;

/// Criteria that exhaustive search shows cannot hold, with the reason.
const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[(
    "1b",
    "median on 2 items with counts (3,1) has no stable arrangement; every arrangement has an improving move",
)];

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: &'static str, limit: Option<Duration>, body: impl FnOnce() -> (bool, String)) -> Verdict {
    let start = Instant::now();
    let (ok, mut detail) = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    if !in_time {
        detail.push_str(&format!("; over time limit {limit:?}"));
    }
    Verdict { id, pass: ok && in_time, detail, elapsed }
}

fn int(v: i64) -> Number {
    Number::integer(v)
}

fn unstable_cells(m: usize, outcome: Outcome, max_total: u32) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for total in m as u32..=max_total {
        for n_b in 0..=total / 2 {
            let n_a = total - n_b;
            let inst = reference_instance(outcome, n_a, n_b, m).unwrap();
            if find_stable(&inst, SearchMode::First).unwrap().is_empty() {
                out.insert((n_a, n_b));
            }
        }
    }
    out
}

fn criterion_1a() -> (bool, String) {
    let found = unstable_cells(3, Outcome::Median, 10);
    let expected: BTreeSet<_> = [(4, 1), (5, 1)].into_iter().collect();
    (found == expected, format!("m=3 cells without a stable arrangement: {found:?}"))
}

fn criterion_1b() -> (bool, String) {
    let found = unstable_cells(2, Outcome::Median, 8);
    (found.is_empty(), format!("m=2 cells without a stable arrangement: {found:?}"))
}

fn two_item_mean_map() -> RegionMap {
    scan_region(&ScanConfig::new(2, Outcome::Mean, 11)).unwrap()
}

fn criterion_2() -> (bool, String) {
    let map = two_item_mean_map();
    let mut mismatches = Vec::new();
    for cell in &map.cells {
        let oracle = Game::two(false, 2, cell.n_a, cell.n_b, q(11, 10)).stable_set().len() as u64;
        match &cell.status {
            CellStatus::Computed { stable_exists, num_stable_canonical, .. } => {
                if *stable_exists != (oracle > 0) || *num_stable_canonical != oracle {
                    mismatches.push((cell.n_a, cell.n_b));
                }
            }
            CellStatus::Skipped { .. } => mismatches.push((cell.n_a, cell.n_b)),
        }
    }
    let family_unstable = (1..=9)
        .step_by(2)
        .all(|b| map.cell(b + 2, b).and_then(Cell::stable_exists) == Some(false));
    let unstable: Vec<_> =
        map.cells.iter().filter(|c| c.stable_exists() == Some(false)).map(|c| (c.n_a, c.n_b)).collect();
    (
        family_unstable && mismatches.is_empty(),
        format!("{} cells, unstable {unstable:?}, oracle mismatches {mismatches:?}", map.cells.len()),
    )
}

fn criterion_3() -> (bool, String) {
    let (mut checked, mut violations, mut single_class) = (0, Vec::new(), 0);
    for n_a in 1..=11u32 {
        for n_b in 0..=n_a {
            let inst = reference_instance(Outcome::Mean, n_a, n_b, 2).unwrap();
            for arr in find_stable(&inst, SearchMode::All).unwrap() {
                if n_b == 0 {
                    single_class += 1;
                    continue;
                }
                checked += 1;
                if !check_close_to_proportional(&inst, &arr).unwrap() {
                    violations.push(format!("({n_a},{n_b}) {}", format_arrangement(&arr)));
                }
            }
        }
    }
    (
        violations.is_empty(),
        format!("{checked} two-class stable arrangements, violations {violations:?} ({single_class} single-class ones not applicable)"),
    )
}

fn criterion_4() -> (bool, String) {
    let (mut checked, mut failures) = (0, Vec::new());
    for m in 2..=4usize {
        for n_a in 0..=12u32 {
            for n_b in 0..=(12 - n_a) {
                let total = (n_a + n_b) as usize;
                let inst = match reference_instance(Outcome::Median, n_a, n_b, m) {
                    Ok(i) => i,
                    Err(_) => continue,
                };
                let many = total > 2 * m || (total == 2 * m && n_a % 2 == 0 && n_b % 2 == 0);
                let ties =
                    total >= m && total <= 2 * m && !in_median_critical_region(n_a, n_b, m, RegionVariant::Inclusive);
                for (applies, built) in [
                    (many, many.then(|| construct_many_agents(n_a, n_b, m))),
                    (ties, ties.then(|| construct_tie_based(n_a, n_b, m))),
                ] {
                    if !applies {
                        continue;
                    }
                    checked += 1;
                    match built.unwrap() {
                        Ok(arr) if is_stable(&inst, &arr).unwrap().stable => {}
                        _ => failures.push((m, n_a, n_b)),
                    }
                }
            }
        }
    }
    (failures.is_empty(), format!("{checked} constructions, failures {failures:?}"))
}

fn criterion_5() -> (bool, String) {
    let (mut cells, mut problems) = (0, Vec::new());
    for m in 2..=3usize {
        for total in m as u32..=8 {
            for n_b in 0..=total / 2 {
                let n_a = total - n_b;
                for outcome in [Outcome::Median, Outcome::Mean] {
                    cells += 1;
                    let base = Instance::two_class(outcome, m, (n_a, int(1)), (n_b, int(-1)), Number::ratio(11, 10)).unwrap();
                    let shifted = Instance::two_class(outcome, m, (n_a, int(5)), (n_b, int(-3)), Number::ratio(41, 10)).unwrap();
                    let x = find_stable(&base, SearchMode::All).unwrap();
                    let y = find_stable(&shifted, SearchMode::All).unwrap();
                    if x != y {
                        problems.push(format!("{outcome} m={m} ({n_a},{n_b}) sets differ"));
                    }
                    if x.iter().any(|a| a.empty_items() > 0) {
                        problems.push(format!("{outcome} m={m} ({n_a},{n_b}) empty item"));
                    }
                }
            }
        }
    }
    (problems.is_empty(), format!("{cells} cells, problems {problems:?}"))
}

fn criterion_6() -> (bool, String) {
    let instances = [
        ("median(3,4)", scenario_no_ne_median(3, 4)),
        ("median(4,5)", scenario_no_ne_median(4, 5)),
        ("mean(4,5)", scenario_no_ne_mean(4, 5, None)),
        ("mean(5,6)", scenario_no_ne_mean(5, 6, None)),
    ];
    let mut found = Vec::new();
    for (name, inst) in instances {
        let n = find_stable(&inst.unwrap(), SearchMode::All).unwrap().len();
        found.push(format!("{name}: {n}"));
    }
    (found.iter().all(|s| s.ends_with(": 0")), format!("stable counts {found:?}"))
}

fn criterion_7() -> (bool, String) {
    let gap = int(3);
    let mut lines = Vec::new();
    let mut ok = true;
    for cu in [Number::ratio(2, 5), int(1), int(2)] {
        let regime = three_agent_regime(&gap, &cu).unwrap();
        let inst = three_agent_instance(&gap, &cu, 4).unwrap();
        let named = is_stable(&inst, &regime.arrangement(&inst).unwrap()).unwrap().stable;
        let exists = !find_stable(&inst, SearchMode::First).unwrap().is_empty();
        ok &= named && exists;
        lines.push(format!("c_u={cu}: {regime:?} stable={named} exists={exists}"));
    }
    let expected = [ThreeAgentRegime::AllTogether, ThreeAgentRegime::PairPlusOne, ThreeAgentRegime::AllSeparate];
    let regimes: Vec<_> =
        [Number::ratio(2, 5), int(1), int(2)].iter().map(|cu| three_agent_regime(&gap, cu).unwrap()).collect();
    (ok && regimes == expected, lines.join("; "))
}

fn criterion_8() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(RANDOM_SEED);
    let mut failures = Vec::new();
    for trial in 0..200 {
        let m = rng.gen_range(2..=6usize);
        let b1: f64 = rng.gen_range(-5.0..=5.0);
        let b2: f64 = rng.gen_range(-5.0..=5.0);
        let cu: f64 = rng.gen_range(0.0..=3.0);
        let weights: Vec<Number> = (0..m).map(|_| Number::float(rng.gen_range(0.1..=3.0))).collect();
        let outcome = if rng.gen_bool(0.5) { Outcome::Median } else { Outcome::Mean };
        let classes = vec![AgentClass::new(b1, 1), AgentClass::new(b2, 1)];
        let inst = Instance::new(m, Some(weights), classes, Number::float(cu), outcome).unwrap();
        if find_stable(&inst, SearchMode::First).unwrap().is_empty() {
            failures.push(trial);
        }
    }
    (failures.is_empty(), format!("200 trials, failures {failures:?}"))
}

fn criterion_9() -> (bool, String) {
    let mut worst = Vec::new();
    let mut ok = true;
    for m in 2..=3usize {
        let n_max = if m == 2 { 11 } else { 8 };
        let mut max_effort = int(0);
        for n_a in 1..=n_max {
            for n_b in 1..=n_a {
                if ((n_a + n_b) as usize) < m {
                    continue;
                }
                let inst = reference_instance(Outcome::Mean, n_a, n_b, m).unwrap();
                for arr in find_stable(&inst, SearchMode::All).unwrap() {
                    let e = misallocated_effort(&inst, &arr).unwrap().misallocated_effort;
                    max_effort = max_effort.max(e);
                }
            }
        }
        ok &= max_effort <= int(2 * m as i64);
        worst.push(format!("m={m} max mean effort {max_effort} (bound {})", 2 * m));
    }
    for (n_a, n_b, m) in [(6u32, 4u32, 3usize), (8, 6, 4)] {
        let inst = reference_instance(Outcome::Median, n_a, n_b, m).unwrap();
        match construct_high_misallocation(n_a, n_b, m) {
            Ok(arr) => {
                let stable = is_stable(&inst, &arr).unwrap().stable;
                let e = misallocated_effort(&inst, &arr).unwrap().misallocated_effort;
                let bound = Number::ratio(i64::from(n_a + n_b), 4);
                ok &= stable && e >= bound;
                worst.push(format!("({n_a},{n_b},{m}) stable={stable} effort {e} >= {bound}"));
            }
            Err(e) => {
                ok = false;
                worst.push(format!("({n_a},{n_b},{m}) {e}"));
            }
        }
    }
    (ok, worst.join("; "))
}

fn criterion_10() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(RANDOM_SEED ^ 10);
    let (mut spread, mut fd) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let m = rng.gen_range(1..=6usize);
        let n_a = rng.gen_range(1..=30u32);
        let n_b = rng.gen_range(1..=30u32);
        let weights: Vec<Number> = if trial % 2 == 0 {
            (0..m).map(|_| Number::float(rng.gen_range(0.05..=5.0))).collect()
        } else {
            vec![int(1); m]
        };
        let inst = Instance::two_class(Outcome::Mean, m, (n_a, int(1)), (n_b, int(-1)), int(1))
            .unwrap()
            .with_weights(weights)
            .unwrap();
        let inst = inst.with_unlabeled_cost(auto_unlabeled_cost(&inst)).unwrap();
        let report = fractional_foc_report(&inst, &fractional_equilibrium(&inst).unwrap()).unwrap();
        spread = spread.max(report.analytic_spread);
        fd = fd.max(report.fd_disagreement);
    }
    (
        spread < FOC_TOLERANCE && fd < FD_TOLERANCE,
        format!("max residual {spread:e} (< {FOC_TOLERANCE:e}), max FD disagreement {fd:e} (< {FD_TOLERANCE:e})"),
    )
}

fn criterion_11() -> (bool, String) {
    let mut notes = Vec::new();
    let mut failures_a = Vec::new();
    for n_a in 2..=8u32 {
        for n_b in 2..=n_a {
            match stabilizing_weights(n_a, n_b) {
                Ok(s) if is_stable(&s.instance, &s.arrangement).unwrap().stable => {}
                _ => failures_a.push((n_a, n_b)),
            }
        }
    }
    notes.push(format!("(a) failures {failures_a:?}"));

    let weighted = scenario_weighted_median_no_ne().unwrap();
    let b_count = find_stable(&weighted, SearchMode::All).unwrap().len();
    notes.push(format!("(b) stable arrangements {b_count}"));

    let mut violations = Vec::new();
    let mut checked = 0;
    for total in 2..=12u32 {
        for n_b in 1..=total / 2 {
            let n_a = total - n_b;
            let draft = reference_instance(Outcome::Mean, n_a, n_b, 2)
                .unwrap()
                .with_weights(vec![Number::ratio(3, 5), Number::ratio(2, 5)])
                .unwrap();
            let inst = draft.with_unlabeled_cost(auto_unlabeled_cost(&draft)).unwrap();
            for arr in find_stable(&inst, SearchMode::All).unwrap() {
                checked += 1;
                if !check_close_to_proportional(&inst, &arr).unwrap() {
                    violations.push(format!("({n_a},{n_b}) {}", format_arrangement(&arr)));
                }
            }
        }
    }
    notes.push(format!("(c) {checked} stable arrangements, violations {violations:?}"));
    (failures_a.is_empty() && b_count == 0 && violations.is_empty(), notes.join("; "))
}

fn criterion_12() -> (bool, String) {
    let classes = vec![AgentClass::new(1, 1), AgentClass::new(Number::ratio(-1, 2), 2)];
    let inst = Instance::new(3, None, classes, Number::ratio(3, 10), Outcome::Median).unwrap();
    let high = inst.class_with_bias(&int(1)).unwrap();
    let mut rows = vec![vec![0u32; 2]; 3];
    rows[0][high] = 1;
    rows[1][1 - high] = 1;
    rows[2][1 - high] = 1;
    let start = Arrangement::from_rows(&rows).unwrap();
    let t = best_response_dynamics(&inst, &start, Policy::FirstImproving, DYNAMICS_STEPS).unwrap();
    let cycled = matches!(t.terminal, Terminal::CycleDetected(_)) && t.moves.len() <= DYNAMICS_STEPS;
    (cycled, format!("{:?} after {} moves", t.terminal, t.moves.len()))
}

#[test]
fn acceptance() {
    let minute = Duration::from_secs(60);
    let verdicts = vec![
        run("1a", Some(minute), criterion_1a),
        run("1b", Some(minute), criterion_1b),
        run("2", Some(2 * minute), criterion_2),
        run("3", None, criterion_3),
        run("4", Some(minute), criterion_4),
        run("5", None, criterion_5),
        run("6", Some(minute), criterion_6),
        run("7", None, criterion_7),
        run("8", None, criterion_8),
        run("9", None, criterion_9),
        run("10", None, criterion_10),
        run("11", Some(3 * minute), criterion_11),
        run("12", None, criterion_12),
    ];
    let mut unexpected = Vec::new();
    for v in &verdicts {
        let known = KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == v.id);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = match known {
            Some((_, why)) if !v.pass => format!(" [known unattainable: {why}]"),
            _ => String::new(),
        };
        // written to the process stdout so the lines survive test output capture
        let line = format!("{tag} criterion {:<3} ({:>7.2?}) {}{note}\n", v.id, v.elapsed, v.detail);
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if v.pass == known.is_some() {
            unexpected.push(v.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected verdicts: {unexpected:?}");
}
