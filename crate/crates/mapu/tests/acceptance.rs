//! Acceptance gate: the nine product-level checks this library must hold.
//! Each test covers one check and ends with a single `[PASS]` line, so a
//! `--nocapture` run reads as a checklist. Every comparison is exact — no
//! tolerances anywhere.

use std::time::{Duration, Instant};

use mapu::generator::{
    random_instance, random_scheduling_instance, random_square_integer_instance,
};
use mapu::instance::{Customer, Instance, Supplier};
use mapu::oracle;
use mapu::scheduling::{brute_force_schedule, solve_schedule, SchedulingInstance};
use mapu::variants::{builtin_fixtures, verify_fixture, Fixture};
use mapu::{cost, solve, solve_with_trace, Rational, UpgradeSet};

fn r(s: &str) -> Rational {
    s.parse().expect("valid rational literal")
}

fn builtin(name: &str) -> Fixture {
    builtin_fixtures().into_iter().find(|f| f.name == name).expect("known fixture name")
}

fn pass(line: String) {
    println!("[PASS] {line}");
}

/// The bundled instance on which greedy provably overpays.
fn greedy_gap_instance(k: usize) -> Instance {
    let suppliers = vec![
        Supplier { id: "s1".into(), base_cost: r("5"), upgraded_cost: r("1") },
        Supplier { id: "s2".into(), base_cost: r("3"), upgraded_cost: r("0") },
        Supplier { id: "s3".into(), base_cost: r("10"), upgraded_cost: r("3") },
    ];
    let customers = vec![
        Customer { id: "c1".into(), demand: r("1") },
        Customer { id: "c2".into(), demand: r("2") },
        Customer { id: "c3".into(), demand: r("3") },
    ];
    Instance::new(suppliers, customers, k).expect("valid instance")
}

#[test]
fn a1_bundled_optima_are_exact_and_fast() {
    for (name, expected) in [("two-suppliers", "3"), ("three-suppliers", "6")] {
        let instance = builtin(name).instance;
        let started = Instant::now();
        let solution = solve(&instance).expect("solver succeeds");
        let elapsed = started.elapsed();
        assert_eq!(solution.value, r(expected), "{name}");
        assert!(elapsed < Duration::from_millis(10), "{name} took {elapsed:?}");
    }
    pass("bundled instances solve to exactly 3 and 6, each in under 10 ms".into());
}

#[test]
fn a2_solver_agrees_with_brute_force_on_500_seeded_instances() {
    let started = Instant::now();
    let mut runs = 0usize;
    for seed in 0..500u64 {
        let base = random_instance(seed, 7);
        for k in 0..base.n_suppliers() {
            let instance = base.with_budget(k).expect("budget within range");
            let fast = solve(&instance).expect("solver succeeds");
            let slow = oracle::brute_force(&instance).expect("oracle succeeds");
            assert_eq!(fast.value, slow.value, "seed {seed}, budget {k}");
            runs += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(format!(
        "solver value == brute-force value on all {runs} budget variations \
         of 500 seeded instances in {elapsed:?}"
    ));
}

#[test]
fn a3_greedy_overpays_where_the_exact_solver_does_not() {
    let instance = greedy_gap_instance(2);
    let greedy = oracle::greedy(&instance).expect("greedy succeeds");
    let exact = oracle::brute_force(&instance).expect("oracle succeeds");
    let solved = solve(&instance).expect("solver succeeds");
    assert_eq!(greedy.value, r("12"));
    assert_eq!(exact.value, r("11"));
    assert_eq!(solved.value, r("11"));
    assert!(greedy.value > solved.value, "the gap must be strict");

    // The first greedy pick goes to s1 because its single-upgrade cost wins.
    let at_one = greedy_gap_instance(1);
    let first_pick = oracle::greedy(&at_one).expect("greedy succeeds");
    assert_eq!(first_pick.upgrades, UpgradeSet::from_ids(["s1"]));
    let single = |id: &str| cost(&at_one, &UpgradeSet::from_ids([id])).expect("cost");
    assert_eq!(single("s1"), r("19"));
    assert_eq!(single("s2"), r("20"));
    assert_eq!(single("s3"), r("20"));
    pass("greedy pays 12 where the optimum is 11, after picking s1 first (19 < 20 = 20)".into());
}

#[test]
fn a4_relaxation_counterexamples_reproduce_exactly() {
    // Group budgets: four forced-upgrade rows and a strict fractional gap.
    let partition = builtin("partition");
    assert_eq!(partition.expected_integral, r("23"));
    assert_eq!(partition.expected_fractional, r("114/5"));
    assert!(partition.expected_fractional < partition.expected_integral);
    let checks = verify_fixture(&partition).expect("checklist runs");
    assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    let mut forced: Vec<Rational> = checks
        .iter()
        .filter(|c| c.label.starts_with("cost with upgrades"))
        .map(|c| c.expected.clone())
        .collect();
    forced.sort();
    assert_eq!(forced, vec![r("23"), r("23"), r("118/5"), r("123/5")]);

    // Demand upgrades: six forced rows, two budget anchors, a strict gap.
    let dual = builtin("dual");
    assert_eq!(dual.expected_integral, r("113"));
    assert_eq!(dual.expected_fractional, r("112"));
    assert!(dual.expected_fractional < dual.expected_integral);
    let checks = verify_fixture(&dual).expect("checklist runs");
    assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    let forced = checks
        .iter()
        .filter(|c| c.label.starts_with("cost with supplier upgrades"))
        .count();
    assert_eq!(forced, 6, "all six forced rows are present");
    let anchor = |label: &str| {
        checks.iter().find(|c| c.label == label).expect("anchor row").expected.clone()
    };
    assert_eq!(anchor("optimum with budget 1"), r("146"));
    assert_eq!(anchor("optimum with budget 3"), r("78"));

    // Missing edges: integral 5 against fractional 9/2.
    let noncomplete = builtin("noncomplete");
    assert_eq!(noncomplete.expected_integral, r("5"));
    assert_eq!(noncomplete.expected_fractional, r("9/2"));
    assert!(noncomplete.expected_fractional < noncomplete.expected_integral);
    let checks = verify_fixture(&noncomplete).expect("checklist runs");
    assert!(checks.iter().all(|c| c.pass), "{checks:#?}");

    pass(
        "group-budget rows (24.6, 23.6, 23, 23; gap 22.8 < 23), all six demand-upgrade \
         rows (gap 112 < 113, anchors 146 and 78), and the missing-edge gap (9/2 < 5) \
         reproduce exactly"
            .into(),
    );
}

#[test]
fn a5_solve_traces_keep_every_structural_invariant() {
    let mut narrowing_steps = 0usize;
    let mut rounding_steps = 0usize;
    for seed in 0..500u64 {
        let instance = random_instance(seed, 7);
        let (_, trace) = solve_with_trace(&instance).expect("solver succeeds");
        trace.audit().expect("trace audit holds");

        let mut previous_gap: Option<usize> = None;
        let mut previous_f: Option<Rational> = None;
        for step in &trace.narrowing {
            assert!(!step.penalty.is_negative(), "seed {seed}: penalty {}", step.penalty);
            let gap = step.size_b - step.size_a;
            if let Some(prev) = previous_gap {
                assert!(gap < prev, "seed {seed}: pair gap {gap} did not shrink from {prev}");
            }
            previous_gap = Some(gap);
            if let Some(prev) = &previous_f {
                assert!(step.f <= *prev, "seed {seed}: f rose from {prev} to {}", step.f);
            }
            previous_f = Some(step.f.clone());
            narrowing_steps += 1;
        }
        for step in &trace.rounding {
            assert!(step.clean, "seed {seed}: rounding touched a pair that is not clean");
            assert!(step.size_a < step.size_a_prime, "seed {seed}");
            assert!(step.size_a_prime <= step.size_b_prime, "seed {seed}");
            assert!(step.size_b_prime < step.size_b, "seed {seed}");
            let before = &step.cost_a + &step.cost_b;
            let after = &step.cost_a_prime + &step.cost_b_prime;
            assert!(
                after <= before,
                "seed {seed}: redistribution raised total cost {before} -> {after}"
            );
            rounding_steps += 1;
        }
    }
    pass(format!(
        "zero invariant violations across 500 traces \
         ({narrowing_steps} narrowing steps, {rounding_steps} redistributions)"
    ));
}

#[test]
fn a6_budget_profiles_are_non_increasing_and_convex() {
    for seed in 0..500u64 {
        let instance = random_instance(seed, 7);
        let profile = oracle::h_profile(&instance).expect("profile succeeds");
        assert!(profile.is_non_increasing(), "seed {seed}: {:?}", profile.values);
        assert!(profile.is_convex(), "seed {seed}: {:?}", profile.values);
    }
    pass("all 500 budget profiles are non-increasing and convex".into());
}

#[test]
fn a7_the_cost_function_is_supermodular() {
    let mut instances: Vec<Instance> =
        builtin_fixtures().into_iter().map(|f| f.instance).collect();
    instances.push(greedy_gap_instance(2));
    for seed in 0..500u64 {
        instances.push(random_instance(seed, 6));
    }
    let mut triples = 0usize;
    for (i, instance) in instances.iter().enumerate() {
        let report = oracle::check_supermodular(instance, 0, 0);
        assert!(report.exhaustive, "instance {i} small enough to enumerate fully");
        assert!(report.holds, "instance {i}: {:?}", report.violation);
        triples += report.triples_checked;
    }
    pass(format!(
        "cost(A) + cost(A ∪ {{s,t}}) >= cost(A ∪ {{s}}) + cost(A ∪ {{t}}) held for \
         all {triples} triples across {} instances",
        instances.len()
    ));
}

#[test]
fn a8_schedules_match_their_oracle_and_spt_holds() {
    let started = Instant::now();
    let mut runs = 0usize;
    for seed in 0..200u64 {
        let base = random_scheduling_instance(seed);
        for k in 0..=base.n_jobs() {
            let instance =
                SchedulingInstance::new(base.speeds().to_vec(), base.jobs().to_vec(), k)
                    .expect("budget within range");
            let schedule = solve_schedule(&instance).expect("scheduler succeeds");
            let oracle_total = brute_force_schedule(&instance).expect("oracle succeeds");
            assert_eq!(schedule.total_completion, oracle_total, "seed {seed}, budget {k}");
            runs += 1;
        }
    }

    // One machine, no upgrades, times 1, 2, 3: shortest-first sums to 10.
    let spt = SchedulingInstance::new(
        vec![r("1")],
        vec![(r("1"), r("1")), (r("2"), r("2")), (r("3"), r("3"))],
        0,
    )
    .expect("valid instance");
    let schedule = solve_schedule(&spt).expect("scheduler succeeds");
    assert_eq!(schedule.total_completion, r("10"));

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(format!(
        "scheduler == oracle on all {runs} budget variations of 200 seeded instances \
         in {elapsed:?}, and the shortest-first sanity case totals 10"
    ));
}

#[test]
fn a9_large_square_instances_solve_well_within_budget() {
    for seed in [11u64, 22, 33] {
        let instance = random_square_integer_instance(seed, 300);
        let started = Instant::now();
        let solution = solve(&instance).expect("solver succeeds");
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(30), "seed {seed} took {elapsed:?}");
        assert!(!solution.value.is_negative());
    }
    pass("three 300x300 instances each solved in under 30 s".into());
}
