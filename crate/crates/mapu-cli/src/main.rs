//! `mapu` — command-line front end for the upgrade-assignment solver.
//!
//! Subcommands: `solve`, `oracle`, `hprofile`, `greedy`, `schedule`,
//! `verify-fixtures`, `sweep`. Every run prints a report (text by default,
//! `--format json` for machines) carrying the command echo, an FNV-1a digest
//! of the input, the payload, and the wall-clock duration. All values are
//! exact rationals, with 6-place decimal approximations alongside.
//!
//! Exit codes: 0 success, 1 input error, 2 verification mismatch or broken
//! internal invariant, 3 resource cap exceeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use mapu::instance::Solution;
use mapu::scheduling::{self, Schedule};
use mapu::solver::{NarrowingAction, RoundingChoice, SolveTrace};
use mapu::variants::{builtin_fixtures, verify_fixture, Fixture, FixtureCheck};
use mapu::{json as mjson, oracle, Error, Rational};

/// Default brute-force cap: `2^12` upgrade sets per instance is instant;
/// anything much beyond stops being a sanity check.
const DEFAULT_CAP: usize = 12;

#[derive(Parser)]
#[command(
    name = "mapu",
    version,
    about = "Exact solver for the assignment problem with supplier upgrades",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Include the full solve trace in the report (solve only).
    #[arg(long, global = true)]
    trace: bool,
    /// Cross-check the result against brute force when within the cap.
    #[arg(long, global = true)]
    verify: bool,
    /// Supplier cap for brute-force enumeration (default 12).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Base seed for generated instances (sweep).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file exactly.
    Solve { path: PathBuf },
    /// Brute-force optimum of a small instance file.
    Oracle { path: PathBuf },
    /// Exact optimum for every budget 0..=n, with shape verdicts.
    Hprofile { path: PathBuf },
    /// Greedy baseline compared against the exact optimum.
    Greedy { path: PathBuf },
    /// Solve a scheduling instance file.
    Schedule { path: PathBuf },
    /// Run the built-in fixture checklists, optionally against fixture
    /// files in DIR instead of the bundled definitions.
    VerifyFixtures { dir: Option<PathBuf> },
    /// Solve seeded random instances and compare each against brute force.
    Sweep {
        /// How many instances to generate.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Largest supplier count per generated instance.
        #[arg(long, default_value_t = 7)]
        max_suppliers: usize,
    },
}

/// Everything a subcommand produces besides timing.
struct Output {
    payload: Value,
    text: Vec<String>,
    trace: Option<SolveTrace>,
    /// Computation succeeded but a cross-check failed → exit 2.
    mismatch: bool,
    digest: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let echo = command_echo(&cli);
    match run(&cli) {
        Ok(output) => {
            let mismatch = output.mismatch;
            emit(&cli, &echo, output, started);
            if mismatch {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Invariant(_) => 2,
        _ => 1,
    }
}

fn command_echo(cli: &Cli) -> String {
    match &cli.command {
        Command::Solve { path } => format!("solve {}", path.display()),
        Command::Oracle { path } => format!("oracle {}", path.display()),
        Command::Hprofile { path } => format!("hprofile {}", path.display()),
        Command::Greedy { path } => format!("greedy {}", path.display()),
        Command::Schedule { path } => format!("schedule {}", path.display()),
        Command::VerifyFixtures { dir: Some(dir) } => {
            format!("verify-fixtures {}", dir.display())
        }
        Command::VerifyFixtures { dir: None } => "verify-fixtures".to_string(),
        Command::Sweep { count, max_suppliers } => {
            format!("sweep --count {count} --max-suppliers {max_suppliers} --seed {}", cli.seed)
        }
    }
}

fn emit(cli: &Cli, echo: &str, output: Output, started: Instant) {
    let duration_ms = started.elapsed().as_secs_f64() * 1e3;
    match cli.format {
        Format::Json => {
            let mut report = Map::new();
            report.insert("command".into(), json!(echo));
            report.insert("input_digest".into(), json!(format!("{:016x}", output.digest)));
            report.insert("payload".into(), output.payload);
            if let Some(trace) = &output.trace {
                report.insert(
                    "trace".into(),
                    serde_json::to_value(trace).expect("trace serializes"),
                );
            }
            report.insert("duration_ms".into(), json!(duration_ms));
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(report)).expect("report serializes")
            );
        }
        Format::Text => {
            println!("command: {echo}");
            println!("input digest: {:016x}", output.digest);
            for line in &output.text {
                println!("{line}");
            }
            if let Some(trace) = &output.trace {
                for line in trace_lines(trace) {
                    println!("{line}");
                }
            }
            println!("duration: {duration_ms:.1} ms");
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let cap = effective_cap(cli);
    match &cli.command {
        Command::Solve { path } => cmd_solve(cli, path, cap),
        Command::Oracle { path } => cmd_oracle(path, cap),
        Command::Hprofile { path } => cmd_hprofile(path, cap),
        Command::Greedy { path } => cmd_greedy(path, cap),
        Command::Schedule { path } => cmd_schedule(cli, path),
        Command::VerifyFixtures { dir } => cmd_verify_fixtures(dir.as_deref()),
        Command::Sweep { count, max_suppliers } => {
            cmd_sweep(cli.seed, *count, *max_suppliers, cap)
        }
    }
}

fn effective_cap(cli: &Cli) -> usize {
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    if cap > DEFAULT_CAP {
        eprintln!(
            "warning: --cap {cap} enumerates up to 2^{cap} upgrade sets per instance; \
             expect long runtimes"
        );
    }
    cap
}

fn read_input(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// FNV-1a, 64-bit: tiny, stable fingerprint for "which input was this".
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn decimal(r: &Rational) -> String {
    r.to_decimal_string(6)
}

/// `"<exact> (~ <decimal>)"` for text output.
fn show(r: &Rational) -> String {
    format!("{r} (~ {})", decimal(r))
}

fn upgrades_json(solution: &Solution) -> Value {
    Value::Array(solution.upgrades.iter().map(|id| json!(id)).collect())
}

fn assignment_json(solution: &Solution) -> Value {
    Value::Object(
        solution.assignment.iter().map(|(c, s)| (c.to_string(), json!(s))).collect(),
    )
}

fn upgrades_text(solution: &Solution) -> String {
    if solution.upgrades.is_empty() {
        "(none)".to_string()
    } else {
        solution.upgrades.iter().collect::<Vec<_>>().join(", ")
    }
}

fn assignment_text(solution: &Solution) -> String {
    if solution.assignment.is_empty() {
        "(empty)".to_string()
    } else {
        solution
            .assignment
            .iter()
            .map(|(c, s)| format!("{c} -> {s}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn solution_fields(solution: &Solution, payload: &mut Map<String, Value>, text: &mut Vec<String>) {
    payload.insert("value".into(), json!(solution.value.to_string()));
    payload.insert("value_decimal".into(), json!(decimal(&solution.value)));
    payload.insert("upgrades".into(), upgrades_json(solution));
    payload.insert("assignment".into(), assignment_json(solution));
    text.push(format!("value: {}", show(&solution.value)));
    text.push(format!("upgrades: {}", upgrades_text(solution)));
    text.push(format!("assignment: {}", assignment_text(solution)));
}

fn cmd_solve(cli: &Cli, path: &Path, cap: usize) -> Result<Output, Error> {
    let input = read_input(path)?;
    let instance = mjson::parse_instance(&input, &path.display().to_string())?;
    let (solution, trace) = mapu::solve_with_trace(&instance)?;
    let mut payload = Map::new();
    let mut text = Vec::new();
    solution_fields(&solution, &mut payload, &mut text);
    let mut mismatch = false;
    if cli.verify {
        if instance.n_suppliers() <= cap {
            let oracle_solution = oracle::brute_force_with_cap(&instance, cap)?;
            let matches = oracle_solution.value == solution.value;
            payload.insert(
                "verification".into(),
                json!({
                    "checked": true,
                    "oracle_value": oracle_solution.value.to_string(),
                    "match": matches,
                }),
            );
            text.push(format!(
                "verification: {} (oracle value {})",
                if matches { "match" } else { "MISMATCH" },
                show(&oracle_solution.value)
            ));
            mismatch = !matches;
        } else {
            let reason = format!(
                "{} suppliers exceed the brute-force cap {cap}; verification skipped",
                instance.n_suppliers()
            );
            payload
                .insert("verification".into(), json!({"checked": false, "reason": reason}));
            text.push(format!("verification: skipped ({reason})"));
        }
    }
    Ok(Output {
        payload: Value::Object(payload),
        text,
        trace: cli.trace.then_some(trace),
        mismatch,
        digest: fnv1a64(input.as_bytes()),
    })
}

fn cmd_oracle(path: &Path, cap: usize) -> Result<Output, Error> {
    let input = read_input(path)?;
    let instance = mjson::parse_instance(&input, &path.display().to_string())?;
    let solution = oracle::brute_force_with_cap(&instance, cap)?;
    let mut payload = Map::new();
    let mut text = Vec::new();
    solution_fields(&solution, &mut payload, &mut text);
    Ok(Output {
        payload: Value::Object(payload),
        text,
        trace: None,
        mismatch: false,
        digest: fnv1a64(input.as_bytes()),
    })
}

fn cmd_hprofile(path: &Path, cap: usize) -> Result<Output, Error> {
    let input = read_input(path)?;
    let instance = mjson::parse_instance(&input, &path.display().to_string())?;
    let profile = oracle::h_profile_with_cap(&instance, cap)?;
    let non_increasing = profile.is_non_increasing();
    let convex = profile.is_convex();
    let payload = json!({
        "values": profile.values.iter().map(Rational::to_string).collect::<Vec<_>>(),
        "values_decimal": profile.values.iter().map(decimal).collect::<Vec<_>>(),
        "non_increasing": non_increasing,
        "convex": convex,
    });
    let mut text = Vec::new();
    for (k, v) in profile.values.iter().enumerate() {
        text.push(format!("h({k}) = {}", show(v)));
    }
    text.push(format!("non-increasing: {non_increasing}"));
    text.push(format!("convex: {convex}"));
    Ok(Output {
        payload,
        text,
        trace: None,
        // Both shapes are theorems for this problem; a violation means the
        // computation itself cannot be trusted.
        mismatch: !(non_increasing && convex),
        digest: fnv1a64(input.as_bytes()),
    })
}

fn cmd_greedy(path: &Path, cap: usize) -> Result<Output, Error> {
    let input = read_input(path)?;
    let instance = mjson::parse_instance(&input, &path.display().to_string())?;
    let greedy_solution = oracle::greedy(&instance)?;
    let oracle_solution = oracle::brute_force_with_cap(&instance, cap)?;
    let suboptimal = greedy_solution.value > oracle_solution.value;
    let gap = &greedy_solution.value - &oracle_solution.value;
    let payload = json!({
        "greedy_value": greedy_solution.value.to_string(),
        "greedy_value_decimal": decimal(&greedy_solution.value),
        "greedy_upgrades": upgrades_json(&greedy_solution),
        "oracle_value": oracle_solution.value.to_string(),
        "oracle_value_decimal": decimal(&oracle_solution.value),
        "oracle_upgrades": upgrades_json(&oracle_solution),
        "suboptimal": suboptimal,
        "gap": gap.to_string(),
    });
    let text = vec![
        format!("greedy value: {}", show(&greedy_solution.value)),
        format!("greedy upgrades: {}", upgrades_text(&greedy_solution)),
        format!("oracle value: {}", show(&oracle_solution.value)),
        format!("oracle upgrades: {}", upgrades_text(&oracle_solution)),
        format!("suboptimal: {suboptimal} (gap {gap})"),
    ];
    Ok(Output {
        payload,
        text,
        trace: None,
        mismatch: false,
        digest: fnv1a64(input.as_bytes()),
    })
}

fn cmd_schedule(cli: &Cli, path: &Path) -> Result<Output, Error> {
    let input = read_input(path)?;
    let instance = mjson::parse_scheduling(&input, &path.display().to_string())?;
    let schedule = scheduling::solve_schedule(&instance)?;
    let mut payload = Map::new();
    let mut text = Vec::new();
    schedule_fields(&schedule, &mut payload, &mut text);
    let mut mismatch = false;
    if cli.verify {
        if instance.n_jobs() <= scheduling::SCHEDULE_JOB_CAP
            && instance.n_machines() <= scheduling::SCHEDULE_MACHINE_CAP
        {
            let oracle_value = scheduling::brute_force_schedule(&instance)?;
            let matches = oracle_value == schedule.total_completion;
            payload.insert(
                "verification".into(),
                json!({
                    "checked": true,
                    "oracle_value": oracle_value.to_string(),
                    "match": matches,
                }),
            );
            text.push(format!(
                "verification: {} (oracle value {})",
                if matches { "match" } else { "MISMATCH" },
                show(&oracle_value)
            ));
            mismatch = !matches;
        } else {
            let reason = format!(
                "instance exceeds the schedule-enumeration caps ({} jobs / {} machines); \
                 verification skipped",
                scheduling::SCHEDULE_JOB_CAP,
                scheduling::SCHEDULE_MACHINE_CAP
            );
            payload
                .insert("verification".into(), json!({"checked": false, "reason": reason}));
            text.push(format!("verification: skipped ({reason})"));
        }
    }
    Ok(Output {
        payload: Value::Object(payload),
        text,
        trace: None,
        mismatch,
        digest: fnv1a64(input.as_bytes()),
    })
}

fn schedule_fields(schedule: &Schedule, payload: &mut Map<String, Value>, text: &mut Vec<String>) {
    payload.insert("total_completion".into(), json!(schedule.total_completion.to_string()));
    payload.insert(
        "total_completion_decimal".into(),
        json!(decimal(&schedule.total_completion)),
    );
    payload
        .insert("average_completion".into(), json!(schedule.average_completion.to_string()));
    payload.insert(
        "average_completion_decimal".into(),
        json!(decimal(&schedule.average_completion)),
    );
    payload.insert(
        "machines".into(),
        Value::Array(
            schedule
                .machine_orders
                .iter()
                .enumerate()
                .map(|(i, order)| {
                    json!({
                        "machine": format!("m{}", i + 1),
                        "jobs": order.iter().map(|&j| scheduling::job_id(j)).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        ),
    );
    payload.insert(
        "upgraded".into(),
        Value::Array(
            schedule.upgraded.iter().map(|&j| json!(scheduling::job_id(j))).collect(),
        ),
    );
    text.push(format!("total completion: {}", show(&schedule.total_completion)));
    text.push(format!("average completion: {}", show(&schedule.average_completion)));
    for (i, order) in schedule.machine_orders.iter().enumerate() {
        let jobs = if order.is_empty() {
            "(idle)".to_string()
        } else {
            order.iter().map(|&j| scheduling::job_id(j)).collect::<Vec<_>>().join(", ")
        };
        text.push(format!("m{}: {jobs}", i + 1));
    }
    let upgraded = if schedule.upgraded.is_empty() {
        "(none)".to_string()
    } else {
        schedule.upgraded.iter().map(|&j| scheduling::job_id(j)).collect::<Vec<_>>().join(", ")
    };
    text.push(format!("upgraded: {upgraded}"));
}

fn cmd_verify_fixtures(dir: Option<&Path>) -> Result<Output, Error> {
    let mut fixtures = builtin_fixtures();
    let mut digest_input = Vec::new();
    if let Some(dir) = dir {
        // Re-point every builtin checklist at the fixture file of the same
        // name: expectations stay bundled, data comes from disk.
        for fixture in &mut fixtures {
            let path = dir.join(format!("{}.json", fixture.name));
            let text = read_input(&path)?;
            let file = mjson::parse_fixture(&text, &path.display().to_string())?;
            digest_input.extend_from_slice(text.as_bytes());
            fixture.instance = file.instance;
            fixture.variant = file.variant;
        }
    } else {
        for fixture in &fixtures {
            digest_input.extend_from_slice(fixture.name.as_bytes());
            digest_input
                .extend_from_slice(serde_json::to_string(fixture).expect("serializes").as_bytes());
        }
    }
    let mut rows = Vec::new();
    let mut text = Vec::new();
    let mut all_pass = true;
    for fixture in &fixtures {
        let checks = verify_fixture(fixture)?;
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        text.push(format!(
            "fixture {}: {} ({} checks)",
            fixture.name,
            if pass { "pass" } else { "FAIL" },
            checks.len()
        ));
        for check in checks.iter().filter(|c| !c.pass) {
            text.push(format!(
                "  FAIL {}: expected {}, got {}",
                check.label, check.expected, check.got
            ));
        }
        rows.push(fixture_row(fixture, checks));
    }
    text.push(format!("all fixtures pass: {all_pass}"));
    Ok(Output {
        payload: json!({"fixtures": rows, "all_pass": all_pass}),
        text,
        trace: None,
        mismatch: !all_pass,
        digest: fnv1a64(&digest_input),
    })
}

fn fixture_row(fixture: &Fixture, checks: Vec<FixtureCheck>) -> Value {
    json!({
        "name": fixture.name,
        "pass": checks.iter().all(|c| c.pass),
        "checks": checks
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "expected": c.expected.to_string(),
                    "got": c.got.to_string(),
                    "pass": c.pass,
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn cmd_sweep(seed: u64, count: usize, max_suppliers: usize, cap: usize) -> Result<Output, Error> {
    let mut mismatches = Vec::new();
    for i in 0..count {
        let instance_seed = seed.wrapping_add(i as u64);
        let instance = mapu::generator::random_instance(instance_seed, max_suppliers);
        let (solution, trace) = mapu::solve_with_trace(&instance)?;
        if let Err(e) = trace.audit() {
            mismatches.push(json!({
                "seed": instance_seed,
                "kind": "trace audit",
                "detail": e.to_string(),
            }));
            continue;
        }
        let oracle_solution = oracle::brute_force_with_cap(&instance, cap)?;
        if solution.value != oracle_solution.value {
            mismatches.push(json!({
                "seed": instance_seed,
                "kind": "value mismatch",
                "solver": solution.value.to_string(),
                "oracle": oracle_solution.value.to_string(),
            }));
        }
    }
    let all_match = mismatches.is_empty();
    let text = vec![
        format!("instances checked: {count} (suppliers <= {max_suppliers}, base seed {seed})"),
        format!("solver == oracle and audits clean: {all_match}"),
    ];
    let digest = fnv1a64(format!("seed={seed},count={count},max={max_suppliers}").as_bytes());
    Ok(Output {
        payload: json!({
            "count": count,
            "max_suppliers": max_suppliers,
            "seed": seed,
            "all_match": all_match,
            "mismatches": mismatches,
        }),
        text,
        trace: None,
        mismatch: !all_match,
        digest,
    })
}

fn trace_lines(trace: &SolveTrace) -> Vec<String> {
    let mut lines = Vec::new();
    lines.push(format!(
        "trace: {} suppliers, {} customers, budget {}",
        trace.n_suppliers, trace.n_customers, trace.k
    ));
    if let Some(shortcut) = &trace.shortcut {
        lines.push(format!("trace: shortcut taken ({shortcut})"));
        return lines;
    }
    for (i, s) in trace.narrowing.iter().enumerate() {
        let action = match s.action {
            NarrowingAction::NoExtremeSet => "no extreme set; pair is optimal",
            NarrowingAction::ExactBudget => "budget-sized minimizer; solved",
            NarrowingAction::ReplaceA => "replace A",
            NarrowingAction::ReplaceB => "replace B",
        };
        let mut line = format!(
            "trace: narrowing {}: |A|={} cost(A)={} |B|={} cost(B)={} penalty={} f={}",
            i + 1,
            s.size_a,
            s.cost_a,
            s.size_b,
            s.cost_b,
            s.penalty,
            s.f
        );
        let _ = write!(line, " |X|={} -> {action}", s.size_x);
        lines.push(line);
    }
    if let Some(s) = &trace.simplification {
        lines.push(format!(
            "trace: simplification: removed {} from A, {} from B -> |A|={} |B|={} (costs {} / {})",
            s.removed_from_a.len(),
            s.removed_from_b.len(),
            s.size_a_after,
            s.size_b_after,
            s.cost_a,
            s.cost_b
        ));
    }
    for (i, s) in trace.rounding.iter().enumerate() {
        let chosen = match s.chosen {
            RoundingChoice::APrime => "A'",
            RoundingChoice::BPrime => "B'",
        };
        lines.push(format!(
            "trace: rounding {}: |A|={} |B|={} -> |A'|={} |B'|={} chose {chosen} (size {})",
            i + 1,
            s.size_a,
            s.size_b,
            s.size_a_prime,
            s.size_b_prime,
            s.chosen_size
        ));
    }
    lines.push(format!(
        "trace: final value {} with {} upgrades",
        trace.final_solution.value,
        trace.final_solution.upgrades.len()
    ));
    lines
}
