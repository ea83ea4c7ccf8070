//! Minimizing total (equivalently average) completion time on uniform
//! machines when up to `k` jobs may be upgraded to shorter processing times.
//!
//! A schedule's objective decomposes per slot: the job processed ℓ-th from
//! the end on machine `i` contributes its processing time to exactly ℓ
//! completion times, scaled by the machine speed. So slots act as customers
//! with demand `ℓ / s_i`, jobs act as suppliers with base cost `p_j` and
//! upgraded cost `q_j`, and the scheduling problem reduces to the
//! multiplicative assignment problem ([`reduce`]). Only the `n` cheapest
//! slots can ever be used, which keeps the reduced instance square.
//! [`solve_schedule`] runs the exact solver on the reduction and decodes the
//! matching back into an explicit schedule; [`brute_force_schedule`] is the
//! independent enumeration oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Customer, Instance, Supplier};
use crate::rational::Rational;
use crate::solver;

/// Largest job count accepted by [`brute_force_schedule`].
pub const SCHEDULE_JOB_CAP: usize = 6;
/// Largest machine count accepted by [`brute_force_schedule`].
pub const SCHEDULE_MACHINE_CAP: usize = 4;

/// Jobs with regular and upgraded processing times, machines with speeds,
/// and an upgrade budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchedulingInstance {
    /// Machine speeds, all positive.
    speeds: Vec<Rational>,
    /// Per job: regular processing time `p_j` and upgraded time `q_j`.
    jobs: Vec<(Rational, Rational)>,
    /// How many jobs may be upgraded.
    k: usize,
}

impl SchedulingInstance {
    pub fn new(
        speeds: Vec<Rational>,
        jobs: Vec<(Rational, Rational)>,
        k: usize,
    ) -> Result<SchedulingInstance> {
        if speeds.is_empty() {
            return Err(Error::InvalidInstance("need at least one machine".into()));
        }
        for (i, s) in speeds.iter().enumerate() {
            if !s.is_positive() {
                return Err(Error::InvalidInstance(format!(
                    "machine {} has non-positive speed {s}",
                    i + 1
                )));
            }
        }
        for (j, (p, q)) in jobs.iter().enumerate() {
            if q.is_negative() || q > p {
                return Err(Error::InvalidInstance(format!(
                    "job {} needs 0 <= upgraded time <= regular time, got {q} vs {p}",
                    j + 1
                )));
            }
        }
        if k > jobs.len() {
            return Err(Error::InvalidInstance(format!(
                "budget {k} exceeds the number of jobs {}",
                jobs.len()
            )));
        }
        Ok(SchedulingInstance { speeds, jobs, k })
    }

    pub fn speeds(&self) -> &[Rational] {
        &self.speeds
    }

    pub fn jobs(&self) -> &[(Rational, Rational)] {
        &self.jobs
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn n_machines(&self) -> usize {
        self.speeds.len()
    }
}

/// An explicit schedule: processing order per machine (job indices) plus the
/// upgraded jobs and the exact objective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// `machine_orders[i]` lists machine `i`'s jobs in processing order.
    pub machine_orders: Vec<Vec<usize>>,
    /// Indices of upgraded jobs.
    pub upgraded: BTreeSet<usize>,
    /// Sum of all completion times.
    pub total_completion: Rational,
    /// `total_completion / n` (zero for the empty instance).
    pub average_completion: Rational,
}

impl Schedule {
    /// Check structural validity against the instance and recompute the
    /// objective from scratch: every job scheduled exactly once, the budget
    /// respected, and both reported numbers consistent with the explicit
    /// orders.
    pub fn validate(&self, instance: &SchedulingInstance) -> Result<()> {
        let n = instance.n_jobs();
        if self.machine_orders.len() != instance.n_machines() {
            return Err(Error::InvalidAssignment(format!(
                "schedule covers {} machines, instance has {}",
                self.machine_orders.len(),
                instance.n_machines()
            )));
        }
        let mut seen = vec![false; n];
        for order in &self.machine_orders {
            for &j in order {
                if j >= n || seen[j] {
                    return Err(Error::InvalidAssignment(format!(
                        "job index {j} is out of range or scheduled twice"
                    )));
                }
                seen[j] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidAssignment(format!("job index {missing} is unscheduled")));
        }
        if self.upgraded.len() > instance.k() {
            return Err(Error::InvalidAssignment(format!(
                "{} upgrades exceed the budget {}",
                self.upgraded.len(),
                instance.k()
            )));
        }
        if let Some(&j) = self.upgraded.iter().find(|&&j| j >= n) {
            return Err(Error::InvalidAssignment(format!("upgraded job index {j} is out of range")));
        }
        let recomputed = completion_sum(instance, &self.machine_orders, &self.upgraded);
        if recomputed != self.total_completion {
            return Err(Error::Invariant(format!(
                "schedule reports total {}, recomputation gives {recomputed}",
                self.total_completion
            )));
        }
        let expected_avg = if n == 0 {
            Rational::zero()
        } else {
            &self.total_completion / &Rational::from(n)
        };
        if expected_avg != self.average_completion {
            return Err(Error::Invariant(format!(
                "average {} is not total {} divided by {n}",
                self.average_completion, self.total_completion
            )));
        }
        Ok(())
    }
}

/// Where each slot-customer of the reduced instance lives: customer id →
/// (machine index, slot index ℓ ≥ 1, counted from the *end* of the
/// processing order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotMap {
    slots: BTreeMap<String, (usize, usize)>,
}

impl SlotMap {
    fn new(slots: BTreeMap<String, (usize, usize)>) -> SlotMap {
        debug_assert!(
            {
                // Kept slots per machine must form the prefix 1..=k_i.
                let mut per_machine: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for &(i, l) in slots.values() {
                    per_machine.entry(i).or_default().insert(l);
                }
                per_machine
                    .values()
                    .all(|ls| ls.iter().copied().eq(1..=ls.len()))
            },
            "kept slots must form per-machine prefixes"
        );
        SlotMap { slots }
    }

    /// Machine index and slot position of a reduced-instance customer.
    pub fn machine_slot(&self, customer: &str) -> Option<(usize, usize)> {
        self.slots.get(customer).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, (usize, usize))> {
        self.slots.iter().map(|(c, &slot)| (c.as_str(), slot))
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// How many slots machine `i` keeps.
    pub fn slots_on_machine(&self, machine: usize) -> usize {
        self.slots.values().filter(|&&(i, _)| i == machine).count()
    }
}

/// Supplier id of job `j` (0-based index) in the reduced instance.
pub fn job_id(j: usize) -> String {
    format!("j{}", j + 1)
}

/// Customer id of slot `l` (1-based, from the end) on machine `i` (0-based).
pub fn slot_id(i: usize, l: usize) -> String {
    format!("m{}-slot{l}", i + 1)
}

/// Reduce a scheduling instance to a multiplicative assignment instance.
///
/// Jobs become suppliers with costs `(p_j, q_j)`; the `n` cheapest slot
/// coefficients `ℓ / s_i` (ties broken by machine index, then ℓ) become
/// customers with the coefficient as demand. Since `ℓ / s_i` strictly
/// increases in ℓ, the kept slots automatically form a prefix on every
/// machine. Demands stay un-divided by `n`; averages divide once at
/// reporting time.
pub fn reduce(instance: &SchedulingInstance) -> (Instance, SlotMap) {
    let n = instance.n_jobs();
    let suppliers = instance
        .jobs()
        .iter()
        .enumerate()
        .map(|(j, (p, q))| Supplier {
            id: job_id(j),
            base_cost: p.clone(),
            upgraded_cost: q.clone(),
        })
        .collect();
    let mut coefficients: Vec<(Rational, usize, usize)> = instance
        .speeds()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (1..=n).map(move |l| (Rational::from(l) / s, i, l)))
        .collect();
    coefficients.sort();
    coefficients.truncate(n);
    let mut customers = Vec::with_capacity(n);
    let mut slots = BTreeMap::new();
    for (coefficient, i, l) in coefficients {
        let id = slot_id(i, l);
        customers.push(Customer { id: id.clone(), demand: coefficient });
        slots.insert(id, (i, l));
    }
    let reduced = Instance::new(suppliers, customers, instance.k())
        .expect("a reduction of a valid scheduling instance is a valid instance");
    (reduced, SlotMap::new(slots))
}

/// Exact total completion time of explicit machine orders under an upgrade
/// set: on each machine the `t`-th of `r` jobs contributes `r − t` times its
/// effective processing time, divided by the speed.
fn completion_sum(
    instance: &SchedulingInstance,
    machine_orders: &[Vec<usize>],
    upgraded: &BTreeSet<usize>,
) -> Rational {
    let mut total = Rational::zero();
    for (i, order) in machine_orders.iter().enumerate() {
        let r = order.len();
        for (t, &j) in order.iter().enumerate() {
            let (p, q) = &instance.jobs()[j];
            let time = if upgraded.contains(&j) { q } else { p };
            total += Rational::from(r - t) * time / &instance.speeds()[i];
        }
    }
    total
}

/// Solve the scheduling problem exactly: reduce, run the assignment solver,
/// and decode the matching (slot ℓ means ℓ-th from the end of the machine's
/// processing order). The decoded schedule's recomputed completion-time sum
/// must equal the assignment objective exactly.
pub fn solve_schedule(instance: &SchedulingInstance) -> Result<Schedule> {
    let n = instance.n_jobs();
    if n == 0 {
        return Ok(Schedule {
            machine_orders: vec![Vec::new(); instance.n_machines()],
            upgraded: BTreeSet::new(),
            total_completion: Rational::zero(),
            average_completion: Rational::zero(),
        });
    }
    let (reduced, slots) = reduce(instance);
    let solution = solver::solve(&reduced)?;
    let job_index: HashMap<String, usize> = (0..n).map(|j| (job_id(j), j)).collect();
    let mut machine_orders: Vec<Vec<Option<usize>>> = (0..instance.n_machines())
        .map(|i| vec![None; slots.slots_on_machine(i)])
        .collect();
    for (customer, supplier) in solution.assignment.iter() {
        let Some((i, l)) = slots.machine_slot(customer) else {
            return Err(Error::Invariant(format!("assignment names unknown slot `{customer}`")));
        };
        let Some(&j) = job_index.get(supplier) else {
            return Err(Error::Invariant(format!("assignment names unknown job `{supplier}`")));
        };
        let r = machine_orders[i].len();
        // Slot l is l-th from the end: position r − l in processing order.
        machine_orders[i][r - l] = Some(j);
    }
    let machine_orders: Vec<Vec<usize>> = machine_orders
        .into_iter()
        .map(|order| {
            order
                .into_iter()
                .collect::<Option<Vec<usize>>>()
                .ok_or_else(|| Error::Invariant("a kept slot was left unassigned".into()))
        })
        .collect::<Result<_>>()?;
    let upgraded: BTreeSet<usize> = solution
        .upgrades
        .iter()
        .map(|id| {
            job_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("upgrade names unknown job `{id}`")))
        })
        .collect::<Result<_>>()?;
    let total = completion_sum(instance, &machine_orders, &upgraded);
    if total != solution.value {
        return Err(Error::Invariant(format!(
            "decoded schedule costs {total}, assignment value is {}",
            solution.value
        )));
    }
    let schedule = Schedule {
        average_completion: &total / &Rational::from(n),
        total_completion: total,
        machine_orders,
        upgraded,
    };
    schedule.validate(instance)?;
    Ok(schedule)
}

/// Independent oracle: enumerate every job-to-machine partition, every
/// processing order per machine, and every upgrade set within the budget;
/// return the exact minimum total completion time.
pub fn brute_force_schedule(instance: &SchedulingInstance) -> Result<Rational> {
    let n = instance.n_jobs();
    let m = instance.n_machines();
    if n > SCHEDULE_JOB_CAP {
        return Err(Error::CapExceeded {
            what: "schedule brute force (jobs)".into(),
            size: n,
            cap: SCHEDULE_JOB_CAP,
        });
    }
    if m > SCHEDULE_MACHINE_CAP {
        return Err(Error::CapExceeded {
            what: "schedule brute force (machines)".into(),
            size: m,
            cap: SCHEDULE_MACHINE_CAP,
        });
    }
    if n == 0 {
        return Ok(Rational::zero());
    }
    let mut best: Option<Rational> = None;
    for partition in (0..n).map(|_| 0..m).multi_cartesian_product() {
        let machine_jobs: Vec<Vec<usize>> =
            (0..m).map(|i| (0..n).filter(|&j| partition[j] == i).collect()).collect();
        let per_machine_orders: Vec<Vec<Vec<usize>>> = machine_jobs
            .iter()
            .map(|jobs| jobs.iter().copied().permutations(jobs.len()).collect())
            .collect();
        for orders in per_machine_orders.iter().multi_cartesian_product() {
            let machine_orders: Vec<Vec<usize>> = orders.iter().map(|o| (*o).clone()).collect();
            for bits in 0u32..(1 << n) {
                let upgraded: BTreeSet<usize> = (0..n).filter(|j| bits >> j & 1 == 1).collect();
                if upgraded.len() > instance.k() {
                    continue;
                }
                let total = completion_sum(instance, &machine_orders, &upgraded);
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
    }
    Ok(best.expect("at least one schedule exists for n >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::r;

    fn sched(speeds: &[&str], jobs: &[(i64, i64)], k: usize) -> SchedulingInstance {
        SchedulingInstance::new(
            speeds.iter().map(|s| r(s)).collect(),
            jobs.iter().map(|(p, q)| (Rational::from(*p), Rational::from(*q))).collect(),
            k,
        )
        .expect("test instance must validate")
    }

    #[test]
    fn construction_rejects_bad_data() {
        assert!(SchedulingInstance::new(vec![], vec![], 0).is_err());
        assert!(SchedulingInstance::new(vec![r("0")], vec![], 0).is_err());
        assert!(SchedulingInstance::new(vec![r("1")], vec![(r("1"), r("2"))], 0).is_err());
        assert!(SchedulingInstance::new(vec![r("1")], vec![(r("1"), r("1"))], 2).is_err());
    }

    #[test]
    fn reduce_single_machine_gives_demands_one_to_n() {
        let s = sched(&["1"], &[(1, 1), (2, 2), (3, 3)], 0);
        let (reduced, slots) = reduce(&s);
        let demands: Vec<Rational> =
            reduced.customers().iter().map(|c| c.demand.clone()).collect();
        assert_eq!(demands, vec![r("1"), r("2"), r("3")]);
        assert_eq!(slots.slots_on_machine(0), 3);
    }

    #[test]
    fn reduce_equal_speeds_keep_the_three_cheapest_slots() {
        let s = sched(&["1", "1"], &[(1, 1), (2, 2), (3, 3)], 0);
        let (reduced, slots) = reduce(&s);
        let mut demands: Vec<Rational> =
            reduced.customers().iter().map(|c| c.demand.clone()).collect();
        demands.sort();
        assert_eq!(demands, vec![r("1"), r("1"), r("2")]);
        // The demand-2 slot goes to machine 1 (ties break by machine index).
        assert_eq!(slots.slots_on_machine(0), 2);
        assert_eq!(slots.slots_on_machine(1), 1);
        assert_eq!(slots.machine_slot("m1-slot2"), Some((0, 2)));
    }

    #[test]
    fn reduce_mixed_speeds_keeps_the_fast_machine_prefix() {
        let s = sched(&["2", "1"], &[(1, 1), (2, 2), (3, 3)], 0);
        let (reduced, _) = reduce(&s);
        let mut demands: Vec<Rational> =
            reduced.customers().iter().map(|c| c.demand.clone()).collect();
        demands.sort();
        assert_eq!(demands, vec![r("1/2"), r("1"), r("1")]);
    }

    #[test]
    fn spt_single_machine() {
        let s = sched(&["1"], &[(1, 1), (2, 2), (3, 3)], 0);
        let schedule = solve_schedule(&s).unwrap();
        assert_eq!(schedule.total_completion, r("10")); // 1 + 3 + 6
        assert_eq!(schedule.average_completion, r("10/3"));
        assert_eq!(schedule.machine_orders, vec![vec![0, 1, 2]]);
        assert!(schedule.upgraded.is_empty());
    }

    #[test]
    fn full_budget_equals_zero_budget_on_upgraded_times() {
        let s = sched(&["1", "3/2"], &[(4, 1), (7, 2), (5, 5), (9, 0)], 4);
        let swapped = SchedulingInstance::new(
            s.speeds().to_vec(),
            s.jobs().iter().map(|(_, q)| (q.clone(), q.clone())).collect(),
            0,
        )
        .unwrap();
        assert_eq!(
            solve_schedule(&s).unwrap().total_completion,
            solve_schedule(&swapped).unwrap().total_completion
        );
    }

    #[test]
    fn single_job_brute_force_picks_the_shorter_time_if_allowed() {
        let s = sched(&["2"], &[(6, 1)], 0);
        assert_eq!(brute_force_schedule(&s).unwrap(), r("3")); // 6 / 2
        let s = sched(&["2"], &[(6, 1)], 1);
        assert_eq!(brute_force_schedule(&s).unwrap(), r("1/2")); // 1 / 2
    }

    #[test]
    fn brute_force_spt_value() {
        let s = sched(&["1"], &[(3, 3), (1, 1), (2, 2)], 0);
        assert_eq!(brute_force_schedule(&s).unwrap(), r("10"));
    }

    #[test]
    fn brute_force_respects_caps() {
        let s = sched(&["1"], &[(1, 1); 7], 0);
        assert!(matches!(brute_force_schedule(&s), Err(Error::CapExceeded { .. })));
        let s = sched(&["1"; 5], &[(1, 1)], 0);
        assert!(matches!(brute_force_schedule(&s), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn empty_instance_is_trivial() {
        let s = sched(&["1", "1"], &[], 0);
        let schedule = solve_schedule(&s).unwrap();
        assert_eq!(schedule.total_completion, Rational::zero());
        assert_eq!(schedule.machine_orders, vec![Vec::<usize>::new(); 2]);
        schedule.validate(&s).unwrap();
        assert_eq!(brute_force_schedule(&s).unwrap(), Rational::zero());
    }

    #[test]
    fn upgrades_are_spent_where_they_shorten_the_queue() {
        // One machine, two jobs, one upgrade: upgrading the long job to 1
        // turns (2, 10) into (2, 1) → order 1, 2 → total 1 + 3 = 4.
        let s = sched(&["1"], &[(2, 2), (10, 1)], 1);
        let schedule = solve_schedule(&s).unwrap();
        assert_eq!(schedule.total_completion, r("4"));
        assert_eq!(schedule.upgraded, BTreeSet::from([1]));
        assert_eq!(schedule.machine_orders, vec![vec![1, 0]]);
    }

    #[test]
    fn validate_catches_tampering() {
        let s = sched(&["1"], &[(1, 1), (2, 2)], 0);
        let mut schedule = solve_schedule(&s).unwrap();
        schedule.total_completion += Rational::one();
        assert!(matches!(schedule.validate(&s), Err(Error::Invariant(_))));

        let mut schedule = solve_schedule(&s).unwrap();
        schedule.machine_orders[0].pop();
        assert!(matches!(schedule.validate(&s), Err(Error::InvalidAssignment(_))));
    }

    #[test]
    fn solve_matches_the_oracle_on_random_instances() {
        for seed in 0..150 {
            let s = crate::generator::random_scheduling_instance(seed);
            let schedule = solve_schedule(&s)
                .unwrap_or_else(|e| panic!("seed {seed}: solve failed: {e}"));
            schedule.validate(&s).unwrap_or_else(|e| panic!("seed {seed}: invalid: {e}"));
            let oracle = brute_force_schedule(&s).unwrap();
            assert_eq!(
                schedule.total_completion, oracle,
                "seed {seed}: solver and oracle disagree"
            );
        }
    }
}
