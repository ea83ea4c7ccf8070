//! Seeded random instance families for tests, sweeps, and benches.
//!
//! Everything here is deterministic in the seed (ChaCha-based, so stable
//! across platforms and releases): the same seed always yields the same
//! instance. Two families are provided — small rational-valued instances
//! meant to be cross-checked against the brute-force oracles, and square
//! integer-valued instances sized for performance smoke tests.

use crate::instance::{Customer, Instance, Supplier};
use crate::rational::Rational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random rational from `{0, 1, …, 24} / {1, 2, 3, 4}`.
fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let numer = rng.gen_range(0..=24i64);
    let denom = rng.gen_range(1..=4i64);
    Rational::new(numer, denom)
}

/// Random instance for oracle sweeps: `1 ≤ |I| ≤ max_suppliers` suppliers,
/// `1 ≤ |J| ≤ |I|` customers, budget `0 ≤ k ≤ |I|`, and deliberately lumpy
/// data — small rational costs and demands, occasional zero demands,
/// occasional useless upgrades (`b = c`), frequent cost collisions — to
/// exercise tie-breaking, normalization, and simplification paths.
pub fn random_instance(seed: u64, max_suppliers: usize) -> Instance {
    assert!(max_suppliers >= 1, "need at least one supplier");
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_suppliers);
    let m = rng.gen_range(1..=n);
    let k = rng.gen_range(0..=n);
    let suppliers = (0..n)
        .map(|i| {
            let base = small_rational(&mut rng);
            // b = c · t/d for t ≤ d keeps 0 ≤ b ≤ c and lands exactly on
            // b = 0 and b = c often enough to matter.
            let d = rng.gen_range(2..=4i64);
            let t = rng.gen_range(0..=d);
            let upgraded = base.clone() * Rational::new(t, d);
            Supplier { id: format!("s{}", i + 1), base_cost: base, upgraded_cost: upgraded }
        })
        .collect();
    let customers = (0..m)
        .map(|j| {
            let demand = if rng.gen_range(0..6) == 0 {
                Rational::zero()
            } else {
                Rational::new(rng.gen_range(1..=20i64), rng.gen_range(1..=3i64))
            };
            Customer { id: format!("c{}", j + 1), demand }
        })
        .collect();
    Instance::new(suppliers, customers, k).expect("generated instance must validate")
}

/// Square integer-valued instance of size `n` with budget `n/3`: base costs
/// in `10..100`, upgraded costs a uniform fraction of the base (rounded
/// down), demands in `0..=50`. Integer data keeps the Lagrangian penalty's
/// denominator at most `n`, so matching weights stay comfortably inside the
/// fast machine-integer path even at `n` in the hundreds.
pub fn random_square_integer_instance(seed: u64, n: usize) -> Instance {
    assert!(n >= 1, "need at least one supplier");
    let mut rng = rng(seed);
    let suppliers = (0..n)
        .map(|i| {
            let c = rng.gen_range(10..100i64);
            let b = rng.gen_range(0..=c);
            Supplier {
                id: format!("s{}", i + 1),
                base_cost: Rational::from(c),
                upgraded_cost: Rational::from(b),
            }
        })
        .collect();
    let customers = (0..n)
        .map(|j| Customer { id: format!("c{}", j + 1), demand: Rational::from(rng.gen_range(0..=50i64)) })
        .collect();
    Instance::new(suppliers, customers, n / 3).expect("generated instance must validate")
}

/// Random scheduling instance sized for the schedule-enumeration oracle:
/// up to 5 jobs on up to 2 machines, integer processing times `1..=9` with
/// upgraded times anywhere in `0..=p`, small rational speeds, and any
/// budget `0..=n`.
pub fn random_scheduling_instance(seed: u64) -> crate::scheduling::SchedulingInstance {
    let mut rng = rng(seed);
    let m = rng.gen_range(1..=2usize);
    let n = rng.gen_range(1..=5usize);
    let k = rng.gen_range(0..=n);
    let speeds = (0..m)
        .map(|_| Rational::new(rng.gen_range(1..=3i64), rng.gen_range(1..=2i64)))
        .collect();
    let jobs = (0..n)
        .map(|_| {
            let p = rng.gen_range(1..=9i64);
            let q = rng.gen_range(0..=p);
            (Rational::from(p), Rational::from(q))
        })
        .collect();
    crate::scheduling::SchedulingInstance::new(speeds, jobs, k)
        .expect("generated scheduling instance must validate")
}
