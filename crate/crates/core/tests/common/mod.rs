//! Independent oracles and generators shared by the integration tests.
//!
//! Everything here works in `BigRational` straight from the definitions so
//! that it shares no code with the library's dyadic arithmetic.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsmp::transforms::{GeneralSchedule, Interval, JobPlacement};
use wsmp::{Dyadic, Instance, Job, SyncSchedule};

pub type Q = BigRational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(d: &Dyadic) -> Q {
    Q::new(d.mantissa().clone(), BigInt::one() << d.exponent())
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn half(x: &Q) -> Q {
    x / qi(2)
}

/// Synchronized value of one sequence from the definition: every job starts
/// when its predecessor ends on the shared processor and overlaps for half
/// of what is left of it. `None` if some job is not longer than its start.
pub fn seq_value(seq: &[Job]) -> Option<Q> {
    let mut t = Q::zero();
    let mut v = Q::zero();
    for j in seq {
        let p = q(&j.p);
        if p <= t {
            return None;
        }
        v += half(&(&p - &t)) * q(&j.w);
        t = half(&(&t + &p));
    }
    Some(v)
}

pub fn start_times(seq: &[Job]) -> Vec<Q> {
    let mut out = vec![Q::zero()];
    for j in seq {
        let t = out.last().unwrap().clone();
        out.push(half(&(t + q(&j.p))));
    }
    out
}

/// `W_i = Σ_{ℓ=i+2}^{k} w_ℓ / 2^{ℓ−i−1}` with 1-based `ℓ`.
pub fn big_w(seq: &[Job], i: isize) -> Q {
    let k = seq.len() as isize;
    let mut s = Q::zero();
    for l in (i + 2).max(1)..=k {
        let mut term = q(&seq[(l - 1) as usize].w);
        for _ in 0..(l - i - 1) {
            term = half(&term);
        }
        s += term;
    }
    s
}

pub fn schedule_value(s: &SyncSchedule, inst: &Instance) -> Option<Q> {
    let mut total = Q::zero();
    for seq in s.resolve(inst).ok()? {
        total += seq_value(&seq)?;
    }
    Some(total)
}

/// `Σ_j w_j · |shared_j ∩ (0, c_j)|` straight from the interval lists.
pub fn general_value(g: &GeneralSchedule, inst: &Instance) -> Q {
    let mut total = Q::zero();
    for pl in &g.jobs {
        if pl.shared_processor.is_none() {
            continue;
        }
        let c = q(&pl.private_completion);
        let w = q(&inst.job(&pl.id).unwrap().w);
        for iv in &pl.shared_intervals {
            let a = q(&iv.start).max(Q::zero());
            let b = q(&iv.end).min(c.clone());
            if b > a {
                total += (b - a) * &w;
            }
        }
    }
    total
}

pub fn sorted_q(values: impl Iterator<Item = Q>) -> Vec<Q> {
    let mut v: Vec<Q> = values.collect();
    v.sort();
    v
}

/// Ascending `v_1 <= ... <= v_k`: `Σ_{ℓ=1}^{k−1} v_{ℓ+1} / 2^{k−ℓ} < v_1`.
pub fn inclusive(values: Vec<Q>) -> bool {
    let v = sorted_q(values.into_iter());
    let k = v.len();
    if k <= 1 {
        return true;
    }
    let mut x = Q::zero();
    for (l, value) in v.iter().enumerate().skip(1) {
        let mut term = value.clone();
        for _ in 0..(k - l) {
            term = half(&term);
        }
        x += term;
    }
    x < v[0]
}

pub fn is_v_shaped(p: &[Q]) -> bool {
    // after the first strict increase there may be no strict decrease
    let mut rising = false;
    for w in p.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] && rising {
            return false;
        }
    }
    true
}

pub fn job(id: String, p: i64, w: i64) -> Job {
    Job::new(id, p, w)
}

/// `k` integers close enough together that any set of them is inclusive.
pub fn clustered(r: &mut impl Rng, k: usize) -> Vec<i64> {
    let base: i64 = r.gen_range(300..=1000);
    let spread = base / 130;
    (0..k).map(|_| base + r.gen_range(0..=spread)).collect()
}

/// Random feasible synchronized schedule: jobs are dealt to random
/// processors in random order and dropped to private processing whenever
/// they would be too short for their start time.
pub fn random_sync(r: &mut impl Rng, inst: &Instance) -> SyncSchedule {
    let m = inst.m();
    let mut ix: Vec<usize> = (0..inst.len()).collect();
    ix.shuffle(r);
    let mut seqs = vec![Vec::new(); m];
    let mut starts = vec![Q::zero(); m];
    for i in ix {
        let slot = r.gen_range(0..=m);
        if slot == m {
            continue;
        }
        let j = &inst.jobs()[i];
        let p = q(&j.p);
        if p > starts[slot] {
            starts[slot] = half(&(&starts[slot] + &p));
            seqs[slot].push(j.id.clone());
        }
    }
    SyncSchedule::new(seqs)
}

pub fn random_instance(r: &mut impl Rng, n: usize, m: usize, max_p: i64, max_w: i64) -> Instance {
    let jobs = (0..n)
        .map(|i| {
            job(
                format!("j{}", i + 1),
                r.gen_range(1..=max_p),
                r.gen_range(1..=max_w),
            )
        })
        .collect();
    Instance::new(m, jobs).unwrap()
}

fn quarter(units: i64) -> Dyadic {
    Dyadic::new(units, 2)
}

/// Random valid interval-level schedule. Shared work is cut into one or
/// two pieces per job and laid out with random idle gaps, so the result is
/// usually neither normal, idle-free, non-preemptive nor ordered.
pub fn random_general(r: &mut impl Rng, inst: &Instance) -> GeneralSchedule {
    let m = inst.m();
    let mut placements: Vec<JobPlacement> = Vec::new();
    let mut pieces: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
    for job in inst.jobs() {
        let p_units = (q(&job.p) * qi(4)).to_integer();
        let p_units = i64::try_from(p_units).unwrap();
        let slot = r.gen_range(0..=m);
        let shared_units = if slot == m || p_units < 2 {
            0
        } else {
            r.gen_range(1..p_units)
        };
        let ix = placements.len();
        placements.push(JobPlacement {
            id: job.id.clone(),
            shared_processor: (shared_units > 0).then_some(slot + 1),
            shared_intervals: Vec::new(),
            private_completion: quarter(p_units - shared_units),
        });
        if shared_units > 0 {
            if shared_units >= 2 && r.gen_bool(0.5) {
                let first = r.gen_range(1..shared_units);
                pieces[slot].push((ix, first));
                pieces[slot].push((ix, shared_units - first));
            } else {
                pieces[slot].push((ix, shared_units));
            }
        }
    }
    for list in &mut pieces {
        list.shuffle(r);
        let mut cursor = 0i64;
        for &(ix, len) in list.iter() {
            cursor += r.gen_range(0..=3);
            placements[ix]
                .shared_intervals
                .push(Interval::new(quarter(cursor), quarter(cursor + len)));
            cursor += len;
        }
    }
    GeneralSchedule { jobs: placements }
}

/// Prints one verdict line per acceptance criterion and fails the test if
/// anything went wrong.
pub fn verdict(number: u32, title: &str, failures: &[String], detail: &str) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number:>2} {status}  {title} ({detail})");
    for f in failures.iter().take(5) {
        println!("             {f}");
    }
    assert!(
        failures.is_empty(),
        "criterion {number} failed: {} problems, first: {}",
        failures.len(),
        failures[0]
    );
}
