//! Exact solvers: the sorting algorithm for equal weights, an exhaustive
//! oracle for small instances and a local-search heuristic.

use thiserror::Error;

use crate::engine::{self, ScheduleError, SyncSchedule};
use crate::{Dyadic, Instance, Job};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("weights are not all equal; use the exhaustive solver")]
    UnequalWeights,
    #[error("instance has {n} jobs, limit is {max}")]
    TooLarge { n: usize, max: usize },
    #[error("search exceeded {0} candidate assignments")]
    CandidateLimit(u64),
    #[error("list {0} is not in ascending order")]
    NotAscending(usize),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Positional weights for `n` unit-weight jobs on `m` shared processors:
/// `m` copies each of `1/2, 1/4, ..., 1/2^(k-1)`, then `r'` copies of
/// `1/2^k`, where `k = ⌈n/m⌉` and `r' = n - (k-1)m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalWeights {
    pub k: usize,
    pub r_prime: usize,
    pub weights: Vec<Dyadic>,
}

impl PositionalWeights {
    pub fn new(n: usize, m: usize) -> Self {
        assert!(m >= 1, "m must be positive");
        if n == 0 {
            return PositionalWeights {
                k: 0,
                r_prime: 0,
                weights: Vec::new(),
            };
        }
        let k = n.div_ceil(m);
        let r_prime = n - (k - 1) * m;
        let mut weights = Vec::with_capacity(n);
        for level in 1..k {
            weights.extend(std::iter::repeat_n(Dyadic::pow2_recip(level as u32), m));
        }
        weights.extend(std::iter::repeat_n(Dyadic::pow2_recip(k as u32), r_prime));
        PositionalWeights {
            k,
            r_prime,
            weights,
        }
    }

    /// `Σ p_i · weight_i` for processing times sorted in descending order.
    pub fn matched_value(&self, p_desc: &[Dyadic]) -> Dyadic {
        p_desc.iter().zip(&self.weights).map(|(p, w)| p * w).sum()
    }
}

/// Limits for [`brute_force`] and [`all_optima`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_jobs: usize,
    /// Upper bound on the number of processor assignments visited.
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_jobs: 8,
            max_candidates: 10_000_000,
        }
    }
}

/// Optimal schedule for an instance whose jobs all have the same weight.
///
/// Jobs are sorted by `p` descending (ties by id) and dealt round-robin to
/// the processors, so processor `((i-1) mod m) + 1` gets the `i`-th job and
/// with it the `i`-th positional weight. Each processor then runs its jobs
/// in ascending order. Every job ends up on a shared processor.
pub fn solve_equal_weights(inst: &Instance) -> Result<(SyncSchedule, Dyadic), SolverError> {
    if !inst.has_equal_weights() {
        return Err(SolverError::UnequalWeights);
    }
    let m = inst.m();
    let mut sorted: Vec<&Job> = inst.jobs().iter().collect();
    sorted.sort_by(|a, b| b.p.cmp(&a.p).then_with(|| a.id.cmp(&b.id)));
    let mut parts: Vec<Vec<&Job>> = vec![Vec::new(); m];
    for (i, job) in sorted.into_iter().enumerate() {
        parts[i % m].push(job);
    }
    let schedule = SyncSchedule::new(
        parts
            .into_iter()
            .map(|part| part.into_iter().rev().map(|j| j.id.clone()).collect())
            .collect(),
    );
    let value = engine::evaluate(&schedule, inst)?.total;
    Ok((schedule, value))
}

/// Unit-weight value of a partition whose lists are each ascending:
/// `Σ_ℓ Σ_i p_i / 2^(|J_ℓ|+1-i)`.
pub fn equal_weights_value(partition: &[Vec<Dyadic>]) -> Result<Dyadic, SolverError> {
    let mut total = Dyadic::zero();
    for (l, list) in partition.iter().enumerate() {
        if list.windows(2).any(|w| w[0] > w[1]) {
            return Err(SolverError::NotAscending(l + 1));
        }
        let k = list.len();
        for (i, p) in list.iter().enumerate() {
            total += p.div_pow2((k - i) as u32);
        }
    }
    Ok(total)
}

/// Unit-weight value of one processor running `p` in ascending order:
/// `p_n/2 + p_{n-1}/4 + ... + p_1/2^n`.
pub fn single_processor_ascending(p: &[Dyadic]) -> Dyadic {
    let mut sorted = p.to_vec();
    sorted.sort();
    equal_weights_value(&[sorted]).expect("sorted")
}

/// Best orders of every subset of jobs on one processor.
struct SubsetTable {
    /// `best[mask]`: optimal value and every optimal order (job indices),
    /// lexicographically sorted.
    best: Vec<(Dyadic, Vec<Vec<usize>>)>,
}

impl SubsetTable {
    fn build(jobs: &[Job]) -> Self {
        let n = jobs.len();
        let mut best: Vec<Option<(Dyadic, Vec<Vec<usize>>)>> = vec![None; 1 << n];
        for (mask, slot) in best.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
            let mut state = Dfs {
                jobs,
                members: &members,
                used: vec![false; members.len()],
                order: Vec::with_capacity(members.len()),
                best: None,
            };
            state.run(&Dyadic::zero(), &Dyadic::zero());
            *slot = state.best;
        }
        SubsetTable {
            best: best
                .into_iter()
                .map(|b| b.expect("ascending order is feasible"))
                .collect(),
        }
    }
}

struct Dfs<'a> {
    jobs: &'a [Job],
    members: &'a [usize],
    used: Vec<bool>,
    order: Vec<usize>,
    best: Option<(Dyadic, Vec<Vec<usize>>)>,
}

impl Dfs<'_> {
    fn run(&mut self, t: &Dyadic, value: &Dyadic) {
        if self.order.len() == self.members.len() {
            match &mut self.best {
                Some((v, orders)) if *value == *v => orders.push(self.order.clone()),
                Some((v, _)) if *value < *v => {}
                _ => self.best = Some((value.clone(), vec![self.order.clone()])),
            }
            return;
        }
        for slot in 0..self.members.len() {
            if self.used[slot] {
                continue;
            }
            let job = &self.jobs[self.members[slot]];
            if job.p <= *t {
                continue;
            }
            let overlap = (&job.p - t).halve();
            let next_value = value + &overlap * &job.w;
            let next_t = (t + &job.p).halve();
            self.used[slot] = true;
            self.order.push(self.members[slot]);
            self.run(&next_t, &next_value);
            self.order.pop();
            self.used[slot] = false;
        }
    }
}

/// Calls `visit` on every assignment of jobs to `0` (private only) or a
/// shared processor `1..=m`, with processors labelled in order of first use
/// so that each partition is seen once. Visits are in lexicographic order.
fn for_each_assignment(
    n: usize,
    m: usize,
    limit: u64,
    mut visit: impl FnMut(&[usize]),
) -> Result<(), SolverError> {
    fn rec(
        a: &mut Vec<usize>,
        n: usize,
        m: usize,
        used: usize,
        count: &mut u64,
        limit: u64,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<(), SolverError> {
        if a.len() == n {
            *count += 1;
            if *count > limit {
                return Err(SolverError::CandidateLimit(limit));
            }
            visit(a);
            return Ok(());
        }
        for label in 0..=(used + 1).min(m) {
            a.push(label);
            rec(a, n, m, used.max(label), count, limit, visit)?;
            a.pop();
        }
        Ok(())
    }
    let mut count = 0;
    rec(
        &mut Vec::with_capacity(n),
        n,
        m,
        0,
        &mut count,
        limit,
        &mut visit,
    )
}

fn masks(assignment: &[usize], m: usize) -> Vec<usize> {
    let mut out = vec![0usize; m];
    for (j, &label) in assignment.iter().enumerate() {
        if label > 0 {
            out[label - 1] |= 1 << j;
        }
    }
    out
}

fn check_size(inst: &Instance, limits: &SearchLimits) -> Result<(), SolverError> {
    if inst.len() > limits.max_jobs {
        return Err(SolverError::TooLarge {
            n: inst.len(),
            max: limits.max_jobs,
        });
    }
    Ok(())
}

fn schedule_of(inst: &Instance, orders: &[&Vec<usize>]) -> SyncSchedule {
    SyncSchedule::new(
        orders
            .iter()
            .map(|o| o.iter().map(|&j| inst.jobs()[j].id.clone()).collect())
            .collect(),
    )
}

/// Exact optimum by exhaustive search over assignments and orders.
///
/// Ties are broken towards the lexicographically smallest assignment vector
/// (job `j` to `0` for private only or to its processor), then towards the
/// lexicographically smallest order of job indices on each processor.
/// Processors are interchangeable, so the assignment returned labels them
/// in order of first use.
pub fn brute_force(
    inst: &Instance,
    limits: &SearchLimits,
) -> Result<(SyncSchedule, Dyadic), SolverError> {
    check_size(inst, limits)?;
    let m = inst.m();
    let table = SubsetTable::build(inst.jobs());
    let mut best: Option<(Dyadic, Vec<usize>)> = None;
    for_each_assignment(inst.len(), m, limits.max_candidates, |a| {
        let total: Dyadic = masks(a, m).iter().map(|&mask| &table.best[mask].0).sum();
        if best.as_ref().is_none_or(|(v, _)| total > *v) {
            best = Some((total, a.to_vec()));
        }
    })?;
    let (value, assignment) = best.expect("at least one assignment");
    let orders: Vec<&Vec<usize>> = masks(&assignment, m)
        .iter()
        .map(|&mask| &table.best[mask].1[0])
        .collect();
    Ok((schedule_of(inst, &orders), value))
}

/// Every optimal schedule, up to renaming the shared processors, together
/// with the optimal value. Schedules are listed in the tie-break order of
/// [`brute_force`], so the first one is its answer.
pub fn all_optima(
    inst: &Instance,
    limits: &SearchLimits,
) -> Result<(Dyadic, Vec<SyncSchedule>), SolverError> {
    check_size(inst, limits)?;
    let m = inst.m();
    let table = SubsetTable::build(inst.jobs());
    let mut best_value: Option<Dyadic> = None;
    let mut best_assignments: Vec<Vec<usize>> = Vec::new();
    for_each_assignment(inst.len(), m, limits.max_candidates, |a| {
        let total: Dyadic = masks(a, m).iter().map(|&mask| &table.best[mask].0).sum();
        match &best_value {
            Some(v) if total < *v => {}
            Some(v) if total == *v => best_assignments.push(a.to_vec()),
            _ => {
                best_value = Some(total);
                best_assignments = vec![a.to_vec()];
            }
        }
    })?;
    let mut schedules = Vec::new();
    for a in &best_assignments {
        let choices: Vec<&Vec<Vec<usize>>> = masks(a, m)
            .iter()
            .map(|&mask| &table.best[mask].1)
            .collect();
        let mut pick = vec![0usize; m];
        // odometer over the per-processor choices, last processor fastest
        'odometer: loop {
            let orders: Vec<&Vec<usize>> = (0..m).map(|r| &choices[r][pick[r]]).collect();
            schedules.push(schedule_of(inst, &orders));
            let mut r = m;
            loop {
                if r == 0 {
                    break 'odometer;
                }
                r -= 1;
                pick[r] += 1;
                if pick[r] < choices[r].len() {
                    continue 'odometer;
                }
                pick[r] = 0;
            }
        }
    }
    Ok((best_value.expect("at least one assignment"), schedules))
}

/// Applies improving adjacent exchanges until none is left.
///
/// Each candidate swap is evaluated in full, infeasible swaps are skipped,
/// and the first strict improvement found is taken. The value strictly
/// increases at every step, so the loop ends.
pub fn improve_by_exchanges(
    s: &SyncSchedule,
    inst: &Instance,
) -> Result<SyncSchedule, SolverError> {
    engine::evaluate(s, inst)?;
    let mut seqs = s.resolve(inst)?;
    'outer: loop {
        for seq in seqs.iter_mut() {
            let current = engine::sequence_value(seq).expect("kept feasible");
            for i in 1..seq.len() {
                let swapped = engine::swap_adjacent(seq, i);
                if let Ok(v) = engine::sequence_value(&swapped) {
                    if v > current {
                        *seq = swapped;
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    Ok(SyncSchedule::new(
        seqs.into_iter()
            .map(|seq| seq.into_iter().map(|j| j.id).collect())
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(m: usize, p: &[i64]) -> Instance {
        Instance::from_pairs(m, p.iter().map(|&p| (p, 1))).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Dyadic> {
        v.iter().map(|&x| Dyadic::from(x)).collect()
    }

    fn orders_p(s: &SyncSchedule, inst: &Instance) -> Vec<Vec<i64>> {
        s.resolve(inst)
            .unwrap()
            .iter()
            .map(|seq| seq.iter().map(|j| j.p.to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn positional_weights_shape() {
        let pw = PositionalWeights::new(5, 2);
        assert_eq!((pw.k, pw.r_prime), (3, 1));
        assert_eq!(pw.weights.len(), 5);
        let pw = PositionalWeights::new(4, 2);
        assert_eq!((pw.k, pw.r_prime), (2, 2));
        assert_eq!(
            pw.weights,
            vec![
                Dyadic::new(1, 1),
                Dyadic::new(1, 1),
                Dyadic::new(1, 2),
                Dyadic::new(1, 2)
            ]
        );
        assert!(pw.weights.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn five_jobs_two_processors() {
        let inst = unit(2, &[10, 9, 8, 7, 6]);
        let (s, v) = solve_equal_weights(&inst).unwrap();
        assert_eq!(v, Dyadic::from(14));
        assert_eq!(orders_p(&s, &inst), vec![vec![6, 8, 10], vec![7, 9]]);
        assert_eq!(
            equal_weights_value(&[ints(&[6, 8, 10]), ints(&[7, 9])]).unwrap(),
            Dyadic::from(14)
        );
        let pw = PositionalWeights::new(5, 2);
        assert_eq!(pw.matched_value(&ints(&[10, 9, 8, 7, 6])), Dyadic::from(14));
        assert_eq!(
            brute_force(&inst, &SearchLimits::default()).unwrap().1,
            Dyadic::from(14)
        );
    }

    #[test]
    fn small_equal_weight_examples() {
        assert_eq!(
            solve_equal_weights(&unit(1, &[4])).unwrap().1,
            Dyadic::from(2)
        );
        let inst = unit(2, &[4, 8]);
        assert_eq!(solve_equal_weights(&inst).unwrap().1, Dyadic::from(6));
        assert_eq!(
            brute_force(&inst, &SearchLimits::default()).unwrap().1,
            Dyadic::from(6)
        );
        let w = Instance::from_pairs(1, [(4, 1), (8, 2)]).unwrap();
        assert_eq!(solve_equal_weights(&w), Err(SolverError::UnequalWeights));
        let empty = Instance::new(2, vec![]).unwrap();
        assert_eq!(solve_equal_weights(&empty).unwrap().1, Dyadic::zero());
        assert_eq!(
            brute_force(&empty, &SearchLimits::default()).unwrap().1,
            Dyadic::zero()
        );
    }

    #[test]
    fn scaled_weights() {
        let inst = Instance::from_pairs(2, [10, 9, 8, 7, 6].map(|p| (p, 3))).unwrap();
        assert_eq!(solve_equal_weights(&inst).unwrap().1, Dyadic::from(42));
    }

    #[test]
    fn equal_weights_value_checks_order() {
        assert_eq!(
            equal_weights_value(&[ints(&[5])]).unwrap(),
            Dyadic::new(5, 1)
        );
        assert_eq!(
            equal_weights_value(&[ints(&[1]), ints(&[3, 2])]),
            Err(SolverError::NotAscending(2))
        );
    }

    #[test]
    fn single_processor_formula() {
        assert_eq!(single_processor_ascending(&ints(&[8, 4])), Dyadic::from(5));
        assert_eq!(single_processor_ascending(&ints(&[3])), Dyadic::new(3, 1));
        assert_eq!(
            single_processor_ascending(&ints(&[1, 1, 1])),
            Dyadic::new(7, 3)
        );
    }

    #[test]
    fn brute_force_p_equals_w() {
        let inst = Instance::from_pairs(1, [(8, 8), (9, 9), (10, 10)]).unwrap();
        let (s, v) = brute_force(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(v, Dyadic::new(293, 2));
        assert_eq!(orders_p(&s, &inst), vec![vec![9, 8, 10]]);
        let (v2, all) = all_optima(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(v2, v);
        let got: Vec<Vec<Vec<i64>>> = all.iter().map(|s| orders_p(s, &inst)).collect();
        assert_eq!(got, vec![vec![vec![9, 8, 10]], vec![vec![10, 8, 9]]]);
    }

    #[test]
    fn brute_force_limits() {
        let inst = unit(1, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(
            brute_force(&inst, &SearchLimits::default()).unwrap_err(),
            SolverError::TooLarge { n: 9, max: 8 }
        );
        let tight = SearchLimits {
            max_jobs: 8,
            max_candidates: 3,
        };
        assert_eq!(
            brute_force(&unit(1, &[1, 2, 3]), &tight).unwrap_err(),
            SolverError::CandidateLimit(3)
        );
    }

    #[test]
    fn brute_force_two_unit_jobs() {
        let inst = unit(1, &[8, 4]);
        let (s, v) = brute_force(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(v, Dyadic::from(5));
        assert_eq!(orders_p(&s, &inst), vec![vec![4, 8]]);
    }

    #[test]
    fn exchanges_sort_unit_jobs_ascending() {
        let inst = unit(1, &[10, 9, 8]);
        let s = SyncSchedule::new(vec![vec!["j1".into(), "j2".into(), "j3".into()]]);
        engine::evaluate(&s, &inst).unwrap();
        let out = improve_by_exchanges(&s, &inst).unwrap();
        assert_eq!(orders_p(&out, &inst), vec![vec![8, 9, 10]]);
        assert_eq!(improve_by_exchanges(&out, &inst).unwrap(), out);
    }

    #[test]
    fn assignments_are_canonical() {
        let mut seen = Vec::new();
        for_each_assignment(2, 2, 100, |a| seen.push(a.to_vec())).unwrap();
        assert_eq!(
            seen,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]
        );
    }
}
