mod common;

use itertools::Itertools;
use proptest::prelude::*;
use rand::Rng;

use common::*;
use wsmp::engine::{self, evaluate_matrix, sequence_value};
use wsmp::hardness::{self, N3dmInput};
use wsmp::solvers::{self, PositionalWeights, SearchLimits};
use wsmp::transforms::{self, GeneralSchedule};
use wsmp::{Dyadic, Instance, Job, SyncSchedule};

fn jobs_strategy(max_len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1i64..=100, 1i64..=100), 1..=max_len)
}

fn to_jobs(v: &[(i64, i64)]) -> Vec<Job> {
    v.iter()
        .enumerate()
        .map(|(i, &(p, w))| job(format!("j{i}"), p, w))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn recurrence_matrix_and_oracle_agree(v in jobs_strategy(8)) {
        let seq = to_jobs(&v);
        match seq_value(&seq) {
            Some(expected) => {
                let rec = sequence_value(&seq).unwrap();
                prop_assert_eq!(q(&rec), expected);
                prop_assert_eq!(rec, evaluate_matrix(&seq));
            }
            None => prop_assert!(sequence_value(&seq).is_err()),
        }
    }

    #[test]
    fn ascending_order_is_always_feasible(mut v in jobs_strategy(8)) {
        v.sort();
        let seq = to_jobs(&v);
        prop_assert!(engine::check_feasible(&seq).is_ok());
        let t = engine::start_times(&seq);
        prop_assert!(t.windows(2).all(|x| x[0] < x[1]));
    }

    #[test]
    fn pipeline_passes_keep_their_contracts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=3);
        let inst = random_instance(&mut r, n, m, 12, 9);
        let g = random_general(&mut r, &inst);
        let v0 = general_value(&g, &inst);

        let g1 = transforms::normalize(&g, &inst).unwrap();
        prop_assert!(transforms::validate(&g1, &inst).is_empty());
        prop_assert!(g1.is_normal());
        prop_assert_eq!(general_value(&g1, &inst), v0.clone());

        let g2 = transforms::compact_idle(&g1, &inst).unwrap();
        prop_assert!(transforms::validate(&g2, &inst).is_empty());
        prop_assert!(g2.is_normal());
        let v2 = general_value(&g2, &inst);
        prop_assert!(v2 >= v0);
        for proc in 1..=m {
            // no idle time before the last completion
            let busy: Q = g2.jobs.iter()
                .filter(|j| j.shared_processor == Some(proc))
                .flat_map(|j| j.shared_intervals.iter())
                .map(|iv| q(&iv.len()))
                .sum();
            let last = g2.jobs.iter()
                .filter(|j| j.shared_processor == Some(proc))
                .map(|j| q(&j.shared_completion()))
                .max()
                .unwrap_or_default();
            prop_assert_eq!(busy, last);
        }

        let g3 = transforms::merge_preemptions(&g2, &inst).unwrap();
        prop_assert!(transforms::validate(&g3, &inst).is_empty());
        prop_assert!(g3.is_normal() && g3.is_non_preemptive());
        prop_assert_eq!(general_value(&g3, &inst), v2.clone());

        let g4 = transforms::reorder(&g3, &inst).unwrap();
        prop_assert!(transforms::validate(&g4, &inst).is_empty());
        prop_assert!(g4.is_ordered());
        prop_assert_eq!(general_value(&g4, &inst), v2);

        // every pass is a fixpoint on its own output
        prop_assert_eq!(transforms::reorder(&g4, &inst).unwrap(), g4.clone());
        prop_assert_eq!(transforms::merge_preemptions(&g4, &inst).unwrap(), g4.clone());
        prop_assert_eq!(transforms::normalize(&g4, &inst).unwrap(), g4);
    }

    #[test]
    fn synchronized_input_is_a_fixpoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=3);
        let inst = random_instance(&mut r, n, m, 30, 10);
        let s = random_sync(&mut r, &inst);
        let g = GeneralSchedule::from_sync(&s, &inst).unwrap();
        prop_assert!(g.is_synchronized());
        prop_assert_eq!(Some(general_value(&g, &inst)), schedule_value(&s, &inst));
        let out = transforms::synchronize(&g, &inst).unwrap();
        prop_assert_eq!(out.schedule, s);
        prop_assert_eq!(out.push_iterations, 0);
    }

    #[test]
    fn exchange_heuristic_is_safe(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let m = r.gen_range(1..=2);
        let inst = random_instance(&mut r, n, m, 40, 10);
        let s = random_sync(&mut r, &inst);
        let before = schedule_value(&s, &inst).unwrap();
        let out = solvers::improve_by_exchanges(&s, &inst).unwrap();
        let after = schedule_value(&out, &inst);
        prop_assert!(after.is_some(), "heuristic returned an infeasible schedule");
        prop_assert!(after.unwrap() >= before);
        let mut a = s.shared_jobs().cloned().collect_vec();
        let mut b = out.shared_jobs().cloned().collect_vec();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn extra_jobs_can_go_to_any_processors(p in prop::collection::vec(1i64..=50, 1..=9), m in 1usize..=4) {
        // the r' jobs matched with 1/2^k may sit on any r' of the m processors
        let mut desc = p.clone();
        desc.sort_by(|a, b| b.cmp(a));
        let pw = PositionalWeights::new(desc.len(), m);
        let head = (pw.k - 1) * m;
        let mut values = Vec::new();
        for chosen in (0..m).combinations(pw.r_prime) {
            let mut parts: Vec<Vec<Dyadic>> = vec![Vec::new(); m];
            for (i, &x) in desc[..head].iter().enumerate() {
                parts[i % m].push(Dyadic::from(x));
            }
            for (&x, &proc) in desc[head..].iter().zip(&chosen) {
                parts[proc].push(Dyadic::from(x));
            }
            for part in &mut parts {
                part.sort();
            }
            values.push(solvers::equal_weights_value(&parts).unwrap());
        }
        let expected = pw.matched_value(&desc.iter().map(|&x| Dyadic::from(x)).collect_vec());
        prop_assert!(values.iter().all(|v| *v == expected));
    }

    #[test]
    fn equal_weights_value_matches_engine(p in prop::collection::vec(1i64..=50, 0..=9), m in 1usize..=3) {
        let inst = Instance::from_pairs(m, p.iter().map(|&x| (x, 1))).unwrap();
        let (s, v) = solvers::solve_equal_weights(&inst).unwrap();
        let parts: Vec<Vec<Dyadic>> = s.resolve(&inst).unwrap().iter().map(|seq| seq.iter().map(|j| j.p.clone()).collect()).collect();
        prop_assert_eq!(solvers::equal_weights_value(&parts).unwrap(), v.clone());
        prop_assert_eq!(Some(q(&v)), schedule_value(&s, &inst));
        prop_assert_eq!(s.shared_jobs().count(), p.len());
    }

    #[test]
    fn generated_instances_are_separated_and_feasible(
        n in 1usize..=3,
        b in 0i64..=40,
        seed in any::<u64>(),
    ) {
        // entries above the target can never be matched, so they are not generated
        let mut r = rng(seed);
        let mut entries = || (0..n).map(|_| r.gen_range(0..=b)).collect_vec();
        let (x, y, z) = (entries(), entries(), entries());
        let input = N3dmInput::new(x, y, z, b).unwrap();
        let hi = hardness::gen_instance(&input).unwrap();
        let times = |prefix: char| hi.inst.jobs().iter()
            .filter(|j| j.id.as_str().starts_with(prefix))
            .map(|j| j.p.clone())
            .collect_vec();
        let (a, bs, c) = (times('A'), times('B'), times('C'));
        prop_assert!(bs.iter().max() < a.iter().min());
        prop_assert!(a.iter().max() < c.iter().min());
        prop_assert!(hi.inst.jobs().iter().all(|j| j.p == j.w));
        prop_assert!(hi.big_m > 7 * (hi.m_param * hi.m_param + b) && hi.m_param > b.max(6));

        let two_m = Dyadic::from(2 * hi.big_m);
        let mut sums = Vec::new();
        for ys in (0..n).permutations(n) {
            for zs in (0..n).permutations(n) {
                let matching = (0..n).map(|l| (l, ys[l], zs[l])).collect_vec();
                let s = hardness::equitable_schedule(&hi, &matching).unwrap();
                let report = engine::evaluate(&s, &hi.inst).unwrap();
                prop_assert!(report.processors.iter().all(|p| p.start_times[2] < two_m));
                let deltas = (1..=n).map(|l| hardness::processor_delta(&s, &hi, l).unwrap()).collect_vec();
                prop_assert_eq!(hardness::h_value_direct(&deltas, &hi).unwrap(), report.total.clone());
                sums.push((deltas.iter().map(|d| d * d).sum::<i64>(), deltas.iter().sum::<i64>(), report.total));
            }
        }
        // ΣΔ depends only on the input, and values fall strictly as ΣΔ² grows
        prop_assert!(sums.iter().map(|s| s.1).all_equal());
        for (s1, s2) in sums.iter().tuple_combinations() {
            if s1.0 < s2.0 {
                prop_assert!(s1.2 > s2.2);
            }
            if s1.0 == s2.0 {
                prop_assert_eq!(&s1.2, &s2.2);
            }
        }
    }

    #[test]
    fn zero_sum_deltas_when_target_balances(v in prop::collection::vec((0i64..=10, 0i64..=10, 0i64..=10), 1..=4)) {
        let n = v.len() as i64;
        let total: i64 = v.iter().map(|t| t.0 + t.1 + t.2).sum();
        prop_assume!(total % n == 0);
        let input = N3dmInput::new(
            v.iter().map(|t| t.0).collect(),
            v.iter().map(|t| t.1).collect(),
            v.iter().map(|t| t.2).collect(),
            total / n,
        ).unwrap();
        let hi = hardness::gen_instance(&input).unwrap();
        let identity = (0..v.len()).map(|l| (l, l, l)).collect_vec();
        let s = hardness::equitable_schedule(&hi, &identity).unwrap();
        let sum: i64 = (1..=v.len()).map(|l| hardness::processor_delta(&s, &hi, l).unwrap()).sum();
        prop_assert_eq!(sum, 0);
    }
}

#[test]
fn unit_weight_brute_force_matches_single_processor_formula() {
    for p in [vec![4, 8], vec![1, 1, 1], vec![3, 9, 5, 7]] {
        let inst = Instance::from_pairs(1, p.iter().map(|&x| (x, 1))).unwrap();
        let (_, v) = solvers::brute_force(&inst, &SearchLimits::default()).unwrap();
        let formula =
            solvers::single_processor_ascending(&p.iter().map(|&x| Dyadic::from(x)).collect_vec());
        assert_eq!(v, formula);
    }
}

#[test]
fn printed_and_direct_h_differ_only_by_a_constant() {
    let input = N3dmInput::new(vec![1, 4], vec![0, 3], vec![2, 5], 7).unwrap();
    let hi = hardness::gen_instance(&input).unwrap();
    let gap =
        |d: &[i64]| hardness::h_value_direct(d, &hi).unwrap() - hardness::h_value(d, &hi).unwrap();
    assert_eq!(gap(&[0, 0]), gap(&[3, -3]));
    assert_eq!(gap(&[1, 2]), gap(&[-5, 5]));
    assert!(gap(&[0, 0]).is_positive());
}

#[test]
fn sync_schedule_json_round_trip() {
    let s = SyncSchedule::new(vec![vec!["a".into(), "b".into()], vec![], vec!["c".into()]]);
    assert_eq!(SyncSchedule::from_json(&s.to_json()).unwrap(), s);
}
