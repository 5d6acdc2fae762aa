//! Synchronized schedules: feasibility, exact evaluation, exchange deltas,
//! structural predicates and the processing-time/weight duality.
//!
//! In a synchronized schedule every job that uses a shared processor finishes
//! there at the same instant as on its private processor, so the order of the
//! jobs on each shared processor determines everything. For an order
//! `j_1, ..., j_k` the start times follow `T_1 = 0`, `T_{i+1} = (T_i + p_i)/2`
//! and job `j_i` overlaps for `(p_i - T_i)/2` time units.
//!
//! Positions in this module are 1-based, matching the usual sequencing
//! notation: position `i` is the `i`-th job on the processor.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Dyadic, Instance, Job, JobId};

/// Per-processor job orders; jobs that are not listed run privately only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SyncSchedule {
    /// `sequences[r]` is the order on shared processor `r + 1`.
    pub sequences: Vec<Vec<JobId>>,
}

#[derive(Serialize, Deserialize)]
struct ProcessorOrder {
    id: usize,
    order: Vec<JobId>,
}

#[derive(Serialize, Deserialize)]
struct RawSyncSchedule {
    processors: Vec<ProcessorOrder>,
}

/// First position in a sequence whose job is too short for its start time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("position {position}: p = {p} does not exceed start time {start}")]
pub struct Infeasibility {
    /// 1-based position in the sequence.
    pub position: usize,
    pub p: Dyadic,
    pub start: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("malformed schedule JSON: {0}")]
    Json(String),
    #[error("processor id {0} is listed twice or is not >= 1")]
    BadProcessorId(usize),
    #[error("schedule uses {found} shared processors but the instance has {m}")]
    TooManyProcessors { found: usize, m: usize },
    #[error("unknown job `{0}`")]
    UnknownJob(JobId),
    #[error("job `{0}` appears more than once")]
    DuplicateJob(JobId),
    #[error("infeasible on processor {processor}: {violation}")]
    Infeasible {
        processor: usize,
        violation: Infeasibility,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: isize, lo: isize, hi: isize },
    #[error("job set is not processing-time-inclusive")]
    NotProcessingTimeInclusive,
    #[error("job set is not weight-inclusive")]
    NotWeightInclusive,
}

impl SyncSchedule {
    pub fn new(sequences: Vec<Vec<JobId>>) -> Self {
        SyncSchedule { sequences }
    }

    /// `m` empty processors.
    pub fn empty(m: usize) -> Self {
        SyncSchedule {
            sequences: vec![Vec::new(); m],
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScheduleError> {
        let raw: RawSyncSchedule =
            serde_json::from_str(text).map_err(|e| ScheduleError::Json(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawSyncSchedule) -> Result<Self, ScheduleError> {
        let count = raw.processors.iter().map(|p| p.id).max().unwrap_or(0);
        let mut sequences = vec![Vec::new(); count];
        let mut seen = HashSet::new();
        for proc in raw.processors {
            if proc.id == 0 || !seen.insert(proc.id) {
                return Err(ScheduleError::BadProcessorId(proc.id));
            }
            sequences[proc.id - 1] = proc.order;
        }
        Ok(SyncSchedule { sequences })
    }

    fn to_raw(&self) -> RawSyncSchedule {
        RawSyncSchedule {
            processors: self
                .sequences
                .iter()
                .enumerate()
                .map(|(r, order)| ProcessorOrder {
                    id: r + 1,
                    order: order.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("schedule serialization is infallible")
    }

    /// All job ids that use a shared processor.
    pub fn shared_jobs(&self) -> impl Iterator<Item = &JobId> {
        self.sequences.iter().flatten()
    }

    /// Looks up every listed job in `inst`, checking ids and processor count
    /// but not feasibility.
    pub fn resolve(&self, inst: &Instance) -> Result<Vec<Vec<Job>>, ScheduleError> {
        if self.sequences.len() > inst.m()
            && self.sequences[inst.m()..].iter().any(|s| !s.is_empty())
        {
            return Err(ScheduleError::TooManyProcessors {
                found: self.sequences.len(),
                m: inst.m(),
            });
        }
        let mut seen = HashSet::new();
        let mut out = vec![Vec::new(); inst.m()];
        for (r, seq) in self.sequences.iter().enumerate() {
            for id in seq {
                let job = inst
                    .job(id)
                    .ok_or_else(|| ScheduleError::UnknownJob(id.clone()))?;
                if !seen.insert(id) {
                    return Err(ScheduleError::DuplicateJob(id.clone()));
                }
                out[r].push(job.clone());
            }
        }
        Ok(out)
    }
}

impl Serialize for SyncSchedule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SyncSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSyncSchedule::deserialize(deserializer)?;
        SyncSchedule::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

/// Start times and overlaps on one shared processor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessorReport {
    pub id: usize,
    pub order: Vec<JobId>,
    /// `T_1..T_{k+1}`; the last entry is the processor's makespan.
    pub start_times: Vec<Dyadic>,
    /// Overlap of each job in `order`.
    pub overlaps: Vec<Dyadic>,
    pub value: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobOverlap {
    pub id: JobId,
    pub overlap: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub processors: Vec<ProcessorReport>,
    /// Overlap of every instance job, in instance order (zero when private).
    pub jobs: Vec<JobOverlap>,
    pub total: Dyadic,
}

/// `T_1, ..., T_{k+1}` for the sequence.
pub fn start_times(perm: &[Job]) -> Vec<Dyadic> {
    let mut out = Vec::with_capacity(perm.len() + 1);
    let mut t = Dyadic::zero();
    for job in perm {
        let next = (&t + &job.p).halve();
        out.push(t);
        t = next;
    }
    out.push(t);
    out
}

/// Overlap `(p_i - T_i)/2` of every job in the sequence.
pub fn overlaps(perm: &[Job]) -> Vec<Dyadic> {
    let starts = start_times(perm);
    perm.iter()
        .zip(&starts)
        .map(|(job, t)| (&job.p - t).halve())
        .collect()
}

/// Checks `p_i > T_i` at every position; the first failure is returned.
pub fn check_feasible(perm: &[Job]) -> Result<(), Infeasibility> {
    let mut t = Dyadic::zero();
    for (i, job) in perm.iter().enumerate() {
        if job.p <= t {
            return Err(Infeasibility {
                position: i + 1,
                p: job.p.clone(),
                start: t,
            });
        }
        t = (&t + &job.p).halve();
    }
    Ok(())
}

/// Total weighted overlap of one feasible sequence via the start-time
/// recurrence.
pub fn sequence_value(perm: &[Job]) -> Result<Dyadic, Infeasibility> {
    check_feasible(perm)?;
    Ok(recurrence_value(perm))
}

pub(crate) fn recurrence_value(perm: &[Job]) -> Dyadic {
    let mut t = Dyadic::zero();
    let mut total = Dyadic::zero();
    for job in perm {
        total += (&job.p - &t).halve() * &job.w;
        t = (&t + &job.p).halve();
    }
    total
}

/// Evaluates a whole schedule; jobs not on any shared processor contribute 0.
pub fn evaluate(s: &SyncSchedule, inst: &Instance) -> Result<EvalReport, ScheduleError> {
    let resolved = s.resolve(inst)?;
    let mut processors = Vec::with_capacity(resolved.len());
    let mut per_job = vec![Dyadic::zero(); inst.len()];
    let mut total = Dyadic::zero();
    for (r, perm) in resolved.iter().enumerate() {
        check_feasible(perm).map_err(|violation| ScheduleError::Infeasible {
            processor: r + 1,
            violation,
        })?;
        let starts = start_times(perm);
        let ovl = overlaps(perm);
        let value: Dyadic = perm.iter().zip(&ovl).map(|(j, t)| t * &j.w).sum();
        for (job, t) in perm.iter().zip(&ovl) {
            per_job[inst.position(&job.id).expect("resolved job")] = t.clone();
        }
        total += &value;
        processors.push(ProcessorReport {
            id: r + 1,
            order: perm.iter().map(|j| j.id.clone()).collect(),
            start_times: starts,
            overlaps: ovl,
            value,
        });
    }
    let jobs = inst
        .jobs()
        .iter()
        .zip(per_job)
        .map(|(j, overlap)| JobOverlap {
            id: j.id.clone(),
            overlap,
        })
        .collect();
    Ok(EvalReport {
        processors,
        jobs,
        total,
    })
}

/// Strictly lower-triangular `k x k` matrix with `2^{-(r-c)}` below the
/// diagonal.
pub fn lower_shift_matrix(k: usize) -> Vec<Vec<Dyadic>> {
    (0..k)
        .map(|r| {
            (0..k)
                .map(|c| {
                    if r > c {
                        Dyadic::pow2_recip((r - c) as u32)
                    } else {
                        Dyadic::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Transpose of [`lower_shift_matrix`].
pub fn upper_shift_matrix(k: usize) -> Vec<Vec<Dyadic>> {
    (0..k)
        .map(|r| {
            (0..k)
                .map(|c| {
                    if c > r {
                        Dyadic::pow2_recip((c - r) as u32)
                    } else {
                        Dyadic::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `x · A · yᵀ` for row vectors `x`, `y`.
pub fn bilinear(x: &[Dyadic], a: &[Vec<Dyadic>], y: &[Dyadic]) -> Dyadic {
    let mut acc = Dyadic::zero();
    for (r, row) in a.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            if !entry.is_zero() {
                acc += &x[r] * entry * &y[c];
            }
        }
    }
    acc
}

fn identity_matrix(k: usize) -> Vec<Vec<Dyadic>> {
    (0..k)
        .map(|r| (0..k).map(|c| Dyadic::from(u8::from(r == c))).collect())
        .collect()
}

/// Total weighted overlap through the matrix form
/// `½·P·I·Wᵀ − ½·W·L·Pᵀ`.
///
/// This is a second, independent route to [`sequence_value`]; it does not
/// check feasibility.
pub fn evaluate_matrix(perm: &[Job]) -> Dyadic {
    let k = perm.len();
    let p: Vec<Dyadic> = perm.iter().map(|j| j.p.clone()).collect();
    let w: Vec<Dyadic> = perm.iter().map(|j| j.w.clone()).collect();
    let diag = bilinear(&p, &identity_matrix(k), &w);
    let lower = bilinear(&w, &lower_shift_matrix(k), &p);
    (diag - lower).halve()
}

/// `W_i = Σ_{ℓ=i+2}^{k} w_ℓ / 2^{ℓ-i-1}` for `-1 <= i <= k-2`.
pub fn suffix_weight(perm: &[Job], i: isize) -> Result<Dyadic, EngineError> {
    let k = perm.len() as isize;
    if i < -1 || i > k - 2 {
        return Err(EngineError::IndexOutOfRange {
            index: i,
            lo: -1,
            hi: k - 2,
        });
    }
    Ok(suffix_weight_unchecked(perm, i))
}

/// Same sum for any `i >= -1`; empty ranges give zero.
fn suffix_weight_unchecked(perm: &[Job], i: isize) -> Dyadic {
    let k = perm.len() as isize;
    ((i + 2).max(1)..=k)
        .map(|l| perm[(l - 1) as usize].w.div_pow2((l - i - 1) as u32))
        .sum()
}

/// Sum of `values[ℓ] / 2^(ℓ - start + 1)` over `ℓ >= start` (0-based slice
/// indices); the weighted tail that pulling and pushing trade against.
pub(crate) fn halving_tail(values: &[Dyadic]) -> Dyadic {
    values
        .iter()
        .enumerate()
        .map(|(d, v)| v.div_pow2(d as u32 + 1))
        .sum()
}

/// Value change `value(perm) − value(perm with positions i, i+1 swapped)`
/// in closed form, for processing-time-inclusive job sets.
///
/// ```text
/// (w_{i+1} − w_i)·T_i/4 + (p_i − p_{i+1})·W_i/4 + w_i·p_{i+1}/4 − w_{i+1}·p_i/4
/// ```
///
/// The tail coefficient is `W_i` (the weights from position `i+2` on,
/// halved once per step), which is what the recurrence produces.
pub fn exchange_delta(perm: &[Job], i: usize) -> Result<Dyadic, EngineError> {
    let k = perm.len();
    if i < 1 || i + 1 > k {
        return Err(EngineError::IndexOutOfRange {
            index: i as isize,
            lo: 1,
            hi: k as isize - 1,
        });
    }
    if !is_processing_time_inclusive(perm) {
        return Err(EngineError::NotProcessingTimeInclusive);
    }
    let (a, b) = (&perm[i - 1], &perm[i]);
    let t_i = start_times(&perm[..i - 1]).pop().expect("non-empty");
    let tail = suffix_weight_unchecked(perm, i as isize);
    let quarter = (&b.w - &a.w) * &t_i + (&a.p - &b.p) * &tail + &a.w * &b.p - &b.w * &a.p;
    Ok(quarter.div_pow2(2))
}

/// The sequence with positions `i` and `i + 1` (1-based) exchanged.
pub fn swap_adjacent(perm: &[Job], i: usize) -> Vec<Job> {
    let mut out = perm.to_vec();
    out.swap(i - 1, i);
    out
}

fn inclusive(values: impl Iterator<Item = Dyadic>) -> bool {
    let mut v: Vec<Dyadic> = values.collect();
    if v.len() <= 1 {
        return true;
    }
    v.sort();
    let k = v.len();
    let x: Dyadic = (1..k).map(|l| v[l].div_pow2((k - l) as u32)).sum();
    x < v[0]
}

/// With processing times sorted ascending, the ascending-order makespan of
/// all jobs but the shortest is strictly below the shortest time.
pub fn is_processing_time_inclusive(jobs: &[Job]) -> bool {
    inclusive(jobs.iter().map(|j| j.p.clone()))
}

/// [`is_processing_time_inclusive`] applied to the weights.
pub fn is_weight_inclusive(jobs: &[Job]) -> bool {
    inclusive(jobs.iter().map(|j| j.w.clone()))
}

/// Position (1-based) of the first interior peak that breaks the
/// non-increasing-then-non-decreasing shape, if any.
pub fn v_shape_violation(perm: &[Job]) -> Option<usize> {
    let p: Vec<&Dyadic> = perm.iter().map(|j| &j.p).collect();
    let mut i = 0;
    while i + 1 < p.len() && p[i] >= p[i + 1] {
        i += 1;
    }
    while i + 1 < p.len() && p[i] <= p[i + 1] {
        i += 1;
    }
    (i + 1 < p.len()).then_some(i + 1)
}

pub fn is_v_shaped(perm: &[Job]) -> bool {
    v_shape_violation(perm).is_none()
}

/// Reverses the sequence and exchanges every job's processing time and
/// weight. Requires the job set to be both processing-time- and
/// weight-inclusive, under which the value is preserved.
pub fn reverse_dual(perm: &[Job]) -> Result<Vec<Job>, EngineError> {
    if !is_processing_time_inclusive(perm) {
        return Err(EngineError::NotProcessingTimeInclusive);
    }
    if !is_weight_inclusive(perm) {
        return Err(EngineError::NotWeightInclusive);
    }
    Ok(perm.iter().rev().map(Job::transposed).collect())
}
