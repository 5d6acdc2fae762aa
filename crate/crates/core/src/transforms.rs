//! Interval-level schedules and the pipeline that turns any feasible
//! schedule into a synchronized one of no smaller value.
//!
//! A [`GeneralSchedule`] gives every job an optional shared processor, a set
//! of open shared intervals and a private interval `(0, c)`. The overlap of a
//! job is the measure of its shared intervals inside `(0, c)`.
//!
//! The canonicalization passes run in a fixed order, each one establishing
//! the precondition of the next:
//!
//! 1. [`normalize`]: no job finishes on its shared processor after its
//!    private one.
//! 2. [`compact_idle`]: no idle time on a shared processor before its last
//!    completion.
//! 3. [`merge_preemptions`]: every job occupies one shared interval.
//! 4. [`reorder`]: shared and private completion orders agree.
//! 5. A loop of [`push`] (and, on schedules that are not optimal, [`pull`])
//!    steps until every shared job finishes simultaneously on both of its
//!    processors.
//!
//! [`synchronize`] runs all of them.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, halving_tail, ScheduleError, SyncSchedule};
use crate::{Dyadic, Instance, JobId};

/// Open interval `(start, end)`; serialized as `["start", "end"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(Dyadic, Dyadic)", into = "(Dyadic, Dyadic)")]
pub struct Interval {
    pub start: Dyadic,
    pub end: Dyadic,
}

impl Interval {
    pub fn new(start: impl Into<Dyadic>, end: impl Into<Dyadic>) -> Self {
        Interval {
            start: start.into(),
            end: end.into(),
        }
    }

    pub fn len(&self) -> Dyadic {
        &self.end - &self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Measure of `self ∩ (lo, hi)`.
    fn clipped_len(&self, lo: &Dyadic, hi: &Dyadic) -> Dyadic {
        let a = (&self.start).max(lo);
        let b = (&self.end).min(hi);
        if b > a {
            b - a
        } else {
            Dyadic::zero()
        }
    }
}

impl From<(Dyadic, Dyadic)> for Interval {
    fn from((start, end): (Dyadic, Dyadic)) -> Self {
        Interval { start, end }
    }
}

impl From<Interval> for (Dyadic, Dyadic) {
    fn from(i: Interval) -> Self {
        (i.start, i.end)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// Where and when one job runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobPlacement {
    pub id: JobId,
    /// 1-based shared processor, if any.
    pub shared_processor: Option<usize>,
    #[serde(default)]
    pub shared_intervals: Vec<Interval>,
    /// The job runs privately in `(0, private_completion)`.
    pub private_completion: Dyadic,
}

impl JobPlacement {
    pub fn shared_len(&self) -> Dyadic {
        self.shared_intervals.iter().map(Interval::len).sum()
    }

    /// `C^M`: completion on the shared processor, zero if unused.
    pub fn shared_completion(&self) -> Dyadic {
        self.shared_intervals
            .iter()
            .map(|i| i.end.clone())
            .max()
            .unwrap_or_default()
    }

    /// Start on the shared processor, zero if unused.
    pub fn shared_start(&self) -> Dyadic {
        self.shared_intervals
            .iter()
            .map(|i| i.start.clone())
            .min()
            .unwrap_or_default()
    }

    fn uses_shared(&self) -> bool {
        self.shared_processor.is_some() && !self.shared_intervals.is_empty()
    }

    fn is_synchronized(&self) -> bool {
        !self.uses_shared() || self.shared_completion() == self.private_completion
    }

    /// Sorts the intervals and fuses touching ones, dropping empty pieces.
    fn tidy(&mut self) {
        let mut v: Vec<Interval> = self
            .shared_intervals
            .drain(..)
            .filter(|i| !i.is_empty())
            .collect();
        v.sort_by(|a, b| a.start.cmp(&b.start));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if last.end == iv.start => last.end = iv.end,
                _ => out.push(iv),
            }
        }
        self.shared_intervals = out;
    }

    fn evict(&mut self) {
        self.shared_intervals.clear();
        self.shared_processor = None;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GeneralSchedule {
    pub jobs: Vec<JobPlacement>,
}

/// One broken feasibility rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("job `{0}` is not in the instance")]
    UnknownJob(JobId),
    #[error("job `{0}` has no placement")]
    MissingJob(JobId),
    #[error("job `{0}` is placed twice")]
    DuplicateJob(JobId),
    #[error("job `{job}`: interval {interval} is empty or reversed")]
    EmptyInterval { job: JobId, interval: Interval },
    #[error("job `{job}`: negative time in {what}")]
    NegativeTime { job: JobId, what: String },
    #[error("job `{job}`: its own shared intervals {a} and {b} overlap")]
    SelfOverlap {
        job: JobId,
        a: Interval,
        b: Interval,
    },
    #[error("job `{0}` has shared intervals but no shared processor")]
    NoProcessor(JobId),
    #[error("job `{job}`: shared processor {processor} out of range 1..={m}")]
    ProcessorOutOfRange {
        job: JobId,
        processor: usize,
        m: usize,
    },
    #[error("job `{job}`: length mismatch, intervals total {found} but p = {expected}")]
    LengthMismatch {
        job: JobId,
        expected: Dyadic,
        found: Dyadic,
    },
    #[error("processor {processor}: `{a}` in {ia} overlaps `{b}` in {ib}")]
    ProcessorConflict {
        processor: usize,
        a: JobId,
        ia: Interval,
        b: JobId,
        ib: Interval,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("invalid schedule: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("schedule is not normal: job `{0}` finishes later on its shared processor")]
    NotNormal(JobId),
    #[error("schedule is preemptive: job `{0}` has several shared intervals")]
    Preemptive(JobId),
    #[error("schedule is not ordered on processor {0}")]
    NotOrdered(usize),
    #[error("processor {processor} has {k} jobs; position {i} is out of range 2..={}", .k + 1)]
    PositionOutOfRange {
        processor: usize,
        i: usize,
        k: usize,
    },
    #[error(
        "job `{0}` after the operated position does not finish simultaneously on both processors"
    )]
    SuffixNotSynchronized(JobId),
    #[error("idle time before job `{0}` on its shared processor")]
    NotContiguous(JobId),
    #[error("epsilon {0} out of range")]
    EpsilonOutOfRange(Dyadic),
    #[error("schedule JSON: {0}")]
    Json(String),
}

impl GeneralSchedule {
    pub fn from_json(text: &str) -> Result<Self, TransformError> {
        serde_json::from_str(text).map_err(|e| TransformError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization is infallible")
    }

    /// Interval form of a synchronized schedule: the `i`-th job on a
    /// processor runs there in `(T_i, T_{i+1})` and privately in
    /// `(0, T_{i+1})`.
    pub fn from_sync(s: &SyncSchedule, inst: &Instance) -> Result<Self, ScheduleError> {
        let resolved = s.resolve(inst)?;
        let mut placed: HashMap<&JobId, JobPlacement> = HashMap::new();
        for (r, perm) in resolved.iter().enumerate() {
            engine::check_feasible(perm).map_err(|violation| ScheduleError::Infeasible {
                processor: r + 1,
                violation,
            })?;
            let t = engine::start_times(perm);
            for (i, job) in perm.iter().enumerate() {
                placed.insert(
                    &job.id,
                    JobPlacement {
                        id: job.id.clone(),
                        shared_processor: Some(r + 1),
                        shared_intervals: vec![Interval::new(t[i].clone(), t[i + 1].clone())],
                        private_completion: t[i + 1].clone(),
                    },
                );
            }
        }
        let jobs = inst
            .jobs()
            .iter()
            .map(|job| {
                placed.remove(&job.id).unwrap_or_else(|| JobPlacement {
                    id: job.id.clone(),
                    shared_processor: None,
                    shared_intervals: Vec::new(),
                    private_completion: job.p.clone(),
                })
            })
            .collect();
        Ok(GeneralSchedule { jobs })
    }

    /// Orders of the jobs on each shared processor by start time.
    pub fn to_sync(&self, m: usize) -> SyncSchedule {
        let mut s = SyncSchedule::empty(m);
        for r in 1..=m {
            s.sequences[r - 1] = self
                .processor_jobs(r)
                .into_iter()
                .map(|ix| self.jobs[ix].id.clone())
                .collect();
        }
        s
    }

    /// Indices of the jobs that use shared processor `r`, sorted by shared
    /// completion time.
    pub fn processor_jobs(&self, r: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.jobs.len())
            .filter(|&ix| {
                self.jobs[ix].shared_processor == Some(r)
                    && !self.jobs[ix].shared_intervals.is_empty()
            })
            .collect();
        v.sort_by_cached_key(|&ix| self.jobs[ix].shared_completion());
        v
    }

    fn max_processor(&self) -> usize {
        self.jobs
            .iter()
            .filter_map(|j| j.shared_processor)
            .max()
            .unwrap_or(0)
    }

    pub fn is_normal(&self) -> bool {
        self.first_abnormal().is_none()
    }

    fn first_abnormal(&self) -> Option<&JobPlacement> {
        self.jobs
            .iter()
            .find(|j| j.shared_completion() > j.private_completion)
    }

    pub fn is_non_preemptive(&self) -> bool {
        self.jobs.iter().all(|j| j.shared_intervals.len() <= 1)
    }

    /// Normal, non-preemptive, and on every processor no job finishes
    /// earlier on the shared processor but later privately than another.
    pub fn is_ordered(&self) -> bool {
        self.is_normal() && self.is_non_preemptive() && self.first_unordered().is_none()
    }

    fn first_unordered(&self) -> Option<(usize, usize)> {
        for r in 1..=self.max_processor() {
            let jobs = self.processor_jobs(r);
            for t in 0..jobs.len().saturating_sub(1) {
                if self.jobs[jobs[t]].private_completion > self.jobs[jobs[t + 1]].private_completion
                {
                    return Some((r, t));
                }
            }
        }
        None
    }

    pub fn is_synchronized(&self) -> bool {
        self.is_normal()
            && self.is_non_preemptive()
            && self.jobs.iter().all(JobPlacement::is_synchronized)
    }

    fn tidy(&mut self) {
        for j in &mut self.jobs {
            j.tidy();
        }
    }
}

/// Lists every broken feasibility rule; an empty list means `g` is a
/// feasible schedule for `inst`.
pub fn validate(g: &GeneralSchedule, inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let zero = Dyadic::zero();
    for pl in &g.jobs {
        let Some(job) = inst.job(&pl.id) else {
            out.push(Violation::UnknownJob(pl.id.clone()));
            continue;
        };
        if !seen.insert(&pl.id) {
            out.push(Violation::DuplicateJob(pl.id.clone()));
            continue;
        }
        if pl.private_completion < zero {
            out.push(Violation::NegativeTime {
                job: pl.id.clone(),
                what: "private completion".into(),
            });
        }
        for iv in &pl.shared_intervals {
            if iv.is_empty() {
                out.push(Violation::EmptyInterval {
                    job: pl.id.clone(),
                    interval: iv.clone(),
                });
            }
            if iv.start < zero {
                out.push(Violation::NegativeTime {
                    job: pl.id.clone(),
                    what: format!("interval {iv}"),
                });
            }
        }
        for (a, ia) in pl.shared_intervals.iter().enumerate() {
            for ib in &pl.shared_intervals[a + 1..] {
                if ia.overlaps(ib) {
                    out.push(Violation::SelfOverlap {
                        job: pl.id.clone(),
                        a: ia.clone(),
                        b: ib.clone(),
                    });
                }
            }
        }
        match pl.shared_processor {
            None if !pl.shared_intervals.is_empty() => {
                out.push(Violation::NoProcessor(pl.id.clone()))
            }
            Some(r) if r < 1 || r > inst.m() => out.push(Violation::ProcessorOutOfRange {
                job: pl.id.clone(),
                processor: r,
                m: inst.m(),
            }),
            _ => {}
        }
        let total = pl.shared_len() + &pl.private_completion;
        if total != job.p {
            out.push(Violation::LengthMismatch {
                job: pl.id.clone(),
                expected: job.p.clone(),
                found: total,
            });
        }
    }
    for job in inst.jobs() {
        if !seen.contains(&job.id) {
            out.push(Violation::MissingJob(job.id.clone()));
        }
    }
    for r in 1..=inst.m() {
        let pieces: Vec<(&JobId, &Interval)> = g
            .jobs
            .iter()
            .filter(|pl| pl.shared_processor == Some(r))
            .flat_map(|pl| pl.shared_intervals.iter().map(move |iv| (&pl.id, iv)))
            .collect();
        for (x, (ja, ia)) in pieces.iter().enumerate() {
            for (jb, ib) in &pieces[x + 1..] {
                if ja != jb && ia.overlaps(ib) {
                    out.push(Violation::ProcessorConflict {
                        processor: r,
                        a: (*ja).clone(),
                        ia: (*ia).clone(),
                        b: (*jb).clone(),
                        ib: (*ib).clone(),
                    });
                }
            }
        }
    }
    out
}

fn ensure_valid(g: &GeneralSchedule, inst: &Instance) -> Result<(), TransformError> {
    let v = validate(g, inst);
    if v.is_empty() {
        Ok(())
    } else {
        Err(TransformError::Invalid(v))
    }
}

fn ensure_normal(g: &GeneralSchedule) -> Result<(), TransformError> {
    match g.first_abnormal() {
        Some(pl) => Err(TransformError::NotNormal(pl.id.clone())),
        None => Ok(()),
    }
}

fn ensure_non_preemptive(g: &GeneralSchedule) -> Result<(), TransformError> {
    match g.jobs.iter().find(|j| j.shared_intervals.len() > 1) {
        Some(pl) => Err(TransformError::Preemptive(pl.id.clone())),
        None => Ok(()),
    }
}

fn ensure_ordered(g: &GeneralSchedule) -> Result<(), TransformError> {
    ensure_normal(g)?;
    ensure_non_preemptive(g)?;
    match g.first_unordered() {
        Some((r, _)) => Err(TransformError::NotOrdered(r)),
        None => Ok(()),
    }
}

fn weight_of<'a>(inst: &'a Instance, pl: &JobPlacement) -> &'a Dyadic {
    &inst.job(&pl.id).expect("validated schedule").w
}

/// Total weighted overlap of a valid schedule.
pub fn value_general(g: &GeneralSchedule, inst: &Instance) -> Result<Dyadic, TransformError> {
    ensure_valid(g, inst)?;
    Ok(value_unchecked(g, inst))
}

fn value_unchecked(g: &GeneralSchedule, inst: &Instance) -> Dyadic {
    let zero = Dyadic::zero();
    g.jobs
        .iter()
        .filter(|pl| pl.shared_processor.is_some())
        .map(|pl| {
            let t: Dyadic = pl
                .shared_intervals
                .iter()
                .map(|iv| iv.clipped_len(&zero, &pl.private_completion))
                .sum();
            t * weight_of(inst, pl)
        })
        .sum()
}

/// Moves shared work done after a job's private completion onto its private
/// processor. The value is unchanged.
pub fn normalize(g: &GeneralSchedule, inst: &Instance) -> Result<GeneralSchedule, TransformError> {
    ensure_valid(g, inst)?;
    let mut out = g.clone();
    for pl in &mut out.jobs {
        let cp = pl.private_completion.clone();
        let mut removed = Dyadic::zero();
        let mut kept = Vec::with_capacity(pl.shared_intervals.len());
        for iv in pl.shared_intervals.drain(..) {
            if iv.end <= cp {
                kept.push(iv);
            } else if iv.start >= cp {
                removed += iv.len();
            } else {
                removed += &iv.end - &cp;
                kept.push(Interval::new(iv.start, cp.clone()));
            }
        }
        pl.shared_intervals = kept;
        pl.private_completion += removed;
        pl.tidy();
    }
    Ok(out)
}

/// Fills idle time on every shared processor that precedes the processor's
/// last completion.
///
/// Each step takes the job `j` that finishes last on the processor and the
/// earliest idle gap `(l, r)`. With `ε` the smaller of `(r - l)/2` and the
/// length of `j`'s last shared piece, the last `ε` of `j`'s shared piece and
/// the last `ε` of its private interval are both moved into `(l, l + 2ε)`.
/// The value grows by `w_j · ε` per step.
pub fn compact_idle(
    g: &GeneralSchedule,
    inst: &Instance,
) -> Result<GeneralSchedule, TransformError> {
    ensure_valid(g, inst)?;
    ensure_normal(g)?;
    let mut out = g.clone();
    out.tidy();
    for r in 1..=inst.m() {
        while let Some((l, right)) = first_gap(&out, r) {
            let last = *out.processor_jobs(r).last().expect("gap implies work");
            let pl = &mut out.jobs[last];
            let piece = pl
                .shared_intervals
                .iter_mut()
                .max_by(|a, b| a.end.cmp(&b.end))
                .expect("job has work");
            let eps = (&right - &l).halve().min(piece.len());
            piece.end -= &eps;
            pl.private_completion -= &eps;
            debug_assert!(pl.private_completion >= pl.shared_completion());
            let end = &l + eps.mul_pow2(1);
            pl.shared_intervals.push(Interval::new(l, end));
            pl.tidy();
        }
    }
    Ok(out)
}

/// Earliest idle interval on processor `r` that starts before the last
/// completion there.
fn first_gap(g: &GeneralSchedule, r: usize) -> Option<(Dyadic, Dyadic)> {
    let mut pieces: Vec<&Interval> = g
        .jobs
        .iter()
        .filter(|pl| pl.shared_processor == Some(r))
        .flat_map(|pl| pl.shared_intervals.iter())
        .collect();
    pieces.sort_by(|a, b| a.start.cmp(&b.start));
    let mut cursor = Dyadic::zero();
    for iv in pieces {
        if iv.start > cursor {
            return Some((cursor, iv.start.clone()));
        }
        cursor = cursor.max(iv.end.clone());
    }
    None
}

/// Makes every job non-preemptive: while a job has two consecutive pieces
/// `(l, r)` and `(l', r')`, everything running between them on the processor
/// is shifted left by `r - l` and the first piece is moved to end at `l'`.
/// The value is unchanged.
pub fn merge_preemptions(
    g: &GeneralSchedule,
    inst: &Instance,
) -> Result<GeneralSchedule, TransformError> {
    ensure_valid(g, inst)?;
    ensure_normal(g)?;
    let mut out = g.clone();
    out.tidy();
    while let Some(ix) = out.jobs.iter().position(|j| j.shared_intervals.len() > 1) {
        let r = out.jobs[ix].shared_processor.expect("validated");
        let first = out.jobs[ix].shared_intervals[0].clone();
        let next_start = out.jobs[ix].shared_intervals[1].start.clone();
        let shift = first.len();
        for (other, pl) in out.jobs.iter_mut().enumerate() {
            if other == ix || pl.shared_processor != Some(r) {
                continue;
            }
            for iv in &mut pl.shared_intervals {
                if iv.start >= first.end && iv.end <= next_start {
                    iv.start -= &shift;
                    iv.end -= &shift;
                }
            }
        }
        let moved = Interval::new(&next_start - &shift, next_start);
        out.jobs[ix].shared_intervals[0] = moved;
        out.jobs[ix].tidy();
    }
    Ok(out)
}

/// Swaps adjacent jobs on a shared processor while the earlier one finishes
/// later privately, until shared and private completion orders agree. The
/// value is unchanged.
pub fn reorder(g: &GeneralSchedule, inst: &Instance) -> Result<GeneralSchedule, TransformError> {
    ensure_valid(g, inst)?;
    ensure_normal(g)?;
    ensure_non_preemptive(g)?;
    let mut out = g.clone();
    while let Some((r, t)) = out.first_unordered() {
        let jobs = out.processor_jobs(r);
        let (a, b) = (jobs[t], jobs[t + 1]);
        let ia = out.jobs[a].shared_intervals[0].clone();
        let ib = out.jobs[b].shared_intervals[0].clone();
        out.jobs[b].shared_intervals[0] = Interval::new(ia.start.clone(), &ia.start + ib.len());
        out.jobs[a].shared_intervals[0] = Interval::new(&ib.end - ia.len(), ib.end.clone());
    }
    Ok(out)
}

/// The jobs on processor `r` and the checks shared by [`pull`] and [`push`]:
/// `2 <= i <= k + 1`, jobs `i..=k` synchronized and `i-1..=k` contiguous.
/// Pulling additionally needs an ordered schedule; pushing only needs a
/// normal, non-preemptive one.
fn operated_jobs(
    g: &GeneralSchedule,
    inst: &Instance,
    r: usize,
    i: usize,
    require_ordered: bool,
) -> Result<Vec<usize>, TransformError> {
    ensure_valid(g, inst)?;
    if require_ordered {
        ensure_ordered(g)?;
    } else {
        ensure_normal(g)?;
        ensure_non_preemptive(g)?;
    }
    let jobs = g.processor_jobs(r);
    let k = jobs.len();
    if i < 2 || i > k + 1 {
        return Err(TransformError::PositionOutOfRange { processor: r, i, k });
    }
    for &ix in &jobs[i - 1..] {
        if !g.jobs[ix].is_synchronized() {
            return Err(TransformError::SuffixNotSynchronized(g.jobs[ix].id.clone()));
        }
    }
    for w in jobs[i - 2..].windows(2) {
        if g.jobs[w[1]].shared_start() != g.jobs[w[0]].shared_completion() {
            return Err(TransformError::NotContiguous(g.jobs[w[1]].id.clone()));
        }
    }
    Ok(jobs)
}

/// Value change of pulling `j_i` by `ε`:
/// `−ε·w_{i−1} + ε·Σ_{ℓ≥i} w_ℓ / 2^{ℓ−i+1}`.
pub fn pull_value_delta(
    g: &GeneralSchedule,
    inst: &Instance,
    r: usize,
    i: usize,
    eps: &Dyadic,
) -> Dyadic {
    -push_value_delta(g, inst, r, i, eps)
}

/// Value change of pushing `j_i` by `ε`:
/// `ε·w_{i−1} − ε·Σ_{ℓ≥i} w_ℓ / 2^{ℓ−i+1}`.
pub fn push_value_delta(
    g: &GeneralSchedule,
    inst: &Instance,
    r: usize,
    i: usize,
    eps: &Dyadic,
) -> Dyadic {
    eps * push_coefficient(g, inst, &g.processor_jobs(r), i)
}

fn push_coefficient(g: &GeneralSchedule, inst: &Instance, jobs: &[usize], i: usize) -> Dyadic {
    let tail: Vec<Dyadic> = jobs[i - 1..]
        .iter()
        .map(|&ix| weight_of(inst, &g.jobs[ix]).clone())
        .collect();
    weight_of(inst, &g.jobs[jobs[i - 2]]) - halving_tail(&tail)
}

/// Pulls job `j_i` (1-based position on processor `r`) by `ε`: `j_{i−1}`
/// gives up the last `ε` of its shared interval and every later job starts
/// earlier, each absorbing half of the time freed before it.
///
/// Requires an ordered schedule, `2 <= i <= k + 1`, jobs `j_i..j_k`
/// synchronized, no idle time from `j_{i−1}` on, and
/// `0 < ε <= |j_{i−1}'s shared interval|`. Pulling by the full length takes
/// `j_{i−1}` off the shared processor.
pub fn pull(
    g: &GeneralSchedule,
    inst: &Instance,
    r: usize,
    i: usize,
    eps: &Dyadic,
) -> Result<GeneralSchedule, TransformError> {
    let jobs = operated_jobs(g, inst, r, i, true)?;
    let prev = jobs[i - 2];
    if !eps.is_positive() || *eps > g.jobs[prev].shared_len() {
        return Err(TransformError::EpsilonOutOfRange(eps.clone()));
    }
    Ok(pull_unchecked(g, &jobs, i, eps))
}

fn pull_unchecked(g: &GeneralSchedule, jobs: &[usize], i: usize, eps: &Dyadic) -> GeneralSchedule {
    let prev = jobs[i - 2];
    let mut out = g.clone();
    {
        let pl = &mut out.jobs[prev];
        pl.shared_intervals[0].end -= eps;
        pl.private_completion += eps;
    }
    let mut prev_end = out.jobs[prev].shared_intervals[0].end.clone();
    for (d, &ix) in jobs[i - 1..].iter().enumerate() {
        let step = eps.div_pow2(d as u32 + 1);
        let pl = &mut out.jobs[ix];
        let iv = &mut pl.shared_intervals[0];
        iv.start = prev_end;
        iv.end -= &step;
        pl.private_completion -= &step;
        prev_end = iv.end.clone();
    }
    if out.jobs[prev].shared_intervals[0].is_empty() {
        out.jobs[prev].evict();
    }
    out
}

/// Pushes job `j_i` by `ε`, the reverse of [`pull`]: `j_{i−1}` runs `ε`
/// longer on the shared processor and `ε` shorter privately, and every later
/// job is delayed by half the delay of its predecessor.
///
/// Requires a normal, non-preemptive schedule with the same suffix
/// conditions as [`pull`], `0 < ε <= (C^P − C^M)/2` for `j_{i−1}` and
/// `ε / 2^{ℓ−i+1} <= |j_ℓ's shared interval|` for `ℓ >= i`. A job whose
/// interval shrinks to nothing leaves the shared processor.
pub fn push(
    g: &GeneralSchedule,
    inst: &Instance,
    r: usize,
    i: usize,
    eps: &Dyadic,
) -> Result<GeneralSchedule, TransformError> {
    let jobs = operated_jobs(g, inst, r, i, false)?;
    let prev = jobs[i - 2];
    let slack = (&g.jobs[prev].private_completion - g.jobs[prev].shared_completion()).halve();
    if !eps.is_positive() || *eps > slack {
        return Err(TransformError::EpsilonOutOfRange(eps.clone()));
    }
    for (d, &ix) in jobs[i - 1..].iter().enumerate() {
        if eps.div_pow2(d as u32 + 1) > g.jobs[ix].shared_len() {
            return Err(TransformError::EpsilonOutOfRange(eps.clone()));
        }
    }
    Ok(push_unchecked(g, &jobs, i, eps))
}

fn push_unchecked(g: &GeneralSchedule, jobs: &[usize], i: usize, eps: &Dyadic) -> GeneralSchedule {
    let prev = jobs[i - 2];
    let mut out = g.clone();
    {
        let pl = &mut out.jobs[prev];
        pl.shared_intervals[0].end += eps;
        pl.private_completion -= eps;
    }
    let mut prev_end = out.jobs[prev].shared_intervals[0].end.clone();
    for (d, &ix) in jobs[i - 1..].iter().enumerate() {
        let step = eps.div_pow2(d as u32 + 1);
        let pl = &mut out.jobs[ix];
        let iv = &mut pl.shared_intervals[0];
        iv.start = prev_end;
        iv.end += &step;
        pl.private_completion += &step;
        prev_end = iv.end.clone();
        if iv.is_empty() {
            pl.evict();
        }
    }
    out
}

/// Result of [`synchronize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncOutcome {
    pub schedule: SyncSchedule,
    /// The synchronized schedule in interval form.
    pub general: GeneralSchedule,
    pub value_before: Dyadic,
    pub value_after: Dyadic,
    /// Number of push/pull steps taken after reordering.
    pub push_iterations: usize,
}

/// Converts any feasible schedule into a synchronized one whose value is at
/// least as large.
///
/// After the four canonicalization passes, each step looks at a processor
/// with an unsynchronized job, takes the smallest `i` such that `j_i..j_k`
/// are synchronized and compares `w_{i−1}` with the halving tail
/// `Σ_{ℓ≥i} w_ℓ / 2^{ℓ−i+1}`. If `w_{i−1}` is at least the tail, `j_i` is
/// pushed by the largest admissible `ε`, which either synchronizes `j_{i−1}`
/// or evicts a later job. Otherwise `j_i` is pulled by the whole interval of
/// `j_{i−1}`, evicting it. Neither move lowers the value, and each one
/// evicts a job or synchronizes one more, so at most `2n` steps are taken.
pub fn synchronize(g: &GeneralSchedule, inst: &Instance) -> Result<SyncOutcome, TransformError> {
    let value_before = value_general(g, inst)?;
    let g = normalize(g, inst)?;
    let g = compact_idle(&g, inst)?;
    let g = merge_preemptions(&g, inst)?;
    let mut g = reorder(&g, inst)?;

    let mut push_iterations = 0;
    for r in 1..=inst.m() {
        loop {
            let jobs = g.processor_jobs(r);
            let Some(last_unsynced) = jobs.iter().rposition(|&ix| !g.jobs[ix].is_synchronized())
            else {
                break;
            };
            let i = last_unsynced + 2;
            let coefficient = push_coefficient(&g, inst, &jobs, i);
            g = if coefficient.is_negative() {
                let eps = g.jobs[jobs[i - 2]].shared_len();
                pull_unchecked(&g, &jobs, i, &eps)
            } else {
                let prev = &g.jobs[jobs[i - 2]];
                let mut eps = (&prev.private_completion - prev.shared_completion()).halve();
                for (d, &ix) in jobs[i - 1..].iter().enumerate() {
                    eps = eps.min(g.jobs[ix].shared_len().mul_pow2(d as u32 + 1));
                }
                push_unchecked(&g, &jobs, i, &eps)
            };
            push_iterations += 1;
        }
    }
    debug_assert!(g.is_synchronized());
    debug_assert!(validate(&g, inst).is_empty());
    let value_after = value_unchecked(&g, inst);
    Ok(SyncOutcome {
        schedule: g.to_sync(inst.m()),
        general: g,
        value_before,
        value_after,
        push_iterations,
    })
}
