//! Hard instances built from Numerical 3-Dimensional Matching (N3DM).
//!
//! An N3DM input is three multisets `X`, `Y`, `Z` of `n` non-negative
//! integers and a target `b`; it is solvable when the elements can be
//! grouped into `n` triples `(x, y, z)` with `x + y + z = b` each.
//!
//! The generated WSMP instance has `n` shared processors and `3n` jobs with
//! `w = p`:
//!
//! | set | id   | processing time        |
//! |-----|------|------------------------|
//! | A   | `Ai` | `s_i = 2(M + m + x_i)` |
//! | B   | `Bj` | `b_j = 2M + y_j`       |
//! | C   | `Ck` | `r_k = 2(M + m² + z_k)`|
//!
//! with `m > max{b, 6}` and `M > 7(m² + b)`. Writing `a_i = s_i / 2` and
//! `c_k = r_k / 2`, a schedule is *equitable* when every shared processor
//! runs one A-, one B- and one C-job in that order. A processor running
//! `(Ai, Bj, Ck)` has value
//!
//! ```text
//! 2a² + b²/2 + 2c² − (ab + ac + bc)/2  =  9/4·a² + 3/4·b² + 9/4·c² − (a + b + c)²/4
//! ```
//!
//! and `a + b + c = K − Δ` with `K = 4M + m + m² + b` and
//! `Δ = b − (x_i + y_j + z_k)`. The Δ-free part is the same for every
//! equitable schedule, so equitable values differ only through
//! `−¼ Σ (K − Δ_l)²`, which is largest when every `Δ_l = 0`.
//!
//! [`h_value`] evaluates the bound with the coefficients `15/8, 3/8, 15/8`
//! in place of `9/4, 3/4, 9/4`; on the single-triple example it gives
//! `230619½` while the schedule is worth `585428`. The Δ-dependent part is
//! the same in both, so [`decide`] compares Δ's rather than values against
//! that constant. [`h_value_direct`] uses the coefficients obtained by
//! expanding the recurrence, and [`h_diagnostic`] reports both next to the
//! engine's value.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, SyncSchedule};
use crate::{Dyadic, Instance, Job, JobId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("malformed N3DM JSON: {0}")]
    Json(String),
    #[error("X, Y and Z must have the same positive size (got {x}, {y}, {z})")]
    SizeMismatch { x: usize, y: usize, z: usize },
    #[error("entry {value} in {set} is negative")]
    NegativeEntry { set: char, value: i64 },
    #[error("parameters overflow 64-bit integers")]
    Overflow,
    #[error("expected {expected} values of Δ, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matching does not cover every index exactly once")]
    InvalidMatching,
    #[error("schedule is not equitable")]
    NotEquitable,
    #[error("processor {processor} out of range 1..={n}")]
    ProcessorOutOfRange { processor: usize, n: usize },
    #[error("n = {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N3dmInput {
    #[serde(rename = "X")]
    pub x: Vec<i64>,
    #[serde(rename = "Y")]
    pub y: Vec<i64>,
    #[serde(rename = "Z")]
    pub z: Vec<i64>,
    pub b: i64,
}

impl N3dmInput {
    pub fn new(x: Vec<i64>, y: Vec<i64>, z: Vec<i64>, b: i64) -> Result<Self, HardnessError> {
        let input = N3dmInput { x, y, z, b };
        input.validate()?;
        Ok(input)
    }

    pub fn from_json(text: &str) -> Result<Self, HardnessError> {
        let input: N3dmInput =
            serde_json::from_str(text).map_err(|e| HardnessError::Json(e.to_string()))?;
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<(), HardnessError> {
        let (x, y, z) = (self.x.len(), self.y.len(), self.z.len());
        if x == 0 || x != y || y != z {
            return Err(HardnessError::SizeMismatch { x, y, z });
        }
        for (set, values) in [('X', &self.x), ('Y', &self.y), ('Z', &self.z)] {
            if let Some(&value) = values.iter().find(|&&v| v < 0) {
                return Err(HardnessError::NegativeEntry { set, value });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `b − (x_i + y_j + z_k)` for 0-based indices.
    pub fn delta(&self, i: usize, j: usize, k: usize) -> i64 {
        self.b - (self.x[i] + self.y[j] + self.z[k])
    }
}

/// Smallest `(m, M)` with `m > max{b, 6}` and `M > 7(m² + b)`.
pub fn build_params(input: &N3dmInput) -> Result<(i64, i64), HardnessError> {
    let m = input
        .b
        .max(6)
        .checked_add(1)
        .ok_or(HardnessError::Overflow)?;
    let big_m = m
        .checked_mul(m)
        .and_then(|sq| sq.checked_add(input.b))
        .and_then(|v| v.checked_mul(7))
        .and_then(|v| v.checked_add(1))
        .ok_or(HardnessError::Overflow)?;
    Ok((m, big_m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JobSet {
    A,
    B,
    C,
}

impl fmt::Display for JobSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JobSet::A => "A",
            JobSet::B => "B",
            JobSet::C => "C",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub id: JobId,
    pub set: JobSet,
    /// 1-based index of the source element in X, Y or Z.
    pub source: usize,
}

/// Provenance sidecar written next to a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(rename = "M")]
    pub big_m: i64,
    pub m_param: i64,
    pub b: i64,
    #[serde(rename = "K")]
    pub k: i64,
    pub jobs: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardInstance {
    pub input: N3dmInput,
    pub inst: Instance,
    pub m_param: i64,
    pub big_m: i64,
    /// `4M + m + m² + b`.
    pub k: i64,
    pub provenance: Vec<Provenance>,
}

impl HardInstance {
    pub fn n(&self) -> usize {
        self.input.n()
    }

    /// `a_i = M + m + x_i`, half of the A-job's time.
    pub fn a(&self, i: usize) -> i64 {
        self.big_m + self.m_param + self.input.x[i]
    }

    /// `b_j = 2M + y_j`, the B-job's time.
    pub fn b(&self, j: usize) -> i64 {
        2 * self.big_m + self.input.y[j]
    }

    /// `c_k = M + m² + z_k`, half of the C-job's time.
    pub fn c(&self, k: usize) -> i64 {
        self.big_m + self.m_param * self.m_param + self.input.z[k]
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            big_m: self.big_m,
            m_param: self.m_param,
            b: self.input.b,
            k: self.k,
            jobs: self.provenance.clone(),
        }
    }

    fn provenance_of(&self, id: &JobId) -> Option<&Provenance> {
        self.inst.position(id).map(|ix| &self.provenance[ix])
    }
}

fn job_id(set: JobSet, index: usize) -> JobId {
    JobId(format!("{set}{}", index + 1))
}

/// Builds the WSMP instance for an N3DM input with the smallest admissible
/// parameters. Jobs are listed A1..An, B1..Bn, C1..Cn.
pub fn gen_instance(input: &N3dmInput) -> Result<HardInstance, HardnessError> {
    input.validate()?;
    let (m_param, big_m) = build_params(input)?;
    let n = input.n();
    let max_entry = input
        .x
        .iter()
        .chain(&input.y)
        .chain(&input.z)
        .copied()
        .max()
        .unwrap_or(0);
    // every time below is at most 2(M + m² + max_entry); check that once
    big_m
        .checked_add(m_param * m_param)
        .and_then(|v| v.checked_add(max_entry))
        .and_then(|v| v.checked_mul(4))
        .ok_or(HardnessError::Overflow)?;
    let k = 4 * big_m + m_param + m_param * m_param + input.b;
    let mut jobs = Vec::with_capacity(3 * n);
    let mut provenance = Vec::with_capacity(3 * n);
    // processing time = 2·offset + scale·entry
    let sets = [
        (JobSet::A, &input.x, big_m + m_param, 2),
        (JobSet::B, &input.y, big_m, 1),
        (JobSet::C, &input.z, big_m + m_param * m_param, 2),
    ];
    for (set, values, offset, scale) in sets {
        for (i, &v) in values.iter().enumerate() {
            let id = job_id(set, i);
            let p = 2 * offset + scale * v;
            jobs.push(Job::new(id.clone(), p, p));
            provenance.push(Provenance {
                id,
                set,
                source: i + 1,
            });
        }
    }
    let inst = Instance::new(n, jobs).expect("generated jobs are valid");
    Ok(HardInstance {
        input: input.clone(),
        inst,
        m_param,
        big_m,
        k,
        provenance,
    })
}

fn check_deltas(deltas: &[i64], hi: &HardInstance) -> Result<(), HardnessError> {
    if deltas.len() != hi.n() {
        return Err(HardnessError::LengthMismatch {
            expected: hi.n(),
            found: deltas.len(),
        });
    }
    Ok(())
}

fn squares(values: impl Iterator<Item = i64>) -> Dyadic {
    values.map(|v| Dyadic::from(v) * Dyadic::from(v)).sum()
}

fn h_with(deltas: &[i64], hi: &HardInstance, ca: Dyadic, cb: Dyadic, cc: Dyadic) -> Dyadic {
    let n = hi.n();
    let constant = ca * squares((0..n).map(|i| hi.a(i)))
        + cb * squares((0..n).map(|j| hi.b(j)))
        + cc * squares((0..n).map(|k| hi.c(k)));
    let spread = squares(deltas.iter().map(|d| hi.k - d)).div_pow2(2);
    constant - spread
}

/// `Σ_l (15/8·a_l² + 3/8·b_l² + 15/8·c_l²) − ¼ Σ_l (K − Δ_l)²`, with the
/// coefficients as originally stated.
pub fn h_value(deltas: &[i64], hi: &HardInstance) -> Result<Dyadic, HardnessError> {
    check_deltas(deltas, hi)?;
    Ok(h_with(
        deltas,
        hi,
        Dyadic::new(15, 3),
        Dyadic::new(3, 3),
        Dyadic::new(15, 3),
    ))
}

/// `Σ_l (9/4·a_l² + 3/4·b_l² + 9/4·c_l²) − ¼ Σ_l (K − Δ_l)²`: the value of
/// any equitable schedule whose processors have the given Δ's.
pub fn h_value_direct(deltas: &[i64], hi: &HardInstance) -> Result<Dyadic, HardnessError> {
    check_deltas(deltas, hi)?;
    Ok(h_with(
        deltas,
        hi,
        Dyadic::new(9, 2),
        Dyadic::new(3, 2),
        Dyadic::new(9, 2),
    ))
}

/// One matching triple `(A, B, C)` per processor, 0-based.
pub type Matching = Vec<(usize, usize, usize)>;

/// Equitable schedule running `(A_i, B_j, C_k)` on processor `l` for the
/// `l`-th triple.
pub fn equitable_schedule(
    hi: &HardInstance,
    matching: &[(usize, usize, usize)],
) -> Result<SyncSchedule, HardnessError> {
    let n = hi.n();
    let covers = |pick: fn(&(usize, usize, usize)) -> usize| {
        let mut v: Vec<usize> = matching.iter().map(pick).collect();
        v.sort_unstable();
        v == (0..n).collect::<Vec<_>>()
    };
    if matching.len() != n || !covers(|t| t.0) || !covers(|t| t.1) || !covers(|t| t.2) {
        return Err(HardnessError::InvalidMatching);
    }
    Ok(SyncSchedule::new(
        matching
            .iter()
            .map(|&(i, j, k)| {
                vec![
                    job_id(JobSet::A, i),
                    job_id(JobSet::B, j),
                    job_id(JobSet::C, k),
                ]
            })
            .collect(),
    ))
}

/// The matching an equitable schedule realizes, or `None` if it is not
/// equitable.
pub fn matching_of(s: &SyncSchedule, hi: &HardInstance) -> Option<Matching> {
    let seqs = s.resolve(&hi.inst).ok()?;
    if seqs.len() != hi.n() {
        return None;
    }
    seqs.iter()
        .map(|seq| {
            let tags: Vec<&Provenance> = seq
                .iter()
                .map(|j| hi.provenance_of(&j.id))
                .collect::<Option<_>>()?;
            match tags.as_slice() {
                [a, b, c] if a.set == JobSet::A && b.set == JobSet::B && c.set == JobSet::C => {
                    Some((a.source - 1, b.source - 1, c.source - 1))
                }
                _ => None,
            }
        })
        .collect()
}

/// True iff every shared processor runs exactly one A-, one B- and one
/// C-job, in that order.
pub fn is_equitable(s: &SyncSchedule, hi: &HardInstance) -> bool {
    matching_of(s, hi).is_some()
}

/// `Δ_l = b − (x + y + z)` for the triple on processor `l` (1-based).
pub fn processor_delta(
    s: &SyncSchedule,
    hi: &HardInstance,
    l: usize,
) -> Result<i64, HardnessError> {
    let matching = matching_of(s, hi).ok_or(HardnessError::NotEquitable)?;
    if l < 1 || l > matching.len() {
        return Err(HardnessError::ProcessorOutOfRange {
            processor: l,
            n: matching.len(),
        });
    }
    let (i, j, k) = matching[l - 1];
    Ok(hi.input.delta(i, j, k))
}

/// Printed bound, recurrence-derived bound and engine value side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HDiagnostic {
    pub deltas: Vec<i64>,
    pub printed: Dyadic,
    pub direct: Dyadic,
    pub evaluated: Dyadic,
}

pub fn h_diagnostic(s: &SyncSchedule, hi: &HardInstance) -> Result<HDiagnostic, HardnessError> {
    let matching = matching_of(s, hi).ok_or(HardnessError::NotEquitable)?;
    let deltas: Vec<i64> = matching
        .iter()
        .map(|&(i, j, k)| hi.input.delta(i, j, k))
        .collect();
    let evaluated = engine::evaluate(s, &hi.inst)
        .map_err(|_| HardnessError::NotEquitable)?
        .total;
    Ok(HDiagnostic {
        printed: h_value(&deltas, hi)?,
        direct: h_value_direct(&deltas, hi)?,
        evaluated,
        deltas,
    })
}

pub const MAX_DECIDE_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub solvable: bool,
    /// First matching, in lexicographic order of the B and C permutations,
    /// with every `Δ_l = 0`.
    pub witness: Option<Matching>,
    /// Largest value over all equitable schedules.
    pub best_equitable_value: Dyadic,
    /// [`h_value_direct`] at `Δ = 0`.
    pub threshold: Dyadic,
}

/// Decides an N3DM input by enumerating all `n!·n!` equitable schedules of
/// its WSMP instance. Solvable iff one of them has every `Δ_l = 0`.
pub fn decide(input: &N3dmInput) -> Result<Decision, HardnessError> {
    input.validate()?;
    let n = input.n();
    if n > MAX_DECIDE_N {
        return Err(HardnessError::TooLarge {
            n,
            max: MAX_DECIDE_N,
        });
    }
    let hi = gen_instance(input)?;
    let mut witness = None;
    let mut best: Option<Dyadic> = None;
    for ys in (0..n).permutations(n) {
        for zs in (0..n).permutations(n) {
            let matching: Matching = (0..n).map(|l| (l, ys[l], zs[l])).collect();
            let s = equitable_schedule(&hi, &matching)?;
            let value = engine::evaluate(&s, &hi.inst)
                .expect("equitable schedules of generated instances are feasible")
                .total;
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
            if witness.is_none() && matching.iter().all(|&(i, j, k)| input.delta(i, j, k) == 0) {
                witness = Some(matching);
            }
        }
    }
    Ok(Decision {
        solvable: witness.is_some(),
        witness,
        best_equitable_value: best.expect("n >= 1"),
        threshold: h_value_direct(&vec![0; n], &hi)?,
    })
}
