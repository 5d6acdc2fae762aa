//! Jobs, instances and the instance JSON format.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Dyadic;

/// Opaque job identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub String);

impl JobId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for JobId {
    fn from(s: &str) -> Self {
        JobId(s.to_string())
    }
}

impl From<String> for JobId {
    fn from(s: String) -> Self {
        JobId(s)
    }
}

/// A divisible job: processing time `p` and payoff `w` per unit of overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub p: Dyadic,
    pub w: Dyadic,
}

impl Job {
    pub fn new(id: impl Into<JobId>, p: impl Into<Dyadic>, w: impl Into<Dyadic>) -> Self {
        Job {
            id: id.into(),
            p: p.into(),
            w: w.into(),
        }
    }

    /// The same job with processing time and weight exchanged.
    pub fn transposed(&self) -> Job {
        Job {
            id: self.id.clone(),
            p: self.w.clone(),
            w: self.p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed instance JSON: {0}")]
    Json(String),
    #[error("m < 1")]
    NoSharedProcessors,
    #[error("duplicate job id `{0}`")]
    DuplicateId(JobId),
    #[error("job `{0}` has processing time <= 0")]
    NonPositiveProcessingTime(JobId),
    #[error("job `{0}` has weight <= 0")]
    NonPositiveWeight(JobId),
}

/// A validated instance: unique ids, positive times and weights, `m >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    m: usize,
    jobs: Vec<Job>,
    #[serde(skip)]
    index: HashMap<JobId, usize>,
}

#[derive(Deserialize)]
struct RawInstance {
    m: i64,
    jobs: Vec<Job>,
}

impl Instance {
    pub fn new(m: usize, jobs: Vec<Job>) -> Result<Self, InstanceError> {
        if m < 1 {
            return Err(InstanceError::NoSharedProcessors);
        }
        let mut index = HashMap::with_capacity(jobs.len());
        for (i, job) in jobs.iter().enumerate() {
            if !job.p.is_positive() {
                return Err(InstanceError::NonPositiveProcessingTime(job.id.clone()));
            }
            if !job.w.is_positive() {
                return Err(InstanceError::NonPositiveWeight(job.id.clone()));
            }
            if index.insert(job.id.clone(), i).is_some() {
                return Err(InstanceError::DuplicateId(job.id.clone()));
            }
        }
        Ok(Instance { m, jobs, index })
    }

    /// Jobs `j1, j2, ...` built from `(p, w)` pairs.
    pub fn from_pairs<P, W>(
        m: usize,
        pairs: impl IntoIterator<Item = (P, W)>,
    ) -> Result<Self, InstanceError>
    where
        P: Into<Dyadic>,
        W: Into<Dyadic>,
    {
        let jobs = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (p, w))| Job::new(format!("j{}", i + 1), p, w))
            .collect();
        Instance::new(m, jobs)
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        if raw.m < 1 {
            return Err(InstanceError::NoSharedProcessors);
        }
        Instance::new(raw.m as usize, raw.jobs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization is infallible")
    }

    /// Number of shared processors.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: &JobId) -> Option<&Job> {
        self.index.get(id).map(|&i| &self.jobs[i])
    }

    pub fn position(&self, id: &JobId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn has_equal_weights(&self) -> bool {
        let weights: HashSet<&Dyadic> = self.jobs.iter().map(|j| &j.w).collect();
        weights.len() <= 1
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(deserializer)?;
        if raw.m < 1 {
            return Err(serde::de::Error::custom(InstanceError::NoSharedProcessors));
        }
        Instance::new(raw.m as usize, raw.jobs).map_err(serde::de::Error::custom)
    }
}
