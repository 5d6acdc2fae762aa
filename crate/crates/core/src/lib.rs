//! Exact scheduling on weighted shared multi-processors.
//!
//! Each job has a private processor and may also use one of `m` shared
//! processors; time spent on both at once is rewarded by the job's weight.
//! Every quantity is a [`Dyadic`] rational, so values are exact.
//!
//! - [`engine`] evaluates synchronized schedules and their structure.
//! - [`transforms`] turns interval-level schedules into synchronized ones.
//! - [`solvers`] holds the equal-weight algorithm, exhaustive search and an
//!   exchange heuristic.
//! - [`hardness`] builds instances from numerical 3-dimensional matching.
//!
//! ```
//! use wsmp::engine::{self, SyncSchedule};
//! use wsmp::{Dyadic, Instance};
//!
//! let inst = Instance::from_pairs(1, [(4, 1), (8, 1)]).unwrap();
//! let s = SyncSchedule::new(vec![vec!["j1".into(), "j2".into()]]);
//! assert_eq!(engine::evaluate(&s, &inst).unwrap().total, Dyadic::from(5));
//! ```

pub mod dyadic;
pub mod engine;
pub mod hardness;
pub mod instance;
pub mod solvers;
pub mod transforms;

pub use dyadic::{Dyadic, ParseDyadicError};
pub use engine::{EvalReport, ScheduleError, SyncSchedule};
pub use instance::{Instance, InstanceError, Job, JobId};
pub use transforms::{GeneralSchedule, Interval, JobPlacement, TransformError};

// The guide's snippets run as doctests so the book cannot drift from the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/canonicalization.md")]
    mod canonicalization {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/hardness.md")]
    mod hardness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
