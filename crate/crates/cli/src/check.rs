use clap::ValueEnum;

use wsmp::engine;
use wsmp::transforms;
use wsmp::{GeneralSchedule, Instance, Job, ScheduleError};

use crate::AnySchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    VShape,
    Ordered,
    Synchronized,
    /// Processing-time-inclusive job set on every processor.
    Inclusive,
    WeightInclusive,
}

fn line(name: &str, failure: Option<String>) -> String {
    match failure {
        None => format!("{name}: pass\n"),
        Some(at) => format!("{name}: fail {at}\n"),
    }
}

fn per_processor(seqs: &[Vec<Job>], test: impl Fn(&[Job]) -> Option<String>) -> Option<String> {
    seqs.iter()
        .enumerate()
        .find_map(|(r, seq)| test(seq).map(|detail| format!("at processor {}{detail}", r + 1)))
}

fn general_sequences(g: &GeneralSchedule, inst: &Instance) -> Vec<Vec<Job>> {
    (1..=inst.m())
        .map(|r| {
            g.processor_jobs(r)
                .into_iter()
                .filter_map(|ix| inst.job(&g.jobs[ix].id).cloned())
                .collect()
        })
        .collect()
}

fn ordered_failure(g: &GeneralSchedule, inst: &Instance) -> Option<String> {
    if let Some(pl) = g
        .jobs
        .iter()
        .find(|j| j.shared_completion() > j.private_completion)
    {
        return Some(format!(
            "at job {} (finishes later on its shared processor)",
            pl.id
        ));
    }
    if let Some(pl) = g.jobs.iter().find(|j| j.shared_intervals.len() > 1) {
        return Some(format!("at job {} (preempted)", pl.id));
    }
    (1..=inst.m()).find_map(|r| {
        let jobs = g.processor_jobs(r);
        jobs.windows(2)
            .position(|w| g.jobs[w[0]].private_completion > g.jobs[w[1]].private_completion)
            .map(|t| format!("at processor {r} position {}", t + 1))
    })
}

fn synchronized_failure(g: &GeneralSchedule) -> Option<String> {
    g.jobs
        .iter()
        .find(|j| {
            j.shared_processor.is_some()
                && !j.shared_intervals.is_empty()
                && (j.shared_intervals.len() > 1 || j.shared_completion() != j.private_completion)
        })
        .map(|j| format!("at job {}", j.id))
}

/// One `name: pass` or `name: fail at ...` line per property, preceded by a
/// feasibility line.
pub fn report(
    inst: &Instance,
    s: &AnySchedule,
    properties: &[Property],
) -> Result<String, ScheduleError> {
    let (seqs, feasible, general) = match s {
        AnySchedule::Sync(s) => {
            let seqs = s.resolve(inst)?;
            let feasible = match engine::evaluate(s, inst) {
                Ok(_) => None,
                Err(ScheduleError::Infeasible {
                    processor,
                    violation,
                }) => Some(format!(
                    "at processor {processor} position {} ({violation})",
                    violation.position
                )),
                Err(e) => return Err(e),
            };
            (seqs, feasible, None)
        }
        AnySchedule::General(g) => {
            let violations = transforms::validate(g, inst);
            let feasible = violations.first().map(|v| format!("({v})"));
            (general_sequences(g, inst), feasible, Some(g))
        }
    };
    let mut out = line("feasible", feasible);
    for p in properties {
        out += &match p {
            Property::VShape => line(
                "v-shape",
                per_processor(&seqs, |seq| {
                    engine::v_shape_violation(seq).map(|i| format!(" position {i}"))
                }),
            ),
            Property::Ordered => line("ordered", general.and_then(|g| ordered_failure(g, inst))),
            Property::Synchronized => line("synchronized", general.and_then(synchronized_failure)),
            Property::Inclusive => line(
                "inclusive",
                per_processor(&seqs, |seq| {
                    (!engine::is_processing_time_inclusive(seq)).then(String::new)
                }),
            ),
            Property::WeightInclusive => line(
                "weight-inclusive",
                per_processor(&seqs, |seq| {
                    (!engine::is_weight_inclusive(seq)).then(String::new)
                }),
            ),
        };
    }
    Ok(out)
}
