use wsmp::{Dyadic, GeneralSchedule, Instance};

const SYMBOLS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

fn symbol(ix: usize) -> char {
    SYMBOLS.get(ix).map_or('*', |&b| b as char)
}

/// Column `c` of `width` is filled by an interval `(a, b)` when the column's
/// midpoint `(2c + 1)·H / 2·width` lies strictly inside it. Compared after
/// scaling by `2·width`, so no division is needed.
fn covers(a: &Dyadic, b: &Dyadic, c: usize, width: usize, horizon: &Dyadic) -> bool {
    let mid = horizon * Dyadic::from(2 * c + 1);
    let scale = Dyadic::from(2 * width);
    a * &scale < mid && mid < b * &scale
}

/// One row per shared processor, then one row per job for its private
/// processor, then a legend.
pub fn render(inst: &Instance, g: &GeneralSchedule, width: usize) -> String {
    let horizon = g
        .jobs
        .iter()
        .flat_map(|j| [j.shared_completion(), j.private_completion.clone()])
        .max()
        .unwrap_or_default();
    let sym = |id| inst.position(id).map_or('*', symbol);
    let shared_labels: Vec<String> = (1..=inst.m()).map(|r| format!("S{r}")).collect();
    let label_width = shared_labels
        .iter()
        .map(String::len)
        .chain(inst.jobs().iter().map(|j| j.id.as_str().chars().count()))
        .max()
        .unwrap_or(0);

    let mut out = format!("time 0 .. {horizon}, {width} columns\n");
    for (r, label) in shared_labels.iter().enumerate() {
        let row: String = (0..width)
            .map(|c| {
                g.jobs
                    .iter()
                    .filter(|j| j.shared_processor == Some(r + 1))
                    .find(|j| {
                        j.shared_intervals
                            .iter()
                            .any(|iv| covers(&iv.start, &iv.end, c, width, &horizon))
                    })
                    .map_or('.', |j| sym(&j.id))
            })
            .collect();
        out += &format!("{label:<label_width$} |{row}|\n");
    }
    let zero = Dyadic::zero();
    for job in inst.jobs() {
        let end = g
            .jobs
            .iter()
            .find(|j| j.id == job.id)
            .map_or_else(Dyadic::zero, |j| j.private_completion.clone());
        let row: String = (0..width)
            .map(|c| {
                if covers(&zero, &end, c, width, &horizon) {
                    sym(&job.id)
                } else {
                    '.'
                }
            })
            .collect();
        out += &format!("{:<label_width$} |{row}|\n", job.id.as_str());
    }
    out += "legend:\n";
    for (ix, job) in inst.jobs().iter().enumerate() {
        out += &format!("  {} = {} (p={}, w={})\n", symbol(ix), job.id, job.p, job.w);
    }
    out
}
