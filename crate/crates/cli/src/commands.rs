use std::io::Write;

use serde::Serialize;
use tessel_core::bounds::{partition_diameter_constant, n_upper, BoundsTable, NUpper};
use tessel_core::discrepancy::{
    l2_cap_exact, l2_cap_montecarlo, l2_slice_montecarlo, l2_wedge_exact, l2_wedge_montecarlo,
    sup_wedge_lower, sup_wedge_net_upper, DiscrepancyReport, Family,
};
use tessel_core::energy::{minimize, StopReason};
use tessel_core::onebit::sign_embed;
use tessel_core::partition::Band;
use tessel_core::rng::stream;
use tessel_core::sampling::{jittered_set, random_set};
use tessel_core::sphere::uniform_point;
use tessel_core::{Method, Partition, PointSetMeta};

use crate::cli::*;
use crate::error::{CliError, CliResult};
use crate::experiments::{self, SupRow};
use crate::io;

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn method_of(m: GenMethod) -> Method {
    match m {
        GenMethod::Random => Method::Random,
        GenMethod::Jittered => Method::Jittered,
    }
}

fn family_of(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Wedge => Family::Wedge,
        FamilyArg::Cap => Family::Cap,
        FamilyArg::Slice => Family::Slice,
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Disc(a) => disc(a, out),
        Command::StolarskyVerify(a) => stolarsky(a, out),
        Command::Scaling(a) => scaling(a, out),
        Command::Sup(a) => sup(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Minimize(a) => minimize_cmd(a, out),
        Command::PartitionInspect(a) => partition_inspect(a, out),
        Command::Embed(a) => embed(a, out),
    }
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let z = match a.method {
        GenMethod::Random => random_set(a.d, a.n, a.seed)?,
        GenMethod::Jittered => jittered_set(a.d, a.n, a.seed)?,
    };
    io::write_point_set(&a.out, &z)?;
    let method = match a.method {
        GenMethod::Random => "random",
        GenMethod::Jittered => "jittered",
    };
    emit(
        out,
        &format!(
            "wrote N={} d={} method={method} seed={} to {}\n",
            z.len(),
            z.d,
            a.seed,
            a.out.display()
        ),
    )
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    #[serde(flatten)]
    report: &'a DiscrepancyReport,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    z_meta: &'a PointSetMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

const LOWER_NOTE: &str = "largest |Delta_Z| found by search; the sup may be larger";
const UPPER_NOTE: &str = "bound over an approximating family; the sup is at most this value";

fn disc(a: &DiscArgs, out: &mut dyn Write) -> CliResult<()> {
    let z = io::read_point_set(&a.input)?;
    let family = family_of(a.family);
    let mut rng = stream(a.seed, 0);
    let (report, seed, epsilon, note) = match (a.family, a.mode) {
        (FamilyArg::Wedge, ModeArg::Exact) => (DiscrepancyReport::exact(family, l2_wedge_exact(&z)?), None, None, None),
        (FamilyArg::Cap, ModeArg::Exact) => (DiscrepancyReport::exact(family, l2_cap_exact(&z)?), None, None, None),
        (_, ModeArg::Mc) => {
            let est = match a.family {
                FamilyArg::Wedge => l2_wedge_montecarlo(&z, a.m, &mut rng)?,
                FamilyArg::Cap => l2_cap_montecarlo(&z, a.m, &mut rng)?,
                FamilyArg::Slice => l2_slice_montecarlo(&z, a.m, &mut rng)?,
            };
            (DiscrepancyReport::monte_carlo(family, est), Some(a.seed), None, None)
        }
        (FamilyArg::Wedge, ModeArg::SupLower) => {
            (sup_wedge_lower(&z, a.budget, &mut rng)?, Some(a.seed), None, Some(LOWER_NOTE))
        }
        (FamilyArg::Wedge, ModeArg::SupUpper) => {
            (sup_wedge_net_upper(&z, a.epsilon)?, None, Some(a.epsilon), Some(UPPER_NOTE))
        }
        (f, m) => {
            return Err(CliError::Usage(format!(
                "mode {m:?} is not available for the {f:?} family (exact: wedge, cap; sup: wedge)"
            )
            .to_lowercase()))
        }
    };
    let text = io::to_json(&ReportRecord {
        report: &report,
        d: z.d,
        n: z.len(),
        seed,
        epsilon,
        z_meta: &z.meta,
        note,
    });
    if let Some(path) = &a.out {
        io::write_text(path, &text)?;
    }
    emit(out, &text)
}

fn check_grid(d: usize, ns: &[usize]) -> CliResult<()> {
    if d < 2 {
        return Err(CliError::Usage(format!("-d must be at least 2, got {d}")));
    }
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Usage("--n needs a nonempty list of positive sizes".into()));
    }
    Ok(())
}

fn stolarsky(a: &StolarskyArgs, out: &mut dyn Write) -> CliResult<()> {
    check_grid(a.d, &a.ns)?;
    if a.seeds < 1 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let rows = experiments::stolarsky_verify(a.d, &a.ns, a.seeds, a.m, a.seed)?;
    let csv = experiments::stolarsky_csv(&rows);
    let worst = rows.iter().map(|r| r.zscore.abs()).fold(0.0, f64::max);
    let summary = format!(
        "{}: {} runs, max |z| = {worst:.3} (limit 4)\n",
        if worst <= 4.0 { "PASS" } else { "FAIL" },
        rows.len()
    );
    match &a.out {
        Some(path) => {
            io::write_text(path, &csv)?;
            emit(out, &summary)
        }
        None => {
            emit(out, &csv)?;
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn scaling(a: &ScalingArgs, out: &mut dyn Write) -> CliResult<()> {
    check_grid(a.d, &a.ns)?;
    let s = experiments::scaling(method_of(a.method), a.d, &a.ns, a.seeds, a.seed)?;
    if let Some(path) = &a.out {
        io::write_text(path, &experiments::scaling_csv(&s))?;
    }
    emit(out, &io::to_json(&s))
}

#[derive(Serialize)]
struct SupTrials {
    method: Method,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    budget: usize,
    threshold: f64,
    fraction_below: f64,
    rows: Vec<SupRow>,
}

#[derive(Serialize)]
struct SupBracket<'a> {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    lower: &'a DiscrepancyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<&'a DiscrepancyReport>,
    z_meta: &'a PointSetMeta,
}

fn sup(a: &SupArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = if let Some(path) = &a.input {
        let z = io::read_point_set(path)?;
        let lower = sup_wedge_lower(&z, a.budget, &mut stream(a.seed, 0))?;
        let upper = a.epsilon.map(|e| sup_wedge_net_upper(&z, e)).transpose()?;
        io::to_json(&SupBracket {
            d: z.d,
            n: z.len(),
            lower: &lower,
            upper: upper.as_ref(),
            z_meta: &z.meta,
        })
    } else {
        check_grid(a.d, &[a.n])?;
        if a.n < 2 {
            return Err(CliError::Usage("-N must be at least 2".into()));
        }
        let rows = experiments::sup_trials(method_of(a.method), a.d, a.n, a.seeds, a.budget, a.seed)?;
        let below = rows.iter().filter(|r| r.below).count();
        io::to_json(&SupTrials {
            method: method_of(a.method),
            d: a.d,
            n: a.n,
            budget: a.budget,
            threshold: rows.first().map_or(f64::NAN, |r| r.threshold),
            fraction_below: below as f64 / rows.len().max(1) as f64,
            rows,
        })
    };
    if let Some(path) = &a.out {
        io::write_text(path, &text)?;
    }
    emit(out, &text)
}

#[derive(Serialize)]
struct BoundsReport {
    #[serde(flatten)]
    table: BoundsTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_upper: Option<NUpper>,
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> CliResult<()> {
    let table = BoundsTable::new(a.d)?;
    let n_upper = a.delta.map(|delta| n_upper(a.d, delta)).transpose()?;
    emit(
        out,
        &io::to_json(&BoundsReport {
            table,
            delta: a.delta,
            n_upper,
        }),
    )
}

#[derive(Serialize)]
struct MinimizeSummary {
    accepted_steps: usize,
    stop: StopReason,
    initial_energy: f64,
    final_energy: f64,
    initial_l2: f64,
    final_l2: f64,
}

fn minimize_cmd(a: &MinimizeArgs, out: &mut dyn Write) -> CliResult<()> {
    let z0 = match &a.input {
        Some(path) => io::read_point_set(path)?,
        None => random_set(a.d, a.n, a.seed)?,
    };
    let result = minimize(&z0, a.steps, a.tol)?;
    if result.stop == StopReason::LineSearchExhausted && result.accepted_steps == 0 {
        return Err(CliError::Numeric(format!(
            "line search found no descent step from the initial set (gradient sup-norm {:.3e})",
            result.trace[0].grad_norm
        )));
    }
    io::write_point_set(&a.out, &result.z)?;
    if let Some(path) = &a.trace {
        io::write_text(path, &io::trace_to_csv(&result.trace))?;
    }
    let summary = MinimizeSummary {
        accepted_steps: result.accepted_steps,
        stop: result.stop,
        initial_energy: result.initial_energy(),
        final_energy: result.final_energy(),
        initial_l2: l2_wedge_exact(&z0)?,
        final_l2: l2_wedge_exact(&result.z)?,
    };
    emit(out, &io::to_json(&summary))
}

#[derive(Serialize)]
struct CellMeasureCheck {
    probes: usize,
    seed: u64,
    /// Largest `|count - M/N| / sqrt(M p (1-p))` over cells, `p = 1/N`.
    max_abs_z: f64,
}

#[derive(Serialize)]
struct PartitionSummary<'a> {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    bands: &'a [Band],
    max_diameter_bound: f64,
    /// `K_d N^(-1/d)`.
    diameter_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell_measures: Option<CellMeasureCheck>,
}

/// Largest per-cell z-score of `probes` uniform points located in `p`.
pub fn cell_measure_z(p: &Partition, probes: usize, seed: u64) -> CliResult<f64> {
    let mut rng = stream(seed, 0);
    let mut counts = vec![0u64; p.len()];
    for _ in 0..probes {
        counts[p.cell_locate(&uniform_point(p.d, &mut rng)?)?] += 1;
    }
    let q = 1.0 / p.len() as f64;
    let (mean, sd) = (probes as f64 * q, (probes as f64 * q * (1.0 - q)).sqrt());
    Ok(counts
        .iter()
        .map(|&c| if sd > 0.0 { (c as f64 - mean).abs() / sd } else { 0.0 })
        .fold(0.0, f64::max))
}

fn partition_inspect(a: &PartitionArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = Partition::build(a.d, a.n)?;
    let cell_measures = if a.probes > 0 {
        Some(CellMeasureCheck {
            probes: a.probes,
            seed: a.seed,
            max_abs_z: cell_measure_z(&p, a.probes, a.seed)?,
        })
    } else {
        None
    };
    let text = io::to_json(&PartitionSummary {
        d: p.d,
        n: p.n,
        bands: &p.bands,
        max_diameter_bound: p.max_diameter_bound(),
        diameter_threshold: partition_diameter_constant(a.d)? * (a.n as f64).powf(-1.0 / a.d as f64),
        cell_measures,
    });
    if let Some(path) = &a.out {
        io::write_text(path, &text)?;
    }
    emit(out, &text)
}

fn embed(a: &EmbedArgs, out: &mut dyn Write) -> CliResult<()> {
    let z = io::read_point_set(&a.z)?;
    let x = io::read_point_set(&a.points)?;
    let rows = x
        .iter()
        .map(|p| sign_embed(&z, p))
        .collect::<Result<Vec<_>, _>>()?;
    let text = io::bits_to_csv(&rows);
    match &a.out {
        Some(path) => io::write_text(path, &text),
        None => emit(out, &text),
    }
}
