use rayon::prelude::*;
use vacuum_core::asymptotics::{interval_initial_data, interval_renormalized_table, solve_cylinder_recursion};
use vacuum_core::casimir::{energy_breakdown, mass_casimir_integral, mass_casimir_sum, SWITCHOVER_ML};
use vacuum_core::kernels::{dirichlet_interval_trace, free_massive_cylinder, image_sum_halfline, KernelProfile};
use vacuum_core::mass_transform::{pde_residual, to_massive, to_massive_with_error};
use vacuum_core::Error;

use crate::settings::{Command, KernelChoice, RunConfig};
use crate::table::{Cell, Table};
use crate::CliError;

/// A finished table; `failure` set means exit code 2.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

/// Numerical trouble flags the row; anything else is the caller's fault.
fn row_status(e: Error) -> Result<String, CliError> {
    match e {
        Error::NotConverged { .. } | Error::Evaluation { .. } => Ok("not_converged".to_string()),
        other => Err(CliError::Invalid(other.to_string())),
    }
}

fn nan() -> Cell {
    Cell::Num(f64::NAN)
}

fn failure_if_flagged(rows: &[Vec<Cell>], what: &str) -> Option<String> {
    let bad = rows
        .iter()
        .filter(|r| matches!(r.last(), Some(Cell::Text(s)) if s != "ok" && s != "switched"))
        .count();
    (bad > 0).then(|| format!("{bad} {what} row(s) flagged"))
}

fn collect<T, F>(jobs: Vec<T>, f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Send + Sync,
{
    // Order follows `jobs` whatever the completion order.
    jobs.par_iter().map(f).collect()
}

fn with_length(cfg: &RunConfig) -> bool {
    matches!(cfg.kernel, KernelChoice::Interval | KernelChoice::Transformed)
}

fn lengths(cfg: &RunConfig) -> Vec<f64> {
    if with_length(cfg) {
        cfg.lengths.clone()
    } else {
        vec![f64::NAN]
    }
}

fn direct_value(cfg: &RunConfig, length: f64, m: f64, t: f64) -> vacuum_core::Result<f64> {
    match cfg.kernel {
        KernelChoice::Free => free_massive_cylinder(cfg.d, cfg.z, m, t),
        KernelChoice::Halfline => image_sum_halfline(cfg.x, cfg.y, cfg.d, m, t),
        KernelChoice::Interval | KernelChoice::Transformed => dirichlet_interval_trace(length, m * m, t, &cfg.tol),
    }
}

fn prefix(cfg: &RunConfig, length: f64, m: f64, t: f64) -> Vec<Cell> {
    let mut row = Vec::with_capacity(8);
    if with_length(cfg) {
        row.push(length.into());
    }
    row.push(m.into());
    row.push(t.into());
    row
}

fn columns(cfg: &RunConfig, rest: &[&'static str]) -> Vec<&'static str> {
    let mut c = Vec::new();
    if with_length(cfg) {
        c.push("L");
    }
    c.extend(["m", "t"]);
    c.extend(rest);
    c
}

fn grid3(cfg: &RunConfig) -> Vec<(f64, f64, f64)> {
    let mut jobs = Vec::new();
    for &l in &lengths(cfg) {
        for &m in &cfg.masses {
            for &t in &cfg.ts {
                jobs.push((l, m, t));
            }
        }
    }
    jobs
}

fn kernel(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = collect(grid3(cfg), |&(l, m, t)| {
        let mut row = prefix(cfg, l, m, t);
        match direct_value(cfg, l, m, t) {
            Ok(v) => row.extend([v.into(), "ok".into()]),
            Err(e) => row.extend([nan(), Cell::Text(row_status(e)?)]),
        }
        Ok(row)
    })?;
    let failure = failure_if_flagged(&rows, "kernel");
    Ok(Outcome {
        table: Table {
            columns: columns(cfg, &["value", "status"]),
            rows,
        },
        failure,
    })
}

fn massless_profile(cfg: &RunConfig, length: f64) -> Result<KernelProfile, CliError> {
    let p = match cfg.kernel {
        KernelChoice::Free => KernelProfile::free_massless(cfg.d, cfg.z),
        KernelChoice::Halfline => KernelProfile::halfline(cfg.d, cfg.x, cfg.y, 0.0),
        KernelChoice::Interval | KernelChoice::Transformed => KernelProfile::interval_trace(length),
    };
    p.map_err(|e| CliError::Invalid(e.to_string()))
}

fn transform(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = collect(grid3(cfg), |&(l, m, t)| {
        let profile = massless_profile(cfg, l)?;
        let mut row = prefix(cfg, l, m, t);
        let reference = direct_value(cfg, l, m, t).unwrap_or(f64::NAN);
        match to_massive_with_error(&profile, m, t, cfg.method, &cfg.tol) {
            Ok(r) => {
                let status = if r.converged { "ok" } else { "not_converged" };
                row.extend([
                    r.value.into(),
                    r.error_estimate.into(),
                    reference.into(),
                    (r.value - reference).abs().into(),
                    status.into(),
                ]);
            }
            Err(e) => {
                let status = row_status(e)?;
                row.extend([nan(), nan(), reference.into(), nan(), Cell::Text(status)]);
            }
        }
        Ok(row)
    })?;
    let failure = failure_if_flagged(&rows, "transform");
    Ok(Outcome {
        table: Table {
            columns: columns(cfg, &["value", "error_estimate", "reference", "abs_diff", "status"]),
            rows,
        },
        failure,
    })
}

fn mass_length_pairs(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.lengths
        .iter()
        .flat_map(|&l| cfg.masses.iter().map(move |&m| (m, l)))
        .collect()
}

fn energy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = collect(mass_length_pairs(cfg), |&(m, l)| {
        let mut row: Vec<Cell> = vec![m.into(), l.into()];
        match energy_breakdown(m, l, &cfg.tol) {
            Ok(b) => row.extend([
                b.massless_casimir.into(),
                b.boundary_constant.into(),
                b.mass_casimir.into(),
                b.total_renormalized.into(),
                b.force_relevant.into(),
                "ok".into(),
            ]),
            Err(e) => {
                let status = row_status(e)?;
                row.extend([nan(), nan(), nan(), nan(), nan(), Cell::Text(status)]);
            }
        }
        Ok(row)
    })?;
    let failure = failure_if_flagged(&rows, "energy");
    Ok(Outcome {
        table: Table {
            columns: vec!["m", "L", "massless", "boundary", "mass_casimir", "total", "force_relevant", "status"],
            rows,
        },
        failure,
    })
}

fn equiv_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = collect(mass_length_pairs(cfg), |&(m, l)| {
        let mut row: Vec<Cell> = vec![m.into(), l.into()];
        let integral = match mass_casimir_integral(m, l, &cfg.tol) {
            Ok(v) => v,
            Err(e) => {
                let status = row_status(e)?;
                row.extend([nan(), nan(), nan(), Cell::Text(status)]);
                return Ok(row);
            }
        };
        // Below the switchover the Bessel sum needs ~1/(mL) terms; it is not attempted.
        if m * l < SWITCHOVER_ML {
            row.extend([integral.into(), nan(), nan(), "switched".into()]);
            return Ok(row);
        }
        match mass_casimir_sum(m, l, &cfg.tol) {
            Ok(sum) => {
                let diff = (integral - sum).abs();
                let status = if diff < cfg.threshold { "ok" } else { "exceeds_threshold" };
                row.extend([integral.into(), sum.into(), diff.into(), status.into()]);
            }
            Err(e) => {
                let status = row_status(e)?;
                row.extend([integral.into(), nan(), nan(), Cell::Text(status)]);
            }
        }
        Ok(row)
    })?;
    let failure = failure_if_flagged(&rows, "equiv-check");
    Ok(Outcome {
        table: Table {
            columns: vec!["m", "L", "integral", "sum", "abs_diff", "status"],
            rows,
        },
        failure,
    })
}

fn pde_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut jobs = Vec::new();
    for &l in &lengths(cfg) {
        for &mu in &cfg.mus {
            for &t in &cfg.ts {
                jobs.push((l, mu, t));
            }
        }
    }
    let rows = collect(jobs, |&(l, mu, t)| {
        let residual = match cfg.kernel {
            KernelChoice::Transformed => {
                let profile = massless_profile(cfg, l)?;
                pde_residual(|mu, t| to_massive(&profile, mu.sqrt(), t, cfg.method, &cfg.tol), mu, t, cfg.h, cfg.h)
            }
            _ => pde_residual(|mu, t| direct_value(cfg, l, mu.sqrt(), t), mu, t, cfg.h, cfg.h),
        }
        .map_err(|e| CliError::Invalid(format!("kernel evaluation failed at mu={mu}, t={t}: {e}")))?;
        let mut row = Vec::new();
        if with_length(cfg) {
            row.push(l.into());
        }
        row.extend([mu.into(), t.into(), residual.into()]);
        Ok(row)
    })?;
    let max = rows
        .iter()
        .filter_map(|r| match r.last() {
            Some(Cell::Num(v)) => Some(*v),
            _ => None,
        })
        .fold(0.0, f64::max);
    let failure = (!(max < cfg.threshold)).then(|| format!("max residual {max:e} not below threshold {:e}", cfg.threshold));
    let mut columns = Vec::new();
    if with_length(cfg) {
        columns.push("L");
    }
    columns.extend(["mu", "t", "residual"]);
    Ok(Outcome {
        table: Table { columns, rows },
        failure,
    })
}

fn coeffs(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let invalid = |e: Error| CliError::Invalid(e.to_string());
    let mut rows = Vec::new();
    let mut failure = None;
    for &l in &cfg.lengths {
        // e_2 is tabulated on a uniform grid from 0 that also holds every requested μ.
        let top = cfg.mus.last().copied().unwrap_or(0.0).max(0.01);
        let mut knots: Vec<f64> = (0..=200).map(|k| top * k as f64 / 200.0).collect();
        knots.extend(&cfg.mus);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let table = match interval_renormalized_table(l, &knots, &cfg.tol) {
            Ok(t) => t,
            Err(e @ (Error::NotConverged { .. } | Error::Evaluation { .. })) => {
                failure = Some(format!("renormalized coefficient table for L={l}: {e}"));
                continue;
            }
            Err(e) => return Err(invalid(e)),
        };
        let exp = solve_cylinder_recursion(&interval_initial_data(l, cfg.order).map_err(invalid)?, 1, table, cfg.order)
            .map_err(invalid)?;
        for &mu in &cfg.mus {
            for s in 0..=cfg.order {
                let e = exp.e(s).unwrap().eval(mu, exp.renormalized()).map_err(invalid)?;
                let f = match exp.f(s) {
                    Some(c) => c.eval(mu, exp.renormalized()).map_err(invalid)?,
                    None => f64::NAN,
                };
                rows.push(vec![l.into(), mu.into(), Cell::Int(s as i64), e.into(), f.into()]);
            }
        }
    }
    Ok(Outcome {
        table: Table {
            columns: vec!["L", "mu", "s", "e", "f"],
            rows,
        },
        failure,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Kernel => kernel(cfg),
        Command::Transform => transform(cfg),
        Command::Energy => energy(cfg),
        Command::EquivCheck => equiv_check(cfg),
        Command::PdeCheck => pde_check(cfg),
        Command::Coeffs => coeffs(cfg),
    }
}
