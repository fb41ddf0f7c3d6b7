//! The four subcommands: run, verify, sweep, profile.

use std::path::Path;
use std::sync::mpsc;
use std::sync::Mutex;

use minkflow::{
    build_translator, check_c0_bound, check_energy_monotone, check_flux_identity,
    check_gradient_monotone, check_sup_integral, check_ut_bracket, check_ut_sandwich, fit_decay,
    run, CheckReport, DiagnosticsRecord, RunOutcome, Scheme,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output;
use crate::svg;

/// Scalars printed by `run` and reused by tests.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub a_tilde: f64,
    pub final_speed_dev: f64,
    pub final_profile_dist: f64,
    pub t_final: f64,
    pub snapshots: usize,
    pub stopped_steady: bool,
}

/// Execute one run and write the trace, final-profile and translator CSVs
/// (plus the SVG overlay when plotting is on).
pub fn cmd_run(cfg: &RunConfig, out_dir: &Path, quiet: bool, plot: bool) -> Result<RunSummary, CliError> {
    let spec = cfg.spec()?;
    let grid = spec.grid()?;
    let translator = build_translator(&spec)?;
    let outcome = run(&spec)?;

    output::write_trace_csv(&out_dir.join(&cfg.trace_file), &outcome.trace)?;
    output::write_profile_csv(&out_dir.join(&cfg.profile_file), &grid, &outcome.state)?;
    output::write_translator_csv(&out_dir.join(&cfg.translator_file), &grid, &translator)?;
    if plot || cfg.plot {
        let markup = svg::render_overlay(&grid, &outcome.state, &translator);
        output::write_text(&out_dir.join(&cfg.plot_file), &markup)?;
    }

    let last = outcome.trace.last().expect("trace always has the initial snapshot");
    let summary = RunSummary {
        a_tilde: spec.translation_speed()?,
        final_speed_dev: last.speed_dev,
        final_profile_dist: last.profile_dist,
        t_final: outcome.state.t,
        snapshots: outcome.trace.len(),
        stopped_steady: outcome.stopped_steady,
    };
    if !quiet {
        println!(
            "run: speed={} final_speed_dev={:e} final_profile_dist={:e} t_final={} snapshots={}{}",
            summary.a_tilde,
            summary.final_speed_dev,
            summary.final_profile_dist,
            summary.t_final,
            summary.snapshots,
            if summary.stopped_steady { " (steady translation detected)" } else { "" }
        );
    }
    Ok(summary)
}

fn sandwich_over_trace(trace: &[DiagnosticsRecord], a_tilde: f64, tol: f64) -> CheckReport {
    for rec in trace {
        let report = check_ut_sandwich(rec, a_tilde, tol);
        if !report.pass {
            return report;
        }
    }
    CheckReport { name: "ut_sandwich", pass: true, detail: format!("all {} snapshots", trace.len()) }
}

fn sup_integral_over_trace(trace: &[DiagnosticsRecord], d: f64, tol: f64) -> CheckReport {
    for rec in trace {
        let report = check_sup_integral(rec, d, tol);
        if !report.pass {
            return report;
        }
    }
    CheckReport { name: "sup_integral", pass: true, detail: format!("all {} snapshots", trace.len()) }
}

fn decay_check(cfg: &RunConfig, trace: &[DiagnosticsRecord]) -> CheckReport {
    const NAME: &str = "decay_fit";
    // Convergence drives energy_vtx toward the rounding floor of the rhs
    // evaluation; a tail living down there has no decay left to measure.
    let floor = 1e-18 * (1.0 + trace.first().map(|r| r.energy_vtx).unwrap_or(0.0));
    let start = trace.len().saturating_sub(
        ((trace.len() as f64 * cfg.decay_tail_fraction).ceil() as usize).min(trace.len()),
    );
    let tail_max = trace[start..].iter().map(|r| r.energy_vtx).fold(0.0f64, f64::max);
    match fit_decay(trace, cfg.decay_tail_fraction) {
        Ok(fit) if fit.rate > 0.0 && fit.r_squared >= 0.99 => CheckReport {
            name: NAME,
            pass: true,
            detail: format!("rate {:.4}, r² {:.6}", fit.rate, fit.r_squared),
        },
        Ok(_) if tail_max <= floor => CheckReport {
            name: NAME,
            pass: true,
            detail: format!("tail energy at the rounding floor ({tail_max:e}); nothing left to fit"),
        },
        Ok(fit) => CheckReport {
            name: NAME,
            pass: false,
            detail: format!("rate {:.4}, r² {:.6} (need rate > 0 and r² >= 0.99)", fit.rate, fit.r_squared),
        },
        Err(_) if tail_max <= floor => CheckReport {
            name: NAME,
            pass: true,
            detail: "already steady; tail energies below the underflow floor".into(),
        },
        Err(err) => CheckReport { name: NAME, pass: false, detail: err.to_string() },
    }
}

/// Run the flow and evaluate every enabled checker; returns the reports.
pub fn verify_reports(cfg: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    let spec = cfg.spec()?;
    let a_tilde = spec.translation_speed()?;
    let tol = cfg.scheme_tolerance();
    let outcome = run(&spec)?;
    let trace = &outcome.trace;

    let mut reports = Vec::new();
    if cfg.check_flux_identity {
        reports.push(check_flux_identity(trace, a_tilde));
    }
    if cfg.check_gradient_bound {
        if spec.scheme == Scheme::Explicit {
            reports.push(check_gradient_monotone(trace, 1e-12));
        } else {
            reports.push(CheckReport {
                name: "gradient_bound",
                pass: true,
                detail: "skipped: snapshot-to-snapshot monotonicity is an explicit-scheme property".into(),
            });
        }
    }
    if cfg.check_ut_bracket {
        reports.push(check_ut_bracket(trace, tol));
    }
    if cfg.check_energy_monotone {
        reports.push(check_energy_monotone(trace));
    }
    if cfg.check_ut_sandwich {
        reports.push(sandwich_over_trace(trace, a_tilde, tol));
    }
    if cfg.check_sup_integral {
        reports.push(sup_integral_over_trace(trace, spec.d, tol));
    }
    if cfg.check_c0_bound {
        if a_tilde == 0.0 {
            reports.push(check_c0_bound(trace, tol));
        } else {
            reports.push(CheckReport {
                name: "c0_bound",
                pass: true,
                detail: "skipped: u translates without bound when the speed is nonzero".into(),
            });
        }
    }
    if cfg.check_decay {
        reports.push(decay_check(cfg, trace));
    }
    Ok(reports)
}

/// Print the verification table; true iff every checker passed.
pub fn cmd_verify(cfg: &RunConfig, quiet: bool) -> Result<bool, CliError> {
    let reports = verify_reports(cfg)?;
    let mut all_pass = true;
    for report in &reports {
        all_pass &= report.pass;
        if !quiet {
            println!(
                "{:<16} {}  {}",
                report.name,
                if report.pass { "pass" } else { "FAIL" },
                report.detail
            );
        }
    }
    if !quiet {
        println!("verify: {}", if all_pass { "all checks passed" } else { "CHECKS FAILED" });
    }
    Ok(all_pass)
}

fn sorted(axis: &Option<Vec<f64>>, base: f64) -> Vec<f64> {
    match axis {
        Some(values) => {
            let mut v = values.clone();
            v.sort_by(f64::total_cmp);
            v
        }
        None => vec![base],
    }
}

fn sweep_point(cfg: &RunConfig, theta_left: f64, theta_right: f64, d: f64) -> output::SweepRow {
    let mut row = output::SweepRow {
        theta_left,
        theta_right,
        d,
        speed: f64::NAN,
        speed_dev: f64::NAN,
        profile_dist: f64::NAN,
        decay_rate: f64::NAN,
        status: "ok".into(),
    };
    let attempt = (|| -> Result<(), CliError> {
        let spec = cfg.spec_for(theta_left, theta_right, d)?;
        row.speed = spec.translation_speed()?;
        let outcome: RunOutcome = run(&spec)?;
        let last = outcome.trace.last().expect("nonempty trace");
        row.speed_dev = last.speed_dev;
        row.profile_dist = last.profile_dist;
        row.decay_rate = match fit_decay(&outcome.trace, cfg.decay_tail_fraction) {
            Ok(fit) => fit.rate,
            Err(_) => f64::NAN,
        };
        Ok(())
    })();
    if let Err(err) = attempt {
        row.status = format!("error: {err}");
    }
    row
}

/// Run the Cartesian product of the sweep axes concurrently and write one
/// summary row per point, sorted by (θ_left, θ_right, d). A failing point is
/// recorded in its row and never aborts the sweep.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    if cfg.sweep_theta_left.is_none() && cfg.sweep_theta_right.is_none() && cfg.sweep_d.is_none() {
        return Err(CliError::Validation(
            "sweep needs at least one non-empty axis (sweep_theta_left, sweep_theta_right or sweep_d)".into(),
        ));
    }
    let lefts = sorted(&cfg.sweep_theta_left, cfg.theta_left);
    let rights = sorted(&cfg.sweep_theta_right, cfg.theta_right);
    let ds = sorted(&cfg.sweep_d, cfg.d);

    let mut points = Vec::new();
    for &tl in &lefts {
        for &tr in &rights {
            for &d in &ds {
                points.push((tl, tr, d));
            }
        }
    }

    let rows: Mutex<Vec<Option<output::SweepRow>>> = Mutex::new(vec![None; points.len()]);
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(points.len().max(1));
    let (tx, rx) = mpsc::channel::<usize>();
    for idx in 0..points.len() {
        tx.send(idx).expect("queue send");
    }
    drop(tx);
    let queue = Mutex::new(rx);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let next = { queue.lock().expect("queue lock").recv() };
                match next {
                    Ok(idx) => {
                        let (tl, tr, d) = points[idx];
                        let row = sweep_point(cfg, tl, tr, d);
                        rows.lock().expect("rows lock")[idx] = Some(row);
                    }
                    Err(_) => break,
                }
            });
        }
    });

    let rows: Vec<output::SweepRow> =
        rows.into_inner().expect("rows lock").into_iter().map(|r| r.expect("worker filled row")).collect();
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    output::write_summary_csv(&out_dir.join(&cfg.summary_file), &rows)?;
    if !quiet {
        println!(
            "sweep: {} runs ({} failed) -> {}",
            rows.len(),
            failed,
            out_dir.join(&cfg.summary_file).display()
        );
    }
    Ok(())
}

/// Emit the translator profile alone.
pub fn cmd_profile(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let grid = spec.grid()?;
    let translator = build_translator(&spec)?;
    output::write_translator_csv(&out_dir.join(&cfg.translator_file), &grid, &translator)?;
    if !quiet {
        println!(
            "profile: kind {:?}, speed {} -> {}",
            translator.kind,
            translator.speed,
            out_dir.join(&cfg.translator_file).display()
        );
    }
    Ok(())
}
