//! CSV emission. Numbers are written in Rust's shortest round-trip decimal
//! form so reruns of the same configuration produce byte-identical files.

use std::io::Write;
use std::path::Path;

use minkflow::{DiagnosticsRecord, Grid, State, TranslatorProfile};

pub const TRACE_HEADER: &str =
    "t,grad_sup,ut_min,ut_max,u_min,u_max,energy_ut,energy_vtx,speed_mean,speed_dev,curvature_max,profile_dist";

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub fn write_trace_csv(path: &Path, trace: &[DiagnosticsRecord]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let fields = [
            r.t,
            r.grad_sup,
            r.ut_min,
            r.ut_max,
            r.u_min,
            r.u_max,
            r.energy_ut,
            r.energy_vtx,
            r.speed_mean,
            r.speed_dev,
            r.curvature_max,
            r.profile_dist,
        ];
        let row: Vec<String> = fields.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomically(path, out.as_bytes())
}

pub fn write_profile_csv(path: &Path, grid: &Grid, state: &State) -> std::io::Result<()> {
    let mut out = String::from("x,u\n");
    for (i, u) in state.u.iter().enumerate() {
        out.push_str(&format!("{},{}\n", grid.node(i), u));
    }
    write_atomically(path, out.as_bytes())
}

pub fn write_translator_csv(path: &Path, grid: &Grid, profile: &TranslatorProfile) -> std::io::Result<()> {
    let mut out = String::from("x,phi\n");
    for (i, phi) in profile.samples.iter().enumerate() {
        out.push_str(&format!("{},{}\n", grid.node(i), phi));
    }
    write_atomically(path, out.as_bytes())
}

/// One sweep result row; failed runs carry their error in `status`.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub theta_left: f64,
    pub theta_right: f64,
    pub d: f64,
    pub speed: f64,
    pub speed_dev: f64,
    pub profile_dist: f64,
    pub decay_rate: f64,
    pub status: String,
}

pub const SUMMARY_HEADER: &str =
    "theta_left,theta_right,d,speed,speed_dev,profile_dist,decay_rate,status";

pub fn write_summary_csv(path: &Path, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.theta_left,
            r.theta_right,
            r.d,
            r.speed,
            r.speed_dev,
            r.profile_dist,
            r.decay_rate,
            csv_field(&r.status)
        ));
    }
    write_atomically(path, out.as_bytes())
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    write_atomically(path, text.as_bytes())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)?;
    file.flush()
}
