//! Per-snapshot diagnostics and discrete analogs of the a-priori estimates
//! that govern the flow: the u_t extremum bracket, the decreasing u_t
//! energy, the u_t sandwich around the translation speed, the sup-integral
//! inequality for v_t, the gradient bound, and the exponential decay of
//! ∫v_tx² dx.
//!
//! u̇ is always recomputed as rhs(state), never as a finite difference of
//! consecutive states, so the diagnostics are statements about the PDE
//! right-hand side and independent of the stepping scheme. Node fields are
//! integrated with the trapezoid weights (the control-volume widths),
//! interface fields with plain h over the interior interfaces; both sum the
//! weights exactly to 2d, which is what makes the discrete inequalities
//! sharp.

use crate::asymptotics::{profile_distance, TranslatorProfile};
use crate::error::{Result, SolverError};
use crate::kahan::neumaier_sum;
use crate::problem::ProblemSpec;
use crate::solver::{node_slopes, rhs};
use crate::state::State;

/// Scalar diagnostics of one snapshot. The first twelve fields form the CSV
/// row contract (in declaration order); `int_abs_uxt` and `sup_vt_sq` are
/// carried for the sandwich and sup-integral checkers and not serialized.
#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// max over interfaces of |σ| (boundary data included).
    pub grad_sup: f64,
    pub ut_min: f64,
    pub ut_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Trapezoid-weighted Σ u̇².
    pub energy_ut: f64,
    /// Discrete ∫ v_tx² dx.
    pub energy_vtx: f64,
    /// (Σ w_i u̇_i) / (2d); equals Ã to rounding by the telescoping flux sum.
    pub speed_mean: f64,
    /// max_i |u̇_i - Ã|.
    pub speed_dev: f64,
    /// max |k| with k = u_xx / (1 - u_x²)^(3/2).
    pub curvature_max: f64,
    /// Distance to the translating profile modulo vertical shift; NaN when
    /// no profile was supplied.
    pub profile_dist: f64,
    /// Discrete ∫ |u_xt| dx (h-weighted sum of interface |σ̇|).
    pub int_abs_uxt: f64,
    /// max over interfaces of (v'(σ)·σ̇)².
    pub sup_vt_sq: f64,
    /// Range of the detrended field u - θ_{-d}·x. When the two boundary
    /// slopes agree, constants solve the detrended problem, so this range
    /// obeys the comparison principle; the raw u range does not once the
    /// limit line is slanted.
    pub detrended_min: f64,
    pub detrended_max: f64,
}

/// Compute every diagnostic of a state.
///
/// σ̇ is the interface difference of u̇; the boundary interfaces have σ̇ = 0
/// exactly because the Neumann data is constant in time, which is the
/// discrete counterpart of v_t vanishing at the ends. v_t = v'(σ)·σ̇ lives
/// on interfaces and its spatial difference v_tx on nodes.
pub fn snapshot(
    state: &State,
    spec: &ProblemSpec,
    translator: Option<&TranslatorProfile>,
) -> Result<DiagnosticsRecord> {
    let grid = spec.grid()?;
    let n = grid.nodes();
    let h = grid.h();
    let slopes = node_slopes(state, spec)?;
    let rate = rhs(state, spec)?;
    let a_tilde = spec.translation_speed()?;

    let grad_sup = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let (mut ut_min, mut ut_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &r in &rate {
        ut_min = ut_min.min(r);
        ut_max = ut_max.max(r);
    }
    let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &u in &state.u {
        u_min = u_min.min(u);
        u_max = u_max.max(u);
    }
    let (mut detrended_min, mut detrended_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &u) in state.u.iter().enumerate() {
        let w = u - spec.theta_left * grid.node(i);
        detrended_min = detrended_min.min(w);
        detrended_max = detrended_max.max(w);
    }

    let energy_ut = neumaier_sum((0..n).map(|i| grid.weight(i) * rate[i] * rate[i]));
    let speed_mean = grid.integrate(&rate) / grid.length();
    let speed_dev = rate.iter().map(|r| (r - a_tilde).abs()).fold(0.0f64, f64::max);

    // Interface slope rates; the prescribed boundary slopes do not move.
    let mut sigma_dot = vec![0.0f64; n + 1];
    for j in 1..n {
        sigma_dot[j] = (rate[j] - rate[j - 1]) / h;
    }
    let mut v_t = vec![0.0f64; n + 1];
    for j in 0..=n {
        v_t[j] = spec.flux.prime(slopes[j])? * sigma_dot[j];
    }
    let sup_vt_sq = v_t.iter().map(|v| v * v).fold(0.0f64, f64::max);
    let int_abs_uxt = neumaier_sum((1..n).map(|j| h * sigma_dot[j].abs()));
    let energy_vtx = neumaier_sum((0..n).map(|i| {
        let vtx = (v_t[i + 1] - v_t[i]) / grid.weight(i);
        grid.weight(i) * vtx * vtx
    }));

    let mut curvature_max = 0.0f64;
    for i in 0..n {
        let ux = 0.5 * (slopes[i] + slopes[i + 1]);
        let uxx = (slopes[i + 1] - slopes[i]) / grid.weight(i);
        let k = uxx / (1.0 - ux * ux).powf(1.5);
        curvature_max = curvature_max.max(k.abs());
    }

    let profile_dist = match translator {
        Some(p) => profile_distance(state, p)?,
        None => f64::NAN,
    };

    Ok(DiagnosticsRecord {
        t: state.t,
        grad_sup,
        ut_min,
        ut_max,
        u_min,
        u_max,
        energy_ut,
        energy_vtx,
        speed_mean,
        speed_dev,
        curvature_max,
        profile_dist,
        int_abs_uxt,
        sup_vt_sq,
        detrended_min,
        detrended_max,
    })
}

/// Outcome of one checker; failures carry the offending snapshot.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &'static str, detail: String) -> Self {
        Self { name, pass: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self { name, pass: false, detail }
    }
}

/// Default per-check slack: 1e-6 at N = 201, scaled as O(h²) with the grid.
pub fn default_scheme_tol(nodes: usize) -> f64 {
    let ratio = 200.0 / ((nodes - 1) as f64);
    1e-6 * ratio * ratio
}

/// u_t extremum bracket: min/max of u̇ never leave their initial bracket.
pub fn check_ut_bracket(trace: &[DiagnosticsRecord], tol: f64) -> CheckReport {
    const NAME: &str = "ut_bracket";
    if trace.is_empty() {
        return CheckReport::fail(NAME, "empty trace".into());
    }
    let lo = trace[0].ut_min - tol;
    let hi = trace[0].ut_max + tol;
    for (k, rec) in trace.iter().enumerate() {
        let excess = (lo - rec.ut_min).max(rec.ut_max - hi);
        if excess > 0.0 {
            return CheckReport::fail(
                NAME,
                format!(
                    "snapshot {k} (t = {}) leaves the initial bracket [{}, {}] by {excess:e}",
                    rec.t, trace[0].ut_min, trace[0].ut_max
                ),
            );
        }
    }
    CheckReport::pass(
        NAME,
        format!("all {} snapshots inside the initial bracket (tol {tol:e})", trace.len()),
    )
}

/// ∫u̇² dx never increases between consecutive snapshots.
pub fn check_energy_monotone(trace: &[DiagnosticsRecord]) -> CheckReport {
    const NAME: &str = "energy_monotone";
    if trace.len() < 2 {
        return CheckReport::pass(NAME, "fewer than two snapshots; nothing to compare".into());
    }
    let mono_tol = 1e-10 * (1.0 + trace[0].energy_ut);
    for k in 1..trace.len() {
        let growth = trace[k].energy_ut - trace[k - 1].energy_ut;
        if growth > mono_tol {
            return CheckReport::fail(
                NAME,
                format!(
                    "energy grew by {growth:e} between snapshots {} and {k} (t = {})",
                    k - 1,
                    trace[k].t
                ),
            );
        }
    }
    CheckReport::pass(NAME, format!("non-increasing within {mono_tol:e}"))
}

/// The sandwich Ã - ∫|u_xt| ≤ u̇ ≤ Ã + ∫|u_xt| on one snapshot.
pub fn check_ut_sandwich(record: &DiagnosticsRecord, a_tilde: f64, tol: f64) -> CheckReport {
    const NAME: &str = "ut_sandwich";
    let lo = a_tilde - record.int_abs_uxt - tol;
    let hi = a_tilde + record.int_abs_uxt + tol;
    if record.ut_min < lo || record.ut_max > hi {
        return CheckReport::fail(
            NAME,
            format!(
                "t = {}: u̇ range [{}, {}] escapes [{lo}, {hi}]",
                record.t, record.ut_min, record.ut_max
            ),
        );
    }
    CheckReport::pass(NAME, format!("t = {}: within ±∫|u_xt| = {:e}", record.t, record.int_abs_uxt))
}

/// sup (v_t)² ≤ 2d · ∫v_tx² dx on one snapshot. Discretely this is exact:
/// v_t vanishes at the boundary interfaces and telescopes over the node
/// spacings, whose total is 2d, so Cauchy-Schwarz applies verbatim.
pub fn check_sup_integral(record: &DiagnosticsRecord, d: f64, tol: f64) -> CheckReport {
    const NAME: &str = "sup_integral";
    let bound = 2.0 * d * record.energy_vtx + tol;
    if record.sup_vt_sq > bound {
        return CheckReport::fail(
            NAME,
            format!("t = {}: sup(v_t)² = {:e} exceeds 2d·∫v_tx² = {:e}", record.t, record.sup_vt_sq, bound),
        );
    }
    CheckReport::pass(NAME, format!("t = {}: sup(v_t)² = {:e} ≤ {:e}", record.t, record.sup_vt_sq, bound))
}

/// max interface |σ| never grows from snapshot to snapshot (explicit scheme
/// under the CFL bound).
pub fn check_gradient_monotone(trace: &[DiagnosticsRecord], tol: f64) -> CheckReport {
    const NAME: &str = "gradient_bound";
    for k in 1..trace.len() {
        let growth = trace[k].grad_sup - trace[k - 1].grad_sup;
        if growth > tol {
            return CheckReport::fail(
                NAME,
                format!(
                    "sup|u_x| grew by {growth:e} between snapshots {} and {k} (t = {})",
                    k - 1,
                    trace[k].t
                ),
            );
        }
    }
    CheckReport::pass(NAME, format!("non-increasing within {tol:e}"))
}

/// |speed_mean - Ã| at every snapshot, a telescoping identity of the
/// conservative scheme that must hold to rounding.
pub fn check_flux_identity(trace: &[DiagnosticsRecord], a_tilde: f64) -> CheckReport {
    const NAME: &str = "flux_identity";
    let tol = 10.0 * f64::EPSILON;
    let mut worst = 0.0f64;
    for (k, rec) in trace.iter().enumerate() {
        let dev = (rec.speed_mean - a_tilde).abs();
        worst = worst.max(dev);
        if dev > tol {
            return CheckReport::fail(
                NAME,
                format!("snapshot {k} (t = {}): |speed_mean - Ã| = {dev:e} > {tol:e}", rec.t),
            );
        }
    }
    CheckReport::pass(NAME, format!("worst deviation {worst:e}"))
}

/// C⁰ bound: the solution stays inside its initial range, measured on the
/// detrended field u - θ·x. Meaningful only when Ã = 0, i.e. the two
/// boundary slopes agree on a common θ: constants then solve the detrended
/// problem and the comparison principle pins its range (when the limit line
/// is slanted, the raw range of u grows toward it and bounds nothing). For
/// θ = 0 this is the plain range of u.
pub fn check_c0_bound(trace: &[DiagnosticsRecord], tol: f64) -> CheckReport {
    const NAME: &str = "c0_bound";
    if trace.is_empty() {
        return CheckReport::fail(NAME, "empty trace".into());
    }
    let lo = trace[0].detrended_min - tol;
    let hi = trace[0].detrended_max + tol;
    for (k, rec) in trace.iter().enumerate() {
        if rec.detrended_min < lo || rec.detrended_max > hi {
            return CheckReport::fail(
                NAME,
                format!(
                    "snapshot {k} (t = {}): detrended range [{}, {}] leaves [{lo}, {hi}]",
                    rec.t, rec.detrended_min, rec.detrended_max
                ),
            );
        }
    }
    CheckReport::pass(NAME, format!("u - θx stayed within its initial range ± {tol:e}"))
}

/// True once the state translates uniformly: max|u̇ - Ã| < eps (strict, so
/// eps = 0 never fires).
pub fn detect_translation(record: &DiagnosticsRecord, a_tilde: f64, eps: f64) -> bool {
    let _ = a_tilde; // speed_dev already measures against Ã
    record.speed_dev < eps
}

/// Least-squares fit of ln ∫v_tx² against t.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Magnitude of the fitted slope; positive means decay.
    pub rate: f64,
    /// Coefficient of determination of the line fit (0 for a degenerate
    /// constant-energy tail).
    pub r_squared: f64,
}

/// Fit the exponential decay rate of energy_vtx over the trace tail (the
/// last `tail_fraction` of the snapshots). Records whose energy has sunk to
/// the underflow floor are ignored; fewer than 5 usable records is an error.
pub fn fit_decay(trace: &[DiagnosticsRecord], tail_fraction: f64) -> Result<DecayFit> {
    const FLOOR: f64 = 1e-300;
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(SolverError::Validation(format!(
            "tail_fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let start = trace.len() - ((trace.len() as f64 * tail_fraction).ceil() as usize).min(trace.len());
    let pts: Vec<(f64, f64)> = trace[start..]
        .iter()
        .filter(|r| r.energy_vtx > FLOOR)
        .map(|r| (r.t, r.energy_vtx.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(SolverError::InsufficientData(format!(
            "decay fit needs at least 5 tail snapshots above the underflow floor, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for &(t, y) in &pts {
        stt += (t - t_mean) * (t - t_mean);
        sty += (t - t_mean) * (y - y_mean);
    }
    if stt == 0.0 {
        return Err(SolverError::InsufficientData("decay fit tail has zero time spread".into()));
    }
    let slope = sty / stt;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(t, y) in &pts {
        let fit = y_mean + slope * (t - t_mean);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - y_mean) * (y - y_mean);
    }
    // Constant-energy tails have nothing to fit; report zero rate, zero r².
    let r_squared = if ss_tot <= f64::EPSILON * n { 0.0 } else { 1.0 - ss_res / ss_tot };
    let rate = if ss_tot <= f64::EPSILON * n { 0.0 } else { -slope };
    Ok(DecayFit { rate, r_squared })
}
