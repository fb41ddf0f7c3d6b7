//! Conservative finite-volume discretization of u_t = (v(u_x))_x on [-d, d]
//! with Neumann slope data, plus explicit and semi-implicit stepping and run
//! orchestration.
//!
//! Slopes live on interfaces: σ_{i+1/2} = (u_{i+1} - u_i)/h between adjacent
//! nodes, while the two boundary interfaces carry the prescribed data θ
//! exactly. Interface fluxes are F = v(σ) and each node integrates the flux
//! difference over its control volume (h, halved at the ends). Two exact
//! discrete facts follow from the telescoping flux sum and zero boundary
//! slope rate:
//!
//! - Σ_i w_i u̇_i = v(θ_d) - v(θ_{-d}) at every state, up to rounding;
//! - under the explicit scheme within the CFL bound, interface slopes obey a
//!   discrete maximum principle, so max|σ| never grows and the spacelike
//!   property is preserved.

use crate::asymptotics::build_translator;
use crate::diagnostics::{detect_translation, snapshot, DiagnosticsRecord};
use crate::error::{Result, SolverError};
use crate::problem::{DtPolicy, ProblemSpec, Scheme};
use crate::state::State;

/// Interface slopes of a state: N+1 values, σ_{-1/2} = θ_{-d} and
/// σ_{N-1/2} = θ_d at the ends, adjacent differences between nodes inside.
/// Any slope beyond 1 - δ (or non-finite) is a spacelike violation.
pub fn node_slopes(state: &State, spec: &ProblemSpec) -> Result<Vec<f64>> {
    let grid = spec.grid()?;
    let n = grid.nodes();
    if state.u.len() != n {
        return Err(SolverError::GridMismatch { left: state.u.len(), right: n });
    }
    let h = grid.h();
    let limit = spec.flux.limit();
    let mut slopes = Vec::with_capacity(n + 1);
    slopes.push(spec.theta_left);
    for i in 0..n - 1 {
        slopes.push((state.u[i + 1] - state.u[i]) / h);
    }
    slopes.push(spec.theta_right);
    for (j, &sigma) in slopes.iter().enumerate() {
        if !(sigma.abs() <= limit) {
            return Err(SolverError::SpacelikeViolation {
                interface: j,
                slope: sigma,
                limit,
                t: state.t,
            });
        }
    }
    Ok(slopes)
}

fn rhs_from_slopes(slopes: &[f64], spec: &ProblemSpec) -> Result<Vec<f64>> {
    let grid = spec.grid()?;
    let n = grid.nodes();
    let mut fluxes = Vec::with_capacity(n + 1);
    for &sigma in slopes {
        fluxes.push(spec.flux.eval(sigma)?);
    }
    Ok((0..n)
        .map(|i| (fluxes[i + 1] - fluxes[i]) / grid.weight(i))
        .collect())
}

/// Discrete flux divergence u̇_i = (F_{i+1/2} - F_{i-1/2}) / w_i with
/// F = v(σ) and exact boundary fluxes v(θ_{-d}), v(θ_d).
pub fn rhs(state: &State, spec: &ProblemSpec) -> Result<Vec<f64>> {
    let slopes = node_slopes(state, spec)?;
    rhs_from_slopes(&slopes, spec)
}

/// Diffusive stability bound dt = safety · h² / (2 · max v'(σ)) evaluated on
/// the current state's slopes (boundary data included).
pub fn cfl_dt(state: &State, spec: &ProblemSpec, safety: f64) -> Result<f64> {
    let slopes = node_slopes(state, spec)?;
    let mut max_prime = 0.0f64;
    for &sigma in &slopes {
        max_prime = max_prime.max(spec.flux.prime(sigma)?);
    }
    if !(max_prime > 0.0) {
        return Err(SolverError::Numerical("non-positive v' while sizing the time step".into()));
    }
    let h = spec.grid()?.h();
    Ok(safety * h * h / (2.0 * max_prime))
}

fn check_state(state: &State, spec: &ProblemSpec) -> Result<()> {
    if state.u.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::Numerical(format!(
            "non-finite node values at t = {}",
            state.t
        )));
    }
    node_slopes(state, spec).map(|_| ())
}

/// One forward-Euler step. If the update breaks the discrete spacelike bound
/// the step is rejected and retried with dt halved, up to `retry_max` times;
/// the accepted step may therefore advance time by less than `dt`. Persistent
/// rejection is an error, never hidden.
pub fn step_explicit(state: &State, spec: &ProblemSpec, dt: f64) -> Result<State> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SolverError::Validation(format!("explicit step needs dt > 0, got {dt}")));
    }
    let rate = rhs(state, spec)?;
    let mut dt_try = dt;
    for _ in 0..=spec.retry_max {
        let u_new: Vec<f64> =
            state.u.iter().zip(&rate).map(|(u, r)| u + dt_try * r).collect();
        let candidate = State::new(state.t + dt_try, u_new);
        if check_state(&candidate, spec).is_ok() {
            return Ok(candidate);
        }
        dt_try *= 0.5;
    }
    Err(SolverError::Numerical(format!(
        "explicit step at t = {} still violates the spacelike bound after {} halvings",
        state.t, spec.retry_max
    )))
}

/// One semi-implicit step: solves (I - dt·L) δ = dt·rhs(u) and sets
/// u + δ, where L is the second-difference operator with the interface
/// coefficients v'(σ_{i+1/2}) frozen at the current state (one tridiagonal
/// solve, no Newton iteration). L annihilates constants, so a state with
/// uniform u̇ = Ã advances exactly by Ã·dt and the steady limit preserves
/// the discrete flux identity. Unconditionally stable in the frozen
/// coefficient model; the result is still checked and retried with a halved
/// dt if it leaves the spacelike region.
pub fn step_semi_implicit(state: &State, spec: &ProblemSpec, dt: f64) -> Result<State> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SolverError::Validation(format!("semi-implicit step needs dt > 0, got {dt}")));
    }
    let grid = spec.grid()?;
    let n = grid.nodes();
    let h = grid.h();
    let slopes = node_slopes(state, spec)?;
    let rate = rhs_from_slopes(&slopes, spec)?;
    // Frozen diffusion coefficients at the interior interfaces 1..n-1. The
    // boundary fluxes are constants of the state, so they contribute nothing
    // to L.
    let mut coeff = vec![0.0f64; n + 1];
    for j in 1..n {
        coeff[j] = spec.flux.prime(slopes[j])?;
    }

    let mut dt_try = dt;
    for _ in 0..=spec.retry_max {
        let mut lower = vec![0.0f64; n];
        let mut diag = vec![0.0f64; n];
        let mut upper = vec![0.0f64; n];
        let mut b = vec![0.0f64; n];
        for i in 0..n {
            let w = grid.weight(i);
            let a_left = coeff[i];
            let a_right = coeff[i + 1];
            lower[i] = -dt_try * a_left / (w * h);
            upper[i] = -dt_try * a_right / (w * h);
            diag[i] = 1.0 + dt_try * (a_left + a_right) / (w * h);
            b[i] = dt_try * rate[i];
        }
        let delta = solve_tridiagonal(&lower, &diag, &upper, &b)?;
        let u_new: Vec<f64> = state.u.iter().zip(&delta).map(|(u, d)| u + d).collect();
        let candidate = State::new(state.t + dt_try, u_new);
        if check_state(&candidate, spec).is_ok() {
            return Ok(candidate);
        }
        dt_try *= 0.5;
    }
    Err(SolverError::Numerical(format!(
        "semi-implicit step at t = {} still violates the spacelike bound after {} halvings",
        state.t, spec.retry_max
    )))
}

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are unused. With v' > 0 and dt > 0 the stepper's matrix is
/// strictly diagonally dominant, so a zero pivot indicates a corrupted
/// state.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    assert!(n > 0 && lower.len() == n && diag.len() == n && upper.len() == n);
    let mut c_prime = vec![0.0f64; n];
    let mut d_prime = vec![0.0f64; n];
    if diag[0] == 0.0 {
        return Err(SolverError::SingularSystem { row: 0 });
    }
    c_prime[0] = upper[0] / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c_prime[i - 1];
        if denom == 0.0 {
            return Err(SolverError::SingularSystem { row: i });
        }
        if i < n - 1 {
            c_prime[i] = upper[i] / denom;
        }
        d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / denom;
    }
    let mut x = vec![0.0f64; n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    Ok(x)
}

/// Result of a full run: the final state, the snapshot trace, and whether
/// the steady-translation detector (rather than t_end) ended the run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: State,
    pub trace: Vec<DiagnosticsRecord>,
    pub stopped_steady: bool,
}

/// Advance from u0 at t = 0 until t_end, or until the steady-translation
/// detector fires on `steady_consecutive` consecutive snapshots. Records one
/// diagnostics snapshot every `snapshot_every` time units (plus the initial
/// one); snapshots land on exact multiples of the cadence.
pub fn run(spec: &ProblemSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let translator = build_translator(spec)?;
    let a_tilde = spec.translation_speed()?;
    let mut state = spec.initial_state()?;

    let mut trace = Vec::new();
    let mut hits = 0usize;
    let record = |state: &State, hits: &mut usize| -> Result<DiagnosticsRecord> {
        let rec = snapshot(state, spec, Some(&translator))?;
        if spec.steady_eps > 0.0 && detect_translation(&rec, a_tilde, spec.steady_eps) {
            *hits += 1;
        } else {
            *hits = 0;
        }
        Ok(rec)
    };
    trace.push(record(&state, &mut hits)?);
    let mut stopped_steady = hits >= spec.steady_consecutive;

    let time_eps = 1e-12 * spec.snapshot_every;
    let mut k: u64 = 0;
    while !stopped_steady && spec.t_end - state.t > 1e-12 * spec.t_end.max(1.0) {
        let next = spec.t_end.min(((k + 1) as f64) * spec.snapshot_every);
        while next - state.t > time_eps {
            let policy_dt = match spec.dt {
                DtPolicy::CflAdaptive { safety } => cfl_dt(&state, spec, safety)?,
                DtPolicy::Fixed(dt) => dt,
            };
            let dt = policy_dt.min(next - state.t);
            let t_before = state.t;
            state = match spec.scheme {
                Scheme::Explicit => step_explicit(&state, spec, dt)?,
                Scheme::SemiImplicit => step_semi_implicit(&state, spec, dt)?,
            };
            if !(state.t > t_before) {
                return Err(SolverError::Numerical(format!(
                    "time step underflow at t = {t_before} (accepted dt no longer advances time)"
                )));
            }
        }
        state.t = next;
        k += 1;
        trace.push(record(&state, &mut hits)?);
        stopped_steady = hits >= spec.steady_consecutive;
    }

    Ok(RunOutcome { state, trace, stopped_steady })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::FluxFunction;
    use crate::problem::{InitialProfile, ProblemSpec};

    fn spec_with(n: usize, tl: f64, tr: f64, flux: FluxFunction) -> ProblemSpec {
        let mut spec = ProblemSpec::new(1.0, tl, tr, flux);
        spec.nodes = n;
        spec
    }

    #[test]
    fn slopes_of_constant_profile() {
        let mut spec = spec_with(11, -0.2, 0.3, FluxFunction::mcf());
        spec.initial = InitialProfile::Constant(5.0);
        let state = State::new(0.0, vec![5.0; 11]);
        let slopes = node_slopes(&state, &spec).unwrap();
        assert_eq!(slopes.len(), 12);
        assert_eq!(slopes[0], -0.2);
        assert_eq!(slopes[11], 0.3);
        assert!(slopes[1..11].iter().all(|&s| s == 0.0));
    }

    #[test]
    fn slopes_of_matching_linear_profile() {
        let spec = spec_with(21, 0.5, 0.5, FluxFunction::mcf());
        let g = spec.grid().unwrap();
        let state = State::new(0.0, (0..21).map(|i| 0.5 * g.node(i)).collect());
        let slopes = node_slopes(&state, &spec).unwrap();
        for &s in &slopes {
            assert!((s - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn slopes_flag_lightlike_interfaces() {
        // Nodes -1, 0, 1 with u = x²: the first interior slope is -1, on the cone.
        let spec = spec_with(3, 0.0, 0.0, FluxFunction::mcf());
        let state = State::new(0.0, vec![1.0, 0.0, 1.0]);
        let err = node_slopes(&state, &spec).unwrap_err();
        assert!(matches!(err, SolverError::SpacelikeViolation { interface: 1, .. }));
    }

    #[test]
    fn rhs_vanishes_on_steady_linear_profile() {
        let spec = spec_with(17, 0.3, 0.3, FluxFunction::mcf());
        let g = spec.grid().unwrap();
        let state = State::new(0.0, (0..17).map(|i| 0.3 * g.node(i) + 2.0).collect());
        let rate = rhs(&state, &spec).unwrap();
        for &r in &rate {
            assert!(r.abs() < 1e-13, "rhs = {r} on a steady line");
        }
    }

    #[test]
    fn rhs_of_quadratic_under_heat_is_exact_everywhere() {
        // u = x²/4 with θ = ∓1/2: u_t = u_xx = 1/2 at every node, boundaries
        // included, because the centered slope of a quadratic is exact.
        let spec = spec_with(11, -0.5, 0.5, FluxFunction::heat());
        let g = spec.grid().unwrap();
        let state = State::new(0.0, (0..11).map(|i| g.node(i) * g.node(i) / 4.0).collect());
        let rate = rhs(&state, &spec).unwrap();
        for (i, &r) in rate.iter().enumerate() {
            assert!((r - 0.5).abs() < 1e-12, "node {i}: rhs = {r}");
        }
    }

    #[test]
    fn rhs_telescopes_to_boundary_flux_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let spec = spec_with(101, -0.35, 0.55, FluxFunction::mcf());
        let g = spec.grid().unwrap();
        let h = g.h();
        let expected = spec.flux.eval(0.55).unwrap() - spec.flux.eval(-0.35).unwrap();
        for _ in 0..20 {
            // Random spacelike profile from random bounded slopes.
            let mut u = vec![rng.random_range(-1.0..1.0)];
            for _ in 0..100 {
                let s: f64 = rng.random_range(-0.8..0.8);
                let last = *u.last().unwrap();
                u.push(last + s * h);
            }
            let state = State::new(0.0, u);
            let rate = rhs(&state, &spec).unwrap();
            let total = g.integrate(&rate);
            assert!(
                (total - expected).abs() <= 10.0 * f64::EPSILON,
                "h-weighted rhs sum {total:e} vs flux difference {expected:e}"
            );
        }
    }

    #[test]
    fn explicit_step_keeps_constant_profile_fixed() {
        let spec = spec_with(11, 0.0, 0.0, FluxFunction::mcf());
        let state = State::new(0.0, vec![1.5; 11]);
        let next = step_explicit(&state, &spec, 1e-3).unwrap();
        assert_eq!(next.u, state.u);
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn explicit_step_halves_dt_until_accepted() {
        // A huge dt throws the profile far outside the light cone; the step
        // must come back with a halved dt rather than a broken state.
        let spec = spec_with(5, -0.4, 0.4, FluxFunction::mcf());
        let state = spec.initial_state().unwrap();
        let next = step_explicit(&state, &spec, 1e6).unwrap();
        assert!(next.t - state.t < 0.5e6, "accepted dt = {}", next.t - state.t);
        assert!(node_slopes(&next, &spec).is_ok());
    }

    #[test]
    fn explicit_step_aborts_after_retry_budget() {
        let mut spec = spec_with(5, -0.4, 0.4, FluxFunction::mcf());
        spec.retry_max = 0;
        let state = spec.initial_state().unwrap();
        let err = step_explicit(&state, &spec, 1e6).unwrap_err();
        assert!(matches!(err, SolverError::Numerical(_)));
    }

    #[test]
    fn semi_implicit_step_keeps_constant_profile_fixed() {
        let spec = spec_with(11, 0.0, 0.0, FluxFunction::mcf());
        let state = State::new(0.0, vec![-2.0; 11]);
        let next = step_semi_implicit(&state, &spec, 1e-2).unwrap();
        for (a, b) in next.u.iter().zip(&state.u) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn semi_implicit_matches_dense_solve() {
        // Oracle: dense Gaussian elimination on the same frozen-coefficient
        // system at small N.
        let spec = spec_with(40, -0.3, 0.45, FluxFunction::mcf());
        let state = spec.initial_state().unwrap();
        let dt = 5e-3;
        let fast = step_semi_implicit(&state, &spec, dt).unwrap();

        let g = spec.grid().unwrap();
        let n = g.nodes();
        let h = g.h();
        let slopes = node_slopes(&state, &spec).unwrap();
        let rate = rhs(&state, &spec).unwrap();
        let mut a = vec![vec![0.0f64; n]; n];
        let mut b = vec![0.0f64; n];
        for i in 0..n {
            let w = g.weight(i);
            let al = if i > 0 { spec.flux.prime(slopes[i]).unwrap() } else { 0.0 };
            let ar = if i < n - 1 { spec.flux.prime(slopes[i + 1]).unwrap() } else { 0.0 };
            a[i][i] = 1.0 + dt * (al + ar) / (w * h);
            if i > 0 {
                a[i][i - 1] = -dt * al / (w * h);
            }
            if i < n - 1 {
                a[i][i + 1] = -dt * ar / (w * h);
            }
            b[i] = dt * rate[i];
        }
        // Gaussian elimination with partial pivoting.
        for col in 0..n {
            let piv = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut delta = vec![0.0f64; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in row + 1..n {
                acc -= a[row][k] * delta[k];
            }
            delta[row] = acc / a[row][row];
        }

        for i in 0..n {
            let expected = state.u[i] + delta[i];
            assert!(
                (fast.u[i] - expected).abs() < 1e-12,
                "node {i}: tridiagonal {} vs dense {expected}",
                fast.u[i]
            );
        }
    }

    #[test]
    fn semi_implicit_translates_steady_profile_exactly() {
        // On the discrete translating profile, rhs ≡ Ã and L kills constants,
        // so one step is exactly u + Ã·dt.
        let mut spec = spec_with(101, -0.4, 0.4, FluxFunction::mcf());
        spec.initial = InitialProfile::Translator;
        let state = spec.initial_state().unwrap();
        let a_tilde = spec.translation_speed().unwrap();
        let dt = 1e-2;
        let next = step_semi_implicit(&state, &spec, dt).unwrap();
        for i in 0..state.nodes() {
            let expected = state.u[i] + a_tilde * dt;
            assert!((next.u[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_identity_system() {
        let n = 5;
        let x = solve_tridiagonal(
            &vec![0.0; n],
            &vec![1.0; n],
            &vec![0.0; n],
            &[1.0, 2.0, 3.0, 4.0, 5.0],
        )
        .unwrap();
        for (i, &v) in x.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn tridiagonal_laplacian_system() {
        // [2 -1; -1 2 -1; ...] x = e1 + e4, verified by residual.
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0, 2.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let b = [1.0, 0.0, 0.0, 1.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &b).unwrap();
        let ax = [
            diag[0] * x[0] + upper[0] * x[1],
            lower[1] * x[0] + diag[1] * x[1] + upper[1] * x[2],
            lower[2] * x[1] + diag[2] * x[2] + upper[2] * x[3],
            lower[3] * x[2] + diag[3] * x[3],
        ];
        for i in 0..4 {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_detects_zero_pivot() {
        let err = solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, SolverError::SingularSystem { row: 0 }));
    }

    #[test]
    fn run_with_zero_horizon_returns_initial_state() {
        let mut spec = spec_with(51, -0.4, 0.4, FluxFunction::mcf());
        spec.t_end = 0.0;
        let out = run(&spec).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.state.t, 0.0);
        assert_eq!(out.state.u, spec.initial_state().unwrap().u);
    }

    #[test]
    fn run_is_bit_deterministic() {
        let mut spec = spec_with(51, -0.3, 0.3, FluxFunction::mcf());
        spec.t_end = 0.5;
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        assert_eq!(a.state.u, b.state.u);
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.t.to_bits(), rb.t.to_bits());
            assert_eq!(ra.speed_dev.to_bits(), rb.speed_dev.to_bits());
            assert_eq!(ra.energy_vtx.to_bits(), rb.energy_vtx.to_bits());
        }
    }

    #[test]
    fn run_converges_to_constant_from_cosine_bump() {
        // θ = 0 on both ends: Ã = 0 and the graph flattens to a constant.
        let mut spec = spec_with(101, 0.0, 0.0, FluxFunction::mcf());
        spec.initial = InitialProfile::CosineBump { amplitude: 0.1 };
        let out = run(&spec).unwrap();
        assert!(out.stopped_steady, "bump should settle before t_end");
        let spread = out.state.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - out.state.u.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-4, "final spread {spread}");
    }
}
