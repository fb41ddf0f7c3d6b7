//! Solver for the quasilinear parabolic initial-boundary-value problem
//! u_t = (v(u_x))_x on [-d, d] with prescribed boundary slopes
//! u_x(±d, t) = θ_±d, for flux functions v with v' > 0 on (-1, 1).
//!
//! The MCF flux v = artanh turns this into the mean curvature flow of a
//! spacelike graph in the Lorentz-Minkowski plane; v = id is the heat flow.
//! Solutions converge to profiles translating at the speed
//! Ã = (v(θ_d) - v(θ_{-d}))/(2d): a straight line when the boundary slopes
//! agree, the spacelike Grim Reaper under MCF, a spacelike parabola under
//! the heat flow.
//!
//! The crate couples a conservative finite-volume discretization
//! ([`solver`]) with a diagnostics layer ([`diagnostics`]) that tests the
//! discrete counterparts of the maximum-principle estimates at runtime, and
//! an asymptotics layer ([`asymptotics`]) that constructs the limit profile
//! and measures convergence toward it.

// Negated comparisons like `!(x <= limit)` are deliberate throughout: they
// treat NaN as out of bounds, which `x > limit` would silently pass.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod flux;
pub mod grid;
mod kahan;
pub mod problem;
pub mod solver;
pub mod state;

pub use asymptotics::{build_translator, profile_distance, translation_speed, TranslatorKind, TranslatorProfile};
pub use diagnostics::{
    check_c0_bound, check_energy_monotone, check_flux_identity, check_gradient_monotone,
    check_sup_integral, check_ut_bracket, check_ut_sandwich, default_scheme_tol,
    detect_translation, fit_decay, snapshot, CheckReport, DecayFit, DiagnosticsRecord,
};
pub use error::{Result, SolverError};
pub use flux::{FluxFunction, FluxKind, FluxReport};
pub use grid::Grid;
pub use problem::{CompatReport, DtPolicy, InitialProfile, ProblemSpec, Scheme};
pub use solver::{
    cfl_dt, node_slopes, rhs, run, solve_tridiagonal, step_explicit, step_semi_implicit,
    RunOutcome,
};
pub use state::State;
