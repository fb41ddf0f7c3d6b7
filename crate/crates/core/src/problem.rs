//! Problem description: domain, Neumann slope data, initial profile,
//! flux selection and discretization parameters.

use crate::error::{Result, SolverError};
use crate::flux::FluxFunction;
use crate::grid::Grid;
use crate::state::State;

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Explicit,
    SemiImplicit,
}

/// Time-step policy. CFL-adaptive applies to the explicit scheme only and
/// uses dt = safety · h² / (2 · max v'(σ)) recomputed from the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    CflAdaptive { safety: f64 },
    Fixed(f64),
}

/// Default CFL safety factor. v' varies in time; the margin absorbs
/// within-step growth and keeps the discrete maximum principles intact
/// (they need dt below h²/(3·max v') at the boundary-adjacent interface).
pub const DEFAULT_CFL_SAFETY: f64 = 0.45;

/// Initial profile u0. Closed-form tags know their endpoint slopes exactly;
/// `Translator` and `Table` are tabulated on the node grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// u ≡ value (compatible only with θ = 0 on both ends).
    Constant(f64),
    /// u = slope·x.
    Linear { slope: f64 },
    /// The Hermite cubic with zero endpoint values whose endpoint slopes
    /// match the prescribed θ: u = (x² - d²)(ax + b). Minimal-degree way to
    /// manufacture compatible data for an arbitrary θ pair.
    CubicBlend,
    /// amplitude·(1 + cos(πx/d))/2: a bump with zero endpoint slopes,
    /// compatible with θ = 0 on both ends.
    CosineBump { amplitude: f64 },
    /// Start on the translating profile itself.
    Translator,
    /// Raw node values (length must match the grid).
    Table(Vec<f64>),
}

impl InitialProfile {
    /// Endpoint slopes in closed form, when the tag has them.
    fn analytic_endpoint_slopes(&self, spec: &ProblemSpec) -> Option<(f64, f64)> {
        match self {
            InitialProfile::Constant(_) => Some((0.0, 0.0)),
            InitialProfile::Linear { slope } => Some((*slope, *slope)),
            InitialProfile::CubicBlend => Some((spec.theta_left, spec.theta_right)),
            InitialProfile::CosineBump { .. } => Some((0.0, 0.0)),
            InitialProfile::Translator | InitialProfile::Table(_) => None,
        }
    }

    fn sample(&self, spec: &ProblemSpec) -> Result<Vec<f64>> {
        let grid = spec.grid()?;
        let n = grid.nodes();
        let d = grid.d();
        Ok(match self {
            InitialProfile::Constant(value) => vec![*value; n],
            InitialProfile::Linear { slope } => (0..n).map(|i| slope * grid.node(i)).collect(),
            InitialProfile::CubicBlend => {
                let a = (spec.theta_right + spec.theta_left) / (4.0 * d * d);
                let b = (spec.theta_right - spec.theta_left) / (4.0 * d);
                (0..n)
                    .map(|i| {
                        let x = grid.node(i);
                        (x * x - d * d) * (a * x + b)
                    })
                    .collect()
            }
            InitialProfile::CosineBump { amplitude } => (0..n)
                .map(|i| {
                    let x = grid.node(i);
                    0.5 * amplitude * (1.0 + (std::f64::consts::PI * x / d).cos())
                })
                .collect(),
            InitialProfile::Translator => crate::asymptotics::build_translator(spec)?.samples,
            InitialProfile::Table(values) => {
                if values.len() != n {
                    return Err(SolverError::GridMismatch { left: values.len(), right: n });
                }
                values.clone()
            }
        })
    }
}

/// Full description of one initial-boundary-value problem run.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// Half-width of the interval [-d, d].
    pub d: f64,
    /// Prescribed slope u_x(-d, t).
    pub theta_left: f64,
    /// Prescribed slope u_x(d, t).
    pub theta_right: f64,
    pub flux: FluxFunction,
    pub initial: InitialProfile,
    /// Number of grid nodes, h = 2d/(nodes-1).
    pub nodes: usize,
    pub scheme: Scheme,
    pub dt: DtPolicy,
    pub t_end: f64,
    pub snapshot_every: f64,
    /// Whether to enforce the compatibility condition on u0.
    pub compat_check: bool,
    /// Override for the compatibility tolerance; the default is 1e-6 for
    /// closed-form profiles and 2h² for tabulated ones.
    pub compat_tol: Option<f64>,
    /// Steady-translation detection threshold on max|u̇ - Ã|; 0 disables.
    pub steady_eps: f64,
    /// Number of consecutive snapshots below `steady_eps` needed to stop.
    pub steady_consecutive: usize,
    /// Cap on dt-halving retries after a rejected step.
    pub retry_max: usize,
}

impl ProblemSpec {
    /// A spec with the library defaults; customize by mutating fields.
    pub fn new(d: f64, theta_left: f64, theta_right: f64, flux: FluxFunction) -> Self {
        Self {
            d,
            theta_left,
            theta_right,
            flux,
            initial: InitialProfile::CubicBlend,
            nodes: 201,
            scheme: Scheme::Explicit,
            dt: DtPolicy::CflAdaptive { safety: DEFAULT_CFL_SAFETY },
            t_end: 30.0,
            snapshot_every: 0.1,
            compat_check: true,
            compat_tol: None,
            steady_eps: 1e-5,
            steady_consecutive: 3,
            retry_max: 30,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.d, self.nodes)
    }

    /// Predicted translation speed Ã = (v(θ_d) - v(θ_{-d}))/(2d).
    pub fn translation_speed(&self) -> Result<f64> {
        crate::asymptotics::translation_speed(self.theta_left, self.theta_right, self.d, &self.flux)
    }

    /// Default compatibility tolerance for the chosen initial profile.
    pub fn compat_tolerance(&self) -> Result<f64> {
        if let Some(tol) = self.compat_tol {
            return Ok(tol);
        }
        let h = self.grid()?.h();
        Ok(match self.initial {
            InitialProfile::Translator | InitialProfile::Table(_) => 2.0 * h * h,
            _ => 1e-6,
        })
    }

    /// Sample the initial profile on the node grid at t = 0.
    pub fn initial_state(&self) -> Result<State> {
        Ok(State::new(0.0, self.initial.sample(self)?))
    }

    /// Compare the endpoint slopes of u0 against the Neumann data. Closed
    /// form profiles are checked through their exact derivative; tabulated
    /// ones through the one-sided second-order discrete slope.
    pub fn compatibility_report(&self) -> Result<CompatReport> {
        let tol = self.compat_tolerance()?;
        let (left, right) = match self.initial.analytic_endpoint_slopes(self) {
            Some(pair) => pair,
            None => {
                let u = self.initial.sample(self)?;
                let h = self.grid()?.h();
                let n = u.len();
                let left = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
                let right = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
                (left, right)
            }
        };
        let left_dev = (left - self.theta_left).abs();
        let right_dev = (right - self.theta_right).abs();
        Ok(CompatReport { left_dev, right_dev, tol, pass: left_dev <= tol && right_dev <= tol })
    }

    /// Check every precondition of a run: grid, spacelike boundary data,
    /// flux monotonicity, spacelike initial data, compatibility, scheduling.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let limit = self.flux.limit();
        if !self.theta_left.is_finite() || self.theta_left.abs() > limit {
            return Err(SolverError::Validation(format!(
                "theta_left must satisfy |θ| < 1 (within the domain margin), got {}",
                self.theta_left
            )));
        }
        if !self.theta_right.is_finite() || self.theta_right.abs() > limit {
            return Err(SolverError::Validation(format!(
                "theta_right must satisfy |θ| < 1 (within the domain margin), got {}",
                self.theta_right
            )));
        }
        let flux_report = self.flux.validate(101)?;
        if !flux_report.pass() {
            return Err(SolverError::Validation(format!(
                "flux fails monotonicity validation: {}",
                flux_report.failures[0].detail
            )));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(SolverError::Validation(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if !(self.snapshot_every > 0.0) || !self.snapshot_every.is_finite() {
            return Err(SolverError::Validation(format!(
                "snapshot_every must be > 0, got {}",
                self.snapshot_every
            )));
        }
        match self.dt {
            DtPolicy::Fixed(dt) => {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(SolverError::Validation(format!("fixed dt must be > 0, got {dt}")));
                }
            }
            DtPolicy::CflAdaptive { safety } => {
                if !(safety > 0.0) || !safety.is_finite() {
                    return Err(SolverError::Validation(format!(
                        "CFL safety factor must be > 0, got {safety}"
                    )));
                }
                if self.scheme == Scheme::SemiImplicit {
                    return Err(SolverError::Validation(
                        "CFL-adaptive dt applies to the explicit scheme only; give the semi-implicit scheme a fixed dt".into(),
                    ));
                }
            }
        }
        if self.steady_consecutive == 0 {
            return Err(SolverError::Validation("steady_consecutive must be at least 1".into()));
        }
        if !(self.steady_eps >= 0.0) {
            return Err(SolverError::Validation(format!(
                "steady_eps must be >= 0, got {}",
                self.steady_eps
            )));
        }

        let u0 = self.initial.sample(self)?;
        if u0.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Validation("initial profile contains non-finite values".into()));
        }
        let h = grid.h();
        for i in 0..u0.len() - 1 {
            let sigma = (u0[i + 1] - u0[i]) / h;
            if sigma.abs() > limit {
                return Err(SolverError::Validation(format!(
                    "initial profile is not spacelike: |du/dx| = {} > {} between nodes {} and {}",
                    sigma.abs(),
                    limit,
                    i,
                    i + 1
                )));
            }
        }
        if self.compat_check {
            let report = self.compatibility_report()?;
            if !report.pass {
                return Err(SolverError::Validation(format!(
                    "initial profile violates the compatibility condition: endpoint slope deviations ({:.3e}, {:.3e}) exceed {:.3e}",
                    report.left_dev, report.right_dev, report.tol
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of the compatibility check.
#[derive(Debug, Clone, Copy)]
pub struct CompatReport {
    pub left_dev: f64,
    pub right_dev: f64,
    pub tol: f64,
    pub pass: bool,
}
