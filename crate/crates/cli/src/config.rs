//! Flat JSON run configuration.
//!
//! Only `d`, `theta_left` and `theta_right` are required; everything else
//! defaults. Unknown keys are an error so typos cannot silently change a
//! run.

use serde::Deserialize;

use minkflow::{DtPolicy, FluxFunction, InitialProfile, ProblemSpec, Scheme};

use crate::error::CliError;

fn default_flux() -> String {
    "mcf".into()
}
fn default_nodes() -> usize {
    201
}
fn default_scheme() -> String {
    "explicit".into()
}
fn default_cfl_safety() -> f64 {
    0.45
}
fn default_t_end() -> f64 {
    30.0
}
fn default_snapshot_every() -> f64 {
    0.1
}
fn default_u0() -> String {
    "cubic-blend".into()
}
fn default_true() -> bool {
    true
}
fn default_steady_eps() -> f64 {
    1e-5
}
fn default_steady_consecutive() -> usize {
    3
}
fn default_retry_max() -> usize {
    30
}
fn default_domain_margin() -> f64 {
    1e-9
}
fn default_decay_tail_fraction() -> f64 {
    0.5
}
fn default_trace_file() -> String {
    "trace.csv".into()
}
fn default_profile_file() -> String {
    "profile.csv".into()
}
fn default_translator_file() -> String {
    "translator.csv".into()
}
fn default_summary_file() -> String {
    "summary.csv".into()
}
fn default_plot_file() -> String {
    "plot.svg".into()
}

/// One flat JSON document, deserialized strictly.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: f64,
    pub theta_left: f64,
    pub theta_right: f64,

    /// "mcf", "heat" or "custom" (with `custom_flux` naming the member).
    #[serde(default = "default_flux")]
    pub flux: String,
    /// Named parameterization for `flux = "custom"`; "cubic" is built in.
    #[serde(default)]
    pub custom_flux: Option<String>,

    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// "explicit" or "semi-implicit".
    #[serde(default = "default_scheme")]
    pub scheme: String,
    /// Fixed time step; omitted means CFL-adaptive for the explicit scheme
    /// and 1e-3 for the semi-implicit one.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: f64,

    /// "constant", "linear", "cubic-blend", "cosine-bump", "translator" or
    /// "table".
    #[serde(default = "default_u0")]
    pub u0: String,
    /// Tag parameter: the constant's value, the line's slope, or the bump's
    /// amplitude.
    #[serde(default)]
    pub u0_value: Option<f64>,
    /// Node values for `u0 = "table"`; length must match `nodes`.
    #[serde(default)]
    pub u0_table: Option<Vec<f64>>,

    #[serde(default = "default_true")]
    pub compat_check: bool,
    #[serde(default)]
    pub compat_tol: Option<f64>,
    #[serde(default = "default_domain_margin")]
    pub domain_margin: f64,
    #[serde(default = "default_steady_eps")]
    pub steady_eps: f64,
    #[serde(default = "default_steady_consecutive")]
    pub steady_consecutive: usize,
    #[serde(default = "default_retry_max")]
    pub retry_max: usize,
    /// Slack for the invariant checkers; defaults to 1e-6 scaled by (h/h_201)².
    #[serde(default)]
    pub scheme_tol: Option<f64>,
    #[serde(default = "default_decay_tail_fraction")]
    pub decay_tail_fraction: f64,

    // Checker toggles for `verify`.
    #[serde(default = "default_true")]
    pub check_ut_bracket: bool,
    #[serde(default = "default_true")]
    pub check_energy_monotone: bool,
    #[serde(default = "default_true")]
    pub check_ut_sandwich: bool,
    #[serde(default = "default_true")]
    pub check_sup_integral: bool,
    #[serde(default = "default_true")]
    pub check_gradient_bound: bool,
    #[serde(default = "default_true")]
    pub check_flux_identity: bool,
    #[serde(default = "default_true")]
    pub check_c0_bound: bool,
    #[serde(default = "default_true")]
    pub check_decay: bool,

    // Sweep axes. An axis that is present must be non-empty; a missing axis
    // pins the base value.
    #[serde(default)]
    pub sweep_theta_left: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep_theta_right: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep_d: Option<Vec<f64>>,

    // Output files, relative to --output-dir.
    #[serde(default = "default_trace_file")]
    pub trace_file: String,
    #[serde(default = "default_profile_file")]
    pub profile_file: String,
    #[serde(default = "default_translator_file")]
    pub translator_file: String,
    #[serde(default = "default_summary_file")]
    pub summary_file: String,
    #[serde(default = "default_plot_file")]
    pub plot_file: String,
    #[serde(default)]
    pub plot: bool,
}

impl RunConfig {
    /// Assemble the flux selected by the config.
    pub fn flux_function(&self) -> Result<FluxFunction, CliError> {
        let flux = match self.flux.as_str() {
            "mcf" => FluxFunction::mcf(),
            "heat" => FluxFunction::heat(),
            "custom" => match self.custom_flux.as_deref() {
                Some("cubic") => FluxFunction::cubic(),
                Some(other) => {
                    return Err(CliError::Validation(format!(
                        "unknown custom_flux \"{other}\" (built in: \"cubic\")"
                    )))
                }
                None => {
                    return Err(CliError::Validation(
                        "flux = \"custom\" requires custom_flux to name the parameterization".into(),
                    ))
                }
            },
            other => {
                return Err(CliError::Validation(format!(
                    "unknown flux \"{other}\" (expected \"mcf\", \"heat\" or \"custom\")"
                )))
            }
        };
        Ok(flux.with_margin(self.domain_margin)?)
    }

    fn initial_profile(&self) -> Result<InitialProfile, CliError> {
        Ok(match self.u0.as_str() {
            "constant" => InitialProfile::Constant(self.u0_value.unwrap_or(0.0)),
            "linear" => InitialProfile::Linear { slope: self.u0_value.unwrap_or(self.theta_left) },
            "cubic-blend" => InitialProfile::CubicBlend,
            "cosine-bump" => InitialProfile::CosineBump { amplitude: self.u0_value.unwrap_or(0.1) },
            "translator" => InitialProfile::Translator,
            "table" => match &self.u0_table {
                Some(values) => InitialProfile::Table(values.clone()),
                None => {
                    return Err(CliError::Validation("u0 = \"table\" requires u0_table".into()))
                }
            },
            other => {
                return Err(CliError::Validation(format!(
                    "unknown u0 \"{other}\" (expected \"constant\", \"linear\", \"cubic-blend\", \"cosine-bump\", \"translator\" or \"table\")"
                )))
            }
        })
    }

    /// Build a problem for explicit parameter values (used by sweeps).
    pub fn spec_for(&self, theta_left: f64, theta_right: f64, d: f64) -> Result<ProblemSpec, CliError> {
        let scheme = match self.scheme.as_str() {
            "explicit" => Scheme::Explicit,
            "semi-implicit" => Scheme::SemiImplicit,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown scheme \"{other}\" (expected \"explicit\" or \"semi-implicit\")"
                )))
            }
        };
        let dt = match (self.dt, scheme) {
            (Some(dt), _) => DtPolicy::Fixed(dt),
            (None, Scheme::Explicit) => DtPolicy::CflAdaptive { safety: self.cfl_safety },
            (None, Scheme::SemiImplicit) => DtPolicy::Fixed(1e-3),
        };
        let mut spec = ProblemSpec::new(d, theta_left, theta_right, self.flux_function()?);
        spec.initial = self.initial_profile()?;
        spec.nodes = self.nodes;
        spec.scheme = scheme;
        spec.dt = dt;
        spec.t_end = self.t_end;
        spec.snapshot_every = self.snapshot_every;
        spec.compat_check = self.compat_check;
        spec.compat_tol = self.compat_tol;
        spec.steady_eps = self.steady_eps;
        spec.steady_consecutive = self.steady_consecutive;
        spec.retry_max = self.retry_max;
        Ok(spec)
    }

    /// Build the problem at the base parameter values.
    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        self.spec_for(self.theta_left, self.theta_right, self.d)
    }

    /// Checker slack; see [`minkflow::default_scheme_tol`].
    pub fn scheme_tolerance(&self) -> f64 {
        self.scheme_tol.unwrap_or_else(|| minkflow::default_scheme_tol(self.nodes))
    }
}

/// Parse and fully validate one config document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
    })?;
    cfg.spec()?.validate().map_err(CliError::from)?;
    if !(cfg.decay_tail_fraction > 0.0 && cfg.decay_tail_fraction <= 1.0) {
        return Err(CliError::Validation(format!(
            "decay_tail_fraction must lie in (0, 1], got {}",
            cfg.decay_tail_fraction
        )));
    }
    for (name, axis) in [
        ("sweep_theta_left", &cfg.sweep_theta_left),
        ("sweep_theta_right", &cfg.sweep_theta_right),
        ("sweep_d", &cfg.sweep_d),
    ] {
        if let Some(values) = axis {
            if values.is_empty() {
                return Err(CliError::Validation(format!("{name} must not be an empty list")));
            }
        }
    }
    Ok(cfg)
}
