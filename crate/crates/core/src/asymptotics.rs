//! Predicted limit objects: the translation speed and the translating
//! profile the flow converges to, plus the distance of a state to that
//! profile modulo vertical shift.

use crate::error::{Result, SolverError};
use crate::flux::{FluxFunction, FluxKind};
use crate::problem::ProblemSpec;
use crate::state::State;

/// Shape of the limiting curve. A zero speed always gives a straight line;
/// with nonzero speed the MCF flux gives the spacelike Grim Reaper, the heat
/// flux a spacelike parabola, and anything else a generic v-translator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslatorKind {
    Line,
    GrimReaper,
    Parabola,
    Generic,
}

/// The translating profile φ with u(x, t) = φ(x) + Ã·t. The slope field
/// satisfies v(φ'(x)) = Ã·x + c, with c pinned by the two boundary slopes.
#[derive(Debug, Clone)]
pub struct TranslatorProfile {
    /// Translation speed Ã.
    pub speed: f64,
    /// Integration constant: v(φ'(x)) = Ã·x + c, c = (v(θ_d) + v(θ_{-d}))/2.
    pub c: f64,
    pub kind: TranslatorKind,
    /// φ on the node grid, normalized to trapezoid-weighted mean zero.
    pub samples: Vec<f64>,
}

/// Translation speed Ã = (v(θ_d) - v(θ_{-d})) / (2d). For the MCF flux this
/// is (artanh(θ_d) - artanh(θ_{-d})) / (2d); it vanishes exactly when the
/// two boundary slopes agree.
pub fn translation_speed(
    theta_left: f64,
    theta_right: f64,
    d: f64,
    flux: &FluxFunction,
) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(SolverError::Validation(format!("half-width d must be positive, got {d}")));
    }
    Ok((flux.eval(theta_right)? - flux.eval(theta_left)?) / (2.0 * d))
}

/// Build the translating profile for a problem.
///
/// Steady translation by Ã means (v(φ'))' = Ã, so v(φ'(x)) = Ã·x + c and
/// φ'(x) = v⁻¹(Ã·x + c); for MCF the slope field is tanh(Ã·x + c) (the
/// ln-cosh Grim Reaper), for the heat flux it is affine (the parabola
/// (Ã/2)x² + c·x). The samples are accumulated cell by cell from the slope
/// at each interface midpoint. That choice makes the profile an exact fixed
/// point of the discretization: the scheme's interface slopes reproduce φ'
/// at the midpoints, hence every interface flux equals Ã·x + c and
/// rhs(φ) = Ã·1 to rounding on every grid.
///
/// The affine map Ã·x + c sends [-d, d] onto [v(θ_{-d}), v(θ_d)], so the
/// inverse stays within the attainable flux range whenever both θ are
/// admissible.
pub fn build_translator(spec: &ProblemSpec) -> Result<TranslatorProfile> {
    let grid = spec.grid()?;
    let flux = &spec.flux;
    let speed = translation_speed(spec.theta_left, spec.theta_right, spec.d, flux)?;
    let c = 0.5 * (flux.eval(spec.theta_right)? + flux.eval(spec.theta_left)?);
    let kind = if speed == 0.0 {
        TranslatorKind::Line
    } else {
        match flux.kind() {
            FluxKind::Mcf => TranslatorKind::GrimReaper,
            FluxKind::Heat => TranslatorKind::Parabola,
            FluxKind::Custom(_) => TranslatorKind::Generic,
        }
    };

    let n = grid.nodes();
    let mut samples = Vec::with_capacity(n);
    samples.push(0.0);
    for i in 0..n - 1 {
        let x_mid = grid.interface(i + 1);
        let slope = match kind {
            TranslatorKind::Line => spec.theta_left,
            TranslatorKind::GrimReaper => (speed * x_mid + c).tanh(),
            TranslatorKind::Parabola => speed * x_mid + c,
            TranslatorKind::Generic => flux.inverse(speed * x_mid + c)?,
        };
        let prev = *samples.last().unwrap();
        samples.push(prev + grid.h() * slope);
    }
    let mean = grid.mean(&samples);
    for v in &mut samples {
        *v -= mean;
    }
    Ok(TranslatorProfile { speed, c, kind, samples })
}

/// Distance of a state to the profile modulo vertical shift:
/// min over β of max_i |u_i - (φ_i + β)|, i.e. half the range of u - φ.
pub fn profile_distance(state: &State, profile: &TranslatorProfile) -> Result<f64> {
    if state.u.len() != profile.samples.len() {
        return Err(SolverError::GridMismatch {
            left: state.u.len(),
            right: profile.samples.len(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (u, phi) in state.u.iter().zip(&profile.samples) {
        let w = u - phi;
        lo = lo.min(w);
        hi = hi.max(w);
    }
    Ok(0.5 * (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;
    use crate::solver::rhs;

    fn spec_with(n: usize, tl: f64, tr: f64, flux: FluxFunction) -> ProblemSpec {
        let mut spec = ProblemSpec::new(1.0, tl, tr, flux);
        spec.nodes = n;
        spec
    }

    #[test]
    fn speed_vanishes_iff_slopes_agree() {
        let f = FluxFunction::mcf();
        assert_eq!(translation_speed(0.3, 0.3, 2.5, &f).unwrap(), 0.0);
        assert!(translation_speed(0.3, 0.30001, 2.5, &f).unwrap() > 0.0);
    }

    #[test]
    fn speed_for_tanh_one_boundary_slope() {
        // artanh(tanh(1)) = 1, so Ã = (1 - 0) / 2. Oracle: bisection on tanh.
        let f = FluxFunction::mcf();
        let theta = 1.0f64.tanh();
        let (mut a, mut b) = (0.0f64, 5.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid.tanh() > theta {
                b = mid;
            } else {
                a = mid;
            }
        }
        let oracle = 0.5 * (a + b) / 2.0;
        let speed = translation_speed(0.0, theta, 1.0, &f).unwrap();
        assert!((speed - 0.5).abs() < 1e-12, "speed = {speed}");
        assert!((speed - oracle).abs() < 1e-10);
    }

    #[test]
    fn heat_speed_is_slope_difference_over_width() {
        let f = FluxFunction::heat();
        let speed = translation_speed(-0.5, 0.5, 2.0, &f).unwrap();
        assert_eq!(speed, 0.25);
    }

    #[test]
    fn speed_is_antisymmetric_in_the_boundary_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = FluxFunction::mcf();
        for _ in 0..100 {
            let a: f64 = rng.random_range(-0.95..0.95);
            let b: f64 = rng.random_range(-0.95..0.95);
            let fwd = translation_speed(a, b, 1.3, &f).unwrap();
            let bwd = translation_speed(b, a, 1.3, &f).unwrap();
            assert_eq!(fwd, -bwd);
        }
    }

    #[test]
    fn symmetric_mcf_translator_is_even_with_zero_constant() {
        let spec = spec_with(101, -0.4, 0.4, FluxFunction::mcf());
        let p = build_translator(&spec).unwrap();
        assert_eq!(p.kind, TranslatorKind::GrimReaper);
        assert!(p.c.abs() < 1e-15, "c = {}", p.c);
        let n = p.samples.len();
        for i in 0..n {
            assert!(
                (p.samples[i] - p.samples[n - 1 - i]).abs() < 1e-12,
                "profile not even at node {i}"
            );
        }
        // Middle interface slope vanishes by symmetry.
        let mid = (p.samples[51] - p.samples[49]) / (2.0 * spec.grid().unwrap().h());
        assert!(mid.abs() < 1e-12);
    }

    #[test]
    fn heat_translator_is_the_parabola() {
        let spec = spec_with(81, -0.5, 0.5, FluxFunction::heat());
        let g = spec.grid().unwrap();
        let p = build_translator(&spec).unwrap();
        assert_eq!(p.kind, TranslatorKind::Parabola);
        assert_eq!(p.speed, 0.5);
        // Exact for an affine slope field: φ = x²/4 up to the mean shift.
        let raw: Vec<f64> = (0..81).map(|i| g.node(i) * g.node(i) / 4.0).collect();
        let mean = g.mean(&raw);
        for i in 0..81 {
            assert!((p.samples[i] - (raw[i] - mean)).abs() < 1e-13);
        }
    }

    #[test]
    fn equal_slopes_give_the_line() {
        let spec = spec_with(51, 0.3, 0.3, FluxFunction::cubic());
        let g = spec.grid().unwrap();
        let p = build_translator(&spec).unwrap();
        assert_eq!(p.kind, TranslatorKind::Line);
        assert_eq!(p.speed, 0.0);
        let raw: Vec<f64> = (0..51).map(|i| 0.3 * g.node(i)).collect();
        let mean = g.mean(&raw);
        for i in 0..51 {
            assert!((p.samples[i] - (raw[i] - mean)).abs() < 1e-13);
        }
    }

    #[test]
    fn translator_is_a_fixed_point_of_the_discretization() {
        for flux in [FluxFunction::mcf(), FluxFunction::heat(), FluxFunction::cubic()] {
            let spec = spec_with(101, -0.4, 0.25, flux);
            let p = build_translator(&spec).unwrap();
            let state = State::new(0.0, p.samples.clone());
            let rate = rhs(&state, &spec).unwrap();
            let worst = rate
                .iter()
                .map(|r| (r - p.speed).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-10, "residual {worst:e}");
        }
    }

    #[test]
    fn generic_inversion_path_matches_closed_form_grim_reaper() {
        // The same flux exposed only through closures forces the bisection
        // inverse; the profile must agree with the closed-form MCF path.
        let mut spec = spec_with(401, -0.4, 0.4, FluxFunction::mcf());
        let closed = build_translator(&spec).unwrap();
        spec.flux = FluxFunction::custom(
            "artanh",
            |s: f64| s.atanh(),
            |s: f64| 1.0 / (1.0 - s * s),
            |s: f64| 2.0 * s / ((1.0 - s * s) * (1.0 - s * s)),
        );
        let generic = build_translator(&spec).unwrap();
        assert_eq!(generic.kind, TranslatorKind::Generic);
        for i in 0..401 {
            assert!(
                (closed.samples[i] - generic.samples[i]).abs() < 1e-8,
                "node {i}: {} vs {}",
                closed.samples[i],
                generic.samples[i]
            );
        }
    }

    #[test]
    fn distance_ignores_vertical_shifts() {
        let spec = spec_with(101, -0.4, 0.4, FluxFunction::mcf());
        let p = build_translator(&spec).unwrap();
        let shifted = State::new(0.0, p.samples.iter().map(|v| v + 7.3).collect());
        assert!(profile_distance(&shifted, &p).unwrap() < 1e-12);
    }

    #[test]
    fn distance_of_tilted_copy_is_half_the_tilt_range() {
        let spec = spec_with(101, -0.4, 0.4, FluxFunction::mcf());
        let g = spec.grid().unwrap();
        let p = build_translator(&spec).unwrap();
        let tilted = State::new(
            0.0,
            p.samples.iter().enumerate().map(|(i, v)| v + 1e-3 * g.node(i)).collect(),
        );
        let dist = profile_distance(&tilted, &p).unwrap();
        assert!((dist - 1e-3 * g.d()).abs() < 1e-12, "dist = {dist}");
    }

    #[test]
    fn distance_is_shift_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let spec = spec_with(51, -0.2, 0.5, FluxFunction::mcf());
        let p = build_translator(&spec).unwrap();
        let u: Vec<f64> = (0..51).map(|_| rng.random_range(-1.0..1.0)).collect();
        let base = profile_distance(&State::new(0.0, u.clone()), &p).unwrap();
        for beta in [0.5, -3.25, 1024.0] {
            let moved = State::new(0.0, u.iter().map(|v| v + beta).collect());
            let dist = profile_distance(&moved, &p).unwrap();
            assert!((dist - base).abs() < 1e-12 * (1.0 + beta.abs()));
        }
    }

    #[test]
    fn distance_requires_matching_grids() {
        let spec = spec_with(51, -0.2, 0.5, FluxFunction::mcf());
        let p = build_translator(&spec).unwrap();
        let err = profile_distance(&State::new(0.0, vec![0.0; 50]), &p).unwrap_err();
        assert!(matches!(err, SolverError::GridMismatch { .. }));
    }
}
