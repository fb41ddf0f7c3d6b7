//! Shared fixtures for the stepping benchmarks.

use minkflow::{FluxFunction, ProblemSpec, State};

/// The canonical MCF problem the benchmarks measure against.
pub fn reference_spec(nodes: usize) -> ProblemSpec {
    let mut spec = ProblemSpec::new(1.0, -0.4, 0.4, FluxFunction::mcf());
    spec.nodes = nodes;
    spec
}

/// Its initial state.
pub fn reference_state(spec: &ProblemSpec) -> State {
    spec.initial_state().expect("cubic blend data is admissible")
}
