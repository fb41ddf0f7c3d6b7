//! The evolving graph: node values of u at a time t.

/// Node values u(x_i, t) on the uniform grid. Value-like: cloning a state
/// and sending it to another thread is cheap and safe.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
}

impl State {
    pub fn new(t: f64, u: Vec<f64>) -> Self {
        Self { t, u }
    }

    pub fn nodes(&self) -> usize {
        self.u.len()
    }
}
