//! Neumaier compensated summation.
//!
//! The conservative scheme makes several diagnostic integrals exact up to
//! rounding (the flux identity telescopes); plain left-to-right summation
//! of a few hundred terms would already cost ~N·eps and blur that. The
//! compensated sum keeps the error at a few ulps independent of length.

pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
