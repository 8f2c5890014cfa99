//! Standard normal tail probability and its inverse.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Q(x) = P[N(0,1) > x] = erfc(x/√2)/2`.
pub fn q_function<T: Real>(x: T) -> T {
    T::of(0.5) * (x / T::SQRT_2()).erfc()
}

fn normal_pdf<T: Real>(x: T) -> T {
    (-(x * x) / T::of(2.0)).exp() / (T::of(2.0) * T::PI()).sqrt()
}

/// Inverse Q-function: the `x` with `Q(x) = p`, for `0 < p < 1`.
///
/// Uses `Q⁻¹(p) = −Q⁻¹(1−p)` to work in the upper tail, then a safeguarded
/// Newton iteration on `ln Q(x) − ln p`. A bracket `[lo, hi]` with
/// `Q(lo) ≥ p > Q(hi)` is kept and any step leaving it falls back to
/// bisection, so the iteration always converges.
pub fn q_function_inverse<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain(format!("Q^-1 needs p in (0, 1), got {p}")));
    }
    let half = T::of(0.5);
    if p == half {
        return Ok(T::zero());
    }
    if p > half {
        return Ok(-upper_tail_inverse(T::one() - p));
    }
    Ok(upper_tail_inverse(p))
}

/// Solves `Q(x) = p` for `0 < p < 1/2`, i.e. `x > 0`.
fn upper_tail_inverse<T: Real>(p: T) -> T {
    let target = p.ln();
    let mut lo = T::zero();
    // Q(40) underflows both f32 and f64.
    let mut hi = T::of(40.0);
    // asymptotic start: Q(x) ~ φ(x)/x
    let mut x = (T::of(-2.0) * target).sqrt().min(T::of(39.0));
    let tol = T::epsilon() * T::of(4.0);
    for _ in 0..300 {
        let q = q_function(x);
        if !(q > T::zero()) {
            hi = x;
            x = T::of(0.5) * (lo + hi);
            continue;
        }
        let g = q.ln() - target;
        if g == T::zero() {
            return x;
        }
        if g > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx ln Q(x) = −φ(x)/Q(x)
        let slope = -normal_pdf(x) / q;
        let newton = x - g / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            T::of(0.5) * (lo + hi)
        };
        let scale = T::one().max(next.abs());
        if (next - x).abs() <= tol * scale || hi - lo <= tol * scale {
            return next;
        }
        x = next;
    }
    x
}
