//! Scalar abstraction for the classifier cores.
//!
//! All training and scoring math is generic over [`Scalar`] so the same
//! code runs at `f32` or `f64`. Concrete aliases live at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Cast an `f64` constant into this scalar, rounding if narrower.
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to any float scalar")
    }

    /// Cast a count into this scalar.
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("count fits in float scalar")
    }
}

impl<T> Scalar for T where
    T: Float + NumAssign + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Numerically stable log(sum(exp(scores))). Returns -inf for an empty
/// slice or when every score is -inf.
pub fn log_sum_exp<S: Scalar>(scores: &[S]) -> S {
    let mut max = S::neg_infinity();
    for &s in scores {
        if s > max {
            max = s;
        }
    }
    if !max.is_finite() {
        return max;
    }
    let mut sum = S::zero();
    for &s in scores {
        sum += (s - max).exp();
    }
    max + sum.ln()
}
