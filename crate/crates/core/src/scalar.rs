use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the solver is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Widening conversion used for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `max(spec, factor * machine epsilon)`: keeps f64 thresholds as stated while
    /// staying attainable in lower precision.
    #[inline]
    fn tol_floor(spec: f64, factor: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(factor);
        let spec = Self::lit(spec);
        if spec > floor {
            spec
        } else {
            floor
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
