use std::fmt::{Debug, Display};

use num_traits::float::TotalOrder;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the tail algebra is generic over.
pub trait Scalar:
    Float + TotalOrder + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
