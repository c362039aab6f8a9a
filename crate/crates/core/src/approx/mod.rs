//! Approximation of rough sets from inside and outside by sets with controlled perimeter.

mod approximate;
mod cover;
mod kernel;
mod sweep;

pub use approximate::{exterior_approximation, interior_approximation, smooth_levelset, ApproxReport, ApproxSide};
pub use cover::{sphere_measure, BallCover, BallKind, CoverAudit, CoverBall};
pub use kernel::{central_gradient, MollifierKernel};
pub use sweep::{approximation_sweep, SweepLevel, SweepReport, SweepRow, SweepVerdict, BOUNDED_SPREAD};
