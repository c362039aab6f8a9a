//! Densities, boundary decomposition, perimeters, and Hausdorff measures.

mod ahlfors;
mod boundary;
mod density;
mod diagnostic;
mod perimeter;

pub use ahlfors::{ahlfors_constant, ahlfors_constant_at, AhlforsReport};
pub use boundary::{boundary_decomposition, hausdorff_measure, star_facets, star_measure, BoundaryDecomposition};
pub(crate) use density::ball_count;
pub use density::{classify, density, facet_density, Classification, ClassifyOptions, Label};
pub use diagnostic::{loglog_slope, star_condition_diagnostic, StarDiagnostic, StarRow, StarVerdict, GROWTH_SLOPE};
pub use perimeter::{facet_perimeter, perimeter};
