//! Grids, domain descriptions, and their rasterization into [`RoughSet`]s.

mod grid;
pub mod presets;
mod raster;
mod set;
mod spec;

pub use grid::{Facet, FacetSide, Grid, Point, Side};
pub(crate) use grid::dist2;
pub use presets::{cantor_crack_length, Preset, PRESET_MARGIN, Reference};
pub use raster::{rasterize, snap_segment};
pub use set::{FacetKind, RoughSet};
pub use spec::{Crack, DomainSpec, Shape};
