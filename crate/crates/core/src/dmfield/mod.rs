//! Bounded divergence-measure fields on rough sets: divergence, normal
//! traces, Gauss-Green pairings, and their mollified approximations.

mod bv;
mod divergence;
mod field;
mod interior;
mod mollify;
mod pairing;
mod product;
mod signed;
mod testfn;
mod trace;

pub use bv::{bv_trace_check, BvReport};
pub use divergence::{divergence_measure, divergence_measure_full, extend_by_zero};
pub use field::{random_field, sample_field, FluxField};
pub use interior::{default_ladder, interior_normal_trace, richardson_gate, GateRow, InteriorLevel, InteriorTrace};
pub use mollify::{mollify_field, trace_weak_convergence, WeakStarReport, WeakStarRow, WeakStarVerdict, WEAK_STAR_TOLERANCE};
pub use pairing::{pairing, Quadrature};
pub use product::{product_rule_check, ProductReport, ProductRow};
pub use signed::SignedMeasure;
pub use testfn::{TestFunction, VectorTestField};
pub use trace::{
    extension_bound_check, gauss_green_residual, trace_linfinity_check, trace_measure, ExtensionReport, LinfReport,
    TraceMeasure, C_CHECK, C_EXT,
};
