//! Divergence-free fields with a prescribed bounded normal trace.

mod data;
mod graph;
mod solve;
mod verify;

pub use data::{compatibility_check, TraceData};
pub use solve::{solve_decomposed, solve_direct, Decomposition, SolveMode, SolveReport, DEFAULT_TOL};
pub use verify::{verify_solution, CellOffender, SideOffender, SolutionAudit};
