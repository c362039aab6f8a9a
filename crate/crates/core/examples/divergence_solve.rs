//! Builds a field on the slit square whose normal trace is prescribed,
//! directly and through the surrounding box, and checks both.

use roughgg::acceptance::slit_field;
use roughgg::divsolve::{solve_decomposed, solve_direct, verify_solution, TraceData, DEFAULT_TOL};
use roughgg::dmfield::trace_measure;
use roughgg::domain::{Grid, Preset};

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitSquare;
    let set = p.rasterize(&p.grid(32)?)?;
    let g = TraceData::from_trace(&trace_measure(&slit_field(&set)?, &set, set.grid())?);
    let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], set.grid().spacing(), 16)?;
    for report in [solve_direct(&set, &g, DEFAULT_TOL)?, solve_decomposed(&set, &g, &bbox, DEFAULT_TOL)?] {
        let audit = verify_solution(&report, &set, &g, DEFAULT_TOL)?;
        println!(
            "{:?}: {} iterations, trace error {:.1e}, divergence {:.1e}, verified {}",
            report.mode, report.iterations, report.trace_residual_linf, report.interior_div_residual, audit.passed
        );
    }

    let mut uneven = g.clone();
    let first = *uneven.values.keys().next().expect("nonempty trace");
    uneven.set(first, uneven.get(first) + 1.0);
    match solve_direct(&set, &uneven, DEFAULT_TOL) {
        Err(e) => println!("perturbed data rejected: {e}"),
        Ok(_) => println!("perturbed data accepted"),
    }
    Ok(())
}
