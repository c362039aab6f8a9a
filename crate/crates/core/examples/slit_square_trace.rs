//! Normal trace of `(0, sign x2)` on the slit square: density -2 on the
//! slit, +1 on top and bottom, 0 on the sides.

use roughgg::acceptance::slit_field;
use roughgg::dmfield::{trace_linfinity_check, trace_measure};
use roughgg::domain::Preset;

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitSquare;
    let set = p.rasterize(&p.grid(64)?)?;
    let field = slit_field(&set)?;
    let trace = trace_measure(&field, &set, set.grid())?;

    let mut by_value = std::collections::BTreeMap::new();
    for (_, d) in trace.facet_densities() {
        *by_value.entry(format!("{d:+.1}")).or_insert(0usize) += 1;
    }
    for (d, n) in &by_value {
        println!("density {d}: {n} facets");
    }
    let linf = trace_linfinity_check(&trace, &field);
    println!("g_infinity {} over sup|F| {} = {}", linf.g_infinity, linf.sup_bound, linf.ratio);
    Ok(())
}
