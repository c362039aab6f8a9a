//! Seen from a sub-square, the mollified construction puts half the flux on
//! each edge; doubling it recovers the normal trace.

use roughgg::dmfield::{default_ladder, interior_normal_trace, sample_field, TestFunction};
use roughgg::domain::{Facet, Preset, RoughSet};

fn main() -> roughgg::Result<()> {
    let omega = Preset::Square.rasterize(&Preset::Square.grid(128)?)?;
    let g = omega.grid().clone();
    let gc = g.clone();
    let e = RoughSet::from_predicate(g.clone(), move |c| {
        let x = gc.cell_center(c);
        x[0].abs() < 0.5 && x[1].abs() < 0.5
    });
    let f = sample_field(|_| [1.0, 0.0, 0.0], &omega, 1.0)?;
    let basis = [TestFunction::bump([0.0; 3], 1.0), TestFunction::bump([0.4, 0.1, 0.0], 0.5)];
    let t = interior_normal_trace(&f, &e, &omega, &basis, &default_ladder(&g))?;
    let edge = |sign: f64| -> Vec<Facet> {
        e.boundary_facets()
            .into_iter()
            .map(|(f, _)| f)
            .filter(|f| f.axis == 0 && g.facet_center(*f)[0] * sign > 0.0)
            .collect()
    };
    println!("left edge {:.4}, right edge {:.4}", t.mean_density(&g, &edge(-1.0)), t.mean_density(&g, &edge(1.0)));
    println!("gate passed {}, identity residuals {:.3?}", t.gate_passed, t.identity_residuals);
    Ok(())
}
