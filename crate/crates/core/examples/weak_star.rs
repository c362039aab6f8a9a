//! Traces of mollified fields converge weakly-star to the trace of the
//! field, with cracks kept intact by the mollifier.

use roughgg::dmfield::{default_ladder, sample_field, trace_weak_convergence, TestFunction};
use roughgg::domain::Preset;

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitDisk;
    let set = p.rasterize(&p.grid(64)?)?;
    let field = sample_field(|x| [x[1].cos(), x[0].sin(), 0.0], &set, 1.5)?;
    let basis = [TestFunction::bump([0.0; 3], 2.5), TestFunction::bump([0.5, 0.3, 0.0], 1.0)];
    let r = trace_weak_convergence(&field, &set, &basis, &default_ladder(set.grid()))?;
    for row in &r.rows {
        println!("eps {:.4}: largest gap {:.3e}", row.eps, row.max_gap);
    }
    println!("{:?} (scale {:.3})", r.verdict, r.scale);
    Ok(())
}
