//! Splits the boundary of the slit disk into reduced boundary, crack and
//! density-zero parts.

use roughgg::domain::Preset;
use roughgg::measure::{boundary_decomposition, classify, perimeter, ClassifyOptions, Label};

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitDisk;
    let set = p.rasterize(&p.grid(128)?)?;
    let cls = classify(&set, &ClassifyOptions::for_grid(set.grid()))?;
    let parts = boundary_decomposition(&set, &cls);
    for l in [Label::Interior, Label::EssBoundary, Label::Exterior] {
        println!("{l:?}: {} cells", cls.count(l));
    }
    println!("reduced boundary {:.4}", parts.reduced_measure);
    println!("crack {:.4}", parts.crack_measure);
    // Facet counting sees the staircase; the mollified perimeter sees the circle.
    let smooth = perimeter(&set, 4.0 * set.grid().spacing(), None)? + parts.crack_measure;
    println!("boundary measure {:.4} by facets, {smooth:.4} mollified, {:.4} exact", parts.star_measure, p.reference().star_measure);
    Ok(())
}
