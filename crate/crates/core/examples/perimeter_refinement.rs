//! Mollified perimeter of the unit disk under refinement. Facet counting
//! gives 8 at every resolution; mollifying recovers 2 pi.

use roughgg::domain::Preset;
use roughgg::measure::{facet_perimeter, perimeter};

fn main() -> roughgg::Result<()> {
    for n in [32, 64, 128, 256] {
        let set = Preset::Disk.rasterize(&Preset::Disk.grid(n)?)?;
        let h = set.grid().spacing();
        let p = perimeter(&set, 4.0 * h, None)?;
        println!("n {n:>3}: mollified {p:.5}  facets {:.5}  error {:+.2e}", facet_perimeter(&set), p - 2.0 * std::f64::consts::PI);
    }
    Ok(())
}
