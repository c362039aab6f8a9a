//! The Cantor cross: the crack length grows like (4/3)^k, and so does the
//! smallest perimeter an interior approximation can reach.

use roughgg::approx::{approximation_sweep, SweepLevel};
use roughgg::domain::{cantor_crack_length, Preset};
use roughgg::measure::star_condition_diagnostic;

fn main() -> roughgg::Result<()> {
    let sets = (1..=4u32)
        .map(|k| {
            let p = Preset::CantorCross(k);
            p.rasterize(&p.grid(4 * 3usize.pow(k))?)
        })
        .collect::<roughgg::Result<Vec<_>>>()?;
    let diag = star_condition_diagnostic(&sets)?;
    for (k, row) in (1..).zip(&diag.rows) {
        println!("k {k}: crack {:.4} (exact {:.4})", row.crack, cantor_crack_length(k));
    }
    println!("crack slope {:.4} vs log(4/3)/log 3 = {:.4}: {:?}", diag.slope, (4.0f64 / 3.0).ln() / 3f64.ln(), diag.verdict);

    let levels: Vec<SweepLevel> = sets
        .into_iter()
        .map(|s| {
            let h = s.grid().spacing();
            SweepLevel { set: s, deltas: vec![8.0 * h, 16.0 * h] }
        })
        .collect();
    let sweep = approximation_sweep(&levels)?;
    println!("smallest perimeter per generation {:?}: {:?}", sweep.min_perimeters, sweep.verdict);
    Ok(())
}
