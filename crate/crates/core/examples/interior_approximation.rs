//! Interior approximations of the slit square: the perimeter stays within a
//! fixed multiple of the boundary measure while the removed volume shrinks
//! linearly in delta.

use roughgg::approx::{approximation_sweep, interior_approximation, BallKind, SweepLevel};
use roughgg::domain::Preset;

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitSquare;
    let set = p.rasterize(&p.grid(128)?)?;
    let one = interior_approximation(&set, 1.0 / 16.0)?;
    println!(
        "delta 1/16: {} density balls, {} star balls, audit {:?}",
        one.cover.balls.iter().filter(|b| b.kind == BallKind::ExteriorHalfDensity).count(),
        one.cover.balls.iter().filter(|b| b.kind == BallKind::StarCover).count(),
        one.audit
    );

    let levels = [8usize, 16, 32, 64]
        .iter()
        .map(|&k| Ok(SweepLevel { set: p.rasterize(&p.grid(8 * k)?)?, deltas: vec![1.0 / k as f64] }))
        .collect::<roughgg::Result<Vec<_>>>()?;
    let sweep = approximation_sweep(&levels)?;
    print!("{}", sweep.to_csv());
    println!("removed volume slope {:.3}, ratio spread {:.3}", sweep.removed_slope, sweep.ratio_spread);
    Ok(())
}
