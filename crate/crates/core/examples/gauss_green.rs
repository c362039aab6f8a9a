//! Gauss-Green up to the boundary on the slit square, and the convergence
//! order of the plain quadrature on the disk.

use roughgg::acceptance::{slit_basis, slit_field};
use roughgg::dmfield::{gauss_green_residual, pairing, sample_field, trace_measure, Quadrature, TestFunction};
use roughgg::domain::Preset;
use roughgg::measure::loglog_slope;

fn main() -> roughgg::Result<()> {
    let p = Preset::SlitSquare;
    let set = p.rasterize(&p.grid(64)?)?;
    let field = slit_field(&set)?;
    let trace = trace_measure(&field, &set, set.grid())?;
    for phi in slit_basis() {
        let lhs = pairing(&field, &set, &phi, Quadrature::Mimetic)?;
        let r = gauss_green_residual(&field, &set, &phi, &trace, Quadrature::Mimetic)?;
        println!("{:<28} pairing {lhs:+.6}  residual {r:.1e}", phi.name());
    }

    let phi = TestFunction::bump([0.3, 0.2, 0.0], 1.6);
    let (mut hs, mut rs) = (Vec::new(), Vec::new());
    for n in [32, 64, 128] {
        let disk = Preset::Disk.rasterize(&Preset::Disk.grid(n)?)?;
        let f = sample_field(|x| [x[0] + x[1] * x[1], x[0] * x[1], 0.0], &disk, 3.0)?;
        let t = trace_measure(&f, &disk, disk.grid())?;
        hs.push(disk.grid().spacing());
        rs.push(gauss_green_residual(&f, &disk, &phi, &t, Quadrature::Analytic)?);
    }
    for (h, r) in hs.iter().zip(&rs) {
        println!("disk spacing {h:.5}: residual {r:.3e}");
    }
    println!("order {:.2}", loglog_slope(&hs, &rs));
    Ok(())
}
