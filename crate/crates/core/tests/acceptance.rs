//! Acceptance criteria, each checked against an oracle computed here from
//! first principles and against the library's own runner.

use std::f64::consts::PI;

use roughgg::acceptance::{self, Outcome};
use roughgg::approx::interior_approximation;
use roughgg::divsolve::{solve_decomposed, solve_direct, TraceData, DEFAULT_TOL};
use roughgg::dmfield::{
    default_ladder, extension_bound_check, interior_normal_trace, pairing, product_rule_check, sample_field,
    trace_linfinity_check, trace_measure, trace_weak_convergence, FluxField, Quadrature, TestFunction,
};
use roughgg::domain::{FacetSide, Grid, Preset, RoughSet, Side};
use roughgg::measure::{ahlfors_constant, perimeter, star_condition_diagnostic, star_measure};

fn report(o: &Outcome, oracle_ok: bool, oracle: &str) {
    let passed = o.passed && oracle_ok;
    println!("[{}] criterion {:>2} {}: {} | oracle: {}", if passed { "PASS" } else { "FAIL" }, o.id, o.name, o.detail, oracle);
    assert!(o.passed, "criterion {} failed: {}", o.id, o.detail);
    assert!(oracle_ok, "criterion {} disagrees with its oracle: {}", o.id, oracle);
}

fn preset(p: Preset, n: usize) -> RoughSet {
    p.rasterize(&p.grid(n).unwrap()).unwrap()
}

/// `(0, 1)` above the slit, `(0, -1)` below.
fn slit_vector(x: &[f64; 3]) -> [f64; 3] {
    [0.0, if x[1] > 0.0 { 1.0 } else { -1.0 }, 0.0]
}

/// Outgoing flux `F . n` evaluated from the field formula on the cell side of a facet.
fn outgoing_oracle(set: &RoughSet, fs: FacetSide) -> f64 {
    let g = set.grid();
    let cell = g.facet_cell(fs.facet, fs.side).unwrap();
    let v = slit_vector(&g.cell_center(cell));
    let outward = if fs.side == Side::Lower { 1.0 } else { -1.0 };
    outward * v[fs.facet.axis as usize]
}

#[test]
fn criterion_01_slit_square_trace() {
    let mut worst = 0.0f64;
    for n in [32, 64, 128] {
        let s = preset(Preset::SlitSquare, n);
        let t = trace_measure(&acceptance::slit_field(&s).unwrap(), &s, s.grid()).unwrap();
        for fs in s.inner_sides() {
            worst = worst.max((t.density(fs).unwrap() - outgoing_oracle(&s, fs)).abs());
        }
        let slit: Vec<f64> = t
            .facet_densities()
            .into_iter()
            .filter(|(f, _)| s.is_crack(*f))
            .map(|(_, d)| d)
            .collect();
        assert_eq!(slit.len(), 2 * n);
        assert!(slit.iter().all(|&d| d == -2.0));
    }
    report(&acceptance::run(1), worst <= 1e-9, &format!("per-side flux error {worst:.1e}"));
}

#[test]
fn criterion_02_gauss_green() {
    let s = preset(Preset::SlitSquare, 64);
    let f = acceptance::slit_field(&s).unwrap();
    // Integrals against the trace: top and bottom have density 1, the slit sits at x2 = 0.
    let exact = [0.0, 0.0, 0.0, 2.0 + 2.0, 0.0];
    let mut worst = 0.0f64;
    for (phi, want) in acceptance::slit_basis().iter().zip(exact) {
        let p = pairing(&f, &s, phi, Quadrature::Mimetic).unwrap();
        worst = worst.max((p - want).abs() / (1.0 + p.abs()));
    }
    report(&acceptance::run(2), worst <= 1e-8, &format!("analytic integrals matched to {worst:.1e}"));
}

#[test]
fn criterion_03_bounded_approximation() {
    let s = preset(Preset::SlitSquare, 128);
    let delta = 1.0 / 16.0;
    let r = interior_approximation(&s, delta).unwrap();
    let g = s.grid();
    let h = g.spacing();
    // Kept cells stay clear of the square's sides and of the slit.
    let clear = (0..g.cell_count()).filter(|&c| r.approximant.contains(c)).all(|c| {
        let x = g.cell_center(c);
        let to_side = 1.0 - x[0].abs().max(x[1].abs());
        to_side >= 1.5 * h && x[1].abs() >= 1.5 * h
    });
    // Everything removed lies in the delta-tube around a boundary of length 10.
    let tube = 2.0 * delta * 10.0;
    let ok = clear && r.removed_volume <= tube && r.removed_volume >= 0.5 * delta * 10.0;
    report(&acceptance::run(3), ok, &format!("removed {:.4} within the tube bound {tube:.4}", r.removed_volume));
}

#[test]
fn criterion_04_cantor_growth() {
    let sets: Vec<RoughSet> = (1..=4u32).map(|k| preset(Preset::CantorCross(k), 4 * 3usize.pow(k))).collect();
    let mut ok = true;
    for (k, s) in (1..=4i32).zip(&sets) {
        // 4^k squares of side 3^-k, each boundary of length 4 * 3^-k.
        let length = 4f64.powi(k) * 4.0 * 3f64.powi(-k);
        let measured: f64 = s.cracks().values().sum();
        ok &= (measured - length).abs() <= 1e-9 * length;
    }
    let slope = star_condition_diagnostic(&sets).unwrap().slope;
    let target = (4.0f64 / 3.0).ln() / 3f64.ln();
    ok &= (slope - target).abs() <= 0.05;
    report(&acceptance::run(4), ok, &format!("crack lengths 4(4/3)^k exact, slope {slope:.4} vs {target:.4}"));
}

#[test]
fn criterion_05_extension_bound() {
    let s = preset(Preset::SlitSquare, 64);
    let r = extension_bound_check(&acceptance::slit_field(&s).unwrap(), &s, s.grid()).unwrap();
    // Jumps of size 1 on top and bottom (length 2 each) and size 2 on the slit (length 2).
    let lhs = 1.0 * 2.0 + 1.0 * 2.0 + 2.0 * 2.0;
    // No divergence inside; sup 1 times sides 8 plus slit 2.
    let rhs = 0.0 + 1.0 * (8.0 + 2.0);
    let ok = (r.lhs - lhs).abs() <= 1e-9 && (r.rhs - rhs).abs() <= 1e-9;
    report(&acceptance::run(5), ok, &format!("facet arithmetic gives {lhs} <= 2 * {rhs}"));
}

#[test]
fn criterion_06_trace_sup_bound() {
    let s = preset(Preset::SlitSquare, 64);
    let f = acceptance::slit_field(&s).unwrap();
    let r = trace_linfinity_check(&trace_measure(&f, &s, s.grid()).unwrap(), &f);
    // Both sides of the slit carry outgoing flux 1 in magnitude.
    report(&acceptance::run(6), r.ratio == 2.0, &format!("slit ratio {} = 1 + 1", r.ratio));
}

#[test]
fn criterion_07_interior_factor() {
    let omega = preset(Preset::Square, 128);
    let g = omega.grid().clone();
    let gc = g.clone();
    let e = RoughSet::from_predicate(g.clone(), move |c| {
        let x = gc.cell_center(c);
        x[0].abs() < 0.5 && x[1].abs() < 0.5
    });
    let f = sample_field(|_| [1.0, 0.0, 0.0], &omega, 1.0).unwrap();
    let basis = [TestFunction::bump([0.0; 3], 1.0)];
    let t = interior_normal_trace(&f, &e, &omega, &basis, &default_ladder(&g)).unwrap();
    // Outgoing flux of (1, 0) through the vertical edges of E is -1 on the left, +1 on the right.
    let mut ok = true;
    for (sign, flux) in [(-1.0, -1.0), (1.0, 1.0)] {
        let edge: Vec<_> = e
            .boundary_facets()
            .into_iter()
            .map(|(f, _)| f)
            .filter(|f| f.axis == 0 && g.facet_center(*f)[0] * sign > 0.0)
            .collect();
        ok &= (-2.0 * t.mean_density(&g, &edge) - flux).abs() <= 0.05;
    }
    report(&acceptance::run(7), ok, "minus twice the edge density matches the outgoing flux at spacing 1/128");
}

#[test]
fn criterion_08_product_rule() {
    let s = preset(Preset::Square, 64);
    let g = s.grid();
    let f = sample_field(|x| [1.0 + x[1], x[0] * x[0], 0.0], &s, 3.0).unwrap();
    let inside: Vec<f64> = (0..g.cell_count())
        .map(|c| {
            let x = g.cell_center(c);
            if x[0] * x[0] + x[1] * x[1] < 0.25 { 1.0 } else { 0.0 }
        })
        .collect();
    let h = g.spacing();
    let basis = [TestFunction::bump([0.0; 3], 0.8)];
    let r = product_rule_check(&f, &inside, &s, &basis, &[8.0 * h, 4.0 * h]).unwrap();
    // The gradient of a mollified indicator has total mass equal to the perimeter, here pi.
    let ok = (r.reference_variation / PI - 1.0).abs() <= 0.05;
    report(&acceptance::run(8), ok, &format!("variation of the multiplier {:.4} vs pi", r.reference_variation));
}

#[test]
fn criterion_09_weak_star() {
    let s = preset(Preset::Disk, 64);
    let f = sample_field(|x| [x[1].cos(), x[0].sin(), 0.0], &s, 1.5).unwrap();
    let h = s.grid().spacing();
    let basis = [TestFunction::bump([0.5, 0.3, 0.0], 1.0)];
    let r = trace_weak_convergence(&f, &s, &basis, &[8.0 * h, 4.0 * h, 2.0 * h]).unwrap();
    // Away from cracks the gap shrinks at least linearly with the radius.
    let ok = r.rows.windows(2).all(|w| w[1].max_gap <= 0.6 * w[0].max_gap);
    report(&acceptance::run(9), ok, "gaps at least halve with the radius on the disk");
}

/// Largest `|outgoing flux of the solved field - g|` over the prescribed sides,
/// measured through a fresh trace of the solution.
fn round_trip(field: &FluxField, set: &RoughSet, g: &TraceData) -> f64 {
    let t = trace_measure(field, set, set.grid()).unwrap();
    set.inner_sides().into_iter().map(|fs| (t.density(fs).unwrap() - g.get(fs)).abs()).fold(0.0, f64::max)
}

/// Largest per-cell net outflow of a field over the set.
fn max_cell_divergence(field: &FluxField, set: &RoughSet) -> f64 {
    (0..set.grid().cell_count()).filter(|&c| set.contains(c)).map(|c| field.cell_balance(c).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_10_divergence_solver() {
    let s = preset(Preset::SlitSquare, 32);
    let g = TraceData::from_trace(&trace_measure(&acceptance::slit_field(&s).unwrap(), &s, s.grid()).unwrap());
    let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 16).unwrap();
    let a = solve_direct(&s, &g, DEFAULT_TOL).unwrap();
    let b = solve_decomposed(&s, &g, &bbox, DEFAULT_TOL).unwrap();
    let trip = round_trip(&a.field, &s, &g).max(round_trip(&b.field, &s, &g));
    let div = max_cell_divergence(&a.field, &s).max(max_cell_divergence(&b.field, &s)) * s.grid().facet_area();
    let ok = trip <= 1e-8 && div <= 1e-10;
    report(&acceptance::run(10), ok, &format!("fresh round trip {trip:.1e}, cell divergence {div:.1e}"));
}

#[test]
fn criterion_11_geometry_oracles() {
    let disk = preset(Preset::Disk, 256);
    let p = perimeter(&disk, 4.0 * disk.grid().spacing(), None).unwrap();
    let slit = preset(Preset::SlitSquare, 64);
    let star = star_measure(&slit);
    let fine = preset(Preset::SlitSquare, 256);
    let crack: Vec<_> = fine.cracks().iter().map(|(&f, &w)| (f, w)).collect();
    let radii = [0.25, 0.125, 0.0625, 0.03125];
    let a = ahlfors_constant(fine.grid(), &crack, 64, &radii).unwrap().constant;
    // A straight segment through the center of a ball of radius r has length 2r.
    let ok = (p / (2.0 * PI) - 1.0).abs() <= 0.02 && (star - (4.0 * 2.0 + 2.0)).abs() <= 0.3 && (a / 2.0 - 1.0).abs() <= 0.1;
    report(&acceptance::run(11), ok, &format!("2 pi = {:.5}, sides plus slit = 10, segment constant 2", 2.0 * PI));
}

#[test]
fn bump_sanity_for_the_oracles() {
    let phi = TestFunction::bump([0.0; 3], 1.0);
    assert!(phi.value(&[1.5, 0.0, 0.0]) == 0.0 && phi.value(&[0.0; 3]) > 0.0);
    let s = preset(Preset::Square, 16);
    let f = sample_field(|_| [1.0, 0.0, 0.0], &s, 1.0).unwrap();
    assert!(pairing(&f, &s, &phi, Quadrature::Mimetic).unwrap().abs() < 1e-12);
}
