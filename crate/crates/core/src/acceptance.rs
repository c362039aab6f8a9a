//! End-to-end acceptance checks, one per numbered criterion.

use std::f64::consts::PI;

use serde::Serialize;

use crate::approx::{approximation_sweep, SweepLevel};
use crate::divsolve::{solve_decomposed, solve_direct, verify_solution, TraceData, DEFAULT_TOL};
use crate::dmfield::{
    default_ladder, extension_bound_check, interior_normal_trace, pairing, product_rule_check, random_field,
    sample_field, trace_linfinity_check, trace_measure, trace_weak_convergence, FluxField, Quadrature,
    TestFunction, WeakStarVerdict,
};
use crate::domain::{Facet, Grid, Preset, RoughSet};
use crate::error::{Error, Result};
use crate::measure::{ahlfors_constant, loglog_slope, perimeter, star_condition_diagnostic, star_measure};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    /// `[PASS] 3 name: detail`.
    pub fn line(&self) -> String {
        format!("[{}] {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

pub const NAMES: [&str; 11] = [
    "slit square exact trace",
    "gauss-green up to the boundary",
    "interior approximation bounded",
    "cantor cross growth",
    "extension bound",
    "trace sup bound",
    "interior trace factor",
    "product rule",
    "weak-star trace continuity",
    "divergence solver",
    "geometry oracles",
];

/// Runs one criterion; errors count as failures.
pub fn run(id: u32) -> Outcome {
    let result = match id {
        1 => slit_square_trace(),
        2 => gauss_green(),
        3 => bounded_approximation(),
        4 => cantor_growth(),
        5 => extension_bound(),
        6 => trace_sup_bound(),
        7 => interior_factor(),
        8 => product_rule(),
        9 => weak_star(),
        10 => divergence_solver(),
        11 => geometry_oracles(),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let name = NAMES.get(id as usize - 1).copied().unwrap_or("unknown");
    match result {
        Ok((passed, detail)) => Outcome { id, name, passed, detail },
        Err(e) => Outcome { id, name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=NAMES.len() as u32).map(run).collect()
}

type Check = Result<(bool, String)>;

/// The field `(0, 1)` above the slit and `(0, -1)` below it.
pub fn slit_field(set: &RoughSet) -> Result<FluxField> {
    sample_field(|x| [0.0, x[1].signum(), 0.0], set, 1.0)
}

fn preset(p: Preset, n: usize) -> Result<RoughSet> {
    p.rasterize(&p.grid(n)?)
}

/// Expected facet density of the slit-square trace.
fn slit_density(grid: &Grid, f: Facet) -> f64 {
    let x = grid.facet_center(f);
    if f.axis == 0 {
        0.0
    } else if x[1].abs() < 0.5 * grid.spacing() {
        -2.0
    } else {
        1.0
    }
}

fn slit_square_trace() -> Check {
    let mut worst = 0.0f64;
    for n in [32, 64, 128] {
        let s = preset(Preset::SlitSquare, n)?;
        let t = trace_measure(&slit_field(&s)?, &s, s.grid())?;
        for (f, d) in t.facet_densities() {
            worst = worst.max((d - slit_density(s.grid(), f)).abs());
        }
    }
    Ok((worst <= 1e-9, format!("max density error {worst:.3e} over spacings 1/32, 1/64, 1/128")))
}

/// `1, x1, x2, x2^2, x1 x2` times a cutoff equal to one on the closed square.
pub fn slit_basis() -> Vec<TestFunction> {
    let cutoff = TestFunction::plateau([0.0; 3], 1.5, 2.0);
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 2, 0], [1, 1, 0]].iter().map(|&e| TestFunction::monomial(e, &cutoff)).collect()
}

fn gauss_green() -> Check {
    let s = preset(Preset::SlitSquare, 64)?;
    let field = slit_field(&s)?;
    let exact = [0.0, 0.0, 0.0, 4.0, 0.0];
    let mut worst = 0.0f64;
    for (phi, want) in slit_basis().iter().zip(exact) {
        let lhs = pairing(&field, &s, phi, Quadrature::Mimetic)?;
        worst = worst.max((lhs - want).abs() / (1.0 + lhs.abs()));
    }
    let phi = TestFunction::bump([0.3, 0.2, 0.0], 1.6);
    let (mut hs, mut rs) = (Vec::new(), Vec::new());
    for n in [32, 64, 128] {
        let s = preset(Preset::Disk, n)?;
        let f = sample_field(|x| [x[0] + x[1] * x[1], x[0] * x[1], 0.0], &s, 3.0)?;
        let t = trace_measure(&f, &s, s.grid())?;
        let lhs = pairing(&f, &s, &phi, Quadrature::Analytic)?;
        hs.push(s.grid().spacing());
        rs.push((lhs - t.pair(|x| phi.value(x))).abs());
    }
    let order = loglog_slope(&hs, &rs);
    Ok((worst <= 1e-8 && order >= 0.9, format!("slit relative residual {worst:.3e}; disk order {order:.3}")))
}

fn sweep_levels(p: Preset, deltas: &[f64]) -> Result<Vec<SweepLevel>> {
    deltas
        .iter()
        .map(|&d| Ok(SweepLevel { set: preset(p, (8.0 / d).round() as usize)?, deltas: vec![d] }))
        .collect()
}

fn bounded_approximation() -> Check {
    let deltas = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [Preset::SlitSquare, Preset::SlitDisk] {
        let r = approximation_sweep(&sweep_levels(p, &deltas)?)?;
        let decreasing = r.rows.windows(2).all(|w| w[1].removed_volume < w[0].removed_volume);
        let pass = r.ratio_spread <= 4.0 && decreasing && r.removed_slope >= 0.9 && r.audits_passed;
        ok &= pass;
        detail.push(format!(
            "{}: spread {:.3}, removed slope {:.3}, audits {}",
            p.name(),
            r.ratio_spread,
            r.removed_slope,
            r.audits_passed
        ));
    }
    Ok((ok, detail.join("; ")))
}

/// Cantor cross levels `k = 1..=4` at spacing `3^-k / 4`.
pub fn cantor_levels() -> Result<Vec<RoughSet>> {
    (1..=4u32).map(|k| preset(Preset::CantorCross(k), 4 * 3usize.pow(k))).collect()
}

fn cantor_growth() -> Check {
    let sets = cantor_levels()?;
    let levels: Vec<SweepLevel> = sets
        .iter()
        .map(|s| {
            let h = s.grid().spacing();
            SweepLevel { set: s.clone(), deltas: vec![8.0 * h, 16.0 * h] }
        })
        .collect();
    let r = approximation_sweep(&levels)?;
    let increasing = r.min_perimeters.windows(2).all(|w| w[1] > w[0]);
    let d = star_condition_diagnostic(&sets)?;
    let target = (4.0f64 / 3.0).ln() / 3f64.ln();
    let ok = increasing && (d.slope - target).abs() <= 0.05;
    Ok((
        ok,
        format!(
            "min perimeters {:?}, sweep {:?}; boundary slope {:.4} vs {:.4}",
            r.min_perimeters.iter().map(|p| (p * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            r.verdict,
            d.slope,
            target
        ),
    ))
}

fn gallery_sets() -> Result<Vec<RoughSet>> {
    Preset::gallery(2).iter().map(|&p| preset(p, 36)).collect()
}

fn extension_bound() -> Check {
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in gallery_sets()? {
        for seed in 0..10 {
            let r = extension_bound_check(&random_field(&s, seed, 1.0), &s, s.grid())?;
            ok &= r.passed;
            worst = worst.max(r.ratio);
        }
    }
    let s = preset(Preset::SlitSquare, 64)?;
    let r = extension_bound_check(&slit_field(&s)?, &s, s.grid())?;
    let example = (r.lhs - 8.0).abs() <= 1e-9 && (r.rhs - 10.0).abs() <= 1e-9;
    Ok((ok && example, format!("worst ratio {worst:.4}; slit square lhs {:.6} rhs {:.6}", r.lhs, r.rhs)))
}

fn trace_sup_bound() -> Check {
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in gallery_sets()? {
        for seed in 0..10 {
            let f = random_field(&s, seed, 1.0);
            let r = trace_linfinity_check(&trace_measure(&f, &s, s.grid())?, &f);
            ok &= r.passed;
            worst = worst.max(r.ratio);
        }
    }
    let s = preset(Preset::SlitSquare, 64)?;
    let f = slit_field(&s)?;
    let r = trace_linfinity_check(&trace_measure(&f, &s, s.grid())?, &f);
    Ok((ok && r.ratio == 2.0, format!("worst ratio {worst:.4}; slit square ratio {}", r.ratio)))
}

fn interior_factor() -> Check {
    let s = preset(Preset::Square, 256)?;
    let g = s.grid().clone();
    let gg = g.clone();
    let e = RoughSet::from_predicate(g.clone(), move |c| {
        let x = gg.cell_center(c);
        x[0].abs() < 0.5 && x[1].abs() < 0.5
    });
    let f = sample_field(|_| [1.0, 0.0, 0.0], &s, 1.0)?;
    let basis = vec![
        TestFunction::bump([0.0; 3], 1.0),
        TestFunction::bump([0.4, 0.1, 0.0], 0.5),
        TestFunction::bump([-0.5, 0.3, 0.0], 0.4),
    ];
    let t = interior_normal_trace(&f, &e, &s, &basis, &default_ladder(&g))?;
    let edge = |axis: u8, sign: f64| -> Vec<Facet> {
        e.boundary_facets()
            .into_iter()
            .map(|(f, _)| f)
            .filter(|f| f.axis == axis && g.facet_center(*f)[axis as usize] * sign > 0.0)
            .collect()
    };
    let left = t.mean_density(&g, &edge(0, -1.0));
    let right = t.mean_density(&g, &edge(0, 1.0));
    let flat = t.mean_density(&g, &[edge(1, 1.0), edge(1, -1.0)].concat());
    let ok = (left - 0.5).abs() <= 0.025 && (right + 0.5).abs() <= 0.025 && flat.abs() <= 0.025 && t.gate_passed;
    Ok((ok, format!("left {left:.4}, right {right:.4}, horizontal {flat:.2e}, gate {}", t.gate_passed)))
}

fn product_rule() -> Check {
    let s = preset(Preset::Square, 128)?;
    let g = s.grid();
    let f = sample_field(|x| [1.0 + x[1], x[0] * x[0], 0.0], &s, 3.0)?;
    let indicator: Vec<f64> = (0..g.cell_count())
        .map(|c| {
            let x = g.cell_center(c);
            if x[0] * x[0] + x[1] * x[1] < 0.25 { 1.0 } else { 0.0 }
        })
        .collect();
    let basis = vec![
        TestFunction::bump([0.0; 3], 0.8),
        TestFunction::bump([0.3, 0.2, 0.0], 0.5),
        TestFunction::bump([-0.4, 0.1, 0.0], 0.5),
    ];
    let h = g.spacing();
    let r = product_rule_check(&f, &indicator, &s, &basis, &[16.0 * h, 8.0 * h, 4.0 * h])?;
    Ok((r.order >= 0.9 && r.bound_ok, format!("order {:.3}, bound holds {}", r.order, r.bound_ok)))
}

fn weak_star() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in Preset::gallery(2) {
        let s = preset(p, 64)?;
        let f = sample_field(|x| [x[1].cos(), x[0].sin(), 0.0], &s, 1.5)?;
        let basis = vec![
            TestFunction::bump([0.0; 3], 2.5),
            TestFunction::bump([0.5, 0.3, 0.0], 1.0),
            TestFunction::bump([-0.6, -0.2, 0.0], 1.2),
        ];
        let r = trace_weak_convergence(&f, &s, &basis, &default_ladder(s.grid()))?;
        let last = r.rows.last().map_or(0.0, |row| row.max_gap);
        ok &= r.verdict == WeakStarVerdict::Convergent && last <= 1e-3 * r.scale;
        detail.push(format!("{} {:.2e}/{:.2e}", p.name(), last, r.scale));
    }
    Ok((ok, detail.join(", ")))
}

fn trace_linf_gap(a: &FluxField, b: &FluxField, s: &RoughSet) -> Result<f64> {
    let ta = trace_measure(a, s, s.grid())?;
    let tb = trace_measure(b, s, s.grid())?;
    let area = s.grid().facet_area();
    Ok(s.inner_sides()
        .into_iter()
        .map(|fs| (ta.atoms.get(&fs).unwrap_or(&0.0) - tb.atoms.get(&fs).unwrap_or(&0.0)).abs() / area)
        .fold(0.0, f64::max))
}

fn divergence_solver() -> Check {
    let s = preset(Preset::SlitSquare, 32)?;
    let g = TraceData::from_trace(&trace_measure(&slit_field(&s)?, &s, s.grid())?);
    let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 16)?;
    let direct = solve_direct(&s, &g, DEFAULT_TOL)?;
    let split = solve_decomposed(&s, &g, &bbox, DEFAULT_TOL)?;
    let mut ok = true;
    let mut worst_trace = 0.0f64;
    let mut worst_div = 0.0f64;
    for r in [&direct, &split] {
        ok &= verify_solution(r, &s, &g, DEFAULT_TOL)?.passed;
        worst_trace = worst_trace.max(r.trace_residual_linf);
        worst_div = worst_div.max(r.interior_div_residual);
    }
    let mut agreement = 0.0f64;
    for p in [Preset::Square, Preset::Disk, Preset::LShape] {
        let s = preset(p, 32)?;
        let g = TraceData::from_fn(&s, |x, n| (x[0] * x[0] - x[1] * x[1]) * n[0] - 2.0 * x[0] * x[1] * n[1]);
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 16)?;
        let d = solve_direct(&s, &g, DEFAULT_TOL)?;
        let e = solve_decomposed(&s, &g, &bbox, DEFAULT_TOL)?;
        agreement = agreement.max(trace_linf_gap(&d.field, &e.field, &s)?);
        worst_div = worst_div.max(d.interior_div_residual).max(e.interior_div_residual);
    }
    let ones = TraceData::from_fn(&s, |_, _| 1.0);
    let code = match solve_direct(&s, &ones, DEFAULT_TOL) {
        Err(e) => crate::cli::exit_code(&e),
        Ok(_) => 0,
    };
    ok &= worst_trace <= 1e-8 && agreement <= 1e-8 && worst_div <= 1e-10 && code == 3;
    Ok((
        ok,
        format!("round trip {worst_trace:.2e}, mode agreement {agreement:.2e}, div residual {worst_div:.2e}, incompatible exit {code}"),
    ))
}

fn geometry_oracles() -> Check {
    let disk = preset(Preset::Disk, 256)?;
    let p = perimeter(&disk, 4.0 * disk.grid().spacing(), None)?;
    let slit = preset(Preset::SlitSquare, 64)?;
    let star = star_measure(&slit);
    let fine = preset(Preset::SlitSquare, 256)?;
    let crack: Vec<(Facet, f64)> = fine.cracks().iter().map(|(&f, &w)| (f, w)).collect();
    let a = ahlfors_constant(fine.grid(), &crack, 64, &[1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0])?;
    let ok = (p / (2.0 * PI) - 1.0).abs() <= 0.02 && (star / 10.0 - 1.0).abs() <= 0.03 && (a.constant / 2.0 - 1.0).abs() <= 0.1;
    Ok((ok, format!("disk perimeter {p:.5}, slit square boundary {star:.5}, segment constant {:.4}", a.constant)))
}
