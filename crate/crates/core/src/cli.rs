//! The `roughgg` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::acceptance;
use crate::approx::{approximation_sweep, exterior_approximation, interior_approximation, SweepLevel};
use crate::divsolve::{solve_decomposed, solve_direct, verify_solution, SolveMode, TraceData, DEFAULT_TOL};
use crate::dmfield::{
    extension_bound_check, gauss_green_residual, random_field, sample_field, trace_linfinity_check, trace_measure,
    FluxField, Quadrature,
};
use crate::domain::{DomainSpec, Grid, Preset, RoughSet, PRESET_MARGIN};
use crate::error::{Error, Result};
use crate::io::{pgm, to_json, write_atomic};
use crate::measure::{
    boundary_decomposition, classify, facet_perimeter, perimeter, star_condition_diagnostic, ClassifyOptions, Label,
};

#[derive(Parser, Debug)]
#[command(name = "roughgg", version, about = "Normal traces and Gauss-Green formulas on rough domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Label every cell as interior, exterior or essential boundary.
    Classify(Common),
    /// Mollified and facet perimeters with the boundary measure.
    Perimeter(Common),
    /// Interior or exterior approximation at scale `--delta`.
    Approx {
        #[command(flatten)]
        common: Common,
        /// Approximate from outside instead of inside.
        #[arg(long)]
        exterior: bool,
        /// Also run `delta`, `delta/2`, `delta/4` on refined grids and write CSV to this path.
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// Normal trace of a sampled field.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = FieldKind::Example)]
        field: FieldKind,
    },
    /// Gauss-Green residuals and trace bounds for a sampled field.
    GgCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = FieldKind::Example)]
        field: FieldKind,
    },
    /// Builds a bounded field with prescribed normal trace.
    SolveDiv {
        #[command(flatten)]
        common: Common,
        /// Trace data as `facet_id,side,g` rows; defaults to the trace of the example field.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Direct)]
        mode: ModeArg,
        /// Where to write the field in DMF1 binary form.
        #[arg(long)]
        dmf: Option<PathBuf>,
    },
    /// Writes every preset domain and a manifest of reference values into `--out`.
    Gallery(Common),
    /// Runs the acceptance criteria.
    Accept {
        #[command(flatten)]
        common: Common,
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, conflicts_with_all = ["domain", "inline"])]
    preset: Option<String>,
    /// Domain document to read.
    #[arg(long, conflicts_with = "inline")]
    domain: Option<PathBuf>,
    /// Domain document given on the command line.
    #[arg(long)]
    inline: Option<String>,
    /// Cantor cross generation.
    #[arg(long)]
    k: Option<u32>,
    /// Cells per unit length.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grayscale PGM image of the result.
    #[arg(long)]
    png: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldKind {
    /// `(0, sign x2)`, jumping across horizontal cracks.
    Example,
    /// `(1, 0)`.
    Uniform,
    /// Seeded random facet values bounded by one.
    Random,
    /// `(-x2, x1)`.
    Swirl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Direct,
    Decomposed,
}

/// Exit code for an error: 3 for incompatible data, 1 for a failed
/// numerical invariant, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Compatibility(_) => 3,
        Error::Solver(_) => 1,
        _ => 2,
    }
}

const DEFAULT_GRID: usize = 64;

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(Outcome { summary, ok }) => {
            println!("{summary}");
            if ok { 0 } else { 1 }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ROUGHGG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

struct Outcome {
    summary: String,
    ok: bool,
}

impl Outcome {
    fn ok(summary: String) -> Outcome {
        Outcome { summary, ok: true }
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Classify(c) => run_classify(&c),
        Command::Perimeter(c) => run_perimeter(&c),
        Command::Approx { common, exterior, sweep } => run_approx(&common, exterior, sweep.as_deref()),
        Command::Trace { common, field } => run_trace(&common, field),
        Command::GgCheck { common, field } => run_gg_check(&common, field),
        Command::SolveDiv { common, trace, mode, dmf } => run_solve(&common, trace.as_deref(), mode, dmf.as_deref()),
        Command::Gallery(c) => run_gallery(&c),
        Command::Accept { common, only } => run_accept(&common, only),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(bad(format!("--{name} must be positive, got {x}"))),
        _ => Ok(v),
    }
}

/// The domain described by the flags, before rasterization.
fn load_spec(c: &Common) -> Result<DomainSpec> {
    match (&c.preset, &c.domain, &c.inline) {
        (Some(name), None, None) => Ok(Preset::from_name(name, c.k)?.spec()),
        (None, Some(path), None) => DomainSpec::parse(&std::fs::read_to_string(path)?),
        (None, None, Some(text)) => DomainSpec::parse(text),
        (None, None, None) => Err(bad("give one of --preset, --domain or --inline")),
        _ => Err(bad("give only one of --preset, --domain or --inline")),
    }
}

fn grid_for(spec: &DomainSpec, n: usize) -> Result<Grid> {
    if !(2..=4096).contains(&n) {
        return Err(bad(format!("--grid must lie in 2..=4096, got {n}")));
    }
    match spec.preset {
        Some(p) => p.grid(n),
        None => {
            let (lo, hi) = spec.shape.bounds();
            Grid::covering(&lo[..spec.dim], &hi[..spec.dim], 1.0 / n as f64, PRESET_MARGIN)
        }
    }
}

fn rasterize(spec: &DomainSpec, grid: &Grid) -> Result<RoughSet> {
    match spec.preset {
        Some(p) => p.rasterize(grid),
        None => crate::domain::rasterize(spec, grid),
    }
}

fn load_set(c: &Common) -> Result<(DomainSpec, RoughSet)> {
    let spec = load_spec(c)?;
    let grid = grid_for(&spec, c.grid.unwrap_or(DEFAULT_GRID))?;
    let set = rasterize(&spec, &grid)?;
    Ok((spec, set))
}

fn label(spec: &DomainSpec) -> String {
    spec.preset.map_or_else(|| "custom".to_string(), |p| p.name().to_string())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    if let Some(p) = path {
        write_atomic(p, to_json(value)?.as_bytes())?;
    }
    Ok(())
}

fn write_png(c: &Common, grid: &Grid, shade: impl Fn(usize) -> u8) -> Result<()> {
    if let Some(p) = &c.png {
        write_atomic(p, &pgm(grid, shade))?;
    }
    Ok(())
}

fn classify_options(c: &Common, grid: &Grid) -> Result<ClassifyOptions> {
    let mut o = ClassifyOptions::for_grid(grid);
    if let Some(t) = c.tau {
        if !(t > 0.0 && t < 0.5) {
            return Err(bad(format!("--tau must lie in (0, 0.5), got {t}")));
        }
        o.tau = t;
    }
    if let Some(r) = positive("eps", c.eps)? {
        o.radius = r;
    }
    Ok(o)
}

fn run_classify(c: &Common) -> Result<Outcome> {
    let (spec, set) = load_set(c)?;
    let cls = classify(&set, &classify_options(c, set.grid())?)?;
    let d = boundary_decomposition(&set, &cls);
    let counts = [Label::Interior, Label::Exterior, Label::EssBoundary].map(|l| cls.count(l));
    write_json(
        c.out.as_deref(),
        &json!({
            "domain": label(&spec),
            "spacing": set.grid().spacing(),
            "options": cls.options,
            "interior": counts[0],
            "exterior": counts[1],
            "boundary": counts[2],
            "reduced_measure": d.reduced_measure,
            "crack_measure": d.crack_measure,
            "star_measure": d.star_measure,
            "exterior_part": d.exterior_part.len(),
        }),
    )?;
    write_png(c, set.grid(), |cell| cls.shade(cell))?;
    Ok(Outcome::ok(format!(
        "classify {}: interior {} exterior {} boundary {} star measure {:.6}",
        label(&spec),
        counts[0],
        counts[1],
        counts[2],
        d.star_measure
    )))
}

fn run_perimeter(c: &Common) -> Result<Outcome> {
    let (spec, set) = load_set(c)?;
    let eps = positive("eps", c.eps)?.unwrap_or(4.0 * set.grid().spacing());
    let p = perimeter(&set, eps, None)?;
    let reference = spec.preset.map(|p| p.reference());
    write_json(
        c.out.as_deref(),
        &json!({
            "domain": label(&spec),
            "spacing": set.grid().spacing(),
            "eps": eps,
            "perimeter": p,
            "facet_perimeter": facet_perimeter(&set),
            "star_measure": crate::measure::star_measure(&set),
            "reference": reference,
        }),
    )?;
    write_png(c, set.grid(), |cell| if set.contains(cell) { 0 } else { 255 })?;
    Ok(Outcome::ok(format!("perimeter {}: {:.6} at eps {:.4e}", label(&spec), p, eps)))
}

/// Smallest grid with `delta >= 8 spacing`, a multiple of `3^k` for the Cantor cross.
fn approx_grid(spec: &DomainSpec, delta: f64) -> usize {
    let need = (8.0 / delta * (1.0 - 1e-9)).ceil() as usize;
    match spec.preset {
        Some(Preset::CantorCross(k)) => {
            let step = 3usize.pow(k);
            need.div_ceil(step).max(1) * step
        }
        _ => need.max(2),
    }
}

fn run_approx(c: &Common, exterior: bool, sweep: Option<&Path>) -> Result<Outcome> {
    let spec = load_spec(c)?;
    let delta = positive("delta", c.delta)?.ok_or_else(|| bad("approx needs --delta"))?;
    let n = c.grid.unwrap_or_else(|| approx_grid(&spec, delta));
    let grid = grid_for(&spec, n)?;
    let set = rasterize(&spec, &grid)?;
    let report = if exterior {
        let (lo, hi) = spec.shape.bounds();
        let margin = (delta / (2.0 * grid.spacing())).ceil() as usize + 8;
        let bbox = Grid::covering(&lo[..spec.dim], &hi[..spec.dim], grid.spacing(), margin)?;
        exterior_approximation(&set, delta, &bbox)?
    } else {
        interior_approximation(&set, delta)?
    };
    let growth = match spec.preset {
        Some(Preset::CantorCross(k)) => {
            let levels = (1..=k.max(3))
                .map(|j| {
                    let p = Preset::CantorCross(j);
                    p.rasterize(&p.grid(4 * 3usize.pow(j))?)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(star_condition_diagnostic(&levels)?)
        }
        _ => None,
    };
    let mut csv_rows = None;
    if let Some(path) = sweep {
        let levels = [1.0, 0.5, 0.25]
            .iter()
            .map(|s| {
                let d = delta * s;
                let g = grid_for(&spec, approx_grid(&spec, d).max(n))?;
                Ok(SweepLevel { set: rasterize(&spec, &g)?, deltas: vec![d] })
            })
            .collect::<Result<Vec<_>>>()?;
        let r = approximation_sweep(&levels)?;
        write_atomic(path, r.to_csv().as_bytes())?;
        csv_rows = Some((r.verdict, r.audits_passed));
    }
    write_json(c.out.as_deref(), &json!({"domain": label(&spec), "report": report, "growth": growth}))?;
    let kept = report.approximant.clone();
    write_png(c, kept.grid(), |cell| if kept.contains(cell) { 0 } else { 255 })?;
    let mut summary = format!(
        "approx {} delta {}: perimeter {:.6} ratio {:.4} audit {}",
        label(&spec),
        delta,
        report.perimeter,
        report.ratio,
        if report.audit.passed() { "passed" } else { "FAILED" }
    );
    if let Some(g) = &growth {
        summary.push_str(&format!(" growth {:?} slope {:.4}", g.verdict, g.slope));
    }
    let mut ok = report.audit.passed();
    if let Some((verdict, audits)) = csv_rows {
        summary.push_str(&format!(" sweep {verdict:?}"));
        ok &= audits;
    }
    Ok(Outcome { summary, ok })
}

fn make_field(kind: FieldKind, set: &RoughSet, seed: u64) -> Result<FluxField> {
    match kind {
        FieldKind::Example => acceptance::slit_field(set),
        FieldKind::Uniform => sample_field(|_| [1.0, 0.0, 0.0], set, 1.0),
        FieldKind::Random => Ok(random_field(set, seed, 1.0)),
        FieldKind::Swirl => {
            let (lo, hi) = set.grid().origin().iter().zip(set.grid().upper_corner()).fold((0.0f64, 0.0f64), |acc, (a, b)| {
                (acc.0.max(a.abs()), acc.1.max(b.abs()))
            });
            sample_field(|x| [-x[1], x[0], 0.0], set, 2.0f64.sqrt() * lo.max(hi))
        }
    }
}

fn run_trace(c: &Common, kind: FieldKind) -> Result<Outcome> {
    let (spec, set) = load_set(c)?;
    let field = make_field(kind, &set, c.seed)?;
    let t = trace_measure(&field, &set, set.grid())?;
    let g = set.grid();
    let facets: Vec<serde_json::Value> = t
        .facet_densities()
        .into_iter()
        .map(|(f, d)| json!({"axis": f.axis, "index": f.index, "id": g.global_facet_id(f), "center": &g.facet_center(f)[..g.dim()], "g": d}))
        .collect();
    let (g_inf, _) = t.g_infinity();
    write_json(
        c.out.as_deref(),
        &json!({
            "domain": label(&spec),
            "spacing": g.spacing(),
            "field": format!("{kind:?}").to_lowercase(),
            "g_infinity": g_inf,
            "total": t.total(),
            "facets": facets,
            "atoms": t,
        }),
    )?;
    let densities = t.facet_densities();
    let mut shade = vec![255u8; g.cell_count()];
    for c in (0..g.cell_count()).filter(|&c| set.contains(c)) {
        shade[c] = 200;
    }
    for (f, d) in &densities {
        for side in [crate::domain::Side::Lower, crate::domain::Side::Upper] {
            if let Some(cell) = g.facet_cell(*f, side) {
                let s = (128.0 + 127.0 * (d / g_inf.max(1e-300))).clamp(0.0, 255.0) as u8;
                shade[cell] = s.min(shade[cell].min(254));
            }
        }
    }
    write_png(c, g, |cell| shade[cell])?;
    Ok(Outcome::ok(format!(
        "trace {}: {} facets, g_infinity {:.6}, total {:.3e}",
        label(&spec),
        densities.len(),
        g_inf,
        t.total()
    )))
}

fn run_gg_check(c: &Common, kind: FieldKind) -> Result<Outcome> {
    let (spec, set) = load_set(c)?;
    let tol = positive("tol", c.tol)?.unwrap_or(1e-8);
    let field = make_field(kind, &set, c.seed)?;
    let t = trace_measure(&field, &set, set.grid())?;
    let mut rows = Vec::new();
    let mut ok = true;
    for phi in acceptance::slit_basis() {
        let pairing = crate::dmfield::pairing(&field, &set, &phi, Quadrature::Mimetic)?;
        let mimetic = gauss_green_residual(&field, &set, &phi, &t, Quadrature::Mimetic)?;
        let analytic = gauss_green_residual(&field, &set, &phi, &t, Quadrature::Analytic)?;
        ok &= mimetic <= tol * (1.0 + pairing.abs());
        rows.push(json!({"phi": phi.name(), "pairing": pairing, "mimetic": mimetic, "analytic": analytic}));
    }
    let linf = trace_linfinity_check(&t, &field);
    let ext = extension_bound_check(&field, &set, set.grid())?;
    ok &= linf.passed && ext.passed;
    write_json(
        c.out.as_deref(),
        &json!({"domain": label(&spec), "spacing": set.grid().spacing(), "residuals": rows, "linf": linf, "extension": ext}),
    )?;
    Ok(Outcome {
        summary: format!(
            "gg-check {}: {} test functions, linf ratio {:.4}, extension ratio {:.4}, {}",
            label(&spec),
            rows.len(),
            linf.ratio,
            ext.ratio,
            if ok { "passed" } else { "FAILED" }
        ),
        ok,
    })
}

fn run_solve(c: &Common, trace: Option<&Path>, mode: ModeArg, dmf: Option<&Path>) -> Result<Outcome> {
    let (spec, set) = load_set(c)?;
    let tol = positive("tol", c.tol)?.unwrap_or(DEFAULT_TOL);
    let g = match trace {
        Some(path) => TraceData::from_csv(set.grid(), &std::fs::read_to_string(path)?)?,
        None => TraceData::from_trace(&trace_measure(&acceptance::slit_field(&set)?, &set, set.grid())?),
    };
    let report = match mode {
        ModeArg::Direct => solve_direct(&set, &g, tol)?,
        ModeArg::Decomposed => {
            let (lo, hi) = spec.shape.bounds();
            let bbox = Grid::covering(&lo[..spec.dim], &hi[..spec.dim], set.grid().spacing(), PRESET_MARGIN + 4)?;
            solve_decomposed(&set, &g, &bbox, tol)?
        }
    };
    let audit = verify_solution(&report, &set, &g, tol)?;
    write_json(c.out.as_deref(), &json!({"domain": label(&spec), "report": report, "audit": audit}))?;
    if let Some(p) = dmf {
        write_atomic(p, &report.field.to_bytes())?;
    }
    let mode_name = if report.mode == SolveMode::Direct { "direct" } else { "decomposed" };
    Ok(Outcome {
        summary: format!(
            "solve-div {} {}: trace residual {:.3e}, div residual {:.3e}, {} iterations, {}",
            label(&spec),
            mode_name,
            report.trace_residual_linf,
            report.interior_div_residual,
            report.iterations,
            if audit.passed { "verified" } else { "FAILED" }
        ),
        ok: audit.passed,
    })
}

fn run_gallery(c: &Common) -> Result<Outcome> {
    let dir = c.out.as_deref().ok_or_else(|| bad("gallery needs --out DIR"))?;
    std::fs::create_dir_all(dir)?;
    let k = c.k.unwrap_or(2);
    let mut entries = Vec::new();
    for p in Preset::gallery(k) {
        let file = format!("{}.json", p.name());
        let mut doc = p.spec().to_value();
        if let Preset::CantorCross(k) = p {
            doc = json!({"preset": "cantor-cross", "k": k});
        }
        write_atomic(&dir.join(&file), to_json(&doc)?.as_bytes())?;
        entries.push(json!({"file": file, "reference": p.reference()}));
    }
    write_atomic(&dir.join("manifest.json"), to_json(&json!({"presets": entries}))?.as_bytes())?;
    Ok(Outcome::ok(format!("gallery: {} presets written to {}", entries.len(), dir.display())))
}

fn run_accept(c: &Common, only: Option<u32>) -> Result<Outcome> {
    let outcomes = match only {
        Some(id) if (1..=acceptance::NAMES.len() as u32).contains(&id) => vec![acceptance::run(id)],
        Some(id) => return Err(bad(format!("no criterion {id}"))),
        None => acceptance::run_all(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    write_json(c.out.as_deref(), &outcomes)?;
    let passed = outcomes.iter().filter(|o| o.passed).count();
    Ok(Outcome { summary: format!("accept: {passed}/{} criteria passed", outcomes.len()), ok: passed == outcomes.len() })
}
