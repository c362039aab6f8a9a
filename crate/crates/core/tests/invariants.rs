//! Property tests for the invariants the toolkit relies on.

use proptest::prelude::*;

use roughgg::divsolve::{solve_direct, TraceData, DEFAULT_TOL};
use roughgg::dmfield::{
    gauss_green_residual, mollify_field, random_field, richardson_gate, trace_linfinity_check, trace_measure,
    FluxField, Quadrature, TestFunction, C_CHECK,
};
use roughgg::domain::{Crack, DomainSpec, Grid, Preset, RoughSet, Shape};

use roughgg::measure::density;

fn slit_square(n: usize) -> RoughSet {
    Preset::SlitSquare.rasterize(&Preset::SlitSquare.grid(n).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_green_holds_for_any_field(seed in 0u64..1000, cx in -0.8f64..0.8, cy in -0.8f64..0.8, r in 0.3f64..1.5) {
        let s = slit_square(16);
        let f = random_field(&s, seed, 1.0);
        let t = trace_measure(&f, &s, s.grid()).unwrap();
        let phi = TestFunction::bump([cx, cy, 0.0], r);
        let res = gauss_green_residual(&f, &s, &phi, &t, Quadrature::Mimetic).unwrap();
        prop_assert!(res <= 1e-12, "residual {res}");
    }

    #[test]
    fn trace_is_bounded_by_the_field(seed in 0u64..1000, bound in 0.1f64..10.0) {
        let s = slit_square(16);
        let f = random_field(&s, seed, bound);
        let r = trace_linfinity_check(&trace_measure(&f, &s, s.grid()).unwrap(), &f);
        prop_assert!(r.g_infinity <= C_CHECK * bound * (1.0 + 1e-12));
        prop_assert!(r.passed);
    }

    #[test]
    fn complementary_densities_sum_to_one(x in -0.6f64..0.6, y in -0.6f64..0.6, r in 0.125f64..0.3) {
        let s = Preset::Disk.rasterize(&Preset::Disk.grid(32).unwrap()).unwrap();
        let a = density(&s, &[x, y, 0.0], r).unwrap();
        let b = density(&s.complement(), &[x, y, 0.0], r).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn mollifying_never_raises_the_bound(seed in 0u64..1000) {
        let s = slit_square(16);
        let f = random_field(&s, seed, 1.0);
        let m = mollify_field(&f, &s, 4.0 * s.grid().spacing()).unwrap();
        prop_assert!(m.sup_bound() <= f.max_abs() * (1.0 + 1e-12));
    }

    #[test]
    fn field_bytes_round_trip(seed in 0u64..1000) {
        let s = slit_square(8);
        let f = random_field(&s, seed, 2.0);
        let back = FluxField::from_bytes(&f.to_bytes()).unwrap();
        prop_assert_eq!(back.to_bytes(), f.to_bytes());
        prop_assert_eq!(back.two_sided(), f.two_sided());
    }

    #[test]
    fn trace_csv_round_trip(seed in 0u64..1000) {
        let s = slit_square(8);
        let g = TraceData::from_trace(&trace_measure(&random_field(&s, seed, 1.0), &s, s.grid()).unwrap());
        prop_assert_eq!(TraceData::from_csv(s.grid(), &g.to_csv()).unwrap(), g);
    }

    #[test]
    fn solver_reproduces_compatible_data(values in prop::collection::vec(-1.0f64..1.0, 200)) {
        // The slit cuts the square in two; remove the mean flux from each half.
        let s = slit_square(12);
        let grid = s.grid();
        let sides = s.inner_sides();
        let half = |fs: &roughgg::domain::FacetSide| grid.cell_center(grid.facet_cell(fs.facet, fs.side).unwrap())[1] > 0.0;
        let mut g = TraceData::new(grid);
        for upper in [true, false] {
            let mine: Vec<_> = sides.iter().filter(|fs| half(fs) == upper).collect();
            let raw: Vec<f64> = (0..mine.len()).map(|i| values[i % values.len()] + 0.01 * i as f64).collect();
            let mean = raw.iter().sum::<f64>() / raw.len() as f64;
            for (fs, v) in mine.into_iter().zip(raw) {
                g.set(*fs, v - mean);
            }
        }
        let r = solve_direct(&s, &g, DEFAULT_TOL).unwrap();
        let t = trace_measure(&r.field, &s, grid).unwrap();
        for fs in sides {
            prop_assert!((t.density(fs).unwrap() - g.get(fs)).abs() <= 1e-8);
        }
        prop_assert!(r.interior_div_residual <= 1e-10);
    }

    #[test]
    fn geometric_sequences_pass_the_gate(a in 0.5f64..2.0, d in 0.01f64..0.5, q in 0.1f64..0.6) {
        let v = [a, a + d, a + d + d * q];
        prop_assert!(richardson_gate(&v).passed);
    }

    #[test]
    fn domain_documents_round_trip(x in -2.0f64..2.0, y in -2.0f64..2.0, w in 0.1f64..1.0, r in 0.1f64..1.0) {
        let spec = DomainSpec::new(
            Shape::Union(vec![
                Shape::Box { min: [x, y, 0.0], max: [x + w, y + w, 0.0] },
                Shape::Ball { center: [x, y, 0.0], radius: r },
            ]),
            2,
        )
        .with_crack(Crack::Segment { from: [x, y], to: [x + w, y] });
        let back = DomainSpec::parse(&spec.to_value().to_string()).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn embedding_keeps_the_trace(seed in 0u64..1000, margin in 14usize..20) {
        let s = slit_square(8);
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), margin).unwrap();
        let f = random_field(&s, seed, 1.0);
        let a = trace_measure(&f, &s, s.grid()).unwrap();
        let b = trace_measure(&f, &s, &bbox).unwrap();
        prop_assert_eq!(a, b);
    }
}
