use debranges::interpolation::{reconstruct, sample, BasisFunction, BasisKind, SampleSet};
use debranges::kernels::{kernel_eval, SpaceSpec};
use debranges::structure::{node_window, phase_derivative};
use debranges::{sinc, DiagnosticReport, EntireFunction, FnEntire, Relation, StructureFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = StructureFunction> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|tau| StructureFunction::paley_wiener(tau).unwrap()),
        (-0.4f64..2.0).prop_map(|alpha| StructureFunction::homogeneous(alpha).unwrap()),
        (0.0f64..1.0, proptest::collection::vec((-8.0f64..8.0, 0.2f64..3.0), 1..5))
            .prop_map(|(a, zeros)| StructureFunction::product(a, zeros).unwrap()),
    ]
}

fn point(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_hermitian_and_bounded(sf in family(), nu in 1u32..=3, a in -6.0f64..6.0, b in -1.5f64..1.5, c in -6.0f64..6.0, d in -1.5f64..1.5) {
        let s = SpaceSpec::new(sf, nu).unwrap();
        let (w, z) = (point(a, b), point(c, d));
        let kwz = kernel_eval(&s, w, z).unwrap();
        let kzw = kernel_eval(&s, z, w).unwrap();
        prop_assert!((kwz - kzw.conj()).norm() <= 1e-12 * kwz.norm().max(1.0));
        let kww = kernel_eval(&s, w, w).unwrap();
        let kzz = kernel_eval(&s, z, z).unwrap();
        prop_assert!(kww.re >= 0.0 && kzz.re >= 0.0);
        prop_assert!(kwz.norm_sqr() <= kww.re * kzz.re * (1.0 + 1e-9) + 1e-300);
    }

    #[test]
    fn kernel_ignores_rotation(sf in family(), theta in 0.0f64..3.1, nu in 1u32..=2, a in -5.0f64..5.0, b in -1.0f64..1.0, c in -5.0f64..5.0, d in -1.0f64..1.0) {
        let s = SpaceSpec::new(sf.clone(), nu).unwrap();
        let r = SpaceSpec::new(sf.rotated(theta).unwrap(), nu).unwrap();
        let (w, z) = (point(a, b), point(c, d));
        let k = kernel_eval(&s, w, z).unwrap();
        let kr = kernel_eval(&r, w, z).unwrap();
        prop_assert!((k - kr).norm() <= 1e-10 * k.norm().max(1e-3), "{k} vs {kr}");
    }

    #[test]
    fn phase_increases_and_dominates_inverse_depth(a in 0.0f64..1.0, zeros in proptest::collection::vec((-20.0f64..20.0, 0.1f64..5.0), 1..6), x in -40.0f64..40.0) {
        let sf = StructureFunction::product(a, zeros.clone()).unwrap();
        prop_assert!(phase_derivative(&sf, x).unwrap() > 0.0);
        for (xn, yn) in zeros {
            prop_assert!(phase_derivative(&sf, xn).unwrap() >= (1.0 / yn) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn report_verdict_survives_json(measured in proptest::collection::vec(-10.0f64..10.0, 1..5), bound in -10.0f64..10.0, slack in 0.0f64..0.1, le in any::<bool>()) {
        let rel = if le { Relation::Le } else { Relation::Ge };
        let r = DiagnosticReport::check("p", measured, vec![bound], rel, slack);
        let back: DiagnosticReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.recheck(), r.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn delta_property_on_random_bandwidths(tau in 0.5f64..2.0, nu in 2u32..=3, i in 0usize..7, j in 0usize..3) {
        let s = SpaceSpec::new(StructureFunction::paley_wiener(tau).unwrap(), nu).unwrap();
        let j = j % nu as usize;
        let nodes = node_window(&s.sf, 1, 0.0, 3).unwrap();
        let g = BasisFunction::new(&s, nodes.nodes[i], BasisKind::G, j).unwrap();
        let set = sample(&s, &g, &nodes).unwrap();
        for (k, vals) in set.values.iter().enumerate() {
            for (l, v) in vals.iter().enumerate() {
                let expect = if k == i && l == j { 1.0 } else { 0.0 };
                prop_assert!((v - expect).norm() <= 1e-8, "node {k} order {l}: {v}");
            }
        }
    }

    #[test]
    fn sample_csv_round_trips(values in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 14)) {
        let s = SpaceSpec::new(StructureFunction::paley_wiener(1.0).unwrap(), 2).unwrap();
        let nodes = node_window(&s.sf, 1, 0.0, 3).unwrap();
        let vals: Vec<Vec<Complex64>> = values.chunks(2).map(|c| c.iter().map(|&(re, im)| point(re, im)).collect()).collect();
        let set = SampleSet::new(&s, nodes, vals).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = SampleSet::read_csv(&s, buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, set.values);
        prop_assert_eq!(back.nodes.nodes, set.nodes.nodes);
    }
}

#[test]
fn reconstruction_is_idempotent() {
    for sf in [StructureFunction::paley_wiener(1.0).unwrap(), StructureFunction::product(0.5, vec![(1.0, 0.5), (-2.0, 1.5)]).unwrap()] {
        let s = SpaceSpec::new(sf, 2).unwrap();
        let nodes = node_window(&s.sf, 1, 0.0, 15).unwrap();
        let f = FnEntire::new("shifted product", |z| Ok(sinc(z) * sinc(z - 0.7)));
        let first = sample(&s, &f, &nodes).unwrap();
        let s2 = s.clone();
        let once = FnEntire::new("reconstruction", move |z| Ok(reconstruct(&s2, &first, &[z])?.values[0]));
        let again = sample(&s, &once, &nodes).unwrap();
        let grid: Vec<Complex64> = (0..41).map(|k| point(-5.0 + 0.25 * k as f64, 0.1)).collect();
        let twice = reconstruct(&s, &again, &grid).unwrap();
        for (z, v) in grid.iter().zip(&twice.values) {
            let expect = once.eval(*z).unwrap();
            assert!((v - expect).norm() <= 1e-8 * expect.norm().max(1.0), "{:?} at {z}: {v} vs {expect}", s.sf.family);
        }
    }
}
