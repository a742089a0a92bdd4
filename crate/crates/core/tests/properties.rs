use bellbox_core::polytope::{enumerate_ns_vertices_n3, facets_n3, ns_vertices_n2};
use bellbox_core::quantum::VALIDITY_SLACK;
use bellbox_core::strategy::local_max;
use bellbox_core::symmetry::group_elements;
use bellbox_core::*;
use proptest::prelude::*;

fn point_from_codes(n: usize, a: &[usize], b: &[usize]) -> ExactPoint {
    let s = WiringStrategy {
        machine: Some(MachineSpec::pr_n(n).unwrap()),
        alice: PartyChoice(a.iter().map(|&c| Choice::from_code(c)).collect()),
        bob: PartyChoice(b.iter().map(|&c| Choice::from_code(c)).collect()),
    };
    strategy_behavior(&s).unwrap()
}

/// A valid point: two one-machine wirings mixed with weights w/8 and 1 - w/8.
fn arb_point(n: usize) -> impl Strategy<Value = ExactPoint> {
    let k = 2 + 2 * n;
    (prop::collection::vec(0..k, 4 * n), 0i64..=8).prop_map(move |(codes, w)| {
        let p = point_from_codes(n, &codes[..n], &codes[n..2 * n]);
        let q = point_from_codes(n, &codes[2 * n..3 * n], &codes[3 * n..]);
        let w = Rational::new(w, 8);
        convex_combine(&[p, q], &[w, Rational::from_integer(1) - w]).unwrap()
    })
}

fn arb_functional(n: usize) -> impl Strategy<Value = BellFunctional> {
    (
        prop::collection::vec(-3i64..=3, n),
        prop::collection::vec(-3i64..=3, n),
        prop::collection::vec(-3i64..=3, n * n),
        -3i64..=3,
    )
        .prop_map(move |(a, b, j, c)| {
            let joint = j.chunks(n).map(|r| r.to_vec()).collect();
            BellFunctional::new(Scenario::new(n).unwrap(), a, b, joint, c).unwrap()
        })
}

fn arb_triple() -> impl Strategy<Value = (BellFunctional, SymmetryElement, ExactPoint)> {
    (2usize..=3).prop_flat_map(|n| {
        let elems = group_elements(n);
        let len = elems.len();
        (
            arb_functional(n),
            (0..len).prop_map(move |i| elems[i].clone()),
            arb_point(n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn duality_of_point_and_functional_action((f, g, s) in arb_triple()) {
        let lhs = transform(&f, &g).evaluate(&transform_point(&s, &g).unwrap()).unwrap();
        prop_assert_eq!(lhs, f.evaluate(&s).unwrap());
    }

    #[test]
    fn transformed_points_stay_valid((_f, g, s) in arb_triple()) {
        let t = transform_point(&s, &g).unwrap();
        prop_assert!(t.is_valid());
        prop_assert_eq!(transform_point(&t, &g.inverse()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_points_are_valid_and_below_ns_max(
        theta in 0.0f64..=std::f64::consts::FRAC_PI_4,
        dirs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 6),
    ) {
        let unit = |(x, y, z): (f64, f64, f64)| {
            let r = (x * x + y * y + z * z).sqrt();
            if r < 1e-6 { [0.0, 0.0, 1.0] } else { [x / r, y / r, z / r] }
        };
        let v: Vec<[f64; 3]> = dirs.into_iter().map(unit).collect();
        let m = MeasurementSet::new(v[..3].to_vec(), v[3..].to_vec()).unwrap();
        let p = quantum_behavior(&TwoQubitState::schmidt(theta), &m).unwrap();
        prop_assert!(p.validate_with_slack(&VALIDITY_SLACK).unwrap().is_valid());
        // No-signaling maxima over the three-setting vertex list: CHSH 1/2, I3322 1.
        prop_assert!(chsh(3).unwrap().evaluate(&p).unwrap() <= 0.5 + 1e-12);
        prop_assert!(make_inn22(3).unwrap().evaluate(&p).unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn ns_maxima_used_above() {
    let c = chsh(3).unwrap();
    let i = make_inn22(3).unwrap();
    let verts = enumerate_ns_vertices_n3().unwrap();
    let cmax = verts
        .iter()
        .map(|(p, _)| c.evaluate(p).unwrap())
        .max()
        .unwrap();
    let imax = verts
        .iter()
        .map(|(p, _)| i.evaluate(p).unwrap())
        .max()
        .unwrap();
    assert_eq!(
        (cmax, imax),
        (Rational::new(1, 2), Rational::from_integer(1))
    );
}

#[test]
fn every_orbit_member_has_local_max_zero() {
    let (c, i) = facets_n3();
    for f in c.iter().chain(&i) {
        assert_eq!(local_max(f), Rational::from_integer(0), "{:?}", f.key());
    }
    for f in orbit(&chsh(2).unwrap()) {
        assert_eq!(local_max(&f), Rational::from_integer(0));
    }
}

#[test]
fn two_setting_machine_points_reach_chsh_ns_max() {
    let census = ns_vertices_n2().unwrap();
    let o = orbit(&chsh(2).unwrap());
    for p in &census.nonlocal {
        let best = o.iter().map(|f| f.evaluate(p).unwrap()).max().unwrap();
        assert_eq!(best, Rational::new(1, 2));
    }
}

#[test]
fn inn22_on_prn_closed_form() {
    for n in 2..=6 {
        let p = machine_behavior(&MachineSpec::pr_n(n).unwrap()).unwrap();
        assert_eq!(
            make_inn22(n).unwrap().evaluate(&p).unwrap(),
            Rational::new(n as i64 - 1, 2)
        );
    }
}

#[test]
fn wiring_matches_recipe() {
    for n in 2..=6 {
        let m = wire_pr_boxes(&make_prn_wiring(n).unwrap()).unwrap();
        assert_eq!(m, recipe(&make_inn22(n).unwrap()).unwrap());
        assert_eq!(
            machine_behavior(&m).unwrap(),
            machine_behavior(&MachineSpec::pr_n(n).unwrap()).unwrap()
        );
    }
}

#[test]
fn xz_plane_matches_sphere() {
    for f in [chsh(2).unwrap(), make_inn22(3).unwrap()] {
        for theta in [0.2, 0.5, std::f64::consts::FRAC_PI_4] {
            let st = TwoQubitState::schmidt(theta);
            let full = seesaw_maximize(&f, &st, &SeesawOptions::default())
                .unwrap()
                .value;
            let xz = seesaw_maximize(
                &f,
                &st,
                &SeesawOptions {
                    domain: BlochDomain::XzPlane,
                    ..Default::default()
                },
            )
            .unwrap()
            .value;
            assert!((full - xz).abs() < 1e-8, "theta {theta}: {full} vs {xz}");
        }
    }
}

#[test]
fn seesaw_never_exceeds_ns_max() {
    for theta in [0.1, 0.4, std::f64::consts::FRAC_PI_4] {
        let st = TwoQubitState::schmidt(theta);
        let c = seesaw_maximize(&chsh(3).unwrap(), &st, &SeesawOptions::default()).unwrap();
        let i = seesaw_maximize(&make_inn22(3).unwrap(), &st, &SeesawOptions::default()).unwrap();
        assert!(c.value <= 0.5 && i.value <= 1.0);
    }
}

#[test]
fn seesaw_is_reproducible() {
    let f = make_mnn22(3).unwrap();
    let st = TwoQubitState::schmidt(0.22);
    let opts = SeesawOptions {
        restarts: 8,
        seed: 7,
        ..Default::default()
    };
    let a = seesaw_maximize(&f, &st, &opts).unwrap();
    let b = seesaw_maximize(&f, &st, &opts).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.measurements, b.measurements);
}

#[test]
fn lemma1_sampling_has_no_counterexamples() {
    for n in [3, 4] {
        let rep = bellbox_core::polytope::check_lemma1(n, 2_000, 11).unwrap();
        assert_eq!(rep.samples, 2_000);
    }
}
