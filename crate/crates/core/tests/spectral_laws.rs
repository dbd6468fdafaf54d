//! Parity, gap and semiclassical laws of the model.

use dickelab::diagnostics::{
    converge_cutoff, degeneracy_classes, oracle_spectrum_equivalence, spin_model_levels,
    splitting_and_gap,
};
use dickelab::semiclassics::{energy_surface, find_minima, interference_factor, PhasePoint};
use dickelab::ModelParams;
use proptest::prelude::*;

fn spin_levels(n: usize, u: f64, v: f64, k: usize) -> Vec<f64> {
    spin_model_levels(&ModelParams::from_u(n, 1.0, u, v).unwrap(), k)
        .unwrap()
        .eigenvalues
}

#[test]
fn u_equals_v_gap_is_two_u_for_odd_atoms() {
    for u in [0.3, 1.0, 2.5] {
        for n in [3, 5, 7, 9, 11] {
            let e = spin_levels(n, u, u, 3);
            let sg = splitting_and_gap(&e).unwrap();
            assert!(
                (sg.delta - 2.0 * u).abs() <= 1e-12 * 2.0 * u,
                "N={n} u={u}: {}",
                sg.delta
            );
        }
    }
}

#[test]
fn odd_gap_grows_with_atom_count() {
    let gaps: Vec<f64> = (3..=15)
        .step_by(2)
        .map(|n| {
            splitting_and_gap(&spin_levels(n, 0.2, 1.0, 3))
                .unwrap()
                .delta
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
}

#[test]
fn full_model_parity_alternation() {
    for n in 3..=6 {
        let p = ModelParams::from_u(n, 1.0, 0.2, 1.0).unwrap();
        let report = converge_cutoff(&p, 1e-10, 3).unwrap();
        let e = &report.spectrum.eigenvalues;
        let d = e[1] - e[0];
        let tiny = d < 1e-10 * e[0].abs();
        assert_eq!(tiny, n % 2 == 1, "N={n} d={d}");
        assert_eq!(interference_factor(n as i64).unwrap() == 0.0, tiny);
    }
}

#[test]
fn polaron_reference_exact_without_inductive_term() {
    let p = ModelParams::new(3, 1.0, 0.6, 0.0).unwrap();
    assert!(oracle_spectrum_equivalence(&p, 6, 1e-8).unwrap().pass);
}

#[test]
fn two_minima_in_double_well_regime() {
    let p = ModelParams::from_u(4, 1.0, 0.3, 1.0).unwrap();
    let minima = find_minima(&p).unwrap();
    assert_eq!(minima.len(), 2);
    let s = p.spin();
    for m in &minima {
        assert!((m.energy + p.v() * s * s).abs() < 1e-8);
        assert!((m.point.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn odd_atom_levels_pair_up(half in 1usize..8, u in 0.01f64..2.0, v in 0.01f64..2.0) {
        let n = 2 * half + 1;
        let e = spin_levels(n, u, v, n + 1);
        let tol = 1e-10 * e.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        prop_assert!(degeneracy_classes(&e, tol).pairing_ok);
    }

    #[test]
    fn even_atom_ground_state_split(half in 1usize..6, ratio in 0.05f64..0.9) {
        let n = 2 * half;
        let e = spin_levels(n, ratio, 1.0, 2);
        prop_assert!(e[1] - e[0] > 0.0);
    }

    #[test]
    fn surface_bounded_below_by_minimum(
        u in 0.05f64..0.95,
        x in -3.0f64..3.0, y in -3.0f64..3.0,
        theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let p = ModelParams::from_u(6, 1.0, u, 1.0).unwrap();
        let s = p.spin();
        let e = energy_surface(&p, &PhasePoint::new(x, y, theta, phi));
        prop_assert!(e >= -p.v() * s * s - 1e-12);
    }
}
