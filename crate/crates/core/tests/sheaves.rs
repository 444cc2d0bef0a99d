use num_rational::Rational64;
use proptest::prelude::*;

use wittdiv::cech::{
    les_prediction, support_box, vanishing_certificate, witt_cech_h, witt_cech_h_total, CechSolver, Window,
    DEFAULT_BOUND,
};
use wittdiv::divisorial::{admissible_slots, perturbation_invariance, Multidegree};
use wittdiv::maps::finite_level_torsion_probe;
use wittdiv::rings::ExtField;
use wittdiv::teichmuller::{teichmuller_cocycle, TransitionCocycle};
use wittdiv::{Error, RDivisor};

fn f(q: u64) -> ExtField {
    ExtField::new(q).unwrap()
}

fn divisor(dim: usize) -> impl Strategy<Value = RDivisor> {
    prop::collection::vec((-8i64..=8, prop::sample::select(vec![1i64, 2, 3, 4, 6])), dim + 1)
        .prop_map(|c| RDivisor::new(c.into_iter().map(|(n, d)| Rational64::new(n, d)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisor_display_parses_back(d in divisor(2)) {
        prop_assert_eq!(RDivisor::parse(&d.to_string(), 2).unwrap(), d);
    }

    #[test]
    fn slots_are_upward_closed(d in divisor(1), num in -6i64..=6) {
        // a slot admissible at level m stays admissible at every later level
        let e = Multidegree::new(vec![num, -num], 2, 2);
        for chart in [vec![0], vec![1], vec![0, 1]] {
            let slots = admissible_slots(&d, &e, 3, &chart);
            let first = slots.iter().position(|&s| s);
            if let Some(k) = first {
                let ok = slots[k..].iter().zip(0..).all(|(&s, i)| s || e.level_exponent(k + i).is_none());
                prop_assert!(ok, "{:?}", slots);
            }
        }
    }

    #[test]
    fn certificates_never_contradict_brute_force(d in divisor(1), j in 0usize..2, n in 1usize..3) {
        let field = f(2);
        match witt_cech_h_total(&field, j, &d, n, Window::Auto, DEFAULT_BOUND) {
            Ok(rep) => {
                if vanishing_certificate(j, &d, n, 2).holds {
                    prop_assert_eq!(rep.log_p_order, 0);
                }
                if let Some(k) = les_prediction(j, &d, n, &field) {
                    prop_assert_eq!(rep.log_p_order, k);
                }
            }
            Err(Error::EnumerationBoundExceeded { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn linear_equivalence_preserves_cohomology(d in divisor(1), shift in -3i64..=3) {
        let field = f(3);
        let moved = d.add_principal(&[shift, -shift]).unwrap();
        for j in 0..2 {
            let a = witt_cech_h_total(&field, j, &d, 2, Window::Auto, DEFAULT_BOUND).unwrap();
            let b = witt_cech_h_total(&field, j, &moved, 2, Window::Auto, DEFAULT_BOUND).unwrap();
            prop_assert_eq!(a.log_p_order, b.log_p_order);
        }
    }
}

#[test]
fn minus_two_h_piece_by_piece() {
    let d = RDivisor::multiple_of_h(1, -2);
    let one = witt_cech_h(&f(2), 1, &d, 1, &Multidegree::integral(vec![1, -1], 2), DEFAULT_BOUND).unwrap();
    assert_eq!(one.log_p_order, 1);
    let mut solver = CechSolver::new(&f(2), &d, 2, DEFAULT_BOUND).unwrap();
    let total = solver.total(1, Window::Auto).unwrap();
    assert_eq!(total.log_p_order, 4);
    assert_eq!(total.contributions.iter().map(|(_, k)| k).sum::<u64>(), 4);
    assert!(matches!(solver.total(1, Window::Radius(1)), Err(Error::WindowIncomplete(_))));
}

#[test]
fn over_f4_orders_double() {
    let d = RDivisor::multiple_of_h(1, -2);
    let rep = witt_cech_h_total(&f(4), 1, &d, 2, Window::Auto, DEFAULT_BOUND).unwrap();
    assert_eq!(rep.log_p_order, 8);
}

#[test]
fn support_box_and_higher_levels() {
    let (lo, hi) = support_box(&RDivisor::zero(2), 2, 1).unwrap();
    assert!(lo.iter().chain(&hi).all(|x| *x == Rational64::from_integer(0)));
    let minus_h = RDivisor::multiple_of_h(1, -1);
    let rep = witt_cech_h_total(&f(2), 1, &minus_h, 3, Window::Auto, DEFAULT_BOUND).unwrap();
    // levels O(-1), O(-2), O(-4) contribute 0 + 1 + 3
    assert_eq!(rep.log_p_order, 4);
    assert_eq!(les_prediction(1, &minus_h, 3, &f(2)), Some(4));
}

#[test]
fn perturbations_below_resolution_are_invisible() {
    let a = RDivisor::new(vec![Rational64::new(1, 2), Rational64::from_integer(0)]).unwrap();
    let b = RDivisor::new(vec![Rational64::new(5, 9), Rational64::from_integer(0)]).unwrap();
    // floor(2^m / 2) and floor(2^m 5/9) first differ at m = 5
    assert!(perturbation_invariance(&a, &b, 2, 5));
    assert!(!perturbation_invariance(&a, &b, 2, 6));
}

#[test]
fn top_cohomology_has_the_expected_size() {
    let t = finite_level_torsion_probe(&f(3), 1, 2, 2, DEFAULT_BOUND).unwrap();
    assert_eq!(t.log_order, t.expected_log_order);
    assert!(t.frobenius_injective && t.verschiebung_injective && t.fv_vf_is_p);
}

#[test]
fn line_bundle_cocycles_on_p3() {
    for d in [-2, 1, 3] {
        let c = TransitionCocycle::line_bundle(f(2), 3, d);
        let w = teichmuller_cocycle(&c, 2).unwrap();
        assert_eq!(w.level_one()[1][2], *c.get(1, 2));
    }
}
