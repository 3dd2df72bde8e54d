//! Exactness of the triangle and interval rules.

use proptest::prelude::*;
use vvp::quadrature::{interval_rule, triangle_rule, MAX_DEGREE};

/// Exact integral of `x^a y^b` over the reference triangle: `a! b! / (a + b + 2)!`.
fn monomial_integral(a: u32, b: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(a) * fact(b) / fact(a + b + 2)
}

fn triangle_monomial(degree: usize, a: u32, b: u32) -> f64 {
    let rule = triangle_rule(degree).unwrap();
    rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum()
}

proptest! {
    #[test]
    fn triangle_rules_integrate_monomials_exactly(
        (degree, a, b) in (1usize..=MAX_DEGREE)
            .prop_flat_map(|d| (Just(d), 0..=d as u32))
            .prop_flat_map(|(d, a)| (Just(d), Just(a), 0..=(d as u32 - a)))
    ) {
        let exact = monomial_integral(a, b);
        let got = triangle_monomial(degree, a, b);
        prop_assert!((got - exact).abs() <= 1e-13 * exact.max(1e-3), "degree {} x^{} y^{}: {} vs {}", degree, a, b, got, exact);
    }

    #[test]
    fn interval_rules_integrate_monomials_exactly((degree, a) in (1usize..=MAX_DEGREE).prop_flat_map(|d| (Just(d), 0..=d as u32))) {
        let rule = interval_rule(degree).unwrap();
        let got: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a as i32)).sum();
        prop_assert!((got - 1.0 / f64::from(a + 1)).abs() <= 1e-13);
    }
}

#[test]
fn every_rule_has_positive_weights_and_interior_points() {
    for d in 1..=MAX_DEGREE {
        let t = triangle_rule(d).unwrap();
        assert!(t.weights.iter().all(|w| *w > 0.0));
        assert!(t.points.iter().all(|p| p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0));
        assert!((t.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        let i = interval_rule(d).unwrap();
        assert!(i.points.iter().all(|p| p[0] > 0.0 && p[0] < 1.0));
        assert!((i.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn low_degree_examples() {
    assert!((triangle_monomial(2, 2, 0) - 1.0 / 12.0).abs() < 1e-15);
    assert!((triangle_monomial(2, 1, 1) - 1.0 / 24.0).abs() < 1e-15);
    assert!((triangle_monomial(6, 3, 3) - 1.0 / 1120.0).abs() < 1e-16);
}

#[test]
fn rules_are_not_exact_beyond_their_degree() {
    // a rule claiming too much would hide under-integration of the forms
    let d = 4;
    let err = (triangle_monomial(d, d as u32 + 2, 0) - monomial_integral(d as u32 + 2, 0)).abs();
    assert!(err > 1e-8, "{err:e}");
}

#[test]
fn out_of_range_degrees_are_rejected() {
    assert!(triangle_rule(0).is_err());
    assert!(triangle_rule(MAX_DEGREE + 1).is_err());
    assert!(interval_rule(0).is_err());
    assert!(interval_rule(MAX_DEGREE + 1).is_err());
}
