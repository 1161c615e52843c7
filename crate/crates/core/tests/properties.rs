use biharmonic_core::classification::{bubble_eval, matched_bubble_residual};
use biharmonic_core::expr::Expr;
use biharmonic_core::geometry::{
    conformal_map, distance_identity_residual, BallPoint, BubbleParams,
};
use biharmonic_core::green::{green_value, is_ordered, ordering_check, GreenSpec, OperatorPair};
use biharmonic_core::kernels::half_space_kernel;
use biharmonic_core::ode::{Normalization, OdeParams};
use biharmonic_core::{Dimension, Model};
use proptest::prelude::*;

fn dim() -> impl Strategy<Value = usize> {
    prop_oneof![Just(4usize), Just(5), Just(7)]
}

/// A point of the open half-space in `R^{n+1}` with `t` in `[t_lo, 3]`.
fn half_point(n: usize, t_lo: f64) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-3.0..3.0f64, n), t_lo..3.0f64).prop_map(|(mut x, t)| {
        x.push(t);
        x
    })
}

/// A point of the open unit ball in `R^{n+1}` of radius at most `r_max`.
fn ball_point(n: usize, r_max: f64) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0..1.0f64, n + 1), 0.0..r_max).prop_map(|(v, r)| {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-3);
        v.iter().map(|c| c / norm * r).collect()
    })
}

fn pair_index() -> impl Strategy<Value = usize> {
    0usize..4
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conformal_map_is_an_involution((n, p) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.01)))) {
        let xi = conformal_map(&p).unwrap();
        prop_assert!(xi.iter().map(|c| c * c).sum::<f64>() < 1.0);
        let back = conformal_map(&xi).unwrap();
        for (a, b) in p.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()), "n={n} {a} {b}");
        }
    }

    #[test]
    fn ball_distance_identities_hold((xi, eta) in dim().prop_flat_map(|n| (ball_point(n, 0.99), ball_point(n, 0.99)))) {
        prop_assume!(xi.iter().map(|c| c * c).sum::<f64>() > 1e-4);
        let r = distance_identity_residual(&BallPoint::new(&xi).unwrap(), &BallPoint::new(&eta).unwrap()).unwrap();
        prop_assert!(r.max() < 1e-10, "{r:?}");
    }

    #[test]
    fn half_space_green_is_symmetric(
        (n, p, q) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.01), half_point(n, 0.01))),
        k in pair_index(),
    ) {
        let spec = GreenSpec::new(OperatorPair::all()[k], Model::HalfSpace, Dimension::new(n).unwrap());
        let a = green_value(&spec, &p, &q).unwrap();
        let b = green_value(&spec, &q, &p).unwrap();
        prop_assert!(close(a, b, 1e-13), "{a} {b}");
    }

    #[test]
    fn ball_green_is_symmetric(
        (n, p, q) in dim().prop_flat_map(|n| (Just(n), ball_point(n, 0.99), ball_point(n, 0.99))),
        k in pair_index(),
    ) {
        let spec = GreenSpec::new(OperatorPair::all()[k], Model::Ball, Dimension::new(n).unwrap());
        let a = green_value(&spec, &p, &q).unwrap();
        let b = green_value(&spec, &q, &p).unwrap();
        prop_assert!(close(a, b, 1e-12), "{a} {b}");
    }

    #[test]
    fn green_functions_are_strictly_ordered_inside(
        (n, p, q) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.05), half_point(n, 0.05))),
    ) {
        let dim = Dimension::new(n).unwrap();
        let g = ordering_check(Model::HalfSpace, dim, &p, &q).unwrap();
        prop_assert!(is_ordered(&g, 0.0, true), "{g:?}");
    }

    #[test]
    fn dirichlet_type_green_functions_vanish_on_the_boundary(
        (n, mut p, q) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.01), half_point(n, 0.01))),
    ) {
        *p.last_mut().unwrap() = 0.0;
        let dim = Dimension::new(n).unwrap();
        for pair in [OperatorPair::new(0, 1).unwrap(), OperatorPair::new(0, 2).unwrap()] {
            let g = green_value(&GreenSpec::new(pair, Model::HalfSpace, dim), &p, &q).unwrap();
            prop_assert_eq!(g, 0.0);
        }
        let g = ordering_check(Model::HalfSpace, dim, &p, &q).unwrap();
        prop_assert!(close(g[2], g[3], 1e-13), "{g:?}");
    }

    #[test]
    fn poisson_kernels_are_homogeneous(
        n in dim(),
        k in 0usize..4,
        t in 0.05..3.0f64,
        s in 0.0..9.0f64,
        lambda in 0.2..5.0f64,
    ) {
        let dim = Dimension::new(n).unwrap();
        let a = half_space_kernel(k, dim, lambda * t, lambda * lambda * s, 0.0);
        let b = half_space_kernel(k, dim, t, s, 0.0) * lambda.powf(k as f64 - n as f64);
        prop_assert!(close(a, b, 1e-12), "{a} {b}");
    }

    #[test]
    fn bubbles_are_positive_and_match_across_models(
        (n, p) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.0))),
        eps in 0.2..3.0f64,
        x0 in prop::collection::vec(-1.0..1.0f64, 7),
    ) {
        let params = BubbleParams::half_space(&x0[..n], eps).unwrap();
        prop_assert!(bubble_eval(&params, &p).unwrap() > 0.0);
        prop_assert!(matched_bubble_residual(&params, &p).unwrap() < 1e-11);
    }

    #[test]
    fn bubble_scales_with_its_width(
        (n, p) in dim().prop_flat_map(|n| (Just(n), half_point(n, 0.0))),
        eps in 0.2..3.0f64,
    ) {
        // U_{0,ε}(εX) = ε^{-(n-3)/2} U_{0,1}(X)
        let zero = vec![0.0; n];
        let scaled: Vec<f64> = p.iter().map(|c| c * eps).collect();
        let a = bubble_eval(&BubbleParams::half_space(&zero, eps).unwrap(), &scaled).unwrap();
        let b = bubble_eval(&BubbleParams::half_space(&zero, 1.0).unwrap(), &p).unwrap();
        prop_assert!(close(a, b * eps.powf(-(n as f64 - 3.0) / 2.0), 1e-12), "{a} {b}");
    }

    #[test]
    fn canonical_form_preserves_values(
        c in -3.0..3.0f64,
        alpha in 0u32..4,
        gamma in -4.0..1.0f64,
        beta in 0u32..4,
        t in 0.1..2.0f64,
        s in 0.0..4.0f64,
    ) {
        let e = Expr::monomial(5, c, alpha, gamma, beta);
        let direct = c * t.powi(alpha as i32) * (t * t + s).powf(gamma) * s.powi(beta as i32);
        let tol = 1e-12 * e.magnitude(t, s).max(direct.abs()).max(1e-300);
        prop_assert!((e.eval(t, s) - direct).abs() <= tol, "{} {}", e.eval(t, s), direct);
    }

    #[test]
    fn expression_sums_evaluate_termwise(
        c1 in -3.0..3.0f64,
        c2 in -3.0..3.0f64,
        g1 in -3.0..0.0f64,
        b2 in 0u32..3,
        t in 0.1..2.0f64,
        s in 0.0..4.0f64,
    ) {
        let a = Expr::monomial(4, c1, 1, g1, 0);
        let b = Expr::monomial(4, c2, 0, -1.5, b2);
        let sum = a.add(&b);
        let tol = 1e-12 * sum.magnitude(t, s).max(1e-300);
        prop_assert!((sum.eval(t, s) - a.eval(t, s) - b.eval(t, s)).abs() <= tol);
        let twice = a.scale(2.0);
        prop_assert!(close(twice.eval(t, s), 2.0 * a.eval(t, s), 1e-14));
    }

    #[test]
    fn ode_fixed_point_is_stationary(n in 4usize..9) {
        for norm in [Normalization::Unit, Normalization::Geometric] {
            let p = OdeParams::new(n, norm).unwrap();
            let v = p.fixed_point();
            let f = p.rhs(&[v, 0.0, 0.0, 0.0]);
            prop_assert!(f.iter().all(|c| c.abs() <= 1e-12 * (1.0 + v.abs())), "{f:?}");
        }
    }
}
