use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use super::*;

/// Independent Möbius oracle: `g_α ↔ [[α, 0], [α−1, 1]]` acting by
/// `x ↦ (ax + b)/(cx + d)`.
type Mat = [[f64; 2]; 2];

fn mobius_matrix(alpha: f64) -> Mat {
    [[alpha, 0.0], [alpha - 1.0, 1.0]]
}

fn mat_mul(p: Mat, q: Mat) -> Mat {
    [
        [p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]],
        [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]],
    ]
}

fn mat_apply(m: Mat, x: f64) -> f64 {
    (m[0][0] * x + m[0][1]) / (m[1][0] * x + m[1][1])
}

fn mob(a: f64) -> DiffeoExpr {
    DiffeoExpr::mobius(a).unwrap()
}

#[test]
fn mobius_endpoints_and_midpoint() {
    for a in [0.5, 1.3, 2.0, 3.1] {
        assert_eq!(mob(a).evaluate(0.0).unwrap(), 0.0);
        assert!((mob(a).evaluate(1.0).unwrap() - 1.0).abs() < 1e-15);
    }
    assert!((mob(2.0).evaluate(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-16);
}

#[test]
fn derivative_examples() {
    let id = DiffeoExpr::identity(Manifold::Interval);
    assert_eq!(id.derivative(0.3).unwrap(), 1.0);
    assert!((mob(2.0).derivative(0.0).unwrap() - 2.0).abs() < 1e-15);
    // Closed form α/((α−1)x+1)² against the chain rule through an inverse.
    let e = mob(2.5).inverse();
    let x = 0.4;
    let pre = mob(0.4).evaluate(x).unwrap();
    let expected = 0.4 / ((0.4 - 1.0) * x + 1.0f64).powi(2);
    assert!((e.derivative(x).unwrap() - expected).abs() < 1e-14);
    assert!((e.evaluate(x).unwrap() - pre).abs() < 1e-15);
}

#[test]
fn derivative_matches_finite_differences() {
    let f = DiffeoExpr::perturbed(
        Manifold::Interval,
        vec![Bump::Poly(BumpPoly { coeff: 0.1, stage: 1, k: 1, tail: vec![1.0, 0.3] })],
    )
    .unwrap();
    let e = DiffeoExpr::compose(&[mob(2.0), f.inverse(), mob(1.7), f.clone()]).unwrap();
    let h = 1e-6;
    for i in 1..50 {
        let x = i as f64 / 50.0;
        let fd = (e.evaluate(x + h).unwrap() - e.evaluate(x - h).unwrap()) / (2.0 * h);
        assert!((fd - e.derivative(x).unwrap()).abs() < 1e-7, "x = {x}");
    }
}

#[test]
fn domain_violations() {
    assert!(matches!(mob(2.0).evaluate(1.5), Err(DiffeoError::Domain { .. })));
    assert!(mob(2.0).evaluate(f64::NAN).is_err());
    let r = DiffeoExpr::rotation(1.0).unwrap();
    assert!(r.evaluate(f64::INFINITY).is_err());
}

#[test]
fn constructors_enforce_tags_and_parameters() {
    assert!(DiffeoExpr::mobius(0.0).is_err());
    assert!(DiffeoExpr::mobius(f64::NAN).is_err());
    assert!(DiffeoExpr::sine_shear(0.0).is_err());
    assert!(DiffeoExpr::sine_shear(2.5).is_err());
    assert!(DiffeoExpr::sine_shear(2.0).is_ok());
    let r = DiffeoExpr::rotation(1.0).unwrap();
    assert!(matches!(
        DiffeoExpr::compose(&[mob(2.0), r.clone()]),
        Err(DiffeoError::TagMismatch { .. })
    ));
    assert!(DiffeoExpr::new(Manifold::Circle, Node::Mobius { alpha: 2.0 }).is_err());
    assert!(mob(2.0).pow(MAX_POWER + 1).is_err());
    // Too steep: the derivative bound sums past one.
    let steep = Bump::Poly(BumpPoly { coeff: 1.2, stage: 1, k: 1, tail: vec![1.0] });
    assert!(DiffeoExpr::perturbed(Manifold::Interval, vec![steep]).is_err());
    let wrong_shape = Bump::Trig(TrigBump { coeff: 0.01, stage: 1, freq: 1, phase: 0.0 });
    assert!(DiffeoExpr::perturbed(Manifold::Interval, vec![wrong_shape]).is_err());
}

#[test]
fn commutator_examples() {
    assert!(commutator_residual(&mob(1.7), &mob(2.9), DEFAULT_GRID).unwrap() < 1e-12);
    for a in [0.5, 1.0, 1.5, 2.0, -1.0] {
        let f = DiffeoExpr::sine_shear(a).unwrap();
        let g = DiffeoExpr::translation(TAU / a).unwrap();
        assert!(commutator_residual(&f, &g, DEFAULT_GRID).unwrap() < 1e-12, "a = {a}");
    }
    let r1 = DiffeoExpr::rotation(1.1).unwrap();
    let r2 = DiffeoExpr::rotation(2.3).unwrap();
    assert_eq!(commutator_residual(&r1, &r2, DEFAULT_GRID).unwrap(), 0.0);
    let t1 = DiffeoExpr::translation(TAU).unwrap();
    let t2 = DiffeoExpr::translation(PI).unwrap();
    assert_eq!(commutator_residual(&t1, &t2, DEFAULT_GRID).unwrap(), 0.0);
}

#[test]
fn noncommuting_pair_has_large_residual() {
    let f = DiffeoExpr::sine_shear(1.0).unwrap();
    let g = DiffeoExpr::sine_shear(2.0).unwrap();
    assert!(commutator_residual(&f, &g, 2048).unwrap() > 1e-3);
}

#[test]
fn fixed_points_of_mobius() {
    let s = fixed_points(&mob(2.0), DEFAULT_GRID, 1e-12).unwrap();
    assert!(!s.degenerate);
    assert_eq!(s.xs(), vec![0.0, 1.0]);
    assert!(s.points.iter().all(|p| p.kind == FixedPointKind::Transverse));
    // g_2 moves every interior point to the right.
    assert_eq!(s.gap_signs, vec![0, 1, 0]);
}

#[test]
fn fixed_points_of_identity_are_flagged_everywhere() {
    let s = fixed_points(&DiffeoExpr::identity(Manifold::Interval), 64, 1e-12).unwrap();
    assert!(s.degenerate);
    assert_eq!(s.points.len(), 65);
    assert!(s.points.iter().all(|p| p.kind == FixedPointKind::TangencySuspect));
}

#[test]
fn identity_in_disguise_is_degenerate() {
    // Symbolically g_2 ∘ g_2⁻¹ is the identity matrix.
    let m = mat_mul(mobius_matrix(2.0), [[1.0, 0.0], [-1.0, 2.0]]);
    assert_eq!(m, [[2.0, 0.0], [0.0, 2.0]]);
    let e = DiffeoExpr::compose(&[mob(2.0), mob(2.0).inverse()]).unwrap();
    let s = fixed_points(&e, 256, 1e-12).unwrap();
    assert!(s.degenerate);
    let xs = s.xs();
    assert!(xs.contains(&0.0) && xs.contains(&1.0));
    assert!(s.points.iter().all(|p| p.kind == FixedPointKind::TangencySuspect));
}

#[test]
fn interior_fixed_point_is_found_by_bisection() {
    // Conjugating g_2 by a bump keeps {0,1}; composing g_2 with g_{1/2}
    // distorted by a perturbation creates interior crossings.
    let f = DiffeoExpr::perturbed(
        Manifold::Interval,
        vec![Bump::Poly(BumpPoly { coeff: 0.2, stage: 1, k: 1, tail: vec![1.0, -2.0] })],
    )
    .unwrap();
    // f − id = 0.2 x(1−x)(1−2x) vanishes at 1/2.
    let s = fixed_points(&f, 100, 1e-13).unwrap();
    let xs = s.xs();
    assert_eq!(xs.len(), 3);
    assert!((xs[1] - 0.5).abs() < 1e-12);
    assert_eq!(s.gap_signs, vec![0, 1, -1, 0]);
    for p in &s.points {
        assert!(p.residual < s.residual_tol);
    }
}

#[test]
fn circle_fixed_points() {
    let f = DiffeoExpr::perturbed(
        Manifold::Circle,
        vec![Bump::Trig(TrigBump { coeff: 0.05, stage: 1, freq: 1, phase: 0.0 })],
    )
    .unwrap();
    // sin(2πx) vanishes at 0 and 1/2 on the circle.
    let s = fixed_points(&f, 128, 1e-13).unwrap();
    let xs = s.xs();
    assert_eq!(xs.len(), 2, "{xs:?}");
    assert!(xs[0].abs() < 1e-12 && (xs[1] - 0.5).abs() < 1e-12);
    assert_eq!(s.gap_signs.len(), 2);
    // A rotation has no fixed points.
    let r = DiffeoExpr::rotation(1.0).unwrap();
    assert!(fixed_points(&r, 128, 1e-12).unwrap().points.is_empty());
}

#[test]
fn commuting_mobius_maps_share_fixed_points() {
    let a = fixed_points(&mob(1.5), DEFAULT_GRID, 1e-12).unwrap();
    let b = fixed_points(&mob(2.7), DEFAULT_GRID, 1e-12).unwrap();
    assert!(commutator_residual(&mob(1.5), &mob(2.7), DEFAULT_GRID).unwrap() < 1e-12);
    assert!(a.agrees_with(&b, 1e-12));
}

#[test]
fn word_evaluation() {
    let names = vec!["g1".to_string(), "g2".to_string()];
    let asg = Assignment::new(vec![(names[0].clone(), mob(1.9)), (names[1].clone(), mob(2.4))]).unwrap();
    let empty = Word::default();
    assert_eq!(word_evaluate(&empty, &asg, 0.37).unwrap(), 0.37);
    let w = Word::parse("g1 g2 g1^-1 g2^-1", &names).unwrap();
    assert_eq!(w.display(&names).to_string(), "g1 g2 g1^-1 g2^-1");
    assert!((word_evaluate(&w, &asg, 0.5).unwrap() - 0.5).abs() < 1e-12);
    // Right-to-left: g1 g2 (x) = g1(g2(x)) = g_{α₁α₂}(x) by the matrix oracle.
    let v = Word::parse("g1 g2", &names).unwrap();
    let oracle = mat_apply(mat_mul(mobius_matrix(1.9), mobius_matrix(2.4)), 0.3);
    assert!((word_evaluate(&v, &asg, 0.3).unwrap() - oracle).abs() < 1e-15);
    assert!(matches!(Word::parse("g3", &names), Err(DiffeoError::Unassigned(_))));
    let r = DiffeoExpr::rotation(1.0).unwrap();
    assert!(Assignment::new(vec![("a".into(), mob(2.0)), ("b".into(), r)]).is_err());
}

#[test]
fn json_and_text_round_trip() {
    let f = DiffeoExpr::perturbed(
        Manifold::Interval,
        vec![Bump::Poly(BumpPoly { coeff: 0.0312, stage: 1, k: 1, tail: vec![1.0, -0.25, 0.125] })],
    )
    .unwrap();
    let e = DiffeoExpr::compose(&[f.clone(), mob(2.0).pow(3).unwrap(), f.inverse()]).unwrap();
    let json = e.to_json();
    assert!(json.starts_with("{\"manifold\":\"I\""));
    assert_eq!(DiffeoExpr::from_json(&json).unwrap(), e);
    let text = e.to_string();
    assert_eq!(DiffeoExpr::parse(&text).unwrap(), e);
}

#[test]
fn text_parser_errors_carry_positions() {
    let err = DiffeoExpr::parse("compose(mobius(2), rot(1))").unwrap_err();
    assert!(err.message.contains("mismatch"), "{err}");
    assert!(DiffeoExpr::parse("mobius(2").is_err());
    assert!(DiffeoExpr::parse("mobius(2) x").is_err());
    assert!(DiffeoExpr::parse("banana(1)").is_err());
    assert!(DiffeoExpr::parse("pow(mobius(2), 99999)").is_err());
    let deep = "inv(".repeat(400) + "mobius(2)" + &")".repeat(400);
    assert!(DiffeoExpr::parse(&deep).is_err());
}

#[test]
fn json_rejects_invalid_trees() {
    let bad = r#"{"manifold":"S1","expr":{"kind":"mobius","alpha":"2"}}"#;
    assert!(DiffeoExpr::from_json(bad).is_err());
    let bad = r#"{"manifold":"I","expr":{"kind":"compose","parts":[]}}"#;
    assert!(DiffeoExpr::from_json(bad).is_err());
}

#[test]
fn oversized_power_towers_are_refused() {
    let e = DiffeoExpr::parse("pow(pow(pow(mobius(2), 4096), 4096), 4096)").unwrap();
    assert!(matches!(e.evaluate(0.5), Err(DiffeoError::TooLarge { .. })));
}

#[test]
fn sine_shear_inverse_at_critical_points() {
    // f_2 has f' = 0 at π/2; inversion must still converge.
    let f = DiffeoExpr::sine_shear(2.0).unwrap();
    let y = f.evaluate(PI / 2.0).unwrap();
    let x = f.inverse().evaluate(y).unwrap();
    assert!((x - PI / 2.0).abs() < 1e-5);
    assert!((f.evaluate(x).unwrap() - y).abs() < 1e-13);
}

fn alpha() -> impl Strategy<Value = f64> {
    1.0 + 1e-6..PI
}

proptest! {
    #[test]
    fn mobius_group_law(a in alpha(), b in alpha()) {
        let lhs = DiffeoExpr::compose(&[mob(a), mob(b)]).unwrap().compile().unwrap().eval_lift(0.0).unwrap();
        prop_assert_eq!(lhs, 0.0);
        let comp = DiffeoExpr::compose(&[mob(a), mob(b)]).unwrap();
        let prod = mob(a * b);
        let oracle = mat_mul(mobius_matrix(a), mobius_matrix(b));
        for x in Grid::unit(1024).points() {
            let v = comp.evaluate(x).unwrap();
            prop_assert!((v - prod.evaluate(x).unwrap()).abs() < 1e-12);
            prop_assert!((v - mat_apply(oracle, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints_fixed_and_monotone(a in alpha(), b in alpha(), k in -3i64..4, c in -0.05f64..0.05) {
        let f = DiffeoExpr::perturbed(
            Manifold::Interval,
            vec![Bump::Poly(BumpPoly { coeff: c, stage: 1, k: 1, tail: vec![1.0, 0.5] })],
        ).unwrap();
        let e = DiffeoExpr::compose(&[mob(a), f.pow(k).unwrap(), mob(b).inverse(), f]).unwrap();
        prop_assert!(e.evaluate(0.0).unwrap().abs() < 1e-14);
        prop_assert!((e.evaluate(1.0).unwrap() - 1.0).abs() < 1e-14);
        for x in Grid::unit(128).points() {
            prop_assert!(e.derivative(x).unwrap() > 0.0);
            let y = e.evaluate(x).unwrap();
            prop_assert!((e.inverse().evaluate(y).unwrap() - x).abs() < 1e-10);
        }
    }

    #[test]
    fn shear_commutes_with_period_translation(a in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0], b in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0]) {
        let f = DiffeoExpr::sine_shear(a).unwrap();
        let ga = DiffeoExpr::translation(TAU / a).unwrap();
        let gb = DiffeoExpr::translation(TAU / b).unwrap();
        prop_assert!(commutator_residual(&f, &ga, 256).unwrap() < 1e-12);
        prop_assert_eq!(commutator_residual(&ga, &gb, 256).unwrap(), 0.0);
    }

    #[test]
    fn circle_inversion_consistency(theta in -10.0f64..10.0, c in -0.1f64..0.1, phase in 0.0f64..6.0) {
        let f = DiffeoExpr::perturbed(
            Manifold::Circle,
            vec![Bump::Trig(TrigBump { coeff: c, stage: 1, freq: 1, phase })],
        ).unwrap();
        let e = DiffeoExpr::compose(&[f.clone(), DiffeoExpr::rotation(theta).unwrap(), f.inverse()]).unwrap();
        for x in Grid::circle(64).points() {
            prop_assert!(e.derivative(x).unwrap() > 0.0);
            let y = e.evaluate(x).unwrap();
            prop_assert!((0.0..1.0).contains(&y));
            let back = e.inverse().evaluate(y).unwrap();
            prop_assert!(Manifold::Circle.displacement(x, back).abs() < 1e-10);
        }
    }
}
