

use forestmat::{check_condition, Condition, Direction, MeasureSpec, Mode, Tau, Variant};

fn variant_for(c: Condition, lettered: Variant) -> Variant {
    match c {
        Condition::Nonnegativity => Variant::Unpartitioned,
        Condition::Reachability => Variant::Both,
        _ => lettered,
    }
}

#[test]
fn finite_tau_measures_obey_their_conditions() {
    for g in forestmat::corpus::standard() {
        for tau in [0.1, 1.0, 10.0] {
            for (direction, letter) in [(Direction::Out, Variant::A), (Direction::In, Variant::B)] {
                let spec = MeasureSpec { direction, tau: Tau::Finite(tau) };
                for c in Condition::ALL.into_iter().filter(|&c| c != Condition::TriangleInequality) {
                    let r = check_condition(&g.graph, spec, c, variant_for(c, letter), Mode::Strict)
                        .unwrap();
                    assert!(r.passed(), "{} tau={tau} {direction:?} {c}: {:?}", g.name, r.witness);
                }
            }
        }
    }
}

#[test]
fn limiting_measures_obey_nonstrict_forms() {
    for g in forestmat::corpus::standard() {
        for (direction, letter) in [(Direction::Out, Variant::A), (Direction::In, Variant::B)] {
            let spec = MeasureSpec { direction, tau: Tau::Infinite };
            let backward = check_condition(&g.graph, spec, Condition::Reachability, Variant::Backward, Mode::Strict).unwrap();
            assert!(backward.passed(), "{}", g.name);
            for c in [Condition::Nonnegativity, Condition::SelfAccessibility, Condition::TransitProperty, Condition::Monotonicity, Condition::Convexity] {
                let r = check_condition(&g.graph, spec, c, variant_for(c, letter), Mode::Nonstrict).unwrap();
                assert!(r.passed(), "{} {direction:?} {c}: {:?}", g.name, r.witness);
            }
        }
    }
}

/// Arc 1 -> 2 plus an isolated vertex 3 at tau = 10: p_23 - p_13 = 0 while
/// p_22 - p_12 = -9/11, so the unconditional triangle inequality (A) fails.
#[test]
fn unconditional_triangle_inequality_has_a_counterexample() {
    let g = forestmat::load_digraph("3\n1 2").unwrap();
    let spec = MeasureSpec { direction: Direction::Out, tau: Tau::Finite(10.0) };
    let r = check_condition(&g, spec, Condition::TriangleInequality, Variant::A, Mode::Strict).unwrap();
    let w = r.witness.expect("counterexample");
    assert_eq!(w.vertices, vec![2, 1, 0]);
    assert!((w.values[2] - w.values[3] + 9.0 / 11.0).abs() < 1e-12);
}

/// Under the convexity premise p_ki > p_ti the triangle inequality (A) holds.
#[test]
fn triangle_inequality_under_convexity_premise() {
    let mut literal_failures = Vec::new();
    for g in forestmat::corpus::standard() {
        for tau in [Tau::Finite(0.1), Tau::Finite(1.0), Tau::Finite(10.0), Tau::Infinite] {
            let p = forestmat::out_accessibility(&g.graph, tau).unwrap();
            let n = p.n();
            for i in 0..n {
                for k in 0..n {
                    for t in 0..n {
                        let lhs = p.get(k, i) - p.get(t, i);
                        let rhs = p.get(k, k) - p.get(t, k);
                        if lhs > 1e-10 {
                            assert!(lhs <= rhs + 1e-10, "{} {tau} ({i},{k},{t})", g.name);
                        } else if lhs > rhs + 1e-10 {
                            literal_failures.push((g.name.clone(), tau));
                        }
                    }
                }
            }
        }
    }
    assert!(!literal_failures.is_empty());
}
