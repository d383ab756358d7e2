use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use pst_core::graph::Graph;
use pst_core::scheme::{mod4_condition, pst_test};
use pst_core::{WalkSystemF32, WalkSystemF64};

fn eigensystem() -> impl Strategy<Value = (i64, Vec<(i64, i64)>)> {
    (
        -20i64..60,
        prop::collection::vec((-40i64..40, prop::bool::ANY), 1..8),
    )
        .prop_map(|(theta0, rest)| {
            let mut sys = vec![(theta0, 1)];
            sys.extend(
                rest.into_iter()
                    .filter(|&(t, _)| t != theta0)
                    .map(|(t, plus)| (t, if plus { 1 } else { -1 })),
            );
            (theta0, sys)
        })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::ANY, n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges)
        })
    })
}

proptest! {
    /// The verdict is the statement that all phases s_j e^{-iθ_j τ} agree at τ = π/g.
    #[test]
    fn pst_verdict_is_phase_alignment((theta0, sys) in eigensystem(), weights in prop::collection::vec(0.1f64..1.0, 8)) {
        let v = pst_test(&sys, theta0);
        prop_assume!(v.g > 0);
        let total: f64 = weights.iter().take(sys.len()).sum();
        let amp: Complex64 = sys
            .iter()
            .zip(&weights)
            .map(|(&(t, s), &w)| Complex64::from_polar(w * s as f64, -(t as f64) * v.tau))
            .sum();
        let has_minus = sys.iter().any(|&(_, s)| s < 0);
        prop_assert_eq!(v.pst, has_minus && (amp.norm() - total).abs() < 1e-9);
    }

    #[test]
    fn pst_verdict_is_affine_invariant((theta0, sys) in eigensystem(), shift in -50i64..50, scale in 1i64..6) {
        let moved: Vec<(i64, i64)> = sys.iter().map(|&(t, s)| (scale * t + shift, s)).collect();
        let a = pst_test(&sys, theta0);
        let b = pst_test(&moved, scale * theta0 + shift);
        prop_assert_eq!(a.pst, b.pst);
        prop_assert_eq!(b.g, scale * a.g);
    }

    #[test]
    fn mod4_with_a_minus_sign_gives_pst((theta0, sys) in eigensystem()) {
        let a = theta0.rem_euclid(4);
        if mod4_condition(&sys, a) && sys.iter().any(|&(_, s)| s < 0) {
            let v = pst_test(&sys, theta0);
            prop_assert!(v.pst);
            prop_assert_eq!(v.g % 4, 2);
        }
    }

    #[test]
    fn walks_are_unitary_and_symmetric(g in graph(9), t in 0.0f64..10.0) {
        let ws = WalkSystemF64::from_graph(&g).unwrap();
        prop_assert!(ws.reconstruction_error() < 1e-10);
        prop_assert!(ws.unitarity_error(t) < 1e-10);
        let u = ws.evolve(t);
        for a in 0..g.n() {
            for b in 0..g.n() {
                prop_assert!((u[(a, b)] - u[(b, a)]).norm() < 1e-10);
                prop_assert!((ws.amplitude(a, b, t) - u[(b, a)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn f32_walks_track_f64(g in graph(7), t in 0.0f64..3.0) {
        let hi = WalkSystemF64::from_graph(&g).unwrap();
        let lo = WalkSystemF32::from_graph(&g).unwrap();
        for a in 0..g.n() {
            let d = (hi.fidelity(a, 0, t).fidelity - lo.fidelity(a, 0, t).fidelity).abs();
            prop_assert!(d < 1e-3);
        }
    }

    /// Walks on disjoint K2 copies swap every pair at π/2, whatever the pairing.
    #[test]
    fn perfect_matchings_swap_at_half_pi(perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let edges: Vec<(usize, usize)> = perm.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        let ws = WalkSystemF64::from_graph(&Graph::from_edges(12, &edges)).unwrap();
        for &(u, v) in &edges {
            prop_assert!(1.0 - ws.fidelity(u, v, PI / 2.0).fidelity < 1e-9);
        }
    }
}
