//! Randomized checks of the pure building blocks against brute-force oracles.

use proptest::prelude::*;
use tollforge_core::cost::beckmann_potential;
use tollforge_core::paths::shortest_paths;
use tollforge_core::{project_topk, supp_count, Link, Network};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest `||u - z||^2` over every support of size at most `kappa`.
fn enumerated_projection_distance(z: &[f64], kappa: usize) -> f64 {
    let m = z.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize > kappa {
            continue;
        }
        let d: f64 = (0..m)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| z[i] * z[i])
            .sum();
        best = best.min(d);
    }
    best
}

fn vector_and_kappa() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (1usize..=12).prop_flat_map(|m| {
        let entry = prop_oneof![
            3 => -10.0f64..10.0,
            1 => Just(0.0),
            1 => (-3i32..=3).prop_map(f64::from),
        ];
        (proptest::collection::vec(entry, m), 0..=m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_matches_enumeration((z, kappa) in vector_and_kappa()) {
        let u = project_topk(&z, kappa).unwrap();
        prop_assert!(supp_count(&u) <= kappa);
        for (ui, zi) in u.iter().zip(&z) {
            prop_assert!(*ui == 0.0 || ui == zi);
        }
        let best = enumerated_projection_distance(&z, kappa);
        prop_assert!((dist2(&u, &z) - best).abs() <= 1e-12 * best.max(1.0));
    }
}

fn random_network() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..=9).prop_flat_map(|n| {
        let arc = (0..n, 0..n, 0.0f64..20.0);
        (Just(n), proptest::collection::vec(arc, 1..40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dijkstra_matches_bellman_ford((n, arcs) in random_network(), origin in 0usize..9) {
        let origin = origin % n;
        let arcs: Vec<_> = arcs.into_iter().filter(|(t, h, _)| t != h).collect();
        prop_assume!(!arcs.is_empty());
        let links: Vec<Link> = arcs.iter().map(|&(t, h, _)| Link::bpr(t, h, 1.0, 1.0)).collect();
        let cost: Vec<f64> = arcs.iter().map(|a| a.2).collect();
        let net = Network::new(n, 0, links).unwrap();
        let got = shortest_paths(&net, &cost, origin).unwrap();

        let mut dist = vec![f64::INFINITY; n];
        dist[origin] = 0.0;
        for _ in 0..n {
            for (a, &(t, h, _)) in arcs.iter().enumerate() {
                if dist[t] + cost[a] < dist[h] {
                    dist[h] = dist[t] + cost[a];
                }
            }
        }
        for v in 0..n {
            let (d, pred) = got[v];
            if dist[v].is_infinite() {
                prop_assert!(d.is_infinite());
            } else {
                prop_assert!((d - dist[v]).abs() <= 1e-9 * dist[v].max(1.0));
                if v != origin {
                    // the predecessor link closes a shortest path
                    let (t, h, _) = arcs[pred];
                    prop_assert_eq!(h, v);
                    prop_assert!((dist[t] + cost[pred] - dist[v]).abs() <= 1e-9 * dist[v].max(1.0));
                }
            }
        }
    }

    #[test]
    fn beckmann_matches_quadrature(
        cap in 1.0f64..500.0,
        t0 in 0.1f64..10.0,
        b in 0.0f64..2.0,
        power in (1u8..=6).prop_map(f64::from),
        v in 0.0f64..800.0,
        toll in 0.0f64..5.0,
    ) {
        let link = Link { tail: 0, head: 1, capacity: cap, free_flow_time: t0, b, power };
        let net = Network::new(2, 0, vec![link]).unwrap();
        // composite Simpson on t(x) + toll over [0, v]
        let n = 2000;
        let h = v / n as f64;
        let f = |x: f64| t0 * (1.0 + b * (x / cap).powf(power)) + toll;
        let mut s = f(0.0) + f(v);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let quad = s * h / 3.0;
        let got = beckmann_potential(&net, &[toll], &[v]).unwrap();
        prop_assert!((got - quad).abs() <= 1e-7 * quad.abs().max(1.0), "{} vs {}", got, quad);
    }
}
