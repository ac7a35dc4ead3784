mod common;

use binsim::routing::{dijkstra, plan_tour, shortest_path, PathResult, PickupRequest};
use binsim::world::Graph;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dijkstra_matches_floyd_warshall() {
    for seed in 0..1000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, edges) = random_connected(&mut rng, 12);
        let graph = Graph::<u64>::from_edges(n, &edges).unwrap();
        let table = floyd_warshall(n, &edges);
        for (source, row) in table.iter().enumerate() {
            let tree = dijkstra(&graph, source).unwrap();
            assert_eq!(&tree.dist, row, "seed {seed} source {source}");
        }
    }
}

#[test]
fn disconnected_components_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.2) {
                    edges.push((u, v, rng.gen_range(1..=9)));
                }
            }
        }
        let graph = Graph::<u64>::from_edges(n, &edges).unwrap();
        let table = floyd_warshall(n, &edges);
        for (s, row) in table.iter().enumerate() {
            assert_eq!(&dijkstra(&graph, s).unwrap().dist, row);
            for (t, expected) in row.iter().enumerate() {
                match shortest_path(&graph, s, t).unwrap() {
                    PathResult::Found { path, cost } => {
                        assert_eq!(Some(cost), *expected);
                        assert_eq!((path[0], *path.last().unwrap()), (s, t));
                    }
                    PathResult::Unreachable => assert_eq!(*expected, None),
                }
            }
        }
    }
}

#[test]
fn greedy_never_beats_exhaustive_optimum() {
    let mut ratios = Vec::new();
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, edges) = random_connected(&mut rng, 10);
        if n < 2 {
            continue;
        }
        let graph = Graph::<u64>::from_edges(n, &edges).unwrap();
        let table = floyd_warshall(n, &edges);
        let capacity = rng.gen_range(10..=100);
        let count = rng.gen_range(1..=6.min(n));
        let requests: Vec<_> = (0..count)
            .map(|bin| PickupRequest {
                bin,
                vertex: rng.gen_range(0..n),
                load: rng.gen_range(1..=capacity),
            })
            .collect();
        let start = rng.gen_range(0..n);
        let dump = rng.gen_range(0..n);
        let route = plan_tour(&graph, start, &requests, dump, capacity, 0).unwrap();

        let in_order: Vec<_> = route
            .planned_pickups
            .iter()
            .map(|b| *requests.iter().find(|r| r.bin == *b).unwrap())
            .collect();
        assert_eq!(
            tour_length(&table, start, dump, &in_order, capacity, 0),
            route.total_distance
        );
        let optimum = exhaustive_optimum(&table, start, dump, &requests, capacity);
        assert!(route.total_distance >= optimum, "seed {seed}");
        if optimum > 0 {
            ratios.push(route.total_distance as f64 / optimum as f64);
        }
    }
    let worst = ratios.iter().cloned().fold(1.0, f64::max);
    println!(
        "greedy/optimal over {} instances: worst {worst:.3}",
        ratios.len()
    );
}

proptest! {
    #[test]
    fn distances_are_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, edges) = random_connected(&mut rng, 12);
        let graph = Graph::<u64>::from_edges(n, &edges).unwrap();
        let tree = dijkstra(&graph, 0).unwrap();
        for &(u, v, w) in &edges {
            let (du, dv) = (tree.dist[u].unwrap(), tree.dist[v].unwrap());
            prop_assert!(dv <= du + w && du <= dv + w);
        }
        for v in 1..n {
            let p = tree.prev[v].unwrap();
            prop_assert_eq!(tree.dist[v], Some(tree.dist[p].unwrap() + graph.weight(p, v).unwrap()));
        }
        prop_assert_eq!(dijkstra(&graph, 0).unwrap(), tree);
    }

    #[test]
    fn tours_respect_capacity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, edges) = random_connected(&mut rng, 12);
        let graph = Graph::<u64>::from_edges(n, &edges).unwrap();
        let capacity = rng.gen_range(1..=100);
        let initial = rng.gen_range(0..=capacity);
        let count = rng.gen_range(1..=10);
        let requests: Vec<_> = (0..count)
            .map(|bin| PickupRequest { bin: bin * 3, vertex: rng.gen_range(0..n), load: rng.gen_range(0..=capacity) })
            .collect();
        let start = rng.gen_range(0..n);
        let dump = rng.gen_range(0..n);
        let route = plan_tour(&graph, start, &requests, dump, capacity, initial).unwrap();
        prop_assert!(max_projected_load(&route, &requests, initial) <= capacity);
        let mut picked = pickups(&route);
        prop_assert_eq!(&picked, &route.planned_pickups);
        picked.sort();
        prop_assert_eq!(picked, requests.iter().map(|r| r.bin).collect::<Vec<_>>());
        prop_assert!(legs_are_walks(&graph, &route));
        prop_assert_eq!(route.stops[0].vertex, start);
        prop_assert_eq!(plan_tour(&graph, start, &requests, dump, capacity, initial).unwrap(), route);
    }
}
