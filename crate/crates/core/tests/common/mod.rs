#![allow(dead_code)]

use binsim::bins::BinState;
use binsim::routing::{PickupRequest, Route, StopAction};
use binsim::world::{Graph, VertexId};
use rand::Rng;

/// All-pairs shortest distances by Floyd–Warshall; `None` = unreachable.
pub fn floyd_warshall(n: usize, edges: &[(VertexId, VertexId, u64)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(u, v, w) in edges {
        for (a, b) in [(u, v), (v, u)] {
            if d[a][b].is_none_or(|cur| w < cur) {
                d[a][b] = Some(w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(ik), Some(kj)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|cur| ik + kj < cur) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

/// Random connected graph: a random spanning tree plus extra edges,
/// integer weights in 1..=9.
pub fn random_connected<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
) -> (usize, Vec<(VertexId, VertexId, u64)>) {
    let n = rng.gen_range(1..=max_vertices);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(1..=9)));
    }
    let density: f64 = rng.gen_range(0.0..0.6);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v, rng.gen_range(1..=9)));
            }
        }
    }
    (n, edges)
}

/// Tour length of visiting `order` with the planner's dump-insertion rule,
/// evaluated with an independent distance table.
pub fn tour_length(
    dist: &[Vec<Option<u64>>],
    start: VertexId,
    dump: VertexId,
    order: &[PickupRequest],
    capacity: u32,
    initial_load: u32,
) -> u64 {
    let mut total = 0;
    let mut at = start;
    let mut load = initial_load;
    for req in order {
        if load + req.load > capacity {
            total += dist[at][dump].unwrap();
            at = dump;
            load = 0;
        }
        total += dist[at][req.vertex].unwrap();
        at = req.vertex;
        load += req.load;
    }
    if load > 0 {
        total += dist[at][dump].unwrap();
    }
    total
}

fn permutations(items: &mut Vec<PickupRequest>, k: usize, visit: &mut dyn FnMut(&[PickupRequest])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Shortest tour over every pickup order.
pub fn exhaustive_optimum(
    dist: &[Vec<Option<u64>>],
    start: VertexId,
    dump: VertexId,
    requests: &[PickupRequest],
    capacity: u32,
) -> u64 {
    let mut best = u64::MAX;
    let mut items = requests.to_vec();
    permutations(&mut items, 0, &mut |order| {
        best = best.min(tour_length(dist, start, dump, order, capacity, 0));
    });
    best
}

/// Replays a route's projected load; returns the maximum seen.
pub fn max_projected_load<W: binsim::scalar::Weight>(
    route: &Route<W>,
    requests: &[PickupRequest],
    initial: u32,
) -> u32 {
    let load_of = |bin| requests.iter().find(|r| r.bin == bin).unwrap().load;
    route
        .projected_loads(initial, load_of)
        .into_iter()
        .max()
        .unwrap_or(0)
}

/// Checks that each leg is a valid walk of the stated length.
pub fn legs_are_walks(graph: &Graph<u64>, route: &Route<u64>) -> bool {
    route
        .legs
        .iter()
        .zip(route.stops.windows(2))
        .all(|(leg, pair)| {
            let ends = leg.path.first() == Some(&pair[0].vertex)
                && leg.path.last() == Some(&pair[1].vertex);
            let length: Option<u64> = leg.path.windows(2).map(|w| graph.weight(w[0], w[1])).sum();
            ends && length == Some(leg.distance)
        })
        && route.legs.iter().map(|l| l.distance).sum::<u64>() == route.total_distance
}

pub fn pickups(route: &Route<u64>) -> Vec<usize> {
    route
        .stops
        .iter()
        .filter_map(|s| match s.action {
            StopAction::Pickup { bin } => Some(bin),
            _ => None,
        })
        .collect()
}

pub fn reds(states: impl Iterator<Item = BinState>) -> usize {
    states.filter(|s| *s == BinState::Red).count()
}

/// Prints a one-line verdict and fails the test when `ok` is false.
pub fn verdict(id: &str, name: &str, ok: bool, detail: &str) {
    println!(
        "[{}] {id} {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{id} {name} failed: {detail}");
}
