//! Dijkstra shortest paths and capacity-aware greedy collection tours.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use thiserror::Error;

use crate::scalar::Weight;
use crate::world::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("vertex {0} is not in the graph")]
    InvalidVertex(VertexId),
    #[error("edge ({u}, {v}) has negative or NaN weight")]
    NegativeWeight { u: VertexId, v: VertexId },
    #[error("vertex {to} is unreachable from {from}")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("bin {bin} load {load} exceeds truck capacity {capacity}")]
    LoadExceedsCapacity {
        bin: usize,
        load: u32,
        capacity: u32,
    },
    #[error("current load {load} exceeds truck capacity {capacity}")]
    CurrentLoadExceedsCapacity { load: u32, capacity: u32 },
    #[error("no full bins to plan for")]
    NothingToCollect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPathTree<W> {
    pub source: VertexId,
    /// `None` marks an unreachable vertex.
    pub dist: Vec<Option<W>>,
    pub prev: Vec<Option<VertexId>>,
}

impl<W: Weight> ShortestPathTree<W> {
    pub fn distance(&self, target: VertexId) -> Option<W> {
        self.dist.get(target).copied().flatten()
    }

    /// Vertex sequence from the source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: VertexId) -> Option<Vec<VertexId>> {
        self.distance(target)?;
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.prev[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

struct Frontier<W> {
    cost: W,
    vertex: VertexId,
}

impl<W: PartialOrd> PartialEq for Frontier<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: PartialOrd> Eq for Frontier<W> {}

impl<W: PartialOrd> Ord for Frontier<W> {
    // Min-heap on (cost, vertex id). Weights are validated, so NaN never appears.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<W: PartialOrd> PartialOrd for Frontier<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_weights<W: Weight>(graph: &Graph<W>) -> Result<(), RoutingError> {
    match graph.edges().iter().find(|e| !e.weight.is_valid_weight()) {
        Some(e) => Err(RoutingError::NegativeWeight { u: e.u, v: e.v }),
        None => Ok(()),
    }
}

/// Single-source shortest paths.
///
/// Vertices settle in `(distance, id)` order. Among equally short
/// predecessors of an unsettled vertex the smallest id wins, which makes
/// `prev` a function of the graph alone.
pub fn dijkstra<W: Weight>(
    graph: &Graph<W>,
    source: VertexId,
) -> Result<ShortestPathTree<W>, RoutingError> {
    if !graph.contains(source) {
        return Err(RoutingError::InvalidVertex(source));
    }
    check_weights(graph)?;
    Ok(dijkstra_unchecked(graph, source))
}

fn dijkstra_unchecked<W: Weight>(graph: &Graph<W>, source: VertexId) -> ShortestPathTree<W> {
    let n = graph.vertex_count();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut prev: Vec<Option<VertexId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();

    dist[source] = Some(W::zero());
    heap.push(Frontier {
        cost: W::zero(),
        vertex: source,
    });

    while let Some(Frontier { cost, vertex: u }) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for &(v, w) in graph.neighbors(u) {
            if settled[v] {
                continue;
            }
            let candidate = cost + w;
            match dist[v] {
                Some(d) if candidate > d => {}
                Some(d) if candidate == d => {
                    if prev[v].is_none_or(|p| u < p) {
                        prev[v] = Some(u);
                    }
                }
                _ => {
                    dist[v] = Some(candidate);
                    prev[v] = Some(u);
                    heap.push(Frontier {
                        cost: candidate,
                        vertex: v,
                    });
                }
            }
        }
    }
    ShortestPathTree { source, dist, prev }
}

/// Outcome of a point-to-point query. Unreachability is a result, not an error.
#[derive(Clone, Debug, PartialEq)]
pub enum PathResult<W> {
    Found { path: Vec<VertexId>, cost: W },
    Unreachable,
}

pub fn shortest_path<W: Weight>(
    graph: &Graph<W>,
    s: VertexId,
    t: VertexId,
) -> Result<PathResult<W>, RoutingError> {
    if !graph.contains(t) {
        return Err(RoutingError::InvalidVertex(t));
    }
    let tree = dijkstra(graph, s)?;
    Ok(match (tree.path_to(t), tree.distance(t)) {
        (Some(path), Some(cost)) => PathResult::Found { path, cost },
        _ => PathResult::Unreachable,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopAction {
    /// The truck's position when the route was planned.
    Start,
    Pickup {
        bin: usize,
    },
    Dump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stop {
    pub vertex: VertexId,
    pub action: StopAction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Leg<W> {
    pub from: VertexId,
    pub to: VertexId,
    /// Expanded walk from `from` to `to`, both inclusive.
    pub path: Vec<VertexId>,
    pub distance: W,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Route<W> {
    pub stops: Vec<Stop>,
    /// `legs[i]` joins `stops[i]` to `stops[i + 1]`.
    pub legs: Vec<Leg<W>>,
    pub total_distance: W,
    pub planned_pickups: Vec<usize>,
}

impl<W: Weight> Route<W> {
    pub fn stop_vertices(&self) -> Vec<VertexId> {
        self.stops.iter().map(|s| s.vertex).collect()
    }

    pub fn dump_visits(&self) -> usize {
        self.stops
            .iter()
            .filter(|s| s.action == StopAction::Dump)
            .count()
    }

    /// Projected truck load after each stop, given the bin loads and the load
    /// at the start.
    pub fn projected_loads(&self, initial_load: u32, load_of: impl Fn(usize) -> u32) -> Vec<u32> {
        let mut load = initial_load;
        self.stops
            .iter()
            .map(|s| {
                match s.action {
                    StopAction::Start => {}
                    StopAction::Pickup { bin } => load += load_of(bin),
                    StopAction::Dump => load = 0,
                }
                load
            })
            .collect()
    }
}

/// A full bin offered to the planner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PickupRequest {
    pub bin: usize,
    pub vertex: VertexId,
    pub load: u32,
}

/// Builds a collection tour by repeatedly driving to the nearest remaining
/// bin (ties: smaller bin id). A dump stop is inserted before any pickup that
/// would push the projected load over `truck_capacity`; that same pickup
/// follows the dump. The tour closes with a dump visit when anything is on
/// board.
pub fn plan_tour<W: Weight>(
    graph: &Graph<W>,
    start: VertexId,
    full_bins: &[PickupRequest],
    dump: VertexId,
    truck_capacity: u32,
    current_load: u32,
) -> Result<Route<W>, RoutingError> {
    for v in [start, dump] {
        if !graph.contains(v) {
            return Err(RoutingError::InvalidVertex(v));
        }
    }
    if full_bins.is_empty() {
        return Err(RoutingError::NothingToCollect);
    }
    if current_load > truck_capacity {
        return Err(RoutingError::CurrentLoadExceedsCapacity {
            load: current_load,
            capacity: truck_capacity,
        });
    }
    for req in full_bins {
        if !graph.contains(req.vertex) {
            return Err(RoutingError::InvalidVertex(req.vertex));
        }
        if req.load > truck_capacity {
            return Err(RoutingError::LoadExceedsCapacity {
                bin: req.bin,
                load: req.load,
                capacity: truck_capacity,
            });
        }
    }
    check_weights(graph)?;

    let mut trees: BTreeMap<VertexId, ShortestPathTree<W>> = BTreeMap::new();
    let mut tree_from = |v: VertexId| -> ShortestPathTree<W> {
        trees
            .entry(v)
            .or_insert_with(|| dijkstra_unchecked(graph, v))
            .clone()
    };

    let mut remaining: Vec<PickupRequest> = full_bins.to_vec();
    remaining.sort_by_key(|r| r.bin);

    let mut stops = vec![Stop {
        vertex: start,
        action: StopAction::Start,
    }];
    let mut legs: Vec<Leg<W>> = Vec::new();
    let mut planned_pickups = Vec::with_capacity(remaining.len());
    let mut current = start;
    let mut projected = current_load;

    let push_leg = |legs: &mut Vec<Leg<W>>,
                    tree: &ShortestPathTree<W>,
                    to: VertexId|
     -> Result<(), RoutingError> {
        let unreachable = RoutingError::Unreachable {
            from: tree.source,
            to,
        };
        let path = tree.path_to(to).ok_or(unreachable.clone())?;
        let distance = tree.distance(to).ok_or(unreachable)?;
        legs.push(Leg {
            from: tree.source,
            to,
            path,
            distance,
        });
        Ok(())
    };

    while !remaining.is_empty() {
        let mut tree = tree_from(current);
        let next = nearest(&tree, &remaining)?;
        if projected + remaining[next].load > truck_capacity {
            push_leg(&mut legs, &tree, dump)?;
            stops.push(Stop {
                vertex: dump,
                action: StopAction::Dump,
            });
            current = dump;
            projected = 0;
            tree = tree_from(current);
        }
        let req = remaining.remove(next);
        push_leg(&mut legs, &tree, req.vertex)?;
        stops.push(Stop {
            vertex: req.vertex,
            action: StopAction::Pickup { bin: req.bin },
        });
        planned_pickups.push(req.bin);
        projected += req.load;
        current = req.vertex;
    }
    if projected > 0 {
        let tree = tree_from(current);
        push_leg(&mut legs, &tree, dump)?;
        stops.push(Stop {
            vertex: dump,
            action: StopAction::Dump,
        });
    }

    let total_distance = legs.iter().map(|l| l.distance).sum();
    Ok(Route {
        stops,
        legs,
        total_distance,
        planned_pickups,
    })
}

/// Index into `remaining` (sorted by bin id) of the closest request.
fn nearest<W: Weight>(
    tree: &ShortestPathTree<W>,
    remaining: &[PickupRequest],
) -> Result<usize, RoutingError> {
    let mut best: Option<(usize, W)> = None;
    for (i, req) in remaining.iter().enumerate() {
        let d = tree.distance(req.vertex).ok_or(RoutingError::Unreachable {
            from: tree.source,
            to: req.vertex,
        })?;
        // strict comparison keeps the smaller bin id on ties
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    Ok(best.expect("remaining is non-empty").0)
}
