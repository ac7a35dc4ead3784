//! The simulated city: bounded plane, randomly placed bins, dump and depot,
//! and the routing graph over those locations.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::scalar::{Coord, Weight};

pub type VertexId = usize;

/// Minimum distance between any two placed bins, in grid units.
pub const MIN_BIN_SEPARATION: f64 = 0.5;
/// Sampling attempts per bin before placement gives up.
pub const PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("could only place {placed} of {requested} bins with separation {MIN_BIN_SEPARATION}")]
    PlacementExhausted { placed: usize, requested: usize },
    #[error("vertex {vertex} is unreachable from the depot")]
    DisconnectedGraph { vertex: VertexId },
    #[error("edge ({u}, {v}) references a vertex outside 0..{count}")]
    InvalidEdge {
        u: VertexId,
        v: VertexId,
        count: usize,
    },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex at index {index} has id {id}; ids must be dense")]
    NonDenseIds { index: usize, id: VertexId },
    #[error("invalid world configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Position<T> {
    pub x: T,
    pub y: T,
}

impl<T> Position<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Coord> Position<T> {
    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl<T: fmt::Display> fmt::Display for Position<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned rectangle `[xmin, xmax] × [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
}

impl<T: Coord> Bounds<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T) -> Self {
        Self {
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    /// Square `[-half, half]²`.
    pub fn square(half: T) -> Self {
        Self::new(-half, half, -half, half)
    }

    /// Ordered and finite. A single point is accepted; it can hold one bin.
    pub fn is_valid(&self) -> bool {
        [self.xmin, self.xmax, self.ymin, self.ymax]
            .iter()
            .all(|c| c.is_finite())
            && self.xmin <= self.xmax
            && self.ymin <= self.ymax
    }

    pub fn contains(&self, p: &Position<T>) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn clamp(&self, p: Position<T>) -> Position<T> {
        Position::new(
            p.x.max(self.xmin).min(self.xmax),
            p.y.max(self.ymin).min(self.ymax),
        )
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Position<T> {
        let x = rng.gen_range(self.xmin..=self.xmax);
        let y = rng.gen_range(self.ymin..=self.ymax);
        Position::new(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    BinSite,
    Dump,
    Depot,
    /// Dump and depot configured at the same location.
    DumpDepot,
}

impl VertexKind {
    pub fn is_dump(self) -> bool {
        matches!(self, VertexKind::Dump | VertexKind::DumpDepot)
    }

    pub fn is_depot(self) -> bool {
        matches!(self, VertexKind::Depot | VertexKind::DumpDepot)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex<T> {
    pub id: VertexId,
    pub label: String,
    pub position: Position<T>,
    pub kind: VertexKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<W> {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: W,
}

/// Undirected weighted graph. Parallel edges are allowed; traversal uses the
/// cheapest one.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W> {
    vertices: Vec<Vertex<W>>,
    edges: Vec<Edge<W>>,
    adjacency: Vec<Vec<(VertexId, W)>>,
}

impl<W: Weight> Graph<W> {
    pub fn new(vertices: Vec<Vertex<W>>, edges: Vec<Edge<W>>) -> Result<Self, WorldError> {
        for (index, v) in vertices.iter().enumerate() {
            if v.id != index {
                return Err(WorldError::NonDenseIds { index, id: v.id });
            }
        }
        let count = vertices.len();
        let mut adjacency = vec![Vec::new(); count];
        for e in &edges {
            if e.u >= count || e.v >= count {
                return Err(WorldError::InvalidEdge {
                    u: e.u,
                    v: e.v,
                    count,
                });
            }
            if e.u == e.v {
                return Err(WorldError::SelfLoop(e.u));
            }
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
        }
        Ok(Self {
            vertices,
            edges,
            adjacency,
        })
    }

    /// Topology-only graph: `count` bin-site vertices at the origin labelled
    /// by their id.
    pub fn from_edges(count: usize, edges: &[(VertexId, VertexId, W)]) -> Result<Self, WorldError> {
        let vertices = (0..count)
            .map(|id| Vertex {
                id,
                label: id.to_string(),
                position: Position::new(W::zero(), W::zero()),
                kind: VertexKind::BinSite,
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(u, v, weight)| Edge { u, v, weight })
            .collect();
        Self::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex<W>] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex<W>> {
        self.vertices.get(id)
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn neighbors(&self, id: VertexId) -> &[(VertexId, W)] {
        &self.adjacency[id]
    }

    pub fn contains(&self, id: VertexId) -> bool {
        id < self.vertices.len()
    }

    /// Cheapest direct edge between `u` and `v`.
    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<W> {
        self.adjacency
            .get(u)?
            .iter()
            .filter(|(to, _)| *to == v)
            .map(|&(_, w)| w)
            .reduce(|a, b| if b < a { b } else { a })
    }

    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.label == label)
    }

    pub fn dump(&self) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.kind.is_dump())
    }

    pub fn depot(&self) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.kind.is_depot())
    }

    /// First vertex (lowest id) not reachable from `source`, if any.
    pub fn first_unreachable(&self, source: VertexId) -> Option<VertexId> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphMode<T> {
    /// Every vertex pair joined by its Euclidean distance.
    CompleteEuclidean,
    /// Edges `(u, v, weight)` over vertex ids: bins `0..bin_count`, then the
    /// dump, then the depot (absent when it coincides with the dump).
    ExplicitEdges(Vec<(VertexId, VertexId, T)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldConfig<T> {
    pub bin_count: usize,
    pub bounds: Bounds<T>,
    pub dump_position: Position<T>,
    pub depot_position: Position<T>,
    pub graph_mode: GraphMode<T>,
}

impl<T: Coord> Default for WorldConfig<T> {
    fn default() -> Self {
        let half = T::from_f64(12.0);
        let bounds = Bounds::square(half);
        Self {
            bin_count: 25,
            bounds,
            dump_position: Position::new(bounds.xmax, bounds.ymax),
            depot_position: Position::new(T::zero(), T::zero()),
            graph_mode: GraphMode::CompleteEuclidean,
        }
    }
}

impl<T: Coord> WorldConfig<T> {
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.bin_count == 0 {
            return Err(WorldError::InvalidConfig(
                "bin_count must be at least 1".into(),
            ));
        }
        if !self.bounds.is_valid() {
            return Err(WorldError::InvalidConfig(
                "bounds must be finite and ordered".into(),
            ));
        }
        for (name, p) in [
            ("dump", &self.dump_position),
            ("depot", &self.depot_position),
        ] {
            if !self.bounds.contains(p) {
                return Err(WorldError::InvalidConfig(format!(
                    "{name} position {p:?} outside bounds"
                )));
            }
        }
        if let GraphMode::ExplicitEdges(edges) = &self.graph_mode {
            if let Some((u, v, w)) = edges.iter().find(|(_, _, w)| !w.is_valid_weight()) {
                return Err(WorldError::InvalidConfig(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn dump_is_depot(&self) -> bool {
        self.dump_position == self.depot_position
    }

    /// Vertex id of the dump in graphs built from this config.
    pub fn dump_vertex(&self) -> VertexId {
        self.bin_count
    }

    pub fn depot_vertex(&self) -> VertexId {
        if self.dump_is_depot() {
            self.bin_count
        } else {
            self.bin_count + 1
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.depot_vertex() + 1
    }
}

/// Samples `bin_count` positions uniformly within the bounds, rejecting any
/// sample closer than [`MIN_BIN_SEPARATION`] to an earlier one.
pub fn place_bins<T: Coord, R: Rng + ?Sized>(
    config: &WorldConfig<T>,
    rng: &mut R,
) -> Result<Vec<Position<T>>, WorldError> {
    config.validate()?;
    let min_sep = T::from_f64(MIN_BIN_SEPARATION);
    let mut placed: Vec<Position<T>> = Vec::with_capacity(config.bin_count);
    while placed.len() < config.bin_count {
        let mut accepted = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let candidate = config.bounds.sample(rng);
            if placed.iter().all(|p| p.distance(&candidate) >= min_sep) {
                accepted = Some(candidate);
                break;
            }
        }
        match accepted {
            Some(p) => placed.push(p),
            None => {
                return Err(WorldError::PlacementExhausted {
                    placed: placed.len(),
                    requested: config.bin_count,
                })
            }
        }
    }
    Ok(placed)
}

pub fn build_graph<T: Coord>(
    bin_positions: &[Position<T>],
    config: &WorldConfig<T>,
) -> Result<Graph<T>, WorldError> {
    if bin_positions.len() != config.bin_count {
        return Err(WorldError::InvalidConfig(format!(
            "{} bin positions for bin_count {}",
            bin_positions.len(),
            config.bin_count
        )));
    }
    let mut vertices: Vec<Vertex<T>> = bin_positions
        .iter()
        .enumerate()
        .map(|(id, &position)| Vertex {
            id,
            label: format!("bin{id}"),
            position,
            kind: VertexKind::BinSite,
        })
        .collect();
    if config.dump_is_depot() {
        vertices.push(Vertex {
            id: config.dump_vertex(),
            label: "DUMP".into(),
            position: config.dump_position,
            kind: VertexKind::DumpDepot,
        });
    } else {
        vertices.push(Vertex {
            id: config.dump_vertex(),
            label: "DUMP".into(),
            position: config.dump_position,
            kind: VertexKind::Dump,
        });
        vertices.push(Vertex {
            id: config.depot_vertex(),
            label: "DEPOT".into(),
            position: config.depot_position,
            kind: VertexKind::Depot,
        });
    }

    let graph = match &config.graph_mode {
        GraphMode::CompleteEuclidean => complete_euclidean(vertices)?,
        GraphMode::ExplicitEdges(list) => {
            let edges = list
                .iter()
                .map(|&(u, v, weight)| Edge { u, v, weight })
                .collect();
            let graph = Graph::new(vertices, edges)?;
            if let Some(vertex) = graph.first_unreachable(config.depot_vertex()) {
                return Err(WorldError::DisconnectedGraph { vertex });
            }
            graph
        }
    };
    Ok(graph)
}

/// Joins every vertex pair with an edge weighted by Euclidean distance.
pub fn complete_euclidean<T: Coord>(vertices: Vec<Vertex<T>>) -> Result<Graph<T>, WorldError> {
    let mut edges = Vec::with_capacity(vertices.len() * vertices.len().saturating_sub(1) / 2);
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            edges.push(Edge {
                u: a.id,
                v: b.id,
                weight: a.position.distance(&b.position),
            });
        }
    }
    Graph::new(vertices, edges)
}

/// Placed bins together with the graph built over them. Bin `i` sits on
/// vertex `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct World<T> {
    pub bin_positions: Vec<Position<T>>,
    pub graph: Graph<T>,
    pub dump: VertexId,
    pub depot: VertexId,
    pub bounds: Bounds<T>,
}

impl<T: Coord> World<T> {
    pub fn generate<R: Rng + ?Sized>(
        config: &WorldConfig<T>,
        rng: &mut R,
    ) -> Result<Self, WorldError> {
        let bin_positions = place_bins(config, rng)?;
        let graph = build_graph(&bin_positions, config)?;
        Ok(Self {
            bin_positions,
            graph,
            dump: config.dump_vertex(),
            depot: config.depot_vertex(),
            bounds: config.bounds,
        })
    }
}
