//! Discrete-time simulation of IoT-monitored waste bins, capacitated
//! collection trucks and the citizens who pay for collection.
//!
//! The geometric and routing layers are generic over their scalar
//! ([`scalar::Weight`], [`scalar::Coord`]); the simulation itself runs on
//! `f64` distances with integer waste units and currency. The aliases below
//! name the `f64` instantiations.

pub mod accounting;
pub mod bins;
pub mod engine;
pub mod fleet;
pub mod interface;
pub mod routing;
pub mod scalar;
pub mod world;

pub type Position = world::Position<f64>;
pub type Bounds = world::Bounds<f64>;
pub type Graph = world::Graph<f64>;
pub type WorldConfig = world::WorldConfig<f64>;
pub type World = world::World<f64>;
pub type Route = routing::Route<f64>;
pub type ShortestPathTree = routing::ShortestPathTree<f64>;
/// Graph with exact integer weights.
pub type IntGraph = world::Graph<u64>;

pub use engine::{run, SimConfig, SimError, SimResult, Simulation};
