//! Collection trucks following planned routes.

use thiserror::Error;

use crate::bins::{Bin, Tick};
use crate::routing::{Route, StopAction};
use crate::world::VertexId;

pub const DEFAULT_TRUCK_CAPACITY: u32 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FleetError {
    #[error("truck {0} is already en route")]
    TruckBusy(usize),
    #[error("route for truck {truck} starts at vertex {route_start}, truck is at {truck_vertex}")]
    RouteMismatch {
        truck: usize,
        truck_vertex: VertexId,
        route_start: VertexId,
    },
    #[error("truck {0} is idle")]
    NotEnRoute(usize),
    #[error(
        "truck {truck} at vertex {truck_vertex} cannot collect bin {bin} at vertex {bin_vertex}"
    )]
    NotAtBin {
        truck: usize,
        truck_vertex: VertexId,
        bin: usize,
        bin_vertex: VertexId,
    },
    #[error("truck {truck} load {load} + bin {bin} level {level} exceeds capacity {capacity}")]
    CapacityWouldExceed {
        truck: usize,
        bin: usize,
        load: u32,
        level: u32,
        capacity: u32,
    },
    #[error("route references unknown bin {0}")]
    UnknownBin(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruckStatus {
    Idle,
    EnRoute,
}

impl TruckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TruckStatus::Idle => "idle",
            TruckStatus::EnRoute => "en_route",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollectionEvent {
    pub tick: Tick,
    pub truck: usize,
    pub bin: usize,
    pub units: u32,
    pub vertex: VertexId,
    /// When the bin had become full, if it was.
    pub full_since: Option<Tick>,
}

impl CollectionEvent {
    pub fn delay(&self) -> Option<Tick> {
        self.full_since.map(|f| self.tick - f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DumpEvent {
    pub tick: Tick,
    pub truck: usize,
    pub units: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FleetEvent {
    Collection(CollectionEvent),
    Dump(DumpEvent),
}

#[derive(Clone, Debug, PartialEq)]
struct ActiveRoute {
    route: Route<f64>,
    cursor: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Truck {
    pub id: usize,
    vertex: VertexId,
    capacity: u32,
    load: u32,
    active: Option<ActiveRoute>,
    odometer: f64,
    trips: u32,
}

impl Truck {
    pub fn new(id: usize, vertex: VertexId, capacity: u32) -> Self {
        Self {
            id,
            vertex,
            capacity,
            load: 0,
            active: None,
            odometer: 0.0,
            trips: 0,
        }
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn load(&self) -> u32 {
        self.load
    }

    pub fn odometer(&self) -> f64 {
        self.odometer
    }

    /// Completed dump visits that unloaded waste.
    pub fn trips(&self) -> u32 {
        self.trips
    }

    pub fn route(&self) -> Option<&Route<f64>> {
        self.active.as_ref().map(|a| &a.route)
    }

    /// Index of the stop the truck is currently at.
    pub fn cursor(&self) -> Option<usize> {
        self.active.as_ref().map(|a| a.cursor)
    }

    pub fn status(&self) -> TruckStatus {
        if self.active.is_some() {
            TruckStatus::EnRoute
        } else {
            TruckStatus::Idle
        }
    }

    pub fn is_idle(&self) -> bool {
        self.active.is_none()
    }

    /// Bins picked up at stops after the cursor.
    pub fn pending_pickups(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().flat_map(|a| {
            a.route.stops[a.cursor + 1..]
                .iter()
                .filter_map(|s| match s.action {
                    StopAction::Pickup { bin } => Some(bin),
                    _ => None,
                })
        })
    }

    pub fn assign_route(&mut self, route: Route<f64>) -> Result<(), FleetError> {
        if !self.is_idle() {
            return Err(FleetError::TruckBusy(self.id));
        }
        let route_start = route.stops.first().map(|s| s.vertex);
        if route_start != Some(self.vertex) {
            return Err(FleetError::RouteMismatch {
                truck: self.id,
                truck_vertex: self.vertex,
                route_start: route_start.unwrap_or(usize::MAX),
            });
        }
        if route.stops.len() > 1 {
            self.active = Some(ActiveRoute { route, cursor: 0 });
        }
        Ok(())
    }

    /// Empties `bin` into the truck. `None` when the bin held nothing.
    pub fn collect(
        &mut self,
        bin: &mut Bin,
        tick: Tick,
    ) -> Result<Option<CollectionEvent>, FleetError> {
        if bin.vertex != self.vertex {
            return Err(FleetError::NotAtBin {
                truck: self.id,
                truck_vertex: self.vertex,
                bin: bin.id,
                bin_vertex: bin.vertex,
            });
        }
        if self.load + bin.level() > self.capacity {
            return Err(FleetError::CapacityWouldExceed {
                truck: self.id,
                bin: bin.id,
                load: self.load,
                level: bin.level(),
                capacity: self.capacity,
            });
        }
        let full_since = bin.full_since();
        let units = bin.empty();
        self.load += units;
        Ok((units > 0).then_some(CollectionEvent {
            tick,
            truck: self.id,
            bin: bin.id,
            units,
            vertex: self.vertex,
            full_since,
        }))
    }

    /// Moves to the next stop and performs its action. `bins` is indexed by
    /// bin id.
    pub fn advance(&mut self, bins: &mut [Bin], tick: Tick) -> Result<Vec<FleetEvent>, FleetError> {
        let active = self
            .active
            .as_mut()
            .ok_or(FleetError::NotEnRoute(self.id))?;
        let leg_distance = active.route.legs[active.cursor].distance;
        active.cursor += 1;
        let stop = active.route.stops[active.cursor];
        let finished = active.cursor + 1 == active.route.stops.len();

        self.vertex = stop.vertex;
        self.odometer += leg_distance;

        let mut events = Vec::new();
        match stop.action {
            StopAction::Start => {}
            StopAction::Pickup { bin } => {
                let bin = bins.get_mut(bin).ok_or(FleetError::UnknownBin(bin))?;
                if let Some(ev) = self.collect(bin, tick)? {
                    events.push(FleetEvent::Collection(ev));
                }
            }
            StopAction::Dump => {
                if self.load > 0 {
                    events.push(FleetEvent::Dump(DumpEvent {
                        tick,
                        truck: self.id,
                        units: self.load,
                    }));
                    self.load = 0;
                    self.trips += 1;
                }
            }
        }
        if finished {
            self.active = None;
        }
        Ok(events)
    }
}
