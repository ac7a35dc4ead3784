//! The tick loop.
//!
//! Every tick runs five phases in a fixed order:
//!
//! 1. **fill**: each bin, in ascending id, takes one fill step; queued
//!    injections are then applied.
//! 2. **dispatch**: if at least `dispatch_threshold` red bins are not yet on
//!    any route and some truck is idle, those bins are dealt round-robin (by
//!    ascending bin id) to the idle trucks (by ascending truck id) and each
//!    truck gets a greedy tour from where it stands.
//! 3. **move**: every en-route truck advances one stop; collections bill the
//!    bin's owner.
//! 4. **citizens**: each citizen takes one random step.
//! 5. **record**: a [`TickRecord`] is appended.
//!
//! All randomness comes from one ChaCha8 stream seeded by `SimConfig::seed`,
//! drawn in the order: placement, fill rates, then per tick bins by id and
//! citizens by id. Routes are never re-planned once assigned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::accounting::{trip_cost, Citizen, Ledger, LedgerEntry, Tariff, Uc};
use crate::bins::{Bin, BinError, BinState, FillModel, Thresholds, Tick};
use crate::fleet::{CollectionEvent, DumpEvent, FleetError, FleetEvent, Truck, TruckStatus};
use crate::routing::{plan_tour, PickupRequest, RoutingError};
use crate::world::{World, WorldConfig, WorldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Bin(#[from] BinError),
    #[error("tour planning failed: {0}")]
    Routing(#[from] RoutingError),
    #[error("truck operation failed at tick {tick}: {source}")]
    Fleet { tick: Tick, source: FleetError },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("horizon of {0} ticks already reached")]
    HorizonReached(Tick),
}

/// How bins fill.
#[derive(Clone, Debug, PartialEq)]
pub enum FillSpec {
    /// One unit per bin per tick.
    Unit,
    /// Bernoulli fill with per-bin rates drawn uniformly from
    /// `[min_rate, max_rate]` at setup.
    Bernoulli { min_rate: f64, max_rate: f64 },
    /// Bernoulli fill with fixed per-bin rates.
    Rates(Vec<f64>),
}

impl Default for FillSpec {
    fn default() -> Self {
        FillSpec::Bernoulli {
            min_rate: 0.2,
            max_rate: 0.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub world: WorldConfig<f64>,
    pub bin_capacity: u32,
    pub yellow_threshold: u32,
    pub truck_count: usize,
    pub truck_capacity: u32,
    pub fill: FillSpec,
    pub tariff: Tariff,
    pub dispatch_threshold: usize,
    pub ticks: Tick,
    pub seed: u64,
    /// Grid units per tick a citizen wanders.
    pub citizen_step: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            world: WorldConfig::default(),
            bin_capacity: crate::bins::DEFAULT_BIN_CAPACITY,
            yellow_threshold: crate::bins::DEFAULT_YELLOW_THRESHOLD,
            truck_count: 1,
            truck_capacity: crate::fleet::DEFAULT_TRUCK_CAPACITY,
            fill: FillSpec::default(),
            tariff: Tariff::default(),
            dispatch_threshold: 1,
            ticks: 100,
            seed: 0,
            citizen_step: 1.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.world.validate()?;
        Thresholds::new(self.yellow_threshold, self.bin_capacity)?;
        if self.truck_count == 0 {
            return Err(SimError::InvalidConfig(
                "truck_count must be at least 1".into(),
            ));
        }
        if self.dispatch_threshold == 0 {
            return Err(SimError::InvalidConfig(
                "dispatch_threshold must be at least 1".into(),
            ));
        }
        if self.bin_capacity > self.truck_capacity {
            return Err(SimError::InvalidConfig(format!(
                "bin_capacity {} exceeds truck_capacity {}",
                self.bin_capacity, self.truck_capacity
            )));
        }
        if !(self.citizen_step.is_finite() && self.citizen_step >= 0.0) {
            return Err(SimError::InvalidConfig(
                "citizen_step must be finite and non-negative".into(),
            ));
        }
        match &self.fill {
            FillSpec::Unit => {}
            FillSpec::Bernoulli { min_rate, max_rate } => {
                let ok = (0.0..=1.0).contains(min_rate)
                    && (0.0..=1.0).contains(max_rate)
                    && min_rate <= max_rate;
                if !ok {
                    return Err(SimError::InvalidConfig(format!(
                        "fill rate range [{min_rate}, {max_rate}] must be ordered within [0, 1]"
                    )));
                }
            }
            FillSpec::Rates(rates) => {
                FillModel::bernoulli(rates.clone())?.check_bins(self.world.bin_count)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinSnapshot {
    pub id: usize,
    pub level: u32,
    pub state: BinState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruckSnapshot {
    pub id: usize,
    pub load: u32,
    pub status: TruckStatus,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TickRecord {
    pub tick: Tick,
    pub bins: Vec<BinSnapshot>,
    /// Red bins at the end of the tick.
    pub full_bins_uncollected: usize,
    pub trucks: Vec<TruckSnapshot>,
    pub cumulative_revenue: Uc,
    pub units_generated: u64,
    pub units_dumped: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    pub total_revenue: Uc,
    pub total_trip_cost: Uc,
    pub total_distance: f64,
    pub mean_collection_delay: f64,
    pub max_collection_delay: Tick,
    pub total_units_collected: u64,
    pub total_units_dumped: u64,
    pub units_generated: u64,
    pub trips: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub world: World<f64>,
    pub records: Vec<TickRecord>,
    pub events: Vec<FleetEvent>,
    pub ledger: Vec<LedgerEntry>,
    pub citizens: Vec<Citizen>,
    pub trucks: Vec<Truck>,
    pub metrics: Metrics,
}

impl SimResult {
    pub fn final_record(&self) -> &TickRecord {
        self.records.last().expect("tick 0 is always recorded")
    }

    pub fn collections(&self) -> impl Iterator<Item = &CollectionEvent> {
        self.events.iter().filter_map(|e| match e {
            FleetEvent::Collection(c) => Some(c),
            _ => None,
        })
    }

    pub fn dumps(&self) -> impl Iterator<Item = &DumpEvent> {
        self.events.iter().filter_map(|e| match e {
            FleetEvent::Dump(d) => Some(d),
            _ => None,
        })
    }

    /// `(bin, delay)` for every collection of a full bin, in event order.
    pub fn collection_delays(&self) -> Vec<(usize, Tick)> {
        self.collections()
            .filter_map(|c| c.delay().map(|d| (c.bin, d)))
            .collect()
    }
}

/// Live simulation state.
#[derive(Clone, Debug)]
pub struct Simulation {
    config: SimConfig,
    rng: ChaCha8Rng,
    world: World<f64>,
    fill_model: FillModel,
    bins: Vec<Bin>,
    trucks: Vec<Truck>,
    citizens: Vec<Citizen>,
    ledger: Ledger,
    events: Vec<FleetEvent>,
    records: Vec<TickRecord>,
    on_route: Vec<bool>,
    injections: Vec<(usize, u32)>,
    tick: Tick,
    generated: u64,
    dumped: u64,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let world = World::generate(&config.world, &mut rng)?;
        let bin_count = config.world.bin_count;

        let fill_model = match &config.fill {
            FillSpec::Unit => FillModel::DeterministicUnit,
            FillSpec::Bernoulli { min_rate, max_rate } => {
                let rates = (0..bin_count)
                    .map(|_| rng.gen_range(*min_rate..=*max_rate))
                    .collect();
                FillModel::bernoulli(rates)?
            }
            FillSpec::Rates(rates) => FillModel::bernoulli(rates.clone())?,
        };

        let thresholds = Thresholds::new(config.yellow_threshold, config.bin_capacity)?;
        let bins = (0..bin_count)
            .map(|id| Bin::new(id, id, id, thresholds))
            .collect();
        let trucks = (0..config.truck_count)
            .map(|id| Truck::new(id, world.depot, config.truck_capacity))
            .collect();
        let citizens = world
            .bin_positions
            .iter()
            .enumerate()
            .map(|(id, &p)| Citizen::new(id, p, id, config.citizen_step))
            .collect();

        let mut sim = Self {
            rng,
            world,
            fill_model,
            bins,
            trucks,
            citizens,
            ledger: Ledger::new(),
            events: Vec::new(),
            records: Vec::new(),
            on_route: vec![false; bin_count],
            injections: Vec::new(),
            tick: 0,
            generated: 0,
            dumped: 0,
            config,
        };
        sim.record();
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn world(&self) -> &World<f64> {
        &self.world
    }

    pub fn fill_model(&self) -> &FillModel {
        &self.fill_model
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn trucks(&self) -> &[Truck] {
        &self.trucks
    }

    pub fn citizens(&self) -> &[Citizen] {
        &self.citizens
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn events(&self) -> &[FleetEvent] {
        &self.events
    }

    pub fn records(&self) -> &[TickRecord] {
        &self.records
    }

    /// Last completed tick.
    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn units_generated(&self) -> u64 {
        self.generated
    }

    pub fn units_dumped(&self) -> u64 {
        self.dumped
    }

    pub fn full_bins_uncollected(&self) -> usize {
        self.bins.iter().filter(|b| b.is_full()).count()
    }

    /// Whether `bin` is on some truck's route and not yet collected.
    pub fn is_on_route(&self, bin: usize) -> bool {
        self.on_route[bin]
    }

    /// Queues `units` of waste for `bin`, added during the next tick's fill
    /// phase after the model-driven step. Saturates at capacity like any fill.
    pub fn inject(&mut self, bin: usize, units: u32) -> Result<(), SimError> {
        if bin >= self.bins.len() {
            return Err(SimError::InvalidConfig(format!("no bin {bin}")));
        }
        self.injections.push((bin, units));
        Ok(())
    }

    pub fn step(&mut self) -> Result<(), SimError> {
        if self.tick >= self.config.ticks {
            return Err(SimError::HorizonReached(self.config.ticks));
        }
        let tick = self.tick + 1;
        self.fill(tick);
        self.dispatch()?;
        self.advance_trucks(tick)?;
        for citizen in &mut self.citizens {
            citizen.wander(&mut self.rng, &self.world.bounds);
        }
        self.tick = tick;
        self.record();
        Ok(())
    }

    /// Steps until the configured horizon.
    pub fn run_to_end(&mut self) -> Result<(), SimError> {
        while self.tick < self.config.ticks {
            self.step()?;
        }
        Ok(())
    }

    fn fill(&mut self, tick: Tick) {
        for bin in &mut self.bins {
            self.generated += u64::from(bin.step(&self.fill_model, &mut self.rng, tick));
        }
        for (bin, units) in std::mem::take(&mut self.injections) {
            self.generated += u64::from(self.bins[bin].deposit(units, tick));
        }
    }

    fn dispatch(&mut self) -> Result<(), SimError> {
        let waiting: Vec<usize> = self
            .bins
            .iter()
            .filter(|b| b.is_full() && !self.on_route[b.id])
            .map(|b| b.id)
            .collect();
        if waiting.len() < self.config.dispatch_threshold {
            return Ok(());
        }
        let idle: Vec<usize> = self
            .trucks
            .iter()
            .filter(|t| t.is_idle())
            .map(|t| t.id)
            .collect();
        if idle.is_empty() {
            return Ok(());
        }
        let mut shares: Vec<Vec<PickupRequest>> = vec![Vec::new(); idle.len()];
        for (k, &bin) in waiting.iter().enumerate() {
            let b = &self.bins[bin];
            shares[k % idle.len()].push(PickupRequest {
                bin,
                vertex: b.vertex,
                load: b.level(),
            });
        }
        for (&truck_id, share) in idle.iter().zip(&shares) {
            if share.is_empty() {
                continue;
            }
            let truck = &mut self.trucks[truck_id];
            let route = plan_tour(
                &self.world.graph,
                truck.vertex(),
                share,
                self.world.dump,
                truck.capacity(),
                truck.load(),
            )?;
            truck
                .assign_route(route)
                .map_err(|source| SimError::Fleet {
                    tick: self.tick + 1,
                    source,
                })?;
            for req in share {
                self.on_route[req.bin] = true;
            }
        }
        Ok(())
    }

    fn advance_trucks(&mut self, tick: Tick) -> Result<(), SimError> {
        for truck in self.trucks.iter_mut().filter(|t| !t.is_idle()) {
            let events = truck
                .advance(&mut self.bins, tick)
                .map_err(|source| SimError::Fleet { tick, source })?;
            for event in events {
                match &event {
                    FleetEvent::Collection(c) => {
                        self.on_route[c.bin] = false;
                        let owner = self.bins[c.bin].owner;
                        self.ledger.record(
                            tick,
                            c.bin,
                            &mut self.citizens[owner],
                            u64::from(c.units),
                            &self.config.tariff,
                        );
                    }
                    FleetEvent::Dump(d) => self.dumped += u64::from(d.units),
                }
                self.events.push(event);
            }
        }
        Ok(())
    }

    fn record(&mut self) {
        let bins = self
            .bins
            .iter()
            .map(|b| BinSnapshot {
                id: b.id,
                level: b.level(),
                state: b.state(),
            })
            .collect();
        let trucks = self
            .trucks
            .iter()
            .map(|t| TruckSnapshot {
                id: t.id,
                load: t.load(),
                status: t.status(),
                vertex: t.vertex(),
            })
            .collect();
        self.records.push(TickRecord {
            tick: self.tick,
            bins,
            full_bins_uncollected: self.full_bins_uncollected(),
            trucks,
            cumulative_revenue: self.ledger.total(),
            units_generated: self.generated,
            units_dumped: self.dumped,
        });
    }

    pub fn finish(self) -> SimResult {
        let delays: Vec<Tick> = self
            .events
            .iter()
            .filter_map(|e| match e {
                FleetEvent::Collection(c) => c.delay(),
                _ => None,
            })
            .collect();
        let trips: u64 = self.trucks.iter().map(|t| u64::from(t.trips())).sum();
        let metrics = Metrics {
            total_revenue: self.ledger.total(),
            total_trip_cost: trip_cost(trips, &self.config.tariff),
            total_distance: self.trucks.iter().map(|t| t.odometer()).sum(),
            mean_collection_delay: if delays.is_empty() {
                0.0
            } else {
                delays.iter().sum::<Tick>() as f64 / delays.len() as f64
            },
            max_collection_delay: delays.iter().copied().max().unwrap_or(0),
            total_units_collected: self.ledger.entries().iter().map(|e| e.units).sum(),
            total_units_dumped: self.dumped,
            units_generated: self.generated,
            trips,
        };
        SimResult {
            config: self.config,
            world: self.world,
            records: self.records,
            events: self.events,
            ledger: self.ledger.entries().to_vec(),
            citizens: self.citizens,
            trucks: self.trucks,
            metrics,
        }
    }
}

pub fn init(config: SimConfig) -> Result<Simulation, SimError> {
    Simulation::new(config)
}

pub fn run(config: SimConfig) -> Result<SimResult, SimError> {
    let mut sim = Simulation::new(config)?;
    sim.run_to_end()?;
    Ok(sim.finish())
}
