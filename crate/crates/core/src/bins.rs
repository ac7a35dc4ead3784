//! Bin fill dynamics and the green/yellow/red monitoring state machine.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::world::VertexId;

pub type Tick = u64;

pub const DEFAULT_BIN_CAPACITY: u32 = 25;
pub const DEFAULT_YELLOW_THRESHOLD: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BinError {
    #[error("thresholds must satisfy 0 < yellow_threshold ({yellow}) < capacity ({capacity})")]
    InvalidThresholds { yellow: u32, capacity: u32 },
    #[error("fill probability {rate} for bin {bin} is outside [0, 1]")]
    InvalidRate { bin: usize, rate: f64 },
    #[error("fill model has {rates} rates for {bins} bins")]
    RateCountMismatch { rates: usize, bins: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinState {
    Green,
    Yellow,
    Red,
}

impl BinState {
    pub fn as_str(self) -> &'static str {
        match self {
            BinState::Green => "green",
            BinState::Yellow => "yellow",
            BinState::Red => "red",
        }
    }
}

impl fmt::Display for BinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Yellow alert level and full level of a bin, validated together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    yellow: u32,
    capacity: u32,
}

impl Thresholds {
    pub fn new(yellow: u32, capacity: u32) -> Result<Self, BinError> {
        if yellow == 0 || yellow >= capacity {
            return Err(BinError::InvalidThresholds { yellow, capacity });
        }
        Ok(Self { yellow, capacity })
    }

    pub fn yellow(&self) -> u32 {
        self.yellow
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn classify(&self, level: u32) -> BinState {
        if level >= self.capacity {
            BinState::Red
        } else if level >= self.yellow {
            BinState::Yellow
        } else {
            BinState::Green
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            yellow: DEFAULT_YELLOW_THRESHOLD,
            capacity: DEFAULT_BIN_CAPACITY,
        }
    }
}

pub fn classify_state(
    level: u32,
    yellow_threshold: u32,
    capacity: u32,
) -> Result<BinState, BinError> {
    Ok(Thresholds::new(yellow_threshold, capacity)?.classify(level))
}

#[derive(Clone, Debug, PartialEq)]
pub enum FillModel {
    /// One unit per tick.
    DeterministicUnit,
    /// One unit per tick with probability `rates[bin id]`.
    BernoulliPerBin { rates: Vec<f64> },
}

impl FillModel {
    pub fn bernoulli(rates: Vec<f64>) -> Result<Self, BinError> {
        if let Some((bin, &rate)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(0.0..=1.0).contains(*r))
        {
            return Err(BinError::InvalidRate { bin, rate });
        }
        Ok(FillModel::BernoulliPerBin { rates })
    }

    pub fn check_bins(&self, bins: usize) -> Result<(), BinError> {
        match self {
            FillModel::BernoulliPerBin { rates } if rates.len() != bins => {
                Err(BinError::RateCountMismatch {
                    rates: rates.len(),
                    bins,
                })
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bin {
    pub id: usize,
    pub vertex: VertexId,
    pub owner: usize,
    thresholds: Thresholds,
    level: u32,
    state: BinState,
    full_since: Option<Tick>,
}

impl Bin {
    /// An empty green bin.
    pub fn new(id: usize, vertex: VertexId, owner: usize, thresholds: Thresholds) -> Self {
        Self {
            id,
            vertex,
            owner,
            thresholds,
            level: 0,
            state: BinState::Green,
            full_since: None,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn state(&self) -> BinState {
        self.state
    }

    pub fn capacity(&self) -> u32 {
        self.thresholds.capacity
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    /// First tick the bin reached capacity since it was last emptied.
    pub fn full_since(&self) -> Option<Tick> {
        self.full_since
    }

    pub fn is_full(&self) -> bool {
        self.state == BinState::Red
    }

    /// Adds up to `units`, saturating at capacity. Returns the units accepted.
    pub fn deposit(&mut self, units: u32, tick: Tick) -> u32 {
        let accepted = units.min(self.capacity() - self.level);
        self.level += accepted;
        self.state = self.thresholds.classify(self.level);
        if self.state == BinState::Red && self.full_since.is_none() {
            self.full_since = Some(tick);
        }
        accepted
    }

    /// One tick of fill. Bernoulli models draw exactly one uniform value per
    /// call, saturated or not. Returns the units added.
    pub fn step<R: Rng + ?Sized>(&mut self, model: &FillModel, rng: &mut R, tick: Tick) -> u32 {
        let grow = match model {
            FillModel::DeterministicUnit => true,
            FillModel::BernoulliPerBin { rates } => rng.gen::<f64>() < rates[self.id],
        };
        if grow {
            self.deposit(1, tick)
        } else {
            0
        }
    }

    /// Resets to level 0 / green and returns the units removed.
    pub fn empty(&mut self) -> u32 {
        let removed = self.level;
        self.level = 0;
        self.state = BinState::Green;
        self.full_since = None;
        removed
    }
}

/// Value-style form of [`Bin::step`].
pub fn step_bin<R: Rng + ?Sized>(mut bin: Bin, model: &FillModel, rng: &mut R, tick: Tick) -> Bin {
    bin.step(model, rng, tick);
    bin
}

/// Value-style form of [`Bin::empty`].
pub fn empty_bin(mut bin: Bin) -> (Bin, u32) {
    let removed = bin.empty();
    (bin, removed)
}
