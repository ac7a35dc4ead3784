//! Citizens, tariffs and the revenue ledger.
//!
//! Each collection bills the bin's owner `units × price_per_unit`; the run
//! total is the sum over all collections. Truck trips cost a constant amount
//! each. All currency is whole UC.

use std::f64::consts::TAU;

use rand::Rng;

use crate::bins::Tick;
use crate::world::{Bounds, Position};

pub type Uc = u64;

pub const DEFAULT_PRICE_PER_UNIT: Uc = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tariff {
    pub price_per_unit: Uc,
    pub fixed_trip_cost: Uc,
}

impl Default for Tariff {
    fn default() -> Self {
        Self {
            price_per_unit: DEFAULT_PRICE_PER_UNIT,
            fixed_trip_cost: 0,
        }
    }
}

pub fn charge(units: u64, tariff: &Tariff) -> Uc {
    units * tariff.price_per_unit
}

pub fn trip_cost(trips: u64, tariff: &Tariff) -> Uc {
    trips * tariff.fixed_trip_cost
}

#[derive(Clone, Debug, PartialEq)]
pub struct Citizen {
    pub id: usize,
    pub position: Position<f64>,
    pub owned_bin: usize,
    pub balance_paid: Uc,
    pub step_length: f64,
}

impl Citizen {
    pub fn new(id: usize, position: Position<f64>, owned_bin: usize, step_length: f64) -> Self {
        Self {
            id,
            position,
            owned_bin,
            balance_paid: 0,
            step_length,
        }
    }

    /// One step of `step_length` in a uniformly random heading, clamped to
    /// `bounds`. Always consumes one draw.
    pub fn wander<R: Rng + ?Sized>(&mut self, rng: &mut R, bounds: &Bounds<f64>) {
        let heading = rng.gen_range(0.0..TAU);
        let moved = Position::new(
            self.position.x + self.step_length * heading.cos(),
            self.position.y + self.step_length * heading.sin(),
        );
        self.position = bounds.clamp(moved);
    }
}

pub fn move_citizen<R: Rng + ?Sized>(
    mut citizen: Citizen,
    rng: &mut R,
    bounds: &Bounds<f64>,
) -> Citizen {
    citizen.wander(rng, bounds);
    citizen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub tick: Tick,
    pub bin: usize,
    pub citizen: usize,
    pub units: u64,
    pub amount: Uc,
}

pub fn total_revenue(entries: &[LedgerEntry]) -> Uc {
    entries.iter().map(|e| e.amount).sum()
}

/// Append-only record of charges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ledger {
    entries: Vec<LedgerEntry>,
    total: Uc,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bills `citizen` for `units` collected from `bin`.
    pub fn record(
        &mut self,
        tick: Tick,
        bin: usize,
        citizen: &mut Citizen,
        units: u64,
        tariff: &Tariff,
    ) -> LedgerEntry {
        let amount = charge(units, tariff);
        let entry = LedgerEntry {
            tick,
            bin,
            citizen: citizen.id,
            units,
            amount,
        };
        citizen.balance_paid += amount;
        self.total += amount;
        self.entries.push(entry);
        entry
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn total(&self) -> Uc {
        self.total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P500: Tariff = Tariff {
        price_per_unit: 500,
        fixed_trip_cost: 0,
    };

    #[test]
    fn charges() {
        assert_eq!(charge(0, &P500), 0);
        assert_eq!(charge(25, &P500), 12_500);
        let total: Uc = (0..8).map(|_| charge(25, &P500)).sum();
        assert_eq!(total, 100_000);
    }

    #[test]
    fn eight_full_bins_ledger() {
        let mut ledger = Ledger::new();
        let mut citizens: Vec<Citizen> = (0..8)
            .map(|i| Citizen::new(i, Position::new(0.0, 0.0), i, 1.0))
            .collect();
        for (i, c) in citizens.iter_mut().enumerate() {
            ledger.record(53, i, c, 25, &P500);
        }
        assert_eq!(total_revenue(ledger.entries()), 100_000);
        assert_eq!(ledger.total(), 100_000);
        assert!(citizens.iter().all(|c| c.balance_paid == 12_500));
        assert_eq!(total_revenue(&[]), 0);
    }

    #[test]
    fn trip_costs() {
        let t = Tariff {
            price_per_unit: 500,
            fixed_trip_cost: 1_000,
        };
        assert_eq!(trip_cost(0, &t), 0);
        assert_eq!(trip_cost(3, &t), 3_000);
        assert_eq!(trip_cost(3, &P500), 0);
    }

    #[test]
    fn standing_still() {
        let bounds = Bounds::square(12.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = Citizen::new(0, Position::new(3.0, -2.0), 0, 0.0);
        assert_eq!(
            move_citizen(c, &mut rng, &bounds).position,
            Position::new(3.0, -2.0)
        );
    }

    #[test]
    fn walk_is_reproducible_and_bounded() {
        let bounds = Bounds::square(2.0);
        let walk = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = Citizen::new(0, Position::new(1.5, 1.5), 0, 0.75);
            (0..500)
                .map(|_| {
                    c.wander(&mut rng, &bounds);
                    assert!(bounds.contains(&c.position));
                    c.position
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(walk(11), walk(11));
    }

    proptest! {
        #[test]
        fn revenue_is_additive(units in proptest::collection::vec(0u64..100, 0..40), split in 0usize..40, p in 0u64..10_000) {
            let tariff = Tariff { price_per_unit: p, fixed_trip_cost: 0 };
            let entries: Vec<LedgerEntry> = units
                .iter()
                .enumerate()
                .map(|(i, &u)| LedgerEntry { tick: i as u64, bin: i, citizen: i, units: u, amount: charge(u, &tariff) })
                .collect();
            let k = split.min(entries.len());
            let (a, b) = entries.split_at(k);
            prop_assert_eq!(total_revenue(&entries), total_revenue(a) + total_revenue(b));
            prop_assert_eq!(total_revenue(&entries), charge(units.iter().sum(), &tariff));
        }
    }
}
