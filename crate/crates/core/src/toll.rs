//! One-way toll matrices and allocation vectors.
//!
//! Segments are numbered `1..=n` along the direction of travel. A trip
//! `[h,k]` enters at segment `h` and leaves at the exit of segment `k`, so it
//! uses every segment in `h..=k`. Only trips with a nonzero toll are stored.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TollError};

/// A trip `[entry, exit]` over the contiguous segments `entry..=exit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trip {
    pub entry: usize,
    pub exit: usize,
}

impl Trip {
    /// Panics if `entry > exit` or `entry == 0`.
    pub fn new(entry: usize, exit: usize) -> Self {
        assert!(entry >= 1 && entry <= exit, "invalid trip [{entry},{exit}]");
        Trip { entry, exit }
    }

    pub fn checked(entry: usize, exit: usize, n: usize) -> Result<Self> {
        if entry == 0 || entry > exit || exit > n {
            return Err(TollError::IndexOutOfRange { entry, exit, n });
        }
        Ok(Trip { entry, exit })
    }

    /// Number of segments used.
    pub fn segment_count(&self) -> usize {
        self.exit - self.entry + 1
    }

    pub fn is_single_segment(&self) -> bool {
        self.entry == self.exit
    }

    pub fn contains(&self, segment: usize) -> bool {
        self.entry <= segment && segment <= self.exit
    }

    /// Whether the trip lies inside the interval `[from, to]`.
    pub fn within(&self, from: usize, to: usize) -> bool {
        from <= self.entry && self.exit <= to
    }

    /// Whether the trip uses both segment `cut` and segment `cut + 1`.
    pub fn crosses(&self, cut: usize) -> bool {
        self.entry <= cut && cut < self.exit
    }

    pub fn segments(&self) -> std::ops::RangeInclusive<usize> {
        self.entry..=self.exit
    }
}

impl fmt::Display for Trip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.entry, self.exit)
    }
}

fn check_toll(entry: usize, exit: usize, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(TollError::NonFinite { entry, exit });
    }
    if value < 0.0 {
        return Err(TollError::NegativeToll { entry, exit, value });
    }
    Ok(())
}

/// Upper-triangular nonnegative matrix of tolls collected per trip.
///
/// Immutable once built; the combinators return new matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TollMatrix {
    n: usize,
    tolls: BTreeMap<Trip, f64>,
}

impl TollMatrix {
    /// The all-zero highway with `n` segments.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(TollError::EmptyHighway);
        }
        Ok(TollMatrix { n, tolls: BTreeMap::new() })
    }

    /// Validates a dense `n x n` grid where row `h`, column `k` holds `t_hk`.
    pub fn from_dense<R: AsRef<[f64]>>(grid: &[R]) -> Result<Self> {
        let n = grid.len();
        if n == 0 {
            return Err(TollError::EmptyHighway);
        }
        let mut tolls = BTreeMap::new();
        for (h, row) in grid.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(TollError::NotSquare { row: h + 1, cols: row.len(), expected: n });
            }
            for (k, &value) in row.iter().enumerate() {
                let (entry, exit) = (h + 1, k + 1);
                check_toll(entry, exit, value)?;
                if value == 0.0 {
                    continue;
                }
                if entry > exit {
                    return Err(TollError::LowerTriangularNonzero { entry, exit });
                }
                tolls.insert(Trip { entry, exit }, value);
            }
        }
        Ok(TollMatrix { n, tolls })
    }

    /// Builds a matrix from 1-based `(entry, exit, toll)` rows.
    ///
    /// `n` defaults to the largest exit index. Zero tolls are accepted but
    /// not stored; a repeated trip is rejected even when one copy is zero.
    pub fn from_triplets<I>(rows: I, n: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let rows: Vec<_> = rows.into_iter().collect();
        let n = match n {
            Some(n) => n,
            None => rows.iter().map(|r| r.1).max().unwrap_or(0),
        };
        if n == 0 {
            return Err(TollError::EmptyHighway);
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut tolls = BTreeMap::new();
        for (entry, exit, value) in rows {
            if entry > exit && entry <= n && exit >= 1 && value != 0.0 {
                return Err(TollError::LowerTriangularNonzero { entry, exit });
            }
            let trip = Trip::checked(entry, exit, n)?;
            check_toll(entry, exit, value)?;
            if !seen.insert(trip) {
                return Err(TollError::DuplicateTrip { entry, exit });
            }
            if value != 0.0 {
                tolls.insert(trip, value);
            }
        }
        Ok(TollMatrix { n, tolls })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Toll on trip `[entry, exit]`; zero for unused or lower-triangular cells.
    pub fn get(&self, entry: usize, exit: usize) -> f64 {
        if entry > exit {
            return 0.0;
        }
        self.tolls.get(&Trip { entry, exit }).copied().unwrap_or(0.0)
    }

    pub fn toll(&self, trip: Trip) -> f64 {
        self.tolls.get(&trip).copied().unwrap_or(0.0)
    }

    /// Positive trips in `(entry, exit)` order.
    pub fn trips(&self) -> impl Iterator<Item = (Trip, f64)> + '_ {
        self.tolls.iter().map(|(t, v)| (*t, *v))
    }

    pub fn trip_count(&self) -> usize {
        self.tolls.len()
    }

    pub fn total(&self) -> f64 {
        self.tolls.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.tolls.is_empty()
    }

    /// `t_ii` for every segment.
    pub fn diagonal(&self) -> Vec<f64> {
        (1..=self.n).map(|i| self.get(i, i)).collect()
    }

    /// Total toll of trips that use segment `i`, for every `i`.
    pub fn involvement(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (trip, toll) in self.trips() {
            for i in trip.segments() {
                out[i - 1] += toll;
            }
        }
        out
    }

    /// Total toll of trips lying inside `[from, to]`; zero for an empty interval.
    pub fn interval_value(&self, from: usize, to: usize) -> f64 {
        if from > to {
            return 0.0;
        }
        self.trips().filter(|(t, _)| t.within(from, to)).map(|(_, v)| v).sum()
    }

    /// Whether no segment in `[from, to]` is used by a trip that leaves it.
    pub fn is_subhighway(&self, from: usize, to: usize) -> bool {
        self.trips().all(|(t, _)| {
            let overlaps = t.entry <= to && from <= t.exit;
            !overlaps || t.within(from, to)
        })
    }

    /// Whether segment `i` is used by no positive trip.
    pub fn is_inessential(&self, segment: usize) -> bool {
        !self.trips().any(|(t, _)| t.contains(segment))
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut grid = vec![vec![0.0; self.n]; self.n];
        for (trip, toll) in self.trips() {
            grid[trip.entry - 1][trip.exit - 1] = toll;
        }
        grid
    }

    /// Replaces the toll on `trip`.
    pub fn with_toll(&self, trip: Trip, value: f64) -> Result<Self> {
        if trip.exit > self.n {
            return Err(TollError::IndexOutOfRange { entry: trip.entry, exit: trip.exit, n: self.n });
        }
        check_toll(trip.entry, trip.exit, value)?;
        let mut tolls = self.tolls.clone();
        if value == 0.0 {
            tolls.remove(&trip);
        } else {
            tolls.insert(trip, value);
        }
        Ok(TollMatrix { n: self.n, tolls })
    }

    /// Keeps only the trips for which `keep` returns true.
    pub fn filter(&self, mut keep: impl FnMut(Trip, f64) -> bool) -> Self {
        let tolls = self.tolls.iter().filter(|(t, v)| keep(**t, **v)).map(|(t, v)| (*t, *v)).collect();
        TollMatrix { n: self.n, tolls }
    }

    /// `b * self + b2 * other` for nonnegative finite scalars.
    pub fn combine(&self, b: f64, other: &TollMatrix, b2: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(TollError::SizeMismatch { left: self.n, right: other.n });
        }
        let mut tolls: BTreeMap<Trip, f64> = BTreeMap::new();
        for (trip, v) in self.trips() {
            *tolls.entry(trip).or_default() += b * v;
        }
        for (trip, v) in other.trips() {
            *tolls.entry(trip).or_default() += b2 * v;
        }
        for (trip, v) in &tolls {
            check_toll(trip.entry, trip.exit, *v)?;
        }
        tolls.retain(|_, v| *v != 0.0);
        Ok(TollMatrix { n: self.n, tolls })
    }

    /// Entrywise sum.
    pub fn plus(&self, other: &TollMatrix) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn scaled(&self, b: f64) -> Result<Self> {
        let zero = TollMatrix { n: self.n, tolls: BTreeMap::new() };
        self.combine(b, &zero, 0.0)
    }

    /// The single unit-toll trip if this is a unitary toll matrix.
    pub fn as_unit(&self) -> Option<UnitTollMatrix> {
        let mut it = self.tolls.iter();
        match (it.next(), it.next()) {
            (Some((trip, 1.0)), None) => Some(UnitTollMatrix { n: self.n, trip: *trip }),
            _ => None,
        }
    }
}

/// Toll matrix with a single unit toll on one trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitTollMatrix {
    n: usize,
    trip: Trip,
}

impl UnitTollMatrix {
    pub fn new(n: usize, trip: Trip) -> Result<Self> {
        Trip::checked(trip.entry, trip.exit, n)?;
        Ok(UnitTollMatrix { n, trip })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trip(&self) -> Trip {
        self.trip
    }

    pub fn to_matrix(&self) -> TollMatrix {
        let mut tolls = BTreeMap::new();
        tolls.insert(self.trip, 1.0);
        TollMatrix { n: self.n, tolls }
    }
}

impl From<UnitTollMatrix> for TollMatrix {
    fn from(u: UnitTollMatrix) -> Self {
        u.to_matrix()
    }
}

/// Nonnegative per-segment toll shares; index 0 holds segment 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(Vec<f64>);

impl Allocation {
    pub fn new(shares: Vec<f64>) -> Result<Self> {
        for (i, &v) in shares.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(TollError::InvalidShare { segment: i + 1, value: v });
            }
        }
        Ok(Allocation(shares))
    }

    /// Methods in this crate produce nonnegative shares by construction.
    pub(crate) fn from_raw(shares: Vec<f64>) -> Self {
        debug_assert!(shares.iter().all(|v| v.is_finite() && *v >= -1e-12), "{shares:?}");
        Allocation(shares.into_iter().map(|v| v.max(0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Allocation(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Share of 1-based `segment`.
    pub fn share(&self, segment: usize) -> f64 {
        self.0[segment - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sum of shares over `[from, to]`.
    pub fn interval_sum(&self, from: usize, to: usize) -> f64 {
        if from > to {
            return 0.0;
        }
        self.0[from - 1..to].iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Allocation) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(if self.len() == other.len() { 0.0 } else { f64::INFINITY }, f64::max)
    }
}
