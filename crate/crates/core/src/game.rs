//! The segments allocation game and brute-force solution oracles.
//!
//! The worth of a coalition of segments is the total toll of the trips that
//! lie entirely inside it. Because trips are contiguous, that worth splits
//! over the maximal runs of consecutive segments in the coalition, which is
//! what lets core membership be decided on intervals alone.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TollError};
use crate::methods::SpsDecomposition;
use crate::scheme::WeightScheme;
use crate::toll::{Allocation, TollMatrix, Trip};
use crate::{scaled_tolerance, DEFAULT_TOLERANCE};

/// Default upper bound on `n` for routines that enumerate all coalitions.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 16;

/// Largest highway a [`Coalition`] bitset can describe.
pub const MAX_SEGMENTS: usize = 64;

/// A set of segments; bit `i - 1` stands for segment `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(pub u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(n: usize) -> Self {
        Coalition::interval(1, n)
    }

    /// `{from, ..., to}`; empty when `from > to`.
    pub fn interval(from: usize, to: usize) -> Self {
        if from > to {
            return Coalition::EMPTY;
        }
        let len = to - from + 1;
        let bits = if len == 64 { u64::MAX } else { ((1u64 << len) - 1) << (from - 1) };
        Coalition(bits)
    }

    pub fn singleton(i: usize) -> Self {
        Coalition(1 << (i - 1))
    }

    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Self {
        Coalition(members.into_iter().fold(0, |acc, i| acc | (1 << (i - 1))))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> (i - 1) & 1 == 1
    }

    pub fn with(&self, i: usize) -> Self {
        Coalition(self.0 | (1 << (i - 1)))
    }

    pub fn without(&self, i: usize) -> Self {
        Coalition(self.0 & !(1 << (i - 1)))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (1..=64).filter(move |i| bits >> (i - 1) & 1 == 1)
    }

    /// Maximal runs of consecutive members as `(from, to)`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut bits = self.0;
        let mut offset = 0;
        while bits != 0 {
            let skip = bits.trailing_zeros() as usize;
            bits >>= skip;
            offset += skip;
            let run = bits.trailing_ones() as usize;
            out.push((offset + 1, offset + run));
            bits = if run == 64 { 0 } else { bits >> run };
            offset += run;
        }
        out
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// The segments allocation game of a toll matrix.
#[derive(Debug)]
pub struct SegmentsGame {
    source: TollMatrix,
    trip_masks: Vec<(u64, f64)>,
    /// `intervals[h-1][k-1]` is the worth of `{h..k}`.
    intervals: Vec<Vec<f64>>,
    limit: usize,
    table: OnceLock<Vec<f64>>,
}

/// Builds the game; fails only when `n` exceeds [`MAX_SEGMENTS`].
pub fn game_from(toll: &TollMatrix) -> Result<SegmentsGame> {
    SegmentsGame::new(toll.clone())
}

impl SegmentsGame {
    pub fn new(source: TollMatrix) -> Result<Self> {
        let n = source.n();
        if n > MAX_SEGMENTS {
            return Err(TollError::TooLarge { n, limit: MAX_SEGMENTS });
        }
        let trip_masks = source.trips().map(|(t, v)| (Coalition::interval(t.entry, t.exit).0, v)).collect();
        let mut intervals = vec![vec![0.0; n]; n];
        for (trip, toll) in source.trips() {
            for h in 1..=trip.entry {
                for k in trip.exit..=n {
                    intervals[h - 1][k - 1] += toll;
                }
            }
        }
        Ok(SegmentsGame { source, trip_masks, intervals, limit: DEFAULT_EXHAUSTIVE_LIMIT, table: OnceLock::new() })
    }

    /// Raises or lowers the enumeration limit (capped at 30).
    pub fn with_exhaustive_limit(mut self, limit: usize) -> Self {
        self.limit = limit.min(30);
        self
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn source(&self) -> &TollMatrix {
        &self.source
    }

    pub fn exhaustive_limit(&self) -> usize {
        self.limit
    }

    /// Worth of the coalition, summing every trip contained in it.
    pub fn value(&self, s: Coalition) -> f64 {
        self.trip_masks.iter().filter(|(m, _)| m & !s.0 == 0).map(|(_, v)| v).sum()
    }

    /// Worth of `{from..to}`; zero when empty.
    pub fn interval_value(&self, from: usize, to: usize) -> f64 {
        if from > to {
            0.0
        } else {
            self.intervals[from - 1][to - 1]
        }
    }

    /// Worth assembled from the maximal consecutive blocks of `s`.
    pub fn value_by_blocks(&self, s: Coalition) -> f64 {
        s.blocks().into_iter().map(|(a, b)| self.interval_value(a, b)).sum()
    }

    pub fn grand_value(&self) -> f64 {
        self.interval_value(1, self.n())
    }

    fn require_exhaustive(&self) -> Result<()> {
        if self.n() > self.limit {
            return Err(TollError::TooLarge { n: self.n(), limit: self.limit });
        }
        Ok(())
    }

    /// Worth of every coalition indexed by its bitset, computed once and
    /// shared between threads.
    pub fn table(&self) -> Result<&[f64]> {
        self.require_exhaustive()?;
        Ok(self.table.get_or_init(|| {
            (0..1u64 << self.n()).into_par_iter().map(|s| self.value_by_blocks(Coalition(s))).collect()
        }))
    }
}

/// Shapley value by full enumeration of coalitions.
pub fn shapley_oracle(game: &SegmentsGame) -> Result<Allocation> {
    let v = game.table()?;
    let n = game.n();
    // p(s) = s! (n - s - 1)! / n!
    let mut weight = vec![0.0; n];
    for (s, w) in weight.iter_mut().enumerate() {
        let mut p = 1.0 / n as f64;
        // 1 / (n * C(n-1, s))
        for j in 0..s {
            p *= (j + 1) as f64 / (n - 1 - j) as f64;
        }
        *w = p;
    }
    let x = (1..=n)
        .into_par_iter()
        .map(|i| {
            let bit = 1u64 << (i - 1);
            (0..1u64 << n)
                .filter(|s| s & bit == 0)
                .map(|s| weight[s.count_ones() as usize] * (v[(s | bit) as usize] - v[s as usize]))
                .sum::<f64>()
        })
        .collect();
    Ok(Allocation::from_raw(x))
}

/// Utopia payoffs and minimal rights of a game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompromiseBounds {
    /// `v(N) - v(N \ {i})`.
    pub utopia: Vec<f64>,
    /// `max over S containing i of v(S) - sum of utopia over S \ {i}`.
    pub minimal_rights: Vec<f64>,
}

pub fn compromise_bounds(game: &SegmentsGame) -> Result<CompromiseBounds> {
    let v = game.table()?;
    let n = game.n();
    let full = (1u64 << n) - 1;
    let utopia: Vec<f64> = (0..n).map(|i| v[full as usize] - v[(full & !(1 << i)) as usize]).collect();
    let mut utopia_sum = vec![0.0; 1 << n];
    for s in 1..1usize << n {
        let low = s.trailing_zeros() as usize;
        utopia_sum[s] = utopia_sum[s & (s - 1)] + utopia[low];
    }
    let minimal_rights = (0..n)
        .into_par_iter()
        .map(|i| {
            let bit = 1usize << i;
            (0..1usize << n)
                .filter(|s| s & bit != 0)
                .map(|s| v[s] - (utopia_sum[s] - utopia[i]))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(CompromiseBounds { utopia, minimal_rights })
}

/// The tau-value: the efficient point on the segment from minimal rights to
/// utopia payoffs.
pub fn tau_oracle(game: &SegmentsGame) -> Result<Allocation> {
    let bounds = compromise_bounds(game)?;
    let grand = game.grand_value();
    let tol = scaled_tolerance(DEFAULT_TOLERANCE, grand);
    let sum_m: f64 = bounds.minimal_rights.iter().sum();
    let sum_big: f64 = bounds.utopia.iter().sum();
    let spread = sum_big - sum_m;
    if spread.abs() <= tol {
        if (sum_m - grand).abs() <= tol {
            return Ok(Allocation::from_raw(bounds.minimal_rights));
        }
        return Err(TollError::TauUndefined);
    }
    let alpha = (grand - sum_m) / spread;
    let x = bounds.minimal_rights.iter().zip(&bounds.utopia).map(|(m, big)| m + alpha * (big - m)).collect();
    Ok(Allocation::from_raw(x))
}

/// Average tree solution of the line-graph game, evaluated on the four
/// interval worths around each segment.
pub fn at_oracle(game: &SegmentsGame) -> Allocation {
    let n = game.n();
    let nf = n as f64;
    let grand = game.grand_value();
    let x = (1..=n)
        .map(|i| {
            let left = game.interval_value(1, i - 1);
            let right = game.interval_value(i + 1, n);
            let right_with = game.interval_value(i, n);
            let left_with = game.interval_value(1, i);
            ((i - 1) as f64 * (right_with - right) + (grand - left - right) + (n - i) as f64 * (left_with - left)) / nf
        })
        .collect();
    Allocation::from_raw(x)
}

/// An interval whose segments receive less than the trips inside it collect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreViolation {
    pub entry: usize,
    pub exit: usize,
    pub value: f64,
    pub allocated: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreReport {
    pub is_member: bool,
    pub efficient: bool,
    pub efficiency_gap: f64,
    pub violated: Vec<CoreViolation>,
}

impl CoreReport {
    pub fn worst(&self) -> Option<&CoreViolation> {
        self.violated.iter().max_by(|a, b| a.deficit.total_cmp(&b.deficit))
    }
}

/// Core membership checked on the `n(n+1)/2` intervals.
///
/// Suffices for nonnegative allocations because worth is additive over the
/// consecutive blocks of a coalition.
pub fn core_check(game: &SegmentsGame, x: &Allocation) -> Result<CoreReport> {
    core_check_with(game, x, DEFAULT_TOLERANCE)
}

pub fn core_check_with(game: &SegmentsGame, x: &Allocation, tol: f64) -> Result<CoreReport> {
    let n = game.n();
    if x.len() != n {
        return Err(TollError::LengthMismatch { expected: n, got: x.len() });
    }
    let grand = game.grand_value();
    let tol = scaled_tolerance(tol, grand);
    let efficiency_gap = x.total() - grand;
    let efficient = efficiency_gap.abs() <= tol;
    let mut violated = Vec::new();
    for entry in 1..=n {
        let mut allocated = 0.0;
        for exit in entry..=n {
            allocated += x.share(exit);
            let value = game.interval_value(entry, exit);
            if allocated < value - tol {
                violated.push(CoreViolation { entry, exit, value, allocated, deficit: value - allocated });
            }
        }
    }
    Ok(CoreReport { is_member: efficient && violated.is_empty(), efficient, efficiency_gap, violated })
}

/// Core membership checked against every coalition. Verification-only;
/// exponential in `n`.
pub fn core_check_exhaustive(game: &SegmentsGame, x: &Allocation, tol: f64) -> Result<bool> {
    let n = game.n();
    if x.len() != n {
        return Err(TollError::LengthMismatch { expected: n, got: x.len() });
    }
    game.require_exhaustive()?;
    let grand = game.grand_value();
    let tol = scaled_tolerance(tol, grand);
    if (x.total() - grand).abs() > tol {
        return Ok(false);
    }
    let mut sums = vec![0.0; 1 << n];
    for s in 1..1usize << n {
        sums[s] = sums[s & (s - 1)] + x.as_slice()[s.trailing_zeros() as usize];
    }
    Ok((1..(1usize << n) - 1).all(|s| sums[s] >= game.value(Coalition(s as u64)) - tol))
}

/// Outcome of the interval condition on `beta` for SPS core membership.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpsCoreCriterion {
    pub satisfied: bool,
    pub beta: Option<f64>,
    /// Proper interval with the largest right-hand side, if any has a
    /// positive denominator.
    pub worst_interval: Option<Trip>,
    pub rhs_max: Option<f64>,
}

/// SPS is in the core iff `beta` dominates, on every proper interval `S`
/// with positive non-separable involvement, the ratio of the multi-segment
/// toll collected inside `S` to the multi-segment toll carried by `S`.
pub fn sps_core_criterion(toll: &TollMatrix) -> SpsCoreCriterion {
    sps_core_criterion_with(toll, DEFAULT_TOLERANCE)
}

pub fn sps_core_criterion_with(toll: &TollMatrix, tol: f64) -> SpsCoreCriterion {
    let parts = SpsDecomposition::of(toll);
    let Some(beta) = parts.beta else {
        return SpsCoreCriterion { satisfied: true, beta: None, worst_interval: None, rhs_max: None };
    };
    let n = toll.n();
    let mut worst: Option<(Trip, f64)> = None;
    for entry in 1..=n {
        for exit in entry..=n {
            if entry == 1 && exit == n {
                continue;
            }
            let carried: f64 = parts.nonseparable[entry - 1..exit].iter().sum();
            if carried <= 0.0 {
                continue;
            }
            let own: f64 = parts.separable[entry - 1..exit].iter().sum();
            let ratio = (toll.interval_value(entry, exit) - own) / carried;
            if worst.is_none_or(|(_, r)| ratio > r) {
                worst = Some((Trip::new(entry, exit), ratio));
            }
        }
    }
    let satisfied = worst.is_none_or(|(_, r)| beta >= r - scaled_tolerance(tol, beta));
    SpsCoreCriterion { satisfied, beta: Some(beta), worst_interval: worst.map(|w| w.0), rhs_max: worst.map(|w| w.1) }
}

/// Whether `scheme` certifies core membership at size `n`: toll-independent
/// weights that sum to one over the segments of every trip.
///
/// Every trip is checked, whether or not a given matrix charges it.
pub fn core_scheme_check(scheme: &dyn WeightScheme, n: usize) -> bool {
    if !scheme.t_independent() || n == 0 {
        return false;
    }
    let Ok(zero) = TollMatrix::zero(n) else { return false };
    let weights = scheme.bind(&zero);
    (1..=n).all(|h| {
        (h..=n).all(|k| {
            let trip = Trip::new(h, k);
            let sum: f64 = trip.segments().map(|i| weights(trip, i)).sum();
            (sum - 1.0).abs() <= DEFAULT_TOLERANCE && trip.segments().all(|i| weights(trip, i) >= 0.0)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sps_outside_core_example, three_segment_example};
    use crate::methods::{scs, ses, sps};
    use crate::scheme::{BuiltinScheme, FnScheme};

    fn close(x: &Allocation, y: &[f64], tol: f64) -> bool {
        x.as_slice().iter().zip(y).all(|(a, b)| (a - b).abs() <= tol)
    }

    #[test]
    fn coalition_blocks() {
        assert_eq!(Coalition::from_members([1, 2, 4, 6, 7, 8]).blocks(), vec![(1, 2), (4, 4), (6, 8)]);
        assert_eq!(Coalition::full(64).blocks(), vec![(1, 64)]);
        assert!(Coalition::EMPTY.blocks().is_empty());
        assert_eq!(Coalition::interval(2, 3).to_string(), "{2,3}");
    }

    #[test]
    fn values() {
        let g = game_from(&three_segment_example()).unwrap();
        assert_eq!(g.value(Coalition::from_members([1, 2])), 1.0);
        assert_eq!(g.value(Coalition::full(3)), 2.0);
        assert_eq!(g.value(Coalition::EMPTY), 0.0);
        let g = game_from(&sps_outside_core_example()).unwrap();
        assert!((g.value(Coalition::from_members([1, 2])) - 7.5).abs() < 1e-12);
    }

    #[test]
    fn oracles_on_three_segment_example() {
        let t = three_segment_example();
        let g = game_from(&t).unwrap();
        assert!(close(&shapley_oracle(&g).unwrap(), &[5.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0], 1e-12));
        assert!(close(&tau_oracle(&g).unwrap(), &[0.8, 0.8, 0.4], 1e-12));
        assert!(close(&at_oracle(&g), &[2.0 / 3.0, 1.0, 1.0 / 3.0], 1e-12));
    }

    #[test]
    fn single_player() {
        let t = TollMatrix::from_triplets([(1, 1, 3.5)], Some(1)).unwrap();
        let g = game_from(&t).unwrap();
        assert_eq!(shapley_oracle(&g).unwrap().as_slice(), &[3.5]);
        assert_eq!(tau_oracle(&g).unwrap().as_slice(), &[3.5]);
        assert_eq!(at_oracle(&g).as_slice(), &[3.5]);
    }

    #[test]
    fn tau_on_additive_game() {
        let t = TollMatrix::from_triplets([(1, 1, 1.0), (2, 2, 2.0), (3, 3, 4.0)], Some(3)).unwrap();
        let g = game_from(&t).unwrap();
        assert_eq!(tau_oracle(&g).unwrap().as_slice(), &[1.0, 2.0, 4.0]);
        let z = game_from(&TollMatrix::zero(3).unwrap()).unwrap();
        assert_eq!(tau_oracle(&z).unwrap().as_slice(), &[0.0; 3]);
    }

    #[test]
    fn tau_matches_sps_outside_core_example() {
        let t = sps_outside_core_example();
        let g = game_from(&t).unwrap();
        assert!(tau_oracle(&g).unwrap().max_abs_diff(&sps(&t)) < 1e-9);
    }

    #[test]
    fn too_large() {
        let t = TollMatrix::zero(20).unwrap();
        let g = game_from(&t).unwrap();
        assert!(matches!(shapley_oracle(&g), Err(TollError::TooLarge { n: 20, limit: 16 })));
        let g = g.with_exhaustive_limit(20);
        assert_eq!(g.exhaustive_limit(), 20);
        assert!(game_from(&TollMatrix::zero(65).unwrap()).is_err());
    }

    #[test]
    fn core_reports() {
        let t = three_segment_example();
        let g = game_from(&t).unwrap();
        assert!(core_check(&g, &ses(&t)).unwrap().is_member);
        assert!(core_check(&g, &scs(&t)).unwrap().is_member);

        let t = sps_outside_core_example();
        let g = game_from(&t).unwrap();
        let report = core_check(&g, &sps(&t)).unwrap();
        assert!(!report.is_member);
        assert!(report.efficient);
        let v = report.violated.iter().find(|v| v.entry == 1 && v.exit == 2).unwrap();
        assert!((v.value - 7.5).abs() < 1e-12);
        assert!((v.allocated - 7.318).abs() < 1e-3);
        assert!((v.deficit - 0.182).abs() < 1e-3);

        let z = game_from(&TollMatrix::zero(3).unwrap()).unwrap();
        assert!(core_check(&z, &Allocation::zeros(3)).unwrap().is_member);
        assert!(matches!(core_check(&z, &Allocation::zeros(2)), Err(TollError::LengthMismatch { .. })));
    }

    #[test]
    fn sps_criterion() {
        let c = sps_core_criterion(&sps_outside_core_example());
        assert!(!c.satisfied);
        assert_eq!(c.worst_interval, Some(Trip::new(1, 2)));
        let c = sps_core_criterion(&TollMatrix::from_triplets([(2, 2, 1.0)], Some(3)).unwrap());
        assert!(c.satisfied);
        assert_eq!(c.beta, None);
    }

    #[test]
    fn scheme_certificates() {
        for n in 1..=12 {
            assert!(core_scheme_check(&BuiltinScheme::Ses, n));
            assert!(core_scheme_check(&BuiltinScheme::Scs, n));
            assert!(!core_scheme_check(&BuiltinScheme::Sps, n));
        }
        let half = FnScheme::new("half", |_, _, _| 0.5);
        assert!(!core_scheme_check(&half, 3));
    }

    #[test]
    fn utopia_is_involvement() {
        let t = crate::generate::random_matrix(6, 0.6, 5.0, 3).unwrap();
        let g = game_from(&t).unwrap();
        let b = compromise_bounds(&g).unwrap();
        for (m, inv) in b.utopia.iter().zip(t.involvement()) {
            assert!((m - inv).abs() < 1e-9);
        }
    }
}
