//! Executable checks for the allocation axioms.
//!
//! Every axiom is phrased as an equality between two vectors computed from a
//! concrete [`Instance`] (a toll matrix plus whatever auxiliary matrices or
//! parameters the axiom quantifies over). A check evaluates an allocation
//! rule on many instances and fails as soon as one gap exceeds the
//! tolerance. Instances come from seeded generators, or are enumerated
//! exhaustively where the quantified set is finite (cuts, intervals,
//! unitary matrices). A failing verdict keeps the instance as a witness, and
//! replaying the witness reproduces the reported gap bit for bit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counterexamples::Counterexample;
use crate::error::{Result, TollError};
use crate::fixtures::three_segment_example;
use crate::generate::{block_structured_matrix_with, random_matrix_with, Block};
use crate::methods::{AllocationRule, Method};
use crate::toll::{TollMatrix, Trip, UnitTollMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Efficiency,
    Additivity,
    Linearity,
    Covariance,
    InessentialSegment,
    WeakSegmentSymmetry,
    SegmentSymmetry,
    WeightedSegmentSymmetry,
    TollFairness,
    TollComponentFairness,
    SubhighwayEfficiency,
    IndifferenceToExtensions,
}

impl Axiom {
    pub const ALL: [Axiom; 12] = [
        Axiom::Efficiency,
        Axiom::Additivity,
        Axiom::Linearity,
        Axiom::Covariance,
        Axiom::InessentialSegment,
        Axiom::WeakSegmentSymmetry,
        Axiom::SegmentSymmetry,
        Axiom::WeightedSegmentSymmetry,
        Axiom::TollFairness,
        Axiom::TollComponentFairness,
        Axiom::SubhighwayEfficiency,
        Axiom::IndifferenceToExtensions,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Axiom::Efficiency => "efficiency",
            Axiom::Additivity => "additivity",
            Axiom::Linearity => "linearity",
            Axiom::Covariance => "covariance",
            Axiom::InessentialSegment => "inessential_segment",
            Axiom::WeakSegmentSymmetry => "weak_segment_symmetry",
            Axiom::SegmentSymmetry => "segment_symmetry",
            Axiom::WeightedSegmentSymmetry => "weighted_segment_symmetry",
            Axiom::TollFairness => "toll_fairness",
            Axiom::TollComponentFairness => "toll_component_fairness",
            Axiom::SubhighwayEfficiency => "subhighway_efficiency",
            Axiom::IndifferenceToExtensions => "indifference_to_extensions",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Efficiency => "Efficiency",
            Axiom::Additivity => "Additivity",
            Axiom::Linearity => "Linearity",
            Axiom::Covariance => "Covariance",
            Axiom::InessentialSegment => "Inessential segment property",
            Axiom::WeakSegmentSymmetry => "Weak segment symmetry",
            Axiom::SegmentSymmetry => "Segment symmetry",
            Axiom::WeightedSegmentSymmetry => "Weighted segment symmetry",
            Axiom::TollFairness => "Toll fairness",
            Axiom::TollComponentFairness => "Toll component fairness",
            Axiom::SubhighwayEfficiency => "Sub-highway efficiency",
            Axiom::IndifferenceToExtensions => "Indifference to individual extensions",
        }
    }

    /// Fairness axioms subtract near-equal allocations and use the looser
    /// absolute tolerance.
    fn is_fairness(&self) -> bool {
        matches!(self, Axiom::TollFairness | Axiom::TollComponentFairness)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Axiom {
    type Err = TollError;
    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL.into_iter().find(|a| a.id() == s).ok_or_else(|| TollError::UnknownAxiom(s.to_string()))
    }
}

/// One concrete problem an axiom is checked on.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Efficiency {
        toll: TollMatrix,
    },
    /// Every segment no positive trip uses must get zero.
    InessentialSegment {
        toll: TollMatrix,
    },
    Additivity {
        toll: TollMatrix,
        other: TollMatrix,
    },
    Linearity {
        toll: TollMatrix,
        other: TollMatrix,
        b: f64,
        b2: f64,
    },
    /// Segments lying on every positive trip must get equal shares.
    SegmentSymmetry {
        toll: TollMatrix,
    },
    /// Applies only when `[1,n]` is the sole positive trip.
    WeakSegmentSymmetry {
        toll: TollMatrix,
    },
    /// Applies only when every `t_ii` is zero; shares of essential segments
    /// must be proportional to the toll they carry.
    WeightedSegmentSymmetry {
        toll: TollMatrix,
    },
    /// Multiply off-diagonal tolls by `b`, and diagonal ones by `b` plus
    /// `shift[i]`.
    Covariance {
        toll: TollMatrix,
        b: f64,
        shift: Vec<f64>,
    },
    /// Block the connection between `cut` and `cut + 1`.
    TollFairness {
        toll: TollMatrix,
        cut: usize,
    },
    TollComponentFairness {
        toll: TollMatrix,
        cut: usize,
    },
    /// Checked on every sub-highway of the matrix.
    SubhighwayEfficiency {
        toll: TollMatrix,
    },
    /// Compares `δ^trip` with its one-segment extensions on each side.
    IndifferenceToExtensions {
        n: usize,
        trip: Trip,
    },
}

/// `lhs` and `rhs` must agree componentwise; `gap` is the largest deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub gap: f64,
}

impl Evaluation {
    fn new(lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let gap = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Evaluation { lhs, rhs, gap }
    }

    fn empty() -> Self {
        Evaluation { lhs: Vec::new(), rhs: Vec::new(), gap: 0.0 }
    }

    fn scale(&self) -> f64 {
        self.lhs.iter().chain(&self.rhs).fold(1.0, |m, v| m.max(v.abs()))
    }
}

/// The matrix left after blocking the connection after segment `cut`.
pub fn blocked(toll: &TollMatrix, cut: usize) -> TollMatrix {
    toll.filter(|trip, _| !trip.crosses(cut))
}

/// Applies the covariance transform.
pub fn covariance_transform(toll: &TollMatrix, b: f64, shift: &[f64]) -> Result<TollMatrix> {
    let mut rows = Vec::new();
    for (trip, t) in toll.trips() {
        if !trip.is_single_segment() {
            rows.push((trip.entry, trip.exit, b * t));
        }
    }
    for (i, a) in shift.iter().enumerate() {
        rows.push((i + 1, i + 1, b * toll.get(i + 1, i + 1) + a));
    }
    TollMatrix::from_triplets(rows, Some(toll.n()))
}

/// Segments used by every positive trip; all segments if there is none.
fn common_segments(toll: &TollMatrix) -> Vec<usize> {
    let (mut lo, mut hi) = (1, toll.n());
    for (trip, _) in toll.trips() {
        lo = lo.max(trip.entry);
        hi = hi.min(trip.exit);
    }
    (lo..=hi).collect()
}

impl Instance {
    pub fn axiom(&self) -> Axiom {
        match self {
            Instance::Efficiency { .. } => Axiom::Efficiency,
            Instance::InessentialSegment { .. } => Axiom::InessentialSegment,
            Instance::Additivity { .. } => Axiom::Additivity,
            Instance::Linearity { .. } => Axiom::Linearity,
            Instance::SegmentSymmetry { .. } => Axiom::SegmentSymmetry,
            Instance::WeakSegmentSymmetry { .. } => Axiom::WeakSegmentSymmetry,
            Instance::WeightedSegmentSymmetry { .. } => Axiom::WeightedSegmentSymmetry,
            Instance::Covariance { .. } => Axiom::Covariance,
            Instance::TollFairness { .. } => Axiom::TollFairness,
            Instance::TollComponentFairness { .. } => Axiom::TollComponentFairness,
            Instance::SubhighwayEfficiency { .. } => Axiom::SubhighwayEfficiency,
            Instance::IndifferenceToExtensions { .. } => Axiom::IndifferenceToExtensions,
        }
    }

    /// The base matrix of the instance.
    pub fn toll(&self) -> TollMatrix {
        match self {
            Instance::Efficiency { toll }
            | Instance::InessentialSegment { toll }
            | Instance::Additivity { toll, .. }
            | Instance::Linearity { toll, .. }
            | Instance::SegmentSymmetry { toll }
            | Instance::WeakSegmentSymmetry { toll }
            | Instance::WeightedSegmentSymmetry { toll }
            | Instance::Covariance { toll, .. }
            | Instance::TollFairness { toll, .. }
            | Instance::TollComponentFairness { toll, .. }
            | Instance::SubhighwayEfficiency { toll } => toll.clone(),
            Instance::IndifferenceToExtensions { n, trip } => {
                UnitTollMatrix::new(*n, *trip).expect("valid trip").to_matrix()
            }
        }
    }

    /// Whether the axiom's hypothesis holds for this instance.
    pub fn applies(&self) -> bool {
        match self {
            Instance::WeakSegmentSymmetry { toll } => {
                let n = toll.n();
                toll.trips().all(|(t, _)| t.entry == 1 && t.exit == n)
            }
            Instance::WeightedSegmentSymmetry { toll } => toll.trips().all(|(t, _)| !t.is_single_segment()),
            Instance::Additivity { toll, other } | Instance::Linearity { toll, other, .. } => toll.n() == other.n(),
            Instance::Covariance { toll, b, shift } => {
                *b >= 0.0 && shift.len() == toll.n() && covariance_transform(toll, *b, shift).is_ok()
            }
            Instance::TollFairness { toll, cut } | Instance::TollComponentFairness { toll, cut } => {
                *cut >= 1 && *cut < toll.n()
            }
            Instance::IndifferenceToExtensions { n, trip } => trip.exit <= *n,
            _ => true,
        }
    }

    /// Evaluates both sides of the axiom for `rule`. Instances whose
    /// hypothesis fails evaluate to an empty, zero-gap comparison.
    pub fn evaluate(&self, rule: &dyn AllocationRule) -> Evaluation {
        if !self.applies() {
            return Evaluation::empty();
        }
        let f = |t: &TollMatrix| rule.allocate(t).into_vec();
        match self {
            Instance::Efficiency { toll } => Evaluation::new(vec![f(toll).iter().sum()], vec![toll.total()]),
            Instance::InessentialSegment { toll } => {
                let x = f(toll);
                let lhs: Vec<f64> = (1..=toll.n()).filter(|&i| toll.is_inessential(i)).map(|i| x[i - 1]).collect();
                let rhs = vec![0.0; lhs.len()];
                Evaluation::new(lhs, rhs)
            }
            Instance::Additivity { toll, other } => {
                let sum = toll.plus(other).expect("sizes checked");
                let rhs = f(toll).iter().zip(f(other)).map(|(a, b)| a + b).collect();
                Evaluation::new(f(&sum), rhs)
            }
            Instance::Linearity { toll, other, b, b2 } => {
                let comb = toll.combine(*b, other, *b2).expect("sizes checked");
                let rhs = f(toll).iter().zip(f(other)).map(|(x, y)| b * x + b2 * y).collect();
                Evaluation::new(f(&comb), rhs)
            }
            Instance::SegmentSymmetry { toll } => {
                let x = f(toll);
                let common = common_segments(toll);
                let lhs: Vec<f64> = common.iter().map(|&i| x[i - 1]).collect();
                let rhs = vec![lhs.first().copied().unwrap_or(0.0); lhs.len()];
                Evaluation::new(lhs, rhs)
            }
            Instance::WeakSegmentSymmetry { toll } => {
                let x = f(toll);
                let rhs = vec![x[0]; x.len()];
                Evaluation::new(x, rhs)
            }
            Instance::WeightedSegmentSymmetry { toll } => {
                // f_i / f_r = I_i / I_r, cross-multiplied against the first
                // essential segment r
                let x = f(toll);
                let carried = toll.involvement();
                let essential: Vec<usize> = (0..toll.n()).filter(|&i| carried[i] > 0.0).collect();
                let Some(&r) = essential.first() else { return Evaluation::empty() };
                let lhs = essential.iter().map(|&i| x[i] * carried[r]).collect();
                let rhs = essential.iter().map(|&i| x[r] * carried[i]).collect();
                Evaluation::new(lhs, rhs)
            }
            Instance::Covariance { toll, b, shift } => {
                let moved = covariance_transform(toll, *b, shift).expect("checked in applies");
                let rhs = f(toll).iter().zip(shift).map(|(x, a)| b * x + a).collect();
                Evaluation::new(f(&moved), rhs)
            }
            Instance::TollFairness { toll, cut } => {
                let (x, y) = (f(toll), f(&blocked(toll, *cut)));
                let i = *cut;
                Evaluation::new(vec![x[i - 1] - y[i - 1]], vec![x[i] - y[i]])
            }
            Instance::TollComponentFairness { toll, cut } => {
                let (x, y) = (f(toll), f(&blocked(toll, *cut)));
                let (i, n) = (*cut, toll.n());
                let left: f64 = (0..i).map(|j| x[j] - y[j]).sum::<f64>() / i as f64;
                let right: f64 = (i..n).map(|j| x[j] - y[j]).sum::<f64>() / (n - i) as f64;
                Evaluation::new(vec![left], vec![right])
            }
            Instance::SubhighwayEfficiency { toll } => {
                let x = f(toll);
                let n = toll.n();
                let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
                for a in 1..=n {
                    for b in a..=n {
                        if toll.is_subhighway(a, b) {
                            lhs.push(x[a - 1..b].iter().sum());
                            rhs.push(toll.interval_value(a, b));
                        }
                    }
                }
                Evaluation::new(lhs, rhs)
            }
            Instance::IndifferenceToExtensions { n, trip } => {
                let unit = |h, k| f(&UnitTollMatrix::new(*n, Trip::new(h, k)).expect("in range").to_matrix());
                let base = unit(trip.entry, trip.exit);
                let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
                if trip.entry > 1 {
                    let ext = unit(trip.entry - 1, trip.exit);
                    for i in trip.entry + 1..=trip.exit {
                        lhs.push(base[i - 1]);
                        rhs.push(ext[i - 1]);
                    }
                }
                if trip.exit < *n {
                    let ext = unit(trip.entry, trip.exit + 1);
                    for i in trip.entry..trip.exit {
                        lhs.push(base[i - 1]);
                        rhs.push(ext[i - 1]);
                    }
                }
                Evaluation::new(lhs, rhs)
            }
        }
    }

    pub fn describe(&self) -> String {
        let m = |t: &TollMatrix| {
            let trips: Vec<String> = t.trips().map(|(tr, v)| format!("t{}{}={}", tr.entry, tr.exit, v)).collect();
            format!("n={} {{{}}}", t.n(), trips.join(", "))
        };
        match self {
            Instance::Additivity { toll, other } => format!("T: {}; T': {}", m(toll), m(other)),
            Instance::Linearity { toll, other, b, b2 } => format!("T: {}; T': {}; b={b}, b'={b2}", m(toll), m(other)),
            Instance::Covariance { toll, b, shift } => format!("T: {}; b={b}; a={shift:?}", m(toll)),
            Instance::TollFairness { toll, cut } | Instance::TollComponentFairness { toll, cut } => {
                format!("T: {}; cut after segment {cut}", m(toll))
            }
            Instance::IndifferenceToExtensions { n, trip } => format!("unit trip {trip} on n={n}"),
            other => format!("T: {}", m(&other.toll())),
        }
    }
}

/// A failing instance together with the evaluation that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub instance: Instance,
    pub evaluation: Evaluation,
}

impl Witness {
    pub fn replay(&self, rule: &dyn AllocationRule) -> Evaluation {
        self.instance.evaluate(rule)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub rule: String,
    pub holds: bool,
    pub instances_checked: usize,
    pub worst_gap: f64,
    pub witness: Option<Witness>,
}

/// Tolerances and generator settings for a seeded check.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Random base matrices per axiom.
    pub trials: usize,
    pub seed: u64,
    pub min_segments: usize,
    pub max_segments: usize,
    pub max_toll: f64,
    /// Relative to `max(1, magnitude of the compared values)`.
    pub tolerance: f64,
    /// Absolute, for the two fairness axioms.
    pub fairness_tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 200,
            seed: 1,
            min_segments: 2,
            max_segments: 8,
            max_toll: 10.0,
            tolerance: crate::DEFAULT_TOLERANCE,
            fairness_tolerance: 1e-8,
        }
    }
}

impl SuiteConfig {
    fn passes(&self, axiom: Axiom, eval: &Evaluation) -> bool {
        let limit = if axiom.is_fairness() { self.fairness_tolerance } else { self.tolerance * eval.scale() };
        eval.gap <= limit
    }
}

/// Checks `rule` on explicit instances.
pub fn check_instances(
    rule: &dyn AllocationRule,
    axiom: Axiom,
    instances: &[Instance],
    config: &SuiteConfig,
) -> AxiomVerdict {
    let mut verdict =
        AxiomVerdict { axiom, rule: rule.name(), holds: true, instances_checked: 0, worst_gap: 0.0, witness: None };
    for inst in instances.iter().filter(|i| i.axiom() == axiom && i.applies()) {
        let eval = inst.evaluate(rule);
        verdict.instances_checked += 1;
        verdict.worst_gap = verdict.worst_gap.max(eval.gap);
        if !config.passes(axiom, &eval) && verdict.witness.is_none() {
            verdict.holds = false;
            verdict.witness = Some(Witness { instance: inst.clone(), evaluation: eval });
        }
    }
    verdict
}

fn single(rule: &dyn AllocationRule, instance: Instance, tolerance: f64) -> AxiomVerdict {
    let config = SuiteConfig { tolerance, fairness_tolerance: tolerance.max(1e-8), ..SuiteConfig::default() };
    let axiom = instance.axiom();
    check_instances(rule, axiom, &[instance], &config)
}

pub fn check_efficiency(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::Efficiency { toll: toll.clone() }, tol)
}

pub fn check_inessential_segment(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::InessentialSegment { toll: toll.clone() }, tol)
}

pub fn check_additivity(rule: &dyn AllocationRule, toll: &TollMatrix, other: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::Additivity { toll: toll.clone(), other: other.clone() }, tol)
}

pub fn check_linearity(
    rule: &dyn AllocationRule,
    toll: &TollMatrix,
    other: &TollMatrix,
    b: f64,
    b2: f64,
    tol: f64,
) -> AxiomVerdict {
    single(rule, Instance::Linearity { toll: toll.clone(), other: other.clone(), b, b2 }, tol)
}

pub fn check_segment_symmetry(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::SegmentSymmetry { toll: toll.clone() }, tol)
}

pub fn check_weak_segment_symmetry(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::WeakSegmentSymmetry { toll: toll.clone() }, tol)
}

pub fn check_weighted_segment_symmetry(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::WeightedSegmentSymmetry { toll: toll.clone() }, tol)
}

pub fn check_covariance(rule: &dyn AllocationRule, toll: &TollMatrix, b: f64, shift: &[f64], tol: f64) -> AxiomVerdict {
    single(rule, Instance::Covariance { toll: toll.clone(), b, shift: shift.to_vec() }, tol)
}

pub fn check_toll_fairness(rule: &dyn AllocationRule, toll: &TollMatrix, cut: usize, tol: f64) -> AxiomVerdict {
    single(rule, Instance::TollFairness { toll: toll.clone(), cut }, tol)
}

pub fn check_toll_component_fairness(
    rule: &dyn AllocationRule,
    toll: &TollMatrix,
    cut: usize,
    tol: f64,
) -> AxiomVerdict {
    single(rule, Instance::TollComponentFairness { toll: toll.clone(), cut }, tol)
}

pub fn check_subhighway_efficiency(rule: &dyn AllocationRule, toll: &TollMatrix, tol: f64) -> AxiomVerdict {
    single(rule, Instance::SubhighwayEfficiency { toll: toll.clone() }, tol)
}

/// Exhaustive over all trips of a highway with `n` segments.
pub fn check_indifference_to_extensions(rule: &dyn AllocationRule, n: usize, tol: f64) -> AxiomVerdict {
    let config = SuiteConfig { tolerance: tol, ..SuiteConfig::default() };
    check_instances(rule, Axiom::IndifferenceToExtensions, &unit_trip_instances(n), &config)
}

fn unit_trip_instances(n: usize) -> Vec<Instance> {
    (1..=n)
        .flat_map(|h| (h..=n).map(move |k| Instance::IndifferenceToExtensions { n, trip: Trip::new(h, k) }))
        .collect()
}

const DENSITIES: [f64; 3] = [0.3, 0.6, 1.0];

fn axiom_rng(config: &SuiteConfig, axiom: Axiom) -> ChaCha8Rng {
    let idx = Axiom::ALL.iter().position(|a| *a == axiom).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(config.seed ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn draw_matrix(rng: &mut ChaCha8Rng, n: usize, config: &SuiteConfig) -> TollMatrix {
    let density = DENSITIES[rng.gen_range(0..DENSITIES.len())];
    random_matrix_with(n, density, config.max_toll, rng).expect("valid generator parameters")
}

fn draw_blocks(rng: &mut ChaCha8Rng, n: usize) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut start = 1;
    while start <= n {
        let end = rng.gen_range(start..=n);
        blocks.push((start, end));
        start = end + 1;
    }
    blocks
}

/// Seeded instances for `axiom`; deterministic in `config`.
pub fn generate_instances(axiom: Axiom, config: &SuiteConfig) -> Vec<Instance> {
    let mut rng = axiom_rng(config, axiom);
    let (lo, hi) = (config.min_segments.max(1), config.max_segments.max(config.min_segments.max(1)));
    let mut out = Vec::new();
    if axiom == Axiom::IndifferenceToExtensions {
        for n in 1..=hi {
            out.extend(unit_trip_instances(n));
        }
        return out;
    }
    for trial in 0..config.trials {
        let n = rng.gen_range(lo..=hi);
        let toll = draw_matrix(&mut rng, n, config);
        match axiom {
            Axiom::Efficiency => out.push(Instance::Efficiency { toll }),
            Axiom::InessentialSegment => {
                let unused = rng.gen_range(1..=n);
                let also = rng.gen_bool(0.3).then(|| rng.gen_range(1..=n));
                let toll = toll.filter(|t, _| !t.contains(unused) && also.is_none_or(|s| !t.contains(s)));
                out.push(Instance::InessentialSegment { toll });
            }
            Axiom::Additivity => {
                let other = draw_matrix(&mut rng, n, config);
                out.push(Instance::Additivity { toll, other });
            }
            Axiom::Linearity => {
                let other = draw_matrix(&mut rng, n, config);
                let (b, b2) = if trial == 0 { (0.0, 0.0) } else { (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)) };
                out.push(Instance::Linearity { toll, other, b, b2 });
            }
            Axiom::SegmentSymmetry => {
                let from = rng.gen_range(1..=n);
                let to = rng.gen_range(from..=n.min(from + 2));
                let toll = toll.filter(|t, _| t.entry <= from && to <= t.exit);
                out.push(Instance::SegmentSymmetry { toll });
            }
            Axiom::WeakSegmentSymmetry => {
                let c = if trial % 2 == 0 { 1.0 } else { config.max_toll * (1.0 - rng.gen::<f64>()) };
                let toll = TollMatrix::from_triplets([(1, n, c)], Some(n)).expect("valid trip");
                out.push(Instance::WeakSegmentSymmetry { toll });
            }
            Axiom::WeightedSegmentSymmetry => {
                let toll = toll.filter(|t, _| !t.is_single_segment());
                out.push(Instance::WeightedSegmentSymmetry { toll });
            }
            Axiom::Covariance => {
                let (b, shift) = if trial == 0 {
                    (1.0, vec![0.0; n])
                } else {
                    let b = rng.gen_range(0.0..3.0);
                    let shift = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..5.0) } else { 0.0 }).collect();
                    (b, shift)
                };
                out.push(Instance::Covariance { toll, b, shift });
            }
            Axiom::TollFairness => {
                out.extend((1..n).map(|cut| Instance::TollFairness { toll: toll.clone(), cut }));
            }
            Axiom::TollComponentFairness => {
                out.extend((1..n).map(|cut| Instance::TollComponentFairness { toll: toll.clone(), cut }));
            }
            Axiom::SubhighwayEfficiency => {
                let toll = if trial % 2 == 0 {
                    toll
                } else {
                    let blocks = draw_blocks(&mut rng, n);
                    let density = DENSITIES[rng.gen_range(0..DENSITIES.len())];
                    block_structured_matrix_with(&blocks, density, config.max_toll, rng.gen()).expect("valid blocks")
                };
                out.push(Instance::SubhighwayEfficiency { toll });
            }
            Axiom::IndifferenceToExtensions => unreachable!(),
        }
    }
    out
}

/// Seeded falsification check of one axiom.
pub fn check_axiom(rule: &dyn AllocationRule, axiom: Axiom, config: &SuiteConfig) -> AxiomVerdict {
    check_instances(rule, axiom, &generate_instances(axiom, config), config)
}

/// Axioms each named method is known to satisfy.
pub fn expected_axioms(method: Method) -> &'static [Axiom] {
    use Axiom::*;
    match method {
        Method::Ses => {
            &[Efficiency, Additivity, InessentialSegment, SegmentSymmetry, TollFairness, SubhighwayEfficiency]
        }
        Method::Sps => &[Efficiency, InessentialSegment, WeightedSegmentSymmetry, Covariance],
        Method::Scs => &[
            Efficiency,
            Linearity,
            InessentialSegment,
            WeakSegmentSymmetry,
            IndifferenceToExtensions,
            TollComponentFairness,
            SubhighwayEfficiency,
        ],
    }
}

/// Verdicts of every rule on every axiom, rows in `rules` order.
pub fn axiom_matrix(rules: &[&dyn AllocationRule], axioms: &[Axiom], config: &SuiteConfig) -> Vec<Vec<AxiomVerdict>> {
    let instances: Vec<Vec<Instance>> = axioms.par_iter().map(|a| generate_instances(*a, config)).collect();
    rules
        .par_iter()
        .map(|rule| {
            axioms
                .par_iter()
                .zip(instances.par_iter())
                .map(|(axiom, inst)| check_instances(*rule, *axiom, inst, config))
                .collect()
        })
        .collect()
}

/// A rule from the independence analysis of one characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarnessRule {
    Named(Method),
    Counter(Counterexample),
}

impl HarnessRule {
    fn rule(&self) -> &dyn AllocationRule {
        match self {
            HarnessRule::Named(m) => m,
            HarnessRule::Counter(c) => c,
        }
    }
}

/// One characterization: its axioms and, for each alternative rule, the
/// single axiom it must fail together with instances realizing the failure.
pub struct Characterization {
    pub name: &'static str,
    pub axioms: Vec<Axiom>,
    pub cases: Vec<(HarnessRule, Axiom, Vec<Instance>)>,
}

fn unit(n: usize, h: usize, k: usize) -> TollMatrix {
    UnitTollMatrix::new(n, Trip::new(h, k)).expect("in range").to_matrix()
}

fn on_all(toll: &TollMatrix, axioms: &[Axiom]) -> Vec<Instance> {
    axioms
        .iter()
        .filter_map(|a| match a {
            Axiom::Efficiency => Some(Instance::Efficiency { toll: toll.clone() }),
            Axiom::InessentialSegment => Some(Instance::InessentialSegment { toll: toll.clone() }),
            Axiom::WeightedSegmentSymmetry => Some(Instance::WeightedSegmentSymmetry { toll: toll.clone() }),
            Axiom::WeakSegmentSymmetry => Some(Instance::WeakSegmentSymmetry { toll: toll.clone() }),
            Axiom::SubhighwayEfficiency => Some(Instance::SubhighwayEfficiency { toll: toll.clone() }),
            _ => None,
        })
        .collect()
}

/// The three characterizations and their independence constructions.
pub fn characterizations() -> Vec<Characterization> {
    use Axiom::*;
    use Counterexample as C;
    use HarnessRule::{Counter, Named};

    let sps_axioms = vec![Efficiency, InessentialSegment, WeightedSegmentSymmetry, Covariance];
    let example = three_segment_example();
    let trigger = Counterexample::swap_trigger();
    let tilde = TollMatrix::from_triplets([(2, 3, 1.0)], Some(3)).expect("valid");
    let mut swap_cases = on_all(&trigger, &sps_axioms);
    swap_cases.push(Instance::Covariance { toll: trigger.clone(), b: 1.0, shift: vec![1.0, 0.0] });
    let mut tilde_cases = on_all(&tilde, &sps_axioms);
    tilde_cases.push(Instance::Covariance { toll: tilde.clone(), b: 2.0, shift: vec![0.5, 0.0, 1.0] });

    let scs_axioms = vec![Efficiency, Linearity, InessentialSegment, WeakSegmentSymmetry, IndifferenceToExtensions];
    let extended = TollMatrix::from_triplets([(1, 2, 1.0), (1, 3, 1.0)], Some(4)).expect("valid");

    vec![
        Characterization {
            name: "SPS: efficiency, inessential segment, weighted segment symmetry, covariance",
            axioms: sps_axioms.clone(),
            cases: vec![
                (Counter(C::InvolvementSum), Efficiency, on_all(&example, &sps_axioms)),
                (Counter(C::SwapDiagonal), Covariance, swap_cases),
                (Named(Method::Ses), WeightedSegmentSymmetry, on_all(&example, &sps_axioms)),
                (Counter(C::TildeFamily), InessentialSegment, tilde_cases),
            ],
        },
        Characterization {
            name: "SCS: efficiency, linearity, inessential segment, weak segment symmetry, indifference to extensions",
            axioms: scs_axioms.clone(),
            cases: vec![
                (Named(Method::Ses), IndifferenceToExtensions, unit_trip_instances(3)),
                (Counter(C::Uniform), InessentialSegment, on_all(&extended, &scs_axioms)),
                (Counter(C::Zero), Efficiency, on_all(&example, &scs_axioms)),
                (
                    Counter(C::Entrance),
                    WeakSegmentSymmetry,
                    vec![Instance::WeakSegmentSymmetry { toll: unit(3, 1, 3) }],
                ),
                (
                    Counter(C::Hybrid),
                    Linearity,
                    vec![Instance::Linearity { toll: unit(3, 1, 2), other: unit(3, 1, 3), b: 1.0, b2: 1.0 }],
                ),
            ],
        },
        Characterization {
            name: "SCS: toll component fairness, sub-highway efficiency",
            axioms: vec![TollComponentFairness, SubhighwayEfficiency],
            cases: vec![
                (Counter(C::Zero), SubhighwayEfficiency, on_all(&example, &[SubhighwayEfficiency])),
                (
                    Named(Method::Ses),
                    TollComponentFairness,
                    vec![Instance::TollComponentFairness { toll: example.clone(), cut: 1 }],
                ),
            ],
        },
    ]
}

#[derive(Debug, Clone)]
pub struct HarnessRow {
    pub characterization: &'static str,
    pub rule: String,
    pub designated: Axiom,
    pub verdicts: Vec<AxiomVerdict>,
}

impl HarnessRow {
    /// True when the rule fails the designated axiom and nothing else.
    pub fn matches(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds == (v.axiom != self.designated))
    }
}

/// Runs every alternative rule against every axiom of its characterization,
/// on the seeded suite plus the explicit constructions.
pub fn harness_table(config: &SuiteConfig) -> Vec<HarnessRow> {
    let chars = characterizations();
    chars
        .par_iter()
        .flat_map(|ch| {
            ch.cases
                .par_iter()
                .map(|(rule, designated, fixtures)| {
                    let verdicts = ch
                        .axioms
                        .iter()
                        .map(|axiom| {
                            let mut instances = generate_instances(*axiom, config);
                            instances.extend(fixtures.iter().filter(|i| i.axiom() == *axiom).cloned());
                            check_instances(rule.rule(), *axiom, &instances, config)
                        })
                        .collect();
                    HarnessRow {
                        characterization: ch.name,
                        rule: rule.rule().name(),
                        designated: *designated,
                        verdicts,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// [`harness_table`], failing on the first row that does not fail exactly
/// its designated axiom.
pub fn independence_harness(config: &SuiteConfig) -> Result<Vec<HarnessRow>> {
    verify_harness(harness_table(config))
}

/// Passes `rows` through unless one of them does not match its designation.
pub fn verify_harness(rows: Vec<HarnessRow>) -> Result<Vec<HarnessRow>> {
    for row in &rows {
        if let Some(v) = row.verdicts.iter().find(|v| v.holds != (v.axiom != row.designated)) {
            let detail = if v.holds { "expected a violation, none found" } else { "unexpected violation" };
            return Err(TollError::HarnessMismatch {
                method: row.rule.clone(),
                axiom: v.axiom.to_string(),
                detail: detail.to_string(),
            });
        }
    }
    Ok(rows)
}
