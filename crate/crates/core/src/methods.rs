//! The SES, SPS and SCS toll allocation methods.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Result, TollError};
use crate::toll::{Allocation, TollMatrix};

/// Anything that maps a toll problem to per-segment shares.
pub trait AllocationRule: Send + Sync {
    fn name(&self) -> String;
    fn allocate(&self, toll: &TollMatrix) -> Allocation;
}

impl<R: AllocationRule + ?Sized> AllocationRule for &R {
    fn name(&self) -> String {
        (**self).name()
    }
    fn allocate(&self, toll: &TollMatrix) -> Allocation {
        (**self).allocate(toll)
    }
}

/// Wraps a closure as an [`AllocationRule`].
pub struct FnRule<F> {
    name: String,
    f: F,
}

impl<F> FnRule<F>
where
    F: Fn(&TollMatrix) -> Allocation + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnRule { name: name.into(), f }
    }
}

impl<F> AllocationRule for FnRule<F>
where
    F: Fn(&TollMatrix) -> Allocation + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }
    fn allocate(&self, toll: &TollMatrix) -> Allocation {
        (self.f)(toll)
    }
}

/// Segments Equal Sharing: every trip's toll is split evenly over the
/// segments it uses.
pub fn ses(toll: &TollMatrix) -> Allocation {
    let mut x = vec![0.0; toll.n()];
    for (trip, t) in toll.trips() {
        let share = t / trip.segment_count() as f64;
        for i in trip.segments() {
            x[i - 1] += share;
        }
    }
    Allocation::from_raw(x)
}

/// Separable and non-separable revenue of a toll problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpsDecomposition {
    /// `t_ii` per segment.
    pub separable: Vec<f64>,
    /// Tolls of multi-segment trips using segment `i`.
    pub nonseparable: Vec<f64>,
    /// Total toll of multi-segment trips.
    pub nonseparable_total: f64,
    /// `nonseparable_total / sum(nonseparable)`, `None` when every trip is
    /// single-segment.
    pub beta: Option<f64>,
}

impl SpsDecomposition {
    pub fn of(toll: &TollMatrix) -> Self {
        let n = toll.n();
        let mut separable = vec![0.0; n];
        let mut nonseparable = vec![0.0; n];
        let mut nonseparable_total = 0.0;
        for (trip, t) in toll.trips() {
            if trip.is_single_segment() {
                separable[trip.entry - 1] = t;
            } else {
                nonseparable_total += t;
                for i in trip.segments() {
                    nonseparable[i - 1] += t;
                }
            }
        }
        let involvement: f64 = nonseparable.iter().sum();
        let beta = (involvement > 0.0).then(|| nonseparable_total / involvement);
        SpsDecomposition { separable, nonseparable, nonseparable_total, beta }
    }
}

/// Segments Proportional Sharing: each segment keeps its single-segment
/// toll and shares the rest in proportion to the multi-segment toll it
/// carries.
pub fn sps(toll: &TollMatrix) -> Allocation {
    sps_from(&SpsDecomposition::of(toll))
}

pub fn sps_from(parts: &SpsDecomposition) -> Allocation {
    let x = match parts.beta {
        Some(beta) => parts.separable.iter().zip(&parts.nonseparable).map(|(s, ns)| s + beta * ns).collect(),
        None => parts.separable.clone(),
    };
    Allocation::from_raw(x)
}

/// Segments Compensated Sharing: a position-weighted mix of the toll from
/// trips entering at `i`, all trips using `i` and trips leaving at `i`.
pub fn scs(toll: &TollMatrix) -> Allocation {
    let n = toll.n();
    let mut entering = vec![0.0; n];
    let mut leaving = vec![0.0; n];
    for (trip, t) in toll.trips() {
        entering[trip.entry - 1] += t;
        leaving[trip.exit - 1] += t;
    }
    let involvement = toll.involvement();
    let nf = n as f64;
    let x = (1..=n)
        .map(|i| {
            let (before, after) = ((i - 1) as f64, (n - i) as f64);
            (before * entering[i - 1] + involvement[i - 1] + after * leaving[i - 1]) / nf
        })
        .collect();
    Allocation::from_raw(x)
}

/// The three named methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ses,
    Sps,
    Scs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ses, Method::Sps, Method::Scs];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Ses => "ses",
            Method::Sps => "sps",
            Method::Scs => "scs",
        }
    }

    pub fn apply(&self, toll: &TollMatrix) -> Allocation {
        match self {
            Method::Ses => ses(toll),
            Method::Sps => sps(toll),
            Method::Scs => scs(toll),
        }
    }

    /// Parses a comma-separated list such as `ses,sps`.
    pub fn parse_list(list: &str) -> Result<Vec<Method>> {
        list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
    }
}

impl FromStr for Method {
    type Err = TollError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ses" => Ok(Method::Ses),
            "sps" => Ok(Method::Sps),
            "scs" => Ok(Method::Scs),
            _ => Err(TollError::UnknownMethod(s.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl AllocationRule for Method {
    fn name(&self) -> String {
        self.as_str().to_string()
    }
    fn allocate(&self, toll: &TollMatrix) -> Allocation {
        self.apply(toll)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sps_outside_core_example, three_segment_example};

    fn assert_close(x: &Allocation, expected: &[f64], tol: f64) {
        assert_eq!(x.len(), expected.len());
        for (a, b) in x.as_slice().iter().zip(expected) {
            assert!((a - b).abs() <= tol, "{x:?} vs {expected:?}");
        }
    }

    #[test]
    fn three_segment_values() {
        let t = three_segment_example();
        assert_close(&ses(&t), &[5.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0], 1e-12);
        assert_close(&sps(&t), &[0.8, 0.8, 0.4], 1e-12);
        assert_close(&scs(&t), &[2.0 / 3.0, 1.0, 1.0 / 3.0], 1e-12);
    }

    #[test]
    fn sps_outside_core_values() {
        let x = sps(&sps_outside_core_example());
        assert_close(&x, &[3.401, 3.917, 0.441, 2.427, 0.425], 5e-4);
    }

    #[test]
    fn zero_and_diagonal() {
        let z = TollMatrix::zero(4).unwrap();
        for m in Method::ALL {
            assert_eq!(m.apply(&z).as_slice(), &[0.0; 4]);
        }
        let d = TollMatrix::from_triplets([(1, 1, 2.0), (3, 3, 5.0)], Some(3)).unwrap();
        assert_eq!(sps(&d).as_slice(), &[2.0, 0.0, 5.0]);
        assert_eq!(SpsDecomposition::of(&d).beta, None);
        let single = TollMatrix::from_triplets([(1, 1, 4.5)], Some(1)).unwrap();
        for m in Method::ALL {
            assert_eq!(m.apply(&single).as_slice(), &[4.5]);
        }
    }

    #[test]
    fn decomposition() {
        let t = three_segment_example();
        let d = SpsDecomposition::of(&t);
        assert_eq!(d.separable, vec![0.0; 3]);
        assert_eq!(d.nonseparable, vec![2.0, 2.0, 1.0]);
        assert_eq!(d.nonseparable_total, 2.0);
        assert_eq!(d.beta, Some(0.4));
    }

    #[test]
    fn method_names() {
        assert_eq!(Method::parse_list("ses, SPS,scs").unwrap(), Method::ALL.to_vec());
        assert!(matches!("xyz".parse::<Method>(), Err(TollError::UnknownMethod(_))));
    }
}
