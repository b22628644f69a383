//! Weight schemes and the family of allocations they induce.
//!
//! A scheme assigns every segment `i` of every trip `[h,k]` a nonnegative
//! weight; segment `i` then receives the weighted sum of the tolls of the
//! trips it lies on. SES, SPS and SCS are all members of this family.

use std::str::FromStr;

use crate::error::{Result, TollError};
use crate::methods::{AllocationRule, SpsDecomposition};
use crate::toll::{Allocation, TollMatrix, Trip};

/// Weight function bound to one toll matrix: `(trip, segment) -> weight`.
pub type BoundWeights<'a> = Box<dyn Fn(Trip, usize) -> f64 + 'a>;

pub trait WeightScheme: Send + Sync {
    fn name(&self) -> String;

    /// True when the weights never look at the tolls themselves.
    fn t_independent(&self) -> bool;

    /// Resolves the weights for `toll`. Matrix-wide quantities are computed
    /// once here rather than per weight.
    fn bind<'a>(&'a self, toll: &'a TollMatrix) -> BoundWeights<'a>;

    fn weight(&self, toll: &TollMatrix, trip: Trip, segment: usize) -> f64 {
        self.bind(toll)(trip, segment)
    }
}

/// Weighted allocation of every trip's toll to its segments.
///
/// Not efficient in general: the weights of a trip need not sum to one.
pub fn family_allocate(toll: &TollMatrix, scheme: &dyn WeightScheme) -> Result<Allocation> {
    let weights = scheme.bind(toll);
    let mut x = vec![0.0; toll.n()];
    for (trip, t) in toll.trips() {
        for i in trip.segments() {
            let w = weights(trip, i);
            if !(w.is_finite() && w >= 0.0) {
                return Err(TollError::NegativeWeight { entry: trip.entry, exit: trip.exit, segment: i, value: w });
            }
            x[i - 1] += w * t;
        }
    }
    Allocation::new(x)
}

/// The weight schemes that reproduce SES, SPS and SCS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinScheme {
    Ses,
    Sps,
    Scs,
}

pub fn builtin_scheme(name: &str) -> Result<BuiltinScheme> {
    name.parse()
}

impl FromStr for BuiltinScheme {
    type Err = TollError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ses" => Ok(BuiltinScheme::Ses),
            "sps" => Ok(BuiltinScheme::Sps),
            "scs" => Ok(BuiltinScheme::Scs),
            _ => Err(TollError::UnknownScheme(s.to_string())),
        }
    }
}

fn scs_weight(n: usize, trip: Trip, i: usize) -> f64 {
    let nf = n as f64;
    if trip.is_single_segment() {
        1.0
    } else if i == trip.entry {
        i as f64 / nf
    } else if i == trip.exit {
        (n - i + 1) as f64 / nf
    } else {
        1.0 / nf
    }
}

impl WeightScheme for BuiltinScheme {
    fn name(&self) -> String {
        match self {
            BuiltinScheme::Ses => "ses",
            BuiltinScheme::Sps => "sps",
            BuiltinScheme::Scs => "scs",
        }
        .to_string()
    }

    fn t_independent(&self) -> bool {
        !matches!(self, BuiltinScheme::Sps)
    }

    fn bind<'a>(&'a self, toll: &'a TollMatrix) -> BoundWeights<'a> {
        let n = toll.n();
        match self {
            BuiltinScheme::Ses => Box::new(|trip: Trip, _| 1.0 / trip.segment_count() as f64),
            BuiltinScheme::Sps => {
                // beta is irrelevant when no multi-segment trip exists
                let beta = SpsDecomposition::of(toll).beta.unwrap_or(0.0);
                Box::new(move |trip: Trip, _| if trip.is_single_segment() { 1.0 } else { beta })
            }
            BuiltinScheme::Scs => Box::new(move |trip, i| scs_weight(n, trip, i)),
        }
    }
}

/// A scheme given by a closure of `(n, trip, segment)`, independent of the
/// tolls.
pub struct FnScheme<F> {
    name: String,
    f: F,
}

impl<F> FnScheme<F>
where
    F: Fn(usize, Trip, usize) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnScheme { name: name.into(), f }
    }
}

impl<F> WeightScheme for FnScheme<F>
where
    F: Fn(usize, Trip, usize) -> f64 + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }
    fn t_independent(&self) -> bool {
        true
    }
    fn bind<'a>(&'a self, toll: &'a TollMatrix) -> BoundWeights<'a> {
        let n = toll.n();
        Box::new(move |trip, i| (self.f)(n, trip, i))
    }
}

/// Adapts a scheme into an [`AllocationRule`]; inadmissible weights yield a
/// zero allocation.
pub struct FamilyRule<S>(pub S);

impl<S: WeightScheme> AllocationRule for FamilyRule<S> {
    fn name(&self) -> String {
        format!("family:{}", self.0.name())
    }
    fn allocate(&self, toll: &TollMatrix) -> Allocation {
        family_allocate(toll, &self.0).unwrap_or_else(|_| Allocation::zeros(toll.n()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::three_segment_example;
    use crate::methods::{scs, ses, sps};

    #[test]
    fn builtins_on_three_segment_example() {
        let t = three_segment_example();
        let x = family_allocate(&t, &BuiltinScheme::Ses).unwrap();
        assert!(x.max_abs_diff(&ses(&t)) < 1e-15);
        let x = family_allocate(&t, &BuiltinScheme::Scs).unwrap();
        assert!(x.max_abs_diff(&Allocation::new(vec![2.0 / 3.0, 1.0, 1.0 / 3.0]).unwrap()) < 1e-15);
        assert!(x.max_abs_diff(&scs(&t)) < 1e-15);
        let x = family_allocate(&t, &BuiltinScheme::Sps).unwrap();
        assert!(x.max_abs_diff(&sps(&t)) < 1e-15);
    }

    #[test]
    fn individual_weights() {
        let t = three_segment_example();
        assert!((BuiltinScheme::Scs.weight(&t, Trip::new(1, 3), 2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(BuiltinScheme::Ses.weight(&t, Trip::new(2, 2), 2), 1.0);
        assert_eq!(BuiltinScheme::Sps.weight(&t, Trip::new(1, 2), 1), 0.4);
        assert!(BuiltinScheme::Ses.t_independent());
        assert!(!BuiltinScheme::Sps.t_independent());
    }

    #[test]
    fn null_and_bad_schemes() {
        let t = three_segment_example();
        let null = FnScheme::new("null", |_, _, _| 0.0);
        assert_eq!(family_allocate(&t, &null).unwrap().as_slice(), &[0.0; 3]);
        let bad = FnScheme::new("bad", |_, trip: Trip, i| if trip.exit == 3 && i == 2 { -1.0 } else { 0.5 });
        let err = family_allocate(&t, &bad).unwrap_err();
        assert!(matches!(err, TollError::NegativeWeight { entry: 1, exit: 3, segment: 2, .. }));
        assert!(matches!(builtin_scheme("foo"), Err(TollError::UnknownScheme(_))));
    }

    #[test]
    fn family_not_efficient_in_general() {
        let t = three_segment_example();
        let ones = FnScheme::new("ones", |_, _, _| 1.0);
        let x = family_allocate(&t, &ones).unwrap();
        assert_eq!(x.as_slice(), &[2.0, 2.0, 1.0]);
        assert!(x.total() > t.total());
    }
}
