//! Allocation rules that each drop exactly one axiom of a characterization.
//!
//! They exist to show that no axiom in a characterization is redundant; the
//! independence harness in [`crate::axioms`] runs them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TollError};
use crate::methods::{scs, ses, sps, AllocationRule};
use crate::toll::{Allocation, TollMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Counterexample {
    /// Every segment receives the full toll of each trip using it.
    InvolvementSum,
    /// SPS, except on the two-segment problem `t11 = 1, t22 = 2` where it
    /// returns `(2, 1)`.
    SwapDiagonal,
    /// SPS, except on three-segment problems with `t12 = t13 = 0 < t23`
    /// where segment `i` gets `t_ii + t23 / 3`.
    TildeFamily,
    /// `total / n` to every segment.
    Uniform,
    /// Nothing to anyone.
    Zero,
    /// Every segment receives the tolls of trips entering there.
    Entrance,
    /// SCS on unitary toll matrices, SES otherwise.
    Hybrid,
}

impl Counterexample {
    pub const ALL: [Counterexample; 7] = [
        Counterexample::InvolvementSum,
        Counterexample::SwapDiagonal,
        Counterexample::TildeFamily,
        Counterexample::Uniform,
        Counterexample::Zero,
        Counterexample::Entrance,
        Counterexample::Hybrid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Counterexample::InvolvementSum => "A1_involvement_sum",
            Counterexample::SwapDiagonal => "A1_swap_diag",
            Counterexample::TildeFamily => "A1_tilde",
            Counterexample::Uniform => "A2_uniform",
            Counterexample::Zero => "A2_zero",
            Counterexample::Entrance => "A2_entrance",
            Counterexample::Hybrid => "A2_hybrid",
        }
    }

    /// The special problem on which [`Counterexample::SwapDiagonal`] departs
    /// from SPS.
    pub fn swap_trigger() -> TollMatrix {
        TollMatrix::from_triplets([(1, 1, 1.0), (2, 2, 2.0)], Some(2)).expect("valid trigger")
    }

    pub fn in_tilde_family(toll: &TollMatrix) -> bool {
        toll.n() == 3 && toll.get(1, 2) == 0.0 && toll.get(1, 3) == 0.0 && toll.get(2, 3) > 0.0
    }

    pub fn apply(&self, toll: &TollMatrix) -> Allocation {
        let n = toll.n();
        match self {
            Counterexample::InvolvementSum => Allocation::from_raw(toll.involvement()),
            Counterexample::SwapDiagonal => {
                if *toll == Self::swap_trigger() {
                    Allocation::from_raw(vec![2.0, 1.0])
                } else {
                    sps(toll)
                }
            }
            Counterexample::TildeFamily => {
                if Self::in_tilde_family(toll) {
                    let third = toll.get(2, 3) / 3.0;
                    Allocation::from_raw(toll.diagonal().into_iter().map(|d| d + third).collect())
                } else {
                    sps(toll)
                }
            }
            Counterexample::Uniform => Allocation::from_raw(vec![toll.total() / n as f64; n]),
            Counterexample::Zero => Allocation::zeros(n),
            Counterexample::Entrance => {
                let mut x = vec![0.0; n];
                for (trip, t) in toll.trips() {
                    x[trip.entry - 1] += t;
                }
                Allocation::from_raw(x)
            }
            Counterexample::Hybrid => {
                if toll.as_unit().is_some() {
                    scs(toll)
                } else {
                    ses(toll)
                }
            }
        }
    }
}

/// Looks a counterexample rule up by its name, e.g. `A2_entrance`.
pub fn counterexample_method(name: &str) -> Result<Counterexample> {
    name.parse()
}

impl FromStr for Counterexample {
    type Err = TollError;
    fn from_str(s: &str) -> Result<Self> {
        Counterexample::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| TollError::UnknownMethod(s.to_string()))
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl AllocationRule for Counterexample {
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
    use crate::fixtures::three_segment_example;

    #[test]
    fn direct_evaluations() {
        let t = three_segment_example();
        let x = Counterexample::InvolvementSum.apply(&t);
        assert_eq!(x.as_slice(), &[2.0, 2.0, 1.0]);
        assert_eq!(x.total(), 5.0);
        assert_eq!(Counterexample::Entrance.apply(&t).as_slice(), &[2.0, 0.0, 0.0]);
        assert_eq!(Counterexample::Zero.apply(&t).as_slice(), &[0.0; 3]);
        let u = Counterexample::Uniform.apply(&t);
        assert!(u.as_slice().iter().all(|v| (v - 2.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn piecewise_triggers() {
        let trig = Counterexample::swap_trigger();
        assert_eq!(Counterexample::SwapDiagonal.apply(&trig).as_slice(), &[2.0, 1.0]);
        assert_eq!(sps(&trig).as_slice(), &[1.0, 2.0]);

        let tilde = TollMatrix::from_triplets([(2, 3, 3.0), (1, 1, 1.0)], Some(3)).unwrap();
        assert!(Counterexample::in_tilde_family(&tilde));
        assert_eq!(Counterexample::TildeFamily.apply(&tilde).as_slice(), &[2.0, 1.0, 1.0]);

        let unit = TollMatrix::from_triplets([(1, 2, 1.0)], Some(3)).unwrap();
        assert_eq!(Counterexample::Hybrid.apply(&unit), scs(&unit));
        let t = three_segment_example();
        assert_eq!(Counterexample::Hybrid.apply(&t), ses(&t));
    }

    #[test]
    fn names_round_trip() {
        for c in Counterexample::ALL {
            assert_eq!(counterexample_method(c.as_str()).unwrap(), c);
        }
        assert!(counterexample_method("A3_nothing").is_err());
    }
}
