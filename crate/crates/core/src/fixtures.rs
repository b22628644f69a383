//! Small reference problems used throughout the tests, the CLI and the docs.

use crate::toll::TollMatrix;

/// Three segments with `t12 = t13 = 1`.
///
/// SES gives `(5/6, 5/6, 1/3)`, SPS `(4/5, 4/5, 2/5)` and SCS `(2/3, 1, 1/3)`.
pub fn three_segment_example() -> TollMatrix {
    TollMatrix::from_triplets([(1, 2, 1.0), (1, 3, 1.0)], Some(3)).expect("valid fixture")
}

/// Five segments on which the SPS allocation leaves the core: segments 1 and
/// 2 receive about 7.318 while the trips inside `{1,2}` collect 7.5.
///
/// `t11 = t15 = 1`, `t12 = 5`, `t22 = 1.5`, `t25 = 0.02`, `t44 = 2` and every
/// other upper-triangular cell is `0.01`.
pub fn sps_outside_core_example() -> TollMatrix {
    let n = 5;
    let mut rows = Vec::new();
    for h in 1..=n {
        for k in h..=n {
            let toll = match (h, k) {
                (1, 1) | (1, 5) => 1.0,
                (1, 2) => 5.0,
                (2, 2) => 1.5,
                (2, 5) => 0.02,
                (4, 4) => 2.0,
                _ => 0.01,
            };
            rows.push((h, k, toll));
        }
    }
    TollMatrix::from_triplets(rows, Some(n)).expect("valid fixture")
}

/// Published per-segment SES, SPS and SCS allocations (euro) for the 22
/// segments of the Bilbao-Zaragoza AP68 highway, as `(ses, sps, scs)`.
pub const AP68_PUBLISHED: [(f64, f64, f64); 22] = [
    (30428.56, 23261.38, 10331.42),
    (29263.76, 22096.58, 13923.71),
    (26647.36, 21523.22, 15422.49),
    (25814.30, 21256.30, 9511.18),
    (26390.88, 21739.12, 53338.43),
    (14222.45, 15368.54, 7511.71),
    (14177.34, 15373.15, 42878.96),
    (9113.57, 12667.70, 17697.8),
    (10006.06, 13441.10, 15235.44),
    (9922.48, 12960.35, 11284.26),
    (9682.34, 12740.88, 8514.82),
    (9551.17, 12741.26, 16758.75),
    (10413.31, 13424.43, 16572.39),
    (10447.10, 12715.24, 9686.86),
    (11020.85, 13145.45, 10438.76),
    (9178.34, 12410.19, 10429.75),
    (8698.88, 12027.74, 7195.64),
    (15000.33, 15556.73, 26544.78),
    (15427.79, 14863.03, 13537.09),
    (16962.08, 15277.41, 13672.06),
    (14755.64, 13645.20, 5733.30),
    (17025.39, 15914.95, 7930.37),
];

/// Published percentage of the total toll per segment, as `(ses, sps, scs)`.
pub const AP68_PUBLISHED_PERCENT: [(f64, f64, f64); 22] = [
    (8.84, 6.76, 3.0),
    (8.50, 6.42, 4.05),
    (7.74, 6.25, 4.48),
    (7.50, 6.18, 2.76),
    (7.67, 6.32, 15.5),
    (4.13, 4.47, 2.18),
    (4.12, 4.47, 12.46),
    (2.65, 3.68, 5.14),
    (2.91, 3.91, 4.43),
    (2.88, 3.77, 3.28),
    (2.81, 3.7, 2.47),
    (2.78, 3.7, 4.87),
    (3.03, 3.9, 4.82),
    (3.04, 3.69, 2.81),
    (3.2, 3.82, 3.03),
    (2.67, 3.61, 3.03),
    (2.53, 3.49, 2.09),
    (4.36, 4.52, 7.71),
    (4.48, 4.32, 3.93),
    (4.93, 4.44, 3.97),
    (4.29, 3.96, 1.67),
    (4.95, 4.62, 2.3),
];
