//! Seeded random toll problems for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TollError};
use crate::toll::TollMatrix;

/// Contiguous inclusive segment interval `[from, to]`.
pub type Block = (usize, usize);

fn check_params(density: f64, max_toll: f64) -> Result<()> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(TollError::InvalidDensity(density));
    }
    if !(max_toll > 0.0 && max_toll.is_finite()) {
        return Err(TollError::InvalidMaxToll(max_toll));
    }
    Ok(())
}

fn fill(
    n: usize,
    density: f64,
    max_toll: f64,
    rng: &mut impl Rng,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<TollMatrix> {
    let mut rows = Vec::new();
    for h in 1..=n {
        for k in h..=n {
            // draw for every cell so the stream does not depend on `allowed`
            let hit = rng.gen::<f64>() < density;
            let value = max_toll * (1.0 - rng.gen::<f64>());
            if hit && allowed(h, k) {
                rows.push((h, k, value));
            }
        }
    }
    TollMatrix::from_triplets(rows, Some(n))
}

/// Each upper-triangular cell is positive with probability `density`, with
/// a value uniform in `(0, max_toll]`. Pure in all arguments.
pub fn random_matrix(n: usize, density: f64, max_toll: f64, seed: u64) -> Result<TollMatrix> {
    if n == 0 {
        return Err(TollError::EmptyHighway);
    }
    check_params(density, max_toll)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill(n, density, max_toll, &mut rng, |_, _| true)
}

/// Same as [`random_matrix`] but drawing from a caller-owned generator.
pub fn random_matrix_with<R: Rng>(n: usize, density: f64, max_toll: f64, rng: &mut R) -> Result<TollMatrix> {
    if n == 0 {
        return Err(TollError::EmptyHighway);
    }
    check_params(density, max_toll)?;
    fill(n, density, max_toll, rng, |_, _| true)
}

/// Checks that `blocks` cover `1..=n` in order without gaps or overlaps and
/// returns `n`.
pub fn validate_blocks(blocks: &[Block]) -> Result<usize> {
    if blocks.is_empty() {
        return Err(TollError::BlocksNotPartition("no blocks given".into()));
    }
    let mut next = 1;
    for &(from, to) in blocks {
        if from != next {
            return Err(TollError::BlocksNotPartition(format!("block [{from},{to}] should start at {next}")));
        }
        if to < from {
            return Err(TollError::BlocksNotPartition(format!("block [{from},{to}] is empty")));
        }
        next = to + 1;
    }
    Ok(next - 1)
}

/// Random matrix whose positive trips each stay inside one block, so every
/// block is a sub-highway. Full density with tolls in `(0, 10]`.
pub fn block_structured_matrix(blocks: &[Block], seed: u64) -> Result<TollMatrix> {
    block_structured_matrix_with(blocks, 1.0, 10.0, seed)
}

pub fn block_structured_matrix_with(blocks: &[Block], density: f64, max_toll: f64, seed: u64) -> Result<TollMatrix> {
    let n = validate_blocks(blocks)?;
    check_params(density, max_toll)?;
    let block_of = |i: usize| blocks.iter().position(|&(a, b)| a <= i && i <= b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill(n, density, max_toll, &mut rng, |h, k| block_of(h) == block_of(k))
}

/// Parses `"1-2,3,4-6"` into blocks.
pub fn parse_blocks(spec: &str) -> Result<Vec<Block>> {
    spec.split(',')
        .map(|part| {
            let part = part.trim();
            let bad = || TollError::BlocksNotPartition(format!("cannot parse block `{part}`"));
            match part.split_once('-') {
                Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
                None => {
                    let i = part.parse().map_err(|_| bad())?;
                    Ok((i, i))
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::ses;

    #[test]
    fn deterministic() {
        let a = random_matrix(5, 1.0, 10.0, 7).unwrap();
        let b = random_matrix(5, 1.0, 10.0, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trip_count(), 15);
        assert_ne!(a, random_matrix(5, 1.0, 10.0, 8).unwrap());
    }

    #[test]
    fn smallest_case() {
        let t = random_matrix(1, 1.0, 1.0, 0).unwrap();
        let v = t.get(1, 1);
        assert!(v > 0.0 && v <= 1.0);
        assert_eq!(t.trip_count(), 1);
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(random_matrix(3, 0.0, 1.0, 0), Err(TollError::InvalidDensity(_))));
        assert!(matches!(random_matrix(3, 1.5, 1.0, 0), Err(TollError::InvalidDensity(_))));
        assert!(matches!(random_matrix(3, 0.5, -1.0, 0), Err(TollError::InvalidMaxToll(_))));
        assert!(matches!(random_matrix(0, 0.5, 1.0, 0), Err(TollError::EmptyHighway)));
    }

    #[test]
    fn blocks_force_zeros() {
        let t = block_structured_matrix(&[(1, 2), (3, 3)], 1).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.get(1, 3), 0.0);
        assert_eq!(t.get(2, 3), 0.0);
        assert!(t.get(1, 2) > 0.0);
        let whole = block_structured_matrix(&[(1, 4)], 1).unwrap();
        assert_eq!(whole.trip_count(), 10);
    }

    #[test]
    fn blocks_must_partition() {
        assert!(block_structured_matrix(&[(1, 2), (4, 4)], 0).is_err());
        assert!(block_structured_matrix(&[(2, 3)], 0).is_err());
        assert!(block_structured_matrix(&[], 0).is_err());
        assert_eq!(parse_blocks("1-2, 3,4-6").unwrap(), vec![(1, 2), (3, 3), (4, 6)]);
        assert!(parse_blocks("1-x").is_err());
    }

    #[test]
    fn ses_block_sums_equal_internal_tolls() {
        let blocks = [(1, 2), (3, 4)];
        let t = block_structured_matrix(&blocks, 5).unwrap();
        let x = ses(&t);
        for (a, b) in blocks {
            let direct: f64 = t.trips().filter(|(tr, _)| tr.within(a, b)).map(|(_, v)| v).sum();
            assert!((x.interval_sum(a, b) - direct).abs() < 1e-12);
        }
    }
}
