//! Inequality and agreement measures over allocation vectors.

use serde::Serialize;

use crate::error::{Result, TollError};

/// Gini index as the mean absolute difference over twice the mean:
/// `sum_i sum_j |x_i - x_j| / (2 n sum x)`.
pub fn gini(x: &[f64]) -> Result<f64> {
    // sorted form of the pairwise sum: 2 * sum_k (2k - n - 1) x_(k)
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if x.is_empty() || total <= 0.0 {
        return Err(TollError::ZeroTotal);
    }
    let n = sorted.len() as f64;
    let weighted: f64 = sorted.iter().enumerate().map(|(k, v)| (2.0 * (k as f64 + 1.0) - n - 1.0) * v).sum();
    Ok(weighted / (n * total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    /// `(k / n, cumulative share of the k smallest values)` for `k = 0..=n`.
    pub points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Trapezoid area under the curve.
    pub fn area(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum()
    }

    /// `1 - 2 * area`; agrees with [`gini`] for this discretization.
    pub fn gini(&self) -> f64 {
        1.0 - 2.0 * self.area()
    }
}

pub fn lorenz(x: &[f64]) -> Result<LorenzCurve> {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    // summed in sorted order so the curve is exactly permutation invariant
    let total: f64 = sorted.iter().sum();
    if x.is_empty() || total <= 0.0 {
        return Err(TollError::ZeroTotal);
    }
    let n = sorted.len();
    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let mut acc = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        acc += v;
        let share = if k + 1 == n { 1.0 } else { acc / total };
        points.push(((k + 1) as f64 / n as f64, share));
    }
    Ok(LorenzCurve { points })
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(TollError::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(TollError::TooShort);
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(TollError::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks in ascending order, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && x[order[end + 1]] == x[order[start]] {
            end += 1;
        }
        let avg = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = avg;
        }
        start = end + 1;
    }
    ranks
}

/// Pearson correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlations {
    pub spearman: f64,
    pub pearson: f64,
}

pub fn rank_correlations(x: &[f64], y: &[f64]) -> Result<Correlations> {
    Ok(Correlations { spearman: spearman(x, y)?, pearson: pearson(x, y)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSegment {
    pub position: usize,
    pub segment: usize,
    pub share: f64,
}

/// Highest and lowest ranked segments. Ties go to the lower segment index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub top: Vec<RankedSegment>,
    /// Last positions, in position order (e.g. 20, 21, 22 of 22).
    pub bottom: Vec<RankedSegment>,
    pub tie_break: &'static str,
}

pub fn ranking(x: &[f64], top: usize, bottom: usize) -> Ranking {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let ranked: Vec<RankedSegment> = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| RankedSegment { position: pos + 1, segment: i + 1, share: x[i] })
        .collect();
    let top = ranked.iter().take(top).cloned().collect();
    let bottom = ranked[ranked.len().saturating_sub(bottom)..].to_vec();
    Ranking { top, bottom, tie_break: "ascending segment index" }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[3.0; 5]).unwrap(), 0.0);
        assert!((gini(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(gini(&[0.0, 0.0]), Err(TollError::ZeroTotal)));
    }

    #[test]
    fn lorenz_points() {
        let l = lorenz(&[1.0, 0.0]).unwrap();
        assert_eq!(l.points, vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]);
        let eq = lorenz(&[2.0; 4]).unwrap();
        for (p, share) in &eq.points {
            assert!((p - share).abs() < 1e-15);
        }
        assert!(eq.gini().abs() < 1e-15);
    }

    #[test]
    fn lorenz_area_matches_gini() {
        let x = [3.0, 0.5, 7.25, 1.0, 1.0, 4.0];
        let g = gini(&x).unwrap();
        let lg = lorenz(&x).unwrap().gini();
        assert!((g - lg).abs() < 1e-12);
        assert!((g - lg).abs() <= 1.0 / x.len() as f64);
    }

    #[test]
    fn correlations() {
        let x = [1.0, 2.0, 5.0, 3.0];
        let c = rank_correlations(&x, &x).unwrap();
        assert!((c.spearman - 1.0).abs() < 1e-15 && (c.pearson - 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&x, &[1.0; 4]), Err(TollError::ConstantVector)));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(TollError::TooShort)));
        assert!(matches!(spearman(&x, &[1.0, 2.0]), Err(TollError::LengthMismatch { .. })));
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn ranking_ties() {
        let r = ranking(&[1.0, 1.0, 1.0], 2, 1);
        assert_eq!(r.top.iter().map(|s| s.segment).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r.bottom[0].segment, 3);
        assert_eq!(r.bottom[0].position, 3);
    }
}
