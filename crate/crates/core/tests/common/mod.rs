//! Brute-force reference implementations written straight from the game
//! definitions, sharing no code with the library beyond the matrix type.

#![allow(dead_code)]

use highway_toll::TollMatrix;

/// Tolls of trips whose segments all lie in `mask` (bit `i - 1` is segment `i`).
pub fn worth(t: &TollMatrix, mask: usize) -> f64 {
    t.trips().filter(|(trip, _)| (trip.entry..=trip.exit).all(|i| mask & (1 << (i - 1)) != 0)).map(|(_, v)| v).sum()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

pub fn shapley(t: &TollMatrix) -> Vec<f64> {
    let n = t.n();
    let full = (1usize << n) - 1;
    let v: Vec<f64> = (0..=full).map(|s| worth(t, s)).collect();
    (0..n)
        .map(|i| {
            (0..=full)
                .filter(|s| s & (1 << i) == 0)
                .map(|s| {
                    let k = s.count_ones() as usize;
                    factorial(k) * factorial(n - k - 1) / factorial(n) * (v[s | (1 << i)] - v[s])
                })
                .sum()
        })
        .collect()
}

/// Compromise value from the utopia vector and minimal rights; `None` when
/// the two coincide in total and the interpolation is undefined.
pub fn tau(t: &TollMatrix) -> Option<Vec<f64>> {
    let n = t.n();
    let full = (1usize << n) - 1;
    let v: Vec<f64> = (0..=full).map(|s| worth(t, s)).collect();
    let utopia: Vec<f64> = (0..n).map(|i| v[full] - v[full & !(1 << i)]).collect();
    let minimal: Vec<f64> = (0..n)
        .map(|i| {
            (1..=full)
                .filter(|s| s & (1 << i) != 0)
                .map(|s| v[s] - (0..n).filter(|&j| j != i && s & (1 << j) != 0).map(|j| utopia[j]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let (su, sm): (f64, f64) = (utopia.iter().sum(), minimal.iter().sum());
    if (su - sm).abs() < 1e-15 {
        return if (v[full] - sm).abs() < 1e-12 { Some(minimal) } else { None };
    }
    let lambda = (v[full] - sm) / (su - sm);
    Some(minimal.iter().zip(&utopia).map(|(m, u)| m + lambda * (u - m)).collect())
}

/// Average over roots of the hierarchical outcome on the line.
pub fn average_tree(t: &TollMatrix) -> Vec<f64> {
    let n = t.n();
    let iv = |a: usize, b: usize| if a > b { 0.0 } else { t.interval_value(a, b) };
    let mut x = vec![0.0; n];
    for root in 1..=n {
        for i in 1..=n {
            x[i - 1] += if i < root {
                iv(1, i) - iv(1, i - 1)
            } else if i > root {
                iv(i, n) - iv(i + 1, n)
            } else {
                iv(1, n) - iv(1, i - 1) - iv(i + 1, n)
            };
        }
    }
    x.iter().map(|v| v / n as f64).collect()
}

pub fn in_core_exhaustive(t: &TollMatrix, x: &[f64], tol: f64) -> bool {
    let n = t.n();
    let full = (1usize << n) - 1;
    let sum = |s: usize| (0..n).filter(|&i| s & (1 << i) != 0).map(|i| x[i]).sum::<f64>();
    let tol = tol * t.total().max(1.0);
    (sum(full) - worth(t, full)).abs() <= tol && (1..full).all(|s| sum(s) >= worth(t, s) - tol)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
