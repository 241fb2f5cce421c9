//! Pearson, Spearman and Kendall tau-b correlation.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pearson {
    pub r: f64,
    /// `(1 - r^2) / sqrt(n)`.
    pub se: f64,
}

fn check_inputs(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(Error::TooFewPoints {
            needed: min_len,
            got: x.len(),
        });
    }
    if let Some(v) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "correlation inputs must be finite, got {v}"
        )));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<NeumaierSum>().value() / v.len() as f64
}

/// Centred two-pass Pearson coefficient; inputs already validated.
fn pearson_coefficient(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    let (sxx, syy) = (sxx.value(), syy.value());
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy.value() / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation with the error bar `(1 - r^2) / sqrt(n)`.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Pearson> {
    check_inputs(x, y, 3)?;
    let r = pearson_coefficient(x, y)?;
    Ok(Pearson {
        r,
        se: (1.0 - r * r) / (x.len() as f64).sqrt(),
    })
}

/// 1-based ranks; tied values share the average of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    check_inputs(x, y, 3)?;
    pearson_coefficient(&average_ranks(x), &average_ranks(y))
}

/// Number of pairs within runs of equal values of a sorted key.
fn tied_pairs<T>(items: &[T], same: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in items.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` by `y` with a stable merge sort and returns the number of swaps
/// (inversions), i.e. pairs out of order in `y`.
fn merge_count(v: &mut [(f64, f64)], buf: &mut Vec<(f64, f64)>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j].1.total_cmp(&v[i].1) == Ordering::Less {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall's tau-b, computed in `O(n log n)` with Knight's algorithm.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_inputs(x, y, 2)?;
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let total = n * (n - 1) / 2;
    let ties_x = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let ties_xy = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);
    let mut buf = Vec::with_capacity(pairs.len());
    let swaps = merge_count(&mut pairs, &mut buf);
    let ties_y = tied_pairs(&pairs, |a, b| a.1 == b.1);

    let denom = ((total - ties_x) as f64) * ((total - ties_y) as f64);
    if denom == 0.0 {
        return Err(Error::ConstantInput);
    }
    // concordant - discordant
    let numer = total as i64 - ties_x as i64 - ties_y as i64 + ties_xy as i64 - 2 * swaps as i64;
    Ok((numer as f64 / denom.sqrt()).clamp(-1.0, 1.0))
}
