//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library paths they are used to check.
#![allow(dead_code)]

use calvol_core::rng::CounterRng;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Textbook Pearson correlation.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx).powi(2);
        syy += (y[i] - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Average rank by counting: 1 + #smaller + (#equal - 1) / 2.
pub fn ranks_by_counting(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Tau-b from the O(n^2) pair definition.
pub fn kendall_pairs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                continue;
            } else if dx == 0.0 {
                tx += 1;
            } else if dy == 0.0 {
                ty += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (concordant + discordant + tx) as f64;
    let n1 = (concordant + discordant + ty) as f64;
    (concordant - discordant) as f64 / (n0 * n1).sqrt()
}

/// Every point compared against every other point.
pub fn pareto_brute(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !(0..points.len()).any(|j| {
                j != i
                    && points[j].iter().zip(&points[i]).all(|(a, b)| a <= b)
                    && points[j].iter().zip(&points[i]).any(|(a, b)| a < b)
            })
        })
        .collect()
}

/// Grouped-score calibration error by an O(n^2) scan.
pub fn ce_by_scan(scores: &[f64], labels: &[bool]) -> f64 {
    let n = scores.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mut c, mut p) = (0.0, 0.0);
        for j in 0..n {
            if scores[j] == scores[i] {
                c += 1.0;
                p += f64::from(u8::from(labels[j]));
            }
        }
        total += (p / c - scores[i]).abs();
    }
    total / n as f64
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        x.exp() / (1.0 + x.exp())
    }
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f increasing, f(lo) < 0 < f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Logistic regression `y ~ sigmoid(a z + b)` by nested bisection: for fixed
/// `a` the optimal `b` zeroes the intercept score equation; the profile
/// derivative in `a` is then increasing, so `a` is also found by bisection.
/// Converges to machine precision without using second derivatives.
pub fn logistic_fit_by_bisection(z: &[f64], y: &[bool]) -> (f64, f64) {
    let best_b = |a: f64| {
        bisect(-60.0, 60.0, |b| {
            z.iter()
                .zip(y)
                .map(|(&zi, &yi)| logistic(a * zi + b) - f64::from(u8::from(yi)))
                .sum()
        })
    };
    let a = bisect(-20.0, 20.0, |a| {
        let b = best_b(a);
        z.iter()
            .zip(y)
            .map(|(&zi, &yi)| (logistic(a * zi + b) - f64::from(u8::from(yi))) * zi)
            .sum()
    });
    (a, best_b(a))
}

pub fn random_array(rng: &mut CounterRng, n: usize, tied: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if tied {
                (rng.next_f64() * 5.0).floor()
            } else {
                rng.next_f64() * 10.0 - 5.0
            }
        })
        .collect()
}
