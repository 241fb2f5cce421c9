//! Platt scaling: `p = sigmoid(a * z + b)` fitted by maximum likelihood on
//! logits `z`.
//!
//! The fit minimises the mean negative log-likelihood with damped Newton
//! steps. Each step is halved until the objective does not increase, so the
//! iterates can never diverge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use crate::volume::check_scores;

/// Default clamp applied before taking logits of probabilities.
pub const LOGIT_EPS: f64 = 1e-7;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn clamped_logit(p: f64, eps: f64) -> f64 {
    let p = p.clamp(eps, 1.0 - eps);
    (p / (1.0 - p)).ln()
}

/// `log(p / (1 - p))` with `p` clamped to `[eps, 1 - eps]`.
pub fn to_logit(p: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "logit clamp eps must lie in (0, 0.5), got {eps}"
        )));
    }
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} is outside [0, 1]"
        )));
    }
    Ok(clamped_logit(p, eps))
}

/// Converts a slice of probabilities to clamped logits.
pub fn logits_from_probabilities(scores: &[f64], eps: f64) -> Result<Vec<f64>> {
    scores.iter().map(|&p| to_logit(p, eps)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattOptions {
    pub max_iterations: usize,
    /// Tolerance on the Euclidean norm of the mean-NLL gradient.
    pub grad_tol: f64,
    /// Use Platt's smoothed targets `(N+ + 1) / (N+ + 2)` and `1 / (N- + 2)`.
    pub label_smoothing: bool,
}

impl Default for PlattOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            grad_tol: 1e-10,
            label_smoothing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_gradient_norm: f64,
}

impl PlattParams {
    /// `a = 1, b = 0`: returns `sigmoid(z)` unchanged.
    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            converged: true,
            iterations: 0,
            final_gradient_norm: 0.0,
        }
    }

    #[inline]
    pub fn apply_one(&self, logit: f64) -> f64 {
        sigmoid(self.a * logit + self.b)
    }
}

struct Objective<'a> {
    logits: &'a [f64],
    targets: Vec<f64>,
}

struct Derivatives {
    gradient: [f64; 2],
    // [d2/da2, d2/dadb, d2/db2]
    hessian: [f64; 3],
}

impl Objective<'_> {
    fn nll(&self, a: f64, b: f64) -> f64 {
        let acc: NeumaierSum = self
            .logits
            .iter()
            .zip(&self.targets)
            .map(|(&z, &t)| {
                let u = a * z + b;
                softplus(u) - t * u
            })
            .sum();
        acc.value() / self.logits.len() as f64
    }

    fn derivatives(&self, a: f64, b: f64) -> Derivatives {
        let mut g = [NeumaierSum::new(); 2];
        let mut h = [NeumaierSum::new(); 3];
        for (&z, &t) in self.logits.iter().zip(&self.targets) {
            let p = sigmoid(a * z + b);
            let r = p - t;
            let w = p * (1.0 - p);
            g[0].add(r * z);
            g[1].add(r);
            h[0].add(w * z * z);
            h[1].add(w * z);
            h[2].add(w);
        }
        let n = self.logits.len() as f64;
        Derivatives {
            gradient: [g[0].value() / n, g[1].value() / n],
            hessian: [h[0].value() / n, h[1].value() / n, h[2].value() / n],
        }
    }
}

/// Solves `H d = -g` for the 2x2 Newton direction, regularising a singular
/// or indefinite Hessian with a diagonal shift.
fn newton_direction(d: &Derivatives) -> [f64; 2] {
    let [haa, hab, hbb] = d.hessian;
    let [ga, gb] = d.gradient;
    let mut shift = 0.0;
    let scale = (haa + hbb).max(f64::MIN_POSITIVE);
    for _ in 0..60 {
        let (x, y) = (haa + shift, hbb + shift);
        let det = x * y - hab * hab;
        if x > 0.0 && det > 1e-12 * scale * scale {
            return [(-y * ga + hab * gb) / det, (hab * ga - x * gb) / det];
        }
        shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
    }
    // Hessian vanished entirely (all points saturated): fall back to gradient descent.
    [-ga, -gb]
}

/// Fits Platt parameters on `logits` against binary `labels`.
///
/// Starts at `a = 0`, `b = logit(target mean)`. Both classes must be present.
pub fn platt_fit(logits: &[f64], labels: &[bool], opts: &PlattOptions) -> Result<PlattParams> {
    if logits.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: logits.len(),
            got: labels.len(),
        });
    }
    if logits.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: logits.len(),
        });
    }
    if let Some(i) = logits.iter().position(|z| !z.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "logit at index {i} is not finite"
        )));
    }
    if opts.grad_tol.is_nan() || opts.grad_tol < 0.0 {
        return Err(Error::InvalidParameter("grad_tol must be >= 0".into()));
    }
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }

    let (hi, lo) = if opts.label_smoothing {
        (
            (n_pos as f64 + 1.0) / (n_pos as f64 + 2.0),
            1.0 / (n_neg as f64 + 2.0),
        )
    } else {
        (1.0, 0.0)
    };
    let objective = Objective {
        logits,
        targets: labels.iter().map(|&y| if y { hi } else { lo }).collect(),
    };
    let target_mean = compensated_mean(&objective.targets);

    let mut a = 0.0;
    let mut b = (target_mean / (1.0 - target_mean)).ln();
    let mut value = objective.nll(a, b);
    let mut iterations = 0;
    let mut stalled = false;

    let grad_norm = loop {
        let d = objective.derivatives(a, b);
        let norm = d.gradient[0].hypot(d.gradient[1]);
        if norm <= opts.grad_tol || iterations >= opts.max_iterations || stalled {
            break norm;
        }
        let [da, db] = newton_direction(&d);
        iterations += 1;

        let mut step = 1.0;
        stalled = true;
        for _ in 0..60 {
            let (na, nb) = (a + step * da, b + step * db);
            let candidate = objective.nll(na, nb);
            if candidate <= value {
                if (na, nb) != (a, b) {
                    stalled = false;
                }
                a = na;
                b = nb;
                value = candidate;
                break;
            }
            step *= 0.5;
        }
    };

    Ok(PlattParams {
        a,
        b,
        converged: grad_norm <= opts.grad_tol,
        iterations,
        final_gradient_norm: grad_norm,
    })
}

fn compensated_mean(values: &[f64]) -> f64 {
    values.iter().sum::<NeumaierSum>().value() / values.len() as f64
}

/// Mean negative log-likelihood of `sigmoid(a z + b)` against hard labels.
pub fn mean_nll(params: &PlattParams, logits: &[f64], labels: &[bool]) -> f64 {
    let objective = Objective {
        logits,
        targets: labels.iter().map(|&y| f64::from(u8::from(y))).collect(),
    };
    objective.nll(params.a, params.b)
}

/// `sigmoid(a * z + b)` per logit.
pub fn platt_apply(params: &PlattParams, logits: &[f64]) -> Vec<f64> {
    logits.iter().map(|&z| params.apply_one(z)).collect()
}

/// `sigmoid(logit(s) / temperature)`; temperatures above 1 pull scores toward 0.5.
pub fn temperature_distort(scores: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive and finite, got {temperature}"
        )));
    }
    check_scores(scores)?;
    Ok(scores
        .iter()
        .map(|&s| sigmoid(clamped_logit(s, LOGIT_EPS) / temperature))
        .collect())
}
