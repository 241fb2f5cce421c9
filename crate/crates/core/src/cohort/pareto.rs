//! Non-dominated subset of model configurations.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "minimize" => Ok(Direction::Minimize),
            "max" | "maximize" => Ok(Direction::Maximize),
            other => Err(Error::InvalidParameter(format!(
                "unknown direction `{other}` (expected min or max)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub id: String,
    pub objectives: Vec<f64>,
}

impl ParetoPoint {
    pub fn new(id: impl Into<String>, objectives: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            objectives,
        }
    }
}

/// `a` dominates `b` (both already in minimisation form): no worse anywhere,
/// strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Ids of the non-dominated points, in input order. Points with identical
/// objective vectors do not dominate each other and are all kept.
pub fn pareto_front(points: &[ParetoPoint], directions: &[Direction]) -> Result<Vec<String>> {
    if directions.is_empty() {
        return Err(Error::InvalidParameter("at least one objective is required".into()));
    }
    let normalized: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            if p.objectives.len() != directions.len() {
                return Err(Error::LengthMismatch {
                    expected: directions.len(),
                    got: p.objectives.len(),
                });
            }
            p.objectives
                .iter()
                .zip(directions)
                .map(|(&v, d)| {
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "objective of `{}` is not finite",
                            p.id
                        )));
                    }
                    Ok(match d {
                        Direction::Minimize => v,
                        Direction::Maximize => -v,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    // A dominating point precedes the point it dominates in lexicographic
    // order, and dominance is transitive, so comparing each candidate against
    // the front found so far is enough.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lexicographic(&normalized[a], &normalized[b]));
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&f| dominates(&normalized[f], &normalized[i])) {
            front.push(i);
        }
    }
    front.sort_unstable();
    Ok(front.into_iter().map(|i| points[i].id.clone()).collect())
}
