//! Finite-support approximations of probability measures with a bound on
//! the discarded mass.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

/// A measure known exactly on `support`, with at most `tail_bound` mass elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedMeasure<T> {
    pub support: Vec<T>,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

impl<T: Clone + Eq + Hash> TruncatedMeasure<T> {
    /// Builds a measure from explicit probabilities; the tail is 1 − Σ probs,
    /// which must not be negative beyond rounding.
    pub fn from_probs(items: Vec<(T, f64)>) -> Result<Self> {
        let (support, probs): (Vec<T>, Vec<f64>) = items.into_iter().unzip();
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("probability {p} is not a nonnegative number")));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::Invariant(format!("probabilities sum to {total} > 1")));
        }
        Ok(TruncatedMeasure { support, probs, tail_bound: (1.0 - total).max(0.0) })
    }

    /// Normalizes nonnegative weights by their sum; the result has no tail.
    pub fn from_weights(items: Vec<(T, f64)>) -> Result<Self> {
        let total: f64 = items.iter().map(|(_, w)| w).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::EmptySupport(format!("total weight {total}")));
        }
        let (support, probs) = items.into_iter().map(|(x, w)| (x, w / total)).unzip();
        Ok(TruncatedMeasure { support, probs, tail_bound: 0.0 })
    }

    /// The point mass at `x`.
    pub fn point(x: T) -> Self {
        TruncatedMeasure { support: vec![x], probs: vec![1.0], tail_bound: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.support.iter().zip(self.probs.iter().copied())
    }

    /// Merges repeated support points.
    pub fn to_map(&self) -> HashMap<T, f64> {
        let mut m = HashMap::with_capacity(self.len());
        for (x, p) in self.iter() {
            *m.entry(x.clone()).or_insert(0.0) += p;
        }
        m
    }

    pub fn prob(&self, x: &T) -> f64 {
        self.iter().filter(|(y, _)| *y == x).map(|(_, p)| p).sum()
    }

    /// Upper bound on the total variation distance: half the ℓ¹ distance on
    /// the joint support plus half of both tails.
    pub fn tv_bound(&self, other: &TruncatedMeasure<T>) -> f64 {
        let a = self.to_map();
        let b = other.to_map();
        let mut l1 = 0.0;
        for (x, p) in &a {
            l1 += (p - b.get(x).copied().unwrap_or(0.0)).abs();
        }
        for (x, q) in &b {
            if !a.contains_key(x) {
                l1 += q;
            }
        }
        0.5 * (l1 + self.tail_bound + other.tail_bound)
    }

    /// Image under a map of states, merging collisions.
    pub fn map<U: Clone + Eq + Hash>(&self, f: impl Fn(&T) -> U) -> TruncatedMeasure<U> {
        let mut m: HashMap<U, f64> = HashMap::new();
        let mut order = Vec::new();
        for (x, p) in self.iter() {
            let y = f(x);
            match m.get_mut(&y) {
                Some(v) => *v += p,
                None => {
                    order.push(y.clone());
                    m.insert(y, p);
                }
            }
        }
        let probs = order.iter().map(|y| m[y]).collect();
        TruncatedMeasure { support: order, probs, tail_bound: self.tail_bound }
    }
}
