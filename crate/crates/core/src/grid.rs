//! Parameter-box sample grids and deterministic (optionally parallel)
//! evaluation over them.
//!
//! Samples are always enumerated in row-major order and reductions walk the
//! collected results in that fixed order, so reports are identical at any
//! parallelism degree.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// An axis-aligned parameter box with a per-axis resolution.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, res: usize) -> GridSpec {
        GridSpec {
            min: vec![lo, lo],
            max: vec![hi, hi],
            resolution: vec![res, res],
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    fn axis_values(&self, axis: usize) -> Vec<f64> {
        let r = self.resolution[axis].max(1);
        if r == 1 {
            return vec![0.5 * (self.min[axis] + self.max[axis])];
        }
        (0..r)
            .map(|i| {
                self.min[axis] + (self.max[axis] - self.min[axis]) * (i as f64) / ((r - 1) as f64)
            })
            .collect()
    }

    /// All sample points, row-major (last axis fastest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.axis_values(a)).collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for prefix in &out {
                for v in axis {
                    let mut p = prefix.clone();
                    p.push(*v);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

/// Map a function over samples in parallel, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_samples<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_samples<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync,
{
    items.iter().map(f).collect()
}

/// Always-sequential map, kept for benchmarking against the parallel path.
pub fn map_samples_seq<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}
