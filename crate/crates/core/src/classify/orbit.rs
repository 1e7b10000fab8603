use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mapspec::{MapSpec, AMBIENT_BOUND};
use crate::error::{Error, Result};

/// Sampled orbit after the transient.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitCloud {
    pub points: Vec<Vec<f64>>,
    pub transient: usize,
    pub seed: u64,
}

impl OrbitCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Largest coordinate spread (sup-norm diameter of the bounding box).
    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = self
                    .points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[i]), hi.max(p[i])));
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim()).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn in_bounds(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && v.abs() <= AMBIENT_BOUND)
}

/// Runs `transient + count` iterates from a seeded start and keeps the last `count`.
pub fn generate_orbit(spec: &MapSpec, transient: usize, count: usize, seed: u64) -> Result<OrbitCloud> {
    if count == 0 {
        return Err(Error::InvalidParameter("orbit count must be at least 1".into()));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = spec.initial(&mut rng);
    let mut points = Vec::with_capacity(count);
    for iterate in 1..=transient + count {
        spec.step(&mut state, &mut rng);
        if !in_bounds(&state.coords) {
            return Err(Error::Divergence { iterate });
        }
        if iterate > transient {
            points.push(state.coords.clone());
        }
    }
    Ok(OrbitCloud { points, transient, seed })
}
