use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::orbit::OrbitCloud;
use crate::error::{Error, Result};

/// Least-squares box-counting fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxDimension {
    pub estimate: f64,
    pub r_squared: f64,
    /// `(ε, N(ε))` pairs used in the fit, coarse to fine.
    pub counts: Vec<(f64, usize)>,
    /// Levels dropped because the cloud was too sparse to resolve them.
    pub saturated_levels: Vec<u32>,
    pub degenerate: bool,
}

/// Box-counting options. Scales are `2^-level` for `level ∈ [min_level, max_level]`;
/// a level whose box count exceeds `count / saturation` is undersampled and dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxOptions {
    pub min_level: u32,
    pub max_level: u32,
    pub saturation: f64,
    pub min_r_squared: f64,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions {
            min_level: 2,
            max_level: 8,
            saturation: 8.0,
            min_r_squared: 0.9,
        }
    }
}

/// Number of occupied boxes of side `eps`.
pub fn box_count(cloud: &OrbitCloud, eps: f64) -> usize {
    let boxes: HashSet<Vec<i64>> = cloud
        .points
        .iter()
        .map(|p| p.iter().map(|v| (v / eps).floor() as i64).collect())
        .collect();
    boxes.len()
}

/// Slope of `log N(ε)` against `log(1/ε)`.
pub fn box_counting_dimension(cloud: &OrbitCloud, opts: &BoxOptions) -> Result<BoxDimension> {
    if cloud.is_empty() {
        return Err(Error::InvalidParameter("empty cloud".into()));
    }
    if opts.max_level < opts.min_level + 1 {
        return Err(Error::InvalidParameter("box counting needs at least two levels".into()));
    }
    let levels: Vec<u32> = (opts.min_level..=opts.max_level).collect();
    let all: Vec<(u32, f64, usize)> = levels
        .par_iter()
        .map(|&l| {
            let eps = 2f64.powi(-(l as i32));
            (l, eps, box_count(cloud, eps))
        })
        .collect();
    let limit = cloud.len() as f64 / opts.saturation;
    let (kept, dropped): (Vec<_>, Vec<_>) = all
        .into_iter()
        .enumerate()
        .partition(|(i, (_, _, n))| *i < 2 || (*n as f64) <= limit);
    let counts: Vec<(f64, usize)> = kept.iter().map(|(_, (_, e, n))| (*e, *n)).collect();
    let saturated_levels = dropped.iter().map(|(_, (l, _, _))| *l).collect();

    let xs: Vec<f64> = counts.iter().map(|(e, _)| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let (slope, r_squared) = fit(&xs, &ys);
    Ok(BoxDimension {
        estimate: slope,
        r_squared,
        counts,
        saturated_levels,
        degenerate: r_squared < opts.min_r_squared,
    })
}

/// Slope and r² of the least-squares line. A constant response is a perfect fit.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    if syy == 0.0 {
        return (slope, 1.0);
    }
    (slope, (sxy * sxy) / (sxx * syy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::mapspec::MapSpec;
    use crate::classify::orbit::generate_orbit;

    fn cloud(points: Vec<Vec<f64>>) -> OrbitCloud {
        OrbitCloud {
            points,
            transient: 0,
            seed: 0,
        }
    }

    #[test]
    fn single_point_is_zero() {
        let c = cloud(vec![vec![0.3, 0.7]; 100]);
        let d = box_counting_dimension(&c, &BoxOptions::default()).unwrap();
        assert_eq!(d.estimate, 0.0);
        assert_eq!(d.r_squared, 1.0);
        assert!(!d.degenerate);
    }

    #[test]
    fn grid_segment_is_one() {
        let c = cloud((0..4096).map(|i| vec![i as f64 / 4096.0, 0.5]).collect());
        let d = box_counting_dimension(&c, &BoxOptions::default()).unwrap();
        assert!((d.estimate - 1.0).abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn needs_two_levels() {
        let c = cloud(vec![vec![0.0]]);
        let opts = BoxOptions {
            min_level: 3,
            max_level: 3,
            ..BoxOptions::default()
        };
        assert!(box_counting_dimension(&c, &opts).is_err());
    }

    #[test]
    fn cat_orbit_is_two() {
        let spec = MapSpec::builtin("toral_auto").unwrap();
        let c = generate_orbit(&spec, 100, 100_000, 1).unwrap();
        let d = box_counting_dimension(&c, &BoxOptions::default()).unwrap();
        assert!((d.estimate - 2.0).abs() <= 0.1, "{d:?}");
    }

    #[test]
    fn smale_orbit_is_three_halves() {
        let spec = MapSpec::builtin("smale_solenoid").unwrap();
        let c = generate_orbit(&spec, 100, 100_000, 1).unwrap();
        let d = box_counting_dimension(&c, &BoxOptions::default()).unwrap();
        assert!((d.estimate - 1.5).abs() <= 0.15, "{d:?}");
    }
}
