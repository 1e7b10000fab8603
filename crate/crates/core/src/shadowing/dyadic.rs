use std::sync::Arc;

use num_bigint::BigInt;

use super::{OmegaPoint, ProductHyperbolicSystem, Rates};
use crate::cover::{alpha, TildeCoverPoint};
use crate::error::Result;
use crate::linalg::IntMatrix;
use crate::rational::{to_f64, Rational};
use crate::solenoid::{d_sigma, Solenoid, SolenoidPoint, DEFAULT_DEPTH};

/// The cover `𝒮̃` of the dyadic solenoid as `ℝ × Σ̃`: the class
/// `[((ξ, v), l)]` sits at base `2^{-l}v` and fiber `σ^{-l}ξ`, with `σ̃`
/// doubling the base and shifting the fiber. The fiber metric is `d_Σ`,
/// halved by each shift.
#[derive(Clone, Debug)]
pub struct DyadicCoverSystem {
    space: Arc<Solenoid>,
}

impl Default for DyadicCoverSystem {
    fn default() -> Self {
        DyadicCoverSystem {
            space: Solenoid::new(IntMatrix::new(vec![vec![2]]).expect("1x1 matrix")).expect("[2] is invertible"),
        }
    }
}

impl DyadicCoverSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn space(&self) -> &Arc<Solenoid> {
        &self.space
    }

    pub fn from_tilde(&self, t: &TildeCoverPoint) -> OmegaPoint<SolenoidPoint> {
        let v: &Rational = &t.point().v()[0];
        let base = to_f64(v) / 2f64.powi(t.level() as i32);
        OmegaPoint::new(vec![base], t.point().fiber().shift_by(-(t.level() as i64)))
    }

    /// The lift `α(n)` of the identity.
    pub fn alpha_point(&self, n: i64) -> OmegaPoint<SolenoidPoint> {
        let p = alpha(&self.space, &[BigInt::from(n)]);
        OmegaPoint::new(vec![n as f64], p.fiber().clone())
    }
}

impl ProductHyperbolicSystem for DyadicCoverSystem {
    type Fiber = SolenoidPoint;
    type Deck = ();

    fn expanding_dim(&self) -> usize {
        1
    }

    fn rates(&self) -> Rates {
        Rates {
            mu: 2.0,
            c: 1.0,
            lambda: 0.5,
        }
    }

    fn base_step(&self, y: &[f64]) -> Vec<f64> {
        vec![2.0 * y[0]]
    }

    fn base_step_inv(&self, y: &[f64]) -> Vec<f64> {
        vec![0.5 * y[0]]
    }

    fn fiber_step(&self, _base: &[f64], z: &SolenoidPoint) -> SolenoidPoint {
        z.shift()
    }

    fn fiber_step_inv(&self, _base: &[f64], z: &SolenoidPoint) -> SolenoidPoint {
        z.unshift()
    }

    fn fiber_dist(&self, _base: &[f64], a: &SolenoidPoint, b: &SolenoidPoint) -> f64 {
        d_sigma(a, b, DEFAULT_DEPTH)
            .ok()
            .and_then(|d| d.upper())
            .unwrap_or(f64::INFINITY)
    }

    fn connect(&self, _from: &OmegaPoint<SolenoidPoint>, _to: &OmegaPoint<SolenoidPoint>) {}

    fn deck(&self, _g: &(), x: &OmegaPoint<SolenoidPoint>) -> OmegaPoint<SolenoidPoint> {
        x.clone()
    }

    fn deck_inv(&self, _g: &(), x: &OmegaPoint<SolenoidPoint>) -> OmegaPoint<SolenoidPoint> {
        x.clone()
    }

    /// `C`: the fiber term never exceeds the product distance.
    fn holonomy_bound(&self, c: f64) -> Result<f64> {
        Ok(c)
    }
}
