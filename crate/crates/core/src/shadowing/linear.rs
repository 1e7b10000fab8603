use nalgebra::{DMatrix, DVector};

use rand::Rng;

use super::{OmegaPoint, ProductHyperbolicSystem, PseudoOrbit, Rates};
use crate::error::{Error, Result};
use crate::linalg::l2;
use crate::linalg::{splitting, HyperbolicSplitting, IntMatrix};

/// The lift of a hyperbolic toral automorphism to `ℝᵏ = E⁺ × E⁻`, in
/// adapted coordinates, with integer translations as decks.
#[derive(Clone, Debug)]
pub struct LinearToralSystem {
    matrix: IntMatrix,
    split: HyperbolicSplitting,
    plus_inv: DMatrix<f64>,
    minus_inv: DMatrix<f64>,
}

fn apply(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

impl LinearToralSystem {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        let split = splitting(a)?;
        let invert = |m: &DMatrix<f64>| {
            m.clone()
                .try_inverse()
                .ok_or_else(|| Error::InvalidRates("invariant block is not invertible".into()))
        };
        let plus_inv = invert(split.block_plus())?;
        let minus_inv = invert(split.block_minus())?;
        let system = LinearToralSystem {
            matrix: a.clone(),
            split,
            plus_inv,
            minus_inv,
        };
        system.rates().validate()?;
        Ok(system)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn splitting(&self) -> &HyperbolicSplitting {
        &self.split
    }

    /// The point of `Ω` with ambient coordinates `x`.
    pub fn point(&self, x: &[f64]) -> OmegaPoint<Vec<f64>> {
        let (plus, minus) = self.split.coords(x);
        OmegaPoint::new(plus, minus)
    }

    pub fn ambient(&self, x: &OmegaPoint<Vec<f64>>) -> Vec<f64> {
        self.split.from_coords(&x.base, &x.fiber)
    }

    /// A pseudo-orbit of length `2J + 1` starting at `x_{-J} = start` (ambient
    /// coordinates). Each step adds a random jump whose `E⁺` and `E⁻` parts have
    /// norms summing to at most `size`; stored points are reduced mod 1.
    pub fn random_pseudo_orbit<R: Rng + ?Sized>(
        &self,
        start: &[f64],
        half_width: usize,
        size: f64,
        rng: &mut R,
    ) -> Result<PseudoOrbit<Vec<f64>>> {
        if start.len() != self.split.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.split.dim(),
                got: start.len(),
            });
        }
        if !(size >= 0.0 && size.is_finite()) {
            return Err(Error::InvalidParameter(format!("jump size {size} must be finite and non-negative")));
        }
        let a = self.matrix.to_dmatrix();
        let mut pts = vec![start.iter().map(|v| v - v.floor()).collect::<Vec<f64>>()];
        for _ in 0..2 * half_width {
            let last = pts.last().expect("non-empty");
            let u: f64 = rng.random();
            let plus = random_direction(rng, self.split.dim_plus(), size * u);
            let minus = random_direction(rng, self.split.dim_minus(), size * (1.0 - u));
            let jump = self.split.from_coords(&plus, &minus);
            let next = apply(&a, last).iter().zip(&jump).map(|(x, d)| (x + d).rem_euclid(1.0)).collect();
            pts.push(next);
        }
        PseudoOrbit::new(pts.iter().map(|p| self.point(p)).collect())
    }
}

/// Uniform direction scaled by a uniform fraction of `len`.
fn random_direction<R: Rng + ?Sized>(rng: &mut R, k: usize, len: f64) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let v: Vec<f64> = loop {
        let v: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = l2(&v);
        if n > 1e-3 && n <= 1.0 {
            break v.iter().map(|x| x / n).collect();
        }
    };
    let r: f64 = rng.random::<f64>() * len;
    v.into_iter().map(|x| x * r).collect()
}

impl ProductHyperbolicSystem for LinearToralSystem {
    type Fiber = Vec<f64>;
    type Deck = Vec<i64>;

    fn expanding_dim(&self) -> usize {
        self.split.dim_plus()
    }

    fn rates(&self) -> Rates {
        Rates {
            mu: self.split.mu,
            c: 1.0,
            lambda: self.split.lambda,
        }
    }

    fn base_step(&self, y: &[f64]) -> Vec<f64> {
        apply(self.split.block_plus(), y)
    }

    fn base_step_inv(&self, y: &[f64]) -> Vec<f64> {
        apply(&self.plus_inv, y)
    }

    fn fiber_step(&self, _base: &[f64], z: &Vec<f64>) -> Vec<f64> {
        apply(self.split.block_minus(), z)
    }

    fn fiber_step_inv(&self, _base: &[f64], z: &Vec<f64>) -> Vec<f64> {
        apply(&self.minus_inv, z)
    }

    fn fiber_dist(&self, _base: &[f64], a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        l2(&d)
    }

    fn connect(&self, from: &OmegaPoint<Vec<f64>>, to: &OmegaPoint<Vec<f64>>) -> Vec<i64> {
        let (f, t) = (self.ambient(from), self.ambient(to));
        f.iter().zip(&t).map(|(a, b)| (b - a).round() as i64).collect()
    }

    fn deck(&self, g: &Vec<i64>, x: &OmegaPoint<Vec<f64>>) -> OmegaPoint<Vec<f64>> {
        let n: Vec<f64> = g.iter().map(|&v| v as f64).collect();
        let (p, m) = self.split.coords(&n);
        OmegaPoint::new(
            x.base.iter().zip(&p).map(|(a, b)| a + b).collect(),
            x.fiber.iter().zip(&m).map(|(a, b)| a + b).collect(),
        )
    }

    fn deck_inv(&self, g: &Vec<i64>, x: &OmegaPoint<Vec<f64>>) -> OmegaPoint<Vec<f64>> {
        let neg: Vec<i64> = g.iter().map(|v| -v).collect();
        self.deck(&neg, x)
    }

    /// `max(C, D)` with `D` the adapted `E⁻` diameter of a fundamental cube:
    /// fiber distances never exceed the distance itself.
    fn holonomy_bound(&self, c: f64) -> Result<f64> {
        Ok(c.max(self.split.cube_diameter_minus()))
    }
}
