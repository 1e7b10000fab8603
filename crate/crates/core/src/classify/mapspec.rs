use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{admissible_lipschitz, SmaleSystem};
use crate::error::{Error, Result};
use crate::linalg::{check_hyperbolic, IntMatrix};

fn cat_rows() -> Vec<Vec<i64>> {
    vec![vec![2, 1], vec![1, 1]]
}

fn default_lambda_c() -> f64 {
    0.25
}

fn default_c_off() -> f64 {
    0.5
}

fn half() -> f64 {
    0.5
}

fn origin3() -> Vec<f64> {
    vec![0.0; 3]
}

fn default_eps() -> f64 {
    0.05
}

/// A built-in dynamical system, as read from JSON:
///
/// ```json
/// {"builtin": "toral_times_contraction", "matrix": [[2, 1], [1, 1]], "rate": 0.5}
/// ```
///
/// Omitted parameters take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `(t, z) ↦ (2t, λ_c z + c_off e^{2πit})` on the solid torus.
    SmaleSolenoid {
        #[serde(default = "default_lambda_c")]
        lambda_c: f64,
        #[serde(default = "default_c_off")]
        c_off: f64,
    },
    /// `x ↦ Ax mod 1` on `𝕋ᵏ`.
    ToralAuto {
        #[serde(default = "cat_rows")]
        matrix: Vec<Vec<i64>>,
    },
    /// `(x, w) ↦ (Ax mod 1, rate·w)` on `𝕋ᵏ × ℝ`.
    ToralTimesContraction {
        #[serde(default = "cat_rows")]
        matrix: Vec<Vec<i64>>,
        #[serde(default = "half")]
        rate: f64,
    },
    /// `x ↦ p + rate·(x - p)` on `ℝᵈ`.
    FixedPointSink {
        #[serde(default = "half")]
        rate: f64,
        #[serde(default = "origin3")]
        point: Vec<f64>,
    },
    /// `x ↦ Ax + ε (sin 2πx₁, 0, …) / 2π mod 1`.
    PerturbedToral {
        #[serde(default = "cat_rows")]
        matrix: Vec<Vec<i64>>,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

/// Names of the built-in specs, in documentation order.
pub const BUILTINS: [&str; 5] = [
    "smale_solenoid",
    "toral_auto",
    "toral_times_contraction",
    "fixed_point_sink",
    "perturbed_toral",
];

/// Bound on coordinates beyond which an orbit counts as divergent.
pub const AMBIENT_BOUND: f64 = 1e6;

/// Dynamical state. The Smale angle is kept as a 64-bit binary fraction and
/// refilled with a fresh random bit at every doubling, which makes the
/// sequence an exact orbit of the angle whose binary digits are the bit stream.
#[derive(Clone, Debug)]
pub struct State {
    pub coords: Vec<f64>,
    angle_bits: u64,
}

fn toral_matrix(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    let a = IntMatrix::new(rows.to_vec())?;
    if !a.is_unimodular() {
        return Err(Error::InvalidParameter("toral automorphisms need |det A| = 1".into()));
    }
    let report = check_hyperbolic(&a)?;
    if !report.is_hyperbolic {
        return Err(Error::NotHyperbolic {
            modulus: report
                .eigen_moduli
                .iter()
                .copied()
                .min_by(|x, y| (x - 1.0).abs().total_cmp(&(y - 1.0).abs()))
                .unwrap_or(1.0),
            tolerance: crate::linalg::HYPERBOLICITY_TOLERANCE,
        });
    }
    Ok(a)
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidParameter(format!("contraction rate {rate} must lie in (0, 1)")));
    }
    Ok(())
}

impl MapSpec {
    /// Parses a builtin by name with default parameters.
    pub fn builtin(name: &str) -> Result<Self> {
        let spec: MapSpec = serde_json::from_value(serde_json::json!({ "builtin": name }))
            .map_err(|_| Error::InvalidParameter(format!("unknown builtin {name:?}; expected one of {BUILTINS:?}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSpec::SmaleSolenoid { .. } => "smale_solenoid",
            MapSpec::ToralAuto { .. } => "toral_auto",
            MapSpec::ToralTimesContraction { .. } => "toral_times_contraction",
            MapSpec::FixedPointSink { .. } => "fixed_point_sink",
            MapSpec::PerturbedToral { .. } => "perturbed_toral",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::SmaleSolenoid { lambda_c, c_off } => SmaleSystem::new(*lambda_c, *c_off).map(|_| ()),
            MapSpec::ToralAuto { matrix } => toral_matrix(matrix).map(|_| ()),
            MapSpec::ToralTimesContraction { matrix, rate } => {
                toral_matrix(matrix)?;
                check_rate(*rate)
            }
            MapSpec::FixedPointSink { rate, point } => {
                check_rate(*rate)?;
                if point.is_empty() || point.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidParameter("sink point must be a non-empty finite vector".into()));
                }
                Ok(())
            }
            MapSpec::PerturbedToral { matrix, eps } => {
                let a = toral_matrix(matrix)?;
                if a.dim() < 2 {
                    return Err(Error::InvalidParameter("the sine perturbation needs k >= 2".into()));
                }
                let required = admissible_lipschitz(&a)?;
                if eps.abs() >= required {
                    return Err(Error::PerturbationTooLarge {
                        lipschitz: eps.abs(),
                        required,
                    });
                }
                Ok(())
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            MapSpec::SmaleSolenoid { .. } => 3,
            MapSpec::ToralAuto { matrix } | MapSpec::PerturbedToral { matrix, .. } => matrix.len(),
            MapSpec::ToralTimesContraction { matrix, .. } => matrix.len() + 1,
            MapSpec::FixedPointSink { point, .. } => point.len(),
        }
    }

    /// Seeded initial state.
    pub fn initial<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        let d = self.ambient_dim();
        match self {
            MapSpec::SmaleSolenoid { .. } => {
                let bits: u64 = rng.random();
                let r: f64 = 0.5 * rng.random::<f64>().sqrt();
                let phase: f64 = rng.random_range(0.0..TAU);
                State {
                    coords: vec![angle(bits), r * phase.cos(), r * phase.sin()],
                    angle_bits: bits,
                }
            }
            MapSpec::ToralAuto { .. } | MapSpec::PerturbedToral { .. } => State {
                coords: (0..d).map(|_| rng.random()).collect(),
                angle_bits: 0,
            },
            MapSpec::ToralTimesContraction { .. } => {
                let mut coords: Vec<f64> = (0..d - 1).map(|_| rng.random()).collect();
                coords.push(rng.random_range(-1.0..1.0));
                State { coords, angle_bits: 0 }
            }
            MapSpec::FixedPointSink { point, .. } => State {
                coords: point.iter().map(|p| p + rng.random_range(-1.0..1.0)).collect(),
                angle_bits: 0,
            },
        }
    }

    /// One iterate; `rng` feeds the fresh low bit of the Smale angle.
    pub fn step<R: Rng + ?Sized>(&self, s: &mut State, rng: &mut R) {
        match self {
            MapSpec::SmaleSolenoid { lambda_c, c_off } => {
                let t = s.coords[0];
                let z = Complex64::new(s.coords[1], s.coords[2]);
                let z = lambda_c * z + Complex64::from_polar(*c_off, TAU * t);
                s.angle_bits = (s.angle_bits << 1) | (rng.random::<bool>() as u64);
                s.coords = vec![angle(s.angle_bits), z.re, z.im];
            }
            MapSpec::ToralAuto { matrix } => {
                s.coords = torus_apply(matrix, &s.coords);
            }
            MapSpec::ToralTimesContraction { matrix, rate } => {
                let k = matrix.len();
                let mut next = torus_apply(matrix, &s.coords[..k]);
                next.push(rate * s.coords[k]);
                s.coords = next;
            }
            MapSpec::FixedPointSink { rate, point } => {
                for (x, p) in s.coords.iter_mut().zip(point) {
                    *x = p + rate * (*x - p);
                }
            }
            MapSpec::PerturbedToral { matrix, eps } => {
                let mut next = linear(matrix, &s.coords);
                next[0] += eps * (TAU * s.coords[1]).sin() / TAU;
                s.coords = next.into_iter().map(|v| v.rem_euclid(1.0)).collect();
            }
        }
    }

    /// Jacobian at `s` in ambient coordinates.
    pub fn tangent(&self, s: &State) -> DMatrix<f64> {
        let d = self.ambient_dim();
        match self {
            MapSpec::SmaleSolenoid { lambda_c, c_off } => {
                let (sin, cos) = (TAU * s.coords[0]).sin_cos();
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        2.0, 0.0, 0.0,
                        -TAU * c_off * sin, *lambda_c, 0.0,
                        TAU * c_off * cos, 0.0, *lambda_c,
                    ],
                )
            }
            MapSpec::ToralAuto { matrix } => int_dmatrix(matrix),
            MapSpec::ToralTimesContraction { matrix, rate } => {
                let k = matrix.len();
                let mut m = DMatrix::zeros(d, d);
                m.view_mut((0, 0), (k, k)).copy_from(&int_dmatrix(matrix));
                m[(k, k)] = *rate;
                m
            }
            MapSpec::FixedPointSink { rate, .. } => DMatrix::identity(d, d) * *rate,
            MapSpec::PerturbedToral { matrix, eps } => {
                let mut m = int_dmatrix(matrix);
                m[(0, 1)] += eps * (TAU * s.coords[1]).cos();
                m
            }
        }
    }
}

fn angle(bits: u64) -> f64 {
    (bits >> 11) as f64 / (1u64 << 53) as f64
}

fn int_dmatrix(rows: &[Vec<i64>]) -> DMatrix<f64> {
    let k = rows.len();
    DMatrix::from_fn(k, k, |i, j| rows[i][j] as f64)
}

fn linear(rows: &[Vec<i64>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| *a as f64 * b).sum())
        .collect()
}

fn torus_apply(rows: &[Vec<i64>], x: &[f64]) -> Vec<f64> {
    linear(rows, x).into_iter().map(|v| v.rem_euclid(1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_with_defaults() {
        for name in BUILTINS {
            let spec = MapSpec::builtin(name).unwrap();
            assert_eq!(spec.name(), name);
        }
        assert!(MapSpec::builtin("plykin").is_err());
    }

    #[test]
    fn json_schema() {
        let spec: MapSpec =
            serde_json::from_str(r#"{"builtin": "toral_times_contraction", "rate": 0.25}"#).unwrap();
        assert_eq!(
            spec,
            MapSpec::ToralTimesContraction {
                matrix: cat_rows(),
                rate: 0.25
            }
        );
        assert!(serde_json::from_str::<MapSpec>(r#"{"builtin": "toral_auto", "size": 3}"#).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = [
            MapSpec::ToralAuto {
                matrix: vec![vec![1, 1], vec![0, 1]],
            },
            MapSpec::ToralAuto {
                matrix: vec![vec![2, 0], vec![0, 2]],
            },
            MapSpec::ToralTimesContraction {
                matrix: cat_rows(),
                rate: 1.5,
            },
            MapSpec::SmaleSolenoid {
                lambda_c: 0.6,
                c_off: 0.3,
            },
            MapSpec::PerturbedToral {
                matrix: cat_rows(),
                eps: 3.0,
            },
        ];
        for spec in bad {
            assert!(spec.validate().is_err(), "{spec:?}");
        }
    }

    #[test]
    fn smale_tangent_matches_system() {
        let spec = MapSpec::builtin("smale_solenoid").unwrap();
        let s = State {
            coords: vec![0.3, 0.1, -0.2],
            angle_bits: 0,
        };
        let m = spec.tangent(&s);
        let t = SmaleSystem::default().tangent(0.3, Complex64::new(0.1, -0.2)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], t[i][j]);
            }
        }
    }
}
