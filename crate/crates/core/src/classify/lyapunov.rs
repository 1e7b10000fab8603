use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mapspec::MapSpec;
use crate::error::{Error, Result};

/// Frames whose `R` diagonal falls below this are treated as degenerate.
const DEGENERATE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovSpectrum {
    /// Exponents in nats per iterate, descending.
    pub exponents: Vec<f64>,
    pub steps: usize,
    /// Seed of the run that produced the exponents.
    pub seed: u64,
    /// Restarts after a degenerate frame.
    pub restarts: usize,
}

impl LyapunovSpectrum {
    pub fn positive_sum(&self) -> f64 {
        self.exponents.iter().filter(|e| **e > 0.0).sum()
    }
}

fn run(spec: &MapSpec, transient: usize, steps: usize, seed: u64) -> Option<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = spec.initial(&mut rng);
    for _ in 0..transient {
        spec.step(&mut state, &mut rng);
    }
    let d = spec.ambient_dim();
    let start = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let mut frame = start.qr().q();
    let mut sums = vec![0.0; d];
    for _ in 0..steps {
        let moved = spec.tangent(&state) * &frame;
        let qr = moved.qr();
        let r = qr.r();
        for (i, s) in sums.iter_mut().enumerate() {
            let rii = r[(i, i)].abs();
            if !(rii > DEGENERATE && rii.is_finite()) {
                return None;
            }
            *s += rii.ln();
        }
        frame = qr.q();
        spec.step(&mut state, &mut rng);
    }
    let mut exps: Vec<f64> = sums.into_iter().map(|s| s / steps as f64).collect();
    exps.sort_by(|a, b| b.total_cmp(a));
    Some(exps)
}

/// Lyapunov exponents by repeated QR re-orthonormalization of a tangent frame.
/// A degenerate frame restarts the run with the next seed, up to `max_restarts` times.
pub fn lyapunov_spectrum(
    spec: &MapSpec,
    transient: usize,
    steps: usize,
    seed: u64,
    max_restarts: usize,
) -> Result<LyapunovSpectrum> {
    if steps == 0 {
        return Err(Error::InvalidParameter("Lyapunov estimation needs at least one step".into()));
    }
    spec.validate()?;
    for restarts in 0..=max_restarts {
        let s = seed.wrapping_add(restarts as u64);
        if let Some(exponents) = run(spec, transient, steps, s) {
            return Ok(LyapunovSpectrum {
                exponents,
                steps,
                seed: s,
                restarts,
            });
        }
    }
    Err(Error::FrameDegenerate {
        attempts: max_restarts + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI2_LN: f64 = 0.962_423_650_119_206_9;

    fn spectrum(name: &str) -> Vec<f64> {
        let spec = MapSpec::builtin(name).unwrap();
        lyapunov_spectrum(&spec, 100, 10_000, 5, 3).unwrap().exponents
    }

    #[test]
    fn cat_exponents() {
        let e = spectrum("toral_auto");
        let oracle = (((3.0 + 5f64.sqrt()) / 2.0) as f64).ln();
        assert!((oracle - PHI2_LN).abs() < 1e-15);
        assert!((e[0] - oracle).abs() < 1e-3 && (e[1] + oracle).abs() < 1e-3, "{e:?}");
    }

    #[test]
    fn smale_exponents() {
        let e = spectrum("smale_solenoid");
        let expect = [2f64.ln(), -(4f64.ln()), -(4f64.ln())];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-2, "{e:?}");
        }
    }

    #[test]
    fn toral_times_contraction_exponents() {
        let e = spectrum("toral_times_contraction");
        let expect = [PHI2_LN, -(2f64.ln()), -PHI2_LN];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-2, "{e:?}");
        }
    }

    #[test]
    fn sink_exponents() {
        let e = spectrum("fixed_point_sink");
        assert!(e.iter().all(|x| (x + 2f64.ln()).abs() < 1e-9));
    }

    #[test]
    fn zero_steps_rejected() {
        let spec = MapSpec::builtin("toral_auto").unwrap();
        assert!(lyapunov_spectrum(&spec, 0, 0, 0, 0).is_err());
    }
}
