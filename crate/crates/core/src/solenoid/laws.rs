use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_vector, Solenoid};
use crate::cover::{IdentityCheck, IdentityReport};
use crate::error::Result;
use crate::linalg::IntMatrix;
use crate::rational::{vec_add, zero_vec};

/// Names of the solenoid laws, in report order.
pub const LAWS: [&str; 6] = [
    "theta_0 = id and theta_v . theta_w = theta_(v+w)",
    "sigma_A(theta_v x) = theta_(Av)(sigma_A x)",
    "pi_0(theta_v x) = pi_0(x) + v mod 1",
    "theta_v(x + y) = theta_v(x) + y",
    "sigma_A(x + y) = sigma_A(x) + sigma_A(y)",
    "x + (-x) = e and sigma_A^-1 . sigma_A = id",
];

/// Checks the θ-action, projection and group laws of `𝒮_A` on random exact points.
pub fn verify_solenoid_laws(a: &IntMatrix, samples: usize, seed: u64) -> Result<IdentityReport> {
    let space: Arc<Solenoid> = Solenoid::new(a.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = space.dim();
    let max_den = 12;
    let mut failures = [0usize; LAWS.len()];
    let mut witnesses: [Option<String>; LAWS.len()] = Default::default();

    for _ in 0..samples {
        let x = space.random_point(&mut rng, max_den);
        let y = space.random_point(&mut rng, max_den);
        let v = random_vector(&mut rng, k, max_den);
        let w = random_vector(&mut rng, k, max_den);

        let results = [
            x.act(&zero_vec(k))? == x && x.act(&v)?.act(&w)? == x.act(&vec_add(&v, &w))?,
            x.act(&v)?.shift() == x.shift().act(&a.mul_rat(&v))?,
            x.act(&v)?.coordinate(0) == x.coordinate(0).translate(&v),
            x.add(&y)?.act(&v)? == x.act(&v)?.add(&y)?,
            x.add(&y)?.shift() == x.shift().add(&y.shift())?,
            x.add(&x.neg())?.is_identity() && x.shift().unshift() == x,
        ];
        for (i, ok) in results.into_iter().enumerate() {
            if !ok {
                failures[i] += 1;
                witnesses[i].get_or_insert_with(|| format!("x = {x}, y = {y}, v = {v:?}, w = {w:?}"));
            }
        }
    }

    let checks = LAWS
        .iter()
        .zip(failures)
        .zip(witnesses)
        .map(|((name, failures), witness)| IdentityCheck {
            identity: name,
            status: if failures == 0 { "pass" } else { "fail" },
            samples,
            failures,
            witness,
        })
        .collect();
    Ok(IdentityReport {
        matrix: a.clone(),
        seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_for_dyadic_and_cat() {
        for rows in [vec![vec![2]], vec![vec![2, 1], vec![1, 1]], vec![vec![2, 1], vec![1, 3]]] {
            let report = verify_solenoid_laws(&IntMatrix::new(rows).unwrap(), 50, 1).unwrap();
            assert!(report.all_passed(), "{report:?}");
            assert_eq!(report.checks.len(), LAWS.len());
        }
    }
}
