//! Shadows random 0.01-pseudo-orbits of the cat map and compares with the bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::shadowing::{shadow_many, uniqueness_epsilon, LinearToralSystem, ProductHyperbolicSystem};

fn main() -> solenoid_dynamics::Result<()> {
    let sys = LinearToralSystem::new(&IntMatrix::new(vec![vec![2, 1], vec![1, 1]])?)?;
    let rates = sys.rates();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (size, half_width) = (0.01, 50);
    let orbits = (0..20)
        .map(|_| sys.random_pseudo_orbit(&[rng.random(), rng.random()], half_width, size, &mut rng))
        .collect::<solenoid_dynamics::Result<Vec<_>>>()?;
    let results = shadow_many(&sys, &orbits, 1e-13)?;
    for (i, r) in results.iter().enumerate().take(5) {
        println!(
            "orbit {i}: gap {:.4}, sup residual {:.5}, shadow {:?}",
            r.gap,
            r.achieved_sup,
            sys.ambient(&r.point)
        );
    }
    let worst = results.iter().map(|r| r.achieved_sup).fold(0.0, f64::max);
    println!("mu = {:.6}, lambda = {:.6}", rates.mu, rates.lambda);
    println!("worst residual {worst:.5} <= bound {:.5}", rates.shadow_bound(size));
    for n in [5, 10, 20] {
        println!("eps_{n} = {:.4e}", uniqueness_epsilon(1.0, rates.c, 1.0, rates.lambda, rates.mu, n)?);
    }
    Ok(())
}
