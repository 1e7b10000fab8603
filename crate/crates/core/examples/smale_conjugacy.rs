//! The conjugacy from the dyadic solenoid onto the Smale attractor in the solid torus.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solenoid_dynamics::conjugacy::{solenoid_to_attractor, verify_conjugacy, SmaleConjugacy, SmaleSystem};
use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::solenoid::Solenoid;

fn main() -> solenoid_dynamics::Result<()> {
    let system = SmaleSystem::default();
    let s = Solenoid::new(IntMatrix::new(vec![vec![2]])?)?;
    let (t, z) = solenoid_to_attractor(&system, &s.identity(), 40)?;
    println!("h(e) = ({t}, {z})");

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples: Vec<_> = (0..100).map(|_| s.random_point(&mut rng, 64)).collect();
    for depth in [5, 10, 40] {
        let h = SmaleConjugacy { system, depth };
        let r = verify_conjugacy(&h, &samples, 1e-6)?;
        println!(
            "depth {depth:>2}: max |h(sigma x) - f(h x)| = {:.3e} (declared {:.3e}), injective on samples: {}",
            r.max_residual, r.declared_tolerance, r.injective_on_samples
        );
    }
    Ok(())
}
