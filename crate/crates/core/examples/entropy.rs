//! Topological entropy three ways: toral eigenvalues, a subshift's Perron root,
//! and the positive Lyapunov exponents of the Smale map.

use solenoid_dynamics::classify::{lyapunov_spectrum, MapSpec};
use solenoid_dynamics::linalg::{toral_entropy, IntMatrix};
use solenoid_dynamics::mme::{entropy_sft, TransitionMatrix};

fn main() -> solenoid_dynamics::Result<()> {
    let cat = IntMatrix::new(vec![vec![2, 1], vec![1, 1]])?;
    println!("cat map         {:.9}", toral_entropy(&cat)?);
    let t3 = IntMatrix::new(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]])?;
    println!("3x3 companion   {:.9}", toral_entropy(&t3)?);
    println!("golden mean SFT {:.9}", entropy_sft(&TransitionMatrix::golden_mean())?.h);
    println!("full 3-shift    {:.9}", entropy_sft(&TransitionMatrix::full_shift(3))?.h);
    let smale = MapSpec::builtin("smale_solenoid")?;
    println!("Smale (Lyapunov) {:.6}", lyapunov_spectrum(&smale, 100, 20_000, 0, 5)?.positive_sum());
    Ok(())
}
