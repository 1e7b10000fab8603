//! Runs the exact solenoid laws and cover identities for `[2]` and the cat map.

use solenoid_dynamics::cover::verify_cover_identities;
use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::solenoid::verify_solenoid_laws;

fn main() -> solenoid_dynamics::Result<()> {
    for rows in [vec![vec![2]], vec![vec![2, 1], vec![1, 1]]] {
        let a = IntMatrix::new(rows)?;
        let laws = verify_solenoid_laws(&a, 200, 1)?;
        let cover = verify_cover_identities(&a, 200, 1)?;
        println!("A = {a}");
        for c in laws.checks.iter().chain(&cover.checks) {
            println!("  {:<4} {}", c.status, c.identity);
        }
    }
    Ok(())
}
