//! The attractor decision tree on every (dim Λ, dim E^u) pair.

use solenoid_dynamics::classify::classify;

fn main() {
    for dim_lambda in 0..=3 {
        for dim_eu in 0..=2 {
            match classify(dim_lambda, dim_eu) {
                Ok(class) => println!("({dim_lambda}, {dim_eu}) {class}: {}", class.description()),
                Err(e) => println!("({dim_lambda}, {dim_eu}) {e}"),
            }
        }
    }
}
