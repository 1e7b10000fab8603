//! Exact points of the dyadic solenoid: θ translates, the shift, `d_Σ` and path vectors.

use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::rational::{int, rat, TorusPoint};
use solenoid_dynamics::solenoid::{chain_distance_upper, d_sigma, path_vector, Solenoid};

fn main() -> solenoid_dynamics::Result<()> {
    let s = Solenoid::new(IntMatrix::new(vec![vec![2]])?)?;
    let e = s.identity();
    let x = s.theta(vec![int(1)])?;
    println!("theta_1(e) = {x}");
    for (j, c) in x.coordinates(5).iter().enumerate() {
        println!("  x_{j} = {c}");
    }
    println!("sigma(theta_1 e) = {}", x.shift());
    println!("d_Sigma(e, theta_1 e)   = {:?}", d_sigma(&e, &x, 60)?);
    println!("d_Sigma(e, theta_1/3 e) = {:?}", d_sigma(&e, &s.theta(vec![rat(1, 3)])?, 60)?);

    // the period-2 chain (1/3, 2/3, 1/3, ...) lies in another path component
    let p = s.from_periodic(&TorusPoint::new(vec![rat(1, 3)]), vec![int(0)])?;
    println!("path vector e -> p: {:?}", path_vector(&e, &p, 60)?);
    println!("chain distance e -> theta_1 e <= {}", chain_distance_upper(&e, &x, 60)?);
    println!("p + p = {}", p.add(&p)?);
    Ok(())
}
