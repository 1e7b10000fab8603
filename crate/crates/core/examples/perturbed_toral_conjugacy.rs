//! Structural stability of the cat map: the conjugacy to `A + ε sin` built by shadowing.

use solenoid_dynamics::conjugacy::{
    admissible_lipschitz, perturbed_anosov_conjugacy, torus_dist, PerturbedToralMap, SinePerturbation,
};
use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::rational::{rat, TorusPoint};

fn main() -> solenoid_dynamics::Result<()> {
    let a = IntMatrix::new(vec![vec![2, 1], vec![1, 1]])?;
    println!("admissible Lipschitz budget {:.4}", admissible_lipschitz(&a)?);
    let x = TorusPoint::new(vec![rat(1, 7), rat(3, 5)]);
    for eps in [0.0, 0.01, 0.05, 0.1] {
        let g = PerturbedToralMap::new(a.clone(), SinePerturbation::planar(eps))?;
        let h = perturbed_anosov_conjugacy(&g, &x, 60, 1e-13)?;
        let hx_next = perturbed_anosov_conjugacy(&g, &a.apply_torus(&x), 60, 1e-13)?;
        println!(
            "eps {eps:<4}: h(x) = {:?}, |h - id| <= {:.2e}, residual {:.1e}, {} sweeps",
            h.point,
            h.sup_displacement,
            torus_dist(&g.step(&h.point), &hx_next.point),
            h.sweeps
        );
    }
    Ok(())
}
