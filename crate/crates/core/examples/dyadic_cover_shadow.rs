//! Shadowing on the cover of the dyadic solenoid, where the fibers are Cantor sets.
//! The pseudo-orbit jumps from the lift α(0) to α(1) at time 1.

use solenoid_dynamics::shadowing::{shadow, DyadicCoverSystem, PseudoOrbit};

fn main() -> solenoid_dynamics::Result<()> {
    let sys = DyadicCoverSystem::new();
    let half_width = 20i64;
    let points = (-half_width..=half_width)
        .map(|j| sys.alpha_point(if j > 0 { 1 } else { 0 }))
        .collect();
    let pseudo = PseudoOrbit::new(points)?;
    println!("gap {}", pseudo.gap(&sys));
    let r = shadow(&sys, &pseudo, 1e-12)?;
    println!("shadow base {:e}", r.point.base[0]);
    println!("shadow fiber is the identity: {}", r.point.fiber.is_identity());
    println!("sup residual {} (bound {})", r.achieved_sup, r.bound);
    Ok(())
}
