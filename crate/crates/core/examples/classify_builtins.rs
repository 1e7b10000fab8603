//! Classifies every built-in system and the 3×3 automorphism `[[0,1,0],[0,0,1],[1,1,0]]`.

use solenoid_dynamics::classify::{report_many, ClassifierConfig, MapSpec, BUILTINS};

fn main() -> solenoid_dynamics::Result<()> {
    let mut specs: Vec<MapSpec> = BUILTINS.iter().map(|n| MapSpec::builtin(n)).collect::<Result<_, _>>()?;
    specs.push(MapSpec::ToralAuto {
        matrix: vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]],
    });
    let config = ClassifierConfig::default();
    for (spec, rep) in specs.iter().zip(report_many(&specs, &config, 7)) {
        let rep = rep?;
        println!(
            "{:<26} k={} box={:.3} (r2 {:.4}) exps={:?} dim={} eu={} -> {} quality={}",
            spec.name(),
            rep.ambient_dim,
            rep.box_dimension.estimate,
            rep.box_dimension.r_squared,
            rep.lyapunov.exponents.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>(),
            rep.dim_lambda,
            rep.dim_eu,
            rep.class_label,
            if rep.quality.passed { "ok".to_string() } else { rep.quality.issues.join("; ") },
        );
    }
    Ok(())
}
