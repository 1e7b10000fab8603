//! Orbit cloud, box-counting dimension and Lyapunov spectrum for one system,
//! with the cloud exported as CSV to the path given as the first argument.

use solenoid_dynamics::classify::{box_counting_dimension, generate_orbit, lyapunov_spectrum, BoxOptions, MapSpec};

fn main() -> solenoid_dynamics::Result<()> {
    let spec = MapSpec::builtin("smale_solenoid")?;
    let cloud = generate_orbit(&spec, 100, 100_000, 3)?;
    let dim = box_counting_dimension(&cloud, &BoxOptions::default())?;
    println!("box dimension {:.3} (r^2 {:.4})", dim.estimate, dim.r_squared);
    for (eps, n) in &dim.counts {
        println!("  eps {eps:<10} N {n}");
    }
    let lyap = lyapunov_spectrum(&spec, 100, 20_000, 3, 5)?;
    println!("Lyapunov exponents {:?}", lyap.exponents);
    if let Some(path) = std::env::args().nth(1) {
        cloud.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        println!("cloud written to {path}");
    }
    Ok(())
}
