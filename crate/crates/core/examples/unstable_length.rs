//! Signed unstable length of paths in the cat-map model: closed, path independent, scaled by μ.

use solenoid_dynamics::linalg::IntMatrix;
use solenoid_dynamics::mme::{unstable_length, unstable_length_scaling_check, LinearModelPath, UnstableNormalization};

fn main() -> solenoid_dynamics::Result<()> {
    let a = IntMatrix::new(vec![vec![2, 1], vec![1, 1]])?;
    let path = LinearModelPath::new(&a, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]])?;
    println!("l^u(path) = {:.9}", unstable_length(&path));
    let straight = path.with_vertices(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    println!("l^u(straight) = {:.9}", unstable_length(&straight));
    let loop_ = path.with_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 0.0]]);
    println!("l^u(loop) = {:.1e}", unstable_length(&loop_));
    let first = path.clone().with_normalization(UnstableNormalization::FirstComponent);
    println!("l^u, first-component normalization = {:.6}", unstable_length(&first));
    let check = unstable_length_scaling_check(&path);
    println!("l^u(A path) / l^u(path) = {:.12}", check.ratio.unwrap_or(f64::NAN));
    Ok(())
}
