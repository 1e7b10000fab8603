use std::collections::HashSet;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::SolenoidPoint;
use crate::error::Result;
use crate::linalg::{check_hyperbolic, unimodular_factor};
use crate::rational::{euclidean_norm, format_rational, to_f64, Rational, TorusPoint};

/// Value of `d_Σ(x, y) = Σ_{j ∈ 𝒥(x,y)} 2ʲ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DSigma {
    Exact(Rational),
    /// The backward tail was not resolved within the requested depth.
    Interval { lower: Rational, upper: Rational },
    /// The forward part diverges: `Aʲ(x₀ - y₀)` never reaches `[0]`.
    Infinite,
}

impl DSigma {
    pub fn upper(&self) -> Option<f64> {
        match self {
            DSigma::Exact(q) => Some(to_f64(q)),
            DSigma::Interval { upper, .. } => Some(to_f64(upper)),
            DSigma::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, DSigma::Infinite)
    }
}

impl Serialize for DSigma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DSigma::Exact(q) => s.serialize_str(&format_rational(q)),
            DSigma::Interval { lower, upper } => {
                s.serialize_str(&format!("[{}, {}]", format_rational(lower), format_rational(upper)))
            }
            DSigma::Infinite => s.serialize_str("inf"),
        }
    }
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(num_bigint::BigInt::one() << e as usize)
    } else {
        Rational::new(num_bigint::BigInt::one(), num_bigint::BigInt::one() << (-e) as usize)
    }
}

/// Exact `d_Σ` on the representable points.
///
/// With `z = x - y`: if `z₀ ≠ 0` then every backward coordinate differs and
/// the forward part runs until `Aʲz₀` first hits `[0]`, giving `2^{j₁}`. If
/// `z₀ = 0` the forward part is empty and the backward part is `2^{1-i₀}` for
/// the first differing coordinate `i₀`.
pub fn d_sigma(x: &SolenoidPoint, y: &SolenoidPoint, depth: usize) -> Result<DSigma> {
    let z = x.sub(y)?;
    let z0 = z.coordinate(0);
    if !z0.is_zero() {
        let a = z.space().matrix();
        let mut seen: HashSet<TorusPoint> = HashSet::new();
        let mut w = z0;
        let mut j: i64 = 0;
        while !w.is_zero() {
            if !seen.insert(w.clone()) {
                return Ok(DSigma::Infinite);
            }
            w = a.apply_torus(&w);
            j += 1;
        }
        return Ok(DSigma::Exact(pow2(j)));
    }
    for (i, c) in z.coordinates(depth + 1).iter().enumerate().skip(1) {
        if !c.is_zero() {
            return Ok(DSigma::Exact(pow2(1 - i as i64)));
        }
    }
    if z.is_identity() {
        Ok(DSigma::Exact(Rational::zero()))
    } else {
        Ok(DSigma::Interval {
            lower: Rational::zero(),
            upper: pow2(-(depth as i64)),
        })
    }
}

/// Translation vector joining two points along a path component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathVector {
    Vector(Vec<Rational>),
    NotSameComponent,
    Unknown(usize),
}

impl Serialize for PathVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PathVector::Vector(v) => {
                let xs: Vec<String> = v.iter().map(format_rational).collect();
                xs.serialize(s)
            }
            PathVector::NotSameComponent => s.serialize_str("not-same-component"),
            PathVector::Unknown(d) => s.serialize_str(&format!("unknown(depth {d})")),
        }
    }
}

/// `v` with `y = θ_v(x)`, when it can be decided.
///
/// For `|det A| = 1` every point is `θ_v(e)` for the lift `v` of its zeroth
/// coordinate. For `|det A| > 1` and free θ (no unimodular factor of the
/// characteristic polynomial), a nontrivial periodic base is never a
/// θ-translate of `e`: `σᵖ` would force `(Aᵖ - I)v = 0`.
pub fn path_vector(x: &SolenoidPoint, y: &SolenoidPoint, depth: usize) -> Result<PathVector> {
    let z = y.sub(x)?;
    if z.base_is_trivial() {
        return Ok(PathVector::Vector(z.offset().to_vec()));
    }
    let a = z.space().matrix();
    if a.is_unimodular() {
        return Ok(PathVector::Vector(z.coordinate(0).centered_lift()));
    }
    let hyperbolic = check_hyperbolic(a).map(|r| r.is_hyperbolic).unwrap_or(false);
    if hyperbolic && !unimodular_factor(a) {
        return Ok(PathVector::NotSameComponent);
    }
    Ok(PathVector::Unknown(depth))
}

/// Certified upper bound on the chain distance `d(x, y)`.
///
/// Candidates: a single θ-leg when a path vector is known, a single
/// `d_Σ`-jump when finite, and the two-leg chain that first translates `x`
/// by the centered lift of `y₀ - x₀` and then jumps within the fiber.
pub fn chain_distance_upper(x: &SolenoidPoint, y: &SolenoidPoint, depth: usize) -> Result<f64> {
    Ok(one_way(x, y, depth)?.min(one_way(y, x, depth)?))
}

fn one_way(x: &SolenoidPoint, y: &SolenoidPoint, depth: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    if let PathVector::Vector(v) = path_vector(x, y, depth)? {
        best = best.min(euclidean_norm(&v));
    }
    if let Some(u) = d_sigma(x, y, depth)?.upper() {
        best = best.min(u);
    }
    let v = y.coordinate(0).sub(&x.coordinate(0)).centered_lift();
    let moved = x.act(&v)?;
    let jump = d_sigma(&moved, y, depth)?
        .upper()
        .expect("zeroth coordinates agree, so the forward part is empty");
    best = best.min(euclidean_norm(&v) + jump);
    Ok(best.max(0.0))
}

/// Default tail depth used where callers do not choose one.
pub const DEFAULT_DEPTH: usize = 64;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;
    use crate::rational::{int, rat, zero_vec};
    use crate::solenoid::Solenoid;

    fn dyadic() -> std::sync::Arc<Solenoid> {
        Solenoid::new(IntMatrix::new(vec![vec![2]]).unwrap()).unwrap()
    }

    /// Direct partial sum of `Σ 2ʲ` over `-n ≤ j < n` from coordinates.
    fn brute_force(x: &SolenoidPoint, y: &SolenoidPoint, n: usize) -> Rational {
        let a = x.space().matrix().clone();
        let mut total = Rational::zero();
        let (mut fx, mut fy) = (x.coordinate(0), y.coordinate(0));
        for j in 0..n {
            if fx != fy {
                total += pow2(j as i64);
            }
            fx = a.apply_torus(&fx);
            fy = a.apply_torus(&fy);
        }
        for i in 1..=n {
            if x.coordinate(i) != y.coordinate(i) {
                total += pow2(-(i as i64));
            }
        }
        total
    }

    #[test]
    fn theta_one_is_at_distance_one() {
        let s = dyadic();
        let e = s.identity();
        let x = s.theta(vec![int(1)]).unwrap();
        assert_eq!(d_sigma(&e, &x, 60).unwrap(), DSigma::Exact(int(1)));
        let partial = brute_force(&e, &x, 60);
        assert_eq!(partial, int(1) - pow2(-60));
    }

    #[test]
    fn odd_denominator_diverges() {
        let s = dyadic();
        let x = s.theta(vec![rat(1, 3)]).unwrap();
        assert_eq!(d_sigma(&s.identity(), &x, 60).unwrap(), DSigma::Infinite);
    }

    #[test]
    fn forward_part_matches_brute_force() {
        let s = dyadic();
        // z₀ = 3/8 reaches 0 after three doublings: 1 + 2 + 4 + backward 1 = 8
        let x = s.theta(vec![rat(3, 8)]).unwrap();
        assert_eq!(d_sigma(&x, &s.identity(), 40).unwrap(), DSigma::Exact(int(8)));
        assert_eq!(brute_force(&x, &s.identity(), 40), int(8) - pow2(-40));
    }

    #[test]
    fn identical_points_are_at_zero() {
        let s = dyadic();
        let x = s.from_periodic(&TorusPoint::new(vec![rat(1, 3)]), vec![rat(2, 7)]).unwrap();
        assert_eq!(d_sigma(&x, &x, 10).unwrap(), DSigma::Exact(int(0)));
    }

    #[test]
    fn unresolved_tail_gives_interval() {
        let s = dyadic();
        let x = s.theta(vec![int(1 << 20)]).unwrap();
        match d_sigma(&s.identity(), &x, 10).unwrap() {
            DSigma::Interval { lower, upper } => {
                assert_eq!(lower, int(0));
                assert_eq!(upper, pow2(-10));
            }
            other => panic!("expected interval, got {other:?}"),
        }
        assert_eq!(d_sigma(&s.identity(), &x, 40).unwrap(), DSigma::Exact(pow2(-20)));
    }

    #[test]
    fn path_vectors() {
        let s = dyadic();
        let x = s.from_periodic(&TorusPoint::new(vec![rat(1, 3)]), zero_vec(1)).unwrap();
        let v = vec![rat(5, 3)];
        assert_eq!(path_vector(&x, &x.act(&v).unwrap(), 40).unwrap(), PathVector::Vector(v));
        assert_eq!(path_vector(&x, &x, 40).unwrap(), PathVector::Vector(zero_vec(1)));
        assert_eq!(
            path_vector(&s.identity(), &x, 40).unwrap(),
            PathVector::NotSameComponent
        );
    }

    #[test]
    fn period_two_chain_differs_from_every_translate() {
        // brute-force translate search: θ_s(e) with s = a/b never matches the
        // period-2 chain on the first 40 coordinates
        let s = dyadic();
        let x = s.from_periodic(&TorusPoint::new(vec![rat(1, 3)]), zero_vec(1)).unwrap();
        let target = x.coordinates(40);
        for b in 1..=24 {
            for a in -3 * b..=3 * b {
                let y = s.theta(vec![rat(a, b)]).unwrap();
                assert_ne!(y.coordinates(40), target);
            }
        }
    }

    #[test]
    fn chain_distance_examples() {
        let s = dyadic();
        let e = s.identity();
        let x = s.theta(vec![int(1)]).unwrap();
        assert_eq!(chain_distance_upper(&e, &e, 40).unwrap(), 0.0);
        assert!(chain_distance_upper(&e, &x, 40).unwrap() <= 1.0);
    }
}
