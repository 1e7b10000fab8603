//! Exact points of the toral solenoid `𝒮_A = lim← (𝕋ᵏ, A)`.
//!
//! A point is stored as `θ_v(P(c))`, where `P(c)` is a purely periodic
//! backward chain and `v` is a rational offset. Coordinate `j` is
//! `c[j mod p] + A⁻ʲ·v (mod 1)`. Any eventually periodic chain has this form,
//! since consistency forces the head to be the cycle run backwards.

mod laws;
mod metric;

pub use laws::{verify_solenoid_laws, LAWS};

pub use metric::{chain_distance_upper, d_sigma, path_vector, DSigma, PathVector, DEFAULT_DEPTH};

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::rational::{
    is_integral, rat, rational_vec, vec_add, vec_neg, zero_vec, Rational, TorusPoint,
};

/// The solenoid of a fixed matrix, shared by all of its points.
#[derive(Debug)]
pub struct Solenoid {
    matrix: IntMatrix,
    inverse: RatMatrix,
}

/// A backward chain `x_j = A·x_{j+1}` given as a finite head followed by a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackwardChain {
    pub head: Vec<TorusPoint>,
    pub cycle: Vec<TorusPoint>,
}

/// The point `θ_offset(P(cycle))` of `𝒮_A`.
#[derive(Clone, Debug)]
pub struct SolenoidPoint {
    space: Arc<Solenoid>,
    cycle: Vec<TorusPoint>,
    offset: Vec<Rational>,
}

impl Solenoid {
    pub fn new(matrix: IntMatrix) -> Result<Arc<Self>> {
        let inverse = matrix.inverse()?;
        Ok(Arc::new(Solenoid { matrix, inverse }))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &RatMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The identity element `e = (0, 0, …)`.
    pub fn identity(self: &Arc<Self>) -> SolenoidPoint {
        SolenoidPoint {
            space: self.clone(),
            cycle: vec![TorusPoint::zero(self.dim())],
            offset: zero_vec(self.dim()),
        }
    }

    /// `θ_v(e)`.
    pub fn theta(self: &Arc<Self>, v: Vec<Rational>) -> Result<SolenoidPoint> {
        self.identity().act(&v)
    }

    /// The periodic chain through the periodic torus point `c0`:
    /// `cycle[i] = A^{(p-i) mod p}·c0`.
    pub fn periodic_chain(&self, c0: &TorusPoint) -> Result<Vec<TorusPoint>> {
        self.check_dim(c0.dim())?;
        let mut orbit = vec![c0.clone()];
        let mut seen: HashSet<TorusPoint> = HashSet::from([c0.clone()]);
        loop {
            let next = self.matrix.apply_torus(orbit.last().expect("orbit is non-empty"));
            if &next == c0 {
                break;
            }
            if !seen.insert(next.clone()) {
                return Err(Error::NotPeriodic(c0.to_string()));
            }
            orbit.push(next);
        }
        // orbit[i] = Aⁱ c0; the chain runs the orbit backwards.
        let p = orbit.len();
        Ok((0..p).map(|i| orbit[(p - i) % p].clone()).collect())
    }

    pub fn from_periodic(self: &Arc<Self>, c0: &TorusPoint, offset: Vec<Rational>) -> Result<SolenoidPoint> {
        self.check_dim(offset.len())?;
        let cycle = self.periodic_chain(c0)?;
        Ok(SolenoidPoint {
            space: self.clone(),
            cycle: minimal_cycle(cycle),
            offset,
        })
    }

    /// Builds `θ_offset(chain)` after checking consistency of the chain.
    pub fn point(self: &Arc<Self>, chain: &BackwardChain, offset: Vec<Rational>) -> Result<SolenoidPoint> {
        self.check_dim(offset.len())?;
        let cycle = self.normalize(chain)?;
        Ok(SolenoidPoint {
            space: self.clone(),
            cycle,
            offset,
        })
    }

    fn normalize(&self, chain: &BackwardChain) -> Result<Vec<TorusPoint>> {
        if chain.cycle.is_empty() {
            return Err(Error::Parse("backward chain needs a non-empty cycle".into()));
        }
        let full: Vec<&TorusPoint> = chain.head.iter().chain(&chain.cycle).collect();
        for x in &full {
            self.check_dim(x.dim())?;
        }
        for j in 0..full.len() - 1 {
            if *full[j] != self.matrix.apply_torus(full[j + 1]) {
                return Err(Error::InconsistentChain(j));
            }
        }
        let (m, p) = (chain.head.len(), chain.cycle.len());
        if chain.cycle[p - 1] != self.matrix.apply_torus(&chain.cycle[0]) {
            return Err(Error::InconsistentChain(m + p - 1));
        }
        // x_j = cycle[(j - m) mod p] for every j, head included.
        let cycle = (0..p)
            .map(|j| chain.cycle[(j + p - m % p) % p].clone())
            .collect();
        Ok(minimal_cycle(cycle))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// A random point with periodic base of denominator at most `max_den`
    /// (coprime to `det A`, so that every such torus point is periodic) and a
    /// rational offset with denominator at most `max_den`.
    pub fn random_point<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, max_den: i64) -> SolenoidPoint {
        let det = self.matrix.det();
        let k = self.dim();
        let q = loop {
            let q = rng.random_range(1..=max_den.max(1));
            if BigInt::from(q).gcd(&det).is_one() {
                break q;
            }
        };
        let c0 = TorusPoint::new((0..k).map(|_| rat(rng.random_range(0..q), q)).collect());
        let offset = random_vector(rng, k, max_den);
        self.from_periodic(&c0, offset)
            .expect("points with denominator coprime to det are periodic")
    }

    /// A random point of the fiber `Σ = p₀⁻¹(0)`.
    pub fn random_sigma_point<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, max_den: i64) -> SolenoidPoint {
        let x = self.random_point(rng, max_den);
        let back = vec_neg(x.coordinate(0).coords());
        x.act(&back).expect("dimension matches")
    }

    fn same(&self, other: &Solenoid) -> bool {
        std::ptr::eq(self, other) || self.matrix == other.matrix
    }
}

/// A random rational vector with entries `a/q`, `|a| ≤ 2q`, `1 ≤ q ≤ max_den`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, k: usize, max_den: i64) -> Vec<Rational> {
    (0..k)
        .map(|_| {
            let q = rng.random_range(1..=max_den.max(1));
            rat(rng.random_range(-2 * q..=2 * q), q)
        })
        .collect()
}

fn minimal_cycle(mut cycle: Vec<TorusPoint>) -> Vec<TorusPoint> {
    let p = cycle.len();
    for d in (1..=p).filter(|d| p % d == 0) {
        if (0..p).all(|i| cycle[i] == cycle[i % d]) {
            cycle.truncate(d);
            break;
        }
    }
    cycle
}

impl SolenoidPoint {
    pub fn space(&self) -> &Arc<Solenoid> {
        &self.space
    }

    pub fn cycle(&self) -> &[TorusPoint] {
        &self.cycle
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The chain `(cycle, head = [])` underlying this point.
    pub fn base(&self) -> BackwardChain {
        BackwardChain {
            head: Vec::new(),
            cycle: self.cycle.clone(),
        }
    }

    /// `p_j(x) = cycle[j mod p] + A⁻ʲ·offset (mod 1)`.
    pub fn coordinate(&self, j: usize) -> TorusPoint {
        let w = self.space.inverse.pow(j).mul_vec(&self.offset);
        self.cycle[j % self.period()].translate(&w)
    }

    /// Coordinates `0..n`.
    pub fn coordinates(&self, n: usize) -> Vec<TorusPoint> {
        let mut w = self.offset.clone();
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.cycle[j % self.period()].translate(&w));
            w = self.space.inverse.mul_vec(&w);
        }
        out
    }

    fn check_same(&self, other: &SolenoidPoint) -> Result<()> {
        if !self.space.same(&other.space) {
            return Err(Error::MatrixMismatch);
        }
        Ok(())
    }

    /// `σ_A(x) = (A x₀, x₀, x₁, …)`.
    pub fn shift(&self) -> SolenoidPoint {
        let mut cycle = self.cycle.clone();
        cycle.rotate_right(1);
        SolenoidPoint {
            space: self.space.clone(),
            cycle,
            offset: self.space.matrix.mul_rat(&self.offset),
        }
    }

    /// `σ_A⁻¹(x) = (x₁, x₂, …)`.
    pub fn unshift(&self) -> SolenoidPoint {
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(1);
        SolenoidPoint {
            space: self.space.clone(),
            cycle,
            offset: self.space.inverse.mul_vec(&self.offset),
        }
    }

    /// `σ_Aⁿ` for any integer `n`.
    pub fn shift_by(&self, n: i64) -> SolenoidPoint {
        let mut x = self.clone();
        for _ in 0..n.unsigned_abs() {
            x = if n > 0 { x.shift() } else { x.unshift() };
        }
        x
    }

    /// `θ_v(x)`.
    pub fn act(&self, v: &[Rational]) -> Result<SolenoidPoint> {
        self.space.check_dim(v.len())?;
        Ok(SolenoidPoint {
            space: self.space.clone(),
            cycle: self.cycle.clone(),
            offset: vec_add(&self.offset, v),
        })
    }

    pub fn add(&self, other: &SolenoidPoint) -> Result<SolenoidPoint> {
        self.check_same(other)?;
        let (p, q) = (self.period(), other.period());
        let n = p.lcm(&q);
        let cycle = (0..n)
            .map(|i| self.cycle[i % p].add(&other.cycle[i % q]))
            .collect();
        Ok(SolenoidPoint {
            space: self.space.clone(),
            cycle: minimal_cycle(cycle),
            offset: vec_add(&self.offset, &other.offset),
        })
    }

    pub fn neg(&self) -> SolenoidPoint {
        SolenoidPoint {
            space: self.space.clone(),
            cycle: self.cycle.iter().map(TorusPoint::neg).collect(),
            offset: vec_neg(&self.offset),
        }
    }

    pub fn sub(&self, other: &SolenoidPoint) -> Result<SolenoidPoint> {
        self.add(&other.neg())
    }

    pub fn in_sigma(&self) -> bool {
        self.coordinate(0).is_zero()
    }

    /// Exact test for `x = e`.
    ///
    /// With `x = θ_u(P(c))` of period `p`, `x = e` iff the first `p`
    /// coordinates vanish and `t = A⁻ᵖu − u` lies in `⋂ Aʲℤᵏ`. The latter holds
    /// iff `t` is integral and its minimal polynomial under `A` has constant
    /// term ±1.
    pub fn is_identity(&self) -> bool {
        let p = self.period();
        if !self.coordinates(p).iter().all(TorusPoint::is_zero) {
            return false;
        }
        let shifted = self.space.inverse.pow(p).mul_vec(&self.offset);
        let t: Vec<Rational> = shifted.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        in_infinite_image(&self.space.matrix, &t)
    }

    /// Exact equality of the denoted points (not of representations).
    pub fn same_point(&self, other: &SolenoidPoint) -> Result<bool> {
        Ok(self.sub(other)?.is_identity())
    }

    /// Whether the base chain is the zero chain.
    pub fn base_is_trivial(&self) -> bool {
        self.cycle.iter().all(TorusPoint::is_zero)
    }

    pub fn to_f64(&self, n: usize) -> Vec<Vec<f64>> {
        self.coordinates(n).iter().map(TorusPoint::to_f64).collect()
    }
}

impl PartialEq for SolenoidPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_point(other).unwrap_or(false)
    }
}

/// Whether `t ∈ ⋂_{j≥0} Aʲℤᵏ`, i.e. `A⁻ʲt ∈ ℤᵏ` for every `j`.
pub(crate) fn in_infinite_image(a: &IntMatrix, t: &[Rational]) -> bool {
    if !is_integral(t) {
        return false;
    }
    if t.iter().all(Zero::is_zero) {
        return true;
    }
    match krylov_constant_term(a, t) {
        Some(c) => c.abs().is_one(),
        None => false,
    }
}

/// Constant term of the minimal polynomial of `t` under `A`.
fn krylov_constant_term(a: &IntMatrix, t: &[Rational]) -> Option<Rational> {
    let k = t.len();
    // Reduced echelon rows of the Krylov vectors, each tracking its expression
    // in the Krylov basis.
    let mut basis: Vec<(Vec<Rational>, Vec<Rational>, usize)> = Vec::new();
    let mut v = t.to_vec();
    for d in 0..=k {
        let mut r = v.clone();
        let mut expr = zero_vec(k + 1);
        expr[d] = Rational::one();
        for (row, row_expr, pivot) in &basis {
            if !r[*pivot].is_zero() {
                let f = r[*pivot].clone() / &row[*pivot];
                for i in 0..k {
                    r[i] -= &row[i] * &f;
                }
                for i in 0..=k {
                    expr[i] -= &row_expr[i] * &f;
                }
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            // expr is the minimal polynomial: Σ expr[i] Aⁱ t = 0, monic in degree d.
            None => return Some(expr[0].clone()),
            Some(pivot) => basis.push((r, expr, pivot)),
        }
        v = a.mul_rat(&v);
    }
    None
}

impl fmt::Display for SolenoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cyc: Vec<String> = self.cycle.iter().map(|c| c.to_string()).collect();
        let off: Vec<String> = self.offset.iter().map(crate::rational::format_rational).collect();
        write!(f, "θ[{}](cycle {})", off.join(", "), cyc.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    matrix: IntMatrix,
    head: Vec<TorusPoint>,
    cycle: Vec<TorusPoint>,
    #[serde(with = "rational_vec")]
    offset: Vec<Rational>,
}

impl Serialize for SolenoidPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson {
            matrix: self.space.matrix.clone(),
            head: Vec::new(),
            cycle: self.cycle.clone(),
            offset: self.offset.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SolenoidPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PointJson::deserialize(d)?;
        let space = Solenoid::new(raw.matrix).map_err(serde::de::Error::custom)?;
        space
            .point(
                &BackwardChain {
                    head: raw.head,
                    cycle: raw.cycle,
                },
                raw.offset,
            )
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn dyadic() -> Arc<Solenoid> {
        Solenoid::new(IntMatrix::new(vec![vec![2]]).unwrap()).unwrap()
    }

    fn cat() -> Arc<Solenoid> {
        Solenoid::new(IntMatrix::new(vec![vec![2, 1], vec![1, 1]]).unwrap()).unwrap()
    }

    fn tp(xs: &[(i64, i64)]) -> TorusPoint {
        TorusPoint::new(xs.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    #[test]
    fn coordinate_examples() {
        let s = dyadic();
        let x = s.theta(vec![rat(1, 3)]).unwrap();
        assert_eq!(x.coordinate(2), tp(&[(1, 12)]));
        assert!(s.identity().coordinate(5).is_zero());
        // σ(θ₁e) = θ₂e; coordinate 1 is [2/2] = [0]
        let y = s.theta(vec![int(1)]).unwrap().shift();
        assert!(y.coordinate(1).is_zero());
        assert_eq!(y, s.theta(vec![int(2)]).unwrap());
    }

    #[test]
    fn shift_of_theta_one() {
        let s = dyadic();
        let y = s.theta(vec![int(1)]).unwrap().shift();
        let expected = [tp(&[(0, 1)]), tp(&[(0, 1)]), tp(&[(1, 2)]), tp(&[(1, 4)])];
        assert_eq!(y.coordinates(4), expected);
        assert_eq!(s.identity().shift(), s.identity());
    }

    #[test]
    fn theta_one_coordinates() {
        let s = dyadic();
        let x = s.theta(vec![int(1)]).unwrap();
        let expected = [tp(&[(0, 1)]), tp(&[(1, 2)]), tp(&[(1, 4)]), tp(&[(1, 8)])];
        assert_eq!(x.coordinates(4), expected);
        // different representations, different points: θ₁e ≠ e for A = [2]
        assert_ne!(x, s.identity());
    }

    #[test]
    fn integer_translates_are_trivial_for_unimodular_matrices() {
        let s = cat();
        assert_eq!(s.theta(vec![int(3), int(-1)]).unwrap(), s.identity());
        assert_ne!(s.theta(vec![rat(1, 2), int(0)]).unwrap(), s.identity());
    }

    #[test]
    fn period_two_chain() {
        let s = dyadic();
        let x = s.from_periodic(&tp(&[(1, 3)]), zero_vec(1)).unwrap();
        assert_eq!(x.period(), 2);
        assert_eq!(x.coordinates(3), [tp(&[(1, 3)]), tp(&[(2, 3)]), tp(&[(1, 3)])]);
        assert_eq!(x.shift().shift(), x);
        assert_ne!(x.shift(), x);
    }

    #[test]
    fn chain_with_head_normalizes() {
        let s = dyadic();
        let chain = BackwardChain {
            head: vec![tp(&[(2, 3)])],
            cycle: vec![tp(&[(1, 3)]), tp(&[(2, 3)])],
        };
        let x = s.point(&chain, zero_vec(1)).unwrap();
        assert_eq!(x.coordinate(0), tp(&[(2, 3)]));
        assert_eq!(x.coordinate(1), tp(&[(1, 3)]));
        let bad = BackwardChain {
            head: vec![tp(&[(1, 3)])],
            cycle: vec![tp(&[(1, 3)]), tp(&[(2, 3)])],
        };
        assert!(matches!(s.point(&bad, zero_vec(1)), Err(Error::InconsistentChain(0))));
    }

    #[test]
    fn non_periodic_torus_point_rejected() {
        // 1/2 → 0 under doubling, so it is not periodic
        assert!(dyadic().from_periodic(&tp(&[(1, 2)]), zero_vec(1)).is_err());
    }

    #[test]
    fn group_examples() {
        let s = dyadic();
        let one = s.theta(vec![int(1)]).unwrap();
        assert_eq!(one.add(&one).unwrap(), s.theta(vec![int(2)]).unwrap());
        assert_eq!(one.add(&one.neg()).unwrap(), s.identity());
    }

    #[test]
    fn json_round_trip() {
        let s = cat();
        let x = s.from_periodic(&tp(&[(1, 5), (2, 5)]), vec![rat(1, 7), int(2)]).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"head\":[]"));
        let back: SolenoidPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn infinite_image_membership() {
        let two = IntMatrix::new(vec![vec![2]]).unwrap();
        assert!(!in_infinite_image(&two, &[int(4)]));
        assert!(in_infinite_image(&two, &[int(0)]));
        let catm = IntMatrix::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        assert!(in_infinite_image(&catm, &[int(3), int(5)]));
        let mixed = IntMatrix::new(vec![vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 2]]).unwrap();
        assert!(in_infinite_image(&mixed, &[int(1), int(1), int(0)]));
        assert!(!in_infinite_image(&mixed, &[int(1), int(1), int(1)]));
    }
}
