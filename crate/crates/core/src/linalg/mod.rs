//! Exact integer linear algebra over the torus: hyperbolicity, entropy,
//! eigen-splittings, and the direct-limit group ℤᵏ[A⁻¹].

mod limit;
pub(crate) mod poly;
mod spectrum;
mod splitting;

pub use limit::LimitElement;
pub use spectrum::{check_hyperbolic, toral_entropy, unimodular_factor, HyperbolicityReport, HYPERBOLICITY_TOLERANCE};
pub use splitting::{splitting, HyperbolicSplitting};
pub(crate) use splitting::l2;

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{Rational, TorusPoint};

/// Square integer matrix acting on ℝᵏ, ℤᵏ and 𝕋ᵏ.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    k: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::NotSquare);
        }
        Ok(IntMatrix {
            k,
            entries: rows.into_iter().flatten().map(BigInt::from).collect(),
        })
    }

    pub fn from_big(k: usize, entries: Vec<BigInt>) -> Result<Self> {
        if k == 0 || entries.len() != k * k {
            return Err(Error::NotSquare);
        }
        Ok(IntMatrix { k, entries })
    }

    pub fn identity(k: usize) -> Self {
        let mut entries = vec![BigInt::zero(); k * k];
        for i in 0..k {
            entries[i * k + i] = BigInt::one();
        }
        IntMatrix { k, entries }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.k + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let k = self.k;
        let entries = (0..k * k)
            .map(|idx| self.entry(idx % k, idx / k).clone())
            .collect();
        IntMatrix { k, entries }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let k = self.k;
        let mut entries = vec![BigInt::zero(); k * k];
        for i in 0..k {
            for j in 0..k {
                entries[i * k + j] = (0..k).map(|l| self.entry(i, l) * other.entry(l, j)).sum();
            }
        }
        IntMatrix { k, entries }
    }

    pub fn pow(&self, n: u32) -> IntMatrix {
        (0..n).fold(IntMatrix::identity(self.k), |acc, _| acc.mul(self))
    }

    fn trace(&self) -> BigInt {
        (0..self.k).map(|i| self.entry(i, i).clone()).sum()
    }

    /// Characteristic polynomial `det(xI - A)` (coefficients low to high, monic)
    /// together with the Faddeev–LeVerrier matrix `M` satisfying `A·M = -c₀·I`.
    fn faddeev_leverrier(&self) -> (Vec<BigInt>, IntMatrix) {
        let k = self.k;
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        let mut m = IntMatrix::identity(k);
        coeffs[k - 1] = -self.trace();
        for step in 2..=k {
            let mut next = self.mul(&m);
            for i in 0..k {
                next.entries[i * k + i] += &coeffs[k - step + 1];
            }
            m = next;
            let am = self.mul(&m);
            coeffs[k - step] = -am.trace() / BigInt::from(step);
        }
        (coeffs, m)
    }

    pub fn charpoly(&self) -> Vec<BigInt> {
        self.faddeev_leverrier().0
    }

    pub fn det(&self) -> BigInt {
        let c0 = self.charpoly()[0].clone();
        if self.k % 2 == 0 {
            c0
        } else {
            -c0
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Adjugate matrix, `adj(A)·A = det(A)·I`.
    pub fn adjugate(&self) -> IntMatrix {
        let (_, m) = self.faddeev_leverrier();
        // A·M = -c₀ I and det = (-1)^k c₀, so adj = det·A⁻¹ = (-1)^(k+1) M.
        if self.k % 2 == 1 {
            m
        } else {
            IntMatrix {
                k: self.k,
                entries: m.entries.into_iter().map(|x| -x).collect(),
            }
        }
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let adj = self.adjugate();
        Ok(RatMatrix {
            k: self.k,
            entries: adj
                .entries
                .into_iter()
                .map(|x| Rational::new(x, det.clone()))
                .collect(),
        })
    }

    pub fn mul_int(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.entry(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mul_rat(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.k)
            .map(|i| {
                (0..self.k)
                    .filter(|&j| !self.entry(i, j).is_zero())
                    .map(|j| &v[j] * self.entry(i, j))
                    .fold(Rational::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    pub fn apply_torus(&self, x: &TorusPoint) -> TorusPoint {
        TorusPoint::new(self.mul_rat(x.coords()))
    }

    pub fn mul_f64(&self, v: &[f64]) -> Vec<f64> {
        let m = self.to_f64_entries();
        (0..self.k)
            .map(|i| (0..self.k).map(|j| m[i * self.k + j] * v[j]).sum())
            .collect()
    }

    fn to_f64_entries(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.k, self.k, &self.to_f64_entries())
    }

    /// Whether `v` lies in `A·ℤᵏ`, returning the preimage when it does.
    pub fn integer_preimage(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let det = self.det();
        let adj = self.adjugate();
        let w = adj.mul_int(v);
        if w.iter().all(|x| (x % &det).is_zero()) {
            Some(w.into_iter().map(|x| x / &det).collect())
        } else {
            None
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", xs.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<i64>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::new(rows).map_err(serde::de::Error::custom)
    }
}

/// Square matrix with exact rational entries (used for `A⁻¹` and its powers).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    k: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn identity(k: usize) -> Self {
        let mut entries = vec![Rational::zero(); k * k];
        for i in 0..k {
            entries[i * k + i] = Rational::one();
        }
        RatMatrix { k, entries }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.k + j]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let k = self.k;
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(
                    (0..k)
                        .map(|l| self.entry(i, l) * other.entry(l, j))
                        .fold(Rational::zero(), |acc, x| acc + x),
                );
            }
        }
        RatMatrix { k, entries }
    }

    pub fn pow(&self, n: usize) -> RatMatrix {
        let mut result = RatMatrix::identity(self.k);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.k)
            .map(|i| {
                (0..self.k)
                    .filter(|&j| !self.entry(i, j).is_zero())
                    .map(|j| self.entry(i, j) * &v[j])
                    .fold(Rational::zero(), |acc, x| acc + x)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::new(rows).unwrap()
    }

    #[test]
    fn charpoly_and_det() {
        let cat = m(vec![vec![2, 1], vec![1, 1]]);
        let cp: Vec<i64> = cat.charpoly().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(cp, vec![1, -3, 1]);
        assert_eq!(cat.det(), BigInt::from(1));
        assert_eq!(m(vec![vec![2]]).det(), BigInt::from(2));
        let c3 = m(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        let cp: Vec<i64> = c3.charpoly().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(cp, vec![-1, -1, 0, 1]);
        assert_eq!(c3.det(), BigInt::from(1));
        assert_eq!(m(vec![vec![1, 2], vec![2, 4]]).det(), BigInt::zero());
    }

    #[test]
    fn adjugate_inverts_up_to_det() {
        let a = m(vec![vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]]);
        let prod = a.adjugate().mul(&a);
        let det = a.det();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { det.clone() } else { BigInt::zero() };
                assert_eq!(prod.entry(i, j), &expected);
            }
        }
        let inv = a.inverse().unwrap();
        let v = vec![rat(1, 3), int(2), rat(-5, 7)];
        assert_eq!(inv.mul_vec(&a.mul_rat(&v)), v);
    }

    #[test]
    fn rejects_non_square() {
        assert!(IntMatrix::new(vec![vec![1, 2]]).is_err());
        assert!(IntMatrix::new(vec![]).is_err());
    }

    #[test]
    fn integer_preimage_detects_divisibility() {
        let two = m(vec![vec![2]]);
        assert_eq!(two.integer_preimage(&[BigInt::from(4)]), Some(vec![BigInt::from(2)]));
        assert_eq!(two.integer_preimage(&[BigInt::from(3)]), None);
    }

    #[test]
    fn json_rows() {
        let a: IntMatrix = serde_json::from_str("[[2,1],[1,1]]").unwrap();
        assert_eq!(a, m(vec![vec![2, 1], vec![1, 1]]));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[2,1],[1,1]]");
    }
}
