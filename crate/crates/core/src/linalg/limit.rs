use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::IntMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The class `[(vec, level)]` in `ℤᵏ[A⁻¹] = lim→(ℤᵏ, A)`, i.e. `A^{-level}·vec`.
///
/// Always stored in canonical form: the level is minimal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LimitElement {
    matrix: Arc<IntMatrix>,
    vec: Vec<BigInt>,
    level: u32,
}

impl LimitElement {
    pub fn new(matrix: Arc<IntMatrix>, vec: Vec<BigInt>, level: u32) -> Result<Self> {
        if vec.len() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                got: vec.len(),
            });
        }
        if matrix.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(LimitElement { matrix, vec, level }.reduce())
    }

    pub fn from_i64(matrix: Arc<IntMatrix>, vec: &[i64], level: u32) -> Result<Self> {
        Self::new(matrix, vec.iter().map(|&x| BigInt::from(x)).collect(), level)
    }

    pub fn zero(matrix: Arc<IntMatrix>) -> Self {
        let k = matrix.dim();
        LimitElement {
            matrix,
            vec: vec![BigInt::zero(); k],
            level: 0,
        }
    }

    pub fn matrix(&self) -> &Arc<IntMatrix> {
        &self.matrix
    }

    pub fn vec(&self) -> &[BigInt] {
        &self.vec
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Canonical form: divide by `A` while the level is positive and the
    /// vector lies in `A·ℤᵏ`.
    pub fn reduce(mut self) -> Self {
        while self.level > 0 {
            match self.matrix.integer_preimage(&self.vec) {
                Some(w) => {
                    self.vec = w;
                    self.level -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Representative vector at a level `≥ self.level`.
    pub fn lift_to(&self, level: u32) -> Vec<BigInt> {
        assert!(level >= self.level, "cannot lower the level of a class");
        (self.level..level).fold(self.vec.clone(), |v, _| self.matrix.mul_int(&v))
    }

    fn check_same(&self, other: &LimitElement) -> Result<()> {
        if self.matrix != other.matrix {
            return Err(Error::MatrixMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &LimitElement) -> Result<Self> {
        self.check_same(other)?;
        let level = self.level.max(other.level);
        let (a, b) = (self.lift_to(level), other.lift_to(level));
        Ok(LimitElement {
            matrix: self.matrix.clone(),
            vec: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            level,
        }
        .reduce())
    }

    pub fn neg(&self) -> Self {
        LimitElement {
            matrix: self.matrix.clone(),
            vec: self.vec.iter().map(|x| -x).collect(),
            level: self.level,
        }
    }

    pub fn sub(&self, other: &LimitElement) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `τ_A [(n, m)] = [(A·n, m)]`.
    pub fn tau(&self) -> Self {
        LimitElement {
            matrix: self.matrix.clone(),
            vec: self.matrix.mul_int(&self.vec),
            level: self.level,
        }
        .reduce()
    }

    /// `τ_A⁻¹ [(n, m)] = [(n, m + 1)]`.
    pub fn tau_inv(&self) -> Self {
        LimitElement {
            matrix: self.matrix.clone(),
            vec: self.vec.clone(),
            level: self.level + 1,
        }
        .reduce()
    }

    /// The element as a rational vector `A^{-level}·vec`.
    pub fn value(&self) -> Vec<Rational> {
        let inv = self
            .matrix
            .inverse()
            .expect("limit elements are built over invertible matrices")
            .pow(self.level as usize);
        let v: Vec<Rational> = self.vec.iter().cloned().map(Rational::from_integer).collect();
        inv.mul_vec(&v)
    }
}

impl fmt::Display for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.vec.iter().map(|x| x.to_string()).collect();
        write!(f, "[({}, {})]", xs.join(","), self.level)
    }
}

impl Serialize for LimitElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LimitElement", 2)?;
        let xs: Vec<String> = self.vec.iter().map(|x| x.to_string()).collect();
        st.serialize_field("vec", &xs)?;
        st.serialize_field("level", &self.level)?;
        st.end()
    }
}
