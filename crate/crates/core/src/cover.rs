//! The covering groups `𝒮̄ = Σ × ℝᵏ` and `𝒮̃ = lim→(𝒮̄, σ̄)` of the solenoid,
//! with `σ̄, q̄, α` and their direct-limit versions `σ̃, q̃, α̃`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::LimitElement;
use crate::rational::{format_rational, is_integral, vec_add, vec_neg, zero_vec, Rational};
use crate::solenoid::{random_vector, Solenoid, SolenoidPoint};

/// A point `(ξ, v)` of `𝒮̄` with `ξ ∈ Σ`.
#[derive(Clone, Debug)]
pub struct CoverPoint {
    fiber: SolenoidPoint,
    v: Vec<Rational>,
}

impl CoverPoint {
    pub fn new(fiber: SolenoidPoint, v: Vec<Rational>) -> Result<Self> {
        if !fiber.in_sigma() {
            return Err(Error::NotInFiber);
        }
        if v.len() != fiber.dim() {
            return Err(Error::DimensionMismatch {
                expected: fiber.dim(),
                got: v.len(),
            });
        }
        Ok(CoverPoint { fiber, v })
    }

    pub fn zero(space: &Arc<Solenoid>) -> Self {
        CoverPoint {
            fiber: space.identity(),
            v: zero_vec(space.dim()),
        }
    }

    pub fn fiber(&self) -> &SolenoidPoint {
        &self.fiber
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn space(&self) -> &Arc<Solenoid> {
        self.fiber.space()
    }

    pub fn add(&self, other: &CoverPoint) -> Result<CoverPoint> {
        Ok(CoverPoint {
            fiber: self.fiber.add(&other.fiber)?,
            v: vec_add(&self.v, &other.v),
        })
    }

    pub fn neg(&self) -> CoverPoint {
        CoverPoint {
            fiber: self.fiber.neg(),
            v: vec_neg(&self.v),
        }
    }

    pub fn random<R: Rng + ?Sized>(space: &Arc<Solenoid>, rng: &mut R, max_den: i64) -> Self {
        CoverPoint {
            fiber: space.random_sigma_point(rng, max_den),
            v: random_vector(rng, space.dim(), max_den),
        }
    }
}

impl PartialEq for CoverPoint {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.fiber == other.fiber
    }
}

impl fmt::Display for CoverPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(format_rational).collect();
        write!(f, "({}, [{}])", self.fiber, v.join(", "))
    }
}

/// `σ̄(ξ, v) = (σ_A ξ, A v)`.
pub fn sigma_bar(s: &CoverPoint) -> CoverPoint {
    CoverPoint {
        fiber: s.fiber.shift(),
        v: s.space().matrix().mul_rat(&s.v),
    }
}

/// `q̄(ξ, v) = θ_v(ξ)`.
pub fn q_bar(s: &CoverPoint) -> SolenoidPoint {
    s.fiber.act(&s.v).expect("fiber and vector share the dimension")
}

/// `α(n) = (θ_{-n}(e), n)`.
pub fn alpha(space: &Arc<Solenoid>, n: &[BigInt]) -> CoverPoint {
    let v: Vec<Rational> = n.iter().cloned().map(Rational::from_integer).collect();
    CoverPoint {
        fiber: space.theta(vec_neg(&v)).expect("dimension matches"),
        v,
    }
}

/// The class `[(s, level)]` in `𝒮̃` under `(s, m) ~ (σ̄(s), m + 1)`, stored with
/// minimal level.
#[derive(Clone, Debug)]
pub struct TildeCoverPoint {
    point: CoverPoint,
    level: u32,
}

impl TildeCoverPoint {
    pub fn new(point: CoverPoint, level: u32) -> Self {
        TildeCoverPoint { point, level }.canonical()
    }

    pub fn point(&self) -> &CoverPoint {
        &self.point
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Lowers the level while `s ∈ σ̄(𝒮̄)`. Since `A` is invertible over ℚ,
    /// `s = (ξ, v)` lies in the image iff `σ_A⁻¹ξ ∈ Σ`, i.e. `p₁(ξ) = 0`.
    pub fn canonical(mut self) -> Self {
        while self.level > 0 && self.point.fiber.coordinate(1).is_zero() {
            let inverse = self.point.space().inverse().clone();
            self.point = CoverPoint {
                fiber: self.point.fiber.unshift(),
                v: inverse.mul_vec(&self.point.v),
            };
            self.level -= 1;
        }
        self
    }

    fn lift_with(&self, level: u32, sigma: &dyn Fn(&CoverPoint) -> CoverPoint) -> CoverPoint {
        (self.level..level).fold(self.point.clone(), |s, _| sigma(&s))
    }

    pub fn add(&self, other: &TildeCoverPoint) -> Result<TildeCoverPoint> {
        self.add_with(other, &sigma_bar)
    }

    fn add_with(
        &self,
        other: &TildeCoverPoint,
        sigma: &dyn Fn(&CoverPoint) -> CoverPoint,
    ) -> Result<TildeCoverPoint> {
        let level = self.level.max(other.level);
        let sum = self.lift_with(level, sigma).add(&other.lift_with(level, sigma))?;
        Ok(TildeCoverPoint::new(sum, level))
    }

    pub fn neg(&self) -> TildeCoverPoint {
        TildeCoverPoint {
            point: self.point.neg(),
            level: self.level,
        }
    }

    /// A random class with level below `max_level`.
    pub fn random<R: Rng + ?Sized>(space: &Arc<Solenoid>, rng: &mut R, max_den: i64, max_level: u32) -> Self {
        let level = rng.random_range(0..max_level.max(1));
        TildeCoverPoint::new(CoverPoint::random(space, rng, max_den), level)
    }
}

impl PartialEq for TildeCoverPoint {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.point == other.point
    }
}

impl fmt::Display for TildeCoverPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({}, {})]", self.point, self.level)
    }
}

/// `σ̃[(s, l)] = [(σ̄ s, l)]`.
pub fn sigma_tilde(t: &TildeCoverPoint) -> TildeCoverPoint {
    TildeCoverPoint::new(sigma_bar(&t.point), t.level)
}

/// Inverse of `σ̃`: `[(s, l)] ↦ [(s, l + 1)]`.
pub fn sigma_tilde_inv(t: &TildeCoverPoint) -> TildeCoverPoint {
    TildeCoverPoint::new(t.point.clone(), t.level + 1)
}

/// `q̃[(s, l)] = σ_A^{-l}(q̄ s)`.
pub fn q_tilde(t: &TildeCoverPoint) -> SolenoidPoint {
    q_bar(&t.point).shift_by(-(t.level as i64))
}

/// `α̃[(n, m)] = [(α(n), m)]`.
pub fn alpha_tilde(space: &Arc<Solenoid>, g: &LimitElement) -> Result<TildeCoverPoint> {
    if g.matrix().as_ref() != space.matrix() {
        return Err(Error::MatrixMismatch);
    }
    Ok(TildeCoverPoint::new(alpha(space, g.vec()), g.level()))
}

/// Outcome of one identity over all samples.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub status: &'static str,
    pub samples: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub matrix: crate::linalg::IntMatrix,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

/// Names of the eight checked identities, in report order.
pub const IDENTITIES: [&str; 8] = [
    "alpha embeds Z^k as a subgroup",
    "ker q_bar = alpha(Z^k)",
    "q_bar . sigma_bar = sigma_A . q_bar",
    "sigma_bar(x + alpha(n)) = sigma_bar(x) + alpha(A n)",
    "alpha_tilde embeds Z^k[A^-1] as a subgroup",
    "ker q_tilde = alpha_tilde(Z^k[A^-1])",
    "q_tilde . sigma_tilde = sigma_A . q_tilde",
    "sigma_tilde(x + alpha_tilde(g)) = sigma_tilde(x) + alpha_tilde(tau_A g)",
];

/// Checks all eight cover identities on `samples` random inputs, exactly.
pub fn verify_cover_identities(a: &crate::linalg::IntMatrix, samples: usize, seed: u64) -> Result<IdentityReport> {
    verify_cover_identities_with(a, samples, seed, &sigma_bar)
}

/// As [`verify_cover_identities`] with a substitute for `σ̄` (used to check
/// that the verifier detects a wrong map).
pub fn verify_cover_identities_with(
    a: &crate::linalg::IntMatrix,
    samples: usize,
    seed: u64,
    sigma: &dyn Fn(&CoverPoint) -> CoverPoint,
) -> Result<IdentityReport> {
    let space = Solenoid::new(a.clone())?;
    let matrix = Arc::new(a.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = space.dim();
    let max_den = 12;
    let mut tallies: Vec<(usize, Option<String>)> = vec![(0, None); IDENTITIES.len()];
    let mut record = |i: usize, ok: bool, witness: &dyn Fn() -> String| {
        if !ok {
            tallies[i].0 += 1;
            if tallies[i].1.is_none() {
                tallies[i].1 = Some(witness());
            }
        }
    };
    let sigma_t = |t: &TildeCoverPoint| TildeCoverPoint::new(sigma(&t.point), t.level);

    for _ in 0..samples {
        let n = random_int_vector(&mut rng, k);
        let m = random_int_vector(&mut rng, k);
        let s = CoverPoint::random(&space, &mut rng, max_den);
        let e = space.identity();

        // alpha is an injective homomorphism
        let sum: Vec<BigInt> = n.iter().zip(&m).map(|(x, y)| x + y).collect();
        let hom = alpha(&space, &sum) == alpha(&space, &n).add(&alpha(&space, &m))?;
        let inj = (alpha(&space, &n) == CoverPoint::zero(&space)) == n.iter().all(|x| *x == BigInt::from(0));
        record(0, hom && inj, &|| format!("n = {n:?}, m = {m:?}"));

        // kernel of q_bar: α(n) ∈ ker, and on the sample q̄(s) = e iff s = α(v)
        let in_kernel = q_bar(&alpha(&space, &n)) == e;
        let s_kernel = q_bar(&s).is_identity();
        let s_in_n = is_integral(&s.v) && {
            let v: Vec<BigInt> = s.v.iter().map(|q| q.to_integer()).collect();
            alpha(&space, &v) == s
        };
        record(1, in_kernel && s_kernel == s_in_n, &|| format!("s = {s}, n = {n:?}"));

        // q̄ ∘ σ̄ = σ_A ∘ q̄
        let lhs = q_bar(&sigma(&s));
        let rhs = q_bar(&s).shift();
        record(2, lhs == rhs, &|| format!("s = {s}: q_bar(sigma_bar s) = {lhs}, sigma_A(q_bar s) = {rhs}"));

        // σ̄(x + α(n)) = σ̄(x) + α(An)
        let an: Vec<BigInt> = a.mul_int(&n);
        let lhs = sigma(&s.add(&alpha(&space, &n))?);
        let rhs = sigma(&s).add(&alpha(&space, &an))?;
        record(3, lhs == rhs, &|| format!("s = {s}, n = {n:?}: {lhs} vs {rhs}"));

        // α̃ is an injective homomorphism on ℤᵏ[A⁻¹]
        let g = random_limit(&matrix, &mut rng, k);
        let h = random_limit(&matrix, &mut rng, k);
        let ag = alpha_tilde(&space, &g)?;
        let ah = alpha_tilde(&space, &h)?;
        let hom = alpha_tilde(&space, &g.add(&h)?)? == ag.add_with(&ah, sigma)?;
        let zero_t = TildeCoverPoint::new(CoverPoint::zero(&space), 0);
        let inj = (ag == zero_t) == (g == LimitElement::zero(matrix.clone()));
        record(4, hom && inj, &|| format!("g = {g}, h = {h}"));

        // kernel of q̃
        let t = TildeCoverPoint::random(&space, &mut rng, max_den, 4);
        let t_kernel = q_tilde(&t).is_identity();
        let t_in_n = is_integral(&t.point.v) && {
            let v: Vec<BigInt> = t.point.v.iter().map(|q| q.to_integer()).collect();
            let g = LimitElement::new(matrix.clone(), v, t.level)?;
            alpha_tilde(&space, &g)? == t
        };
        record(
            5,
            q_tilde(&ag).is_identity() && t_kernel == t_in_n,
            &|| format!("t = {t}, g = {g}"),
        );

        // q̃ ∘ σ̃ = σ_A ∘ q̃
        let lhs = q_tilde(&sigma_t(&t));
        let rhs = q_tilde(&t).shift();
        record(6, lhs == rhs, &|| format!("t = {t}: {lhs} vs {rhs}"));

        // σ̃(x + α̃(g)) = σ̃(x) + α̃(τ g)
        let lhs = sigma_t(&t.add_with(&ag, sigma)?);
        let rhs = sigma_t(&t).add_with(&alpha_tilde(&space, &g.tau())?, sigma)?;
        record(7, lhs == rhs, &|| format!("t = {t}, g = {g}: {lhs} vs {rhs}"));
    }

    let checks = IDENTITIES
        .iter()
        .zip(tallies)
        .map(|(name, (failures, witness))| IdentityCheck {
            identity: name,
            status: if failures == 0 { "pass" } else { "fail" },
            samples,
            failures,
            witness,
        })
        .collect();
    Ok(IdentityReport {
        matrix: a.clone(),
        seed,
        checks,
    })
}

fn random_int_vector<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<BigInt> {
    (0..k).map(|_| BigInt::from(rng.random_range(-5i64..=5))).collect()
}

fn random_limit<R: Rng + ?Sized>(matrix: &Arc<crate::linalg::IntMatrix>, rng: &mut R, k: usize) -> LimitElement {
    let level = rng.random_range(0..4);
    LimitElement::new(matrix.clone(), random_int_vector(rng, k), level)
        .expect("matrix is invertible and dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;
    use crate::rational::{int, rat};

    fn dyadic() -> Arc<Solenoid> {
        Solenoid::new(IntMatrix::new(vec![vec![2]]).unwrap()).unwrap()
    }

    #[test]
    fn sigma_bar_examples() {
        let s = dyadic();
        let zero = CoverPoint::zero(&s);
        assert_eq!(sigma_bar(&zero), zero);
        let p = CoverPoint::new(s.identity(), vec![int(1)]).unwrap();
        assert_eq!(sigma_bar(&p), CoverPoint::new(s.identity(), vec![int(2)]).unwrap());
    }

    #[test]
    fn alpha_one_over_dyadic() {
        let s = dyadic();
        let a1 = alpha(&s, &[BigInt::from(1)]);
        let coords: Vec<Rational> = a1.fiber().coordinates(4).iter().map(|c| c.coords()[0].clone()).collect();
        assert_eq!(coords, vec![int(0), rat(1, 2), rat(3, 4), rat(7, 8)]);
        assert_eq!(a1.v(), &[int(1)]);
        assert!(q_bar(&a1).is_identity());
        assert_eq!(alpha(&s, &[BigInt::from(0)]), CoverPoint::zero(&s));
    }

    #[test]
    fn q_tilde_kills_alpha_tilde() {
        let s = dyadic();
        let g = LimitElement::from_i64(Arc::new(s.matrix().clone()), &[1], 1).unwrap();
        assert!(q_tilde(&alpha_tilde(&s, &g).unwrap()).is_identity());
    }

    #[test]
    fn level_inflation_is_invisible() {
        let s = dyadic();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = TildeCoverPoint::random(&s, &mut rng, 9, 3);
            let mut inflated = t.point().clone();
            for _ in 0..3 {
                inflated = sigma_bar(&inflated);
            }
            let u = TildeCoverPoint::new(inflated, t.level() + 3);
            assert_eq!(u, t);
            assert_eq!(u.clone().canonical(), u);
            assert_eq!(sigma_tilde_inv(&sigma_tilde(&t)), t);
        }
    }

    #[test]
    fn not_in_fiber_rejected() {
        let s = dyadic();
        let x = s.theta(vec![rat(1, 3)]).unwrap();
        assert!(matches!(CoverPoint::new(x, vec![int(0)]), Err(Error::NotInFiber)));
    }

    #[test]
    fn identities_hold() {
        for rows in [vec![vec![2]], vec![vec![2, 1], vec![1, 1]]] {
            let report = verify_cover_identities(&IntMatrix::new(rows).unwrap(), 100, 1).unwrap();
            assert!(report.all_passed(), "{:#?}", report.checks);
        }
    }

    #[test]
    fn dropping_the_matrix_factor_is_detected() {
        let corrupted = |s: &CoverPoint| CoverPoint {
            fiber: s.fiber().shift(),
            v: s.v().to_vec(),
        };
        let a = IntMatrix::new(vec![vec![2]]).unwrap();
        let report = verify_cover_identities_with(&a, 50, 3, &corrupted).unwrap();
        let intertwining = &report.checks[2];
        assert_eq!(intertwining.status, "fail");
        assert!(intertwining.witness.is_some());
    }
}
