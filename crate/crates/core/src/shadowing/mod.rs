//! Global shadowing for product hyperbolic systems `h = (h₁, h₂)` on
//! `Ω = ℝᵏ × Υ`, with `h₁` expanding and `h₂` contracting along fibers.
//!
//! Pseudo-orbits may jump by deck transformations: consecutive points are
//! compared after moving `x_{j+1}` back by the deck `g_j` that best connects
//! it to `h(x_j)`. Shadows are then orbits of the twisted recursion
//! `w_{j+1} = g_j · h(w_j)`, which project to true orbits of the quotient.

mod dyadic;
mod linear;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::l2;

pub use dyadic::DyadicCoverSystem;
pub use linear::LinearToralSystem;

/// Expansion and contraction constants: `ρ(h₁x, h₁y) ≥ μ ρ(x, y)` and
/// `d(h₂ʲξ, h₂ʲζ) ≤ c λʲ d(ξ, ζ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub mu: f64,
    pub c: f64,
    pub lambda: f64,
}

impl Rates {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 1.0) {
            return Err(Error::InvalidRates(format!("mu = {} must exceed 1", self.mu)));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::InvalidRates(format!("lambda = {} must lie in [0, 1)", self.lambda)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidRates(format!("c = {} must be positive and finite", self.c)));
        }
        Ok(())
    }

    /// `L·(1/(μ-1) + c/(1-λ))`.
    pub fn shadow_bound(&self, gap: f64) -> f64 {
        gap * (1.0 / (self.mu - 1.0) + self.c / (1.0 - self.lambda))
    }
}

/// A point `(base, fiber)` of `Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint<F> {
    pub base: Vec<f64>,
    pub fiber: F,
}

impl<F> OmegaPoint<F> {
    pub fn new(base: Vec<f64>, fiber: F) -> Self {
        OmegaPoint { base, fiber }
    }
}

pub trait ProductHyperbolicSystem: Sync {
    type Fiber: Clone + Send + Sync;
    type Deck: Clone + Send + Sync;

    fn expanding_dim(&self) -> usize;
    fn rates(&self) -> Rates;

    fn base_step(&self, y: &[f64]) -> Vec<f64>;
    /// Exact inverse of [`base_step`](Self::base_step).
    fn base_step_inv(&self, y: &[f64]) -> Vec<f64>;
    /// Fiber component of `h(base, z)`.
    fn fiber_step(&self, base: &[f64], z: &Self::Fiber) -> Self::Fiber;
    /// Fiber component of `h⁻¹(base', z)`, where `base` is the base of the preimage.
    fn fiber_step_inv(&self, base: &[f64], z: &Self::Fiber) -> Self::Fiber;

    fn base_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        l2(&d)
    }
    /// `d_x(a, b)` on the fiber over `x`.
    fn fiber_dist(&self, base: &[f64], a: &Self::Fiber, b: &Self::Fiber) -> f64;

    /// The deck `g` for which `g⁻¹·to` is closest to `from`.
    fn connect(&self, from: &OmegaPoint<Self::Fiber>, to: &OmegaPoint<Self::Fiber>) -> Self::Deck;
    fn deck(&self, g: &Self::Deck, x: &OmegaPoint<Self::Fiber>) -> OmegaPoint<Self::Fiber>;
    fn deck_inv(&self, g: &Self::Deck, x: &OmegaPoint<Self::Fiber>) -> OmegaPoint<Self::Fiber>;

    /// A `K` with `d(x, y) ≤ C ⇒ d_{π₁y}(π₂y, π₂x) ≤ K`.
    fn holonomy_bound(&self, _c: f64) -> Result<f64> {
        Err(Error::Unsupported("no holonomy bound for this system".into()))
    }

    fn step(&self, x: &OmegaPoint<Self::Fiber>) -> OmegaPoint<Self::Fiber> {
        OmegaPoint::new(self.base_step(&x.base), self.fiber_step(&x.base, &x.fiber))
    }

    fn step_inv(&self, x: &OmegaPoint<Self::Fiber>) -> OmegaPoint<Self::Fiber> {
        let base = self.base_step_inv(&x.base);
        let fiber = self.fiber_step_inv(&base, &x.fiber);
        OmegaPoint::new(base, fiber)
    }

    /// `ρ(π₁a, π₁b) + d_{π₁b}(π₂a, π₂b)`.
    fn dist(&self, a: &OmegaPoint<Self::Fiber>, b: &OmegaPoint<Self::Fiber>) -> f64 {
        self.base_dist(&a.base, &b.base) + self.fiber_dist(&b.base, &a.fiber, &b.fiber)
    }
}

/// Points `x_{-J}, …, x_J` of `Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PseudoOrbit<F> {
    points: Vec<OmegaPoint<F>>,
}

impl<F: Clone> PseudoOrbit<F> {
    /// `points[i]` is `x_{i-J}`; the length must be odd.
    pub fn new(points: Vec<OmegaPoint<F>>) -> Result<Self> {
        if points.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "a pseudo-orbit over [-J, J] has an odd number of points, got {}",
                points.len()
            )));
        }
        Ok(PseudoOrbit { points })
    }

    /// The exact orbit `hʲ(x)`, `|j| ≤ J`, as a pseudo-orbit with `L = 0`.
    pub fn orbit<S>(system: &S, x: &OmegaPoint<F>, half_width: usize) -> Self
    where
        S: ProductHyperbolicSystem<Fiber = F>,
    {
        let mut back = vec![x.clone()];
        for _ in 0..half_width {
            back.push(system.step_inv(back.last().unwrap()));
        }
        back.reverse();
        for _ in 0..half_width {
            back.push(system.step(back.last().unwrap()));
        }
        PseudoOrbit { points: back }
    }

    pub fn half_width(&self) -> usize {
        self.points.len() / 2
    }

    pub fn points(&self) -> &[OmegaPoint<F>] {
        &self.points
    }

    /// `x_j` for `-J ≤ j ≤ J`.
    pub fn at(&self, j: i64) -> &OmegaPoint<F> {
        &self.points[(j + self.half_width() as i64) as usize]
    }

    fn decks<S: ProductHyperbolicSystem<Fiber = F>>(&self, system: &S) -> Vec<S::Deck> {
        self.points
            .windows(2)
            .map(|w| system.connect(&system.step(&w[0]), &w[1]))
            .collect()
    }

    /// Per-step gaps `d(h(x_j), g_j⁻¹ x_{j+1})`, always recomputed.
    pub fn gaps<S: ProductHyperbolicSystem<Fiber = F>>(&self, system: &S) -> Vec<f64> {
        self.points
            .windows(2)
            .zip(self.decks(system))
            .map(|(w, g)| system.dist(&system.step(&w[0]), &system.deck_inv(&g, &w[1])))
            .collect()
    }

    /// `L = max_j d(h(x_j), x_{j+1})` up to decks.
    pub fn gap<S: ProductHyperbolicSystem<Fiber = F>>(&self, system: &S) -> f64 {
        self.gaps(system).into_iter().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowResult<F> {
    pub point: OmegaPoint<F>,
    pub achieved_sup: f64,
    /// Telescoping terms needed before both increments fell below `tol`.
    pub iterations: usize,
    pub converged: bool,
    pub gap: f64,
    /// `L·(1/(μ-1) + c/(1-λ))`.
    pub bound: f64,
    /// Distance `d(w_j, x_j)` along the shadowing orbit, `j = -J..=J`.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub orbit: Vec<OmegaPoint<F>>,
}

/// Shadows a pseudo-orbit.
///
/// The base coordinate is the limit of the pulled-back bases
/// `π₁(h^{-j} x_j)` and the fiber coordinate the limit of the pushed-forward
/// fibers `π₂(hʲ x_{-j})`, both taken over the whole window. The fiber
/// recursion runs over the base of the shadow itself, so the returned orbit
/// is an exact twisted orbit even for skew products.
pub fn shadow<S: ProductHyperbolicSystem>(
    system: &S,
    pseudo: &PseudoOrbit<S::Fiber>,
    tol: f64,
) -> Result<ShadowResult<S::Fiber>> {
    let rates = system.rates();
    rates.validate()?;
    let jw = pseudo.half_width();
    let pts = pseudo.points();
    let n = pts.len();
    let decks = pseudo.decks(system);
    let gap = pseudo.gap(system);

    let pull = |i: usize| -> Vec<f64> {
        let mut y = pts[i].base.clone();
        for m in (jw..i).rev() {
            y = system.base_step_inv(&system.deck_inv(&decks[m], &OmegaPoint::new(y, pts[m + 1].fiber.clone())).base);
        }
        y
    };
    let mut bases = vec![Vec::new(); n];
    bases[n - 1] = pts[n - 1].base.clone();
    for m in (0..n - 1).rev() {
        let moved = system.deck_inv(&decks[m], &OmegaPoint::new(bases[m + 1].clone(), pts[m + 1].fiber.clone()));
        bases[m] = system.base_step_inv(&moved.base);
    }

    let push = |i: usize| -> S::Fiber {
        let mut w = OmegaPoint::new(bases[jw - i].clone(), pts[jw - i].fiber.clone());
        for m in jw - i..jw {
            w = system.deck(&decks[m], &system.step(&w));
            w.base = bases[m + 1].clone();
        }
        w.fiber
    };
    let mut orbit = Vec::with_capacity(n);
    orbit.push(OmegaPoint::new(bases[0].clone(), pts[0].fiber.clone()));
    for m in 0..n - 1 {
        let mut w = system.deck(&decks[m], &system.step(&orbit[m]));
        w.base = bases[m + 1].clone();
        orbit.push(w);
    }

    let mut base_done = None;
    let mut prev = pull(jw);
    for i in 0..jw {
        let next = pull(jw + i + 1);
        if system.base_dist(&prev, &next) < tol {
            base_done = Some(i + 1);
            break;
        }
        prev = next;
    }
    let mut fiber_done = None;
    let mut prev = push(0);
    for i in 0..jw {
        let next = push(i + 1);
        if system.fiber_dist(&bases[jw], &prev, &next) < tol {
            fiber_done = Some(i + 1);
            break;
        }
        prev = next;
    }
    let (converged, iterations) = match (base_done, fiber_done) {
        (Some(a), Some(b)) => (true, a.max(b)),
        _ => (jw == 0 && gap < tol, jw),
    };

    let residuals: Vec<f64> = orbit.iter().zip(pts).map(|(w, x)| system.dist(w, x)).collect();
    Ok(ShadowResult {
        point: orbit[jw].clone(),
        achieved_sup: residuals.iter().copied().fold(0.0, f64::max),
        iterations,
        converged,
        gap,
        bound: rates.shadow_bound(gap),
        residuals,
        orbit,
    })
}

/// Shadows many pseudo-orbits in parallel.
pub fn shadow_many<S: ProductHyperbolicSystem>(
    system: &S,
    pseudos: &[PseudoOrbit<S::Fiber>],
    tol: f64,
) -> Result<Vec<ShadowResult<S::Fiber>>> {
    pseudos.par_iter().map(|p| shadow(system, p, tol)).collect()
}

/// `sup_{|j| ≤ J} d(w_j, x_j)` for the twisted orbit `w` of `candidate`.
///
/// Iterates the system honestly in both directions, so backward fiber
/// rounding errors grow like `λ^{-J}`.
pub fn verify_shadow<S: ProductHyperbolicSystem>(
    system: &S,
    pseudo: &PseudoOrbit<S::Fiber>,
    candidate: &OmegaPoint<S::Fiber>,
) -> f64 {
    let jw = pseudo.half_width();
    let pts = pseudo.points();
    let decks = pseudo.decks(system);
    let mut sup = system.dist(candidate, &pts[jw]);
    let mut w = candidate.clone();
    for m in jw..pts.len() - 1 {
        w = system.deck(&decks[m], &system.step(&w));
        sup = sup.max(system.dist(&w, &pts[m + 1]));
    }
    let mut w = candidate.clone();
    for m in (0..jw).rev() {
        w = system.step_inv(&system.deck_inv(&decks[m], &w));
        sup = sup.max(system.dist(&w, &pts[m]));
    }
    sup
}

/// `ε_N = cKλᴺ + μ^{-N}C`: two points whose orbits stay `C`-close for
/// `|j| ≤ N` are `ε_N`-close.
pub fn uniqueness_epsilon(big_c: f64, c: f64, k: f64, lambda: f64, mu: f64, n: u32) -> Result<f64> {
    Rates { mu, c, lambda }.validate()?;
    if !(big_c >= 0.0 && big_c.is_finite()) || !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidRates(format!("C = {big_c} and K = {k} must be finite and non-negative")));
    }
    let n = n as i32;
    Ok(c * k * lambda.powi(n) + big_c * mu.powi(n).recip())
}

/// The holonomy constant `K` for `C`, from the system's explicit fiber geometry.
pub fn holonomy_bound<S: ProductHyperbolicSystem>(system: &S, c: f64) -> Result<f64> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C = {c} must be finite and non-negative")));
    }
    system.holonomy_bound(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_closed_form() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (lambda, mu) = (phi.powi(-2), phi.powi(2));
        let eps = uniqueness_epsilon(1.0, 1.0, 1.0, lambda, mu, 10).unwrap();
        // both terms equal φ^{-20}
        assert!((eps - 2.0 * phi.powi(-20)).abs() < 1e-15);
        assert!((eps - 1.3221e-4).abs() < 1e-8);
        assert_eq!(uniqueness_epsilon(3.0, 2.0, 5.0, 0.3, 4.0, 0).unwrap(), 2.0 * 5.0 + 3.0);
        assert!(uniqueness_epsilon(1.0, 1.0, 1.0, 1e-12, 1e12, 3).unwrap() < 1e-30);
    }

    #[test]
    fn epsilon_rejects_bad_rates() {
        assert!(matches!(uniqueness_epsilon(1.0, 1.0, 1.0, 0.5, 1.0, 3), Err(Error::InvalidRates(_))));
        assert!(matches!(uniqueness_epsilon(1.0, 1.0, 1.0, 1.0, 2.0, 3), Err(Error::InvalidRates(_))));
        assert!(matches!(uniqueness_epsilon(1.0, 0.0, 1.0, 0.5, 2.0, 3), Err(Error::InvalidRates(_))));
        assert!(uniqueness_epsilon(-1.0, 1.0, 1.0, 0.5, 2.0, 3).is_err());
    }

    #[test]
    fn even_length_rejected() {
        let pts = vec![OmegaPoint::new(vec![0.0], ()); 4];
        assert!(PseudoOrbit::new(pts).is_err());
    }
}
