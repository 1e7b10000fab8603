//! Conjugacies built by shadowing: the Smale solid-torus attractor against
//! the dyadic solenoid shift, and perturbed hyperbolic toral automorphisms
//! against their linear models.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{l2, splitting, HyperbolicSplitting, IntMatrix};
use crate::rational::{to_f64, TorusPoint};
use crate::shadowing::{OmegaPoint, ProductHyperbolicSystem, Rates};
use crate::solenoid::SolenoidPoint;

/// `f(t, z) = (2t mod 1, λ_c z + c_off e^{2πit})` on `S¹ × D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmaleSystem {
    pub lambda_c: f64,
    pub c_off: f64,
}

impl Default for SmaleSystem {
    fn default() -> Self {
        SmaleSystem {
            lambda_c: 0.25,
            c_off: 0.5,
        }
    }
}

/// Slack on `|z| ≤ 1` for points produced in floating point.
const DISK_SLACK: f64 = 1e-12;

impl SmaleSystem {
    /// Requires `0 < λ_c < 1/2`, `λ_c + c_off ≤ 1` (the disk maps into
    /// itself) and `λ_c < c_off` (antipodal image disks are disjoint).
    pub fn new(lambda_c: f64, c_off: f64) -> Result<Self> {
        if !(lambda_c > 0.0 && lambda_c < 0.5) {
            return Err(Error::InvalidParameter(format!("lambda_c = {lambda_c} must lie in (0, 1/2)")));
        }
        if !(c_off > lambda_c && lambda_c + c_off <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "c_off = {c_off} must satisfy lambda_c < c_off <= 1 - lambda_c"
            )));
        }
        Ok(SmaleSystem { lambda_c, c_off })
    }

    fn forcing(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.c_off, TAU * t)
    }

    pub fn step(&self, t: f64, z: Complex64) -> Result<(f64, Complex64)> {
        if z.norm() > 1.0 + DISK_SLACK {
            return Err(Error::OutsideSolidTorus(z.norm()));
        }
        Ok(((2.0 * t).rem_euclid(1.0), self.lambda_c * z + self.forcing(t)))
    }

    /// Jacobian in real coordinates `(t, Re z, Im z)`.
    pub fn tangent(&self, t: f64, z: Complex64) -> Result<[[f64; 3]; 3]> {
        if z.norm() > 1.0 + DISK_SLACK {
            return Err(Error::OutsideSolidTorus(z.norm()));
        }
        let (s, c) = (TAU * t).sin_cos();
        let l = self.lambda_c;
        Ok([
            [2.0, 0.0, 0.0],
            [-TAU * self.c_off * s, l, 0.0],
            [TAU * self.c_off * c, 0.0, l],
        ])
    }

    /// The fixed point of `fᵖ` over `angles[0]`, where `angles` lists the
    /// forward angle orbit `t, 2t, …, 2^{p-1}t`.
    pub fn periodic_point(&self, angles: &[f64]) -> (f64, Complex64) {
        let p = angles.len() as i32;
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in angles {
            acc = self.lambda_c * acc + self.forcing(t);
        }
        (angles[0], acc / (1.0 - self.lambda_c.powi(p)))
    }
}

pub fn smale_step(system: &SmaleSystem, t: f64, z: Complex64) -> Result<(f64, Complex64)> {
    system.step(t, z)
}

pub fn smale_tangent(system: &SmaleSystem, t: f64, z: Complex64) -> Result<[[f64; 3]; 3]> {
    system.tangent(t, z)
}

/// The lift of `f` to `ℝ × D`, with integer translations of the angle as decks.
impl ProductHyperbolicSystem for SmaleSystem {
    type Fiber = Complex64;
    type Deck = i64;

    fn expanding_dim(&self) -> usize {
        1
    }

    fn rates(&self) -> Rates {
        Rates {
            mu: 2.0,
            c: 1.0,
            lambda: self.lambda_c,
        }
    }

    fn base_step(&self, y: &[f64]) -> Vec<f64> {
        vec![2.0 * y[0]]
    }

    fn base_step_inv(&self, y: &[f64]) -> Vec<f64> {
        vec![0.5 * y[0]]
    }

    fn fiber_step(&self, base: &[f64], z: &Complex64) -> Complex64 {
        self.lambda_c * z + self.forcing(base[0])
    }

    fn fiber_step_inv(&self, base: &[f64], z: &Complex64) -> Complex64 {
        (z - self.forcing(base[0])) / self.lambda_c
    }

    fn fiber_dist(&self, _base: &[f64], a: &Complex64, b: &Complex64) -> f64 {
        (a - b).norm()
    }

    fn connect(&self, from: &OmegaPoint<Complex64>, to: &OmegaPoint<Complex64>) -> i64 {
        (to.base[0] - from.base[0]).round() as i64
    }

    fn deck(&self, g: &i64, x: &OmegaPoint<Complex64>) -> OmegaPoint<Complex64> {
        OmegaPoint::new(vec![x.base[0] + *g as f64], x.fiber)
    }

    fn deck_inv(&self, g: &i64, x: &OmegaPoint<Complex64>) -> OmegaPoint<Complex64> {
        self.deck(&-g, x)
    }

    /// The fiber is the unit disk.
    fn holonomy_bound(&self, c: f64) -> Result<f64> {
        Ok(c.min(2.0))
    }
}

fn require_dyadic(xi: &SolenoidPoint) -> Result<()> {
    if *xi.space().matrix() != IntMatrix::new(vec![vec![2]]).expect("1x1 matrix") {
        return Err(Error::MatrixMismatch);
    }
    Ok(())
}

/// `h(ξ) ≈ fⁿ(ξₙ, 0)`: the image of the disk center over the coordinate at
/// depth `n`. Each step uses the exact angle `ξ_m`, so the only error is the
/// fiber contraction, at most `2λ_cⁿ`.
pub fn solenoid_to_attractor(system: &SmaleSystem, xi: &SolenoidPoint, depth: usize) -> Result<(f64, Complex64)> {
    require_dyadic(xi)?;
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let angles: Vec<f64> = xi.coordinates(depth + 1).iter().map(|c| to_f64(&c.coords()[0])).collect();
    let mut z = Complex64::new(0.0, 0.0);
    for m in (1..=depth).rev() {
        z = system.lambda_c * z + system.forcing(angles[m]);
    }
    Ok((angles[0], z))
}

/// The pseudo-orbit of disk centers over the coordinates of `ξ`:
/// `x_{-j} = (ξ_j, 0)` and `x_j = (2ʲξ₀ mod 1, 0)`.
pub fn smale_pseudo_orbit(xi: &SolenoidPoint, half_width: usize) -> Result<crate::shadowing::PseudoOrbit<Complex64>> {
    require_dyadic(xi)?;
    let center = Complex64::new(0.0, 0.0);
    let back = xi.coordinates(half_width + 1);
    let mut pts: Vec<OmegaPoint<Complex64>> = back
        .iter()
        .rev()
        .map(|c| OmegaPoint::new(vec![to_f64(&c.coords()[0])], center))
        .collect();
    let mut forward = xi.shift();
    for _ in 0..half_width {
        pts.push(OmegaPoint::new(vec![to_f64(&forward.coordinate(0).coords()[0])], center));
        forward = forward.shift();
    }
    crate::shadowing::PseudoOrbit::new(pts)
}

/// A periodic `p: ℝᵏ → ℝᵏ` (period `ℤᵏ`) perturbing a toral automorphism.
pub trait Perturbation: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    fn sup_norm(&self) -> f64;
    fn lipschitz(&self) -> f64;
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZeroPerturbation {
    pub k: usize,
}

impl Perturbation for ZeroPerturbation {
    fn dim(&self) -> usize {
        self.k
    }

    fn eval(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.k]
    }

    fn sup_norm(&self) -> f64 {
        0.0
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `p(x)_target = ε sin(2π x_source) / 2π`, all other components zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SinePerturbation {
    pub k: usize,
    pub eps: f64,
    pub target: usize,
    pub source: usize,
}

impl SinePerturbation {
    /// The planar example `ε (sin 2πy, 0) / 2π`.
    pub fn planar(eps: f64) -> Self {
        SinePerturbation {
            k: 2,
            eps,
            target: 0,
            source: 1,
        }
    }
}

impl Perturbation for SinePerturbation {
    fn dim(&self) -> usize {
        self.k
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        out[self.target] = self.eps * (TAU * x[self.source]).sin() / TAU;
        out
    }

    fn sup_norm(&self) -> f64 {
        self.eps.abs() / TAU
    }

    fn lipschitz(&self) -> f64 {
        self.eps.abs()
    }
}

/// `g = A + p` on `𝕋ᵏ`.
#[derive(Clone, Debug)]
pub struct PerturbedToralMap<P> {
    pub matrix: IntMatrix,
    pub perturbation: P,
}

impl<P: Perturbation> PerturbedToralMap<P> {
    pub fn new(matrix: IntMatrix, perturbation: P) -> Result<Self> {
        if perturbation.dim() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                got: perturbation.dim(),
            });
        }
        Ok(PerturbedToralMap { matrix, perturbation })
    }

    /// `g(x)` reduced to `[0, 1)ᵏ`.
    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.matrix.mul_f64(x);
        let p = self.perturbation.eval(x);
        ax.iter().zip(&p).map(|(a, b)| (a + b).rem_euclid(1.0)).collect()
    }
}

/// Distance on `𝕋ᵏ` between representatives.
pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t - t.round()
        })
        .collect();
    l2(&d)
}

/// Iteration cap for the sequence-space contraction.
const MAX_SWEEPS: usize = 500;

/// Data of the shadowing fixed point behind [`perturbed_anosov_conjugacy`].
#[derive(Clone, Debug, Serialize)]
pub struct ToralShadow {
    /// `h(x) ∈ [0, 1)ᵏ`.
    pub point: Vec<f64>,
    /// `h(x) - x` in the lift, i.e. the displacement at index 0.
    pub displacement: Vec<f64>,
    /// `sup_j |w_j|` over the window.
    pub sup_displacement: f64,
    pub sweeps: usize,
    /// Contraction factor of the sequence-space map.
    pub contraction: f64,
}

/// The largest `Lip(p)` for which the shadowing map on sequences contracts:
/// `1 / (κ · (1/(μ-1) + 1/(1-λ)))`, with `κ` the distortion between the
/// ambient norm and the adapted norm `|w⁺| + |w⁻|`.
pub fn admissible_lipschitz(a: &IntMatrix) -> Result<f64> {
    let split = splitting(a)?;
    let rates = Rates {
        mu: split.mu,
        c: 1.0,
        lambda: split.lambda,
    };
    rates.validate()?;
    admissible_lipschitz_with(&split, &rates)
}

fn admissible_lipschitz_with(split: &HyperbolicSplitting, rates: &Rates) -> Result<f64> {
    let (k, kp, km) = (split.dim(), split.dim_plus(), split.dim_minus());
    let p_inv = DMatrix::from_fn(k, k, |i, j| {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        let (pl, mi) = split.coords(&e);
        pl.into_iter().chain(mi).nth(i).unwrap_or(0.0)
    });
    let basis = p_inv.clone().try_inverse().ok_or(Error::Singular)?;
    let op = |m: DMatrix<f64>| if m.is_empty() { 0.0 } else { m.singular_values().max() };
    let kappa = (op(p_inv.rows(0, kp).into_owned()) + op(p_inv.rows(kp, km).into_owned()))
        * op(basis.columns(0, kp).into_owned()).max(op(basis.columns(kp, km).into_owned()));
    let budget = 1.0 / (rates.mu - 1.0) + 1.0 / (1.0 - rates.lambda);
    Ok(1.0 / (kappa * budget))
}

/// `h(x)`: the `g`-orbit that shadows the exact `A`-orbit `{Aʲx : |j| ≤ J}`,
/// so that `h ∘ A = g ∘ h`.
///
/// Writing the shadow as `Aʲx + w_j` in the lift, `w` solves
/// `w_{j+1} = A w_j + p(Aʲx + w_j)`. The `E⁺` part is solved backward and the
/// `E⁻` part forward, as in the shadowing engine, and the resulting map on
/// sequences is a contraction when `Lip(p)` fits the rate budget.
pub fn perturbed_anosov_conjugacy<P: Perturbation>(
    g: &PerturbedToralMap<P>,
    x: &TorusPoint,
    half_width: usize,
    tol: f64,
) -> Result<ToralShadow> {
    let a = &g.matrix;
    let k = a.dim();
    if x.dim() != k {
        return Err(Error::DimensionMismatch { expected: k, got: x.dim() });
    }
    if !a.is_unimodular() {
        return Err(Error::InvalidParameter(
            "a toral automorphism needs |det A| = 1".into(),
        ));
    }
    let split = splitting(a)?;
    let (kp, km) = (split.dim_plus(), split.dim_minus());
    let rates = Rates {
        mu: split.mu,
        c: 1.0,
        lambda: split.lambda,
    };
    rates.validate()?;

    let lip = g.perturbation.lipschitz();
    let required = admissible_lipschitz_with(&split, &rates)?;
    let contraction = lip / required;
    if contraction >= 1.0 {
        return Err(Error::PerturbationTooLarge { lipschitz: lip, required });
    }

    // Exact A-orbit on the torus and nearest-integer lifts.
    let inv = a.inverse()?;
    let n = 2 * half_width + 1;
    let mut orbit = vec![x.clone(); n];
    for i in half_width + 1..n {
        orbit[i] = a.apply_torus(&orbit[i - 1]);
    }
    for i in (0..half_width).rev() {
        orbit[i] = TorusPoint::new(inv.mul_vec(orbit[i + 1].coords()));
    }
    let lifts: Vec<Vec<f64>> = orbit.iter().map(|t| t.to_f64()).collect();

    let bp = split.block_plus().clone();
    let bm = split.block_minus().clone();
    let bp_inv = bp.clone().try_inverse().ok_or(Error::Singular)?;
    let mut w: Vec<DVector<f64>> = vec![DVector::zeros(k); n];
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let forcing: Vec<DVector<f64>> = (0..n - 1)
            .map(|j| {
                let y: Vec<f64> = lifts[j].iter().zip(w[j].iter()).map(|(a, b)| a + b).collect();
                let (pl, mi) = split.coords(&g.perturbation.eval(&y));
                DVector::from_vec(pl.into_iter().chain(mi).collect())
            })
            .collect();
        let mut plus = vec![DVector::<f64>::zeros(kp); n];
        for j in (0..n - 1).rev() {
            let f = forcing[j].rows(0, kp).into_owned();
            plus[j] = &bp_inv * (&plus[j + 1] - f);
        }
        let mut minus = vec![DVector::<f64>::zeros(km); n];
        for j in 0..n - 1 {
            let f = forcing[j].rows(kp, km).into_owned();
            minus[j + 1] = &bm * &minus[j] + f;
        }
        let next: Vec<DVector<f64>> = (0..n)
            .map(|j| {
                let adapted: Vec<f64> = plus[j].iter().chain(minus[j].iter()).copied().collect();
                DVector::from_vec(split.from_coords(&adapted[..kp], &adapted[kp..]))
            })
            .collect();
        let change = next
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        w = next;
        // a posteriori: the distance to the fixed point is at most q/(1-q) times the last change
        if change * contraction / (1.0 - contraction) < tol.max(f64::EPSILON) || change == 0.0 {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::Divergence { iterate: sweeps });
        }
    }

    let displacement: Vec<f64> = w[half_width].iter().copied().collect();
    let point: Vec<f64> = lifts[half_width]
        .iter()
        .zip(&displacement)
        .map(|(a, b)| (a + b).rem_euclid(1.0))
        .collect();
    Ok(ToralShadow {
        point,
        displacement,
        sup_displacement: w.iter().map(|v| v.norm()).fold(0.0, f64::max),
        sweeps,
        contraction,
    })
}

/// A map `h` from a model system to a concrete one, with `h ∘ σ = f ∘ h`.
pub trait Conjugacy: Sync {
    type Source: Clone + Send + Sync;
    type Target: Clone + Send + Sync;

    fn name(&self) -> String;
    fn eval(&self, x: &Self::Source) -> Result<Self::Target>;
    fn source_step(&self, x: &Self::Source) -> Self::Source;
    fn target_step(&self, y: &Self::Target) -> Result<Self::Target>;
    fn source_dist(&self, a: &Self::Source, b: &Self::Source) -> f64;
    fn target_dist(&self, a: &Self::Target, b: &Self::Target) -> f64;
    /// Error bound the construction itself guarantees.
    fn declared_tolerance(&self) -> f64;
}

/// `ξ ↦ lim fⁿ(ξₙ, 0)`, evaluated at a fixed depth.
#[derive(Clone, Debug)]
pub struct SmaleConjugacy {
    pub system: SmaleSystem,
    pub depth: usize,
}

/// Depth used for the source metric `max_j 2^{-j} |ξ_j - η_j|`.
const CHAIN_METRIC_DEPTH: usize = 24;

impl Conjugacy for SmaleConjugacy {
    type Source = SolenoidPoint;
    type Target = (f64, Complex64);

    fn name(&self) -> String {
        format!("smale solid torus <- dyadic solenoid (depth {})", self.depth)
    }

    fn eval(&self, x: &SolenoidPoint) -> Result<(f64, Complex64)> {
        solenoid_to_attractor(&self.system, x, self.depth)
    }

    fn source_step(&self, x: &SolenoidPoint) -> SolenoidPoint {
        x.shift()
    }

    fn target_step(&self, y: &(f64, Complex64)) -> Result<(f64, Complex64)> {
        self.system.step(y.0, y.1)
    }

    fn source_dist(&self, a: &SolenoidPoint, b: &SolenoidPoint) -> f64 {
        let (ca, cb) = (a.coordinates(CHAIN_METRIC_DEPTH), b.coordinates(CHAIN_METRIC_DEPTH));
        ca.iter()
            .zip(&cb)
            .enumerate()
            .map(|(j, (p, q))| torus_dist(&p.to_f64(), &q.to_f64()) / 2f64.powi(j as i32))
            .fold(0.0, f64::max)
    }

    fn target_dist(&self, a: &(f64, Complex64), b: &(f64, Complex64)) -> f64 {
        torus_dist(&[a.0], &[b.0]) + (a.1 - b.1).norm()
    }

    fn declared_tolerance(&self) -> f64 {
        2.0 * self.system.lambda_c.powi(self.depth as i32)
    }
}

/// `x ↦ h(x)` for a perturbed toral automorphism, by shadowing.
#[derive(Clone, Debug)]
pub struct ToralConjugacy<P> {
    pub map: PerturbedToralMap<P>,
    pub half_width: usize,
    pub tol: f64,
}

impl<P: Perturbation + Clone + Send> Conjugacy for ToralConjugacy<P> {
    type Source = TorusPoint;
    type Target = Vec<f64>;

    fn name(&self) -> String {
        format!("perturbed toral map <- linear model (J = {})", self.half_width)
    }

    fn eval(&self, x: &TorusPoint) -> Result<Vec<f64>> {
        Ok(perturbed_anosov_conjugacy(&self.map, x, self.half_width, self.tol)?.point)
    }

    fn source_step(&self, x: &TorusPoint) -> TorusPoint {
        self.map.matrix.apply_torus(x)
    }

    fn target_step(&self, y: &Vec<f64>) -> Result<Vec<f64>> {
        Ok(self.map.step(y))
    }

    fn source_dist(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        torus_dist(&a.to_f64(), &b.to_f64())
    }

    fn target_dist(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        torus_dist(a, b)
    }

    fn declared_tolerance(&self) -> f64 {
        self.tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub name: String,
    pub samples: usize,
    pub tolerance: f64,
    pub declared_tolerance: f64,
    /// `max d(h(σx), f(h(x)))` over the samples.
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Smallest image distance over sample pairs with distinct sources.
    pub min_image_distance: f64,
    /// Smallest ratio of image distance to source distance.
    pub min_distance_ratio: f64,
    pub passed: bool,
    pub injective_on_samples: bool,
}

/// Checks the intertwining relation on `samples` and an injectivity proxy.
pub fn verify_conjugacy<H: Conjugacy>(h: &H, samples: &[H::Source], tol: f64) -> Result<ConjugacyReport> {
    let evaluated: Vec<(H::Target, f64)> = samples
        .par_iter()
        .map(|x| {
            let hx = h.eval(x)?;
            let lhs = h.eval(&h.source_step(x))?;
            let rhs = h.target_step(&hx)?;
            Ok((hx, h.target_dist(&lhs, &rhs)))
        })
        .collect::<Result<_>>()?;
    let residuals: Vec<f64> = evaluated.iter().map(|e| e.1).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let mean_residual = if residuals.is_empty() {
        0.0
    } else {
        residuals.iter().sum::<f64>() / residuals.len() as f64
    };
    let pairs: Vec<(f64, f64)> = (0..samples.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let evaluated = &evaluated;
            (i + 1..samples.len()).filter_map(move |j| {
                let ds = h.source_dist(&samples[i], &samples[j]);
                (ds > 0.0).then(|| (h.target_dist(&evaluated[i].0, &evaluated[j].0), ds))
            })
        })
        .collect();
    let min_image_distance = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let min_distance_ratio = pairs.iter().map(|p| p.0 / p.1).fold(f64::INFINITY, f64::min);
    Ok(ConjugacyReport {
        name: h.name(),
        samples: samples.len(),
        tolerance: tol,
        declared_tolerance: h.declared_tolerance(),
        max_residual,
        mean_residual,
        min_image_distance,
        min_distance_ratio,
        passed: max_residual <= tol,
        injective_on_samples: min_image_distance > 0.0,
    })
}
