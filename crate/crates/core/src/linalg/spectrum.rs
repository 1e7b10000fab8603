use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{self, Poly};
use super::IntMatrix;
use crate::error::{Error, Result};
use crate::rational::int;

/// Eigenvalue moduli within this distance of 1 are treated as non-hyperbolic.
pub const HYPERBOLICITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub is_hyperbolic: bool,
    pub det: i64,
    /// Moduli of all eigenvalues (with multiplicity), descending.
    pub eigen_moduli: Vec<f64>,
}

/// An eigenvalue together with its algebraic multiplicity.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Eigen {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Eigenvalues of `a` from its exact characteristic polynomial.
///
/// Real roots are isolated with Sturm sequences and refined by exact bisection;
/// non-real roots come from Aberth iteration on each square-free factor.
pub(crate) fn eigenvalues(a: &IntMatrix) -> Vec<Eigen> {
    let cp = poly::from_ints(&a.charpoly());
    let mut out = Vec::new();
    for (i, factor) in poly::squarefree_decomposition(&cp).iter().enumerate() {
        let multiplicity = i + 1;
        let degree = poly::degree(factor);
        if degree == 0 {
            continue;
        }
        let reals = poly::real_roots(factor, 1e-18);
        for r in &reals {
            out.push(Eigen {
                value: Complex64::new(*r, 0.0),
                multiplicity,
            });
        }
        if degree > reals.len() {
            let mut roots = polish(factor, poly::complex_roots(factor));
            roots.sort_by(|x, y| y.im.abs().partial_cmp(&x.im.abs()).unwrap());
            for z in roots.into_iter().take(degree - reals.len()) {
                out.push(Eigen {
                    value: z,
                    multiplicity,
                });
            }
        }
    }
    out
}

fn polish(p: &Poly, roots: Vec<Complex64>) -> Vec<Complex64> {
    let c: Vec<f64> = p.iter().map(crate::rational::to_f64).collect();
    roots
        .into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let (mut val, mut der) = (Complex64::zero(), Complex64::zero());
                for coef in c.iter().rev() {
                    der = der * z + val;
                    val = val * z + coef;
                }
                if der.norm() == 0.0 {
                    break;
                }
                let step = val / der;
                if !step.is_finite() {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect()
}

pub(crate) fn moduli(a: &IntMatrix) -> Vec<f64> {
    let mut m: Vec<f64> = eigenvalues(a)
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.value.norm(), e.multiplicity))
        .collect();
    m.sort_by(|x, y| y.partial_cmp(x).unwrap());
    m
}

pub fn check_hyperbolic(a: &IntMatrix) -> Result<HyperbolicityReport> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let cp = poly::from_ints(&a.charpoly());
    // Roots at ±1 are detected exactly; the tolerance only handles complex pairs.
    let unit_root = poly::eval(&cp, &int(1)).is_zero() || poly::eval(&cp, &int(-1)).is_zero();
    let eigen_moduli = moduli(a);
    let is_hyperbolic =
        !unit_root && eigen_moduli.iter().all(|m| (m - 1.0).abs() > HYPERBOLICITY_TOLERANCE);
    Ok(HyperbolicityReport {
        is_hyperbolic,
        det: det.to_i64().unwrap_or(i64::MAX),
        eigen_moduli,
    })
}

pub(crate) fn require_hyperbolic(a: &IntMatrix) -> Result<HyperbolicityReport> {
    let report = check_hyperbolic(a)?;
    if !report.is_hyperbolic {
        let worst = report
            .eigen_moduli
            .iter()
            .copied()
            .min_by(|x, y| (x - 1.0).abs().partial_cmp(&(y - 1.0).abs()).unwrap())
            .unwrap_or(1.0);
        return Err(Error::NotHyperbolic {
            modulus: worst,
            tolerance: HYPERBOLICITY_TOLERANCE,
        });
    }
    Ok(report)
}

/// Topological entropy `Σ log|λ|` over the expanding eigenvalues.
pub fn toral_entropy(a: &IntMatrix) -> Result<f64> {
    require_hyperbolic(a)?;
    Ok(eigenvalues(a)
        .iter()
        .filter(|e| e.value.norm() > 1.0)
        .map(|e| e.value.norm().ln() * e.multiplicity as f64)
        .sum())
}

/// Whether the characteristic polynomial has a non-constant monic integer
/// factor with constant term ±1.
///
/// When none exists, `⋂ Aʲℤᵏ = 0` and the θ action on the solenoid is free.
pub fn unimodular_factor(a: &IntMatrix) -> bool {
    let roots: Vec<Complex64> = eigenvalues(a)
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
        .collect();
    let cp = poly::from_ints(&a.charpoly());
    let n = roots.len();
    for mask in 1u64..(1u64 << n) {
        let subset: Vec<Complex64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| roots[i]).collect();
        let product: Complex64 = subset.iter().product();
        if (product.norm() - 1.0).abs() > 1e-6 {
            continue;
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &subset {
            let mut next = vec![Complex64::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        if coeffs
            .iter()
            .any(|c| c.im.abs() > 1e-6 || (c.re - c.re.round()).abs() > 1e-6)
        {
            continue;
        }
        let factor: Poly = coeffs
            .iter()
            .map(|c| int(c.re.round() as i64))
            .collect();
        if factor[0].abs() != int(1) {
            continue;
        }
        let (_, rem) = poly::divrem(&cp, &factor);
        if rem.iter().all(Zero::is_zero) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::new(rows).unwrap()
    }

    #[test]
    fn cat_map_is_hyperbolic() {
        let r = check_hyperbolic(&m(vec![vec![2, 1], vec![1, 1]])).unwrap();
        assert!(r.is_hyperbolic);
        assert_eq!(r.det, 1);
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((r.eigen_moduli[0] - phi2).abs() < 1e-14);
        assert!((r.eigen_moduli[1] - 1.0 / phi2).abs() < 1e-14);
    }

    #[test]
    fn identity_is_not_hyperbolic() {
        let r = check_hyperbolic(&IntMatrix::identity(2)).unwrap();
        assert!(!r.is_hyperbolic);
        assert_eq!(r.eigen_moduli, vec![1.0, 1.0]);
        assert!(toral_entropy(&IntMatrix::identity(2)).is_err());
    }

    #[test]
    fn rotation_is_not_hyperbolic() {
        // eigenvalues ±i, detected through the modulus tolerance
        let r = check_hyperbolic(&m(vec![vec![0, -1], vec![1, 0]])).unwrap();
        assert!(!r.is_hyperbolic);
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(
            check_hyperbolic(&m(vec![vec![1, 2], vec![2, 4]])),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn entropy_values() {
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let h = toral_entropy(&m(vec![vec![2, 1], vec![1, 1]])).unwrap();
        assert!((h - golden).abs() < 1e-13);
        assert!((h - 0.962424).abs() < 1e-6);
        let h2 = toral_entropy(&m(vec![vec![0, 1], vec![-1, 3]])).unwrap();
        assert!((h2 - golden).abs() < 1e-13);
        let h1 = toral_entropy(&m(vec![vec![2]])).unwrap();
        assert!((h1 - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn repeated_eigenvalues_counted_with_multiplicity() {
        let a = m(vec![vec![2, 1], vec![0, 2]]);
        let r = check_hyperbolic(&a).unwrap();
        assert_eq!(r.eigen_moduli, vec![2.0, 2.0]);
        assert!((toral_entropy(&a).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn unimodular_factor_detection() {
        assert!(!unimodular_factor(&m(vec![vec![2]])));
        assert!(unimodular_factor(&m(vec![vec![2, 1], vec![1, 1]])));
        assert!(!unimodular_factor(&m(vec![vec![2, 0], vec![0, 3]])));
        // cat ⊕ [2]: the cat block is a unimodular factor
        let a = m(vec![vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 2]]);
        assert!(unimodular_factor(&a));
    }
}
