//! Univariate polynomials over ℚ (coefficients low to high) with Sturm-certified
//! real-root isolation, plus an Aberth iteration for the complex roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::rational::{rat, to_f64, Rational};

pub(crate) type Poly = Vec<Rational>;

pub(crate) fn from_ints(c: &[BigInt]) -> Poly {
    trim(c.iter().cloned().map(Rational::from_integer).collect())
}

pub(crate) fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Rational::zero());
    }
    p
}

pub(crate) fn degree(p: &Poly) -> usize {
    p.len() - 1
}

fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

pub(crate) fn eval(p: &Poly, x: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

pub(crate) fn derivative(p: &Poly) -> Poly {
    if p.len() == 1 {
        return vec![Rational::zero()];
    }
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub(crate) fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut rem = trim(a.clone());
    let db = degree(b);
    let lead = b[db].clone();
    if degree(&rem) < db || is_zero_poly(&rem) {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); degree(&rem) - db + 1];
    while !is_zero_poly(&rem) && degree(&rem) >= db {
        let shift = degree(&rem) - db;
        let factor = &rem[degree(&rem)] / &lead;
        for (i, c) in b.iter().enumerate() {
            rem[i + shift] -= c * &factor;
        }
        quot[shift] = factor;
        rem = trim(rem);
        if degree(&rem) == 0 && rem[0].is_zero() {
            break;
        }
    }
    (trim(quot), rem)
}

fn monic(p: Poly) -> Poly {
    let lead = p[degree(&p)].clone();
    p.into_iter().map(|c| c / &lead).collect()
}

pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !is_zero_poly(&y) {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

#[cfg(test)]
pub(crate) fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Square-free decomposition `p = Π qᵢ^i` (Yun). Entry `i-1` holds `qᵢ`.
pub(crate) fn squarefree_decomposition(p: &Poly) -> Vec<Poly> {
    let p = monic(trim(p.clone()));
    let mut factors = Vec::new();
    if degree(&p) == 0 {
        return factors;
    }
    let dp = derivative(&p);
    let mut a = gcd(&p, &dp);
    let mut b = divrem(&p, &a).0;
    let mut c = divrem(&dp, &a).0;
    let mut d = sub(&c, &derivative(&b));
    while degree(&b) > 0 {
        a = gcd(&b, &d);
        factors.push(a.clone());
        b = divrem(&b, &a).0;
        c = divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
    }
    factors
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let zero = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![trim(p.clone()), derivative(p)];
    loop {
        let n = seq.len();
        if is_zero_poly(&seq[n - 1]) {
            seq.pop();
            break;
        }
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|q| {
            let v = eval(q, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots of a square-free polynomial, each refined by exact
/// bisection to an interval of width below `width`.
pub(crate) fn real_roots(p: &Poly, width: f64) -> Vec<f64> {
    let p = trim(p.clone());
    if degree(&p) == 0 {
        return Vec::new();
    }
    let seq = sturm_sequence(&p);
    let lead = p[degree(&p)].abs();
    // Cauchy bound.
    let bound = p[..degree(&p)]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rational::zero(), |acc, x| if x > acc { x } else { acc })
        + Rational::one();
    let count = |x: &Rational| sign_changes(&seq, x);
    let mut roots = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    let tol = rat(1, 1) * Rational::from_float(width).unwrap_or_else(|| rat(1, 1 << 50));
    while let Some((lo, hi)) = stack.pop() {
        let n = count(&lo) - count(&hi);
        if n == 0 {
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        if n == 1 {
            roots.push(refine(&p, lo, hi, &tol));
            continue;
        }
        if eval(&p, &mid).is_zero() {
            roots.push(to_f64(&mid));
            let eps = (&hi - &lo) / Rational::from_integer(BigInt::from(1 << 20));
            stack.push((lo, &mid - &eps));
            stack.push((&mid + &eps, hi));
        } else {
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Bisection on `(lo, hi]` containing exactly one root of the square-free `p`.
fn refine(p: &Poly, mut lo: Rational, mut hi: Rational, tol: &Rational) -> f64 {
    let two = Rational::from_integer(BigInt::from(2));
    if eval(p, &hi).is_zero() {
        return to_f64(&hi);
    }
    let hi_sign = eval(p, &hi).is_positive();
    let scale = lo.abs().max(hi.abs()).max(Rational::one());
    while &hi - &lo > tol * &scale {
        let mid = (&lo + &hi) / &two;
        let v = eval(p, &mid);
        if v.is_zero() {
            return to_f64(&mid);
        }
        if v.is_positive() == hi_sign {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    to_f64(&((lo + hi) / two))
}

/// All complex roots of `p` (with multiplicity) by Aberth–Ehrlich iteration.
pub(crate) fn complex_roots(p: &Poly) -> Vec<Complex64> {
    let p = trim(p.clone());
    let n = degree(&p);
    if n == 0 {
        return Vec::new();
    }
    let coeffs: Vec<f64> = p.iter().map(to_f64).collect();
    let lead = coeffs[n];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();
    let eval_c = |x: Complex64| -> (Complex64, Complex64) {
        let mut val = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for coef in c.iter().rev() {
            der = der * x + val;
            val = val * x + coef;
        }
        (val, der)
    };
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (val, der) = eval_c(z[i]);
            if val.norm() == 0.0 {
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(c: &[i64]) -> Poly {
        c.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn golden_ratio_roots() {
        let roots = real_roots(&p(&[1, -3, 1]), 1e-18);
        let s5 = 5f64.sqrt();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - (3.0 - s5) / 2.0).abs() < 1e-15);
        assert!((roots[1] - (3.0 + s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rational_roots_found_exactly() {
        // (x-2)(x+3)(x-1/2)·2 = 2x³ + 0x² ... use integer form
        let q = mul(&mul(&p(&[-2, 1]), &p(&[3, 1])), &p(&[-1, 2]));
        let roots = real_roots(&q, 1e-18);
        assert_eq!(roots, vec![-3.0, 0.5, 2.0]);
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // (x-1)(x+2)^2
        let q = mul(&p(&[-1, 1]), &mul(&p(&[2, 1]), &p(&[2, 1])));
        let parts = squarefree_decomposition(&q);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], p(&[-1, 1]));
        assert_eq!(parts[1], p(&[2, 1]));
    }

    #[test]
    fn aberth_finds_complex_pair() {
        // x^3 - x - 1: one real root and a complex pair of modulus 1/sqrt(r)
        let roots = complex_roots(&p(&[-1, -1, 0, 1]));
        let real: Vec<_> = roots.iter().filter(|z| z.im.abs() < 1e-9).collect();
        assert_eq!(real.len(), 1);
        let r = real[0].re;
        assert!((r - 1.324_717_957_244_746).abs() < 1e-12);
        for z in roots.iter().filter(|z| z.im.abs() >= 1e-9) {
            assert!((z.norm() - 1.0 / r.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn divrem_identity() {
        let a = p(&[5, 0, -3, 2, 1]);
        let b = p(&[1, 1, 1]);
        let (q, r) = divrem(&a, &b);
        let back = sub(&a, &r);
        assert_eq!(mul(&q, &b), back);
        assert!(degree(&r) < degree(&b));
    }
}
