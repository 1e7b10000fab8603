use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::spectrum::{eigenvalues, require_hyperbolic, Eigen};
use super::IntMatrix;
use crate::error::Result;

/// Eigen-splitting `ℝᵏ = E⁺ ⊕ E⁻` of a hyperbolic integer matrix, with
/// adapted coordinates in which one iterate expands `E⁺` by at least `mu`
/// and contracts `E⁻` by at most `lambda`.
///
/// Adapted coordinates come from the real canonical eigenbasis (unit vectors,
/// `Re`/`Im` parts for complex pairs). Repeated or badly conditioned
/// eigenvalues fall back to a geometric-sum norm.
#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicSplitting {
    pub basis_plus: Vec<Vec<f64>>,
    pub basis_minus: Vec<Vec<f64>>,
    pub mu: f64,
    pub lambda: f64,
    #[serde(skip)]
    p: DMatrix<f64>,
    #[serde(skip)]
    pinv: DMatrix<f64>,
    #[serde(skip)]
    block_plus: DMatrix<f64>,
    #[serde(skip)]
    block_minus: DMatrix<f64>,
}

pub fn splitting(a: &IntMatrix) -> Result<HyperbolicSplitting> {
    require_hyperbolic(a)?;
    let k = a.dim();
    let am = a.to_dmatrix();
    let eig = eigenvalues(a);
    let (plus, minus): (Vec<Eigen>, Vec<Eigen>) = eig.iter().partition(|e| e.value.norm() > 1.0);
    let dim_plus: usize = plus.iter().map(|e| e.multiplicity).sum();

    let q_plus = invariant_subspace(&am, &minus, dim_plus);
    let q_minus = invariant_subspace(&am, &plus, k - dim_plus);
    let v_plus = adapted_basis(&q_plus.transpose() * &am * &q_plus, &plus, true);
    let v_minus = adapted_basis(&q_minus.transpose() * &am * &q_minus, &minus, false);

    let mut p = DMatrix::zeros(k, k);
    if dim_plus > 0 {
        p.columns_mut(0, dim_plus).copy_from(&(&q_plus * &v_plus));
    }
    if dim_plus < k {
        p.columns_mut(dim_plus, k - dim_plus)
            .copy_from(&(&q_minus * &v_minus));
    }
    orient_columns(&mut p);
    let pinv = p
        .clone()
        .try_inverse()
        .expect("E+ and E- are complementary for a hyperbolic matrix");
    let d = &pinv * &am * &p;
    let block_plus = d.view((0, 0), (dim_plus, dim_plus)).into_owned();
    let block_minus = d
        .view((dim_plus, dim_plus), (k - dim_plus, k - dim_plus))
        .into_owned();
    let mu = if dim_plus > 0 {
        extreme_singular_value(&block_plus, false)
    } else {
        f64::INFINITY
    };
    let lambda = if dim_plus < k {
        extreme_singular_value(&block_minus, true)
    } else {
        0.0
    };
    let column = |j: usize| p.column(j).iter().copied().collect::<Vec<f64>>();
    Ok(HyperbolicSplitting {
        basis_plus: (0..dim_plus).map(column).collect(),
        basis_minus: (dim_plus..k).map(column).collect(),
        mu,
        lambda,
        p,
        pinv,
        block_plus,
        block_minus,
    })
}

/// Orthonormal basis of `range(q(A))`, where `q` vanishes on the eigenvalues
/// in `killed`. That range is the invariant subspace of the remaining ones.
fn invariant_subspace(a: &DMatrix<f64>, killed: &[Eigen], dim: usize) -> DMatrix<f64> {
    let k = a.nrows();
    if dim == 0 {
        return DMatrix::zeros(k, 0);
    }
    // Real factors (x - r) and (x² - 2Re(z) x + |z|²).
    let mut q = DMatrix::<f64>::identity(k, k);
    for e in killed {
        for _ in 0..e.multiplicity {
            if e.value.im.abs() < 1e-12 {
                q = (a - DMatrix::identity(k, k) * e.value.re) * q;
            } else if e.value.im > 0.0 {
                let quad = a * a - a * (2.0 * e.value.re)
                    + DMatrix::identity(k, k) * e.value.norm_sqr();
                q = quad * q;
            }
        }
        let scale = q.norm();
        if scale > 0.0 {
            q /= scale;
        }
    }
    let svd = q.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    DMatrix::from_columns(&order[..dim].iter().map(|&i| u.column(i)).collect::<Vec<_>>())
}

/// Change of basis `V` inside an invariant subspace, where `b` is the
/// restricted matrix in orthonormal coordinates.
fn adapted_basis(b: DMatrix<f64>, eig: &[Eigen], expanding: bool) -> DMatrix<f64> {
    let d = b.nrows();
    if d == 0 {
        return DMatrix::zeros(0, 0);
    }
    if eig.iter().all(|e| e.multiplicity == 1) {
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(d);
        for e in eig {
            if e.value.im.abs() < 1e-12 {
                cols.push(real_null_vector(&b, e.value.re));
            } else if e.value.im > 0.0 {
                let (u, v) = complex_null_vector(&b, e.value);
                cols.push(u);
                cols.push(v);
            }
        }
        if cols.len() == d {
            let v = DMatrix::from_columns(&cols);
            let sv = v.singular_values();
            let cond = sv.max() / sv.min();
            if cond.is_finite() && cond < 1e8 {
                return v;
            }
        }
    }
    sum_norm_basis(&b, eig, expanding)
}

fn real_null_vector(b: &DMatrix<f64>, r: f64) -> DVector<f64> {
    let d = b.nrows();
    let m = b - DMatrix::identity(d, d) * r;
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let i = svd.singular_values.imin();
    let v: DVector<f64> = vt.row(i).transpose();
    v.normalize()
}

fn complex_null_vector(b: &DMatrix<f64>, z: Complex64) -> (DVector<f64>, DVector<f64>) {
    let d = b.nrows();
    let m: DMatrix<Complex64> =
        b.map(|x| Complex64::new(x, 0.0)) - DMatrix::<Complex64>::identity(d, d) * z;
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let i = svd.singular_values.imin();
    let mut w: DVector<Complex64> = vt.row(i).adjoint();
    // Rotate the phase so that Re w ⟂ Im w.
    let bilinear: Complex64 = w.iter().map(|c| c * c).sum();
    let phase = Complex64::from_polar(1.0, -bilinear.arg() / 2.0);
    w *= phase;
    let u = w.map(|c| c.re);
    let v = w.map(|c| c.im);
    let scale = (u.norm_squared() + v.norm_squared()).sqrt();
    (u / scale, v / scale)
}

/// Basis `V = L⁻ᵀ` for the norm `|x|² = Σ sⁿ-weighted |B^{∓n} x|²` with
/// Cholesky factor `L`; one step of `B` then moves that norm by at least
/// (expanding) or at most (contracting) the factor `s`.
fn sum_norm_basis(b: &DMatrix<f64>, eig: &[Eigen], expanding: bool) -> DMatrix<f64> {
    let d = b.nrows();
    let moduli = eig.iter().map(|e| e.value.norm());
    let (step, s) = if expanding {
        let min = moduli.fold(f64::INFINITY, f64::min);
        let binv = b.clone().try_inverse().expect("expanding block is invertible");
        (binv, (1.0 + min) / 2.0)
    } else {
        let max = moduli.fold(0.0, f64::max);
        (b.clone(), (1.0 + max) / 2.0)
    };
    let weight = if expanding { s } else { 1.0 / s };
    let mut m = DMatrix::<f64>::identity(d, d);
    let mut power = DMatrix::<f64>::identity(d, d);
    for _ in 0..100_000 {
        power = &step * power * weight;
        let term = power.transpose() * &power;
        m += &term;
        if term.norm() < 1e-17 * m.norm() {
            break;
        }
    }
    let l = m.cholesky().expect("sum norm is positive definite").unpack();
    l.transpose().try_inverse().expect("Cholesky factor is invertible")
}

fn orient_columns(p: &mut DMatrix<f64>) {
    for mut col in p.column_iter_mut() {
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

fn extreme_singular_value(m: &DMatrix<f64>, largest: bool) -> f64 {
    let sv = m.singular_values();
    if largest {
        sv.max()
    } else {
        sv.min()
    }
}

impl HyperbolicSplitting {
    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn dim_plus(&self) -> usize {
        self.basis_plus.len()
    }

    pub fn dim_minus(&self) -> usize {
        self.basis_minus.len()
    }

    /// Adapted coordinates `(a⁺, a⁻)` with `x = P⁺a⁺ + P⁻a⁻`.
    pub fn coords(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let y = &self.pinv * DVector::from_column_slice(x);
        let n = self.dim_plus();
        (y.rows(0, n).iter().copied().collect(), y.rows(n, self.dim() - n).iter().copied().collect())
    }

    pub fn from_coords(&self, plus: &[f64], minus: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = plus.iter().chain(minus).copied().collect();
        (&self.p * DVector::from_vec(y)).iter().copied().collect()
    }

    /// The matrix restricted to `E⁺` in adapted coordinates.
    pub fn block_plus(&self) -> &DMatrix<f64> {
        &self.block_plus
    }

    pub fn block_minus(&self) -> &DMatrix<f64> {
        &self.block_minus
    }

    pub fn norm_plus(&self, x: &[f64]) -> f64 {
        l2(&self.coords(x).0)
    }

    pub fn norm_minus(&self, x: &[f64]) -> f64 {
        l2(&self.coords(x).1)
    }

    /// Unit unstable eigenvector with positive first nonzero component, when `dim E⁺ = 1`.
    pub fn unstable_direction(&self) -> Option<Vec<f64>> {
        (self.dim_plus() == 1).then(|| self.basis_plus[0].clone())
    }

    /// Adapted `E⁻` diameter of the unit cube `[0,1]ᵏ`.
    pub fn cube_diameter_minus(&self) -> f64 {
        let k = self.dim();
        let edges: Vec<Vec<f64>> = (0..k)
            .map(|j| self.coords(&unit(k, j)).1)
            .collect();
        // The diameter of a zonotope is attained between opposite vertices.
        let mut best: f64 = 0.0;
        for mask in 0u64..(1u64 << k) {
            let mut v = vec![0.0; self.dim_minus()];
            for (j, e) in edges.iter().enumerate() {
                let sign = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi += sign * ei;
                }
            }
            best = best.max(l2(&v));
        }
        best
    }
}

fn unit(k: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[j] = 1.0;
    v
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::new(rows).unwrap()
    }

    fn parallel(a: &[f64], b: &[f64]) -> bool {
        let cross = a[0] * b[1] - a[1] * b[0];
        cross.abs() < 1e-12 * l2(a) * l2(b)
    }

    #[test]
    fn cat_map_eigenlines() {
        let s = splitting(&m(vec![vec![2, 1], vec![1, 1]])).unwrap();
        let s5 = 5f64.sqrt();
        assert!(parallel(&s.basis_plus[0], &[1.0, (s5 - 1.0) / 2.0]));
        assert!(parallel(&s.basis_minus[0], &[1.0, -(s5 + 1.0) / 2.0]));
        assert!((s.mu - (3.0 + s5) / 2.0).abs() < 1e-12);
        assert!((s.lambda - (3.0 - s5) / 2.0).abs() < 1e-12);
        assert!((l2(&s.basis_plus[0]) - 1.0).abs() < 1e-14);
        assert!(s.basis_plus[0][0] > 0.0);
    }

    #[test]
    fn expanding_only() {
        let s = splitting(&m(vec![vec![2]])).unwrap();
        assert_eq!(s.dim_plus(), 1);
        assert_eq!(s.dim_minus(), 0);
        assert!((s.mu - 2.0).abs() < 1e-14);
        let d = splitting(&m(vec![vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(d.dim_plus(), 2);
        assert!((d.mu - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_pair_block_is_a_scaled_rotation() {
        let a = m(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        let s = splitting(&a).unwrap();
        assert_eq!((s.dim_plus(), s.dim_minus()), (1, 2));
        let r = 1.324_717_957_244_746_f64;
        assert!((s.mu - r).abs() < 1e-12);
        assert!((s.lambda - 1.0 / r.sqrt()).abs() < 1e-12);
        let sv = s.block_minus().singular_values();
        assert!((sv.max() - sv.min()).abs() < 1e-10);
    }

    #[test]
    fn jordan_block_uses_sum_norm() {
        let a = m(vec![vec![2, 1], vec![0, 2]]);
        let s = splitting(&a).unwrap();
        assert_eq!(s.dim_plus(), 2);
        assert!(s.mu > 1.0 && s.mu <= 2.0);
        let x = [0.3, -0.7];
        let ax = a.mul_f64(&x);
        assert!(s.norm_plus(&ax) >= s.mu * s.norm_plus(&x) - 1e-12);
    }

    #[test]
    fn coords_round_trip() {
        let s = splitting(&m(vec![vec![2, 1], vec![1, 1]])).unwrap();
        let x = [0.25, -1.5];
        let (p, q) = s.coords(&x);
        let back = s.from_coords(&p, &q);
        assert!((back[0] - x[0]).abs() < 1e-14 && (back[1] - x[1]).abs() < 1e-14);
    }
}
