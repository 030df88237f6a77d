//! Small shared linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<Complex64>;

/// Complex determinant by partial-pivot LU.
pub fn cdet(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}

/// Complex inverse; `None` when singular.
pub fn cinv(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// sqrt(det(Gram)) of a list of vectors; zero-clamped.
pub fn gram_volume(vs: &[RVec]) -> f64 {
    let k = vs.len();
    let mut g = RMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = vs[i].dot(&vs[j]);
        }
    }
    g.determinant().max(0.0).sqrt()
}

/// Orthonormalize by modified Gram-Schmidt, dropping near-dependent vectors.
pub fn orthonormalize(vs: &[RVec], pivot: f64) -> Vec<RVec> {
    let mut basis: Vec<RVec> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for o in &basis {
            let p = w.dot(o);
            w -= o * p;
        }
        let n = w.norm();
        if n > pivot * (1.0 + v.norm()) {
            basis.push(w / n);
        }
    }
    basis
}

/// Largest principal angle between span(a) and span(b), in radians.
///
/// Computed as asin of the largest singular value of (I - P_a) Q_b, which
/// stays accurate for small angles.
pub fn max_principal_angle(a: &[RVec], b: &[RVec]) -> f64 {
    let qa = orthonormalize(a, 1e-13);
    let qb = orthonormalize(b, 1e-13);
    if qa.len() != a.len() || qb.len() != b.len() || qa.len() != qb.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    let dim = qa[0].len();
    let k = qb.len();
    let mut resid = RMat::zeros(dim, k);
    for (col, v) in qb.iter().enumerate() {
        let mut w = v.clone();
        for o in &qa {
            let p = w.dot(o);
            w -= o * p;
        }
        resid.set_column(col, &w);
    }
    let sv = resid.svd(false, false).singular_values;
    let s = sv.iter().fold(0.0f64, |m, x| m.max(*x)).min(1.0);
    s.asin()
}

/// Eigenvalues and orthonormal eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(m: &RMat) -> (RVec, RMat) {
    let se = m.clone().symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &RMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().fold(f64::INFINITY, |m, x| m.min(*x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_angle_of_rotated_plane() {
        let e1 = RVec::from_vec(vec![1.0, 0.0, 0.0]);
        let e2 = RVec::from_vec(vec![0.0, 1.0, 0.0]);
        let theta: f64 = 1e-4;
        let tilted = RVec::from_vec(vec![theta.cos(), 0.0, theta.sin()]);
        let angle = max_principal_angle(&[e1.clone(), e2.clone()], &[tilted, e2]);
        assert!((angle - theta).abs() < 1e-12, "angle {angle}");
    }

    #[test]
    fn gram_volume_of_unit_square() {
        let e1 = RVec::from_vec(vec![1.0, 0.0]);
        let e2 = RVec::from_vec(vec![0.0, 2.0]);
        assert!((gram_volume(&[e1, e2]) - 2.0).abs() < 1e-14);
    }
}
