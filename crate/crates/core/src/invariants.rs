//! Elementary symmetric polynomials of small matrices and the shifted
//! determinant identity they satisfy.
//!
//! For a p x p matrix M the invariants sigma_0..sigma_p are the coefficients
//! of det(I + tM) as a polynomial in t. Coefficients are recovered by
//! evaluating the determinant at p+1 integer sample values and solving the
//! Vandermonde system; with p <= 8 this is stable and keeps the code free of
//! symbolic algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cdet, cinv, CMat};

pub const MAX_DIM: usize = 8;

/// Sample values used for polynomial coefficient recovery: 0, 1, -1, 2, -2, ...
fn sample_points(count: usize) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut k = 1.0;
    while pts.len() < count {
        pts.push(k);
        if pts.len() < count {
            pts.push(-k);
        }
        k += 1.0;
    }
    pts
}

/// Solve for polynomial coefficients given values at the sample points.
fn poly_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let pts = sample_points(m);
    let mut v = CMat::zeros(m, m);
    for (r, t) in pts.iter().enumerate() {
        let mut pw = 1.0;
        for c in 0..m {
            v[(r, c)] = Complex64::new(pw, 0.0);
            pw *= t;
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(values);
    let sol = v.lu().solve(&rhs).expect("Vandermonde with distinct nodes");
    sol.iter().copied().collect()
}

fn check_dim(m: &CMat) -> Result<usize> {
    let p = m.nrows();
    if p == 0 || p > MAX_DIM || m.ncols() != p {
        return Err(Error::Dimension {
            expected: format!("square matrix with side 1..={MAX_DIM}"),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(p)
}

/// Elementary symmetric polynomials [sigma_0, ..., sigma_p] of a p x p matrix,
/// defined by det(I + tM) = sum_k t^k sigma_k(M).
pub fn sym_polys(m: &CMat) -> Result<Vec<Complex64>> {
    let p = check_dim(m)?;
    let pts = sample_points(p + 1);
    let id = CMat::identity(p, p);
    let values: Vec<Complex64> = pts
        .iter()
        .map(|t| cdet(&(&id + m * Complex64::new(*t, 0.0))))
        .collect();
    Ok(poly_coefficients(&values))
}

/// Same as [`sym_polys`] for a real matrix.
pub fn sym_polys_real(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let c = m.map(|x| Complex64::new(x, 0.0));
    Ok(sym_polys(&c)?.into_iter().map(|z| z.re).collect())
}

/// j-th derivative at s = 0 of s -> [sigma_0(B + sA), ..., sigma_p(B + sA)].
///
/// Each sigma_k(B + sA) is a polynomial in s of degree at most p; its
/// coefficients are recovered by evaluation at p+1 sample values of s.
pub fn sigma_s_derivatives(a: &CMat, b: &CMat, j: usize) -> Result<Vec<Complex64>> {
    let p = check_dim(a)?;
    if b.nrows() != p || b.ncols() != p {
        return Err(Error::Dimension {
            expected: format!("{p}x{p}"),
            got: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    if j > p {
        return Err(Error::Invalid(format!(
            "derivative order {j} exceeds dimension {p}"
        )));
    }
    let pts = sample_points(p + 1);
    // sigmas_at[r][k] = sigma_k(B + s_r A)
    let mut sigmas_at = Vec::with_capacity(pts.len());
    for s in &pts {
        sigmas_at.push(sym_polys(&(b + a * Complex64::new(*s, 0.0)))?);
    }
    let factorial: f64 = (1..=j).map(|x| x as f64).product();
    let mut out = Vec::with_capacity(p + 1);
    for k in 0..=p {
        let values: Vec<Complex64> = sigmas_at.iter().map(|row| row[k]).collect();
        let coeffs = poly_coefficients(&values);
        out.push(coeffs[j] * factorial);
    }
    Ok(out)
}

/// Normalized residual of the identity
///
///   sum_k t^k d^j/ds^j|_0 sigma_k(B + sA)
///     = j! t^j det(I + tB) sigma_j(A (I + tB)^{-1}).
///
/// Fails when I + tB is singular or too ill-conditioned to invert.
pub fn lemma_residual(a: &CMat, b: &CMat, j: usize, t: Complex64) -> Result<f64> {
    let p = check_dim(a)?;
    let id = CMat::identity(p, p);
    let shifted = &id + b * t;
    let inv = cinv(&shifted).ok_or(Error::SingularShift { t: t.to_string() })?;
    let cond = shifted.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::SingularShift { t: t.to_string() });
    }

    let derivs = sigma_s_derivatives(a, b, j)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    for d in &derivs {
        lhs += pw * d;
        pw *= t;
    }

    let factorial: f64 = (1..=j).map(|x| x as f64).product();
    let sigma_j = sym_polys(&(a * &inv))?[j];
    let rhs = factorial * t.powu(j as u32) * cdet(&shifted) * sigma_j;

    Ok((lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm())))
}
