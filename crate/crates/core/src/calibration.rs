//! Pointwise calibration checks on frames of ambient tangent vectors.
//!
//! Three ambient models are supported, with a fixed coordinate order each:
//!
//! * special Lagrangian on R^{2n} = T*R^n with coordinates
//!   (x^1..x^n, xi_1..xi_n);
//! * the G2 3-form on R^7 with fibre-first coordinates
//!   (a_1, a_2, a_3, x_1..x_4), the a's being anti-self-dual components;
//! * the Spin(7) Cayley check on R^8 with spinor-first coordinates
//!   (s_0..s_3, x_1..x_4) identified with the octonions
//!   s_0 + s_1 i + s_2 j + s_3 k + x_1 e + x_2 ie + x_3 je + x_4 ke.
//!
//! All residuals are normalized by the Gram volume of their arguments, so
//! they are scale-free and frame-independent on a fixed span.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cdet, gram_volume, CMat, RVec};
use crate::octonion::{associator, fourfold_imaginary, Octonion};

/// Spans with Gram volume below this are rejected as degenerate.
pub const DEGENERATE_VOLUME: f64 = 1e-12;

/// Canonical symplectic form sum_k dx^k wedge dxi_k on R^{2n}.
pub fn symplectic_eval(v: &RVec, w: &RVec) -> f64 {
    let n = v.len() / 2;
    let mut acc = 0.0;
    for k in 0..n {
        acc += v[k] * w[n + k] - w[k] * v[n + k];
    }
    acc
}

/// Holomorphic volume form: determinant of the complex matrix with columns
/// z(v) = x(v) + i xi(v).
pub fn holo_volume_eval(vs: &[RVec]) -> Result<Complex64> {
    let n = vs.len();
    if vs.iter().any(|v| v.len() != 2 * n) {
        return Err(Error::Dimension {
            expected: format!("{n} vectors of length {}", 2 * n),
            got: "mismatched lengths".into(),
        });
    }
    let mut m = CMat::zeros(n, n);
    for (col, v) in vs.iter().enumerate() {
        for row in 0..n {
            m[(row, col)] = Complex64::new(v[row], v[n + row]);
        }
    }
    Ok(cdet(&m))
}

/// Special Lagrangian residual of an n-frame in R^{2n} against phase
/// exp(i theta): |Im(e^{-i theta} Omega)| plus the norm of the restricted
/// symplectic form, per unit Gram volume. Zero exactly on special Lagrangian
/// planes of that phase. The symplectic part uses the Frobenius norm of the
/// pairing matrix, which is invariant under orthonormal reframings of the
/// span; a plain sum of |omega(v_i, v_j)| would not be.
pub fn sl_residual(vs: &[RVec], theta: f64) -> Result<f64> {
    let vol = gram_volume(vs);
    if vol < DEGENERATE_VOLUME {
        return Err(Error::DegenerateSpan { volume: vol });
    }
    let omega = holo_volume_eval(vs)?;
    let rotated = Complex64::from_polar(1.0, -theta) * omega;
    let mut lagrangian = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let w = symplectic_eval(&vs[i], &vs[j]);
            lagrangian += w * w;
        }
    }
    Ok((rotated.im.abs() + lagrangian.sqrt()) / vol)
}

/// Signed basis triples of the G2 3-form in fibre-first coordinates:
/// phi = f123 + f145 - f167 + f246 + f257 + f347 - f356.
const PHI_TERMS: [(usize, usize, usize, f64); 7] = [
    (0, 1, 2, 1.0),
    (0, 3, 4, 1.0),
    (0, 5, 6, -1.0),
    (1, 3, 5, 1.0),
    (1, 4, 6, 1.0),
    (2, 3, 6, 1.0),
    (2, 4, 5, -1.0),
];

/// The G2 3-form evaluated on three vectors in R^7.
pub fn g2_phi_eval(u: &RVec, v: &RVec, w: &RVec) -> f64 {
    let mut acc = 0.0;
    for (a, b, c, sign) in PHI_TERMS {
        let det = u[a] * (v[b] * w[c] - v[c] * w[b]) - u[b] * (v[a] * w[c] - v[c] * w[a])
            + u[c] * (v[a] * w[b] - v[b] * w[a]);
        acc += sign * det;
    }
    acc
}

/// Embed R^7 fibre-first coordinates into the imaginary octonions:
/// (a1, a2, a3, x1..x4) -> a1 i + a2 j + a3 k + x1 e + x2 ie + x3 je + x4 ke.
pub fn imaginary_embed(v: &RVec) -> Octonion {
    Octonion([0.0, v[0], v[1], v[2], v[3], v[4], v[5], v[6]])
}

/// Embed R^8 spinor-first coordinates into the octonions.
pub fn octonion_embed(v: &RVec) -> Octonion {
    Octonion([v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]])
}

/// Associative residual: |[u, v, w]| / Gram volume under the imaginary
/// octonion identification. Zero exactly on associative 3-planes.
pub fn associative_residual(u: &RVec, v: &RVec, w: &RVec) -> Result<f64> {
    let vol = gram_volume(&[u.clone(), v.clone(), w.clone()]);
    if vol < DEGENERATE_VOLUME {
        return Err(Error::DegenerateSpan { volume: vol });
    }
    let assoc = associator(imaginary_embed(u), imaginary_embed(v), imaginary_embed(w));
    Ok(assoc.norm() / vol)
}

/// Coassociative residual of a 4-frame: the 3-form must restrict to zero, so
/// take the worst |phi| over the four sub-triples, each per its own volume.
pub fn coassociative_residual(vs: &[RVec; 4]) -> Result<f64> {
    let vol4 = gram_volume(vs.as_slice());
    if vol4 < DEGENERATE_VOLUME {
        return Err(Error::DegenerateSpan { volume: vol4 });
    }
    let mut worst = 0.0f64;
    for omit in 0..4 {
        let tri: Vec<&RVec> = (0..4).filter(|i| *i != omit).map(|i| &vs[i]).collect();
        let vol3 = gram_volume(&[tri[0].clone(), tri[1].clone(), tri[2].clone()]);
        if vol3 < DEGENERATE_VOLUME {
            return Err(Error::DegenerateSpan { volume: vol3 });
        }
        worst = worst.max(g2_phi_eval(tri[0], tri[1], tri[2]).abs() / vol3);
    }
    Ok(worst)
}

/// Cayley residual of a 4-frame in R^8: |Im(v1 x v2 x v3 x v4)| / volume.
pub fn cayley_residual(vs: &[RVec; 4]) -> Result<f64> {
    let vol = gram_volume(vs.as_slice());
    if vol < DEGENERATE_VOLUME {
        return Err(Error::DegenerateSpan { volume: vol });
    }
    let im = fourfold_imaginary(
        octonion_embed(&vs[0]),
        octonion_embed(&vs[1]),
        octonion_embed(&vs[2]),
        octonion_embed(&vs[3]),
    );
    Ok(im.norm() / vol)
}
