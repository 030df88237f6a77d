//! Octonion arithmetic on the basis (1, i, j, k, e, ie, je, ke).
//!
//! The first four basis elements span the quaternions H, the last four span
//! He; together they give the normed division algebra O = H + He. Products of
//! basis elements are stored as a signed permutation table, so basis products
//! are exact. The module also provides the associator, the alternating
//! imaginary 4-fold product used by the Cayley calibration, and the Clifford
//! action of cotangent 1-forms on spinors.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Names of the eight basis elements, in coefficient order.
pub const BASIS_NAMES: [&str; 8] = ["1", "i", "j", "k", "e", "ie", "je", "ke"];

/// Basis products as (index, sign): `TABLE[a][b]` is the product of basis
/// element `a` (left factor) with basis element `b` (right factor).
const TABLE: [[(usize, f64); 8]; 8] = [
    // 1 * x = x
    [(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0), (5, 1.0), (6, 1.0), (7, 1.0)],
    // i * (1, i, j, k, e, ie, je, ke) = (i, -1, k, -j, ie, -e, -ke, je)
    [(1, 1.0), (0, -1.0), (3, 1.0), (2, -1.0), (5, 1.0), (4, -1.0), (7, -1.0), (6, 1.0)],
    // j * ... = (j, -k, -1, i, je, ke, -e, -ie)
    [(2, 1.0), (3, -1.0), (0, -1.0), (1, 1.0), (6, 1.0), (7, 1.0), (4, -1.0), (5, -1.0)],
    // k * ... = (k, j, -i, -1, ke, -je, ie, -e)
    [(3, 1.0), (2, 1.0), (1, -1.0), (0, -1.0), (7, 1.0), (6, -1.0), (5, 1.0), (4, -1.0)],
    // e * ... = (e, -ie, -je, -ke, -1, i, j, k)
    [(4, 1.0), (5, -1.0), (6, -1.0), (7, -1.0), (0, -1.0), (1, 1.0), (2, 1.0), (3, 1.0)],
    // ie * ... = (ie, e, -ke, je, -i, -1, -k, j)
    [(5, 1.0), (4, 1.0), (7, -1.0), (6, 1.0), (1, -1.0), (0, -1.0), (3, -1.0), (2, 1.0)],
    // je * ... = (je, ke, e, -ie, -j, k, -1, -i)
    [(6, 1.0), (7, 1.0), (4, 1.0), (5, -1.0), (2, -1.0), (3, 1.0), (0, -1.0), (1, -1.0)],
    // ke * ... = (ke, -je, ie, e, -k, -j, i, -1)
    [(7, 1.0), (6, -1.0), (5, 1.0), (4, 1.0), (3, -1.0), (2, -1.0), (1, 1.0), (0, -1.0)],
];

/// The product of two basis elements, as (result index, sign).
pub fn basis_product(a: usize, b: usize) -> (usize, f64) {
    TABLE[a][b]
}

/// An octonion, stored as eight real coefficients on (1, i, j, k, e, ie, je, ke).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ZERO: Octonion = Octonion([0.0; 8]);
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// The `idx`-th basis element.
    pub fn basis(idx: usize) -> Octonion {
        let mut c = [0.0; 8];
        c[idx] = 1.0;
        Octonion(c)
    }

    pub fn from_real(x: f64) -> Octonion {
        let mut c = [0.0; 8];
        c[0] = x;
        Octonion(c)
    }

    pub fn coeffs(&self) -> &[f64; 8] {
        &self.0
    }

    /// Real part (coefficient of 1).
    pub fn real(&self) -> f64 {
        self.0[0]
    }

    /// Imaginary part: the real coefficient is dropped.
    pub fn imaginary(&self) -> Octonion {
        let mut c = self.0;
        c[0] = 0.0;
        Octonion(c)
    }

    /// Conjugate: negates the seven imaginary coefficients.
    pub fn conjugate(&self) -> Octonion {
        let mut c = [0.0; 8];
        c[0] = self.0[0];
        for (out, x) in c.iter_mut().zip(self.0.iter()).skip(1) {
            *out = -x;
        }
        Octonion(c)
    }

    pub fn dot(&self, other: &Octonion) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Octonion {
        let mut c = self.0;
        for x in &mut c {
            *x *= s;
        }
        Octonion(c)
    }
}

impl Index<usize> for Octonion {
    type Output = f64;
    fn index(&self, idx: usize) -> &f64 {
        &self.0[idx]
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0.iter()) {
            *x += y;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0.iter()) {
            *x -= y;
        }
        Octonion(c)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        self.scale(-1.0)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        let mut out = [0.0; 8];
        for (a, &ca) in self.0.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in rhs.0.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                let (idx, sign) = TABLE[a][b];
                out[idx] += sign * ca * cb;
            }
        }
        Octonion(out)
    }
}

/// Associator [a, b, c] = (ab)c - a(bc), the obstruction to associativity.
pub fn associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion {
    (a * b) * c - a * (b * c)
}

/// Imaginary part of the alternating 4-fold product.
///
/// On orthogonal arguments this is Im(conj(a) (b (conj(c) d))); general
/// arguments are decomposed by modified Gram-Schmidt and the value is the
/// alternating multilinear extension. Linearly dependent arguments give zero.
pub fn fourfold_imaginary(a: Octonion, b: Octonion, c: Octonion, d: Octonion) -> Octonion {
    let inputs = [a, b, c, d];
    let mut basis: Vec<Octonion> = Vec::with_capacity(4);
    // coeff[m][k]: coordinates of input m against the orthonormalized basis
    let mut coeff = [[0.0f64; 4]; 4];
    for (m, v) in inputs.iter().enumerate() {
        let mut w = *v;
        for (k, o) in basis.iter().enumerate() {
            let p = w.dot(o);
            coeff[m][k] = p;
            w = w - o.scale(p);
        }
        let pivot = w.norm();
        if pivot < 1e-12 * (1.0 + v.norm()) {
            // dependent argument: the alternating extension vanishes
            return Octonion::ZERO;
        }
        coeff[m][basis.len()] = pivot;
        basis.push(w.scale(1.0 / pivot));
    }
    let det = det4(&coeff);
    let core = basis[0].conjugate() * (basis[1] * (basis[2].conjugate() * basis[3]));
    core.imaginary().scale(det)
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Clifford action of a cotangent 1-form on a spinor.
///
/// Cotangent vectors live in span{e, ie, je, ke}; the action is octonion
/// multiplication on the left. Rejects `alpha` with components outside that
/// span, since those are not 1-forms under the identification.
pub fn clifford_act(alpha: Octonion, s: Octonion) -> Result<Octonion> {
    let stray = alpha.0[..4].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if stray > 1e-12 * (1.0 + alpha.norm()) {
        return Err(Error::NotCotangent { stray });
    }
    Ok(alpha * s)
}

/// Rows of the multiplication table rendered as signed basis names, in table
/// order (left factor per row, right factor per column).
pub fn table_rows() -> Vec<Vec<String>> {
    (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (idx, sign) = TABLE[a][b];
                    if sign < 0.0 {
                        format!("-{}", BASIS_NAMES[idx])
                    } else {
                        BASIS_NAMES[idx].to_string()
                    }
                })
                .collect()
        })
        .collect()
}
