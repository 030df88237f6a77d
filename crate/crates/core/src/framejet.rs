//! First-order derivative propagation through frame constructions.
//!
//! A `Du` is a scalar carrying its partial derivatives with respect to the
//! domain variables; a `DuVec` is an ambient vector of such scalars. Pushing
//! the adapted-frame Gram-Schmidt and the derived fibre frames (anti-self-dual
//! triples, spinor frames) through this arithmetic yields analytic frame
//! derivatives, which the closed-form tangent route consumes. The value parts
//! reproduce [`crate::immersion::adapted_frame`] operation for operation.


use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::immersion::{Immersion, OneForm, RANK_TOL};
use crate::linalg::{RMat, RVec};
use crate::octonion::basis_product;

/// Scalar with first partial derivatives in the domain directions.
#[derive(Debug, Clone)]
pub struct Du {
    pub v: f64,
    pub d: Vec<f64>,
}

impl Du {
    pub fn constant(v: f64, p: usize) -> Du {
        Du {
            v,
            d: vec![0.0; p],
        }
    }

    pub fn add(&self, o: &Du) -> Du {
        Du {
            v: self.v + o.v,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Du) -> Du {
        Du {
            v: self.v - o.v,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &Du) -> Du {
        Du {
            v: self.v * o.v,
            d: self
                .d
                .iter()
                .zip(&o.d)
                .map(|(a, b)| a * o.v + self.v * b)
                .collect(),
        }
    }

    pub fn div(&self, o: &Du) -> Du {
        let inv = 1.0 / o.v;
        Du {
            v: self.v * inv,
            d: self
                .d
                .iter()
                .zip(&o.d)
                .map(|(a, b)| (a - self.v * inv * b) * inv)
                .collect(),
        }
    }

    pub fn sqrt(&self) -> Du {
        let r = self.v.sqrt();
        Du {
            v: r,
            d: self.d.iter().map(|a| 0.5 * a / r).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Du {
        Du {
            v: self.v * s,
            d: self.d.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Du {
        self.scale(-1.0)
    }
}

/// Ambient vector of `Du` scalars: value plus per-direction derivative
/// vectors.
#[derive(Debug, Clone)]
pub struct DuVec {
    pub v: RVec,
    pub d: Vec<RVec>,
}

impl DuVec {
    pub fn constant(v: RVec, p: usize) -> DuVec {
        let dim = v.len();
        DuVec {
            v,
            d: vec![RVec::zeros(dim); p],
        }
    }

    pub fn zeros(dim: usize, p: usize) -> DuVec {
        DuVec::constant(RVec::zeros(dim), p)
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn p(&self) -> usize {
        self.d.len()
    }

    pub fn component(&self, c: usize) -> Du {
        Du {
            v: self.v[c],
            d: self.d.iter().map(|g| g[c]).collect(),
        }
    }

    pub fn from_components(parts: &[Du]) -> DuVec {
        let p = parts[0].d.len();
        let v = RVec::from_iterator(parts.len(), parts.iter().map(|x| x.v));
        let d = (0..p)
            .map(|k| RVec::from_iterator(parts.len(), parts.iter().map(|x| x.d[k])))
            .collect();
        DuVec { v, d }
    }

    pub fn add(&self, o: &DuVec) -> DuVec {
        DuVec {
            v: &self.v + &o.v,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &DuVec) -> DuVec {
        DuVec {
            v: &self.v - &o.v,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale_s(&self, s: f64) -> DuVec {
        DuVec {
            v: &self.v * s,
            d: self.d.iter().map(|a| a * s).collect(),
        }
    }

    /// Product rule for a scalar field times a vector field.
    pub fn scale(&self, f: &Du) -> DuVec {
        DuVec {
            v: &self.v * f.v,
            d: self
                .d
                .iter()
                .zip(&f.d)
                .map(|(dv, df)| dv * f.v + &self.v * *df)
                .collect(),
        }
    }

    pub fn dot(&self, o: &DuVec) -> Du {
        let v = self.v.dot(&o.v);
        let d = self
            .d
            .iter()
            .zip(&o.d)
            .map(|(da, db)| da.dot(&o.v) + self.v.dot(db))
            .collect();
        Du { v, d }
    }

    pub fn norm(&self) -> Du {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> DuVec {
        let n = self.norm();
        let inv = Du::constant(1.0, self.p()).div(&n);
        self.scale(&inv)
    }

    /// Directional derivative along a combination of domain directions.
    pub fn directional(&self, coeffs: &[f64]) -> RVec {
        let mut out = RVec::zeros(self.dim());
        for (c, dv) in coeffs.iter().zip(&self.d) {
            out += dv * *c;
        }
        out
    }
}

/// Frame fields with analytic first derivatives at one parameter point.
#[derive(Debug, Clone)]
pub struct FrameJet {
    pub tangent: Vec<DuVec>,
    pub normal: Vec<DuVec>,
    /// Change of basis values: e_a = sum_k chart[(a,k)] dx/du^k.
    pub chart: RMat,
}

/// Coordinate tangent fields dx/du^k with derivatives from the component
/// Hessians.
pub fn coordinate_tangents(imm: &Immersion, u: &[f64]) -> Result<Vec<DuVec>> {
    let p = imm.domain_dim();
    let n = imm.ambient_dim();
    let jet = imm.jet(u)?;
    let mut out = Vec::with_capacity(p);
    for k in 0..p {
        let v: RVec = jet.jacobian.column(k).into();
        let d: Vec<RVec> = (0..p)
            .map(|l| RVec::from_iterator(n, (0..n).map(|c| jet.hessians[c][(k, l)])))
            .collect();
        out.push(DuVec { v, d });
    }
    Ok(out)
}

/// Adapted frames with derivatives; mirrors `adapted_frame` exactly in the
/// value parts (same operations in the same order).
pub fn frame_jet(imm: &Immersion, u: &[f64]) -> Result<FrameJet> {
    let p = imm.domain_dim();
    let n = imm.ambient_dim();
    let coords = coordinate_tangents(imm, u)?;

    let mut tangent: Vec<DuVec> = Vec::with_capacity(p);
    let mut chart = RMat::zeros(p, p);
    let mut chart_rows_du: Vec<Vec<Du>> = Vec::with_capacity(p);
    for a in 0..p {
        let mut v = coords[a].clone();
        let mut row: Vec<Du> = (0..p)
            .map(|i| Du::constant(if i == a { 1.0 } else { 0.0 }, p))
            .collect();
        for (b, e) in tangent.iter().enumerate() {
            let proj = v.dot(e);
            v = v.sub(&e.scale(&proj));
            for i in 0..p {
                row[i] = row[i].sub(&chart_rows_du[b][i].mul(&proj));
            }
        }
        let norm = v.norm();
        if norm.v < RANK_TOL {
            return Err(Error::FrameBreakdown {
                u: u.to_vec(),
                pivot: norm.v,
            });
        }
        let inv = Du::constant(1.0, p).div(&norm);
        tangent.push(v.scale(&inv));
        let row: Vec<Du> = row.iter().map(|r| r.mul(&inv)).collect();
        for i in 0..p {
            chart[(a, i)] = row[i].v;
        }
        chart_rows_du.push(row);
    }

    let q = n - p;
    let mut normal: Vec<DuVec> = Vec::with_capacity(q);
    for idx in 0..n {
        if normal.len() == q {
            break;
        }
        let mut seed = RVec::zeros(n);
        seed[idx] = 1.0;
        let mut w = DuVec::constant(seed, p);
        for e in tangent.iter().chain(normal.iter()) {
            let proj = w.dot(e);
            w = w.sub(&e.scale(&proj));
        }
        let norm = w.norm();
        if norm.v > RANK_TOL {
            let inv = Du::constant(1.0, p).div(&norm);
            normal.push(w.scale(&inv));
        }
    }
    if normal.len() != q {
        return Err(Error::FrameBreakdown {
            u: u.to_vec(),
            pivot: 0.0,
        });
    }

    if q > 0 {
        let mut full = RMat::zeros(n, n);
        for (col, v) in tangent.iter().chain(normal.iter()).enumerate() {
            full.set_column(col, &v.v);
        }
        if full.determinant() < 0.0 {
            let last = normal.len() - 1;
            normal[last] = normal[last].scale_s(-1.0);
        }
    }

    Ok(FrameJet {
        tangent,
        normal,
        chart,
    })
}

/// Wedge of two covector fields on R^4, as the six components
/// (12, 13, 14, 23, 24, 34).
fn wedge4(a: &DuVec, b: &DuVec) -> [Du; 6] {
    let comp = |k: usize, l: usize| {
        a.component(k)
            .mul(&b.component(l))
            .sub(&a.component(l).mul(&b.component(k)))
    };
    [
        comp(0, 1),
        comp(0, 2),
        comp(0, 3),
        comp(1, 2),
        comp(1, 3),
        comp(2, 3),
    ]
}

/// The moving anti-self-dual triple of a framed surface in R^4, expressed in
/// the fixed basis
///   O^1 = dx12 - dx34, O^2 = dx13 + dx24, O^3 = dx14 - dx23,
/// with derivatives. Requires a positively oriented frame, which `frame_jet`
/// guarantees.
pub fn asd_triple(fj: &FrameJet) -> Result<[DuVec; 3]> {
    if fj.tangent.len() != 2 || fj.normal.len() != 2 || fj.tangent[0].dim() != 4 {
        return Err(Error::Dimension {
            expected: "surface in R^4".into(),
            got: format!(
                "p = {}, n = {}",
                fj.tangent.len(),
                fj.tangent.first().map_or(0, |t| t.dim())
            ),
        });
    }
    let e1 = &fj.tangent[0];
    let e2 = &fj.tangent[1];
    let n1 = &fj.normal[0];
    let n2 = &fj.normal[1];

    let project = |w: [Du; 6]| {
        // components: 0:12 1:13 2:14 3:23 4:24 5:34
        let c1 = w[0].sub(&w[5]).scale(0.5);
        let c2 = w[1].add(&w[4]).scale(0.5);
        let c3 = w[2].sub(&w[3]).scale(0.5);
        DuVec::from_components(&[c1, c2, c3])
    };
    let sub6 = |a: [Du; 6], b: [Du; 6]| {
        let mut out = a;
        for (x, y) in out.iter_mut().zip(b) {
            *x = x.sub(&y);
        }
        out
    };

    let w1 = sub6(wedge4(e1, e2), wedge4(n1, n2));
    let w2 = sub6(wedge4(e1, n1), wedge4(n2, e2));
    let w3 = sub6(wedge4(e1, n2), wedge4(e2, n1));
    Ok([project(w1), project(w2), project(w3)])
}

/// The 1-form as an ambient field along the immersion: the tangential
/// (co)vector J g^{-1} mu, with derivatives.
pub fn ambient_one_form_field(imm: &Immersion, mu: &OneForm, u: &[f64]) -> Result<DuVec> {
    let p = imm.domain_dim();
    let coords = coordinate_tangents(imm, u)?;

    // metric and right-hand side in Du arithmetic
    let mut g: Vec<Vec<Du>> = vec![vec![Du::constant(0.0, p); p]; p];
    for i in 0..p {
        for j in 0..p {
            g[i][j] = coords[i].dot(&coords[j]);
        }
    }
    let mut rhs: Vec<Du> = Vec::with_capacity(p);
    for c in mu.coefficients() {
        let jet = c.eval_jet2(u)?;
        rhs.push(Du {
            v: jet.value,
            d: jet.gradient.iter().copied().collect(),
        });
    }

    let sol = du_solve(g, rhs, u)?;
    let mut out = DuVec::zeros(imm.ambient_dim(), p);
    for (c, t) in sol.iter().zip(&coords) {
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting in Du arithmetic.
fn du_solve(mut a: Vec<Vec<Du>>, mut b: Vec<Du>, u: &[f64]) -> Result<Vec<Du>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].v.abs() > a[piv][col].v.abs() {
                piv = r;
            }
        }
        if a[piv][col].v.abs() < 1e-14 {
            return Err(Error::MetricDegenerate { u: u.to_vec() });
        }
        a.swap(piv, col);
        b.swap(piv, col);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].div(&a[col][col]);
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
            let t = f.mul(&b[col]);
            b[r] = b[r].sub(&t);
        }
    }
    Ok((0..n).map(|i| b[i].div(&a[i][i])).collect())
}

/// Octonion product of two 8-component fields, with derivatives.
pub fn oct_mul(a: &DuVec, b: &DuVec) -> DuVec {
    let p = a.p();
    let mut v = RVec::zeros(8);
    let mut d = vec![RVec::zeros(8); p];
    for i in 0..8 {
        for j in 0..8 {
            let (idx, sign) = basis_product(i, j);
            v[idx] += sign * a.v[i] * b.v[j];
            for k in 0..p {
                d[k][idx] += sign * (a.d[k][i] * b.v[j] + a.v[i] * b.d[k][j]);
            }
        }
    }
    DuVec { v, d }
}

/// Embed a base vector field on R^4 into the cotangent half span{e, ie, je, ke}.
pub fn embed_cotangent(v: &DuVec) -> DuVec {
    let p = v.p();
    let mut out = DuVec::zeros(8, p);
    for c in 0..4 {
        out.v[4 + c] = v.v[c];
        for k in 0..p {
            out.d[k][4 + c] = v.d[k][c];
        }
    }
    out
}

/// Clifford action of an anti-self-dual form (fixed-basis coordinates) on a
/// spinor field: gamma(O^1) = g(dx1)g(dx2) - g(dx3)g(dx4) and cyclic
/// counterparts, extended linearly.
pub fn cliff_apply_asd(asd: &DuVec, s: &DuVec) -> DuVec {
    let p = s.p();
    let gamma = |axis: usize, w: &DuVec| {
        let mut unit = RVec::zeros(8);
        unit[4 + axis] = 1.0;
        oct_mul(&DuVec::constant(unit, p), w)
    };
    let pair = |a: usize, b: usize, w: &DuVec| gamma(a, &gamma(b, w));
    let t1 = pair(0, 1, s).sub(&pair(2, 3, s));
    let t2 = pair(0, 2, s).sub(&pair(3, 1, s));
    let t3 = pair(0, 3, s).sub(&pair(1, 2, s));
    t1.scale(&asd.component(0))
        .add(&t2.scale(&asd.component(1)))
        .add(&t3.scale(&asd.component(2)))
}

/// The complex structure on negative spinors induced by an oriented tangent
/// frame: the octonion product e^1 e^2 of the two tangent covectors.
pub fn spinor_complex_structure(fj: &FrameJet) -> Result<DuVec> {
    if fj.tangent.len() != 2 || fj.tangent[0].dim() != 4 {
        return Err(Error::Dimension {
            expected: "surface in R^4".into(),
            got: "other".into(),
        });
    }
    let e1 = embed_cotangent(&fj.tangent[0]);
    let e2 = embed_cotangent(&fj.tangent[1]);
    Ok(oct_mul(&e1, &e2))
}

/// Deterministic orthonormal frame (q3, q4) of the negative eigenbundle:
/// q3 is the first quaternion basis element orthogonalized against
/// span{1, j_L}, q4 = j_L q3.
pub fn spinor_negative_frames_gs(j_l: &DuVec) -> Result<(DuVec, DuVec)> {
    let p = j_l.p();
    for cand in 1..=3 {
        let mut seed = RVec::zeros(8);
        seed[cand] = 1.0;
        let c = DuVec::constant(seed, p);
        // 1 is orthogonal to every imaginary candidate already
        let proj = c.dot(j_l);
        let w = c.sub(&j_l.scale(&proj));
        if w.norm().v > 1e-8 {
            let q3 = w.normalized();
            let q4 = oct_mul(j_l, &q3);
            return Ok((q3, q4));
        }
    }
    Err(Error::Invalid("no quaternion basis vector completes the spinor frame".into()))
}

/// Negative-spinor frame aligned with an anti-self-dual frame field via the
/// Clifford action: q3 = gamma(omega)(1)/|gamma(omega)(1)|, q4 = j_L q3.
pub fn spinor_negative_frames_from_asd(j_l: &DuVec, omega2: &DuVec) -> (DuVec, DuVec) {
    let p = j_l.p();
    let one = DuVec::constant(
        RVec::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        p,
    );
    let q3 = cliff_apply_asd(omega2, &one).normalized();
    let q4 = oct_mul(j_l, &q3);
    (q3, q4)
}

/// A 3-component field from expressions (used for explicit fibre frames).
pub fn duvec_from_exprs(exprs: &[Expr], u: &[f64]) -> Result<DuVec> {
    let parts: std::result::Result<Vec<Du>, crate::expr::ExprError> = exprs
        .iter()
        .map(|e| {
            e.eval_jet2(u).map(|j| Du {
                v: j.value,
                d: j.gradient.iter().copied().collect(),
            })
        })
        .collect();
    Ok(DuVec::from_components(&parts?))
}
