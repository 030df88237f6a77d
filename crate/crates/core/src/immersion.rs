//! Adapted orthonormal frames, second fundamental forms, and the intrinsic
//! 1-form calculus of a parametrized immersion L^p in R^n.
//!
//! Frames are deterministic gauge choices: tangents come from modified
//! Gram-Schmidt on the coordinate tangents in index order, normals complete
//! the frame from the ambient standard basis in index order, and the full
//! frame is flipped to positive orientation by negating the last normal if
//! needed. All reported residuals are frame-covariant quantities.
//!
//! Second fundamental forms follow the Harvey-Lawson sign convention
//! A^nu(w) = (grad_w nu)^T, so the graph of f over a tangent plane at a
//! critical point has A = -Hess(f) in the upward normal direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::invariants::sym_polys_real;
use crate::linalg::{smallest_singular_value, RMat, RVec};

/// Rank / Gram-Schmidt pivot threshold on singular values and residual norms.
pub const RANK_TOL: f64 = 1e-8;

/// A parametrized immersion of a p-dimensional domain into R^n, with each
/// ambient component given as an expression in the domain variables.
#[derive(Debug, Clone)]
pub struct Immersion {
    vars: Vec<String>,
    components: Vec<Expr>,
}

/// Value, Jacobian, and component Hessians of an immersion at one parameter
/// point.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    pub x: RVec,
    /// n x p matrix of first partials.
    pub jacobian: RMat,
    /// One p x p Hessian per ambient component.
    pub hessians: Vec<RMat>,
}

/// Adapted orthonormal frames and curvature data at one parameter point.
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub u: Vec<f64>,
    pub x: RVec,
    /// Orthonormal tangent frame e_1..e_p in ambient coordinates.
    pub tangent: Vec<RVec>,
    /// Orthonormal normal frame nu_1..nu_q in ambient coordinates.
    pub normal: Vec<RVec>,
    /// Change of basis: e_a = sum_k chart[(a, k)] * dx/du^k.
    pub chart: RMat,
    /// Second fundamental forms A^1..A^q in the tangent frame (symmetric).
    pub second_fundamental: Vec<RMat>,
    /// First fundamental form in domain coordinates.
    pub metric: RMat,
    /// Jacobian dx/du (n x p).
    pub jacobian: RMat,
}

impl Immersion {
    pub fn new(vars: &[&str], components: &[&str]) -> Result<Immersion> {
        if vars.is_empty() || components.len() < vars.len() {
            return Err(Error::Invalid(format!(
                "immersion needs 1 <= p <= n, got p={} n={}",
                vars.len(),
                components.len()
            )));
        }
        let parsed: std::result::Result<Vec<Expr>, _> =
            components.iter().map(|c| Expr::parse(c, vars)).collect();
        Ok(Immersion {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            components: parsed?,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.domain_dim()
    }

    pub fn variables(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Ambient position only.
    pub fn position(&self, u: &[f64]) -> Result<RVec> {
        let mut x = RVec::zeros(self.ambient_dim());
        for (c, expr) in self.components.iter().enumerate() {
            x[c] = expr.eval(u)?;
        }
        Ok(x)
    }

    /// Position with first and second derivatives.
    pub fn jet(&self, u: &[f64]) -> Result<ImmersionJet> {
        let p = self.domain_dim();
        let n = self.ambient_dim();
        let mut x = RVec::zeros(n);
        let mut jac = RMat::zeros(n, p);
        let mut hessians = Vec::with_capacity(n);
        for (c, expr) in self.components.iter().enumerate() {
            let jet = expr.eval_jet2(u)?;
            x[c] = jet.value;
            for k in 0..p {
                jac[(c, k)] = jet.gradient[k];
            }
            hessians.push(jet.hessian);
        }
        Ok(ImmersionJet {
            x,
            jacobian: jac,
            hessians,
        })
    }
}

/// Modified Gram-Schmidt on the coordinate tangents, tracking the change of
/// basis. Returns (frame, chart).
fn tangent_frame(jet: &ImmersionJet, u: &[f64]) -> Result<(Vec<RVec>, RMat)> {
    let p = jet.jacobian.ncols();
    let mut frame: Vec<RVec> = Vec::with_capacity(p);
    let mut chart = RMat::zeros(p, p);
    for a in 0..p {
        let mut v: RVec = jet.jacobian.column(a).into();
        let mut row = RVec::zeros(p);
        row[a] = 1.0;
        for (b, e) in frame.iter().enumerate() {
            let proj = v.dot(e);
            v -= e * proj;
            let prev = chart.row(b).transpose();
            row -= prev * proj;
        }
        let norm = v.norm();
        if norm < RANK_TOL {
            return Err(Error::FrameBreakdown {
                u: u.to_vec(),
                pivot: norm,
            });
        }
        frame.push(v / norm);
        chart.set_row(a, &(row / norm).transpose());
    }
    Ok((frame, chart))
}

/// Complete the tangent frame with normals drawn from the standard basis in
/// index order, skipping near-dependent candidates.
fn normal_frame(tangent: &[RVec], n: usize, q: usize, u: &[f64]) -> Result<Vec<RVec>> {
    let mut normals: Vec<RVec> = Vec::with_capacity(q);
    for idx in 0..n {
        if normals.len() == q {
            break;
        }
        let mut w = RVec::zeros(n);
        w[idx] = 1.0;
        for e in tangent.iter().chain(normals.iter()) {
            let proj = w.dot(e);
            w -= e * proj;
        }
        let norm = w.norm();
        if norm > RANK_TOL {
            normals.push(w / norm);
        }
    }
    if normals.len() != q {
        return Err(Error::FrameBreakdown {
            u: u.to_vec(),
            pivot: 0.0,
        });
    }
    Ok(normals)
}

/// Second fundamental forms in the Harvey-Lawson sign convention:
/// A^a_ij = -< d2x(e_i, e_j), nu_a >.
pub fn second_fundamental_forms(jet: &ImmersionJet, chart: &RMat, normals: &[RVec]) -> Vec<RMat> {
    let p = chart.nrows();
    let n = jet.x.len();
    let mut forms = vec![RMat::zeros(p, p); normals.len()];
    for i in 0..p {
        for j in i..p {
            // ambient second derivative contracted with frame directions
            let mut d2 = RVec::zeros(n);
            for c in 0..n {
                let h = &jet.hessians[c];
                let mut acc = 0.0;
                for k in 0..p {
                    for l in 0..p {
                        acc += chart[(i, k)] * chart[(j, l)] * h[(k, l)];
                    }
                }
                d2[c] = acc;
            }
            for (a, nu) in normals.iter().enumerate() {
                let v = -d2.dot(nu);
                forms[a][(i, j)] = v;
                forms[a][(j, i)] = v;
            }
        }
    }
    forms
}

/// Build the adapted frame point at `u`: deterministic orthonormal tangent
/// and normal frames, positively oriented, with curvature data.
pub fn adapted_frame(imm: &Immersion, u: &[f64]) -> Result<FramePoint> {
    let p = imm.domain_dim();
    let n = imm.ambient_dim();
    let jet = imm.jet(u)?;

    let sigma_min = smallest_singular_value(&jet.jacobian);
    if sigma_min <= RANK_TOL {
        return Err(Error::RankDeficient {
            u: u.to_vec(),
            sigma_min,
        });
    }

    let (tangent, chart) = tangent_frame(&jet, u)?;
    let mut normal = normal_frame(&tangent, n, n - p, u)?;

    // fix positive orientation of (e_1..e_p, nu_1..nu_q)
    if !normal.is_empty() {
        let mut full = RMat::zeros(n, n);
        for (col, v) in tangent.iter().chain(normal.iter()).enumerate() {
            full.set_column(col, v);
        }
        if full.determinant() < 0.0 {
            let last = normal.len() - 1;
            normal[last] = -&normal[last];
        }
    }

    let second_fundamental = second_fundamental_forms(&jet, &chart, &normal);
    let metric = jet.jacobian.transpose() * &jet.jacobian;

    Ok(FramePoint {
        u: u.to_vec(),
        x: jet.x,
        tangent,
        normal,
        chart,
        second_fundamental,
        metric,
        jacobian: jet.jacobian,
    })
}

/// Residuals of pointwise submanifold classifications over a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResiduals {
    /// max over grid and normal indices of |Tr A^a|
    pub minimal: f64,
    /// max over grid and sampled unit normals of the odd symmetric polynomials
    pub austere: f64,
    /// pairing (nu_1, nu_2); surfaces in R^4 only
    pub superminimal_neg: Option<f64>,
    /// pairing (nu_2, nu_1)
    pub superminimal_pos: Option<f64>,
}

/// Unit normal directions used for the austerity scan.
fn normal_directions(q: usize) -> Vec<Vec<f64>> {
    match q {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|m| {
                let th = 2.0 * std::f64::consts::PI * (m as f64) / 64.0;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            // deterministic low-discrepancy-ish sample of the unit sphere
            let mut rng = ChaCha8Rng::seed_from_u64(0xA057_EE5E);
            let mut dirs = Vec::with_capacity(64);
            while dirs.len() < 64 {
                let v: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.3 && norm <= 1.0 {
                    dirs.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
            dirs
        }
    }
}

/// Classify an immersion over a grid: minimality, austerity, and (for
/// surfaces in R^4) the two superminimality pairings.
pub fn classify_residuals(
    imm: &Immersion,
    grid: &[Vec<f64>],
    require_superminimal: bool,
) -> Result<ClassifyResiduals> {
    let p = imm.domain_dim();
    let n = imm.ambient_dim();
    let surface_in_r4 = p == 2 && n == 4;
    if require_superminimal && !surface_in_r4 {
        return Err(Error::Dimension {
            expected: "p = 2, n = 4 for superminimality".into(),
            got: format!("p = {p}, n = {n}"),
        });
    }

    let dirs = normal_directions(imm.codim());
    let mut minimal = 0.0f64;
    let mut austere = 0.0f64;
    let mut sm_neg = 0.0f64;
    let mut sm_pos = 0.0f64;

    for u in grid {
        let fp = adapted_frame(imm, u)?;
        for a in &fp.second_fundamental {
            minimal = minimal.max(a.trace().abs());
        }
        for c in &dirs {
            let mut a_nu = RMat::zeros(p, p);
            for (coef, a) in c.iter().zip(&fp.second_fundamental) {
                a_nu += a * *coef;
            }
            let sig = sym_polys_real(&a_nu)?;
            let odd: f64 = (1..=p).step_by(2).map(|j| sig[j].abs()).sum();
            austere = austere.max(odd);
        }
        if surface_in_r4 {
            let a1 = &fp.second_fundamental[0];
            let a2 = &fp.second_fundamental[1];
            sm_neg = sm_neg
                .max((a1[(0, 1)] - a2[(0, 0)]).abs() + (a1[(1, 1)] - a2[(0, 1)]).abs());
            sm_pos = sm_pos
                .max((a2[(0, 1)] - a1[(0, 0)]).abs() + (a2[(1, 1)] - a1[(0, 1)]).abs());
        }
    }

    Ok(ClassifyResiduals {
        minimal,
        austere,
        superminimal_neg: surface_in_r4.then_some(sm_neg),
        superminimal_pos: surface_in_r4.then_some(sm_pos),
    })
}

/// A 1-form on the immersed domain, mu = sum_i mu_i(u) du^i.
#[derive(Debug, Clone)]
pub struct OneForm {
    coefficients: Vec<Expr>,
}

impl OneForm {
    pub fn new(imm: &Immersion, coefficients: &[&str]) -> Result<OneForm> {
        if coefficients.len() != imm.domain_dim() {
            return Err(Error::Dimension {
                expected: format!("{} coefficients", imm.domain_dim()),
                got: format!("{}", coefficients.len()),
            });
        }
        let vars = imm.variables();
        let parsed: std::result::Result<Vec<Expr>, _> =
            coefficients.iter().map(|c| Expr::parse(c, &vars)).collect();
        Ok(OneForm {
            coefficients: parsed?,
        })
    }

    pub fn zero(imm: &Immersion) -> OneForm {
        let vars = imm.variables();
        OneForm {
            coefficients: (0..imm.domain_dim())
                .map(|_| Expr::parse("0", &vars).unwrap())
                .collect(),
        }
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.coefficients
    }

    /// Coefficient values at a point.
    pub fn values(&self, u: &[f64]) -> Result<RVec> {
        let mut v = RVec::zeros(self.coefficients.len());
        for (i, c) in self.coefficients.iter().enumerate() {
            v[i] = c.eval(u)?;
        }
        Ok(v)
    }
}

/// Covariant 1-form data at a point, in the orthonormal tangent frame.
#[derive(Debug, Clone)]
pub struct OneFormData {
    /// Full covariant derivative matrix (nabla_{e_i} mu)(e_j).
    pub covariant: RMat,
    /// Symmetrized covariant derivative B.
    pub symmetrized: RMat,
    /// Exterior derivative d mu in the frame (antisymmetric).
    pub curl: RMat,
    /// Codifferential d* mu = -Tr B.
    pub codifferential: f64,
}

/// Covariant calculus of a 1-form: Christoffel symbols come from analytic
/// jets of the metric, never from nested differencing.
pub fn one_form_calculus(imm: &Immersion, mu: &OneForm, u: &[f64]) -> Result<OneFormData> {
    let p = imm.domain_dim();
    let fp = adapted_frame(imm, u)?;
    let jet = imm.jet(u)?;

    let g = &fp.metric;
    let ginv = g.clone().try_inverse().ok_or(Error::MetricDegenerate { u: u.to_vec() })?;

    // dg[l][(i, j)] = d_l g_ij from immersion jets
    let mut dg = vec![RMat::zeros(p, p); p];
    for l in 0..p {
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for c in 0..imm.ambient_dim() {
                    acc += jet.hessians[c][(l, i)] * jet.jacobian[(c, j)]
                        + jet.jacobian[(c, i)] * jet.hessians[c][(l, j)];
                }
                dg[l][(i, j)] = acc;
            }
        }
    }

    // Christoffel symbols of the second kind
    let mut gamma = vec![RMat::zeros(p, p); p]; // gamma[m][(i, j)]
    for m in 0..p {
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for k in 0..p {
                    acc += ginv[(m, k)] * 0.5 * (dg[i][(j, k)] + dg[j][(i, k)] - dg[k][(i, j)]);
                }
                gamma[m][(i, j)] = acc;
            }
        }
    }

    // coefficient jets of mu
    let mut mu_val = RVec::zeros(p);
    let mut dmu_coord = RMat::zeros(p, p); // d_i mu_j
    for (j, c) in mu.coefficients().iter().enumerate() {
        let jj = c.eval_jet2(u)?;
        mu_val[j] = jj.value;
        for i in 0..p {
            dmu_coord[(i, j)] = jj.gradient[i];
        }
    }

    // (nabla mu)_ij = d_i mu_j - Gamma^m_ij mu_m, in coordinates
    let mut cov_coord = RMat::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut acc = dmu_coord[(i, j)];
            for m in 0..p {
                acc -= gamma[m][(i, j)] * mu_val[m];
            }
            cov_coord[(i, j)] = acc;
        }
    }

    let covariant = &fp.chart * cov_coord * fp.chart.transpose();
    let symmetrized = (&covariant + covariant.transpose()) * 0.5;
    let curl = &covariant - covariant.transpose();
    let codifferential = -symmetrized.trace();

    Ok(OneFormData {
        covariant,
        symmetrized,
        curl,
        codifferential,
    })
}

impl FramePoint {
    /// Domain dimension.
    pub fn p(&self) -> usize {
        self.tangent.len()
    }

    /// Codimension.
    pub fn q(&self) -> usize {
        self.normal.len()
    }
}
