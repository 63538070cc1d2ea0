//! First-order jets of the structure fields at a single point.
//!
//! The connection builder needs values and first partials of Ω, z, the
//! frame and the metric, and of fields derived from them (projections,
//! brackets, inner products of spatial fields). Everything here is exact
//! up to rounding: partials come from symbolic derivatives, and the only
//! numeric step is the per-point frame solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{
    ObserverField, SpacetimeStructure, VectorField, FRAME_RANK_TOL, METRIC_DET_MIN,
    OBSERVER_INPUT_TOL, SPATIAL_INPUT_TOL,
};

/// Value and gradient of a scalar field at a point.
#[derive(Clone, Debug)]
pub(crate) struct ScalarJet {
    pub val: f64,
    pub grad: DVector<f64>,
}

/// Value and Jacobian of a vector field; `jac[(k, i)] = ∂_i V^k`.
#[derive(Clone, Debug)]
pub(crate) struct VectorJet {
    pub val: DVector<f64>,
    pub jac: DMatrix<f64>,
}

impl VectorJet {
    pub fn constant(val: DVector<f64>) -> Self {
        let m = val.len();
        VectorJet {
            val,
            jac: DMatrix::zeros(m, m),
        }
    }

    /// Derivative of the field along `dir`.
    pub fn along(&self, dir: &DVector<f64>) -> DVector<f64> {
        &self.jac * dir
    }
}

/// An expression bundled with its partial derivatives.
#[derive(Clone, Debug)]
pub(crate) struct SmoothScalar {
    f: Expr,
    df: Vec<Expr>,
}

impl SmoothScalar {
    pub fn new(f: &Expr, m: usize) -> Self {
        SmoothScalar {
            f: f.clone(),
            df: (0..m).map(|i| f.differentiate(i)).collect(),
        }
    }

    pub fn jet(&self, p: &[f64]) -> Result<ScalarJet> {
        let mut grad = DVector::zeros(self.df.len());
        for (i, d) in self.df.iter().enumerate() {
            grad[i] = d.evaluate(p)?;
        }
        Ok(ScalarJet {
            val: self.f.evaluate(p)?,
            grad,
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SmoothVector(Vec<SmoothScalar>);

impl SmoothVector {
    pub fn new(components: &[Expr]) -> Self {
        let m = components.len();
        SmoothVector(components.iter().map(|c| SmoothScalar::new(c, m)).collect())
    }

    pub fn from_field(field: &VectorField) -> Self {
        Self::new(field.components())
    }

    pub fn jet(&self, p: &[f64]) -> Result<VectorJet> {
        let m = self.0.len();
        let mut val = DVector::zeros(m);
        let mut jac = DMatrix::zeros(m, m);
        for (k, c) in self.0.iter().enumerate() {
            let j = c.jet(p)?;
            val[k] = j.val;
            jac.row_mut(k).copy_from(&j.grad.transpose());
        }
        Ok(VectorJet { val, jac })
    }
}

/// The structure fields with their partials, ready for repeated pointwise
/// evaluation.
#[derive(Clone, Debug)]
pub(crate) struct PreparedStructure {
    omega: SmoothVector,
    z: SmoothVector,
    frame: Vec<SmoothVector>,
    metric: Vec<Vec<SmoothScalar>>,
}

impl PreparedStructure {
    pub fn new(s: &SpacetimeStructure, z: &ObserverField) -> Self {
        let m = s.dim();
        let n = s.spatial_dim();
        PreparedStructure {
            omega: SmoothVector::new(s.omega()),
            z: SmoothVector::from_field(&z.z),
            frame: s.frame().iter().map(SmoothVector::from_field).collect(),
            metric: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| SmoothScalar::new(s.metric(a, b), m))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn at(&self, p: &[f64]) -> Result<PointGeometry> {
        let n = self.frame.len();
        let omega = self.omega.jet(p)?;
        let z = self.z.jet(p)?;
        let norm = omega.val.dot(&z.val);
        if (norm - 1.0).abs() > OBSERVER_INPUT_TOL {
            return Err(Error::ObserverInvalid {
                point: p.to_vec(),
                value: norm,
            });
        }
        let frame = self
            .frame
            .iter()
            .map(|f| f.jet(p))
            .collect::<Result<Vec<_>>>()?;
        let m = p.len();
        let mut e = DMatrix::zeros(m, n);
        for (a, f) in frame.iter().enumerate() {
            e.set_column(a, &f.val);
        }
        let solver = PointFrame::new(e, p)?;
        let mut h = DMatrix::zeros(n, n);
        let mut dh = vec![DMatrix::zeros(n, n); m];
        for a in 0..n {
            for b in 0..n {
                let j = self.metric[a][b].jet(p)?;
                h[(a, b)] = j.val;
                for (i, dhi) in dh.iter_mut().enumerate() {
                    dhi[(a, b)] = j.grad[i];
                }
            }
        }
        let det = h.determinant();
        if det.abs() <= METRIC_DET_MIN {
            return Err(Error::MetricSingular {
                point: p.to_vec(),
                det,
            });
        }
        Ok(PointGeometry {
            omega,
            z,
            frame,
            solver,
            h,
            dh,
        })
    }
}

/// Least-squares solver for the frame at one point (thin QR).
#[derive(Clone, Debug)]
pub(crate) struct PointFrame {
    e: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl PointFrame {
    fn r_is_regular(r: &DMatrix<f64>) -> bool {
        let diag = r.diagonal().map(f64::abs);
        let largest = diag.max();
        largest > 0.0 && diag.min() > FRAME_RANK_TOL * largest
    }

    pub fn has_full_rank(e: &DMatrix<f64>) -> bool {
        e.ncols() == 0 || Self::r_is_regular(&e.clone().qr().r())
    }

    pub fn new(e: DMatrix<f64>, p: &[f64]) -> Result<Self> {
        let qr = e.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        if e.ncols() > 0 && !Self::r_is_regular(&r) {
            return Err(Error::FrameDegenerate(p.to_vec()));
        }
        Ok(PointFrame { e, q, r })
    }

    pub fn decompose(&self, v: &DVector<f64>) -> DVector<f64> {
        let rhs = self.q.transpose() * v;
        self.r
            .solve_upper_triangular(&rhs)
            .expect("R checked regular at construction")
    }

    pub fn decompose_checked(
        &self,
        omega: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let clock = omega.dot(v);
        if clock.abs() > SPATIAL_INPUT_TOL {
            return Err(Error::NotSpatial(clock));
        }
        Ok(self.decompose(v))
    }

    pub fn recompose(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.e * c
    }
}

/// Jets of all structure fields at one point.
#[derive(Clone, Debug)]
pub(crate) struct PointGeometry {
    pub omega: VectorJet,
    pub z: VectorJet,
    pub frame: Vec<VectorJet>,
    pub solver: PointFrame,
    pub h: DMatrix<f64>,
    pub dh: Vec<DMatrix<f64>>,
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.omega.val.len()
    }

    pub fn coordinate(&self, i: usize) -> VectorJet {
        let mut e = DVector::zeros(self.dim());
        e[i] = 1.0;
        VectorJet::constant(e)
    }

    pub fn omega_of(&self, v: &DVector<f64>) -> f64 {
        self.omega.val.dot(v)
    }

    /// Ω(V) as a scalar jet.
    pub fn omega_jet(&self, v: &VectorJet) -> ScalarJet {
        ScalarJet {
            val: self.omega.val.dot(&v.val),
            grad: self.omega.jac.transpose() * &v.val + v.jac.transpose() * &self.omega.val,
        }
    }

    /// P_z(V) = V - Ω(V) z as a field jet.
    pub fn project(&self, v: &VectorJet) -> VectorJet {
        let s = self.omega_jet(v);
        VectorJet {
            val: &v.val - &self.z.val * s.val,
            jac: &v.jac - &self.z.val * s.grad.transpose() - &self.z.jac * s.val,
        }
    }

    /// [U, W] at the point.
    pub fn bracket(&self, u: &VectorJet, w: &VectorJet) -> DVector<f64> {
        w.along(&u.val) - u.along(&w.val)
    }

    /// dΩ(U, W) = U(Ω(W)) - W(Ω(U)) - Ω([U, W]).
    pub fn d_omega(&self, u: &VectorJet, w: &VectorJet) -> f64 {
        let ow = self.omega_jet(w);
        let ou = self.omega_jet(u);
        ow.grad.dot(&u.val) - ou.grad.dot(&w.val) - self.omega_of(&self.bracket(u, w))
    }

    pub fn decompose(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.solver.decompose_checked(&self.omega.val, v)
    }

    pub fn inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        let vc = self.decompose(v)?;
        let wc = self.decompose(w)?;
        Ok(vc.dot(&(&self.h * wc)))
    }

    // Frame coefficients of a spatial field and their partials. With U = E u,
    // ∂_i u solves E ∂_i u = ∂_i U - (∂_i E) u.
    pub fn coefficient_jet(&self, v: &VectorJet) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
        let c = self.decompose(&v.val)?;
        let m = self.dim();
        let mut dc = Vec::with_capacity(m);
        for i in 0..m {
            let mut rhs = v.jac.column(i).into_owned();
            for (a, e) in self.frame.iter().enumerate() {
                rhs -= e.jac.column(i) * c[a];
            }
            dc.push(self.decompose(&rhs)?);
        }
        Ok((c, dc))
    }

    /// ⟨U, W⟩ as a scalar jet, for spatial fields U, W.
    pub fn inner_jet(&self, u: &VectorJet, w: &VectorJet) -> Result<ScalarJet> {
        let (uc, duc) = self.coefficient_jet(u)?;
        let (wc, dwc) = self.coefficient_jet(w)?;
        let hw = &self.h * &wc;
        let mut grad = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            grad[i] = duc[i].dot(&hw) + uc.dot(&(&self.dh[i] * &wc)) + uc.dot(&(&self.h * &dwc[i]));
        }
        Ok(ScalarJet {
            val: uc.dot(&hw),
            grad,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn curved() -> (SpacetimeStructure, ObserverField) {
        let c: Vec<String> = ["t", "x", "y"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| parse_expr(s, &c).unwrap();
        let s = SpacetimeStructure::new(
            c.clone(),
            vec![p("1"), p("0"), p("0.3*sin(x)")],
            vec![
                VectorField(vec![p("0"), p("1"), p("0")]),
                VectorField(vec![p("-0.3*sin(x)"), p("0"), p("1")]),
            ],
            vec![
                vec![p("exp(0.2*y)"), p("0.1*sin(t)")],
                vec![p("0.1*sin(t)"), p("1 + 0.1*cos(x)")],
            ],
            vec![(-1.0, 1.0); 3],
            20,
            11,
        )
        .unwrap();
        let z = ObserverField::new(VectorField(vec![p("1"), p("0.2*sin(y)"), p("0")]));
        (s, z)
    }

    #[test]
    fn inner_jet_gradient_matches_finite_difference() {
        let (s, z) = curved();
        let prep = PreparedStructure::new(&s, &z);
        let h = 1e-5;
        for p in s.sample_points() {
            let geo = prep.at(&p).unwrap();
            let pi = geo.project(&geo.coordinate(1));
            let pj = geo.project(&geo.coordinate(2));
            let jet = geo.inner_jet(&pi, &pj).unwrap();
            for i in 0..3 {
                let eval = |q: &[f64]| {
                    let g = prep.at(q).unwrap();
                    let a = g.project(&g.coordinate(1));
                    let b = g.project(&g.coordinate(2));
                    g.inner_jet(&a, &b).unwrap().val
                };
                let mut a = p.clone();
                let mut b = p.clone();
                a[i] += h;
                b[i] -= h;
                let fd = (eval(&a) - eval(&b)) / (2.0 * h);
                assert!((fd - jet.grad[i]).abs() < 1e-8, "{fd} vs {}", jet.grad[i]);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_spatial() {
        let (s, z) = curved();
        let prep = PreparedStructure::new(&s, &z);
        for p in s.sample_points() {
            let geo = prep.at(&p).unwrap();
            for i in 0..3 {
                let once = geo.project(&geo.coordinate(i));
                let twice = geo.project(&once);
                assert!((&once.val - &twice.val).amax() < 1e-12);
                assert!(geo.omega_of(&once.val).abs() < 1e-12);
            }
            let pz = geo.project(&geo.z);
            assert!(pz.val.amax() < 1e-12);
        }
    }

    #[test]
    fn decompose_inverts_recompose() {
        let (s, z) = curved();
        let prep = PreparedStructure::new(&s, &z);
        for p in s.sample_points() {
            let geo = prep.at(&p).unwrap();
            let c = DVector::from_vec(vec![0.7, -1.3]);
            let v = geo.solver.recompose(&c);
            assert!((geo.decompose(&v).unwrap() - c).amax() < 1e-12);
        }
    }
}
