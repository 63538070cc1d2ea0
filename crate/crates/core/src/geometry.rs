//! The kinematic structure: clock form Ω, spatial frame and metric on
//! Ann Ω, observer fields and the spatial projector they induce.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::jet::PointFrame;
use crate::report::{CheckReport, ResidualStats};

/// Tangent vector components at a point.
pub type VectorValue = DVector<f64>;
/// Covector components at a point.
pub type CovectorValue = DVector<f64>;

/// Below this absolute value of max |Ω_i| the clock form counts as vanishing.
pub const OMEGA_NONZERO: f64 = 1e-12;
/// Below this |det h| the spatial metric counts as singular.
pub const METRIC_DET_MIN: f64 = 1e-10;
/// Tolerance on Ω(v) for vectors handed in from outside (integration drift etc).
pub const SPATIAL_INPUT_TOL: f64 = 1e-6;
/// Tolerance on Ω(z) - 1 before an observer is rejected outright.
pub const OBSERVER_INPUT_TOL: f64 = 1e-6;
/// Tolerance for values this crate produces by exact algebra.
pub const ALGEBRAIC_TOL: f64 = 1e-9;
/// Relative threshold on the R diagonal below which the frame has lost rank.
pub const FRAME_RANK_TOL: f64 = 1e-10;

/// A vector field given by coordinate components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField(pub Vec<Expr>);

impl VectorField {
    /// The coordinate field ∂_i on an m-dimensional chart.
    pub fn coordinate(m: usize, i: usize) -> Self {
        VectorField(
            (0..m)
                .map(|k| expr::constant(if k == i { 1.0 } else { 0.0 }))
                .collect(),
        )
    }

    pub fn zero(m: usize) -> Self {
        VectorField(vec![Expr::zero(); m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.0
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<VectorValue> {
        let mut out = DVector::zeros(self.0.len());
        for (k, c) in self.0.iter().enumerate() {
            out[k] = c.evaluate(p)?;
        }
        Ok(out)
    }

    /// Pointwise product f·X.
    pub fn scaled(&self, f: &Expr) -> Self {
        VectorField(
            self.0
                .iter()
                .map(|c| expr::mul(f.clone(), c.clone()))
                .collect(),
        )
    }

    /// Jacobian exprs, `d[i][k] = ∂_i X^k`.
    pub fn partials(&self) -> Vec<Vec<Expr>> {
        let m = self.0.len();
        (0..m)
            .map(|i| self.0.iter().map(|c| c.differentiate(i)).collect())
            .collect()
    }

    /// Directional derivative X(f) as an expression.
    pub fn apply_to(&self, f: &Expr) -> Expr {
        self.0
            .iter()
            .enumerate()
            .fold(Expr::zero(), |acc, (i, xi)| {
                expr::add(acc, expr::mul(xi.clone(), f.differentiate(i)))
            })
    }
}

/// Field of observers: a vector field z with Ω(z) = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverField {
    pub z: VectorField,
}

impl ObserverField {
    pub fn new(z: VectorField) -> Self {
        ObserverField { z }
    }
}

/// Chart, clock form, spatial frame and spatial metric, plus the sampling
/// box used for verification.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeStructure {
    coord_names: Vec<String>,
    omega: Vec<Expr>,
    frame: Vec<VectorField>,
    // Upper triangle, row major: h11, h12, .., h1n, h22, ..
    metric: Vec<Expr>,
    domain: Vec<(f64, f64)>,
    sample_count: usize,
    seed: u64,
}

fn upper_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * n - a * (a + 1) / 2 + b
}

impl SpacetimeStructure {
    /// `metric` is the full n×n matrix; only its upper triangle is kept, so
    /// symmetry holds by construction.
    pub fn new(
        coord_names: Vec<String>,
        omega: Vec<Expr>,
        frame: Vec<VectorField>,
        metric: Vec<Vec<Expr>>,
        domain: Vec<(f64, f64)>,
        sample_count: usize,
        seed: u64,
    ) -> Result<Self> {
        let m = coord_names.len();
        if m < 2 {
            return Err(Error::DimensionMismatch(format!(
                "chart dimension must be at least 2, got {m}"
            )));
        }
        let n = m - 1;
        let mismatch = |what: &str, expected: usize, found: usize| {
            Error::DimensionMismatch(format!("{what}: expected {expected}, found {found}"))
        };
        if omega.len() != m {
            return Err(mismatch("omega components", m, omega.len()));
        }
        if frame.len() != n {
            return Err(mismatch("frame fields", n, frame.len()));
        }
        for e in &frame {
            if e.dim() != m {
                return Err(mismatch("frame field components", m, e.dim()));
            }
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("metric must be {n}×{n}")));
        }
        if domain.len() != m {
            return Err(mismatch("domain intervals", m, domain.len()));
        }
        if let Some((lo, hi)) = domain.iter().find(|(lo, hi)| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidArgument(format!(
                "empty domain interval [{lo}, {hi}]"
            )));
        }
        let all = omega
            .iter()
            .chain(frame.iter().flat_map(|e| e.0.iter()))
            .chain(metric.iter().flatten());
        for e in all {
            if let Some(i) = e.max_coord() {
                if i >= m {
                    return Err(mismatch("coordinate index bound", m, i + 1));
                }
            }
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for (a, row) in metric.into_iter().enumerate() {
            upper.extend(row.into_iter().skip(a));
        }
        Ok(SpacetimeStructure {
            coord_names,
            omega,
            frame,
            metric: upper,
            domain,
            sample_count,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    /// Number of spatial directions, n = m - 1.
    pub fn spatial_dim(&self) -> usize {
        self.dim() - 1
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn omega(&self) -> &[Expr] {
        &self.omega
    }

    pub fn frame(&self) -> &[VectorField] {
        &self.frame
    }

    /// h_ab (0-based frame indices).
    pub fn metric(&self, a: usize, b: usize) -> &Expr {
        &self.metric[upper_index(self.spatial_dim(), a, b)]
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_sampling(mut self, sample_count: usize, seed: u64) -> Self {
        self.sample_count = sample_count;
        self.seed = seed;
        self
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(&self.domain)
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Uniform samples from the domain box. Points are drawn sequentially
    /// from a seeded stream, so a larger sample extends a smaller one.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.sample_count)
            .map(|_| {
                self.domain
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                    .collect()
            })
            .collect()
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {}",
                p.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn check_vector(&self, v: &VectorValue) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} components, chart has {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn omega_at(&self, p: &[f64]) -> Result<CovectorValue> {
        self.check_point(p)?;
        let mut out = DVector::zeros(self.dim());
        for (i, c) in self.omega.iter().enumerate() {
            out[i] = c.evaluate(p)?;
        }
        Ok(out)
    }

    /// Ω(v) at p.
    pub fn omega_apply(&self, v: &VectorValue, p: &[f64]) -> Result<f64> {
        self.check_vector(v)?;
        Ok(self.omega_at(p)?.dot(v))
    }

    /// P_z(v) = v - Ω(v) z at p.
    pub fn project_spatial(
        &self,
        z: &ObserverField,
        v: &VectorValue,
        p: &[f64],
    ) -> Result<VectorValue> {
        self.check_vector(v)?;
        let omega = self.omega_at(p)?;
        let zp = z.z.evaluate(p)?;
        let norm = omega.dot(&zp);
        if (norm - 1.0).abs() > OBSERVER_INPUT_TOL {
            return Err(Error::ObserverInvalid {
                point: p.to_vec(),
                value: norm,
            });
        }
        Ok(v - zp * omega.dot(v))
    }

    /// dΩ(X, Y) = X(Ω(Y)) - Y(Ω(X)) - Ω([X, Y]) at p, from symbolic partials.
    pub fn d_omega(&self, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        let pair = |v: &VectorField| {
            self.omega
                .iter()
                .zip(&v.0)
                .fold(Expr::zero(), |acc, (o, c)| {
                    expr::add(acc, expr::mul(o.clone(), c.clone()))
                })
        };
        let x_of_omega_y = x.apply_to(&pair(y)).evaluate(p)?;
        let y_of_omega_x = y.apply_to(&pair(x)).evaluate(p)?;
        let bracket = lie_bracket(x, y).evaluate(p)?;
        Ok(x_of_omega_y - y_of_omega_x - self.omega_apply(&bracket, p)?)
    }

    /// Frame components E_a^k at p as an m×n matrix.
    pub fn frame_matrix(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let (m, n) = (self.dim(), self.spatial_dim());
        let mut e = DMatrix::zeros(m, n);
        for (a, field) in self.frame.iter().enumerate() {
            for (k, c) in field.0.iter().enumerate() {
                e[(k, a)] = c.evaluate(p)?;
            }
        }
        Ok(e)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let n = self.spatial_dim();
        let mut h = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = self.metric(a, b).evaluate(p)?;
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        Ok(h)
    }

    /// Coefficients v^a with v = v^a E_a(p).
    pub fn frame_decompose(&self, v: &VectorValue, p: &[f64]) -> Result<DVector<f64>> {
        self.check_vector(v)?;
        let omega = self.omega_at(p)?;
        let frame = PointFrame::new(self.frame_matrix(p)?, p)?;
        frame.decompose_checked(&omega, v)
    }

    /// ⟨v, w⟩ = v^a h_ab w^b for spatial v, w.
    pub fn inner(&self, v: &VectorValue, w: &VectorValue, p: &[f64]) -> Result<f64> {
        let vc = self.frame_decompose(v, p)?;
        let wc = self.frame_decompose(w, p)?;
        Ok((self.metric_at(p)? * wc).dot(&vc))
    }
}

/// [X, Y]^k = X^i ∂_i Y^k - Y^i ∂_i X^k, built symbolically.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField(
        (0..x.dim())
            .map(|k| {
                let dy = x.apply_to(&y.0[k]);
                let dx = y.apply_to(&x.0[k]);
                expr::sub(dy, dx)
            })
            .collect(),
    )
}

pub const ENTRY_DIMENSION: &str = "dimension";
pub const ENTRY_OMEGA_NONZERO: &str = "Ω nonvanishing";
pub const ENTRY_OBSERVER: &str = "observer normalization";
pub const ENTRY_FRAME_ANN: &str = "frame in Ann Ω";
pub const ENTRY_FRAME_RANK: &str = "frame rank";
pub const ENTRY_METRIC_NONDEGENERATE: &str = "metric nondegenerate";

/// Checks the structural invariants at every sample point. Evaluation
/// failures count as infinite residuals.
pub fn validate_structure(s: &SpacetimeStructure, z: &ObserverField) -> CheckReport {
    let mut dim = ResidualStats::new(ENTRY_DIMENSION, 0.0);
    let mut nonzero = ResidualStats::new(ENTRY_OMEGA_NONZERO, 0.0);
    let mut observer = ResidualStats::new(ENTRY_OBSERVER, ALGEBRAIC_TOL);
    let mut annihilated = ResidualStats::new(ENTRY_FRAME_ANN, ALGEBRAIC_TOL);
    let mut rank = ResidualStats::new(ENTRY_FRAME_RANK, 0.0);
    let mut nondegenerate = ResidualStats::new(ENTRY_METRIC_NONDEGENERATE, 0.0);

    let dim_ok = s.dim() >= 2 && z.z.dim() == s.dim();
    for p in s.sample_points() {
        dim.push(if dim_ok { 0.0 } else { 1.0 }, &p);
        let omega = s.omega_at(&p);
        nonzero.push_result(
            omega
                .as_ref()
                .map(|o| (OMEGA_NONZERO - o.amax()).max(0.0))
                .map_err(Clone::clone),
            &p,
        );
        observer.push_result(
            omega.clone().and_then(|o| {
                let zp = z.z.evaluate(&p)?;
                Ok((o.dot(&zp) - 1.0).abs())
            }),
            &p,
        );
        let frame = s.frame_matrix(&p);
        annihilated.push_result(
            omega.clone().and_then(|o| {
                let e = frame.clone()?;
                Ok((e.transpose() * o).amax())
            }),
            &p,
        );
        rank.push_result(
            frame.map(|e| {
                if PointFrame::has_full_rank(&e) {
                    0.0
                } else {
                    1.0
                }
            }),
            &p,
        );
        nondegenerate.push_result(
            s.metric_at(&p)
                .map(|h| (METRIC_DET_MIN - h.determinant().abs()).max(0.0)),
            &p,
        );
    }
    CheckReport::from_stats([dim, nonzero, observer, annihilated, rank, nondegenerate])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use nalgebra::dvector;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn field(src: &[&str], coords: &[String]) -> VectorField {
        VectorField(src.iter().map(|s| parse_expr(s, coords).unwrap()).collect())
    }

    fn structure(
        coords: &[&str],
        omega: &[&str],
        frame: &[&[&str]],
        metric: &[&[&str]],
        bounds: f64,
    ) -> SpacetimeStructure {
        let c = names(coords);
        SpacetimeStructure::new(
            c.clone(),
            omega.iter().map(|s| parse_expr(s, &c).unwrap()).collect(),
            frame.iter().map(|f| field(f, &c)).collect(),
            metric
                .iter()
                .map(|row| row.iter().map(|s| parse_expr(s, &c).unwrap()).collect())
                .collect(),
            vec![(-bounds, bounds); c.len()],
            50,
            7,
        )
        .unwrap()
    }

    fn flat() -> SpacetimeStructure {
        structure(&["t", "x"], &["1", "0"], &[&["0", "1"]], &[&["1"]], 1.0)
    }

    fn twist() -> SpacetimeStructure {
        structure(
            &["t", "x", "y"],
            &["1", "0", "x"],
            &[&["0", "1", "0"], &["-x", "0", "1"]],
            &[&["1", "0"], &["0", "1"]],
            3.0,
        )
    }

    #[test]
    fn omega_apply_examples() {
        let s = flat();
        assert_eq!(
            s.omega_apply(&dvector![1.0, 0.0], &[0.2, 0.4]).unwrap(),
            1.0
        );
        assert_eq!(
            s.omega_apply(&dvector![0.0, 1.0], &[0.2, 0.4]).unwrap(),
            0.0
        );
        let t = twist();
        assert_eq!(
            t.omega_apply(&dvector![0.0, 0.0, 1.0], &[0.0, 2.0, 0.0])
                .unwrap(),
            2.0
        );
    }

    #[test]
    fn projector_examples() {
        let t = twist();
        let c = names(&["t", "x", "y"]);
        let z = ObserverField::new(field(&["1", "0", "0"], &c));
        let p = [0.0, 2.0, 0.0];
        let pz = t.project_spatial(&z, &dvector![1.0, 0.0, 0.0], &p).unwrap();
        assert_eq!(pz, dvector![0.0, 0.0, 0.0]);
        let spatial = dvector![-2.0, 0.0, 1.0];
        assert_eq!(t.project_spatial(&z, &spatial, &p).unwrap(), spatial);
        let v = dvector![0.0, 0.0, 1.0];
        assert_eq!(
            t.project_spatial(&z, &v, &p).unwrap(),
            dvector![-2.0, 0.0, 1.0]
        );
    }

    #[test]
    fn projector_rejects_unnormalized_observer() {
        let s = flat();
        let z = ObserverField::new(field(&["2", "0"], s.coord_names()));
        let err = s
            .project_spatial(&z, &dvector![0.0, 1.0], &[0.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, Error::ObserverInvalid { value, .. } if value == 2.0));
    }

    #[test]
    fn bracket_examples() {
        let c = names(&["t", "x"]);
        let dt = VectorField::coordinate(2, 0);
        let dx = VectorField::coordinate(2, 1);
        let zero = lie_bracket(&dt, &dx).evaluate(&[0.3, 0.1]).unwrap();
        assert_eq!(zero, dvector![0.0, 0.0]);
        let x_dt = field(&["x", "0"], &c);
        let b = lie_bracket(&x_dt, &dx).evaluate(&[0.3, 0.1]).unwrap();
        assert_eq!(b, dvector![-1.0, 0.0]);
        let w = field(&["t*x", "sin(t)"], &c);
        let self_bracket = lie_bracket(&w, &w).evaluate(&[0.3, 0.1]).unwrap();
        assert_eq!(self_bracket, dvector![0.0, 0.0]);
    }

    #[test]
    fn d_omega_examples() {
        let s = flat();
        let c = s.coord_names().to_vec();
        let x = field(&["t", "x^2"], &c);
        let y = field(&["1", "t*x"], &c);
        assert_eq!(s.d_omega(&x, &y, &[0.4, -0.2]).unwrap(), 0.0);

        let t = twist();
        let dx = VectorField::coordinate(3, 1);
        let dy = VectorField::coordinate(3, 2);
        for p in t.sample_points() {
            assert_eq!(t.d_omega(&dx, &dy, &p).unwrap(), 1.0);
            assert_eq!(t.d_omega(&dx, &dx, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn d_omega_matches_finite_difference_exterior_derivative() {
        // dΩ_ij = ∂_i Ω_j - ∂_j Ω_i, with ∂ by central differences.
        let c = names(&["t", "x", "y"]);
        let s = structure(
            &["t", "x", "y"],
            &["1 + x*y", "sin(t)", "x^2"],
            &[&["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0"], &["0", "1"]],
            1.0,
        );
        let h = 1e-5;
        let fd = |j: usize, i: usize, p: &[f64]| {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[i] += h;
            b[i] -= h;
            (s.omega()[j].evaluate(&a).unwrap() - s.omega()[j].evaluate(&b).unwrap()) / (2.0 * h)
        };
        let x = field(&["1", "t", "x"], &c);
        let y = field(&["y", "1", "t*x"], &c);
        for p in s.sample_points() {
            let xv = x.evaluate(&p).unwrap();
            let yv = y.evaluate(&p).unwrap();
            let mut expected = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    expected += (fd(j, i, &p) - fd(i, j, &p)) * xv[i] * yv[j];
                }
            }
            let got = s.d_omega(&x, &y, &p).unwrap();
            assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
            let swapped = s.d_omega(&y, &x, &p).unwrap();
            assert!((got + swapped).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_decompose_examples() {
        let t = twist();
        let p = [0.0, 2.0, 0.0];
        let e1 = t.frame()[0].evaluate(&p).unwrap();
        let c = t.frame_decompose(&e1, &p).unwrap();
        assert!((c - dvector![1.0, 0.0]).amax() < 1e-15);
        assert_eq!(
            t.frame_decompose(&dvector![0.0, 0.0, 0.0], &p).unwrap(),
            dvector![0.0, 0.0]
        );
        let c = t.frame_decompose(&dvector![-2.0, 0.0, 1.0], &p).unwrap();
        assert!((c - dvector![0.0, 1.0]).amax() < 1e-12);
        let err = t.frame_decompose(&dvector![1.0, 0.0, 0.0], &p).unwrap_err();
        assert!(matches!(err, Error::NotSpatial(_)));
    }

    #[test]
    fn degenerate_frame_is_reported() {
        let s = structure(
            &["t", "x", "y"],
            &["1", "0", "0"],
            &[&["0", "1", "0"], &["0", "2", "0"]],
            &[&["1", "0"], &["0", "1"]],
            1.0,
        );
        let err = s
            .frame_decompose(&dvector![0.0, 1.0, 0.0], &[0.0, 0.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, Error::FrameDegenerate(_)));
    }

    #[test]
    fn inner_examples() {
        let t = twist();
        let p = [0.1, 2.0, -1.0];
        let e1 = t.frame()[0].evaluate(&p).unwrap();
        assert!((t.inner(&e1, &e1, &p).unwrap() - 1.0).abs() < 1e-14);

        let ind = structure(
            &["t", "x", "y"],
            &["1", "0", "0"],
            &[&["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0"], &["0", "-1"]],
            1.0,
        );
        let e2 = ind.frame()[1].evaluate(&p).unwrap();
        assert!((ind.inner(&e2, &e2, &p).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn validate_examples() {
        let s = flat();
        let c = s.coord_names().to_vec();
        let good = ObserverField::new(field(&["1", "0"], &c));
        assert!(validate_structure(&s, &good).pass);

        let bad = ObserverField::new(field(&["2", "0"], &c));
        let report = validate_structure(&s, &bad);
        assert!(!report.pass);
        let failing: Vec<_> = report.entries.iter().filter(|e| !e.pass).collect();
        assert_eq!(failing.len(), 1);
        assert_eq!(failing[0].name, ENTRY_OBSERVER);
        assert_eq!(failing[0].max, 1.0);

        let c3 = names(&["t", "x", "y"]);
        let broken = structure(
            &["t", "x", "y"],
            &["1", "0", "x"],
            &[&["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0"], &["0", "1"]],
            3.0,
        );
        let z = ObserverField::new(field(&["1", "0", "0"], &c3));
        let report = validate_structure(&broken, &z);
        let entry = report.entry(ENTRY_FRAME_ANN).unwrap();
        assert!(!entry.pass);
        // Worst point is where |x| is largest; the residual there is |x|.
        assert_eq!(entry.max, entry.worst_point[1].abs());
    }

    #[test]
    fn constructor_rejects_bad_arity() {
        let c = names(&["t", "x", "y"]);
        let err = SpacetimeStructure::new(
            c.clone(),
            vec![Expr::one(), Expr::zero(), Expr::zero()],
            vec![VectorField::coordinate(3, 1), VectorField::coordinate(3, 2)],
            vec![vec![Expr::one(); 3]; 3],
            vec![(-1.0, 1.0); 3],
            10,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
