//! Generalized connections: construction from (gravity, Coriolis, spatial
//! torsion) data and the observables that recover that data.
//!
//! For a fixed observer z, a connection with ∇Ω = 0 and ∇h = 0 is fixed by
//! its temporal part, Ω(∇_X Y) = X(Ω(Y)), and by the spatial projections
//! ⟨P_z(∇_X Y), V⟩, which a Koszul-type identity expresses through the
//! metric, the data (𝒢, ω, Θ) and A(X, Y) = ∇_X Y - ∇_Y X. Since
//! A = Θ + dΩ·z + [·,·] only depends on the data, the identity can be
//! solved point by point for the Christoffel coefficients.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::geometry::{ObserverField, SpacetimeStructure, VectorField, VectorValue};
use crate::jet::{PointGeometry, PreparedStructure, SmoothVector, VectorJet};

/// Coordinates of a connection under the observer map: gravity 𝒢 (frame
/// components), Coriolis form ω (strict upper triangle in the frame) and
/// spatial torsion Θ (Θ(∂_i, ∂_j) = Θ^a_ij E_a, stored for i < j).
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    m: usize,
    gravity: Vec<Expr>,
    coriolis: Vec<Expr>,
    theta: Vec<Expr>,
}

fn pair_index(size: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < size);
    a * (2 * size - a - 1) / 2 + (b - a - 1)
}

impl ConnectionData {
    /// All-zero data on an m-dimensional chart.
    pub fn zero(m: usize) -> Self {
        let n = m - 1;
        ConnectionData {
            m,
            gravity: vec![Expr::zero(); n],
            coriolis: vec![Expr::zero(); n * n.saturating_sub(1) / 2],
            theta: vec![Expr::zero(); n * m * (m - 1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn spatial_dim(&self) -> usize {
        self.m - 1
    }

    pub fn gravity(&self) -> &[Expr] {
        &self.gravity
    }

    pub fn set_gravity(&mut self, components: Vec<Expr>) -> Result<()> {
        if components.len() != self.spatial_dim() {
            return Err(Error::DimensionMismatch(format!(
                "gravity needs {} frame components, got {}",
                self.spatial_dim(),
                components.len()
            )));
        }
        self.gravity = components;
        Ok(())
    }

    /// ω_ab for a < b (0-based frame indices).
    pub fn coriolis(&self, a: usize, b: usize) -> &Expr {
        &self.coriolis[pair_index(self.spatial_dim(), a, b)]
    }

    /// Sets ω_ab; ω_ba = -ω_ab is implied.
    pub fn set_coriolis(&mut self, a: usize, b: usize, e: Expr) -> Result<()> {
        let n = self.spatial_dim();
        if a == b || a >= n || b >= n {
            return Err(Error::DimensionMismatch(format!(
                "coriolis index ({a}, {b}) invalid for {n} frame fields"
            )));
        }
        let (lo, hi, e) = if a < b {
            (a, b, e)
        } else {
            (b, a, expr::neg(e))
        };
        self.coriolis[pair_index(n, lo, hi)] = e;
        Ok(())
    }

    /// Θ^a_ij for i < j.
    pub fn theta(&self, a: usize, i: usize, j: usize) -> &Expr {
        let pairs = self.m * (self.m - 1) / 2;
        &self.theta[a * pairs + pair_index(self.m, i, j)]
    }

    /// Sets Θ^a_ij; Θ^a_ji = -Θ^a_ij is implied.
    pub fn set_theta(&mut self, a: usize, i: usize, j: usize, e: Expr) -> Result<()> {
        let (m, n) = (self.m, self.spatial_dim());
        if a >= n || i == j || i >= m || j >= m {
            return Err(Error::DimensionMismatch(format!(
                "theta index ({a}; {i}, {j}) invalid for chart of dimension {m}"
            )));
        }
        let (lo, hi, e) = if i < j {
            (i, j, e)
        } else {
            (j, i, expr::neg(e))
        };
        let pairs = m * (m - 1) / 2;
        self.theta[a * pairs + pair_index(m, lo, hi)] = e;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.exprs().all(Expr::is_zero)
    }

    /// Every expression in the data: gravity, Coriolis, then Θ.
    pub fn exprs(&self) -> impl Iterator<Item = &Expr> {
        self.gravity
            .iter()
            .chain(self.coriolis.iter())
            .chain(self.theta.iter())
    }

    pub fn values_at(&self, p: &[f64]) -> Result<DataValues> {
        let (m, n) = (self.m, self.spatial_dim());
        let mut values = DataValues::zeros(m);
        for a in 0..n {
            values.gravity[a] = self.gravity[a].evaluate(p)?;
            for b in a + 1..n {
                let w = self.coriolis(a, b).evaluate(p)?;
                values.coriolis[(a, b)] = w;
                values.coriolis[(b, a)] = -w;
            }
            for i in 0..m {
                for j in i + 1..m {
                    let t = self.theta(a, i, j).evaluate(p)?;
                    values.theta[a][(i, j)] = t;
                    values.theta[a][(j, i)] = -t;
                }
            }
        }
        Ok(values)
    }
}

/// Pointwise values of (𝒢, ω, Θ) in the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct DataValues {
    pub gravity: DVector<f64>,
    /// Antisymmetric n×n.
    pub coriolis: DMatrix<f64>,
    /// Θ^a as antisymmetric m×m matrices, one per frame index.
    pub theta: Vec<DMatrix<f64>>,
}

impl DataValues {
    pub fn zeros(m: usize) -> Self {
        let n = m - 1;
        DataValues {
            gravity: DVector::zeros(n),
            coriolis: DMatrix::zeros(n, n),
            theta: vec![DMatrix::zeros(m, m); n],
        }
    }

    /// Independent components in a fixed order: 𝒢^a, then ω_ab (a < b),
    /// then Θ^a_ij (a, then i < j).
    pub fn flatten(&self) -> Vec<f64> {
        let n = self.gravity.len();
        let m = n + 1;
        let mut out: Vec<f64> = self.gravity.iter().copied().collect();
        for a in 0..n {
            for b in a + 1..n {
                out.push(self.coriolis[(a, b)]);
            }
        }
        for t in &self.theta {
            for i in 0..m {
                for j in i + 1..m {
                    out.push(t[(i, j)]);
                }
            }
        }
        out
    }

    /// Largest componentwise deviation.
    pub fn max_deviation(&self, other: &DataValues) -> f64 {
        self.flatten()
            .iter()
            .zip(other.flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Γ^k_ij at one point, with ∇_{∂_i} ∂_j = Γ^k_ij ∂_k.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    m: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(m: usize) -> Self {
        Christoffel {
            m,
            data: vec![0.0; m * m * m],
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.m + i) * self.m + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.m + i) * self.m + j] = v;
    }

    /// Γ^k_ij x^i y^j.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        DVector::from_fn(m, |k, _| {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    acc += self.get(k, i, j) * x[i] * y[j];
                }
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[derive(Debug)]
enum Source {
    Built {
        observer: ObserverField,
        data: ConnectionData,
        prepared: PreparedStructure,
    },
    Supplied {
        gamma: Vec<Expr>,
    },
}

// Memo entries beyond this are dropped wholesale; long integrations visit
// many distinct points.
const CACHE_LIMIT: usize = 1 << 16;

/// A linear connection on the chart, evaluated lazily per point.
#[derive(Debug)]
pub struct Connection {
    structure: SpacetimeStructure,
    source: Source,
    cache: RwLock<HashMap<Vec<u64>, Arc<Christoffel>>>,
}

impl Connection {
    /// A connection given directly by Christoffel expressions, indexed
    /// `gamma[(k * m + i) * m + j] = Γ^k_ij`.
    pub fn supplied(structure: SpacetimeStructure, gamma: Vec<Expr>) -> Result<Self> {
        let m = structure.dim();
        if gamma.len() != m * m * m {
            return Err(Error::DimensionMismatch(format!(
                "christoffel table needs {} entries, got {}",
                m * m * m,
                gamma.len()
            )));
        }
        Ok(Connection {
            structure,
            source: Source::Supplied { gamma },
            cache: RwLock::default(),
        })
    }

    pub fn structure(&self) -> &SpacetimeStructure {
        &self.structure
    }

    /// Observer and data this connection was built from, if any.
    pub fn origin(&self) -> Option<(&ObserverField, &ConnectionData)> {
        match &self.source {
            Source::Built { observer, data, .. } => Some((observer, data)),
            Source::Supplied { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// Γ^k_ij at p.
    pub fn christoffel(&self, p: &[f64]) -> Result<Arc<Christoffel>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {}",
                p.len(),
                self.dim()
            )));
        }
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let value = Arc::new(self.compute(p)?);
        let mut cache = self.cache.write().expect("cache lock");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        Ok(Arc::clone(cache.entry(key).or_insert(value)))
    }

    fn compute(&self, p: &[f64]) -> Result<Christoffel> {
        match &self.source {
            Source::Supplied { gamma } => {
                let mut out = Christoffel::zeros(self.dim());
                for (slot, e) in out.data.iter_mut().zip(gamma) {
                    *slot = e.evaluate(p)?;
                }
                Ok(out)
            }
            Source::Built { data, prepared, .. } => {
                let geo = prepared.at(p)?;
                let values = data.values_at(p)?;
                christoffel_from(&geo, &values)
            }
        }
    }
}

// Data values paired with the frame at one point.
struct PointData<'a> {
    geo: &'a PointGeometry,
    values: &'a DataValues,
}

impl PointData<'_> {
    fn gravity_vector(&self) -> DVector<f64> {
        self.geo.solver.recompose(&self.values.gravity)
    }

    /// ω(u, w) for spatial vectors, extended bilinearly through the frame.
    fn coriolis(&self, u: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        let uc = self.geo.decompose(u)?;
        let wc = self.geo.decompose(w)?;
        Ok(uc.dot(&(&self.values.coriolis * wc)))
    }

    /// Θ(u, w) = u^i w^j Θ^a_ij E_a.
    fn theta(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let coeffs = DVector::from_iterator(
            self.values.theta.len(),
            self.values.theta.iter().map(|t| u.dot(&(t * w))),
        );
        self.geo.solver.recompose(&coeffs)
    }

    /// A(U, W) = Θ(U, W) + dΩ(U, W) z + [U, W].
    fn assemble_a(&self, u: &VectorJet, w: &VectorJet) -> DVector<f64> {
        self.theta(&u.val, &w.val)
            + &self.geo.z.val * self.geo.d_omega(u, w)
            + self.geo.bracket(u, w)
    }

    /// 2⟨P_z(∇_X Y), V⟩ for X = ∂_i, Y = ∂_j, V = E_a.
    fn koszul_rhs(&self, i: usize, j: usize, a: usize) -> Result<f64> {
        let geo = self.geo;
        let x = geo.coordinate(i);
        let y = geo.coordinate(j);
        let v = &geo.frame[a];
        let z = &geo.z;
        let ox = geo.omega_of(&x.val);
        let oy = geo.omega_of(&y.val);
        let px = geo.project(&x);
        let py = geo.project(&y);
        let inner = |u: &DVector<f64>, w: &DVector<f64>| geo.inner(u, w);

        let metric_terms = geo.inner_jet(&py, v)?.grad[i] + geo.inner_jet(&px, v)?.grad[j]
            - geo.inner_jet(&px, &py)?.grad.dot(&v.val);
        let gravity = 2.0 * ox * oy * inner(&self.gravity_vector(), &v.val)?;
        let coriolis =
            2.0 * (ox * self.coriolis(&py.val, &v.val)? + oy * self.coriolis(&px.val, &v.val)?);
        let a_zv = self.assemble_a(z, v);
        let temporal_x = ox * (inner(&self.assemble_a(z, &py), &v.val)? - inner(&a_zv, &py.val)?);
        let temporal_y = oy * (inner(&self.assemble_a(z, &px), &v.val)? + inner(&a_zv, &px.val)?);
        let spatial = inner(&self.assemble_a(&px, &py), &v.val)?
            - inner(&self.assemble_a(&py, v), &px.val)?
            - inner(&self.assemble_a(&px, v), &py.val)?;
        Ok(metric_terms + gravity + coriolis + temporal_x - temporal_y + spatial)
    }
}

// The Koszul right-hand side for every (i, j) and all frame indices at
// once. Everything that depends on a single coordinate direction (P_z ∂_i,
// its frame coefficients and their partials, A(P_z ∂_i, E_a)) is computed
// once per point; ⟨U, E_a⟩ over all a is the vector h·u for frame
// coefficients u.
struct KoszulTables {
    // Frame coefficients of P_z ∂_i and their partials.
    coeffs: Vec<(DVector<f64>, Vec<DVector<f64>>)>,
    omega: Vec<f64>,
    projected: Vec<VectorJet>,
    // Column a: frame coefficients of A(z, E_a).
    a_z_frame: DMatrix<f64>,
    // Column a: frame coefficients of A(P_z ∂_i, E_a).
    a_p_frame: Vec<DMatrix<f64>>,
    frame_t: DMatrix<f64>,
}

impl KoszulTables {
    fn new(data: &PointData) -> Result<Self> {
        let geo = data.geo;
        let (m, n) = (geo.dim(), geo.dim() - 1);
        let projected: Vec<VectorJet> = (0..m).map(|i| geo.project(&geo.coordinate(i))).collect();
        let coeffs = projected
            .iter()
            .map(|p| geo.coefficient_jet(p))
            .collect::<Result<Vec<_>>>()?;
        let omega = (0..m).map(|i| geo.omega.val[i]).collect();
        let frame_columns = |u: &VectorJet| -> Result<DMatrix<f64>> {
            let mut out = DMatrix::zeros(n, n);
            for (a, e) in geo.frame.iter().enumerate() {
                out.set_column(a, &geo.decompose(&data.assemble_a(u, e))?);
            }
            Ok(out)
        };
        let a_z_frame = frame_columns(&geo.z)?;
        let a_p_frame = projected
            .iter()
            .map(frame_columns)
            .collect::<Result<Vec<_>>>()?;
        let frame_t = DMatrix::from_fn(n, m, |a, k| geo.frame[a].val[k]);
        Ok(KoszulTables {
            coeffs,
            omega,
            projected,
            a_z_frame,
            a_p_frame,
            frame_t,
        })
    }

    /// 2⟨P_z(∇_{∂_i} ∂_j), E_a⟩ for a = 0..n.
    fn column(&self, data: &PointData, i: usize, j: usize) -> Result<DVector<f64>> {
        let geo = data.geo;
        let h = &geo.h;
        let (px, dpx) = &self.coeffs[i];
        let (py, dpy) = &self.coeffs[j];
        let (ox, oy) = (self.omega[i], self.omega[j]);
        let (hp, hq) = (h * px, h * py);
        let lower = |v: &DVector<f64>| -> Result<DVector<f64>> { Ok(h * geo.decompose(v)?) };

        // ∂_i⟨PY, E_a⟩ + ∂_j⟨PX, E_a⟩ - E_a⟨PX, PY⟩
        let grad_pq = DVector::from_fn(geo.dim(), |k, _| {
            dpx[k].dot(&hq) + px.dot(&(&geo.dh[k] * py)) + hp.dot(&dpy[k])
        });
        let metric_terms =
            h * &dpy[i] + &geo.dh[i] * py + h * &dpx[j] + &geo.dh[j] * px - &self.frame_t * grad_pq;
        let gravity = h * &data.values.gravity * (2.0 * ox * oy);
        let w_t = data.values.coriolis.transpose();
        let coriolis = (&w_t * py * ox + &w_t * px * oy) * 2.0;
        let (pxj, pyj) = (&self.projected[i], &self.projected[j]);
        let az_t = self.a_z_frame.transpose();
        let temporal_x = (lower(&data.assemble_a(&geo.z, pyj))? - &az_t * &hq) * ox;
        let temporal_y = (lower(&data.assemble_a(&geo.z, pxj))? + &az_t * &hp) * oy;
        let spatial = lower(&data.assemble_a(pxj, pyj))?
            - self.a_p_frame[j].transpose() * &hp
            - self.a_p_frame[i].transpose() * &hq;
        Ok(metric_terms + gravity + coriolis + temporal_x - temporal_y + spatial)
    }
}

fn christoffel_from(geo: &PointGeometry, values: &DataValues) -> Result<Christoffel> {
    let m = geo.dim();
    let data = PointData { geo, values };
    let tables = KoszulTables::new(&data)?;
    let mut out = Christoffel::zeros(m);
    let lu = geo.h.clone().lu();
    for i in 0..m {
        for j in 0..m {
            // Temporal part: Ω(∇_i ∂_j) = ∂_i Ω_j.
            let tau = geo.omega.jac[(j, i)];
            let rhs = tables.column(&data, i, j)? * 0.5;
            let c = lu.solve(&rhs).expect("metric checked nondegenerate");
            let spatial = geo.solver.recompose(&c);
            for k in 0..m {
                out.set(k, i, j, tau * geo.z.val[k] + spatial[k]);
            }
        }
    }
    Ok(out)
}

fn field_jet(field: &VectorField, p: &[f64]) -> Result<VectorJet> {
    SmoothVector::from_field(field).jet(p)
}

/// A(X, Y) = Θ(X, Y) + dΩ(X, Y) z + [X, Y] at p.
pub fn assemble_a(
    s: &SpacetimeStructure,
    z: &ObserverField,
    d: &ConnectionData,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
) -> Result<VectorValue> {
    let geo = PreparedStructure::new(s, z).at(p)?;
    let values = d.values_at(p)?;
    let data = PointData {
        geo: &geo,
        values: &values,
    };
    Ok(data.assemble_a(&field_jet(x, p)?, &field_jet(y, p)?))
}

/// Right-hand side of the Koszul-type identity, 2⟨P_z(∇_{∂_i} ∂_j), E_a⟩,
/// evaluated from the structure and data alone (`a` is 0-based).
#[allow(clippy::too_many_arguments)]
pub fn koszul_rhs(
    s: &SpacetimeStructure,
    z: &ObserverField,
    d: &ConnectionData,
    i: usize,
    j: usize,
    a: usize,
    p: &[f64],
) -> Result<f64> {
    let m = s.dim();
    if i >= m || j >= m || a >= m - 1 {
        return Err(Error::InvalidArgument(format!(
            "index ({i}, {j}; {a}) out of range"
        )));
    }
    let geo = PreparedStructure::new(s, z).at(p)?;
    let values = d.values_at(p)?;
    PointData {
        geo: &geo,
        values: &values,
    }
    .koszul_rhs(i, j, a)
}

/// The generalized connection with the given observer data.
pub fn build_connection(
    s: &SpacetimeStructure,
    z: &ObserverField,
    d: &ConnectionData,
) -> Result<Connection> {
    if z.z.dim() != s.dim() || d.dim() != s.dim() {
        return Err(Error::DimensionMismatch(
            "observer, data and structure must share the chart".into(),
        ));
    }
    Ok(Connection {
        structure: s.clone(),
        source: Source::Built {
            observer: z.clone(),
            data: d.clone(),
            prepared: PreparedStructure::new(s, z),
        },
        cache: RwLock::default(),
    })
}

/// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j at p.
pub fn covariant_derivative(
    c: &Connection,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
) -> Result<VectorValue> {
    let xv = x.evaluate(p)?;
    let yj = field_jet(y, p)?;
    covariant_along(c, &xv, &yj, p)
}

fn covariant_along(
    c: &Connection,
    x: &DVector<f64>,
    y: &VectorJet,
    p: &[f64],
) -> Result<VectorValue> {
    Ok(y.along(x) + c.christoffel(p)?.contract(x, &y.val))
}

/// Tor(X, Y) = ∇_X Y - ∇_Y X - [X, Y] at p.
pub fn torsion_at(
    c: &Connection,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
) -> Result<VectorValue> {
    let xj = field_jet(x, p)?;
    let yj = field_jet(y, p)?;
    let bracket = yj.along(&xj.val) - xj.along(&yj.val);
    Ok(covariant_along(c, &xj.val, &yj, p)? - covariant_along(c, &yj.val, &xj, p)? - bracket)
}

/// Torsion on coordinate fields, Γ^k_ij - Γ^k_ji.
pub fn coordinate_torsion(c: &Connection, i: usize, j: usize, p: &[f64]) -> Result<VectorValue> {
    let g = c.christoffel(p)?;
    Ok(DVector::from_fn(c.dim(), |k, _| {
        g.get(k, i, j) - g.get(k, j, i)
    }))
}

/// Pointwise evaluator of 𝒢 = ∇_z z.
pub fn gravity_of<'a>(
    c: &'a Connection,
    z: &ObserverField,
) -> impl Fn(&[f64]) -> Result<VectorValue> + 'a {
    let zs = SmoothVector::from_field(&z.z);
    move |p| {
        let zj = zs.jet(p)?;
        covariant_along(c, &zj.val, &zj, p)
    }
}

/// ½(⟨∇_v z, w⟩ - ⟨v, ∇_w z⟩) for spatial v, w at p.
pub fn coriolis_of(
    c: &Connection,
    z: &ObserverField,
    v: &VectorValue,
    w: &VectorValue,
    p: &[f64],
) -> Result<f64> {
    let zj = field_jet(&z.z, p)?;
    coriolis_with(c, &zj, v, w, p)
}

fn coriolis_with(
    c: &Connection,
    zj: &VectorJet,
    v: &VectorValue,
    w: &VectorValue,
    p: &[f64],
) -> Result<f64> {
    let s = c.structure();
    let nabla_v = covariant_along(c, v, zj, p)?;
    let nabla_w = covariant_along(c, w, zj, p)?;
    Ok(0.5 * (s.inner(&nabla_v, w, p)? - s.inner(v, &nabla_w, p)?))
}

/// (𝒢, ω, P_z∘Tor) of a connection at p, in frame components.
pub fn dz_at(c: &Connection, z: &ObserverField, p: &[f64]) -> Result<DataValues> {
    let s = c.structure();
    let (m, n) = (s.dim(), s.spatial_dim());
    let zj = field_jet(&z.z, p)?;
    let mut out = DataValues::zeros(m);

    let gravity = covariant_along(c, &zj.val, &zj, p)?;
    out.gravity = s.frame_decompose(&gravity, p)?;

    let frame = s.frame_matrix(p)?;
    for a in 0..n {
        for b in a + 1..n {
            let w = coriolis_with(c, &zj, &frame.column(a).into(), &frame.column(b).into(), p)?;
            out.coriolis[(a, b)] = w;
            out.coriolis[(b, a)] = -w;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let tor = coordinate_torsion(c, i, j, p)?;
            let theta = s.frame_decompose(&s.project_spatial(z, &tor, p)?, p)?;
            for a in 0..n {
                out.theta[a][(i, j)] = theta[a];
                out.theta[a][(j, i)] = -theta[a];
            }
        }
    }
    Ok(out)
}

/// The observer map evaluated at every sample point of the structure.
pub fn dz_map(c: &Connection, z: &ObserverField) -> Result<Vec<(Vec<f64>, DataValues)>> {
    c.structure()
        .sample_points()
        .into_iter()
        .map(|p| {
            let v = dz_at(c, z, &p)?;
            Ok((p, v))
        })
        .collect()
}
