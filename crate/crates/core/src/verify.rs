//! Residual checks for the defining axioms of a generalized connection,
//! the clock component of its torsion, the data round trip, and the
//! symbolic derivatives behind all of it.
//!
//! Every check evaluates a residual at each sample point of the structure
//! (in sample order) and reports max, mean and the worst point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::{build_connection, coordinate_torsion, dz_at, Connection, ConnectionData};
use crate::error::Result;
use crate::expr::{self, Expr};
use crate::geometry::{validate_structure, ObserverField, SpacetimeStructure, VectorField};
use crate::jet::SmoothVector;
use crate::report::{CheckEntry, CheckReport, ResidualStats};
use crate::scenario::{ConnectionSource, Scenario};

pub const TOL_ALGEBRAIC: f64 = 1e-9;
pub const TOL_METRIC: f64 = 1e-8;
pub const TOL_FD: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;
pub const RANDOM_FIELDS: usize = 5;

pub const ENTRY_COMPAT_OMEGA: &str = "∇Ω = 0";
pub const ENTRY_COMPAT_METRIC: &str = "∇h = 0";
pub const ENTRY_CLOCK_TORSION: &str = "Ω∘Tor = dΩ";
pub const ENTRY_ROUNDTRIP: &str = "round trip (𝒢, ω, Θ)";
pub const ENTRY_FD: &str = "symbolic vs finite-difference derivatives";
pub const ENTRY_TORSION_FREE: &str = "torsion-free (impossible unless dΩ = 0)";

/// Extra requests for [`run_all`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Also demand Tor = 0. A generalized connection can only be
    /// torsion-free where dΩ = 0, so this fails whenever the clock form is
    /// not closed.
    pub expect_torsion_free: bool,
}

// Degree ≤ 2 polynomial in m coordinates, coefficients in [-1, 1].
fn random_polynomial(rng: &mut ChaCha8Rng, m: usize) -> Expr {
    let mut coeff = || expr::constant(rng.gen_range(-1.0..=1.0));
    let mut e = coeff();
    for i in 0..m {
        e = expr::add(e, expr::mul(coeff(), expr::coord(i)));
        for j in i..m {
            let monomial = expr::mul(expr::coord(i), expr::coord(j));
            e = expr::add(e, expr::mul(coeff(), monomial));
        }
    }
    e
}

/// Seeded vector fields with components of degree ≤ 2 and coefficients in
/// [-1, 1].
pub fn random_fields(m: usize, count: usize, seed: u64) -> Vec<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..count)
        .map(|_| VectorField((0..m).map(|_| random_polynomial(&mut rng, m)).collect()))
        .collect()
}

/// Seeded connection data with every 𝒢, ω and Θ slot a random polynomial
/// of degree ≤ 2.
pub fn random_data(m: usize, seed: u64) -> ConnectionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let n = m - 1;
    let mut d = ConnectionData::zero(m);
    d.set_gravity((0..n).map(|_| random_polynomial(&mut rng, m)).collect())
        .expect("n gravity components");
    for a in 0..n {
        for b in a + 1..n {
            d.set_coriolis(a, b, random_polynomial(&mut rng, m))
                .expect("a < b < n");
        }
    }
    for a in 0..n {
        for i in 0..m {
            for j in i + 1..m {
                d.set_theta(a, i, j, random_polynomial(&mut rng, m))
                    .expect("i < j < m");
            }
        }
    }
    d
}

/// |X(Ω(Y)) - Ω(∇_X Y)| over coordinate fields and [`RANDOM_FIELDS`]
/// seeded polynomial fields.
pub fn check_compatibility_omega(
    c: &Connection,
    s: &SpacetimeStructure,
    _z: &ObserverField,
) -> CheckEntry {
    let m = s.dim();
    let mut fields: Vec<VectorField> = (0..m).map(|i| VectorField::coordinate(m, i)).collect();
    fields.extend(random_fields(m, RANDOM_FIELDS, s.seed()));
    let jets: Vec<SmoothVector> = fields.iter().map(SmoothVector::from_field).collect();
    let omega = SmoothVector::new(s.omega());

    let mut stats = ResidualStats::new(ENTRY_COMPAT_OMEGA, TOL_ALGEBRAIC);
    for p in s.sample_points() {
        let residual = (|| -> Result<f64> {
            let om = omega.jet(&p)?;
            let gamma = c.christoffel(&p)?;
            let values = jets.iter().map(|f| f.jet(&p)).collect::<Result<Vec<_>>>()?;
            let mut worst: f64 = 0.0;
            for x in &values {
                for y in &values {
                    // X(Ω(Y)) = X^i (∂_i Ω_k Y^k + Ω_k ∂_i Y^k)
                    let lhs =
                        (om.jac.transpose() * &y.val + y.jac.transpose() * &om.val).dot(&x.val);
                    let nabla = y.along(&x.val) + gamma.contract(&x.val, &y.val);
                    worst = worst.max((lhs - om.val.dot(&nabla)).abs());
                }
            }
            Ok(worst)
        })();
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// |∂_i h_ab - ⟨∇_i E_a, E_b⟩ - ⟨E_a, ∇_i E_b⟩| over coordinate directions
/// and frame pairs.
pub fn check_compatibility_metric(
    c: &Connection,
    s: &SpacetimeStructure,
    _z: &ObserverField,
) -> CheckEntry {
    let (m, n) = (s.dim(), s.spatial_dim());
    let frame: Vec<SmoothVector> = s.frame().iter().map(SmoothVector::from_field).collect();
    let dh: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..m).map(|i| s.metric(a, b).differentiate(i)).collect())
                .collect()
        })
        .collect();

    let mut stats = ResidualStats::new(ENTRY_COMPAT_METRIC, TOL_METRIC);
    for p in s.sample_points() {
        let residual = (|| -> Result<f64> {
            let gamma = c.christoffel(&p)?;
            let e = frame
                .iter()
                .map(|f| f.jet(&p))
                .collect::<Result<Vec<_>>>()?;
            let mut worst: f64 = 0.0;
            for i in 0..m {
                let mut dir = nalgebra::DVector::zeros(m);
                dir[i] = 1.0;
                let nabla: Vec<_> = e
                    .iter()
                    .map(|ea| ea.along(&dir) + gamma.contract(&dir, &ea.val))
                    .collect();
                for a in 0..n {
                    for b in a..n {
                        let lhs = dh[a][b][i].evaluate(&p)?;
                        let rhs = s.inner(&nabla[a], &e[b].val, &p)?
                            + s.inner(&e[a].val, &nabla[b], &p)?;
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
            Ok(worst)
        })();
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// |Ω(Tor(∂_i, ∂_j)) - dΩ(∂_i, ∂_j)| over i < j.
pub fn check_clock_torsion(c: &Connection, s: &SpacetimeStructure) -> CheckEntry {
    let m = s.dim();
    let coords: Vec<VectorField> = (0..m).map(|i| VectorField::coordinate(m, i)).collect();
    let mut stats = ResidualStats::new(ENTRY_CLOCK_TORSION, TOL_ALGEBRAIC);
    for p in s.sample_points() {
        let residual = (|| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for i in 0..m {
                for j in i + 1..m {
                    let lhs = s.omega_apply(&coordinate_torsion(c, i, j, &p)?, &p)?;
                    let rhs = s.d_omega(&coords[i], &coords[j], &p)?;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            Ok(worst)
        })();
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// Builds the connection for `d` and measures how far the observer map
/// lands from `d`, componentwise.
pub fn check_roundtrip(
    s: &SpacetimeStructure,
    z: &ObserverField,
    d: &ConnectionData,
) -> CheckEntry {
    let mut stats = ResidualStats::new(ENTRY_ROUNDTRIP, TOL_ALGEBRAIC);
    let c = match build_connection(s, z, d) {
        Ok(c) => c,
        Err(_) => {
            for p in s.sample_points() {
                stats.push(f64::INFINITY, &p);
            }
            return stats.finish();
        }
    };
    for p in s.sample_points() {
        let residual =
            dz_at(&c, z, &p).and_then(|observed| Ok(observed.max_deviation(&d.values_at(&p)?)));
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// max |Tor^k_ij| over all coordinate pairs.
pub fn check_torsion_free(c: &Connection, s: &SpacetimeStructure) -> CheckEntry {
    let m = s.dim();
    let mut stats = ResidualStats::new(ENTRY_TORSION_FREE, TOL_ALGEBRAIC);
    for p in s.sample_points() {
        let residual = (|| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for i in 0..m {
                for j in i + 1..m {
                    worst = worst.max(coordinate_torsion(c, i, j, &p)?.amax());
                }
            }
            Ok(worst)
        })();
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// Every expression whose partials the construction uses.
pub fn differentiated_exprs<'a>(
    s: &'a SpacetimeStructure,
    z: &'a ObserverField,
    extra: impl IntoIterator<Item = &'a Expr>,
) -> Vec<&'a Expr> {
    let n = s.spatial_dim();
    let mut out: Vec<&Expr> = s.omega().iter().collect();
    out.extend(z.z.components());
    for e in s.frame() {
        out.extend(e.components());
    }
    for a in 0..n {
        for b in a..n {
            out.push(s.metric(a, b));
        }
    }
    out.extend(extra);
    out
}

/// Compares `rule(e, i)` against a central difference for every expression
/// and coordinate, at sample points whose stencil stays inside the box.
/// The residual is |sym - fd| / max(1, |sym|), so the tolerance reads
/// max(1e-6, 1e-6·|value|).
pub fn fd_validate_with<F>(s: &SpacetimeStructure, exprs: &[&Expr], rule: F) -> CheckEntry
where
    F: Fn(&Expr, usize) -> Expr,
{
    let m = s.dim();
    let partials: Vec<Vec<Expr>> = exprs
        .iter()
        .map(|e| (0..m).map(|i| rule(e, i)).collect())
        .collect();
    let interior = |p: &[f64]| {
        p.iter()
            .zip(s.domain())
            .all(|(x, (lo, hi))| *lo <= x - FD_STEP && x + FD_STEP <= *hi)
    };
    let mut stats = ResidualStats::new(ENTRY_FD, TOL_FD);
    for p in s.sample_points().into_iter().filter(|p| interior(p)) {
        let residual = (|| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for (e, de) in exprs.iter().zip(&partials) {
                for (i, d) in de.iter().enumerate() {
                    let mut plus = p.clone();
                    let mut minus = p.clone();
                    plus[i] += FD_STEP;
                    minus[i] -= FD_STEP;
                    let fd = (e.evaluate(&plus)? - e.evaluate(&minus)?) / (2.0 * FD_STEP);
                    let sym = d.evaluate(&p)?;
                    worst = worst.max((sym - fd).abs() / sym.abs().max(1.0));
                }
            }
            Ok(worst)
        })();
        stats.push_result(residual, &p);
    }
    stats.finish()
}

/// A deliberately wrong derivative rule, d sin(u) = -cos(u) du, for
/// demonstrating that [`fd_validate_with`] catches a broken rule.
pub fn mutated_sine_rule(e: &Expr, i: usize) -> Expr {
    e.differentiate_with(i, &|f, a| {
        (f == expr::Func::Sin).then(|| expr::neg(expr::apply(expr::Func::Cos, a.clone())))
    })
}

pub fn fd_validate(s: &SpacetimeStructure, z: &ObserverField, d: &ConnectionData) -> CheckEntry {
    let exprs = differentiated_exprs(s, z, d.exprs());
    fd_validate_with(s, &exprs, Expr::differentiate)
}

/// Structure validation followed, when the structure is sound, by every
/// connection check. Checks past a failed structure are skipped: they all
/// presuppose a valid clock form, frame, metric and observer.
pub fn run_all(scenario: &Scenario, options: &RunOptions) -> CheckReport {
    let s = &scenario.structure;
    let z = &scenario.observer;
    let mut report = CheckReport::new(scenario.name.clone(), s.seed());
    report.extend(validate_structure(s, z));
    if !report.pass {
        return report;
    }

    let connection = match scenario.connection() {
        Ok(c) => c,
        Err(_) => {
            let mut stats = ResidualStats::new("connection construction", 0.0);
            stats.push(f64::INFINITY, &[]);
            report.push(stats.finish());
            return report;
        }
    };
    report.push(check_compatibility_omega(&connection, s, z));
    report.push(check_compatibility_metric(&connection, s, z));
    report.push(check_clock_torsion(&connection, s));
    let fd = match &scenario.source {
        ConnectionSource::Data(d) => {
            report.push(check_roundtrip(s, z, d));
            fd_validate(s, z, d)
        }
        ConnectionSource::Supplied(gamma) => {
            let exprs = differentiated_exprs(s, z, gamma.iter());
            fd_validate_with(s, &exprs, Expr::differentiate)
        }
    };
    report.push(fd);
    if options.expect_torsion_free {
        report.push(check_torsion_free(&connection, s));
    }
    report
}
