//! Auto-parallel curves of a connection and integral curves of observer
//! fields, by fixed-step classical RK4.

use std::io::{self, Write};

use nalgebra::DVector;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{ObserverField, SpacetimeStructure, VectorValue};

#[derive(Clone, Debug, PartialEq)]
pub struct CurveState {
    pub tau: f64,
    pub position: Vec<f64>,
    pub velocity: VectorValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    LeftDomain,
    NumericFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<CurveState>,
    pub step: f64,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &CurveState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// CSV with header `tau,x0..,v0..`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let m = self.states.first().map_or(0, |s| s.position.len());
        let mut header = vec!["tau".to_string()];
        header.extend((0..m).map(|k| format!("x{k}")));
        header.extend((0..m).map(|k| format!("v{k}")));
        writeln!(out, "{}", header.join(","))?;
        for s in &self.states {
            let row: Vec<String> = std::iter::once(s.tau)
                .chain(s.position.iter().copied())
                .chain(s.velocity.iter().copied())
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn step_count(tau0: f64, tau1: f64, dtau: f64) -> Result<usize> {
    let valid = dtau > 0.0 && tau1 > tau0 && dtau.is_finite() && tau1.is_finite();
    if !valid {
        return Err(Error::InvalidArgument(format!(
            "need dτ > 0 and τ1 > τ0, got dτ = {dtau}, [{tau0}, {tau1}]"
        )));
    }
    Ok(((tau1 - tau0) / dtau + 1e-9).floor() as usize)
}

// Shared fixed-step driver. `rhs` maps a state vector to its derivative;
// `velocity` extracts the stored velocity from a state vector.
fn integrate<F, V>(
    s: &SpacetimeStructure,
    initial: DVector<f64>,
    tau0: f64,
    tau1: f64,
    dtau: f64,
    rhs: F,
    velocity: V,
) -> Result<Trajectory>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
    V: Fn(&DVector<f64>) -> Result<VectorValue>,
{
    let m = s.dim();
    let steps = step_count(tau0, tau1, dtau)?;
    if !s.contains(&initial.as_slice()[..m]) {
        return Err(Error::InvalidArgument(
            "initial position outside the domain box".into(),
        ));
    }
    let state_of = |tau: f64, y: &DVector<f64>| -> Result<CurveState> {
        Ok(CurveState {
            tau,
            position: y.as_slice()[..m].to_vec(),
            velocity: velocity(y)?,
        })
    };
    let mut y = initial;
    let mut states = vec![state_of(tau0, &y)?];
    let mut termination = Termination::Completed;
    for n in 1..=steps {
        let k1 = rhs(&y)?;
        let k2 = rhs(&(&y + &k1 * (0.5 * dtau)))?;
        let k3 = rhs(&(&y + &k2 * (0.5 * dtau)))?;
        let k4 = rhs(&(&y + &k3 * dtau))?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dtau / 6.0);
        if y.iter().any(|v| !v.is_finite()) {
            termination = Termination::NumericFailure;
            break;
        }
        states.push(state_of(tau0 + n as f64 * dtau, &y)?);
        if !s.contains(&y.as_slice()[..m]) {
            termination = Termination::LeftDomain;
            break;
        }
    }
    Ok(Trajectory {
        states,
        step: dtau,
        termination,
    })
}

/// Solves ẍ^k = -Γ^k_ij ẋ^i ẋ^j from (x0, v0) over [τ0, τ1].
pub fn integrate_geodesic(
    c: &Connection,
    x0: &[f64],
    v0: &VectorValue,
    tau0: f64,
    tau1: f64,
    dtau: f64,
) -> Result<Trajectory> {
    let m = c.dim();
    if x0.len() != m || v0.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "initial data must have {m} components"
        )));
    }
    let initial = DVector::from_iterator(2 * m, x0.iter().chain(v0.iter()).copied());
    let rhs = |y: &DVector<f64>| -> Result<DVector<f64>> {
        let x = &y.as_slice()[..m];
        let v = y.rows(m, m).into_owned();
        let accel = -c.christoffel(x)?.contract(&v, &v);
        Ok(DVector::from_iterator(
            2 * m,
            v.iter().chain(accel.iter()).copied(),
        ))
    };
    let velocity = |y: &DVector<f64>| Ok(y.rows(m, m).into_owned());
    integrate(c.structure(), initial, tau0, tau1, dtau, rhs, velocity)
}

/// Integral curve of ẋ = z(x); stored velocities are z along the curve.
pub fn integrate_observer_flow(
    s: &SpacetimeStructure,
    z: &ObserverField,
    x0: &[f64],
    tau0: f64,
    tau1: f64,
    dtau: f64,
) -> Result<Trajectory> {
    if x0.len() != s.dim() || z.z.dim() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial point and observer must have {} components",
            s.dim()
        )));
    }
    let rhs = |y: &DVector<f64>| z.z.evaluate(y.as_slice());
    integrate(
        s,
        DVector::from_column_slice(x0),
        tau0,
        tau1,
        dtau,
        rhs,
        rhs,
    )
}
