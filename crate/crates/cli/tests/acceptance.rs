//! Acceptance criteria, each at its pinned tolerance. Prints one line per
//! criterion and fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;

use galilean::connection::coordinate_torsion;
use galilean::dynamics::{integrate_geodesic, Termination};
use galilean::expr;
use galilean::verify::{
    check_clock_torsion, check_compatibility_metric, check_compatibility_omega, check_roundtrip,
    differentiated_exprs, fd_validate, fd_validate_with, mutated_sine_rule, random_data, run_all,
    RunOptions,
};
use galilean::{build_connection, load_scenario, Scenario, VectorValue};

const AXIOM_SCENARIOS: [&str; 5] = ["flat", "grav", "rot", "twist", "curvedh"];
const DATA_SCENARIOS: [&str; 7] = [
    "flat",
    "grav",
    "rot",
    "rot_torsion",
    "twist",
    "curvedh",
    "wavy",
];
const FIXTURES: [(&str, &str); 3] = [
    ("bad_observer", "observer normalization"),
    ("frame_not_annihilating", "frame in Ann Ω"),
    ("zero_connection_curvedh", "∇h = 0"),
];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn scenario_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(rel)
}

fn bundled(name: &str) -> Scenario {
    load_scenario(scenario_path(&format!("{name}.scn"))).expect("bundled scenario loads")
}

fn within(label: &str, value: f64, tol: f64) -> Result<(), String> {
    if value <= tol {
        Ok(())
    } else {
        Err(format!("{label}: {value:e} > {tol:e}"))
    }
}

fn flat_space_nullity() -> Verdict {
    let sc = bundled("flat");
    let points = sc.structure.sample_points();
    if points.len() != 100 {
        return Err(format!(
            "expected 100 samples, scenario has {}",
            points.len()
        ));
    }
    let c = sc.connection().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for p in &points {
        worst = worst.max(c.christoffel(p).map_err(|e| e.to_string())?.max_abs());
    }
    within("max |Γ|", worst, 1e-12)?;
    let report = run_all(&sc, &RunOptions::default());
    if !report.pass {
        return Err(format!(
            "run_all fails at {}",
            report.first_failure().unwrap().name
        ));
    }
    Ok(format!(
        "max |Γ| = {worst:e} over 100 points, run_all passes"
    ))
}

fn axiom_suite() -> Verdict {
    let mut worst = [0.0f64; 3];
    for name in AXIOM_SCENARIOS {
        let sc = bundled(name);
        let c = sc.connection().map_err(|e| e.to_string())?;
        let s = &sc.structure;
        let omega = check_compatibility_omega(&c, s, &sc.observer).max;
        let metric = check_compatibility_metric(&c, s, &sc.observer).max;
        let clock = check_clock_torsion(&c, s).max;
        within(&format!("{name} ∇Ω"), omega, 1e-9)?;
        within(&format!("{name} ∇h"), metric, 1e-8)?;
        within(&format!("{name} Ω∘Tor"), clock, 1e-9)?;
        worst = [
            worst[0].max(omega),
            worst[1].max(metric),
            worst[2].max(clock),
        ];
    }
    Ok(format!(
        "5 scenarios; worst ∇Ω {:e}, ∇h {:e}, Ω∘Tor {:e}",
        worst[0], worst[1], worst[2]
    ))
}

// Frame coefficients of P_z ∂_j.
fn projected_coordinate(sc: &Scenario, j: usize, p: &[f64]) -> VectorValue {
    let s = &sc.structure;
    let mut e = VectorValue::zeros(s.dim());
    e[j] = 1.0;
    let projected = s.project_spatial(&sc.observer, &e, p).unwrap();
    s.frame_decompose(&projected, p).unwrap()
}

// Shifting 𝒢 by δE_1 must move Γ^k_ij by δ Ω_i Ω_j E_1^k; shifting ω_12 by
// δ must move it by Ω_i ω♯(P∂_j) + Ω_j ω♯(P∂_i), where ⟨ω♯u, V⟩ = δω(u, V).
fn injectivity_witness(sc: &Scenario) -> Result<f64, String> {
    let s = &sc.structure;
    let (m, n) = (s.dim(), s.spatial_dim());
    let base = sc.data().unwrap().clone();
    let delta = 0.75;
    let base_c = build_connection(s, &sc.observer, &base).map_err(|e| e.to_string())?;

    let mut gravity_shift = base.clone();
    let mut g = base.gravity().to_vec();
    g[0] = expr::add(g[0].clone(), expr::constant(delta));
    gravity_shift.set_gravity(g).unwrap();
    let gravity_c = build_connection(s, &sc.observer, &gravity_shift).map_err(|e| e.to_string())?;

    let coriolis_c = if n >= 2 {
        let mut shifted = base.clone();
        let w = expr::add(base.coriolis(0, 1).clone(), expr::constant(delta));
        shifted.set_coriolis(0, 1, w).unwrap();
        Some(build_connection(s, &sc.observer, &shifted).map_err(|e| e.to_string())?)
    } else {
        None
    };

    let mut worst: f64 = 0.0;
    for p in s.sample_points() {
        let omega = s.omega_at(&p).unwrap();
        let frame = s.frame_matrix(&p).unwrap();
        let h = s.metric_at(&p).unwrap();
        let g0 = base_c.christoffel(&p).unwrap();
        let g1 = gravity_c.christoffel(&p).unwrap();
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let expected = delta * omega[i] * omega[j] * frame[(k, 0)];
                    worst = worst.max((g1.get(k, i, j) - g0.get(k, i, j) - expected).abs());
                }
            }
        }
        if let Some(cc) = &coriolis_c {
            let g2 = cc.christoffel(&p).unwrap();
            let sharp = |u: &VectorValue| -> VectorValue {
                let mut lowered = VectorValue::zeros(n);
                lowered[0] = -delta * u[1];
                lowered[1] = delta * u[0];
                &frame * h.clone().lu().solve(&lowered).unwrap()
            };
            for i in 0..m {
                for j in 0..m {
                    let expected = sharp(&projected_coordinate(sc, j, &p)) * omega[i]
                        + sharp(&projected_coordinate(sc, i, &p)) * omega[j];
                    for k in 0..m {
                        let diff = g2.get(k, i, j) - g0.get(k, i, j);
                        worst = worst.max((diff - expected[k]).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn data_round_trip() -> Verdict {
    let mut worst_rt: f64 = 0.0;
    let mut worst_inj: f64 = 0.0;
    let mut theta_seen = false;
    for name in DATA_SCENARIOS {
        let sc = bundled(name);
        let d = sc.data().unwrap();
        theta_seen |= d
            .values_at(&sc.structure.sample_points()[0])
            .unwrap()
            .theta
            .iter()
            .any(|t| t.amax() > 0.0);
        let entry = check_roundtrip(&sc.structure, &sc.observer, d);
        within(&format!("{name} round trip"), entry.max, 1e-9)?;
        worst_rt = worst_rt.max(entry.max);
        let inj = injectivity_witness(&sc)?;
        within(&format!("{name} injectivity"), inj, 1e-9)?;
        worst_inj = worst_inj.max(inj);
    }
    if !theta_seen {
        return Err("no bundled scenario carries nonzero Θ".into());
    }
    Ok(format!(
        "{} scenarios incl. nonzero Θ; worst deviation {worst_rt:e}, slot-shift witness {worst_inj:e}",
        DATA_SCENARIOS.len()
    ))
}

fn clock_torsion_is_forced() -> Verdict {
    let sc = bundled("twist");
    let s = &sc.structure;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let c =
            build_connection(s, &sc.observer, &random_data(3, seed)).map_err(|e| e.to_string())?;
        for p in s.sample_points() {
            let tor = coordinate_torsion(&c, 1, 2, &p).map_err(|e| e.to_string())?;
            let clock = s.omega_apply(&tor, &p).unwrap();
            worst = worst.max((clock.abs() - 1.0).abs());
        }
    }
    within("||Ω(Tor(∂x,∂y))| - 1|", worst, 1e-9)?;
    Ok(format!(
        "10 random triples, max ||Ω(Tor(∂x,∂y))| - 1| = {worst:e}"
    ))
}

fn free_fall_oracle() -> Verdict {
    let sc = bundled("grav");
    let c = sc.connection().map_err(|e| e.to_string())?;
    let endpoint = |dt: f64| -> Result<f64, String> {
        let v0 = VectorValue::from_vec(vec![1.0, 0.0]);
        let traj =
            integrate_geodesic(&c, &[0.0, 0.0], &v0, 0.0, 1.0, dt).map_err(|e| e.to_string())?;
        if traj.termination != Termination::Completed {
            return Err(format!("terminated early: {:?}", traj.termination));
        }
        Ok(traj.last().position[1])
    };
    let oracle = -0.5 * 9.8;
    let coarse = endpoint(1e-3)?;
    let fine = endpoint(5e-4)?;
    let (e1, e2) = ((coarse - oracle).abs(), (fine - oracle).abs());
    let ratio = e1 / e2;
    let mut problems = Vec::new();
    if e1 > 1e-6 {
        problems.push(format!("x(1) = {coarse} vs {oracle} (error {e1:e})"));
    }
    // NaN ratios fail too.
    if ratio.partial_cmp(&12.0).is_none_or(|o| o.is_lt()) {
        problems.push(format!("halving ratio {ratio:.3} < 12"));
    }
    if problems.is_empty() {
        Ok(format!("x(1) = {coarse}, halving ratio {ratio:.1}"))
    } else {
        // The same integrations against the parabola implied by Γ^x_tt itself.
        let gamma = c
            .christoffel(&[0.0, 0.0])
            .map_err(|e| e.to_string())?
            .get(1, 0, 0);
        let implied = -0.5 * gamma;
        let (f1, f2) = ((coarse - implied).abs(), (fine - implied).abs());
        problems.push(format!(
            "Γ^x_tt = {gamma} implies x(1) = {implied}, endpoint errors {f1:e} and {f2:e} against it"
        ));
        Err(problems.join("; "))
    }
}

fn derivative_validation() -> Verdict {
    let mut worst: f64 = 0.0;
    for name in DATA_SCENARIOS {
        let sc = bundled(name);
        let entry = fd_validate(&sc.structure, &sc.observer, sc.data().unwrap());
        if !entry.pass {
            return Err(format!("{name}: scaled residual {:e}", entry.max));
        }
        worst = worst.max(entry.max);
    }
    let sc = bundled("wavy");
    let exprs = differentiated_exprs(&sc.structure, &sc.observer, sc.data().unwrap().exprs());
    let mutated = fd_validate_with(&sc.structure, &exprs, mutated_sine_rule);
    if mutated.pass {
        return Err("mutated sine rule passed".into());
    }
    Ok(format!(
        "worst scaled residual {worst:e}; mutated sine rule fails with {:e}",
        mutated.max
    ))
}

fn run_check(path: &Path, report: &Path) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_galilean"))
        .args([
            "check",
            path.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    status
        .code()
        .ok_or_else(|| "terminated by signal".to_string())
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in DATA_SCENARIOS {
        let path = scenario_path(&format!("{name}.scn"));
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        run_check(&path, &a)?;
        run_check(&path, &b)?;
        let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        if ta.is_empty() || ta != tb {
            return Err(format!("{name}: reports differ"));
        }
    }
    Ok(format!(
        "{} scenarios, byte-identical JSON",
        DATA_SCENARIOS.len()
    ))
}

fn negative_fixtures() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, designated) in FIXTURES {
        let report_path = dir.path().join(format!("{name}.json"));
        let code = run_check(
            &scenario_path(&format!("fixtures/{name}.scn")),
            &report_path,
        )?;
        if code != 1 {
            return Err(format!("{name}: exit code {code}"));
        }
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap())
                .map_err(|e| e.to_string())?;
        let failing: Vec<&str> = json["entries"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|e| e["pass"] == false)
            .map(|e| e["name"].as_str().unwrap())
            .collect();
        if failing != [designated] {
            return Err(format!(
                "{name}: failing entries {failing:?}, expected [{designated}]"
            ));
        }
    }
    Ok("3 fixtures, exit 1, exactly the designated entry fails".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("flat-space nullity", flat_space_nullity),
        ("axiom suite", axiom_suite),
        ("round trip and injectivity", data_round_trip),
        (
            "no torsion-free connection on twist",
            clock_torsion_is_forced,
        ),
        ("free-fall oracle", free_fall_oracle),
        ("derivative validation", derivative_validation),
        ("determinism", determinism),
        ("negative fixtures", negative_fixtures),
    ];
    let mut failed = Vec::new();
    for (index, (name, run)) in criteria.iter().enumerate() {
        let verdict =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let number = index + 1;
        match verdict {
            Ok(detail) => println!("PASS  {number}. {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {number}. {name}: {detail}");
                failed.push(number);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
