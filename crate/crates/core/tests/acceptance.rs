//! End-to-end acceptance run: every criterion is evaluated at its stated
//! tolerance and reported on one line, then the test fails if any did.
//!
//! The lines go straight to stdout so they show up without `--nocapture`.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use hadamard::config::{Experiment, ExperimentConfig};
use hadamard::experiment::{self, Outcome, Row};

const SEED: u64 = 20_240_601;

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(v: &Verdict) {
    let line = format!("criterion {:>2} {:<34} {}  {}\n", v.id, v.name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn run(exp: Experiment) -> (Outcome, Duration) {
    let mut cfg = ExperimentConfig::new(exp);
    cfg.seed = SEED;
    let t = Instant::now();
    let out = experiment::run(&cfg).unwrap_or_else(|e| panic!("{exp} failed to run: {e}"));
    (out, t.elapsed())
}

fn select<'a>(out: &'a Outcome, fixture: &str, quantity: &str) -> Vec<&'a Row> {
    out.rows.iter().filter(|r| r.fixture.starts_with(fixture) && r.quantity == quantity).collect()
}

/// All selected rows pass and there are at least `min` of them.
fn all_pass(rows: &[&Row], min: usize) -> (bool, String) {
    let failed = rows.iter().filter(|r| !r.pass).count();
    (rows.len() >= min && failed == 0, format!("{}/{} ok", rows.len() - failed, rows.len()))
}

fn rel(measured: f64, reference: f64) -> f64 {
    (measured - reference).abs() / reference.abs()
}

fn chern_lashof(out: &Outcome, took: Duration) -> Verdict {
    let sphere = select(out, "unit_sphere", "total_abs_curvature");
    let sphere_ok = sphere.len() == 1 && rel(sphere[0].measured, 4.0 * PI) <= 5e-3;
    let random: Vec<&Row> = out.rows.iter().filter(|r| r.fixture.starts_with("random_")).collect();
    let floor = 4.0 * PI * (1.0 - 5e-3);
    let random_ok = random.len() == 50 && random.iter().all(|r| r.measured >= floor);
    let worst = random.iter().map(|r| r.measured / (4.0 * PI)).fold(f64::INFINITY, f64::min);
    let fast = took <= Duration::from_secs(60);
    Verdict {
        id: 1,
        name: "Chern-Lashof floor",
        pass: sphere_ok && random_ok && fast,
        detail: format!(
            "sphere rel {:.2e}, {} random surfaces, worst G~/4pi {:.4}, {:.1}s",
            sphere.first().map_or(f64::NAN, |r| rel(r.measured, 4.0 * PI)),
            random.len(),
            worst,
            took.as_secs_f64()
        ),
    }
}

fn tight_torus(out: &Outcome) -> Verdict {
    let get = |q| select(out, "torus_R2_r1", q).first().map_or(f64::NAN, |r| r.measured);
    let (abs, signed, pos) = (get("total_abs_curvature"), get("total_signed_curvature"), get("total_positive_curvature"));
    let e_abs = rel(abs, 8.0 * PI);
    let e_signed = signed.abs() / (8.0 * PI);
    let e_pos = rel(pos, 4.0 * PI);
    Verdict {
        id: 2,
        name: "tight torus",
        pass: e_abs <= 1e-2 && e_signed <= 1e-2 && e_pos <= 1e-2,
        detail: format!("|G~-8pi| {e_abs:.2e}, |G|/8pi {e_signed:.2e}, |G+-4pi| {e_pos:.2e}"),
    }
}

fn geodesic_spheres(out: &Outcome) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut found = 0;
    for (tag, r) in [("r0.5", 0.5f64), ("r1", 1.0), ("r2", 2.0)] {
        let fixture = format!("geodesic_sphere_{tag}");
        for (q, expected) in [("total_abs_curvature", 4.0 * PI * r.cosh().powi(2)), ("gauss_bonnet", 4.0 * PI)] {
            for row in out.rows.iter().filter(|x| x.fixture == fixture && x.quantity == q) {
                worst = worst.max(rel(row.measured, expected));
                found += 1;
            }
        }
    }
    Verdict { id: 3, name: "geodesic spheres in H3", pass: found == 6 && worst <= 1e-2, detail: format!("{found} checks, worst rel {worst:.2e}") }
}

fn two_point(out: &Outcome) -> Verdict {
    let orth = select(out, "h3_orthogonal_eps0.1", "squared_distance_defect");
    let slope = select(out, "h3_orthogonal_scan", "residual_loglog_slope");
    let predicted = 0.1f64.powi(4) / 3.0;
    let e = orth.first().map_or(f64::NAN, |r| rel(r.measured, predicted));
    let s = slope.first().map_or(f64::NAN, |r| r.measured);
    Verdict { id: 4, name: "two-point expansion", pass: e <= 5e-2 && s >= 4.5, detail: format!("defect rel {e:.2e} vs {predicted:.4e}, slope {s:.2}") }
}

fn chord_fit(out: &Outcome) -> Verdict {
    let e2 = select(out, "e2_unit_circle", "kappa_hat").first().map_or(f64::NAN, |r| rel(r.measured, 1.0));
    let h2 = select(out, "h2_circle_r1", "kappa_hat").first().map_or(f64::NAN, |r| rel(r.measured, 1.0 / 1f64.tanh()));
    Verdict { id: 5, name: "chord-curvature law", pass: e2 <= 2e-2 && h2 <= 2e-2, detail: format!("E2 rel {e2:.2e}, H2 rel {h2:.2e}") }
}

fn schur(out: &Outcome, took: Duration) -> Verdict {
    let inst = select(out, "frenet_vs_planar", "relative_conclusion_margin");
    let violations = inst.iter().filter(|r| r.measured < -1e-8).count();
    let margin = |r: &Row| {
        r.detail.split(';').find_map(|kv| kv.strip_prefix("hypothesis_margin=")).and_then(|v| v.parse::<f64>().ok())
    };
    let unverified = inst.iter().filter(|r| !matches!(margin(r), Some(m) if m <= 0.0)).count();
    let (ok, detail) = all_pass(&inst, 500);
    let fast = took <= Duration::from_secs(120);
    Verdict {
        id: 6,
        name: "Schur comparison",
        pass: ok && violations == 0 && unverified == 0 && inst.len() == 500 && fast,
        detail: format!("{detail}, {violations} violations, {unverified} unverified, {:.1}s", took.as_secs_f64()),
    }
}

fn majorize(out: &Outcome) -> Verdict {
    let h2 = select(out, "random_curve_h2", "majorant_postconditions");
    let h3 = select(out, "random_curve_h3", "majorant_postconditions");
    let rows: Vec<&Row> = h2.iter().chain(&h3).copied().collect();
    let (ok, detail) = all_pass(&rows, 200);
    Verdict { id: 7, name: "majorization postconditions", pass: ok && !h2.is_empty() && !h3.is_empty(), detail }
}

fn parallel_flow(out: &Outcome) -> Verdict {
    let bodies = select(out, "random_klein_ellipsoid", "worst_relative_drop");
    let worst = bodies.iter().map(|r| r.measured).fold(f64::NEG_INFINITY, f64::max);
    let mut sphere_worst: f64 = 0.0;
    let mut spheres = 0;
    for t in [0.25f64, 0.5, 1.0] {
        let fixture = format!("geodesic_sphere_r1_t{t}");
        for row in out.rows.iter().filter(|x| x.fixture == fixture && x.quantity == "total_curvature") {
            sphere_worst = sphere_worst.max(rel(row.measured, 4.0 * PI * (1.0 + t).cosh().powi(2)));
            spheres += 1;
        }
    }
    Verdict {
        id: 8,
        name: "parallel-flow monotonicity",
        pass: bodies.len() == 50 && worst <= 5e-3 && spheres == 3 && sphere_worst <= 1e-2,
        detail: format!("{} bodies, worst drop {worst:.2e}, sphere rel {sphere_worst:.2e}", bodies.len()),
    }
}

fn kleiner(out: &Outcome) -> Verdict {
    let chain: Vec<&Row> = out.rows.iter().filter(|r| r.quantity == "chain_ordered").collect();
    let hull: Vec<&Row> = out.rows.iter().filter(|r| r.quantity == "euclidean_hull_curvature").collect();
    let hull_worst = hull.iter().map(|r| (r.measured - 4.0 * PI).abs()).fold(0.0, f64::max);
    let (ok, detail) = all_pass(&chain, 100);
    Verdict {
        id: 9,
        name: "Kleiner chain",
        pass: ok && chain.len() == 100 && !hull.is_empty() && hull_worst <= 1e-9,
        detail: format!("chain {detail}, hull |G-4pi| {hull_worst:.1e}"),
    }
}

fn develop(out: &Outcome) -> Verdict {
    let required = [
        "path_defect",
        "cell_holonomy_defect",
        "isometry_inner_product",
        "isometry_path_length",
        "normal_correspondence",
        "tau_base_image",
        "tau_diagonal_image",
        "control_scaled_image",
        "control_rotated_frame",
    ];
    let mut missing = Vec::new();
    let mut failed = Vec::new();
    for strip in ["geodesic_strip", "circle_strip"] {
        for q in required {
            let rows = select(out, strip, q);
            if rows.is_empty() {
                missing.push(format!("{strip}/{q}"));
            }
            failed.extend(rows.iter().filter(|r| !r.pass).map(|_| format!("{strip}/{q}")));
        }
    }
    let rejected = select(out, "geodesic_sphere_patch", "rejected_not_flat");
    if rejected.is_empty() {
        missing.push("rejected_not_flat".into());
    }
    failed.extend(rejected.iter().filter(|r| !r.pass).map(|_| "rejected_not_flat".to_string()));
    let worst = |q: &str| out.rows.iter().filter(|r| r.quantity == q).map(|r| r.measured).fold(0.0, f64::max);
    Verdict {
        id: 10,
        name: "developing map",
        pass: missing.is_empty() && failed.is_empty(),
        detail: format!(
            "holonomy {:.1e}, isometry {:.1e}, normals {:.1e}, missing {:?}, failed {:?}",
            worst("cell_holonomy_defect").max(worst("path_defect")),
            worst("isometry_inner_product").max(worst("isometry_path_length")),
            worst("normal_correspondence"),
            missing,
            failed
        ),
    }
}

fn gauss_map(out: &Outcome) -> Verdict {
    let area = select(out, "", "gauss_image_area");
    let mult = select(out, "", "min_multiplicity");
    let worst = area.iter().map(|r| rel(r.measured, r.reference)).fold(0.0, f64::max);
    let min_mult = mult.iter().map(|r| r.measured).fold(f64::INFINITY, f64::min);
    Verdict {
        id: 11,
        name: "Gauss-map cross-check",
        pass: area.len() == 3 && mult.len() == 3 && worst <= 2e-2 && min_mult >= 2.0,
        detail: format!("worst rel {worst:.2e}, min multiplicity {min_mult}"),
    }
}

fn determinism() -> Verdict {
    let mut differing = Vec::new();
    for exp in [Experiment::TwoPoint, Experiment::Majorize, Experiment::KleinerChain, Experiment::Develop] {
        let a = run(exp).0;
        let b = run(exp).0;
        if a.results_table().to_csv() != b.results_table().to_csv() || a.defects_table().to_csv() != b.defects_table().to_csv() {
            differing.push(exp.name());
        }
    }
    Verdict { id: 12, name: "determinism", pass: differing.is_empty(), detail: format!("4 experiments rerun, differing {differing:?}") }
}

#[test]
fn acceptance_criteria() {
    let mut verdicts = Vec::new();
    let mut record = |v: Verdict| {
        report(&v);
        verdicts.push(v);
    };
    let (cl, took) = run(Experiment::ChernLashof);
    record(chern_lashof(&cl, took));
    record(tight_torus(&cl));
    record(geodesic_spheres(&cl));
    record(two_point(&run(Experiment::TwoPoint).0));
    record(chord_fit(&run(Experiment::ChordFit).0));
    let (sc, took) = run(Experiment::SchurSuite);
    record(schur(&sc, took));
    record(majorize(&run(Experiment::Majorize).0));
    record(parallel_flow(&run(Experiment::ParallelFlow).0));
    record(kleiner(&run(Experiment::KleinerChain).0));
    record(develop(&run(Experiment::Develop).0));
    record(gauss_map(&run(Experiment::GaussMap).0));
    record(determinism());
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.pass).map(|v| format!("{} {}", v.id, v.name)).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
