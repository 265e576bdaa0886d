//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use lcurv_core::curvature::{curvature_sample, flatness_probe, lipschitz_killing};
use lcurv_core::frames::{
    boosted_timelike_normal, default_timelike_normal, fiber_direction,
    fiber_point_from_lightlike, normal_frame_at, FiberPoint,
};
use lcurv_core::heightfn::{
    find_critical_points, height_gradient_hessian, hessian_identity_residual, random_direction,
};
use lcurv_core::immersion::{
    builtin_catalog, evaluate_jet, model_by_name, sample_chart_point, SubmanifoldModel,
};
use lcurv_core::integrate::{
    codim2_totals, pointwise_total_curvature, run_analyses, sphere_volume,
    total_absolute_curvature, tau_via_eta, willmore_energy, AnalysisSelection, QuadratureSpec,
    SectionSign,
};
use lcurv_core::tightness::{l_convexity_check, l_tightness_verdict, ConvexityVerdict, TightnessVerdict};
use rand::SeedableRng;

fn model(name: &str) -> SubmanifoldModel {
    builtin_catalog().into_iter().find(|m| m.name == name).unwrap()
}

fn check(id: &str, what: &str, ok: bool, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{id}] {what}: {status} ({detail})");
    assert!(ok, "[{id}] {what}: {detail}");
}

#[test]
fn c01_round_sphere_pointwise_and_total() {
    let m = model("euclid-sphere");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = sample_chart_point(m.integration_chart(), &mut rng);
        let jet = evaluate_jet(&m, 0, &u).unwrap();
        let n_t = default_timelike_normal(&jet).unwrap();
        let frame = normal_frame_at(&jet, &n_t).unwrap();
        for sign in [1.0, -1.0] {
            let fp = fiber_direction(&frame, &[sign]).unwrap();
            let sample = curvature_sample(&jet, &n_t, &fp).unwrap();
            worst = worst.max((sample.k_ell_normalized - 1.0).abs());
        }
    }
    let start = Instant::now();
    let tau = total_absolute_curvature(&m, &QuadratureSpec::default())
        .unwrap()
        .tau_ell;
    let secs = start.elapsed().as_secs_f64();
    check(
        "C1",
        "round sphere: K~+- = 1 pointwise, tau = 2",
        worst < 1e-9 && (tau - 2.0).abs() < 1e-3 && secs < 30.0,
        format!("max |K~ - 1| = {worst:.2e}, tau = {tau:.6}, {secs:.2} s"),
    );
}

#[test]
fn c02_torus_gauss_bonnet_and_totals() {
    let m = model("torus");
    let spec = QuadratureSpec::default();
    let totals = codim2_totals(&m, &spec).unwrap();
    let gamma = sphere_volume(2);
    let abs_plus = gamma * totals.tau_plus;
    let abs_minus = gamma * totals.tau_minus;
    let tau = total_absolute_curvature(&m, &spec).unwrap().tau_ell;
    let signed_ok = totals.gauss_bonnet_lhs.abs() < 1e-4 * 8.0 * PI;
    let abs_ok = (abs_plus - 8.0 * PI).abs() < 0.005 * 8.0 * PI
        && (abs_minus - 8.0 * PI).abs() < 0.005 * 8.0 * PI;
    let tau_ok = (tau - 4.0).abs() < 0.02;
    check(
        "C2",
        "torus: signed Gauss-Bonnet 0, |K~+-| totals 8pi, tau = 4",
        signed_ok && abs_ok && tau_ok,
        format!(
            "signed = {:.2e}, abs+ = {abs_plus:.4}, abs- = {abs_minus:.4}, tau = {tau:.4}",
            totals.gauss_bonnet_lhs
        ),
    );
}

#[test]
fn c03_lightcone_sphere_umbilical_willmore() {
    let m = model("lightcone-sphere");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(103);
    let mut spread: f64 = 0.0;
    for _ in 0..100 {
        let u = sample_chart_point(m.integration_chart(), &mut rng);
        let jet = evaluate_jet(&m, 0, &u).unwrap();
        let n_t = default_timelike_normal(&jet).unwrap();
        let frame = normal_frame_at(&jet, &n_t).unwrap();
        for sign in [1.0, -1.0] {
            let fp = fiber_direction(&frame, &[sign]).unwrap();
            let s = curvature_sample(&jet, &n_t, &fp).unwrap();
            spread = spread.max((s.normalized_principal[0] - s.normalized_principal[1]).abs());
        }
    }
    let spec = QuadratureSpec::default();
    let w = willmore_energy(&m, &spec, SectionSign::Plus).unwrap();
    let tau = total_absolute_curvature(&m, &spec).unwrap().tau_ell;
    check(
        "C3",
        "lightcone sphere: umbilical, Willmore 4pi, tau = 2",
        spread < 1e-9 && (w - 4.0 * PI).abs() < 0.001 * 4.0 * PI && (tau - 2.0).abs() < 1e-3,
        format!("spread = {spread:.2e}, W = {w:.6}, tau = {tau:.6}"),
    );
}

#[test]
fn c04_willmore_torus() {
    let m = model_by_name("torus", &BTreeMap::from([("R".into(), 2f64.sqrt())])).unwrap();
    let w = willmore_energy(&m, &QuadratureSpec::default(), SectionSign::Plus).unwrap();
    let target = 2.0 * PI * PI;
    check(
        "C4",
        "Willmore torus: integral H~^2 = 2 pi^2 > 4 pi",
        (w - target).abs() < 0.005 * target && w > 4.0 * PI,
        format!("W = {w:.6}, target = {target:.6}"),
    );
}

#[test]
fn c05_eta_oracle_cross_validation() {
    let spec = QuadratureSpec { eta_grid: 32, ..Default::default() };
    let mut detail = String::new();
    let mut ok = true;
    for m in builtin_catalog() {
        if !m.closed {
            continue;
        }
        let tau = total_absolute_curvature(&m, &spec).unwrap().tau_ell;
        let eta = tau_via_eta(&m, &spec).unwrap();
        let tol = 2.0 * eta.stderr + 0.02;
        let this = (tau - eta.mean).abs() <= tol;
        ok &= this;
        detail.push_str(&format!(
            "{}: tau {tau:.3} vs eta {:.3}+-{:.3}; ",
            m.name, eta.mean, eta.stderr
        ));
    }
    check("C5", "tau quadrature vs critical-point oracle", ok, detail);
}

#[test]
fn c06_timelike_normal_independence() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    for name in ["euclid-sphere", "torus", "codim3-sphere"] {
        let m = model(name);
        for _ in 0..50 {
            let u = sample_chart_point(m.integration_chart(), &mut rng);
            let jet = evaluate_jet(&m, 0, &u).unwrap();
            let n_def = default_timelike_normal(&jet).unwrap();
            let k_def =
                pointwise_total_curvature(&jet, &normal_frame_at(&jet, &n_def).unwrap(), 128)
                    .unwrap();
            let n_boost = boosted_timelike_normal(&jet, 0.5, 1).unwrap();
            let k_boost =
                pointwise_total_curvature(&jet, &normal_frame_at(&jet, &n_boost).unwrap(), 128)
                    .unwrap();
            worst = worst.max((k_def - k_boost).abs() / k_def.abs().max(1e-6));
        }
    }
    check(
        "C6",
        "K* independent of the timelike normal choice",
        worst < 1e-6,
        format!("worst relative deviation = {worst:.2e}"),
    );
}

#[test]
fn c07_two_path_and_determinant_identities() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
    let mut worst: f64 = 0.0;
    for m in builtin_catalog() {
        let chart = m.integration_chart();
        for _ in 0..100 {
            let u = sample_chart_point(chart, &mut rng);
            let jet = evaluate_jet(&m, 0, &u).unwrap();
            let n_t = default_timelike_normal(&jet).unwrap();
            let frame = normal_frame_at(&jet, &n_t).unwrap();
            let mu = random_fiber(&mut rng, frame.spacelike_count());
            let fp = fiber_direction(&frame, &mu).unwrap();
            // two-path agreement is asserted inside lipschitz_killing
            let lk = lipschitz_killing(&jet, &n_t, &fp).unwrap();
            let sample = curvature_sample(&jet, &n_t, &fp).unwrap();
            let prod: f64 = sample.principal.iter().product();
            let scale = sample.k_ell.abs().max(prod.abs()).max(1e-8);
            worst = worst.max((sample.k_ell - prod).abs() / scale);
            assert!(lk.is_finite());
        }
    }
    check(
        "C7",
        "Lipschitz-Killing two-path and det/eigenproduct identities",
        worst < 1e-8,
        format!("worst relative error = {worst:.2e}"),
    );
}

fn random_fiber<R: rand::Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

#[test]
fn c08_hessian_identity() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(108);
    let mut worst_identity: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let step = 1e-5;
    for m in builtin_catalog() {
        if !m.closed {
            continue;
        }
        for _ in 0..20 {
            let v = random_direction(m.ambient_dim, &mut rng);
            for cp in find_critical_points(&m, &v, 32, 1e-10).unwrap() {
                if cp.degenerate {
                    continue;
                }
                worst_identity =
                    worst_identity.max(hessian_identity_residual(&m, &cp, &v).unwrap());
                // analytic vs finite-difference Hessian at the point
                let (_, h) = height_gradient_hessian(&m, cp.chart_index, &cp.u, &v).unwrap();
                for i in 0..cp.u.len() {
                    let mut up = cp.u.clone();
                    let mut um = cp.u.clone();
                    up[i] += step;
                    um[i] -= step;
                    let (gp, _) = height_gradient_hessian(&m, cp.chart_index, &up, &v).unwrap();
                    let (gm, _) = height_gradient_hessian(&m, cp.chart_index, &um, &v).unwrap();
                    for j in 0..cp.u.len() {
                        let fd = (gp[j] - gm[j]) / (2.0 * step);
                        worst_fd = worst_fd.max((h[(i, j)] - fd).abs());
                    }
                }
            }
        }
    }
    check(
        "C8",
        "height Hessian identity and finite-difference agreement",
        worst_identity < 1e-8 && worst_fd < 1e-6,
        format!("identity residual = {worst_identity:.2e}, fd residual = {worst_fd:.2e}"),
    );
}

#[test]
fn c09_tightness_triad() {
    let spec = QuadratureSpec::default();
    let mut detail = String::new();
    let mut ok = true;

    for name in ["euclid-sphere", "lightcone-sphere"] {
        let m = model(name);
        let tau = total_absolute_curvature(&m, &spec).unwrap().tau_ell;
        let convex = l_convexity_check(&m, 24, 48, 1e-6).unwrap().verdict;
        let tight = l_tightness_verdict(&m, tau, 0.02).unwrap();
        ok &= convex == ConvexityVerdict::Convex && tight == TightnessVerdict::Tight;
        detail.push_str(&format!("{name}: {convex:?}+{tight:?}; "));
    }

    let bumpy = model("bumpy-sphere");
    let tau = total_absolute_curvature(&bumpy, &spec).unwrap().tau_ell;
    let convex = l_convexity_check(&bumpy, 24, 48, 1e-6).unwrap().verdict;
    let tight = l_tightness_verdict(&bumpy, tau, 0.02).unwrap();
    ok &= convex == ConvexityVerdict::NonConvex
        && tight == TightnessVerdict::NotTight
        && tau > 2.02;
    detail.push_str(&format!("bumpy-sphere: {convex:?}+{tight:?}, tau = {tau:.4}"));

    check("C9", "convexity/tightness triad", ok, detail);
}

#[test]
fn c10_flatness_fixture() {
    let patch = model("lightlike-planar-patch");
    let flat = flatness_probe(&patch, 16, 1e-10).unwrap();
    let sphere = model("euclid-sphere");
    let curved = flatness_probe(&sphere, 16, 1e-10).unwrap();
    check(
        "C10",
        "flatness probe separates flat patch from sphere",
        flat.max_h < 1e-10 && flat.gauss_spread < 1e-10 && curved.gauss_spread > 0.1,
        format!(
            "patch: max|h| = {:.2e}, spread = {:.2e}; sphere spread = {:.2}",
            flat.max_h, flat.gauss_spread, curved.gauss_spread
        ),
    );
}

#[test]
fn c11_determinism() {
    let spec = QuadratureSpec {
        base_polar: 32,
        base_periodic: 64,
        fiber_nodes: 16,
        mc_directions: 16,
        eta_grid: 16,
        ..Default::default()
    };
    let a = run_analyses(&model("torus"), &spec, AnalysisSelection::all()).unwrap();
    let b = run_analyses(&model("torus"), &spec, AnalysisSelection::all()).unwrap();
    let ja = serde_json::to_string_pretty(&a).unwrap();
    let jb = serde_json::to_string_pretty(&b).unwrap();
    check(
        "C11",
        "repeated runs serialize byte-identically",
        ja == jb,
        format!("{} bytes", ja.len()),
    );
}

#[test]
fn matched_xi_fiberpoint_invariants() {
    // supporting property for C8: every matched fiber point reproduces the
    // direction and is unit spacelike
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(112);
    for name in ["euclid-sphere", "torus"] {
        let m = model(name);
        let v = random_direction(m.ambient_dim, &mut rng);
        for cp in find_critical_points(&m, &v, 24, 1e-10).unwrap() {
            let jet = evaluate_jet(&m, cp.chart_index, &cp.u).unwrap();
            let n_t = default_timelike_normal(&jet).unwrap();
            let res = lcurv_core::heightfn::matched_xi_residual(&cp, &n_t, &v).unwrap();
            assert!(res < 1e-8);
            let _ = FiberPoint { mu: cp.matched_xi.mu.clone(), xi: cp.matched_xi.xi.clone() };
            let _ = fiber_point_from_lightlike(&normal_frame_at(&jet, &n_t).unwrap(), &v).unwrap();
        }
    }
}
