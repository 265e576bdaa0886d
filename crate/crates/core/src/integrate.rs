//! Quadrature engine for the integral quantities: fiber total curvature
//! K*(p), total absolute lightcone curvature tau, its Monte-Carlo
//! critical-point oracle, codimension-two signed/absolute totals,
//! Gauss-Bonnet and Willmore integrals, and theorem verdicts.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rand::SeedableRng;
use serde::Serialize;

use crate::curvature::{curvature_sample, lipschitz_killing};
use crate::error::{Error, Result};
use crate::frames::{
    default_timelike_normal, fiber_direction, fiber_point_from_lightlike, normal_frame_at,
    FiberPoint, NormalFrame,
};
use crate::heightfn::{eta_count, random_direction};
use crate::immersion::{evaluate_jet, Jet2, ParamChart, SubmanifoldModel};
use crate::minkowski::MinkVector;
use crate::par::{map_ordered, pairwise_sum};

/// Grid sizes, fiber rule resolution and Monte-Carlo parameters.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes on each non-periodic (polar) axis.
    pub base_polar: usize,
    /// Trapezoid nodes on each periodic axis.
    pub base_periodic: usize,
    /// Trapezoid nodes on an S^1 fiber (S^0 uses counting measure).
    pub fiber_nodes: usize,
    /// Directions drawn for the critical-point oracle.
    pub mc_directions: usize,
    pub seed: u64,
    /// Seed-grid density per axis for critical-point searches.
    pub eta_grid: usize,
    pub newton_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            base_polar: 128,
            base_periodic: 256,
            fiber_nodes: 64,
            mc_directions: 200,
            seed: 7,
            eta_grid: 64,
            newton_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_polar", self.base_polar),
            ("base_periodic", self.base_periodic),
            ("fiber_nodes", self.fiber_nodes),
            ("mc_directions", self.mc_directions),
            ("eta_grid", self.eta_grid),
        ] {
            if v < 8 {
                return Err(Error::Degenerate(format!("{name} = {v} < 8")));
            }
        }
        Ok(())
    }
}

/// Volume of the unit m-sphere, with the m = 0 counting convention
/// gamma_0 = 2. Uses gamma_m = 2*pi/(m-1) * gamma_{m-2}.
pub fn sphere_volume(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (m as f64 - 1.0) * sphere_volume(m - 2),
    }
}

/// Tensor-product base grid over the integration chart: (node, weight)
/// with Gauss-Legendre on non-periodic axes and trapezoid on periodic
/// ones.
pub fn base_grid(chart: &ParamChart, spec: &QuadratureSpec) -> Vec<(Vec<f64>, f64)> {
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(vec![], 1.0)];
    for (&(a, b), &periodic) in chart.domain.iter().zip(&chart.periodic) {
        let axis: Vec<(f64, f64)> = if periodic {
            let n = spec.base_periodic;
            let w = (b - a) / n as f64;
            (0..n).map(|j| (a + j as f64 * w, w)).collect()
        } else {
            let rule = GaussLegendre::new(NonZeroUsize::new(spec.base_polar).unwrap());
            rule.as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| {
                    let half = 0.5 * (b - a);
                    (a + half * (x + 1.0), half * w)
                })
                .collect()
        };
        let mut next = Vec::with_capacity(grid.len() * axis.len());
        for (u, w) in &grid {
            for &(x, wx) in &axis {
                let mut v = u.clone();
                v.push(x);
                next.push((v, w * wx));
            }
        }
        grid = next;
    }
    grid
}

/// K*(p): the integral of |normalized Lipschitz-Killing curvature| over
/// the fiber sphere of the unit normal bundle. S^0 fibers use counting
/// measure; S^1 fibers use the trapezoid rule.
pub fn pointwise_total_curvature(
    jet: &Jet2,
    frame: &NormalFrame,
    fiber_nodes: usize,
) -> Result<f64> {
    match frame.spacelike_count() {
        1 => {
            let xi = fiber_direction(frame, &[1.0])?;
            let minus = FiberPoint { mu: vec![-1.0], xi: xi.xi.scale(-1.0) };
            Ok(lipschitz_killing(jet, &frame.n_t, &xi)?.abs()
                + lipschitz_killing(jet, &frame.n_t, &minus)?.abs())
        }
        2 => {
            let n = fiber_nodes;
            let w = 2.0 * std::f64::consts::PI / n as f64;
            let mut vals = Vec::with_capacity(n);
            for j in 0..n {
                let alpha = j as f64 * w;
                let fp = fiber_direction(frame, &[alpha.cos(), alpha.sin()])?;
                vals.push(lipschitz_killing(jet, &frame.n_t, &fp)?.abs() * w);
            }
            Ok(pairwise_sum(&vals))
        }
        m => Err(Error::Unsupported(format!(
            "fiber sphere S^{m} quadrature not implemented"
        ))),
    }
}

/// Summary of a tau computation.
#[derive(Debug, Clone, Serialize)]
pub struct TauResult {
    pub tau_ell: f64,
    pub kstar_min: f64,
    pub kstar_max: f64,
    /// Area-weighted mean of K*.
    pub kstar_mean: f64,
}

/// tau = (1/gamma_{n-1}) * integral of K* against the area element.
pub fn total_absolute_curvature(
    model: &SubmanifoldModel,
    spec: &QuadratureSpec,
) -> Result<TauResult> {
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    spec.validate()?;
    let chart = model.integration_chart();
    let grid = base_grid(chart, spec);
    let samples: Vec<Result<(f64, f64)>> = map_ordered(grid, |(u, w)| {
        let jet = evaluate_jet(model, 0, &u)?;
        let n_t = default_timelike_normal(&jet)?;
        let frame = normal_frame_at(&jet, &n_t)?;
        let kstar = pointwise_total_curvature(&jet, &frame, spec.fiber_nodes)?;
        let area = crate::frames::gram_matrix(&jet).determinant().sqrt();
        Ok((kstar, area * w))
    });
    let mut integrand = Vec::with_capacity(samples.len());
    let mut areas = Vec::with_capacity(samples.len());
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in samples {
        let (kstar, dv) = s?;
        kmin = kmin.min(kstar);
        kmax = kmax.max(kstar);
        integrand.push(kstar * dv);
        areas.push(dv);
    }
    let total = pairwise_sum(&integrand);
    let area = pairwise_sum(&areas);
    let gamma = sphere_volume(model.ambient_dim - 2);
    Ok(TauResult {
        tau_ell: total / gamma,
        kstar_min: kmin,
        kstar_max: kmax,
        kstar_mean: total / area,
    })
}

/// Monte-Carlo estimate of tau as the average critical-point count over
/// uniform directions.
#[derive(Debug, Clone, Serialize)]
pub struct EtaEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub used: usize,
    pub flagged: usize,
}

pub fn tau_via_eta(model: &SubmanifoldModel, spec: &QuadratureSpec) -> Result<EtaEstimate> {
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    spec.validate()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let dirs: Vec<MinkVector> = (0..spec.mc_directions)
        .map(|_| random_direction(model.ambient_dim, &mut rng))
        .collect();
    let samples: Vec<Result<crate::heightfn::EtaSample>> =
        map_ordered(dirs, |v| eta_count(model, &v, spec.eta_grid));
    let mut counts = Vec::new();
    let mut flagged = 0usize;
    for s in samples {
        let s = s?;
        if s.reliable {
            counts.push(s.count as f64);
        } else {
            flagged += 1;
        }
    }
    if flagged * 5 > spec.mc_directions {
        return Err(Error::Numerical(format!(
            "{flagged}/{} direction draws flagged degenerate",
            spec.mc_directions
        )));
    }
    let m = counts.len() as f64;
    let mean = pairwise_sum(&counts) / m;
    let var: Vec<f64> = counts.iter().map(|c| (c - mean) * (c - mean)).collect();
    let stderr = if counts.len() > 1 {
        (pairwise_sum(&var) / (m - 1.0)).sqrt() / m.sqrt()
    } else {
        0.0
    };
    Ok(EtaEstimate { mean, stderr, used: counts.len(), flagged })
}

/// Signed and absolute codimension-two totals.
#[derive(Debug, Clone, Serialize)]
pub struct Codim2Totals {
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// Signed integral of K~+ against the area element.
    pub gauss_bonnet_lhs: f64,
}

fn plus_minus_curvatures(
    model: &SubmanifoldModel,
    u: &[f64],
) -> Result<(Jet2, f64, f64, f64)> {
    let jet = evaluate_jet(model, 0, u)?;
    let n_t = default_timelike_normal(&jet)?;
    let frame = normal_frame_at(&jet, &n_t)?;
    let section = model
        .plus_lightlike
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("{}: no global lightlike section", model.name)))?;
    let plus = fiber_point_from_lightlike(&frame, &section(0, u, &jet))?;
    let minus = FiberPoint {
        mu: plus.mu.iter().map(|m| -m).collect(),
        xi: plus.xi.scale(-1.0),
    };
    let k_plus = lipschitz_killing(&jet, &n_t, &plus)?;
    let k_minus = lipschitz_killing(&jet, &n_t, &minus)?;
    let area = crate::frames::gram_matrix(&jet).determinant().sqrt();
    Ok((jet, k_plus, k_minus, area))
}

pub fn codim2_totals(model: &SubmanifoldModel, spec: &QuadratureSpec) -> Result<Codim2Totals> {
    if model.codim() != 2 {
        return Err(Error::Unsupported(format!(
            "{}: codimension {} != 2",
            model.name,
            model.codim()
        )));
    }
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    spec.validate()?;
    let grid = base_grid(model.integration_chart(), spec);
    let samples: Vec<Result<(f64, f64, f64)>> = map_ordered(grid, |(u, w)| {
        let (_, kp, km, area) = plus_minus_curvatures(model, &u)?;
        Ok((kp * area * w, kp.abs() * area * w, km.abs() * area * w))
    });
    let mut signed = Vec::new();
    let mut abs_p = Vec::new();
    let mut abs_m = Vec::new();
    for s in samples {
        let (sg, ap, am) = s?;
        signed.push(sg);
        abs_p.push(ap);
        abs_m.push(am);
    }
    let gamma = sphere_volume(model.ambient_dim - 2);
    Ok(Codim2Totals {
        tau_plus: pairwise_sum(&abs_p) / gamma,
        tau_minus: pairwise_sum(&abs_m) / gamma,
        gauss_bonnet_lhs: pairwise_sum(&signed),
    })
}

/// Which of the two lightlike normals the Willmore integrand uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionSign {
    Plus,
    Minus,
}

/// Willmore-type energy: integral of the squared normalized lightcone
/// mean curvature (surfaces of codimension two only).
pub fn willmore_energy(
    model: &SubmanifoldModel,
    spec: &QuadratureSpec,
    sign: SectionSign,
) -> Result<f64> {
    if model.codim() != 2 || model.intrinsic_dim != 2 {
        return Err(Error::Unsupported(format!(
            "{}: Willmore energy needs s = 2, k = 2",
            model.name
        )));
    }
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    spec.validate()?;
    let grid = base_grid(model.integration_chart(), spec);
    let samples: Vec<Result<f64>> = map_ordered(grid, |(u, w)| {
        let jet = evaluate_jet(model, 0, &u)?;
        let n_t = default_timelike_normal(&jet)?;
        let frame = normal_frame_at(&jet, &n_t)?;
        let section = model.plus_lightlike.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("{}: no global lightlike section", model.name))
        })?;
        let mut fp = fiber_point_from_lightlike(&frame, &section(0, &u, &jet))?;
        if sign == SectionSign::Minus {
            fp = FiberPoint { mu: fp.mu.iter().map(|m| -m).collect(), xi: fp.xi.scale(-1.0) };
        }
        let sample = curvature_sample(&jet, &n_t, &fp)?;
        let mean = sample.mean.expect("codim-2 sample has a mean curvature");
        let area = crate::frames::gram_matrix(&jet).determinant().sqrt();
        Ok(mean * mean * area * w)
    });
    let mut vals = Vec::with_capacity(samples.len());
    for s in samples {
        vals.push(s?);
    }
    Ok(pairwise_sum(&vals))
}

/// One theorem check inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub id: String,
    pub target: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Everything computed for one model under one spec.
#[derive(Debug, Clone, Serialize)]
pub struct TotalCurvatureReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub ambient_dim: usize,
    pub intrinsic_dim: usize,
    pub euler_characteristic: Option<i64>,
    pub morse_number: Option<u64>,
    pub kstar_min: Option<f64>,
    pub kstar_max: Option<f64>,
    pub kstar_mean: Option<f64>,
    pub tau_ell: Option<f64>,
    pub tau_plus: Option<f64>,
    pub tau_minus: Option<f64>,
    pub tau_via_eta: Option<f64>,
    pub tau_via_eta_stderr: Option<f64>,
    pub eta_used: Option<usize>,
    pub eta_flagged: Option<usize>,
    pub gauss_bonnet_lhs: Option<f64>,
    pub willmore_energy: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

/// Which analyses to run when assembling a report.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisSelection {
    pub total: bool,
    pub eta: bool,
    pub gauss_bonnet: bool,
    pub willmore: bool,
}

impl AnalysisSelection {
    pub fn all() -> Self {
        Self { total: true, eta: true, gauss_bonnet: true, willmore: true }
    }
}

/// Runs the selected analyses and appends theorem verdicts.
pub fn run_analyses(
    model: &SubmanifoldModel,
    spec: &QuadratureSpec,
    sel: AnalysisSelection,
) -> Result<TotalCurvatureReport> {
    let mut report = TotalCurvatureReport {
        model: model.name.clone(),
        params: model.params.clone(),
        ambient_dim: model.ambient_dim,
        intrinsic_dim: model.intrinsic_dim,
        euler_characteristic: model.euler_characteristic,
        morse_number: model.morse_number,
        kstar_min: None,
        kstar_max: None,
        kstar_mean: None,
        tau_ell: None,
        tau_plus: None,
        tau_minus: None,
        tau_via_eta: None,
        tau_via_eta_stderr: None,
        eta_used: None,
        eta_flagged: None,
        gauss_bonnet_lhs: None,
        willmore_energy: None,
        verdicts: Vec::new(),
    };
    if sel.total {
        let tau = total_absolute_curvature(model, spec)?;
        report.kstar_min = Some(tau.kstar_min);
        report.kstar_max = Some(tau.kstar_max);
        report.kstar_mean = Some(tau.kstar_mean);
        report.tau_ell = Some(tau.tau_ell);
    }
    if sel.eta {
        let eta = tau_via_eta(model, spec)?;
        report.tau_via_eta = Some(eta.mean);
        report.tau_via_eta_stderr = Some(eta.stderr);
        report.eta_used = Some(eta.used);
        report.eta_flagged = Some(eta.flagged);
    }
    if sel.gauss_bonnet && model.codim() == 2 {
        let totals = codim2_totals(model, spec)?;
        report.tau_plus = Some(totals.tau_plus);
        report.tau_minus = Some(totals.tau_minus);
        report.gauss_bonnet_lhs = Some(totals.gauss_bonnet_lhs);
    }
    if sel.willmore && model.codim() == 2 && model.intrinsic_dim == 2 {
        report.willmore_energy = Some(willmore_energy(model, spec, SectionSign::Plus)?);
    }
    report.verdicts = theorem_verdicts(&report);
    Ok(report)
}

/// Pass/fail checks of the quantitative theorem statements against the
/// measured values present in the report.
pub fn theorem_verdicts(report: &TotalCurvatureReport) -> Vec<Verdict> {
    let mut out = Vec::new();
    let gamma = sphere_volume(report.ambient_dim - 2);
    if let (Some(tau), Some(morse)) = (report.tau_ell, report.morse_number) {
        let target = morse as f64;
        out.push(Verdict {
            id: "chern-lashof-lower-bound".into(),
            target,
            measured: tau,
            tolerance: 0.02,
            pass: tau >= target - 0.02,
        });
    }
    if let (Some(tau), Some(eta), Some(se)) =
        (report.tau_ell, report.tau_via_eta, report.tau_via_eta_stderr)
    {
        let tol = 2.0 * se + 0.02;
        out.push(Verdict {
            id: "tau-eta-cross-check".into(),
            target: tau,
            measured: eta,
            tolerance: tol,
            pass: (tau - eta).abs() <= tol,
        });
    }
    if let (Some(lhs), Some(chi)) = (report.gauss_bonnet_lhs, report.euler_characteristic) {
        let target = 0.5 * gamma * chi as f64;
        let tol = 2e-4 * gamma;
        out.push(Verdict {
            id: "gauss-bonnet-signed-integral".into(),
            target,
            measured: lhs,
            tolerance: tol,
            pass: (lhs - target).abs() < tol,
        });
    }
    if let (Some(tp), Some(tm), Some(chi)) =
        (report.tau_plus, report.tau_minus, report.euler_characteristic)
    {
        let measured = gamma * (tp + tm);
        let target = 0.5 * gamma * (4 - chi) as f64;
        let tol = 5e-3 * target.abs().max(1.0);
        out.push(Verdict {
            id: "absolute-total-lower-bound".into(),
            target,
            measured,
            tolerance: tol,
            pass: measured >= target - tol,
        });
    }
    if let Some(w) = report.willmore_energy {
        let target = 4.0 * std::f64::consts::PI;
        let tol = 1e-3 * target;
        out.push(Verdict {
            id: "willmore-lower-bound".into(),
            target,
            measured: w,
            tolerance: tol,
            pass: w >= target - tol,
        });
    }
    out
}

/// Per-grid-point normalized curvature dump as CSV text. Codim-2 models
/// emit two rows per base node (mu = +1/-1); an S^1 fiber emits
/// `fiber_nodes` rows per base node.
pub fn kgrid_csv(model: &SubmanifoldModel, spec: &QuadratureSpec) -> Result<String> {
    spec.validate()?;
    let chart = model.integration_chart();
    let s = chart.dim();
    let mut out = String::new();
    out.push_str("chart");
    for i in 1..=s {
        out.push_str(&format!(",u_{i}"));
    }
    let fiber_coeffs = model.codim() - 1;
    for i in 1..=fiber_coeffs {
        out.push_str(&format!(",mu_{i}"));
    }
    out.push_str(",K_tilde,area_weight\n");
    for (u, w) in base_grid(chart, spec) {
        let jet = evaluate_jet(model, 0, &u)?;
        let n_t = default_timelike_normal(&jet)?;
        let frame = normal_frame_at(&jet, &n_t)?;
        let area = crate::frames::gram_matrix(&jet).determinant().sqrt() * w;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        match frame.spacelike_count() {
            1 => {
                for sign in [1.0, -1.0] {
                    rows.push(vec![sign]);
                }
            }
            2 => {
                for j in 0..spec.fiber_nodes {
                    let a = 2.0 * std::f64::consts::PI * j as f64 / spec.fiber_nodes as f64;
                    rows.push(vec![a.cos(), a.sin()]);
                }
            }
            m => {
                return Err(Error::Unsupported(format!("fiber sphere S^{m} in CSV dump")));
            }
        }
        for mu in rows {
            let fp = fiber_direction(&frame, &mu)?;
            let sample = curvature_sample(&jet, &n_t, &fp)?;
            out.push('0');
            for x in &u {
                out.push_str(&format!(",{x:.17e}"));
            }
            for m in &mu {
                out.push_str(&format!(",{m:.17e}"));
            }
            out.push_str(&format!(",{:.17e},{:.17e}\n", sample.k_ell_normalized, area));
        }
    }
    Ok(out)
}
