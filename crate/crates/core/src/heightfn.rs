//! Lightcone height functions h_v(u) = <X(u), v>, their critical points
//! and the correspondence with the bundle Gauss map.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frames::{default_timelike_normal, fiber_point_from_lightlike, normal_frame_at, FiberPoint};
use crate::immersion::{evaluate_jet, Jet2, SubmanifoldModel};
use crate::minkowski::{
    causal_class, lightcone_normalize, pseudo_dot_unchecked, CausalClass, MinkVector,
    DEFAULT_CAUSAL_TOL,
};
use crate::par::map_ordered;

pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
const MAX_NEWTON_ITER: usize = 80;
const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// A refined critical point of a lightcone height function.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub chart_index: usize,
    pub u: Vec<f64>,
    pub position: MinkVector,
    pub value: f64,
    /// Number of negative Hessian eigenvalues.
    pub morse_index: usize,
    pub degenerate: bool,
    /// Two distinct roots landed within twice the cluster radius.
    pub cluster_ambiguous: bool,
    /// The fiber point with v = normalized(n^T + xi).
    pub matched_xi: FiberPoint,
    pub hessian: DMatrix<f64>,
}

/// Outcome of counting critical points for one direction.
#[derive(Debug, Clone)]
pub struct EtaSample {
    pub count: usize,
    /// False when a degenerate or ambiguous point makes the count suspect.
    pub reliable: bool,
}

fn validate_direction(v: &MinkVector, dim: usize) -> Result<()> {
    if v.dim() != dim {
        return Err(Error::Dimension(format!(
            "direction dimension {} != ambient {}",
            v.dim(),
            dim
        )));
    }
    if causal_class(v, DEFAULT_CAUSAL_TOL) != CausalClass::Lightlike {
        return Err(Error::NotLightlike(pseudo_dot_unchecked(v, v)));
    }
    if (v.time() - 1.0).abs() > 1e-9 {
        return Err(Error::Degenerate(format!(
            "direction time component {} != 1",
            v.time()
        )));
    }
    Ok(())
}

/// h_v(u) = <X(u), v> for v on the lightcone unit sphere.
pub fn height(model: &SubmanifoldModel, chart: usize, u: &[f64], v: &MinkVector) -> Result<f64> {
    validate_direction(v, model.ambient_dim)?;
    let jet = evaluate_jet(model, chart, u)?;
    Ok(pseudo_dot_unchecked(&jet.position, v))
}

/// Analytic gradient and Hessian of h_v from the jet:
/// grad_i = <X_{u_i}, v>, Hess_ij = <X_{u_i u_j}, v>.
pub fn height_gradient_hessian(
    model: &SubmanifoldModel,
    chart: usize,
    u: &[f64],
    v: &MinkVector,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    validate_direction(v, model.ambient_dim)?;
    let jet = evaluate_jet(model, chart, u)?;
    Ok(jet_gradient_hessian(&jet, v))
}

fn jet_gradient_hessian(jet: &Jet2, v: &MinkVector) -> (DVector<f64>, DMatrix<f64>) {
    let s = jet.intrinsic_dim();
    let grad = DVector::from_fn(s, |i, _| pseudo_dot_unchecked(&jet.first[i], v));
    let hess = DMatrix::from_fn(s, s, |i, j| pseudo_dot_unchecked(&jet.second[i][j], v));
    (grad, hess)
}

/// Damped Newton iteration on the gradient from one seed. Returns the
/// converged parameter point, or None if the seed fails.
fn newton_from_seed(
    model: &SubmanifoldModel,
    chart_index: usize,
    seed: &[f64],
    v: &MinkVector,
    tol: f64,
) -> Option<Vec<f64>> {
    let chart = &model.charts[chart_index];
    let max_step = 0.25 * chart.diameter();
    let mut u = seed.to_vec();
    for _ in 0..MAX_NEWTON_ITER {
        let jet = evaluate_jet(model, chart_index, &u).ok()?;
        let (grad, hess) = jet_gradient_hessian(&jet, v);
        if grad.norm() < tol {
            // reject chart-degenerate roots (coordinate poles)
            let g = crate::frames::gram_matrix(&jet);
            if g.determinant().abs() < 1e-10 {
                return None;
            }
            return chart.wrap(&u);
        }
        let step = hess.clone().lu().solve(&grad)?;
        let mut delta: Vec<f64> = step.iter().map(|x| -x).collect();
        let norm: f64 = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return None;
        }
        if norm > max_step {
            for d in &mut delta {
                *d *= max_step / norm;
            }
        }
        for (ui, d) in u.iter_mut().zip(&delta) {
            *ui += d;
        }
        // keep non-periodic coordinates inside the box
        for (i, ui) in u.iter_mut().enumerate() {
            if !chart.periodic[i] {
                let (a, b) = chart.domain[i];
                *ui = ui.clamp(a, b);
            }
        }
    }
    None
}

/// Grid nodes of the chart sampling box, `density` per axis.
fn grid_nodes(chart: &crate::immersion::ParamChart, density: usize) -> Vec<Vec<f64>> {
    let mut nodes: Vec<Vec<f64>> = vec![vec![]];
    for &(a, b) in &chart.sampling_box() {
        let mut next = Vec::with_capacity(nodes.len() * density);
        for p in &nodes {
            for j in 0..density {
                let t = (j as f64 + 0.5) / density as f64;
                let mut q = p.clone();
                q.push(a + t * (b - a));
                next.push(q);
            }
        }
        nodes = next;
    }
    nodes
}

/// Indices of lattice nodes whose squared gradient norm is a local
/// minimum over axis neighbors (periodic axes wrap).
fn local_min_seeds(
    chart: &crate::immersion::ParamChart,
    density: usize,
    norms: &[f64],
) -> Vec<usize> {
    let s = chart.dim();
    let strides: Vec<usize> = (0..s).map(|i| density.pow((s - 1 - i) as u32)).collect();
    let mut seeds = Vec::new();
    'node: for idx in 0..norms.len() {
        if !norms[idx].is_finite() {
            continue;
        }
        for axis in 0..s {
            let coord = (idx / strides[axis]) % density;
            for dir in [-1isize, 1] {
                let nc = coord as isize + dir;
                let nc = if chart.periodic[axis] {
                    nc.rem_euclid(density as isize) as usize
                } else if nc < 0 || nc >= density as isize {
                    continue;
                } else {
                    nc as usize
                };
                let neighbor = (idx as isize
                    + (nc as isize - coord as isize) * strides[axis] as isize)
                    as usize;
                if norms[neighbor].is_finite() && norms[neighbor] < norms[idx] {
                    continue 'node;
                }
            }
        }
        seeds.push(idx);
    }
    seeds
}

/// Finds and classifies all critical points of h_v on a closed model by
/// seeded damped Newton search across every chart, deduplicated in
/// ambient space.
pub fn find_critical_points(
    model: &SubmanifoldModel,
    v: &MinkVector,
    grid_density: usize,
    newton_tol: f64,
) -> Result<Vec<CriticalPoint>> {
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    validate_direction(v, model.ambient_dim)?;

    let mut roots: Vec<(usize, Vec<f64>)> = Vec::new();
    for (ci, chart) in model.search_charts() {
        let nodes = grid_nodes(chart, grid_density);
        let norms: Vec<f64> = map_ordered(nodes.clone(), |u| {
            match evaluate_jet(model, ci, &u) {
                Ok(jet) => jet_gradient_hessian(&jet, v).0.norm_squared(),
                Err(_) => f64::NAN,
            }
        });
        let seeds = local_min_seeds(chart, grid_density, &norms);
        let found: Vec<Option<Vec<f64>>> = map_ordered(seeds, |idx| {
            newton_from_seed(model, ci, &nodes[idx], v, newton_tol)
        });
        roots.extend(found.into_iter().flatten().map(|u| (ci, u)));
    }

    // deduplicate in ambient space
    let diam = model.integration_chart().diameter();
    let radius = (10.0 * newton_tol * diam).max(1e-7);
    let mut clusters: Vec<(usize, Vec<f64>, MinkVector)> = Vec::new();
    for (ci, u) in roots {
        let pos = evaluate_jet(model, ci, &u)?.position;
        let dup = clusters
            .iter()
            .any(|(_, _, p)| euclid_dist(p, &pos) < radius);
        if !dup {
            clusters.push((ci, u, pos));
        }
    }
    // deterministic ordering: by height value, then position
    clusters.sort_by(|a, b| {
        let ha = pseudo_dot_unchecked(&a.2, v);
        let hb = pseudo_dot_unchecked(&b.2, v);
        ha.partial_cmp(&hb)
            .unwrap()
            .then_with(|| a.2.components().partial_cmp(b.2.components()).unwrap())
    });
    let ambiguous: Vec<bool> = clusters
        .iter()
        .map(|(_, _, p)| {
            clusters
                .iter()
                .filter(|(_, _, q)| {
                    let d = euclid_dist(p, q);
                    d > 0.0 && d < 2.0 * radius
                })
                .count()
                > 0
        })
        .collect();

    let mut out = Vec::with_capacity(clusters.len());
    for ((ci, u, pos), amb) in clusters.into_iter().zip(ambiguous) {
        let jet = evaluate_jet(model, ci, &u)?;
        let (grad, hess) = jet_gradient_hessian(&jet, v);
        debug_assert!(grad.norm() < 1e-8);
        let sym = nalgebra::SymmetricEigen::new(hess.clone());
        let morse_index = sym.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        let s = jet.intrinsic_dim();
        let scale = hess.norm().max(1e-300);
        let degenerate = hess.determinant().abs() / scale.powi(s as i32) < DEGENERACY_THRESHOLD;
        let n_t = default_timelike_normal(&jet)?;
        let frame = normal_frame_at(&jet, &n_t)?;
        let matched_xi = fiber_point_from_lightlike(&frame, v)?;
        out.push(CriticalPoint {
            chart_index: ci,
            u,
            value: pseudo_dot_unchecked(&pos, v),
            position: pos,
            morse_index,
            degenerate,
            cluster_ambiguous: amb,
            matched_xi,
            hessian: hess,
        });
    }
    Ok(out)
}

fn euclid_dist(a: &MinkVector, b: &MinkVector) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// max_ij |Hess_ij(h_v) - N_h h_ij(n^T, xi)| at a critical point with its
/// matched fiber point. The sign follows from differentiating
/// <l, X_{u_i}> = 0: Hess_ij = <X_{u_iu_j}, l/l_0> = N_h h_ij.
pub fn hessian_identity_residual(
    model: &SubmanifoldModel,
    cp: &CriticalPoint,
    v: &MinkVector,
) -> Result<f64> {
    let jet = evaluate_jet(model, cp.chart_index, &cp.u)?;
    let (_, hess) = jet_gradient_hessian(&jet, v);
    let n_t = default_timelike_normal(&jet)?;
    let (h, _) = crate::curvature::second_fundamental(&jet, &n_t, &cp.matched_xi);
    let n_h = crate::curvature::nh_factor(&n_t, &cp.matched_xi.xi)?;
    let mut worst: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((hess[(i, j)] - n_h * h[(i, j)]).abs());
        }
    }
    Ok(worst)
}

/// Number of critical points of h_v, with a reliability flag that drops
/// when a degenerate or ambiguous point is present.
pub fn eta_count(
    model: &SubmanifoldModel,
    v: &MinkVector,
    grid_density: usize,
) -> Result<EtaSample> {
    let cps = find_critical_points(model, v, grid_density, DEFAULT_NEWTON_TOL)?;
    let reliable = !cps.is_empty()
        && cps.iter().all(|c| !c.degenerate && !c.cluster_ambiguous);
    Ok(EtaSample { count: cps.len(), reliable })
}

/// Uniform random direction on S^{n-1}_+ (spatial part uniform on the
/// Euclidean unit sphere).
pub fn random_direction<R: rand::Rng>(dim: usize, rng: &mut R) -> MinkVector {
    loop {
        let sp: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let q: f64 = sp.iter().map(|x| x * x).sum();
        if q > 1e-4 && q <= 1.0 {
            let n = q.sqrt();
            let mut c = vec![1.0];
            c.extend(sp.iter().map(|x| x / n));
            return MinkVector::from_vec(c);
        }
    }
}

/// Checks Prop-style matched-xi consistency: the lightcone image of the
/// matched fiber point reproduces v.
pub fn matched_xi_residual(cp: &CriticalPoint, n_t: &MinkVector, v: &MinkVector) -> Result<f64> {
    let image = lightcone_normalize(&n_t.add(&cp.matched_xi.xi))?;
    Ok(euclid_dist(&image, v))
}
