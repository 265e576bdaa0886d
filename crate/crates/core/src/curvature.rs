//! Pointwise curvature engine: fundamental forms, lightcone principal and
//! Gauss-Kronecker curvatures, normalized variants and the Lipschitz-Killing
//! curvature of the unit normal sphere bundle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::frames::{
    default_timelike_normal, fiber_direction, gram_matrix, normal_frame_at, project_normal,
    FiberPoint,
};
use crate::immersion::{evaluate_jet, Jet2, SubmanifoldModel};
use crate::minkowski::{lightcone_normalize, pseudo_dot_unchecked, MinkVector};

/// First and lightcone second fundamental forms at a point, for one
/// lightlike normal n^T + xi.
#[derive(Debug, Clone)]
pub struct FundamentalForms {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// Time component of n^T + xi.
    pub ell_0: f64,
}

/// All pointwise curvature quantities at (p, xi).
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    /// Lightcone principal curvatures, ascending.
    pub principal: Vec<f64>,
    /// Lightcone Gauss-Kronecker curvature det(h)/det(g).
    pub k_ell: f64,
    /// Normalized principal curvatures kappa_i / ell_0.
    pub normalized_principal: Vec<f64>,
    /// Normalized Gauss-Kronecker curvature K_ell / ell_0^s.
    pub k_ell_normalized: f64,
    /// Normalized lightcone Lipschitz-Killing curvature of the bundle.
    pub lipschitz_killing: f64,
    pub n_h: f64,
    pub ell_0: f64,
    /// Lightcone mean curvature (codimension two only).
    pub mean: Option<f64>,
}

/// First fundamental form and its inverse.
pub fn first_fundamental(jet: &Jet2) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let g = gram_matrix(jet);
    let det = g.determinant();
    if det < 1e-12 {
        return Err(Error::Degenerate(format!(
            "first fundamental form nearly singular (det = {det})"
        )));
    }
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("first fundamental form not invertible".into()))?;
    Ok((g, g_inv))
}

/// Lightcone second fundamental invariant h_ij = <n^T + xi, X_{u_i u_j}>
/// and the time component ell_0 of the lightlike normal.
pub fn second_fundamental(jet: &Jet2, n_t: &MinkVector, xi: &FiberPoint) -> (DMatrix<f64>, f64) {
    let s = jet.intrinsic_dim();
    let ell = n_t.add(&xi.xi);
    let h = DMatrix::from_fn(s, s, |i, j| pseudo_dot_unchecked(&ell, &jet.second[i][j]));
    (h, ell.time())
}

pub fn fundamental_forms(jet: &Jet2, n_t: &MinkVector, xi: &FiberPoint) -> Result<FundamentalForms> {
    let (g, g_inv) = first_fundamental(jet)?;
    let (h, ell_0) = second_fundamental(jet, n_t, xi);
    if ell_0 <= 0.0 {
        return Err(Error::Degenerate(format!("nonpositive ell_0 = {ell_0}")));
    }
    Ok(FundamentalForms { g, g_inv, h, ell_0 })
}

/// Shape operator matrix (h_i^j) = h g^{-1}.
pub fn shape_operator(forms: &FundamentalForms) -> DMatrix<f64> {
    &forms.h * &forms.g_inv
}

/// Eigenvalues of the shape operator, solved as the symmetric generalized
/// problem h x = kappa g x (guaranteed real), ascending.
pub fn principal_curvatures(h: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("first fundamental form not SPD".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Cholesky factor not invertible".into()))?;
    let b = &l_inv * h * l_inv.transpose();
    let sym = nalgebra::SymmetricEigen::new(b);
    let mut eig: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Lightcone Gauss-Kronecker curvature det(h)/det(g).
pub fn gauss_kronecker(forms: &FundamentalForms) -> f64 {
    forms.h.determinant() / forms.g.determinant()
}

/// N_h(v, w) = 1/(v_0 + w_0), the normalization factor 1/ell_0.
pub fn nh_factor(n_t: &MinkVector, xi: &MinkVector) -> Result<f64> {
    let ell_0 = n_t.time() + xi.time();
    if ell_0 <= 1e-14 {
        return Err(Error::Degenerate(format!(
            "ell_0 = {ell_0} violates lightlike-normal positivity"
        )));
    }
    Ok(1.0 / ell_0)
}

/// kappa~_i = kappa_i / ell_0 and K~ = K / ell_0^s.
pub fn normalized_curvatures(principal: &[f64], k_ell: f64, ell_0: f64) -> (Vec<f64>, f64) {
    let norm: Vec<f64> = principal.iter().map(|k| k / ell_0).collect();
    let s = principal.len() as i32;
    (norm, k_ell / ell_0.powi(s))
}

/// Normalized lightcone Lipschitz-Killing curvature at (p, xi), computed
/// as (-N_h)^{k-2} K~ and cross-checked against (-1)^{k-2} N_h^{n-1} K.
pub fn lipschitz_killing(jet: &Jet2, n_t: &MinkVector, xi: &FiberPoint) -> Result<f64> {
    let forms = fundamental_forms(jet, n_t, xi)?;
    let s = jet.intrinsic_dim();
    let k = jet.ambient_dim() - s;
    let n = jet.ambient_dim() - 1;
    let k_ell = gauss_kronecker(&forms);
    let n_h = nh_factor(n_t, &xi.xi)?;
    let k_norm = k_ell * n_h.powi(s as i32);
    let primary = (-n_h).powi((k - 2) as i32) * k_norm;
    let alt = if (k - 2).is_multiple_of(2) { 1.0 } else { -1.0 } * n_h.powi((n - 1) as i32) * k_ell;
    let scale = primary.abs().max(alt.abs()).max(1e-300);
    if (primary - alt).abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::Numerical(format!(
            "Lipschitz-Killing path disagreement: {primary} vs {alt}"
        )));
    }
    Ok(primary)
}

/// Full curvature sample at (p, xi).
pub fn curvature_sample(jet: &Jet2, n_t: &MinkVector, xi: &FiberPoint) -> Result<CurvatureSample> {
    let forms = fundamental_forms(jet, n_t, xi)?;
    let principal = principal_curvatures(&forms.h, &forms.g)?;
    let k_ell = gauss_kronecker(&forms);
    let (normalized_principal, k_ell_normalized) =
        normalized_curvatures(&principal, k_ell, forms.ell_0);
    let lk = lipschitz_killing(jet, n_t, xi)?;
    let n_h = nh_factor(n_t, &xi.xi)?;
    let k = jet.ambient_dim() - jet.intrinsic_dim();
    let mean = if k == 2 {
        Some(mean_curvature_codim2(&normalized_principal))
    } else {
        None
    };
    Ok(CurvatureSample {
        principal,
        k_ell,
        normalized_principal,
        k_ell_normalized,
        lipschitz_killing: lk,
        n_h,
        ell_0: forms.ell_0,
        mean,
    })
}

/// Arithmetic mean of the normalized principal curvatures (the lightcone
/// mean curvature for surfaces).
pub fn mean_curvature_codim2(normalized_principal: &[f64]) -> f64 {
    normalized_principal.iter().sum::<f64>() / normalized_principal.len() as f64
}

/// Flatness report: residuals of the constant-Gauss-map test.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    /// Candidate constant direction on S^{n-1}_+.
    pub direction: MinkVector,
    /// Max |h_ij| over samples for the explicit section tied to the
    /// candidate direction.
    pub max_h: f64,
    /// Max Euclidean distance of the normalized Gauss image from the
    /// candidate direction.
    pub gauss_spread: f64,
}

/// Probes whether the normalized lightcone Gauss map is constant, using
/// the explicit section n^S = -v/<n^T, v> - n^T for a candidate direction
/// v (supplied by the model or estimated as the mean Gauss image).
pub fn flatness_probe(
    model: &SubmanifoldModel,
    grid_per_axis: usize,
    _tol: f64,
) -> Result<FlatnessReport> {
    let chart = model.integration_chart();
    let boxx = chart.sampling_box();
    let s = chart.dim();
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for &(a, b) in &boxx {
        let mut next = Vec::new();
        for p in &points {
            for i in 0..grid_per_axis {
                let t = (i as f64 + 0.5) / grid_per_axis as f64;
                let mut q = p.clone();
                q.push(a + t * (b - a));
                next.push(q);
            }
        }
        points = next;
    }
    debug_assert!(points.iter().all(|p| p.len() == s));

    let candidate = match &model.flat_direction {
        Some(v) => lightcone_normalize(v)?,
        None => estimate_mean_gauss_direction(model, &points)?,
    };

    let mut max_h: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for u in &points {
        let jet = evaluate_jet(model, 0, u)?;
        let n_t = default_timelike_normal(&jet)?;
        let denom = pseudo_dot_unchecked(&n_t, &candidate);
        if denom.abs() < 1e-12 {
            return Err(Error::Degenerate(
                "candidate direction pseudo-orthogonal to n^T".into(),
            ));
        }
        // explicit section from the candidate direction
        let n_s = candidate.scale(-1.0 / denom).sub(&n_t);
        let ell = n_t.add(&n_s);
        for row in &jet.second {
            for x in row {
                max_h = max_h.max(pseudo_dot_unchecked(&ell, x).abs());
            }
        }
        // project the section into the actual fiber and compare Gauss images
        let mut w = project_normal(&jet, &n_s)?;
        w = w.axpy(pseudo_dot_unchecked(&w, &n_t), &n_t);
        let q = pseudo_dot_unchecked(&w, &w);
        if q <= 1e-18 {
            spread = f64::INFINITY;
            continue;
        }
        let xi = w.scale(1.0 / q.sqrt());
        let image = lightcone_normalize(&n_t.add(&xi))?;
        let d: f64 = image
            .components()
            .iter()
            .zip(candidate.components())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        spread = spread.max(d);
    }
    Ok(FlatnessReport { direction: candidate, max_h, gauss_spread: spread })
}

fn estimate_mean_gauss_direction(
    model: &SubmanifoldModel,
    points: &[Vec<f64>],
) -> Result<MinkVector> {
    let dim = model.ambient_dim;
    let mut acc = vec![0.0; dim];
    for u in points {
        let jet = evaluate_jet(model, 0, u)?;
        let n_t = default_timelike_normal(&jet)?;
        let frame = normal_frame_at(&jet, &n_t)?;
        let mut mu = vec![0.0; frame.spacelike_count()];
        mu[0] = 1.0;
        let fp = fiber_direction(&frame, &mu)?;
        let image = lightcone_normalize(&n_t.add(&fp.xi))?;
        for (a, c) in acc.iter_mut().zip(image.components()) {
            *a += c;
        }
    }
    let spatial_norm: f64 = acc[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
    if spatial_norm < 1e-12 {
        return Err(Error::Degenerate("mean Gauss image degenerate".into()));
    }
    let mut c = vec![1.0];
    c.extend(acc[1..].iter().map(|x| x / spatial_norm));
    Ok(MinkVector::from_vec(c))
}
