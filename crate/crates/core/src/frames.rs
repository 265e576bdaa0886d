//! Pseudo-orthonormal normal frames along a spacelike immersion and the
//! fiber sphere of the unit normal bundle relative to a timelike normal.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::immersion::Jet2;
use crate::minkowski::{pseudo_dot_unchecked, MinkVector};

const FRAME_TOL: f64 = 1e-9;

/// A pseudo-orthonormal normal frame at a point: a future-directed unit
/// timelike normal and k-1 unit spacelike normals.
#[derive(Debug, Clone)]
pub struct NormalFrame {
    pub n_t: MinkVector,
    pub n_s: Vec<MinkVector>,
}

/// A point of the fiber sphere S^{k-2}: coefficients `mu` over the
/// spacelike frame legs and the resulting unit spacelike normal `xi`.
#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub mu: Vec<f64>,
    pub xi: MinkVector,
}

/// Gram matrix of the tangent vectors.
pub(crate) fn gram_matrix(jet: &Jet2) -> DMatrix<f64> {
    let s = jet.intrinsic_dim();
    DMatrix::from_fn(s, s, |i, j| pseudo_dot_unchecked(&jet.first[i], &jet.first[j]))
}

/// Removes the tangential component of `v` (g-orthogonal projection onto
/// the normal space).
pub(crate) fn project_normal(jet: &Jet2, v: &MinkVector) -> Result<MinkVector> {
    let s = jet.intrinsic_dim();
    let g = gram_matrix(jet);
    let rhs = DVector::from_fn(s, |i, _| pseudo_dot_unchecked(v, &jet.first[i]));
    let coeffs = g
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular first fundamental form".into()))?;
    let mut out = v.clone();
    for i in 0..s {
        out = out.axpy(-coeffs[i], &jet.first[i]);
    }
    Ok(out)
}

fn normalize_timelike(v: &MinkVector) -> Result<MinkVector> {
    let q = pseudo_dot_unchecked(v, v);
    if q >= -FRAME_TOL {
        return Err(Error::Degenerate(format!(
            "normal projection is not timelike (<v,v> = {q})"
        )));
    }
    let n = v.scale(1.0 / (-q).sqrt());
    Ok(if n.time() > 0.0 { n } else { n.scale(-1.0) })
}

/// Future-directed unit timelike normal obtained by projecting e_0 onto
/// the normal space.
pub fn default_timelike_normal(jet: &Jet2) -> Result<MinkVector> {
    let e0 = MinkVector::basis(jet.ambient_dim(), 0);
    normalize_timelike(&project_normal(jet, &e0)?)
}

/// Hyperbolic rotation of the default timelike normal in the (x_0, x_j)
/// plane, re-projected onto the normal space and renormalized. Supplies a
/// genuinely different future-directed timelike normal field.
pub fn boosted_timelike_normal(jet: &Jet2, rapidity: f64, axis: usize) -> Result<MinkVector> {
    if axis == 0 || axis >= jet.ambient_dim() {
        return Err(Error::Dimension(format!("boost axis {axis} out of range")));
    }
    let base = default_timelike_normal(jet)?;
    let mut c = base.components().to_vec();
    let (t, x) = (c[0], c[axis]);
    c[0] = rapidity.cosh() * t + rapidity.sinh() * x;
    c[axis] = rapidity.sinh() * t + rapidity.cosh() * x;
    let boosted = MinkVector::from_vec(c);
    normalize_timelike(&project_normal(jet, &boosted)?)
}

/// Deterministic Gram-Schmidt over the seed sequence e_1, ..., e_n, e_0:
/// returns exactly k-1 unit spacelike normals orthogonal to the tangents,
/// to `n_t` and to each other.
pub fn normal_frame_at(jet: &Jet2, n_t: &MinkVector) -> Result<NormalFrame> {
    let dim = jet.ambient_dim();
    let k = dim - jet.intrinsic_dim();
    let mut n_s: Vec<MinkVector> = Vec::with_capacity(k - 1);
    let seeds = (1..dim).chain(std::iter::once(0));
    for seed in seeds {
        if n_s.len() == k - 1 {
            break;
        }
        let mut w = project_normal(jet, &MinkVector::basis(dim, seed))?;
        // component along n_t (note <n_t, n_t> = -1)
        w = w.axpy(pseudo_dot_unchecked(&w, n_t), n_t);
        for prev in &n_s {
            w = w.axpy(-pseudo_dot_unchecked(&w, prev), prev);
        }
        let q = pseudo_dot_unchecked(&w, &w);
        if q.abs().sqrt() < FRAME_TOL {
            continue;
        }
        if q <= 0.0 {
            return Err(Error::Degenerate(
                "Gram-Schmidt residual is not spacelike".into(),
            ));
        }
        n_s.push(w.scale(1.0 / q.sqrt()));
    }
    if n_s.len() != k - 1 {
        return Err(Error::Degenerate(format!(
            "found {} independent spacelike normals, expected {}",
            n_s.len(),
            k - 1
        )));
    }
    Ok(NormalFrame { n_t: n_t.clone(), n_s })
}

impl NormalFrame {
    /// Number of spacelike legs (k-1).
    pub fn spacelike_count(&self) -> usize {
        self.n_s.len()
    }

    /// Checks the frame invariants against the jet; returns the worst
    /// residual.
    pub fn invariant_residual(&self, jet: &Jet2) -> f64 {
        let mut worst: f64 = (pseudo_dot_unchecked(&self.n_t, &self.n_t) + 1.0).abs();
        for (i, a) in self.n_s.iter().enumerate() {
            worst = worst.max(pseudo_dot_unchecked(&self.n_t, a).abs());
            for (j, b) in self.n_s.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((pseudo_dot_unchecked(a, b) - target).abs());
            }
            for t in &jet.first {
                worst = worst.max(pseudo_dot_unchecked(a, t).abs());
            }
        }
        for t in &jet.first {
            worst = worst.max(pseudo_dot_unchecked(&self.n_t, t).abs());
        }
        worst
    }
}

/// Combines the spacelike legs with unit coefficients `mu` into a fiber
/// point of the unit normal sphere bundle.
pub fn fiber_direction(frame: &NormalFrame, mu: &[f64]) -> Result<FiberPoint> {
    if mu.len() != frame.spacelike_count() {
        return Err(Error::Dimension(format!(
            "fiber coefficient count {} != {}",
            mu.len(),
            frame.spacelike_count()
        )));
    }
    let norm: f64 = mu.iter().map(|m| m * m).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Degenerate(format!("fiber coefficients not unit ({norm})")));
    }
    let mut xi = MinkVector::zeros(frame.n_t.dim());
    for (m, leg) in mu.iter().zip(&frame.n_s) {
        xi = xi.axpy(*m, leg);
    }
    Ok(FiberPoint { mu: mu.to_vec(), xi })
}

/// Converts a lightlike normal direction `ell` into the fiber point whose
/// lightcone image spans it: `xi = -ell / <n_t, ell> - n_t`.
pub fn fiber_point_from_lightlike(
    frame: &NormalFrame,
    ell: &MinkVector,
) -> Result<FiberPoint> {
    let denom = pseudo_dot_unchecked(&frame.n_t, ell);
    if denom.abs() < 1e-14 {
        return Err(Error::Degenerate("lightlike direction orthogonal to n^T".into()));
    }
    let xi = ell.scale(-1.0 / denom).sub(&frame.n_t);
    let mu: Vec<f64> = frame
        .n_s
        .iter()
        .map(|leg| pseudo_dot_unchecked(&xi, leg))
        .collect();
    Ok(FiberPoint { mu, xi })
}
