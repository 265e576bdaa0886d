//! Lightlike convexity and tightness verdicts for closed codimension-two
//! models: tangent lightlike hyperplanes, sampled support-plane tests and
//! the tau-based tightness classification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{default_timelike_normal, fiber_point_from_lightlike, normal_frame_at};
use crate::immersion::{evaluate_jet, SubmanifoldModel};
use crate::minkowski::{Hyperplane, MinkVector, pseudo_dot_unchecked};
use crate::par::map_ordered;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvexityVerdict {
    Convex,
    NonConvex,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TightnessVerdict {
    Tight,
    NotTight,
    Inconclusive,
}

/// One recorded support-plane violation.
#[derive(Debug, Clone, Serialize)]
pub struct ViolatingPair {
    pub base_u: Vec<f64>,
    pub test_u: Vec<f64>,
    /// +1 for the v^+ hyperplane, -1 for v^-.
    pub sign: i8,
    /// Diameter-normalized violation magnitude.
    pub violation: f64,
}

/// Result of the sampled support-plane test.
#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    /// Max diameter-normalized wrong-side excursion over all sampled
    /// (base point, sign) hyperplanes.
    pub worst_violation: f64,
    pub violating_pairs: Vec<ViolatingPair>,
    pub verdict: ConvexityVerdict,
    pub tolerance: f64,
    pub base_samples: usize,
    pub test_samples: usize,
}

const MAX_RECORDED_PAIRS: usize = 16;

/// The two tangent lightlike hyperplanes HP(v^+-, c^+-) at a point, with
/// v^+- = n^T +- n^S from the model's global section.
pub fn tangent_lightlike_hyperplanes(
    model: &SubmanifoldModel,
    u: &[f64],
) -> Result<(Hyperplane, Hyperplane)> {
    if model.codim() != 2 {
        return Err(Error::Unsupported(format!(
            "{}: tangent lightlike hyperplanes need codimension 2",
            model.name
        )));
    }
    let section = model
        .plus_lightlike
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("{}: no global lightlike section", model.name)))?;
    let jet = evaluate_jet(model, 0, u)?;
    let n_t = default_timelike_normal(&jet)?;
    let frame = normal_frame_at(&jet, &n_t)?;
    let fp = fiber_point_from_lightlike(&frame, &section(0, u, &jet))?;
    let v_plus = n_t.add(&fp.xi);
    let v_minus = n_t.sub(&fp.xi);
    let c_plus = pseudo_dot_unchecked(&jet.position, &v_plus);
    let c_minus = pseudo_dot_unchecked(&jet.position, &v_minus);
    Ok((
        Hyperplane::new(v_plus, c_plus)?,
        Hyperplane::new(v_minus, c_minus)?,
    ))
}

fn grid_points(model: &SubmanifoldModel, density: usize) -> Vec<Vec<f64>> {
    let chart = model.integration_chart();
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for &(a, b) in &chart.sampling_box() {
        let mut next = Vec::with_capacity(points.len() * density);
        for p in &points {
            for j in 0..density {
                let t = (j as f64 + 0.5) / density as f64;
                let mut q = p.clone();
                q.push(a + t * (b - a));
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// Sampled support-plane test: for each sampled base point and each of
/// the two tangent lightlike hyperplanes, checks that the sampled image
/// of M stays on one side.
pub fn l_convexity_check(
    model: &SubmanifoldModel,
    base_density: usize,
    test_density: usize,
    tol: f64,
) -> Result<SupportReport> {
    if !model.closed {
        return Err(Error::NotClosed(model.name.clone()));
    }
    let bases = grid_points(model, base_density);
    let tests = grid_points(model, test_density);
    let positions: Vec<MinkVector> = {
        let mut out = Vec::with_capacity(tests.len());
        for u in &tests {
            out.push(evaluate_jet(model, 0, u)?.position);
        }
        out
    };
    let diameter = {
        let mut d: f64 = 0.0;
        // coarse diameter estimate from a subsample
        let step = (positions.len() / 64).max(1);
        for (i, p) in positions.iter().step_by(step).enumerate() {
            for q in positions.iter().step_by(step).skip(i + 1) {
                let dist: f64 = p
                    .components()
                    .iter()
                    .zip(q.components())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d = d.max(dist);
            }
        }
        d.max(1e-12)
    };

    type BaseOutcome = Result<Vec<(Vec<f64>, Vec<f64>, i8, f64)>>;
    let outcomes: Vec<BaseOutcome> = map_ordered(bases.clone(), |bu| {
        let (hp_plus, hp_minus) = tangent_lightlike_hyperplanes(model, &bu)?;
        let mut found = Vec::new();
        for (sign, hp) in [(1i8, &hp_plus), (-1i8, &hp_minus)] {
            let mut min_side: f64 = 0.0;
            let mut max_side: f64 = 0.0;
            let mut min_at = 0usize;
            let mut max_at = 0usize;
            for (qi, pos) in positions.iter().enumerate() {
                let side = pseudo_dot_unchecked(pos, &hp.pseudo_normal) - hp.offset;
                if side < min_side {
                    min_side = side;
                    min_at = qi;
                }
                if side > max_side {
                    max_side = side;
                    max_at = qi;
                }
            }
            // support fails only when the image straddles the plane; the
            // smaller excursion measures how far the wrong side reaches
            let violation = min_side.abs().min(max_side) / diameter;
            if violation > 0.0 {
                let wrong = if min_side.abs() < max_side { min_at } else { max_at };
                found.push((bu.clone(), tests[wrong].clone(), sign, violation));
            }
        }
        Ok(found)
    });

    let mut worst: f64 = 0.0;
    let mut pairs: Vec<ViolatingPair> = Vec::new();
    for o in outcomes {
        for (base_u, test_u, sign, violation) in o? {
            worst = worst.max(violation);
            if violation > tol && pairs.len() < MAX_RECORDED_PAIRS {
                pairs.push(ViolatingPair { base_u, test_u, sign, violation });
            }
        }
    }
    let verdict = if worst < tol {
        ConvexityVerdict::Convex
    } else {
        ConvexityVerdict::NonConvex
    };
    Ok(SupportReport {
        worst_violation: worst,
        violating_pairs: pairs,
        verdict,
        tolerance: tol,
        base_samples: bases.len(),
        test_samples: positions.len(),
    })
}

/// Tau-based tightness classification, cross-checked against the
/// convexity test on sphere-topology codimension-two models.
pub fn l_tightness_verdict(
    model: &SubmanifoldModel,
    tau_ell: f64,
    tau_tol: f64,
) -> Result<TightnessVerdict> {
    let gamma = model.morse_number.ok_or_else(|| {
        Error::Unsupported(format!("{}: no Morse number metadata", model.name))
    })? as f64;
    let tight = (tau_ell - gamma).abs() <= tau_tol;
    if model.codim() == 2 && model.euler_characteristic == Some(2) {
        let support = l_convexity_check(model, 24, 48, 1e-6)?;
        let convex = support.verdict == ConvexityVerdict::Convex;
        if convex != tight {
            return Ok(TightnessVerdict::Inconclusive);
        }
    }
    Ok(if tight { TightnessVerdict::Tight } else { TightnessVerdict::NotTight })
}
