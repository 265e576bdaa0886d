//! Spacelike immersions given by second-order jets on parameter charts,
//! plus the built-in catalog of closed-form example submanifolds.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::minkowski::{causal_class, CausalClass, MinkVector, DEFAULT_CAUSAL_TOL};

/// Second-order jet of the position map at one parameter point.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub position: MinkVector,
    /// First partials X_{u_i}, i = 1..s.
    pub first: Vec<MinkVector>,
    /// Second partials X_{u_i u_j}, symmetric; full s x s storage.
    pub second: Vec<Vec<MinkVector>>,
}

impl Jet2 {
    pub fn intrinsic_dim(&self) -> usize {
        self.first.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.dim()
    }
}

pub type JetFn = Arc<dyn Fn(&[f64]) -> Jet2 + Send + Sync>;

/// Global lightlike "+" normal section for codimension-two models:
/// maps (chart index, u, jet) to an (unnormalized) lightlike normal
/// spanning the line labelled "+".
pub type PlusLightlikeFn = Arc<dyn Fn(usize, &[f64], &Jet2) -> MinkVector + Send + Sync>;

/// One parameter chart: a box domain with per-axis periodicity and an
/// analytic jet evaluator.
pub struct ParamChart {
    pub domain: Vec<(f64, f64)>,
    pub periodic: Vec<bool>,
    /// Margin by which the box is shrunk for point sampling near
    /// coordinate singularities (integration uses the full box).
    pub pole_margin: f64,
    /// Charts beyond the first exist only to cover coordinate poles in
    /// point-sampling searches; they are skipped by quadrature.
    pub search_only: bool,
    pub jet: JetFn,
}

impl std::fmt::Debug for ParamChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamChart")
            .field("domain", &self.domain)
            .field("periodic", &self.periodic)
            .field("pole_margin", &self.pole_margin)
            .field("search_only", &self.search_only)
            .finish()
    }
}

impl ParamChart {
    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    /// Wraps periodic coordinates into the box; returns None if a
    /// non-periodic coordinate escapes.
    pub fn wrap(&self, u: &[f64]) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(u.len());
        for (i, &ui) in u.iter().enumerate() {
            let (a, b) = self.domain[i];
            if self.periodic[i] {
                let len = b - a;
                out.push(a + (ui - a).rem_euclid(len));
            } else if ui < a - 1e-12 || ui > b + 1e-12 {
                return None;
            } else {
                out.push(ui.clamp(a, b));
            }
        }
        Some(out)
    }

    /// The box shrunk by the pole margin on non-periodic axes.
    pub fn sampling_box(&self) -> Vec<(f64, f64)> {
        self.domain
            .iter()
            .zip(&self.periodic)
            .map(|(&(a, b), &per)| {
                if per {
                    (a, b)
                } else {
                    (a + self.pole_margin, b - self.pole_margin)
                }
            })
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        self.domain
            .iter()
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// A parametrized spacelike submanifold with topology metadata.
pub struct SubmanifoldModel {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// Ambient dimension n+1.
    pub ambient_dim: usize,
    /// Intrinsic dimension s.
    pub intrinsic_dim: usize,
    pub charts: Vec<ParamChart>,
    pub euler_characteristic: Option<i64>,
    pub morse_number: Option<u64>,
    pub closed: bool,
    /// Globally continuous lightlike "+" section (codim-2 models only).
    pub plus_lightlike: Option<PlusLightlikeFn>,
    /// Candidate constant Gauss-map direction for flatness fixtures.
    pub flat_direction: Option<MinkVector>,
}

impl std::fmt::Debug for SubmanifoldModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubmanifoldModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("ambient_dim", &self.ambient_dim)
            .field("intrinsic_dim", &self.intrinsic_dim)
            .field("closed", &self.closed)
            .finish()
    }
}

impl SubmanifoldModel {
    /// Codimension k = n+1-s.
    pub fn codim(&self) -> usize {
        self.ambient_dim - self.intrinsic_dim
    }

    pub fn is_codim2(&self) -> bool {
        self.codim() == 2
    }

    /// The chart used for quadrature (covers M up to measure zero).
    pub fn integration_chart(&self) -> &ParamChart {
        &self.charts[0]
    }

    /// Charts used in point searches (all of them).
    pub fn search_charts(&self) -> impl Iterator<Item = (usize, &ParamChart)> {
        self.charts.iter().enumerate()
    }
}

/// Evaluates the analytic jet, enforcing the spacelike-tangent invariant.
pub fn evaluate_jet(model: &SubmanifoldModel, chart_index: usize, u: &[f64]) -> Result<Jet2> {
    let chart = model
        .charts
        .get(chart_index)
        .ok_or_else(|| Error::Dimension(format!("no chart {chart_index}")))?;
    if u.len() != chart.dim() {
        return Err(Error::Dimension(format!(
            "expected {} parameters, got {}",
            chart.dim(),
            u.len()
        )));
    }
    let wrapped = chart.wrap(u).ok_or_else(|| Error::OutsideDomain(u.to_vec()))?;
    let jet = (chart.jet)(&wrapped);
    for t in &jet.first {
        if causal_class(t, DEFAULT_CAUSAL_TOL) != CausalClass::Spacelike {
            return Err(Error::Degenerate(format!(
                "non-spacelike tangent at u = {wrapped:?} on {}",
                model.name
            )));
        }
    }
    Ok(jet)
}

/// Central-difference jet of the position map; validation oracle only.
pub fn finite_difference_jet(
    model: &SubmanifoldModel,
    chart_index: usize,
    u: &[f64],
    h: f64,
) -> Result<Jet2> {
    let chart = &model.charts[chart_index];
    let s = chart.dim();
    for (i, &ui) in u.iter().enumerate() {
        if !chart.periodic[i] {
            let (a, b) = chart.domain[i];
            if ui - 2.0 * h < a || ui + 2.0 * h > b {
                return Err(Error::OutsideDomain(u.to_vec()));
            }
        }
    }
    let pos_at = |v: &[f64]| -> Result<MinkVector> {
        let w = chart.wrap(v).ok_or_else(|| Error::OutsideDomain(v.to_vec()))?;
        Ok((chart.jet)(&w).position)
    };
    let position = pos_at(u)?;
    let shift = |u: &[f64], i: usize, d: f64| {
        let mut v = u.to_vec();
        v[i] += d;
        v
    };
    let mut first = Vec::with_capacity(s);
    for i in 0..s {
        let p = pos_at(&shift(u, i, h))?;
        let m = pos_at(&shift(u, i, -h))?;
        first.push(p.sub(&m).scale(0.5 / h));
    }
    let mut second = vec![vec![MinkVector::zeros(position.dim()); s]; s];
    for i in 0..s {
        for j in i..s {
            let d = if i == j {
                let p = pos_at(&shift(u, i, h))?;
                let m = pos_at(&shift(u, i, -h))?;
                p.add(&m).axpy(-2.0, &position).scale(1.0 / (h * h))
            } else {
                let pp = pos_at(&shift(&shift(u, i, h), j, h))?;
                let pm = pos_at(&shift(&shift(u, i, h), j, -h))?;
                let mp = pos_at(&shift(&shift(u, i, -h), j, h))?;
                let mm = pos_at(&shift(&shift(u, i, -h), j, -h))?;
                pp.sub(&pm).sub(&mp).add(&mm).scale(0.25 / (h * h))
            };
            second[i][j] = d.clone();
            second[j][i] = d;
        }
    }
    Ok(Jet2 { position, first, second })
}

fn mv(c: Vec<f64>) -> MinkVector {
    MinkVector::from_vec(c)
}

/// Spherical direction and its derivatives in R^3: omega(theta, phi).
struct SphereDirs {
    w: [f64; 3],
    wt: [f64; 3],
    wp: [f64; 3],
    wtt: [f64; 3],
    wtp: [f64; 3],
    wpp: [f64; 3],
}

fn sphere_dirs(theta: f64, phi: f64) -> SphereDirs {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    SphereDirs {
        w: [st * cp, st * sp, ct],
        wt: [ct * cp, ct * sp, -st],
        wp: [-st * sp, st * cp, 0.0],
        wtt: [-st * cp, -st * sp, -ct],
        wtp: [-ct * sp, ct * cp, 0.0],
        wpp: [-st * cp, -st * sp, 0.0],
    }
}

/// Spatial rotation used by the pole-covering chart: (x,y,z) -> (z,x,y).
fn rot3(v: [f64; 3]) -> [f64; 3] {
    [v[2], v[0], v[1]]
}

fn sphere_chart(r: f64, rotated: bool, extra_axis: bool) -> ParamChart {
    // extra_axis embeds the sphere in {x_0 = 0, x_4 = 0} of R^5_1.
    let jet: JetFn = Arc::new(move |u: &[f64]| {
        let d = sphere_dirs(u[0], u[1]);
        let emit = |v: [f64; 3]| -> MinkVector {
            let v = if rotated { rot3(v) } else { v };
            let mut c = vec![0.0, r * v[0], r * v[1], r * v[2]];
            if extra_axis {
                c.push(0.0);
            }
            mv(c)
        };
        Jet2 {
            position: emit(d.w),
            first: vec![emit(d.wt), emit(d.wp)],
            second: vec![
                vec![emit(d.wtt), emit(d.wtp)],
                vec![emit(d.wtp), emit(d.wpp)],
            ],
        }
    });
    ParamChart {
        domain: vec![(0.0, PI), (0.0, 2.0 * PI)],
        periodic: vec![false, true],
        pole_margin: 0.1,
        search_only: rotated,
        jet,
    }
}

fn outward_radial_section() -> PlusLightlikeFn {
    // e_0 + (0, x/|x|): valid for models whose spatial position is radial
    // from the origin (round spheres, lightcone sphere).
    Arc::new(|_chart, _u, jet: &Jet2| {
        let sp = jet.position.spatial();
        let norm = sp.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut c = vec![1.0];
        c.extend(sp.iter().map(|x| x / norm));
        mv(c)
    })
}

fn euclid_sphere(r: f64) -> SubmanifoldModel {
    SubmanifoldModel {
        name: "euclid-sphere".into(),
        params: BTreeMap::from([("r".into(), r)]),
        ambient_dim: 4,
        intrinsic_dim: 2,
        charts: vec![sphere_chart(r, false, false), sphere_chart(r, true, false)],
        euler_characteristic: Some(2),
        morse_number: Some(2),
        closed: true,
        plus_lightlike: Some(outward_radial_section()),
        flat_direction: None,
    }
}

fn lightcone_sphere(r: f64) -> SubmanifoldModel {
    let chart = |rotated: bool| -> ParamChart {
        let jet: JetFn = Arc::new(move |u: &[f64]| {
            let d = sphere_dirs(u[0], u[1]);
            let pos = |v: [f64; 3], t: f64| -> MinkVector {
                let v = if rotated { rot3(v) } else { v };
                mv(vec![t, r * v[0], r * v[1], r * v[2]])
            };
            Jet2 {
                position: pos(d.w, r),
                first: vec![pos(d.wt, 0.0), pos(d.wp, 0.0)],
                second: vec![
                    vec![pos(d.wtt, 0.0), pos(d.wtp, 0.0)],
                    vec![pos(d.wtp, 0.0), pos(d.wpp, 0.0)],
                ],
            }
        });
        ParamChart {
            domain: vec![(0.0, PI), (0.0, 2.0 * PI)],
            periodic: vec![false, true],
            pole_margin: 0.1,
            search_only: rotated,
            jet,
        }
    };
    SubmanifoldModel {
        name: "lightcone-sphere".into(),
        params: BTreeMap::from([("r".into(), r)]),
        ambient_dim: 4,
        intrinsic_dim: 2,
        charts: vec![chart(false), chart(true)],
        euler_characteristic: Some(2),
        morse_number: Some(2),
        closed: true,
        plus_lightlike: Some(outward_radial_section()),
        flat_direction: None,
    }
}

fn torus(big_r: f64, small_r: f64) -> SubmanifoldModel {
    assert!(big_r > small_r && small_r > 0.0, "torus needs R > r > 0");
    let (rr, sr) = (big_r, small_r);
    let jet: JetFn = Arc::new(move |u: &[f64]| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let w = rr + sr * ct;
        Jet2 {
            position: mv(vec![0.0, w * cp, w * sp, sr * st]),
            first: vec![
                mv(vec![0.0, -sr * st * cp, -sr * st * sp, sr * ct]),
                mv(vec![0.0, -w * sp, w * cp, 0.0]),
            ],
            second: vec![
                vec![
                    mv(vec![0.0, -sr * ct * cp, -sr * ct * sp, -sr * st]),
                    mv(vec![0.0, sr * st * sp, -sr * st * cp, 0.0]),
                ],
                vec![
                    mv(vec![0.0, sr * st * sp, -sr * st * cp, 0.0]),
                    mv(vec![0.0, -w * cp, -w * sp, 0.0]),
                ],
            ],
        }
    });
    let section: PlusLightlikeFn = Arc::new(|_chart, u: &[f64], _jet: &Jet2| {
        // outward normal of the tube circle
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        mv(vec![1.0, ct * cp, ct * sp, st])
    });
    SubmanifoldModel {
        name: "torus".into(),
        params: BTreeMap::from([("R".into(), big_r), ("r".into(), small_r)]),
        ambient_dim: 4,
        intrinsic_dim: 2,
        charts: vec![ParamChart {
            domain: vec![(0.0, 2.0 * PI), (0.0, 2.0 * PI)],
            periodic: vec![true, true],
            pole_margin: 0.0,
            search_only: false,
            jet,
        }],
        euler_characteristic: Some(0),
        morse_number: Some(4),
        closed: true,
        plus_lightlike: Some(section),
        flat_direction: None,
    }
}

fn bumpy_sphere(r: f64, eps: f64) -> SubmanifoldModel {
    // radius r (1 + eps cos(3 theta)) written intrinsically through
    // cos(3 theta) = 4 z^3 - 3 z with z the polar height of the unit
    // direction, so both charts trace the same surface
    let chart = |rotated: bool| -> ParamChart {
        let jet: JetFn = Arc::new(move |u: &[f64]| {
            let d = sphere_dirs(u[0], u[1]);
            let dir = |v: [f64; 3]| if rotated { rot3(v) } else { v };
            let (w, wt, wp) = (dir(d.w), dir(d.wt), dir(d.wp));
            let (wtt, wtp, wpp) = (dir(d.wtt), dir(d.wtp), dir(d.wpp));
            let z = w[2];
            let zt = wt[2];
            let zp = wp[2];
            let f = 1.0 + eps * (4.0 * z * z * z - 3.0 * z);
            let fz = eps * (12.0 * z * z - 3.0);
            let fzz = 24.0 * eps * z;
            let emit = |v: [f64; 3]| mv(vec![0.0, r * v[0], r * v[1], r * v[2]]);
            let axpy3 = |a: f64, x: [f64; 3], b: f64, y: [f64; 3]| {
                [a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]
            };
            let position = emit(axpy3(f, w, 0.0, w));
            // X_a = (fz z_a) w + f w_a
            let first = vec![
                emit(axpy3(fz * zt, w, f, wt)),
                emit(axpy3(fz * zp, w, f, wp)),
            ];
            // X_ab = (fzz z_a z_b + fz z_ab) w + fz (z_a w_b + z_b w_a) + f w_ab
            let second_at = |za: f64, zb: f64, zab: f64, wa: [f64; 3], wb: [f64; 3], wab: [f64; 3]| {
                let s = axpy3(fzz * za * zb + fz * zab, w, fz * za, wb);
                let s = axpy3(1.0, s, fz * zb, wa);
                emit(axpy3(1.0, s, f, wab))
            };
            let second = vec![
                vec![
                    second_at(zt, zt, wtt[2], wt, wt, wtt),
                    second_at(zt, zp, wtp[2], wt, wp, wtp),
                ],
                vec![
                    second_at(zp, zt, wtp[2], wp, wt, wtp),
                    second_at(zp, zp, wpp[2], wp, wp, wpp),
                ],
            ];
            Jet2 { position, first, second }
        });
        ParamChart {
            domain: vec![(0.0, PI), (0.0, 2.0 * PI)],
            periodic: vec![false, true],
            pole_margin: 0.1,
            search_only: rotated,
            jet,
        }
    };
    let section: PlusLightlikeFn = Arc::new(|_chart, _u, jet: &Jet2| {
        // e_0 + outward Euclidean unit normal from the tangent cross product
        let a = &jet.first[0].spatial()[..3];
        let b = &jet.first[1].spatial()[..3];
        let mut n = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let pos = jet.position.spatial();
        let outward = n[0] * pos[0] + n[1] * pos[1] + n[2] * pos[2];
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() * outward.signum();
        for c in &mut n {
            *c /= norm;
        }
        mv(vec![1.0, n[0], n[1], n[2]])
    });
    SubmanifoldModel {
        name: "bumpy-sphere".into(),
        params: BTreeMap::from([("r".into(), r), ("eps".into(), eps)]),
        ambient_dim: 4,
        intrinsic_dim: 2,
        charts: vec![chart(false), chart(true)],
        euler_characteristic: Some(2),
        morse_number: Some(2),
        closed: true,
        plus_lightlike: Some(section),
        flat_direction: None,
    }
}

fn hyperbolic_curve(a: f64, b: f64) -> SubmanifoldModel {
    let jet: JetFn = Arc::new(move |u: &[f64]| {
        let t = u[0];
        let (s, c) = t.sin_cos();
        let x = a * c;
        let y = b * s;
        let xp = -a * s;
        let yp = b * c;
        let xpp = -a * c;
        let ypp = -b * s;
        let w = (1.0 + x * x + y * y).sqrt();
        let wp = (x * xp + y * yp) / w;
        let wpp = (xp * xp + x * xpp + yp * yp + y * ypp) / w - wp * wp / w;
        Jet2 {
            position: mv(vec![w, x, y]),
            first: vec![mv(vec![wp, xp, yp])],
            second: vec![vec![mv(vec![wpp, xpp, ypp])]],
        }
    });
    let section: PlusLightlikeFn = Arc::new(|_chart, _u, jet: &Jet2| {
        // n^T = position (the curve lies in H^2(-1)); n^S from the wedge of
        // position and tangent, sign fixed so the frame is continuous in t.
        let w = crate::minkowski::wedge(&[jet.position.clone(), jet.first[0].clone()])
            .expect("wedge of curve frame");
        let norm = crate::minkowski::mink_norm(&w);
        jet.position.axpy(1.0 / norm, &w)
    });
    SubmanifoldModel {
        name: "hyperbolic-curve".into(),
        params: BTreeMap::from([("a".into(), a), ("b".into(), b)]),
        ambient_dim: 3,
        intrinsic_dim: 1,
        charts: vec![ParamChart {
            domain: vec![(0.0, 2.0 * PI)],
            periodic: vec![true],
            pole_margin: 0.0,
            search_only: false,
            jet,
        }],
        euler_characteristic: Some(0),
        morse_number: Some(2),
        closed: true,
        plus_lightlike: Some(section),
        flat_direction: None,
    }
}

fn codim3_sphere(r: f64) -> SubmanifoldModel {
    SubmanifoldModel {
        name: "codim3-sphere".into(),
        params: BTreeMap::from([("r".into(), r)]),
        ambient_dim: 5,
        intrinsic_dim: 2,
        charts: vec![sphere_chart(r, false, true), sphere_chart(r, true, true)],
        euler_characteristic: Some(2),
        morse_number: Some(2),
        closed: true,
        plus_lightlike: None,
        flat_direction: None,
    }
}

fn lightlike_planar_patch() -> SubmanifoldModel {
    let jet: JetFn = Arc::new(|u: &[f64]| {
        let (a, b) = (u[0], u[1]);
        let q = a * a + b * b;
        Jet2 {
            position: mv(vec![q, q, a, b]),
            first: vec![
                mv(vec![2.0 * a, 2.0 * a, 1.0, 0.0]),
                mv(vec![2.0 * b, 2.0 * b, 0.0, 1.0]),
            ],
            second: vec![
                vec![mv(vec![2.0, 2.0, 0.0, 0.0]), MinkVector::zeros(4)],
                vec![MinkVector::zeros(4), mv(vec![2.0, 2.0, 0.0, 0.0])],
            ],
        }
    });
    SubmanifoldModel {
        name: "lightlike-planar-patch".into(),
        params: BTreeMap::new(),
        ambient_dim: 4,
        intrinsic_dim: 2,
        charts: vec![ParamChart {
            domain: vec![(-1.0, 1.0), (-1.0, 1.0)],
            periodic: vec![false, false],
            pole_margin: 0.0,
            search_only: false,
            jet,
        }],
        euler_characteristic: None,
        morse_number: None,
        closed: false,
        plus_lightlike: None,
        flat_direction: Some(mv(vec![1.0, 1.0, 0.0, 0.0])),
    }
}

/// The built-in model catalog with default parameters.
pub fn builtin_catalog() -> Vec<SubmanifoldModel> {
    vec![
        euclid_sphere(1.0),
        torus(2.0, 1.0),
        lightcone_sphere(1.0),
        bumpy_sphere(1.0, 0.3),
        hyperbolic_curve(0.9, 0.5),
        codim3_sphere(1.0),
        lightlike_planar_patch(),
    ]
}

fn get_param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

/// Instantiates a catalog model by name, applying parameter overrides.
pub fn model_by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<SubmanifoldModel> {
    match name {
        "euclid-sphere" => Ok(euclid_sphere(get_param(params, "r", 1.0))),
        "torus" => {
            let big = get_param(params, "R", 2.0);
            let small = get_param(params, "r", 1.0);
            if !(big > small && small > 0.0) {
                return Err(Error::Degenerate(format!(
                    "torus needs R > r > 0, got R={big}, r={small}"
                )));
            }
            Ok(torus(big, small))
        }
        "lightcone-sphere" => Ok(lightcone_sphere(get_param(params, "r", 1.0))),
        "bumpy-sphere" => Ok(bumpy_sphere(
            get_param(params, "r", 1.0),
            get_param(params, "eps", 0.3),
        )),
        "hyperbolic-curve" => Ok(hyperbolic_curve(
            get_param(params, "a", 0.9),
            get_param(params, "b", 0.5),
        )),
        "codim3-sphere" => Ok(codim3_sphere(get_param(params, "r", 1.0))),
        "lightlike-planar-patch" => Ok(lightlike_planar_patch()),
        other => Err(Error::UnknownModel(other.into())),
    }
}

/// Uniform random point in a chart's (margin-shrunk) sampling box.
pub fn sample_chart_point<R: rand::Rng>(chart: &ParamChart, rng: &mut R) -> Vec<f64> {
    chart
        .sampling_box()
        .iter()
        .map(|&(a, b)| rng.gen_range(a..b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn catalog_metadata() {
        let cat = builtin_catalog();
        assert!(cat.len() >= 7);
        let torus = cat.iter().find(|m| m.name == "torus").unwrap();
        assert_eq!(torus.euler_characteristic, Some(0));
        assert_eq!(torus.codim(), 2);
        let patch = cat.iter().find(|m| m.name == "lightlike-planar-patch").unwrap();
        assert!(!patch.closed);
        let c3 = cat.iter().find(|m| m.name == "codim3-sphere").unwrap();
        assert_eq!(c3.codim(), 3);
        assert_eq!(c3.codim() - 2, 1); // fiber sphere S^1
    }

    #[test]
    fn torus_params_override() {
        let m = model_by_name("torus", &BTreeMap::from([("R".into(), 2f64.sqrt())])).unwrap();
        assert_eq!(m.euler_characteristic, Some(0));
        assert_relative_eq!(m.params["R"], 2f64.sqrt());
        assert!(model_by_name("torus", &BTreeMap::from([("R".into(), 0.5)])).is_err());
        assert!(model_by_name("no-such-model", &BTreeMap::new()).is_err());
    }

    #[test]
    fn sphere_jet_closed_form() {
        let m = euclid_sphere(1.0);
        let j = evaluate_jet(&m, 0, &[PI / 2.0, 0.0]).unwrap();
        assert_relative_eq!(j.position.components()[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(j.first[0].components()[3], -1.0, epsilon = 1e-15);
        assert_relative_eq!(j.first[1].components()[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn torus_jet_closed_form() {
        let m = torus(2.0, 1.0);
        let j = evaluate_jet(&m, 0, &[0.0, 0.0]).unwrap();
        assert_eq!(j.position.components(), &[0.0, 3.0, 0.0, 0.0]);
        assert_eq!(j.first[0].components(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(j.first[1].components(), &[0.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn lightcone_sphere_position_is_lightlike() {
        let m = lightcone_sphere(1.0);
        let j = evaluate_jet(&m, 0, &[PI / 2.0, 0.0]).unwrap();
        for (a, b) in j.position.components().iter().zip(&[1.0, 1.0, 0.0, 0.0]) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
        assert_eq!(
            causal_class(&j.position, DEFAULT_CAUSAL_TOL),
            CausalClass::Lightlike
        );
    }

    #[test]
    fn planar_patch_lies_in_lightlike_hyperplane() {
        let m = lightlike_planar_patch();
        let v = m.flat_direction.clone().unwrap();
        let hp = crate::minkowski::Hyperplane::new(v, 0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = sample_chart_point(&m.charts[0], &mut rng);
            let j = evaluate_jet(&m, 0, &u).unwrap();
            assert!(crate::minkowski::hyperplane_side(&hp, &j.position).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_matches_analytic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for model in builtin_catalog() {
            for (ci, chart) in model.search_charts() {
                for _ in 0..25 {
                    let u = sample_chart_point(chart, &mut rng);
                    let analytic = evaluate_jet(&model, ci, &u).unwrap();
                    let fd = match finite_difference_jet(&model, ci, &u, 1e-4) {
                        Ok(j) => j,
                        Err(Error::OutsideDomain(_)) => continue,
                        Err(e) => panic!("{e}"),
                    };
                    let s = analytic.intrinsic_dim();
                    for i in 0..s {
                        for (a, b) in analytic.first[i]
                            .components()
                            .iter()
                            .zip(fd.first[i].components())
                        {
                            assert!((a - b).abs() < 1e-6, "{}: first partial", model.name);
                        }
                        for j in 0..s {
                            for (a, b) in analytic.second[i][j]
                                .components()
                                .iter()
                                .zip(fd.second[i][j].components())
                            {
                                assert!((a - b).abs() < 1e-6, "{}: second partial", model.name);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn flat_patch_second_partials() {
        // affine spacelike patch: second partials exactly zero
        let jet: JetFn = Arc::new(|u: &[f64]| Jet2 {
            position: mv(vec![0.0, u[0], u[1], 0.0]),
            first: vec![MinkVector::basis(4, 1), MinkVector::basis(4, 2)],
            second: vec![
                vec![MinkVector::zeros(4), MinkVector::zeros(4)],
                vec![MinkVector::zeros(4), MinkVector::zeros(4)],
            ],
        });
        let m = SubmanifoldModel {
            name: "flat-patch".into(),
            params: BTreeMap::new(),
            ambient_dim: 4,
            intrinsic_dim: 2,
            charts: vec![ParamChart {
                domain: vec![(-1.0, 1.0), (-1.0, 1.0)],
                periodic: vec![false, false],
                pole_margin: 0.0,
                search_only: false,
                jet,
            }],
            euler_characteristic: None,
            morse_number: None,
            closed: false,
            plus_lightlike: None,
            flat_direction: None,
        };
        let fd = finite_difference_jet(&m, 0, &[0.2, -0.3], 1e-4).unwrap();
        for row in &fd.second {
            for v in row {
                assert!(v.components().iter().all(|c| c.abs() < 1e-9));
            }
        }
    }
}
