//! Linear algebra of Lorentz-Minkowski (n+1)-space.
//!
//! Vectors carry the index-1 pseudo scalar product
//! `<x,y> = -x_0 y_0 + sum_{i>=1} x_i y_i` (index 0 is the time component).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance used by causal classification when none is supplied.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-10;

/// A vector in Lorentz-Minkowski (n+1)-space. Component 0 is time.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkVector {
    components: Vec<f64>,
}

/// Causal character of a vector under the pseudo scalar product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
    Zero,
}

/// The hyperplane `HP(v, c) = { x : <x, v> = c }`.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub pseudo_normal: MinkVector,
    pub offset: f64,
}

impl MinkVector {
    /// Builds a vector from its components. Ambient dimension must be >= 3
    /// (n >= 2) and every component finite.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 3 {
            return Err(Error::Dimension(format!(
                "ambient dimension must be at least 3, got {}",
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { components })
    }

    /// Infallible constructor for internal call sites that already guarantee
    /// the invariants.
    pub(crate) fn from_vec(components: Vec<f64>) -> Self {
        debug_assert!(components.len() >= 3);
        debug_assert!(components.iter().all(|c| c.is_finite()));
        Self { components }
    }

    /// The canonical basis vector `e_i` in ambient dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self { components: c }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { components: vec![0.0; dim] }
    }

    /// Ambient dimension n+1.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Time component x_0.
    pub fn time(&self) -> f64 {
        self.components[0]
    }

    /// Spatial part (x_1, ..., x_n).
    pub fn spatial(&self) -> &[f64] {
        &self.components[1..]
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_vec(self.components.iter().map(|c| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::from_vec(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::from_vec(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::from_vec(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(x, y)| x + a * y)
                .collect(),
        )
    }

    /// Squared Euclidean norm of all components (tolerance scaling only).
    pub fn euclid_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum()
    }
}

/// The pseudo scalar product `-x_0 y_0 + sum_{i>=1} x_i y_i`.
pub fn pseudo_dot(x: &MinkVector, y: &MinkVector) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(pseudo_dot_unchecked(x, y))
}

pub(crate) fn pseudo_dot_unchecked(x: &MinkVector, y: &MinkVector) -> f64 {
    let xs = x.components();
    let ys = y.components();
    let mut acc = -xs[0] * ys[0];
    for i in 1..xs.len() {
        acc += xs[i] * ys[i];
    }
    acc
}

/// `||x|| = sqrt(|<x,x>|)`.
pub fn mink_norm(x: &MinkVector) -> f64 {
    pseudo_dot_unchecked(x, x).abs().sqrt()
}

/// Classifies `x` by the sign of `<x,x>`, treating `|<x,x>|` below
/// `tol * max(1, |x|^2_euclid)` as lightlike (or zero for the zero vector).
pub fn causal_class(x: &MinkVector, tol: f64) -> CausalClass {
    assert!(tol > 0.0, "causal tolerance must be positive");
    let scale = x.euclid_norm_sq().max(1.0);
    if x.euclid_norm_sq() <= tol * tol {
        return CausalClass::Zero;
    }
    let q = pseudo_dot_unchecked(x, x);
    if q.abs() <= tol * scale {
        CausalClass::Lightlike
    } else if q > 0.0 {
        CausalClass::Spacelike
    } else {
        CausalClass::Timelike
    }
}

/// Wedge product of n vectors in (n+1)-space, defined by the formal
/// determinant with first row (-e_0, e_1, ..., e_n). Satisfies
/// `<x, wedge(x_1..x_n)> = det(x, x_1, ..., x_n)` for every x.
pub fn wedge(vectors: &[MinkVector]) -> Result<MinkVector> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::Dimension("wedge needs at least 2 vectors".into()));
    }
    let dim = n + 1;
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::Dimension(format!(
                "wedge of {} vectors needs dimension {}, got {}",
                n,
                dim,
                v.dim()
            )));
        }
    }
    let mut out = vec![0.0; dim];
    // Cofactor expansion along the symbolic first row. The j-th minor drops
    // column j of the n x (n+1) stack of inputs.
    let mut minor = DMatrix::<f64>::zeros(n, n);
    for j in 0..dim {
        for (row, v) in vectors.iter().enumerate() {
            let mut col = 0;
            for c in 0..dim {
                if c == j {
                    continue;
                }
                minor[(row, col)] = v.components()[c];
                col += 1;
            }
        }
        let cof = if j % 2 == 0 { 1.0 } else { -1.0 } * minor.determinant();
        // First-row entry is -e_0 for j = 0 and +e_j otherwise.
        out[j] = if j == 0 { -cof } else { cof };
    }
    Ok(MinkVector::from_vec(out))
}

/// Normalizes a lightlike vector onto the lightcone unit sphere S^{n-1}_+
/// (time component 1, spatial part of Euclidean norm 1).
pub fn lightcone_normalize(x: &MinkVector) -> Result<MinkVector> {
    let scale = x.euclid_norm_sq().max(1.0);
    if causal_class(x, DEFAULT_CAUSAL_TOL) != CausalClass::Lightlike {
        return Err(Error::NotLightlike(pseudo_dot_unchecked(x, x)));
    }
    let t = x.time();
    if t.abs() <= DEFAULT_CAUSAL_TOL * scale.sqrt() {
        return Err(Error::Degenerate(
            "lightcone normalization: time component is zero".into(),
        ));
    }
    let mut c: Vec<f64> = x.components().iter().map(|v| v / t).collect();
    c[0] = 1.0;
    Ok(MinkVector::from_vec(c))
}

/// Signed membership residual `<x, v> - c`; zero iff x lies on HP(v, c).
pub fn hyperplane_side(hp: &Hyperplane, x: &MinkVector) -> Result<f64> {
    Ok(pseudo_dot(&hp.pseudo_normal, x)? - hp.offset)
}

impl Hyperplane {
    pub fn new(pseudo_normal: MinkVector, offset: f64) -> Result<Self> {
        if pseudo_normal.euclid_norm_sq() == 0.0 {
            return Err(Error::Degenerate("hyperplane pseudo-normal is zero".into()));
        }
        Ok(Self { pseudo_normal, offset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(c: &[f64]) -> MinkVector {
        MinkVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn pseudo_dot_signature() {
        let e0 = v(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(pseudo_dot(&e0, &e0).unwrap(), -1.0);
        for i in 1..4 {
            let ei = MinkVector::basis(4, i);
            assert_eq!(pseudo_dot(&ei, &ei).unwrap(), 1.0);
            assert_eq!(pseudo_dot(&e0, &ei).unwrap(), 0.0);
        }
        let l = v(&[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(pseudo_dot(&l, &l).unwrap(), 0.0);
        let a = v(&[1.0, 2.0, 3.0, 0.0]);
        let b = v(&[2.0, 1.0, 0.0, 1.0]);
        assert_eq!(pseudo_dot(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn pseudo_dot_dimension_mismatch() {
        let a = v(&[1.0, 0.0, 0.0]);
        let b = v(&[1.0, 0.0, 0.0, 0.0]);
        assert!(pseudo_dot(&a, &b).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(mink_norm(&v(&[1.0, 0.0, 0.0, 0.0])), 1.0);
        assert_eq!(mink_norm(&v(&[0.0, 3.0, 4.0, 0.0])), 5.0);
        assert_eq!(mink_norm(&v(&[2.0, 2.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn causal_classification() {
        let tol = DEFAULT_CAUSAL_TOL;
        assert_eq!(causal_class(&v(&[1.0, 0.0, 0.0, 0.0]), tol), CausalClass::Timelike);
        assert_eq!(causal_class(&v(&[0.0, 1.0, 0.0, 0.0]), tol), CausalClass::Spacelike);
        assert_eq!(causal_class(&v(&[1.0, 1.0, 0.0, 0.0]), tol), CausalClass::Lightlike);
        assert_eq!(causal_class(&v(&[0.0, 0.0, 0.0, 0.0]), tol), CausalClass::Zero);
        // scale invariance
        for lam in [-3.0, 0.5, 1e6] {
            assert_eq!(
                causal_class(&v(&[1.0, 1.0, 0.0, 0.0]).scale(lam), tol),
                CausalClass::Lightlike
            );
            assert_eq!(
                causal_class(&v(&[2.0, 1.0, 0.5, 0.0]).scale(lam), tol),
                CausalClass::Timelike
            );
        }
    }

    #[test]
    fn wedge_basis_cases() {
        // n = 3: wedge(e_1, e_2, e_3) = -e_0
        let w = wedge(&[MinkVector::basis(4, 1), MinkVector::basis(4, 2), MinkVector::basis(4, 3)])
            .unwrap();
        assert_eq!(w.components(), &[-1.0, 0.0, 0.0, 0.0]);
        // wedge(e_0, e_2, e_3) = -e_1, pinned by det(e_1, e_0, e_2, e_3) = -1
        let w = wedge(&[MinkVector::basis(4, 0), MinkVector::basis(4, 2), MinkVector::basis(4, 3)])
            .unwrap();
        assert_eq!(w.components(), &[0.0, -1.0, 0.0, 0.0]);
    }

    /// Independent oracle: the full determinant det(x, x_1, ..., x_n) by
    /// recursive cofactor expansion, no shared code with `wedge`.
    fn det_recursive(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut acc = 0.0;
        for j in 0..n {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m[0][j] * det_recursive(&minor);
        }
        acc
    }

    #[test]
    fn wedge_det_identity_random_integers() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 3, 4] {
            let dim = n + 1;
            for _ in 0..40 {
                let xs: Vec<MinkVector> = (0..n)
                    .map(|_| {
                        MinkVector::from_vec(
                            (0..dim).map(|_| rng.gen_range(-5..=5) as f64).collect(),
                        )
                    })
                    .collect();
                let w = wedge(&xs).unwrap();
                // orthogonality to every factor
                for x in &xs {
                    assert!(pseudo_dot(x, &w).unwrap().abs() < 1e-9);
                }
                // det identity against the independent determinant
                let probe =
                    MinkVector::from_vec((0..dim).map(|_| rng.gen_range(-5..=5) as f64).collect());
                let mut rows = vec![probe.components().to_vec()];
                rows.extend(xs.iter().map(|x| x.components().to_vec()));
                let det = det_recursive(&rows);
                assert_relative_eq!(
                    pseudo_dot(&probe, &w).unwrap(),
                    det,
                    epsilon = 1e-9,
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn lightcone_normalize_cases() {
        let w = lightcone_normalize(&v(&[2.0, 2.0, 0.0, 0.0])).unwrap();
        assert_eq!(w.components(), &[1.0, 1.0, 0.0, 0.0]);
        let w = lightcone_normalize(&v(&[-3.0, 0.0, 3.0, 0.0])).unwrap();
        assert_eq!(w.components(), &[1.0, 0.0, -1.0, 0.0]);
        // idempotent on its image
        let w2 = lightcone_normalize(&w).unwrap();
        assert_eq!(w, w2);
        assert!(lightcone_normalize(&v(&[1.0, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn hyperplane_sides() {
        let hp = Hyperplane::new(MinkVector::basis(4, 0), 0.0).unwrap();
        assert_eq!(hyperplane_side(&hp, &v(&[0.0, 1.0, 2.0, 3.0])).unwrap(), 0.0);
        let hp = Hyperplane::new(v(&[1.0, 1.0, 0.0, 0.0]), 1.0).unwrap();
        assert_eq!(hyperplane_side(&hp, &MinkVector::zeros(4)).unwrap(), -1.0);
        let hp = Hyperplane::new(v(&[1.0, 1.0, 0.0, 0.0]), 0.0).unwrap();
        assert_eq!(hyperplane_side(&hp, &v(&[1.0, 0.0, 0.0, 0.0])).unwrap(), -1.0);
    }

    #[test]
    fn bilinearity_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let dim = 4;
            let rand_vec = |rng: &mut rand_chacha::ChaCha8Rng| {
                MinkVector::from_vec((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            };
            let x = rand_vec(&mut rng);
            let y = rand_vec(&mut rng);
            let z = rand_vec(&mut rng);
            let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let lhs = pseudo_dot(&x.scale(a).axpy(b, &y), &z).unwrap();
            let rhs = a * pseudo_dot(&x, &z).unwrap() + b * pseudo_dot(&y, &z).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(
                pseudo_dot(&x, &y).unwrap(),
                pseudo_dot(&y, &x).unwrap(),
                epsilon = 1e-12
            );
        }
    }
}
