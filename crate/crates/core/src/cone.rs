//! Finite-dimensional ordered vector spaces ("operational spaces") with a
//! positive cone and an order unit.
//!
//! Four families are supported: the nonnegative orthant (`Classical`), the
//! cone of positive semidefinite complex Hermitian matrices
//! (`QuantumComplex`), positive semidefinite real symmetric matrices
//! (`QuantumReal`) and the Lorentz cone of a spin factor (`SpinFactor`).
//!
//! Matrix families are stored as real coordinate vectors in a fixed basis that
//! is orthonormal for the trace form: diagonal units `E_kk` first, then for
//! every `j < k` (row-major) the symmetric unit `(E_jk + E_kj)/√2` and, for the
//! complex family only, the antisymmetric unit `i(E_jk − E_kj)/√2`. With this
//! choice `Tr(XY)` is the Euclidean dot product of coordinates.

use std::fmt;
use std::f64::consts::SQRT_2;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64};

/// Default tolerance for cone membership and eigenvalue tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Regularizer added when sampling interior points of matrix cones.
pub const INTERIOR_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Classical,
    QuantumComplex,
    QuantumReal,
    SpinFactor,
}

impl Family {
    pub fn keyword(self) -> &'static str {
        match self {
            Family::Classical => "classical",
            Family::QuantumComplex => "quantum-complex",
            Family::QuantumReal => "quantum-real",
            Family::SpinFactor => "spin-factor",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Family> {
        match s {
            "classical" => Some(Family::Classical),
            "quantum-complex" => Some(Family::QuantumComplex),
            "quantum-real" => Some(Family::QuantumReal),
            "spin-factor" => Some(Family::SpinFactor),
            _ => None,
        }
    }

    pub fn all() -> [Family; 4] {
        [
            Family::Classical,
            Family::QuantumComplex,
            Family::QuantumReal,
            Family::SpinFactor,
        ]
    }

    /// Families whose elements are represented by matrices.
    pub fn is_matrix(self) -> bool {
        !matches!(self, Family::SpinFactor)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeKind {
    Classical(usize),
    QuantumComplex(usize),
    QuantumReal(usize),
    SpinFactor(usize),
}

impl ConeKind {
    pub fn new(family: Family, n: usize) -> ConeKind {
        match family {
            Family::Classical => ConeKind::Classical(n),
            Family::QuantumComplex => ConeKind::QuantumComplex(n),
            Family::QuantumReal => ConeKind::QuantumReal(n),
            Family::SpinFactor => ConeKind::SpinFactor(n),
        }
    }

    pub fn family(self) -> Family {
        match self {
            ConeKind::Classical(_) => Family::Classical,
            ConeKind::QuantumComplex(_) => Family::QuantumComplex,
            ConeKind::QuantumReal(_) => Family::QuantumReal,
            ConeKind::SpinFactor(_) => Family::SpinFactor,
        }
    }

    pub fn n(self) -> usize {
        match self {
            ConeKind::Classical(n)
            | ConeKind::QuantumComplex(n)
            | ConeKind::QuantumReal(n)
            | ConeKind::SpinFactor(n) => n,
        }
    }
}

/// An operational space, possibly a composite of several factors of one family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeSpace {
    family: Family,
    factors: Vec<usize>,
}

impl ConeSpace {
    pub fn new(kind: ConeKind) -> Result<ConeSpace> {
        if kind.n() == 0 {
            return Err(Error::InvalidArgument(format!("{kind:?}: n must be at least 1")));
        }
        Ok(ConeSpace {
            family: kind.family(),
            factors: vec![kind.n()],
        })
    }

    /// Composite of matrix-family spaces with the given subsystem sizes.
    pub fn composite_of(family: Family, factors: &[usize]) -> Result<ConeSpace> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::InvalidArgument("factor sizes must be positive".into()));
        }
        if family == Family::SpinFactor && factors.len() > 1 {
            return Err(Error::CompositeUndefined(
                "spin factors have no composition rule".into(),
            ));
        }
        Ok(ConeSpace {
            family,
            factors: factors.to_vec(),
        })
    }

    pub fn classical(n: usize) -> ConeSpace {
        Self::new(ConeKind::Classical(n)).expect("n >= 1")
    }

    pub fn quantum(n: usize) -> ConeSpace {
        Self::new(ConeKind::QuantumComplex(n)).expect("n >= 1")
    }

    pub fn rebit(n: usize) -> ConeSpace {
        Self::new(ConeKind::QuantumReal(n)).expect("n >= 1")
    }

    pub fn spin(n: usize) -> ConeSpace {
        Self::new(ConeKind::SpinFactor(n)).expect("n >= 1")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn is_composite(&self) -> bool {
        self.factors.len() > 1
    }

    /// The kind of a non-composite space.
    pub fn kind(&self) -> Option<ConeKind> {
        (!self.is_composite()).then(|| ConeKind::new(self.family, self.factors[0]))
    }

    /// Size of the represented matrices (product of factor sizes). For spin
    /// factors this is `n + 1`, the length of the coordinate vector.
    pub fn matrix_size(&self) -> usize {
        match self.family {
            Family::SpinFactor => self.factors[0] + 1,
            _ => self.factors.iter().product(),
        }
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        let n = self.matrix_size();
        match self.family {
            Family::Classical | Family::SpinFactor => n,
            Family::QuantumComplex => n * n,
            Family::QuantumReal => n * (n + 1) / 2,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 1
    }

    /// The composite `self ⊗ other`. Defined only within one family and never
    /// for spin factors.
    pub fn composite(&self, other: &ConeSpace) -> Result<ConeSpace> {
        if self.family != other.family {
            return Err(Error::CompositeUndefined(format!(
                "cross-family composite {} x {}",
                self.family, other.family
            )));
        }
        if self.family == Family::SpinFactor {
            return Err(Error::CompositeUndefined(
                "spin factors have no composition rule".into(),
            ));
        }
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Ok(ConeSpace {
            family: self.family,
            factors,
        })
    }

    pub fn order_unit(&self) -> Element {
        let d = self.dim();
        let mut coords = vec![0.0; d];
        match self.family {
            Family::Classical => coords.iter_mut().for_each(|x| *x = 1.0),
            Family::QuantumComplex | Family::QuantumReal => {
                coords[..self.matrix_size()].iter_mut().for_each(|x| *x = 1.0)
            }
            Family::SpinFactor => coords[0] = 1.0,
        }
        Element::from_parts(self.clone(), coords)
    }

    /// Radius of the largest Euclidean coordinate ball around the order unit
    /// that stays inside the cone.
    pub fn unit_margin(&self) -> f64 {
        match self.family {
            Family::SpinFactor => 1.0 / SQRT_2,
            _ => 1.0,
        }
    }

    /// A scalar `a > 0` with `a·u − v` in the cone.
    pub fn order_unit_bound(&self, v: &Element) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            1.0
        } else {
            norm / self.unit_margin()
        }
    }

    pub fn basis(&self) -> Vec<Element> {
        (0..self.dim())
            .map(|i| {
                let mut coords = vec![0.0; self.dim()];
                coords[i] = 1.0;
                Element::from_parts(self.clone(), coords)
            })
            .collect()
    }

    pub fn zero(&self) -> Element {
        Element::from_parts(self.clone(), vec![0.0; self.dim()])
    }

    pub fn element(&self, coords: Vec<f64>) -> Result<Element> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        Ok(Element::from_parts(self.clone(), coords))
    }

    /// Converts a matrix to coordinates. Classical spaces read the diagonal;
    /// the real family reads the real part. No Hermiticity check is made.
    pub fn element_from_matrix(&self, m: &CMatrix) -> Result<Element> {
        let n = self.matrix_size();
        if !self.family.is_matrix() {
            return Err(Error::InvalidArgument(
                "spin-factor elements have no matrix form".into(),
            ));
        }
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
        let mut coords = Vec::with_capacity(self.dim());
        for k in 0..n {
            coords.push(m[(k, k)].re);
        }
        if self.family != Family::Classical {
            for j in 0..n {
                for k in (j + 1)..n {
                    let z = (m[(j, k)] + m[(k, j)].conj()) * 0.5;
                    coords.push(SQRT_2 * z.re);
                    if self.family == Family::QuantumComplex {
                        coords.push(SQRT_2 * z.im);
                    }
                }
            }
        }
        Ok(Element::from_parts(self.clone(), coords))
    }

    fn matrix_of(&self, coords: &[f64]) -> CMatrix {
        let n = self.matrix_size();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = c(coords[k], 0.0);
        }
        if self.family == Family::Classical {
            return m;
        }
        let mut idx = n;
        for j in 0..n {
            for k in (j + 1)..n {
                let re = coords[idx] / SQRT_2;
                idx += 1;
                let im = if self.family == Family::QuantumComplex {
                    let v = coords[idx] / SQRT_2;
                    idx += 1;
                    v
                } else {
                    0.0
                };
                m[(j, k)] = c(re, im);
                m[(k, j)] = c(re, -im);
            }
        }
        m
    }

    /// Signed distance-like margin: minimum coordinate, minimum eigenvalue
    /// or `t − ‖x‖` depending on the family.
    pub fn cone_margin(&self, coords: &[f64]) -> f64 {
        match self.family {
            Family::Classical => coords.iter().copied().fold(f64::INFINITY, f64::min),
            Family::QuantumComplex | Family::QuantumReal => {
                linalg::min_eigenvalue(&self.matrix_of(coords))
            }
            Family::SpinFactor => {
                let spatial: f64 = coords[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                coords[0] - spatial
            }
        }
    }

    /// A cone element `probe` with `⟨x, probe⟩ < 0`, or `None` when `x` is
    /// in the cone up to `tol`.
    pub fn dual_witness(&self, x: &Element, tol: f64) -> Option<Element> {
        let coords = &x.coords;
        match self.family {
            Family::Classical => {
                let (i, &v) = coords
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))?;
                (v < -tol).then(|| self.basis().swap_remove(i))
            }
            Family::QuantumComplex | Family::QuantumReal => {
                let (vals, vecs) = linalg::eigh(&self.matrix_of(coords));
                if vals[0] >= -tol {
                    return None;
                }
                let psi: DVector<C64> = vecs.column(0).into_owned();
                let mut p = linalg::projector(&psi);
                if self.family == Family::QuantumReal {
                    // Real symmetric input has a real eigenvector up to phase.
                    let phase = psi
                        .iter()
                        .copied()
                        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                        .map(|z| z / z.norm())
                        .unwrap_or(c(1.0, 0.0));
                    let real: DVector<C64> = psi.map(|z| c((z / phase).re, 0.0));
                    p = linalg::projector(&(real.clone() / c(real.norm(), 0.0)));
                }
                Some(self.element_from_matrix(&p).expect("same size"))
            }
            Family::SpinFactor => {
                if self.cone_margin(coords) >= -tol {
                    return None;
                }
                let spatial: f64 = coords[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                let mut probe = vec![0.0; self.dim()];
                probe[0] = 1.0;
                if spatial > 0.0 {
                    for (p, v) in probe[1..].iter_mut().zip(&coords[1..]) {
                        *p = -v / spatial;
                    }
                }
                Some(Element::from_parts(self.clone(), probe))
            }
        }
    }

    /// Interior sample: `G·G† + ε·I` for matrix cones, exponential
    /// coordinates for the orthant, `t = ‖x‖ + |g|` for the Lorentz cone.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self.family {
            Family::Classical => {
                let coords = (0..self.dim()).map(|_| Exp1.sample(rng)).collect();
                Element::from_parts(self.clone(), coords)
            }
            Family::QuantumComplex | Family::QuantumReal => {
                let n = self.matrix_size();
                let complex = self.family == Family::QuantumComplex;
                let g = CMatrix::from_fn(n, n, |_, _| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
                    c(re, im)
                });
                let m = &g * g.adjoint() + linalg::identity(n).scale(INTERIOR_EPS);
                self.element_from_matrix(&m).expect("same size")
            }
            Family::SpinFactor => {
                let mut coords: Vec<f64> = (0..self.dim()).map(|_| StandardNormal.sample(rng)).collect();
                let spatial: f64 = coords[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                coords[0] = spatial + coords[0].abs() + f64::MIN_POSITIVE;
                Element::from_parts(self.clone(), coords)
            }
        }
    }

    /// Extremal-ray sample: standard basis vectors, random rank-1
    /// projectors, or `(1, unit vector)`.
    pub fn sample_extremal<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self.family {
            Family::Classical => {
                let i = rng.random_range(0..self.dim());
                self.basis().swap_remove(i)
            }
            Family::QuantumComplex | Family::QuantumReal => {
                let psi = self.sample_pure_vector(rng);
                self.element_from_matrix(&linalg::projector(&psi)).expect("same size")
            }
            Family::SpinFactor => {
                let mut v: Vec<f64> = (0..self.factors[0]).map(|_| StandardNormal.sample(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                let mut coords = vec![1.0];
                coords.extend(v);
                Element::from_parts(self.clone(), coords)
            }
        }
    }

    /// Random unit vector in the underlying Hilbert space of a matrix family.
    pub fn sample_pure_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<C64> {
        let n = self.matrix_size();
        let complex = self.family == Family::QuantumComplex;
        let v = DVector::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
            c(re, im)
        });
        let norm = v.norm();
        v / c(norm, 0.0)
    }

    /// Either a cone interior point or an extremal ray, chosen uniformly.
    pub fn sample_cone<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        if rng.random_bool(0.5) {
            self.sample_interior(rng)
        } else {
            self.sample_extremal(rng)
        }
    }

    /// Gaussian coordinates; generally outside the cone.
    pub fn sample_gaussian<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let coords = (0..self.dim()).map(|_| StandardNormal.sample(rng)).collect();
        Element::from_parts(self.clone(), coords)
    }
}

impl fmt::Display for ConeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        write!(f, "{}({})", self.family, parts.join("x"))
    }
}

/// A vector of an operational space in its fixed basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    space: ConeSpace,
    coords: Vec<f64>,
}

impl Element {
    fn from_parts(space: ConeSpace, coords: Vec<f64>) -> Element {
        debug_assert_eq!(coords.len(), space.dim());
        Element { space, coords }
    }

    pub fn space(&self) -> &ConeSpace {
        &self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Matrix form for matrix families (diagonal for classical).
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if !self.space.family.is_matrix() {
            return Err(Error::InvalidArgument(
                "spin-factor elements have no matrix form".into(),
            ));
        }
        Ok(self.space.matrix_of(&self.coords))
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, a: f64) -> Element {
        Element::from_parts(self.space.clone(), self.coords.iter().map(|x| a * x).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Element, b: f64) -> Result<Element> {
        self.check_same_space(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Element::from_parts(self.space.clone(), coords))
    }

    fn check_same_space(&self, other: &Element) -> Result<()> {
        if self.space.dim() != other.space.dim() || self.space.family != other.space.family {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(())
    }

    pub fn cone_margin(&self) -> f64 {
        self.space.cone_margin(&self.coords)
    }
}

/// Cone membership up to `tol`.
pub fn in_cone(x: &Element, tol: f64) -> bool {
    x.cone_margin() >= -tol
}

/// The self-dualizing inner product `⟨x, probe⟩`.
pub fn in_dual_cone(x: &Element, probe: &Element) -> Result<f64> {
    x.check_same_space(probe)?;
    Ok(x.coords.iter().zip(&probe.coords).map(|(a, b)| a * b).sum())
}

/// The product element `x ⊗ y` in the composite space.
pub fn product_element(x: &Element, y: &Element) -> Result<Element> {
    let space = x.space.composite(&y.space)?;
    let coords = match space.family {
        Family::Classical => x
            .coords
            .iter()
            .flat_map(|a| y.coords.iter().map(move |b| a * b))
            .collect(),
        _ => {
            let m = linalg::kron(&x.to_matrix()?, &y.to_matrix()?);
            return space.element_from_matrix(&m);
        }
    };
    Ok(Element::from_parts(space, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_spaces() -> Vec<ConeSpace> {
        let mut v = Vec::new();
        for f in Family::all() {
            for n in 1..=4 {
                v.push(ConeSpace::new(ConeKind::new(f, n)).unwrap());
            }
        }
        v
    }

    #[test]
    fn canonical_dimensions() {
        let q2 = ConeSpace::quantum(2);
        assert_eq!(q2.dim(), 4);
        assert_eq!(q2.order_unit().to_matrix().unwrap(), linalg::identity(2));
        let c3 = ConeSpace::classical(3);
        assert_eq!(c3.dim(), 3);
        assert_eq!(c3.order_unit().coords(), &[1.0, 1.0, 1.0]);
        assert_eq!(ConeSpace::rebit(2).dim(), 3);
        assert_eq!(ConeSpace::spin(3).dim(), 4);
        assert_eq!(ConeSpace::spin(3).order_unit().coords(), &[1.0, 0.0, 0.0, 0.0]);
        for n in 1..6 {
            assert_eq!(ConeSpace::quantum(n).dim(), n * n);
            assert_eq!(ConeSpace::rebit(n).dim(), n * (n + 1) / 2);
            assert_eq!(ConeSpace::classical(n).dim(), n);
            assert_eq!(ConeSpace::spin(n).dim(), n + 1);
        }
        assert!(ConeSpace::new(ConeKind::Classical(0)).is_err());
    }

    #[test]
    fn composite_dimensions() {
        let c = ConeSpace::classical(2).composite(&ConeSpace::classical(3)).unwrap();
        assert_eq!(c.dim(), 6);
        let q = ConeSpace::quantum(2).composite(&ConeSpace::quantum(3)).unwrap();
        assert_eq!(q.dim(), 36);
        let r = ConeSpace::rebit(2).composite(&ConeSpace::rebit(2)).unwrap();
        assert_eq!(r.dim(), 10);
        let t = ConeSpace::quantum(3).composite(&ConeSpace::quantum(1)).unwrap();
        assert_eq!(t.dim(), 9);
        assert!(matches!(
            ConeSpace::spin(2).composite(&ConeSpace::spin(2)),
            Err(Error::CompositeUndefined(_))
        ));
        assert!(matches!(
            ConeSpace::quantum(2).composite(&ConeSpace::rebit(2)),
            Err(Error::CompositeUndefined(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let q2 = ConeSpace::quantum(2);
        let p0 = q2.element_from_matrix(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(in_cone(&p0, DEFAULT_TOL));
        let x = q2.element_from_matrix(&linalg::pauli_x()).unwrap();
        assert!(!in_cone(&x, DEFAULT_TOL));
        let s = ConeSpace::spin(2).element(vec![1.0, 0.5, 0.5]).unwrap();
        assert!(in_cone(&s, DEFAULT_TOL));
    }

    #[test]
    fn inner_product_examples() {
        let q2 = ConeSpace::quantum(2);
        let a = q2.element_from_matrix(&real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let b = q2.element_from_matrix(&real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(in_dual_cone(&a, &b).unwrap(), -1.0);
        let u = q2.order_unit();
        assert_eq!(in_dual_cone(&u, &u).unwrap(), 2.0);
        let s = ConeSpace::spin(1).element(vec![1.0, 0.0]).unwrap();
        assert_eq!(in_dual_cone(&s, &s).unwrap(), 1.0);
        assert!(in_dual_cone(&u, &ConeSpace::quantum(3).order_unit()).is_err());
    }

    #[test]
    fn matrix_inner_products_match_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for space in [ConeSpace::quantum(3), ConeSpace::rebit(3)] {
            for _ in 0..20 {
                let a = space.sample_gaussian(&mut rng);
                let b = space.sample_gaussian(&mut rng);
                let tr = (a.to_matrix().unwrap() * b.to_matrix().unwrap()).trace();
                assert!((tr.re - in_dual_cone(&a, &b).unwrap()).abs() < 1e-12);
                let back = space.element_from_matrix(&a.to_matrix().unwrap()).unwrap();
                for (x, y) in back.coords().iter().zip(a.coords()) {
                    assert!((x - y).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let q2 = ConeSpace::quantum(2);
        let p0 = q2.element_from_matrix(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let prod = product_element(&p0, &p0).unwrap();
        let expected = real_matrix(
            4,
            4,
            &[1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
        );
        assert!((prod.to_matrix().unwrap() - expected).norm() < 1e-15);

        let trivial = ConeSpace::quantum(1).order_unit();
        let y = q2.sample_gaussian(&mut ChaCha8Rng::seed_from_u64(1));
        let ty = product_element(&trivial, &y).unwrap();
        assert_eq!(ty.space().dim(), y.space().dim());
        for (a, b) in ty.coords().iter().zip(y.coords()) {
            assert!((a - b).abs() < 1e-14);
        }

        assert!(product_element(&ConeSpace::spin(1).order_unit(), &ConeSpace::spin(1).order_unit()).is_err());
    }

    #[test]
    fn products_preserve_linear_independence() {
        // Ranks are checked by an SVD on the coordinate matrix.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for family in [Family::Classical, Family::QuantumComplex, Family::QuantumReal] {
            let a = ConeSpace::new(ConeKind::new(family, 2)).unwrap();
            let b = ConeSpace::new(ConeKind::new(family, 2)).unwrap();
            let xs = [a.sample_gaussian(&mut rng), a.sample_gaussian(&mut rng)];
            let ys = [b.sample_gaussian(&mut rng), b.sample_gaussian(&mut rng)];
            let mut rows = Vec::new();
            for x in &xs {
                for y in &ys {
                    rows.push(product_element(x, y).unwrap().into_coords());
                }
            }
            let d = rows[0].len();
            let m = nalgebra::DMatrix::from_fn(4, d, |i, j| rows[i][j]);
            assert_eq!(m.rank(1e-10), 4, "{family}");
        }
    }

    #[test]
    fn pointedness_and_order_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for space in all_spaces() {
            for _ in 0..50 {
                let v = space.sample_gaussian(&mut rng);
                if in_cone(&v, 1e-12) {
                    assert!(!in_cone(&v.scale(-1.0), 1e-12) || v.norm() < 1e-12);
                }
                let a = space.order_unit_bound(&v);
                let w = space.order_unit().combine(a * (1.0 + 1e-12), &v, -1.0).unwrap();
                assert!(in_cone(&w, 1e-9), "{space}: margin {}", w.cone_margin());
            }
            assert!(in_cone(&space.order_unit(), 0.0));
            assert!(space.order_unit().cone_margin() > 0.0 || space.family() == Family::SpinFactor);
        }
    }

    #[test]
    fn witnesses_detect_noncone_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in all_spaces() {
            for _ in 0..50 {
                let x = space.sample_gaussian(&mut rng);
                match space.dual_witness(&x, DEFAULT_TOL) {
                    Some(p) => {
                        assert!(in_cone(&p, 1e-12));
                        assert!(in_dual_cone(&x, &p).unwrap() < 0.0);
                    }
                    None => assert!(in_cone(&x, DEFAULT_TOL)),
                }
            }
        }
    }
}
