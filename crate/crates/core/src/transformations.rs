//! a-to-b transformations: linear maps that act locally on product elements
//! and keep every tested extension's cone invariant.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{ConeSpace, Element, Family};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    source: ConeSpace,
    target: ConeSpace,
    base_map: DMatrix<f64>,
    /// `J = Σ_ij |i⟩⟨j| ⊗ T(|i⟩⟨j|)`, source factor first. Always present for
    /// the complex family; for the real family it carries the action on
    /// antisymmetric blocks, which the base map alone does not fix.
    choi: Option<CMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub method: String,
    /// Smallest cone margin seen (minimum eigenvalue for matrix cones).
    pub min_value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationSpaceReport {
    pub t_ab: usize,
    pub method: String,
    /// `t_ab = d_{ab}` (dimension of the composite space).
    pub matches_composite_dim: bool,
    /// `t_ab = d_a·d_b`.
    pub matches_product_dim: bool,
}

fn check_family(a: &ConeSpace, b: &ConeSpace) -> Result<()> {
    if a.family() != b.family() {
        return Err(Error::CompositeUndefined(format!(
            "cross-family transformation {} -> {}",
            a.family(),
            b.family()
        )));
    }
    Ok(())
}

fn unit_matrix(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

impl Transformation {
    /// From a real `d_target × d_source` matrix in the fixed bases.
    pub fn new(source: ConeSpace, target: ConeSpace, base_map: DMatrix<f64>) -> Result<Self> {
        check_family(&source, &target)?;
        if base_map.nrows() != target.dim() || base_map.ncols() != source.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim() * source.dim(),
                found: base_map.nrows() * base_map.ncols(),
            });
        }
        let mut t = Transformation {
            source,
            target,
            base_map,
            choi: None,
        };
        if t.source.family() == Family::QuantumComplex {
            let base = t.clone();
            t.choi = Some(base.choi_from(|m| base.apply_complex_linear(m)));
        }
        Ok(t)
    }

    /// From a function on matrices. The function must be linear; it is
    /// evaluated on basis elements (and on matrix units for the Choi operator).
    pub fn from_matrix_fn(
        source: ConeSpace,
        target: ConeSpace,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        check_family(&source, &target)?;
        if !source.family().is_matrix() {
            return Err(Error::InvalidArgument("spin-factor maps need an explicit matrix".into()));
        }
        let mut base_map = DMatrix::zeros(target.dim(), source.dim());
        for (col, e) in source.basis().iter().enumerate() {
            let img = target.element_from_matrix(&f(&e.to_matrix()?))?;
            base_map.set_column(col, &nalgebra::DVector::from_column_slice(img.coords()));
        }
        let mut t = Transformation {
            source,
            target,
            base_map,
            choi: None,
        };
        if t.source.family() != Family::Classical {
            t.choi = Some(t.choi_from(f));
        }
        Ok(t)
    }

    fn choi_from(&self, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
        let ns = self.source.matrix_size();
        let nt = self.target.matrix_size();
        let mut j = CMatrix::zeros(ns * nt, ns * nt);
        for a in 0..ns {
            for b in 0..ns {
                let img = f(&unit_matrix(ns, a, b));
                for p in 0..nt {
                    for q in 0..nt {
                        j[(a * nt + p, b * nt + q)] = img[(p, q)];
                    }
                }
            }
        }
        j
    }

    pub fn identity(s: &ConeSpace) -> Self {
        let d = s.dim();
        let mut t = Transformation::new(s.clone(), s.clone(), DMatrix::identity(d, d)).expect("square");
        if s.family() == Family::QuantumReal {
            t = Transformation::from_matrix_fn(s.clone(), s.clone(), |m| m.clone()).expect("matrix family");
        }
        t
    }

    /// `X ↦ U X U†`.
    pub fn unitary(s: &ConeSpace, u: &CMatrix) -> Result<Self> {
        let n = s.matrix_size();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
            });
        }
        let u = u.clone();
        Transformation::from_matrix_fn(s.clone(), s.clone(), move |m| &u * m * u.adjoint())
    }

    /// `X ↦ Tr(X)·I/n`.
    pub fn depolarizing(s: &ConeSpace) -> Result<Self> {
        let n = s.matrix_size();
        Transformation::from_matrix_fn(s.clone(), s.clone(), move |m| {
            linalg::identity(n) * (m.trace() / c(n as f64, 0.0))
        })
    }

    /// `X ↦ X^T`.
    pub fn transpose(s: &ConeSpace) -> Result<Self> {
        Transformation::from_matrix_fn(s.clone(), s.clone(), |m| m.transpose())
    }

    pub fn source(&self) -> &ConeSpace {
        &self.source
    }

    pub fn target(&self) -> &ConeSpace {
        &self.target
    }

    pub fn base_map(&self) -> &DMatrix<f64> {
        &self.base_map
    }

    pub fn choi(&self) -> Option<&CMatrix> {
        self.choi.as_ref()
    }

    /// `p·self + q·other`.
    pub fn combine(&self, p: f64, other: &Transformation, q: f64) -> Result<Transformation> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::InvalidArgument("transformations must share source and target".into()));
        }
        let choi = match (&self.choi, &other.choi) {
            (Some(a), Some(b)) => Some(a.scale(p) + b.scale(q)),
            _ => None,
        };
        Ok(Transformation {
            source: self.source.clone(),
            target: self.target.clone(),
            base_map: &self.base_map * p + &other.base_map * q,
            choi,
        })
    }

    /// The unextended map `T_{a,b}`.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.space() != &self.source {
            return Err(Error::DimensionMismatch {
                expected: self.source.dim(),
                found: x.space().dim(),
            });
        }
        let v = &self.base_map * nalgebra::DVector::from_column_slice(x.coords());
        self.target.element(v.as_slice().to_vec())
    }

    /// Complex-linear extension of the base map to arbitrary matrices.
    fn apply_complex_linear(&self, m: &CMatrix) -> CMatrix {
        let herm = (m + m.adjoint()).scale(0.5);
        let anti = (m - m.adjoint()) * c(0.0, -0.5);
        let map = |h: &CMatrix| {
            let e = self.source.element_from_matrix(h).expect("source size");
            self.apply(&e).expect("source space").to_matrix().expect("matrix family")
        };
        map(&herm) + map(&anti) * c(0.0, 1.0)
    }

    /// `(T ⊗ id_c)(x)` for `x` in `source ⊗ extension`.
    pub fn apply_extended(&self, x: &Element, extension: &ConeSpace) -> Result<Element> {
        if extension.is_trivial() && x.space().dim() == self.source.dim() {
            let inner = self.source.element(x.coords().to_vec())?;
            let out = self.apply(&inner)?;
            return match self.target.composite(extension) {
                Ok(space) => space.element(out.into_coords()),
                Err(_) => Ok(out),
            };
        }
        let in_space = self.source.composite(extension)?;
        let out_space = self.target.composite(extension)?;
        if x.space().dim() != in_space.dim() || x.space().family() != in_space.family() {
            return Err(Error::DimensionMismatch {
                expected: in_space.dim(),
                found: x.space().dim(),
            });
        }
        match self.source.family() {
            Family::Classical => {
                let m = extension.dim();
                let ds = self.source.dim();
                let dt = self.target.dim();
                let xc = x.coords();
                let mut out = vec![0.0; dt * m];
                for p in 0..dt {
                    for i in 0..ds {
                        let a = self.base_map[(p, i)];
                        if a == 0.0 {
                            continue;
                        }
                        for k in 0..m {
                            out[p * m + k] += a * xc[i * m + k];
                        }
                    }
                }
                out_space.element(out)
            }
            Family::QuantumComplex | Family::QuantumReal => {
                let j = self.choi.as_ref().ok_or_else(|| {
                    Error::InvalidArgument(
                        "extension underdetermined: real-family map given without a Choi operator".into(),
                    )
                })?;
                let xm = x.to_matrix()?;
                let ns = self.source.matrix_size();
                let nt = self.target.matrix_size();
                let m = extension.matrix_size();
                let mut y = CMatrix::zeros(nt * m, nt * m);
                for i in 0..ns {
                    for jj in 0..ns {
                        for k in 0..m {
                            for l in 0..m {
                                let xv = xm[(i * m + k, jj * m + l)];
                                if xv == c(0.0, 0.0) {
                                    continue;
                                }
                                for p in 0..nt {
                                    for q in 0..nt {
                                        y[(p * m + k, q * m + l)] += xv * j[(i * nt + p, jj * nt + q)];
                                    }
                                }
                            }
                        }
                    }
                }
                out_space.element_from_matrix(&y)
            }
            Family::SpinFactor => Err(Error::CompositeUndefined(
                "spin factors have no composition rule".into(),
            )),
        }
    }

    /// Checks local action and cone preservation on `source ⊗ extension`.
    ///
    /// Matrix families with an extension at least as large as the source use
    /// the exact Choi eigenvalue test. Smaller extensions (including the
    /// trivial one) and the other families are checked on `samples` sampled
    /// cone elements of the composite.
    pub fn validate<R: Rng + ?Sized>(
        &self,
        extension: &ConeSpace,
        samples: usize,
        tol: f64,
        rng: &mut R,
    ) -> Result<ValidationReport> {
        if !extension.is_trivial() {
            check_family(&self.source, extension)?;
        }
        let exact = matches!(self.source.family(), Family::QuantumComplex | Family::QuantumReal)
            && extension.family() == self.source.family()
            && extension.matrix_size() >= self.source.matrix_size()
            && self.choi.is_some();
        if exact {
            let j = self.choi.as_ref().expect("checked");
            let defect = linalg::hermitian_defect(j);
            let min = linalg::min_eigenvalue(j);
            return Ok(ValidationReport {
                valid: defect <= tol && min >= -tol,
                method: format!("Choi eigenvalue test (Hermitian defect {defect:e})"),
                min_value: min,
                tolerance: tol,
            });
        }
        let composite = if extension.is_trivial() {
            self.source.clone()
        } else {
            self.source.composite(extension)?
        };
        let mut min_value = f64::INFINITY;
        for _ in 0..samples {
            let x = composite.sample_cone(rng);
            let y = self.apply_extended(&x, extension)?;
            min_value = min_value.min(y.cone_margin());
        }
        Ok(ValidationReport {
            valid: min_value >= -tol,
            method: format!("sampled {samples} cone elements of {composite}"),
            min_value,
            tolerance: tol,
        })
    }

    /// Validates against the default extensions: the trivial system and the
    /// target space itself.
    pub fn validate_default<R: Rng + ?Sized>(&self, samples: usize, tol: f64, rng: &mut R) -> Result<Vec<ValidationReport>> {
        let trivial = ConeSpace::new(crate::cone::ConeKind::new(
            if self.source.family() == Family::SpinFactor { Family::Classical } else { self.source.family() },
            1,
        ))?;
        let mut reports = vec![self.validate(&trivial, samples, tol, rng)?];
        reports.push(self.validate(&self.target, samples, tol, rng)?);
        Ok(reports)
    }
}

/// Dimension `t_{a,b}` of the transformation space between two systems.
pub fn transformation_space_dim(source: &ConeSpace, target: &ConeSpace) -> Result<TransformationSpaceReport> {
    let composite = source.composite(target)?;
    let n = source.matrix_size() * target.matrix_size();
    let (t_ab, method) = match source.family() {
        Family::Classical => (n, "nonnegative matrices span all d_b x d_a maps".to_string()),
        Family::QuantumComplex => (n * n, "Hermitian Choi operators on the joint space".to_string()),
        Family::QuantumReal => (n * (n + 1) / 2, "symmetric Choi operators on the joint real space".to_string()),
        Family::SpinFactor => unreachable!("composite rejected above"),
    };
    Ok(TransformationSpaceReport {
        t_ab,
        method,
        matches_composite_dim: t_ab == composite.dim(),
        matches_product_dim: t_ab == source.dim() * target.dim(),
    })
}
