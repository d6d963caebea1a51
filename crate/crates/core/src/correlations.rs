//! Positive multilinear functionals over operational spaces, pairings and
//! the conversion of probability weights into absolute probabilities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{ConeSpace, Element, Family};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub use crate::ocb::{ocb_demo, OcbReport};

/// Default number of sampled cone tuples for positivity checks.
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 10_000;

/// A multilinear functional `D: O_1 × … × O_k → R` stored as a dense
/// coefficient tensor (row-major, first space slowest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    spaces: Vec<ConeSpace>,
    coefficients: Vec<f64>,
    /// Set when the functional is `Tr[W (X_1 ⊗ … ⊗ X_k)]` for a PSD `W`,
    /// which certifies positivity on products of cone elements.
    psd_certificate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub certified: bool,
    pub samples: usize,
    pub min_value: f64,
    pub tolerance: f64,
}

impl PositivityReport {
    pub fn positive(&self) -> bool {
        self.certified || self.min_value >= -self.tolerance
    }
}

impl Correlation {
    pub fn new(spaces: Vec<ConeSpace>, coefficients: Vec<f64>) -> Result<Correlation> {
        if spaces.is_empty() {
            return Err(Error::InvalidArgument("correlation needs at least one space".into()));
        }
        let expected: usize = spaces.iter().map(ConeSpace::dim).product();
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coefficients.len(),
            });
        }
        Ok(Correlation {
            spaces,
            coefficients,
            psd_certificate: false,
        })
    }

    /// The functional `(X_1, …, X_k) ↦ Re Tr[W (X_1 ⊗ … ⊗ X_k)]` for an
    /// operator `W` on the joint Hilbert space of matrix-family spaces.
    pub fn from_operator(spaces: Vec<ConeSpace>, w: &CMatrix, tol: f64) -> Result<Correlation> {
        if spaces.iter().any(|s| !s.family().is_matrix()) {
            return Err(Error::InvalidArgument(
                "operator correlations need matrix-family spaces".into(),
            ));
        }
        let size: usize = spaces.iter().map(ConeSpace::matrix_size).product();
        if w.nrows() != size || w.ncols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: w.nrows(),
            });
        }
        let bases: Vec<Vec<CMatrix>> = spaces
            .iter()
            .map(|s| s.basis().iter().map(|e| e.to_matrix().expect("matrix family")).collect())
            .collect();
        let dims: Vec<usize> = spaces.iter().map(ConeSpace::dim).collect();
        let total: usize = dims.iter().product();
        let wt = w.transpose();
        let mut coefficients = Vec::with_capacity(total);
        for flat in 0..total {
            let idx = unflatten(flat, &dims);
            let mut prod = bases[0][idx[0]].clone();
            for (k, &i) in idx.iter().enumerate().skip(1) {
                prod = linalg::kron(&prod, &bases[k][i]);
            }
            // Tr(W K) = Σ_ij W_ji K_ij
            let tr: f64 = wt.iter().zip(prod.iter()).map(|(a, b)| (a * b).re).sum();
            coefficients.push(tr);
        }
        let psd_certificate =
            linalg::hermitian_defect(w) <= 1e-12 && linalg::min_eigenvalue(w) >= -tol;
        Ok(Correlation {
            spaces,
            coefficients,
            psd_certificate,
        })
    }

    /// The identity functional on a trivial system.
    pub fn unit(space: ConeSpace) -> Result<Correlation> {
        if !space.is_trivial() {
            return Err(Error::InvalidArgument("unit correlation needs a trivial system".into()));
        }
        Ok(Correlation {
            spaces: vec![space],
            coefficients: vec![1.0],
            psd_certificate: true,
        })
    }

    pub fn arity(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[ConeSpace] {
        &self.spaces
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn has_psd_certificate(&self) -> bool {
        self.psd_certificate
    }

    /// Multilinear contraction with one element per space.
    pub fn apply(&self, elems: &[&Element]) -> Result<f64> {
        if elems.len() != self.spaces.len() {
            return Err(Error::DimensionMismatch {
                expected: self.spaces.len(),
                found: elems.len(),
            });
        }
        for (s, e) in self.spaces.iter().zip(elems) {
            if e.space().dim() != s.dim() || e.space().family() != s.family() {
                return Err(Error::DimensionMismatch {
                    expected: s.dim(),
                    found: e.space().dim(),
                });
            }
        }
        // Contract the last index first.
        let mut current = self.coefficients.clone();
        for e in elems.iter().rev() {
            let x = e.coords();
            let d = x.len();
            current = current
                .chunks_exact(d)
                .map(|chunk| chunk.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect();
        }
        Ok(current[0])
    }

    /// Sampled positivity check over products of extremal cone elements,
    /// short-circuited by a PSD operator certificate.
    pub fn verify_positivity<R: Rng + ?Sized>(&self, samples: usize, tol: f64, rng: &mut R) -> PositivityReport {
        if self.psd_certificate {
            return PositivityReport {
                certified: true,
                samples: 0,
                min_value: 0.0,
                tolerance: tol,
            };
        }
        let mut min_value = f64::INFINITY;
        for _ in 0..samples {
            let elems: Vec<Element> = self.spaces.iter().map(|s| s.sample_extremal(rng)).collect();
            let refs: Vec<&Element> = elems.iter().collect();
            let v = self.apply(&refs).expect("sampled from own spaces");
            min_value = min_value.min(v);
        }
        PositivityReport {
            certified: false,
            samples,
            min_value,
            tolerance: tol,
        }
    }

    /// `‖C − C^T‖_F` of a bilinear coefficient matrix (factor swap).
    pub fn asymmetry_norm(&self) -> Option<f64> {
        if self.arity() != 2 || self.spaces[0].dim() != self.spaces[1].dim() {
            return None;
        }
        let d = self.spaces[0].dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let diff = self.coefficients[i * d + j] - self.coefficients[j * d + i];
                acc += diff * diff;
            }
        }
        Some(acc.sqrt())
    }
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx
}

/// Correlation on the concatenated space lists with outer-product coefficients.
pub fn product_correlation(c1: &Correlation, c2: &Correlation) -> Correlation {
    let mut spaces = c1.spaces.clone();
    spaces.extend(c2.spaces.iter().cloned());
    let coefficients = c1
        .coefficients
        .iter()
        .flat_map(|a| c2.coefficients.iter().map(move |b| a * b))
        .collect();
    Correlation {
        spaces,
        coefficients,
        psd_certificate: c1.psd_certificate && c2.psd_certificate,
    }
}

/// Status of one pairing property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingFlag {
    /// `None` when the property cannot be assessed (undefined composite).
    pub holds: Option<bool>,
    pub evidence: String,
}

/// A bipartite correlation between a space and its copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub base: Correlation,
    pub symmetric: PairingFlag,
    pub distinguishing: PairingFlag,
    pub factorizable: PairingFlag,
}

impl Pairing {
    pub fn space(&self) -> &ConeSpace {
        &self.base.spaces[0]
    }

    /// `C(x, y')`.
    pub fn pair(&self, x: &Element, y: &Element) -> Result<f64> {
        self.base.apply(&[x, y])
    }

    /// Wraps an arbitrary bilinear correlation on `s × s`; the symmetry flag
    /// is computed exactly, the other two are left unassessed.
    pub fn from_correlation(base: Correlation) -> Result<Pairing> {
        let asym = base
            .asymmetry_norm()
            .ok_or_else(|| Error::InvalidArgument("pairing needs a bilinear form on a space and its copy".into()))?;
        Ok(Pairing {
            base,
            symmetric: PairingFlag {
                holds: Some(asym == 0.0),
                evidence: format!("asymmetry norm {asym:e}"),
            },
            distinguishing: PairingFlag {
                holds: None,
                evidence: "not assessed".into(),
            },
            factorizable: PairingFlag {
                holds: None,
                evidence: "not assessed".into(),
            },
        })
    }
}

/// The self-dualizing pairing of a supported family: the Euclidean form in
/// the fixed basis, which is the dot product, the trace form `Tr(AB)` or the
/// Euclidean form on `R^{n+1}`.
pub fn canonical_pairing(s: &ConeSpace) -> Pairing {
    let d = s.dim();
    let mut coefficients = vec![0.0; d * d];
    for i in 0..d {
        coefficients[i * d + i] = 1.0;
    }
    let form = match s.family() {
        Family::Classical => "dot product",
        Family::QuantumComplex | Family::QuantumReal => "trace form Tr(AB)",
        Family::SpinFactor => "Euclidean form on R^(n+1)",
    };
    let factorizable = match s.composite(s) {
        Ok(_) => PairingFlag {
            holds: Some(true),
            evidence: format!("{form} is multiplicative on product elements"),
        },
        Err(e) => PairingFlag {
            holds: None,
            evidence: e.to_string(),
        },
    };
    Pairing {
        base: Correlation {
            spaces: vec![s.clone(), s.clone()],
            coefficients,
            psd_certificate: false,
        },
        symmetric: PairingFlag {
            holds: Some(true),
            evidence: "identity coefficient matrix, asymmetry norm 0".into(),
        },
        distinguishing: PairingFlag {
            holds: Some(true),
            evidence: format!("{form} self-dualizes the {} cone", s.family()),
        },
        factorizable,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub outcome: Vec<String>,
    pub weight: f64,
    pub probability: f64,
}

/// Probability weights together with their normalized probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub rows: Vec<ProbabilityRow>,
    pub total_weight: f64,
}

impl ProbabilityTable {
    pub fn from_weights(outcomes: Vec<Vec<String>>, weights: Vec<f64>) -> Result<ProbabilityTable> {
        if outcomes.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: outcomes.len(),
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "probability weights must be finite and nonnegative, got {w}"
            )));
        }
        let total_weight: f64 = weights.iter().sum();
        if total_weight <= 0.0 {
            return Err(Error::UnphysicalSetup);
        }
        let rows = outcomes
            .into_iter()
            .zip(weights)
            .map(|(outcome, weight)| ProbabilityRow {
                outcome,
                weight,
                probability: weight / total_weight,
            })
            .collect();
        Ok(ProbabilityTable { rows, total_weight })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.probability).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weight).collect()
    }

    pub fn probability_of(&self, outcome: &[&str]) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.outcome.iter().map(String::as_str).eq(outcome.iter().copied()))
            .map(|r| r.probability)
    }
}

/// Normalizes a weight vector; outcome labels are the indices.
pub fn normalize(weights: &[f64]) -> Result<ProbabilityTable> {
    let outcomes = (0..weights.len()).map(|i| vec![i.to_string()]).collect();
    ProbabilityTable::from_weights(outcomes, weights.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::product_element;
    use crate::linalg::real_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn proj(k: usize) -> Element {
        let mut m = [0.0; 4];
        m[k * 3] = 1.0;
        ConeSpace::quantum(2).element_from_matrix(&real_matrix(2, 2, &m)).unwrap()
    }

    #[test]
    fn trace_pairing_on_projectors() {
        let p = canonical_pairing(&ConeSpace::quantum(2));
        assert!((p.pair(&proj(0), &proj(0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.pair(&proj(0), &proj(1)).unwrap(), 0.0);
    }

    #[test]
    fn apply_matches_dense_trace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = ConeSpace::quantum(3);
        let p = canonical_pairing(&s);
        for _ in 0..50 {
            let a = s.sample_gaussian(&mut rng);
            let b = s.sample_gaussian(&mut rng);
            let (ma, mb) = (a.to_matrix().unwrap(), b.to_matrix().unwrap());
            let mut tr = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    tr += (ma[(i, k)] * mb[(k, i)]).re;
                }
            }
            assert!((p.pair(&a, &b).unwrap() - tr).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_rejects_mismatches() {
        let p = canonical_pairing(&ConeSpace::quantum(2));
        assert!(p.base.apply(&[&proj(0)]).is_err());
        let q3 = ConeSpace::quantum(3).order_unit();
        assert!(p.base.apply(&[&proj(0), &q3]).is_err());
        assert!(Correlation::new(vec![ConeSpace::quantum(2)], vec![1.0; 3]).is_err());
    }

    #[test]
    fn product_correlation_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = ConeSpace::quantum(2);
        let c1 = canonical_pairing(&s).base;
        let c2 = canonical_pairing(&s).base;
        let prod = product_correlation(&c1, &c2);
        assert_eq!(prod.arity(), 4);
        let comp = s.composite(&s).unwrap();
        let joint = canonical_pairing(&comp);
        for _ in 0..100 {
            let xs: Vec<Element> = (0..4).map(|_| s.sample_gaussian(&mut rng)).collect();
            let lhs = prod.apply(&[&xs[0], &xs[1], &xs[2], &xs[3]]).unwrap();
            let rhs = c1.apply(&[&xs[0], &xs[1]]).unwrap() * c2.apply(&[&xs[2], &xs[3]]).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
            // Same value as the composite trace pairing on product elements.
            let a = product_element(&xs[0], &xs[2]).unwrap();
            let b = product_element(&xs[1], &xs[3]).unwrap();
            let j = joint.pair(&a, &b).unwrap();
            assert!((lhs - j).abs() < 1e-12 * (1.0 + j.abs()));
        }
    }

    #[test]
    fn unit_correlation_is_neutral() {
        let s = ConeSpace::quantum(2);
        let c1 = canonical_pairing(&s).base;
        let one = Correlation::unit(ConeSpace::quantum(1)).unwrap();
        let prod = product_correlation(&c1, &one);
        assert_eq!(prod.coefficients(), c1.coefficients());
        assert!(Correlation::unit(s).is_err());
    }

    #[test]
    fn sampled_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = ConeSpace::quantum(2);
        let c = canonical_pairing(&s).base;
        let report = c.verify_positivity(2000, 1e-9, &mut rng);
        assert!(report.positive() && !report.certified);
        let neg = Correlation::new(c.spaces().to_vec(), c.coefficients().iter().map(|x| -x).collect()).unwrap();
        assert!(!neg.verify_positivity(200, 1e-9, &mut rng).positive());
        let prod = product_correlation(&c, &c);
        assert!(prod.verify_positivity(500, 1e-9, &mut rng).positive());
    }

    #[test]
    fn operator_correlation_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let q = ConeSpace::quantum(2);
        let w = ConeSpace::quantum(4).sample_interior(&mut rng).to_matrix().unwrap();
        let corr = Correlation::from_operator(vec![q.clone(), q.clone()], &w, 1e-9).unwrap();
        assert!(corr.has_psd_certificate());
        for _ in 0..20 {
            let a = q.sample_gaussian(&mut rng);
            let b = q.sample_gaussian(&mut rng);
            let k = linalg::kron(&a.to_matrix().unwrap(), &b.to_matrix().unwrap());
            let direct = (&w * k).trace().re;
            assert!((corr.apply(&[&a, &b]).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 2.0]).unwrap().probabilities(), vec![0.5, 0.5]);
        assert_eq!(normalize(&[3.0, 0.0, 1.0]).unwrap().probabilities(), vec![0.75, 0.0, 0.25]);
        assert_eq!(normalize(&[0.0, 0.0]), Err(Error::UnphysicalSetup));
        assert!(normalize(&[-1.0, 2.0]).is_err());
        let t = normalize(&[0.1, 0.7, 0.2]).unwrap();
        assert!((t.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn skewed_pairing_is_not_symmetric() {
        let s = ConeSpace::quantum(2);
        let mut coeffs = canonical_pairing(&s).base.coefficients().to_vec();
        coeffs[1] += 0.25;
        let p = Pairing::from_correlation(Correlation::new(vec![s.clone(), s], coeffs).unwrap()).unwrap();
        assert_eq!(p.symmetric.holds, Some(false));
    }
}
