//! Operations as indexed families of general actions, quantum instruments,
//! and probabilistic mixing of general actions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cone::{ConeSpace, Element, Family};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Reserved label of padding outcomes.
pub const VOID_LABEL: &str = "void";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    pub element: Element,
}

impl Outcome {
    pub fn new(label: impl Into<String>, element: Element) -> Outcome {
        Outcome {
            label: label.into(),
            element,
        }
    }
}

/// One choice of general action: a system together with its possible
/// recorded outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralAction {
    label: String,
    system: ConeSpace,
    outcomes: Vec<Outcome>,
}

impl GeneralAction {
    /// Builds an action, requiring every outcome to lie in the positive cone
    /// within `tol`.
    pub fn new(
        label: impl Into<String>,
        system: ConeSpace,
        outcomes: Vec<Outcome>,
        tol: f64,
    ) -> Result<GeneralAction> {
        let action = Self::new_unchecked(label, system, outcomes)?;
        for o in &action.outcomes {
            let margin = o.element.cone_margin();
            if margin < -tol {
                return Err(Error::NotInCone {
                    label: o.label.clone(),
                    min_value: margin,
                });
            }
        }
        Ok(action)
    }

    /// Builds an action without the positivity check. Structural invariants
    /// (nonempty, unique labels, matching spaces) are still enforced.
    pub fn new_unchecked(
        label: impl Into<String>,
        system: ConeSpace,
        outcomes: Vec<Outcome>,
    ) -> Result<GeneralAction> {
        let label = label.into();
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument(format!("action `{label}` has no outcomes")));
        }
        let mut seen = HashSet::new();
        for o in &outcomes {
            if !seen.insert(o.label.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate outcome label `{}` in action `{label}`",
                    o.label
                )));
            }
            if o.element.space() != &system {
                return Err(Error::DimensionMismatch {
                    expected: system.dim(),
                    found: o.element.space().dim(),
                });
            }
        }
        Ok(GeneralAction {
            label,
            system,
            outcomes,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn system(&self) -> &ConeSpace {
        &self.system
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// `Σ_i A[i]`.
    pub fn outcome_sum(&self) -> Element {
        self.outcomes.iter().fold(self.system.zero(), |acc, o| {
            acc.combine(1.0, &o.element, 1.0).expect("same space")
        })
    }

    pub fn scaled(&self, factor: f64) -> GeneralAction {
        GeneralAction {
            label: self.label.clone(),
            system: self.system.clone(),
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome::new(o.label.clone(), o.element.scale(factor)))
                .collect(),
        }
    }
}

/// Appends never-triggered zero outcomes until the action has `count` outcomes.
pub fn pad_outcomes(a: &GeneralAction, count: usize) -> Result<GeneralAction> {
    let current = a.outcomes.len();
    if count < current {
        return Err(Error::InvalidArgument(format!(
            "cannot pad {current} outcomes down to {count}"
        )));
    }
    let mut outcomes = a.outcomes.clone();
    for k in current..count {
        let label = if k == current {
            VOID_LABEL.to_string()
        } else {
            format!("{VOID_LABEL}{}", k - current)
        };
        outcomes.push(Outcome::new(label, a.system.zero()));
    }
    Ok(GeneralAction {
        label: a.label.clone(),
        system: a.system.clone(),
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    name: String,
    actions: Vec<GeneralAction>,
}

impl Operation {
    pub fn new(name: impl Into<String>, actions: Vec<GeneralAction>) -> Result<Operation> {
        let name = name.into();
        if actions.is_empty() {
            return Err(Error::InvalidArgument(format!("operation `{name}` has no actions")));
        }
        let mut seen = HashSet::new();
        for a in &actions {
            if !seen.insert(a.label.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate action label `{}` in operation `{name}`",
                    a.label
                )));
            }
        }
        Ok(Operation { name, actions })
    }

    /// Single-action convenience constructor.
    pub fn single(name: impl Into<String>, action: GeneralAction) -> Operation {
        Operation {
            name: name.into(),
            actions: vec![action],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self) -> &[GeneralAction] {
        &self.actions
    }

    pub fn action(&self, label: &str) -> Option<&GeneralAction> {
        self.actions.iter().find(|a| a.label == label)
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.label == label)
    }

    pub(crate) fn map_actions(&self, f: impl Fn(&GeneralAction) -> GeneralAction) -> Operation {
        Operation {
            name: self.name.clone(),
            actions: self.actions.iter().map(f).collect(),
        }
    }
}

/// A quantum instrument given by the Choi operators
/// `J_i = Σ_{jk} |j⟩⟨k| ⊗ E_i(|j⟩⟨k|)` of its branches, input factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumInstrument {
    input_dim: usize,
    output_dim: usize,
    choi_operators: Vec<CMatrix>,
}

impl QuantumInstrument {
    pub fn new(input_dim: usize, output_dim: usize, choi_operators: Vec<CMatrix>) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::InvalidArgument("instrument dimensions must be positive".into()));
        }
        if choi_operators.is_empty() {
            return Err(Error::InvalidArgument("instrument has no branches".into()));
        }
        let d = input_dim * output_dim;
        for j in &choi_operators {
            if j.nrows() != d || j.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: j.nrows(),
                });
            }
            if linalg::hermitian_defect(j) > 1e-12 {
                return Err(Error::InvalidArgument("Choi operator is not Hermitian".into()));
            }
        }
        Ok(QuantumInstrument {
            input_dim,
            output_dim,
            choi_operators,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn choi_operators(&self) -> &[CMatrix] {
        &self.choi_operators
    }

    /// Whether the branches sum to a trace-preserving map:
    /// `Tr_out Σ_i J_i = I_in`.
    pub fn is_channel_normalized(&self, tol: f64) -> bool {
        let sum = self
            .choi_operators
            .iter()
            .fold(CMatrix::zeros(self.input_dim * self.output_dim, self.input_dim * self.output_dim), |acc, j| acc + j);
        let reduced = linalg::partial_trace_second(&sum, self.input_dim, self.output_dim);
        (reduced - linalg::identity(self.input_dim)).norm() <= tol
    }
}

/// Converts an instrument into a general action on the composite
/// input ⊗ output system. Outcomes are labelled `0, 1, …`.
pub fn instrument_to_action(
    label: impl Into<String>,
    q: &QuantumInstrument,
    tol: f64,
) -> Result<GeneralAction> {
    let system = ConeSpace::composite_of(Family::QuantumComplex, &[q.input_dim, q.output_dim])?;
    let mut outcomes = Vec::with_capacity(q.choi_operators.len());
    for (i, j) in q.choi_operators.iter().enumerate() {
        let min = linalg::min_eigenvalue(j);
        if min < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        outcomes.push(Outcome::new(i.to_string(), system.element_from_matrix(j)?));
    }
    GeneralAction::new_unchecked(label, system, outcomes)
}

/// A binary probabilistic mixture of two actions on the same system.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    action_a: GeneralAction,
    action_b: GeneralAction,
    w_a: f64,
    w_b: f64,
}

impl Mixture {
    pub fn new(action_a: GeneralAction, action_b: GeneralAction, w_a: f64, w_b: f64) -> Result<Self> {
        if action_a.system != action_b.system {
            return Err(Error::InvalidArgument("mixed actions must share a system".into()));
        }
        if action_a.outcomes.len() != action_b.outcomes.len() {
            return Err(Error::InvalidArgument(
                "mixed actions must have equal outcome counts (pad first)".into(),
            ));
        }
        if !(w_a >= 0.0 && w_b >= 0.0 && w_a + w_b > 0.0) {
            return Err(Error::InvalidArgument(
                "mixing weights must be nonnegative with positive sum".into(),
            ));
        }
        Ok(Mixture {
            action_a,
            action_b,
            w_a,
            w_b,
        })
    }

    pub fn action_a(&self) -> &GeneralAction {
        &self.action_a
    }

    pub fn action_b(&self) -> &GeneralAction {
        &self.action_b
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.w_a, self.w_b)
    }

    /// The single action whose outcome `i` is
    /// `w_A·w̄_B·A[i] + w_B·w̄_A·B[i]`, given the total weights `w̄_A`, `w̄_B`
    /// the two actions receive in the surrounding setup. Outcome labels are
    /// taken from `action_a`.
    pub fn realize(&self, label: impl Into<String>, w_bar_a: f64, w_bar_b: f64) -> Result<GeneralAction> {
        let ca = self.w_a * w_bar_b;
        let cb = self.w_b * w_bar_a;
        let outcomes = self
            .action_a
            .outcomes
            .iter()
            .zip(&self.action_b.outcomes)
            .map(|(a, b)| Ok(Outcome::new(a.label.clone(), a.element.combine(ca, &b.element, cb)?)))
            .collect::<Result<Vec<_>>>()?;
        GeneralAction::new_unchecked(label, self.action_a.system.clone(), outcomes)
    }
}

/// Predicted weights of a mixture from the weights of its two components:
/// `w_A·w̄_B·w(i|A) + w_B·w̄_A·w(i|B)`.
pub fn mix(m: &Mixture, weights_a: &[f64], weights_b: &[f64]) -> Result<Vec<f64>> {
    mix_weights(m.w_a, weights_a, m.w_b, weights_b)
}

pub fn mix_weights(w_a: f64, weights_a: &[f64], w_b: f64, weights_b: &[f64]) -> Result<Vec<f64>> {
    if weights_a.len() != weights_b.len() {
        return Err(Error::DimensionMismatch {
            expected: weights_a.len(),
            found: weights_b.len(),
        });
    }
    let bar_a: f64 = weights_a.iter().sum();
    let bar_b: f64 = weights_b.iter().sum();
    Ok(weights_a
        .iter()
        .zip(weights_b)
        .map(|(a, b)| w_a * bar_b * a + w_b * bar_a * b)
        .collect())
}

/// n-ary mixing by left folding binary mixtures. Each entry is a mixing
/// weight and the component's weight vector.
pub fn mix_all(components: &[(f64, Vec<f64>)]) -> Result<Vec<f64>> {
    let (first, rest) = components
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("nothing to mix".into()))?;
    let mut acc_w = first.0;
    let mut acc = first.1.clone();
    for (w, weights) in rest {
        acc = mix_weights(acc_w, &acc, *w, weights)?;
        acc_w += w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::normalize;
    use crate::linalg::{c, real_matrix};

    fn qubit_measurement() -> GeneralAction {
        let q = ConeSpace::quantum(2);
        GeneralAction::new(
            "z",
            q.clone(),
            vec![
                Outcome::new("0", q.element_from_matrix(&real_matrix(2, 2, &[1., 0., 0., 0.])).unwrap()),
                Outcome::new("1", q.element_from_matrix(&real_matrix(2, 2, &[0., 0., 0., 1.])).unwrap()),
            ],
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn padding() {
        let a = qubit_measurement();
        let p = pad_outcomes(&a, 3).unwrap();
        assert_eq!(p.outcomes().len(), 3);
        assert_eq!(p.outcomes()[2].label, VOID_LABEL);
        assert!(p.outcomes()[2].element.is_zero());
        assert_eq!(pad_outcomes(&a, 2).unwrap(), a);
        assert!(pad_outcomes(&a, 1).is_err());
        let p4 = pad_outcomes(&a, 4).unwrap();
        assert_eq!(p4.outcomes()[3].label, "void1");
    }

    #[test]
    fn action_invariants() {
        let q = ConeSpace::quantum(2);
        let neg = q.element_from_matrix(&linalg::pauli_z()).unwrap();
        assert!(matches!(
            GeneralAction::new("bad", q.clone(), vec![Outcome::new("0", neg.clone())], 1e-9),
            Err(Error::NotInCone { .. })
        ));
        assert!(GeneralAction::new_unchecked("ok", q.clone(), vec![Outcome::new("0", neg.clone())]).is_ok());
        assert!(GeneralAction::new_unchecked(
            "dup",
            q.clone(),
            vec![Outcome::new("0", q.zero()), Outcome::new("0", q.zero())]
        )
        .is_err());
        assert!(GeneralAction::new_unchecked("empty", q.clone(), vec![]).is_err());
        let a = qubit_measurement();
        assert!(Operation::new("op", vec![a.clone(), a.clone()]).is_err());
        assert!(Operation::new("op", vec![]).is_err());
    }

    #[test]
    fn identity_channel_instrument() {
        let phi = linalg::projector(&linalg::phi_plus(2));
        let q = QuantumInstrument::new(2, 2, vec![phi]).unwrap();
        assert!(q.is_channel_normalized(1e-12));
        let a = instrument_to_action("id", &q, 1e-9).unwrap();
        assert_eq!(a.system().dim(), 16);
        assert_eq!(a.outcomes().len(), 1);
        assert!(crate::cone::in_cone(&a.outcomes()[0].element, 1e-9));
    }

    #[test]
    fn measure_and_reprepare_instrument() {
        let p0 = real_matrix(2, 2, &[1., 0., 0., 0.]);
        let p1 = real_matrix(2, 2, &[0., 0., 0., 1.]);
        let q = QuantumInstrument::new(2, 2, vec![linalg::kron(&p0, &p0), linalg::kron(&p1, &p1)]).unwrap();
        assert!(q.is_channel_normalized(1e-12));
        let a = instrument_to_action("mr", &q, 1e-9).unwrap();
        assert_eq!(a.outcomes().len(), 2);
    }

    #[test]
    fn transpose_map_is_not_cp() {
        let q = QuantumInstrument::new(2, 2, vec![linalg::swap(2)]).unwrap();
        match instrument_to_action("t", &q, 1e-9) {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut nonherm = linalg::identity(4);
        nonherm[(0, 1)] = c(1.0, 0.0);
        assert!(QuantumInstrument::new(2, 2, vec![nonherm]).is_err());
    }

    #[test]
    fn mixing_examples() {
        let out = mix_weights(1.0, &[1.0, 0.0], 1.0, &[0.0, 2.0]).unwrap();
        assert_eq!(out, vec![2.0, 2.0]);
        let t = normalize(&out).unwrap();
        assert_eq!(t.probabilities(), vec![0.5, 0.5]);

        let only_a = mix_weights(0.7, &[3.0, 1.0], 0.0, &[5.0, 5.0]).unwrap();
        assert!((only_a[0] / only_a[1] - 3.0).abs() < 1e-15);

        // Rescaling one component leaves the normalized mixture unchanged.
        let wa = [0.2, 0.5, 0.3];
        let wb = [1.0, 0.0, 4.0];
        let wb10: Vec<f64> = wb.iter().map(|x| 10.0 * x).collect();
        let p1 = normalize(&mix_weights(0.3, &wa, 0.9, &wb).unwrap()).unwrap();
        let p2 = normalize(&mix_weights(0.3, &wa, 0.9, &wb10).unwrap()).unwrap();
        for (x, y) in p1.probabilities().iter().zip(p2.probabilities()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(mix_weights(1.0, &[1.0], 1.0, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mixture_validation() {
        let a = qubit_measurement();
        let b = pad_outcomes(&a, 3).unwrap();
        assert!(Mixture::new(a.clone(), b, 1.0, 1.0).is_err());
        assert!(Mixture::new(a.clone(), a.clone(), 0.0, 0.0).is_err());
        assert!(Mixture::new(a.clone(), a.clone(), -1.0, 2.0).is_err());
        assert!(Mixture::new(a.clone(), a, 0.0, 1.0).is_ok());
    }

    #[test]
    fn mix_all_folds_binary_mixing() {
        let a = vec![1.0, 2.0];
        let b = vec![0.5, 0.5];
        let two = mix_all(&[(1.0, a.clone()), (2.0, b.clone())]).unwrap();
        assert_eq!(two, mix_weights(1.0, &a, 2.0, &b).unwrap());
        assert!(mix_all(&[]).is_err());
    }
}
