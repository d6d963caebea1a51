//! Network evaluation for the modified Oreshkov-Cerf theory.
//!
//! A network is a hypergraph: nodes are operations with one chosen general
//! action each, hyperedges are wires (two subsystems joined by the
//! unnormalized maximally entangled projector `|Φ⁺⟩⟨Φ⁺|`, `Φ⁺ = Σ_k |kk⟩`) or
//! whole correlations covering the complete systems of several nodes.
//!
//! The weight of an outcome tuple is `Tr[(M_i ⊗ N_j ⊗ …) W_wires]` with every
//! wire acting on its two endpoint subsystems. Since `⟨Φ⁺| A ⊗ B |Φ⁺⟩ =
//! Tr[Aᵀ B]`, the trace is computed by summing, for every assignment of a
//! basis index to each wire on the ket side and on the bra side, the product
//! of the matrix entries each event sees at its permuted local indices.
//! Connected components of the hypergraph contribute independent factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{ConeSpace, Element, Family, DEFAULT_TOL};
use crate::correlations::{Correlation, ProbabilityTable};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::operations::{GeneralAction, Operation};

/// Upper bound on the number of materialized outcome tuples.
pub const MAX_OUTCOME_TUPLES: usize = 1_000_000;

/// One end of a wire: `(operation index, action label, subsystem index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub operation: usize,
    pub action: String,
    pub subsystem: usize,
}

impl Endpoint {
    pub fn new(operation: usize, action: impl Into<String>, subsystem: usize) -> Endpoint {
        Endpoint {
            operation,
            action: action.into(),
            subsystem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub a: Endpoint,
    pub b: Endpoint,
}

impl Wire {
    pub fn new(a: Endpoint, b: Endpoint) -> Wire {
        Wire { a, b }
    }

    pub fn swapped(&self) -> Wire {
        Wire {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// A correlation used as a hyperedge over the full systems of `operations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEdge {
    pub correlation: Correlation,
    pub operations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub operation: Operation,
    pub choice: usize,
}

impl Node {
    pub fn new(operation: Operation, action: &str) -> Result<Node> {
        let choice = operation.action_index(action).ok_or_else(|| {
            Error::Network(format!("operation `{}` has no action `{action}`", operation.name()))
        })?;
        Ok(Node { operation, choice })
    }

    /// The operation's first action.
    pub fn first(operation: Operation) -> Node {
        Node { operation, choice: 0 }
    }

    pub fn action(&self) -> &GeneralAction {
        &self.operation.actions()[self.choice]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<Node>,
    wires: Vec<Wire>,
    correlations: Vec<CorrelationEdge>,
}

fn endpoint_name(nodes: &[Node], e: &Endpoint) -> String {
    match nodes.get(e.operation) {
        Some(n) => format!("{}.{}.{}", n.operation.name(), e.action, e.subsystem),
        None => format!("#{}.{}.{}", e.operation, e.action, e.subsystem),
    }
}

impl Network {
    pub fn new(nodes: Vec<Node>, wires: Vec<Wire>, correlations: Vec<CorrelationEdge>) -> Result<Network> {
        let mut covered: Vec<Vec<u32>> = nodes
            .iter()
            .map(|n| vec![0; n.action().system().factors().len()])
            .collect();
        for w in &wires {
            let mut dims = [0usize; 2];
            for (slot, e) in [&w.a, &w.b].into_iter().enumerate() {
                let name = endpoint_name(&nodes, e);
                let node = nodes
                    .get(e.operation)
                    .ok_or_else(|| Error::Network(format!("wire endpoint {name}: no such operation")))?;
                if node.action().label() != e.action {
                    return Err(Error::Network(format!(
                        "wire endpoint {name}: action `{}` is not the chosen action `{}`",
                        e.action,
                        node.action().label()
                    )));
                }
                let system = node.action().system();
                if !system.family().is_matrix() {
                    return Err(Error::Network(format!(
                        "wire endpoint {name}: {} systems cannot be wired",
                        system.family()
                    )));
                }
                let dim = *system.factors().get(e.subsystem).ok_or_else(|| {
                    Error::Network(format!("wire endpoint {name}: no such subsystem"))
                })?;
                covered[e.operation][e.subsystem] += 1;
                dims[slot] = dim;
            }
            let fa = nodes[w.a.operation].action().system().family();
            let fb = nodes[w.b.operation].action().system().family();
            if dims[0] != dims[1] || fa != fb {
                return Err(Error::WireDimensionMismatch {
                    a: endpoint_name(&nodes, &w.a),
                    dim_a: dims[0],
                    b: endpoint_name(&nodes, &w.b),
                    dim_b: dims[1],
                });
            }
        }
        for ce in &correlations {
            if ce.operations.len() != ce.correlation.arity() {
                return Err(Error::Network("correlation arity does not match its operations".into()));
            }
            for (space, &op) in ce.correlation.spaces().iter().zip(&ce.operations) {
                let node = nodes
                    .get(op)
                    .ok_or_else(|| Error::Network(format!("correlation references operation #{op}")))?;
                let sys = node.action().system();
                if sys.family() != space.family() || sys.dim() != space.dim() {
                    return Err(Error::Network(format!(
                        "correlation space {space} does not match system {sys} of `{}`",
                        node.operation.name()
                    )));
                }
                covered[op].iter_mut().for_each(|c| *c += 1);
            }
        }
        for (i, cov) in covered.iter().enumerate() {
            for (s, &count) in cov.iter().enumerate() {
                let name = format!("{}.{}.{}", nodes[i].operation.name(), nodes[i].action().label(), s);
                match count {
                    0 => return Err(Error::UncoveredSubsystem(name)),
                    1 => {}
                    _ => return Err(Error::Network(format!("subsystem {name} is covered {count} times"))),
                }
            }
        }
        let tuples = nodes
            .iter()
            .try_fold(1usize, |acc, n| acc.checked_mul(n.action().outcomes().len()))
            .unwrap_or(usize::MAX);
        if tuples > MAX_OUTCOME_TUPLES {
            return Err(Error::TooManyOutcomes(tuples));
        }
        Ok(Network {
            nodes,
            wires,
            correlations,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn correlations(&self) -> &[CorrelationEdge] {
        &self.correlations
    }

    /// Hyperedges as lists of `(operation, subsystem)` vertices.
    pub fn hyperedges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut edges: Vec<Vec<(usize, usize)>> = self
            .wires
            .iter()
            .map(|w| vec![(w.a.operation, w.a.subsystem), (w.b.operation, w.b.subsystem)])
            .collect();
        for ce in &self.correlations {
            edges.push(
                ce.operations
                    .iter()
                    .flat_map(|&op| (0..self.nodes[op].action().system().factors().len()).map(move |s| (op, s)))
                    .collect(),
            );
        }
        edges
    }

    /// Same network with the chosen action of `operation` replaced.
    pub fn with_action(&self, operation: usize, action: GeneralAction) -> Result<Network> {
        let mut nodes = self.nodes.clone();
        let node = nodes
            .get_mut(operation)
            .ok_or_else(|| Error::Network(format!("no operation #{operation}")))?;
        let old_label = node.action().label().to_string();
        let label = action.label().to_string();
        let mut actions = node.operation.actions().to_vec();
        actions[node.choice] = action;
        node.operation = Operation::new(node.operation.name(), actions)?;
        let wires = self
            .wires
            .iter()
            .map(|w| {
                let mut w = w.clone();
                for e in [&mut w.a, &mut w.b] {
                    if e.operation == operation && e.action == old_label {
                        e.action = label.clone();
                    }
                }
                w
            })
            .collect();
        Network::new(nodes, wires, self.correlations.clone())
    }

    /// Same network with operation `operation` replaced (same chosen index).
    pub fn with_operation(&self, operation: usize, op: Operation) -> Result<Network> {
        let mut nodes = self.nodes.clone();
        let node = nodes
            .get_mut(operation)
            .ok_or_else(|| Error::Network(format!("no operation #{operation}")))?;
        node.operation = op;
        Network::new(nodes, self.wires.clone(), self.correlations.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub tolerance: f64,
    pub strict_oc_normalization: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tolerance: DEFAULT_TOL,
            strict_oc_normalization: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionNormalization {
    pub action: String,
    /// `Tr M̄` with `M̄ = Σ_i M_i`.
    pub trace: f64,
    /// Product of subsystem dimensions.
    pub expected: f64,
    pub satisfied: bool,
    pub singular_null: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub operation: String,
    pub actions: Vec<ActionNormalization>,
}

impl NormalizationReport {
    pub fn satisfied(&self) -> bool {
        self.actions.iter().all(|a| a.satisfied)
    }

    pub fn has_singular_null(&self) -> bool {
        self.actions.iter().any(|a| a.singular_null)
    }

    pub fn flags(&self) -> Vec<String> {
        self.actions
            .iter()
            .filter(|a| a.singular_null)
            .map(|a| format!("{}.{}: singular null operation", self.operation, a.action))
            .collect()
    }
}

/// Compares `Tr M̄` against `d^A d^B ⋯` for every action of `op`.
pub fn check_oc_normalization(op: &Operation) -> NormalizationReport {
    let actions = op
        .actions()
        .iter()
        .map(|a| {
            let bar = a.outcome_sum();
            let unit = a.system().order_unit();
            let trace: f64 = bar.coords().iter().zip(unit.coords()).map(|(x, y)| x * y).sum();
            let expected = a.system().matrix_size() as f64;
            let singular_null = bar.norm() == 0.0 || trace == 0.0;
            ActionNormalization {
                action: a.label().to_string(),
                trace,
                expected,
                satisfied: !singular_null && (trace - expected).abs() <= 1e-9 * expected,
                singular_null,
            }
        })
        .collect();
    NormalizationReport {
        operation: op.name().to_string(),
        actions,
    }
}

/// Multiplies every outcome of every action by `lambda > 0`.
pub fn rescale_operation(op: &Operation, lambda: f64) -> Result<Operation> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("rescale factor must be positive, got {lambda}")));
    }
    Ok(op.map_actions(|a| a.scaled(lambda)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub table: ProbabilityTable,
    pub normalization: Vec<NormalizationReport>,
}

impl EvaluationResult {
    pub fn flags(&self) -> Vec<String> {
        self.normalization.iter().flat_map(NormalizationReport::flags).collect()
    }
}

pub fn evaluate(n: &Network) -> Result<EvaluationResult> {
    evaluate_with(n, &EvalOptions::default())
}

pub fn evaluate_with(n: &Network, opts: &EvalOptions) -> Result<EvaluationResult> {
    let normalization: Vec<NormalizationReport> =
        n.nodes.iter().map(|node| check_oc_normalization(&node.operation)).collect();
    for node in &n.nodes {
        for o in node.action().outcomes() {
            let margin = o.element.cone_margin();
            if margin < -opts.tolerance {
                return Err(Error::NotInCone {
                    label: format!("{}.{}.{}", node.operation.name(), node.action().label(), o.label),
                    min_value: margin,
                });
            }
        }
    }
    if opts.strict_oc_normalization {
        for (node, report) in n.nodes.iter().zip(&normalization) {
            let a = &report.actions[node.choice];
            if !a.satisfied {
                return Err(Error::InvalidArgument(format!(
                    "{}.{}: Tr of outcome sum is {} but the convention requires {}",
                    report.operation, a.action, a.trace, a.expected
                )));
            }
        }
    }

    let outcome_counts: Vec<usize> = n.nodes.iter().map(|x| x.action().outcomes().len()).collect();
    let components = components(n);
    let tables: Vec<Vec<f64>> = components
        .iter()
        .map(|comp| comp.weights(n))
        .collect::<Result<_>>()?;

    let total: usize = outcome_counts.iter().product();
    let mut outcomes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n.nodes.len()];
    let scale = tables
        .iter()
        .map(|t| t.iter().fold(0.0f64, |m, w| m.max(w.abs())))
        .product::<f64>()
        .max(1.0);
    for _ in 0..total {
        let mut w = 1.0;
        for (comp, table) in components.iter().zip(&tables) {
            w *= table[comp.local_index(&idx, &outcome_counts)];
        }
        if w < 0.0 {
            if w < -1e-12 * scale {
                return Err(Error::Network(format!("negative probability weight {w:e}")));
            }
            w = 0.0;
        }
        outcomes.push(
            idx.iter()
                .zip(&n.nodes)
                .map(|(&i, node)| node.action().outcomes()[i].label.clone())
                .collect(),
        );
        weights.push(w);
        // advance the odometer, last operation fastest
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < outcome_counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    let table = ProbabilityTable::from_weights(outcomes, weights)?;
    Ok(EvaluationResult { table, normalization })
}

/// A connected set of nodes with a single weight table over their joint outcomes.
enum Component {
    Wires(WireComponent),
    Correlation { edge: usize, nodes: Vec<usize> },
}

struct WireComponent {
    nodes: Vec<usize>,
    /// For each wire configuration `k` (row-major over `wire_dims`), each
    /// node's local basis index.
    local: Vec<Vec<usize>>,
    configs: usize,
}

impl Component {
    fn nodes(&self) -> &[usize] {
        match self {
            Component::Wires(w) => &w.nodes,
            Component::Correlation { nodes, .. } => nodes,
        }
    }

    fn local_index(&self, idx: &[usize], counts: &[usize]) -> usize {
        self.nodes().iter().fold(0, |acc, &nd| acc * counts[nd] + idx[nd])
    }

    fn sub_tuples(&self, n: &Network) -> Vec<Vec<usize>> {
        let counts: Vec<usize> = self.nodes().iter().map(|&nd| n.nodes[nd].action().outcomes().len()).collect();
        let total: usize = counts.iter().product();
        (0..total)
            .map(|mut flat| {
                let mut t = vec![0; counts.len()];
                for k in (0..counts.len()).rev() {
                    t[k] = flat % counts[k];
                    flat /= counts[k];
                }
                t
            })
            .collect()
    }

    fn weights(&self, n: &Network) -> Result<Vec<f64>> {
        let tuples = self.sub_tuples(n);
        match self {
            Component::Correlation { edge, nodes } => {
                let corr = &n.correlations[*edge].correlation;
                tuples
                    .iter()
                    .map(|t| {
                        let elems: Vec<&Element> = t
                            .iter()
                            .zip(nodes)
                            .map(|(&i, &nd)| &n.nodes[nd].action().outcomes()[i].element)
                            .collect();
                        corr.apply(&elems)
                    })
                    .collect()
            }
            Component::Wires(wc) => {
                let mats: Vec<Vec<CMatrix>> = wc
                    .nodes
                    .iter()
                    .map(|&nd| {
                        n.nodes[nd]
                            .action()
                            .outcomes()
                            .iter()
                            .map(|o| o.element.to_matrix())
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(tuples
                    .par_iter()
                    .map(|t| {
                        let events: Vec<&CMatrix> = t.iter().zip(&mats).map(|(&i, m)| &m[i]).collect();
                        wc.trace(&events)
                    })
                    .collect())
            }
        }
    }
}

impl WireComponent {
    /// `Σ_{k,l} Π_node M_node[local(k), local(l)]`.
    fn trace(&self, events: &[&CMatrix]) -> f64 {
        let mut acc = c(0.0, 0.0);
        for k in 0..self.configs {
            for l in 0..self.configs {
                let mut prod = c(1.0, 0.0);
                for (pos, m) in events.iter().enumerate() {
                    prod *= m[(self.local[k][pos], self.local[l][pos])];
                    if prod == c(0.0, 0.0) {
                        break;
                    }
                }
                acc += prod;
            }
        }
        acc.re
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn components(n: &Network) -> Vec<Component> {
    let count = n.nodes.len();
    let mut parent: Vec<usize> = (0..count).collect();
    for w in &n.wires {
        let (ra, rb) = (find(&mut parent, w.a.operation), find(&mut parent, w.b.operation));
        parent[ra] = rb;
    }
    let mut in_corr = vec![None; count];
    for (e, ce) in n.correlations.iter().enumerate() {
        for &op in &ce.operations {
            in_corr[op] = Some(e);
        }
    }
    let mut out = Vec::new();
    for (e, ce) in n.correlations.iter().enumerate() {
        out.push(Component::Correlation {
            edge: e,
            nodes: ce.operations.clone(),
        });
    }
    let mut seen = vec![false; count];
    for start in 0..count {
        if in_corr[start].is_some() || seen[start] {
            continue;
        }
        let root = find(&mut parent, start);
        let nodes: Vec<usize> = (0..count)
            .filter(|&x| in_corr[x].is_none() && find(&mut parent, x) == root)
            .collect();
        nodes.iter().for_each(|&x| seen[x] = true);
        out.push(Component::Wires(wire_component(n, nodes)));
    }
    out
}

fn wire_component(n: &Network, nodes: Vec<usize>) -> WireComponent {
    let wires: Vec<&Wire> = n
        .wires
        .iter()
        .filter(|w| nodes.contains(&w.a.operation))
        .collect();
    let wire_dims: Vec<usize> = wires
        .iter()
        .map(|w| n.nodes[w.a.operation].action().system().factors()[w.a.subsystem])
        .collect();
    let configs: usize = wire_dims.iter().product();
    // For each node subsystem, the wire that covers it.
    let mut covering: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&nd| vec![usize::MAX; n.nodes[nd].action().system().factors().len()])
        .collect();
    for (wi, w) in wires.iter().enumerate() {
        for e in [&w.a, &w.b] {
            let pos = nodes.iter().position(|&x| x == e.operation).expect("same component");
            covering[pos][e.subsystem] = wi;
        }
    }
    let mut local = Vec::with_capacity(configs);
    let mut assignment = vec![0usize; wire_dims.len()];
    for _ in 0..configs {
        let row: Vec<usize> = nodes
            .iter()
            .enumerate()
            .map(|(pos, &nd)| {
                let factors = n.nodes[nd].action().system().factors();
                covering[pos]
                    .iter()
                    .zip(factors)
                    .fold(0, |acc, (&wi, &dim)| acc * dim + assignment[wi])
            })
            .collect();
        local.push(row);
        for k in (0..assignment.len()).rev() {
            assignment[k] += 1;
            if assignment[k] < wire_dims[k] {
                break;
            }
            assignment[k] = 0;
        }
    }
    WireComponent { nodes, local, configs }
}

/// Helper for building quantum events from matrices.
pub fn quantum_action(
    label: &str,
    subsystem_dims: &[usize],
    outcomes: Vec<(&str, CMatrix)>,
) -> Result<GeneralAction> {
    let system = ConeSpace::composite_of(Family::QuantumComplex, subsystem_dims)?;
    let outs = outcomes
        .into_iter()
        .map(|(l, m)| Ok(crate::operations::Outcome::new(l, system.element_from_matrix(&m)?)))
        .collect::<Result<Vec<_>>>()?;
    GeneralAction::new(label, system, outs, DEFAULT_TOL)
}
