//! Theory files (TOML) and machine-readable reports (JSON).
//!
//! The grammar is documented in `docs/theory-format.md`.

use std::collections::HashMap;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::cone::{ConeKind, ConeSpace, Element, Family, DEFAULT_TOL};
use crate::correlations::Correlation;
use crate::error::{Error, Result};
use crate::evaluator::{CorrelationEdge, EvalOptions, Endpoint, Network, Node, Wire};
use crate::linalg::{self, c, CMatrix};
use crate::operations::{GeneralAction, Operation, Outcome};

/// Tolerance on `‖M − M†‖` for matrices read from files.
pub const HERMITIAN_TOL: f64 = 1e-12;

fn default_tolerance() -> f64 {
    DEFAULT_TOL
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub strict_oc_normalization: bool,
}

impl Default for OptionsDoc {
    fn default() -> Self {
        OptionsDoc {
            tolerance: DEFAULT_TOL,
            seed: 0,
            strict_oc_normalization: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub name: String,
    pub family: String,
    pub n: usize,
}

/// Matrix rows of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub label: String,
    pub systems: Vec<String>,
    pub outcomes: Vec<OutcomeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen: Option<String>,
    pub actions: Vec<ActionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireDoc {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationDoc {
    pub name: String,
    pub spaces: Vec<Vec<String>>,
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperedgeDoc {
    pub correlation: String,
    pub operations: Vec<String>,
}

/// The raw document, mirroring the file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryDoc {
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: OptionsDoc,
    #[serde(default)]
    pub systems: Vec<SystemDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operations: Vec<OperationDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wires: Vec<WireDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<CorrelationDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hyperedges: Vec<HyperedgeDoc>,
}

impl TheoryDoc {
    pub fn from_toml(text: &str, origin: &str) -> Result<TheoryDoc> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let loc = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("{origin}:{line}")
                }
                None => origin.to_string(),
            };
            Error::parse(loc, msg)
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSystem {
    pub name: String,
    pub space: ConeSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCorrelation {
    pub name: String,
    pub systems: Vec<Vec<String>>,
    pub correlation: Correlation,
    pub operator: CMatrix,
}

/// A validated theory instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub origin: String,
    pub options: OptionsDoc,
    pub systems: Vec<NamedSystem>,
    pub operations: Vec<Operation>,
    /// Index of the chosen action of each operation.
    pub chosen: Vec<usize>,
    pub wires: Vec<Wire>,
    pub correlations: Vec<NamedCorrelation>,
    /// `(correlation index, operation indices)`.
    pub hyperedges: Vec<(usize, Vec<usize>)>,
}

impl Theory {
    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            tolerance: self.options.tolerance,
            strict_oc_normalization: self.options.strict_oc_normalization,
        }
    }

    pub fn system(&self, name: &str) -> Option<&ConeSpace> {
        self.systems.iter().find(|s| s.name == name).map(|s| &s.space)
    }

    pub fn correlation(&self, name: &str) -> Option<&NamedCorrelation> {
        self.correlations.iter().find(|c| c.name == name)
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|o| o.name() == name)
    }

    /// The network of chosen actions joined by the declared wires and
    /// correlation hyperedges.
    pub fn network(&self) -> Result<Network> {
        let nodes = self
            .operations
            .iter()
            .zip(&self.chosen)
            .map(|(op, &choice)| Node {
                operation: op.clone(),
                choice,
            })
            .collect();
        let edges = self
            .hyperedges
            .iter()
            .map(|(ci, ops)| CorrelationEdge {
                correlation: self.correlations[*ci].correlation.clone(),
                operations: ops.clone(),
            })
            .collect();
        Network::new(nodes, self.wires.clone(), edges).map_err(|e| self.locate(e))
    }

    fn locate(&self, e: Error) -> Error {
        match e {
            Error::Parse { .. } => e,
            other => Error::parse(self.origin.clone(), other.to_string()),
        }
    }
}

pub fn parse_theory(text: &str, origin: &str) -> Result<Theory> {
    let doc = TheoryDoc::from_toml(text, origin)?;
    validate_theory(&doc, origin)
}

pub fn read_theory(path: &Path) -> Result<Theory> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_theory(&text, &path.display().to_string())
}

fn matrix_from_doc(doc: &MatrixDoc, size: usize, loc: &str) -> Result<CMatrix> {
    if doc.len() != size {
        return Err(Error::parse(loc, format!("matrix has {} rows, expected {size}", doc.len())));
    }
    let mut m = CMatrix::zeros(size, size);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != size {
            return Err(Error::parse(
                format!("{loc}[{i}]"),
                format!("row has {} entries, expected {size}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            if !(e[0].is_finite() && e[1].is_finite()) {
                return Err(Error::parse(format!("{loc}[{i}][{j}]"), "non-finite entry"));
            }
            m[(i, j)] = c(e[0], e[1]);
        }
    }
    let defect = linalg::hermitian_defect(&m);
    if defect > HERMITIAN_TOL {
        let (i, j) = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .max_by(|&(a, b), &(p, q)| {
                (m[(a, b)] - m[(b, a)].conj())
                    .norm()
                    .total_cmp(&(m[(p, q)] - m[(q, p)].conj()).norm())
            })
            .expect("nonempty");
        return Err(Error::parse(
            format!("{loc}[{i}][{j}]"),
            format!("non-Hermitian matrix (asymmetry norm {defect:e})"),
        ));
    }
    Ok(m)
}

fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn check_real_family(m: &CMatrix, family: Family, loc: &str) -> Result<()> {
    if family == Family::QuantumComplex {
        return Ok(());
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)].im != 0.0 {
                return Err(Error::parse(
                    format!("{loc}[{i}][{j}]"),
                    format!("imaginary part must be 0 for the {family} family"),
                ));
            }
            if family == Family::Classical && i != j && m[(i, j)].re != 0.0 {
                return Err(Error::parse(
                    format!("{loc}[{i}][{j}]"),
                    "classical matrices must be diagonal",
                ));
            }
        }
    }
    Ok(())
}

fn resolve_space(
    names: &[String],
    systems: &HashMap<&str, ConeSpace>,
    loc: &str,
) -> Result<ConeSpace> {
    if names.is_empty() {
        return Err(Error::parse(loc, "at least one system is required"));
    }
    let mut spaces = Vec::with_capacity(names.len());
    for (k, n) in names.iter().enumerate() {
        let s = systems
            .get(n.as_str())
            .ok_or_else(|| Error::parse(format!("{loc}[{k}]"), format!("unresolved system name `{n}`")))?;
        spaces.push(s.clone());
    }
    let mut acc = spaces[0].clone();
    for s in &spaces[1..] {
        acc = acc.composite(s).map_err(|e| Error::parse(loc, e.to_string()))?;
    }
    Ok(acc)
}

fn parse_endpoint(
    text: &str,
    op_index: &HashMap<&str, usize>,
    ops: &[Operation],
    loc: &str,
) -> Result<Endpoint> {
    let parts: Vec<&str> = text.split('.').collect();
    if parts.len() != 3 {
        return Err(Error::parse(loc, format!("endpoint `{text}` must be operation.action.subsystem")));
    }
    let &oi = op_index
        .get(parts[0])
        .ok_or_else(|| Error::parse(loc, format!("unresolved operation `{}`", parts[0])))?;
    if ops[oi].action(parts[1]).is_none() {
        return Err(Error::parse(loc, format!("operation `{}` has no action `{}`", parts[0], parts[1])));
    }
    let sub: usize = parts[2]
        .parse()
        .map_err(|_| Error::parse(loc, format!("bad subsystem index `{}`", parts[2])))?;
    Ok(Endpoint::new(oi, parts[1], sub))
}

pub fn validate_theory(doc: &TheoryDoc, origin: &str) -> Result<Theory> {
    let opts = doc.options.clone();
    let tol = opts.tolerance;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::parse(format!("{origin}: options.tolerance"), "tolerance must be a nonnegative number"));
    }

    let mut systems = Vec::new();
    let mut by_name: HashMap<&str, ConeSpace> = HashMap::new();
    for (i, s) in doc.systems.iter().enumerate() {
        let loc = format!("{origin}: systems[{i}]");
        let family = Family::from_keyword(&s.family)
            .ok_or_else(|| Error::parse(format!("{loc}.family"), format!("unknown family `{}`", s.family)))?;
        let space = ConeSpace::new(ConeKind::new(family, s.n)).map_err(|e| Error::parse(format!("{loc}.n"), e.to_string()))?;
        if by_name.insert(s.name.as_str(), space.clone()).is_some() {
            return Err(Error::parse(format!("{loc}.name"), format!("duplicate system `{}`", s.name)));
        }
        systems.push(NamedSystem {
            name: s.name.clone(),
            space,
        });
    }

    let mut operations = Vec::new();
    for (i, od) in doc.operations.iter().enumerate() {
        let oloc = format!("{origin}: operations[{i}]");
        let mut actions = Vec::new();
        for (j, ad) in od.actions.iter().enumerate() {
            let aloc = format!("{oloc}.actions[{j}]");
            let space = resolve_space(&ad.systems, &by_name, &format!("{aloc}.systems"))?;
            let mut outcomes = Vec::new();
            for (k, outd) in ad.outcomes.iter().enumerate() {
                let loc = format!("{aloc}.outcomes[{k}]");
                let element = outcome_element(outd, &space, &loc)?;
                if opts.strict_oc_normalization {
                    let margin = element.cone_margin();
                    if margin < -tol {
                        return Err(Error::parse(
                            loc,
                            format!("outcome not in the positive cone (minimum eigenvalue {margin:e})"),
                        ));
                    }
                }
                outcomes.push(Outcome::new(outd.label.clone(), element));
            }
            actions.push(
                GeneralAction::new_unchecked(ad.label.clone(), space, outcomes)
                    .map_err(|e| Error::parse(aloc.clone(), e.to_string()))?,
            );
        }
        operations.push(Operation::new(od.name.clone(), actions).map_err(|e| Error::parse(oloc.clone(), e.to_string()))?);
    }
    let mut op_index = HashMap::new();
    for (i, op) in operations.iter().enumerate() {
        if op_index.insert(op.name(), i).is_some() {
            return Err(Error::parse(
                format!("{origin}: operations[{i}].name"),
                format!("duplicate operation `{}`", op.name()),
            ));
        }
    }

    let mut wires = Vec::new();
    for (i, wd) in doc.wires.iter().enumerate() {
        let loc = format!("{origin}: wires[{i}]");
        let a = parse_endpoint(&wd.a, &op_index, &operations, &format!("{loc}.a"))?;
        let b = parse_endpoint(&wd.b, &op_index, &operations, &format!("{loc}.b"))?;
        for (e, name) in [(&a, &wd.a), (&b, &wd.b)] {
            let dims = operations[e.operation].action(&e.action).expect("checked").system().factors();
            if e.subsystem >= dims.len() {
                return Err(Error::parse(loc.clone(), format!("endpoint `{name}` has no subsystem {}", e.subsystem)));
            }
        }
        let da = operations[a.operation].action(&a.action).expect("checked").system().factors()[a.subsystem];
        let db = operations[b.operation].action(&b.action).expect("checked").system().factors()[b.subsystem];
        if da != db {
            return Err(Error::parse(
                loc,
                Error::WireDimensionMismatch {
                    a: wd.a.clone(),
                    dim_a: da,
                    b: wd.b.clone(),
                    dim_b: db,
                }
                .to_string(),
            ));
        }
        wires.push(Wire::new(a, b));
    }

    let mut correlations = Vec::new();
    for (i, cd) in doc.correlations.iter().enumerate() {
        let loc = format!("{origin}: correlations[{i}]");
        let spaces = cd
            .spaces
            .iter()
            .enumerate()
            .map(|(k, names)| resolve_space(names, &by_name, &format!("{loc}.spaces[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(s) = spaces.iter().find(|s| !s.family().is_matrix()) {
            return Err(Error::parse(format!("{loc}.spaces"), format!("{s} has no operator form")));
        }
        let size: usize = spaces.iter().map(ConeSpace::matrix_size).product();
        let m = matrix_from_doc(&cd.matrix, size, &format!("{loc}.matrix"))?;
        let correlation = Correlation::from_operator(spaces, &m, tol).map_err(|e| Error::parse(loc.clone(), e.to_string()))?;
        correlations.push(NamedCorrelation {
            name: cd.name.clone(),
            systems: cd.spaces.clone(),
            correlation,
            operator: m,
        });
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(operations.len());
    for (i, (od, op)) in doc.operations.iter().zip(&operations).enumerate() {
        let from_wires: Vec<&str> = wires
            .iter()
            .flat_map(|w| [&w.a, &w.b])
            .filter(|e| e.operation == i)
            .map(|e| e.action.as_str())
            .collect();
        let label = match &od.chosen {
            Some(l) => l.as_str(),
            None => from_wires.first().copied().unwrap_or(op.actions()[0].label()),
        };
        let idx = op.action_index(label).ok_or_else(|| {
            Error::parse(format!("{origin}: operations[{i}].chosen"), format!("no action `{label}`"))
        })?;
        if let Some(bad) = from_wires.iter().find(|&&l| l != label) {
            return Err(Error::parse(
                format!("{origin}: wires"),
                format!("operation `{}` is wired through `{bad}` but its chosen action is `{label}`", op.name()),
            ));
        }
        chosen.push(idx);
    }

    let mut hyperedges = Vec::new();
    for (i, hd) in doc.hyperedges.iter().enumerate() {
        let loc = format!("{origin}: hyperedges[{i}]");
        let ci = correlations
            .iter()
            .position(|c| c.name == hd.correlation)
            .ok_or_else(|| Error::parse(format!("{loc}.correlation"), format!("unresolved correlation `{}`", hd.correlation)))?;
        let ops = hd
            .operations
            .iter()
            .enumerate()
            .map(|(k, n)| {
                op_index
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::parse(format!("{loc}.operations[{k}]"), format!("unresolved operation `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        hyperedges.push((ci, ops));
    }

    Ok(Theory {
        origin: origin.to_string(),
        options: opts,
        systems,
        operations,
        chosen,
        wires,
        correlations,
        hyperedges,
    })
}

fn outcome_element(o: &OutcomeDoc, space: &ConeSpace, loc: &str) -> Result<Element> {
    match (&o.coords, &o.matrix) {
        (Some(coords), None) => space
            .element(coords.clone())
            .map_err(|e| Error::parse(format!("{loc}.coords"), e.to_string())),
        (None, Some(md)) => {
            if !space.family().is_matrix() {
                return Err(Error::parse(format!("{loc}.matrix"), "spin-factor outcomes must use `coords`"));
            }
            let mloc = format!("{loc}.matrix");
            let m = matrix_from_doc(md, space.matrix_size(), &mloc)?;
            check_real_family(&m, space.family(), &mloc)?;
            space.element_from_matrix(&m).map_err(|e| Error::parse(mloc, e.to_string()))
        }
        _ => Err(Error::parse(loc, "exactly one of `matrix` or `coords` is required")),
    }
}

/// Rebuilds a document from a validated theory. Matrix outcomes are written
/// as matrices, spin-factor outcomes as coordinates.
pub fn theory_to_doc(t: &Theory) -> TheoryDoc {
    let name_of = |space: &ConeSpace| -> Vec<String> {
        // Pick names by matching factors against declared systems.
        let mut out = Vec::new();
        for &n in space.factors() {
            let found = t
                .systems
                .iter()
                .find(|s| s.space.family() == space.family() && s.space.factors() == [n])
                .map(|s| s.name.clone())
                .unwrap_or_else(|| format!("{}{n}", space.family()));
            out.push(found);
        }
        out
    };
    TheoryDoc {
        options: t.options.clone(),
        systems: t
            .systems
            .iter()
            .map(|s| SystemDoc {
                name: s.name.clone(),
                family: s.space.family().keyword().to_string(),
                n: s.space.factors()[0],
            })
            .collect(),
        operations: t
            .operations
            .iter()
            .zip(&t.chosen)
            .map(|(op, &ch)| OperationDoc {
                name: op.name().to_string(),
                chosen: (ch != 0).then(|| op.actions()[ch].label().to_string()),
                actions: op
                    .actions()
                    .iter()
                    .map(|a| ActionDoc {
                        label: a.label().to_string(),
                        systems: name_of(a.system()),
                        outcomes: a
                            .outcomes()
                            .iter()
                            .map(|o| {
                                let (coords, matrix) = match o.element.to_matrix() {
                                    Ok(m) => (None, Some(matrix_to_doc(&m))),
                                    Err(_) => (Some(o.element.coords().to_vec()), None),
                                };
                                OutcomeDoc {
                                    label: o.label.clone(),
                                    coords,
                                    matrix,
                                }
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
        wires: t
            .wires
            .iter()
            .map(|w| {
                let ep = |e: &Endpoint| format!("{}.{}.{}", t.operations[e.operation].name(), e.action, e.subsystem);
                WireDoc { a: ep(&w.a), b: ep(&w.b) }
            })
            .collect(),
        correlations: t
            .correlations
            .iter()
            .map(|c| CorrelationDoc {
                name: c.name.clone(),
                spaces: c.systems.clone(),
                matrix: matrix_to_doc(&c.operator),
            })
            .collect(),
        hyperedges: t
            .hyperedges
            .iter()
            .map(|(ci, ops)| HyperedgeDoc {
                correlation: t.correlations[*ci].name.clone(),
                operations: ops.iter().map(|&o| t.operations[o].name().to_string()).collect(),
            })
            .collect(),
    }
}

/// Serializes a report as JSON (stable field order, shortest round-trip floats).
pub fn to_report<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_report<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("report:{}:{}", e.line(), e.column()), e.to_string()))
}

/// Bundled example files.
pub mod examples {
    pub const QUBIT_BORN: &str = include_str!("../data/qubit-born.theory");
    pub const INSTRUMENT_CHAIN: &str = include_str!("../data/instrument-chain.theory");
    pub const REBIT_PAIR: &str = include_str!("../data/rebit-pair.theory");
    pub const OCB: &str = include_str!("../data/ocb.correlation");

    pub fn all() -> [(&'static str, &'static str); 4] {
        [
            ("qubit-born.theory", QUBIT_BORN),
            ("instrument-chain.theory", INSTRUMENT_CHAIN),
            ("rebit-pair.theory", REBIT_PAIR),
            ("ocb.correlation", OCB),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::evaluate;

    #[test]
    fn qubit_born_parses_and_evaluates() {
        let t = parse_theory(examples::QUBIT_BORN, "qubit-born.theory").unwrap();
        let r = evaluate(&t.network().unwrap()).unwrap();
        assert_eq!(r.table.probabilities(), vec![1.0, 0.0]);
    }

    #[test]
    fn wire_dimension_mismatch_names_endpoints() {
        let text = "[[systems]]\nname = \"q2\"\nfamily = \"classical\"\nn = 2\n\n\
[[systems]]\nname = \"q3\"\nfamily = \"classical\"\nn = 3\n\n\
[[operations]]\nname = \"prep\"\n[[operations.actions]]\nlabel = \"rho\"\nsystems = [\"q2\"]\n\
[[operations.actions.outcomes]]\nlabel = \"0\"\ncoords = [1.0, 0.0]\n\n\
[[operations]]\nname = \"meas\"\n[[operations.actions]]\nlabel = \"z\"\nsystems = [\"q3\"]\n\
[[operations.actions.outcomes]]\nlabel = \"0\"\ncoords = [1.0, 1.0, 1.0]\n\n\
[[wires]]\na = \"prep.rho.0\"\nb = \"meas.z.0\"\n";
        let err = parse_theory(text, "bad.theory").unwrap_err().to_string();
        assert!(err.contains("wire dimension mismatch"), "{err}");
        assert!(err.contains("prep.rho.0") && err.contains("meas.z.0"), "{err}");
        assert!(err.contains("bad.theory"), "{err}");
    }

    #[test]
    fn imaginary_diagonal_is_non_hermitian() {
        let text = examples::QUBIT_BORN.replacen("[[[1.0, 0.0], [0.0, 0.0]]", "[[[0.0, 0.3], [0.0, 0.0]]", 1);
        let err = parse_theory(&text, "x.theory").unwrap_err().to_string();
        assert!(err.contains("non-Hermitian"), "{err}");
        assert!(err.contains("operations[0].actions[0].outcomes[0].matrix[0][0]"), "{err}");
    }

    #[test]
    fn unresolved_names_are_located() {
        let text = examples::QUBIT_BORN.replacen("systems = [\"qubit\"]", "systems = [\"qubyte\"]", 1);
        let err = parse_theory(&text, "x.theory").unwrap_err().to_string();
        assert!(err.contains("unresolved system name `qubyte`"), "{err}");
        assert!(err.contains("x.theory: operations[0].actions[0].systems[0]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_theory("[options]\ntolerance = \n", "s.theory").unwrap_err().to_string();
        assert!(err.starts_with("s.theory:2"), "{err}");
    }

    #[test]
    fn strict_mode_rejects_negative_outcomes() {
        let text = "[options]\nstrict_oc_normalization = true\n\n[[systems]]\nname = \"q\"\nfamily = \"quantum-complex\"\nn = 2\n\n\
[[operations]]\nname = \"o\"\n[[operations.actions]]\nlabel = \"a\"\nsystems = [\"q\"]\n[[operations.actions.outcomes]]\nlabel = \"0\"\n\
matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.1, 0.0]]]\n";
        let err = parse_theory(text, "n.theory").unwrap_err().to_string();
        assert!(err.contains("not in the positive cone"), "{err}");
        assert!(parse_theory(&text.replace("strict_oc_normalization = true", "strict_oc_normalization = false"), "n.theory").is_ok());
    }

    #[test]
    fn real_families_reject_imaginary_parts() {
        let text = "[[systems]]\nname = \"r\"\nfamily = \"quantum-real\"\nn = 2\n\n\
[[operations]]\nname = \"o\"\n[[operations.actions]]\nlabel = \"a\"\nsystems = [\"r\"]\n[[operations.actions.outcomes]]\nlabel = \"0\"\n\
matrix = [[[1.0, 0.0], [0.0, 0.5]], [[0.0, -0.5], [1.0, 0.0]]]\n";
        let err = parse_theory(text, "r.theory").unwrap_err().to_string();
        assert!(err.contains("imaginary part must be 0"), "{err}");
    }

    #[test]
    fn bundled_files_round_trip() {
        for (name, text) in examples::all() {
            let theory = parse_theory(text, name).unwrap();
            let doc = TheoryDoc::from_toml(text, name).unwrap();
            let rebuilt = theory_to_doc(&theory);
            let again = parse_theory(&rebuilt.to_toml().unwrap(), name).unwrap();
            assert_eq!(again, theory, "{name}");
            let doc2 = TheoryDoc::from_toml(&doc.to_toml().unwrap(), name).unwrap();
            assert_eq!(doc2, doc, "{name}");
        }
    }
}
