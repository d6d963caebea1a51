//! Numerical audits of the structural postulates on concrete theory
//! instances. Failures are verdicts, not errors.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeSpace, Element, Family, DEFAULT_TOL};
use crate::correlations::{canonical_pairing, Pairing};
use crate::error::Result;
use crate::io::Theory;
use crate::linalg::{self, CMatrix};
use crate::transformations::transformation_space_dim;

/// Sample counts used by the audits.
pub const PAIRING_SAMPLES: usize = 1000;
pub const HOMOGENEITY_CONE_SAMPLES: usize = 100;
pub const DEFAULT_HOMOGENEITY_PAIRS: usize = 100;
pub const LINEARITY_SAMPLES: usize = 1000;
pub const BLOCH_SAMPLES: usize = 1000;
/// Residual bound for homogeneity witnesses.
pub const WITNESS_TOL: f64 = 1e-9;
/// Floor on cone-pairing values before they count as negative.
pub const PAIRING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Postulate {
    Linearity,
    Dimension,
    Pairing,
    Homogeneity,
    Qubit,
}

impl Postulate {
    pub fn keyword(self) -> &'static str {
        match self {
            Postulate::Linearity => "linearity",
            Postulate::Dimension => "dimension",
            Postulate::Pairing => "pairing",
            Postulate::Homogeneity => "homogeneity",
            Postulate::Qubit => "qubit",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Postulate> {
        Postulate::all().into_iter().find(|p| p.keyword() == s)
    }

    pub fn all() -> [Postulate; 5] {
        [
            Postulate::Linearity,
            Postulate::Dimension,
            Postulate::Pairing,
            Postulate::Homogeneity,
            Postulate::Qubit,
        ]
    }
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undefined,
}

impl Verdict {
    fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub status: Verdict,
}

impl Evidence {
    pub fn new(check: impl Into<String>, value: f64, tolerance: f64, status: Verdict) -> Evidence {
        Evidence {
            check: check.into(),
            value,
            tolerance,
            status,
        }
    }

    /// Passes when `value ≥ -tolerance`.
    fn nonneg(check: impl Into<String>, value: f64, tolerance: f64) -> Evidence {
        Evidence::new(check, value, tolerance, Verdict::from_bool(value >= -tolerance))
    }

    /// Passes when `value ≤ tolerance`.
    fn at_most(check: impl Into<String>, value: f64, tolerance: f64) -> Evidence {
        Evidence::new(check, value, tolerance, Verdict::from_bool(value <= tolerance))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub postulate: Postulate,
    pub subject: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub seed: u64,
}

impl AuditReport {
    /// Fail if any row fails, undefined if no row passes, pass otherwise.
    pub fn from_evidence(postulate: Postulate, subject: impl Into<String>, evidence: Vec<Evidence>, seed: u64) -> AuditReport {
        assert!(!evidence.is_empty(), "a verdict needs evidence");
        let verdict = if evidence.iter().any(|e| e.status == Verdict::Fail) {
            Verdict::Fail
        } else if evidence.iter().any(|e| e.status == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Undefined
        };
        AuditReport {
            postulate,
            subject: subject.into(),
            verdict,
            evidence,
            seed,
        }
    }

    pub fn evidence(&self, check: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.check == check)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [{}]: {} (seed {})", self.postulate, self.subject, self.verdict, self.seed)?;
        for e in &self.evidence {
            writeln!(f, "  {:<9} {}: {} (tol {})", e.status.to_string(), e.check, e.value, e.tolerance)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCensus {
    pub d_a: u64,
    pub d_b: u64,
    pub d_ab: u64,
    /// Equal to `d_ab` by construction: correlations are stored as dense
    /// functionals on the composite.
    pub c_ab: u64,
    pub t_ab: u64,
    pub t_ba: u64,
    pub r_ab: i64,
    pub d_bb: u64,
    pub l_ab: i64,
    /// `l_ab − t_ba`.
    pub slack: i64,
}

impl fmt::Display for DimensionCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d_a={} d_b={} d_ab={} c_ab={} t_ab={} t_ba={} r_ab={} d_bb={} l_ab={} slack={}",
            self.d_a, self.d_b, self.d_ab, self.c_ab, self.t_ab, self.t_ba, self.r_ab, self.d_bb, self.l_ab, self.slack
        )
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcomes are cone members, order units dominate sampled vectors and
/// declared correlations are positive on products of cone elements.
pub fn audit_linearity(theory: &Theory, seed: u64) -> AuditReport {
    let tol = theory.options.tolerance;
    let mut rng = rng(seed);
    let mut ev = Vec::new();
    for s in &theory.systems {
        ev.push(Evidence::new(format!("system {} dimension", s.name), s.space.dim() as f64, 0.0, Verdict::Pass));
        let u = s.space.order_unit();
        let mut worst = f64::INFINITY;
        for _ in 0..LINEARITY_SAMPLES {
            let v = s.space.sample_gaussian(&mut rng);
            let a = s.space.order_unit_bound(&v);
            let gap = u.combine(a, &v, -1.0).expect("same space");
            worst = worst.min(gap.cone_margin() / a.max(1.0));
        }
        ev.push(Evidence::nonneg(format!("system {} order unit domination", s.name), worst, tol));
    }
    for op in &theory.operations {
        for act in op.actions() {
            for o in act.outcomes() {
                ev.push(Evidence::nonneg(
                    format!("outcome {}.{}.{} cone margin", op.name(), act.label(), o.label),
                    o.element.cone_margin(),
                    tol,
                ));
            }
        }
    }
    for c in &theory.correlations {
        let r = c.correlation.verify_positivity(LINEARITY_SAMPLES, tol, &mut rng);
        let check = if r.certified {
            format!("correlation {} positive (PSD operator)", c.name)
        } else {
            format!("correlation {} minimum on sampled products", c.name)
        };
        ev.push(Evidence::new(check, r.min_value, tol, Verdict::from_bool(r.positive())));
    }
    if ev.is_empty() {
        ev.push(Evidence::new("declared systems", 0.0, 0.0, Verdict::Pass));
    }
    AuditReport::from_evidence(Postulate::Linearity, theory.origin.clone(), ev, seed)
}

/// Dimension census of the composite `a ⊗ b`.
pub fn dimension_census(a: &ConeSpace, b: &ConeSpace) -> Result<DimensionCensus> {
    let ab = a.composite(b)?;
    let bb = b.composite(b)?;
    let (d_a, d_b, d_ab, d_bb) = (a.dim() as u64, b.dim() as u64, ab.dim() as u64, bb.dim() as u64);
    let t_ab = transformation_space_dim(a, b)?.t_ab as u64;
    let t_ba = transformation_space_dim(b, a)?.t_ab as u64;
    let r_ab = d_ab as i64 - (d_a * d_b) as i64;
    let l_ab = (d_a * d_b) as i64 + r_ab * d_bb as i64;
    Ok(DimensionCensus {
        d_a,
        d_b,
        d_ab,
        c_ab: d_ab,
        t_ab,
        t_ba,
        r_ab,
        d_bb,
        l_ab,
        slack: l_ab - t_ba as i64,
    })
}

/// Passes when `d_ab = c_ab = t_ab = t_ba = d_a·d_b`; the slack row records
/// `r_ab(d_bb − 1)`, which must not be positive.
pub fn audit_dimension(a: &ConeSpace, b: &ConeSpace) -> (Option<DimensionCensus>, AuditReport) {
    let subject = format!("{a} x {b}");
    let census = match dimension_census(a, b) {
        Ok(c) => c,
        Err(e) => {
            let ev = vec![Evidence::new(format!("composite: {e}"), 0.0, 0.0, Verdict::Undefined)];
            return (None, AuditReport::from_evidence(Postulate::Dimension, subject, ev, 0));
        }
    };
    let c = census;
    let eq = |check: &str, lhs: u64, rhs: u64| {
        Evidence::new(check, lhs as f64 - rhs as f64, 0.0, Verdict::from_bool(lhs == rhs))
    };
    let ev = vec![
        Evidence::new("d_a", c.d_a as f64, 0.0, Verdict::Pass),
        Evidence::new("d_b", c.d_b as f64, 0.0, Verdict::Pass),
        Evidence::new("d_ab", c.d_ab as f64, 0.0, Verdict::Pass),
        Evidence::new("r_ab = d_ab - d_a*d_b", c.r_ab as f64, 0.0, Verdict::from_bool(c.r_ab == 0)),
        eq("c_ab - d_ab (dense representation, equal by construction)", c.c_ab, c.d_ab),
        eq("t_ab - d_ab", c.t_ab, c.d_ab),
        eq("t_ba - d_ab", c.t_ba, c.d_ab),
        Evidence::new(
            "slack - r_ab*(d_bb - 1)",
            (c.slack - c.r_ab * (c.d_bb as i64 - 1)) as f64,
            0.0,
            Verdict::from_bool(c.slack == c.r_ab * (c.d_bb as i64 - 1)),
        ),
        Evidence::new("slack = l_ab - t_ba", c.slack as f64, 0.0, Verdict::from_bool(c.slack <= 0)),
    ];
    (Some(c), AuditReport::from_evidence(Postulate::Dimension, subject, ev, 0))
}

/// Audits the canonical pairing of `s`.
pub fn audit_pairing(s: &ConeSpace, seed: u64) -> AuditReport {
    audit_pairing_with(s, &canonical_pairing(s), seed)
}

/// Symmetry (exact), positive-definiteness and the distinguishing property
/// (sampled), and factorization on the composite `s ⊗ s` for the canonical
/// pairing.
pub fn audit_pairing_with(s: &ConeSpace, pairing: &Pairing, seed: u64) -> AuditReport {
    let mut rng = rng(seed);
    let mut ev = Vec::new();
    let asym = pairing.base.asymmetry_norm().unwrap_or(f64::MAX);
    ev.push(Evidence::new("asymmetry norm ||C - C^T||", asym, 0.0, Verdict::from_bool(asym == 0.0)));

    let mut min_ratio = f64::INFINITY;
    for _ in 0..PAIRING_SAMPLES {
        let x = s.sample_gaussian(&mut rng);
        let n2 = x.norm().powi(2);
        if n2 > 0.0 {
            min_ratio = min_ratio.min(pairing.pair(&x, &x).expect("same space") / n2);
        }
    }
    ev.push(Evidence::new(
        "min C(x,x)/|x|^2 over samples",
        min_ratio,
        0.0,
        Verdict::from_bool(min_ratio > 0.0),
    ));

    // Non-cone samples must be separated by a cone witness.
    let mut found = 0;
    let mut draws = 0;
    let mut worst_witness = f64::NEG_INFINITY;
    let mut missing = 0usize;
    while found < PAIRING_SAMPLES && draws < 100 * PAIRING_SAMPLES {
        draws += 1;
        let x = s.sample_gaussian(&mut rng);
        if cone::in_cone(&x, DEFAULT_TOL) {
            continue;
        }
        found += 1;
        match s.dual_witness(&x, DEFAULT_TOL) {
            Some(w) => worst_witness = worst_witness.max(pairing.pair(&x, &w).expect("same space")),
            None => missing += 1,
        }
    }
    ev.push(Evidence::new("non-cone samples", found as f64, 0.0, Verdict::from_bool(found == PAIRING_SAMPLES)));
    ev.push(Evidence::new("non-cone samples without witness", missing as f64, 0.0, Verdict::from_bool(missing == 0)));
    ev.push(Evidence::new(
        "max C(x, witness) over non-cone samples",
        worst_witness,
        0.0,
        Verdict::from_bool(worst_witness < 0.0),
    ));

    let mut min_cone = f64::INFINITY;
    for _ in 0..PAIRING_SAMPLES {
        let x = s.sample_cone(&mut rng);
        let y = s.sample_cone(&mut rng);
        let scale = (x.norm() * y.norm()).max(1.0);
        min_cone = min_cone.min(pairing.pair(&x, &y).expect("same space") / scale);
    }
    ev.push(Evidence::nonneg("min C(x,y) over cone samples", min_cone, PAIRING_FLOOR));

    let canonical = *pairing == canonical_pairing(s);
    match (s.composite(s), canonical) {
        (Ok(ss), true) => {
            let big = canonical_pairing(&ss);
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let (x1, y1, x2, y2) = (
                    s.sample_cone(&mut rng),
                    s.sample_cone(&mut rng),
                    s.sample_cone(&mut rng),
                    s.sample_cone(&mut rng),
                );
                let lhs = big
                    .pair(
                        &cone::product_element(&x1, &x2).expect("composite defined"),
                        &cone::product_element(&y1, &y2).expect("composite defined"),
                    )
                    .expect("same space");
                let rhs = pairing.pair(&x1, &y1).expect("same space") * pairing.pair(&x2, &y2).expect("same space");
                worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            }
            ev.push(Evidence::at_most("factorization deviation on products", worst, WITNESS_TOL));
        }
        (Err(e), _) => ev.push(Evidence::new(format!("factorization: {e}"), 0.0, 0.0, Verdict::Undefined)),
        (Ok(_), false) => ev.push(Evidence::new(
            "factorization: no composite pairing supplied",
            0.0,
            0.0,
            Verdict::Undefined,
        )),
    }
    AuditReport::from_evidence(Postulate::Pairing, s.to_string(), ev, seed)
}

/// An order automorphism of a cone, with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `Z ↦ M Z M*`.
    Congruence { m: CMatrix, m_inv: CMatrix },
    /// Componentwise scaling.
    Scaling { s: Vec<f64> },
    /// A linear map on spin-factor coordinates.
    Lorentz { l: DMatrix<f64>, l_inv: DMatrix<f64> },
}

impl Witness {
    pub fn apply(&self, z: &Element) -> Element {
        self.map(z, false)
    }

    pub fn apply_inverse(&self, z: &Element) -> Element {
        self.map(z, true)
    }

    fn map(&self, z: &Element, inverse: bool) -> Element {
        let space = z.space();
        match self {
            Witness::Congruence { m, m_inv } => {
                let m = if inverse { m_inv } else { m };
                let zm = z.to_matrix().expect("matrix family");
                space.element_from_matrix(&(m * zm * m.adjoint())).expect("same size")
            }
            Witness::Scaling { s } => {
                let coords = z
                    .coords()
                    .iter()
                    .zip(s)
                    .map(|(x, k)| if inverse { x / k } else { x * k })
                    .collect();
                space.element(coords).expect("same size")
            }
            Witness::Lorentz { l, l_inv } => {
                let l = if inverse { l_inv } else { l };
                let v = l * nalgebra::DVector::from_column_slice(z.coords());
                space.element(v.as_slice().to_vec()).expect("same size")
            }
        }
    }
}

/// Lorentz boost taking `(1, 0)` to the unit-hyperboloid point `p`.
fn boost(p: &[f64]) -> DMatrix<f64> {
    let d = p.len();
    let mut b = DMatrix::identity(d, d);
    b[(0, 0)] = p[0];
    for i in 1..d {
        b[(0, i)] = p[i];
        b[(i, 0)] = p[i];
        for j in 1..d {
            b[(i, j)] += p[i] * p[j] / (1.0 + p[0]);
        }
    }
    b
}

fn lorentz_norm(x: &[f64]) -> f64 {
    let spatial: f64 = x[1..].iter().map(|v| v * v).sum();
    (x[0] * x[0] - spatial).sqrt()
}

/// An order automorphism mapping interior point `x` to interior point `y`.
pub fn homogeneity_witness(x: &Element, y: &Element) -> Witness {
    let s = x.space();
    match s.family() {
        Family::Classical => Witness::Scaling {
            s: x.coords().iter().zip(y.coords()).map(|(a, b)| b / a).collect(),
        },
        Family::QuantumComplex | Family::QuantumReal => {
            let xm = x.to_matrix().expect("matrix");
            let ym = y.to_matrix().expect("matrix");
            let x_inv_half = linalg::spectral_map(&xm, |v| 1.0 / v.sqrt());
            let x_half = linalg::spectral_map(&xm, f64::sqrt);
            let y_half = linalg::spectral_map(&ym, f64::sqrt);
            let y_inv_half = linalg::spectral_map(&ym, |v| 1.0 / v.sqrt());
            Witness::Congruence {
                m: &y_half * &x_inv_half,
                m_inv: &x_half * &y_inv_half,
            }
        }
        Family::SpinFactor => {
            let (lx, ly) = (lorentz_norm(x.coords()), lorentz_norm(y.coords()));
            let px: Vec<f64> = x.coords().iter().map(|v| v / lx).collect();
            let py: Vec<f64> = y.coords().iter().map(|v| v / ly).collect();
            let bx = boost(&px);
            let by = boost(&py);
            let bx_inv = boost(&lorentz_reverse(&px));
            let by_inv = boost(&lorentz_reverse(&py));
            Witness::Lorentz {
                l: (&by * &bx_inv) * (ly / lx),
                l_inv: (&bx * &by_inv) * (lx / ly),
            }
        }
    }
}

fn lorentz_reverse(p: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = p.iter().map(|v| -v).collect();
    q[0] = p[0];
    q
}

/// Interior samples kept away from the boundary so that witness residuals
/// measure the construction rather than conditioning.
fn well_conditioned_interior(s: &ConeSpace, rng: &mut ChaCha8Rng) -> Element {
    let u = s.order_unit();
    s.sample_interior(rng).combine(1.0, &u, 0.1).expect("same space")
}

pub fn audit_homogeneity(s: &ConeSpace, pairs: usize, seed: u64) -> AuditReport {
    let mut rng = rng(seed);
    let mut residual: f64 = 0.0;
    let mut fwd = f64::INFINITY;
    let mut back = f64::INFINITY;
    for _ in 0..pairs {
        let x = well_conditioned_interior(s, &mut rng);
        let y = well_conditioned_interior(s, &mut rng);
        let w = homogeneity_witness(&x, &y);
        let diff = w.apply(&x).combine(1.0, &y, -1.0).expect("same space");
        residual = residual.max(diff.norm());
        for _ in 0..HOMOGENEITY_CONE_SAMPLES {
            let z = s.sample_cone(&mut rng);
            let fz = w.apply(&z);
            fwd = fwd.min(fz.cone_margin() / fz.norm().max(1.0));
            let bz = w.apply_inverse(&z);
            back = back.min(bz.cone_margin() / bz.norm().max(1.0));
        }
    }
    let ev = if pairs == 0 {
        vec![Evidence::new("interior pairs", 0.0, 0.0, Verdict::Undefined)]
    } else {
        vec![
            Evidence::new("interior pairs", pairs as f64, 0.0, Verdict::Pass),
            Evidence::at_most("max residual ||phi(X) - Y||", residual, WITNESS_TOL),
            Evidence::nonneg("min relative cone margin of phi(Z)", fwd, WITNESS_TOL),
            Evidence::nonneg("min relative cone margin of phi^-1(Z)", back, WITNESS_TOL),
        ]
    };
    AuditReport::from_evidence(Postulate::Homogeneity, s.to_string(), ev, seed)
}

/// Dimension of the span of Bloch vectors of sampled pure states, with the
/// largest deviations of `Tr ρ²` and `|r|` from 1.
fn bloch_check(s: &ConeSpace, rng: &mut ChaCha8Rng) -> (usize, f64, f64) {
    let paulis = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let mut moment = Matrix3::<f64>::zeros();
    let (mut purity_dev, mut radius_dev): (f64, f64) = (0.0, 0.0);
    for _ in 0..BLOCH_SAMPLES {
        let rho = linalg::projector(&s.sample_pure_vector(rng));
        purity_dev = purity_dev.max((linalg::trace(&(&rho * &rho)).re - 1.0).abs());
        let r = Vector3::from_fn(|k, _| linalg::trace(&(&rho * &paulis[k])).re);
        radius_dev = radius_dev.max((r.norm() - 1.0).abs());
        moment += r * r.transpose() / BLOCH_SAMPLES as f64;
    }
    let rank = moment.symmetric_eigenvalues().iter().filter(|&&v| v > 1e-3).count();
    (rank, purity_dev, radius_dev)
}

/// Passes when some declared system is `QuantumComplex(2)` and its pure
/// states fill a 2-sphere in the traceless coordinates.
pub fn audit_qubit(theory: &Theory, seed: u64) -> AuditReport {
    let mut rng = rng(seed);
    let mut ev = Vec::new();
    let mut qubit_ok = false;
    for s in &theory.systems {
        let two_level = s.space.family().is_matrix() && s.space.family() != Family::Classical && s.space.factors() == [2];
        if !two_level {
            continue;
        }
        let is_qubit = s.space.family() == Family::QuantumComplex;
        let (rank, purity, radius) = bloch_check(&s.space, &mut rng);
        let sphere = rank == 3;
        qubit_ok |= is_qubit && sphere && purity <= WITNESS_TOL && radius <= WITNESS_TOL;
        ev.push(Evidence::at_most(format!("system {} max |Tr(rho^2) - 1|", s.name), purity, WITNESS_TOL));
        ev.push(Evidence::at_most(format!("system {} max ||r| - 1|", s.name), radius, WITNESS_TOL));
        ev.push(Evidence::new(
            format!("system {} Bloch span dimension", s.name),
            rank as f64,
            0.0,
            Verdict::from_bool(sphere),
        ));
    }
    let count = theory
        .systems
        .iter()
        .filter(|s| s.space == ConeSpace::quantum(2))
        .count();
    ev.push(Evidence::new("QuantumComplex(2) systems", count as f64, 0.0, Verdict::from_bool(count > 0)));
    let mut report = AuditReport::from_evidence(Postulate::Qubit, theory.origin.clone(), ev, seed);
    report.verdict = Verdict::from_bool(qubit_ok);
    report
}

/// Every unordered pair of declared systems, including each system with
/// itself.
pub fn system_pairs(theory: &Theory) -> Vec<(usize, usize)> {
    let n = theory.systems.len();
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// Runs the selected audits over a theory in a fixed order.
pub fn audit_theory(theory: &Theory, postulates: &[Postulate], seed: u64) -> Vec<AuditReport> {
    let mut out = Vec::new();
    for &p in postulates {
        match p {
            Postulate::Linearity => out.push(audit_linearity(theory, seed)),
            Postulate::Dimension => {
                for (i, j) in system_pairs(theory) {
                    let (a, b) = (&theory.systems[i], &theory.systems[j]);
                    let (_, mut r) = audit_dimension(&a.space, &b.space);
                    r.subject = format!("{} x {} ({})", a.name, b.name, r.subject);
                    r.seed = seed;
                    out.push(r);
                }
            }
            Postulate::Pairing => {
                for s in &theory.systems {
                    let mut r = audit_pairing(&s.space, seed);
                    r.subject = format!("{} ({})", s.name, r.subject);
                    out.push(r);
                }
            }
            Postulate::Homogeneity => {
                for s in &theory.systems {
                    let mut r = audit_homogeneity(&s.space, DEFAULT_HOMOGENEITY_PAIRS, seed);
                    r.subject = format!("{} ({})", s.name, r.subject);
                    out.push(r);
                }
            }
            Postulate::Qubit => out.push(audit_qubit(theory, seed)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::Correlation;
    use crate::io::{examples, parse_theory};
    use crate::linalg::real_matrix;

    #[test]
    fn census_examples() {
        let c = dimension_census(&ConeSpace::quantum(2), &ConeSpace::quantum(2)).unwrap();
        assert_eq!((c.d_ab, c.c_ab, c.t_ab, c.t_ba, c.r_ab), (16, 16, 16, 16, 0));
        let c = dimension_census(&ConeSpace::rebit(2), &ConeSpace::rebit(2)).unwrap();
        assert_eq!((c.d_ab, c.d_a * c.d_b, c.r_ab), (10, 9, 1));
        assert_eq!(c.slack, 9);
        let (_, r) = audit_dimension(&ConeSpace::rebit(2), &ConeSpace::rebit(2));
        assert_eq!(r.verdict, Verdict::Fail);
        let (c, r) = audit_dimension(&ConeSpace::classical(2), &ConeSpace::classical(3));
        assert_eq!(r.verdict, Verdict::Pass);
        let c = c.unwrap();
        assert_eq!((c.d_ab, c.t_ab, c.t_ba), (6, 6, 6));
    }

    #[test]
    fn spin_census_is_undefined() {
        let (c, r) = audit_dimension(&ConeSpace::spin(3), &ConeSpace::spin(3));
        assert!(c.is_none());
        assert_eq!(r.verdict, Verdict::Undefined);
        assert!(!r.evidence.is_empty());
    }

    #[test]
    fn pairing_verdicts() {
        let r = audit_pairing(&ConeSpace::quantum(3), 1);
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        assert!(r.evidence.iter().all(|e| e.status == Verdict::Pass));
        let r = audit_pairing(&ConeSpace::spin(3), 1);
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        let undefined: Vec<_> = r.evidence.iter().filter(|e| e.status == Verdict::Undefined).collect();
        assert_eq!(undefined.len(), 1);
        assert!(undefined[0].check.starts_with("factorization"));
    }

    #[test]
    fn skewed_pairing_fails_symmetry() {
        let s = ConeSpace::quantum(2);
        let d = s.dim();
        let mut coeffs = vec![0.0; d * d];
        for i in 0..d {
            coeffs[i * d + i] = 1.0;
        }
        coeffs[1] += 0.25;
        coeffs[2 * d + 3] -= 0.1;
        let skew = Pairing::from_correlation(Correlation::new(vec![s.clone(), s.clone()], coeffs.clone()).unwrap()).unwrap();
        let r = audit_pairing_with(&s, &skew, 3);
        assert_eq!(r.verdict, Verdict::Fail);
        let row = r.evidence("asymmetry norm ||C - C^T||").unwrap();
        let expected = (2.0 * 0.25f64.powi(2) + 2.0 * 0.1f64.powi(2)).sqrt();
        assert!((row.value - expected).abs() < 1e-15);
        assert_eq!(row.status, Verdict::Fail);
    }

    #[test]
    fn witness_examples() {
        let s = ConeSpace::quantum(2);
        let i = s.order_unit();
        let w = homogeneity_witness(&i, &i);
        match &w {
            Witness::Congruence { m, .. } => assert!((m - linalg::identity(2)).norm() < 1e-15),
            _ => panic!(),
        }
        let x = s.element_from_matrix(&real_matrix(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        let w = homogeneity_witness(&x, &i);
        match &w {
            Witness::Congruence { m, .. } => {
                assert!((m - real_matrix(2, 2, &[0.5, 0.0, 0.0, 1.0])).norm() < 1e-15)
            }
            _ => panic!(),
        }
        assert!(w.apply(&x).combine(1.0, &i, -1.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn homogeneity_passes_for_every_family() {
        for s in [ConeSpace::classical(3), ConeSpace::quantum(2), ConeSpace::rebit(3), ConeSpace::spin(4)] {
            let r = audit_homogeneity(&s, 20, 5);
            assert_eq!(r.verdict, Verdict::Pass, "{r}");
        }
    }

    #[test]
    fn spin_witness_maps_x_to_y() {
        let s = ConeSpace::spin(2);
        let x = s.element(vec![3.0, 1.0, -2.0]).unwrap();
        let y = s.element(vec![2.0, 0.5, 0.5]).unwrap();
        let w = homogeneity_witness(&x, &y);
        assert!(w.apply(&x).combine(1.0, &y, -1.0).unwrap().norm() < 1e-12);
        assert!(w.apply_inverse(&y).combine(1.0, &x, -1.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn qubit_audit() {
        let t = parse_theory(examples::QUBIT_BORN, "qubit-born.theory").unwrap();
        assert_eq!(audit_qubit(&t, 0).verdict, Verdict::Pass);
        let t = parse_theory(examples::REBIT_PAIR, "rebit-pair.theory").unwrap();
        let r = audit_qubit(&t, 0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.evidence("system r1 Bloch span dimension").unwrap().value, 2.0);
    }

    #[test]
    fn linearity_flags_negative_outcomes() {
        let t = parse_theory(examples::QUBIT_BORN, "qubit-born.theory").unwrap();
        assert_eq!(audit_linearity(&t, 0).verdict, Verdict::Pass);
        let text = examples::QUBIT_BORN.replacen("[[0.0, 0.0], [1.0, 0.0]]]", "[[0.0, 0.0], [-0.1, 0.0]]]", 1);
        let t = parse_theory(&text, "neg.theory").unwrap();
        let r = audit_linearity(&t, 0);
        assert_eq!(r.verdict, Verdict::Fail);
        let bad = r.evidence.iter().find(|e| e.status == Verdict::Fail).unwrap();
        assert!((bad.value + 0.1).abs() < 1e-15, "{r}");
    }

    #[test]
    fn same_seed_same_report() {
        let t = parse_theory(examples::REBIT_PAIR, "rebit-pair.theory").unwrap();
        let a = audit_theory(&t, &Postulate::all(), 9);
        let b = audit_theory(&t, &Postulate::all(), 9);
        assert_eq!(a, b);
    }
}
